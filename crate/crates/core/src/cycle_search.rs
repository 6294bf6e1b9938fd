//! Pseudo-cycle enumeration.
//!
//! Every branch pattern `s` determines exactly one rational Collatz cycle,
//! starting at `x0(s) = φ(s) / (2^l − 3^n)`. A pattern is *realized* by `U`
//! when the floor parity of each cycle element selects the same piece that
//! `s` prescribes, and by `Ũ` when it selects the opposite one.
//!
//! The hot path works on the integer numerators `c_i = x_i · |d|`, in `i128`
//! while the values provably fit and in `BigInt` beyond that.

use std::collections::{BTreeMap, VecDeque};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{FromPrimitive, Signed};
use rayon::prelude::*;
use rayon::ThreadPool;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use crate::bitseq::BitSeq;
use crate::exact_arith::ExactRational;
use crate::maps::MapSpec;

/// Largest length handled with `i128` numerators: every `|c_i|` is below
/// `6^l`, and `3 · 6^46` still fits.
const SMALL_LEN_MAX: usize = 46;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SweepError {
    #[error("l_max must be at least 1")]
    EmptyRange,
    #[error("l_max {0} exceeds the supported maximum of {max}", max = BitSeq::MAX_LEN - 1)]
    TooLong(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CycleClass {
    IntegerPositive,
    IntegerNegative,
    Zero,
    FractionalPositive,
    FractionalNegative,
}

impl CycleClass {
    pub const ALL: [CycleClass; 5] = [
        CycleClass::IntegerPositive,
        CycleClass::IntegerNegative,
        CycleClass::Zero,
        CycleClass::FractionalPositive,
        CycleClass::FractionalNegative,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CycleClass::IntegerPositive => "integer_positive",
            CycleClass::IntegerNegative => "integer_negative",
            CycleClass::Zero => "zero",
            CycleClass::FractionalPositive => "fractional_positive",
            CycleClass::FractionalNegative => "fractional_negative",
        }
    }
}

/// Outcome of checking a pattern against `U` or `Ũ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Realization {
    Realized,
    /// Floor parity at `x_i` selects the other piece.
    Misaligned(usize),
    /// `x_i` lies outside the map's domain.
    OutOfDomain(usize),
}

impl Realization {
    pub fn is_realized(self) -> bool {
        matches!(self, Realization::Realized)
    }

    pub fn misalign_index(self) -> Option<usize> {
        match self {
            Realization::Misaligned(i) => Some(i),
            _ => None,
        }
    }
}

/// The rational Collatz cycle generated by one branch pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleRecord {
    pub s: BitSeq,
    /// `2^l − 3^n`
    pub d: BigInt,
    /// `φ(s)`
    pub phi: BigInt,
    pub x0: ExactRational,
    /// `c_0 .. c_l` with `x_i = c_i / |d|` and `c_l = c_0`.
    pub numerators: Vec<BigInt>,
    pub class: CycleClass,
    pub realized_u: Option<Realization>,
    pub realized_uflip: Option<Realization>,
}

impl CycleRecord {
    pub fn l(&self) -> usize {
        self.s.len()
    }

    pub fn n(&self) -> usize {
        self.s.ones()
    }

    /// `|d|`, the common denominator of every cycle element.
    pub fn common_denom(&self) -> BigInt {
        self.d.abs()
    }

    /// The `l + 1` values `x_0, g(x_0), …, x_l = x_0`.
    pub fn g_cycle(&self) -> Vec<ExactRational> {
        let dd = self.common_denom();
        self.numerators
            .iter()
            .map(|c| ExactRational::new(c.clone(), dd.clone()).expect("nonzero d"))
            .collect()
    }

    pub fn is_u_cycle(&self) -> bool {
        self.realized_u.is_some_and(Realization::is_realized)
    }

    pub fn is_uflip_cycle(&self) -> bool {
        self.realized_uflip.is_some_and(Realization::is_realized)
    }
}

trait KernelInt: Clone + Integer + Signed + FromPrimitive {}
impl<T: Clone + Integer + Signed + FromPrimitive> KernelInt for T {}

struct Kernel<I> {
    d: I,
    phi: I,
    numerators: Vec<I>,
}

fn small<I: KernelInt>(v: u32) -> I {
    I::from_u32(v).expect("small constant")
}

fn run_kernel<I: KernelInt>(s: &BitSeq) -> Kernel<I> {
    let l = s.len();
    let n = s.ones();
    let two = small::<I>(2);
    let three = small::<I>(3);
    let pow = |base: &I, e: usize| (0..e).fold(I::one(), |acc, _| acc * base.clone());
    let d = pow(&two, l) - pow(&three, n);

    // φ(s): one term 2^{j-1} 3^{ones after j} per set bit s_j.
    let mut phi = I::zero();
    let mut p2 = I::one();
    let mut ones_after = n;
    let mut terms = Vec::with_capacity(n);
    for j in 1..=l {
        if s.bit(j) == 1 {
            ones_after -= 1;
            terms.push((p2.clone(), ones_after));
        }
        p2 = p2 * two.clone();
    }
    for (p2, e) in terms {
        phi = phi + p2 * pow(&three, e);
    }

    let dd = d.abs();
    let mut c = if d.is_negative() { -phi.clone() } else { phi.clone() };
    let mut numerators = Vec::with_capacity(l + 1);
    numerators.push(c.clone());
    for b in s.iter() {
        // g dispatches on numerator parity; |d| is odd so c carries it.
        assert_eq!(c.is_odd(), b == 1, "pseudo-cycle of {s} left g's dispatch");
        c = if b == 1 { (three.clone() * c + dd.clone()) / two.clone() } else { c / two.clone() };
        numerators.push(c.clone());
    }
    assert!(numerators[l] == numerators[0], "pseudo-cycle of {s} does not close");
    Kernel { d, phi, numerators }
}

/// Floor-parity alignment of `x_i = c_i / dd` against the pattern.
fn realize<I: KernelInt>(s: &BitSeq, c: &[I], dd: &I, flipped: bool) -> Realization {
    let min = if flipped { I::zero() } else { dd.clone() };
    for (i, b) in s.iter().enumerate() {
        if c[i] < min {
            return Realization::OutOfDomain(i);
        }
        let floor_odd = c[i].div_floor(dd).is_odd();
        if floor_odd != ((b == 1) != flipped) {
            return Realization::Misaligned(i);
        }
    }
    Realization::Realized
}

fn classify<I: KernelInt>(c0: &I, dd: &I) -> CycleClass {
    let integral = c0.is_multiple_of(dd);
    match (c0.is_zero(), c0.is_positive(), integral) {
        (true, _, _) => CycleClass::Zero,
        (false, true, true) => CycleClass::IntegerPositive,
        (false, false, true) => CycleClass::IntegerNegative,
        (false, true, false) => CycleClass::FractionalPositive,
        (false, false, false) => CycleClass::FractionalNegative,
    }
}

fn to_big_i128(v: &i128) -> BigInt {
    BigInt::from(*v)
}

fn build<I: KernelInt>(s: BitSeq, k: Kernel<I>, conv: impl Fn(&I) -> BigInt, checks: bool) -> CycleRecord {
    let dd = k.d.abs();
    let class = classify(&k.numerators[0], &dd);
    let (ru, rf) = if checks {
        (Some(realize(&s, &k.numerators, &dd, false)), Some(realize(&s, &k.numerators, &dd, true)))
    } else {
        (None, None)
    };
    let d = conv(&k.d);
    let phi = conv(&k.phi);
    let x0 = ExactRational::new(phi.clone(), d.clone()).expect("2^l != 3^n");
    CycleRecord {
        s,
        d,
        phi,
        x0,
        numerators: k.numerators.iter().map(conv).collect(),
        class,
        realized_u: ru,
        realized_uflip: rf,
    }
}

fn evaluate_with(s: BitSeq, checks: bool) -> CycleRecord {
    if s.len() <= SMALL_LEN_MAX {
        build(s, run_kernel::<i128>(&s), to_big_i128, checks)
    } else {
        build(s, run_kernel::<BigInt>(&s), BigInt::clone, checks)
    }
}

/// The cycle record for `s` with the realization flags unset.
pub fn candidate(s: &BitSeq) -> CycleRecord {
    evaluate_with(*s, false)
}

/// [`candidate`] plus both realization checks, computed on the integer
/// numerators.
pub fn evaluate(s: &BitSeq) -> CycleRecord {
    evaluate_with(*s, true)
}

fn check_realization(rec: &CycleRecord, map: &MapSpec) -> Realization {
    let xs = rec.g_cycle();
    for (i, b) in rec.s.iter().enumerate() {
        let Ok(branch) = map.branch_of(&xs[i]) else {
            return Realization::OutOfDomain(i);
        };
        if branch != b {
            return Realization::Misaligned(i);
        }
    }
    Realization::Realized
}

/// Does `U` follow `rec`'s pattern along its cycle? Evaluated with
/// [`MapSpec::branch_of`] on the rational cycle elements.
pub fn check_u_realization(rec: &CycleRecord) -> Realization {
    check_realization(rec, &MapSpec::u())
}

/// As [`check_u_realization`] for `Ũ`, whose even floors select piece 1.
pub fn check_uflip_realization(rec: &CycleRecord) -> Realization {
    check_realization(rec, &MapSpec::u_flip())
}

#[derive(Clone, Default)]
pub struct SweepOptions {
    /// Ranks per parallel work item.
    pub chunk: usize,
    /// Work items evaluated per refill of the output buffer.
    pub batch_chunks: usize,
    pub pool: Option<Arc<ThreadPool>>,
}

impl SweepOptions {
    pub fn with_pool(pool: Arc<ThreadPool>) -> Self {
        SweepOptions { pool: Some(pool), ..Default::default() }
    }
}

/// Exhaustive enumeration of all patterns with `1 <= l <= l_max`, in
/// `(l, rank)` order. The all-zero pattern, whose cycle is `(0, 0, …)`, is
/// emitted only once, as `"0"`.
pub struct Sweep {
    l_max: usize,
    l: usize,
    next_rank: u128,
    buffer: VecDeque<CycleRecord>,
    opts: SweepOptions,
}

pub fn sweep(l_max: usize) -> Result<Sweep, SweepError> {
    Sweep::new(l_max, SweepOptions::default())
}

impl Sweep {
    pub fn new(l_max: usize, mut opts: SweepOptions) -> Result<Self, SweepError> {
        if l_max == 0 {
            return Err(SweepError::EmptyRange);
        }
        if l_max >= BitSeq::MAX_LEN {
            return Err(SweepError::TooLong(l_max));
        }
        if opts.chunk == 0 {
            opts.chunk = 1 << 12;
        }
        if opts.batch_chunks == 0 {
            opts.batch_chunks = 16;
        }
        Ok(Sweep { l_max, l: 1, next_rank: 0, buffer: VecDeque::new(), opts })
    }

    /// Number of records a full sweep emits.
    pub fn total(l_max: usize) -> u128 {
        (1..=l_max).map(|l| (1u128 << l) - 1).sum::<u128>() + 1
    }

    fn refill(&mut self) {
        let mut ranges = Vec::new();
        while ranges.len() < self.opts.batch_chunks && self.l <= self.l_max {
            let end = 1u128 << self.l;
            let stop = (self.next_rank + self.opts.chunk as u128).min(end);
            ranges.push((self.l, self.next_rank, stop));
            self.next_rank = stop;
            if stop == end {
                self.l += 1;
                self.next_rank = 1;
            }
        }
        if ranges.is_empty() {
            return;
        }
        let work = || -> Vec<Vec<CycleRecord>> {
            ranges
                .par_iter()
                .map(|&(l, lo, hi)| {
                    (lo..hi)
                        .map(|r| evaluate(&BitSeq::from_rank(l, r).expect("rank in range")))
                        .collect()
                })
                .collect()
        };
        let chunks = match &self.opts.pool {
            Some(pool) => pool.install(work),
            None => work(),
        };
        self.buffer.extend(chunks.into_iter().flatten());
    }
}

impl Iterator for Sweep {
    type Item = CycleRecord;

    fn next(&mut self) -> Option<CycleRecord> {
        if self.buffer.is_empty() {
            self.refill();
        }
        self.buffer.pop_front()
    }
}

/// A pattern realized by `U` that is not a cycle of integers, or any pattern
/// realized by `Ũ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Hit {
    pub bits: BitSeq,
    pub x0: ExactRational,
    pub class: CycleClass,
}

/// Running tallies over a stream of records.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SweepSummary {
    pub records: u64,
    pub per_class: BTreeMap<CycleClass, u64>,
    pub realized_u: Vec<Hit>,
    pub realized_uflip: Vec<Hit>,
}

impl SweepSummary {
    pub fn add(&mut self, rec: &CycleRecord) {
        self.records += 1;
        *self.per_class.entry(rec.class).or_default() += 1;
        let hit = || Hit { bits: rec.s, x0: rec.x0.clone(), class: rec.class };
        if rec.is_u_cycle() {
            self.realized_u.push(hit());
        }
        if rec.is_uflip_cycle() {
            self.realized_uflip.push(hit());
        }
    }

    /// `U`-cycles through non-integers and all `Ũ`-cycles.
    pub fn counterexamples(&self) -> Vec<&Hit> {
        self.realized_u
            .iter()
            .filter(|h| h.class != CycleClass::IntegerPositive)
            .chain(self.realized_uflip.iter())
            .collect()
    }
}

/// Is `s` a repetition of `10` or `01`?
pub fn is_trivial_rotation(s: &BitSeq) -> bool {
    let l = s.len();
    l.is_multiple_of(2) && {
        let ones = (0..l / 2).fold(0u128, |acc, _| (acc << 2) | 1);
        s.rank() == ones || s.rank() == ones << 1
    }
}
