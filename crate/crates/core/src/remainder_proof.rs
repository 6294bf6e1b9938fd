//! Remainder dynamics of candidate cycles.
//!
//! Writing each cycle element over the common odd denominator `d`,
//! `x_i = c_i / d = q_i + r_i / d`, alignment of floor parity with numerator
//! parity forces every `r_i` to be even and makes the remainders follow a
//! three-way recurrence. Segmenting the cycle at the "new" remainders (those
//! produced by `r ↦ 3r/2 − d`) yields `n(p, q) > (q − p) log_3 2` per
//! segment, which sums to `n > l log_3 2` and contradicts `d > 0`. This module
//! replays all of that on concrete candidates, in integer arithmetic only.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::bitseq::BitSeq;
use crate::cycle_search::CycleRecord;
use crate::exact_arith::{bigint_str, cmp_pow3_pow2, pow2, pow3, two_adic_split};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TraceError {
    #[error("trace needs d > 0, got d = {0}")]
    NonPositiveD(BigInt),
    #[error("remainder recurrence failed at index {0}")]
    RecurrenceMismatch(usize),
    #[error("expected {expected} remainders, got {got}")]
    Length { expected: usize, got: usize },
    #[error("remainder {0} is not in [0, d)")]
    RemainderRange(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SegmentError {
    #[error("segment inequalities need an aligned closed trace")]
    NotAligned,
    #[error("aligned closed trace has no new remainder")]
    NoNewRemainder,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScanError {
    #[error("d must be odd, at least 5 and not divisible by 3; got {0}")]
    InvalidD(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "index", rename_all = "snake_case")]
pub enum Verdict {
    /// Every element aligned and the cycle closes; the segment ledger applies.
    AlignedClosed,
    /// First index whose floor parity disagrees with the required alignment.
    MisalignedAt(usize),
    /// All remainders vanish: a cycle of integers.
    IntegerCycle,
}

/// Stretch between two consecutive new remainders `r_p` and `r_q`.
///
/// `end` may exceed `l` when the segment wraps around the cycle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Segment {
    pub start: usize,
    pub end: usize,
    /// `n(p, q)`: ones among `s_{p+1} .. s_q`.
    pub ones: usize,
    /// 2-adic valuation of the (flipped) remainder at `start`.
    pub valuation: u64,
}

impl Segment {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end == self.start
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RemainderTrace {
    pub bits: BitSeq,
    pub flipped: bool,
    #[serde(serialize_with = "bigint_str::one")]
    pub d: BigInt,
    /// `c_0 .. c_l`
    #[serde(serialize_with = "bigint_str::seq")]
    pub c: Vec<BigInt>,
    #[serde(serialize_with = "bigint_str::seq")]
    pub q: Vec<BigInt>,
    #[serde(serialize_with = "bigint_str::seq")]
    pub r: Vec<BigInt>,
    pub aligned_prefix: usize,
    /// `new[i]`: `r_i` came from the subtracting branch (predecessor taken
    /// circularly). Length `l`.
    pub new: Vec<bool>,
    /// Number of remainders recomputed from their predecessor by the
    /// recurrence and found equal.
    pub recurrence_checked: usize,
    pub segments: Vec<Segment>,
    pub verdict: Verdict,
}

/// Next remainder under the recurrence. `odd_branch` is the `3r/2` side.
/// Returns `(next, is_new)`, or `None` when `r` is odd.
fn recurrence_step(r: &BigInt, odd_branch: bool, d: &BigInt) -> Option<(BigInt, bool)> {
    if r.is_odd() {
        return None;
    }
    let half = r >> 1u32;
    if !odd_branch {
        return Some((half, false));
    }
    // r = 2d/3 cannot occur because 3 does not divide d.
    if BigInt::from(3) * r < BigInt::from(2) * d {
        Some((half * 3, false))
    } else {
        Some((half * 3 - d, true))
    }
}

impl RemainderTrace {
    pub fn l(&self) -> usize {
        self.bits.len()
    }

    /// `r_i` for the plain trace, `d − r_i` for the flipped one.
    fn working(&self, i: usize) -> BigInt {
        if self.flipped {
            &self.d - &self.r[i]
        } else {
            self.r[i].clone()
        }
    }

    /// Whether `q_i` takes the `3r/2` branch of the recurrence.
    fn odd_branch(&self, i: usize) -> bool {
        self.q[i].is_odd() != self.flipped
    }

    fn aligned(&self, i: usize) -> bool {
        (self.q[i].is_odd() == self.c[i].is_odd()) != self.flipped
    }

    fn from_division(bits: BitSeq, flipped: bool, d: BigInt, c: Vec<BigInt>) -> Result<Self, TraceError> {
        let (q, r): (Vec<_>, Vec<_>) = c.iter().map(|ci| ci.div_mod_floor(&d)).unzip();
        let l = bits.len();
        let mut tr = RemainderTrace {
            bits,
            flipped,
            d,
            c,
            q,
            r,
            aligned_prefix: 0,
            new: vec![false; l],
            recurrence_checked: 0,
            segments: Vec::new(),
            verdict: Verdict::IntegerCycle,
        };
        tr.aligned_prefix = (0..l).take_while(|&i| tr.aligned(i)).count();
        if tr.r.iter().all(Zero::is_zero) {
            return Ok(tr);
        }
        tr.check_recurrence()?;
        tr.mark_new();
        if tr.aligned_prefix < l {
            tr.verdict = Verdict::MisalignedAt(tr.aligned_prefix);
        } else {
            tr.verdict = Verdict::AlignedClosed;
            tr.segments = tr.extract_segments();
        }
        Ok(tr)
    }

    fn check_recurrence(&mut self) -> Result<(), TraceError> {
        let l = self.l();
        for i in 1..=self.aligned_prefix.min(l) {
            let prev = self.working(i - 1);
            let (next, _) = recurrence_step(&prev, self.odd_branch(i - 1), &self.d)
                .ok_or(TraceError::RecurrenceMismatch(i))?;
            if next != self.working(i % l) {
                return Err(TraceError::RecurrenceMismatch(i));
            }
            self.recurrence_checked += 1;
        }
        Ok(())
    }

    fn mark_new(&mut self) {
        let l = self.l();
        let two_d = BigInt::from(2) * &self.d;
        for i in 0..l {
            let p = (i + l - 1) % l;
            self.new[i] = self.aligned(p)
                && self.odd_branch(p)
                && BigInt::from(2) * self.working(i) == BigInt::from(3) * self.working(p) - &two_d;
        }
    }

    fn extract_segments(&self) -> Vec<Segment> {
        let l = self.l();
        let news: Vec<usize> = (0..l).filter(|&i| self.new[i]).collect();
        news.iter()
            .enumerate()
            .map(|(k, &p)| {
                let end = if k + 1 < news.len() { news[k + 1] } else { news[0] + l };
                let ones = (p..end).filter(|&j| self.bits.bit(j % l + 1) == 1).count();
                let w = self.working(p);
                let valuation = if w.is_positive() { two_adic_split(&w).map(|(e, _)| e).unwrap_or(0) } else { 0 };
                Segment { start: p, end, ones, valuation }
            })
            .collect()
    }

    /// A formally aligned trace built from remainders alone: `q_i` is taken
    /// to be `s_{i+1}` (its parity is all that matters) and `c_i = q_i d + r_i`.
    /// `r` lists `r_0 .. r_{l-1}`.
    pub fn assume_aligned(d: BigInt, bits: BitSeq, r: Vec<BigInt>) -> Result<Self, TraceError> {
        let l = bits.len();
        if !d.is_positive() {
            return Err(TraceError::NonPositiveD(d));
        }
        if r.len() != l {
            return Err(TraceError::Length { expected: l, got: r.len() });
        }
        if let Some(i) = r.iter().position(|ri| ri.is_negative() || *ri >= d) {
            return Err(TraceError::RemainderRange(i));
        }
        let mut c: Vec<BigInt> = bits
            .iter()
            .zip(&r)
            .map(|(b, ri)| BigInt::from(b) * &d + ri)
            .collect();
        c.push(c[0].clone());
        Self::from_division(bits, false, d, c)
    }
}

/// Euclidean division of a candidate's cycle by `d`, with the recurrence
/// replayed over the aligned prefix.
pub fn trace(rec: &CycleRecord, flipped: bool) -> Result<RemainderTrace, TraceError> {
    if !rec.d.is_positive() {
        return Err(TraceError::NonPositiveD(rec.d.clone()));
    }
    RemainderTrace::from_division(rec.s, flipped, rec.d.clone(), rec.numerators.clone())
}

/// One segment's inequality, evaluated as power comparisons.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SegmentCheck {
    pub start: usize,
    pub end: usize,
    pub ones: usize,
    pub len: usize,
    /// `n(p, q) > (q − p) log_3 2`, i.e. `3^{n(p,q)} > 2^{q−p}`.
    pub holds: bool,
    /// The stronger intermediate form `3^{n(p,q)} > 3 · 2^{q−p−1}`.
    pub strict_form_holds: bool,
    /// `e_p = q − p`.
    pub valuation_matches: bool,
}

impl SegmentCheck {
    pub fn evaluate(start: usize, end: usize, ones: usize, valuation: u64) -> Self {
        let len = end - start;
        let holds = cmp_pow3_pow2(ones as u32, len as u32) == Ordering::Greater;
        let strict_form_holds = pow3(ones as u32) > BigInt::from(3) * pow2(len.saturating_sub(1) as u32);
        SegmentCheck { start, end, ones, len, holds, strict_form_holds, valuation_matches: valuation == len as u64 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InequalityLedger {
    pub segments: Vec<SegmentCheck>,
    pub l: usize,
    pub n: usize,
    /// `n < l log_3 2`, i.e. `3^n < 2^l`, which `d = 2^l − 3^n > 0` requires.
    pub upper_bound_holds: bool,
    /// `n > l log_3 2`, the sum of the segment inequalities.
    pub lower_bound_holds: bool,
    pub d_equals_two_pow_minus_three_pow: bool,
}

impl InequalityLedger {
    /// Both bounds at once: no genuine cycle can produce this.
    pub fn contradictory(&self) -> bool {
        self.upper_bound_holds && self.lower_bound_holds
    }
}

pub fn segment_inequality(tr: &RemainderTrace) -> Result<InequalityLedger, SegmentError> {
    if tr.verdict != Verdict::AlignedClosed {
        return Err(SegmentError::NotAligned);
    }
    if tr.segments.is_empty() {
        return Err(SegmentError::NoNewRemainder);
    }
    let segments: Vec<SegmentCheck> = tr
        .segments
        .iter()
        .map(|s| SegmentCheck::evaluate(s.start, s.end, s.ones, s.valuation))
        .collect();
    let (l, n) = (tr.l(), tr.bits.ones());
    let (lu, nu) = (l as u32, n as u32);
    Ok(InequalityLedger {
        l,
        n,
        upper_bound_holds: cmp_pow3_pow2(nu, lu) == Ordering::Less,
        lower_bound_holds: cmp_pow3_pow2(nu, lu) == Ordering::Greater,
        d_equals_two_pow_minus_three_pow: tr.d == pow2(lu) - pow3(nu),
        segments,
    })
}

/// A closed orbit of the remainder recurrence over even states.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RemainderOrbit {
    pub states: Vec<u64>,
    /// Branch taken out of each state: 1 for the `3r/2` side.
    pub branches: Vec<u8>,
    pub l: usize,
    pub n: usize,
    /// `3^n > 2^l`
    pub exceeds_log_bound: bool,
}

fn scan_successors(r: u64, d: u64) -> impl Iterator<Item = (u64, u8)> {
    let halve = (r / 2).is_multiple_of(2).then_some((r / 2, 0u8));
    let wide = 3 * r as u128 / 2;
    let v = if 3 * (r as u128) < 2 * d as u128 { wide } else { wide - d as u128 };
    let triple = (v % 2 == 0 && v > 0 && v < d as u128).then_some((v as u64, 1u8));
    halve.into_iter().chain(triple).filter(|&(v, _)| v > 0)
}

/// Every elementary closed orbit of the remainder recurrence for modulus `d`,
/// restricted to even states in `(0, d)` and to orbits of length at most
/// `max_len`. Each orbit is listed once, starting from its smallest state.
pub fn rmap_orbit_scan(d: u64, max_len: usize) -> Result<Vec<RemainderOrbit>, ScanError> {
    if d < 5 || d.is_multiple_of(2) || d.is_multiple_of(3) {
        return Err(ScanError::InvalidD(d));
    }
    let mut orbits = Vec::new();
    let mut on_path = vec![false; d as usize];
    for start in (2..d).step_by(2) {
        // Iterative DFS over states greater than `start`; `branches[i]` is the
        // step taken out of `states[i]`.
        let mut states = vec![start];
        let mut branches: Vec<u8> = Vec::new();
        let mut stack: Vec<Vec<(u64, u8)>> = vec![scan_successors(start, d).collect()];
        on_path[start as usize] = true;
        while let Some(frontier) = stack.last_mut() {
            let Some((v, b)) = frontier.pop() else {
                stack.pop();
                if let Some(s) = states.pop() {
                    on_path[s as usize] = false;
                }
                branches.pop();
                continue;
            };
            if v == start {
                let mut closing = branches.clone();
                closing.push(b);
                let (l, n) = (states.len(), closing.iter().filter(|&&x| x == 1).count());
                orbits.push(RemainderOrbit {
                    states: states.clone(),
                    branches: closing,
                    l,
                    n,
                    exceeds_log_bound: cmp_pow3_pow2(n as u32, l as u32) == Ordering::Greater,
                });
            } else if v > start && !on_path[v as usize] && states.len() < max_len {
                branches.push(b);
                states.push(v);
                on_path[v as usize] = true;
                stack.push(scan_successors(v, d).collect());
            }
        }
    }
    Ok(orbits)
}

/// Default orbit-length cap for [`rmap_orbit_scan`].
pub fn default_scan_len(d: u64) -> usize {
    (4 * d) as usize
}
