//! Orbit iteration and fate classification.
//!
//! An orbit is iterated until one of the following is established exactly:
//!
//! * it has entered a cycle (an exact repeat, found with Brent's method);
//! * it has fallen into the contracting neighbourhood of an integer anchor
//!   cycle, on one side, and one full period confirms the return map is
//!   `y − a ↦ λ (y − a)` with `0 < λ < 1` along the anchor's own branch
//!   pattern, which keeps it there forever;
//! * for `V`, it has reached the invariant interval `[1, 3)`;
//! * it has exceeded the escape bound, the denominator size limit or the
//!   step cap.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::bitseq::BitSeq;
use crate::exact_arith::{pow2, ExactRational};
use crate::maps::{MapError, MapKind, MapSpec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TrajectoryError {
    #[error(transparent)]
    Map(#[from] MapError),
    #[error("cap must be at least 1")]
    ZeroCap,
    #[error("anchor {points:?} is not a cycle of {map}: {reason}")]
    BadAnchor { map: String, points: Vec<BigInt>, reason: &'static str },
    #[error("branch {got} at step {index} differs from the pattern bit {expected}")]
    Precondition { index: usize, expected: u8, got: u8 },
}

/// A cycle of integers under a map's integer restriction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnchorCycle {
    points: Vec<BigInt>,
    pattern: BitSeq,
    map: MapSpec,
}

impl AnchorCycle {
    /// Checks that `points` is a cycle of `map.anchor_map()`.
    pub fn new(map: &MapSpec, points: Vec<BigInt>) -> Result<Self, TrajectoryError> {
        let anchor_map = map.anchor_map();
        let bad = |reason| TrajectoryError::BadAnchor { map: anchor_map.to_string(), points: points.clone(), reason };
        if points.is_empty() || points.len() > BitSeq::MAX_LEN {
            return Err(bad("length must be 1..=128"));
        }
        let mut bits = Vec::with_capacity(points.len());
        for (j, a) in points.iter().enumerate() {
            let x = ExactRational::from_integer(a.clone());
            let step = anchor_map.step(&x).map_err(|_| bad("point outside the domain"))?;
            let next = &points[(j + 1) % points.len()];
            if step.value != ExactRational::from_integer(next.clone()) {
                return Err(bad("consecutive points are not images"));
            }
            bits.push(step.branch);
        }
        let pattern = BitSeq::from_bits(&bits).expect("length checked");
        Ok(AnchorCycle { points, pattern, map: anchor_map })
    }

    /// `(1, 2)` for `U` and `Ũ`, `(1, 4, 2)` for `F`.
    pub fn default_for(map: &MapSpec) -> Option<Self> {
        let pts: &[i64] = match map.kind() {
            MapKind::U | MapKind::UFlip => &[1, 2],
            MapKind::BigF => &[1, 4, 2],
            _ => return None,
        };
        Self::new(map, pts.iter().map(|&p| BigInt::from(p)).collect()).ok()
    }

    pub fn points(&self) -> &[BigInt] {
        &self.points
    }

    /// Branch bits of the anchor map along the cycle, from `points[0]`.
    pub fn pattern(&self) -> BitSeq {
        self.pattern
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// The trigger width `(2/3)^l`.
    pub fn window(&self) -> ExactRational {
        ExactRational::frac(2, 3).pow(self.len() as u32)
    }

    fn pattern_bit(&self, start: usize, k: usize) -> u8 {
        self.pattern.bit((start + k) % self.len() + 1)
    }

    fn is_trivial(&self) -> bool {
        self.points.len() == 2 && self.points.contains(&BigInt::from(1)) && self.points.contains(&BigInt::from(2))
    }
}

impl Serialize for AnchorCycle {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.points.iter().map(|p| p.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Tendency {
    FromAbove,
    FromBelow,
    None,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Fate {
    /// `U`-orbit converging onto `{1, 2}` from above.
    TendsToTrivial,
    TendsFromAbove { anchor: AnchorCycle },
    TendsFromBelow { anchor: AnchorCycle },
    /// Reached the invariant interval `[lo, hi)`.
    ReachedBase { lo: ExactRational, hi: ExactRational },
    EscapedBound { bound: ExactRational },
    CapReached { steps: u64 },
    /// A reduced denominator outgrew the size limit.
    SizeCapped { bits: u64 },
    EnteredCycle { period: u64, at_step: u64 },
}

impl Fate {
    pub fn is_resolved(&self) -> bool {
        !matches!(self, Fate::CapReached { .. } | Fate::SizeCapped { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            Fate::TendsToTrivial => "tends_to_trivial",
            Fate::TendsFromAbove { .. } => "tends_from_above",
            Fate::TendsFromBelow { .. } => "tends_from_below",
            Fate::ReachedBase { .. } => "reached_base",
            Fate::EscapedBound { .. } => "escaped_bound",
            Fate::CapReached { .. } => "cap_reached",
            Fate::SizeCapped { .. } => "size_capped",
            Fate::EnteredCycle { .. } => "entered_cycle",
        }
    }
}

impl fmt::Display for Fate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone)]
pub struct IterateOptions {
    pub cap: u64,
    pub escape_bound: Option<ExactRational>,
    /// Largest allowed bit length of a reduced denominator.
    pub max_denom_bits: u64,
    /// Iterates kept in full; later ones only as checkpoints.
    pub retain: usize,
    pub checkpoint_every: u64,
    /// Overrides [`AnchorCycle::default_for`].
    pub anchor: Option<AnchorCycle>,
    /// Iterates appended after a fate is resolved, in periods of the cycle.
    pub tail_periods: usize,
}

impl Default for IterateOptions {
    fn default() -> Self {
        IterateOptions {
            cap: 10_000,
            escape_bound: Some(ExactRational::from_integer(pow2(64))),
            max_denom_bits: 1 << 16,
            retain: 4096,
            checkpoint_every: 1024,
            anchor: None,
            tail_periods: 4,
        }
    }
}

fn serialize_bits<S: Serializer>(bits: &[u8], s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(&bits.iter().map(|&b| char::from(b'0' + b)).collect::<String>())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrajectoryReport {
    pub map: MapSpec,
    pub start: ExactRational,
    pub iterates: Vec<ExactRational>,
    pub truncated: bool,
    /// `(step, value)` pairs recorded past the retention limit.
    pub checkpoints: Vec<(u64, ExactRational)>,
    /// `⌊x_i⌋ mod 2` for every visited iterate.
    #[serde(serialize_with = "serialize_bits")]
    pub parity_bits: Vec<u8>,
    pub fate: Fate,
    pub steps_used: u64,
    pub last: ExactRational,
    /// First step at which the orbit entered the map's target interval.
    pub base_entry: Option<u64>,
}

impl TrajectoryReport {
    /// Converging onto `{1, 2}`: the contraction fate, or an exact landing
    /// on the cycle `(1, 2)` itself.
    pub fn tends_to_trivial(&self) -> bool {
        match &self.fate {
            Fate::TendsToTrivial => true,
            Fate::EnteredCycle { .. } => self.last == 1 || self.last == 2,
            _ => false,
        }
    }
}

/// Interval the conjectures ask the orbit to reach, per map.
pub fn target_interval(map: &MapSpec) -> Option<(ExactRational, ExactRational)> {
    match map.kind() {
        MapKind::U | MapKind::V | MapKind::BigF => Some((1.into(), 3.into())),
        MapKind::UFlip => Some((0.into(), 2.into())),
        _ => None,
    }
}

fn in_interval(x: &ExactRational, (lo, hi): &(ExactRational, ExactRational)) -> bool {
    x >= lo && x < hi
}

struct Recorder {
    report: TrajectoryReport,
    retain: usize,
    every: u64,
}

impl Recorder {
    fn push(&mut self, step: u64, x: &ExactRational) {
        let r = &mut self.report;
        r.parity_bits.push(x.floor().is_odd() as u8);
        if r.iterates.len() < self.retain {
            r.iterates.push(x.clone());
        } else {
            r.truncated = true;
            if step.is_multiple_of(self.every) {
                r.checkpoints.push((step, x.clone()));
            }
        }
        r.last = x.clone();
        r.steps_used = step;
    }
}

/// Confirms that `y` sits in the contracting neighbourhood of `anchor.points[j]`.
///
/// Follows one period from `y`, requiring the anchor's branch at every step
/// and floors that keep each iterate on the same side of its anchor point,
/// then checks that the return map is a contraction of the deviation.
fn confirm_window(map: &MapSpec, y: &ExactRational, anchor: &AnchorCycle, j: usize) -> Option<Tendency> {
    let l = anchor.len();
    let base = ExactRational::from_integer(anchor.points[j].clone());
    let dev = y - &base;
    let above = !dev.is_negative();
    let mut x = y.clone();
    let mut scale = ExactRational::one();
    for k in 0..l {
        let point = &anchor.points[(j + k) % l];
        let floor = x.floor();
        let expected_floor = if above { point.clone() } else { point - 1 };
        if floor != expected_floor && !(!above && x == ExactRational::from_integer(point.clone())) {
            return None;
        }
        let step = map.step(&x).ok()?;
        if step.branch != anchor.pattern_bit(j, k) {
            return None;
        }
        scale = &scale * map.piece(step.branch).0;
        x = step.value;
    }
    if !(scale.is_positive() && scale < 1) {
        return None;
    }
    (&x - &base == &scale * &dev).then_some(if above { Tendency::FromAbove } else { Tendency::FromBelow })
}

/// Index of an anchor point whose trigger window contains `y`.
fn window_hit(y: &ExactRational, anchor: &AnchorCycle, theta: &ExactRational, allow_exact: bool) -> Option<usize> {
    let floor = y.floor();
    anchor.points.iter().position(|b| {
        let base = ExactRational::from_integer(b.clone());
        if floor == *b {
            let dev = y - &base;
            (allow_exact || !dev.is_zero()) && dev < *theta
        } else if floor == b - 1 {
            &base - y < *theta
        } else {
            false
        }
    })
}

/// Iterates `map` from `x0` until the fate is known or a limit is hit.
pub fn iterate(map: &MapSpec, x0: &ExactRational, opts: &IterateOptions) -> Result<TrajectoryReport, TrajectoryError> {
    if opts.cap == 0 {
        return Err(TrajectoryError::ZeroCap);
    }
    map.check_domain(x0)?;
    let anchor = opts.anchor.clone().or_else(|| AnchorCycle::default_for(map));
    let theta = anchor.as_ref().map(AnchorCycle::window);
    let target = target_interval(map);
    let base_is_final = matches!(map.kind(), MapKind::V);

    let mut rec = Recorder {
        report: TrajectoryReport {
            map: map.clone(),
            start: x0.clone(),
            iterates: Vec::new(),
            truncated: false,
            checkpoints: Vec::new(),
            parity_bits: Vec::new(),
            fate: Fate::CapReached { steps: opts.cap },
            steps_used: 0,
            last: x0.clone(),
            base_entry: None,
        },
        retain: opts.retain.max(1),
        every: opts.checkpoint_every.max(1),
    };

    // Brent's cycle detection keeps memory constant in the orbit length.
    let mut tortoise = x0.clone();
    let mut power = 1u64;
    let mut lam = 0u64;
    let mut x = x0.clone();
    let mut step = 0u64;
    rec.push(0, &x);

    let mut tail = 0usize;
    let fate = loop {
        if let Some(bound) = &opts.escape_bound {
            if x > *bound {
                break Fate::EscapedBound { bound: bound.clone() };
            }
        }
        let bits = x.denom_bits();
        if bits > opts.max_denom_bits {
            break Fate::SizeCapped { bits };
        }
        if let Some(t) = &target {
            if rec.report.base_entry.is_none() && in_interval(&x, t) {
                rec.report.base_entry = Some(step);
                if base_is_final {
                    break Fate::ReachedBase { lo: t.0.clone(), hi: t.1.clone() };
                }
            }
        }
        if let (Some(a), Some(th)) = (&anchor, &theta) {
            if let Some(j) = window_hit(&x, a, th, false) {
                if let Some(side) = confirm_window(map, &x, a, j) {
                    tail = a.len() * opts.tail_periods;
                    break match (side, map.kind()) {
                        (Tendency::FromAbove, MapKind::U) if a.is_trivial() => Fate::TendsToTrivial,
                        (Tendency::FromAbove, _) => Fate::TendsFromAbove { anchor: a.clone() },
                        _ => Fate::TendsFromBelow { anchor: a.clone() },
                    };
                }
            }
        }
        if step >= opts.cap {
            break Fate::CapReached { steps: step };
        }

        x = map.step(&x)?.value;
        step += 1;
        rec.push(step, &x);

        lam += 1;
        if x == tortoise {
            tail = (2 * lam as usize).max(2 * opts.tail_periods);
            break Fate::EnteredCycle { period: lam, at_step: step };
        }
        if lam == power {
            tortoise = x.clone();
            power *= 2;
            lam = 0;
        }
    };

    // A short continuation past a resolved fate, so the parity bits show
    // the eventual pattern.
    for _ in 0..tail {
        x = map.step(&x)?.value;
        step += 1;
        rec.push(step, &x);
    }
    rec.report.fate = fate;
    Ok(rec.report)
}

/// Smallest `j` such that `bits[j..]` reads `0, 1, 0, 1, …` with at least
/// `window` terms observed.
pub fn detect_period01(bits: &[u8], window: usize) -> Option<usize> {
    let n = bits.len();
    if n == 0 {
        return None;
    }
    let mut k = n - 1;
    while k > 0 && bits[k - 1] != bits[k] {
        k -= 1;
    }
    let j = if bits[k] == 1 { k + 1 } else { k };
    (n - j >= window.max(2)).then_some(j)
}

/// Iterates from `x0` looking for the contracting neighbourhood of `anchor`.
pub fn detect_tendency(map: &MapSpec, x0: &ExactRational, anchor: &AnchorCycle, cap: u64) -> Result<Tendency, TrajectoryError> {
    if anchor.map != map.anchor_map() {
        return Err(TrajectoryError::BadAnchor {
            map: map.to_string(),
            points: anchor.points.clone(),
            reason: "anchor belongs to a different map",
        });
    }
    map.check_domain(x0)?;
    let theta = anchor.window();
    let mut x = x0.clone();
    for _ in 0..=cap {
        if let Some(j) = window_hit(&x, anchor, &theta, true) {
            if let Some(t) = confirm_window(map, &x, anchor, j) {
                return Ok(t);
            }
        }
        x = map.step(&x)?.value;
    }
    Ok(Tendency::None)
}

/// Checks `M^{m l}(x0) − a = λ^m (x0 − a)` for `m = 1..=periods`, where `λ`
/// is the product of the slopes along `pattern`.
///
/// The branch bits of the orbit must follow `pattern` cyclically for the
/// whole window; a deviation is a precondition error.
pub fn contraction_check(
    map: &MapSpec,
    x0: &ExactRational,
    anchor_point: &ExactRational,
    pattern: &BitSeq,
    periods: usize,
) -> Result<bool, TrajectoryError> {
    let l = pattern.len();
    let scale = pattern.iter().fold(ExactRational::one(), |acc, b| &acc * map.piece(b).0);
    let dev = x0 - anchor_point;
    let mut x = x0.clone();
    let mut factor = ExactRational::one();
    let mut ok = true;
    for m in 1..=periods {
        for k in 0..l {
            let st = map.step(&x)?;
            let expected = pattern.bit(k + 1);
            if st.branch != expected {
                return Err(TrajectoryError::Precondition { index: (m - 1) * l + k, expected, got: st.branch });
            }
            x = st.value;
        }
        factor = &factor * &scale;
        ok &= &x - anchor_point == &factor * &dev;
    }
    Ok(ok)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(s: &str) -> ExactRational {
        s.parse().unwrap()
    }

    fn opts(cap: u64, bound: Option<&str>) -> IterateOptions {
        IterateOptions { cap, escape_bound: bound.map(q), ..Default::default() }
    }

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn trivial_cycle_from_one() {
        let r = iterate(&MapSpec::u(), &q("1"), &opts(10, None)).unwrap();
        assert_eq!(r.fate, Fate::EnteredCycle { period: 2, at_step: 3 });
        assert_eq!(r.iterates[..3], [q("1"), q("2"), q("1")]);
        assert!(r.tends_to_trivial());
    }

    #[test]
    fn f_family_escapes() {
        let r = iterate(&MapSpec::big_f(), &q("3/2"), &opts(5, Some("100"))).unwrap();
        assert_eq!(r.fate, Fate::EscapedBound { bound: q("100") });
        assert_eq!(r.iterates, [q("3/2"), q("11/2"), q("35/2"), q("107/2"), q("323/2")]);
        assert_eq!(r.steps_used, 4);
    }

    #[test]
    fn u_three_halves_tends_to_trivial() {
        let r = iterate(&MapSpec::u(), &q("3/2"), &opts(50, None)).unwrap();
        assert_eq!(r.fate, Fate::TendsToTrivial);
        assert_eq!(r.iterates[2], q("11/8"));
        assert_eq!(r.iterates[4], q("41/32"));
        assert_eq!(r.base_entry, Some(0));
        assert_eq!(detect_period01(&r.parity_bits, 8), Some(1));
    }

    #[test]
    fn parity_bits_track_floor() {
        let r = iterate(&MapSpec::u_flip(), &q("7/3"), &opts(100, None)).unwrap();
        for (x, b) in r.iterates.iter().zip(&r.parity_bits) {
            assert_eq!(x.floor().is_odd() as u8, *b);
        }
        assert!(matches!(r.fate, Fate::TendsFromBelow { .. }));
    }

    #[test]
    fn cap_and_domain() {
        let r = iterate(&MapSpec::u(), &q("27"), &opts(5, None)).unwrap();
        assert_eq!(r.fate, Fate::CapReached { steps: 5 });
        assert!(!r.fate.is_resolved());
        assert!(matches!(iterate(&MapSpec::u(), &q("1/2"), &opts(5, None)), Err(TrajectoryError::Map(_))));
        assert_eq!(iterate(&MapSpec::u(), &q("2"), &opts(0, None)).err(), Some(TrajectoryError::ZeroCap));
    }

    #[test]
    fn size_cap() {
        let o = IterateOptions { max_denom_bits: 8, ..opts(10_000, None) };
        let r = iterate(&MapSpec::v(), &q("1000001/3"), &o).unwrap();
        assert_eq!(r.fate, Fate::SizeCapped { bits: 9 });
    }

    #[test]
    fn v_reaches_base() {
        let r = iterate(&MapSpec::v(), &q("100/7"), &opts(1000, None)).unwrap();
        assert_eq!(r.fate, Fate::ReachedBase { lo: q("1"), hi: q("3") });
        assert!(r.last >= 1 && r.last < 3);
    }

    #[test]
    fn retention_truncates() {
        let o = IterateOptions { retain: 3, checkpoint_every: 2, ..opts(100, None) };
        let r = iterate(&MapSpec::u(), &q("27"), &o).unwrap();
        assert_eq!(r.iterates.len(), 3);
        assert!(r.truncated);
        assert!(r.checkpoints.iter().all(|(s, _)| s % 2 == 0));
        assert_eq!(r.parity_bits.len() as u64, r.steps_used + 1);
    }

    #[test]
    fn integer_orbits_match_collatz() {
        // 27 takes 70 shortcut steps to reach 1.
        let r = iterate(&MapSpec::u(), &q("27"), &opts(1000, None)).unwrap();
        assert!(r.tends_to_trivial());
        let t = iterate(&MapSpec::t(), &q("27"), &opts(1000, None)).unwrap();
        assert_eq!(t.iterates[..71], r.iterates[..71]);
        assert_eq!(r.iterates[70], q("1"));
    }

    #[test]
    fn period01_examples() {
        assert_eq!(detect_period01(&[1, 0, 1, 0, 1, 0], 2), Some(1));
        assert_eq!(detect_period01(&[0, 1, 0, 1], 2), Some(0));
        assert_eq!(detect_period01(&[1, 1, 1], 2), None);
        assert_eq!(detect_period01(&[1, 1, 0, 1, 0], 4), None);
        assert_eq!(detect_period01(&[1, 1, 0, 1, 0, 1], 4), Some(2));
        assert_eq!(detect_period01(&[], 2), None);
    }

    #[test]
    fn tendency_examples() {
        let a = AnchorCycle::new(&MapSpec::u(), big(&[1, 2])).unwrap();
        assert_eq!(detect_tendency(&MapSpec::u(), &q("3/2"), &a, 10), Ok(Tendency::FromAbove));
        assert_eq!(detect_tendency(&MapSpec::u(), &q("1"), &a, 10), Ok(Tendency::FromAbove));
        let flip = MapSpec::u_flip();
        let af = AnchorCycle::new(&flip, big(&[1, 2])).unwrap();
        assert_eq!(detect_tendency(&flip, &q("1/2"), &af, 200), Ok(Tendency::FromBelow));
    }

    #[test]
    fn anchors_are_validated() {
        assert!(AnchorCycle::new(&MapSpec::u(), big(&[1, 3])).is_err());
        assert!(AnchorCycle::new(&MapSpec::u(), big(&[0])).is_err());
        assert!(AnchorCycle::new(&MapSpec::big_f(), big(&[1, 4, 2])).is_ok());
        let a = AnchorCycle::new(&MapSpec::big_f(), big(&[1, 4, 2])).unwrap();
        assert!(detect_tendency(&MapSpec::u(), &q("3/2"), &a, 5).is_err());
        assert_eq!(AnchorCycle::default_for(&MapSpec::u()).unwrap().pattern().to_string(), "10");
    }

    #[test]
    fn contraction_examples() {
        let s: BitSeq = "10".parse().unwrap();
        let u = MapSpec::u();
        assert_eq!(contraction_check(&u, &q("3/2"), &q("1"), &s, 1), Ok(true));
        assert_eq!(contraction_check(&u, &q("3/2"), &q("1"), &s, 2), Ok(true));
        assert_eq!(contraction_check(&u, &q("1"), &q("1"), &s, 7), Ok(true));
        // 5/2 has even floor, so U halves it instead of following `10`.
        assert!(matches!(
            contraction_check(&u, &q("5/2"), &q("1"), &s, 1),
            Err(TrajectoryError::Precondition { index: 0, .. })
        ));
    }

    #[test]
    fn f_tends_onto_its_cycle() {
        let r = iterate(&MapSpec::big_f(), &q("9/8"), &opts(100, None)).unwrap();
        assert!(matches!(r.fate, Fate::TendsFromAbove { .. }), "{:?}", r.fate);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn repeats_are_genuine(n in 1i64..5000) {
            let u = MapSpec::u();
            let r = iterate(&u, &ExactRational::from(n), &opts(10_000, None)).unwrap();
            if let Fate::EnteredCycle { period, .. } = r.fate {
                let mut x = r.last.clone();
                // `last` may sit inside the tail; the cycle still closes.
                let start = x.clone();
                for _ in 0..period {
                    x = u.step(&x).unwrap().value;
                }
                prop_assert_eq!(x, start);
            } else {
                prop_assert!(false, "integer orbit of {} did not cycle", n);
            }
        }

        #[test]
        fn f_family_monotone(m in 0i64..=100) {
            let x0 = &ExactRational::from(2 * m) + &q("3/2");
            let r = iterate(&MapSpec::big_f(), &x0, &opts(30, None)).unwrap();
            for w in r.iterates.windows(2) {
                prop_assert!(w[1] > w[0]);
            }
            prop_assert!(r.parity_bits.iter().all(|&b| b == 1));
        }
    }
}
