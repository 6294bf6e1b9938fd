//! The two-piece affine maps: `T`, `U`, `Ũ`, `g`, `f`, `F`, `V` and the
//! general family `Φ(α, β, γ, δ, τ)`.
//!
//! Every map is a choice between two affine pieces. Piece 0 is always the
//! halving-type piece and piece 1 the `3x + …` piece; the reported branch bit
//! is the index of the piece that ran. What differs between maps is how the
//! piece is selected:
//!
//! * `T`, `f` and `g` look at the parity of the (reduced) numerator;
//! * `U`, `F`, `V` and `Φ` look at the parity of `⌊x + τ⌋` (`τ = 0` for the
//!   named maps);
//! * `Ũ` is `Φ` with `τ = 1`, so an even floor selects piece 1.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::bitseq::BitSeq;
use crate::exact_arith::{pow2, pow3, ExactRational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MapError {
    #[error("{value} is outside the domain of {map}: {reason}")]
    Domain { map: String, value: ExactRational, reason: &'static str },
    #[error("tau must satisfy 0 <= tau < 2, got {0}")]
    Tau(ExactRational),
    #[error("unknown map `{0}` (expected T, U, Uflip, g, f, F, V or Phi:a,b,c,d,tau[,min])")]
    UnknownMap(String),
    #[error("bad Phi parameters `{0}`")]
    PhiParams(String),
}

/// Parameters of `Φ(x) = αx + β` if `⌊x + τ⌋` is even, `γx + δ` otherwise.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PhiParams {
    pub alpha: ExactRational,
    pub beta: ExactRational,
    pub gamma: ExactRational,
    pub delta: ExactRational,
    pub tau: ExactRational,
    /// Lower end of the domain; `None` means unbounded below.
    pub domain_min: Option<ExactRational>,
}

impl PhiParams {
    pub fn new(
        alpha: ExactRational,
        beta: ExactRational,
        gamma: ExactRational,
        delta: ExactRational,
        tau: ExactRational,
        domain_min: Option<ExactRational>,
    ) -> Result<Self, MapError> {
        if tau.is_negative() || tau >= 2 {
            return Err(MapError::Tau(tau));
        }
        Ok(PhiParams { alpha, beta, gamma, delta, tau, domain_min })
    }

    fn named(a: (i64, i64), b: (i64, i64), c: (i64, i64), d: (i64, i64), tau: i64, min: i64) -> Self {
        let r = |(p, q): (i64, i64)| ExactRational::frac(p, q);
        PhiParams {
            alpha: r(a),
            beta: r(b),
            gamma: r(c),
            delta: r(d),
            tau: tau.into(),
            domain_min: Some(min.into()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum MapKind {
    T,
    U,
    UFlip,
    G,
    /// The original Collatz map `f` on positive integers.
    SmallF,
    /// `F`, the extension of `f` to `x >= 1`.
    BigF,
    V,
    Phi(Box<PhiParams>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BranchRule {
    FloorParity,
    NumeratorParity,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MapSpec {
    kind: MapKind,
    branch_rule: BranchRule,
    /// Floor-parity kinds carry their `Φ` expansion.
    params: PhiParams,
}

/// One application of a map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub value: ExactRational,
    pub branch: u8,
}

impl MapSpec {
    pub fn new(kind: MapKind) -> Self {
        use MapKind::*;
        let half = (1, 2);
        let (rule, params) = match &kind {
            T | G => (BranchRule::NumeratorParity, PhiParams::named(half, (0, 1), (3, 2), half, 0, 1)),
            SmallF => (BranchRule::NumeratorParity, PhiParams::named(half, (0, 1), (3, 1), (1, 1), 0, 1)),
            U => (BranchRule::FloorParity, PhiParams::named(half, (0, 1), (3, 2), half, 0, 1)),
            UFlip => (BranchRule::FloorParity, PhiParams::named(half, (0, 1), (3, 2), half, 1, 0)),
            BigF => (BranchRule::FloorParity, PhiParams::named(half, (0, 1), (3, 1), (1, 1), 0, 1)),
            V => (BranchRule::FloorParity, PhiParams::named(half, (0, 1), (3, 2), (0, 1), 0, 1)),
            Phi(p) => (BranchRule::FloorParity, (**p).clone()),
        };
        MapSpec { kind, branch_rule: rule, params }
    }

    pub fn t() -> Self {
        Self::new(MapKind::T)
    }
    pub fn u() -> Self {
        Self::new(MapKind::U)
    }
    pub fn u_flip() -> Self {
        Self::new(MapKind::UFlip)
    }
    pub fn g() -> Self {
        Self::new(MapKind::G)
    }
    pub fn small_f() -> Self {
        Self::new(MapKind::SmallF)
    }
    pub fn big_f() -> Self {
        Self::new(MapKind::BigF)
    }
    pub fn v() -> Self {
        Self::new(MapKind::V)
    }
    pub fn phi(params: PhiParams) -> Self {
        Self::new(MapKind::Phi(Box::new(params)))
    }

    pub fn kind(&self) -> &MapKind {
        &self.kind
    }

    pub fn branch_rule(&self) -> BranchRule {
        self.branch_rule
    }

    /// The `Φ` parameter pack this map evaluates with.
    pub fn params(&self) -> &PhiParams {
        &self.params
    }

    /// `(slope, offset)` of piece `branch`.
    pub fn piece(&self, branch: u8) -> (&ExactRational, &ExactRational) {
        if branch == 0 {
            (&self.params.alpha, &self.params.beta)
        } else {
            (&self.params.gamma, &self.params.delta)
        }
    }

    pub fn check_domain(&self, x: &ExactRational) -> Result<(), MapError> {
        let fail = |reason| {
            Err(MapError::Domain { map: self.to_string(), value: x.clone(), reason })
        };
        match &self.kind {
            MapKind::T | MapKind::SmallF => {
                if !x.is_integer() || *x < 1 {
                    return fail("expected a positive integer");
                }
            }
            MapKind::G => {
                if x.denom().is_even() {
                    return fail("denominator must be odd");
                }
            }
            _ => {
                if let Some(min) = &self.params.domain_min {
                    if x < min {
                        return fail(if min.is_zero() { "expected x >= 0" } else { "below domain minimum" });
                    }
                }
            }
        }
        Ok(())
    }

    /// The branch [`step`](Self::step) would take at `x`.
    pub fn branch_of(&self, x: &ExactRational) -> Result<u8, MapError> {
        self.check_domain(x)?;
        Ok(self.branch_unchecked(x))
    }

    pub(crate) fn branch_unchecked(&self, x: &ExactRational) -> u8 {
        match self.branch_rule {
            BranchRule::NumeratorParity => x.numer().is_odd() as u8,
            BranchRule::FloorParity => {
                if self.params.tau.is_zero() {
                    x.floor().is_odd() as u8
                } else {
                    (x + &self.params.tau).floor().is_odd() as u8
                }
            }
        }
    }

    pub fn step(&self, x: &ExactRational) -> Result<Step, MapError> {
        let branch = self.branch_of(x)?;
        let (slope, offset) = self.piece(branch);
        Ok(Step { value: x.affine(slope, offset), branch })
    }

    /// The map whose integer cycles anchor this map's orbits: `Ũ` orbits
    /// approach `U`-cycles, everything else its own.
    pub fn anchor_map(&self) -> MapSpec {
        match self.kind {
            MapKind::UFlip => MapSpec::u(),
            MapKind::SmallF => MapSpec::big_f(),
            MapKind::T => MapSpec::u(),
            _ => self.clone(),
        }
    }
}

impl fmt::Display for MapSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            MapKind::T => f.write_str("T"),
            MapKind::U => f.write_str("U"),
            MapKind::UFlip => f.write_str("Uflip"),
            MapKind::G => f.write_str("g"),
            MapKind::SmallF => f.write_str("f"),
            MapKind::BigF => f.write_str("F"),
            MapKind::V => f.write_str("V"),
            MapKind::Phi(p) => {
                write!(f, "Phi:{},{},{},{},{}", p.alpha, p.beta, p.gamma, p.delta, p.tau)?;
                if let Some(m) = &p.domain_min {
                    write!(f, ",{m}")?;
                }
                Ok(())
            }
        }
    }
}

impl Serialize for MapSpec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl FromStr for MapSpec {
    type Err = MapError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let kind = match s {
            "T" => MapKind::T,
            "U" => MapKind::U,
            "Uflip" => MapKind::UFlip,
            "g" => MapKind::G,
            "f" => MapKind::SmallF,
            "F" => MapKind::BigF,
            "V" => MapKind::V,
            _ => {
                let body = s.strip_prefix("Phi:").ok_or_else(|| MapError::UnknownMap(s.to_string()))?;
                let bad = || MapError::PhiParams(body.to_string());
                let fields: Vec<ExactRational> = body
                    .split(',')
                    .map(|t| t.parse::<ExactRational>())
                    .collect::<Result<_, _>>()
                    .map_err(|_| bad())?;
                let [a, b, c, d, tau, rest @ ..] = fields.as_slice() else {
                    return Err(bad());
                };
                let min = match rest {
                    [] => None,
                    [m] => Some(m.clone()),
                    _ => return Err(bad()),
                };
                MapKind::Phi(Box::new(PhiParams::new(a.clone(), b.clone(), c.clone(), d.clone(), tau.clone(), min)?))
            }
        };
        Ok(MapSpec::new(kind))
    }
}

/// The affine form `φ_s(x) = (3^{n(s)} x + φ(s)) / 2^{l(s)}` of the
/// composition `g_{s_l} ∘ … ∘ g_{s_1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineForm {
    pub scale_num: BigInt,
    pub scale_den: BigInt,
    pub offset: BigInt,
}

impl AffineForm {
    pub fn apply(&self, x: &ExactRational) -> ExactRational {
        let num = &self.scale_num * x.numer() + &self.offset * x.denom();
        let den = &self.scale_den * x.denom();
        ExactRational::new(num, den).expect("positive denominator")
    }
}

/// `φ(s) = Σ_j s_j 2^{j-1} 3^{s_{j+1} + … + s_l}`.
pub fn phi_offset(s: &BitSeq) -> BigInt {
    let l = s.len();
    let mut acc = BigInt::from(0);
    let mut ones_after = s.ones();
    for j in 1..=l {
        if s.bit(j) == 1 {
            ones_after -= 1;
            acc += pow2(j as u32 - 1) * pow3(ones_after as u32);
        }
    }
    acc
}

pub fn compose_affine(s: &BitSeq) -> AffineForm {
    AffineForm {
        scale_num: pow3(s.ones() as u32),
        scale_den: pow2(s.len() as u32),
        offset: phi_offset(s),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(s: &str) -> ExactRational {
        s.parse().unwrap()
    }

    fn step(m: &MapSpec, x: &str) -> (String, u8) {
        let st = m.step(&q(x)).unwrap();
        (st.value.to_string(), st.branch)
    }

    #[test]
    fn step_examples() {
        assert_eq!(step(&MapSpec::u(), "7/3"), ("7/6".into(), 0));
        assert_eq!(step(&MapSpec::g(), "7/3"), ("4".into(), 1));
        assert_eq!(step(&MapSpec::u(), "1"), ("2".into(), 1));
        assert_eq!(step(&MapSpec::u_flip(), "1/2"), ("5/4".into(), 1));
        assert_eq!(step(&MapSpec::u_flip(), "1"), ("1/2".into(), 0));
        assert_eq!(step(&MapSpec::big_f(), "3/2"), ("11/2".into(), 1));
        assert_eq!(step(&MapSpec::small_f(), "3"), ("10".into(), 1));
        assert_eq!(step(&MapSpec::v(), "3/2"), ("9/4".into(), 1));
        assert_eq!(step(&MapSpec::t(), "6"), ("3".into(), 0));
    }

    #[test]
    fn branch_examples() {
        assert_eq!(MapSpec::u().branch_of(&q("19/5")), Ok(1));
        assert_eq!(MapSpec::u().branch_of(&q("2")), Ok(0));
        let phi = MapSpec::phi(
            PhiParams::new(q("1/2"), q("0"), q("3/2"), q("1/2"), q("1"), None).unwrap(),
        );
        assert_eq!(phi.branch_of(&q("1/2")), Ok(1));
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(MapSpec::u().step(&q("1/2")), Err(MapError::Domain { .. })));
        assert!(MapSpec::u_flip().step(&q("0")).is_ok());
        assert!(MapSpec::u_flip().step(&q("-1/3")).is_err());
        assert!(MapSpec::t().step(&q("3/2")).is_err());
        assert!(MapSpec::t().step(&q("0")).is_err());
        assert!(MapSpec::g().step(&q("1/2")).is_err());
        assert!(MapSpec::g().step(&q("-5")).is_ok());
        let unbounded = MapSpec::phi(
            PhiParams::new(q("1/2"), q("0"), q("3/2"), q("0"), q("0"), None).unwrap(),
        );
        assert!(unbounded.step(&q("-100/7")).is_ok());
    }

    #[test]
    fn parse_names() {
        for name in ["T", "U", "Uflip", "g", "f", "F", "V"] {
            assert_eq!(name.parse::<MapSpec>().unwrap().to_string(), name);
        }
        let m: MapSpec = "Phi:1/2,0,3/2,1/2,0,1".parse().unwrap();
        assert_eq!(m.params(), MapSpec::u().params());
        assert_eq!(m.to_string(), "Phi:1/2,0,3/2,1/2,0,1");
        assert!(matches!("Phi:1,0,1,0,2".parse::<MapSpec>(), Err(MapError::Tau(_))));
        assert!("Phi:1,0,1".parse::<MapSpec>().is_err());
        assert!("W".parse::<MapSpec>().is_err());
    }

    #[test]
    fn named_expansions() {
        let u = MapSpec::u();
        let p = u.params();
        assert_eq!((&p.alpha, &p.beta, &p.gamma, &p.delta, &p.tau), (&q("1/2"), &q("0"), &q("3/2"), &q("1/2"), &q("0")));
        assert_eq!(MapSpec::u_flip().params().tau, q("1"));
        assert_eq!(MapSpec::v().params().delta, q("0"));
    }

    #[test]
    fn compose_affine_examples() {
        let form = |s: &str| {
            let a = compose_affine(&s.parse().unwrap());
            (a.scale_num.to_string(), a.scale_den.to_string(), a.offset.to_string())
        };
        assert_eq!(form("10"), ("3".into(), "4".into(), "1".into()));
        assert_eq!(form("00000"), ("1".into(), "32".into(), "0".into()));
        assert_eq!(form("11100"), ("27".into(), "32".into(), "19".into()));
    }

    fn arb_x() -> impl Strategy<Value = ExactRational> {
        (1i64..1_000_000, 1i64..10_000).prop_map(|(p, d)| ExactRational::frac(p, d))
    }

    proptest! {
        #[test]
        fn u_restricted_to_integers_is_t(n in 1i64..1_000_000_000) {
            let x = ExactRational::from(n);
            prop_assert_eq!(MapSpec::u().step(&x).unwrap(), MapSpec::t().step(&x).unwrap());
        }

        #[test]
        fn u_agrees_with_g_on_aligned_points(p in 1i64..1_000_000, k in 0i64..5000) {
            let x = ExactRational::frac(p, 2 * k + 1);
            prop_assume!(x >= 1);
            let (u, g) = (MapSpec::u(), MapSpec::g());
            if u.branch_of(&x).unwrap() == g.branch_of(&x).unwrap() {
                prop_assert_eq!(u.step(&x).unwrap(), g.step(&x).unwrap());
            }
        }

        #[test]
        fn phi_instance_matches_u(x in arb_x()) {
            prop_assume!(x >= 1);
            let phi = MapSpec::phi(MapSpec::u().params().clone());
            prop_assert_eq!(phi.step(&x).unwrap(), MapSpec::u().step(&x).unwrap());
        }

        #[test]
        fn phi_tau_one_matches_uflip(x in arb_x()) {
            let phi = MapSpec::phi(MapSpec::u_flip().params().clone());
            prop_assert_eq!(phi.step(&x).unwrap(), MapSpec::u_flip().step(&x).unwrap());
        }

        // Branch-by-branch iteration of the pieces of g against the closed form.
        #[test]
        fn affine_form_matches_iteration(len in 1usize..=12, rank in any::<u64>(), p in -10_000i64..10_000, d in 1i64..1000) {
            let s = BitSeq::from_rank(len, (rank as u128) & ((1u128 << len) - 1)).unwrap();
            let x = ExactRational::frac(p, d);
            let g = MapSpec::g();
            let mut y = x.clone();
            for b in s.iter() {
                let (slope, off) = g.piece(b);
                y = y.affine(slope, off);
            }
            prop_assert_eq!(compose_affine(&s).apply(&x), y);
        }
    }
}
