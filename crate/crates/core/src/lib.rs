//! Exact dynamics of the real 3x+1 function `U`, its flipped variant `Ũ` and
//! related piecewise-affine maps.
//!
//! * [`exact_arith`]: reduced rationals, floor, parity, 2-adic splitting.
//! * [`maps`]: `T`, `U`, `Ũ`, `g`, `f`, `F`, `V` and the family `Φ`.
//! * [`trajectory`]: orbit iteration and fate classification.
//! * [`cycle_search`]: exhaustive pseudo-cycle enumeration and realization
//!   checks against `U` and `Ũ`.
//! * [`remainder_proof`]: remainder dynamics and the power inequalities
//!   that rule out non-integer cycles.
//! * [`harness`]: experiment configuration, sampling and report writers.

pub mod bitseq;
pub mod cycle_search;
pub mod exact_arith;
pub mod harness;
pub mod maps;
pub mod remainder_proof;
pub mod trajectory;

pub use bitseq::BitSeq;
pub use cycle_search::{candidate, evaluate, sweep, CycleClass, CycleRecord, Realization, Sweep, SweepSummary};
pub use exact_arith::{ExactRational, OddDenomRational, Parity};
pub use maps::{compose_affine, MapKind, MapSpec, PhiParams, Step};
pub use remainder_proof::{rmap_orbit_scan, segment_inequality, trace, RemainderTrace, Verdict};
pub use trajectory::{iterate, Fate, IterateOptions, TrajectoryReport};
