//! Experiment plumbing shared by the command-line front end and the tests:
//! configuration files, seeded sampling, conjecture evidence runs and the
//! JSONL/CSV writers.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{self, Write};
use std::ops::RangeInclusive;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rayon::ThreadPool;
use serde::Serialize;
use thiserror::Error;

use crate::bitseq::BitSeq;
use crate::cycle_search::{CycleClass, CycleRecord, Realization, Sweep, SweepOptions, SweepSummary};
use crate::exact_arith::{bigint_str, ExactRational};
use crate::maps::MapSpec;
use crate::remainder_proof::{rmap_orbit_scan, trace, RemainderOrbit, ScanError, Verdict};
use crate::trajectory::{iterate, Fate, IterateOptions, TrajectoryError, TrajectoryReport};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("bad value for `{key}`: {value}")]
    Value { key: String, value: String },
    #[error("cannot read config: {0}")]
    Io(#[from] io::Error),
}

/// Every parameter a subcommand may take. Unset fields fall back to the
/// subcommand's defaults.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExperimentConfig {
    pub map: Option<String>,
    pub starts: Option<Vec<ExactRational>>,
    pub cap: Option<u64>,
    pub escape: Option<ExactRational>,
    pub lmax: Option<usize>,
    pub d_range: Option<(u64, u64)>,
    pub max_len: Option<usize>,
    pub out: Option<String>,
    pub workers: Option<usize>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub den_bits: Option<u32>,
    pub int_bits: Option<u32>,
    pub m_range: Option<(i64, i64)>,
    pub steps: Option<u64>,
    pub format: Option<OutputFormat>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Jsonl,
    Csv,
}

impl FromStr for OutputFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "jsonl" => Ok(OutputFormat::Jsonl),
            "csv" => Ok(OutputFormat::Csv),
            _ => Err(format!("unknown format `{s}` (jsonl or csv)")),
        }
    }
}

/// `a..b`, both ends included.
pub fn parse_range<T: FromStr>(s: &str) -> Option<(T, T)> {
    let (a, b) = s.split_once("..")?;
    let b = b.strip_prefix('=').unwrap_or(b);
    Some((a.trim().parse().ok()?, b.trim().parse().ok()?))
}

pub fn parse_starts(s: &str) -> Result<Vec<ExactRational>, String> {
    s.split(',').map(|t| t.trim().parse::<ExactRational>().map_err(|e| e.to_string())).collect()
}

impl ExperimentConfig {
    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = ExperimentConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or(ConfigError::Syntax { line: i + 1 })?;
            cfg.set(k.trim(), v.trim())?;
        }
        Ok(cfg)
    }

    pub fn load(path: &str) -> Result<Self, ConfigError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        fn p<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
            value.parse().map_err(|_| ConfigError::Value { key: key.into(), value: value.into() })
        }
        let bad = || ConfigError::Value { key: key.into(), value: value.into() };
        match key.replace('-', "_").as_str() {
            "map" => self.map = Some(value.to_string()),
            "start" | "starts" => self.starts = Some(parse_starts(value).map_err(|_| bad())?),
            "cap" => self.cap = Some(p(key, value)?),
            "escape" => self.escape = Some(p(key, value)?),
            "lmax" => self.lmax = Some(p(key, value)?),
            "d_range" => self.d_range = Some(parse_range(value).ok_or_else(bad)?),
            "max_len" => self.max_len = Some(p(key, value)?),
            "out" => self.out = Some(value.to_string()),
            "workers" => self.workers = Some(p(key, value)?),
            "seed" => self.seed = Some(p(key, value)?),
            "samples" => self.samples = Some(p(key, value)?),
            "den_bits" => self.den_bits = Some(p(key, value)?),
            "int_bits" => self.int_bits = Some(p(key, value)?),
            "m_range" => self.m_range = Some(parse_range(value).ok_or_else(bad)?),
            "steps" => self.steps = Some(p(key, value)?),
            "format" => self.format = Some(value.parse().map_err(|_| bad())?),
            _ => return Err(ConfigError::UnknownKey(key.to_string())),
        }
        Ok(())
    }

    /// Fields set in `self` win over `base`.
    pub fn merged_over(self, base: ExperimentConfig) -> ExperimentConfig {
        ExperimentConfig {
            map: self.map.or(base.map),
            starts: self.starts.or(base.starts),
            cap: self.cap.or(base.cap),
            escape: self.escape.or(base.escape),
            lmax: self.lmax.or(base.lmax),
            d_range: self.d_range.or(base.d_range),
            max_len: self.max_len.or(base.max_len),
            out: self.out.or(base.out),
            workers: self.workers.or(base.workers),
            seed: self.seed.or(base.seed),
            samples: self.samples.or(base.samples),
            den_bits: self.den_bits.or(base.den_bits),
            int_bits: self.int_bits.or(base.int_bits),
            m_range: self.m_range.or(base.m_range),
            steps: self.steps.or(base.steps),
            format: self.format.or(base.format),
        }
    }

    pub fn sample_spec(&self) -> SampleSpec {
        let d = SampleSpec::default();
        SampleSpec {
            count: self.samples.unwrap_or(d.count),
            den_bits: self.den_bits.unwrap_or(d.den_bits),
            int_bits: self.int_bits.unwrap_or(d.int_bits),
            seed: self.seed.unwrap_or(d.seed),
            integers_only: false,
        }
    }

    pub fn iterate_options(&self) -> IterateOptions {
        let mut o = IterateOptions::default();
        if let Some(c) = self.cap {
            o.cap = c;
        }
        if let Some(e) = &self.escape {
            o.escape_bound = Some(e.clone());
        }
        o
    }
}

pub fn build_pool(workers: Option<usize>) -> Result<Option<Arc<ThreadPool>>, rayon::ThreadPoolBuildError> {
    workers
        .map(|n| rayon::ThreadPoolBuilder::new().num_threads(n).build().map(Arc::new))
        .transpose()
}

fn in_pool<R: Send>(pool: Option<&ThreadPool>, f: impl FnOnce() -> R + Send) -> R {
    match pool {
        Some(p) => p.install(f),
        None => f(),
    }
}

/// Seeded random starts `min + k + p/q` with `0 <= k < 2^int_bits`,
/// `1 <= q <= 2^den_bits` and `0 <= p < q`, all uniform.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleSpec {
    pub count: usize,
    pub den_bits: u32,
    pub int_bits: u32,
    pub seed: u64,
    pub integers_only: bool,
}

impl Default for SampleSpec {
    fn default() -> Self {
        SampleSpec { count: 1000, den_bits: 32, int_bits: 16, seed: 0, integers_only: false }
    }
}

pub fn sample_starts(spec: &SampleSpec, min: &ExactRational) -> Vec<ExactRational> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let int_top = 1u64 << spec.int_bits.min(62);
    let den_top = 1u64 << spec.den_bits.min(62);
    (0..spec.count)
        .map(|_| {
            let k = rng.gen_range(0..int_top);
            let base = min + &ExactRational::from_integer(k);
            if spec.integers_only {
                return base;
            }
            let q = rng.gen_range(1..=den_top);
            let p = rng.gen_range(0..q);
            &base + &ExactRational::new(p, q).expect("q >= 1")
        })
        .collect()
}

/// Least value sampled for `map`: its domain minimum, or 1 for integer maps.
pub fn sample_floor(map: &MapSpec) -> ExactRational {
    map.params().domain_min.clone().unwrap_or_else(ExactRational::one).max(ExactRational::zero())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Conjecture {
    RU,
    NU,
    RUflip,
    RV,
    BU,
    BUflip,
    BV,
    Q2,
}

impl FromStr for Conjecture {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "RU" => Conjecture::RU,
            "NU" => Conjecture::NU,
            "RUflip" | "R-Uflip" | "R-Ũ" => Conjecture::RUflip,
            "RV" => Conjecture::RV,
            "BU" => Conjecture::BU,
            "BUflip" | "B-Uflip" | "B-Ũ" => Conjecture::BUflip,
            "BV" => Conjecture::BV,
            "Q2" => Conjecture::Q2,
            _ => return Err(format!("unknown conjecture `{s}` (RU, NU, RUflip, RV, BU, BUflip, BV, Q2)")),
        })
    }
}

impl fmt::Display for Conjecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Judgement {
    Supports,
    Unresolved,
    Flagged,
}

impl Conjecture {
    pub fn map(self) -> MapSpec {
        match self {
            Conjecture::RU | Conjecture::NU | Conjecture::BU => MapSpec::u(),
            Conjecture::RUflip | Conjecture::BUflip => MapSpec::u_flip(),
            Conjecture::RV | Conjecture::BV => MapSpec::v(),
            Conjecture::Q2 => MapSpec::big_f(),
        }
    }

    pub fn statement(self) -> &'static str {
        match self {
            Conjecture::RU => "every U-orbit of a real x >= 1 tends to the cycle {1, 2}",
            Conjecture::NU => "every U-orbit of a positive integer reaches the cycle {1, 2}",
            Conjecture::RUflip => "every Uflip-orbit of a real x >= 0 enters [0, 2)",
            Conjecture::RV => "every V-orbit of a real x >= 1 enters [1, 3)",
            Conjecture::BU => "every U-orbit is bounded",
            Conjecture::BUflip => "every Uflip-orbit is bounded",
            Conjecture::BV => "every V-orbit is bounded",
            Conjecture::Q2 => "the F-orbits of 2m + 3/2 are the only ones that do not tend to a cycle",
        }
    }

    fn integers_only(self) -> bool {
        self == Conjecture::NU
    }

    pub fn judge(self, r: &TrajectoryReport) -> Judgement {
        let bad_cycle = matches!(r.fate, Fate::EnteredCycle { .. }) && !r.tends_to_trivial();
        let escaped = matches!(r.fate, Fate::EscapedBound { .. });
        match self {
            Conjecture::BU | Conjecture::BUflip | Conjecture::BV => {
                if escaped {
                    Judgement::Flagged
                } else if r.fate.is_resolved() {
                    Judgement::Supports
                } else {
                    Judgement::Unresolved
                }
            }
            Conjecture::Q2 => match r.fate {
                Fate::EscapedBound { .. } => Judgement::Flagged,
                _ if r.fate.is_resolved() => Judgement::Supports,
                _ => Judgement::Unresolved,
            },
            _ => {
                let reached = match self {
                    Conjecture::RU | Conjecture::NU => r.tends_to_trivial(),
                    _ => r.base_entry.is_some(),
                };
                if reached {
                    Judgement::Supports
                } else if escaped || bad_cycle || r.fate.is_resolved() {
                    Judgement::Flagged
                } else {
                    Judgement::Unresolved
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FlaggedStart {
    pub start: ExactRational,
    pub fate: Fate,
    pub steps_used: u64,
}

/// The `2m + 3/2` check for one `m`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FamilyCheck {
    pub m_lo: i64,
    pub m_hi: i64,
    pub steps: u64,
    /// Values of `m` whose orbit failed to increase with odd floors.
    pub failures: Vec<i64>,
}

/// `F`-orbit of `2m + 3/2` over `steps` steps: strictly increasing, every
/// floor odd.
pub fn q2_family_member_ok(m: i64, steps: u64) -> bool {
    let f = MapSpec::big_f();
    let mut x = &ExactRational::from(2 * m) + &ExactRational::frac(3, 2);
    for _ in 0..steps {
        if !x.floor_is_odd() {
            return false;
        }
        let y = f.step(&x).expect("x > 1").value;
        if y <= x {
            return false;
        }
        x = y;
    }
    true
}

pub fn q2_family(range: RangeInclusive<i64>, steps: u64) -> FamilyCheck {
    FamilyCheck {
        m_lo: *range.start(),
        m_hi: *range.end(),
        steps,
        failures: range.filter(|&m| !q2_family_member_ok(m, steps)).collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EvidenceReport {
    pub conjecture: Conjecture,
    pub statement: &'static str,
    pub map: MapSpec,
    pub samples: usize,
    pub seed: u64,
    pub den_bits: u32,
    pub int_bits: u32,
    pub cap: u64,
    pub escape_bound: Option<ExactRational>,
    pub tallies: BTreeMap<&'static str, u64>,
    pub supporting: u64,
    pub unresolved: u64,
    pub flagged: Vec<FlaggedStart>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilyCheck>,
    pub conclusion: String,
}

impl EvidenceReport {
    pub fn counterexample_suspected(&self) -> bool {
        !self.flagged.is_empty() || self.family.as_ref().is_some_and(|f| !f.failures.is_empty())
    }
}

pub struct ConjectureRun {
    pub conjecture: Conjecture,
    pub spec: SampleSpec,
    pub options: IterateOptions,
    pub m_range: Option<(i64, i64)>,
    pub family_steps: u64,
}

impl ConjectureRun {
    pub fn new(conjecture: Conjecture, cfg: &ExperimentConfig) -> Self {
        let mut spec = cfg.sample_spec();
        spec.integers_only = conjecture.integers_only();
        ConjectureRun {
            conjecture,
            spec,
            options: cfg.iterate_options(),
            m_range: cfg.m_range.or((conjecture == Conjecture::Q2).then_some((0, 100))),
            family_steps: cfg.steps.unwrap_or(50),
        }
    }

    /// Iterates every sample; the report order follows the sample order,
    /// whatever the pool size.
    pub fn run(&self, pool: Option<&ThreadPool>) -> Result<(EvidenceReport, Vec<TrajectoryReport>), TrajectoryError> {
        let c = self.conjecture;
        let map = c.map();
        let starts = sample_starts(&self.spec, &sample_floor(&map));
        let reports: Vec<TrajectoryReport> = in_pool(pool, || {
            starts.par_iter().map(|x| iterate(&map, x, &self.options)).collect::<Result<_, _>>()
        })?;

        let mut tallies = BTreeMap::new();
        let (mut supporting, mut unresolved, mut flagged) = (0, 0, Vec::new());
        for r in &reports {
            *tallies.entry(r.fate.label()).or_insert(0) += 1;
            match c.judge(r) {
                Judgement::Supports => supporting += 1,
                Judgement::Unresolved => unresolved += 1,
                Judgement::Flagged => flagged.push(FlaggedStart {
                    start: r.start.clone(),
                    fate: r.fate.clone(),
                    steps_used: r.steps_used,
                }),
            }
        }
        let family = self.m_range.map(|(a, b)| q2_family(a..=b, self.family_steps));
        let mut report = EvidenceReport {
            conjecture: c,
            statement: c.statement(),
            map,
            samples: reports.len(),
            seed: self.spec.seed,
            den_bits: self.spec.den_bits,
            int_bits: self.spec.int_bits,
            cap: self.options.cap,
            escape_bound: self.options.escape_bound.clone(),
            tallies,
            supporting,
            unresolved,
            flagged,
            family,
            conclusion: String::new(),
        };
        report.conclusion = conclusion(&report);
        Ok((report, reports))
    }
}

fn conclusion(r: &EvidenceReport) -> String {
    let limits = match &r.escape_bound {
        Some(b) => format!("cap {} steps, escape bound {b}", r.cap),
        None => format!("cap {} steps", r.cap),
    };
    let mut s = if r.flagged.is_empty() {
        format!("no counterexample among {} samples ({limits})", r.samples)
    } else {
        format!(
            "WARNING: {} of {} samples flagged as possible counterexamples ({limits}); inspect `flagged`",
            r.flagged.len(),
            r.samples
        )
    };
    if r.unresolved > 0 {
        s.push_str(&format!("; {} samples unresolved within the limits", r.unresolved));
    }
    if let Some(f) = &r.family {
        if f.failures.is_empty() {
            s.push_str(&format!(
                "; 2m + 3/2 increases with odd floors for {} steps, m = {}..={}",
                f.steps, f.m_lo, f.m_hi
            ));
        } else {
            s.push_str(&format!("; WARNING: 2m + 3/2 family check failed for m = {:?}", f.failures));
        }
    }
    s.push_str(". This is evidence only; the conjecture remains open.");
    s
}

/// One line of the `cycles` JSONL stream.
#[derive(Debug, Clone, Serialize)]
pub struct RecordLine<'a> {
    pub l: usize,
    pub rank: u128,
    pub bits: BitSeq,
    #[serde(serialize_with = "bigint_str::one")]
    pub d: &'a BigInt,
    #[serde(serialize_with = "bigint_str::one")]
    pub phi: &'a BigInt,
    pub x0: &'a ExactRational,
    pub class: CycleClass,
    #[serde(rename = "realized_U")]
    pub realized_u: bool,
    #[serde(rename = "realized_Uflip")]
    pub realized_uflip: bool,
    #[serde(rename = "misalign_U")]
    pub misalign_u: Option<usize>,
    #[serde(rename = "misalign_Uflip")]
    pub misalign_uflip: Option<usize>,
}

impl<'a> From<&'a CycleRecord> for RecordLine<'a> {
    fn from(r: &'a CycleRecord) -> Self {
        let mis = |x: Option<Realization>| x.and_then(Realization::misalign_index);
        RecordLine {
            l: r.l(),
            rank: r.s.rank(),
            bits: r.s,
            d: &r.d,
            phi: &r.phi,
            x0: &r.x0,
            class: r.class,
            realized_u: r.is_u_cycle(),
            realized_uflip: r.is_uflip_cycle(),
            misalign_u: mis(r.realized_u),
            misalign_uflip: mis(r.realized_uflip),
        }
    }
}

/// Verdicts of the remainder traces run on positive non-integer candidates.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct TraceTally {
    pub traced: u64,
    pub misaligned: u64,
    pub aligned_closed: u64,
    pub trace_errors: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CyclesSummary {
    pub lmax: usize,
    #[serde(flatten)]
    pub sweep: SweepSummary,
    pub traces: TraceTally,
    pub counterexamples: usize,
}

#[derive(Serialize)]
struct SummaryLine<'a> {
    summary: &'a CyclesSummary,
}

/// Streams the full sweep up to `lmax` as JSONL, then one summary line.
///
/// Candidates with `d > 0` and a non-integer `x0 >= 1` (or `x0 >= 0` for the
/// flipped map) are also traced.
pub fn run_cycles<W: Write>(lmax: usize, pool: Option<Arc<ThreadPool>>, out: &mut W) -> io::Result<CyclesSummary> {
    let opts = SweepOptions { pool, ..Default::default() };
    let sweep = Sweep::new(lmax, opts).map_err(|e| io::Error::new(io::ErrorKind::InvalidInput, e))?;
    let mut summary = SweepSummary::default();
    let mut traces = TraceTally::default();
    for rec in sweep {
        summary.add(&rec);
        serde_json::to_writer(&mut *out, &RecordLine::from(&rec))?;
        out.write_all(b"\n")?;
        if rec.class == CycleClass::FractionalPositive {
            for (flipped, min) in [(false, 1), (true, 0)] {
                if rec.x0 < min {
                    continue;
                }
                traces.traced += 1;
                match trace(&rec, flipped) {
                    Ok(tr) => match tr.verdict {
                        Verdict::MisalignedAt(_) => traces.misaligned += 1,
                        Verdict::AlignedClosed => traces.aligned_closed += 1,
                        Verdict::IntegerCycle => {}
                    },
                    Err(_) => traces.trace_errors += 1,
                }
            }
        }
    }
    let counterexamples = summary.counterexamples().len();
    let s = CyclesSummary { lmax, sweep: summary, traces, counterexamples };
    serde_json::to_writer(&mut *out, &SummaryLine { summary: &s })?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(s)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScanLine {
    pub d: u64,
    pub max_len: usize,
    pub orbits: Vec<RemainderOrbit>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ScanSummary {
    pub moduli: u64,
    pub orbits: u64,
    /// Orbits with `3^n <= 2^l`; the segment argument predicts none.
    pub below_bound: u64,
}

/// Scans odd `d` in `range` not divisible by 3, one JSONL line per modulus.
pub fn run_rmap_scan<W: Write>(
    range: (u64, u64),
    max_len: Option<usize>,
    pool: Option<&ThreadPool>,
    out: &mut W,
) -> Result<ScanSummary, ScanRunError> {
    let ds: Vec<u64> = (range.0..=range.1).filter(|d| d % 2 == 1 && d % 3 != 0 && *d > 1).collect();
    let lines: Vec<ScanLine> = in_pool(pool, || {
        ds.par_iter()
            .map(|&d| {
                let ml = max_len.unwrap_or_else(|| crate::remainder_proof::default_scan_len(d));
                rmap_orbit_scan(d, ml).map(|orbits| ScanLine { d, max_len: ml, orbits })
            })
            .collect::<Result<_, _>>()
    })?;
    let mut summary = ScanSummary::default();
    for line in &lines {
        summary.moduli += 1;
        summary.orbits += line.orbits.len() as u64;
        summary.below_bound += line.orbits.iter().filter(|o| !o.exceeds_log_bound).count() as u64;
        serde_json::to_writer(&mut *out, line)?;
        out.write_all(b"\n")?;
    }
    serde_json::to_writer(&mut *out, &serde_json::json!({ "summary": summary }))?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(summary)
}

#[derive(Debug, Error)]
pub enum ScanRunError {
    #[error(transparent)]
    Scan(#[from] ScanError),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub const TRAJECTORY_CSV_HEADER: &str = "map,start,fate,steps_used,last,base_entry";

pub fn write_trajectory_csv<W: Write>(reports: &[TrajectoryReport], out: &mut W) -> io::Result<()> {
    writeln!(out, "{TRAJECTORY_CSV_HEADER}")?;
    for r in reports {
        let entry = r.base_entry.map(|e| e.to_string()).unwrap_or_default();
        writeln!(out, "{},{},{},{},{},{}", r.map, r.start, r.fate.label(), r.steps_used, r.last, entry)?;
    }
    Ok(())
}

pub fn write_jsonl<W: Write, T: Serialize>(items: &[T], out: &mut W) -> io::Result<()> {
    for it in items {
        serde_json::to_writer(&mut *out, it)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Exit status of a batch of trajectories: 0 when every fate is resolved.
pub fn iterate_exit_code(reports: &[TrajectoryReport]) -> i32 {
    if reports.iter().all(|r| r.fate.is_resolved()) {
        0
    } else {
        2
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> ExactRational {
        s.parse().unwrap()
    }

    #[test]
    fn config_parsing_and_merge() {
        let file = ExperimentConfig::parse("# defaults\nmap = U\ncap = 50\nstart = 3/2, 7\nm-range = 0..10\n").unwrap();
        assert_eq!(file.starts, Some(vec![q("3/2"), q("7")]));
        assert_eq!(file.m_range, Some((0, 10)));
        let flags = ExperimentConfig { cap: Some(9), ..Default::default() };
        let merged = flags.merged_over(file);
        assert_eq!(merged.cap, Some(9));
        assert_eq!(merged.map.as_deref(), Some("U"));
        assert!(matches!(ExperimentConfig::parse("colour = red"), Err(ConfigError::UnknownKey(_))));
        assert!(matches!(ExperimentConfig::parse("cap"), Err(ConfigError::Syntax { line: 1 })));
        assert!(matches!(ExperimentConfig::parse("cap = x"), Err(ConfigError::Value { .. })));
    }

    #[test]
    fn sampling_is_seeded_and_in_range() {
        let spec = SampleSpec { count: 200, den_bits: 8, int_bits: 4, seed: 7, integers_only: false };
        let a = sample_starts(&spec, &q("1"));
        assert_eq!(a, sample_starts(&spec, &q("1")));
        assert_ne!(a, sample_starts(&SampleSpec { seed: 8, ..spec }, &q("1")));
        for x in &a {
            assert!(*x >= 1 && *x < 17);
            assert!(*x.denom() <= BigInt::from(256));
        }
        let ints = sample_starts(&SampleSpec { integers_only: true, ..spec }, &q("1"));
        assert!(ints.iter().all(ExactRational::is_integer));
    }

    #[test]
    fn conjecture_names() {
        assert_eq!("R-Ũ".parse::<Conjecture>(), Ok(Conjecture::RUflip));
        assert_eq!("BV".parse::<Conjecture>(), Ok(Conjecture::BV));
        assert!("RW".parse::<Conjecture>().is_err());
    }

    #[test]
    fn small_evidence_runs() {
        for c in [Conjecture::RU, Conjecture::RUflip, Conjecture::RV, Conjecture::NU, Conjecture::BU] {
            let cfg = ExperimentConfig { samples: Some(40), seed: Some(3), ..Default::default() };
            let (rep, reports) = ConjectureRun::new(c, &cfg).run(None).unwrap();
            assert_eq!(reports.len(), 40);
            assert_eq!(rep.supporting, 40, "{c}: {rep:?}");
            assert!(rep.conclusion.starts_with("no counterexample among 40 samples"));
            assert!(rep.conclusion.ends_with("the conjecture remains open."));
        }
    }

    #[test]
    fn q2_family_holds() {
        let f = q2_family(0..=20, 30);
        assert!(f.failures.is_empty());
        // 5/2 has an even floor and is not in the family.
        let mut x = q("5/2");
        x = MapSpec::big_f().step(&x).unwrap().value;
        assert_eq!(x, q("5/4"));
    }

    #[test]
    fn cycles_stream_small() {
        let mut buf = Vec::new();
        let s = run_cycles(3, None, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 13);
        assert_eq!(
            lines[3],
            r#"{"l":2,"rank":2,"bits":"10","d":"1","phi":"1","x0":"1","class":"integer_positive","realized_U":true,"realized_Uflip":false,"misalign_U":null,"misalign_Uflip":0}"#
        );
        assert!(lines[12].starts_with(r#"{"summary":{"lmax":3,"records":12"#));
        assert_eq!(s.counterexamples, 0);
        assert_eq!(s.traces.aligned_closed, 0);
    }

    #[test]
    fn scan_stream() {
        let mut buf = Vec::new();
        let s = run_rmap_scan((5, 20), None, None, &mut buf).unwrap();
        assert_eq!((s.moduli, s.orbits, s.below_bound), (6, 1, 0));
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains(r#""states":[8,12,18]"#));
    }

    #[test]
    fn csv_header() {
        let r = iterate(&MapSpec::u(), &q("3/2"), &IterateOptions::default()).unwrap();
        let mut buf = Vec::new();
        write_trajectory_csv(&[r], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("map,start,fate,steps_used,last,base_entry\nU,3/2,tends_to_trivial,"));
    }
}
