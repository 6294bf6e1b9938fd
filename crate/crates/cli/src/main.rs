use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use realcollatz::harness::{
    self, build_pool, iterate_exit_code, sample_floor, sample_starts, write_jsonl,
    write_trajectory_csv, Conjecture, ConjectureRun, ExperimentConfig, OutputFormat,
};
use realcollatz::{iterate, segment_inequality, trace, BitSeq, MapSpec, Verdict};

const EXIT_USAGE: u8 = 1;
const EXIT_CAP: u8 = 2;
const EXIT_COUNTEREXAMPLE: u8 = 3;
const EXIT_IO: u8 = 4;

#[derive(Parser)]
#[command(name = "realcollatz", version, about = "Exact experiments on the real 3x+1 function and its relatives")]
struct Cli {
    /// `key = value` file; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<String>,
    /// Output file (default: standard output).
    #[arg(long, global = true)]
    out: Option<String>,
    /// Worker threads (default: all cores). Output does not depend on it.
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Iterate a map from given or sampled starts.
    Iterate(IterateArgs),
    /// Enumerate every pattern up to a length and check realization by U and Uflip.
    Cycles {
        #[arg(long)]
        lmax: Option<usize>,
    },
    /// Gather evidence for one of RU, NU, RUflip, RV, BU, BUflip, BV, Q2.
    Conjecture(ConjectureArgs),
    /// Dump the remainder trace of one pattern.
    Trace {
        #[arg(long)]
        bits: String,
    },
    /// Scan the remainder recurrence for closed orbits.
    RmapScan {
        /// Inclusive range `a..b` of moduli.
        #[arg(long)]
        d_range: Option<String>,
        #[arg(long)]
        max_len: Option<usize>,
    },
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    den_bits: Option<u32>,
    #[arg(long)]
    int_bits: Option<u32>,
    #[arg(long)]
    cap: Option<u64>,
    #[arg(long)]
    escape: Option<String>,
}

#[derive(Args)]
struct IterateArgs {
    #[arg(long)]
    map: Option<String>,
    /// Comma-separated exact rationals.
    #[arg(long)]
    start: Option<String>,
    /// `jsonl` or `csv`.
    #[arg(long)]
    format: Option<String>,
    #[command(flatten)]
    sample: SampleArgs,
}

#[derive(Args)]
struct ConjectureArgs {
    name: String,
    /// Inclusive range `a..b` for the `2m + 3/2` family.
    #[arg(long)]
    m_range: Option<String>,
    /// Steps per family member.
    #[arg(long)]
    steps: Option<u64>,
    /// Also write every trajectory report here, one JSON object per line.
    #[arg(long)]
    records: Option<String>,
    #[command(flatten)]
    sample: SampleArgs,
}

enum Failure {
    Usage(String),
    Io(io::Error),
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Io(e.into())
    }
}

fn usage(e: impl ToString) -> Failure {
    Failure::Usage(e.to_string())
}

fn open_out(path: Option<&str>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn set_opt(cfg: &mut ExperimentConfig, key: &str, value: Option<impl ToString>) -> Result<(), Failure> {
    match value {
        Some(v) => cfg.set(key, &v.to_string()).map_err(usage),
        None => Ok(()),
    }
}

fn sample_flags(cfg: &mut ExperimentConfig, a: &SampleArgs) -> Result<(), Failure> {
    set_opt(cfg, "samples", a.samples)?;
    set_opt(cfg, "seed", a.seed)?;
    set_opt(cfg, "den_bits", a.den_bits)?;
    set_opt(cfg, "int_bits", a.int_bits)?;
    set_opt(cfg, "cap", a.cap)?;
    set_opt(cfg, "escape", a.escape.as_ref())
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let mut flags = ExperimentConfig { out: cli.out.clone(), workers: cli.workers, ..Default::default() };
    match &cli.cmd {
        Command::Iterate(a) => {
            set_opt(&mut flags, "map", a.map.as_ref())?;
            set_opt(&mut flags, "start", a.start.as_ref())?;
            set_opt(&mut flags, "format", a.format.as_ref())?;
            sample_flags(&mut flags, &a.sample)?;
        }
        Command::Cycles { lmax } => set_opt(&mut flags, "lmax", *lmax)?,
        Command::Conjecture(a) => {
            set_opt(&mut flags, "m_range", a.m_range.as_ref())?;
            set_opt(&mut flags, "steps", a.steps)?;
            sample_flags(&mut flags, &a.sample)?;
        }
        Command::Trace { .. } => {}
        Command::RmapScan { d_range, max_len } => {
            set_opt(&mut flags, "d_range", d_range.as_ref())?;
            set_opt(&mut flags, "max_len", *max_len)?;
        }
    }
    let base = match &cli.config {
        Some(p) => ExperimentConfig::load(p).map_err(usage)?,
        None => ExperimentConfig::default(),
    };
    let cfg = flags.merged_over(base);
    let pool = build_pool(cfg.workers).map_err(usage)?;

    match cli.cmd {
        Command::Iterate(_) => {
            let map: MapSpec = cfg.map.as_deref().unwrap_or("U").parse().map_err(usage)?;
            let starts = match (&cfg.starts, cfg.samples) {
                (Some(s), _) => s.clone(),
                (None, Some(_)) => sample_starts(&cfg.sample_spec(), &sample_floor(&map)),
                (None, None) => return Err(usage("iterate needs --start or --samples")),
            };
            let opts = cfg.iterate_options();
            let reports = starts
                .iter()
                .map(|x| iterate(&map, x, &opts))
                .collect::<Result<Vec<_>, _>>()
                .map_err(usage)?;
            let mut out = open_out(cfg.out.as_deref())?;
            match cfg.format.unwrap_or_default() {
                OutputFormat::Jsonl => write_jsonl(&reports, &mut out)?,
                OutputFormat::Csv => write_trajectory_csv(&reports, &mut out)?,
            }
            out.flush()?;
            Ok(if iterate_exit_code(&reports) == 0 { 0 } else { EXIT_CAP })
        }
        Command::Cycles { .. } => {
            let lmax = cfg.lmax.ok_or_else(|| usage("cycles needs --lmax"))?;
            if lmax == 0 || lmax >= BitSeq::MAX_LEN {
                return Err(usage(format!("--lmax must be in 1..{}", BitSeq::MAX_LEN)));
            }
            let mut out = open_out(cfg.out.as_deref())?;
            let summary = harness::run_cycles(lmax, pool, &mut out)?;
            if summary.counterexamples > 0 {
                eprintln!("counterexample: {} realized pattern(s) outside the integer cycles", summary.counterexamples);
                return Ok(EXIT_COUNTEREXAMPLE);
            }
            Ok(0)
        }
        Command::Conjecture(a) => {
            let c: Conjecture = a.name.parse().map_err(usage)?;
            let runner = ConjectureRun::new(c, &cfg);
            let (report, trajectories) = runner.run(pool.as_deref()).map_err(usage)?;
            if let Some(path) = &a.records {
                let mut rec = open_out(Some(path))?;
                write_jsonl(&trajectories, &mut rec)?;
                rec.flush()?;
            }
            let mut out = open_out(cfg.out.as_deref())?;
            serde_json::to_writer_pretty(&mut out, &report)?;
            out.write_all(b"\n")?;
            out.flush()?;
            if report.counterexample_suspected() {
                eprintln!("{}", report.conclusion);
            }
            Ok(0)
        }
        Command::Trace { bits } => {
            let s: BitSeq = bits.parse().map_err(usage)?;
            let rec = realcollatz::evaluate(&s);
            let plain = trace(&rec, false).map_err(usage)?;
            let flipped = trace(&rec, true).map_err(usage)?;
            let ledger = |t: &realcollatz::RemainderTrace| {
                (t.verdict == Verdict::AlignedClosed).then(|| segment_inequality(t).ok()).flatten()
            };
            let doc = json!({
                "bits": s,
                "x0": rec.x0,
                "plain": plain,
                "flipped": flipped,
                "plain_inequalities": ledger(&plain),
                "flipped_inequalities": ledger(&flipped),
            });
            let mut out = open_out(cfg.out.as_deref())?;
            serde_json::to_writer_pretty(&mut out, &doc)?;
            out.write_all(b"\n")?;
            out.flush()?;
            Ok(0)
        }
        Command::RmapScan { .. } => {
            let range = cfg.d_range.unwrap_or((5, 200));
            let mut out = open_out(cfg.out.as_deref())?;
            let summary = harness::run_rmap_scan(range, cfg.max_len, pool.as_deref(), &mut out).map_err(|e| match e {
                harness::ScanRunError::Io(e) => Failure::Io(e),
                other => usage(other),
            })?;
            Ok(if summary.below_bound > 0 { EXIT_COUNTEREXAMPLE } else { 0 })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Io(e)) => {
            eprintln!("I/O error: {e}");
            ExitCode::from(EXIT_IO)
        }
    }
}
