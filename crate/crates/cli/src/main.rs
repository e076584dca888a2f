use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mallows::dist::{displacement_pmf, fdd_probability, joint_rl_pmf, FddQuery};
use mallows::harness::bench::bench;
use mallows::harness::{run_suite, SuiteSizes};
use mallows::samplers::{
    q_shuffle_prefix, sample_finite_mallows, sample_two_sided_interlacing,
    sample_two_sided_inversion, GeomStream,
};
use mallows::{Error, Interval, PermWindow, QParam, QPochhammerTable};
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "mallows",
    version,
    about = "Sample and verify Mallows random permutations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw permutations or permutation windows.
    Sample(SampleArgs),
    /// Evaluate closed-form laws.
    Pmf(PmfArgs),
    /// Run a verification suite; exits 1 when any case fails.
    Verify(VerifyArgs),
    /// Time one kernel.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Finite,
    OneSided,
    TwoSided,
}

#[derive(Clone, Copy, ValueEnum)]
enum Sampler {
    Interlacing,
    Inversion,
}

#[derive(Clone, Copy, ValueEnum)]
enum SampleFormat {
    Jsonl,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum PmfFormat {
    Csv,
    Json,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long, value_enum)]
    mode: Mode,
    /// Permutation length (finite) or prefix length (one-sided).
    #[arg(long)]
    n: Option<usize>,
    /// Two-sided window as LO:HI.
    #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
    window: Option<Interval>,
    #[arg(long)]
    q: f64,
    #[arg(long, default_value_t = 1)]
    count: u64,
    #[arg(long, env = "MALLOWS_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-9)]
    eps_tv: f64,
    #[arg(long, value_enum, default_value_t = Sampler::Interlacing)]
    sampler: Sampler,
    #[arg(long, value_enum, default_value_t = SampleFormat::Jsonl)]
    format: SampleFormat,
}

#[derive(Clone, Copy, ValueEnum)]
enum Law {
    Displacement,
    JointRl,
    Fdd,
}

#[derive(Args)]
struct PmfArgs {
    #[arg(value_enum)]
    law: Law,
    #[arg(long)]
    q: f64,
    /// Largest |d| for the displacement table.
    #[arg(long, default_value_t = 10)]
    radius: u64,
    /// Largest r and l for the joint table.
    #[arg(long, default_value_t = 10)]
    max: u64,
    /// Displacements of positions 1..k for fdd, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    d: Vec<i64>,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long, value_enum, default_value_t = PmfFormat::Csv)]
    format: PmfFormat,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    suite: String,
    #[arg(long)]
    q: f64,
    #[arg(long, env = "MALLOWS_SEED", default_value_t = 0)]
    seed: u64,
    /// Structural sizes of the suite, comma separated.
    #[arg(long, value_delimiter = ',')]
    sizes: Vec<u64>,
    /// Monte Carlo sample count.
    #[arg(long)]
    samples: Option<u64>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    op: String,
    #[arg(long, default_value_t = 1000)]
    reps: u64,
    #[arg(long, default_value_t = 0.5)]
    q: f64,
    #[arg(long, env = "MALLOWS_SEED", default_value_t = 0)]
    seed: u64,
}

fn parse_window(s: &str) -> Result<Interval, String> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| format!("expected LO:HI, got `{s}`"))?;
    let lo: i64 = lo.trim().parse().map_err(|e| format!("bad LO: {e}"))?;
    let hi: i64 = hi.trim().parse().map_err(|e| format!("bad HI: {e}"))?;
    Interval::new(lo, hi).map_err(|e| e.to_string())
}

enum Failure {
    Usage(String),
    Verification,
    Io(io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
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

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let result = match cli.command {
        Command::Sample(a) => sample(a, &mut out),
        Command::Pmf(a) => pmf(a, &mut out),
        Command::Verify(a) => verify(a, &mut out),
        Command::Bench(a) => run_bench(a, &mut out),
    };
    let flushed = out.flush();
    match (result, flushed) {
        (Ok(()), Ok(())) => ExitCode::SUCCESS,
        (Err(Failure::Verification), _) => ExitCode::from(1),
        (Err(Failure::Usage(msg)), _) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        (Err(Failure::Io(e)), _) | (Ok(()), Err(e)) => {
            if e.kind() == io::ErrorKind::BrokenPipe {
                return ExitCode::SUCCESS;
            }
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn sample(a: SampleArgs, out: &mut impl Write) -> Result<(), Failure> {
    let p = QParam::new(a.q)?;
    let mut s = GeomStream::new(a.seed, &p);
    let (mode, interval) = match a.mode {
        Mode::Finite | Mode::OneSided => {
            let n =
                a.n.filter(|&n| n >= 1)
                    .ok_or_else(|| Failure::Usage("--n >= 1 is required for this mode".into()))?;
            let name = if matches!(a.mode, Mode::Finite) {
                "finite"
            } else {
                "one-sided"
            };
            (name, Interval::new(1, n as i64)?)
        }
        Mode::TwoSided => {
            let w = a
                .window
                .ok_or_else(|| Failure::Usage("--window LO:HI is required for two-sided".into()))?;
            (
                match a.sampler {
                    Sampler::Interlacing => "two-sided-interlacing",
                    Sampler::Inversion => "two-sided-inversion",
                },
                w,
            )
        }
    };
    if !(a.eps_tv > 0.0 && a.eps_tv.is_finite()) {
        return Err(Failure::Usage(format!(
            "--eps-tv must be positive, got {}",
            a.eps_tv
        )));
    }
    let table = QPochhammerTable::new(&p);
    let header = json!({
        "q": a.q,
        "seed": a.seed,
        "mode": mode,
        "window": interval.to_string(),
        "eps_tv": matches!((a.mode, a.sampler), (Mode::TwoSided, Sampler::Inversion)).then_some(a.eps_tv),
        "version": env!("CARGO_PKG_VERSION"),
    });
    match a.format {
        SampleFormat::Jsonl => writeln!(out, "{header}")?,
        SampleFormat::Csv => writeln!(out, "sample,position,value")?,
    }
    for k in 0..a.count {
        let w: PermWindow = match a.mode {
            Mode::Finite => sample_finite_mallows(interval.len(), &mut s),
            Mode::OneSided => PermWindow::new(1, q_shuffle_prefix(interval.len(), &mut s))?,
            Mode::TwoSided => match a.sampler {
                Sampler::Interlacing => sample_two_sided_interlacing(interval, &table, &mut s).0,
                Sampler::Inversion => {
                    sample_two_sided_inversion(interval, &p, &mut s, a.eps_tv)?.window
                }
            },
        };
        match a.format {
            SampleFormat::Jsonl => {
                serde_json::to_writer(&mut *out, &w)?;
                writeln!(out)?;
            }
            SampleFormat::Csv => {
                for (i, v) in w.interval().iter().zip(w.values()) {
                    writeln!(out, "{k},{i},{v}")?;
                }
            }
        }
    }
    Ok(())
}

fn pmf(a: PmfArgs, out: &mut impl Write) -> Result<(), Failure> {
    let p = QParam::new(a.q)?;
    let table = QPochhammerTable::new(&p);
    match a.law {
        Law::Displacement => {
            let pmf = displacement_pmf(&table, a.radius);
            match a.format {
                PmfFormat::Csv => {
                    writeln!(out, "d,probability")?;
                    for (d, pr) in pmf.iter() {
                        writeln!(out, "{d},{pr}")?;
                    }
                    writeln!(out, "tail_bound,{}", pmf.tail_bound)?;
                }
                PmfFormat::Json => {
                    serde_json::to_writer(&mut *out, &pmf)?;
                    writeln!(out)?;
                }
            }
        }
        Law::JointRl => match a.format {
            PmfFormat::Csv => {
                writeln!(out, "r,ell,probability")?;
                for r in 0..=a.max {
                    for l in 0..=a.max {
                        writeln!(out, "{r},{l},{}", joint_rl_pmf(&table, r, l))?;
                    }
                }
            }
            PmfFormat::Json => {
                let rows: Vec<_> = (0..=a.max)
                    .flat_map(|r| (0..=a.max).map(move |l| (r, l)))
                    .map(|(r, l)| json!({"r": r, "ell": l, "probability": joint_rl_pmf(&table, r, l)}))
                    .collect();
                serde_json::to_writer(&mut *out, &rows)?;
                writeln!(out)?;
            }
        },
        Law::Fdd => {
            let query = FddQuery::new(a.d)?;
            let v = fdd_probability(&table, &query, a.tol)?;
            let body = json!({"query": query, "value": v.value, "error_bound": v.error_bound});
            serde_json::to_writer(&mut *out, &body)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

fn verify(a: VerifyArgs, out: &mut impl Write) -> Result<(), Failure> {
    let p = QParam::new(a.q)?;
    let sizes = SuiteSizes {
        params: a.sizes,
        samples: a.samples,
    };
    let report = run_suite(&a.suite, &sizes, &p, a.seed)?;
    serde_json::to_writer_pretty(&mut *out, &report)?;
    writeln!(out)?;
    if report.overall_pass {
        Ok(())
    } else {
        for c in report.cases.iter().filter(|c| !c.pass) {
            eprintln!(
                "FAIL {}/{}: statistic {} vs threshold {}",
                report.suite, c.name, c.statistic, c.threshold
            );
        }
        Err(Failure::Verification)
    }
}

fn run_bench(a: BenchArgs, out: &mut impl Write) -> Result<(), Failure> {
    let p = QParam::new(a.q)?;
    let report = bench(&a.op, a.reps, &p, a.seed)?;
    serde_json::to_writer(&mut *out, &report)?;
    writeln!(out)?;
    Ok(())
}
