//! Brute-force oracle, statistics and the verification suites.

pub mod bench;
pub mod checks;
pub mod oracle;
pub mod stats;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qseries::{QParam, QPochhammerTable};
use crate::samplers::GeomStream;

pub use oracle::{oracle_enumerate, OraclePmf};
use stats::{Histogram, TestOutcome};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseResult {
    pub name: String,
    pub statistic: f64,
    pub threshold: f64,
    pub pass: bool,
    pub samples_used: u64,
}

impl CaseResult {
    pub fn from_test(name: impl Into<String>, t: TestOutcome, samples_used: u64) -> Self {
        Self {
            name: name.into(),
            statistic: t.statistic,
            threshold: t.threshold,
            pass: t.pass,
            samples_used,
        }
    }

    /// Passes when `statistic <= threshold`.
    pub fn at_most(
        name: impl Into<String>,
        statistic: f64,
        threshold: f64,
        samples_used: u64,
    ) -> Self {
        Self {
            name: name.into(),
            statistic,
            threshold,
            pass: statistic <= threshold,
            samples_used,
        }
    }

    /// Passes when `statistic < threshold`.
    pub fn strictly_below(
        name: impl Into<String>,
        statistic: f64,
        threshold: f64,
        samples_used: u64,
    ) -> Self {
        Self {
            name: name.into(),
            statistic,
            threshold,
            pass: statistic < threshold,
            samples_used,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub suite: String,
    pub cases: Vec<CaseResult>,
    pub overall_pass: bool,
    pub seed: u64,
    pub q: f64,
}

impl VerificationReport {
    pub fn new(suite: &str, mut cases: Vec<CaseResult>, seed: u64, q: f64) -> Self {
        cases.sort_by(|a, b| a.name.cmp(&b.name));
        let overall_pass = cases.iter().all(|c| c.pass);
        Self {
            suite: suite.to_owned(),
            cases,
            overall_pass,
            seed,
            q,
        }
    }
}

pub const SUITES: [&str; 9] = [
    "finite-oracle",
    "displacement",
    "stationarity",
    "inversion-invariance",
    "exchangeability",
    "two-sampler",
    "truncation-convergence",
    "lln",
    "one-sided-left-counts",
];

/// Size knobs of a suite run.
///
/// `params` are the structural sizes of the suite: permutation lengths for
/// `finite-oracle` (default 3,4,5,6), truncation half-widths for
/// `truncation-convergence` (default 5,10,20,40), positions for
/// `one-sided-left-counts` (default 2,5,10) and the largest `n` for
/// `exchangeability` (default 6). `samples` overrides the Monte Carlo size.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SuiteSizes {
    pub params: Vec<u64>,
    pub samples: Option<u64>,
}

impl SuiteSizes {
    fn params_or(&self, default: &[u64]) -> Vec<u64> {
        if self.params.is_empty() {
            default.to_vec()
        } else {
            self.params.clone()
        }
    }

    fn samples_or(&self, default: u64) -> u64 {
        self.samples.unwrap_or(default)
    }
}

pub fn run_suite(
    name: &str,
    sizes: &SuiteSizes,
    p: &QParam,
    seed: u64,
) -> Result<VerificationReport> {
    let table = QPochhammerTable::new(p);
    let cases = match name {
        "finite-oracle" => {
            let draws = sizes.samples_or(200_000);
            sizes
                .params_or(&[3, 4, 5, 6])
                .into_iter()
                .map(|n| checks::finite_oracle_case(p, seed, n as usize, draws))
                .collect::<Result<Vec<_>>>()?
        }
        "displacement" => {
            let samples = sizes.samples_or(1_000_000);
            let mut cases = checks::displacement_cases(&table, seed, samples, 8);
            cases.extend(checks::fdd_pair_cases(
                &table,
                seed,
                samples,
                &[[0, 0], [-1, 1], [1, -1], [1, 0]],
            )?);
            cases.push(checks::tail_case(&table, seed, samples));
            cases
        }
        "stationarity" => checks::stationarity_cases(&table, seed, sizes.samples_or(100_000)),
        "inversion-invariance" => {
            checks::inversion_invariance_cases(&table, seed, sizes.samples_or(100_000))
        }
        "exchangeability" => {
            let max_n = sizes.params_or(&[6])[0] as usize;
            checks::exchangeability_cases(p, 12, max_n.min(oracle::ORACLE_MAX_N))?
        }
        "two-sampler" => {
            let samples = sizes.samples_or(1_000_000);
            let mut cases = vec![checks::two_sampler_tv_case(&table, seed, samples, 1e-6)];
            cases.extend(checks::ell_given_r_cases(&table, seed, samples / 10));
            cases
        }
        "truncation-convergence" => checks::truncation_cases(
            &table,
            seed,
            sizes.samples_or(100_000),
            &sizes.params_or(&[5, 10, 20, 40]),
        ),
        "lln" => checks::lln_cases(&table, seed, sizes.samples_or(1_000_000)),
        "one-sided-left-counts" => checks::one_sided_cases(
            p,
            seed,
            sizes.samples_or(100_000),
            &sizes.params_or(&[2, 5, 10]),
        ),
        other => return Err(Error::UnknownSuite(other.to_owned())),
    };
    Ok(VerificationReport::new(name, cases, seed, p.q()))
}

const BLOCK: u64 = 8192;

/// Splits `samples` into fixed blocks, each on its own substream
/// `(tag << 32) | block`, and returns the per-block results in block order.
pub fn par_blocks<A, F>(seed: u64, tag: u32, p: &QParam, samples: u64, f: F) -> Vec<A>
where
    A: Send,
    F: Fn(&mut GeomStream, u64) -> A + Sync,
{
    let blocks = samples.div_ceil(BLOCK);
    (0..blocks)
        .into_par_iter()
        .map(|b| {
            let count = BLOCK.min(samples - b * BLOCK);
            let mut s = GeomStream::with_substream(seed, ((tag as u64) << 32) | b, p);
            f(&mut s, count)
        })
        .collect()
}

pub fn par_histogram<F>(seed: u64, tag: u32, p: &QParam, samples: u64, f: F) -> Histogram
where
    F: Fn(&mut GeomStream) -> i64 + Sync,
{
    let mut out = Histogram::new();
    for h in par_blocks(seed, tag, p, samples, |s, count| {
        (0..count).map(|_| f(s)).collect::<Histogram>()
    }) {
        out.merge(&h);
    }
    out
}
