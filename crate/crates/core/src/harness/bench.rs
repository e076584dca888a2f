//! Wall-clock timings of the main kernels.

use std::hint::black_box;
use std::time::Instant;

use serde::Serialize;

use crate::dist::{displacement_pmf, fdd_probability, FddQuery};
use crate::error::{Error, Result};
use crate::perm::Interval;
use crate::qseries::{QParam, QPochhammerTable};
use crate::samplers::{
    q_shuffle_prefix, sample_finite_mallows, sample_two_sided_interlacing,
    sample_two_sided_inversion, sample_young_euler, GeomStream,
};

pub const BENCH_OPS: [&str; 8] = [
    "finite-100",
    "q-shuffle-1000",
    "young",
    "interlacing-50",
    "inversion-50",
    "pochhammer-table",
    "displacement-pmf-20",
    "fdd-3",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub op: String,
    pub reps: u64,
    pub q: f64,
    pub total_seconds: f64,
    pub mean_nanos: f64,
    /// Data-dependent value folded over the repetitions.
    pub checksum: i64,
}

pub fn bench(op: &str, reps: u64, p: &QParam, seed: u64) -> Result<BenchReport> {
    let table = QPochhammerTable::new(p);
    let mut s = GeomStream::new(seed, p);
    let window = Interval::symmetric(50);
    let mut step: Box<dyn FnMut() -> i64> = match op {
        "finite-100" => Box::new(|| sample_finite_mallows(100, &mut s).values()[0]),
        "q-shuffle-1000" => Box::new(|| q_shuffle_prefix(1000, &mut s)[999]),
        "young" => Box::new(|| sample_young_euler(&table, &mut s).size() as i64),
        "interlacing-50" => Box::new(|| {
            sample_two_sided_interlacing(window, &table, &mut s)
                .0
                .values()[50]
        }),
        "inversion-50" => Box::new(|| {
            sample_two_sided_inversion(window, p, &mut s, 1e-9)
                .map(|x| x.window.values()[50])
                .unwrap_or(i64::MIN)
        }),
        "pochhammer-table" => Box::new(|| QPochhammerTable::new(p).truncation_index() as i64),
        "displacement-pmf-20" => Box::new(|| (displacement_pmf(&table, 20).probs[20] * 1e6) as i64),
        "fdd-3" => Box::new(|| {
            let q = FddQuery::new(vec![-1, 0, 2]).expect("nonempty");
            (fdd_probability(&table, &q, 1e-12).expect("valid").value * 1e9) as i64
        }),
        other => return Err(Error::Usage(format!("unknown bench op `{other}`"))),
    };
    let start = Instant::now();
    let mut checksum = 0i64;
    for _ in 0..reps {
        checksum = checksum.wrapping_mul(31).wrapping_add(black_box(step()));
    }
    let elapsed = start.elapsed().as_secs_f64();
    Ok(BenchReport {
        op: op.to_owned(),
        reps,
        q: p.q(),
        total_seconds: elapsed,
        mean_nanos: if reps == 0 {
            0.0
        } else {
            elapsed * 1e9 / reps as f64
        },
        checksum,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_op_runs() {
        let p = QParam::new(0.5).unwrap();
        for op in BENCH_OPS {
            let a = bench(op, 3, &p, 1).unwrap();
            let b = bench(op, 3, &p, 1).unwrap();
            assert_eq!(a.checksum, b.checksum, "{op}");
        }
        assert!(bench("nope", 1, &p, 1).is_err());
    }
}
