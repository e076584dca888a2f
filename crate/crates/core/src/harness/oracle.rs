use std::collections::BTreeMap;

use itertools::Itertools;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::perm::count_inversions;
use crate::qseries::{q_factorial, QParam};

/// Exact finite Mallows law by enumeration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OraclePmf {
    pub n: usize,
    pub q: f64,
    pub probs: BTreeMap<Vec<i64>, f64>,
}

impl OraclePmf {
    pub fn prob(&self, word: &[i64]) -> f64 {
        self.probs.get(word).copied().unwrap_or(0.0)
    }
}

pub const ORACLE_MAX_N: usize = 8;

pub fn oracle_enumerate(n: usize, p: &QParam) -> Result<OraclePmf> {
    if n == 0 || n > ORACLE_MAX_N {
        return Err(Error::TooLarge(n));
    }
    let z = q_factorial(n as u64, p);
    let probs = (1..=n as i64)
        .permutations(n)
        .map(|w| {
            let weight = p.pow(count_inversions(&w)) / z;
            (w, weight)
        })
        .collect();
    Ok(OraclePmf { n, q: p.q(), probs })
}
