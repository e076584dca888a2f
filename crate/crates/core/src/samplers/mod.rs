//! Seeded samplers for finite, one-sided and two-sided Mallows permutations.

mod stream;
mod two_sided;
mod young;

pub use stream::GeomStream;
pub use two_sided::{
    sample_two_sided_interlacing, sample_two_sided_inversion, InterlacingTriple, InversionSample,
};
pub use young::{sample_young_euler, sign_word_from_lambda, YoungDiagram};

use crate::perm::{eliminate_right, PermWindow};

/// Draw `k` in `0..=limit` with probability `q^k / [limit+1]_q`.
///
/// Inverse CDF on the survival function: `P(K >= m) = (q^m - q^{L+1}) / (1 - q^{L+1})`.
pub fn sample_truncated_geometric(limit: u64, s: &mut GeomStream) -> u64 {
    let u = s.uniform();
    if limit == 0 {
        return 0;
    }
    let top = crate::qseries::pow_u64(s.q(), limit + 1);
    let t = top + u * (1.0 - top);
    let k = (t.ln() / s.ln_q()).floor();
    if k >= limit as f64 {
        limit
    } else {
        k as u64
    }
}

/// Finite Mallows permutation of `{1..n}` on positions `1..n`.
pub fn sample_finite_mallows(n: usize, s: &mut GeomStream) -> PermWindow {
    assert!(n >= 1, "sample_finite_mallows: n must be positive");
    let r: Vec<u64> = (1..=n)
        .map(|i| sample_truncated_geometric((n - i) as u64, s))
        .collect();
    eliminate_right(&r).expect("truncated draws respect the support")
}

/// First `n_letters` letters of the one-sided q-shuffle word.
pub fn q_shuffle_prefix(n_letters: usize, s: &mut GeomStream) -> Vec<i64> {
    let draws: Vec<u64> = (0..n_letters).map(|_| s.geometric()).collect();
    q_shuffle_from_draws(&draws)
}

/// Runs the q-shuffle on given draws: letter `i` is the `(R_i+1)`-th
/// smallest positive integer not used yet.
pub fn q_shuffle_from_draws(draws: &[u64]) -> Vec<i64> {
    let mut used: Vec<bool> = Vec::new();
    let mut first_free = 0usize;
    let mut word = Vec::with_capacity(draws.len());
    for &r in draws {
        let mut remaining = r;
        let mut v = first_free;
        loop {
            if v >= used.len() {
                // everything past the end is free
                v += remaining as usize;
                break;
            }
            if !used[v] {
                if remaining == 0 {
                    break;
                }
                remaining -= 1;
            }
            v += 1;
        }
        if v >= used.len() {
            used.resize(v + 1, false);
        }
        used[v] = true;
        while first_free < used.len() && used[first_free] {
            first_free += 1;
        }
        word.push(v as i64 + 1);
    }
    word
}
