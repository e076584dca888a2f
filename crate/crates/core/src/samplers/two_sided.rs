use serde::Serialize;

use crate::error::{Error, Result};
use crate::perm::{rebuild_sigma, reconstruct_ell, Interval, InversionCounts, PermWindow, RWindow};
use crate::qseries::{QParam, QPochhammerTable};

use super::young::{minus_positions, plus_positions};
use super::{q_shuffle_prefix, sample_young_euler, GeomStream, YoungDiagram};

/// The independent pieces behind one interlacing sample: a prefix of the
/// positive word, a suffix of the nonpositive word and the diagram that
/// interlaces them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InterlacingTriple {
    pub w_plus_prefix: Vec<i64>,
    /// Last letters of the nonpositive word, left to right.
    pub w_minus_suffix: Vec<i64>,
    pub lambda: YoungDiagram,
}

/// Exact sample of the two-sided Mallows permutation restricted to `window`.
///
/// Draw order on the stream: diagram, positive word, reflected word.
pub fn sample_two_sided_interlacing(
    window: Interval,
    table: &QPochhammerTable,
    s: &mut GeomStream,
) -> (PermWindow, InterlacingTriple) {
    let lambda = sample_young_euler(table, s);
    let plus = plus_positions(&lambda, window.hi);
    let minus = minus_positions(&lambda, window.lo);
    let w_plus = q_shuffle_prefix(plus.len(), s);
    let u = q_shuffle_prefix(minus.len(), s);

    let mut values = vec![0i64; window.len()];
    for (&pos, &v) in plus.iter().zip(&w_plus) {
        if pos >= window.lo {
            values[(pos - window.lo) as usize] = v;
        }
    }
    for (&pos, &v) in minus.iter().zip(&u) {
        if pos <= window.hi {
            values[(pos - window.lo) as usize] = 1 - v;
        }
    }
    let w_minus_suffix = u.iter().rev().map(|&v| 1 - v).collect();
    (
        PermWindow::from_parts_unchecked(window.lo, values),
        InterlacingTriple {
            w_plus_prefix: w_plus,
            w_minus_suffix,
            lambda,
        },
    )
}

/// Output of the inversion-count sampler.
#[derive(Debug, Clone, PartialEq)]
pub struct InversionSample {
    pub window: PermWindow,
    pub counts: InversionCounts,
    /// Right counts drawn to the left of the window.
    pub left_draws: usize,
}

/// Rebuilds the window from right counts on it, reading further counts to
/// the left through `extend`. The residual is the sum of per-position
/// residuals, a total-variation bound for the produced window law.
pub fn counts_from_right(
    r_window: &RWindow,
    p: &QParam,
    eps_tv: f64,
    extend: &mut dyn FnMut(i64) -> u64,
) -> Result<InversionCounts> {
    if !(eps_tv > 0.0 && eps_tv.is_finite()) {
        return Err(Error::InvalidTolerance {
            name: "eps_tv",
            value: eps_tv,
        });
    }
    let interval = r_window.interval();
    let mut ell = Vec::with_capacity(interval.len());
    let mut residual = 0.0;
    for j in interval.iter() {
        let est = reconstruct_ell(r_window, j, p, eps_tv, Some(&mut *extend));
        ell.push(est.ell);
        residual += est.residual;
    }
    let n = ell.len();
    InversionCounts::new(
        interval.lo,
        r_window.values().to_vec(),
        ell,
        vec![true; n],
        residual,
    )
}

/// Approximate sample via i.i.d. geometric right counts, within total
/// variation `window.len() * eps_tv` of the exact window law.
pub fn sample_two_sided_inversion(
    window: Interval,
    p: &QParam,
    s: &mut GeomStream,
    eps_tv: f64,
) -> Result<InversionSample> {
    let r: Vec<u64> = window.iter().map(|_| s.geometric()).collect();
    let r_window = RWindow::new(window.lo, r)?;
    let mut left: Vec<u64> = Vec::new();
    let mut extend = |i: i64| {
        let k = (window.lo - 1 - i) as usize;
        while left.len() <= k {
            left.push(s.geometric());
        }
        left[k]
    };
    let counts = counts_from_right(&r_window, p, eps_tv, &mut extend)?;
    let sigma = rebuild_sigma(&counts)?;
    Ok(InversionSample {
        window: sigma,
        counts,
        left_draws: left.len(),
    })
}
