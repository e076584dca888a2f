//! Individual verification checks. Each returns one or more cases; the
//! suites in [`super::run_suite`] and the acceptance tests share them.

use std::collections::HashMap;

use crate::dist::{
    conditional_l_given_r, displacement_pmf, fdd_probability, joint_rl_pmf, FddQuery,
};
use crate::error::Result;
use crate::perm::{
    adjacent_swap_r, inversion_counts_window, invert_window, reconstruct_ell, self_contained_hull,
    truncate, Interval, PermWindow, RWindow,
};
use crate::qseries::{q_number, QParam, QPochhammerTable};
use crate::samplers::{
    q_shuffle_prefix, sample_finite_mallows, sample_two_sided_interlacing,
    sample_two_sided_inversion,
};

use super::oracle::oracle_enumerate;
use super::stats::{
    binomial_z, chi_square_gof, chi_square_hist, ks_two_sample, ls_slope, tv_distance, Histogram,
};
use super::{par_blocks, par_histogram, CaseResult};

pub const ALPHA_CHI_SQUARE: f64 = 0.001;
pub const ALPHA_KS: f64 = 0.01;
pub const SIGMA_BAND: f64 = 3.0;

fn interval(lo: i64, hi: i64) -> Interval {
    Interval::new(lo, hi).expect("static interval")
}

/// Index of a permutation of `{1..n}` in `0..n!` via its right counts.
fn perm_index(w: &PermWindow) -> usize {
    let r = inversion_counts_window(w);
    let n = r.r().len();
    r.r()
        .iter()
        .enumerate()
        .fold(0usize, |acc, (i, &ri)| acc * (n - i) + ri as usize)
}

/// Chi-square of the finite sampler against the enumerated law of `S_n`.
pub fn finite_oracle_case(p: &QParam, seed: u64, n: usize, draws: u64) -> Result<CaseResult> {
    let oracle = oracle_enumerate(n, p)?;
    let size: usize = (1..=n).product();
    let blocks = par_blocks(seed, 0x100 + n as u32, p, draws, |s, count| {
        let mut c = vec![0u64; size];
        for _ in 0..count {
            c[perm_index(&sample_finite_mallows(n, s))] += 1;
        }
        c
    });
    let mut observed = vec![0u64; size];
    for b in blocks {
        for (o, c) in observed.iter_mut().zip(b) {
            *o += c;
        }
    }
    let mut probs = vec![0.0; size];
    for (w, &pr) in &oracle.probs {
        let pw = PermWindow::from_word(w.clone())?;
        probs[perm_index(&pw)] = pr;
    }
    let t = chi_square_gof(&observed, &probs, ALPHA_CHI_SQUARE);
    Ok(CaseResult::from_test(format!("n={n}"), t, draws))
}

/// Displacement at position 0 from the interlacing sampler.
pub fn interlacing_d0(table: &QPochhammerTable, seed: u64, tag: u32, samples: u64) -> Histogram {
    let window = interval(0, 0);
    par_histogram(seed, tag, table.param(), samples, |s| {
        sample_two_sided_interlacing(window, table, s).0.values()[0]
    })
}

/// Per-bin 3 sigma agreement of the sampled law of `D_0` with the exact
/// displacement law for `|d| <= radius`, and a chi-square over all bins.
pub fn displacement_cases(
    table: &QPochhammerTable,
    seed: u64,
    samples: u64,
    radius: u64,
) -> Vec<CaseResult> {
    let hist = interlacing_d0(table, seed, 0x200, samples);
    let pmf = displacement_pmf(table, radius.max(30));
    let mut max_z: f64 = 0.0;
    for d in -(radius as i64)..=radius as i64 {
        let z = binomial_z(hist.count(d), samples, pmf.prob(d).unwrap());
        max_z = max_z.max(z.abs());
    }
    let support: Vec<(i64, f64)> = pmf.iter().collect();
    let chi = chi_square_hist(&hist, &support, ALPHA_CHI_SQUARE);
    vec![
        CaseResult::at_most("d0-bins-max-z", max_z, SIGMA_BAND, samples),
        CaseResult::from_test("d0-chi-square", chi, samples),
    ]
}

/// Monte Carlo frequency of `(D_1, D_2) = d` against the closed form.
pub fn fdd_pair_cases(
    table: &QPochhammerTable,
    seed: u64,
    samples: u64,
    queries: &[[i64; 2]],
) -> Result<Vec<CaseResult>> {
    let window = interval(1, 2);
    let blocks = par_blocks(seed, 0x300, table.param(), samples, |s, count| {
        let mut c: HashMap<[i64; 2], u64> = HashMap::new();
        for _ in 0..count {
            let (w, _) = sample_two_sided_interlacing(window, table, s);
            let v = w.values();
            *c.entry([v[0] - 1, v[1] - 2]).or_default() += 1;
        }
        c
    });
    let mut counts: HashMap<[i64; 2], u64> = HashMap::new();
    for b in blocks {
        for (k, v) in b {
            *counts.entry(k).or_default() += v;
        }
    }
    let mut out = Vec::new();
    for q in queries {
        let fdd = fdd_probability(table, &FddQuery::new(q.to_vec())?, 1e-14)?;
        let c = counts.get(q).copied().unwrap_or(0);
        let name = format!("fdd({},{})", q[0], q[1]);
        if fdd.value == 0.0 {
            out.push(CaseResult::at_most(name, c as f64, 0.0, samples));
        } else {
            let z = binomial_z(c, samples, fdd.value);
            out.push(CaseResult::at_most(name, z.abs(), SIGMA_BAND, samples));
        }
    }
    Ok(out)
}

fn inversion_d_at(
    p: &QParam,
    seed: u64,
    tag: u32,
    samples: u64,
    pos: i64,
    eps_tv: f64,
) -> Histogram {
    let window = interval(pos, pos);
    par_histogram(seed, tag, p, samples, |s| {
        sample_two_sided_inversion(window, p, s, eps_tv)
            .expect("single-position windows cannot collide")
            .window
            .values()[0]
            - pos
    })
}

/// KS comparison of `D_0` and `D_5` for both two-sided samplers.
pub fn stationarity_cases(table: &QPochhammerTable, seed: u64, samples: u64) -> Vec<CaseResult> {
    let p = table.param();
    let d5 = {
        let window = interval(5, 5);
        par_histogram(seed, 0x401, p, samples, |s| {
            sample_two_sided_interlacing(window, table, s).0.values()[0] - 5
        })
    };
    let d0 = interlacing_d0(table, seed, 0x400, samples);
    let inv0 = inversion_d_at(p, seed, 0x402, samples, 0, 1e-6);
    let inv5 = inversion_d_at(p, seed, 0x403, samples, 5, 1e-6);
    vec![
        CaseResult::from_test(
            "interlacing-d0-vs-d5",
            ks_two_sample(&d0, &d5, ALPHA_KS),
            2 * samples,
        ),
        CaseResult::from_test(
            "inversion-d0-vs-d5",
            ks_two_sample(&inv0, &inv5, ALPHA_KS),
            2 * samples,
        ),
    ]
}

/// Statistics of `Sigma` and `Sigma^{-1}` read off the minimal self-contained
/// interval around 0, from independent sample sets.
pub fn inversion_invariance_cases(
    table: &QPochhammerTable,
    seed: u64,
    samples: u64,
) -> Vec<CaseResult> {
    let window = interval(-40, 40);
    let collect = |tag: u32, inverse: bool| {
        let blocks = par_blocks(seed, tag, table.param(), samples, |s, count| {
            let mut disp = Histogram::new();
            let mut right = Histogram::new();
            let mut dropped = 0u64;
            for _ in 0..count {
                let (w, _) = sample_two_sided_interlacing(window, table, s);
                let Some(hull) = self_contained_hull(&w, interval(0, 0)) else {
                    dropped += 1;
                    continue;
                };
                let mut local = w.restrict(hull).expect("hull lies in the window");
                if inverse {
                    local = invert_window(&local).expect("hull is self-contained");
                }
                disp.add(local.value_at(0).unwrap());
                let counts = inversion_counts_window(&local);
                right.add(counts.r()[(0 - hull.lo) as usize] as i64);
            }
            (disp, right, dropped)
        });
        let mut disp = Histogram::new();
        let mut right = Histogram::new();
        let mut dropped = 0;
        for (d, r, x) in blocks {
            disp.merge(&d);
            right.merge(&r);
            dropped += x;
        }
        (disp, right, dropped)
    };
    let (d_fwd, r_fwd, x_fwd) = collect(0x500, false);
    let (d_inv, r_inv, x_inv) = collect(0x501, true);
    let used = d_fwd.total() + d_inv.total();
    vec![
        CaseResult::from_test(
            "d0-sigma-vs-inverse",
            ks_two_sample(&d_fwd, &d_inv, ALPHA_KS),
            used,
        ),
        CaseResult::from_test(
            "r0-sigma-vs-inverse",
            ks_two_sample(&r_fwd, &r_inv, ALPHA_KS),
            used,
        ),
        CaseResult::at_most(
            "hull-outside-window-fraction",
            (x_fwd + x_inv) as f64 / (2 * samples) as f64,
            0.01,
            2 * samples,
        ),
    ]
}

/// Density ratios of the adjacent swap on right counts, and of adjacent
/// transpositions under the enumerated finite law.
pub fn exchangeability_cases(p: &QParam, max_r: u64, max_n: usize) -> Result<Vec<CaseResult>> {
    let q = p.q();
    let g = |n: u64| (1.0 - q) * p.pow(n);
    let mut worst: f64 = 0.0;
    let mut pairs = 0u64;
    for a in 0..=max_r {
        for b in 0..=max_r {
            let (a2, b2) = adjacent_swap_r(a, b);
            let ratio = g(a2) * g(b2) / (g(a) * g(b));
            let expected = if a <= b { q } else { 1.0 / q };
            worst = worst.max((ratio / expected - 1.0).abs());
            pairs += 1;
        }
    }
    let mut out = vec![CaseResult::at_most(
        "swap-density-ratio",
        worst,
        1e-12,
        pairs,
    )];
    for n in 2..=max_n {
        let oracle = oracle_enumerate(n, p)?;
        let mut worst: f64 = 0.0;
        let mut checked = 0u64;
        for (w, &pr) in &oracle.probs {
            for i in 0..n - 1 {
                let mut v = w.clone();
                v.swap(i, i + 1);
                let expected = if w[i + 1] > w[i] { q } else { 1.0 / q };
                worst = worst.max((oracle.prob(&v) / pr / expected - 1.0).abs());
                checked += 1;
            }
        }
        out.push(CaseResult::at_most(
            format!("oracle-swap-ratio-n={n}"),
            worst,
            1e-12,
            checked,
        ));
    }
    Ok(out)
}

/// Total variation between the `D_0` laws of the two two-sided samplers.
pub fn two_sampler_tv_case(
    table: &QPochhammerTable,
    seed: u64,
    samples: u64,
    eps_tv: f64,
) -> CaseResult {
    let a = interlacing_d0(table, seed, 0x600, samples);
    let b = inversion_d_at(table.param(), seed, 0x601, samples, 0, eps_tv);
    CaseResult::at_most("d0-total-variation", tv_distance(&a, &b), 0.01, 2 * samples)
}

/// Law of the recovered left count given `R_0 = r` against the conditional
/// closed form.
pub fn ell_given_r_cases(table: &QPochhammerTable, seed: u64, samples: u64) -> Vec<CaseResult> {
    let p = table.param();
    (0..3u64)
        .map(|r| {
            let hist = par_histogram(seed, 0x610 + r as u32, p, samples, |s| {
                let rw = RWindow::new(0, vec![r]).expect("nonempty");
                let mut cache = Vec::new();
                let mut extend = |i: i64| {
                    let k = (-1 - i) as usize;
                    while cache.len() <= k {
                        cache.push(s.geometric());
                    }
                    cache[k]
                };
                reconstruct_ell(&rw, 0, p, 1e-9, Some(&mut extend)).ell as i64
            });
            let support: Vec<(i64, f64)> = (0..60)
                .map(|l| (l, conditional_l_given_r(table, r, l as u64)))
                .collect();
            CaseResult::from_test(
                format!("ell-given-r={r}"),
                chi_square_hist(&hist, &support, ALPHA_CHI_SQUARE),
                samples,
            )
        })
        .collect()
}

/// Fraction of windows whose truncation to `[-n..n]` moves the value at 0.
pub fn truncation_fractions(
    table: &QPochhammerTable,
    seed: u64,
    samples: u64,
    ns: &[u64],
) -> Vec<f64> {
    let big = *ns.iter().max().expect("at least one size") as i64;
    let window = interval(-big, big);
    let blocks = par_blocks(seed, 0x700, table.param(), samples, |s, count| {
        let mut moved = vec![0u64; ns.len()];
        for _ in 0..count {
            let (w, _) = sample_two_sided_interlacing(window, table, s);
            let v0 = w.value_at(0).unwrap();
            for (k, &n) in ns.iter().enumerate() {
                let t = truncate(&w, interval(-(n as i64), n as i64)).expect("nested interval");
                if t.value_at(0).unwrap() != v0 {
                    moved[k] += 1;
                }
            }
        }
        moved
    });
    let mut moved = vec![0u64; ns.len()];
    for b in blocks {
        for (m, c) in moved.iter_mut().zip(b) {
            *m += c;
        }
    }
    moved.iter().map(|&m| m as f64 / samples as f64).collect()
}

pub fn truncation_cases(
    table: &QPochhammerTable,
    seed: u64,
    samples: u64,
    ns: &[u64],
) -> Vec<CaseResult> {
    let mut ns = ns.to_vec();
    ns.sort_unstable();
    ns.dedup();
    let fr = truncation_fractions(table, seed, samples, &ns);
    let mut out = Vec::new();
    let mut prev = 1.0;
    for (&n, &f) in ns.iter().zip(&fr) {
        out.push(CaseResult::at_most(
            format!("moved-n={n:03}"),
            f,
            prev,
            samples,
        ));
        prev = f;
    }
    out.push(CaseResult::strictly_below(
        format!("moved-n={:03}-below-0.01", ns.last().unwrap()),
        prev,
        0.01,
        samples,
    ));
    out
}

/// Left count at 0 and descent indicator at 0 from interlacing windows
/// `[-reach..1]`.
pub fn ell_and_descent_samples(
    table: &QPochhammerTable,
    seed: u64,
    tag: u32,
    samples: u64,
    reach: i64,
) -> (Histogram, u64) {
    let window = interval(-reach, 1);
    let blocks = par_blocks(seed, tag, table.param(), samples, |s, count| {
        let mut ell = Histogram::new();
        let mut descents = 0u64;
        for _ in 0..count {
            let (w, _) = sample_two_sided_interlacing(window, table, s);
            let v = w.values();
            let at0 = v[reach as usize];
            ell.add(v[..reach as usize].iter().filter(|&&x| x > at0).count() as i64);
            if at0 > v[reach as usize + 1] {
                descents += 1;
            }
        }
        (ell, descents)
    });
    let mut ell = Histogram::new();
    let mut descents = 0;
    for (h, d) in blocks {
        ell.merge(&h);
        descents += d;
    }
    (ell, descents)
}

/// `sum l * P(R=r, L=l)` from the closed form.
pub fn ell_mean_series(table: &QPochhammerTable) -> f64 {
    let q = table.q();
    let cutoff = ((1e-20f64).ln() / q.ln()).ceil() as u64 + 10;
    let mut total = 0.0;
    for r in 0..cutoff {
        for l in 1..cutoff {
            total += l as f64 * joint_rl_pmf(table, r, l);
        }
    }
    total
}

pub fn lln_cases(table: &QPochhammerTable, seed: u64, samples: u64) -> Vec<CaseResult> {
    let q = table.q();
    let mean_l = q / (1.0 - q);
    let descent = q / (1.0 + q);
    let (ell, descents) = ell_and_descent_samples(table, seed, 0x800, samples, 80);
    let z_ell = (ell.mean() - mean_l) / (ell.variance() / samples as f64).sqrt();
    vec![
        CaseResult::at_most(
            "ell-mean-series",
            (ell_mean_series(table) - mean_l).abs(),
            1e-9,
            0,
        ),
        CaseResult::at_most("ell-mean-monte-carlo-z", z_ell.abs(), SIGMA_BAND, samples),
        CaseResult::at_most(
            "descent-density-z",
            binomial_z(descents, samples, descent).abs(),
            SIGMA_BAND,
            samples,
        ),
    ]
}

/// Left counts of the one-sided word at the given positions against the
/// truncated geometric law `q^k / [i]_q` on `0..i`.
pub fn one_sided_cases(p: &QParam, seed: u64, samples: u64, positions: &[u64]) -> Vec<CaseResult> {
    let mut out: Vec<CaseResult> = positions
        .iter()
        .map(|&i| {
            let hist = par_histogram(seed, 0x900 + i as u32, p, samples, |s| {
                let w = q_shuffle_prefix(i as usize, s);
                let last = w[i as usize - 1];
                w[..i as usize - 1].iter().filter(|&&v| v > last).count() as i64
            });
            let z = q_number(i, p);
            let support: Vec<(i64, f64)> = (0..i).map(|k| (k as i64, p.pow(k) / z)).collect();
            CaseResult::from_test(
                format!("ell-position-{i:03}"),
                chi_square_hist(&hist, &support, ALPHA_CHI_SQUARE),
                samples,
            )
        })
        .collect();
    // a miss within the prefix lands in the pooled cell beyond the support
    let hist = par_histogram(seed, 0x9ff, p, samples, |s| {
        let w = q_shuffle_prefix(64, s);
        w.iter().position(|&v| v == 1).unwrap_or(w.len()) as i64
    });
    let support: Vec<(i64, f64)> = (0..40)
        .map(|b| (b, p.pow(b as u64) * (1.0 - p.q())))
        .collect();
    out.push(CaseResult::from_test(
        "letter-one-position",
        chi_square_hist(&hist, &support, ALPHA_CHI_SQUARE),
        samples,
    ));
    out
}

/// Fitted log-slope of the empirical `P(|D_0| > m)`, `m = 1..=max_m`,
/// relative to `ln q`.
pub fn tail_slope_ratio(hist: &Histogram, q: f64, max_m: i64) -> f64 {
    let pts: Vec<(f64, f64)> = (1..=max_m)
        .map(|m| (m as f64, hist.abs_tail(m).ln()))
        .collect();
    ls_slope(&pts) / q.ln()
}

pub fn tail_case(table: &QPochhammerTable, seed: u64, samples: u64) -> CaseResult {
    let hist = interlacing_d0(table, seed, 0xa00, samples);
    let ratio = tail_slope_ratio(&hist, table.q(), 8);
    CaseResult::at_most(
        "tail-slope-relative-error",
        (ratio - 1.0).abs(),
        0.15,
        samples,
    )
}
