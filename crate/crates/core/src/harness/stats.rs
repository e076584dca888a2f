//! Goodness-of-fit statistics used by the verification suites.

use std::collections::BTreeMap;

use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Integer-valued sample summarized as value counts.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Histogram {
    counts: BTreeMap<i64, u64>,
    total: u64,
}

impl Histogram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, v: i64) {
        *self.counts.entry(v).or_default() += 1;
        self.total += 1;
    }

    pub fn merge(&mut self, other: &Histogram) {
        for (&v, &c) in &other.counts {
            *self.counts.entry(v).or_default() += c;
        }
        self.total += other.total;
    }

    pub fn count(&self, v: i64) -> u64 {
        self.counts.get(&v).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn freq(&self, v: i64) -> f64 {
        self.count(v) as f64 / self.total as f64
    }

    pub fn mean(&self) -> f64 {
        self.counts
            .iter()
            .map(|(&v, &c)| v as f64 * c as f64)
            .sum::<f64>()
            / self.total as f64
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.counts
            .iter()
            .map(|(&v, &c)| (v as f64 - m).powi(2) * c as f64)
            .sum::<f64>()
            / self.total as f64
    }

    /// Fraction of the sample with `|v| > m`.
    pub fn abs_tail(&self, m: i64) -> f64 {
        let c: u64 = self
            .counts
            .iter()
            .filter(|(v, _)| v.abs() > m)
            .map(|(_, &c)| c)
            .sum();
        c as f64 / self.total as f64
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, u64)> + '_ {
        self.counts.iter().map(|(&v, &c)| (v, c))
    }
}

impl FromIterator<i64> for Histogram {
    fn from_iter<I: IntoIterator<Item = i64>>(iter: I) -> Self {
        let mut h = Histogram::new();
        for v in iter {
            h.add(v);
        }
        h
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestOutcome {
    pub statistic: f64,
    pub threshold: f64,
    pub pass: bool,
}

/// Pearson goodness of fit. Cells are taken in the given order and merged
/// forward until each pooled cell expects at least 5 observations; any mass
/// missing from `probs` forms one more cell.
pub fn chi_square_gof(observed: &[u64], probs: &[f64], alpha: f64) -> TestOutcome {
    assert_eq!(observed.len(), probs.len());
    let n: u64 = observed.iter().sum();
    let nf = n as f64;
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let mut acc = (0.0, 0.0);
    for (&o, &p) in observed.iter().zip(probs) {
        acc.0 += o as f64;
        acc.1 += p * nf;
        if acc.1 >= 5.0 {
            cells.push(acc);
            acc = (0.0, 0.0);
        }
    }
    let rest_p = (1.0 - probs.iter().sum::<f64>()).max(0.0);
    acc.1 += rest_p * nf;
    // observations outside the listed cells are not in `observed`
    if acc.1 > 0.0 || acc.0 > 0.0 {
        match cells.last_mut() {
            Some(last) if acc.1 < 5.0 => {
                last.0 += acc.0;
                last.1 += acc.1;
            }
            _ => cells.push(acc),
        }
    }
    let statistic: f64 = cells
        .iter()
        .filter(|c| c.1 > 0.0)
        .map(|&(o, e)| (o - e).powi(2) / e)
        .sum();
    let dof = cells.len().saturating_sub(1).max(1);
    let threshold = ChiSquared::new(dof as f64)
        .expect("positive degrees of freedom")
        .inverse_cdf(1.0 - alpha);
    TestOutcome {
        statistic,
        threshold,
        pass: statistic <= threshold,
    }
}

/// Chi-square goodness of fit of a histogram against a pmf on the listed
/// support; everything else is pooled into one cell.
pub fn chi_square_hist(hist: &Histogram, support: &[(i64, f64)], alpha: f64) -> TestOutcome {
    let mut observed: Vec<u64> = support.iter().map(|&(v, _)| hist.count(v)).collect();
    let mut probs: Vec<f64> = support.iter().map(|&(_, p)| p).collect();
    let listed: u64 = observed.iter().sum();
    let rest = hist.total() - listed;
    let rest_p = (1.0 - probs.iter().sum::<f64>()).max(0.0);
    observed.push(rest);
    probs.push(rest_p);
    chi_square_gof(&observed, &probs, alpha)
}

/// Asymptotic critical coefficient `c(alpha) = sqrt(-ln(alpha/2) / 2)`.
pub fn ks_coefficient(alpha: f64) -> f64 {
    (-(alpha / 2.0).ln() / 2.0).sqrt()
}

/// Two-sample Kolmogorov-Smirnov test on integer data.
pub fn ks_two_sample(a: &Histogram, b: &Histogram, alpha: f64) -> TestOutcome {
    let (na, nb) = (a.total() as f64, b.total() as f64);
    let mut keys: Vec<i64> = a
        .iter()
        .map(|(v, _)| v)
        .chain(b.iter().map(|(v, _)| v))
        .collect();
    keys.sort_unstable();
    keys.dedup();
    let (mut ca, mut cb, mut d) = (0u64, 0u64, 0f64);
    for v in keys {
        ca += a.count(v);
        cb += b.count(v);
        d = d.max((ca as f64 / na - cb as f64 / nb).abs());
    }
    let threshold = ks_coefficient(alpha) * ((na + nb) / (na * nb)).sqrt();
    TestOutcome {
        statistic: d,
        threshold,
        pass: d <= threshold,
    }
}

/// Total variation distance between two empirical laws.
pub fn tv_distance(a: &Histogram, b: &Histogram) -> f64 {
    let mut keys: Vec<i64> = a
        .iter()
        .map(|(v, _)| v)
        .chain(b.iter().map(|(v, _)| v))
        .collect();
    keys.sort_unstable();
    keys.dedup();
    0.5 * keys
        .into_iter()
        .map(|v| (a.freq(v) - b.freq(v)).abs())
        .sum::<f64>()
}

/// Standardized deviation of a binomial count from its expectation.
pub fn binomial_z(count: u64, n: u64, p: f64) -> f64 {
    let nf = n as f64;
    let sd = (nf * p * (1.0 - p)).sqrt();
    if sd == 0.0 {
        return if (count as f64 - nf * p).abs() < 0.5 {
            0.0
        } else {
            f64::INFINITY
        };
    }
    (count as f64 - nf * p) / sd
}

/// Least-squares slope of `y` on `x`.
pub fn ls_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
        / points.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>()
}
