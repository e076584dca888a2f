//! Closed-form laws of displacements and inversion counts.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::perm::count_inversions;
use crate::qseries::{pow_u64, CompensatedSum, QPochhammerTable};

/// Tabulated law of `D = sigma(j) - j` on `[-M..M]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DisplacementPmf {
    pub q: f64,
    pub radius: u64,
    /// `probs[d + M]` is `P(D = d)`.
    pub probs: Vec<f64>,
    /// Bound on `P(|D| > M)`.
    pub tail_bound: f64,
}

impl DisplacementPmf {
    pub fn prob(&self, d: i64) -> Option<f64> {
        let m = self.radius as i64;
        if d.abs() > m {
            return None;
        }
        Some(self.probs[(d + m) as usize])
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        let m = self.radius as i64;
        self.probs
            .iter()
            .enumerate()
            .map(move |(k, &p)| (k as i64 - m, p))
    }

    pub fn total(&self) -> f64 {
        self.probs
            .iter()
            .copied()
            .collect::<CompensatedSum>()
            .value()
    }
}

/// `sum_{l>=0} q^{(l+d)l + (l+d) + l} / (<l+d> <l>)` for `d >= 0`.
///
/// Consecutive terms have ratio `q^{2l+d+3} / ((1-q^{l+d+1})(1-q^{l+1}))`,
/// which decreases in `l`, so once it drops below one the remainder is at
/// most `t * rho / (1 - rho)`.
fn displacement_series(table: &QPochhammerTable, d: u64) -> f64 {
    let p = table.param();
    let eps = p.eps_series();
    let term = |l: u64| p.pow((l + d) * l + l + d + l) / (table.get(l + d) * table.get(l));
    let mut sum = CompensatedSum::default();
    let mut l = 0u64;
    loop {
        let t = term(l);
        sum.add(t);
        let rho = p.pow(2 * l + d + 3) / ((1.0 - p.pow(l + d + 1)) * (1.0 - p.pow(l + 1)));
        if rho < 1.0 {
            let partial = sum.value();
            let next = t * rho;
            let tail = next / (1.0 - rho);
            if next <= eps * partial && tail <= eps * partial || t == 0.0 {
                return partial;
            }
        }
        l += 1;
    }
}

pub fn displacement_pmf(table: &QPochhammerTable, radius: u64) -> DisplacementPmf {
    let q = table.q();
    let scale = (1.0 - q) * table.infinite();
    let half: Vec<f64> = (0..=radius)
        .map(|d| scale * displacement_series(table, d))
        .collect();
    let mut probs = Vec::with_capacity(2 * radius as usize + 1);
    probs.extend(half.iter().rev());
    probs.extend(&half[1..]);
    DisplacementPmf {
        q,
        radius,
        probs,
        tail_bound: 2.0 * pow_u64(q, radius),
    }
}

/// `P(R_j = r, L_j = l) = (1-q) q^{rl+r+l} <inf> / (<r> <l>)`.
pub fn joint_rl_pmf(table: &QPochhammerTable, r: u64, ell: u64) -> f64 {
    let p = table.param();
    (1.0 - p.q()) * p.pow(r * ell + r + ell) * table.infinite() / (table.get(r) * table.get(ell))
}

/// `P(L_j = l | R_j = r) = q^{l(r+1)} <inf> / (<r> <l>)`.
pub fn conditional_l_given_r(table: &QPochhammerTable, r: u64, ell: u64) -> f64 {
    let p = table.param();
    p.pow(ell * (r + 1)) * table.infinite() / (table.get(r) * table.get(ell))
}

/// Displacements `d_1..d_k` of the consecutive positions `1..k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FddQuery {
    pub k: usize,
    pub d: Vec<i64>,
}

impl FddQuery {
    pub fn new(d: Vec<i64>) -> Result<Self> {
        if d.is_empty() {
            return Err(Error::EmptyQuery);
        }
        Ok(Self { k: d.len(), d })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FddValue {
    pub value: f64,
    pub error_bound: f64,
}

/// `P(D_1 = d_1, ..., D_k = d_k)` with a bound on the truncation error.
///
/// Unsorted queries are reduced to the sorted one on the implied values
/// `d_m + m`, times `q^{inv(d_1+1, ..., d_k+k)}`; colliding values give an
/// exact zero.
pub fn fdd_probability(table: &QPochhammerTable, query: &FddQuery, tol: f64) -> Result<FddValue> {
    if query.d.is_empty() {
        return Err(Error::EmptyQuery);
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidTolerance {
            name: "tol",
            value: tol,
        });
    }
    let values: Vec<i64> = query
        .d
        .iter()
        .enumerate()
        .map(|(m, &d)| d + m as i64 + 1)
        .collect();
    let mut sorted = values.clone();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Ok(FddValue {
            value: 0.0,
            error_bound: 0.0,
        });
    }
    let factor = table.param().pow(count_inversions(&values));
    let d: Vec<i64> = sorted
        .iter()
        .enumerate()
        .map(|(m, &v)| v - m as i64 - 1)
        .collect();
    let FddValue { value, error_bound } = fdd_sorted(table, &d, tol);
    Ok(FddValue {
        value: factor * value,
        error_bound: factor * error_bound,
    })
}

fn fdd_sorted(table: &QPochhammerTable, d: &[i64], tol: f64) -> FddValue {
    let p = table.param();
    let k = d.len();
    let gaps: Vec<u64> = d.windows(2).map(|w| (w[1] - w[0]) as u64).collect();
    let mut prefactor = pow_u64(1.0 - p.q(), k as u64) * table.infinite();
    for &g in &gaps {
        prefactor *= table.get(g);
    }
    let offset = (k * (k + 1) / 2) as u64;
    let outer: u64 = gaps.iter().map(|&g| g + 1).product();
    let inner_tol = tol / outer as f64;

    let mut total = CompensatedSum::default();
    let mut err = 0.0;
    let mut a = vec![0u64; k];
    let mut b = vec![0u64; k];
    // odometer over a_1..a_{k-1}
    loop {
        let s: i64 = a[..k - 1].iter().map(|&x| x as i64).sum();
        for m in 1..k {
            b[m] = gaps[m - 1] - a[m - 1];
        }
        let start = (-d[0] - s).max(0) as u64;
        let fixed_den: f64 = a[..k - 1]
            .iter()
            .chain(&b[1..])
            .map(|&x| table.get(x))
            .product();
        let mut ak = start;
        let mut prev: Option<f64> = None;
        loop {
            a[k - 1] = ak;
            b[0] = (d[0] + s + ak as i64) as u64;
            let mut e = 0u64;
            for i in 0..k {
                for j in i..k {
                    e += (b[i] + 1) * (a[j] + 1);
                }
            }
            let t = prefactor * p.pow(e - offset) / (fixed_den * table.get(ak) * table.get(b[0]));
            total.add(t);
            if let Some(tp) = prev {
                let rho = if tp > 0.0 { t / tp } else { 0.0 };
                if rho < 1.0 {
                    let tail = t * rho / (1.0 - rho);
                    if tail <= inner_tol || t == 0.0 {
                        err += tail;
                        break;
                    }
                }
            }
            prev = Some(t);
            ak += 1;
        }
        // advance the odometer
        let mut m = 0;
        while m + 1 < k {
            if a[m] < gaps[m] {
                a[m] += 1;
                break;
            }
            a[m] = 0;
            m += 1;
        }
        if m + 1 >= k {
            break;
        }
    }
    let value = total.value();
    FddValue {
        value,
        error_bound: err + value * table.infinite_error() / table.infinite(),
    }
}

/// Probability that the Euler-measure diagram has rows `lambda_{x_m} = y_m`,
/// with `x_m = b_1+...+b_m+m` and `y_m = a_m+...+a_k`.
///
/// Equals `<inf> prod <b_{m+1}+a_m> / (prod <b> prod <a>) * q^{sum_{i<=j} (b_i+1) a_j}`.
pub fn block_p2(table: &QPochhammerTable, b: &[u64], a: &[u64]) -> Result<f64> {
    if b.is_empty() || b.len() != a.len() {
        return Err(Error::BlockShape(b.len(), a.len()));
    }
    let p = table.param();
    let k = b.len();
    let mut e = 0u64;
    for i in 0..k {
        for j in i..k {
            e += (b[i] + 1) * a[j];
        }
    }
    let mut value = table.infinite() * p.pow(e);
    for m in 0..k - 1 {
        value *= table.get(b[m + 1] + a[m]);
    }
    for m in 0..k {
        value /= table.get(b[m]) * table.get(a[m]);
    }
    Ok(value)
}
