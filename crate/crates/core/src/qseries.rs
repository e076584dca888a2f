//! q-analogs used by every distributional formula in the crate.
//!
//! Everything is evaluated in `f64`. Infinite products are truncated
//! adaptively with the geometric tail bound
//! `prod_{k>N} (1 - q^k) >= 1 - q^{N+1} / (1 - q)`, so the reported error is a
//! certificate rather than an estimate.

use crate::error::{Error, Result};

/// Deformation parameter `q` in `(0, 1)` together with the numeric
/// tolerances used by series truncation and by approximate comparisons.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QParam {
    q: f64,
    eps_series: f64,
    eps_compare: f64,
}

impl QParam {
    pub const DEFAULT_EPS_SERIES: f64 = 1e-16;
    pub const DEFAULT_EPS_COMPARE: f64 = 1e-12;

    pub fn new(q: f64) -> Result<Self> {
        Self::with_tolerances(q, Self::DEFAULT_EPS_SERIES, Self::DEFAULT_EPS_COMPARE)
    }

    pub fn with_tolerances(q: f64, eps_series: f64, eps_compare: f64) -> Result<Self> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::InvalidQ(q));
        }
        for (name, value) in [("eps_series", eps_series), ("eps_compare", eps_compare)] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::InvalidTolerance { name, value });
            }
        }
        Ok(Self {
            q,
            eps_series,
            eps_compare,
        })
    }

    #[inline]
    pub fn q(&self) -> f64 {
        self.q
    }

    #[inline]
    pub fn eps_series(&self) -> f64 {
        self.eps_series
    }

    #[inline]
    pub fn eps_compare(&self) -> f64 {
        self.eps_compare
    }

    /// `q^e` for a nonnegative integer exponent; underflows cleanly to zero.
    #[inline]
    pub fn pow(&self, e: u64) -> f64 {
        pow_u64(self.q, e)
    }

    /// Approximate equality under `eps_compare`, mixed absolute/relative.
    pub fn approx_eq(&self, a: f64, b: f64) -> bool {
        (a - b).abs() <= self.eps_compare * (1.0 + a.abs().max(b.abs()))
    }
}

#[inline]
pub(crate) fn pow_u64(base: f64, e: u64) -> f64 {
    if e > i32::MAX as u64 {
        0.0
    } else {
        base.powi(e as i32)
    }
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl std::iter::FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = Self::default();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// The q-number `[m]_q = 1 + q + ... + q^{m-1}`.
pub fn q_number(m: u64, p: &QParam) -> f64 {
    let mut term = 1.0;
    let mut acc = CompensatedSum::default();
    for _ in 0..m {
        acc.add(term);
        term *= p.q;
    }
    acc.value()
}

/// The q-factorial `[n!]_q = [1]_q [2]_q ... [n]_q`, the finite Mallows
/// normalizer.
pub fn q_factorial(n: u64, p: &QParam) -> f64 {
    let mut number = 0.0;
    let mut product = 1.0;
    for _ in 0..n {
        // [i]_q = 1 + q [i-1]_q
        number = 1.0 + p.q * number;
        product *= number;
    }
    product
}

/// Length argument of a q-Pochhammer symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extent {
    Finite(u64),
    Infinite,
}

/// `<n>_q = (q;q)_n` with an error bound: zero for finite `n`, the achieved
/// truncation bound for `n = Infinite`.
pub fn q_pochhammer(n: Extent, p: &QParam) -> (f64, f64) {
    match n {
        Extent::Finite(n) => {
            let mut prod = 1.0;
            let mut qk = 1.0;
            for _ in 0..n {
                qk *= p.q;
                prod *= 1.0 - qk;
            }
            (prod, 0.0)
        }
        Extent::Infinite => {
            let (value, error, _) = infinite_product(p);
            (value, error)
        }
    }
}

/// Smallest `N` with `q^{N+1}/(1-q) <= eps_series`, the partial product up to
/// `N` and its absolute error bound.
fn infinite_product(p: &QParam) -> (f64, f64, u64) {
    let q = p.q;
    let mut prod = 1.0;
    let mut qk = 1.0;
    let mut n = 0u64;
    loop {
        // qk = q^n here; the tail after n factors is bounded by q^{n+1}/(1-q)
        let tail = qk * q / (1.0 - q);
        if tail <= p.eps_series {
            return (prod, prod * tail, n);
        }
        n += 1;
        qk *= q;
        prod *= 1.0 - qk;
    }
}

/// `<b+a>_q / (<b>_q <a>_q)`: the generating function of Young diagrams that
/// fit into a `b x a` rectangle.
pub fn q_binomial(b: u64, a: u64, p: &QParam) -> f64 {
    let (small, large) = if a <= b { (a, b) } else { (b, a) };
    let mut value = 1.0;
    for i in 1..=small {
        value *= (1.0 - p.pow(large + i)) / (1.0 - p.pow(i));
    }
    value
}

/// Memoized `<n>_q` for `n = 0..=N` together with `<inf>_q`.
///
/// `N` is the truncation index of the infinite product, so
/// `values[N] == infinite_value`. Lookups past `N` extend the product on the
/// fly.
#[derive(Debug, Clone)]
pub struct QPochhammerTable {
    param: QParam,
    values: Vec<f64>,
    infinite_value: f64,
    infinite_error: f64,
}

impl QPochhammerTable {
    pub fn new(p: &QParam) -> Self {
        let (infinite_value, infinite_error, n) = infinite_product(p);
        let mut values = Vec::with_capacity(n as usize + 1);
        values.push(1.0);
        let mut qk = 1.0;
        for _ in 0..n {
            qk *= p.q;
            let last = *values.last().unwrap();
            values.push(last * (1.0 - qk));
        }
        debug_assert_eq!(*values.last().unwrap(), infinite_value);
        Self {
            param: *p,
            values,
            infinite_value,
            infinite_error,
        }
    }

    pub fn param(&self) -> &QParam {
        &self.param
    }

    pub fn q(&self) -> f64 {
        self.param.q
    }

    /// Index `N` of the last stored value.
    pub fn truncation_index(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `<n>_q`.
    pub fn get(&self, n: u64) -> f64 {
        if let Some(v) = self.values.get(n as usize) {
            return *v;
        }
        let mut prod = self.infinite_value;
        for k in self.values.len() as u64..=n {
            prod *= 1.0 - self.param.pow(k);
        }
        prod
    }

    pub fn infinite(&self) -> f64 {
        self.infinite_value
    }

    pub fn infinite_error(&self) -> f64 {
        self.infinite_error
    }

    pub fn binomial(&self, b: u64, a: u64) -> f64 {
        self.get(b + a) / (self.get(b) * self.get(a))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qp(q: f64) -> QParam {
        QParam::new(q).unwrap()
    }

    /// Brute-force sum of q^{|lambda|} over partitions with at most `rows`
    /// parts, each at most `cols`.
    fn box_sum(rows: u64, cols: u64, q: f64) -> f64 {
        // stop with the current parts, or append one more part <= the last
        fn rec(rows_left: u64, max_part: u64, size: u64, q: f64) -> f64 {
            let mut total = q.powi(size as i32);
            if rows_left > 0 {
                for part in 1..=max_part {
                    total += rec(rows_left - 1, part, size + part, q);
                }
            }
            total
        }
        rec(rows, cols, 0, q)
    }

    #[test]
    fn rejects_out_of_range_q() {
        for q in [0.0, 1.0, -0.2, 1.5, f64::NAN] {
            assert!(QParam::new(q).is_err(), "q = {q}");
        }
        assert!(QParam::with_tolerances(0.5, 0.0, 1e-12).is_err());
        assert!(QParam::with_tolerances(0.5, 1e-12, -1.0).is_err());
    }

    #[test]
    fn q_number_examples() {
        assert_eq!(q_number(0, &qp(0.7)), 0.0);
        assert_eq!(q_number(1, &qp(0.7)), 1.0);
        assert_eq!(q_number(3, &qp(0.5)), 1.75);
    }

    #[test]
    fn q_factorial_examples() {
        assert_eq!(q_factorial(0, &qp(0.4)), 1.0);
        assert_eq!(q_factorial(3, &qp(0.5)), 2.625);
        assert!((q_factorial(2, &qp(0.3)) - 1.3).abs() < 1e-15);
    }

    #[test]
    fn q_pochhammer_examples() {
        assert_eq!(q_pochhammer(Extent::Finite(0), &qp(0.5)), (1.0, 0.0));
        assert_eq!(q_pochhammer(Extent::Finite(2), &qp(0.5)), (0.375, 0.0));

        let p = qp(0.5);
        let oracle: f64 = (1..=200).map(|k| 1.0 - 0.5f64.powi(k)).product();
        let (value, err) = q_pochhammer(Extent::Infinite, &p);
        assert!(err <= p.eps_series());
        assert!((value - oracle).abs() <= 1e-15, "{value} vs {oracle}");
        assert!((value - 0.288788).abs() < 1e-6);
    }

    #[test]
    fn pochhammer_is_strictly_decreasing() {
        for q in [0.1, 0.5, 0.9, 0.99] {
            let table = QPochhammerTable::new(&qp(q));
            let v = table.values();
            assert_eq!(v[0], 1.0);
            for n in 1..v.len() {
                assert!(v[n] <= v[n - 1]);
                // strictness is visible while 1 - q^n is distinguishable from 1
                if q.powi(n as i32) > 1e-15 {
                    assert!(v[n] < v[n - 1], "q={q} n={n}");
                    assert!(table.infinite() < v[n - 1]);
                }
            }
            assert!(
                (table.infinite() - v[table.truncation_index()]).abs() <= table.infinite_error()
            );
        }
    }

    #[test]
    fn table_matches_direct_products() {
        let p = qp(0.8);
        let table = QPochhammerTable::new(&p);
        for n in [0u64, 1, 5, 40, 200, 5000] {
            let (direct, _) = q_pochhammer(Extent::Finite(n), &p);
            assert!((table.get(n) - direct).abs() <= 1e-14, "n={n}");
        }
    }

    #[test]
    fn q_binomial_examples() {
        let p = qp(0.5);
        assert_eq!(q_binomial(5, 0, &p), 1.0);
        assert_eq!(q_binomial(0, 5, &p), 1.0);
        assert!((q_binomial(1, 1, &p) - 1.5).abs() < 1e-15);
        // 2x2 box: sizes 0,1,2,2,3,4
        let expected = 1.0 + 0.5 + 2.0 * 0.25 + 0.125 + 0.0625;
        assert!((q_binomial(2, 2, &p) - expected).abs() < 1e-15);
    }

    #[test]
    fn q_binomial_is_symmetric() {
        for q in [0.3, 0.5, 0.8] {
            let p = qp(q);
            for a in 0..=20 {
                for b in 0..=20 {
                    assert!(p.approx_eq(q_binomial(b, a, &p), q_binomial(a, b, &p)));
                }
            }
        }
    }

    #[test]
    fn q_binomial_matches_box_enumeration() {
        for q in [0.3, 0.5, 0.8] {
            let p = qp(q);
            let table = QPochhammerTable::new(&p);
            for a in 0..=6 {
                for b in 0..=6 {
                    let brute = box_sum(b, a, q);
                    assert!(
                        p.approx_eq(q_binomial(b, a, &p), brute),
                        "q={q} a={a} b={b}"
                    );
                    assert!(p.approx_eq(table.binomial(b, a), brute));
                }
            }
        }
    }

    #[test]
    fn eulerian_identity() {
        // sum_n y^n / <n>_q = prod_{m>=0} (1 - y q^m)^{-1}; with y = q the
        // right side is 1 / <inf>_q
        for q in [0.3, 0.5, 0.8] {
            let p = qp(q);
            let table = QPochhammerTable::new(&p);
            let mut sum = CompensatedSum::default();
            let mut n = 0u64;
            loop {
                let term = p.pow(n) / table.get(n);
                sum.add(term);
                // later terms shrink by at least q / (1 - q^{n+1}) each
                let ratio = q / (1.0 - p.pow(n + 1));
                if ratio < 1.0 && term * ratio / (1.0 - ratio) < 1e-17 {
                    break;
                }
                n += 1;
            }
            let rhs = 1.0 / table.infinite();
            let bound = rhs * 2.0 * table.infinite_error() / table.infinite() + 1e-13 * rhs;
            assert!((sum.value() - rhs).abs() <= bound, "q={q}");
        }
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut s = CompensatedSum::default();
        s.add(1.0);
        for _ in 0..10 {
            s.add(1e-17);
        }
        assert!((s.value() - (1.0 + 1e-16)).abs() < 1e-18);
    }
}
