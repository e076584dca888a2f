use serde::Serialize;

use crate::error::{Error, Result};
use crate::perm::Interval;
use crate::qseries::QPochhammerTable;

use super::GeomStream;

/// Young diagram given by weakly decreasing positive parts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize)]
pub struct YoungDiagram {
    parts: Vec<u64>,
}

impl YoungDiagram {
    pub fn new(parts: Vec<u64>) -> Result<Self> {
        let ok = parts.iter().all(|&p| p > 0) && parts.windows(2).all(|w| w[0] >= w[1]);
        if !ok {
            return Err(Error::InvalidDiagram(parts));
        }
        Ok(Self { parts })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn parts(&self) -> &[u64] {
        &self.parts
    }

    /// Number of nonzero parts.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn size(&self) -> u64 {
        self.parts.iter().sum()
    }

    /// `lambda_k` with 1-based `k`, zero past the last part.
    pub fn part(&self, k: usize) -> u64 {
        if k == 0 {
            panic!("parts are indexed from 1");
        }
        self.parts.get(k - 1).copied().unwrap_or(0)
    }

    pub fn transpose(&self) -> YoungDiagram {
        let width = self.parts.first().copied().unwrap_or(0);
        let parts = (1..=width)
            .map(|c| self.parts.iter().take_while(|&&p| p >= c).count() as u64)
            .collect();
        YoungDiagram { parts }
    }

    /// All diagrams with `|lambda| = n`, parts in decreasing order.
    pub fn all_of_size(n: u64) -> Vec<YoungDiagram> {
        fn rec(n: u64, max: u64, prefix: &mut Vec<u64>, out: &mut Vec<YoungDiagram>) {
            if n == 0 {
                out.push(YoungDiagram {
                    parts: prefix.clone(),
                });
                return;
            }
            for p in (1..=max.min(n)).rev() {
                prefix.push(p);
                rec(n - p, p, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        rec(n, n, &mut Vec::new(), &mut out);
        out
    }
}

/// Sample `P(lambda) = <inf>_q q^{|lambda|}`.
///
/// Multiplicities `m_k` of part size `k` are independent with
/// `P(m_k = t) = (1 - q^k) q^{kt}`. The largest part `T` is drawn first from
/// `P(T <= t) = prod_{k>t} (1 - q^k) = <inf>_q / <t>_q`; then `m_T` is
/// `1 + Geom(q^T)` and the smaller multiplicities are unconditioned.
pub fn sample_young_euler(table: &QPochhammerTable, s: &mut GeomStream) -> YoungDiagram {
    debug_assert_eq!(table.q(), s.q());
    let u = s.uniform();
    let inf = table.infinite();
    let mut t = 0u64;
    while u > inf / table.get(t) {
        t += 1;
    }
    if t == 0 {
        return YoungDiagram::empty();
    }
    let mut mult = vec![0u64; t as usize + 1];
    mult[t as usize] = 1 + s.geometric_power(t);
    for (k, m) in mult.iter_mut().enumerate().take(t as usize).skip(1) {
        *m = s.geometric_power(k as u64);
    }
    let mut parts = Vec::new();
    for k in (1..=t).rev() {
        parts.extend(std::iter::repeat(k).take(mult[k as usize] as usize));
    }
    YoungDiagram { parts }
}

/// Positions `k - lambda_k`, `k >= 1`, that are `<= hi`, in increasing order.
pub(crate) fn plus_positions(lambda: &YoungDiagram, hi: i64) -> Vec<i64> {
    let mut out = Vec::new();
    let mut k = 1i64;
    loop {
        let pos = k - lambda.part(k as usize) as i64;
        if pos > hi {
            break;
        }
        out.push(pos);
        k += 1;
    }
    out
}

/// Positions `lambda'_{t+1} - t`, `t >= 0`, that are `>= lo`, in decreasing order.
pub(crate) fn minus_positions(lambda: &YoungDiagram, lo: i64) -> Vec<i64> {
    let dual = lambda.transpose();
    let mut out = Vec::new();
    let mut t = 0i64;
    loop {
        let pos = dual.part(t as usize + 1) as i64 - t;
        if pos < lo {
            break;
        }
        out.push(pos);
        t += 1;
    }
    out
}

/// Interlacing signs on a window: `+1` exactly at the positions `k - lambda_k`.
pub fn sign_word_from_lambda(lambda: &YoungDiagram, window: Interval) -> Vec<i8> {
    let mut eps = vec![-1i8; window.len()];
    for pos in plus_positions(lambda, window.hi) {
        if pos >= window.lo {
            eps[(pos - window.lo) as usize] = 1;
        }
    }
    eps
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qseries::QParam;

    fn diagram(parts: &[u64]) -> YoungDiagram {
        YoungDiagram::new(parts.to_vec()).unwrap()
    }

    #[test]
    fn construction() {
        assert!(YoungDiagram::new(vec![3, 1, 1]).is_ok());
        assert!(YoungDiagram::new(vec![1, 2]).is_err());
        assert!(YoungDiagram::new(vec![2, 0]).is_err());
        assert_eq!(diagram(&[3, 1, 1]).size(), 5);
        assert_eq!(diagram(&[3, 1, 1]).transpose().parts(), &[3, 1, 1]);
        assert_eq!(diagram(&[4, 2]).transpose().parts(), &[2, 2, 1, 1]);
        assert_eq!(YoungDiagram::empty().transpose().parts(), &[] as &[u64]);
    }

    #[test]
    fn partition_counts() {
        let counts: Vec<usize> = (0..=10)
            .map(|n| YoungDiagram::all_of_size(n).len())
            .collect();
        assert_eq!(counts, vec![1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42]);
    }

    #[test]
    fn signs_examples() {
        let w = Interval::new(-3, 3).unwrap();
        assert_eq!(
            sign_word_from_lambda(&YoungDiagram::empty(), w),
            vec![-1, -1, -1, -1, 1, 1, 1]
        );
        assert_eq!(
            sign_word_from_lambda(&diagram(&[1]), w),
            vec![-1, -1, -1, 1, -1, 1, 1]
        );
    }

    #[test]
    fn minus_positions_complement_plus() {
        for n in 0..=8 {
            for lam in YoungDiagram::all_of_size(n) {
                let w = Interval::new(-12, 12).unwrap();
                let eps = sign_word_from_lambda(&lam, w);
                let minus = minus_positions(&lam, w.lo);
                let from_dual: Vec<i64> = minus.iter().copied().filter(|&p| p <= w.hi).collect();
                let mut direct: Vec<i64> = w
                    .iter()
                    .zip(&eps)
                    .filter(|(_, &e)| e == -1)
                    .map(|(i, _)| i)
                    .collect();
                direct.reverse();
                assert_eq!(from_dual, direct, "{lam:?}");
            }
        }
    }

    #[test]
    fn size_equals_sign_inversions() {
        for n in 0..=6 {
            for lam in YoungDiagram::all_of_size(n) {
                let eps = sign_word_from_lambda(&lam, Interval::new(-10, 10).unwrap());
                let mut inv = 0u64;
                let mut plus_seen = 0u64;
                for &e in &eps {
                    if e == 1 {
                        plus_seen += 1;
                    } else {
                        inv += plus_seen;
                    }
                }
                assert_eq!(inv, lam.size(), "{lam:?}");
                // balanced: as many +1 at nonpositive positions as -1 at positive ones
                let plus_left = eps[..11].iter().filter(|&&e| e == 1).count();
                let minus_right = eps[11..].iter().filter(|&&e| e == -1).count();
                assert_eq!(plus_left, minus_right);
            }
        }
    }

    #[test]
    fn euler_sampler_frequencies() {
        let q = 0.5;
        let p = QParam::new(q).unwrap();
        let table = QPochhammerTable::new(&p);
        let mut s = GeomStream::new(2024, &p);
        let n = 100_000;
        let mut empty = 0u64;
        let mut single = 0u64;
        let mut total = 0u64;
        let mut total_sq = 0f64;
        for _ in 0..n {
            let lam = sample_young_euler(&table, &mut s);
            assert!(YoungDiagram::new(lam.parts().to_vec()).is_ok());
            match lam.parts() {
                [] => empty += 1,
                [1] => single += 1,
                _ => {}
            }
            total += lam.size();
            total_sq += (lam.size() as f64).powi(2);
        }
        let p0 = table.infinite();
        assert!((p0 - 0.288_788).abs() < 1e-6);
        let sd0 = (n as f64 * p0 * (1.0 - p0)).sqrt();
        assert!((empty as f64 - n as f64 * p0).abs() < 3.0 * sd0);
        let p1 = q * p0;
        let sd1 = (n as f64 * p1 * (1.0 - p1)).sqrt();
        assert!((single as f64 - n as f64 * p1).abs() < 3.0 * sd1);

        let mean_exact: f64 = (1..200)
            .map(|k| k as f64 * q.powi(k) / (1.0 - q.powi(k)))
            .sum();
        let mean = total as f64 / n as f64;
        let var = total_sq / n as f64 - mean * mean;
        assert!((mean - mean_exact).abs() < 3.0 * (var / n as f64).sqrt());
    }

    #[test]
    fn euler_sampler_size_law() {
        // P(|lambda| = m) = <inf>_q p(m) q^m
        let q = 0.6;
        let p = QParam::new(q).unwrap();
        let table = QPochhammerTable::new(&p);
        let mut s = GeomStream::new(5, &p);
        let n = 100_000;
        let mut counts = [0u64; 8];
        for _ in 0..n {
            let m = sample_young_euler(&table, &mut s).size() as usize;
            if m < counts.len() {
                counts[m] += 1;
            }
        }
        for (m, &c) in counts.iter().enumerate() {
            let prob = table.infinite()
                * YoungDiagram::all_of_size(m as u64).len() as f64
                * q.powi(m as i32);
            let sd = (n as f64 * prob * (1.0 - prob)).sqrt();
            assert!((c as f64 - n as f64 * prob).abs() < 3.5 * sd, "m={m}");
        }
    }
}
