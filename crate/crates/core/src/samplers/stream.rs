//! Reproducible geometric draws.
//!
//! A stream is a ChaCha8 keystream keyed by the seed, with the 64-bit stream
//! id selecting an independent substream. Parallel drivers give each worker
//! or sample block its own substream index.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::qseries::QParam;

#[derive(Debug, Clone)]
pub struct GeomStream {
    seed: u64,
    substream: u64,
    counter: u64,
    q: f64,
    ln_q: f64,
    rng: ChaCha8Rng,
}

impl GeomStream {
    pub fn new(seed: u64, p: &QParam) -> Self {
        Self::with_substream(seed, 0, p)
    }

    pub fn with_substream(seed: u64, substream: u64, p: &QParam) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(substream);
        Self {
            seed,
            substream,
            counter: 0,
            q: p.q(),
            ln_q: p.q().ln(),
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn substream(&self) -> u64 {
        self.substream
    }

    /// Number of uniforms consumed so far.
    pub fn counter(&self) -> u64 {
        self.counter
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// Uniform on `(0, 1]` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        self.counter += 1;
        ((self.rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Draw from `G(n) = (1-q) q^n` by inversion: `floor(ln U / ln q)`.
    pub fn geometric(&mut self) -> u64 {
        let u = self.uniform();
        (u.ln() / self.ln_q).floor() as u64
    }

    /// Draw from `(1 - rho) rho^n` with `rho = q^k`, `k >= 1`.
    pub(crate) fn geometric_power(&mut self, k: u64) -> u64 {
        let u = self.uniform();
        (u.ln() / (self.ln_q * k as f64)).floor() as u64
    }

    pub(crate) fn ln_q(&self) -> f64 {
        self.ln_q
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qp(q: f64) -> QParam {
        QParam::new(q).unwrap()
    }

    #[test]
    fn same_seed_same_draws() {
        let p = qp(0.5);
        let mut a = GeomStream::new(42, &p);
        let mut b = GeomStream::new(42, &p);
        let xa: Vec<u64> = (0..100).map(|_| a.geometric()).collect();
        let xb: Vec<u64> = (0..100).map(|_| b.geometric()).collect();
        assert_eq!(xa, xb);
        assert_eq!(a.counter(), 100);
    }

    #[test]
    fn substreams_differ() {
        let p = qp(0.5);
        let mut a = GeomStream::with_substream(42, 0, &p);
        let mut b = GeomStream::with_substream(42, 1, &p);
        let mut c = GeomStream::with_substream(43, 0, &p);
        let xa: Vec<f64> = (0..8).map(|_| a.uniform()).collect();
        let xb: Vec<f64> = (0..8).map(|_| b.uniform()).collect();
        let xc: Vec<f64> = (0..8).map(|_| c.uniform()).collect();
        assert_ne!(xa, xb);
        assert_ne!(xa, xc);
    }

    #[test]
    fn uniform_range() {
        let mut s = GeomStream::new(1, &qp(0.5));
        for _ in 0..10_000 {
            let u = s.uniform();
            assert!(u > 0.0 && u <= 1.0);
        }
    }

    #[test]
    fn geometric_law() {
        let q = 0.5;
        let mut s = GeomStream::new(7, &qp(q));
        let n = 200_000;
        let mut counts = [0u64; 6];
        let mut sum = 0u64;
        for _ in 0..n {
            let k = s.geometric();
            sum += k;
            if (k as usize) < counts.len() {
                counts[k as usize] += 1;
            }
        }
        for (k, &c) in counts.iter().enumerate() {
            let p = (1.0 - q) * q.powi(k as i32);
            let sd = (n as f64 * p * (1.0 - p)).sqrt();
            assert!((c as f64 - n as f64 * p).abs() < 4.0 * sd, "k={k}");
        }
        let mean = sum as f64 / n as f64;
        // mean q/(1-q) = 1, variance q/(1-q)^2 = 2
        assert!((mean - 1.0).abs() < 4.0 * (2.0 / n as f64).sqrt());
    }
}
