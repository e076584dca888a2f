//! Mallows permutations at finite, one-sided and two-sided scale.
//!
//! * [`qseries`]: q-numbers, q-Pochhammer symbols and q-binomials with
//!   certified truncation.
//! * [`perm`]: permutation windows and the inversion-count codecs.
//! * [`samplers`]: seeded finite, one-sided and two-sided samplers.
//! * [`dist`]: closed-form displacement and inversion-count laws.
//! * [`harness`]: brute-force oracle, statistics and verification suites.

pub mod dist;
pub mod error;
pub mod harness;
pub mod perm;
pub mod qseries;
pub mod samplers;

pub use error::{Error, Result};
pub use perm::{Interval, InversionCounts, PermWindow};
pub use qseries::{QParam, QPochhammerTable};
pub use samplers::{GeomStream, YoungDiagram};
