//! Exact counting of fixed points of the discrete logarithm.
//!
//! For a prime `p` and integers `1 <= g, h <= p-1`, the pair `(g, h)` is a
//! fixed point when `g^h ≡ h (mod p)`. This crate counts such pairs exactly
//! over prime ranges, under several conditioning regimes (no conditions,
//! `g` a primitive root, `h` relatively prime to `p-1`, or both), and studies
//! the error `delta = F(p) - (p-3)` between the exact count and its
//! heuristic prediction:
//!
//! * [`numtheory`] — integer primitives and multiplicative arithmetic
//!   functions (gcd, modular arithmetic, factorization, totient, divisor
//!   functions, Pillai's gcd-sum, multiplicative order, primitive roots).
//! * [`counting`] — the divisor-sum count `F(p) = Σ_{e | p-1} e·T(e,p)`,
//!   the quadratic brute-force oracle, and numerical verifiers for the
//!   proved error bounds.
//! * [`model`] — the independent-random-variable model of the count, its
//!   closed-form mean/variance, and a reproducible Monte Carlo simulation.
//! * [`analysis`] — histograms of `log_p |delta|`, grouped (class-midpoint)
//!   statistics, and a chi-squared goodness-of-fit test.
//! * [`experiment`] — the per-prime driver producing one [`counting::PrimeRecord`]
//!   per prime, parallel by default (`parallel` feature) with a sequential
//!   lane always available.
//! * [`harness`] — the `dlfp` CLI: compute, tally, stats, verify, simulate,
//!   report.
//!
//! Results are persisted as a headered CSV so tallying and analysis never
//! require recounting. Computation is deterministic: for a fixed
//! configuration the results file is byte-identical across runs and across
//! worker counts.

pub mod analysis;
pub mod counting;
pub mod experiment;
pub mod harness;
pub mod model;
pub mod numtheory;
pub mod reference;
pub mod results;
pub mod special;
pub mod svg;
pub mod tables;

pub use analysis::{ChiSquaredResult, GroupedStats, Histogram, SignFilter, Transform};
pub use counting::{BoundName, BoundReport, ConditionTag, PrimeRecord};
pub use experiment::ExperimentConfig;
pub use model::{ExceedanceReport, ModelSummary, SimulationResult};
pub use numtheory::Factorization;
pub use results::ResultRow;
