//! The per-prime experiment driver.
//!
//! Builds one [`PrimeRecord`] per prime in the configured range: the
//! divisor-sum counts, the conditioned count, delta, the model variance and
//! the log ratio. Primes up to `oracle_limit` are additionally cross-checked
//! against the quadratic brute-force oracle under both tabulated regimes; a
//! mismatch means a counting bug and aborts the run.
//!
//! Per-prime work is pure, so with the `parallel` feature the range is
//! mapped over the current rayon pool; the sequential lane is always
//! available and produces identical records in the same order.

use std::path::PathBuf;

use thiserror::Error;

use crate::analysis::log_ratio;
use crate::counting::{
    brute_force_count, ConditionTag, CountingError, PrimeRecord,
};
use crate::model::model_summary;
use crate::numtheory::{factorize, prime_range};

/// Largest modulus the driver accepts; keeps every intermediate inside u64
/// arithmetic with u128 products.
pub const MAX_PRIME: u64 = 1 << 31;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(
        "oracle mismatch at p = {p} under {condition}: divisor-sum count {formula} != brute-force count {brute}"
    )]
    OracleMismatch { p: u64, condition: &'static str, formula: u64, brute: u64 },
    #[error(transparent)]
    Counting(#[from] CountingError),
}

/// Everything a run needs: the prime range, worker count, oracle depth,
/// the conjecture-scan epsilon, Monte Carlo parameters and the output
/// directory.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub prime_lo: u64,
    pub prime_hi: u64,
    pub workers: usize,
    /// Largest prime cross-checked against the brute-force oracle.
    pub oracle_limit: u64,
    /// Exponent offset for the exceedance scan threshold p^(1/2 + epsilon).
    pub epsilon: f64,
    pub trials: u64,
    pub seed: u64,
    pub output_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            prime_lo: 3,
            prime_hi: 15413,
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            oracle_limit: 211,
            epsilon: 0.1,
            trials: 100_000,
            seed: 42,
            output_dir: PathBuf::from("out"),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.prime_lo < 3 {
            return Err(ExperimentError::Config(format!(
                "prime range must start at 3 or above, got {}",
                self.prime_lo
            )));
        }
        if self.prime_lo > self.prime_hi {
            return Err(ExperimentError::Config(format!(
                "empty prime range [{}, {}]",
                self.prime_lo, self.prime_hi
            )));
        }
        if self.prime_hi > MAX_PRIME {
            return Err(ExperimentError::Config(format!(
                "prime range ceiling {} exceeds the supported maximum {MAX_PRIME}",
                self.prime_hi
            )));
        }
        if self.workers == 0 {
            return Err(ExperimentError::Config("workers must be at least 1".into()));
        }
        Ok(())
    }

    pub fn results_path(&self) -> PathBuf {
        self.output_dir.join("results.csv")
    }
}

/// Compute the full record for one prime, including the model variance and
/// log ratio, oracle-checking the counts when `check_oracle` is set.
pub fn build_record(p: u64, check_oracle: bool) -> Result<PrimeRecord, ExperimentError> {
    let f = factorize(p - 1).expect("p >= 3");
    let mut record = PrimeRecord::compute(p, &f);
    record.model_variance = model_summary(p, &f).variance;
    record.log_ratio = log_ratio(p, record.delta);

    if check_oracle {
        let brute_any = brute_force_count(p, ConditionTag::Any, ConditionTag::Any);
        if record.f_any != brute_any {
            return Err(ExperimentError::OracleMismatch {
                p,
                condition: "ANY x ANY",
                formula: record.f_any,
                brute: brute_any,
            });
        }
        let brute_pr = brute_force_count(p, ConditionTag::Pr, ConditionTag::Rppr);
        if record.f_pr_rppr != brute_pr {
            return Err(ExperimentError::OracleMismatch {
                p,
                condition: "PR x RPPR",
                formula: record.f_pr_rppr,
                brute: brute_pr,
            });
        }
    }
    Ok(record)
}

/// Sequential lane: one record per prime in [prime_lo, prime_hi], ascending.
pub fn compute_records_seq(config: &ExperimentConfig) -> Result<Vec<PrimeRecord>, ExperimentError> {
    config.validate()?;
    prime_range(config.prime_lo, config.prime_hi)
        .into_iter()
        .map(|p| build_record(p, p <= config.oracle_limit))
        .collect()
}

/// Parallel lane: identical output to the sequential lane, mapped over the
/// current rayon pool. Collection preserves prime order, so the result is
/// independent of scheduling.
#[cfg(feature = "parallel")]
pub fn compute_records_par(config: &ExperimentConfig) -> Result<Vec<PrimeRecord>, ExperimentError> {
    use rayon::prelude::*;

    config.validate()?;
    prime_range(config.prime_lo, config.prime_hi)
        .into_par_iter()
        .map(|p| build_record(p, p <= config.oracle_limit))
        .collect()
}

/// Compute records on the lane selected by the `parallel` feature.
pub fn compute_records(config: &ExperimentConfig) -> Result<Vec<PrimeRecord>, ExperimentError> {
    #[cfg(feature = "parallel")]
    {
        compute_records_par(config)
    }
    #[cfg(not(feature = "parallel"))]
    {
        compute_records_seq(config)
    }
}
