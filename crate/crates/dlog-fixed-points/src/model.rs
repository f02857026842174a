//! The probabilistic model of the unconditioned fixed-point count.
//!
//! Each h in 1..p-1 is modelled by an independent random variable
//!
//! ```text
//! X_h = gcd(h, p-1)  with probability 1/gcd(h, p-1),  else 0,
//! ```
//!
//! so Σ X_h has mean p-1 and variance Σ_{d | p-1} d·φ((p-1)/d) - (p-1),
//! i.e. gcd_sum(p-1) - (p-1). The Monte Carlo simulation draws Σ X_h
//! directly: positions with gcd 1 contribute deterministically, and the
//! remaining positions are grouped by gcd class (there are φ((p-1)/d)
//! positions with gcd d), one Bernoulli draw per position.
//!
//! Determinism: trial t draws from a ChaCha stream keyed by (seed, t), and
//! aggregation uses exact integer sums, so results are bit-identical
//! regardless of how trials are scheduled across workers.

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::counting::PrimeRecord;
use crate::numtheory::{factorize, is_prime, totient, Factorization};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("trials must be positive")]
    InvalidTrials,
    #[error("epsilon must be positive, got {0}")]
    InvalidEpsilon(f64),
    #[error("{0} is not a prime >= 3")]
    InvalidPrime(u64),
}

/// Exact mean and variance of Σ X_h.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSummary {
    pub p: u64,
    /// Exactly p - 1.
    pub mean: u64,
    /// gcd_sum(p-1) - (p-1).
    pub variance: u64,
    pub std_dev: f64,
}

/// Closed-form model moments for one prime. `f` factors `p - 1`.
pub fn model_summary(p: u64, f: &Factorization) -> ModelSummary {
    debug_assert_eq!(f.n(), p - 1);
    let variance = f.gcd_sum() - (p - 1);
    ModelSummary { p, mean: p - 1, variance, std_dev: (variance as f64).sqrt() }
}

/// gcd classes of 1..p-1, precomputed once per prime.
///
/// `deterministic` is φ(p-1), the contribution of the gcd-1 positions;
/// `classes` lists (d, φ((p-1)/d)) for every divisor d > 1 in ascending
/// order, fixing the draw order for reproducibility.
pub struct GcdClassModel {
    p: u64,
    deterministic: u64,
    classes: Vec<(u64, u64)>,
}

impl GcdClassModel {
    pub fn new(p: u64, f: &Factorization) -> Self {
        debug_assert_eq!(f.n(), p - 1);
        let classes = f
            .divisors()
            .into_iter()
            .filter(|&d| d > 1)
            .map(|d| (d, totient((p - 1) / d)))
            .collect();
        GcdClassModel { p, deterministic: f.euler_phi(), classes }
    }

    /// One draw of Σ X_h. Uses a 53-bit uniform per non-deterministic
    /// position, compared against 1/d.
    pub fn sample(&self, rng: &mut impl Rng) -> u64 {
        let mut sum = self.deterministic;
        for &(d, positions) in &self.classes {
            let threshold = 1.0 / d as f64;
            for _ in 0..positions {
                if rng.random::<f64>() < threshold {
                    sum += d;
                }
            }
        }
        sum
    }

    pub fn p(&self) -> u64 {
        self.p
    }
}

/// One draw of Σ X_h for prime p. `f` factors `p - 1`.
pub fn sample_f(p: u64, f: &Factorization, rng: &mut impl Rng) -> u64 {
    GcdClassModel::new(p, f).sample(rng)
}

/// Outcome of a Monte Carlo run; bit-reproducible for a fixed seed.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationResult {
    pub p: u64,
    pub trials: u64,
    pub seed: u64,
    pub empirical_mean: f64,
    /// Sample variance (n-1 denominator); 0 by convention at one trial.
    pub empirical_variance: f64,
    /// Exact counts of the deviation Σ X_h - (p-1) across trials.
    pub samples_summary: BTreeMap<i64, u64>,
}

#[derive(Default, Clone)]
struct Accumulator {
    sum: u128,
    sum_sq: u128,
    deviations: BTreeMap<i64, u64>,
}

impl Accumulator {
    fn record(&mut self, value: u64, mean: u64) {
        self.sum += value as u128;
        self.sum_sq += (value as u128) * (value as u128);
        *self.deviations.entry(value as i64 - mean as i64).or_insert(0) += 1;
    }

    fn merge(mut self, other: Accumulator) -> Accumulator {
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
        for (dev, count) in other.deviations {
            *self.deviations.entry(dev).or_insert(0) += count;
        }
        self
    }

    fn finish(self, p: u64, trials: u64, seed: u64) -> SimulationResult {
        let n = trials as f64;
        let empirical_mean = self.sum as f64 / n;
        let empirical_variance = if trials < 2 {
            0.0
        } else {
            // exact integer numerator: n·Σx² - (Σx)²
            let numer = trials as i128 * self.sum_sq as i128 - (self.sum as i128).pow(2);
            numer as f64 / (n * (n - 1.0))
        };
        SimulationResult {
            p,
            trials,
            seed,
            empirical_mean,
            empirical_variance,
            samples_summary: self.deviations,
        }
    }
}

fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn validate(p: u64, trials: u64) -> Result<(), ModelError> {
    if trials == 0 {
        return Err(ModelError::InvalidTrials);
    }
    if p < 3 || !is_prime(p) {
        return Err(ModelError::InvalidPrime(p));
    }
    Ok(())
}

/// Monte Carlo estimate of the model moments; parallel when the `parallel`
/// feature is enabled, identical output either way.
pub fn monte_carlo(p: u64, trials: u64, seed: u64) -> Result<SimulationResult, ModelError> {
    #[cfg(feature = "parallel")]
    {
        monte_carlo_par(p, trials, seed)
    }
    #[cfg(not(feature = "parallel"))]
    {
        monte_carlo_seq(p, trials, seed)
    }
}

/// Sequential Monte Carlo lane.
pub fn monte_carlo_seq(p: u64, trials: u64, seed: u64) -> Result<SimulationResult, ModelError> {
    validate(p, trials)?;
    let model = GcdClassModel::new(p, &factorize(p - 1).expect("p >= 3"));
    let mut acc = Accumulator::default();
    for trial in 0..trials {
        let value = model.sample(&mut trial_rng(seed, trial));
        acc.record(value, p - 1);
    }
    Ok(acc.finish(p, trials, seed))
}

/// Parallel Monte Carlo lane; trials are distributed over the current
/// rayon pool.
#[cfg(feature = "parallel")]
pub fn monte_carlo_par(p: u64, trials: u64, seed: u64) -> Result<SimulationResult, ModelError> {
    use rayon::prelude::*;

    validate(p, trials)?;
    let model = GcdClassModel::new(p, &factorize(p - 1).expect("p >= 3"));
    let acc = (0..trials)
        .into_par_iter()
        .fold(Accumulator::default, |mut acc, trial| {
            let value = model.sample(&mut trial_rng(seed, trial));
            acc.record(value, p - 1);
            acc
        })
        .reduce(Accumulator::default, Accumulator::merge);
    Ok(acc.finish(p, trials, seed))
}

/// Primes whose (p-1)-centered error exceeds p^(1/2 + epsilon).
#[derive(Debug, Clone, PartialEq)]
pub struct ExceedanceReport {
    pub epsilon: f64,
    pub count_exceeding: usize,
    pub fraction: f64,
    pub offending_primes: Vec<u64>,
}

/// Scan records for |F(p) - (p-1)| > p^(1/2 + epsilon).
///
/// The error here is centered at p-1, the model's expected value; the
/// tabulated delta is centered at p-3 (they differ by 2).
pub fn conjecture36_scan(
    records: &[PrimeRecord],
    epsilon: f64,
) -> Result<ExceedanceReport, ModelError> {
    if !(epsilon > 0.0) {
        return Err(ModelError::InvalidEpsilon(epsilon));
    }
    let offending: Vec<u64> = records
        .iter()
        .filter(|r| {
            let error = (r.f_any as i64 - (r.p as i64 - 1)).unsigned_abs();
            error as f64 > (r.p as f64).powf(0.5 + epsilon)
        })
        .map(|r| r.p)
        .collect();
    let count = offending.len();
    let fraction = if records.is_empty() { 0.0 } else { count as f64 / records.len() as f64 };
    Ok(ExceedanceReport { epsilon, count_exceeding: count, fraction, offending_primes: offending })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numtheory::{gcd, prime_range};

    #[test]
    fn model_summary_examples() {
        let summary = model_summary(5, &factorize(4).unwrap());
        assert_eq!(summary.mean, 4);
        assert_eq!(summary.variance, 4);
        assert_eq!(model_summary(3, &factorize(2).unwrap()).variance, 1);
        assert_eq!(model_summary(7, &factorize(6).unwrap()).variance, 9);
        assert_eq!(model_summary(101, &factorize(100).unwrap()).variance, 420);
    }

    #[test]
    fn variance_matches_brute_force_gcd_sum() {
        for p in prime_range(3, 10_000) {
            let f = factorize(p - 1).unwrap();
            let direct: u64 = (1..p).map(|h| gcd(h, p - 1)).sum();
            assert_eq!(model_summary(p, &f).variance, direct - (p - 1), "p = {p}");
        }
    }

    #[test]
    fn sample_envelope() {
        for p in [3u64, 7, 31, 101] {
            let f = factorize(p - 1).unwrap();
            let model = GcdClassModel::new(p, &f);
            let phi = f.euler_phi();
            let ceiling = f.gcd_sum();
            let mut rng = trial_rng(7, 0);
            for _ in 0..2000 {
                let v = model.sample(&mut rng);
                assert!(v >= phi && v <= ceiling, "p={p} v={v}");
            }
        }
    }

    #[test]
    fn p3_distribution_is_two_point() {
        // X_1 = 1 always; X_2 = 2 with probability 1/2: outcomes {1, 3}, mean 2
        let result = monte_carlo_seq(3, 100_000, 42).unwrap();
        for dev in result.samples_summary.keys() {
            assert!(*dev == -1 || *dev == 1, "unexpected deviation {dev}");
        }
        assert!((result.empirical_mean - 2.0).abs() < 0.01, "{}", result.empirical_mean);
    }

    #[test]
    fn monte_carlo_matches_closed_form() {
        let exact = model_summary(101, &factorize(100).unwrap());
        let result = monte_carlo_seq(101, 100_000, 42).unwrap();
        assert!((result.empirical_mean - 100.0).abs() < 3.0 * exact.std_dev / (1e5f64).sqrt());
        let rel = (result.empirical_variance - exact.variance as f64).abs() / exact.variance as f64;
        assert!(rel < 0.10, "relative variance error {rel}");
    }

    #[test]
    fn degenerate_and_invalid_inputs() {
        let one = monte_carlo_seq(5, 1, 9).unwrap();
        assert_eq!(one.empirical_variance, 0.0);
        assert_eq!(monte_carlo_seq(5, 0, 9), Err(ModelError::InvalidTrials));
        assert_eq!(monte_carlo_seq(9, 10, 9), Err(ModelError::InvalidPrime(9)));
    }

    #[test]
    fn seeded_runs_are_identical() {
        let a = monte_carlo_seq(31, 5_000, 123).unwrap();
        let b = monte_carlo_seq(31, 5_000, 123).unwrap();
        assert_eq!(a, b);
        let c = monte_carlo_seq(31, 5_000, 124).unwrap();
        assert_ne!(a.samples_summary, c.samples_summary);
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn parallel_lane_matches_sequential() {
        let seq = monte_carlo_seq(101, 20_000, 42).unwrap();
        let par = monte_carlo_par(101, 20_000, 42).unwrap();
        assert_eq!(seq, par);
    }

    #[test]
    fn exact_distribution_oracle_small_primes() {
        // convolve the two-point variables class by class
        for p in prime_range(3, 50) {
            let f = factorize(p - 1).unwrap();
            let mut dist: BTreeMap<u64, f64> = BTreeMap::new();
            dist.insert(f.euler_phi(), 1.0);
            for d in f.divisors() {
                if d == 1 {
                    continue;
                }
                let hit = 1.0 / d as f64;
                for _ in 0..totient((p - 1) / d) {
                    let mut next: BTreeMap<u64, f64> = BTreeMap::new();
                    for (&v, &prob) in &dist {
                        *next.entry(v).or_insert(0.0) += prob * (1.0 - hit);
                        *next.entry(v + d).or_insert(0.0) += prob * hit;
                    }
                    dist = next;
                }
            }
            let mean: f64 = dist.iter().map(|(&v, &q)| v as f64 * q).sum();
            let var: f64 = dist.iter().map(|(&v, &q)| (v as f64 - mean).powi(2) * q).sum();
            let summary = model_summary(p, &f);
            assert!((mean - summary.mean as f64).abs() < 1e-9, "p = {p}");
            assert!((var - summary.variance as f64).abs() < 1e-6, "p = {p}");

            let sim = monte_carlo_seq(p, 100_000, 42).unwrap();
            let se_mean = summary.std_dev / (1e5f64).sqrt();
            assert!(
                (sim.empirical_mean - mean).abs() <= 3.0 * se_mean,
                "p = {p}: mean {} vs {mean}",
                sim.empirical_mean
            );
        }
    }

    #[test]
    fn conjecture_scan_edge_cases() {
        assert!(conjecture36_scan(&[], 0.0).is_err());
        let empty = conjecture36_scan(&[], 0.5).unwrap();
        assert_eq!(empty.count_exceeding, 0);
        assert_eq!(empty.fraction, 0.0);
        assert!(empty.offending_primes.is_empty());

        let records: Vec<PrimeRecord> = prime_range(3, 211)
            .into_iter()
            .map(|p| PrimeRecord::compute(p, &factorize(p - 1).unwrap()))
            .collect();
        // a threshold beyond any possible error
        let huge = conjecture36_scan(&records, 10.0).unwrap();
        assert_eq!(huge.count_exceeding, 0);
        // epsilon = 0.5 means threshold p; no error that large occurs here
        let linear = conjecture36_scan(&records, 0.5).unwrap();
        assert_eq!(linear.count_exceeding, 0);
    }
}
