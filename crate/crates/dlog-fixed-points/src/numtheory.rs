//! Integer primitives and multiplicative arithmetic functions.
//!
//! Everything here is exact u64 arithmetic with u128 intermediates, total
//! for moduli up to at least 2^31. Factorization is plain trial division:
//! the experiment factors nothing larger than `p - 1` for `p` in the
//! configured prime range, so sub-exponential methods would be dead weight.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NumTheoryError {
    #[error("modulus must be at least 2, got {0}")]
    InvalidModulus(u64),
    #[error("{a} is not invertible modulo {modulus}")]
    NotInvertible { a: u64, modulus: u64 },
    #[error("cannot factor {0}: input must be at least 2")]
    InvalidInput(u64),
    #[error("element divisible by the modulus has no multiplicative order")]
    InvalidElement,
    #[error("{divisor} does not divide {n}")]
    InvalidDivisor { divisor: u64, n: u64 },
}

/// Greatest common divisor, with `gcd(0, 0) = 0` by convention.
pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// `base^exp mod modulus` by binary exponentiation with u128 intermediates.
pub fn pow_mod(base: u64, exp: u64, modulus: u64) -> Result<u64, NumTheoryError> {
    if modulus < 2 {
        return Err(NumTheoryError::InvalidModulus(modulus));
    }
    Ok(pow_mod_u(base, exp, modulus))
}

/// Unchecked modular exponentiation for internal hot paths. `modulus >= 2`.
pub(crate) fn pow_mod_u(base: u64, mut exp: u64, modulus: u64) -> u64 {
    debug_assert!(modulus >= 2);
    let m = modulus as u128;
    let mut b = (base as u128) % m;
    let mut acc: u128 = 1;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc as u64
}

/// Inverse of `a` modulo `m` via the extended Euclidean algorithm.
///
/// Returns `x` with `a·x ≡ 1 (mod m)` and `1 <= x < m`; fails unless
/// `gcd(a, m) = 1`.
pub fn inverse_mod(a: u64, m: u64) -> Result<u64, NumTheoryError> {
    if m < 2 {
        return Err(NumTheoryError::InvalidModulus(m));
    }
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return Err(NumTheoryError::NotInvertible { a, modulus: m });
    }
    Ok(t0.rem_euclid(m as i128) as u64)
}

/// Deterministic primality by trial division up to sqrt(n).
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// A positive integer together with its complete prime-power decomposition.
///
/// Primes are stored in strictly increasing order; the product of
/// `prime^exponent` over all entries reconstructs `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    n: u64,
    factors: Vec<(u64, u32)>,
}

/// Complete prime factorization of `n >= 2` by trial division.
pub fn factorize(n: u64) -> Result<Factorization, NumTheoryError> {
    if n < 2 {
        return Err(NumTheoryError::InvalidInput(n));
    }
    let mut rest = n;
    let mut factors = Vec::new();
    let mut d = 2u64;
    while d * d <= rest {
        if rest % d == 0 {
            let mut exp = 0u32;
            while rest % d == 0 {
                rest /= d;
                exp += 1;
            }
            factors.push((d, exp));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if rest > 1 {
        factors.push((rest, 1));
    }
    Ok(Factorization { n, factors })
}

impl Factorization {
    /// The factorization of 1 (empty factor list).
    pub fn unit() -> Self {
        Factorization { n: 1, factors: Vec::new() }
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// `(prime, exponent)` pairs, primes strictly increasing.
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    /// The distinct prime divisors, ascending.
    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(q, _)| q)
    }

    /// All divisors of `n`, strictly increasing. Length equals `divisor_count`.
    pub fn divisors(&self) -> Vec<u64> {
        let mut divs = vec![1u64];
        for &(q, a) in &self.factors {
            let prev = divs.len();
            let mut qk = 1u64;
            for _ in 0..a {
                qk *= q;
                for i in 0..prev {
                    divs.push(divs[i] * qk);
                }
            }
        }
        divs.sort_unstable();
        divs
    }

    /// Euler's totient of `n`.
    pub fn euler_phi(&self) -> u64 {
        let mut r = self.n;
        for &(q, _) in &self.factors {
            r = r / q * (q - 1);
        }
        r
    }

    /// Number of divisors, d(n) = Π (e_i + 1).
    pub fn divisor_count(&self) -> u64 {
        self.factors.iter().map(|&(_, a)| a as u64 + 1).product()
    }

    /// Sum of divisors, σ(n) = Π (q^(e+1) - 1) / (q - 1).
    pub fn divisor_sum(&self) -> u64 {
        self.factors
            .iter()
            .map(|&(q, a)| {
                let mut geom: u64 = 1;
                let mut qk: u64 = 1;
                for _ in 0..a {
                    qk *= q;
                    geom += qk;
                }
                geom
            })
            .product()
    }

    /// Pillai's gcd-sum: Σ_{d|n} d·φ(n/d) = Σ_{h=1..n} gcd(h, n).
    ///
    /// Multiplicative with value (a+1)·q^a − a·q^(a−1) on prime powers.
    pub fn gcd_sum(&self) -> u64 {
        self.factors
            .iter()
            .map(|&(q, a)| {
                let qa = q.pow(a);
                (a as u64 + 1) * qa - a as u64 * (qa / q)
            })
            .product()
    }
}

/// Euler's totient for any `n >= 1`, factorizing internally.
pub fn totient(n: u64) -> u64 {
    if n == 1 {
        return 1;
    }
    factorize(n).expect("n >= 2").euler_phi()
}

/// Number of divisors for any `n >= 1`, factorizing internally.
pub fn tau(n: u64) -> u64 {
    if n == 1 {
        return 1;
    }
    factorize(n).expect("n >= 2").divisor_count()
}

/// Least `k >= 1` with `x^k ≡ 1 (mod p)`, by divisor descent from `p - 1`.
///
/// `f` must be the factorization of `p - 1`. Fails when `x ≡ 0 (mod p)`.
pub fn multiplicative_order(x: u64, p: u64, f: &Factorization) -> Result<u64, NumTheoryError> {
    debug_assert_eq!(f.n(), p - 1);
    let x = x % p;
    if x == 0 {
        return Err(NumTheoryError::InvalidElement);
    }
    let mut order = p - 1;
    for &(q, _) in f.factors() {
        while order % q == 0 && pow_mod_u(x, order / q, p) == 1 {
            order /= q;
        }
    }
    Ok(order)
}

/// True iff `x` generates the full multiplicative group modulo `p`:
/// `x^((p-1)/q) ≢ 1 (mod p)` for every prime `q | p - 1`.
pub fn is_primitive_root(x: u64, p: u64, f: &Factorization) -> bool {
    debug_assert_eq!(f.n(), p - 1);
    let x = x % p;
    if x == 0 {
        return false;
    }
    f.primes().all(|q| pow_mod_u(x, (p - 1) / q, p) != 1)
}

/// True iff `h` is an e-th power residue mod `p`, i.e. `h^((p-1)/e) ≡ 1`.
///
/// Requires `e | p - 1` (Euler's criterion for e-th powers).
pub fn is_eth_power(h: u64, e: u64, p: u64) -> Result<bool, NumTheoryError> {
    if e == 0 || (p - 1) % e != 0 {
        return Err(NumTheoryError::InvalidDivisor { divisor: e, n: p - 1 });
    }
    Ok(pow_mod_u(h, (p - 1) / e, p) == 1)
}

/// All primes in the closed interval `[lo, hi]`, ascending, by sieve of
/// Eratosthenes. Empty when `hi < max(lo, 2)`.
pub fn prime_range(lo: u64, hi: u64) -> Vec<u64> {
    if hi < 2 || hi < lo {
        return Vec::new();
    }
    let n = hi as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    let mut i = 2usize;
    while i * i <= n {
        if !composite[i] {
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
        i += 1;
    }
    for (x, &c) in composite.iter().enumerate().skip(2) {
        if !c && x as u64 >= lo {
            primes.push(x as u64);
        }
    }
    primes
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pow_mod_examples() {
        assert_eq!(pow_mod(2, 3, 5).unwrap(), 3);
        assert_eq!(pow_mod(7, 0, 11).unwrap(), 1);
        assert_eq!(pow_mod(3, 4, 7).unwrap(), 4);
        assert_eq!(pow_mod(2, 3, 1), Err(NumTheoryError::InvalidModulus(1)));
        // no overflow near the supported ceiling
        let m = (1u64 << 31) - 1;
        assert_eq!(pow_mod(m - 1, 2, m).unwrap(), 1);
    }

    #[test]
    fn gcd_examples() {
        assert_eq!(gcd(12, 18), 6);
        assert_eq!(gcd(1, 987), 1);
        assert_eq!(gcd(0, 7), 7);
        assert_eq!(gcd(0, 0), 0);
    }

    #[test]
    fn inverse_mod_examples() {
        assert_eq!(inverse_mod(3, 4).unwrap(), 3);
        assert_eq!(inverse_mod(1, 29).unwrap(), 1);
        assert_eq!(inverse_mod(5, 12).unwrap(), 5);
        assert!(matches!(
            inverse_mod(4, 12),
            Err(NumTheoryError::NotInvertible { a: 4, modulus: 12 })
        ));
    }

    #[test]
    fn factorize_examples() {
        assert_eq!(factorize(12).unwrap().factors(), &[(2, 2), (3, 1)]);
        assert_eq!(factorize(15412).unwrap().factors(), &[(2, 2), (3853, 1)]);
        assert_eq!(factorize(17).unwrap().factors(), &[(17, 1)]);
        assert_eq!(factorize(1), Err(NumTheoryError::InvalidInput(1)));
        assert_eq!(factorize(0), Err(NumTheoryError::InvalidInput(0)));
    }

    #[test]
    fn divisors_examples() {
        assert_eq!(factorize(12).unwrap().divisors(), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(factorize(97).unwrap().divisors(), vec![1, 97]);
        assert_eq!(factorize(4).unwrap().divisors(), vec![1, 2, 4]);
        assert_eq!(Factorization::unit().divisors(), vec![1]);
    }

    #[test]
    fn arithmetic_function_examples() {
        let f12 = factorize(12).unwrap();
        assert_eq!(f12.euler_phi(), 4);
        assert_eq!(f12.divisor_count(), 6);
        assert_eq!(f12.divisor_sum(), 28);
        assert_eq!(factorize(4).unwrap().euler_phi(), 2);
        assert_eq!(factorize(10).unwrap().euler_phi(), 4);
        let q = factorize(41).unwrap();
        assert_eq!(q.divisor_count(), 2);
        assert_eq!(q.divisor_sum(), 42);
        let f4 = factorize(4).unwrap();
        assert_eq!(f4.divisor_count(), 3);
        assert_eq!(f4.divisor_sum(), 7);
    }

    #[test]
    fn gcd_sum_examples() {
        assert_eq!(factorize(4).unwrap().gcd_sum(), 8);
        assert_eq!(Factorization::unit().gcd_sum(), 1);
        assert_eq!(factorize(6).unwrap().gcd_sum(), 15);
    }

    #[test]
    fn gcd_sum_matches_brute_force() {
        for n in 2..=10_000u64 {
            let direct: u64 = (1..=n).map(|h| gcd(h, n)).sum();
            assert_eq!(factorize(n).unwrap().gcd_sum(), direct, "n = {n}");
        }
    }

    #[test]
    fn multiplicative_order_examples() {
        let f6 = factorize(6).unwrap();
        assert_eq!(multiplicative_order(2, 7, &f6).unwrap(), 3);
        assert_eq!(multiplicative_order(1, 7, &f6).unwrap(), 1);
        assert_eq!(multiplicative_order(3, 7, &f6).unwrap(), 6);
        assert_eq!(multiplicative_order(7, 7, &f6), Err(NumTheoryError::InvalidElement));
    }

    #[test]
    fn order_divides_group_order_and_is_minimal() {
        for p in prime_range(3, 500) {
            let f = factorize(p - 1).unwrap();
            let divs = f.divisors();
            for x in 1..p {
                let ord = multiplicative_order(x, p, &f).unwrap();
                assert_eq!((p - 1) % ord, 0);
                assert_eq!(pow_mod_u(x, ord, p), 1);
                for &d in &divs {
                    if d < ord {
                        assert_ne!(pow_mod_u(x, d, p), 1, "p={p} x={x} d={d}");
                    }
                }
            }
        }
    }

    #[test]
    fn primitive_root_examples() {
        let f6 = factorize(6).unwrap();
        assert!(is_primitive_root(3, 7, &f6));
        assert!(!is_primitive_root(2, 7, &f6));
        assert!(!is_primitive_root(1, 11, &factorize(10).unwrap()));
    }

    #[test]
    fn primitive_root_count_is_phi_of_group_order() {
        for p in prime_range(3, 1000) {
            let f = factorize(p - 1).unwrap();
            let count = (1..p).filter(|&x| is_primitive_root(x, p, &f)).count() as u64;
            assert_eq!(count, f.euler_phi(), "p = {p}");
        }
    }

    #[test]
    fn eth_power_examples() {
        for h in 1..7 {
            assert!(is_eth_power(h, 1, 7).unwrap());
        }
        assert!(is_eth_power(2, 2, 7).unwrap()); // 3^2 ≡ 2 (mod 7)
        assert!(!is_eth_power(3, 3, 7).unwrap()); // cubes mod 7 are {1, 6}
        assert!(matches!(is_eth_power(2, 4, 7), Err(NumTheoryError::InvalidDivisor { .. })));
    }

    #[test]
    fn eth_power_matches_enumeration() {
        for p in prime_range(3, 100) {
            let f = factorize(p - 1).unwrap();
            for e in f.divisors() {
                let mut powers = vec![false; p as usize];
                for x in 1..p {
                    powers[pow_mod_u(x, e, p) as usize] = true;
                }
                for h in 1..p {
                    assert_eq!(
                        is_eth_power(h, e, p).unwrap(),
                        powers[h as usize],
                        "p={p} e={e} h={h}"
                    );
                }
            }
        }
    }

    #[test]
    fn prime_range_examples() {
        assert_eq!(prime_range(3, 20), vec![3, 5, 7, 11, 13, 17, 19]);
        assert_eq!(prime_range(14, 16), Vec::<u64>::new());
        assert_eq!(prime_range(3, 15413).len(), 1800);
        assert_eq!(prime_range(2, 10), vec![2, 3, 5, 7]);
    }

    #[test]
    fn factorization_identities_to_1e5() {
        for n in 2..=100_000u64 {
            let f = factorize(n).unwrap();
            let product: u64 = f
                .factors()
                .iter()
                .map(|&(q, a)| q.pow(a))
                .product();
            assert_eq!(product, n);
            for w in f.factors().windows(2) {
                assert!(w[0].0 < w[1].0);
            }
            assert!(f.factors().iter().all(|&(q, _)| is_prime(q)));
            // Σ_{d|n} φ(d) = n, and the divisor list has exactly d(n) entries
            let divs = f.divisors();
            assert_eq!(divs.len() as u64, f.divisor_count());
            let phi_sum: u64 = divs.iter().map(|&d| totient(d)).sum();
            assert_eq!(phi_sum, n);
        }
    }
}
