use crate::error::{Error, Result};

/// A positive integer below 2⁶³ together with its full prime factorization,
/// primes strictly increasing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorMap {
    n: u64,
    factors: Vec<(u64, u32)>,
}

impl FactorMap {
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    /// Multiplies the factorization back out.
    pub fn product(&self) -> u64 {
        self.factors
            .iter()
            .map(|&(p, e)| p.pow(e))
            .product::<u64>()
            .max(1)
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }

    pub fn distinct_primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    /// All divisors of `n`, ascending.
    pub fn divisors(&self) -> Vec<u64> {
        let mut divs = vec![1u64];
        for &(p, e) in &self.factors {
            let prev = divs.clone();
            let mut pk = 1u64;
            for _ in 0..e {
                pk *= p;
                divs.extend(prev.iter().map(|d| d * pk));
            }
        }
        divs.sort_unstable();
        divs
    }
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn powmod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, m);
        }
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for all n < 2⁶⁴ (twelve prime bases).
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'bases: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// Brent-cycle Pollard rho; `n` must be odd, composite, and coprime to the
/// polynomial offsets tried. Returns a nontrivial factor.
fn pollard_rho(n: u64) -> u64 {
    debug_assert!(n > 1 && !is_prime_u64(n) && n % 2 == 1);
    for c in 1..64u64 {
        let f = |x: u64| (mulmod(x, x, n) + c) % n;
        let mut x = 2u64;
        let mut y = 2u64;
        let mut d = 1u64;
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = gcd_u64(x.abs_diff(y), n);
        }
        if d != n {
            return d;
        }
    }
    unreachable!("pollard rho exhausted offsets for n = {n}")
}

pub(crate) fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

const TRIAL_LIMIT: u64 = 4096;

/// Factor `1 <= n < 2⁶³` by trial division up to 4096 followed by Pollard
/// rho with a deterministic Miller-Rabin primality check. Remaining
/// cofactors after trial division have no factor below 4096²  = 2²⁴, so rho
/// converges in a few thousand iterations at worst for 63-bit inputs.
pub fn factorize(n: u64) -> Result<FactorMap> {
    if n == 0 {
        return Err(Error::range("factorize(0)"));
    }
    if n >> 63 != 0 {
        return Err(Error::range(format!("factorize({n}) >= 2^63")));
    }
    let mut factors: Vec<(u64, u32)> = Vec::new();
    let mut m = n;
    for p in std::iter::once(2).chain((3..=TRIAL_LIMIT).step_by(2)) {
        if p * p > m {
            break;
        }
        if m.is_multiple_of(p) {
            let mut e = 0;
            while m.is_multiple_of(p) {
                m /= p;
                e += 1;
            }
            factors.push((p, e));
        }
    }
    // What survives trial division is 1, a prime, or a product of primes
    // all exceeding TRIAL_LIMIT; split it with rho.
    let mut stack = Vec::new();
    if m > 1 {
        stack.push(m);
    }
    let mut large: Vec<u64> = Vec::new();
    while let Some(v) = stack.pop() {
        if is_prime_u64(v) {
            large.push(v);
        } else {
            let d = pollard_rho(v);
            stack.push(d);
            stack.push(v / d);
        }
    }
    large.sort_unstable();
    let mut i = 0;
    while i < large.len() {
        let p = large[i];
        let mut e = 0;
        while i < large.len() && large[i] == p {
            e += 1;
            i += 1;
        }
        factors.push((p, e));
    }
    factors.sort_unstable();
    Ok(FactorMap { n, factors })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_has_empty_factorization() {
        let f = factorize(1).unwrap();
        assert!(f.factors().is_empty());
        assert_eq!(f.product(), 1);
    }

    #[test]
    fn mersenne_2047() {
        // 2^11 - 1 = 23 * 89
        let f = factorize(2047).unwrap();
        assert_eq!(f.factors(), &[(23, 1), (89, 1)]);
    }

    #[test]
    fn mersenne_65535() {
        // 2^16 - 1 = 3 * 5 * 17 * 257
        let f = factorize(65535).unwrap();
        assert_eq!(f.factors(), &[(3, 1), (5, 1), (17, 1), (257, 1)]);
    }

    #[test]
    fn large_mersenne_needs_rho() {
        // 2^62 - 1 = 3 * 715827883 * 2147483647; both large factors exceed
        // the trial-division cutoff.
        let f = factorize((1u64 << 62) - 1).unwrap();
        assert_eq!(f.factors(), &[(3, 1), (715827883, 1), (2147483647, 1)]);
        assert_eq!(f.product(), (1u64 << 62) - 1);
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(factorize(0).is_err());
        assert!(factorize(1u64 << 63).is_err());
        assert!(factorize((1u64 << 63) - 1).is_ok());
    }

    #[test]
    fn divisors_of_360() {
        let f = factorize(360).unwrap();
        let d = f.divisors();
        assert_eq!(d.len(), 24);
        assert_eq!(d[0], 1);
        assert_eq!(*d.last().unwrap(), 360);
        assert!(d.windows(2).all(|w| w[0] < w[1]));
        assert!(d.iter().all(|&x| 360 % x == 0));
    }

    #[test]
    fn miller_rabin_agrees_with_sieve() {
        let sieve = crate::arith::PrimeSieve::new(10_000).unwrap();
        for n in 0..=10_000u64 {
            assert_eq!(is_prime_u64(n), n >= 2 && sieve.is_prime(n), "n = {n}");
        }
    }
}
