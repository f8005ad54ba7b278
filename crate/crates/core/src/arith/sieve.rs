use crate::error::{Error, Result};

/// Hard cap on sieve size; one bit per integer, so this is 12.5 MB.
pub const MAX_SIEVE_LIMIT: u64 = 100_000_000;

/// Bit-packed sieve of Eratosthenes over `0..=limit`.
///
/// Immutable after construction and safe to share across threads.
pub struct PrimeSieve {
    limit: u64,
    bits: Vec<u64>,
}

impl PrimeSieve {
    /// Sieve all primes up to `limit` (inclusive).
    pub fn new(limit: u64) -> Result<Self> {
        if limit < 2 {
            return Err(Error::domain(format!("sieve limit {limit} < 2")));
        }
        if limit > MAX_SIEVE_LIMIT {
            return Err(Error::resource(format!(
                "sieve limit {limit} exceeds budget {MAX_SIEVE_LIMIT}"
            )));
        }
        let n = limit as usize;
        let mut bits = vec![u64::MAX; n / 64 + 1];
        let clear = |bits: &mut [u64], i: usize| bits[i / 64] &= !(1 << (i % 64));
        clear(&mut bits, 0);
        clear(&mut bits, 1);
        let mut p = 2usize;
        while p * p <= n {
            if bits[p / 64] >> (p % 64) & 1 == 1 {
                let mut m = p * p;
                while m <= n {
                    clear(&mut bits, m);
                    m += p;
                }
            }
            p += 1;
        }
        // Mask the tail beyond `limit` so popcounts are exact.
        let last_bit = n % 64;
        let mask = if last_bit == 63 {
            u64::MAX
        } else {
            (1u64 << (last_bit + 1)) - 1
        };
        *bits.last_mut().unwrap() &= mask;
        Ok(PrimeSieve { limit, bits })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Primality lookup; panics if `n > limit`.
    pub fn is_prime(&self, n: u64) -> bool {
        assert!(
            n <= self.limit,
            "sieve lookup {n} beyond limit {}",
            self.limit
        );
        let i = n as usize;
        self.bits[i / 64] >> (i % 64) & 1 == 1
    }

    /// All primes up to the limit, ascending.
    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        (2..=self.limit).filter(move |&n| self.is_prime(n))
    }

    /// Number of primes up to the limit.
    pub fn count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_primes() {
        let s = PrimeSieve::new(10).unwrap();
        let primes: Vec<u64> = s.primes().collect();
        assert_eq!(primes, vec![2, 3, 5, 7]);
        assert_eq!(s.count(), 4);
    }

    #[test]
    fn limit_boundary_is_counted() {
        let s = PrimeSieve::new(31).unwrap();
        assert!(s.is_prime(31));
        assert_eq!(s.count(), 11);
    }

    #[test]
    fn rejects_degenerate_and_oversized() {
        assert!(matches!(PrimeSieve::new(1), Err(Error::Domain(_))));
        assert!(matches!(
            PrimeSieve::new(MAX_SIEVE_LIMIT + 1),
            Err(Error::Resource(_))
        ));
    }

    #[test]
    fn count_matches_reference_at_200k() {
        // pi(200000) = 17984, cross-checked by the trial-division oracle in
        // the integration suite.
        let s = PrimeSieve::new(200_000).unwrap();
        assert_eq!(s.count(), 17_984);
    }
}
