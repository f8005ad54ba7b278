//! Scalar constants of the representation problem: the twin-prime-type
//! product C0, the kappa table and both bounds for C2, the major-arc lower
//! constant, the minor-arc upper constant, and the residue counts H(d;N,K)
//! that feed the major-arc sum.

use serde::{Deserialize, Serialize};

use crate::arith::{
    factorize, h_function, is_prime_u64, k_function, mobius, mult_order2, Rational,
};
use crate::error::{Error, Result};
use crate::estimate::{ConstantEstimate, Direction, Tracked};

/// Enumeration budget for the brute-force residue counter.
pub const H_ENUM_BUDGET: u64 = 100_000_000;

/// Named parameter presets for the end-to-end pipeline.
///
/// `paper` uses the divisor cutoff D = 5 and the published prime-pair sieve
/// constant C1 = 7.8342; `elsholtz` raises the cutoff to D = 21 and
/// replaces the computed C2 upper bound by the sharper given value 1.992.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConfigPreset {
    pub name: String,
    pub d_cutoff: u64,
    pub c1: f64,
    pub c2_upper_override: Option<f64>,
    pub minor_constant_override: Option<f64>,
}

impl ConfigPreset {
    pub fn paper() -> Self {
        ConfigPreset {
            name: "paper".into(),
            d_cutoff: 5,
            c1: 7.8342,
            c2_upper_override: None,
            minor_constant_override: None,
        }
    }

    pub fn elsholtz() -> Self {
        ConfigPreset {
            name: "elsholtz".into(),
            d_cutoff: 21,
            c1: 7.8342,
            c2_upper_override: Some(1.992),
            minor_constant_override: None,
        }
    }

    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "paper" => Some(Self::paper()),
            "elsholtz" => Some(Self::elsholtz()),
            _ => None,
        }
    }
}

/// Result of the C0 computation: the raw partial product over odd primes up
/// to the limit, and the certified lower bound after the tail factor.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct C0Estimate {
    pub partial_product: ConstantEstimate,
    pub bound: ConstantEstimate,
}

/// Lower bound for C0 = prod over odd p of (1 - (p-1)^-2).
///
/// The partial product over odd primes p <= prime_limit is multiplied by
/// the tail bound prod_{n >= K} (1 - n^-2) = 1 - 1/K with K = prime_limit,
/// valid because every omitted factor has p - 1 >= prime_limit.
pub fn compute_c0(prime_limit: u64) -> Result<C0Estimate> {
    if prime_limit < 3 {
        return Err(Error::domain(format!(
            "compute_c0: prime_limit {prime_limit} < 3"
        )));
    }
    let sieve = crate::arith::PrimeSieve::new(prime_limit)?;
    let one = Tracked::exact(1.0);
    let mut partial = one;
    for p in sieve.primes().filter(|&p| p > 2) {
        let pm1 = Tracked::exact((p - 1) as f64);
        partial = partial * (one - one / (pm1 * pm1));
    }
    let tail = one - one / Tracked::exact(prime_limit as f64);
    Ok(C0Estimate {
        partial_product: ConstantEstimate::two_sided(partial),
        bound: ConstantEstimate::lower(partial * tail),
    })
}

/// Exact rational values kappa(m) for 1 <= m < cutoff, where kappa is the
/// Mobius inversion of m -> h(2^m - 1) over the divisor lattice.
#[derive(Clone, Debug)]
pub struct KappaTable {
    cutoff_m: u32,
    kappa: Vec<Rational>,
}

impl KappaTable {
    pub fn cutoff(&self) -> u32 {
        self.cutoff_m
    }

    /// kappa(m) for 1 <= m < cutoff.
    pub fn get(&self, m: u32) -> Option<Rational> {
        if m >= 1 && m < self.cutoff_m {
            Some(self.kappa[m as usize])
        } else {
            None
        }
    }

    /// Checks sum_{e|m} kappa(e) = h(2^m - 1) exactly for every tabled m.
    pub fn verify_inversion(&self) -> Result<bool> {
        for m in 1..self.cutoff_m as u64 {
            let mut sum = Rational::zero();
            for e in factorize(m)?.divisors() {
                sum = sum + self.kappa[e as usize];
            }
            if sum != h_function((1u64 << m) - 1)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Build the kappa table: kappa(m) = sum_{d|m} mu(m/d) h(2^d - 1).
pub fn build_kappa_table(cutoff_m: u32) -> Result<KappaTable> {
    if cutoff_m < 2 {
        return Err(Error::range(format!("kappa cutoff {cutoff_m} < 2")));
    }
    if cutoff_m > 64 {
        return Err(Error::range(format!(
            "kappa cutoff {cutoff_m} > 64: 2^d - 1 leaves the 64-bit factorizer's range"
        )));
    }
    let mut h_vals = vec![Rational::zero(); cutoff_m as usize];
    for d in 1..cutoff_m as u64 {
        h_vals[d as usize] = h_function((1u64 << d) - 1)?;
    }
    let mut kappa = vec![Rational::zero(); cutoff_m as usize];
    for m in 1..cutoff_m as u64 {
        let mut acc = Rational::zero();
        for d in factorize(m)?.divisors() {
            let mu = mobius(m / d)?;
            if mu != 0 {
                let term = h_vals[d as usize];
                acc = if mu > 0 { acc + term } else { acc - term };
            }
        }
        kappa[m as usize] = acc;
    }
    Ok(KappaTable { cutoff_m, kappa })
}

/// Result of the C2 upper bound: the finite kappa-weighted partial sum and
/// the certified upper bound after the tail term.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct C2Upper {
    pub partial_sum: ConstantEstimate,
    pub bound: ConstantEstimate,
}

/// Upper bound for C2 = sum_d k(d)/eps(d):
///
///   sum_{m < M} kappa(m) (1/m - 1/M)  +  tail_coefficient (1 + log M)/M,
///
/// rounded upward. Each kappa term is exact; conversion to floating point
/// happens per term with its rounding error tracked.
pub fn c2_upper(cutoff_m: u32, tail_coefficient: f64) -> Result<C2Upper> {
    if cutoff_m < 9 {
        return Err(Error::domain(format!(
            "c2_upper: cutoff {cutoff_m} < 9 (the tail estimate needs x >= 9)"
        )));
    }
    if tail_coefficient <= 0.0 {
        return Err(Error::domain("c2_upper: tail coefficient must be positive"));
    }
    let table = build_kappa_table(cutoff_m)?;
    let m_big = cutoff_m as i128;
    let mut partial = Tracked::exact(0.0);
    for m in 1..cutoff_m {
        // kappa(m) (1/m - 1/M) = kappa(m) (M - m) / (m M), exact per term.
        let weight = Rational::new(m_big - m as i128, m as i128 * m_big);
        partial = partial + Tracked::from_rational(table.get(m).unwrap() * weight);
    }
    let m_f = Tracked::exact(cutoff_m as f64);
    let tail = Tracked::exact(tail_coefficient) * (Tracked::exact(1.0) + m_f.ln()) / m_f;
    Ok(C2Upper {
        partial_sum: ConstantEstimate::two_sided(partial),
        bound: ConstantEstimate::upper(partial + tail),
    })
}

/// Lower bound for C2: the truncation sum_{d <= d_limit} k(d)/eps(d),
/// rounded downward. Only odd squarefree d contribute.
pub fn c2_lower(d_limit: u64) -> Result<ConstantEstimate> {
    if d_limit < 1 {
        return Err(Error::domain("c2_lower: d_limit must be >= 1"));
    }
    let mut acc = Tracked::exact(0.0);
    for d in (1..=d_limit).step_by(2) {
        let k = k_function(d)?;
        if k.is_zero() {
            continue;
        }
        let eps = mult_order2(d)?;
        acc = acc + Tracked::from_rational(k / Rational::from_int(eps as i128));
    }
    Ok(ConstantEstimate::lower(acc))
}

/// The constant multiplying C0 N / log^2 2 in the minor-arc mean-square
/// bound: (C1 - 2) C2 + (log 2)/C0, rounded upward.
pub fn minor_arc_constant(
    c0: &ConstantEstimate,
    c1: f64,
    c2: &ConstantEstimate,
) -> Result<ConstantEstimate> {
    if c0.direction != Direction::LowerBound || c2.direction != Direction::UpperBound {
        return Err(Error::domain(
            "minor_arc_constant needs a C0 lower bound and a C2 upper bound",
        ));
    }
    if c0.value <= 0.0 {
        return Err(Error::domain(
            "minor_arc_constant: C0 bound must be positive",
        ));
    }
    let ln2 = Tracked {
        val: std::f64::consts::LN_2,
        err: std::f64::consts::LN_2 * crate::estimate::OP_EPS,
    };
    let first = (Tracked::exact(c1) - Tracked::exact(2.0)) * Tracked::exact(c2.value);
    let second = ln2 / Tracked::exact(c0.value);
    Ok(ConstantEstimate::upper(first + second))
}

fn power_residues(d: u64) -> Result<Vec<u64>> {
    let eps = mult_order2(d)?;
    let mut pw = Vec::with_capacity(eps as usize);
    let mut x = 1u64;
    for _ in 0..eps {
        x = (x * 2) % d;
        pw.push(x);
    }
    Ok(pw)
}

/// Exact count of exponent tuples (v_1, ..., v_K), 1 <= v_i <= eps(d), with
/// d | N - sum 2^{v_i}, by enumerating all eps(d)^K tuples.
///
/// This is the independent oracle for the closed form and the convolution
/// counter; it refuses to enumerate more than [`H_ENUM_BUDGET`] tuples.
pub fn h_bruteforce(d: u64, n_residue: u64, k: u32) -> Result<u128> {
    if d < 3 || d.is_multiple_of(2) {
        return Err(Error::domain(format!(
            "h_bruteforce: d = {d} must be odd and >= 3"
        )));
    }
    if n_residue >= d {
        return Err(Error::domain(format!(
            "h_bruteforce: residue {n_residue} >= d = {d}"
        )));
    }
    if k == 0 {
        return Err(Error::domain("h_bruteforce: K must be >= 1"));
    }
    let pw = power_residues(d)?;
    let eps = pw.len() as u64;
    match eps.checked_pow(k) {
        Some(total) if total <= H_ENUM_BUDGET => total,
        _ => {
            return Err(Error::resource(format!(
                "h_bruteforce: eps({d})^{k} exceeds enumeration budget {H_ENUM_BUDGET}"
            )))
        }
    };
    let k = k as usize;
    let mut digits = vec![0usize; k];
    // sums[j] = (pw[digits[0]] + ... + pw[digits[j-1]]) mod d
    let mut sums = vec![0u64; k + 1];
    for j in 0..k {
        sums[j + 1] = (sums[j] + pw[0]) % d;
    }
    let mut count = 0u128;
    loop {
        if sums[k] == n_residue {
            count += 1;
        }
        // Odometer increment from the last digit.
        let mut j = k;
        loop {
            if j == 0 {
                return Ok(count);
            }
            j -= 1;
            digits[j] += 1;
            if digits[j] < pw.len() {
                break;
            }
            digits[j] = 0;
        }
        for i in j..k {
            sums[i + 1] = (sums[i] + pw[digits[i]]) % d;
        }
    }
}

/// Closed form for H(d; N, K) when 2 is a primitive root modulo a prime d,
/// so the powers of 2 sweep every nonzero residue:
///
///   d not dividing N:  ((d-1)^K - (-1)^K) / d
///   d dividing N:      ((d-1)^K + (-1)^K (d-1)) / d
pub fn h_closed_form(d: u64, divides: bool, k: u32) -> Result<u128> {
    if d < 3 || !is_prime_u64(d) || mult_order2(d)? != d - 1 {
        return Err(Error::domain(format!(
            "h_closed_form: 2 is not a primitive root modulo {d}"
        )));
    }
    if k == 0 {
        return Err(Error::domain("h_closed_form: K must be >= 1"));
    }
    let pow = (d as u128 - 1)
        .checked_pow(k)
        .ok_or_else(|| Error::resource(format!("h_closed_form: ({d}-1)^{k} overflows")))?;
    let even = k.is_multiple_of(2);
    let num = match (divides, even) {
        (true, true) => pow + (d as u128 - 1),
        (true, false) => pow - (d as u128 - 1),
        (false, true) => pow - 1,
        (false, false) => pow + 1,
    };
    debug_assert_eq!(num % d as u128, 0);
    Ok(num / d as u128)
}

/// Exact counts H(d; r, K) for every residue r simultaneously, by
/// convolving the distribution of 2^v mod d over K steps. O(K d eps) time,
/// no enumeration budget.
pub fn h_distribution(d: u64, k: u32) -> Result<Vec<u128>> {
    if d < 3 || d.is_multiple_of(2) {
        return Err(Error::domain(format!(
            "h_distribution: d = {d} must be odd and >= 3"
        )));
    }
    if k == 0 {
        return Err(Error::domain("h_distribution: K must be >= 1"));
    }
    let pw = power_residues(d)?;
    let eps = pw.len() as f64;
    if k as f64 * eps.log2() > 120.0 {
        return Err(Error::resource(format!(
            "h_distribution: eps({d})^{k} overflows the 128-bit counter"
        )));
    }
    let d = d as usize;
    let mut counts = vec![0u128; d];
    counts[0] = 1;
    for _ in 0..k {
        let mut next = vec![0u128; d];
        for (s, &c) in counts.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for &p in &pw {
                next[(s + p as usize) % d] += c;
            }
        }
        counts = next;
    }
    Ok(counts)
}

/// Lower bound for the major-arc constant
///
///   2 sum_{d <= D, k(d) != 0} k(d) min_N H(d; N, K) eps(d)^{-K},
///
/// minimized independently over the residue of N modulo each d, rounded
/// downward. The closed form is used where 2 is a primitive root; the exact
/// convolution counter covers the remaining moduli (7, 15, 17, 21, ...),
/// whose enumeration cost would exceed any reasonable budget at large K.
pub fn major_arc_constant(d_cutoff: u64, k: u32) -> Result<ConstantEstimate> {
    if k < 7 {
        return Err(Error::domain(format!(
            "major_arc_constant: K = {k} < 7, below the validity floor of the H bounds"
        )));
    }
    if d_cutoff.is_multiple_of(2) || d_cutoff < 1 {
        return Err(Error::domain(format!(
            "major_arc_constant: cutoff {d_cutoff} must be odd"
        )));
    }
    let mut acc = Tracked::exact(1.0); // d = 1: k(1) = 1, H = 1, eps = 1
    for d in (3..=d_cutoff).step_by(2) {
        let kd = k_function(d)?;
        if kd.is_zero() {
            continue;
        }
        let eps = mult_order2(d)?;
        let h_min = if is_prime_u64(d) && eps == d - 1 {
            h_closed_form(d, true, k)?.min(h_closed_form(d, false, k)?)
        } else {
            *h_distribution(d, k)?.iter().min().unwrap()
        };
        let eps_pow = (eps as u128).checked_pow(k).ok_or_else(|| {
            Error::resource(format!("major_arc_constant: eps({d})^{k} overflows"))
        })?;
        let term =
            Tracked::from_rational(kd) * Tracked::from_u128(h_min) / Tracked::from_u128(eps_pow);
        acc = acc + term;
    }
    Ok(ConstantEstimate::lower(acc * Tracked::exact(2.0)))
}

/// Diagnostic partial sum sum_{eps(q) <= x} mu^2(q) q / phi^2(q) over odd
/// squarefree q up to q_limit; the underlying lemma asserts it is O(log x).
pub fn gallagher_sum(x: f64, q_limit: u64) -> Result<f64> {
    if x < 1.0 {
        return Err(Error::domain("gallagher_sum: x must be >= 1"));
    }
    let mut acc = 0.0f64;
    for q in (1..=q_limit).step_by(2) {
        let f = factorize(q)?;
        if !f.is_squarefree() {
            continue;
        }
        if mult_order2(q)? as f64 <= x {
            let phi: u64 = f.distinct_primes().map(|p| p - 1).product();
            acc += q as f64 / (phi as f64 * phi as f64);
        }
    }
    Ok(acc)
}
