//! Elementary number-theoretic primitives: prime sieve, 64-bit
//! factorization, multiplicative order of 2, and the exact multiplicative
//! functions k, h used by the constant computations.

mod factor;
mod functions;
mod rational;
mod sieve;

pub use factor::{factorize, is_prime_u64, FactorMap};
pub use functions::{
    binary_weight, divisor_k_sum, euler_phi, h_function, k_function, mobius, mult_order2,
};
pub use rational::Rational;
pub use sieve::{PrimeSieve, MAX_SIEVE_LIMIT};
