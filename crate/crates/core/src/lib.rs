//! Verified-constant toolkit for the Linnik problem: writing every large
//! even integer as a sum of two primes and exactly K powers of two.
//!
//! The crate recomputes, with controlled rounding error, each numerical
//! ingredient of the K = 13 (unconditional) and K = 7 (under GRH) results:
//!
//! - [`arith`] — primes, 64-bit factorization, multiplicative order of 2,
//!   and the exact multiplicative functions k and h;
//! - [`constants`] — the twin-prime-type product C0, the kappa table and
//!   both C2 bounds, the major-arc and minor-arc constants, and the residue
//!   counts H(d; N, K);
//! - [`expsum`] — the exponential sum T_L over powers of two, its dyadic
//!   table, the exponential-moment average F(xi, h), and the measure-decay
//!   exponent E(lambda) with its optimizer and explicit measure bound;
//! - [`ksolver`] — the condition E(lambda) > 2 theta - 1, the inequality
//!   minor * lambda^(K-2) < major, and the end-to-end pipeline;
//! - [`goldbach`] — desk-scale verification of the representation itself.
//!
//! Every reported constant carries a direction tag (lower bound, upper
//! bound, or two-sided) and an explicit error budget; see [`estimate`].
//! The mdBook under `book/` walks through the mathematics chapter by
//! chapter, and its code snippets double as this crate's doctests.

pub mod arith;
pub mod constants;
pub mod error;
pub mod estimate;
pub mod expsum;
pub mod goldbach;
pub mod ksolver;

pub use error::{Error, Result};

// The book's code snippets are compiled and run by `cargo test --doc`,
// keeping the guide in sync with the library.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/arithmetic.md")]
    mod arithmetic {}
    #[doc = include_str!("../../../book/src/constants.md")]
    mod constants {}
    #[doc = include_str!("../../../book/src/exponential-sums.md")]
    mod exponential_sums {}
    #[doc = include_str!("../../../book/src/measure.md")]
    mod measure {}
    #[doc = include_str!("../../../book/src/endgame.md")]
    mod endgame {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
}
