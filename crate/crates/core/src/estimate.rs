//! Error-tracked floating point and one-sided constant estimates.
//!
//! Every constant this crate reports is either a certified lower bound, a
//! certified upper bound, or a two-sided estimate with an explicit absolute
//! error. Certification is by conservative error tracking, not interval
//! arithmetic: each double-precision operation contributes a relative error
//! of at most 2⁻⁵² which is accumulated into a running absolute bound, and
//! the final value is shifted by that bound in the safe direction.

use std::ops::{Add, Div, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::arith::Rational;

/// Per-operation relative error budget, 2⁻⁵².
///
/// IEEE-754 round-to-nearest guarantees 2⁻⁵³ for +,-,*,/ and the libm
/// functions used here are faithful to about one ulp, so a uniform 2⁻⁵²
/// per operation is conservative.
pub const OP_EPS: f64 = 2.220_446_049_250_313e-16;

/// Which side of the true constant the reported value certifies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    LowerBound,
    UpperBound,
    TwoSided,
}

/// A real constant with a direction tag and an accumulated error bound.
///
/// For `LowerBound` the claim is `true constant >= value` (the shift has
/// already been applied; `abs_error` records how large it was), and
/// symmetrically for `UpperBound`. For `TwoSided` the claim is
/// `|true - value| <= abs_error`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ConstantEstimate {
    pub value: f64,
    pub abs_error: f64,
    pub direction: Direction,
}

impl ConstantEstimate {
    pub fn lower(t: Tracked) -> Self {
        ConstantEstimate {
            value: t.val - t.err,
            abs_error: t.err,
            direction: Direction::LowerBound,
        }
    }

    pub fn upper(t: Tracked) -> Self {
        ConstantEstimate {
            value: t.val + t.err,
            abs_error: t.err,
            direction: Direction::UpperBound,
        }
    }

    pub fn two_sided(t: Tracked) -> Self {
        ConstantEstimate {
            value: t.val,
            abs_error: t.err,
            direction: Direction::TwoSided,
        }
    }

    /// An externally supplied constant taken as exact, e.g. a published
    /// value used as an input rather than recomputed.
    pub fn exact(value: f64, direction: Direction) -> Self {
        ConstantEstimate {
            value,
            abs_error: 0.0,
            direction,
        }
    }
}

/// A double together with a conservative bound on its absolute error.
#[derive(Clone, Copy, Debug)]
pub struct Tracked {
    pub val: f64,
    pub err: f64,
}

// Guards the error bound itself against rounding: the bound arithmetic is
// done in f64 too, so pad it by a relative 2⁻⁴⁰ plus one subnormal.
fn pad(e: f64) -> f64 {
    e * (1.0 + 9.1e-13) + f64::MIN_POSITIVE
}

impl Tracked {
    /// A value known exactly (integers, dyadics, published inputs).
    pub fn exact(val: f64) -> Self {
        Tracked { val, err: 0.0 }
    }

    /// Round-to-nearest conversion of an exact rational; the numerator and
    /// denominator each convert with relative error <= 2⁻⁵³ and the divide
    /// adds another half-ulp.
    pub fn from_rational(r: Rational) -> Self {
        let val = r.to_f64();
        Tracked {
            val,
            err: pad(val.abs() * 2.0 * OP_EPS),
        }
    }

    pub fn from_u128(n: u128) -> Self {
        let val = n as f64;
        Tracked {
            val,
            err: pad(val * OP_EPS),
        }
    }

    /// Natural logarithm; requires the argument bounded away from zero.
    pub fn ln(self) -> Self {
        assert!(
            self.val - self.err > 0.0,
            "tracked ln of a nonpositive value"
        );
        let val = self.val.ln();
        // |ln(x+d) - ln x| <= d / (x - d)
        let err = self.err / (self.val - self.err) + val.abs() * OP_EPS + OP_EPS;
        Tracked { val, err: pad(err) }
    }

    /// Exponential. |exp(x+d) - exp x| <= exp(x) (e^d - 1) <= exp(x) d e^d.
    pub fn exp(self) -> Self {
        let val = self.val.exp();
        let err = val * self.err * self.err.exp() + val * OP_EPS;
        Tracked { val, err: pad(err) }
    }

    /// Integer power by repeated multiplication.
    pub fn powi(self, n: u32) -> Self {
        let mut acc = Tracked::exact(1.0);
        for _ in 0..n {
            acc = acc * self;
        }
        acc
    }
}

impl Add for Tracked {
    type Output = Tracked;
    fn add(self, o: Tracked) -> Tracked {
        let val = self.val + o.val;
        Tracked {
            val,
            err: pad(self.err + o.err + val.abs() * OP_EPS),
        }
    }
}

impl Sub for Tracked {
    type Output = Tracked;
    fn sub(self, o: Tracked) -> Tracked {
        self + Tracked {
            val: -o.val,
            err: o.err,
        }
    }
}

impl Mul for Tracked {
    type Output = Tracked;
    fn mul(self, o: Tracked) -> Tracked {
        let val = self.val * o.val;
        let err =
            self.err * o.val.abs() + o.err * self.val.abs() + self.err * o.err + val.abs() * OP_EPS;
        Tracked { val, err: pad(err) }
    }
}

/// Division panics unless the denominator is bounded away from zero by its
/// own error budget.
impl Div for Tracked {
    type Output = Tracked;
    fn div(self, o: Tracked) -> Tracked {
        let val = self.val / o.val;
        let denom = o.val.abs() - o.err;
        assert!(
            denom > 0.0,
            "tracked division by a value not bounded away from zero"
        );
        let err = (self.err + val.abs() * o.err) / denom + val.abs() * OP_EPS;
        Tracked { val, err: pad(err) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tracked_brackets_truth() {
        // (1/3 + 1/7) * 21 = 10 exactly; the tracked result must bracket it.
        let third = Tracked::from_rational(Rational::new(1, 3));
        let seventh = Tracked::from_rational(Rational::new(1, 7));
        let t = (third + seventh) * Tracked::exact(21.0);
        assert!((t.val - 10.0).abs() <= t.err);
        assert!(t.err < 1e-13);
    }

    #[test]
    fn tracked_exp_ln_roundtrip() {
        let t = Tracked::exact(2.5).exp().ln();
        assert!((t.val - 2.5).abs() <= t.err);
    }

    #[test]
    fn estimate_directions() {
        let t = Tracked {
            val: 1.0,
            err: 1e-10,
        };
        let lo = ConstantEstimate::lower(t);
        let hi = ConstantEstimate::upper(t);
        assert!(lo.value < 1.0 && hi.value > 1.0);
        assert_eq!(lo.direction, Direction::LowerBound);
        assert_eq!(hi.direction, Direction::UpperBound);
    }

    #[test]
    fn powi_matches_pow() {
        let t = Tracked::exact(0.863665).powi(11);
        let direct = 0.863665f64.powi(11);
        assert!((t.val - direct).abs() <= t.err + 1e-15);
    }
}
