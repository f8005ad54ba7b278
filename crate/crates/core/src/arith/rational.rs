use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// Exact rational on 128-bit integers, always reduced, denominator positive.
///
/// All in-scope values (the multiplicative functions k, h and the
/// Mobius-inverted kappa table) fit comfortably; arithmetic panics with a
/// message if an intermediate ever overflows rather than silently wrapping.
#[derive(Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rational {
    num: i128,
    den: i128,
}

fn gcd_i128(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn mul_checked(a: i128, b: i128) -> i128 {
    a.checked_mul(b)
        .unwrap_or_else(|| panic!("rational overflow: {a} * {b}"))
}

impl Rational {
    pub fn new(num: i128, den: i128) -> Self {
        assert!(den != 0, "rational with zero denominator");
        let g = gcd_i128(num, den);
        let sign = if den < 0 { -1 } else { 1 };
        if g == 0 {
            return Rational { num: 0, den: 1 };
        }
        Rational {
            num: sign * num / g,
            den: sign * den / g,
        }
    }

    pub fn from_int(n: i128) -> Self {
        Rational { num: n, den: 1 }
    }

    pub fn zero() -> Self {
        Rational { num: 0, den: 1 }
    }

    pub fn one() -> Self {
        Rational { num: 1, den: 1 }
    }

    pub fn numer(&self) -> i128 {
        self.num
    }

    pub fn denom(&self) -> i128 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    /// Nearest-double conversion.
    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn recip(&self) -> Self {
        assert!(self.num != 0, "reciprocal of zero");
        Rational::new(self.den, self.num)
    }
}

impl Add for Rational {
    type Output = Rational;
    fn add(self, o: Rational) -> Rational {
        // a/b + c/d with g = gcd(b, d) keeps intermediates minimal.
        let g = gcd_i128(self.den, o.den);
        let db = self.den / g;
        let dd = o.den / g;
        let num = mul_checked(self.num, dd)
            .checked_add(mul_checked(o.num, db))
            .expect("rational overflow in add");
        Rational::new(num, mul_checked(self.den, dd))
    }
}

impl Sub for Rational {
    type Output = Rational;
    fn sub(self, o: Rational) -> Rational {
        self + (-o)
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational {
            num: -self.num,
            den: self.den,
        }
    }
}

impl Mul for Rational {
    type Output = Rational;
    fn mul(self, o: Rational) -> Rational {
        // Cross-reduce before multiplying.
        let g1 = gcd_i128(self.num, o.den);
        let g2 = gcd_i128(o.num, self.den);
        Rational::new(
            mul_checked(self.num / g1, o.num / g2),
            mul_checked(self.den / g2, o.den / g1),
        )
    }
}

impl Div for Rational {
    type Output = Rational;
    #[allow(clippy::suspicious_arithmetic_impl)] // division as a * b^-1
    fn div(self, o: Rational) -> Rational {
        self * o.recip()
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, o: &Rational) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for Rational {
    fn cmp(&self, o: &Rational) -> Ordering {
        (*self - *o).num.cmp(&0)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduces_on_construction() {
        let r = Rational::new(6, -4);
        assert_eq!((r.numer(), r.denom()), (-3, 2));
    }

    #[test]
    fn arithmetic() {
        let a = Rational::new(1, 3);
        let b = Rational::new(1, 6);
        assert_eq!(a + b, Rational::new(1, 2));
        assert_eq!(a - b, Rational::new(1, 6));
        assert_eq!(a * b, Rational::new(1, 18));
        assert_eq!(a / b, Rational::from_int(2));
    }

    #[test]
    fn ordering() {
        assert!(Rational::new(2, 3) < Rational::new(3, 4));
        assert!(Rational::new(-1, 2) < Rational::zero());
    }

    #[test]
    fn display() {
        assert_eq!(Rational::new(8, 3).to_string(), "8/3");
        assert_eq!(Rational::from_int(7).to_string(), "7");
    }
}
