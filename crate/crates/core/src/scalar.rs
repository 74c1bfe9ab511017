//! Scalar abstraction shared by the floating-point and exact-rational code paths.

use std::fmt::{self, Debug, Display};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive, Zero};

/// Exact rational scalar used for oracle computations.
pub type Rational = BigRational;

/// Scale-invariant threshold for projective equality and incidence.
pub const INCIDENCE_EPS: f64 = 1e-9;

/// Floor below which determinants and denominators count as singular.
pub const SINGULAR_EPS: f64 = 1e-12;

/// Field operations plus the handful of predicates whose meaning differs between
/// floating-point (tolerance based) and exact (zero means zero) arithmetic.
pub trait Scalar:
    Clone + Debug + PartialOrd + Num + Signed + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    /// True for exact arithmetic; every tolerance collapses to an exact zero test.
    const EXACT: bool;

    /// `|self| <= tol * scale` in float mode, `self == 0` in exact mode.
    fn negligible(&self, scale: f64, tol: f64) -> bool;

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Lossless where possible: exact for rationals, identity for floats.
    fn from_f64_value(v: f64) -> Option<Self> {
        Self::from_f64(v)
    }

    /// Product of a sequence of factors.
    fn product<I: IntoIterator<Item = Self>>(factors: I) -> Self {
        factors.into_iter().fold(Self::one(), |acc, f| acc * f)
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn negligible(&self, scale: f64, tol: f64) -> bool {
        self.abs() <= tol * scale
    }

    fn to_f64_lossy(&self) -> f64 {
        *self
    }

    // Long products go through log-magnitude and sign so intermediate values
    // cannot overflow or underflow before the final exponentiation.
    fn product<I: IntoIterator<Item = Self>>(factors: I) -> Self {
        let mut log_mag = 0.0_f64;
        let mut negative = false;
        for f in factors {
            if f == 0.0 {
                return 0.0;
            }
            if !f.is_finite() {
                return if f.is_nan() { f64::NAN } else if (f < 0.0) != negative { f64::NEG_INFINITY } else { f64::INFINITY };
            }
            log_mag += f.abs().ln();
            negative ^= f < 0.0;
        }
        let mag = log_mag.exp();
        if negative {
            -mag
        } else {
            mag
        }
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn negligible(&self, _scale: f64, _tol: f64) -> bool {
        self.is_zero()
    }

    fn from_f64_value(v: f64) -> Option<Self> {
        BigRational::from_float(v)
    }
}

/// Rational `numer/denom` from machine integers.
pub fn rational(numer: i64, denom: i64) -> Rational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Round a float to the nearest multiple of `1/denom`, exactly.
pub fn rationalize(v: f64, denom: i64) -> Rational {
    rational((v * denom as f64).round() as i64, denom)
}

/// A real number or the point at infinity of the projective line.
#[derive(Clone, PartialEq)]
pub enum ExtReal<S> {
    Finite(S),
    Infinite,
}

impl<S: Scalar> ExtReal<S> {
    pub fn finite(&self) -> Option<&S> {
        match self {
            ExtReal::Finite(v) => Some(v),
            ExtReal::Infinite => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtReal::Infinite)
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            ExtReal::Finite(v) => v.to_f64_lossy(),
            ExtReal::Infinite => f64::INFINITY,
        }
    }

    /// `a / b`, with a vanishing `b` mapped to infinity. `0/0` yields `None`.
    pub fn ratio(num: S, den: S, tol: f64) -> Option<Self> {
        let den_zero = den.negligible(1.0, tol);
        match (num.negligible(1.0, tol), den_zero) {
            (true, true) => None,
            (_, true) => Some(ExtReal::Infinite),
            _ => Some(ExtReal::Finite(num / den)),
        }
    }
}

impl<S: Debug> Debug for ExtReal<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Finite(v) => write!(f, "{v:?}"),
            ExtReal::Infinite => f.write_str("inf"),
        }
    }
}

impl<S: Display> Display for ExtReal<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Finite(v) => write!(f, "{v}"),
            ExtReal::Infinite => f.write_str("inf"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_product_matches_direct_product() {
        let xs = [2.0, -0.5, 3.0, 7.25, -1.5];
        let direct: f64 = xs.iter().product();
        let logged = f64::product(xs);
        assert!((direct - logged).abs() <= 1e-14 * direct.abs());
    }

    #[test]
    fn float_product_survives_overflowing_intermediates() {
        let big = vec![1e200; 3];
        let small = vec![1e-200; 3];
        let p = f64::product(big.into_iter().chain(small));
        assert!((p - 1.0).abs() < 1e-9);
    }

    #[test]
    fn rational_from_float_is_exact() {
        let r = Rational::from_f64_value(0.1).unwrap();
        assert_eq!(r.to_f64().unwrap(), 0.1);
        assert_ne!(r, rational(1, 10));
        assert_eq!(rationalize(0.1, 10), rational(1, 10));
    }

    #[test]
    fn ext_ratio_handles_zero_denominator() {
        assert_eq!(ExtReal::ratio(1.0, 0.0, SINGULAR_EPS), Some(ExtReal::Infinite));
        assert_eq!(ExtReal::<f64>::ratio(0.0, 0.0, SINGULAR_EPS), None);
        assert_eq!(ExtReal::ratio(rational(1, 2), rational(1, 4), 0.0), Some(ExtReal::Finite(rational(2, 1))));
    }
}
