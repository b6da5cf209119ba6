//! Scalar backends.
//!
//! Every multilinear routine in the crate is generic over [`Scalar`]. Two
//! families implement it: arbitrary-precision rationals, where all
//! comparisons are exact, and binary floats, where "zero" means "below a
//! tolerance". Metric computations need roots; the rational backend supplies
//! them only when they are exact and reports [`None`] otherwise.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FromPrimitive, Num, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational number.
pub type Rational = BigRational;

pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialOrd
    + Num
    + Signed
    + FromPrimitive
    + ToPrimitive
    + Send
    + Sync
    + 'static
{
    /// `true` when arithmetic is exact and zero tests need no tolerance.
    const EXACT: bool;
    /// Backend label used in reports ("rational", "f64", ...).
    const NAME: &'static str;

    /// Relative threshold used for rank decisions.
    fn rank_eps() -> Self;

    fn int(v: i64) -> Self;

    fn ratio(num: i64, den: i64) -> Self {
        Self::int(num) / Self::int(den)
    }

    /// A tolerance in this backend: the given value for floats, zero when exact.
    fn tolerance(tol: f64) -> Self;

    fn as_f64(&self) -> f64;

    fn from_f64(v: f64) -> Option<Self>;

    fn from_rational(q: &Rational) -> Option<Self>;

    fn to_rational(&self) -> Option<Rational>;

    /// Positive real `n`-th root of a positive value; exact backends return
    /// `None` unless the root is itself representable.
    fn root(&self, n: u32) -> Option<Self>;

    /// Whether `self` is negligible against `scale` at the rank tolerance.
    fn is_negligible(&self, scale: &Self) -> bool {
        if Self::EXACT {
            return self.is_zero();
        }
        let s = if scale.abs() > Self::one() { scale.abs() } else { Self::one() };
        self.abs() <= Self::rank_eps() * s
    }

    /// Equality up to the relative tolerance `rel` (exact backends ignore it).
    fn approx_eq(&self, other: &Self, rel: f64) -> bool {
        if Self::EXACT {
            return self == other;
        }
        let s = [self.abs(), other.abs(), Self::one()].into_iter().fold(Self::zero(), |m, x| if x > m { x } else { m });
        (self.clone() - other.clone()).abs() <= Self::tolerance(rel) * s
    }

    fn max_abs<'a, I: IntoIterator<Item = &'a Self>>(it: I) -> Self {
        it.into_iter()
            .map(|x| x.abs())
            .fold(Self::zero(), |m, x| if x > m { x } else { m })
    }
}

/// Float backends: scalars that also carry transcendental functions.
pub trait Real: Scalar + Float {}

impl Real for f32 {}
impl Real for f64 {}

impl Scalar for Rational {
    const EXACT: bool = true;
    const NAME: &'static str = "rational";

    fn rank_eps() -> Self {
        Self::zero()
    }

    fn int(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    fn tolerance(_tol: f64) -> Self {
        Self::zero()
    }

    fn as_f64(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn from_f64(v: f64) -> Option<Self> {
        Rational::from_float(v)
    }

    fn from_rational(q: &Rational) -> Option<Self> {
        Some(q.clone())
    }

    fn to_rational(&self) -> Option<Rational> {
        Some(self.clone())
    }

    fn root(&self, n: u32) -> Option<Self> {
        if !self.is_positive() || n == 0 {
            return None;
        }
        let exact = |v: &BigInt| {
            let r = v.nth_root(n);
            (num_traits::pow(r.clone(), n as usize) == *v).then_some(r)
        };
        let num = exact(self.numer())?;
        let den = exact(self.denom())?;
        Some(Rational::new(num, den))
    }
}

macro_rules! impl_float_scalar {
    ($t:ty, $name:expr, $eps:expr) => {
        impl Scalar for $t {
            const EXACT: bool = false;
            const NAME: &'static str = $name;

            fn rank_eps() -> Self {
                $eps
            }

            fn int(v: i64) -> Self {
                v as $t
            }

            fn tolerance(tol: f64) -> Self {
                tol as $t
            }

            fn as_f64(&self) -> f64 {
                *self as f64
            }

            fn from_f64(v: f64) -> Option<Self> {
                v.is_finite().then_some(v as $t)
            }

            fn from_rational(q: &Rational) -> Option<Self> {
                let v = q.to_f64()? as $t;
                v.is_finite().then_some(v)
            }

            fn to_rational(&self) -> Option<Rational> {
                Rational::from_float(*self)
            }

            fn root(&self, n: u32) -> Option<Self> {
                if *self <= 0.0 || n == 0 {
                    return None;
                }
                Some(match n {
                    1 => *self,
                    2 => self.sqrt(),
                    3 => self.cbrt(),
                    _ => self.powf(1.0 / n as $t),
                })
            }
        }
    };
}

impl_float_scalar!(f64, "f64", 1e-10);
impl_float_scalar!(f32, "f32", 1e-4);

/// Parses `"p/q"` or an integer into a rational. Decimal notation is rejected.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().ok()?;
    let den: BigInt = den.parse().ok()?;
    if den.is_zero() {
        return None;
    }
    Some(Rational::new(num, den))
}

/// The rational `num/den`.
pub fn q(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_roots_are_exact_or_absent() {
        assert_eq!(q(8, 27).root(3), Some(q(2, 3)));
        assert_eq!(q(1, 1).root(9), Some(q(1, 1)));
        assert_eq!(q(2, 1).root(2), None);
        assert_eq!(q(-8, 1).root(3), None);
    }

    #[test]
    fn float_roots() {
        assert!((512.0f64.root(9).unwrap() - 2.0).abs() < 1e-14);
        assert!((-1.0f64).root(2).is_none());
    }

    #[test]
    fn parse_rational_forms() {
        assert_eq!(parse_rational("1/2"), Some(q(1, 2)));
        assert_eq!(parse_rational(" -3 "), Some(q(-3, 1)));
        assert_eq!(parse_rational("4/-8"), Some(q(-1, 2)));
        assert_eq!(parse_rational("0.5"), None);
        assert_eq!(parse_rational("1/0"), None);
    }

    #[test]
    fn negligibility() {
        assert!(1e-12f64.is_negligible(&1.0));
        assert!(!1e-6f64.is_negligible(&1.0));
        assert!(!q(1, 1_000_000_000).is_negligible(&q(1, 1)));
        assert!(Rational::zero().is_negligible(&q(1, 1)));
    }
}
