//! Scalar abstraction shared by every numeric routine in the crate.
//!
//! Counting is always done in exact integers (`u128`). Everything that mixes
//! counts with a reference density `p` (expectations, deviations, regularity
//! thresholds, template densities) is generic over [`Scalar`], so the same code
//! runs in `f64` for speed or in [`Rational`] when an inequality has to be
//! checked without rounding.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational used for exact checks.
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
    /// Exact (for rationals) or nearest (for floats) conversion of a count.
    fn from_count(c: u128) -> Self;

    /// Exact conversion to a rational. Finite floats convert without rounding.
    fn to_exact(&self) -> Rational;

    /// Short label used in reports.
    const NAME: &'static str;

    /// Arithmetic is exact (no rounding).
    const EXACT: bool;

    fn of_usize(n: usize) -> Self {
        Self::from_count(n as u128)
    }

    fn powu(&self, e: u32) -> Self {
        num_traits::pow(self.clone(), e as usize)
    }

    fn as_f64(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }
}

impl Scalar for f64 {
    const NAME: &'static str = "f64";
    const EXACT: bool = false;

    fn from_count(c: u128) -> Self {
        c as f64
    }

    fn to_exact(&self) -> Rational {
        Rational::from_float(*self).expect("finite float")
    }
}

impl Scalar for f32 {
    const NAME: &'static str = "f32";
    const EXACT: bool = false;

    fn from_count(c: u128) -> Self {
        c as f32
    }

    fn to_exact(&self) -> Rational {
        Rational::from_float(*self).expect("finite float")
    }
}

impl Scalar for Rational {
    const NAME: &'static str = "rational";
    const EXACT: bool = true;

    fn from_count(c: u128) -> Self {
        Rational::from_integer(BigInt::from(c))
    }

    fn to_exact(&self) -> Rational {
        self.clone()
    }
}

/// Exact rational from an integer count.
pub fn exact_count(c: u128) -> Rational {
    Rational::from_integer(BigInt::from(c))
}

/// Exact rational from a signed integer.
pub fn exact_int(c: i128) -> Rational {
    Rational::from_integer(BigInt::from(c))
}

/// Parses `"num/den"`, an integer, or a decimal literal into a scalar.
///
/// Decimals are read exactly for rationals (`0.3` is `3/10`, not the nearest
/// double) and parsed natively for floats.
pub fn parse_scalar<T: Scalar>(s: &str) -> Option<T> {
    let exact = parse_rational(s)?;
    from_exact::<T>(&exact)
}

pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num.trim().parse().ok()?;
        let den: BigInt = den.trim().parse().ok()?;
        if den.is_zero() {
            return None;
        }
        return Some(Rational::new(num, den));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().all(|c| c.is_ascii_digit())
        || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let num: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().ok()?
    };
    let den = num_traits::pow(BigInt::from(10u8), frac_part.len());
    let r = Rational::new(num, den);
    Some(if neg { -r } else { r })
}

/// Converts an exact rational into `T` (exact for rationals, rounded for floats).
pub fn from_exact<T: Scalar>(r: &Rational) -> Option<T> {
    let n = r.numer();
    let d = r.denom();
    let n_t = bigint_to_scalar::<T>(n)?;
    let d_t = bigint_to_scalar::<T>(d)?;
    Some(n_t / d_t)
}

fn bigint_to_scalar<T: Scalar>(b: &BigInt) -> Option<T> {
    if let Some(v) = b.to_i128() {
        if v >= 0 {
            return Some(T::from_count(v as u128));
        }
        return Some(-T::from_count(v.unsigned_abs()));
    }
    // Large magnitudes: split into 64-bit limbs.
    let (sign, digits) = b.to_u64_digits();
    let base = T::from_count(1u128 << 64);
    let mut acc = T::zero();
    for limb in digits.iter().rev() {
        acc = acc * base.clone() + T::from_count(*limb as u128);
    }
    Some(if sign == num_bigint::Sign::Minus {
        -acc
    } else {
        acc
    })
}

/// Formats a rational as `"num/den"` (or `"num"` when integral).
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        let half: Rational = parse_rational("1/2").unwrap();
        assert_eq!(half, Rational::new(1.into(), 2.into()));
        assert_eq!(
            parse_rational("0.3").unwrap(),
            Rational::new(3.into(), 10.into())
        );
        assert_eq!(parse_rational("-2").unwrap(), exact_int(-2));
        assert!(parse_rational("1/0").is_none());
        assert!(parse_rational("abc").is_none());
        assert!(parse_rational(".").is_none());
    }

    #[test]
    fn scalar_conversions_agree() {
        let p: f64 = parse_scalar("1/4").unwrap();
        assert_eq!(p, 0.25);
        let q: f32 = parse_scalar("3/4").unwrap();
        assert_eq!(q, 0.75);
        let r: Rational = parse_scalar("0.125").unwrap();
        assert_eq!(r, Rational::new(1.into(), 8.into()));
        assert_eq!(0.1f64.to_exact().to_f64().unwrap(), 0.1);
        let big = exact_count(u128::MAX);
        let back: Rational = from_exact(&big).unwrap();
        assert_eq!(back, big);
    }

    #[test]
    fn formats_rationals() {
        assert_eq!(format_rational(&Rational::new(6.into(), 4.into())), "3/2");
        assert_eq!(format_rational(&exact_int(5)), "5");
    }
}
