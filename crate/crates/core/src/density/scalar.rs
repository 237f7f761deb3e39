use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

/// Exact probabilities.
pub type Exact = BigRational;

/// Number type for probability tables: exact rationals or `f64`.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Send
    + Sync
    + 'static
{
    /// Whether equality comparisons are exact (tolerances are ignored).
    const EXACT: bool;

    /// Equality up to `tol`; exact types ignore `tol`.
    fn approx_eq(&self, other: &Self, tol: f64) -> bool;

    fn to_f64(&self) -> f64;

    fn is_negative(&self) -> bool;

    /// Parses `num/den`, a decimal, or an integer.
    fn parse(text: &str) -> Option<Self>;

    fn render(&self) -> String;

    fn from_ratio(num: u64, den: u64) -> Self;

    fn repr(&self) -> ScalarRepr;
}

/// Serialized form: exact values as `"num/den"` strings, floats as numbers.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum ScalarRepr {
    Exact(String),
    Float(f64),
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        (self - other).abs() <= tol
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn is_negative(&self) -> bool {
        *self < 0.0
    }

    fn parse(text: &str) -> Option<Self> {
        match text.split_once('/') {
            Some((n, d)) => {
                let (n, d): (f64, f64) = (n.trim().parse().ok()?, d.trim().parse().ok()?);
                (d != 0.0).then(|| n / d)
            }
            None => text.trim().parse().ok().filter(|v: &f64| v.is_finite()),
        }
    }

    fn render(&self) -> String {
        format!("{self}")
    }

    fn from_ratio(num: u64, den: u64) -> Self {
        num as f64 / den as f64
    }

    fn repr(&self) -> ScalarRepr {
        ScalarRepr::Float(*self)
    }
}

fn parse_decimal(text: &str) -> Option<BigRational> {
    let (neg, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int}{frac}");
    let numer: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().ok()? };
    let denom = num_traits::pow(BigInt::from(10u32), frac.len());
    let v = BigRational::new(numer, denom);
    Some(if neg { -v } else { v })
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn approx_eq(&self, other: &Self, _tol: f64) -> bool {
        self == other
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }

    fn parse(text: &str) -> Option<Self> {
        let text = text.trim();
        match text.split_once('/') {
            Some((n, d)) => {
                let n: BigInt = n.trim().parse().ok()?;
                let d: BigInt = d.trim().parse().ok()?;
                (!d.is_zero()).then(|| BigRational::new(n, d))
            }
            None => parse_decimal(text),
        }
    }

    fn render(&self) -> String {
        if self.is_integer() {
            self.numer().to_string()
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }

    fn from_ratio(num: u64, den: u64) -> Self {
        BigRational::new(num.into(), den.into())
    }

    fn repr(&self) -> ScalarRepr {
        ScalarRepr::Exact(self.render())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_parsing() {
        assert_eq!(Exact::parse("1/512"), Some(Exact::from_ratio(1, 512)));
        assert_eq!(Exact::parse("0.125"), Some(Exact::from_ratio(1, 8)));
        assert_eq!(Exact::parse("2"), Some(Exact::from_ratio(2, 1)));
        assert_eq!(Exact::parse(".5"), Some(Exact::from_ratio(1, 2)));
        assert_eq!(Exact::parse("1/0"), None);
        assert_eq!(Exact::parse("abc"), None);
        assert_eq!(Exact::from_ratio(3, 6).render(), "1/2");
    }

    #[test]
    fn float_parsing() {
        assert_eq!(f64::parse("1/4"), Some(0.25));
        assert_eq!(f64::parse("0.5"), Some(0.5));
        assert_eq!(f64::parse("nan"), None);
    }
}
