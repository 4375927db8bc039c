//! Numeric scalars: exact rationals or binary64 floats.
//!
//! Every algorithm in the crate is generic over [`Scalar`]. The rational
//! instantiation is exact; the `f64` instantiation compares against a
//! caller-supplied tolerance wherever an equality test is needed.

use std::fmt::{Debug, Display};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{exact, spectral, Matrix};

/// Exact rational number used for parameters and rational-mode arithmetic.
pub type Rational = BigRational;

/// Relative threshold on singular values below which a direction counts as null.
pub const RANK_RTOL: f64 = 1e-10;

/// Default absolute tolerance for float-mode comparisons.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Arithmetic {
    Rational,
    F64,
}

impl Arithmetic {
    pub fn as_str(&self) -> &'static str {
        match self {
            Arithmetic::Rational => "rational",
            Arithmetic::F64 => "f64",
        }
    }
}

impl FromStr for Arithmetic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rational" => Ok(Arithmetic::Rational),
            "f64" | "float" => Ok(Arithmetic::F64),
            other => Err(Error::Parse(format!("unknown arithmetic mode '{other}'"))),
        }
    }
}

impl Display for Arithmetic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A real field element usable by the whole pipeline.
///
/// The linear-algebra hooks (`rank`, `pseudo_inverse`, `kernel`,
/// `psd_violation`) are dispatched through the scalar so that rational mode
/// gets exact elimination and float mode gets SVD-based decisions.
pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Signed
    + Neg<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + for<'a> Div<&'a Self, Output = Self>
    + for<'a> AddAssign<&'a Self>
    + for<'a> SubAssign<&'a Self>
    + for<'a> MulAssign<&'a Self>
{
    const ARITHMETIC: Arithmetic;

    fn from_rational(r: &Rational) -> Self;

    fn from_i64(v: i64) -> Self;

    fn to_f64(&self) -> f64;

    /// `self * other` without consuming either side.
    fn mul_ref(&self, other: &Self) -> Self {
        self.clone() * other
    }

    /// Exact zero test for rationals; `|x| <= tol` for floats.
    fn is_negligible(&self, tol: f64) -> bool;

    /// Serialized form used in reports: `p/q` for rationals, shortest
    /// round-trip decimal for floats.
    fn to_report_string(&self) -> String;

    fn rank(m: &Matrix<Self>, tol: f64) -> usize;

    /// Moore–Penrose pseudo-inverse.
    fn pseudo_inverse(m: &Matrix<Self>, tol: f64) -> Matrix<Self>;

    /// Basis of the right null space, one vector per entry.
    fn kernel(m: &Matrix<Self>, tol: f64) -> Vec<Vec<Self>>;

    /// `None` when the symmetric matrix is positive semidefinite, otherwise a
    /// description of the first violating principal entry.
    fn psd_violation(m: &Matrix<Self>, tol: f64) -> Option<String>;

    /// Rank of a symmetric positive semidefinite matrix.
    fn psd_rank(m: &Matrix<Self>, tol: f64) -> usize {
        Self::rank(m, tol)
    }

    /// Moore–Penrose pseudo-inverse of a symmetric positive semidefinite matrix.
    fn psd_pseudo_inverse(m: &Matrix<Self>, tol: f64) -> Matrix<Self> {
        Self::pseudo_inverse(m, tol)
    }

    /// Null space of a symmetric positive semidefinite matrix.
    fn psd_kernel(m: &Matrix<Self>, tol: f64) -> Vec<Vec<Self>> {
        Self::kernel(m, tol)
    }

    fn pow_u32(&self, exp: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..exp {
            acc *= self;
        }
        acc
    }
}

impl Scalar for Rational {
    const ARITHMETIC: Arithmetic = Arithmetic::Rational;

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }

    fn is_negligible(&self, _tol: f64) -> bool {
        self.is_zero()
    }

    fn to_report_string(&self) -> String {
        self.to_string()
    }

    fn rank(m: &Matrix<Self>, _tol: f64) -> usize {
        exact::rank(m)
    }

    fn pseudo_inverse(m: &Matrix<Self>, _tol: f64) -> Matrix<Self> {
        exact::pseudo_inverse(m)
    }

    fn kernel(m: &Matrix<Self>, _tol: f64) -> Vec<Vec<Self>> {
        exact::kernel(m)
    }

    fn psd_violation(m: &Matrix<Self>, _tol: f64) -> Option<String> {
        exact::psd_violation(m)
    }
}

impl Scalar for f64 {
    const ARITHMETIC: Arithmetic = Arithmetic::F64;

    fn from_rational(r: &Rational) -> Self {
        ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }

    fn is_negligible(&self, tol: f64) -> bool {
        self.abs() <= tol
    }

    fn to_report_string(&self) -> String {
        format!("{self:?}")
    }

    fn rank(m: &Matrix<Self>, tol: f64) -> usize {
        spectral::rank(m, tol)
    }

    fn pseudo_inverse(m: &Matrix<Self>, tol: f64) -> Matrix<Self> {
        spectral::pseudo_inverse(m, tol)
    }

    fn kernel(m: &Matrix<Self>, tol: f64) -> Vec<Vec<Self>> {
        spectral::kernel(m, tol)
    }

    fn psd_violation(m: &Matrix<Self>, tol: f64) -> Option<String> {
        spectral::psd_violation(m, tol)
    }

    fn psd_rank(m: &Matrix<Self>, tol: f64) -> usize {
        spectral::psd_rank(m, tol)
    }

    fn psd_pseudo_inverse(m: &Matrix<Self>, tol: f64) -> Matrix<Self> {
        spectral::psd_pseudo_inverse(m, tol)
    }

    fn psd_kernel(m: &Matrix<Self>, tol: f64) -> Vec<Vec<Self>> {
        spectral::psd_kernel(m, tol)
    }
}

/// Parses `"p/q"`, an integer, or a finite decimal such as `"-0.125"` or
/// `"1.5e-3"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    let bad = || Error::Parse(format!("not a rational number: '{s}'"));
    if t.is_empty() {
        return Err(bad());
    }
    if let Some((num, den)) = t.split_once('/') {
        let num = BigInt::from_str(num.trim()).map_err(|_| bad())?;
        let den = BigInt::from_str(den.trim()).map_err(|_| bad())?;
        if den.is_zero() {
            return Err(Error::Parse(format!("zero denominator in '{s}'")));
        }
        return Ok(Rational::new(num, den));
    }
    let (mantissa, exponent) = match t.find(['e', 'E']) {
        Some(pos) => {
            let exp: i32 = t[pos + 1..].parse().map_err(|_| bad())?;
            (&t[..pos], exp)
        }
        None => (t, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part
        .chars()
        .chain(frac_part.chars())
        .all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut value = Rational::from_integer(BigInt::from_str(&all_digits).map_err(|_| bad())?);
    let shift = exponent - frac_part.len() as i32;
    let ten = Rational::from_integer(BigInt::from(10));
    let scale = num_traits::pow(ten, shift.unsigned_abs() as usize);
    if shift >= 0 {
        value *= scale;
    } else {
        value /= scale;
    }
    Ok(if negative { -value } else { value })
}

pub(crate) fn factorial<S: Scalar>(n: u32) -> S {
    (1..=n).fold(S::one(), |acc, k| acc * &S::from_i64(k as i64))
}

pub(crate) fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// `max |x|` over a slice, as `f64`.
pub(crate) fn max_abs<S: Scalar>(values: &[S]) -> f64 {
    values.iter().map(|v| v.to_f64().abs()).fold(0.0, f64::max)
}

/// True when `deviation` is acceptable given the magnitude `scale` of the
/// quantities being compared.
pub fn within_tolerance<S: Scalar>(deviation: f64, scale: f64, tol: f64) -> bool {
    match S::ARITHMETIC {
        Arithmetic::Rational => deviation == 0.0,
        Arithmetic::F64 => deviation <= tol * scale.max(1.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_rational("3/6").unwrap(), q(1, 2));
        assert_eq!(parse_rational("-7").unwrap(), q(-7, 1));
        assert_eq!(parse_rational("0.125").unwrap(), q(1, 8));
        assert_eq!(parse_rational("-1.5e-2").unwrap(), q(-3, 200));
        assert_eq!(parse_rational("2E3").unwrap(), q(2000, 1));
        assert_eq!(parse_rational(".5").unwrap(), q(1, 2));
    }

    #[test]
    fn rejects_garbage() {
        for s in ["", "abc", "1/0", "1.2.3", "--1", "e5"] {
            assert!(parse_rational(s).is_err(), "{s}");
        }
    }

    #[test]
    fn report_strings() {
        assert_eq!(q(2, 1).to_report_string(), "2");
        assert_eq!(q(-1, 3).to_report_string(), "-1/3");
        assert_eq!(0.5f64.to_report_string(), "0.5");
        assert_eq!(2.0f64.to_report_string(), "2.0");
    }

    #[test]
    fn small_binomials() {
        assert_eq!(binomial(4, 1), 4);
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(3, 4), 0);
        assert_eq!(factorial::<Rational>(5), q(120, 1));
    }
}
