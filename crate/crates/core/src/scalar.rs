//! Scalar fields carrying connection coefficients.
//!
//! Two models are supported: exact rationals (`BigRational`) and double
//! precision complex numbers (`Complex64`). Every container in the crate is
//! generic over [`Scalar`], and the field tag travels with the type.

use std::fmt::{self, Debug};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use serde::Serialize;
use thiserror::Error;

/// Default relative tolerance for comparisons in the complex model.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Rational,
    Complex,
}

impl Field {
    pub fn tag(self) -> &'static str {
        match self {
            Field::Rational => "rational",
            Field::Complex => "complex",
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Field {
    type Err = ScalarParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rational" => Ok(Field::Rational),
            "complex" => Ok(Field::Complex),
            other => Err(ScalarParseError(format!("unknown field `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot parse scalar: {0}")]
pub struct ScalarParseError(pub String);

/// Field element used for connection coefficients, matrix entries and
/// vertex functions.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    const FIELD: Field;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;

    /// Zero test: exact for rationals, `|z| <= tol` for complex numbers.
    fn is_zero_within(&self, tol: f64) -> bool;

    /// Equality: exact for rationals; for complex numbers
    /// `|a - b| <= tol * max(1, |a|, |b|)`.
    fn approx_eq(&self, other: &Self, tol: f64) -> bool;

    /// Relative discrepancy used in residual reports (0 for exact equality).
    fn rel_error(&self, other: &Self) -> f64;

    fn magnitude(&self) -> f64;
    fn to_complex(&self) -> Complex64;

    /// Exact value when the element is rational.
    fn to_rational(&self) -> Option<BigRational>;
    fn from_rational(r: &BigRational) -> Self;

    fn recip(&self) -> Self {
        Self::one() / self.clone()
    }

    /// Integer power; negative exponents invert.
    fn powi(&self, exp: i64) -> Self {
        let mut base = if exp < 0 { self.recip() } else { self.clone() };
        let mut e = exp.unsigned_abs();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            e >>= 1;
            if e > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }

    /// Power with an arbitrary-precision exponent.
    fn pow_big(&self, exp: &BigInt) -> Self {
        let e = exp
            .to_i64()
            .expect("exponent does not fit in i64; multiplicative system too ill-conditioned");
        self.powi(e)
    }

    /// Principal `d`-th root, or `None` if it does not exist in the field.
    fn nth_root(&self, d: u64) -> Option<Self>;

    /// Random nonzero element for fixtures.
    fn random_nonzero<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Text encoding used by the connection and invariants files.
    fn encode(&self) -> String;
    fn decode(s: &str) -> Result<Self, ScalarParseError>;

    fn is_one_within(&self, tol: f64) -> bool {
        self.approx_eq(&Self::one(), tol)
    }
}

impl Scalar for BigRational {
    const FIELD: Field = Field::Rational;

    fn zero() -> Self {
        Zero::zero()
    }

    fn one() -> Self {
        One::one()
    }

    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn is_zero_within(&self, _tol: f64) -> bool {
        Zero::is_zero(self)
    }

    fn approx_eq(&self, other: &Self, _tol: f64) -> bool {
        self == other
    }

    fn rel_error(&self, other: &Self) -> f64 {
        if self == other {
            0.0
        } else {
            let a = self.to_complex();
            let b = other.to_complex();
            let scale = a.norm().max(b.norm()).max(1.0);
            ((a - b).norm() / scale).max(f64::MIN_POSITIVE)
        }
    }

    fn magnitude(&self) -> f64 {
        self.abs().to_f64().unwrap_or(f64::INFINITY)
    }

    fn to_complex(&self) -> Complex64 {
        Complex64::new(self.to_f64().unwrap_or(f64::NAN), 0.0)
    }

    fn to_rational(&self) -> Option<BigRational> {
        Some(self.clone())
    }

    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }

    fn recip(&self) -> Self {
        BigRational::recip(self)
    }

    fn pow_big(&self, exp: &BigInt) -> Self {
        if One::is_one(self) {
            return One::one();
        }
        if *self == -<BigRational as One>::one() {
            let odd = (exp % 2u32) != BigInt::zero();
            return if odd { self.clone() } else { One::one() };
        }
        self.powi(exp.to_i64().expect("rational exponent out of range"))
    }

    fn nth_root(&self, d: u64) -> Option<Self> {
        if d == 0 {
            return None;
        }
        if d == 1 {
            return Some(self.clone());
        }
        let d32 = u32::try_from(d).ok()?;
        let neg = self.is_negative();
        if neg && d % 2 == 0 {
            return None;
        }
        let numer = self.numer().abs();
        let denom = self.denom().clone();
        let rn = numer.nth_root(d32);
        let rd = denom.nth_root(d32);
        if num_traits::pow(rn.clone(), d32 as usize) != numer
            || num_traits::pow(rd.clone(), d32 as usize) != denom
        {
            return None;
        }
        let root = BigRational::new(rn, rd);
        Some(if neg { -root } else { root })
    }

    fn random_nonzero<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let p: i64 = rng.gen_range(1..=100);
        let q: i64 = rng.gen_range(1..=100);
        let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
        BigRational::new(BigInt::from(sign * p), BigInt::from(q))
    }

    fn encode(&self) -> String {
        self.to_string()
    }

    fn decode(s: &str) -> Result<Self, ScalarParseError> {
        let s = s.trim();
        let (p, q) = match s.split_once('/') {
            Some((p, q)) => (p, q),
            None => (s, "1"),
        };
        let p: BigInt = p
            .parse()
            .map_err(|_| ScalarParseError(format!("bad numerator in `{s}`")))?;
        let q: BigInt = q
            .parse()
            .map_err(|_| ScalarParseError(format!("bad denominator in `{s}`")))?;
        if Zero::is_zero(&q) {
            return Err(ScalarParseError(format!("zero denominator in `{s}`")));
        }
        Ok(BigRational::new(p, q))
    }
}

impl Scalar for Complex64 {
    const FIELD: Field = Field::Complex;

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }

    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }

    fn from_i64(v: i64) -> Self {
        Complex64::new(v as f64, 0.0)
    }

    fn is_zero_within(&self, tol: f64) -> bool {
        self.norm() <= tol
    }

    fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        let scale = self.norm().max(other.norm()).max(1.0);
        (self - other).norm() <= tol * scale
    }

    fn rel_error(&self, other: &Self) -> f64 {
        let scale = self.norm().max(other.norm()).max(1.0);
        (self - other).norm() / scale
    }

    fn magnitude(&self) -> f64 {
        self.norm()
    }

    fn to_complex(&self) -> Complex64 {
        *self
    }

    fn to_rational(&self) -> Option<BigRational> {
        None
    }

    fn from_rational(r: &BigRational) -> Self {
        Complex64::new(r.to_f64().unwrap_or(f64::NAN), 0.0)
    }

    fn recip(&self) -> Self {
        self.inv()
    }

    fn powi(&self, exp: i64) -> Self {
        match i32::try_from(exp) {
            Ok(e) => Complex64::powi(self, e),
            Err(_) => Complex64::powf(*self, exp as f64),
        }
    }

    fn nth_root(&self, d: u64) -> Option<Self> {
        if d == 0 {
            return None;
        }
        if d == 1 {
            return Some(*self);
        }
        let (r, theta) = self.to_polar();
        let d = d as f64;
        Some(Complex64::from_polar(r.powf(1.0 / d), theta / d))
    }

    fn random_nonzero<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let modulus: f64 = rng.gen_range(0.5..=2.0);
        let phase: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        Complex64::from_polar(modulus, phase)
    }

    fn encode(&self) -> String {
        format!("{:.16e},{:.16e}", self.re, self.im)
    }

    fn decode(s: &str) -> Result<Self, ScalarParseError> {
        let s = s.trim();
        let (re, im) = s
            .split_once(',')
            .ok_or_else(|| ScalarParseError(format!("expected `re,im`, got `{s}`")))?;
        let re: f64 = re
            .parse()
            .map_err(|_| ScalarParseError(format!("bad real part in `{s}`")))?;
        let im: f64 = im
            .parse()
            .map_err(|_| ScalarParseError(format!("bad imaginary part in `{s}`")))?;
        Ok(Complex64::new(re, im))
    }
}

/// Shorthand for the exact rational model.
pub type Rational = BigRational;

/// Builds an exact rational `p/q`.
pub fn ratio(p: i64, q: i64) -> Rational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rational_roots() {
        assert_eq!(ratio(4, 9).nth_root(2), Some(ratio(2, 3)));
        assert_eq!(ratio(-8, 27).nth_root(3), Some(ratio(-2, 3)));
        assert_eq!(ratio(2, 1).nth_root(2), None);
        assert_eq!(ratio(-4, 1).nth_root(2), None);
    }

    #[test]
    fn rational_codec() {
        let x = ratio(-14, 6);
        assert_eq!(x.encode(), "-7/3");
        assert_eq!(Rational::decode("-7/3").unwrap(), x);
        assert_eq!(Rational::decode("5").unwrap(), ratio(5, 1));
        assert!(Rational::decode("1/0").is_err());
    }

    #[test]
    fn complex_codec_is_bit_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let z = Complex64::random_nonzero(&mut rng);
            let text = z.encode();
            let back = Complex64::decode(&text).unwrap();
            assert_eq!(back, z);
            assert_eq!(back.encode(), text);
        }
    }

    #[test]
    fn powers_and_inverses() {
        let x = ratio(3, 2);
        assert_eq!(x.powi(-3), ratio(8, 27));
        assert_eq!(
            ratio(-1, 1).pow_big(&BigInt::from(1_000_000_001u64)),
            ratio(-1, 1)
        );
        let z = Complex64::new(0.3, -1.2);
        assert!(z.powi(5).approx_eq(&(z * z * z * z * z), 1e-12));
        let r = z.nth_root(3).unwrap();
        assert!(r.powi(3).approx_eq(&z, 1e-12));
    }

    #[test]
    fn random_samples_respect_ranges() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let q = Rational::random_nonzero(&mut rng);
            assert!(!Zero::is_zero(&q));
            assert!(q.numer().abs() <= BigInt::from(100));
            let z = Complex64::random_nonzero(&mut rng);
            assert!((0.5..=2.0).contains(&z.norm()));
        }
    }
}
