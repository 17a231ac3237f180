//! Dual-path scalar arithmetic: exact arbitrary-precision rationals by
//! default, IEEE doubles on the opt-in fast path.
//!
//! Every quantity in the crate flows through [`Scalar`]. Arithmetic between
//! two exact values stays exact; as soon as a float operand appears the
//! result is tagged as a float, so approximation never masquerades as an
//! exact result.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Shorthand for the exact rational representation.
pub type Rat = BigRational;

/// A real scalar on either the exact-rational or the float path.
#[derive(Clone, Debug)]
pub enum Scalar {
    Exact(Rat),
    Float(f64),
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Exact(Rat::zero())
    }

    pub fn one() -> Self {
        Scalar::Exact(Rat::one())
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::Exact(Rat::from_integer(BigInt::from(n)))
    }

    /// Exact ratio `num / den`. Panics if `den == 0`.
    pub fn from_ratio(num: i64, den: i64) -> Self {
        Scalar::Exact(Rat::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_rat(r: Rat) -> Self {
        Scalar::Exact(r)
    }

    pub fn from_f64(x: f64) -> Self {
        Scalar::Float(x)
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_zero(),
            Scalar::Float(x) => *x == 0.0,
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_negative(),
            Scalar::Float(x) => *x < 0.0,
        }
    }

    /// Nearest double. Exact rationals convert with correct scaling even when
    /// numerator and denominator separately overflow `f64`.
    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => rat_to_f64(r),
            Scalar::Float(x) => *x,
        }
    }

    /// The exact rational value, if this scalar is on the exact path.
    pub fn as_rat(&self) -> Option<&Rat> {
        match self {
            Scalar::Exact(r) => Some(r),
            Scalar::Float(_) => None,
        }
    }

    /// Reinterpret on the float path (used by the opt-in fast pipeline).
    pub fn to_float_path(&self) -> Scalar {
        Scalar::Float(self.to_f64())
    }

    pub fn abs(&self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(r.abs()),
            Scalar::Float(x) => Scalar::Float(x.abs()),
        }
    }

    pub fn recip(&self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(r.recip()),
            Scalar::Float(x) => Scalar::Float(1.0 / x),
        }
    }

    /// Integer power with negative exponents allowed (base must be nonzero
    /// for negative exponents).
    pub fn pow_i(&self, e: i64) -> Scalar {
        match self {
            Scalar::Exact(r) => {
                let e32 = i32::try_from(e).expect("exponent fits i32");
                Scalar::Exact(r.pow(e32))
            }
            Scalar::Float(x) => {
                let e32 = i32::try_from(e).expect("exponent fits i32");
                Scalar::Float(x.powi(e32))
            }
        }
    }

    pub fn pow_u(&self, e: u32) -> Scalar {
        self.pow_i(i64::from(e))
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            _ => self.to_f64() == other.to_f64(),
        }
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a.partial_cmp(b),
            _ => self.to_f64().partial_cmp(&other.to_f64()),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) => write!(f, "{r}"),
            Scalar::Float(x) => write!(f, "{x}"),
        }
    }
}

macro_rules! scalar_binop {
    ($trait:ident, $method:ident, $fop:tt) => {
        impl $trait<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                match (self, rhs) {
                    (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a.$method(b)),
                    _ => Scalar::Float(self.to_f64() $fop rhs.to_f64()),
                }
            }
        }
        impl $trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                (&self).$method(rhs)
            }
        }
        impl $trait<Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                self.$method(&rhs)
            }
        }
    };
}

scalar_binop!(Add, add, +);
scalar_binop!(Sub, sub, -);
scalar_binop!(Mul, mul, *);
scalar_binop!(Div, div, /);

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(-r),
            Scalar::Float(x) => Scalar::Float(-x),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

/// Nearest-double conversion for arbitrary-size rationals.
///
/// `num-rational`'s `ToPrimitive` already performs a correctly scaled
/// conversion; this wrapper only pins down the out-of-range behavior.
pub fn rat_to_f64(r: &Rat) -> f64 {
    match r.to_f64() {
        Some(x) => x,
        None => {
            if r.is_negative() {
                f64::NEG_INFINITY
            } else {
                f64::INFINITY
            }
        }
    }
}

/// A rational upper bound on sqrt(s) for s >= 0, within ~1e-9 relative.
///
/// Used to form certified majorants of complex moduli; slack only widens the
/// bound, never invalidates it.
pub fn rat_sqrt_upper(s: &Rat) -> Rat {
    if s.is_zero() {
        return Rat::zero();
    }
    assert!(!s.is_negative(), "square root of a negative rational");
    let approx = rat_to_f64(s).sqrt();
    // bump ~2^-30 relative above the double approximation, then verify
    let bump = Rat::new(BigInt::from((1i64 << 30) + 2), BigInt::from(1i64 << 30));
    let mut u = Rat::from_float(approx).unwrap_or_else(Rat::one) * &bump;
    if u.is_negative() || u.is_zero() {
        u = Rat::one();
    }
    while &u * &u < *s {
        u *= Rat::new(BigInt::from(2), BigInt::one());
    }
    u
}

/// Parse a rational from `"a/b"`, a decimal such as `"1.25"`, or an integer.
pub fn parse_rational(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = |msg: &str| Error::InvalidArgument(format!("cannot parse rational {s:?}: {msg}"));
    if s.is_empty() {
        return Err(bad("empty string"));
    }
    if let Some((num, den)) = s.split_once('/') {
        let n = BigInt::from_str(num.trim()).map_err(|e| bad(&e.to_string()))?;
        let d = BigInt::from_str(den.trim()).map_err(|e| bad(&e.to_string()))?;
        if d.is_zero() {
            return Err(bad("zero denominator"));
        }
        return Ok(Rat::new(n, d));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad("malformed decimal"));
        }
        let negative = int_part.trim_start().starts_with('-');
        let int_digits = if int_part.is_empty() || int_part == "-" || int_part == "+" {
            BigInt::zero()
        } else {
            BigInt::from_str(int_part).map_err(|e| bad(&e.to_string()))?
        };
        let frac = BigInt::from_str(frac_part).map_err(|e| bad(&e.to_string()))?;
        let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
        let mut value = Rat::new(int_digits.abs() * &scale + frac, scale);
        if negative {
            value = -value;
        }
        return Ok(value);
    }
    let n = BigInt::from_str(s).map_err(|e| bad(&e.to_string()))?;
    Ok(Rat::from_integer(n))
}

/// A complex number whose real and imaginary parts are [`Scalar`]s.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexScalar {
    pub re: Scalar,
    pub im: Scalar,
}

impl ComplexScalar {
    pub fn new(re: Scalar, im: Scalar) -> Self {
        ComplexScalar { re, im }
    }

    pub fn zero() -> Self {
        ComplexScalar::new(Scalar::zero(), Scalar::zero())
    }

    pub fn one() -> Self {
        ComplexScalar::new(Scalar::one(), Scalar::zero())
    }

    pub fn real(s: Scalar) -> Self {
        ComplexScalar::new(s, Scalar::zero())
    }

    pub fn from_ratios(re: (i64, i64), im: (i64, i64)) -> Self {
        ComplexScalar::new(Scalar::from_ratio(re.0, re.1), Scalar::from_ratio(im.0, im.1))
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_exact(&self) -> bool {
        self.re.is_exact() && self.im.is_exact()
    }

    pub fn to_float_path(&self) -> ComplexScalar {
        ComplexScalar::new(self.re.to_float_path(), self.im.to_float_path())
    }

    pub fn scale(&self, s: &Scalar) -> ComplexScalar {
        ComplexScalar::new(&self.re * s, &self.im * s)
    }

    /// |z|^2, exact on the exact path.
    pub fn modulus_sq(&self) -> Scalar {
        &(&self.re * &self.re) + &(&self.im * &self.im)
    }

    pub fn modulus_f64(&self) -> f64 {
        self.to_complex64().norm()
    }

    /// A certified upper bound on |z| that stays rational on the exact path.
    /// Exact when one component vanishes.
    pub fn modulus_upper(&self) -> Scalar {
        if self.im.is_zero() {
            return self.re.abs();
        }
        if self.re.is_zero() {
            return self.im.abs();
        }
        match self.modulus_sq() {
            Scalar::Exact(sq) => Scalar::Exact(rat_sqrt_upper(&sq)),
            Scalar::Float(sq) => Scalar::Float(sq.sqrt()),
        }
    }

    pub fn to_complex64(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }
}

impl Add<&ComplexScalar> for &ComplexScalar {
    type Output = ComplexScalar;
    fn add(self, rhs: &ComplexScalar) -> ComplexScalar {
        ComplexScalar::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub<&ComplexScalar> for &ComplexScalar {
    type Output = ComplexScalar;
    fn sub(self, rhs: &ComplexScalar) -> ComplexScalar {
        ComplexScalar::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Mul<&ComplexScalar> for &ComplexScalar {
    type Output = ComplexScalar;
    fn mul(self, rhs: &ComplexScalar) -> ComplexScalar {
        let re = &(&self.re * &rhs.re) - &(&self.im * &rhs.im);
        let im = &(&self.re * &rhs.im) + &(&self.im * &rhs.re);
        ComplexScalar::new(re, im)
    }
}

impl Neg for &ComplexScalar {
    type Output = ComplexScalar;
    fn neg(self) -> ComplexScalar {
        ComplexScalar::new(-&self.re, -&self.im)
    }
}

impl Div<&ComplexScalar> for &ComplexScalar {
    type Output = ComplexScalar;
    fn div(self, rhs: &ComplexScalar) -> ComplexScalar {
        let d = rhs.modulus_sq();
        let re = &(&(&self.re * &rhs.re) + &(&self.im * &rhs.im)) / &d;
        let im = &(&(&self.im * &rhs.re) - &(&self.re * &rhs.im)) / &d;
        ComplexScalar::new(re, im)
    }
}

impl fmt::Display for ComplexScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.im.is_negative() {
            write!(f, "{} - {}i", self.re, self.im.abs())
        } else {
            write!(f, "{} + {}i", self.re, self.im)
        }
    }
}
