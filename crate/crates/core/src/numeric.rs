//! Fixed-precision complex arithmetic for the numeric verification path.
//!
//! `ComplexHP` wraps an MPFR/MPC complex at a declared precision. Operands
//! must share a precision; mixing them is a programming error.

use std::fmt;

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Complex, Float};

use crate::algebra::{Field, Rational};
use crate::error::{Error, Result};

pub const MIN_PRECISION: u32 = 64;

#[derive(Clone, PartialEq)]
pub struct ComplexHP {
    value: Complex,
}

impl ComplexHP {
    pub fn new(prec: u32, re: f64, im: f64) -> Self {
        assert!(prec >= MIN_PRECISION, "precision {prec} below {MIN_PRECISION} bits");
        ComplexHP { value: Complex::with_val(prec, (re, im)) }
    }

    pub fn real(prec: u32, re: f64) -> Self {
        Self::new(prec, re, 0.0)
    }

    pub fn zero(prec: u32) -> Self {
        Self::new(prec, 0.0, 0.0)
    }

    pub fn one(prec: u32) -> Self {
        Self::new(prec, 1.0, 0.0)
    }

    pub fn from_rational(prec: u32, r: &Rational) -> Self {
        let re = Float::with_val(prec, rug::Rational::from((
            rug::Integer::from_str_radix(&r.numer().to_str_radix(16), 16).unwrap(),
            rug::Integer::from_str_radix(&r.denom().to_str_radix(16), 16).unwrap(),
        )));
        ComplexHP { value: Complex::with_val(prec, (re, 0)) }
    }

    pub fn from_complex(value: Complex) -> Self {
        ComplexHP { value }
    }

    /// Parses a decimal string such as `"0.1"` at full precision.
    pub fn parse_real(prec: u32, s: &str) -> Result<Self> {
        let parsed = Float::parse(s.trim())
            .map_err(|e| Error::InvalidArgument(format!("bad number {s:?}: {e}")))?;
        let re = Float::with_val(prec, parsed);
        Ok(ComplexHP { value: Complex::with_val(prec, (re, 0)) })
    }

    /// `e^{i theta}` with `theta = frac * pi`.
    pub fn unit_pi_fraction(prec: u32, frac: &Rational) -> Self {
        let pi = Float::with_val(prec, Constant::Pi);
        let f = ComplexHP::from_rational(prec, frac);
        let theta = Float::with_val(prec, f.value.real() * &pi);
        let (s, c) = theta.sin_cos(Float::new(prec));
        ComplexHP { value: Complex::with_val(prec, (c, s)) }
    }

    pub fn prec(&self) -> u32 {
        self.value.prec().0
    }

    pub fn inner(&self) -> &Complex {
        &self.value
    }

    pub fn re_f64(&self) -> f64 {
        self.value.real().to_f64()
    }

    pub fn im_f64(&self) -> f64 {
        self.value.imag().to_f64()
    }

    pub fn abs(&self) -> Float {
        Float::with_val(self.prec(), self.value.abs_ref())
    }

    pub fn abs_f64(&self) -> f64 {
        self.abs().to_f64()
    }

    pub fn is_finite(&self) -> bool {
        self.value.real().is_finite() && self.value.imag().is_finite()
    }

    fn same_prec(&self, rhs: &Self) {
        assert_eq!(self.prec(), rhs.prec(), "mixed-precision complex arithmetic");
    }

    pub fn add(&self, rhs: &Self) -> Self {
        self.same_prec(rhs);
        ComplexHP { value: Complex::with_val(self.prec(), &self.value + &rhs.value) }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.same_prec(rhs);
        ComplexHP { value: Complex::with_val(self.prec(), &self.value - &rhs.value) }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        self.same_prec(rhs);
        ComplexHP { value: Complex::with_val(self.prec(), &self.value * &rhs.value) }
    }

    pub fn div(&self, rhs: &Self) -> Option<Self> {
        self.same_prec(rhs);
        if rhs.value.is_zero() {
            return None;
        }
        Some(ComplexHP { value: Complex::with_val(self.prec(), &self.value / &rhs.value) })
    }

    pub fn neg(&self) -> Self {
        ComplexHP { value: Complex::with_val(self.prec(), -&self.value) }
    }

    pub fn scale_f64(&self, s: f64) -> Self {
        ComplexHP { value: Complex::with_val(self.prec(), &self.value * s) }
    }

    pub fn exp(&self) -> Self {
        ComplexHP { value: Complex::with_val(self.prec(), self.value.exp_ref()) }
    }

    pub fn ln(&self) -> Self {
        ComplexHP { value: Complex::with_val(self.prec(), self.value.ln_ref()) }
    }

    /// Principal power `self^exponent`.
    pub fn pow(&self, exponent: &ComplexHP) -> Self {
        self.same_prec(exponent);
        ComplexHP { value: Complex::with_val(self.prec(), (&self.value).pow(&exponent.value)) }
    }

    pub fn powi(&self, k: i64) -> Option<Self> {
        Field::powi(self, k)
    }

    /// Rounds to another precision.
    pub fn with_prec(&self, prec: u32) -> Self {
        ComplexHP { value: Complex::with_val(prec, &self.value) }
    }

    /// `|self - rhs| / max(|rhs|, tiny)`.
    pub fn relative_error(&self, reference: &Self) -> f64 {
        let diff = self.sub(reference).abs();
        let denom = reference.abs();
        if denom.is_zero() {
            diff.to_f64()
        } else {
            Float::with_val(self.prec(), &diff / &denom).to_f64()
        }
    }
}

impl Field for ComplexHP {
    fn zero_like(&self) -> Self {
        ComplexHP::zero(self.prec())
    }
    fn one_like(&self) -> Self {
        ComplexHP::one(self.prec())
    }
    fn from_rational_like(&self, r: &Rational) -> Self {
        ComplexHP::from_rational(self.prec(), r)
    }
    fn add(&self, rhs: &Self) -> Self {
        ComplexHP::add(self, rhs)
    }
    fn sub(&self, rhs: &Self) -> Self {
        ComplexHP::sub(self, rhs)
    }
    fn mul(&self, rhs: &Self) -> Self {
        ComplexHP::mul(self, rhs)
    }
    fn div(&self, rhs: &Self) -> Option<Self> {
        ComplexHP::div(self, rhs)
    }
    fn is_zero_value(&self) -> bool {
        self.value.is_zero()
    }
}

impl fmt::Debug for ComplexHP {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexHP({:.6e}, {:.6e}; {} bits)", self.re_f64(), self.im_f64(), self.prec())
    }
}

impl fmt::Display for ComplexHP {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im_f64() == 0.0 {
            write!(f, "{:.12e}", self.re_f64())
        } else {
            write!(f, "{:.12e}{:+.12e}i", self.re_f64(), self.im_f64())
        }
    }
}

/// Formats a nonnegative magnitude the way reports expect, e.g. `3.2e-21`.
pub fn format_magnitude(x: f64) -> String {
    if x == 0.0 {
        "0".into()
    } else {
        format!("{x:.1e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::rat;

    #[test]
    fn rational_conversion_is_exact_enough() {
        let x = ComplexHP::from_rational(256, &rat(1, 3));
        let three = ComplexHP::real(256, 3.0);
        let err = x.mul(&three).relative_error(&ComplexHP::one(256));
        assert!(err < 1e-70, "{err}");
    }

    #[test]
    fn unit_circle() {
        let w = ComplexHP::unit_pi_fraction(128, &rat(1, 3));
        assert!((w.abs_f64() - 1.0).abs() < 1e-30);
        assert!((w.re_f64() - 0.5).abs() < 1e-15);
    }

    #[test]
    #[should_panic(expected = "mixed-precision")]
    fn mixed_precision_panics() {
        let _ = ComplexHP::one(64).add(&ComplexHP::one(128));
    }

    #[test]
    fn magnitude_format() {
        assert_eq!(format_magnitude(3.24e-21), "3.2e-21");
        assert_eq!(format_magnitude(0.0), "0");
    }
}
