use num_traits::{One, Zero};

use super::rational::Rational;

/// Scalars a polynomial can be evaluated in: exact rationals or
/// high-precision complex numbers.
pub trait Field: Clone {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn from_rational_like(&self, r: &Rational) -> Self;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    /// `None` when `rhs` is zero.
    fn div(&self, rhs: &Self) -> Option<Self>;
    fn is_zero_value(&self) -> bool;

    fn neg(&self) -> Self {
        self.zero_like().sub(self)
    }

    fn powi(&self, k: i64) -> Option<Self> {
        let mut base = if k < 0 { self.one_like().div(self)? } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = self.one_like();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        Some(acc)
    }
}

impl Field for Rational {
    fn zero_like(&self) -> Self {
        Rational::zero()
    }
    fn one_like(&self) -> Self {
        Rational::one()
    }
    fn from_rational_like(&self, r: &Rational) -> Self {
        r.clone()
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn div(&self, rhs: &Self) -> Option<Self> {
        (!rhs.is_zero()).then(|| self / rhs)
    }
    fn is_zero_value(&self) -> bool {
        Zero::is_zero(self)
    }
}
