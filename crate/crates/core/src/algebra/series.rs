//! Graded truncated series.
//!
//! A [`TruncatedSeries`] is a Laurent polynomial known to agree with some
//! formal series on every monomial of total weight `<= order`. Orders are
//! tracked soundly through products even when a factor has negative
//! valuation: if `A = a + O(>NA)` and `B = b + O(>NB)` then `AB` is known up
//! to `min(NA + val(B), NB + val(A))`.

use std::fmt;

use num_traits::{One, Zero};

use super::laurent::{Bindings, LaurentPoly};
use super::rational::Rational;
use super::var::{Monomial, Var, WeightMap};
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TruncatedSeries {
    body: LaurentPoly,
    weights: WeightMap,
    order: i64,
}

impl TruncatedSeries {
    /// Truncates `poly` at `order`.
    pub fn new(poly: &LaurentPoly, weights: WeightMap, order: i64) -> Self {
        TruncatedSeries { body: poly.truncate(&weights, order), weights, order }
    }

    pub fn from_poly(poly: LaurentPoly, weights: WeightMap, order: i64) -> Self {
        if poly.max_weight(&weights).is_none_or(|w| w <= order) {
            TruncatedSeries { body: poly, weights, order }
        } else {
            Self::new(&poly, weights, order)
        }
    }

    pub fn zero(weights: WeightMap, order: i64) -> Self {
        TruncatedSeries { body: LaurentPoly::zero(), weights, order }
    }

    pub fn one(weights: WeightMap, order: i64) -> Self {
        Self::new(&LaurentPoly::one(), weights, order)
    }

    pub fn body(&self) -> &LaurentPoly {
        &self.body
    }

    pub fn into_body(self) -> LaurentPoly {
        self.body
    }

    pub fn weights(&self) -> &WeightMap {
        &self.weights
    }

    pub fn order(&self) -> i64 {
        self.order
    }

    pub fn is_zero(&self) -> bool {
        self.body.is_zero()
    }

    /// Valuation of the known part; a zero body counts as `order + 1`.
    pub fn valuation(&self) -> i64 {
        self.body.valuation(&self.weights).unwrap_or(self.order + 1)
    }

    /// Re-truncates at a lower order (never raises it).
    pub fn truncate_to(&self, order: i64) -> Self {
        if order >= self.order {
            return self.clone();
        }
        TruncatedSeries::new(&self.body, self.weights, order)
    }

    fn check(&self, rhs: &Self) -> Result<()> {
        if self.weights != rhs.weights {
            return Err(Error::WeightMapMismatch);
        }
        Ok(())
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.check(rhs)?;
        let order = self.order.min(rhs.order);
        let body = self.body.truncate(&self.weights, order) + rhs.body.truncate(&self.weights, order);
        Ok(TruncatedSeries { body, weights: self.weights, order })
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.check(rhs)?;
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        TruncatedSeries { body: -&self.body, weights: self.weights, order: self.order }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        TruncatedSeries { body: self.body.scale(c), weights: self.weights, order: self.order }
    }

    /// Multiplies by an exact Laurent polynomial (an infinitely precise factor).
    pub fn mul_poly(&self, p: &LaurentPoly) -> Self {
        let vp = p.valuation(&self.weights).unwrap_or(0);
        let order = self.order + vp;
        let body = self.body.mul_truncated(p, &self.weights, order);
        TruncatedSeries { body, weights: self.weights, order }
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        self.check(rhs)?;
        let order = (self.order + rhs.valuation()).min(rhs.order + self.valuation());
        let body = self.body.mul_truncated(&rhs.body, &self.weights, order);
        Ok(TruncatedSeries { body, weights: self.weights, order })
    }

    /// Graded inverse. The minimal-weight component must be one monomial.
    pub fn invert(&self) -> Result<Self> {
        let v = self.body.valuation(&self.weights).ok_or_else(|| Error::NotInvertible {
            component: "0".into(),
        })?;
        let lead = self.body.component(&self.weights, v);
        let (m, c) = lead.as_monomial().ok_or_else(|| Error::NotInvertible {
            component: lead.to_string(),
        })?;
        // self = c m (1 + u), val(u) >= 1, u known to order - v
        let lead_inv_m = m.inv();
        let lead_inv_c = c.recip();
        let u_order = self.order - v;
        let u = (&self.body.mul_monomial(&lead_inv_m).scale(&lead_inv_c) - &LaurentPoly::one())
            .truncate(&self.weights, u_order);
        let mut acc = LaurentPoly::one();
        if !u.is_zero() {
            let uval = u.valuation(&self.weights).unwrap();
            if uval <= 0 {
                return Err(Error::NotInvertible { component: lead.to_string() });
            }
            let neg_u = -&u;
            let mut power = LaurentPoly::one();
            let steps = u_order / uval;
            for _ in 0..steps {
                power = power.mul_truncated(&neg_u, &self.weights, u_order);
                if power.is_zero() {
                    break;
                }
                acc = acc + power.clone();
            }
        }
        let body = acc.mul_monomial(&lead_inv_m).scale(&lead_inv_c);
        let order = u_order - v;
        Ok(TruncatedSeries::new(&body, self.weights, order))
    }

    pub fn div(&self, rhs: &Self) -> Result<Self> {
        self.mul(&rhs.invert()?)
    }

    pub fn coefficient_of(&self, v: Var, e: i32) -> Self {
        let body = self.body.coefficient_of(v, e);
        if self.weights.get(v) == 0 {
            TruncatedSeries { body, weights: self.weights, order: self.order }
        } else {
            // removing v^e shifts weights by -e w(v)
            let shift = e as i64 * self.weights.get(v);
            TruncatedSeries { body, weights: self.weights, order: self.order - shift }
        }
    }

    /// Substitution with soundness checking.
    ///
    /// Each binding `v -> P` shifts the weight of `v^e` by `e (val(P) - w(v))`
    /// (exactly so when `P` is a monomial). The result keeps this order when
    /// every shift is zero, or positive on variables that only occur with
    /// nonnegative exponents (parameters such as `a`, `b`, `c`). Any binding
    /// that could lower weights of unknown tail monomials is rejected.
    pub fn substitute(&self, bindings: &Bindings) -> Result<Self> {
        for (v, image) in bindings.iter() {
            let wv = self.weights.get(*v);
            let shift = match image.valuation(&self.weights) {
                None => {
                    // v -> 0: fine as long as v never occurs inverted
                    if self.body.min_exp(*v).is_some_and(|e| e < 0) {
                        return Err(Error::PoleHit(format!("{v} -> 0")));
                    }
                    continue;
                }
                Some(vi) => vi - wv,
            };
            if shift == 0 {
                continue;
            }
            if shift > 0 && wv > 0 && self.body.min_exp(*v).is_none_or(|e| e >= 0) {
                continue;
            }
            return Err(Error::WeightOverflow(format!(
                "{v} -> {image} shifts weight by {shift} per power of {v}"
            )));
        }
        let body = self.body.substitute(bindings)?;
        Ok(TruncatedSeries::new(&body, self.weights, self.order))
    }

    /// Exact equality on all monomials up to the common order.
    pub fn agrees_with(&self, rhs: &Self) -> Result<bool> {
        Ok(self.sub(rhs)?.is_zero())
    }

    /// Lowest-weight monomial of the body, for diagnostics.
    pub fn first_monomial(&self) -> Option<(Monomial, Rational)> {
        let v = self.body.valuation(&self.weights)?;
        self.body
            .component(&self.weights, v)
            .terms()
            .next()
            .map(|(m, c)| (*m, c.clone()))
    }

    pub fn constant_term(&self) -> Rational {
        self.body.coeff(&Monomial::ONE)
    }

    pub fn is_one(&self) -> bool {
        self.body.len() == 1 && self.constant_term().is_one()
    }

    pub fn is_constant_zero(&self) -> bool {
        self.constant_term().is_zero() && self.body.is_zero()
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + O(weight > {})", self.body, self.order)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::{int, rat};

    fn q() -> LaurentPoly {
        LaurentPoly::var(Var::Q)
    }

    #[test]
    fn geometric_inverse() {
        let w = WeightMap::standard();
        let s = TruncatedSeries::new(&(LaurentPoly::one() - q()), w, 3);
        let inv = s.invert().unwrap();
        let expected = LaurentPoly::one() + q() + q().pow(2) + q().pow(3);
        assert_eq!(inv.body(), &expected);
        assert_eq!(inv.order(), 3);
    }

    #[test]
    fn two_variable_geometric_inverse() {
        let w = WeightMap::standard();
        let a = LaurentPoly::var(Var::A);
        let b = LaurentPoly::var(Var::B);
        let s = TruncatedSeries::new(&(LaurentPoly::one() - a.clone() - b.clone()), w, 2);
        let ab = &a + &b;
        let expected = LaurentPoly::one() + ab.clone() + ab.pow(2);
        assert_eq!(s.invert().unwrap().body(), &expected);
    }

    #[test]
    fn product_truncates() {
        let w = WeightMap::standard();
        let p = TruncatedSeries::new(&(LaurentPoly::one() + q()), w, 1);
        let m = TruncatedSeries::new(&(LaurentPoly::one() - q()), w, 1);
        let r = p.mul(&m).unwrap();
        assert_eq!(r.body(), &LaurentPoly::one());
        assert_eq!(r.order(), 1);
    }

    #[test]
    fn non_monomial_lead_is_rejected() {
        let w = WeightMap::standard();
        let z = LaurentPoly::var(Var::Z);
        let s = TruncatedSeries::new(&(LaurentPoly::one() - z), w, 4);
        assert!(matches!(s.invert(), Err(Error::NotInvertible { .. })));
    }

    #[test]
    fn monomial_lead_of_negative_weight_inverts() {
        // 1 - z/q has lead -z/q of weight -1
        let w = WeightMap::standard();
        let p = LaurentPoly::one() - LaurentPoly::term(1, &[(Var::Z, 1), (Var::Q, -1)]);
        let s = TruncatedSeries::new(&p, w, 6);
        let inv = s.invert().unwrap();
        let prod = s.mul(&inv).unwrap();
        assert!(prod.order() >= 4);
        assert_eq!(prod.body(), &LaurentPoly::one());
    }

    #[test]
    fn weight_map_mismatch() {
        let a = TruncatedSeries::one(WeightMap::standard(), 2);
        let b = TruncatedSeries::one(WeightMap::q_only(), 2);
        assert_eq!(a.add(&b), Err(Error::WeightMapMismatch));
    }

    #[test]
    fn coefficient_extraction() {
        let w = WeightMap::standard();
        let z = LaurentPoly::var(Var::Z);
        let p = LaurentPoly::one() - &z * &(LaurentPoly::one() + q()) + &z.pow(2) * &q();
        let s = TruncatedSeries::new(&p, w, 5);
        assert_eq!(s.coefficient_of(Var::Z, 2).body(), &q());
        assert!(s.coefficient_of(Var::Z, 7).is_zero());
    }

    #[test]
    fn substitution_soundness() {
        let w = WeightMap::standard();
        let az = LaurentPoly::term(1, &[(Var::A, 1), (Var::Z, 1)]);
        let s = TruncatedSeries::new(&az, w, 4);
        let map = Bindings::new()
            .bind(Var::A, LaurentPoly::term(1, &[(Var::B, 1), (Var::Z, 1)]))
            .bind(Var::B, LaurentPoly::term(1, &[(Var::A, 1), (Var::Z, 1)]))
            .bind(Var::Z, LaurentPoly::term(1, &[(Var::Z, -1)]));
        assert_eq!(s.substitute(&map).unwrap().body(), &LaurentPoly::var(Var::B));

        let s = TruncatedSeries::new(&(LaurentPoly::one() + LaurentPoly::term(1, &[(Var::C, 1), (Var::A, 1)])), w, 3);
        let map = Bindings::new().bind(Var::C, LaurentPoly::zero());
        assert!(s.substitute(&map).unwrap().is_one());

        // z -> z/q lowers the weight of every z^e by e: unsound on a truncated series
        let zq = TruncatedSeries::new(&LaurentPoly::term(1, &[(Var::Z, 1), (Var::Q, 1)]), w, 3);
        let map = Bindings::new().bind(Var::Z, LaurentPoly::term(1, &[(Var::Z, 1), (Var::Q, -1)]));
        assert!(matches!(zq.substitute(&map), Err(Error::WeightOverflow(_))));

        // a -> a q^3 only raises weights
        let s = TruncatedSeries::new(&LaurentPoly::var(Var::A), w, 3).scale(&rat(1, 2));
        let map = Bindings::new().bind(Var::A, LaurentPoly::term(1, &[(Var::A, 1), (Var::Q, 3)]));
        assert!(s.substitute(&map).unwrap().is_zero());
        assert_eq!(s.constant_term(), int(0));
    }
}
