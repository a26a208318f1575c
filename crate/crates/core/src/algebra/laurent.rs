//! Sparse multivariate Laurent polynomials over exact rationals.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use super::field::Field;
use super::rational::{self, Rational};
use super::var::{Monomial, Var, WeightMap, NVARS};
use crate::error::{Error, Result};

/// A finite sum of rational multiples of Laurent monomials.
///
/// Invariant: no stored coefficient is zero. Absent variables have
/// exponent zero, so the representation is canonical.
#[derive(Clone, PartialEq, Eq, Default, Hash)]
pub struct LaurentPoly {
    terms: BTreeMap<Monomial, Rational>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial(Monomial::ONE, c)
    }

    pub fn int(n: i64) -> Self {
        Self::constant(rational::int(n))
    }

    pub fn monomial(m: Monomial, c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        LaurentPoly { terms }
    }

    pub fn var(v: Var) -> Self {
        Self::monomial(Monomial::var(v, 1), Rational::one())
    }

    /// `coeff * prod v^e`.
    pub fn term(coeff: i64, pairs: &[(Var, i32)]) -> Self {
        Self::monomial(Monomial::from_pairs(pairs), rational::int(coeff))
    }

    /// `q^e`.
    pub fn q_pow(e: i64) -> Self {
        Self::term(1, &[(Var::Q, e as i32)])
    }

    pub fn from_terms(iter: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut p = LaurentPoly::zero();
        for (m, c) in iter {
            p.add_term(m, c);
        }
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// The value if this is a constant polynomial (including zero).
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&Monomial::ONE).cloned(),
            _ => None,
        }
    }

    /// The single term if this polynomial is a monomial.
    pub fn as_monomial(&self) -> Option<(Monomial, Rational)> {
        if self.terms.len() == 1 {
            self.terms.iter().next().map(|(m, c)| (*m, c.clone()))
        } else {
            None
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        LaurentPoly { terms: self.terms.iter().map(|(m, v)| (*m, v * c)).collect() }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Self {
        LaurentPoly { terms: self.terms.iter().map(|(k, v)| (k.mul(m), v.clone())).collect() }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = LaurentPoly::one();
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Integer power; negative exponents need a monomial base.
    pub fn powi(&self, k: i64) -> Result<Self> {
        if k >= 0 {
            return Ok(self.pow(k as u32));
        }
        let (m, c) = self.as_monomial().ok_or_else(|| Error::NotInvertible {
            component: self.to_string(),
        })?;
        let inv = LaurentPoly::monomial(m.inv(), c.recip());
        Ok(inv.pow((-k) as u32))
    }

    pub fn min_exp(&self, v: Var) -> Option<i32> {
        self.terms.keys().map(|m| m.exp(v)).min()
    }

    pub fn max_exp(&self, v: Var) -> Option<i32> {
        self.terms.keys().map(|m| m.exp(v)).max()
    }

    /// Coefficient of `v^e`, as a polynomial with `v` removed.
    pub fn coefficient_of(&self, v: Var, e: i32) -> Self {
        LaurentPoly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.exp(v) == e)
                .map(|(m, c)| (m.with_exp(v, 0), c.clone()))
                .collect(),
        }
    }

    /// Minimal total weight of a stored monomial; `None` for zero.
    pub fn valuation(&self, w: &WeightMap) -> Option<i64> {
        self.terms.keys().map(|m| w.weight(m)).min()
    }

    pub fn max_weight(&self, w: &WeightMap) -> Option<i64> {
        self.terms.keys().map(|m| w.weight(m)).max()
    }

    /// Homogeneous component of the given weight.
    pub fn component(&self, w: &WeightMap, weight: i64) -> Self {
        LaurentPoly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| w.weight(m) == weight)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    /// Drops every monomial of weight above `limit`.
    pub fn truncate(&self, w: &WeightMap, limit: i64) -> Self {
        LaurentPoly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| w.weight(m) <= limit)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    /// Product restricted to monomials of weight at most `limit`.
    pub fn mul_truncated(&self, other: &Self, w: &WeightMap, limit: i64) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let (small, large) = if self.len() <= other.len() { (self, other) } else { (other, self) };
        let mut rhs: Vec<(i64, &Monomial, &Rational)> =
            large.terms.iter().map(|(m, c)| (w.weight(m), m, c)).collect();
        rhs.sort_by_key(|t| t.0);
        let mut acc: HashMap<Monomial, Rational> = HashMap::with_capacity(rhs.len() * 2);
        for (m1, c1) in &small.terms {
            let w1 = w.weight(m1);
            for &(w2, m2, c2) in &rhs {
                if w1 + w2 > limit {
                    break;
                }
                let c = c1 * c2;
                match acc.entry(m1.mul(m2)) {
                    std::collections::hash_map::Entry::Vacant(e) => {
                        e.insert(c);
                    }
                    std::collections::hash_map::Entry::Occupied(mut e) => {
                        *e.get_mut() += c;
                    }
                }
            }
        }
        LaurentPoly { terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect() }
    }

    /// Simultaneous substitution `v -> image` for every binding.
    ///
    /// A variable occurring with a negative exponent must map to a monomial.
    pub fn substitute(&self, bindings: &Bindings) -> Result<Self> {
        let mut cache: HashMap<(usize, i32), LaurentPoly> = HashMap::new();
        let mut out = LaurentPoly::zero();
        for (m, c) in &self.terms {
            let mut kept = *m;
            let mut factor = LaurentPoly::constant(c.clone());
            for (v, image) in bindings.iter() {
                let e = m.exp(*v);
                if e == 0 {
                    continue;
                }
                kept.0[v.index()] = 0;
                let power = match cache.get(&(v.index(), e)) {
                    Some(p) => p.clone(),
                    None => {
                        if image.is_zero() && e < 0 {
                            return Err(Error::PoleHit(format!("{v} -> 0 in {m}")));
                        }
                        let p = image.powi(e as i64)?;
                        cache.insert((v.index(), e), p.clone());
                        p
                    }
                };
                factor = &factor * &power;
            }
            out = out + factor.mul_monomial(&kept);
        }
        Ok(out)
    }

    /// Evaluates at a point given by one value per variable index.
    /// `None` when a negative power of zero is required.
    pub fn eval<F: Field>(&self, point: &[F; NVARS]) -> Option<F> {
        let proto = &point[0];
        let mut acc = proto.zero_like();
        let mut cache: HashMap<(usize, i32), F> = HashMap::new();
        for (m, c) in &self.terms {
            let mut t = proto.from_rational_like(c);
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let p = match cache.get(&(i, e)) {
                    Some(p) => p.clone(),
                    None => {
                        let p = point[i].powi(e as i64)?;
                        cache.insert((i, e), p.clone());
                        p
                    }
                };
                t = t.mul(&p);
            }
            acc = acc.add(&t);
        }
        Some(acc)
    }

    /// Total degree bound used for diagnostics.
    pub fn leading(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }
}

/// An ordered list of simultaneous substitutions.
#[derive(Clone, Debug, Default)]
pub struct Bindings(Vec<(Var, LaurentPoly)>);

impl Bindings {
    pub fn new() -> Self {
        Bindings(Vec::new())
    }

    pub fn bind(mut self, v: Var, image: LaurentPoly) -> Self {
        self.0.retain(|(w, _)| *w != v);
        self.0.push((v, image));
        self
    }

    pub fn iter(&self) -> impl Iterator<Item = &(Var, LaurentPoly)> {
        self.0.iter()
    }

    pub fn get(&self, v: Var) -> Option<&LaurentPoly> {
        self.0.iter().find(|(w, _)| *w == v).map(|(_, p)| p)
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            if m.is_one() {
                f.write_str(&rational::to_string(&abs))?;
            } else if abs.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{}*{m}", rational::to_string(&abs))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly({self})")
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, c.clone());
        }
        out
    }
}

impl Add for LaurentPoly {
    type Output = LaurentPoly;
    fn add(mut self, rhs: LaurentPoly) -> LaurentPoly {
        if self.len() < rhs.len() {
            return rhs + self;
        }
        for (m, c) in rhs.terms {
            self.add_term(m, c);
        }
        self
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, -c.clone());
        }
        out
    }
}

impl Sub for LaurentPoly {
    type Output = LaurentPoly;
    fn sub(mut self, rhs: LaurentPoly) -> LaurentPoly {
        for (m, c) in rhs.terms {
            self.add_term(m, -c);
        }
        self
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly { terms: self.terms.iter().map(|(m, c)| (*m, -c.clone())).collect() }
    }
}

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        -&self
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        if self.is_zero() || rhs.is_zero() {
            return LaurentPoly::zero();
        }
        let mut acc: HashMap<Monomial, Rational> = HashMap::with_capacity(self.len() * rhs.len());
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                *acc.entry(m1.mul(m2)).or_insert_with(Rational::zero) += c1 * c2;
            }
        }
        LaurentPoly { terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect() }
    }
}

impl Mul for LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: LaurentPoly) -> LaurentPoly {
        &self * &rhs
    }
}
