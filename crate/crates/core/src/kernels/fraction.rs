//! Exact sums of products with non-monomial denominators.
//!
//! A [`Fraction`] keeps its denominator as a multiset of irreducible-looking
//! factors (the linear atoms `1 - x q^j` of the products it came from). Sums
//! use the factorwise maximum multiplicity as common denominator, so no
//! polynomial division is ever needed; an identity holds iff the numerator
//! of the difference is identically zero.

use std::collections::HashMap;

use super::product::{one_minus, Factor, PochIndex, Product};
use crate::algebra::LaurentPoly;
use crate::error::{Error, Result};

#[derive(Clone, Debug, Default)]
pub struct Fraction {
    pub num: LaurentPoly,
    pub den: HashMap<LaurentPoly, usize>,
}

impl Fraction {
    pub fn zero() -> Self {
        Fraction { num: LaurentPoly::zero(), den: HashMap::new() }
    }

    pub fn poly(p: LaurentPoly) -> Self {
        Fraction { num: p, den: HashMap::new() }
    }

    pub fn den_factors(&self) -> usize {
        self.den.values().sum()
    }

    fn push_den(&mut self, f: LaurentPoly) -> Result<()> {
        if f.is_zero() {
            return Err(Error::PoleHit("zero denominator factor".into()));
        }
        if f.as_monomial().is_some() {
            self.num = &self.num * &f.powi(-1)?;
        } else {
            *self.den.entry(f).or_insert(0) += 1;
        }
        Ok(())
    }

    /// Exact fraction of a finite product.
    pub fn of(p: &Product) -> Result<Self> {
        let mut out = Fraction::poly(LaurentPoly::one());
        let mut num = LaurentPoly::one();
        for f in p.factors() {
            match f {
                Factor::Poly(x) => num = &num * x,
                Factor::Power(x, e) if *e >= 0 => num = &num * &x.pow(*e as u32),
                Factor::Power(x, e) => {
                    for _ in 0..(-e) {
                        out.push_den(x.clone())?;
                    }
                }
                Factor::Poch(x, PochIndex::Finite(k)) | Factor::InvPoch(x, PochIndex::Finite(k)) => {
                    let inverse = matches!(f, Factor::InvPoch(..));
                    let (js, in_den): (Vec<i64>, bool) =
                        if *k >= 0 { ((0..*k).collect(), inverse) } else { ((1..=-k).map(|j| -j).collect(), !inverse) };
                    for j in js {
                        let a = one_minus(x, j);
                        if in_den {
                            out.push_den(a)?;
                        } else {
                            num = &num * &a;
                        }
                    }
                }
                Factor::Poch(_, PochIndex::Infinite) | Factor::InvPoch(_, PochIndex::Infinite) => {
                    return Err(Error::InvalidArgument("infinite product in an exact fraction".into()))
                }
            }
        }
        out.num = &out.num * &num;
        Ok(out)
    }

    /// `self * prod (f^m)` for the factors of `target` missing from `self`.
    fn lift(&self, target: &HashMap<LaurentPoly, usize>) -> LaurentPoly {
        let mut num = self.num.clone();
        for (f, &m) in target {
            let have = self.den.get(f).copied().unwrap_or(0);
            if m > have {
                num = &num * &f.pow((m - have) as u32);
            }
        }
        num
    }

    /// The denominator multiplied out.
    pub fn den_product(&self) -> LaurentPoly {
        self.den.iter().fold(LaurentPoly::one(), |acc, (f, &m)| &acc * &f.pow(m as u32))
    }

    pub fn add(&self, rhs: &Fraction) -> Fraction {
        if rhs.num.is_zero() {
            return self.clone();
        }
        if self.num.is_zero() {
            return rhs.clone();
        }
        let mut den = self.den.clone();
        for (f, &m) in &rhs.den {
            let e = den.entry(f.clone()).or_insert(0);
            *e = (*e).max(m);
        }
        let num = self.lift(&den) + rhs.lift(&den);
        Fraction { num, den }
    }

    pub fn neg(&self) -> Fraction {
        Fraction { num: -&self.num, den: self.den.clone() }
    }

    pub fn sub(&self, rhs: &Fraction) -> Fraction {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &Fraction) -> Fraction {
        let mut den = self.den.clone();
        for (f, &m) in &rhs.den {
            *den.entry(f.clone()).or_insert(0) += m;
        }
        Fraction { num: &self.num * &rhs.num, den }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Var;

    #[test]
    fn telescoping_sum_is_exact() {
        // 1/(1-a) - a/(1-a) = 1
        let a = LaurentPoly::var(Var::A);
        let one_minus_a = LaurentPoly::one() - a.clone();
        let f1 = Fraction::of(&Product::new().inverse(one_minus_a.clone())).unwrap();
        let f2 = Fraction::of(&Product::new().poly(a).inverse(one_minus_a)).unwrap();
        let d = f1.sub(&f2).sub(&Fraction::poly(LaurentPoly::one()));
        assert!(d.is_zero());
    }

    #[test]
    fn gaussian_binomial_from_fractions() {
        let q = LaurentPoly::var(Var::Q);
        let p = Product::new().poch(q.clone(), 5).inv_poch(q.clone(), 2).inv_poch(q, 3);
        let f = Fraction::of(&p).unwrap();
        let d = f.sub(&Fraction::poly(crate::kernels::q_binom(5, 2)));
        assert!(d.is_zero());
    }
}
