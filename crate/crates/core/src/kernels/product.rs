//! Products of q-shifted factorials and polynomial factors.
//!
//! A [`Product`] is a symbolic description of one summand (or one side) of
//! an identity. The same description is expanded as a graded truncated
//! series or evaluated at a numeric / rational point, so the formal and
//! numeric verification routes share a single transcription of each formula.
//!
//! Graded expansion flattens the product into linear atoms, computes the
//! exact valuation `V` of the whole product (a sum of atom valuations, since
//! leading homogeneous components multiply without cancellation), and only
//! materializes each atom up to weight `N - (V - v_atom)`.


use super::numeric::PochEval;
use crate::algebra::{Bindings, LaurentPoly, TruncatedSeries, Var, WeightMap, NVARS};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PochIndex {
    Finite(i64),
    Infinite,
}

/// One multiplicative factor.
#[derive(Clone, Debug, PartialEq)]
pub enum Factor {
    Poly(LaurentPoly),
    /// `(x; q)_k` for any integer `k`, or `k = infinity`.
    Poch(LaurentPoly, PochIndex),
    /// `1 / (x; q)_k`.
    InvPoch(LaurentPoly, PochIndex),
    /// `p^e`; negative `e` needs a graded-invertible `p`.
    Power(LaurentPoly, i64),
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Product {
    factors: Vec<Factor>,
}

/// A flattened linear atom: `poly` or `1 / poly`.
#[derive(Clone, Debug)]
struct Atom {
    poly: LaurentPoly,
    inverted: bool,
    valuation: i64,
}

impl Product {
    pub fn new() -> Self {
        Product { factors: Vec::new() }
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn with(mut self, f: Factor) -> Self {
        self.factors.push(f);
        self
    }

    pub fn poly(self, p: LaurentPoly) -> Self {
        self.with(Factor::Poly(p))
    }

    pub fn poch(self, x: LaurentPoly, k: i64) -> Self {
        self.with(Factor::Poch(x, PochIndex::Finite(k)))
    }

    pub fn poch_inf(self, x: LaurentPoly) -> Self {
        self.with(Factor::Poch(x, PochIndex::Infinite))
    }

    pub fn inv_poch(self, x: LaurentPoly, k: i64) -> Self {
        self.with(Factor::InvPoch(x, PochIndex::Finite(k)))
    }

    pub fn inv_poch_inf(self, x: LaurentPoly) -> Self {
        self.with(Factor::InvPoch(x, PochIndex::Infinite))
    }

    pub fn power(self, p: LaurentPoly, e: i64) -> Self {
        self.with(Factor::Power(p, e))
    }

    pub fn inverse(self, p: LaurentPoly) -> Self {
        self.with(Factor::Power(p, -1))
    }

    pub fn times(mut self, other: Product) -> Self {
        self.factors.extend(other.factors);
        self
    }

    /// Applies `bindings` to every factor argument (exact, on Laurent polynomials).
    pub fn substitute(&self, bindings: &Bindings) -> Result<Product> {
        let factors = self
            .factors
            .iter()
            .map(|f| {
                Ok(match f {
                    Factor::Poly(p) => Factor::Poly(p.substitute(bindings)?),
                    Factor::Poch(x, k) => Factor::Poch(x.substitute(bindings)?, *k),
                    Factor::InvPoch(x, k) => Factor::InvPoch(x.substitute(bindings)?, *k),
                    Factor::Power(p, e) => Factor::Power(p.substitute(bindings)?, *e),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Product { factors })
    }

    /// Exact valuation under `w`; `None` if some factor vanishes identically.
    pub fn valuation(&self, w: &WeightMap) -> Result<Option<i64>> {
        let mut total = 0;
        for atom in self.atoms(w, None)? {
            if atom.poly.is_zero() {
                return Ok(None);
            }
            total += atom.valuation;
        }
        Ok(Some(total))
    }

    fn atoms(&self, w: &WeightMap, limit: Option<i64>) -> Result<Vec<Atom>> {
        let mut atoms = Vec::new();
        let mut infinite = Vec::new();
        for f in &self.factors {
            match f {
                Factor::Poly(p) => atoms.push(atom(p.clone(), false, w)?),
                Factor::Power(p, e) => {
                    if *e >= 0 {
                        if let Some((m, c)) = p.as_monomial() {
                            atoms.push(atom(LaurentPoly::monomial(m.pow(*e as i32), num_traits::pow(c, *e as usize)), false, w)?);
                        } else {
                            for _ in 0..*e {
                                atoms.push(atom(p.clone(), false, w)?);
                            }
                        }
                    } else {
                        for _ in 0..(-e) {
                            atoms.push(atom(p.clone(), true, w)?);
                        }
                    }
                }
                Factor::Poch(x, PochIndex::Finite(k)) => finite_atoms(x, *k, false, w, &mut atoms)?,
                Factor::InvPoch(x, PochIndex::Finite(k)) => finite_atoms(x, *k, true, w, &mut atoms)?,
                Factor::Poch(x, PochIndex::Infinite) => infinite.push((x.clone(), false)),
                Factor::InvPoch(x, PochIndex::Infinite) => infinite.push((x.clone(), true)),
            }
        }
        if infinite.is_empty() {
            return Ok(atoms);
        }
        let wq = w.get(Var::Q);
        if wq == 0 {
            return Err(Error::InvalidArgument("infinite product needs w(q) > 0".into()));
        }
        // Atoms of an infinite product with v(x q^j) <= 0 carry all of its valuation.
        let mut tails = Vec::new();
        for (x, inv) in &infinite {
            let vx = match x.valuation(w) {
                Some(v) => v,
                None => continue,
            };
            let mut j = 0;
            while vx + j * wq <= 0 {
                atoms.push(atom(one_minus(x, j), *inv, w)?);
                j += 1;
            }
            tails.push((x.clone(), *inv, vx, j));
        }
        let limit = match limit {
            Some(l) => l,
            None => return Ok(atoms),
        };
        let total: i64 = atoms.iter().map(|a| a.valuation).sum();
        let budget = limit - total;
        for (x, inv, vx, mut j) in tails {
            while vx + j * wq <= budget {
                atoms.push(atom(one_minus(&x, j), inv, w)?);
                j += 1;
            }
        }
        Ok(atoms)
    }

    /// Graded expansion, exact on every monomial of weight `<= order`.
    pub fn expand(&self, w: &WeightMap, order: i64) -> Result<TruncatedSeries> {
        let mut atoms = self.atoms(w, Some(order))?;
        if atoms.iter().any(|a| a.poly.is_zero()) {
            return Ok(TruncatedSeries::zero(*w, order));
        }
        // monomials first, then by size, keeps intermediate products small
        atoms.sort_by_key(|a| (a.poly.len() != 1, a.inverted, a.poly.len()));
        let total: i64 = atoms.iter().map(|a| a.valuation).sum();
        if total > order {
            return Ok(TruncatedSeries::zero(*w, order));
        }
        let mut remaining = total;
        let mut acc = LaurentPoly::one();
        let mut acc_val = 0i64;
        for a in &atoms {
            remaining -= a.valuation;
            let limit = order - remaining;
            let own_limit = limit - acc_val;
            let piece = if a.inverted {
                TruncatedSeries::new(&a.poly, *w, own_limit + 2 * (-a.valuation))
                    .invert()?
                    .into_body()
                    .truncate(w, own_limit)
            } else {
                a.poly.truncate(w, own_limit)
            };
            acc = acc.mul_truncated(&piece, w, limit);
            acc_val += a.valuation;
        }
        Ok(TruncatedSeries::new(&acc, *w, order))
    }

    /// Exact value as a Laurent polynomial when the product is finite and
    /// free of inverses (or all inverses are of monomials).
    pub fn exact(&self) -> Result<LaurentPoly> {
        let mut acc = LaurentPoly::one();
        for f in &self.factors {
            let p = match f {
                Factor::Poly(p) => p.clone(),
                Factor::Power(p, e) => p.powi(*e)?,
                Factor::Poch(x, PochIndex::Finite(k)) => finite_exact(x, *k)?,
                Factor::InvPoch(x, PochIndex::Finite(k)) => finite_exact_inverse(x, *k)?,
                Factor::Poch(_, PochIndex::Infinite) | Factor::InvPoch(_, PochIndex::Infinite) => {
                    return Err(Error::InvalidArgument("infinite product has no exact polynomial value".into()))
                }
            };
            acc = &acc * &p;
        }
        Ok(acc)
    }

    /// Numeric (or exact rational) evaluation at `point`.
    pub fn eval<F: PochEval>(&self, point: &[F; NVARS]) -> Result<F> {
        let q = &point[Var::Q.index()];
        let mut acc = q.one_like();
        for f in &self.factors {
            let v = match f {
                Factor::Poly(p) => eval_poly(p, point)?,
                Factor::Power(p, e) => {
                    let base = eval_poly(p, point)?;
                    base.powi(*e).ok_or_else(|| Error::PoleHit(format!("({p})^{e}")))?
                }
                Factor::Poch(x, PochIndex::Finite(k)) => {
                    F::poch_finite(&eval_poly(x, point)?, q, *k)?
                }
                Factor::Poch(x, PochIndex::Infinite) => F::poch_infinite(&eval_poly(x, point)?, q)?,
                Factor::InvPoch(x, idx) => {
                    let v = match idx {
                        PochIndex::Finite(k) => F::poch_finite(&eval_poly(x, point)?, q, *k)?,
                        PochIndex::Infinite => F::poch_infinite(&eval_poly(x, point)?, q)?,
                    };
                    q.one_like().div(&v).ok_or_else(|| Error::PoleHit(format!("1/({x})_{idx:?}")))?
                }
            };
            acc = acc.mul(&v);
        }
        Ok(acc)
    }
}

fn finite_product(x: &LaurentPoly, js: impl Iterator<Item = i64>) -> LaurentPoly {
    js.fold(LaurentPoly::one(), |p, j| &p * &one_minus(x, j))
}

fn finite_exact(x: &LaurentPoly, k: i64) -> Result<LaurentPoly> {
    if k >= 0 {
        Ok(finite_product(x, 0..k))
    } else {
        finite_product(x, (1..=-k).map(|j| -j)).powi(-1)
    }
}

fn finite_exact_inverse(x: &LaurentPoly, k: i64) -> Result<LaurentPoly> {
    if k >= 0 {
        finite_product(x, 0..k).powi(-1)
    } else {
        Ok(finite_product(x, (1..=-k).map(|j| -j)))
    }
}

/// Atoms of `(x; q)_k` (or its inverse) for finite `k`.
fn finite_atoms(x: &LaurentPoly, k: i64, inverse: bool, w: &WeightMap, out: &mut Vec<Atom>) -> Result<()> {
    if k >= 0 {
        for j in 0..k {
            out.push(atom(one_minus(x, j), inverse, w)?);
        }
    } else {
        for j in 1..=(-k) {
            out.push(atom(one_minus(x, -j), !inverse, w)?);
        }
    }
    Ok(())
}

fn eval_poly<F: PochEval>(p: &LaurentPoly, point: &[F; NVARS]) -> Result<F> {
    p.eval(point).ok_or_else(|| Error::PoleHit(format!("evaluating {p}")))
}

/// `1 - x q^j`.
pub fn one_minus(x: &LaurentPoly, j: i64) -> LaurentPoly {
    LaurentPoly::one() - x.mul_monomial(&crate::algebra::Monomial::var(Var::Q, j as i32))
}

fn atom(poly: LaurentPoly, inverted: bool, w: &WeightMap) -> Result<Atom> {
    let v = match poly.valuation(w) {
        Some(v) => v,
        None => {
            if inverted {
                return Err(Error::PoleHit("inverse of zero factor".into()));
            }
            return Ok(Atom { poly, inverted, valuation: 0 });
        }
    };
    if inverted {
        let lead = poly.component(w, v);
        if lead.as_monomial().is_none() {
            return Err(Error::NotInvertible { component: lead.to_string() });
        }
    }
    Ok(Atom { poly, inverted, valuation: if inverted { -v } else { v } })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Monomial;

    #[test]
    fn valuation_of_shifted_infinite_product() {
        // (a q^{1-k} + b q)_inf q^{C(k,2)}: valuation k - 1 for k >= 1
        let w = WeightMap::standard();
        for k in 1..8i64 {
            let x = LaurentPoly::term(1, &[(Var::A, 1), (Var::Q, (1 - k) as i32)])
                + LaurentPoly::term(1, &[(Var::B, 1), (Var::Q, 1)]);
            let p = Product::new().poch_inf(x).poly(LaurentPoly::q_pow(k * (k - 1) / 2));
            assert_eq!(p.valuation(&w).unwrap(), Some(k - 1));
        }
    }

    #[test]
    fn expansion_matches_exact_product() {
        let w = WeightMap::standard();
        let x = LaurentPoly::term(1, &[(Var::A, 1), (Var::Q, -3)]) + LaurentPoly::var(Var::B);
        let p = Product::new().poch(x.clone(), 4).poly(LaurentPoly::q_pow(6));
        let exact = p.exact().unwrap();
        for order in 0..10 {
            let s = p.expand(&w, order).unwrap();
            assert_eq!(s.body(), &exact.truncate(&w, order), "order {order}");
        }
    }

    #[test]
    fn zero_factor_annihilates() {
        let w = WeightMap::standard();
        let p = Product::new().poch(LaurentPoly::q_pow(-2), 3);
        assert!(p.expand(&w, 5).unwrap().is_zero());
        assert_eq!(p.valuation(&w).unwrap(), None);
        let _ = Monomial::ONE;
    }
}
