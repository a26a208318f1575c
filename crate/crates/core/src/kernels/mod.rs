//! q-shifted factorials, q-binomial coefficients, the q-exponential
//! expansion, and partial sums of basic hypergeometric series.

pub mod fraction;
pub mod numeric;
pub mod product;

use std::sync::{Mutex, OnceLock};

use crate::algebra::{LaurentPoly, Monomial, TruncatedSeries, Var, WeightMap, NVARS};
use crate::error::{Error, Result};

pub use fraction::Fraction;
pub use numeric::PochEval;
pub use product::{one_minus, Factor, PochIndex, Product};

/// Argument `x` of `(x; q)_k`; any Laurent polynomial, e.g. `a q^{1-k} + b q`.
pub type QFactorArg = LaurentPoly;

/// `(x; q)_k` as a truncated series.
pub fn poch(x: &QFactorArg, k: PochIndex, w: &WeightMap, order: i64) -> Result<TruncatedSeries> {
    Product::new().with(Factor::Poch(x.clone(), k)).expand(w, order)
}

/// `(x_1, ..., x_m; q)_k`.
pub fn poch_multi(args: &[QFactorArg], k: PochIndex, w: &WeightMap, order: i64) -> Result<TruncatedSeries> {
    args.iter()
        .fold(Product::new(), |p, x| p.with(Factor::Poch(x.clone(), k)))
        .expand(w, order)
}

fn q_binom_rows() -> &'static Mutex<Vec<Vec<LaurentPoly>>> {
    static ROWS: OnceLock<Mutex<Vec<Vec<LaurentPoly>>>> = OnceLock::new();
    ROWS.get_or_init(|| Mutex::new(vec![vec![LaurentPoly::one()]]))
}

/// Gaussian binomial coefficient `[n, k]_q`; zero outside `0 <= k <= n`.
pub fn q_binom(n: u32, k: i64) -> LaurentPoly {
    if k < 0 || k > n as i64 {
        return LaurentPoly::zero();
    }
    let mut rows = q_binom_rows().lock().unwrap_or_else(|e| e.into_inner());
    while rows.len() <= n as usize {
        let prev = rows.last().unwrap();
        let m = prev.len();
        let mut row = Vec::with_capacity(m + 1);
        for j in 0..=m {
            // [m, j] = [m-1, j-1] + q^j [m-1, j]
            let left = if j > 0 { prev[j - 1].clone() } else { LaurentPoly::zero() };
            let right = if j < m {
                prev[j].mul_monomial(&Monomial::var(Var::Q, j as i32))
            } else {
                LaurentPoly::zero()
            };
            row.push(left + right);
        }
        rows.push(row);
    }
    rows[n as usize][k as usize].clone()
}

/// A full evaluation point: `fill` everywhere except the given variables.
pub fn point<F: Clone>(fill: &F, values: &[(Var, F)]) -> [F; NVARS] {
    let mut p: [F; NVARS] = std::array::from_fn(|_| fill.clone());
    for (v, x) in values {
        p[v.index()] = x.clone();
    }
    p
}

/// `C(k, 2)` for any integer `k`.
pub fn binom2(k: i64) -> i64 {
    k * (k - 1) / 2
}

/// Partial sum of `(x)_inf = sum_j (-1)^j q^{C(j,2)} x^j / (q)_j`.
pub fn q_exp_expansion(x: &QFactorArg, w: &WeightMap, order: i64) -> Result<TruncatedSeries> {
    let vx = match x.valuation(w) {
        None => return Ok(TruncatedSeries::one(*w, order)),
        Some(v) => v,
    };
    if vx <= 0 {
        return Err(Error::WeightOverflow(format!("q-exponential argument {x} has minimal weight {vx}")));
    }
    let wq = w.get(Var::Q);
    let mut acc = TruncatedSeries::zero(*w, order);
    let mut j = 0i64;
    while j * vx + binom2(j) * wq <= order {
        let sign = if j % 2 == 0 { 1 } else { -1 };
        let term = Product::new()
            .poly(LaurentPoly::term(sign, &[(Var::Q, binom2(j) as i32)]))
            .power(x.clone(), j)
            .inv_poch(LaurentPoly::var(Var::Q), j)
            .expand(w, order)?;
        acc = acc.add(&term)?;
        j += 1;
    }
    Ok(acc)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HypKind {
    /// `s phi s-1`, summed over `k >= 0` with `(q)_k` in the denominator.
    Unilateral,
    /// `s psi s`, summed over all integers.
    Bilateral,
}

/// A basic hypergeometric series `sum_k (a_1..a_s)_k / ((q?) b_1..)_k z^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct HypSpec {
    pub kind: HypKind,
    pub upper: Vec<QFactorArg>,
    pub lower: Vec<QFactorArg>,
    pub argument: LaurentPoly,
}

impl HypSpec {
    pub fn unilateral(upper: Vec<QFactorArg>, lower: Vec<QFactorArg>, argument: LaurentPoly) -> Result<Self> {
        if upper.len() != lower.len() + 1 {
            return Err(Error::InvalidArgument(format!(
                "phi series needs one more upper than lower parameter, got {} and {}",
                upper.len(),
                lower.len()
            )));
        }
        Ok(HypSpec { kind: HypKind::Unilateral, upper, lower, argument })
    }

    pub fn bilateral(upper: Vec<QFactorArg>, lower: Vec<QFactorArg>, argument: LaurentPoly) -> Result<Self> {
        if upper.len() != lower.len() {
            return Err(Error::InvalidArgument(format!(
                "psi series needs equal parameter counts, got {} and {}",
                upper.len(),
                lower.len()
            )));
        }
        Ok(HypSpec { kind: HypKind::Bilateral, upper, lower, argument })
    }

    /// The `k`-th summand.
    pub fn term(&self, k: i64) -> Product {
        let mut p = Product::new();
        for a in &self.upper {
            p = p.poch(a.clone(), k);
        }
        if self.kind == HypKind::Unilateral {
            p = p.inv_poch(LaurentPoly::var(Var::Q), k);
        }
        for b in &self.lower {
            p = p.inv_poch(b.clone(), k);
        }
        p.power(self.argument.clone(), k)
    }

    fn check_window(&self, k_min: i64) -> Result<()> {
        if self.kind == HypKind::Unilateral && k_min != 0 {
            return Err(Error::InvalidArgument(format!("unilateral sum must start at k = 0, not {k_min}")));
        }
        Ok(())
    }
}

/// `sum_{k_min}^{k_max}` of the summands as a truncated series.
pub fn hyp_partial_sum(spec: &HypSpec, k_min: i64, k_max: i64, w: &WeightMap, order: i64) -> Result<TruncatedSeries> {
    spec.check_window(k_min)?;
    let mut acc = TruncatedSeries::zero(*w, order);
    for k in k_min..=k_max {
        acc = acc.add(&spec.term(k).expand(w, order)?)?;
    }
    Ok(acc)
}

/// `sum_{k_min}^{k_max}` of the summands evaluated at `point`.
pub fn hyp_partial_sum_at<F: PochEval>(spec: &HypSpec, k_min: i64, k_max: i64, point: &[F; NVARS]) -> Result<F> {
    spec.check_window(k_min)?;
    let mut acc = point[0].zero_like();
    for k in k_min..=k_max {
        let t = spec.term(k).eval(point)?;
        if !t.is_finite_value() {
            return Err(Error::NumericOverflow(format!("summand k = {k} is not finite")));
        }
        acc = acc.add(&t);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::int;

    fn q() -> LaurentPoly {
        LaurentPoly::var(Var::Q)
    }

    #[test]
    fn small_gaussian_coefficients() {
        assert_eq!(q_binom(2, 1), LaurentPoly::one() + q());
        let expect = LaurentPoly::from_terms([0, 1, 2, 3, 4].iter().map(|&e| {
            (Monomial::var(Var::Q, e), int(if e == 2 { 2 } else { 1 }))
        }));
        assert_eq!(q_binom(4, 2), expect);
        assert_eq!(q_binom(7, 0), LaurentPoly::one());
        assert!(q_binom(3, 4).is_zero());
        assert!(q_binom(3, -1).is_zero());
    }

    #[test]
    fn gaussian_coefficient_is_pochhammer_quotient() {
        let w = WeightMap::standard();
        for n in 0..8u32 {
            for k in 0..=n as i64 {
                let p = Product::new()
                    .poch(q(), n as i64)
                    .inv_poch(q(), k)
                    .inv_poch(q(), n as i64 - k)
                    .expand(&w, 40)
                    .unwrap();
                assert_eq!(p.body(), &q_binom(n, k), "n={n} k={k}");
            }
        }
    }

    #[test]
    fn negative_index_is_geometric() {
        let w = WeightMap::zero().with(Var::A, 1);
        let a = LaurentPoly::var(Var::A);
        let s = poch(&a, PochIndex::Finite(-1), &w, 3).unwrap();
        let mut expect = LaurentPoly::zero();
        for j in 0..=3 {
            expect = expect + LaurentPoly::term(1, &[(Var::A, j), (Var::Q, -j)]);
        }
        assert_eq!(s.body(), &expect);
        assert!(poch(&a, PochIndex::Finite(0), &w, 3).unwrap().is_one());
    }

    #[test]
    fn q_exponential_two_terms() {
        // w(z) = 1: (z)_inf = 1 - z/(1-q) + ... ; at order 2 the z term carries 1 + q
        let w = WeightMap::standard().with(Var::Z, 1);
        let z = LaurentPoly::var(Var::Z);
        let s = q_exp_expansion(&z, &w, 2).unwrap();
        let p = poch(&z, PochIndex::Infinite, &w, 2).unwrap();
        assert_eq!(s, p);
        assert_eq!(s.body().coeff(&Monomial::from_pairs(&[(Var::Z, 1), (Var::Q, 1)])), int(-1));
        assert!(q_exp_expansion(&LaurentPoly::zero(), &w, 4).unwrap().is_one());
        assert!(matches!(q_exp_expansion(&z, &WeightMap::standard(), 2), Err(Error::WeightOverflow(_))));
    }

    #[test]
    fn terminating_binomial_as_phi() {
        // 1phi0(q^-1; -; q, z) = 1 + (1 - q^-1)/(1 - q) z = (z/q; q)_1
        let w = WeightMap::standard();
        let z = LaurentPoly::var(Var::Z);
        let spec = HypSpec::unilateral(vec![LaurentPoly::q_pow(-1)], vec![], z.clone()).unwrap();
        let s = hyp_partial_sum(&spec, 0, 1, &w, 4).unwrap();
        let expect = poch(&z.mul_monomial(&Monomial::var(Var::Q, -1)), PochIndex::Finite(1), &w, 4).unwrap();
        assert_eq!(s, expect);
        assert_eq!(s.body(), &(LaurentPoly::one() - LaurentPoly::term(1, &[(Var::Z, 1), (Var::Q, -1)])));
        assert!(hyp_partial_sum(&spec, 0, -1, &w, 4).unwrap().is_zero());
        assert!(hyp_partial_sum(&spec, 1, 2, &w, 4).is_err());
        assert!(HypSpec::bilateral(vec![q()], vec![], q()).is_err());
    }
}
