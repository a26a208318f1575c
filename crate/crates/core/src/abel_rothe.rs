//! The bilateral Abel–Rothe sums that extend Jacobi's triple product, their
//! reversal, the q-Abel-type expansion obtained by coefficient extraction,
//! and Lambert's formula as its q -> 1 limit.
//!
//! Formal checks use the grading w(q) = w(a) = w(b) = 1 with z of weight 0,
//! so every summand has valuation at least |k| - 1 and a finite window of
//! summands determines the sum through any fixed order.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::algebra::{Bindings, LaurentPoly, Rational, TruncatedSeries, Var, WeightMap, NVARS};
use crate::bilateral::{bilateralize_window, format_c, jacobi_product, jacobi_sum, tannery_check, WindowSource, WINDOW_STEP};
use crate::error::{Error, Result};
use crate::kernels::{binom2, point, Factor, Fraction, PochIndex, Product};
use crate::numeric::ComplexHP;
use crate::rng;
use crate::terminating::{draw_point, limit_verdict, mono, q_near_one, sign, v, LimitSweep};
use crate::verdict::{Mode, Verdict};

pub use crate::bilateral::TANNERY_MARGIN;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RgjForm {
    /// `(q,z,q/z)_inf/(1-b) = sum (aq^{1-k}+bq)_inf (z(a+bq^k))_inf (-1)^k q^{C(k,2)} z^k`
    Theorem,
    /// `(q,zq,1/z)_inf/(1-az) = sum (aq^{-k}+b)_inf (zq(a+bq^k))_inf (-1)^k q^{C(k+1,2)} z^k`
    Reversed,
}

impl RgjForm {
    pub fn id(self) -> &'static str {
        match self {
            RgjForm::Theorem => "rgj",
            RgjForm::Reversed => "rgjc",
        }
    }

    pub fn lhs(self) -> Product {
        match self {
            RgjForm::Theorem => jacobi_product().inverse(LaurentPoly::one() - v(Var::B)),
            RgjForm::Reversed => Product::new()
                .poch_inf(v(Var::Q))
                .poch_inf(mono(1, &[(Var::Z, 1), (Var::Q, 1)]))
                .poch_inf(mono(1, &[(Var::Z, -1)]))
                .inverse(LaurentPoly::one() - mono(1, &[(Var::A, 1), (Var::Z, 1)])),
        }
    }

    pub fn term(self, k: i64) -> Product {
        let a_plus_bqk = v(Var::A) + mono(1, &[(Var::B, 1), (Var::Q, k)]);
        match self {
            RgjForm::Theorem => Product::new()
                .poch_inf(mono(1, &[(Var::A, 1), (Var::Q, 1 - k)]) + mono(1, &[(Var::B, 1), (Var::Q, 1)]))
                .poch_inf(&v(Var::Z) * &a_plus_bqk)
                .poly(mono(sign(k), &[(Var::Q, binom2(k)), (Var::Z, k)])),
            RgjForm::Reversed => Product::new()
                .poch_inf(mono(1, &[(Var::A, 1), (Var::Q, -k)]) + v(Var::B))
                .poch_inf(&mono(1, &[(Var::Z, 1), (Var::Q, 1)]) * &a_plus_bqk)
                .poly(mono(sign(k), &[(Var::Q, binom2(k + 1)), (Var::Z, k)])),
        }
    }
}

/// One summand expanded at a fixed order.
#[derive(Clone, Debug, PartialEq)]
pub struct BilateralTerm {
    pub k: i64,
    pub value: TruncatedSeries,
    /// Exact valuation of the summand (independent of the truncation order).
    pub min_weight: i64,
}

/// Expands summand `k` and checks the window-soundness bound
/// `min_weight >= |k| - 1`.
pub fn bilateral_term(form: RgjForm, k: i64, w: &WeightMap, order: i64) -> Result<BilateralTerm> {
    let p = form.term(k);
    let min_weight = p.valuation(w)?.ok_or_else(|| Error::VerificationFailed(format!("{} term {k} vanishes", form.id())))?;
    if min_weight < k.abs() - 1 {
        return Err(Error::VerificationFailed(format!(
            "{} term {k}: valuation {min_weight} below the window bound {}",
            form.id(),
            k.abs() - 1
        )));
    }
    Ok(BilateralTerm { k, value: p.expand(w, order)?, min_weight })
}

/// Parameters of a numeric bilateral check.
#[derive(Clone, Debug)]
pub struct NumericParams {
    pub a: ComplexHP,
    pub b: ComplexHP,
    pub z: ComplexHP,
    pub q: ComplexHP,
    /// `x_1, ..., x_r` for the multiple series; empty otherwise.
    pub x: Vec<ComplexHP>,
    pub tol: f64,
    pub max_window: i64,
}

impl NumericParams {
    pub fn real(prec: u32, a: f64, b: f64, z: f64, q: f64, tol: f64) -> Self {
        NumericParams {
            a: ComplexHP::real(prec, a),
            b: ComplexHP::real(prec, b),
            z: ComplexHP::real(prec, z),
            q: ComplexHP::real(prec, q),
            x: Vec::new(),
            tol,
            max_window: 4096,
        }
    }

    pub fn prec(&self) -> u32 {
        self.a.prec()
    }

    pub fn point(&self) -> [ComplexHP; NVARS] {
        let mut pt = point(&ComplexHP::zero(self.prec()), &[]);
        pt[Var::A.index()] = self.a.clone();
        pt[Var::B.index()] = self.b.clone();
        pt[Var::Z.index()] = self.z.clone();
        pt[Var::Q.index()] = self.q.clone();
        for (i, x) in self.x.iter().enumerate() {
            pt[Var::x(i + 1).index()] = x.clone();
        }
        pt
    }

    /// `max(|az|, |b|) < 1` and `|q| < 1`.
    pub fn check_region(&self) -> Result<()> {
        let az = self.a.mul(&self.z).abs_f64();
        let b = self.b.abs_f64();
        if !(az < 1.0 && b < 1.0 && self.q.abs_f64() < 1.0) {
            return Err(Error::RegionViolation(format!("need max(|az|, |b|) < 1 and |q| < 1; |az| = {az:.4}, |b| = {b:.4}")));
        }
        if self.z.abs_f64() == 0.0 {
            return Err(Error::RegionViolation("z = 0".into()));
        }
        Ok(())
    }

    pub(crate) fn describe(&self, v: Verdict) -> Verdict {
        let v = v.param("a", format_c(&self.a)).param("b", format_c(&self.b)).param("z", format_c(&self.z)).param("q", format_c(&self.q));
        if self.x.is_empty() {
            return v;
        }
        let xs: Vec<String> = self.x.iter().map(format_c).collect();
        v.param("x", format!("({})", xs.join(", ")))
    }
}

/// Sums `term(k)` over growing symmetric windows until a step of
/// [`WINDOW_STEP`] changes the relative value by less than `tol / 4`.
pub fn adaptive_bilateral_sum(
    term: impl Fn(i64) -> Result<ComplexHP>,
    tol: f64,
    max_window: i64,
) -> Result<(ComplexHP, i64)> {
    let mut sum = term(0)?;
    let mut w = 0;
    loop {
        let before = sum.clone();
        for k in w + 1..=w + WINDOW_STEP {
            sum = sum.add(&term(k)?).add(&term(-k)?);
        }
        w += WINDOW_STEP;
        if !sum.is_finite() {
            return Err(Error::NumericOverflow(format!("partial sum at window {w}")));
        }
        let scale = sum.abs_f64().max(f64::MIN_POSITIVE);
        if w > WINDOW_STEP && sum.sub(&before).abs_f64() / scale < tol / 4.0 {
            return Ok((sum, w));
        }
        if w >= max_window {
            return Err(Error::NonConvergence(format!("no stabilization by window {w}")));
        }
    }
}

pub enum RgjMode<'a> {
    Formal { order: i64 },
    Numeric(&'a NumericParams),
    WindowExact { n: u32, seed: u64 },
}

pub fn verify_rgj(mode: RgjMode<'_>) -> Result<Verdict> {
    verify_form(RgjForm::Theorem, mode)
}

pub fn verify_rgjc(mode: RgjMode<'_>) -> Result<Verdict> {
    verify_form(RgjForm::Reversed, mode)
}

fn verify_form(form: RgjForm, mode: RgjMode<'_>) -> Result<Verdict> {
    match mode {
        RgjMode::Formal { order } => verify_formal(form, order),
        RgjMode::Numeric(p) => verify_numeric(form, p),
        RgjMode::WindowExact { n, seed } => verify_window(form, n, seed),
    }
}

fn verify_formal(form: RgjForm, order: i64) -> Result<Verdict> {
    if order < 0 {
        return Err(Error::InvalidArgument("order must be nonnegative".into()));
    }
    let w = WeightMap::standard();
    let window = order + 1;
    let reach = window + TANNERY_MARGIN;
    let ks: Vec<i64> = (-reach..=reach).collect();
    let terms: Vec<BilateralTerm> = ks.par_iter().map(|&k| bilateral_term(form, k, &w, order)).collect::<Result<_>>()?;
    let cache: HashMap<i64, TruncatedSeries> = terms.iter().map(|t| (t.k, t.value.clone())).collect();
    let mut sum = TruncatedSeries::zero(w, order);
    for t in terms.iter().filter(|t| t.k.abs() <= window) {
        sum = sum.add(&t.value)?;
    }
    let lhs = form.lhs().expand(&w, order)?;
    let residual = lhs.sub(&sum)?;
    let tannery = tannery_check(form.id(), |k, _| Ok(cache[&k].clone()), &[(order, window)], TANNERY_MARGIN)?;
    Ok(Verdict::new(form.id(), Mode::Formal)
        .order(order)
        .window(window)
        .check(tannery)
        .check(reduction_to_jacobi(form, order)?)
        .exact(residual.into_body()))
}

/// `a = b = 0` turns both sides into Jacobi's triple product (with `z -> zq`
/// for the reversed form); compared coefficient by coefficient.
pub fn reduction_to_jacobi(form: RgjForm, order: i64) -> Result<Verdict> {
    let w = WeightMap::standard();
    let zero = Bindings::new().bind(Var::A, LaurentPoly::zero()).bind(Var::B, LaurentPoly::zero());
    let shift = match form {
        RgjForm::Theorem => Bindings::new(),
        RgjForm::Reversed => Bindings::new().bind(Var::Z, mono(1, &[(Var::Z, 1), (Var::Q, 1)])),
    };
    // z -> zq lowers weights of negative powers of z, hence the wider sum
    let jac_sum = jacobi_sum(2 * order + 2).substitute(&shift)?.truncate(&w, order);
    let mut sum = LaurentPoly::zero();
    for k in -(order + 2)..=(order + 2) {
        sum = sum + form.term(k).substitute(&zero)?.expand(&w, order)?.into_body();
    }
    let lhs = form.lhs().substitute(&zero)?.expand(&w, order)?.into_body();
    Ok(Verdict::new(format!("{}-jacobi-reduction", form.id()), Mode::Formal)
        .order(order)
        .check(Verdict::new(format!("{}-jacobi-reduction-product", form.id()), Mode::Formal).exact(&lhs - &jac_sum))
        .exact(&sum - &jac_sum))
}

fn verify_numeric(form: RgjForm, p: &NumericParams) -> Result<Verdict> {
    p.check_region()?;
    let pt = p.point();
    let (sum, window) = adaptive_bilateral_sum(|k| form.term(k).eval(&pt), p.tol, p.max_window)?;
    let lhs = form.lhs().eval(&pt)?;
    let err = sum.relative_error(&lhs);
    Ok(p.describe(Verdict::new(form.id(), Mode::Numeric)).precision(p.prec()).window(window).magnitude(err, p.tol))
}

/// The window identity behind the theorem; for the reversed form it is
/// mapped by `c -> 1/z, a -> bz, b -> az`, `k -> -k` and checked again.
fn verify_window(form: RgjForm, n: u32, seed: u64) -> Result<Verdict> {
    let wi = bilateralize_window(WindowSource::QAbelRothe, &[n as i64], None, seed)?;
    let out = Verdict::new(form.id(), Mode::WindowExact).param("n", n).param("seed", seed);
    if form == RgjForm::Theorem {
        return Ok(out.check(wi.verdict).count(0, 1));
    }
    let map = Bindings::new()
        .bind(Var::A, mono(1, &[(Var::B, 1), (Var::Z, 1)]))
        .bind(Var::B, mono(1, &[(Var::A, 1), (Var::Z, 1)]))
        .bind(Var::C, mono(1, &[(Var::Z, -1)]));
    let lhs = wi.lhs.substitute(&map)?;
    let terms: Vec<Product> = (-(n as i64)..=n as i64).map(|k| wi.rhs_terms[&vec![-k]].substitute(&map)).collect::<Result<_>>()?;
    let mut r = rng::label_stream(seed, &format!("rgjc-window/{n}"));
    let trials = crate::bilateral::WINDOW_TRIALS;
    let mut failures = 0u64;
    for _ in 0..trials {
        let (_, d) = draw_point(&mut r, &[Var::A, Var::B, Var::Z, Var::Q], |pt: &[Rational; NVARS]| {
            let mut s = lhs.eval(pt)?;
            for t in &terms {
                s -= t.eval(pt)?;
            }
            Ok(s)
        })?;
        if !num_traits::Zero::is_zero(&d) {
            failures += 1;
        }
    }
    Ok(out.param("trials", trials).check(wi.verdict).count(failures, trials as u64))
}

/// Compares the finite parts of two products as exact rational functions
/// and their infinite factors as multisets, so two products are recognized
/// as the same expression.
pub fn same_product(x: &Product, y: &Product) -> Result<bool> {
    fn split(p: &Product) -> (Product, Vec<Factor>) {
        let mut finite = Product::new();
        let mut rest = Vec::new();
        for f in p.factors() {
            match f {
                Factor::Poch(_, PochIndex::Infinite) | Factor::InvPoch(_, PochIndex::Infinite) => rest.push(f.clone()),
                other => finite = finite.with(other.clone()),
            }
        }
        (finite, rest)
    }
    let (px, mut fx) = split(x);
    let (py, fy) = split(y);
    if fx.len() != fy.len() {
        return Ok(false);
    }
    for f in fy {
        match fx.iter().position(|g| *g == f) {
            Some(i) => {
                fx.swap_remove(i);
            }
            None => return Ok(false),
        }
    }
    Ok(Fraction::of(&px)?.sub(&Fraction::of(&py)?).is_zero())
}

/// The map `k -> -k; a -> bz, b -> az, z -> 1/z` sends every summand of the
/// theorem to the corresponding summand of the reversed form, and the left
/// side to the left side.
pub fn reversal_equivalence(window: i64) -> Result<Verdict> {
    let map = Bindings::new()
        .bind(Var::A, mono(1, &[(Var::B, 1), (Var::Z, 1)]))
        .bind(Var::B, mono(1, &[(Var::A, 1), (Var::Z, 1)]))
        .bind(Var::Z, mono(1, &[(Var::Z, -1)]));
    let mut mismatched = Vec::new();
    for k in -window..=window {
        let mapped = RgjForm::Theorem.term(-k).substitute(&map)?;
        if !same_product(&mapped, &RgjForm::Reversed.term(k))? {
            mismatched.push(k);
        }
    }
    let lhs_ok = same_product(&RgjForm::Theorem.lhs().substitute(&map)?, &RgjForm::Reversed.lhs())?;
    let mut v = Verdict::new("rgj-reversal", Mode::SymbolicExact).window(window);
    if !lhs_ok {
        v = v.note("left-hand sides differ");
    }
    if !mismatched.is_empty() {
        v = v.note(format!("mismatched k: {mismatched:?}"));
    }
    Ok(v.count(mismatched.len() as u64 + u64::from(!lhs_ok), 2 * window as u64 + 2))
}

/// Summand `j` of `sum_j (aq^{j-n}+b)^j/(q)_j (aq^{1+j-n}+bq)_inf`, the
/// z^n coefficient of the theorem divided by `(-1)^n q^{C(n,2)}`; `n = 0`
/// gives the q-Abel-type expansion of `1/(1-b)`.
pub fn extrc_term(n: i64, j: i64) -> Product {
    Product::new()
        .power(mono(1, &[(Var::A, 1), (Var::Q, j - n)]) + v(Var::B), j)
        .inv_poch(v(Var::Q), j)
        .poch_inf(mono(1, &[(Var::A, 1), (Var::Q, 1 + j - n)]) + mono(1, &[(Var::B, 1), (Var::Q, 1)]))
}

/// Sums `term(j)` for `j >= 0` until [`TANNERY_MARGIN`] consecutive summands
/// vanish at `order`.
fn unilateral_formal(term: impl Fn(i64) -> Product, w: &WeightMap, order: i64) -> Result<(TruncatedSeries, i64)> {
    let mut acc = TruncatedSeries::zero(*w, order);
    let (mut j, mut empty, mut last) = (0, 0, 0);
    while empty < TANNERY_MARGIN {
        let t = term(j).expand(w, order)?;
        if t.is_zero() {
            empty += 1;
        } else {
            empty = 0;
            last = j;
            acc = acc.add(&t)?;
        }
        j += 1;
    }
    Ok((acc, last))
}

/// Replays the extraction of the z^n coefficients from the theorem and
/// verifies the resulting q-Abel-type expansion at `order`.
///
/// For each `n` in `ns`: every summand's z^n coefficient equals the
/// corresponding extracted summand times `(-1)^n q^{C(n,2)}`; the extracted
/// sum equals `1/(1-b)`; and `a -> aq^n` maps it to the `n = 0` expansion.
pub fn extract_extrc(order: i64, ns: &[i64]) -> Result<Verdict> {
    let w = WeightMap::standard();
    let one_over = Product::new().inverse(LaurentPoly::one() - v(Var::B)).expand(&w, order)?;
    let (sum, last) = unilateral_formal(|j| extrc_term(0, j), &w, order)?;
    let mut out = Verdict::new("extrc", Mode::Formal).order(order).window(last);
    for &n in ns {
        let (s, _) = unilateral_formal(|j| extrc_term(n, j), &w, order)?;
        let extracted = Verdict::new("extrc-extracted-sum", Mode::Formal).param("n", n).order(order).exact(s.sub(&one_over)?.into_body());
        let scale = mono(sign(n), &[(Var::Q, binom2(n))]);
        let mut coeff_failures = 0u64;
        let mut checked = 0u64;
        // summands beyond this window vanish at `order` (valuation >= |k| - 1)
        for k in -(order + 1)..=n.min(order + 1) {
            let full = RgjForm::Theorem.term(k).expand(&w, order)?;
            let lhs = full.body().coefficient_of(Var::Z, n as i32);
            let rhs = extrc_term(n, n - k).expand(&w, order)?.mul_poly(&scale);
            let rhs = TruncatedSeries::new(rhs.body(), w, order);
            checked += 1;
            if lhs != *rhs.body() {
                coeff_failures += 1;
            }
        }
        let shift = Bindings::new().bind(Var::A, mono(1, &[(Var::A, 1), (Var::Q, n)]));
        let mut map_failures = 0u64;
        for j in 0..=last + TANNERY_MARGIN {
            if !same_product(&extrc_term(n, j).substitute(&shift)?, &extrc_term(0, j))? {
                map_failures += 1;
            }
        }
        out = out
            .check(extracted)
            .check(Verdict::new("extrc-coefficients", Mode::Formal).param("n", n).order(order).count(coeff_failures, checked))
            .check(Verdict::new("extrc-substitution", Mode::SymbolicExact).param("n", n).count(map_failures, (last + TANNERY_MARGIN + 1) as u64));
    }
    Ok(out.exact(sum.sub(&one_over)?.into_body()))
}

/// The two factorizations used to bound the summands of the theorem,
/// multiplied out so that no non-invertible factor is divided by:
///
/// `(aq^{1-k}+bq)_inf = (-1)^k q^{-C(k,2)} prod_{j<k} (a+bq^k-q^j) (aq+bq^{1+k})_inf`
/// and, with `y = z(aq^{-k}+b)`,
/// `(z(a+bq^k))_inf = (-1)^k q^{-C(k,2)} prod_{1<=i<=-k} (y-q^i) (y)_inf`
/// (for the opposite sign of `k` the finite products move to the other side).
pub fn splitting_identities(max_k: i64, order: i64) -> Result<Verdict> {
    let w = WeightMap::standard();
    let q = |e: i64| mono(1, &[(Var::Q, e)]);
    let mut out = Verdict::new("rgj-splitting", Mode::Formal).order(order).window(max_k);
    let mut failures = 0u64;
    for k in -max_k..=max_k {
        let x = v(Var::A) + mono(1, &[(Var::B, 1), (Var::Q, k)]);
        let first = {
            let mut l = Product::new().poch_inf(mono(1, &[(Var::A, 1), (Var::Q, 1 - k)]) + mono(1, &[(Var::B, 1), (Var::Q, 1)]));
            let mut r = Product::new()
                .poly(mono(sign(k), &[(Var::Q, -binom2(k))]))
                .poch_inf(mono(1, &[(Var::A, 1), (Var::Q, 1)]) + mono(1, &[(Var::B, 1), (Var::Q, 1 + k)]));
            if k >= 0 {
                for j in 0..k {
                    r = r.poly(&x - &q(j));
                }
            } else {
                for j in 1..=-k {
                    l = l.poly(&x - &q(-j));
                }
            }
            l.expand(&w, order)?.sub(&r.expand(&w, order)?)?
        };
        let y = &v(Var::Z) * &(mono(1, &[(Var::A, 1), (Var::Q, -k)]) + v(Var::B));
        let second = {
            let mut l = Product::new().poch_inf(&v(Var::Z) * &x);
            let mut r = Product::new().poly(mono(sign(k), &[(Var::Q, -binom2(k))])).poch_inf(y.clone());
            if k <= 0 {
                for i in 1..=-k {
                    r = r.poly(&y - &q(i));
                }
            } else {
                for i in 1..=k {
                    l = l.poly(&y - &q(1 - i));
                }
            }
            l.expand(&w, order)?.sub(&r.expand(&w, order)?)?
        };
        for (name, d) in [("rgj-splitting-positive", first), ("rgj-splitting-negative", second)] {
            if !d.is_zero() {
                failures += 1;
            }
            out = out.check(Verdict::new(name, Mode::Formal).param("k", k).order(order).exact(d.into_body()));
        }
    }
    Ok(out.count(failures, 2 * (2 * max_k as u64 + 1)))
}

/// Lambert's `e^{AZ}/(1-BZ) = sum_j (A+Bj)^j Z^j e^{-BZj} / j!`, with the
/// q -> 1 bridge from the q-Abel-type expansion at `a = -BZ`,
/// `b = (1 - q^A + B) Z` along `q = 1 - 2^{-j}`.
#[derive(Clone, Debug)]
pub struct LambertParams {
    pub a: Rational,
    pub b: Rational,
    pub z: Rational,
    pub j_max: u32,
    pub prec: u32,
    pub tol: f64,
    pub bridge: Option<LimitSweep>,
}

pub fn lambert_region(b: f64, z: f64) -> bool {
    let bz = b * z;
    (bz * (1.0 - bz).exp()).abs() < 1.0
}

pub fn numeric_lambert(p: &LambertParams) -> Result<Verdict> {
    use crate::algebra::rational::{self, to_f64};
    if !lambert_region(to_f64(&p.b), to_f64(&p.z)) {
        return Err(Error::RegionViolation("need |B Z e^{1 - B Z}| < 1".into()));
    }
    let prec = p.prec;
    let (big_a, big_b, big_z) = (ComplexHP::from_rational(prec, &p.a), ComplexHP::from_rational(prec, &p.b), ComplexHP::from_rational(prec, &p.z));
    let one = ComplexHP::one(prec);
    let bz = big_b.mul(&big_z);
    let pole = || Error::PoleHit("B Z = 1".into());
    let lhs = big_a.mul(&big_z).exp().div(&one.sub(&bz)).ok_or_else(pole)?;
    let mut sum = ComplexHP::zero(prec);
    let mut fact = one.clone();
    let terms: Vec<ComplexHP> = (0..=p.j_max as i64)
        .map(|j| {
            if j > 0 {
                fact = fact.mul(&ComplexHP::real(prec, j as f64));
            }
            let base = big_a.add(&big_b.scale_f64(j as f64)).mul(&big_z);
            let t = base.powi(j).unwrap_or_else(|| one.clone()).mul(&bz.scale_f64(-(j as f64)).exp());
            t.div(&fact).expect("j! > 0")
        })
        .collect();
    for t in &terms {
        sum = sum.add(t);
    }
    let err = sum.relative_error(&lhs);
    let shown = [&p.a, &p.b, &p.z].map(rational::to_string);
    let mut v = Verdict::new("lambert", Mode::Numeric)
        .param("A", &shown[0])
        .param("B", &shown[1])
        .param("Z", &shown[2])
        .param("j_max", p.j_max)
        .precision(prec);
    if let Some(sweep) = &p.bridge {
        v = v.check(lambert_bridge(p, sweep, &terms, &big_a)?);
    }
    Ok(v.magnitude(err, p.tol))
}

/// Termwise distance between the q-Abel-type expansion at `q = 1 - 2^{-j}`
/// and `e^{-AZ}` times Lambert's summands, plus the distance of the left
/// sides, for every `j` of the sweep.
fn lambert_bridge(p: &LambertParams, sweep: &LimitSweep, lambert: &[ComplexHP], big_a: &ComplexHP) -> Result<Verdict> {
    let prec = p.prec;
    let one = ComplexHP::one(prec);
    let big_b = ComplexHP::from_rational(prec, &p.b);
    let big_z = ComplexHP::from_rational(prec, &p.z);
    let damp = big_a.mul(&big_z).neg().exp();
    let lim_lhs = one.div(&one.sub(&big_b.mul(&big_z))).ok_or_else(|| Error::PoleHit("B Z = 1".into()))?;
    let mut errors = Vec::new();
    for &j in &sweep.j_values {
        let q = q_near_one(prec, j);
        let a = big_b.mul(&big_z).neg();
        let b = one.sub(&q.pow(big_a)).add(&big_b).mul(&big_z);
        let pt = point(&ComplexHP::zero(prec), &[(Var::Q, q.clone()), (Var::A, a), (Var::B, b.clone())]);
        let lhs = one.div(&one.sub(&b)).ok_or_else(|| Error::PoleHit("b = 1".into()))?;
        let mut err = lhs.sub(&lim_lhs).abs_f64();
        for (i, l) in lambert.iter().enumerate() {
            let t = extrc_term(0, i as i64).eval(&pt)?;
            err += t.sub(&l.mul(&damp)).abs_f64();
        }
        errors.push((j, err));
    }
    Ok(limit_verdict("lambert-bridge", &errors, sweep.tolerance).param("j_max", p.j_max).precision(prec))
}

/// Random points with `max(|az|, |b|) < bound` for the numeric suites.
pub fn random_region_points(seed: u64, label: &str, count: usize, bound: f64, prec: u32, tol: f64) -> Vec<NumericParams> {
    let mut r = rng::label_stream(seed, label);
    (0..count)
        .map(|_| {
            let b = rng::uniform(&mut r, -bound, bound);
            let z = rng::uniform(&mut r, 0.2, 0.95) * if rng::uniform(&mut r, 0.0, 1.0) < 0.5 { -1.0 } else { 1.0 };
            let a = rng::uniform(&mut r, -bound, bound) / z.abs();
            NumericParams::real(prec, a, b, z, 0.5, tol)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::rat;

    #[test]
    fn term_valuations_respect_the_window_bound() {
        let w = WeightMap::standard();
        for form in [RgjForm::Theorem, RgjForm::Reversed] {
            for k in -15..=15 {
                let t = bilateral_term(form, k, &w, 4).unwrap();
                assert!(t.min_weight >= k.abs() - 1, "{form:?} {k}");
            }
        }
    }

    #[test]
    fn formal_small_orders() {
        for order in [0, 4, 8] {
            for form in [RgjForm::Theorem, RgjForm::Reversed] {
                let v = verify_form(form, RgjMode::Formal { order }).unwrap();
                assert!(v.pass, "{v} {:?}", v.first_failure());
            }
        }
    }

    #[test]
    fn dropping_a_summand_breaks_the_identity() {
        let w = WeightMap::standard();
        let order = 6;
        let lhs = RgjForm::Theorem.lhs().expand(&w, order).unwrap();
        let mut sum = TruncatedSeries::zero(w, order);
        for k in -(order + 1)..=order + 1 {
            if k != 2 {
                sum = sum.add(&bilateral_term(RgjForm::Theorem, k, &w, order).unwrap().value).unwrap();
            }
        }
        assert!(!lhs.sub(&sum).unwrap().is_zero());
    }

    #[test]
    fn numeric_examples() {
        let p = NumericParams::real(128, 0.3, 0.4, 0.9, 0.5, 1e-20);
        assert!(verify_rgj(RgjMode::Numeric(&p)).unwrap().pass);
        let p = NumericParams::real(128, 0.2, 0.5, 0.8, 0.5, 1e-20);
        assert!(verify_rgjc(RgjMode::Numeric(&p)).unwrap().pass);
        let p = NumericParams::real(128, 0.3, 1.5, 0.9, 0.5, 1e-20);
        assert!(matches!(verify_rgj(RgjMode::Numeric(&p)), Err(Error::RegionViolation(_))));
    }

    #[test]
    fn window_modes() {
        assert!(verify_rgj(RgjMode::WindowExact { n: 3, seed: 1 }).unwrap().pass);
        assert!(verify_rgjc(RgjMode::WindowExact { n: 2, seed: 1 }).unwrap().pass);
    }

    #[test]
    fn reversal_full_window() {
        let v = reversal_equivalence(8).unwrap();
        assert!(v.pass, "{:?}", v.notes);
    }

    #[test]
    fn extrc_small_orders() {
        let v = extract_extrc(0, &[0]).unwrap();
        assert!(v.pass);
        let v = extract_extrc(5, &[-1, 0, 2]).unwrap();
        assert!(v.pass, "{:?}", v.first_failure());
    }

    #[test]
    fn extrc_at_a_zero() {
        let w = WeightMap::standard();
        let zero = Bindings::new().bind(Var::A, LaurentPoly::zero());
        let (s, _) = unilateral_formal(|j| extrc_term(0, j).substitute(&zero).unwrap(), &w, 6).unwrap();
        let one_over = Product::new().inverse(LaurentPoly::one() - v(Var::B)).expand(&w, 6).unwrap();
        assert_eq!(s, one_over);
    }

    #[test]
    fn splitting_small() {
        let v = splitting_identities(3, 6).unwrap();
        assert!(v.pass, "{:?}", v.first_failure());
    }

    #[test]
    fn lambert_example_and_bridge() {
        let p = LambertParams {
            a: rat(1, 1),
            b: rat(1, 5),
            z: rat(1, 2),
            j_max: 60,
            prec: 128,
            tol: 1e-12,
            bridge: Some(LimitSweep { j_values: (8..=16).collect(), tolerance: 1e-3, precision: 128 }),
        };
        let v = numeric_lambert(&p).unwrap();
        assert!(v.pass, "{v:?}");
    }

    #[test]
    fn lambert_b_zero_is_exponential() {
        let p = LambertParams { a: rat(3, 2), b: rat(0, 1), z: rat(1, 3), j_max: 60, prec: 128, tol: 1e-20, bridge: None };
        assert!(numeric_lambert(&p).unwrap().pass);
    }
}
