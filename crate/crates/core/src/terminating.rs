//! Terminating summations: exact symbolic checks, exact checks at random
//! rational points, and numeric q -> 1 limits to the classical formulas.

use num_traits::{One, Zero};
use rand::Rng;

use crate::algebra::rational::{self, generalized_binomial, int};
use crate::algebra::{Bindings, LaurentPoly, Rational, Var, NVARS};
use crate::error::{Error, Result};
use crate::kernels::{binom2, hyp_partial_sum_at, point, q_binom, HypSpec, Product};
use crate::numeric::ComplexHP;
use crate::rng;
use crate::verdict::{Mode, Verdict};

/// Redraws allowed per sample before a point search gives up.
pub const MAX_REDRAWS: usize = 1000;

pub(crate) fn v(x: Var) -> LaurentPoly {
    LaurentPoly::var(x)
}

pub(crate) fn mono(coeff: i64, pairs: &[(Var, i64)]) -> LaurentPoly {
    let pairs: Vec<(Var, i32)> = pairs.iter().map(|&(x, e)| (x, e as i32)).collect();
    LaurentPoly::term(coeff, &pairs)
}

pub(crate) fn sign(k: i64) -> i64 {
    if k.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// Summand of the terminating q-binomial theorem.
pub fn q_binomial_term(n: u32, k: i64) -> LaurentPoly {
    &q_binom(n, k) * &mono(sign(k), &[(Var::Q, binom2(k)), (Var::Z, k)])
}

/// `sum_k [n,k] (-1)^k q^{C(k,2)} z^k = (z)_n`.
pub fn verify_q_binomial(n: u32) -> Result<Verdict> {
    let mut lhs = LaurentPoly::zero();
    for k in 0..=n as i64 {
        lhs = lhs + q_binomial_term(n, k);
    }
    let rhs = Product::new().poch(v(Var::Z), n as i64).exact()?;
    Ok(Verdict::new("q-binomial", Mode::SymbolicExact).param("n", n).exact(lhs - rhs))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Specialization {
    None,
    BZero,
    AZero,
}

impl Specialization {
    pub fn as_str(self) -> &'static str {
        match self {
            Specialization::None => "none",
            Specialization::BZero => "b_zero",
            Specialization::AZero => "a_zero",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "none" => Specialization::None,
            "b_zero" | "b0" => Specialization::BZero,
            "a_zero" | "a0" => Specialization::AZero,
            _ => return None,
        })
    }
}

/// The `k`-th summand of the q-Abel–Rothe sum:
/// `[n,k] (1-a-b) (aq^{1-k}+bq)_{k-1} (c(a+bq^k))_{n-k} (-1)^k q^{C(k,2)} c^k`.
///
/// At `k = 0` the factor `(1-a-b)(aq+bq)_{-1}` equals 1 and is dropped, so
/// the summand is a polynomial; [`q_rothe_term_literal`] keeps it.
pub fn q_rothe_term(n: u32, k: i64) -> Product {
    let c_arg = &v(Var::C) * &(v(Var::A) + mono(1, &[(Var::B, 1), (Var::Q, k)]));
    let tail = Product::new()
        .poly(q_binom(n, k))
        .poch(c_arg, n as i64 - k)
        .poly(mono(sign(k), &[(Var::Q, binom2(k)), (Var::C, k)]));
    if k == 0 {
        return tail;
    }
    tail.poly(LaurentPoly::one() - v(Var::A) - v(Var::B))
        .poch(mono(1, &[(Var::A, 1), (Var::Q, 1 - k)]) + mono(1, &[(Var::B, 1), (Var::Q, 1)]), k - 1)
}

/// As [`q_rothe_term`] without the `k = 0` cancellation.
pub fn q_rothe_term_literal(n: u32, k: i64) -> Product {
    if k != 0 {
        return q_rothe_term(n, k);
    }
    q_rothe_term(n, 0)
        .poly(LaurentPoly::one() - v(Var::A) - v(Var::B))
        .poch(mono(1, &[(Var::A, 1), (Var::Q, 1)]) + mono(1, &[(Var::B, 1), (Var::Q, 1)]), -1)
}

/// The `k`-th summand of the q-Abel sum `[n,k](a+b)(a+bq^k)^{k-1}(a+bq^k)_{n-k}`.
pub fn q_abel_term(n: u32, k: i64) -> Product {
    let x = v(Var::A) + mono(1, &[(Var::B, 1), (Var::Q, k)]);
    let p = Product::new().poly(q_binom(n, k)).poch(x.clone(), n as i64 - k);
    if k == 0 {
        // (a+b)(a+b)^{-1} = 1
        return p;
    }
    p.poly(v(Var::A) + v(Var::B)).power(x, k - 1)
}

fn exact_sum(n: u32, term: impl Fn(u32, i64) -> Product) -> Result<Vec<LaurentPoly>> {
    (0..=n as i64).map(|k| term(n, k).exact()).collect()
}

/// `(c)_n = sum_k q_rothe_term(n, k)`, optionally at `b = 0` or `a = 0`.
pub fn verify_q_abel_rothe(n: u32, spec: Specialization) -> Result<Verdict> {
    let terms = exact_sum(n, q_rothe_term)?;
    let zero_var = match spec {
        Specialization::None => None,
        Specialization::BZero => Some(Var::B),
        Specialization::AZero => Some(Var::A),
    };
    let mut sum = LaurentPoly::zero();
    for t in &terms {
        sum = sum + match zero_var {
            Some(x) => t.substitute(&Bindings::new().bind(x, LaurentPoly::zero()))?,
            None => t.clone(),
        };
    }
    let rhs = Product::new().poch(v(Var::C), n as i64).exact()?;
    let mut verdict = Verdict::new("q-abel-rothe", Mode::SymbolicExact)
        .param("n", n)
        .param("specialization", spec.as_str());
    if spec != Specialization::None {
        verdict = verdict.check(chu_vandermonde_check(n, spec, 20, 0x5eed ^ n as u64)?);
    }
    Ok(verdict.exact(sum - rhs))
}

/// The specialized summand agrees termwise, at random rational points, with
/// `(x)_n` times the summand of the matching q-Chu–Vandermonde `2phi1`, and
/// that `2phi1` sums to its closed form.
fn chu_vandermonde_check(n: u32, spec: Specialization, trials: usize, seed: u64) -> Result<Verdict> {
    let ni = n as i64;
    let (hyp, scale, closed, label) = match spec {
        Specialization::BZero => (
            // 2phi1(q^-n, 1/a; q^{1-n}/(ac); q, q) = (q^{1-n}/c)_n / (q^{1-n}/(ac))_n a^-n
            HypSpec::unilateral(
                vec![mono(1, &[(Var::Q, -ni)]), mono(1, &[(Var::A, -1)])],
                vec![mono(1, &[(Var::Q, 1 - ni), (Var::A, -1), (Var::C, -1)])],
                v(Var::Q),
            )?,
            Product::new().poch(&v(Var::A) * &v(Var::C), ni),
            Product::new()
                .poch(mono(1, &[(Var::Q, 1 - ni), (Var::C, -1)]), ni)
                .inv_poch(mono(1, &[(Var::Q, 1 - ni), (Var::A, -1), (Var::C, -1)]), ni)
                .poly(mono(1, &[(Var::A, -ni)])),
            "q-chu-vandermonde-q",
        ),
        Specialization::AZero => (
            // 2phi1(q^-n, b; bc; q, cq^n) = (c)_n / (bc)_n
            HypSpec::unilateral(
                vec![mono(1, &[(Var::Q, -ni)]), v(Var::B)],
                vec![&v(Var::B) * &v(Var::C)],
                mono(1, &[(Var::C, 1), (Var::Q, ni)]),
            )?,
            Product::new().poch(&v(Var::B) * &v(Var::C), ni),
            Product::new().poch(v(Var::C), ni).inv_poch(&v(Var::B) * &v(Var::C), ni),
            "q-chu-vandermonde-cq^n",
        ),
        Specialization::None => unreachable!(),
    };
    let zero_var = if spec == Specialization::BZero { Var::B } else { Var::A };
    let mut r = rng::stream(seed, n as u64);
    let mut failures = 0u64;
    for _ in 0..trials {
        let mut tries = 0;
        let diffs = loop {
            tries += 1;
            let mut vals: Vec<(Var, Rational)> =
                [Var::A, Var::B, Var::C, Var::Q].iter().map(|&x| (x, rng::rational(&mut r, rng::DEFAULT_BOUND))).collect();
            vals.retain(|(x, _)| *x != zero_var);
            let pt = point(&Rational::zero(), &vals);
            let attempt = (|| -> Result<Vec<Rational>> {
                let s = scale.eval(&pt)?;
                let mut out = Vec::new();
                for k in 0..=ni {
                    let lhs = q_rothe_term(n, k).eval(&pt)?;
                    let rhs = &s * &hyp.term(k).eval(&pt)?;
                    out.push(lhs - rhs);
                }
                out.push(hyp_partial_sum_at(&hyp, 0, ni, &pt)? - closed.eval(&pt)?);
                Ok(out)
            })();
            match attempt {
                Ok(d) => break d,
                Err(Error::PoleHit(_)) if tries < MAX_REDRAWS => continue,
                Err(e) => return Err(e),
            }
        };
        if diffs.iter().any(|d| !d.is_zero()) {
            failures += 1;
        }
    }
    Ok(Verdict::new(label, Mode::RandomRational).param("n", n).param("trials", trials).count(failures, trials as u64))
}

/// `1 = sum_k q_abel_term(n, k)`.
pub fn verify_q_abel(n: u32) -> Result<Verdict> {
    let sum = exact_sum(n, q_abel_term)?.into_iter().fold(LaurentPoly::zero(), |s, t| s + t);
    Ok(Verdict::new("q-abel", Mode::SymbolicExact).param("n", n).exact(sum - LaurentPoly::one()))
}

/// `a -> a/c, b -> b/c` in each q-Abel–Rothe summand, then `c -> 0`,
/// reproduces the q-Abel summand termwise.
pub fn limit_qrothe_to_qabel(n: u32) -> Result<Verdict> {
    let bind = Bindings::new()
        .bind(Var::A, mono(1, &[(Var::A, 1), (Var::C, -1)]))
        .bind(Var::B, mono(1, &[(Var::B, 1), (Var::C, -1)]));
    let mut residual = LaurentPoly::zero();
    let mut total = LaurentPoly::zero();
    for k in 0..=n as i64 {
        let t = q_rothe_term(n, k).exact()?.substitute(&bind)?;
        if let Some(e) = t.min_exp(Var::C) {
            if e < 0 {
                return Err(Error::LimitUndefined(format!("summand k = {k} keeps c^{e} after a -> a/c, b -> b/c")));
            }
        }
        let limit = t.coefficient_of(Var::C, 0);
        residual = residual + (&limit - &q_abel_term(n, k).exact()?);
        total = total + limit;
    }
    // the left side (c)_n tends to 1
    let lhs = Product::new().poch(v(Var::C), n as i64).exact()?.coefficient_of(Var::C, 0);
    Ok(Verdict::new("q-rothe-to-q-abel", Mode::SymbolicExact)
        .param("n", n)
        .check(Verdict::new("q-abel", Mode::SymbolicExact).param("n", n).exact(total - lhs))
        .exact(residual))
}

fn lhs_3phi2(n: i64) -> HypSpec {
    HypSpec::unilateral(
        vec![v(Var::A), v(Var::B), mono(1, &[(Var::Q, -n)])],
        vec![v(Var::C), mono(1, &[(Var::A, 1), (Var::B, 1), (Var::Q, 1 - n), (Var::C, -1)])],
        v(Var::Q),
    )
    .expect("3phi2 shape")
}

fn rhs_3phi2(n: i64) -> Product {
    Product::new()
        .poch(mono(1, &[(Var::C, 1), (Var::A, -1)]), n)
        .poch(mono(1, &[(Var::C, 1), (Var::B, -1)]), n)
        .inv_poch(v(Var::C), n)
        .inv_poch(mono(1, &[(Var::C, 1), (Var::A, -1), (Var::B, -1)]), n)
}

fn pochs(p: Product, args: &[LaurentPoly], k: i64, inverse: bool) -> Product {
    args.iter().fold(p, |p, x| if inverse { p.inv_poch(x.clone(), k) } else { p.poch(x.clone(), k) })
}

/// The shifted sum of the first intermediate identity:
/// `sum_{-n}^{n} (aq^n, bq^n, q^-n)_k / (q^{1+n}, cq^n, abq^{1-n}/c)_k q^k`.
fn shifted_sum(n: i64, a_shift: i64) -> HypSpec {
    HypSpec::bilateral(
        vec![mono(1, &[(Var::A, 1), (Var::Q, a_shift)]), mono(1, &[(Var::B, 1), (Var::Q, n)]), mono(1, &[(Var::Q, -n)])],
        vec![
            mono(1, &[(Var::Q, 1 + n)]),
            mono(1, &[(Var::C, 1), (Var::Q, a_shift)]),
            mono(1, &[(Var::A, 1), (Var::B, 1), (Var::Q, 1 - n), (Var::C, -1)]),
        ],
        v(Var::Q),
    )
    .expect("window shape")
}

/// Differences `lhs - rhs` of the Pfaff–Saalschütz summation and of the
/// identities along its bilateralization, evaluated at a rational point.
///
/// In order: the `3phi2` sum; the `n -> 2n`, `k -> k+n` form; the
/// substituted window sum against its first and second closed forms.
pub fn saalschutz_chain_residuals(n: i64, pt: &[Rational; NVARS]) -> Result<Vec<Rational>> {
    let q = || v(Var::Q);
    let m = |pairs: &[(Var, i64)]| mono(1, pairs);
    let mut out = Vec::new();

    out.push(hyp_partial_sum_at(&lhs_3phi2(n), 0, n, pt)? - rhs_3phi2(n).eval(pt)?);

    // (c/a, c/b)_{2n} / (c, c/ab)_{2n} = prefactor * window sum
    let lhs1 = rhs_3phi2(2 * n).eval(pt)?;
    let pre = pochs(Product::new(), &[v(Var::A), v(Var::B), m(&[(Var::Q, -2 * n)])], n, false);
    let pre = pochs(pre, &[q(), v(Var::C), m(&[(Var::A, 1), (Var::B, 1), (Var::Q, 1 - 2 * n), (Var::C, -1)])], n, true)
        .poly(m(&[(Var::Q, n)]));
    let rhs1 = &pre.eval(pt)? * &hyp_partial_sum_at(&shifted_sum(n, n), -n, n, pt)?;
    out.push(lhs1 - rhs1);

    // after a -> aq^-n, c -> cq^-n
    let window = hyp_partial_sum_at(&shifted_sum(n, 0), -n, n, pt)?;
    let x = Product::new()
        .poch(m(&[(Var::C, 1), (Var::A, -1)]), 2 * n)
        .poch(m(&[(Var::C, 1), (Var::Q, -n), (Var::B, -1)]), 2 * n)
        .poch(q(), n)
        .poch(m(&[(Var::C, 1), (Var::Q, -n)]), n)
        .poch(m(&[(Var::A, 1), (Var::B, 1), (Var::Q, 1 - 2 * n), (Var::C, -1)]), n)
        .inv_poch(m(&[(Var::C, 1), (Var::Q, -n)]), 2 * n)
        .inv_poch(m(&[(Var::C, 1), (Var::A, -1), (Var::B, -1)]), 2 * n)
        .inv_poch(m(&[(Var::A, 1), (Var::Q, -n)]), n)
        .inv_poch(v(Var::B), n)
        .inv_poch(m(&[(Var::Q, -2 * n)]), n)
        .poly(m(&[(Var::Q, -n)]));
    out.push(&window - &x.eval(pt)?);
    let y = Product::new()
        .poch(m(&[(Var::C, 1), (Var::A, -1)]), 2 * n)
        .poch(m(&[(Var::C, 1), (Var::B, -1)]), n)
        .poch(m(&[(Var::B, 1), (Var::Q, 1), (Var::C, -1)]), n)
        .poch(q(), n)
        .poch(q(), n)
        .inv_poch(q(), 2 * n)
        .inv_poch(v(Var::C), n)
        .inv_poch(m(&[(Var::Q, 1), (Var::A, -1)]), n)
        .inv_poch(v(Var::B), n)
        .inv_poch(m(&[(Var::C, 1), (Var::A, -1), (Var::B, -1)]), n);
    out.push(&window - &y.eval(pt)?);
    Ok(out)
}

/// Draws a rational point in the listed variables at which `f` evaluates
/// without hitting a pole.
pub fn draw_point<R: Rng, T>(
    r: &mut R,
    vars: &[Var],
    mut f: impl FnMut(&[Rational; NVARS]) -> Result<T>,
) -> Result<([Rational; NVARS], T)> {
    for _ in 0..MAX_REDRAWS {
        let vals: Vec<(Var, Rational)> = vars.iter().map(|&x| (x, rng::rational(r, rng::DEFAULT_BOUND))).collect();
        let pt = point(&Rational::zero(), &vals);
        match f(&pt) {
            Ok(t) => return Ok((pt, t)),
            Err(Error::PoleHit(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::PoleHit(format!("no pole-free point after {MAX_REDRAWS} draws")))
}

/// Pfaff–Saalschütz and its two bilateralization intermediates at
/// `trials` random rational points `(a, b, c, q)`.
pub fn verify_pfaff_saalschutz(n: u32, trials: usize, seed: u64) -> Result<Verdict> {
    if trials == 0 {
        return Err(Error::InvalidArgument("at least one trial is required".into()));
    }
    let mut r = rng::label_stream(seed, &format!("pfaff-saalschutz/{n}"));
    let mut failures = [0u64; 4];
    for _ in 0..trials {
        let (_, diffs) = draw_point(&mut r, &[Var::A, Var::B, Var::C, Var::Q], |pt| saalschutz_chain_residuals(n as i64, pt))?;
        for (f, d) in failures.iter_mut().zip(&diffs) {
            if !d.is_zero() {
                *f += 1;
            }
        }
    }
    let t = trials as u64;
    let sub = |id: &str, f: u64| Verdict::new(id, Mode::RandomRational).param("n", n).param("trials", trials).count(f, t);
    Ok(Verdict::new("pfaff-saalschutz", Mode::RandomRational)
        .param("n", n)
        .param("trials", trials)
        .param("seed", seed)
        .check(sub("pfaff-saalschutz-doubled", failures[1]))
        .check(sub("pfaff-saalschutz-window", failures[2]))
        .check(sub("pfaff-saalschutz-window-closed", failures[3]))
        .count(failures[0], t))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Classical {
    Rothe,
    Abel,
}

impl Classical {
    pub fn id(self) -> &'static str {
        match self {
            Classical::Rothe => "rothe",
            Classical::Abel => "abel",
        }
    }
}

/// `A/(A+Bk) * binom(A+Bk, k)` with the pole cancelled:
/// `A (A+Bk-1) ... (A+Bk-k+1) / k!`.
pub fn rothe_weight(a: &Rational, b: &Rational, k: i64) -> Rational {
    if k == 0 {
        return Rational::one();
    }
    let x = a + b * int(k);
    let mut acc = a.clone();
    for i in 1..k {
        acc = acc * (&x - int(i));
    }
    for i in 2..=k {
        acc = acc / int(i);
    }
    acc
}

/// `A (A+Bk)^{k-1}`, equal to 1 at `k = 0`.
pub fn abel_weight(a: &Rational, b: &Rational, k: i64) -> Rational {
    if k == 0 {
        return Rational::one();
    }
    let x = a + b * int(k);
    a * num_traits::pow(x, (k - 1) as usize)
}

/// Classical summands and left side at `(A, B, C)`.
pub fn classical_sides(which: Classical, n: i64, a: &Rational, b: &Rational, c: &Rational) -> (Rational, Vec<Rational>) {
    match which {
        Classical::Rothe => {
            let lhs = generalized_binomial(&(a + c), n);
            let terms = (0..=n).map(|k| rothe_weight(a, b, k) * generalized_binomial(&(c - b * int(k)), n - k)).collect();
            (lhs, terms)
        }
        Classical::Abel => {
            let lhs = num_traits::pow(a + c, n as usize);
            let terms = (0..=n)
                .map(|k| {
                    generalized_binomial(&int(n), k) * abel_weight(a, b, k) * num_traits::pow(c - b * int(k), (n - k) as usize)
                })
                .collect();
            (lhs, terms)
        }
    }
}

/// Both sides as polynomials in `A, B, C` (stored as the variables a, b, c).
fn classical_symbolic(which: Classical, n: i64) -> LaurentPoly {
    let (a, b, c) = (v(Var::A), v(Var::B), v(Var::C));
    let falling = |x: &LaurentPoly, k: i64| -> LaurentPoly {
        let mut acc = LaurentPoly::one();
        for i in 0..k {
            acc = &acc * &(x - &LaurentPoly::int(i));
        }
        acc
    };
    let fact = |k: i64| -> Rational { (1..=k).fold(Rational::one(), |f, i| f * int(i)) };
    let mut diff = match which {
        Classical::Rothe => falling(&(&a + &c), n).scale(&fact(n).recip()),
        Classical::Abel => (&a + &c).pow(n as u32),
    };
    for k in 0..=n {
        let x = &a + &b.scale(&int(k));
        let y = &c - &b.scale(&int(k));
        let term = match which {
            Classical::Rothe => {
                let w = if k == 0 {
                    LaurentPoly::one()
                } else {
                    (&a * &falling(&(&x - &LaurentPoly::one()), k - 1)).scale(&fact(k).recip())
                };
                (&w * &falling(&y, n - k)).scale(&fact(n - k).recip())
            }
            Classical::Abel => {
                let w = if k == 0 { LaurentPoly::one() } else { &a * &x.pow((k - 1) as u32) };
                (&w * &y.pow((n - k) as u32)).scale(&generalized_binomial(&int(n), k))
            }
        };
        diff = diff - term;
    }
    diff
}

/// Rothe's or Abel's summation, exactly at `trials` random rational
/// `(A, B, C)` and symbolically in `A, B, C`. For Rothe the `B = 0`
/// reduction to Chu–Vandermonde is checked at the same points.
pub fn verify_classical(which: Classical, n: u32, trials: usize, seed: u64) -> Result<Verdict> {
    let ni = n as i64;
    let mut r = rng::label_stream(seed, &format!("{}/{n}", which.id()));
    let mut failures = 0u64;
    let mut cv_failures = 0u64;
    for _ in 0..trials {
        let a = rng::rational(&mut r, rng::DEFAULT_BOUND);
        let b = rng::rational(&mut r, rng::DEFAULT_BOUND);
        let c = rng::rational(&mut r, rng::DEFAULT_BOUND);
        let (lhs, terms) = classical_sides(which, ni, &a, &b, &c);
        if lhs != terms.iter().fold(Rational::zero(), |s, t| s + t) {
            failures += 1;
        }
        if which == Classical::Rothe {
            let cv: Rational = (0..=ni).map(|k| generalized_binomial(&a, k) * generalized_binomial(&c, ni - k)).sum();
            let (lhs0, terms0) = classical_sides(which, ni, &a, &Rational::zero(), &c);
            let s0: Rational = terms0.into_iter().sum();
            if s0 != lhs0 || cv != lhs0 {
                cv_failures += 1;
            }
        }
    }
    let mut verdict = Verdict::new(which.id(), Mode::RandomRational)
        .param("n", n)
        .param("trials", trials)
        .param("seed", seed)
        .check(Verdict::new(which.id(), Mode::SymbolicExact).param("n", n).exact(classical_symbolic(which, ni)));
    if which == Classical::Rothe {
        verdict = verdict.check(
            Verdict::new("chu-vandermonde", Mode::RandomRational).param("n", n).count(cv_failures, trials as u64),
        );
    }
    Ok(verdict.count(failures, trials as u64))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LimitIdentity {
    RotheFromQ,
    AbelFromQ,
}

impl LimitIdentity {
    pub fn id(self) -> &'static str {
        match self {
            LimitIdentity::RotheFromQ => "rothe-from-q",
            LimitIdentity::AbelFromQ => "abel-from-q",
        }
    }

    fn classical(self) -> Classical {
        match self {
            LimitIdentity::RotheFromQ => Classical::Rothe,
            LimitIdentity::AbelFromQ => Classical::Abel,
        }
    }
}

/// Parameters for a q -> 1 limit sweep along `q = 1 - 2^{-j}`.
#[derive(Clone, Debug)]
pub struct LimitSweep {
    pub j_values: Vec<u32>,
    pub tolerance: f64,
    pub precision: u32,
}

impl Default for LimitSweep {
    fn default() -> Self {
        LimitSweep { j_values: (1..=20).collect(), tolerance: 1e-4, precision: 128 }
    }
}

/// `1 - 2^{-j}` exactly.
pub fn q_near_one(prec: u32, j: u32) -> ComplexHP {
    ComplexHP::from_rational(prec, &(Rational::one() - Rational::new(1.into(), num_bigint::BigInt::from(1) << j)))
}

/// Passes iff the last error is below `tol` and the final three decrease.
pub fn limit_verdict(id: &str, errors: &[(u32, f64)], tol: f64) -> Verdict {
    let last = errors.last().map(|e| e.1).unwrap_or(f64::INFINITY);
    let tail: Vec<f64> = errors.iter().rev().take(3).map(|e| e.1).collect();
    let monotone = tail.len() == 3 && tail[0] < tail[1] && tail[1] < tail[2];
    let exact = errors.iter().all(|e| e.1 == 0.0);
    let mut v = Verdict::new(id, Mode::NumericLimit);
    if let Some((j, _)) = errors.last() {
        v = v.param("q", format!("1-2^-{j}"));
    }
    v = v.magnitude(last, tol);
    if !(monotone || exact) {
        v = v.fail("errors do not decrease over the final three iterates");
    }
    v
}

/// Numeric `q -> 1` limit of the q-Abel–Rothe (`a = q^A - B, b = B,
/// c = q^{-A-C}`, divided by `(q)_n`) or q-Abel (`a = A/(A+C) +
/// B/((A+C)(1-q)), b = -B/((A+C)(1-q))`) summation, compared termwise with
/// the classical summands.
pub fn numeric_limit_q_to_1(which: LimitIdentity, n: u32, abc: [Rational; 3], sweep: &LimitSweep) -> Result<Verdict> {
    let [ar, br, cr] = abc;
    let ni = n as i64;
    let prec = sweep.precision;
    let (_, classical) = classical_sides(which.classical(), ni, &ar, &br, &cr);
    let classical: Vec<ComplexHP> = classical.iter().map(|t| ComplexHP::from_rational(prec, t)).collect();
    let big_a = ComplexHP::from_rational(prec, &ar);
    let big_b = ComplexHP::from_rational(prec, &br);
    let big_c = ComplexHP::from_rational(prec, &cr);
    let one = ComplexHP::one(prec);
    let mut errors = Vec::new();
    for &j in &sweep.j_values {
        let q = q_near_one(prec, j);
        let (pt, scale) = match which {
            LimitIdentity::RotheFromQ => {
                let a = q.pow(&big_a).sub(&big_b);
                let c = q.pow(&big_a.add(&big_c).neg());
                let pt = point(&ComplexHP::zero(prec), &[(Var::Q, q.clone()), (Var::A, a), (Var::B, big_b.clone()), (Var::C, c)]);
                (pt, if n % 2 == 0 { one.clone() } else { one.neg() })
            }
            LimitIdentity::AbelFromQ => {
                let ac = big_a.add(&big_c);
                let d = ac.mul(&one.sub(&q));
                let a = big_a.div(&ac).and_then(|x| big_b.div(&d).map(|y| x.add(&y)));
                let b = big_b.neg().div(&d);
                let (a, b) = a.zip(b).ok_or_else(|| Error::PoleHit("A + C = 0".into()))?;
                let pt = point(&ComplexHP::zero(prec), &[(Var::Q, q.clone()), (Var::A, a), (Var::B, b)]);
                (pt, ac.powi(ni).expect("nonzero"))
            }
        };
        let mut err = 0.0;
        for k in 0..=ni {
            let term = match which {
                LimitIdentity::RotheFromQ => q_rothe_term(n, k).inv_poch(v(Var::Q), ni),
                LimitIdentity::AbelFromQ => q_abel_term(n, k),
            };
            let t = term.eval(&pt)?.mul(&scale);
            err += t.sub(&classical[k as usize]).abs_f64();
        }
        errors.push((j, err));
    }
    let mut v = limit_verdict(which.id(), &errors, sweep.tolerance);
    v.params.insert(0, ("n".into(), n.to_string()));
    let shown = [&ar, &br, &cr].map(rational::to_string);
    v.params.insert(1, ("point".into(), format!("({}, {}, {})", shown[0], shown[1], shown[2])));
    Ok(v.precision(prec))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::rat;
    use crate::algebra::WeightMap;

    #[test]
    fn q_binomial_small_cases() {
        for n in [0, 2, 10] {
            assert!(verify_q_binomial(n).unwrap().pass, "n = {n}");
        }
        // n = 2: 1 - (1+q) z + q z^2
        let s: LaurentPoly = (0..=2).map(|k| q_binomial_term(2, k)).fold(LaurentPoly::zero(), |a, b| a + b);
        let expect = LaurentPoly::one() - v(Var::Z) - mono(1, &[(Var::Z, 1), (Var::Q, 1)]) + mono(1, &[(Var::Z, 2), (Var::Q, 1)]);
        assert_eq!(s, expect);
    }

    #[test]
    fn q_abel_rothe_n1_by_hand() {
        // k=0: 1 - c(a+b); k=1: -c(1-a-b); total 1 - c
        let t0 = q_rothe_term(1, 0).exact().unwrap();
        let t1 = q_rothe_term(1, 1).exact().unwrap();
        assert_eq!(t0, LaurentPoly::one() - &v(Var::C) * &(v(Var::A) + v(Var::B)));
        assert_eq!(t1, -(&v(Var::C) * &(LaurentPoly::one() - v(Var::A) - v(Var::B))));
        for n in 0..=4 {
            for s in [Specialization::None, Specialization::BZero, Specialization::AZero] {
                let v = verify_q_abel_rothe(n, s).unwrap();
                assert!(v.pass, "{v}");
            }
        }
    }

    #[test]
    fn literal_zero_term_cancels_under_grading() {
        let w = WeightMap::standard();
        for n in 0..4 {
            let literal = q_rothe_term_literal(n, 0).expand(&w, 8).unwrap();
            let cancelled = q_rothe_term(n, 0).expand(&w, 8).unwrap();
            assert_eq!(literal, cancelled);
        }
    }

    #[test]
    fn q_abel_small() {
        let t1 = q_abel_term(1, 1).exact().unwrap();
        assert_eq!(t1, v(Var::A) + v(Var::B));
        for n in 0..=5 {
            assert!(verify_q_abel(n).unwrap().pass);
        }
    }

    #[test]
    fn rothe_limit_to_abel() {
        for n in 0..=4 {
            let v = limit_qrothe_to_qabel(n).unwrap();
            assert!(v.pass, "{v}");
        }
    }

    #[test]
    fn saalschutz_at_fixed_point() {
        let pt = point(&Rational::zero(), &[(Var::A, int(2)), (Var::B, int(3)), (Var::C, int(5)), (Var::Q, rat(1, 2))]);
        let d = hyp_partial_sum_at(&lhs_3phi2(1), 0, 1, &pt).unwrap() - rhs_3phi2(1).eval(&pt).unwrap();
        assert!(d.is_zero());
        // a q = 1 here, a genuine pole of the shifted window sum
        assert!(matches!(saalschutz_chain_residuals(2, &pt), Err(Error::PoleHit(_))));
        let pt = point(&Rational::zero(), &[(Var::A, int(3)), (Var::B, int(5)), (Var::C, int(7)), (Var::Q, rat(1, 2))]);
        for n in 0..=3 {
            let d = saalschutz_chain_residuals(n, &pt).unwrap();
            assert!(d.iter().all(|x| x.is_zero()), "n = {n}: {d:?}");
        }
    }

    #[test]
    fn classical_small() {
        let v = verify_classical(Classical::Abel, 1, 5, 1).unwrap();
        assert!(v.pass);
        let v = verify_classical(Classical::Rothe, 3, 5, 1).unwrap();
        assert!(v.pass, "{v}");
    }

    #[test]
    fn abel_limit_converges() {
        let v = numeric_limit_q_to_1(LimitIdentity::AbelFromQ, 2, [int(1), rat(1, 3), int(2)], &LimitSweep::default()).unwrap();
        assert!(v.pass, "{v}");
        let v = numeric_limit_q_to_1(LimitIdentity::RotheFromQ, 3, [int(2), rat(1, 2), int(1)], &LimitSweep::default()).unwrap();
        assert!(v.pass, "{v}");
    }

    #[test]
    fn limit_n0_is_exact() {
        let v = numeric_limit_q_to_1(LimitIdentity::AbelFromQ, 0, [int(1), rat(1, 3), int(2)], &LimitSweep::default()).unwrap();
        assert!(v.pass, "{v}");
        assert!(v.residual.is_zero());
    }
}
