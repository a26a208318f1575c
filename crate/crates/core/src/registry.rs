//! The identity registry: every verifiable identity with its supported modes
//! and a runner that turns a [`RunConfig`] into one [`Verdict`].

use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;

use crate::abel_rothe::{
    extract_extrc, lambert_region, numeric_lambert, random_region_points, reversal_equivalence, splitting_identities,
    verify_rgj, verify_rgjc, LambertParams, NumericParams, RgjMode,
};
use crate::algebra::rational::{int, rat, to_f64};
use crate::bilateral::{
    bilateralize_window, psi1_to_jacobi, verify_1psi1_numeric, verify_1psi1_window, verify_jtpi, verify_pentagonal,
    Psi1Params, WindowSource,
};
use crate::config::{parse_complex, RunConfig};
use crate::convergence::{
    containment_check, convergence_probe, default_windows, dominating_bound_check, m_substitution, ProbeTarget, RegionPoint,
};
use crate::error::{Error, Result};
use crate::multidim::{
    default_x, exponent_identity, macdonald_specialization, permutations, product_poch_identity, r1_collapse,
    vandermonde_expand, vandermonde_product, verify_armacdid, verify_mrgj, verify_mrgjc, verify_rothe3, x_vars, MultiMode,
};
use crate::numeric::ComplexHP;
use crate::rng;
use crate::terminating::{
    limit_qrothe_to_qabel, numeric_limit_q_to_1, verify_classical, verify_pfaff_saalschutz, verify_q_abel,
    verify_q_abel_rothe, verify_q_binomial, Classical, LimitIdentity, LimitSweep, Specialization,
};
use crate::verdict::{Mode, Verdict};

type Runner = fn(&RunConfig, Mode) -> Result<Verdict>;

/// One registry entry. The first listed mode is the default.
pub struct Entry {
    pub id: &'static str,
    pub description: &'static str,
    pub modes: &'static [Mode],
    runner: Runner,
}

impl Entry {
    pub fn default_mode(&self) -> Mode {
        self.modes[0]
    }

    pub fn supports(&self, mode: Mode) -> bool {
        self.modes.contains(&mode)
    }

    /// Runs in `mode` (the default if `None`), timing the run if asked.
    pub fn run(&self, cfg: &RunConfig, mode: Option<Mode>) -> Result<Verdict> {
        let mode = mode.unwrap_or(self.default_mode());
        if !self.supports(mode) {
            return Err(Error::InvalidArgument(format!("{} does not support mode {mode}", self.id)));
        }
        let start = Instant::now();
        let mut v = (self.runner)(cfg, mode)?;
        v.identity_id = self.id.to_string();
        if cfg.timings {
            v.elapsed = Some(start.elapsed());
        }
        Ok(v)
    }
}

use Mode::*;

macro_rules! entry {
    ($id:literal, $desc:literal, [$($m:ident),+], $run:expr) => {
        Entry { id: $id, description: $desc, modes: &[$($m),+], runner: $run }
    };
}

static REGISTRY: &[Entry] = &[
    entry!("q-binomial", "terminating q-binomial theorem sum_k [n,k](-1)^k q^C(k,2) z^k = (z)_n", [SymbolicExact], run_q_binomial),
    entry!("q-binomial-window", "symmetric-window form of the q-binomial theorem after n -> 2n, k -> k+n", [WindowExact], |c, _| window(c, WindowSource::QBinomial, &[4])),
    entry!("jacobi-triple-product", "Jacobi's triple product identity, formal in q and z", [Formal], |c, _| verify_jtpi(order(c, 12))),
    entry!("pentagonal", "Euler's pentagonal number theorem as a specialization of the triple product", [Formal], |c, _| verify_pentagonal(order(c, 20))),
    entry!("pfaff-saalschutz", "terminating q-Pfaff-Saalschutz summation", [RandomRational, WindowExact], run_saalschutz),
    entry!("1psi1", "Ramanujan's 1psi1 summation, |b/a| < |z| < 1", [Numeric, WindowExact], run_psi1),
    entry!("1psi1-chain", "the doubled and substituted window identities on the way from q-Pfaff-Saalschutz to 1psi1", [WindowExact], run_psi1_chain),
    entry!("1psi1-to-jacobi", "1psi1 at z -> z/a, b = 1/a, a -> infinity recovers the triple product", [NumericLimit], run_psi1_to_jacobi),
    entry!("q-abel-rothe", "terminating q-Abel-Rothe summation (with the b = 0 and a = 0 cases)", [SymbolicExact, WindowExact], run_q_abel_rothe),
    entry!("q-abel", "terminating q-Abel summation", [SymbolicExact], |c, _| sweep("q-abel", SymbolicExact, ns(c, 10), verify_q_abel)),
    entry!("q-rothe-to-q-abel", "q-Abel as the c -> 0 limit of q-Abel-Rothe", [SymbolicExact], |c, _| sweep("q-rothe-to-q-abel", SymbolicExact, ns(c, 6), limit_qrothe_to_qabel)),
    entry!("rothe", "Rothe's convolution identity at random rational points", [RandomRational], |c, _| run_classical(c, Classical::Rothe)),
    entry!("abel", "Abel's convolution identity at random rational points", [RandomRational], |c, _| run_classical(c, Classical::Abel)),
    entry!("rothe-limit", "q -> 1 bridge from q-Abel-Rothe to Rothe", [NumericLimit], |c, _| run_limit(c, LimitIdentity::RotheFromQ)),
    entry!("abel-limit", "q -> 1 bridge from q-Abel to Abel", [NumericLimit], |c, _| run_limit(c, LimitIdentity::AbelFromQ)),
    entry!("rgj", "bilateral Abel-Rothe generalization of the triple product, max(|az|,|b|) < 1", [Formal, Numeric, WindowExact], run_rgj),
    entry!("rgjc", "reversed form of the bilateral Abel-Rothe triple product", [Formal, Numeric, WindowExact], run_rgjc),
    entry!("rgj-reversal", "k -> -k, a -> bz, b -> az, c -> 1/z maps the q-Abel-Rothe window to the reversed form", [WindowExact], |c, _| reversal_equivalence(window_n(c, 8))),
    entry!("rgj-splitting", "the two product identities splitting each bilateral summand into convergent parts", [SymbolicExact], |c, _| splitting_identities(c.n.unwrap_or(3), order(c, 8))),
    entry!("extrc", "unilateral expansion obtained from the z^n coefficient of the bilateral sum", [Formal], run_extrc),
    entry!("lambert", "Lambert's series e^{AZ}/(1-BZ), with the q -> 1 bridge", [Numeric], run_lambert),
    entry!("rothe3", "A_{r-1} terminating q-Abel-Rothe summation", [SymbolicExact, WindowExact], run_rothe3),
    entry!("mrgj", "A_{r-1} bilateral Abel-Rothe triple product", [Formal, Numeric, WindowExact], run_mrgj),
    entry!("mrgjc", "reversed A_{r-1} bilateral Abel-Rothe triple product", [Formal, Numeric, WindowExact], run_mrgjc),
    entry!("mrgj-r1-collapse", "r = 1 instances of the multiple series coincide with the one-variable ones", [Formal], |c, _| r1_collapse(order(c, 12))),
    entry!("armacdid", "Macdonald-type identity from the z^M coefficient of the multiple series", [Formal], run_armacdid),
    entry!("macdonald", "a = b = 0, M = 0 case of the Macdonald-type identity", [Formal], |c, _| macdonald_specialization(c.r.unwrap_or(2), order(c, 6))),
    entry!("vandermonde", "signed permutation expansion of prod_{i<j}(x_i q^{k_i} - x_j q^{k_j})", [SymbolicExact], run_vandermonde),
    entry!("exponent-identity", "the exponent bookkeeping identity of the permutation expansion", [SymbolicExact], run_exponent_identity),
    entry!("product-poch", "three forms of prod_{i,j}(x_i q/x_j)_{k_i-k_j}", [SymbolicExact], run_product_poch),
    entry!("m-substitution", "k_i = sum_{l>=i} m_l round trip", [SymbolicExact], run_m_substitution),
    entry!("containment", "the old convergence region lies strictly inside max(|az|,|b|) < 1", [Sampling], run_containment),
    entry!("dominating-bound", "ratio tests of the dominating single series, limit |az|^r", [Numeric], run_dominating),
    entry!("probe", "partial-sum behaviour on both sides of the convergence boundary", [Numeric], run_probe),
];

pub fn registry() -> &'static [Entry] {
    REGISTRY
}

pub fn lookup(id: &str) -> Option<&'static Entry> {
    REGISTRY.iter().find(|e| e.id == id)
}

/// Runs the configured identities (all if none are named) in parallel and
/// returns the verdicts sorted by id. With `--all` an explicit mode skips
/// entries that do not support it; named entries must support it.
pub fn run_selected(cfg: &RunConfig, mode: Option<Mode>) -> Result<Vec<Verdict>> {
    let entries: Vec<&Entry> = if cfg.identities.is_empty() {
        REGISTRY.iter().filter(|e| mode.map_or(true, |m| e.supports(m))).collect()
    } else {
        cfg.identities
            .iter()
            .map(|id| lookup(id).ok_or_else(|| Error::InvalidArgument(format!("unknown identity {id:?}"))))
            .collect::<Result<_>>()?
    };
    let mut out: Vec<(&str, Result<Verdict>)> = entries.par_iter().map(|e| (e.id, e.run(cfg, mode))).collect();
    out.sort_by(|x, y| x.0.cmp(y.0));
    out.into_iter().map(|(_, v)| v).collect()
}

/// Entries with a sampled numeric mode, and that mode.
pub fn numeric_mode(e: &Entry) -> Option<Mode> {
    [Numeric, NumericLimit, Sampling].into_iter().find(|m| e.supports(*m))
}

/// Replays the bilateralization of `source` for `n = 0..=n_max`, one window
/// identity verdict per step.
pub fn derive(source: WindowSource, n_max: i64, r: usize, seed: u64) -> Result<Vec<Verdict>> {
    let widths: Vec<Vec<i64>> = if source == WindowSource::Rothe3 {
        (0..=n_max).map(|n| vec![n; r.max(1)]).collect()
    } else {
        (0..=n_max).map(|n| vec![n]).collect()
    };
    widths
        .par_iter()
        .map(|n| {
            let wi = bilateralize_window(source, n, None, seed)?;
            Ok(wi.verdict.param("terms", wi.rhs_terms.len()))
        })
        .collect()
}

/// Wraps sub-verdicts into one verdict counting the failures.
pub fn suite(id: &str, mode: Mode, parts: Vec<Verdict>) -> Verdict {
    let failures = parts.iter().filter(|v| !v.pass).count() as u64;
    let total = parts.len() as u64;
    parts.into_iter().fold(Verdict::new(id, mode), Verdict::check).count(failures, total)
}

fn sweep<T: Sync>(id: &str, mode: Mode, items: Vec<T>, f: impl Fn(T) -> Result<Verdict> + Sync + Send) -> Result<Verdict>
where
    T: Send,
{
    let parts: Vec<Verdict> = items.into_par_iter().map(f).collect::<Result<_>>()?;
    Ok(suite(id, mode, parts))
}

fn order(c: &RunConfig, default: i64) -> i64 {
    c.order.unwrap_or(default)
}

fn window_n(c: &RunConfig, default: i64) -> i64 {
    c.n.unwrap_or(default)
}

/// `[n]` if given, else `0..=max`.
fn ns(c: &RunConfig, max: u32) -> Vec<u32> {
    match c.n {
        Some(n) => vec![n.max(0) as u32],
        None => (0..=max).collect(),
    }
}

fn bridge_sweep(c: &RunConfig) -> LimitSweep {
    LimitSweep { j_values: (1..=16).collect(), tolerance: c.tol.unwrap_or(1e-3), precision: c.prec() }
}

fn window(c: &RunConfig, source: WindowSource, default: &[i64]) -> Result<Verdict> {
    let n = match (&c.n_vec, c.n) {
        (Some(v), _) => v.clone(),
        (None, Some(n)) if default.len() == 1 => vec![n],
        _ => default.to_vec(),
    };
    Ok(bilateralize_window(source, &n, None, c.seed())?.verdict)
}

fn run_q_binomial(c: &RunConfig, _: Mode) -> Result<Verdict> {
    sweep("q-binomial", SymbolicExact, ns(c, 20), verify_q_binomial)
}

fn run_saalschutz(c: &RunConfig, mode: Mode) -> Result<Verdict> {
    if mode == WindowExact {
        return window(c, WindowSource::PfaffSaalschutz, &[2]);
    }
    let (trials, seed) = (c.trials.unwrap_or(100), c.seed());
    sweep("pfaff-saalschutz", RandomRational, ns(c, 4), |n| verify_pfaff_saalschutz(n, trials, seed))
}

fn run_psi1_chain(c: &RunConfig, _: Mode) -> Result<Verdict> {
    let (trials, seed) = (c.trials.unwrap_or(100), c.seed());
    sweep("1psi1-chain", WindowExact, ns(c, 4), |n| verify_1psi1_window(n, trials, seed))
}

fn psi1_params(c: &RunConfig, a: &str, b: &str, z: &str, q: &str) -> Result<Psi1Params> {
    Ok(Psi1Params {
        a: c.complex(&c.a, a)?,
        b: c.complex(&c.b, b)?,
        z: c.complex(&c.z, z)?,
        q: c.complex(&c.q, q)?,
        tol: c.tol_or_default(),
        max_window: c.max_window.unwrap_or(100_000),
    })
}

fn point_given(c: &RunConfig) -> bool {
    c.a.is_some() || c.b.is_some() || c.z.is_some() || c.q.is_some() || c.x.is_some()
}

/// Random points with `|b/a| < |z| < 1` at `q = 1/2`, followed by the
/// specializations `b = q` and `b = aq` at `q = 1/10`.
pub fn psi1_points(seed: u64, count: usize, prec: u32, tol: f64) -> Vec<Psi1Params> {
    let mut g = rng::label_stream(seed, "1psi1/points");
    let sign = |g: &mut rand_chacha::ChaCha8Rng| if g.gen_bool(0.5) { 1.0 } else { -1.0 };
    let mk = |a: f64, b: f64, z: f64, q: f64| Psi1Params {
        a: ComplexHP::real(prec, a),
        b: ComplexHP::real(prec, b),
        z: ComplexHP::real(prec, z),
        q: ComplexHP::real(prec, q),
        tol,
        max_window: 100_000,
    };
    let special = count.min(4);
    let mut out: Vec<Psi1Params> = (0..count - special)
        .map(|_| {
            let z = rng::uniform(&mut g, 0.3, 0.8) * sign(&mut g);
            let a = rng::uniform(&mut g, 1.2, 4.0) * sign(&mut g);
            let b = a * z.abs() * rng::uniform(&mut g, -0.8, 0.8);
            mk(a, b, z, 0.5)
        })
        .collect();
    let q = 0.1;
    for i in 0..special {
        let z = rng::uniform(&mut g, 0.3, 0.8) * sign(&mut g);
        let a = rng::uniform(&mut g, 1.2, 4.0) * sign(&mut g);
        let b = if i % 2 == 0 { q } else { a * q };
        out.push(mk(a, b, z, q));
    }
    out
}

fn run_psi1(c: &RunConfig, mode: Mode) -> Result<Verdict> {
    if mode == WindowExact {
        let n = c.n.unwrap_or(3).max(0) as u32;
        return verify_1psi1_window(n, c.trials.unwrap_or(100), c.seed());
    }
    if point_given(c) {
        return verify_1psi1_numeric(&psi1_params(c, "2", "0.1", "0.5", "0.5")?);
    }
    let pts = psi1_points(c.seed(), c.samples.unwrap_or(20), c.prec(), c.tol_or_default());
    sweep("1psi1", Numeric, pts, |p| verify_1psi1_numeric(&p))
}

fn run_psi1_to_jacobi(c: &RunConfig, _: Mode) -> Result<Verdict> {
    let z = c.complex(&c.z, "0.3")?;
    let q = c.complex(&c.q, "0.5")?;
    let js: Vec<u32> = (2..=20).collect();
    psi1_to_jacobi(&z, &q, &js, c.tol.unwrap_or(1e-6))
}

fn run_q_abel_rothe(c: &RunConfig, mode: Mode) -> Result<Verdict> {
    if mode == WindowExact {
        return window(c, WindowSource::QAbelRothe, &[3]);
    }
    let specs = match &c.specialization {
        Some(s) => vec![Specialization::parse(s).ok_or_else(|| Error::InvalidArgument(format!("unknown specialization {s:?}")))?],
        None => vec![Specialization::None, Specialization::BZero, Specialization::AZero],
    };
    let cases: Vec<(u32, Specialization)> = ns(c, 10).into_iter().flat_map(|n| specs.iter().map(move |&s| (n, s))).collect();
    sweep("q-abel-rothe", SymbolicExact, cases, |(n, s)| verify_q_abel_rothe(n, s))
}

fn run_classical(c: &RunConfig, which: Classical) -> Result<Verdict> {
    let (trials, seed) = (c.trials.unwrap_or(50), c.seed());
    sweep(which.id(), RandomRational, ns(c, 5), |n| verify_classical(which, n, trials, seed))
}

fn run_limit(c: &RunConfig, which: LimitIdentity) -> Result<Verdict> {
    let abc = [c.rational(&c.a, "1")?, c.rational(&c.b, "1/3")?, c.rational(&c.c, "2")?];
    let n = c.n.unwrap_or(3).max(0) as u32;
    numeric_limit_q_to_1(which, n, abc, &bridge_sweep(c))
}

fn numeric_params(c: &RunConfig, r: usize) -> Result<NumericParams> {
    let prec = c.prec();
    let x = match &c.x {
        Some(xs) => xs.iter().map(|s| parse_complex(prec, s)).collect::<Result<_>>()?,
        None if r > 0 => default_x(r, prec),
        None => Vec::new(),
    };
    Ok(NumericParams {
        a: c.complex(&c.a, "0.3")?,
        b: c.complex(&c.b, "0.4")?,
        z: c.complex(&c.z, "0.9")?,
        q: c.complex(&c.q, "0.5")?,
        x,
        tol: c.tol_or_default(),
        max_window: c.max_window.unwrap_or(4096),
    })
}

fn run_rgj_form(c: &RunConfig, mode: Mode, id: &str, f: fn(RgjMode<'_>) -> Result<Verdict>) -> Result<Verdict> {
    match mode {
        Formal => f(RgjMode::Formal { order: order(c, 12) }),
        WindowExact => f(RgjMode::WindowExact { n: window_n(c, 3).max(0) as u32, seed: c.seed() }),
        _ if point_given(c) => f(RgjMode::Numeric(&numeric_params(c, 0)?)),
        _ => {
            let pts = random_region_points(c.seed(), id, c.samples.unwrap_or(20), 0.9, c.prec(), c.tol_or_default());
            sweep(id, Numeric, pts, |p| f(RgjMode::Numeric(&p)))
        }
    }
}

fn run_rgj(c: &RunConfig, mode: Mode) -> Result<Verdict> {
    run_rgj_form(c, mode, "rgj", verify_rgj)
}

fn run_rgjc(c: &RunConfig, mode: Mode) -> Result<Verdict> {
    run_rgj_form(c, mode, "rgjc", verify_rgjc)
}

fn run_extrc(c: &RunConfig, _: Mode) -> Result<Verdict> {
    let ns: Vec<i64> = match c.n {
        Some(n) => vec![n],
        None => (-2..=2).collect(),
    };
    extract_extrc(order(c, 10), &ns)
}

/// Admissible `(A, B, Z)` with `|BZ e^{1-BZ}| < 1`; the first is the
/// documented default `(1, 1/5, 1/2)`.
pub fn lambert_points(seed: u64, count: usize) -> Vec<[crate::algebra::Rational; 3]> {
    let mut g = rng::label_stream(seed, "lambert/points");
    let mut out = vec![[int(1), rat(1, 5), rat(1, 2)]];
    while out.len() < count {
        let a = rat(g.gen_range(1..=30), 10);
        let b = rat(g.gen_range(-5..=5), 10);
        let z = rat(g.gen_range(1..=6) * if g.gen_bool(0.5) { 1 } else { -1 }, 10);
        if lambert_region(to_f64(&b), to_f64(&z)) {
            out.push([a, b, z]);
        }
    }
    out.truncate(count);
    out
}

fn run_lambert(c: &RunConfig, _: Mode) -> Result<Verdict> {
    let tol = c.tol.unwrap_or(1e-12);
    let mk = |[a, b, z]: [crate::algebra::Rational; 3], bridge: bool| LambertParams {
        a,
        b,
        z,
        j_max: 60,
        prec: c.prec(),
        tol,
        bridge: bridge.then(|| LimitSweep { j_values: (1..=16).collect(), tolerance: 1e-3, precision: c.prec() }),
    };
    if c.a.is_some() || c.b.is_some() || c.z.is_some() {
        let abc = [c.rational(&c.a, "1")?, c.rational(&c.b, "1/5")?, c.rational(&c.z, "1/2")?];
        return numeric_lambert(&mk(abc, true));
    }
    let pts: Vec<_> = lambert_points(c.seed(), c.samples.unwrap_or(10)).into_iter().enumerate().collect();
    sweep("lambert", Numeric, pts, |(i, p)| numeric_lambert(&mk(p, i == 0)))
}

/// Every `n` with `1 <= r <= 3` and `0 <= n_i <= 3`.
pub fn rothe3_cases(max_r: usize, max_n: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    for r in 1..=max_r {
        let mut n = vec![0i64; r];
        loop {
            out.push(n.clone());
            let Some(i) = n.iter().position(|&x| x < max_n) else { break };
            n[i] += 1;
            n[..i].iter_mut().for_each(|x| *x = 0);
        }
    }
    out
}

fn run_rothe3(c: &RunConfig, mode: Mode) -> Result<Verdict> {
    if mode == WindowExact {
        return window(c, WindowSource::Rothe3, &[1, 1]);
    }
    let cases = match &c.n_vec {
        Some(n) => vec![n.clone()],
        None => rothe3_cases(3, 3),
    };
    sweep("rothe3", SymbolicExact, cases, |n| verify_rothe3(&n))
}

/// Random points of the new region at `r = 2` with random unit-modulus `x`.
pub fn multi_points(seed: u64, label: &str, r: usize, count: usize, prec: u32, tol: f64) -> Vec<NumericParams> {
    let mut g = rng::label_stream(seed, &format!("{label}/x"));
    random_region_points(seed, label, count, 0.9, prec, tol)
        .into_iter()
        .map(|mut p| {
            p.x = (0..r).map(|j| {
                let frac = rat(2 * j as i64 * 97 + g.gen_range(1..97), 97 * r as i64);
                ComplexHP::unit_pi_fraction(prec, &frac)
            }).collect();
            p
        })
        .collect()
}

fn run_multi(c: &RunConfig, mode: Mode, id: &str, f: fn(MultiMode<'_>) -> Result<Verdict>) -> Result<Verdict> {
    let r = c.r.or(c.x.as_ref().map(Vec::len)).unwrap_or(2);
    match mode {
        Formal => f(MultiMode::Formal { r, order: order(c, 8) }),
        WindowExact => {
            let n = c.n_vec.clone().unwrap_or_else(|| vec![1; r]);
            f(MultiMode::WindowExact { n: &n, seed: c.seed() })
        }
        _ if point_given(c) => f(MultiMode::Numeric(&numeric_params(c, r)?)),
        _ => {
            let pts = multi_points(c.seed(), id, r, c.samples.unwrap_or(10), c.prec(), c.tol_or_default());
            sweep(id, Numeric, pts, |p| f(MultiMode::Numeric(&p)))
        }
    }
}

fn run_mrgj(c: &RunConfig, mode: Mode) -> Result<Verdict> {
    run_multi(c, mode, "mrgj", verify_mrgj)
}

fn run_mrgjc(c: &RunConfig, mode: Mode) -> Result<Verdict> {
    run_multi(c, mode, "mrgjc", verify_mrgjc)
}

fn run_armacdid(c: &RunConfig, _: Mode) -> Result<Verdict> {
    let r = c.r.unwrap_or(2);
    let ms: Vec<i64> = c.m.map_or(vec![0, 1], |m| vec![m]);
    let n = order(c, 6);
    sweep("armacdid", Formal, ms, |m| verify_armacdid(r, m, n))
}

fn run_vandermonde(c: &RunConfig, _: Mode) -> Result<Verdict> {
    let mut g = rng::label_stream(c.seed(), "vandermonde");
    let count = c.samples.unwrap_or(100);
    let mut failures = 0u64;
    for _ in 0..count {
        let r = g.gen_range(1..=4);
        let k: Vec<i64> = (0..r).map(|_| g.gen_range(-4..=4)).collect();
        let xs = x_vars(r);
        if vandermonde_expand(&k, &xs) != vandermonde_product(&k, &xs) {
            failures += 1;
        }
    }
    Ok(Verdict::new("vandermonde", SymbolicExact).param("instances", count).param("seed", c.seed()).count(failures, count as u64))
}

fn run_exponent_identity(c: &RunConfig, _: Mode) -> Result<Verdict> {
    let max_r = c.r.unwrap_or(4);
    let bound = c.n.unwrap_or(5);
    let mut cases = Vec::new();
    for r in 1..=max_r {
        let side = (2 * bound + 1) as usize;
        for idx in 0..side.pow(r as u32) {
            let mut rest = idx;
            let k: Vec<i64> = (0..r)
                .map(|_| {
                    let d = rest % side;
                    rest /= side;
                    d as i64 - bound
                })
                .collect();
            cases.push(k);
        }
    }
    let failures = cases.par_iter().filter(|k| !exponent_identity(k)).count() as u64;
    Ok(Verdict::new("exponent-identity", SymbolicExact)
        .param("max_r", max_r)
        .param("bound", bound)
        .count(failures, cases.len() as u64))
}

fn run_product_poch(c: &RunConfig, _: Mode) -> Result<Verdict> {
    let n = order(c, 8);
    let cases: Vec<Vec<i64>> = match &c.k {
        Some(k) => vec![k.clone()],
        None => {
            let mut v: Vec<Vec<i64>> = (-2..=2).flat_map(|a| (-2..=2).map(move |b| vec![a, b])).collect();
            v.extend([vec![1, 0, -1], vec![2, -1, 0], vec![0, 0, 0]]);
            v
        }
    };
    sweep("product-poch", SymbolicExact, cases, |k| product_poch_identity(&k, n))
}

fn run_m_substitution(c: &RunConfig, _: Mode) -> Result<Verdict> {
    if let Some(k) = &c.k {
        return Ok(m_substitution(k).1);
    }
    let mut g = rng::label_stream(c.seed(), "m-substitution");
    let count = c.samples.unwrap_or(1000);
    let mut failures = 0u64;
    for _ in 0..count {
        let r = g.gen_range(1..=6);
        let k: Vec<i64> = (0..r).map(|_| g.gen_range(-50..=50)).collect();
        if !m_substitution(&k).1.pass {
            failures += 1;
        }
    }
    Ok(Verdict::new("m-substitution", SymbolicExact).param("vectors", count).param("seed", c.seed()).count(failures, count as u64))
}

fn run_containment(c: &RunConfig, _: Mode) -> Result<Verdict> {
    let rs: Vec<usize> = c.r.map_or(vec![2, 3], |r| vec![r]);
    let (samples, seed) = (c.samples.unwrap_or(10_000), c.seed());
    sweep("containment", Sampling, rs, |r| containment_check(r, samples, seed))
}

/// `count` points with `|az| < 1` at `z = 1`, unit-modulus `x` and a
/// permutation `sigma` cycling through `S_r`.
pub fn dominating_points(seed: u64, count: usize) -> Vec<(Vec<usize>, RegionPoint)> {
    let mut g = rng::label_stream(seed, "dominating");
    let prec = 64;
    (0..count)
        .map(|i| {
            let r = 2 + i % 2;
            let perms = permutations(r);
            let sigma = perms[g.gen_range(0..perms.len())].0.clone();
            let p = RegionPoint {
                a: ComplexHP::real(prec, rng::uniform(&mut g, 0.1, 0.8)),
                b: ComplexHP::real(prec, rng::uniform(&mut g, -0.5, 0.5)),
                z: ComplexHP::one(prec),
                x: default_x(r, prec),
                q: ComplexHP::real(prec, 0.5),
            };
            (sigma, p)
        })
        .collect()
}

fn run_dominating(c: &RunConfig, _: Mode) -> Result<Verdict> {
    let n_terms = c.order.unwrap_or(60);
    if let Some(sigma) = &c.sigma {
        let prec = c.prec();
        let r = sigma.len();
        let x = match &c.x {
            Some(xs) => xs.iter().map(|s| parse_complex(prec, s)).collect::<Result<_>>()?,
            None => default_x(r, prec),
        };
        let p = RegionPoint { a: c.complex(&c.a, "0.5")?, b: c.complex(&c.b, "0.2")?, z: c.complex(&c.z, "1")?, x, q: c.complex(&c.q, "0.5")? };
        return dominating_bound_check(sigma, &p, n_terms);
    }
    sweep("dominating-bound", Numeric, dominating_points(c.seed(), c.samples.unwrap_or(10)), |(s, p)| dominating_bound_check(&s, &p, n_terms))
}

fn run_probe(c: &RunConfig, _: Mode) -> Result<Verdict> {
    let windows = c.windows.clone().unwrap_or_else(default_windows);
    let tol = c.tol.unwrap_or(1e-10);
    if let Some(t) = &c.target {
        let target = ProbeTarget::parse(t).ok_or_else(|| Error::InvalidArgument(format!("unknown probe target {t:?}")))?;
        let r = if matches!(target, ProbeTarget::Mrgj | ProbeTarget::Mrgjc) { c.r.unwrap_or(2) } else { 0 };
        let p = NumericParams { tol, ..numeric_params(c, r)? };
        return convergence_probe(target, &p, &windows);
    }
    let prec = c.prec().min(64).max(crate::numeric::MIN_PRECISION);
    let mut cases = Vec::new();
    for target in [ProbeTarget::Rgj, ProbeTarget::Rgjc, ProbeTarget::Mrgj, ProbeTarget::Mrgjc] {
        let multi = matches!(target, ProbeTarget::Mrgj | ProbeTarget::Mrgjc);
        for b in [0.4, 1.3] {
            let mut p = NumericParams::real(prec, 0.3, b, 0.9, 0.5, tol);
            if multi {
                p.x = default_x(2, prec);
            }
            cases.push((target, p));
        }
    }
    sweep("probe", Numeric, cases, |(t, p)| convergence_probe(t, &p, &windows))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_is_large_and_unique() {
        assert!(REGISTRY.len() >= 18);
        let mut ids: Vec<&str> = REGISTRY.iter().map(|e| e.id).collect();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), REGISTRY.len());
        assert!(REGISTRY.iter().all(|e| !e.modes.is_empty() && !e.description.is_empty()));
    }

    #[test]
    fn rothe3_case_count() {
        assert_eq!(rothe3_cases(3, 3).len(), 4 + 16 + 64);
        assert_eq!(rothe3_cases(1, 0), vec![vec![0]]);
    }

    #[test]
    fn psi1_points_lie_in_the_region() {
        for p in psi1_points(5, 20, 64, 1e-10) {
            crate::bilateral::psi1_region(&p).unwrap();
        }
    }

    #[test]
    fn unsupported_mode_is_a_usage_error() {
        let e = lookup("q-binomial").unwrap();
        assert!(matches!(e.run(&RunConfig::default(), Some(Numeric)), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn results_are_sorted() {
        let cfg = RunConfig { identities: vec!["q-binomial".into(), "abel".into()], n: Some(2), ..Default::default() };
        let v = run_selected(&cfg, None).unwrap();
        assert_eq!(v.iter().map(|v| v.identity_id.as_str()).collect::<Vec<_>>(), ["abel", "q-binomial"]);
        assert!(v.iter().all(|v| v.pass));
    }
}
