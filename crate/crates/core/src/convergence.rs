//! Convergence regions of the bilateral and multilateral series: the region
//! predicates, containment of the older region in the newer one, the
//! index substitution behind the dominating series, and empirical probes.

use rayon::prelude::*;
use rug::ops::Pow;
use rug::Float;

use crate::abel_rothe::{NumericParams, RgjForm};
use crate::bilateral::format_c;
use crate::error::{Error, Result};
use crate::multidim::{shell, MultiForm};
use crate::numeric::ComplexHP;
use crate::rng;
use crate::verdict::{Mode, Verdict};

/// A numeric point for the region predicates.
#[derive(Clone, Debug)]
pub struct RegionPoint {
    pub a: ComplexHP,
    pub b: ComplexHP,
    pub z: ComplexHP,
    pub x: Vec<ComplexHP>,
    pub q: ComplexHP,
}

impl RegionPoint {
    pub fn r(&self) -> usize {
        self.x.len()
    }

    fn prec(&self) -> u32 {
        self.a.prec()
    }

    pub fn az(&self) -> Float {
        self.a.mul(&self.z).abs()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Region {
    /// `max(|az|, |b|) < 1`.
    New,
    /// `|az| < |q^{(r-1)/2} x_j^{-r} prod_i x_i| < |q^{r-1}/b|` for every `j`.
    Old,
}

pub fn region_predicate(p: &RegionPoint, which: Region) -> Result<bool> {
    match which {
        Region::New => Ok(p.az() < 1 && p.b.abs() < 1),
        Region::Old => {
            let r = p.r();
            if r == 0 {
                return Err(Error::InvalidArgument("the old region needs r >= 1".into()));
            }
            let prec = p.prec();
            let q_abs = p.q.abs();
            let mut prod = Float::with_val(prec, 1);
            for x in &p.x {
                prod *= x.abs();
            }
            let half = Float::with_val(prec, r as f64 - 1.0) / 2u32;
            let q_half = Float::with_val(prec, q_abs.clone().pow(&half));
            // b = 0 makes the right inequality vacuous
            let right = if p.b.abs() == 0 {
                None
            } else {
                Some(Float::with_val(prec, q_abs.pow((r - 1) as u32)) / p.b.abs())
            };
            let az = p.az();
            for x in &p.x {
                let xr = Float::with_val(prec, x.abs().pow(r as u32));
                if xr == 0 {
                    return Err(Error::PoleHit("x_j = 0".into()));
                }
                let mid = Float::with_val(prec, &q_half * &prod) / xr;
                if !(az < mid) || right.as_ref().is_some_and(|rt| !(mid < *rt)) {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

fn polar(prec: u32, radius: f64, angle: f64) -> ComplexHP {
    ComplexHP::new(prec, radius * angle.cos(), radius * angle.sin())
}

/// A random point with `|a|, |z| <= 1.2`, `|b| <= 1.2`, `|x_i| in [e^{-1/2}, e^{1/2}]`
/// and `q = 1/2`.
fn sample_point<R: rand::Rng>(g: &mut R, r: usize, prec: u32) -> RegionPoint {
    let tau = std::f64::consts::TAU;
    let mut draw = |lo: f64, hi: f64| rng::uniform(g, lo, hi);
    let a = polar(prec, draw(0.0, 1.2), draw(0.0, tau));
    let b = polar(prec, draw(0.0, 1.2), draw(0.0, tau));
    let z = polar(prec, draw(0.0, 1.2), draw(0.0, tau));
    let x = (0..r).map(|_| polar(prec, draw(-0.5, 0.5).exp(), draw(0.0, tau))).collect();
    RegionPoint { a, b, z, x, q: ComplexHP::real(prec, 0.5) }
}

/// Samples `samples` points, requires every point of the old region to lie
/// in the new one, and for `r > 1` searches a point of the new region outside
/// the old one.
pub fn containment_check(r: usize, samples: usize, seed: u64) -> Result<Verdict> {
    if r == 0 || samples == 0 {
        return Err(Error::InvalidArgument("need r >= 1 and at least one sample".into()));
    }
    let prec = 64;
    let mut g = rng::label_stream(seed, &format!("containment/{r}"));
    let (mut old_hits, mut violations) = (0u64, 0u64);
    for _ in 0..samples {
        let p = sample_point(&mut g, r, prec);
        if region_predicate(&p, Region::Old)? {
            old_hits += 1;
            if !region_predicate(&p, Region::New)? {
                violations += 1;
            }
        }
    }
    let mut v = Verdict::new("containment", Mode::Sampling)
        .param("r", r)
        .param("samples", samples)
        .param("seed", seed)
        .param("old_region_hits", old_hits);
    if r > 1 {
        let witness = strictness_witness(r, seed)?;
        v = match witness {
            Some(p) => v.check(
                Verdict::new("containment-strictness", Mode::Sampling)
                    .param("a", format_c(&p.a))
                    .param("b", format_c(&p.b))
                    .param("z", format_c(&p.z))
                    .param("x", p.x.iter().map(format_c).collect::<Vec<_>>().join(", "))
                    .count(0, 1),
            ),
            None => v.check(Verdict::new("containment-strictness", Mode::Sampling).fail("no witness found")),
        };
    }
    if old_hits == 0 {
        v = v.fail("no sample fell into the old region");
    }
    let pass = v.pass;
    let v = v.count(violations, old_hits);
    Ok(if pass { v } else { Verdict { pass: false, ..v } })
}

/// Searches a point with `max(|az|, |b|) = 0.9` whose `x` violate the old
/// region.
pub fn strictness_witness(r: usize, seed: u64) -> Result<Option<RegionPoint>> {
    let prec = 64;
    let mut g = rng::label_stream(seed, &format!("containment-witness/{r}"));
    for _ in 0..10_000 {
        let mut p = sample_point(&mut g, r, prec);
        // pin |az| = 0.9 and |b| <= 0.9
        let scale = 0.9 / p.az().to_f64().max(1e-300);
        p.a = p.a.scale_f64(scale);
        if p.b.abs_f64() > 0.9 {
            p.b = p.b.scale_f64(0.9 / p.b.abs_f64());
        }
        if region_predicate(&p, Region::New)? && !region_predicate(&p, Region::Old)? {
            return Ok(Some(p));
        }
    }
    Ok(None)
}

/// `k_i = sum_{l >= i} m_l`, inverted, with the two bookkeeping identities
/// `|k| = sum_l l m_l` and `k_i - k_j = sum_{i <= l < j} m_l` checked.
pub fn m_substitution(k: &[i64]) -> (Vec<i64>, Verdict) {
    let r = k.len();
    let m: Vec<i64> = (0..r).map(|l| if l + 1 < r { k[l] - k[l + 1] } else { k[l] }).collect();
    let mut failures = 0u64;
    let mut total = 1u64;
    let back: Vec<i64> = (0..r).map(|i| m[i..].iter().sum()).collect();
    if back != k {
        failures += 1;
    }
    total += 1;
    let weighted: i64 = m.iter().enumerate().map(|(l, &ml)| (l as i64 + 1) * ml).sum();
    if weighted != k.iter().sum::<i64>() {
        failures += 1;
    }
    for i in 0..r {
        for j in i + 1..r {
            total += 1;
            if k[i] - k[j] != m[i..j].iter().sum::<i64>() {
                failures += 1;
            }
        }
    }
    let v = Verdict::new("m-substitution", Mode::SymbolicExact).param("k", format!("{k:?}")).param("m", format!("{m:?}")).count(failures, total);
    (m, v)
}

/// Ratio tests on the dominating product of single series for the
/// `|k| >= 0` part of the multilateral sum, with `sigma` given by its images
/// `0..r`: the first `r - 1` series have ratios tending to 0, the last one
/// has the constant ratio `|az|^r`.
pub fn dominating_bound_check(sigma: &[usize], p: &RegionPoint, n_terms: i64) -> Result<Verdict> {
    let r = sigma.len();
    if r == 0 || p.r() != r || n_terms < 2 {
        return Err(Error::InvalidArgument("need a permutation of 0..r, r values x_i and at least 2 terms".into()));
    }
    let mut seen = vec![false; r];
    for &s in sigma {
        if s >= r || std::mem::replace(&mut seen[s], true) {
            return Err(Error::InvalidArgument(format!("{sigma:?} is not a permutation")));
        }
    }
    let az = p.az().to_f64();
    if !(az < 1.0) || !(p.b.abs_f64() < 1.0) {
        return Err(Error::RegionViolation(format!("need |az| < 1 and |b| < 1; |az| = {az:.4}")));
    }
    let prec = p.prec();
    let one = ComplexHP::one(prec);
    let mut xprod = one.clone();
    for x in &p.x {
        xprod = xprod.mul(x);
    }
    let q_half = p.q.pow(&ComplexHP::real(prec, -(r as f64 - 1.0) / 2.0));
    let base = p.a.mul(&p.z).mul(&q_half).div(&xprod).ok_or_else(|| Error::PoleHit("prod x_i = 0".into()))?;
    let powi = |x: &ComplexHP, e: i64| x.powi(e).ok_or_else(|| Error::PoleHit("zero to a negative power".into()));
    // |term(m)| of single series l (1-based; l = r is the last one)
    let term = |l: usize, m: i64| -> Result<f64> {
        let shift: i64 = sigma[..l].iter().map(|&s| (r - 1 - s) as i64).sum();
        let mut t = powi(&base, l as i64 * m)?.mul(&powi(&p.q, shift * m)?);
        for x in &p.x[..l] {
            t = t.mul(&powi(x, r as i64 * m)?);
        }
        if l < r {
            t = t.mul(&p.q.pow(&ComplexHP::real(prec, (m * m) as f64 / 2.0)));
        }
        Ok(t.abs_f64())
    };
    let ratio = |l: usize, m: i64| -> Result<f64> {
        let (t0, t1) = (term(l, m)?, term(l, m + 1)?);
        Ok(if t1 == 0.0 { 0.0 } else { t1 / t0 })
    };
    let mut out = Verdict::new("dominating-bound", Mode::Numeric)
        .param("r", r)
        .param("sigma", format!("{:?}", sigma.iter().map(|s| s + 1).collect::<Vec<_>>()))
        .param("az", format!("{az:.6}"))
        .precision(prec);
    for l in 1..r {
        let last = ratio(l, n_terms)?;
        let decreasing = ratio(l, n_terms / 2)? >= last;
        let mut v = Verdict::new("dominating-bound-quadratic", Mode::Numeric).param("series", l).window(n_terms);
        if !decreasing {
            v = v.fail("ratios do not decrease");
        }
        out = out.check(v.magnitude(last, 1e-6));
    }
    let measured = ratio(r, n_terms)?;
    let expected = az.powi(r as i32);
    Ok(out.param("measured_ratio", format!("{measured:.9}")).window(n_terms).magnitude((measured - expected).abs(), 1e-6))
}

/// Identities the probe can sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProbeTarget {
    Rgj,
    Rgjc,
    Mrgj,
    Mrgjc,
}

impl ProbeTarget {
    pub fn parse(id: &str) -> Option<Self> {
        Some(match id {
            "rgj" => ProbeTarget::Rgj,
            "rgjc" => ProbeTarget::Rgjc,
            "mrgj" => ProbeTarget::Mrgj,
            "mrgjc" => ProbeTarget::Mrgjc,
            _ => return None,
        })
    }

    pub fn id(self) -> &'static str {
        match self {
            ProbeTarget::Rgj => "rgj",
            ProbeTarget::Rgjc => "rgjc",
            ProbeTarget::Mrgj => "mrgj",
            ProbeTarget::Mrgjc => "mrgjc",
        }
    }
}

/// Default probe windows.
pub fn default_windows() -> Vec<i64> {
    (1..=12).map(|i| 16 * i).collect()
}

/// Successive windows needed to call a probe diverging.
pub const DIVERGENCE_RUN: usize = 5;

/// Partial sums over growing windows (shells for the multiple series).
/// Converging: the last three differences decrease and the last relative
/// difference is below `tol`. Diverging: the differences grow over the last
/// [`DIVERGENCE_RUN`] windows. Anything else is inconclusive. The verdict
/// passes iff the behavior agrees with the region predicate.
pub fn convergence_probe(target: ProbeTarget, p: &NumericParams, windows: &[i64]) -> Result<Verdict> {
    if windows.len() < DIVERGENCE_RUN + 1 || windows.windows(2).any(|w| w[0] >= w[1]) || windows[0] < 0 {
        return Err(Error::InvalidArgument(format!("need at least {} increasing windows", DIVERGENCE_RUN + 1)));
    }
    let pt = p.point();
    let multi = matches!(target, ProbeTarget::Mrgj | ProbeTarget::Mrgjc);
    if multi && p.x.is_empty() {
        return Err(Error::InvalidArgument("multiple series need x values".into()));
    }
    let term = |k: &[i64]| -> Result<ComplexHP> {
        match target {
            ProbeTarget::Rgj => RgjForm::Theorem.term(k[0]).eval(&pt),
            ProbeTarget::Rgjc => RgjForm::Reversed.term(k[0]).eval(&pt),
            ProbeTarget::Mrgj => MultiForm::Theorem.term(k, false).eval(&pt),
            ProbeTarget::Mrgjc => MultiForm::Reversed.term(k, false).eval(&pt),
        }
    };
    let r = if multi { p.x.len() } else { 1 };
    let shell_sum = |s: i64| -> Result<ComplexHP> {
        let parts: Vec<ComplexHP> = shell(r, s).into_par_iter().map(|k| term(&k)).collect::<Result<_>>()?;
        Ok(parts.iter().fold(ComplexHP::zero(p.prec()), |acc, t| acc.add(t)))
    };
    let mut sums = Vec::with_capacity(windows.len());
    let mut acc = ComplexHP::zero(p.prec());
    let mut s = 0;
    for &w in windows {
        while s <= w {
            acc = acc.add(&shell_sum(s)?);
            s += 1;
        }
        sums.push(acc.clone());
    }
    let diffs: Vec<f64> = sums.windows(2).map(|w| w[1].sub(&w[0]).abs_f64()).collect();
    let last = *diffs.last().expect("at least two windows");
    let scale = sums.last().expect("nonempty").abs_f64().max(f64::MIN_POSITIVE);
    let tail3 = &diffs[diffs.len() - 3..];
    let converging = last / scale < p.tol && tail3.windows(2).all(|w| w[1] <= w[0]);
    let tail = &diffs[diffs.len() - DIVERGENCE_RUN..];
    let diverging = tail.windows(2).all(|w| w[1] > w[0]) || diffs.iter().any(|d| !d.is_finite());
    let behavior = match (converging, diverging) {
        (true, false) => "converging",
        (false, true) => "diverging",
        _ => {
            return Err(Error::Inconclusive(format!("{}: differences {:.3e} .. {:.3e}", target.id(), diffs[0], last)));
        }
    };
    let inside = p.a.mul(&p.z).abs_f64() < 1.0 && p.b.abs_f64() < 1.0;
    let mut v = p
        .describe(Verdict::new(format!("{}-probe", target.id()), Mode::Numeric))
        .param("behavior", behavior)
        .param("region", if inside { "inside" } else { "outside" })
        .window(*windows.last().expect("nonempty"))
        .precision(p.prec());
    if (behavior == "converging") != inside {
        v = v.fail("behavior disagrees with the region predicate");
    }
    Ok(v.magnitude(if inside { last / scale } else { 0.0 }, if inside { p.tol } else { f64::MIN_POSITIVE }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(a: f64, b: f64, z: f64, x: &[f64]) -> RegionPoint {
        RegionPoint {
            a: ComplexHP::real(64, a),
            b: ComplexHP::real(64, b),
            z: ComplexHP::real(64, z),
            x: x.iter().map(|&v| ComplexHP::real(64, v)).collect(),
            q: ComplexHP::real(64, 0.5),
        }
    }

    #[test]
    fn predicates() {
        assert!(region_predicate(&pt(0.0, 0.0, 5.0, &[1.0]), Region::New).unwrap());
        assert!(!region_predicate(&pt(0.1, 1.5, 0.5, &[1.0]), Region::New).unwrap());
        // r = 2, x = (1, 1): |az| < 2^{-1/2} < |q/b|
        assert!(region_predicate(&pt(0.7, 0.7, 1.0, &[1.0, 1.0]), Region::Old).unwrap());
        assert!(!region_predicate(&pt(0.71, 0.1, 1.0, &[1.0, 1.0]), Region::Old).unwrap());
        assert!(!region_predicate(&pt(0.1, 0.71, 1.0, &[1.0, 1.0]), Region::Old).unwrap());
        assert!(region_predicate(&pt(0.1, 0.0, 1.0, &[1.0, 1.0]), Region::Old).unwrap());
    }

    #[test]
    fn containment_small() {
        for r in [1, 2, 3] {
            let v = containment_check(r, 2000, 11).unwrap();
            assert!(v.pass, "{v}");
        }
    }

    #[test]
    fn m_substitution_examples() {
        let (m, v) = m_substitution(&[3, 1]);
        assert_eq!(m, vec![2, 1]);
        assert!(v.pass);
        assert_eq!(m_substitution(&[0, 0, 0]).0, vec![0, 0, 0]);
    }

    #[test]
    fn dominating_ratios() {
        let p = pt(0.5, 0.2, 1.0, &[1.0, 1.0]);
        let v = dominating_bound_check(&[0, 1], &p, 60).unwrap();
        assert!(v.pass, "{v}");
        let mut p = pt(0.6, 0.2, 1.0, &[1.0, 1.0, 1.0]);
        p.x[1] = ComplexHP::new(64, 0.0, 1.0);
        let v = dominating_bound_check(&[0, 2, 1], &p, 60).unwrap();
        assert!(v.pass, "{v}");
        let v = dominating_bound_check(&[0, 1], &pt(0.0, 0.2, 1.0, &[1.0, 1.0]), 60).unwrap();
        assert!(v.pass, "{v}");
    }

    #[test]
    fn probes() {
        let p = NumericParams::real(64, 0.3, 0.4, 0.9, 0.5, 1e-10);
        let v = convergence_probe(ProbeTarget::Rgj, &p, &default_windows()).unwrap();
        assert_eq!(v.get_param("behavior"), Some("converging"));
        assert!(v.pass);
        let p = NumericParams::real(64, 0.3, 1.3, 0.9, 0.5, 1e-10);
        let v = convergence_probe(ProbeTarget::Rgj, &p, &default_windows()).unwrap();
        assert_eq!(v.get_param("behavior"), Some("diverging"));
        assert!(v.pass);
        let p = NumericParams::real(64, 0.0, 0.0, 3.0, 0.5, 1e-10);
        assert_eq!(convergence_probe(ProbeTarget::Rgj, &p, &default_windows()).unwrap().get_param("behavior"), Some("converging"));
    }
}
