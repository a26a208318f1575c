//! Scalar evaluation of q-shifted factorials.

use crate::algebra::{Field, Rational};
use crate::error::{Error, Result};
use crate::numeric::ComplexHP;

/// Bits beyond the working precision below which a tail factor is 1.
pub const TAIL_GUARD_BITS: u32 = 16;

/// Above this many direct factors the logarithmic tail is used instead.
const DIRECT_FACTOR_LIMIT: f64 = 20_000.0;

/// A scalar field in which q-shifted factorials can be evaluated.
pub trait PochEval: Field {
    /// `(x; q)_k` for any integer `k`.
    fn poch_finite(x: &Self, q: &Self, k: i64) -> Result<Self> {
        let one = q.one_like();
        if k >= 0 {
            let mut acc = one.clone();
            let mut t = x.clone();
            for _ in 0..k {
                acc = acc.mul(&one.sub(&t));
                t = t.mul(q);
            }
            Ok(acc)
        } else {
            let qinv = one.div(q).ok_or_else(|| Error::PoleHit("q = 0".into()))?;
            let mut den = one.clone();
            let mut t = x.mul(&qinv);
            for _ in 0..(-k) {
                den = den.mul(&one.sub(&t));
                t = t.mul(&qinv);
            }
            one.div(&den).ok_or_else(|| Error::PoleHit(format!("negative-index factorial, k = {k}")))
        }
    }

    /// `(x; q)_inf`.
    fn poch_infinite(x: &Self, q: &Self) -> Result<Self>;

    fn is_finite_value(&self) -> bool {
        true
    }
}

impl PochEval for Rational {
    fn poch_infinite(_x: &Self, _q: &Self) -> Result<Self> {
        Err(Error::InvalidArgument("infinite product is not rational-valued".into()))
    }
}

impl PochEval for ComplexHP {
    fn poch_infinite(x: &Self, q: &Self) -> Result<Self> {
        poch_infinite_hp(x, q)
    }

    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
}

fn log2_abs(x: &ComplexHP) -> f64 {
    let a = x.abs();
    if a.is_zero() {
        f64::NEG_INFINITY
    } else {
        // exact exponent keeps this meaningful far outside f64 range
        let (m, e) = a.to_f64_exp();
        m.abs().log2() + e as f64
    }
}

/// `(x; q)_inf` at `|q| < 1`.
///
/// The product is cut once `|x q^j| < 2^{-P-16}`. When that needs very many
/// factors (q close to 1) the leading factors are multiplied out until
/// `|x q^J| < 1/2` and the remainder is `exp(-sum_m y^m / (m (1 - q^m)))`.
pub fn poch_infinite_hp(x: &ComplexHP, q: &ComplexHP) -> Result<ComplexHP> {
    let prec = x.prec();
    let lq = log2_abs(q);
    if !(lq < 0.0) {
        return Err(Error::NonConvergence(format!("infinite product needs |q| < 1, got |q| = {:.6}", q.abs_f64())));
    }
    let lx = log2_abs(x);
    if lx == f64::NEG_INFINITY {
        return Ok(x.one_like());
    }
    let work = prec + 32;
    let xw = x.with_prec(work);
    let qw = q.with_prec(work);
    let one = ComplexHP::one(work);
    let target = -(prec as f64) - TAIL_GUARD_BITS as f64;
    let direct = ((lx - target) / -lq).max(0.0);
    let mut acc = one.clone();
    let mut t = xw;
    if direct <= DIRECT_FACTOR_LIMIT {
        for _ in 0..(direct.ceil() as u64 + 1) {
            acc = acc.mul(&one.sub(&t));
            t = t.mul(&qw);
        }
        return Ok(acc.with_prec(prec));
    }
    while log2_abs(&t) >= -1.0 {
        acc = acc.mul(&one.sub(&t));
        t = t.mul(&qw);
    }
    let y = t;
    let mut s = ComplexHP::zero(work);
    let mut ym = y.clone();
    let mut qm = qw.clone();
    let cutoff = target - 24.0;
    let mut m = 1u64;
    loop {
        let den = one.sub(&qm).scale_f64(m as f64);
        let term = ym.div(&den).ok_or_else(|| Error::PoleHit("q^m = 1".into()))?;
        s = s.add(&term);
        if log2_abs(&term) < cutoff + log2_abs(&s).min(0.0) {
            break;
        }
        ym = ym.mul(&y);
        qm = qm.mul(&qw);
        m += 1;
    }
    let tail = s.neg().exp();
    Ok(acc.mul(&tail).with_prec(prec))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::rat;

    #[test]
    fn finite_rational_negative_index() {
        // (2; 1/2)_{-1} = 1 / (1 - 2 * 2) = -1/3
        let v = Rational::poch_finite(&rat(2, 1), &rat(1, 2), -1).unwrap();
        assert_eq!(v, rat(-1, 3));
    }

    #[test]
    fn euler_function_value() {
        // (1/2; 1/2)_inf = 0.288788095086602421278899721929...
        let q = ComplexHP::real(128, 0.5);
        let v = poch_infinite_hp(&q, &q).unwrap();
        assert!((v.re_f64() - 0.288_788_095_086_602_42).abs() < 1e-16);
    }

    #[test]
    fn log_tail_agrees_with_direct_product() {
        // q = 1 - 2^-10 needs ~ 10^5 direct factors at 128 bits
        let prec = 128;
        let q = ComplexHP::real(prec, 1.0 - 2f64.powi(-10));
        let x = ComplexHP::real(prec, 0.3);
        let fast = poch_infinite_hp(&x, &q).unwrap();
        let mut slow = ComplexHP::one(prec + 32);
        let qw = q.with_prec(prec + 32);
        let mut t = x.with_prec(prec + 32);
        for _ in 0..200_000 {
            slow = slow.mul(&ComplexHP::one(prec + 32).sub(&t));
            t = t.mul(&qw);
        }
        let err = fast.relative_error(&slow.with_prec(prec));
        assert!(err < 1e-30, "{err}");
    }
}
