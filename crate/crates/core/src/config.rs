//! Run configuration shared by the registry, the reports and the CLI.

use serde::{Deserialize, Serialize};

use crate::algebra::rational;
use crate::algebra::Rational;
use crate::error::{Error, Result};
use crate::numeric::{ComplexHP, MIN_PRECISION};
use crate::verdict::Mode;

/// Every knob of a run. Optional fields fall back to per-identity defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Identity ids; empty selects the whole registry.
    pub identities: Vec<String>,
    pub mode: Option<String>,
    pub order: Option<i64>,
    pub n: Option<i64>,
    pub n_vec: Option<Vec<i64>>,
    pub r: Option<usize>,
    /// Extracted power `M` for the Macdonald-type identity.
    pub m: Option<i64>,
    /// Lattice point for the lattice utilities.
    pub k: Option<Vec<i64>>,
    pub a: Option<String>,
    pub b: Option<String>,
    pub c: Option<String>,
    pub z: Option<String>,
    pub q: Option<String>,
    pub x: Option<Vec<String>>,
    pub sigma: Option<Vec<usize>>,
    /// `none`, `b_zero` or `a_zero` for the terminating q-Abel–Rothe sum.
    pub specialization: Option<String>,
    pub target: Option<String>,
    pub windows: Option<Vec<i64>>,
    pub max_window: Option<i64>,
    pub prec: Option<u32>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub trials: Option<usize>,
    /// Record wall-clock times (makes reports non-reproducible).
    pub timings: bool,
}

pub const DEFAULT_PRECISION: u32 = 128;
pub const DEFAULT_SEED: u64 = 1;

impl RunConfig {
    pub fn prec(&self) -> u32 {
        self.prec.unwrap_or(DEFAULT_PRECISION)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    /// `10^{-20 P/128}`: `1e-20` at 128 bits, `1e-40` at 256.
    pub fn tol_or_default(&self) -> f64 {
        self.tol.unwrap_or_else(|| 10f64.powf(-20.0 * self.prec() as f64 / 128.0))
    }

    pub fn mode(&self) -> Result<Option<Mode>> {
        self.mode
            .as_deref()
            .map(|m| Mode::parse(m).ok_or_else(|| Error::InvalidArgument(format!("unknown mode {m:?}"))))
            .transpose()
    }

    pub fn validate(&self) -> Result<()> {
        if self.prec() < MIN_PRECISION {
            return Err(Error::InvalidArgument(format!("precision must be at least {MIN_PRECISION} bits")));
        }
        if let Some(t) = self.tol {
            if !(t > 0.0) {
                return Err(Error::InvalidArgument("tolerance must be positive".into()));
            }
        }
        if self.order.is_some_and(|n| n < 0) {
            return Err(Error::InvalidArgument("order must be nonnegative".into()));
        }
        self.mode()?;
        Ok(())
    }

    /// A complex parameter, or `default` if unset.
    pub fn complex(&self, value: &Option<String>, default: &str) -> Result<ComplexHP> {
        parse_complex(self.prec(), value.as_deref().unwrap_or(default))
    }

    pub fn rational(&self, value: &Option<String>, default: &str) -> Result<Rational> {
        let s = value.as_deref().unwrap_or(default);
        rational::parse(s).ok_or_else(|| Error::InvalidArgument(format!("not an exact rational: {s:?}")))
    }
}

/// Parses `"re"`, `"re+imi"`, `"re-imi"`, `"imi"` (each part a decimal or
/// `p/q`), or `"pi:p/q"` for `e^{i pi p/q}`.
pub fn parse_complex(prec: u32, s: &str) -> Result<ComplexHP> {
    let s = s.trim();
    let bad = || Error::InvalidArgument(format!("bad complex number {s:?}"));
    let real = |t: &str| -> Result<ComplexHP> {
        let t = t.trim();
        if t.contains('/') {
            return rational::parse(t).map(|r| ComplexHP::from_rational(prec, &r)).ok_or_else(bad);
        }
        ComplexHP::parse_real(prec, t)
    };
    if let Some(frac) = s.strip_prefix("pi:") {
        let f = rational::parse(frac).ok_or_else(bad)?;
        return Ok(ComplexHP::unit_pi_fraction(prec, &f));
    }
    let Some(body) = s.strip_suffix('i') else {
        return real(s);
    };
    // split at the last sign that is not an exponent sign or the leading one
    let bytes = body.as_bytes();
    let split = (1..bytes.len()).rev().find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(i) => (real(&body[..i])?, &body[i..]),
        None => (ComplexHP::zero(prec), body),
    };
    let im = match im {
        "" | "+" => ComplexHP::one(prec),
        "-" => ComplexHP::one(prec).neg(),
        t => real(t.trim_start_matches('+'))?,
    };
    Ok(re.add(&im.mul(&ComplexHP::new(prec, 0.0, 1.0))))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_literals() {
        let z = parse_complex(64, "0.5-0.25i").unwrap();
        assert_eq!((z.re_f64(), z.im_f64()), (0.5, -0.25));
        let z = parse_complex(64, "1/3").unwrap();
        assert!((z.re_f64() - 1.0 / 3.0).abs() < 1e-15);
        let z = parse_complex(64, "-i").unwrap();
        assert_eq!((z.re_f64(), z.im_f64()), (0.0, -1.0));
        let z = parse_complex(64, "pi:1/2").unwrap();
        assert!(z.re_f64().abs() < 1e-15 && (z.im_f64() - 1.0).abs() < 1e-15);
        let z = parse_complex(64, "1e-3+2i").unwrap();
        assert_eq!(z.im_f64(), 2.0);
        assert!(parse_complex(64, "x").is_err());
    }

    #[test]
    fn defaults() {
        let c = RunConfig::default();
        assert_eq!(c.prec(), 128);
        assert!((c.tol_or_default() - 1e-20).abs() < 1e-30);
        assert!(c.validate().is_ok());
        assert!(RunConfig { prec: Some(32), ..Default::default() }.validate().is_err());
    }
}
