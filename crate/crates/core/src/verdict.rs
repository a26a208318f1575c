//! Outcome records shared by every verification routine.

use std::fmt;
use std::time::Duration;

use crate::algebra::{rational, LaurentPoly, Rational};
use crate::numeric::format_magnitude;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mode {
    SymbolicExact,
    RandomRational,
    NumericLimit,
    Formal,
    Numeric,
    WindowExact,
    Sampling,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::SymbolicExact => "symbolic_exact",
            Mode::RandomRational => "random_rational",
            Mode::NumericLimit => "numeric_limit",
            Mode::Formal => "formal",
            Mode::Numeric => "numeric",
            Mode::WindowExact => "window_exact",
            Mode::Sampling => "sampling",
        }
    }

    pub fn parse(s: &str) -> Option<Mode> {
        Some(match s {
            "symbolic_exact" | "symbolic" | "exact" => Mode::SymbolicExact,
            "random_rational" | "rational" => Mode::RandomRational,
            "numeric_limit" | "limit" => Mode::NumericLimit,
            "formal" => Mode::Formal,
            "numeric" => Mode::Numeric,
            "window_exact" | "window" => Mode::WindowExact,
            "sampling" => Mode::Sampling,
            _ => return None,
        })
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Residual {
    /// Exact difference of the two sides; passing means empty.
    Exact(LaurentPoly),
    /// Exact difference at a rational point.
    Value(Rational),
    /// Numeric magnitude compared against a tolerance.
    Magnitude(f64),
    /// Failures out of a number of sampled checks.
    Count { failures: u64, total: u64 },
}

impl Residual {
    pub fn is_zero(&self) -> bool {
        match self {
            Residual::Exact(p) => p.is_zero(),
            Residual::Value(r) => num_traits::Zero::is_zero(r),
            Residual::Magnitude(m) => *m == 0.0,
            Residual::Count { failures, .. } => *failures == 0,
        }
    }
}

const MAX_RESIDUAL_CHARS: usize = 240;

impl fmt::Display for Residual {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Residual::Exact(p) if p.is_zero() => f.write_str("0"),
            Residual::Exact(p) => {
                let s = p.to_string();
                if s.len() > MAX_RESIDUAL_CHARS {
                    let cut = (0..=MAX_RESIDUAL_CHARS).rev().find(|&i| s.is_char_boundary(i)).unwrap_or(0);
                    write!(f, "{} ... ({} terms)", &s[..cut], p.len())
                } else {
                    f.write_str(&s)
                }
            }
            Residual::Value(r) => f.write_str(&rational::to_string(r)),
            Residual::Magnitude(m) => f.write_str(&format_magnitude(*m)),
            Residual::Count { failures, total } => {
                if *failures == 0 {
                    f.write_str("0")
                } else {
                    write!(f, "{failures} of {total} failed")
                }
            }
        }
    }
}

/// The result of one verification.
#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub identity_id: String,
    pub mode: Mode,
    pub params: Vec<(String, String)>,
    pub residual: Residual,
    pub pass: bool,
    pub order: Option<i64>,
    pub window: Option<i64>,
    pub precision_bits: Option<u32>,
    pub tolerance: Option<f64>,
    /// Sub-checks that must all pass for this verdict to pass.
    pub checks: Vec<Verdict>,
    pub notes: Vec<String>,
    pub elapsed: Option<Duration>,
}

pub type TerminatingVerdict = Verdict;

impl Verdict {
    pub fn new(identity_id: impl Into<String>, mode: Mode) -> Self {
        Verdict {
            identity_id: identity_id.into(),
            mode,
            params: Vec::new(),
            residual: Residual::Count { failures: 0, total: 0 },
            pass: true,
            order: None,
            window: None,
            precision_bits: None,
            tolerance: None,
            checks: Vec::new(),
            notes: Vec::new(),
            elapsed: None,
        }
    }

    pub fn param(mut self, key: &str, value: impl fmt::Display) -> Self {
        self.params.push((key.to_string(), value.to_string()));
        self
    }

    pub fn order(mut self, n: i64) -> Self {
        self.order = Some(n);
        self
    }

    pub fn window(mut self, n: i64) -> Self {
        self.window = Some(n);
        self
    }

    pub fn precision(mut self, bits: u32) -> Self {
        self.precision_bits = Some(bits);
        self
    }

    pub fn note(mut self, s: impl Into<String>) -> Self {
        self.notes.push(s.into());
        self
    }

    /// Exact residual; passes iff it is identically zero.
    pub fn exact(mut self, residual: LaurentPoly) -> Self {
        self.pass = residual.is_zero() && self.checks.iter().all(|c| c.pass);
        self.residual = Residual::Exact(residual);
        self
    }

    /// Numeric residual; passes iff finite and below `tol`.
    pub fn magnitude(mut self, err: f64, tol: f64) -> Self {
        self.pass = err.is_finite() && err < tol && self.checks.iter().all(|c| c.pass);
        self.residual = Residual::Magnitude(err);
        self.tolerance = Some(tol);
        self
    }

    pub fn count(mut self, failures: u64, total: u64) -> Self {
        self.pass = failures == 0 && self.checks.iter().all(|c| c.pass);
        self.residual = Residual::Count { failures, total };
        self
    }

    pub fn value(mut self, residual: Rational) -> Self {
        self.pass = num_traits::Zero::is_zero(&residual) && self.checks.iter().all(|c| c.pass);
        self.residual = Residual::Value(residual);
        self
    }

    /// Attaches a sub-check; a failing sub-check fails this verdict.
    pub fn check(mut self, sub: Verdict) -> Self {
        self.pass &= sub.pass;
        self.checks.push(sub);
        self
    }

    pub fn fail(mut self, why: impl Into<String>) -> Self {
        self.pass = false;
        self.notes.push(why.into());
        self
    }

    pub fn get_param(&self, key: &str) -> Option<&str> {
        self.params.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    /// The first failing verdict in depth-first order.
    pub fn first_failure(&self) -> Option<&Verdict> {
        if self.pass {
            return None;
        }
        self.checks.iter().find_map(|c| c.first_failure()).or(Some(self))
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}] {}", self.identity_id, self.mode, if self.pass { "PASS" } else { "FAIL" })?;
        for (k, v) in &self.params {
            write!(f, " {k}={v}")?;
        }
        write!(f, " residual={}", self.residual)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sub_check_failure_propagates() {
        let bad = Verdict::new("x", Mode::Formal).exact(LaurentPoly::one());
        let v = Verdict::new("y", Mode::Formal).check(bad).exact(LaurentPoly::zero());
        assert!(!v.pass);
        assert_eq!(v.first_failure().unwrap().identity_id, "x");
    }

    #[test]
    fn residual_rendering() {
        assert_eq!(Residual::Exact(LaurentPoly::zero()).to_string(), "0");
        assert_eq!(Residual::Magnitude(3.24e-21).to_string(), "3.2e-21");
        assert_eq!(Residual::Value(rational::rat(-2, 6)).to_string(), "-1/3");
    }
}
