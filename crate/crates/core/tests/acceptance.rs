//! The seven acceptance criteria at their pinned sizes and tolerances, one
//! PASS/FAIL line each. Runs without the libtest harness so the lines are
//! always printed.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use qtriple::abel_rothe::{
    extract_extrc, numeric_lambert, random_region_points, reduction_to_jacobi, verify_rgj, verify_rgjc, LambertParams,
    RgjForm, RgjMode,
};
use qtriple::algebra::rational::{int, rat};
use qtriple::bilateral::{verify_1psi1_numeric, verify_1psi1_window, verify_jtpi, verify_pentagonal};
use qtriple::config::RunConfig;
use qtriple::convergence::{containment_check, dominating_bound_check, m_substitution, strictness_witness};
use qtriple::multidim::{
    exponent_identity, r1_collapse, verify_armacdid, verify_mrgj, verify_mrgjc, verify_rothe3, MultiMode,
};
use qtriple::registry::{self, dominating_points, lambert_points, multi_points, psi1_points, rothe3_cases};
use qtriple::report::ReportDocument;
use qtriple::terminating::{
    numeric_limit_q_to_1, verify_classical, verify_pfaff_saalschutz, verify_q_abel, verify_q_abel_rothe, verify_q_binomial,
    Classical, LimitIdentity, LimitSweep, Specialization,
};
use qtriple::verdict::Verdict;
use qtriple::Result;

const SEED: u64 = 20_240_917;
const PREC: u32 = 128;

/// Collects sub-results of one criterion.
#[derive(Default)]
struct Tally {
    checks: usize,
    failures: Vec<String>,
}

impl Tally {
    fn verdict(&mut self, v: Result<Verdict>) {
        self.checks += 1;
        match v {
            Ok(v) if v.pass => {}
            Ok(v) => {
                let first = v.first_failure().map(|f| f.to_string()).unwrap_or_default();
                self.failures.push(format!("{v} [{first}]"));
            }
            Err(e) => self.failures.push(format!("error: {e}")),
        }
    }

    fn expect(&mut self, ok: bool, what: impl Into<String>) {
        self.checks += 1;
        if !ok {
            self.failures.push(what.into());
        }
    }
}

fn terminating_exact(t: &mut Tally) {
    for n in 0..=20 {
        t.verdict(verify_q_binomial(n));
    }
    for n in 0..=10 {
        for s in [Specialization::None, Specialization::BZero, Specialization::AZero] {
            t.verdict(verify_q_abel_rothe(n, s));
        }
        t.verdict(verify_q_abel(n));
    }
    for n in rothe3_cases(3, 3) {
        t.verdict(verify_rothe3(&n));
    }
}

fn randomized_rational(t: &mut Tally) {
    for n in 0..=4 {
        t.verdict(verify_pfaff_saalschutz(n, 100, SEED));
        // the doubled and the substituted intermediate identities
        t.verdict(verify_1psi1_window(n, 100, SEED));
    }
    for n in 0..=5 {
        t.verdict(verify_classical(Classical::Rothe, n, 50, SEED));
        t.verdict(verify_classical(Classical::Abel, n, 50, SEED));
    }
}

fn has_certificate(v: &Verdict, suffix: &str) -> bool {
    v.identity_id.ends_with(suffix) && v.pass || v.checks.iter().any(|c| has_certificate(c, suffix))
}

fn formal_bilateral(t: &mut Tally) {
    for v in [verify_jtpi(12), verify_rgj(RgjMode::Formal { order: 12 }), verify_rgjc(RgjMode::Formal { order: 12 })] {
        let certified = v.as_ref().is_ok_and(|v| has_certificate(v, "-tannery"));
        let id = v.as_ref().map(|v| v.identity_id.clone()).unwrap_or_default();
        t.verdict(v);
        t.expect(certified, format!("{id}: no Tannery certificate"));
    }
    for v in [verify_mrgj(MultiMode::Formal { r: 2, order: 8 }), verify_mrgjc(MultiMode::Formal { r: 2, order: 8 })] {
        let certified = v.as_ref().is_ok_and(|v| has_certificate(v, "-shells"));
        t.verdict(v);
        t.expect(certified, "multiple series: no shell certificate");
    }
    t.verdict(extract_extrc(10, &[-2, -1, 0, 1, 2]));
    for m in [0, 1] {
        t.verdict(verify_armacdid(2, m, 6));
    }
}

fn reductions(t: &mut Tally) {
    t.verdict(reduction_to_jacobi(RgjForm::Theorem, 12));
    t.verdict(reduction_to_jacobi(RgjForm::Reversed, 12));
    t.verdict(r1_collapse(12));
    t.verdict(verify_pentagonal(20));
}

fn numeric(t: &mut Tally) {
    let tol = 1e-20;
    for p in psi1_points(SEED, 20, PREC, tol) {
        t.verdict(verify_1psi1_numeric(&p));
    }
    for p in random_region_points(SEED, "acceptance/rgj", 20, 0.9, PREC, tol) {
        t.verdict(verify_rgj(RgjMode::Numeric(&p)));
    }
    for p in random_region_points(SEED, "acceptance/rgjc", 20, 0.9, PREC, tol) {
        t.verdict(verify_rgjc(RgjMode::Numeric(&p)));
    }
    for p in multi_points(SEED, "acceptance/mrgj", 2, 10, PREC, tol) {
        t.verdict(verify_mrgj(MultiMode::Numeric(&p)));
    }
    let bridge = LimitSweep { j_values: (1..=16).collect(), tolerance: 1e-3, precision: PREC };
    for (i, [a, b, z]) in lambert_points(SEED, 10).into_iter().enumerate() {
        let p = LambertParams { a, b, z, j_max: 60, prec: PREC, tol: 1e-12, bridge: (i == 0).then(|| bridge.clone()) };
        t.verdict(numeric_lambert(&p));
    }
    t.verdict(numeric_limit_q_to_1(LimitIdentity::RotheFromQ, 3, [int(2), rat(1, 2), int(1)], &bridge));
    t.verdict(numeric_limit_q_to_1(LimitIdentity::AbelFromQ, 3, [int(1), rat(1, 3), int(2)], &bridge));
}

fn appendix(t: &mut Tally) {
    let mut exhaustive = 0usize;
    for r in 1..=4usize {
        let side = 11usize;
        for idx in 0..side.pow(r as u32) {
            let mut rest = idx;
            let k: Vec<i64> = (0..r)
                .map(|_| {
                    let d = rest % side;
                    rest /= side;
                    d as i64 - 5
                })
                .collect();
            exhaustive += 1;
            if !exponent_identity(&k) {
                t.expect(false, format!("exponent identity fails at {k:?}"));
            }
        }
    }
    t.expect(exhaustive == 11 + 121 + 1331 + 14641, "exponent identity: wrong case count");
    let cfg = RunConfig { seed: Some(SEED), samples: Some(100), ..Default::default() };
    t.verdict(registry::lookup("vandermonde").expect("registered").run(&cfg, None));
    let cfg = RunConfig { seed: Some(SEED), samples: Some(1000), ..Default::default() };
    t.verdict(registry::lookup("m-substitution").expect("registered").run(&cfg, None));
    t.expect(m_substitution(&[3, 1]).0 == vec![2, 1], "m-substitution example");
    for (sigma, p) in dominating_points(SEED, 10) {
        t.verdict(dominating_bound_check(&sigma, &p, 60));
    }
    for r in [2, 3] {
        t.verdict(containment_check(r, 10_000, SEED));
        t.expect(strictness_witness(r, SEED).is_ok_and(|w| w.is_some()), format!("no strictness witness at r = {r}"));
    }
}

fn determinism(t: &mut Tally) {
    let cfg = RunConfig {
        identities: ["1psi1", "1psi1-chain", "containment", "pfaff-saalschutz", "rgj", "vandermonde", "mrgj", "lambert"]
            .map(String::from)
            .to_vec(),
        seed: Some(SEED),
        ..Default::default()
    };
    let run = || -> Result<String> {
        let results = registry::run_selected(&cfg, None)?;
        Ok(ReportDocument::new(cfg.clone(), results).to_json())
    };
    match (run(), run()) {
        (Ok(x), Ok(y)) => t.expect(x == y, "reports differ between identical runs"),
        (Err(e), _) | (_, Err(e)) => t.expect(false, format!("error: {e}")),
    }
}

fn main() -> ExitCode {
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let criteria: [(&str, fn(&mut Tally), Option<Duration>); 7] = [
        ("1 terminating exact suite", terminating_exact, Some(Duration::from_secs(300))),
        ("2 randomized rational suite", randomized_rational, None),
        ("3 formal bilateral suite", formal_bilateral, Some(Duration::from_secs(900))),
        ("4 reduction checks", reductions, None),
        ("5 numeric suite", numeric, None),
        ("6 appendix suite", appendix, None),
        ("7 determinism", determinism, None),
    ];
    let mut all = true;
    for (name, run, budget) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let mut t = Tally::default();
        run(&mut t);
        let elapsed = start.elapsed();
        if let Some(b) = budget {
            t.expect(elapsed < b, format!("took {elapsed:?}, budget {b:?}"));
        }
        let pass = t.failures.is_empty();
        all &= pass;
        println!(
            "criterion {name}: {} ({} checks, {} failed, {:.1}s)",
            if pass { "PASS" } else { "FAIL" },
            t.checks,
            t.failures.len(),
            elapsed.as_secs_f64()
        );
        for f in t.failures.iter().take(10) {
            println!("    {f}");
        }
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
