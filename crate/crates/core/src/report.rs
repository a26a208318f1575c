//! Report documents and their JSON, Markdown and plain-text renderings.

use std::fmt::Write as _;
use std::time::Duration;

use serde_json::{json, Map, Value};

use crate::config::RunConfig;
use crate::verdict::Verdict;

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Clone, Debug)]
pub struct ReportDocument {
    pub version: String,
    pub config: RunConfig,
    /// Sorted by identity id.
    pub results: Vec<Verdict>,
    pub wall_time: Option<Duration>,
}

impl ReportDocument {
    pub fn new(config: RunConfig, mut results: Vec<Verdict>) -> Self {
        results.sort_by(|a, b| a.identity_id.cmp(&b.identity_id));
        ReportDocument { version: env!("CARGO_PKG_VERSION").to_string(), config, results, wall_time: None }
    }

    pub fn pass(&self) -> bool {
        self.results.iter().all(|v| v.pass)
    }

    pub fn to_json_value(&self) -> Value {
        let mut config = serde_json::to_value(&self.config).expect("config serializes");
        floats_to_strings(&mut config);
        json!({
            "schema_version": SCHEMA_VERSION,
            "version": self.version,
            "config": config,
            "results": self.results.iter().map(verdict_json).collect::<Vec<_>>(),
            "pass": self.pass(),
            "wall_time": self.wall_time.map(seconds),
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json_value()).expect("report serializes");
        s.push('\n');
        s
    }

    /// One table per identity: the verdict itself followed by its sub-checks.
    pub fn to_markdown(&self) -> String {
        let mut out = String::from("# Verification report\n\n");
        let _ = writeln!(out, "version {}, {} identities, aggregate: **{}**\n", self.version, self.results.len(), pass_word(self.pass()));
        for v in &self.results {
            let _ = writeln!(out, "## {} ({})\n", v.identity_id, v.mode);
            out.push_str("| check | mode | parameters | residual | order/window | result |\n");
            out.push_str("|---|---|---|---|---|---|\n");
            let mut rows = Vec::new();
            flatten(v, 0, &mut rows);
            for (depth, r) in rows {
                let name = format!("{}{}", "&nbsp;&nbsp;".repeat(depth), r.identity_id);
                let params = r.params.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(", ");
                let ow = match (r.order, r.window) {
                    (Some(n), Some(w)) => format!("N={n}, W={w}"),
                    (Some(n), None) => format!("N={n}"),
                    (None, Some(w)) => format!("W={w}"),
                    (None, None) => String::new(),
                };
                let _ = writeln!(
                    out,
                    "| {} | {} | {} | {} | {} | {} |",
                    escape(&name),
                    r.mode,
                    escape(&params),
                    escape(&r.residual.to_string()),
                    ow,
                    pass_word(r.pass)
                );
            }
            for n in &v.notes {
                let _ = writeln!(out, "\n> {}", escape(n));
            }
            out.push('\n');
        }
        if let Some(t) = self.wall_time {
            let _ = writeln!(out, "total wall time: {}s", seconds(t));
        }
        out
    }

    /// One line per identity, plus the first failure of every failing one.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for v in &self.results {
            let _ = write!(out, "{v}");
            if let Some(t) = v.elapsed {
                let _ = write!(out, " ({}s)", seconds(t));
            }
            out.push('\n');
            if let Some(f) = v.first_failure() {
                if !std::ptr::eq(f, v) {
                    let _ = writeln!(out, "  first failure: {f}");
                }
                for n in &f.notes {
                    let _ = writeln!(out, "  note: {n}");
                }
            }
        }
        let _ = writeln!(out, "{} of {} passed", self.results.iter().filter(|v| v.pass).count(), self.results.len());
        out
    }
}

fn pass_word(p: bool) -> &'static str {
    if p {
        "PASS"
    } else {
        "FAIL"
    }
}

fn escape(s: &str) -> String {
    s.replace('|', "\\|")
}

fn flatten<'a>(v: &'a Verdict, depth: usize, out: &mut Vec<(usize, &'a Verdict)>) {
    out.push((depth, v));
    for c in &v.checks {
        flatten(c, depth + 1, out);
    }
}

/// Floats become decimal strings; integers stay JSON numbers.
fn floats_to_strings(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => *v = Value::String(format!("{:e}", n.as_f64().unwrap_or(f64::NAN))),
        Value::Array(xs) => xs.iter_mut().for_each(floats_to_strings),
        Value::Object(m) => m.values_mut().for_each(floats_to_strings),
        _ => {}
    }
}

fn seconds(d: Duration) -> String {
    format!("{:.3}", d.as_secs_f64())
}

/// Stable field order; residuals, tolerances and parameters as strings.
pub fn verdict_json(v: &Verdict) -> Value {
    let params: Map<String, Value> = v.params.iter().map(|(k, x)| (k.clone(), Value::String(x.clone()))).collect();
    let mut m = Map::new();
    m.insert("identity_id".into(), json!(v.identity_id));
    m.insert("mode".into(), json!(v.mode.as_str()));
    m.insert("params".into(), Value::Object(params));
    m.insert("residual".into(), json!(v.residual.to_string()));
    m.insert("pass".into(), json!(v.pass));
    m.insert("order".into(), json!(v.order));
    m.insert("window".into(), json!(v.window));
    m.insert("precision_bits".into(), json!(v.precision_bits));
    m.insert("tolerance".into(), json!(v.tolerance.map(crate::numeric::format_magnitude)));
    m.insert("checks".into(), Value::Array(v.checks.iter().map(verdict_json).collect()));
    m.insert("notes".into(), json!(v.notes));
    if let Some(t) = v.elapsed {
        m.insert("elapsed".into(), json!(seconds(t)));
    }
    Value::Object(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::LaurentPoly;
    use crate::verdict::Mode;

    #[test]
    fn empty_run_is_a_valid_document() {
        let doc = ReportDocument::new(RunConfig::default(), vec![]);
        let v: Value = serde_json::from_str(&doc.to_json()).unwrap();
        assert_eq!(v["schema_version"], 1);
        assert_eq!(v["results"], json!([]));
        assert_eq!(v["pass"], true);
        assert_eq!(v["wall_time"], Value::Null);
    }

    #[test]
    fn config_floats_are_strings() {
        let cfg = RunConfig { tol: Some(1e-20), seed: Some(7), ..Default::default() };
        let v = ReportDocument::new(cfg, vec![]).to_json_value();
        assert_eq!(v["config"]["tol"], "1e-20");
        assert_eq!(v["config"]["seed"], 7);
    }

    #[test]
    fn residual_serialization() {
        let exact = Verdict::new("x", Mode::Formal).exact(LaurentPoly::zero());
        let num = Verdict::new("y", Mode::Numeric).precision(128).magnitude(3.2e-21, 1e-20);
        let doc = ReportDocument::new(RunConfig::default(), vec![num, exact]);
        let v = doc.to_json_value();
        assert_eq!(v["results"][0]["identity_id"], "x");
        assert_eq!(v["results"][0]["residual"], "0");
        assert_eq!(v["results"][1]["residual"], "3.2e-21");
        assert_eq!(v["results"][1]["precision_bits"], 128);
        let keys: Vec<&String> = v["results"][0].as_object().unwrap().keys().collect();
        assert_eq!(keys[..3], ["identity_id", "mode", "params"]);
    }

    #[test]
    fn aggregate_fails_with_any_member() {
        let bad = Verdict::new("z", Mode::Formal).fail("no");
        let doc = ReportDocument::new(RunConfig::default(), vec![Verdict::new("a", Mode::Formal), bad]);
        assert!(!doc.pass());
        assert!(doc.to_markdown().contains("## z (formal)"));
        assert!(doc.to_text().contains("1 of 2 passed"));
    }
}
