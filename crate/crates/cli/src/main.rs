use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qtriple::bilateral::WindowSource;
use qtriple::config::{parse_complex, RunConfig};
use qtriple::convergence::{region_predicate, Region, RegionPoint};
use qtriple::multidim::default_x;
use qtriple::registry::{self, Entry};
use qtriple::report::ReportDocument;
use qtriple::verdict::{Mode, Verdict};
use qtriple::Error;

/// Exact, formal and high-precision verification of bilateral q-series identities.
#[derive(Parser, Debug)]
#[command(name = "qtriple", version)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true)]
    format: Option<Format>,
    /// Flat TOML file with the same keys as the flags; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Markdown,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the identity registry.
    List,
    /// Run symbolic, formal or window checks (each entry's default mode unless --mode).
    Verify(RunArgs),
    /// Run the sampled numeric mode of each selected entry.
    Numeric(RunArgs),
    /// Convergence-region tools.
    Region {
        #[arg(value_enum)]
        tool: RegionTool,
        #[command(flatten)]
        params: Params,
    },
    /// Replay a bilateralization chain window by window.
    Derive {
        /// q-binomial, pfaff-saalschutz, q-abel-rothe or rothe3.
        #[arg(long, default_value = "q-binomial")]
        source: String,
        #[command(flatten)]
        params: Params,
    },
    /// Like verify, but emits a report document (JSON unless --format).
    Report(RunArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum RegionTool {
    Containment,
    Probe,
    Predicate,
    Dominating,
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Identity id (repeatable).
    #[arg(long = "identity", short = 'i')]
    identities: Vec<String>,
    /// Run every registry entry.
    #[arg(long, conflicts_with = "identities")]
    all: bool,
    /// symbolic_exact, formal, window_exact, random_rational, numeric, numeric_limit or sampling.
    #[arg(long)]
    mode: Option<String>,
    #[command(flatten)]
    params: Params,
}

#[derive(Args, Debug, Default)]
struct Params {
    /// Graded truncation order N.
    #[arg(long)]
    order: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    n: Option<i64>,
    /// Comma-separated window half-widths.
    #[arg(long, value_delimiter = ',')]
    n_vec: Option<Vec<i64>>,
    #[arg(long)]
    r: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    m: Option<i64>,
    /// Comma-separated lattice point.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    k: Option<Vec<i64>>,
    #[arg(long, allow_hyphen_values = true)]
    a: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    b: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    c: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    z: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    q: Option<String>,
    /// Comma-separated x_1, ..., x_r (complex: `re+imi` or `pi:p/q`).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    x: Option<Vec<String>>,
    /// Comma-separated 0-based permutation images.
    #[arg(long, value_delimiter = ',')]
    sigma: Option<Vec<usize>>,
    /// none, b_zero or a_zero.
    #[arg(long)]
    specialization: Option<String>,
    /// Probe target: rgj, rgjc, mrgj or mrgjc.
    #[arg(long)]
    target: Option<String>,
    #[arg(long, value_delimiter = ',')]
    windows: Option<Vec<i64>>,
    #[arg(long)]
    max_window: Option<i64>,
    /// Working precision in bits.
    #[arg(long)]
    prec: Option<u32>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    /// Record wall-clock times in the output.
    #[arg(long)]
    timings: bool,
}

macro_rules! overlay {
    ($cfg:ident, $p:ident, $($f:ident),+) => {
        $(if $p.$f.is_some() { $cfg.$f = $p.$f.clone(); })+
    };
}

impl Params {
    fn apply(&self, cfg: &mut RunConfig) {
        overlay!(cfg, self, order, n, n_vec, r, m, k, a, b, c, z, q, x, sigma, specialization, target, windows, max_window, prec, tol, seed, samples, trials);
        cfg.timings |= self.timings;
    }
}

enum Failure {
    Usage(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(_) | Error::RegionViolation(_) => Failure::Usage(e.to_string()),
            _ => Failure::Internal(e.to_string()),
        }
    }
}

fn load_config(path: &Option<PathBuf>) -> Result<RunConfig, Failure> {
    let Some(path) = path else { return Ok(RunConfig::default()) };
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| Failure::Usage(format!("bad config {}: {e}", path.display())))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("QTRIPLE_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(m)) => {
            eprintln!("internal error: {m}");
            ExitCode::from(3)
        }
    }
}

fn run(cli: Cli) -> Result<bool, Failure> {
    let mut cfg = load_config(&cli.config)?;
    let format = cli.format;
    let start = Instant::now();
    let (cfg, results) = match cli.command {
        Command::List => {
            print!("{}", list(format.unwrap_or(Format::Text)));
            return Ok(true);
        }
        Command::Verify(args) => {
            let mode = select(&mut cfg, &args)?;
            let out = registry::run_selected(&cfg, mode)?;
            (cfg, out)
        }
        Command::Report(args) => {
            let mode = select(&mut cfg, &args)?;
            let out = registry::run_selected(&cfg, mode)?;
            let mut doc = ReportDocument::new(cfg, out);
            if doc.config.timings {
                doc.wall_time = Some(start.elapsed());
            }
            match format.unwrap_or(Format::Json) {
                Format::Markdown => print!("{}", doc.to_markdown()),
                Format::Text => print!("{}", doc.to_text()),
                Format::Json => print!("{}", doc.to_json()),
            }
            return Ok(doc.pass());
        }
        Command::Numeric(args) => {
            if args.mode.is_some() {
                return Err(Failure::Usage("numeric picks the sampled mode itself; use verify --mode".into()));
            }
            select(&mut cfg, &args)?;
            let out = numeric(&cfg)?;
            (cfg, out)
        }
        Command::Region { tool, params } => {
            params.apply(&mut cfg);
            cfg.validate()?;
            let out = region(&cfg, tool)?;
            (cfg, vec![out])
        }
        Command::Derive { source, params } => {
            params.apply(&mut cfg);
            cfg.validate()?;
            let src = WindowSource::parse(&source).ok_or_else(|| Failure::Usage(format!("unknown source {source:?}")))?;
            let out = registry::derive(src, cfg.n.unwrap_or(4), cfg.r.unwrap_or(2), cfg.seed())?;
            (cfg, out)
        }
    };
    let mut doc = ReportDocument { results, ..ReportDocument::new(cfg, vec![]) };
    if doc.config.timings {
        doc.wall_time = Some(start.elapsed());
    }
    match format.unwrap_or(Format::Text) {
        Format::Text => print!("{}", doc.to_text()),
        Format::Json => print!("{}", doc.to_json()),
        Format::Markdown => print!("{}", doc.to_markdown()),
    }
    Ok(doc.pass())
}

/// Folds the run arguments into the config and returns the requested mode.
fn select(cfg: &mut RunConfig, args: &RunArgs) -> Result<Option<Mode>, Failure> {
    args.params.apply(cfg);
    if args.all {
        cfg.identities.clear();
    } else if !args.identities.is_empty() {
        cfg.identities = args.identities.clone();
    } else if cfg.identities.is_empty() {
        return Err(Failure::Usage("name at least one --identity or pass --all".into()));
    }
    if args.mode.is_some() {
        cfg.mode = args.mode.clone();
    }
    cfg.validate()?;
    Ok(cfg.mode()?)
}

fn numeric(cfg: &RunConfig) -> Result<Vec<Verdict>, Failure> {
    let entries: Vec<&Entry> = if cfg.identities.is_empty() {
        registry::registry().iter().filter(|e| registry::numeric_mode(e).is_some()).collect()
    } else {
        cfg.identities
            .iter()
            .map(|id| registry::lookup(id).ok_or_else(|| Failure::Usage(format!("unknown identity {id:?}"))))
            .collect::<Result<_, _>>()?
    };
    let mut out = Vec::new();
    for e in entries {
        let mode = registry::numeric_mode(e).ok_or_else(|| Failure::Usage(format!("{} has no numeric mode", e.id)))?;
        out.push(e.run(cfg, Some(mode))?);
    }
    out.sort_by(|a, b| a.identity_id.cmp(&b.identity_id));
    Ok(out)
}

fn region(cfg: &RunConfig, tool: RegionTool) -> Result<Verdict, Failure> {
    let id = match tool {
        RegionTool::Containment => "containment",
        RegionTool::Probe => "probe",
        RegionTool::Dominating => "dominating-bound",
        RegionTool::Predicate => return Ok(predicate(cfg)?),
    };
    let e = registry::lookup(id).expect("registered");
    Ok(e.run(cfg, None)?)
}

fn predicate(cfg: &RunConfig) -> Result<Verdict, Error> {
    let prec = cfg.prec();
    let x = match &cfg.x {
        Some(xs) => xs.iter().map(|s| parse_complex(prec, s)).collect::<Result<_, _>>()?,
        None => default_x(cfg.r.unwrap_or(1), prec),
    };
    let p = RegionPoint { a: cfg.complex(&cfg.a, "0.3")?, b: cfg.complex(&cfg.b, "0.4")?, z: cfg.complex(&cfg.z, "0.9")?, x, q: cfg.complex(&cfg.q, "0.5")? };
    let new = region_predicate(&p, Region::New)?;
    let old = region_predicate(&p, Region::Old)?;
    let v = Verdict::new("region-predicate", Mode::Numeric)
        .param("r", p.x.len())
        .param("new_region", new)
        .param("old_region", old);
    // the old region must lie inside the new one
    Ok(if old && !new { v.fail("point in the old region but outside the new one") } else { v.count(0, 1) })
}

fn list(format: Format) -> String {
    let reg = registry::registry();
    let modes = |e: &Entry| e.modes.iter().map(|m| m.as_str()).collect::<Vec<_>>();
    match format {
        Format::Json => {
            let v: Vec<_> = reg
                .iter()
                .map(|e| serde_json::json!({ "id": e.id, "description": e.description, "modes": modes(e), "default_mode": e.default_mode().as_str() }))
                .collect();
            let mut s = serde_json::to_string_pretty(&v).expect("list serializes");
            s.push('\n');
            s
        }
        Format::Markdown => {
            let mut s = String::from("| id | modes | description |\n|---|---|---|\n");
            for e in reg {
                s += &format!("| {} | {} | {} |\n", e.id, modes(e).join(", "), e.description.replace('|', "\\|"));
            }
            s
        }
        Format::Text => {
            let width = reg.iter().map(|e| e.id.len()).max().unwrap_or(0);
            let mut s = String::new();
            for e in reg {
                s += &format!("{:width$}  {:44}  {}\n", e.id, modes(e).join(","), e.description);
            }
            s
        }
    }
}
