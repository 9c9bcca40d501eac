//! Command-line front end: validation, building, invariants, families,
//! boundary probing, audits, and plot data.
//!
//! Exit codes: 0 on success, 1 when validation or an audit fails, 2 on
//! malformed input (including decimal numbers where an exact `p/q` is
//! required). Failures print a single-line JSON error to stderr.

use std::fs;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use pgn_core::builder::{RawSeed, SelfSimilarSeed};
use pgn_core::exactnum::Rational;
use pgn_core::invariants::{chi_pair_at, chi_pair_periodic, SpectrumPoint};
use pgn_core::nsystem::{NSystem, RawNSystem};
use pgn_core::search::probe_boundary;
use pgn_core::spectra::{regular_family_seed, s35_arc2_seed, s35_family_seed};
use pgn_core::verify::{audit_system, AuditReport, CheckRecord, CheckStatus};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "pgn", version, about = "Exact tools for n-systems and approximation spectra")]
struct Cli {
    /// Worker threads for parallel sweeps (overrides PGN_THREADS).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a system file against the S1/S2/S3 rules.
    Validate {
        /// JSON system file
        system: PathBuf,
    },
    /// Unfold a self-similar seed into a finite system.
    Build {
        #[arg(long)]
        seed: PathBuf,
        #[arg(long)]
        periods: usize,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the exact invariant pair (alpha, beta) of a seed.
    Invariants {
        #[arg(long)]
        seed: PathBuf,
        /// Division index; defaults to the seed's own.
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, default_value_t = 12)]
        digits: usize,
    },
    /// Emit a CSV sweep of one of the named seed families.
    Family {
        #[arg(long)]
        name: FamilyName,
        #[arg(long, value_parser = parse_rational)]
        g: Rational,
        /// Period length bound (s35) — rows are emitted for 3..=s.
        #[arg(long)]
        s: Option<usize>,
        /// Period ratio (regular); defaults to g.
        #[arg(long, value_parser = parse_rational)]
        rho: Option<Rational>,
        /// Perturbation (s35arc2); defaults to the scan 1/100, 1/1000, 1/10000.
        #[arg(long, value_parser = parse_rational)]
        eps: Option<Rational>,
        /// Components (regular only).
        #[arg(long, required_if_eq("name", "regular"))]
        n: Option<usize>,
        /// Tied index (regular only).
        #[arg(long, required_if_eq("name", "regular"))]
        m: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 12)]
        digits: usize,
    },
    /// Probe the spectrum boundary over pattern, g and rho grids.
    Probe {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, value_delimiter = ',', value_parser = parse_rational, required = true)]
        g_grid: Vec<Rational>,
        #[arg(long)]
        s_max: usize,
        /// Optional rho grid; defaults to powers of 2 around each g.
        #[arg(long, value_delimiter = ',', value_parser = parse_rational)]
        rho_grid: Option<Vec<Rational>>,
        /// Bisection iterations per pattern.
        #[arg(long)]
        iters: u32,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 12)]
        digits: usize,
    },
    /// Run the audit checks on a system file.
    Audit {
        #[arg(long)]
        system: PathBuf,
        /// Keep only these rule ids in the report.
        #[arg(long, value_delimiter = ',')]
        rules: Option<Vec<String>>,
    },
    /// Overlay exact boundary curves on a probe or family CSV.
    Plotdata {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        curves: Vec<CurveName>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 12)]
        digits: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyName {
    Regular,
    S35,
    #[value(name = "s35arc2")]
    S35Arc2,
}

#[derive(Clone, Copy, ValueEnum)]
enum CurveName {
    #[value(name = "s24")]
    S24,
    #[value(name = "s35_high")]
    S35High,
    #[value(name = "s35_conj")]
    S35Conj,
    #[value(name = "s35_arc2")]
    S35Arc2,
}

impl CurveName {
    fn label(self) -> &'static str {
        match self {
            CurveName::S24 => "s24",
            CurveName::S35High => "s35_high",
            CurveName::S35Conj => "s35_conj",
            CurveName::S35Arc2 => "s35_arc2",
        }
    }
}

fn parse_rational(text: &str) -> Result<Rational, String> {
    text.parse::<Rational>().map_err(|e| e.to_string())
}

/// A failure with its exit code and machine-readable shape.
enum CliError {
    /// unreadable files, bad JSON/CSV, out-of-range parameters — exit 2
    Malformed(String),
    /// a system or seed failed validation — exit 1
    Validation { rule: Option<&'static str>, message: String },
    /// an audit reported violations — exit 1
    Audit { rule: Option<String>, message: String },
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Malformed(_) => 2,
            CliError::Validation { .. } | CliError::Audit { .. } => 1,
        }
    }

    fn to_json(&self) -> String {
        let (kind, message, rule) = match self {
            CliError::Malformed(m) => ("malformed", m.as_str(), None),
            CliError::Validation { rule, message } => ("validation", message.as_str(), *rule),
            CliError::Audit { rule, message } => ("audit", message.as_str(), rule.as_deref()),
        };
        let mut payload = serde_json::json!({ "kind": kind, "message": message });
        if let Some(rule) = rule {
            payload["rule"] = serde_json::json!(rule);
        }
        serde_json::to_string(&payload).expect("error payload serializes")
    }
}

fn malformed<E: std::fmt::Display>(err: E) -> CliError {
    CliError::Malformed(err.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(err) = run(cli) {
        eprintln!("{}", err.to_json());
        return ExitCode::from(err.code());
    }
    ExitCode::SUCCESS
}

fn run(cli: Cli) -> Result<(), CliError> {
    init_threads(cli.threads)?;
    match cli.command {
        Command::Validate { system } => cmd_validate(&system),
        Command::Build { seed, periods, out } => cmd_build(&seed, periods, out.as_deref()),
        Command::Invariants { seed, m, digits } => cmd_invariants(&seed, m, digits),
        Command::Family { name, g, s, rho, eps, n, m, out, digits } => {
            cmd_family(name, g, s, rho, eps, n, m, out.as_deref(), digits)
        }
        Command::Probe { m, n, g_grid, s_max, rho_grid, iters, out, digits } => {
            cmd_probe(m, n, &g_grid, s_max, rho_grid.as_deref(), iters, out.as_deref(), digits)
        }
        Command::Audit { system, rules } => cmd_audit(&system, rules.as_deref()),
        Command::Plotdata { input, curves, out, digits } => {
            cmd_plotdata(&input, &curves, out.as_deref(), digits)
        }
    }
}

fn init_threads(flag: Option<usize>) -> Result<(), CliError> {
    let count = match flag {
        Some(k) => Some(k),
        None => match std::env::var("PGN_THREADS") {
            Ok(v) => Some(v.parse::<usize>().map_err(|e| {
                CliError::Malformed(format!("PGN_THREADS must be an integer: {e}"))
            })?),
            Err(_) => None,
        },
    };
    if let Some(k) = count {
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| CliError::Malformed(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn read_file(path: &std::path::Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Malformed(format!("{}: {e}", path.display())))
}

fn write_output(out: Option<&std::path::Path>, bytes: &[u8]) -> Result<(), CliError> {
    match out {
        Some(path) => {
            fs::write(path, bytes).map_err(|e| malformed(format!("{}: {e}", path.display())))
        }
        None => std::io::stdout().write_all(bytes).map_err(malformed),
    }
}

fn load_seed(path: &std::path::Path) -> Result<SelfSimilarSeed, CliError> {
    let raw: RawSeed = serde_json::from_str(&read_file(path)?).map_err(malformed)?;
    SelfSimilarSeed::from_raw(raw)
        .map_err(|e| CliError::Validation { rule: None, message: e.to_string() })
}

#[derive(Serialize)]
struct ValidateReport {
    valid: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    rule: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    q0: Option<Rational>,
    #[serde(skip_serializing_if = "Option::is_none")]
    q1: Option<Rational>,
    #[serde(skip_serializing_if = "Option::is_none")]
    breakpoints: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    nondegenerate: Option<bool>,
}

fn print_json<T: Serialize>(value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(malformed)?;
    text.push('\n');
    write_output(None, text.as_bytes())
}

fn cmd_validate(path: &std::path::Path) -> Result<(), CliError> {
    let raw: RawNSystem = serde_json::from_str(&read_file(path)?).map_err(malformed)?;
    match NSystem::from_raw(raw) {
        Ok(sys) => {
            let report = ValidateReport {
                valid: true,
                rule: None,
                error: None,
                n: Some(sys.n()),
                q0: Some(sys.q0().clone()),
                q1: Some(sys.q_end().clone()),
                breakpoints: Some(sys.breakpoint_count()),
                nondegenerate: Some(sys.is_nondegenerate()),
            };
            print_json(&report)
        }
        Err(e) => {
            let report = ValidateReport {
                valid: false,
                rule: Some(e.rule_id()),
                error: Some(e.to_string()),
                n: None,
                q0: None,
                q1: None,
                breakpoints: None,
                nondegenerate: None,
            };
            print_json(&report)?;
            Err(CliError::Validation { rule: Some(e.rule_id()), message: e.to_string() })
        }
    }
}

fn cmd_build(
    seed: &std::path::Path,
    periods: usize,
    out: Option<&std::path::Path>,
) -> Result<(), CliError> {
    if periods == 0 {
        return Err(CliError::Malformed("--periods must be at least 1".into()));
    }
    let seed = load_seed(seed)?;
    let sys = seed
        .unfold(periods)
        .map_err(|e| CliError::Validation { rule: None, message: e.to_string() })?;
    let mut text = serde_json::to_string_pretty(&sys).map_err(malformed)?;
    text.push('\n');
    write_output(out, text.as_bytes())
}

fn cmd_invariants(
    seed: &std::path::Path,
    m: Option<usize>,
    digits: usize,
) -> Result<(), CliError> {
    let seed = load_seed(seed)?;
    let pair = match m {
        None => chi_pair_periodic(&seed),
        Some(m) => chi_pair_at(&seed, m).map_err(malformed)?,
    };
    let (alpha, beta) = pair.as_rationals();
    println!("alpha = {alpha}, beta = {beta}");
    println!("alpha ~ {}, beta ~ {}", alpha.to_decimal(digits), beta.to_decimal(digits));
    Ok(())
}

/// One `g, s, alpha, beta, alpha_dec, beta_dec, family_tag` row.
fn family_row(
    g: &Rational,
    s: usize,
    point: &SpectrumPoint,
    tag: String,
    digits: usize,
) -> [String; 7] {
    let (alpha, beta) = point.as_rationals();
    [
        g.to_string(),
        s.to_string(),
        alpha.to_string(),
        beta.to_string(),
        alpha.to_decimal(digits),
        beta.to_decimal(digits),
        tag,
    ]
}

#[allow(clippy::too_many_arguments)]
fn cmd_family(
    name: FamilyName,
    g: Rational,
    s: Option<usize>,
    rho: Option<Rational>,
    eps: Option<Rational>,
    n: Option<usize>,
    m: Option<usize>,
    out: Option<&std::path::Path>,
    digits: usize,
) -> Result<(), CliError> {
    let mut rows: Vec<[String; 7]> = Vec::new();
    match name {
        FamilyName::Regular => {
            let (n, m) = (n.expect("required_if_eq"), m.expect("required_if_eq"));
            let rho = rho.unwrap_or_else(|| g.clone());
            let (_, point) =
                regular_family_seed(n, m, g.clone(), rho.clone()).map_err(malformed)?;
            let tag = format!("regular(n={n},m={m},rho={rho})");
            rows.push(family_row(&g, 1, &point, tag, digits));
        }
        FamilyName::S35 => {
            let s_hi = s.unwrap_or(8);
            if s_hi < 3 {
                return Err(CliError::Malformed(format!("--s must be at least 3, got {s_hi}")));
            }
            for s in 3..=s_hi {
                let (_, point) = s35_family_seed(g.clone(), s).map_err(malformed)?;
                rows.push(family_row(&g, s, &point, "s35".into(), digits));
            }
        }
        FamilyName::S35Arc2 => {
            let scan = match eps {
                Some(e) => vec![e],
                None => ["1/100", "1/1000", "1/10000"]
                    .iter()
                    .map(|t| t.parse().unwrap())
                    .collect(),
            };
            for eps in scan {
                let sample = s35_arc2_seed(g.clone(), eps.clone()).map_err(malformed)?;
                let tag = format!("s35arc2(eps={eps})");
                rows.push(family_row(&g, sample.seed.s(), &sample.point, tag, digits));
            }
        }
    }

    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record(["g", "s", "alpha", "beta", "alpha_dec", "beta_dec", "family_tag"])
        .map_err(malformed)?;
    for row in &rows {
        wtr.write_record(row).map_err(malformed)?;
    }
    let bytes = wtr.into_inner().map_err(malformed)?;
    write_output(out, &bytes)
}

#[allow(clippy::too_many_arguments)]
fn cmd_probe(
    m: usize,
    n: usize,
    g_grid: &[Rational],
    s_max: usize,
    rho_grid: Option<&[Rational]>,
    iters: u32,
    out: Option<&std::path::Path>,
    digits: usize,
) -> Result<(), CliError> {
    let rows = probe_boundary(m, n, g_grid, s_max, rho_grid, iters).map_err(malformed)?;
    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record([
        "m",
        "n",
        "g",
        "s",
        "rho",
        "pattern",
        "alpha_lo",
        "alpha_hi",
        "beta",
        "alpha_lo_dec",
        "alpha_hi_dec",
        "beta_dec",
    ])
    .map_err(malformed)?;
    for row in &rows {
        wtr.write_record([
            row.m.to_string(),
            row.n.to_string(),
            row.g.to_string(),
            row.s.to_string(),
            row.rho.to_string(),
            row.pattern.to_string(),
            row.alpha_lo.to_string(),
            row.alpha_hi.to_string(),
            row.beta.to_string(),
            row.alpha_lo.to_decimal(digits),
            row.alpha_hi.to_decimal(digits),
            row.beta.to_decimal(digits),
        ])
        .map_err(malformed)?;
    }
    let bytes = wtr.into_inner().map_err(malformed)?;
    write_output(out, &bytes)
}

fn cmd_audit(path: &std::path::Path, rules: Option<&[String]>) -> Result<(), CliError> {
    let raw: RawNSystem = serde_json::from_str(&read_file(path)?).map_err(malformed)?;
    let report = match NSystem::from_raw(raw) {
        Ok(sys) => audit_system(&sys),
        Err(e) => AuditReport {
            checks: vec![CheckRecord {
                rule: e.rule_id().to_string(),
                location: "system".to_string(),
                status: CheckStatus::Violation,
                slack: None,
                note: Some(e.to_string()),
            }],
        },
    };
    let report = match rules {
        Some(keep) => AuditReport {
            checks: report
                .checks
                .into_iter()
                .filter(|c| keep.iter().any(|r| r == &c.rule))
                .collect(),
        },
        None => report,
    };
    print_json(&report)?;
    let violations = report.violations();
    if violations.is_empty() {
        Ok(())
    } else {
        Err(CliError::Audit {
            rule: Some(violations[0].rule.clone()),
            message: format!("{} violation(s)", violations.len()),
        })
    }
}

/// Exact curve samples g -> (alpha(g), g * alpha(g)) for the named arcs.
fn curve_alpha(curve: CurveName, g: &Rational) -> Option<Rational> {
    let one = Rational::one();
    match curve {
        CurveName::S24 => (*g >= one).then(|| g.clone()),
        CurveName::S35High => (*g >= Rational::from(2)).then(|| &(g * g) + &one),
        CurveName::S35Conj => {
            (*g >= one).then(|| &(&(g * g) + &one) - &(g + &one).recip())
        }
        CurveName::S35Arc2 => {
            // both polynomial gates must hold for the arc point to be real
            let gate1 = Rational::from(3) * g.pow(3) - Rational::from(7) * g * g
                + Rational::from(4) * g
                - Rational::from(2);
            let gate2 = g.pow(3) - g * g - g - &one;
            if gate1.is_negative() || gate2.is_positive() {
                return None;
            }
            Some(&(&(Rational::new(3, 2).unwrap() * g * g) - g) + &one)
        }
    }
}

/// Sampling window for a curve: the input g-range clipped to the curve's
/// domain, except the short second arc which has its own fixed window.
fn curve_window(curve: CurveName, lo: &Rational, hi: &Rational) -> (Rational, Rational) {
    match curve {
        CurveName::S24 | CurveName::S35Conj => {
            let floor = Rational::one();
            let lo = lo.clone().max(floor.clone());
            (lo.clone(), hi.clone().max(lo))
        }
        CurveName::S35High => {
            let floor = Rational::from(2);
            let lo = lo.clone().max(floor.clone());
            (lo.clone(), hi.clone().max(lo))
        }
        CurveName::S35Arc2 => (Rational::new(899, 500).unwrap(), Rational::new(1839, 1000).unwrap()),
    }
}

fn cmd_plotdata(
    input: &std::path::Path,
    curves: &[CurveName],
    out: Option<&std::path::Path>,
    digits: usize,
) -> Result<(), CliError> {
    let text = read_file(input)?;
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let headers = rdr.headers().map_err(malformed)?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let g_col = col("g").ok_or_else(|| CliError::Malformed("input has no `g` column".into()))?;
    let alpha_col = col("alpha_lo")
        .or_else(|| col("alpha"))
        .ok_or_else(|| CliError::Malformed("input has no `alpha_lo` or `alpha` column".into()))?;
    let beta_col =
        col("beta").ok_or_else(|| CliError::Malformed("input has no `beta` column".into()))?;

    let mut points: Vec<(Rational, Rational, Rational)> = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(malformed)?;
        let field = |i: usize| -> Result<Rational, CliError> {
            record
                .get(i)
                .ok_or_else(|| CliError::Malformed(format!("short row: {record:?}")))?
                .parse()
                .map_err(malformed)
        };
        points.push((field(g_col)?, field(alpha_col)?, field(beta_col)?));
    }

    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record(["source", "curve", "g", "alpha", "beta", "alpha_dec", "beta_dec"])
        .map_err(malformed)?;
    for (g, alpha, beta) in &points {
        wtr.write_record([
            "probe".to_string(),
            String::new(),
            g.to_string(),
            alpha.to_string(),
            beta.to_string(),
            alpha.to_decimal(digits),
            beta.to_decimal(digits),
        ])
        .map_err(malformed)?;
    }

    let (range_lo, range_hi) = match points.iter().map(|(g, _, _)| g.clone()).fold(
        None::<(Rational, Rational)>,
        |acc, g| match acc {
            None => Some((g.clone(), g)),
            Some((lo, hi)) => Some((lo.min(g.clone()), hi.max(g))),
        },
    ) {
        Some(pair) => pair,
        None => (Rational::one(), Rational::from(3)),
    };

    const STEPS: usize = 32;
    for &curve in curves {
        let (lo, hi) = curve_window(curve, &range_lo, &range_hi);
        let width = &hi - &lo;
        let samples = if width.is_zero() { 0 } else { STEPS };
        for i in 0..=samples {
            let g = &lo + &(&width * &Rational::new(i as i64, STEPS as i64).unwrap());
            let Some(alpha) = curve_alpha(curve, &g) else { continue };
            let beta = &g * &alpha;
            wtr.write_record([
                "curve".to_string(),
                curve.label().to_string(),
                g.to_string(),
                alpha.to_string(),
                beta.to_string(),
                alpha.to_decimal(digits),
                beta.to_decimal(digits),
            ])
            .map_err(malformed)?;
        }
    }

    let bytes = wtr.into_inner().map_err(malformed)?;
    write_output(out, &bytes)
}
