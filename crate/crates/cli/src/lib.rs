//! `circstab` subcommands. Everything is routed through [`run_cli`] so the
//! binary and the tests share one entry point.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use circstab::experiments::{
    discretization_scan, holder_fit, profile_to_depth, read_records_csv, slope_check,
    stability_scan, write_records_csv, HolderFit, ScanReport, SlopeCheck,
};
use circstab::measures::{discrepancy, dk_suite, rotation_orbit};
use circstab::response::{fd_response, response_pairing, DEFAULT_BURN_IN, DEFAULT_ORBIT_LEN};
use circstab::{
    canonicalize, continued_fraction_exact, Error, ExactReal, ExperimentConfig, FourierSeries,
    MeasureKind, ScalingRecord,
};
use clap::{Parser, Subcommand};
use serde::Serialize;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_NUMERIC: i32 = 2;

/// Thread count override for the rayon pool.
pub const THREADS_ENV: &str = "CIRCSTAB_THREADS";

#[derive(Parser, Debug)]
#[command(
    name = "circstab",
    version,
    about = "Statistical stability experiments for circle maps"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// W distance to Lebesgue across a convergent ladder.
    Stability(ScanArgs),
    /// W distance between grid-discretization measures and the true one.
    Discretize(ScanArgs),
    /// Extreme discrepancy of a rotation orbit.
    Discrepancy {
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.0)]
        x0: f64,
    },
    /// Randomized Denjoy-Koksma suite.
    DkCheck {
        #[arg(long, default_value = "default")]
        suite: String,
        #[arg(long, default_value_t = 1000)]
        cases: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Linear response of cos(2 pi x) under the perturbation eps cos(2 pi x).
    Response {
        #[arg(long, default_value = "golden")]
        alpha: String,
        /// Comma separated.
        #[arg(long, value_delimiter = ',', default_values_t = [1e-2, 1e-3])]
        eps: Vec<f64>,
        #[arg(long, default_value_t = DEFAULT_ORBIT_LEN)]
        orbit_len: u64,
        #[arg(long, default_value_t = DEFAULT_BURN_IN)]
        burn_in: u64,
    },
    /// Log-log fit of a record CSV.
    HolderFit {
        #[arg(long)]
        input: PathBuf,
        /// Restrict to one measure kind.
        #[arg(long)]
        kind: Option<String>,
        /// When set, the slope is checked against 1/(gamma + 1).
        #[arg(long)]
        gamma: Option<f64>,
    },
    /// Continued fraction profile as JSON.
    ProfileAlpha {
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value_t = 20)]
        depth: usize,
    },
}

#[derive(clap::Args, Debug)]
struct ScanArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config's CSV path; `-` for stdout.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    summary: Option<PathBuf>,
}

enum Failure {
    Config(String),
    Numeric(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_config() {
            Failure::Config(e.to_string())
        } else {
            Failure::Numeric(e.to_string())
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Config(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        if e.is_io() {
            Failure::Config(e.to_string())
        } else {
            Failure::Numeric(e.to_string())
        }
    }
}

type CmdResult = std::result::Result<(), Failure>;

/// Parses `args` (program name first), runs the subcommand and returns the
/// process exit code: 0 on success, 1 for usage or config errors, 2 when the
/// numerics fail.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    if let Err(msg) = configure_threads() {
        let _ = writeln!(err, "error: {msg}");
        return EXIT_CONFIG;
    }
    let res = match cli.cmd {
        Cmd::Stability(a) => scan(&a, out, err, stability_scan),
        Cmd::Discretize(a) => scan(&a, out, err, discretization_scan),
        Cmd::Discrepancy { alpha, n, x0 } => cmd_discrepancy(&alpha, n, x0, out),
        Cmd::DkCheck { suite, cases, seed } => cmd_dk(&suite, cases, seed, out),
        Cmd::Response {
            alpha,
            eps,
            orbit_len,
            burn_in,
        } => cmd_response(&alpha, &eps, orbit_len, burn_in, out),
        Cmd::HolderFit { input, kind, gamma } => cmd_fit(&input, kind.as_deref(), gamma, out, err),
        Cmd::ProfileAlpha { alpha, depth } => cmd_profile(&alpha, depth, out),
    };
    match res {
        Ok(()) => EXIT_OK,
        Err(Failure::Config(m)) => {
            let _ = writeln!(err, "error: {m}");
            EXIT_CONFIG
        }
        Err(Failure::Numeric(m)) => {
            let _ = writeln!(err, "numeric failure: {m}");
            EXIT_NUMERIC
        }
    }
}

/// Installs a global pool of `CIRCSTAB_THREADS` threads when the variable is
/// set. A second call in the same process keeps the first pool.
fn configure_threads() -> std::result::Result<(), String> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("{THREADS_ENV} must be a positive integer, got {v:?}"))?;
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
    Ok(())
}

fn parse_alpha(s: &str) -> std::result::Result<ExactReal, Failure> {
    s.parse::<ExactReal>().map_err(Failure::from)
}

fn create(path: &Path) -> std::result::Result<BufWriter<File>, Failure> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

#[derive(Serialize)]
struct FitSummary {
    measure_kind: MeasureKind,
    fit: Option<HolderFit>,
    check: Option<SlopeCheck>,
    note: Option<String>,
}

#[derive(Serialize)]
struct ScanSummary<'a> {
    alpha: &'a str,
    gamma_hat: Option<f64>,
    records: usize,
    failures: &'a [circstab::experiments::ScanFailure],
    fits: Vec<FitSummary>,
}

fn summarize<'a>(cfg: &'a ExperimentConfig, report: &'a ScanReport) -> ScanSummary<'a> {
    let gamma_hat = cfg.profile().ok().and_then(|p| p.gamma_hat);
    let mut kinds: Vec<MeasureKind> = report.records.iter().map(|r| r.measure_kind).collect();
    kinds.sort();
    kinds.dedup();
    let fits = kinds
        .into_iter()
        .map(|k| {
            let recs: Vec<ScalingRecord> = report
                .records
                .iter()
                .filter(|r| r.measure_kind == k)
                .cloned()
                .collect();
            match holder_fit(&recs) {
                Ok(f) => FitSummary {
                    measure_kind: k,
                    check: gamma_hat.map(|g| slope_check(&f, g)),
                    note: (f.excluded > 0).then(|| format!("{} zero records excluded", f.excluded)),
                    fit: Some(f),
                },
                Err(e) => FitSummary {
                    measure_kind: k,
                    fit: None,
                    check: None,
                    note: Some(e.to_string()),
                },
            }
        })
        .collect();
    ScanSummary {
        alpha: &cfg.alpha,
        gamma_hat,
        records: report.records.len(),
        failures: &report.failures,
        fits,
    }
}

fn scan(
    a: &ScanArgs,
    out: &mut dyn Write,
    err: &mut dyn Write,
    run: fn(&ExperimentConfig) -> circstab::Result<ScanReport>,
) -> CmdResult {
    let cfg = ExperimentConfig::load(&a.config)?;
    let report = run(&cfg)?;
    for f in &report.failures {
        writeln!(err, "warning: ladder point {} failed: {}", f.param, f.error)?;
    }
    let csv_path = a.csv.clone().or_else(|| cfg.output.csv.clone());
    let summary_path = a.summary.clone().or_else(|| cfg.output.summary.clone());
    let csv_to_stdout = csv_path.as_deref().is_none_or(|p| p == Path::new("-"));
    if csv_to_stdout {
        write_records_csv(&report.records, &mut *out)?;
    } else if let Some(p) = &csv_path {
        write_records_csv(&report.records, create(p)?)?;
    }
    let summary = summarize(&cfg, &report);
    match summary_path {
        Some(p) => {
            let mut w = create(&p)?;
            serde_json::to_writer_pretty(&mut w, &summary)?;
            writeln!(w)?;
        }
        // keep stdout parseable when it already carries the CSV
        None if !csv_to_stdout => {
            serde_json::to_writer_pretty(&mut *out, &summary)?;
            writeln!(out)?;
        }
        None => {}
    }
    Ok(())
}

fn cmd_discrepancy(alpha: &str, n: usize, x0: f64, out: &mut dyn Write) -> CmdResult {
    let a = parse_alpha(alpha)?.to_f64();
    let x0 = canonicalize(x0)?;
    let d = discrepancy(&rotation_orbit(a, x0, n))?;
    serde_json::to_writer_pretty(&mut *out, &d)?;
    writeln!(out)?;
    Ok(())
}

fn cmd_dk(suite: &str, cases: usize, seed: u64, out: &mut dyn Write) -> CmdResult {
    if suite != "default" {
        return Err(Failure::Config(format!(
            "unknown suite {suite:?}; available: default"
        )));
    }
    let r = dk_suite(cases, seed)?;
    writeln!(out, "cases: {}", r.cases)?;
    writeln!(out, "violations: {}", r.violations)?;
    writeln!(out, "worst ratio: {:.6}", r.worst_ratio)?;
    for f in &r.failures {
        writeln!(out, "violation: {}", serde_json::to_string(f)?)?;
    }
    if r.violations > 0 {
        return Err(Failure::Numeric(format!(
            "{} Denjoy-Koksma violations",
            r.violations
        )));
    }
    Ok(())
}

#[derive(Serialize)]
struct ResponseOut {
    alpha: f64,
    predicted: f64,
    estimate: f64,
    rel_error: f64,
    fd: circstab::response::FdResponse,
}

fn cmd_response(
    alpha: &str,
    eps: &[f64],
    orbit_len: u64,
    burn_in: u64,
    out: &mut dyn Write,
) -> CmdResult {
    let profile = profile_to_depth(&parse_alpha(alpha)?, 24)?;
    let u = FourierSeries::cosine(1, 1.0);
    let predicted = response_pairing(&u, profile.alpha, &u)?;
    let fd = fd_response(&u, &profile, &u, eps, orbit_len, burn_in)?;
    let body = ResponseOut {
        alpha: profile.alpha,
        predicted,
        estimate: fd.estimate,
        rel_error: ((fd.estimate - predicted) / predicted).abs(),
        fd,
    };
    serde_json::to_writer_pretty(&mut *out, &body)?;
    writeln!(out)?;
    Ok(())
}

fn cmd_fit(
    input: &Path,
    kind: Option<&str>,
    gamma: Option<f64>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CmdResult {
    let file =
        File::open(input).map_err(|e| Failure::Config(format!("{}: {e}", input.display())))?;
    let mut recs = read_records_csv(file)?;
    if let Some(k) = kind {
        let k: MeasureKind = k.parse()?;
        recs.retain(|r| r.measure_kind == k);
    }
    let fit = holder_fit(&recs)?;
    if fit.excluded > 0 {
        writeln!(
            err,
            "notice: {} records with zero distance excluded",
            fit.excluded
        )?;
    }
    #[derive(Serialize)]
    struct Out {
        #[serde(flatten)]
        fit: HolderFit,
        check: Option<SlopeCheck>,
    }
    let check = gamma.map(|g| slope_check(&fit, g));
    serde_json::to_writer_pretty(&mut *out, &Out { fit, check })?;
    writeln!(out)?;
    Ok(())
}

fn cmd_profile(alpha: &str, depth: usize, out: &mut dyn Write) -> CmdResult {
    let p = continued_fraction_exact(&parse_alpha(alpha)?, depth)?;
    serde_json::to_writer_pretty(&mut *out, &p)?;
    writeln!(out)?;
    Ok(())
}
