//! Command-line front end for the verification harness.
//!
//! `hk <check> [flags]` runs one family of checks (or `all`), writes
//! `manifest.json` and one table per report into `--out`, and exits with
//! 0 (all passed), 1 (a failure), 2 (inconclusive), 64 (usage) or 74 (I/O).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use hk_core::verify::{CheckSpec, EstimateReport, ScanConfig, Status};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_IO: i32 = 74;

pub const CSV_HEADER: [&str; 4] = ["label", "ratio", "tolerance", "passed"];

#[derive(Debug, Parser)]
#[command(
    name = "hk",
    version,
    about = "Numerical checks of smoothing estimates for the Hermite operator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Spatial dimension (kato, kernel, sobolev).
    #[arg(long, global = true)]
    pub n: Option<usize>,

    /// Weight exponent δ in |x|^{-2δ} (kato).
    #[arg(long, global = true)]
    pub delta: Option<f64>,

    /// Sobolev order (sobolev). Defaults to both 1/2 and 1.
    #[arg(long, global = true)]
    pub s: Option<f64>,

    /// Largest level. Per-check defaults: norms 40, identities 20, kato 20,
    /// kernel 40 (n=2) or 30 (n=3), morawetz 20, even3d 20, sobolev 30, collapse 3.
    #[arg(long, global = true)]
    pub kmax: Option<usize>,

    /// Random states per check.
    #[arg(long, global = true, default_value_t = 16)]
    pub trials: usize,

    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,

    /// Multiplies every quadrature size; the doubling gate compares against twice this.
    #[arg(long, global = true, default_value_t = 1.0)]
    pub rule_scale: f64,

    /// Overrides the per-check tolerance (norms 1e-8, odd identity 1e-7,
    /// radial identity 1e-6, sobolev gate 1e-8).
    #[arg(long, global = true)]
    pub tol: Option<f64>,

    /// Cap on the ratios of the inequality checks.
    #[arg(long, global = true)]
    pub bound: Option<f64>,

    /// Output directory.
    #[arg(long, global = true, default_value = "hk-out")]
    pub out: PathBuf,

    /// Per-report table format; manifest.json is always written.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Also run the n=2, δ=1 divergence demonstration.
    #[arg(long, global = true)]
    pub negative_controls: bool,

    /// Worker threads (default: available parallelism).
    #[arg(long, global = true, env = "HK_JOBS")]
    pub jobs: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Antiderivative norms by closed form, recursion and quadrature.
    Norms,
    /// Special-function identities and the odd and 3D radial Kato identities.
    Identities,
    /// Per-level Kato constants and singular kernel norms.
    Kato,
    /// Diagonal projection kernel bound.
    Kernel,
    /// Pointwise time-averaged density in the plane.
    Morawetz,
    /// Weighted estimate for data even in every coordinate (n=3).
    Even3d,
    /// Bessel-potential against Hermite–Sobolev norms.
    Sobolev,
    /// Collapsed-variable trace estimate (n=9).
    Collapse,
    /// Every check above.
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
}

/// Everything that determines the numbers in a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub scan: ScanConfig,
    pub n: Option<usize>,
    pub delta: Option<f64>,
    pub s: Option<f64>,
    pub negative_controls: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: String,
    pub config: RunConfig,
    pub reports: Vec<EstimateReport>,
    /// Wall time of each report, in the same order.
    pub wall_seconds: Vec<f64>,
    /// Checks that stopped with an error instead of a report.
    #[serde(default)]
    pub errors: Vec<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

impl Cli {
    pub fn run_config(&self) -> RunConfig {
        RunConfig {
            command: self.command,
            scan: ScanConfig {
                k_max: self.kmax,
                trials: self.trials,
                seed: self.seed,
                rule_scale: self.rule_scale,
                tol: self.tol,
                bound: self.bound,
            },
            n: self.n,
            delta: self.delta,
            s: self.s,
            negative_controls: self.negative_controls,
        }
    }
}

/// The checks a configuration selects, validated up front.
pub fn plan(cfg: &RunConfig) -> Result<Vec<CheckSpec>, CliError> {
    cfg.scan.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let mut specs = Vec::new();
    let commands: Vec<Command> = match cfg.command {
        Command::All => vec![
            Command::Norms,
            Command::Identities,
            Command::Kato,
            Command::Kernel,
            Command::Morawetz,
            Command::Even3d,
            Command::Sobolev,
            Command::Collapse,
        ],
        c => vec![c],
    };
    for c in commands {
        match c {
            Command::Norms => specs.push(CheckSpec::AntiderivNorms),
            Command::Identities => specs.extend([
                CheckSpec::AppendixIdentities,
                CheckSpec::OddIdentity,
                CheckSpec::Radial3dIdentity,
            ]),
            Command::Kato => specs.extend(kato_plan(cfg)?),
            Command::Kernel => match cfg.n {
                Some(n @ 2..=3) => specs.push(CheckSpec::KernelBound { n }),
                Some(n) => return Err(CliError::Usage(format!("kernel supports --n 2 or 3, got {n}"))),
                None => specs.extend([CheckSpec::KernelBound { n: 2 }, CheckSpec::KernelBound { n: 3 }]),
            },
            Command::Morawetz => specs.push(CheckSpec::Morawetz2d),
            Command::Even3d => specs.push(CheckSpec::Even3d),
            Command::Sobolev => {
                let ns = match cfg.n {
                    Some(n @ 1..=2) => vec![n],
                    Some(n) => return Err(CliError::Usage(format!("sobolev supports --n 1 or 2, got {n}"))),
                    None => vec![1, 2],
                };
                let orders = match cfg.s {
                    Some(s) if s >= 0.0 && s.is_finite() => vec![s],
                    Some(s) => return Err(CliError::Usage(format!("--s must be nonnegative, got {s}"))),
                    None => vec![0.5, 1.0],
                };
                for &n in &ns {
                    for &s in &orders {
                        specs.push(CheckSpec::HermiteSobolev { n, s });
                    }
                }
            }
            Command::Collapse => specs.push(CheckSpec::Collapse9d),
            Command::All => unreachable!(),
        }
    }
    if cfg.negative_controls && matches!(cfg.command, Command::All) {
        specs.push(CheckSpec::KatoNegativeControl);
    }
    Ok(specs)
}

fn kato_plan(cfg: &RunConfig) -> Result<Vec<CheckSpec>, CliError> {
    match (cfg.n, cfg.delta) {
        (None, None) => Ok(vec![
            CheckSpec::Kato {
                n: 3,
                delta: 1.0,
                axes: vec![0, 1, 2],
            },
            CheckSpec::Kato {
                n: 2,
                delta: 0.5,
                axes: vec![0, 1],
            },
            CheckSpec::OperatorNorm { n: 3, delta: 0.5 },
            CheckSpec::OperatorNorm { n: 3, delta: 1.0 },
        ]),
        (n, delta) => {
            let n = n.unwrap_or(3);
            let delta = delta.unwrap_or(1.0);
            if n == 0 {
                return Err(CliError::Usage("--n must be at least 1".into()));
            }
            if let Err(e) = hk_core::spectral::check_admissible(n, delta, false) {
                if n == 2 && delta == 1.0 && cfg.negative_controls {
                    return Ok(vec![CheckSpec::KatoNegativeControl]);
                }
                return Err(CliError::Usage(e.to_string()));
            }
            Ok(vec![
                CheckSpec::Kato {
                    n,
                    delta,
                    axes: (0..n).collect(),
                },
                CheckSpec::OperatorNorm { n, delta },
            ])
        }
    }
}

/// Runs the planned checks on a pool of `jobs` threads, preserving order.
pub fn execute(cfg: &RunConfig, specs: &[CheckSpec], jobs: Option<usize>) -> Result<RunManifest, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        if j == 0 {
            return Err(CliError::Usage("--jobs must be at least 1".into()));
        }
        builder = builder.num_threads(j);
    }
    let pool = builder.build().map_err(|e| CliError::Usage(e.to_string()))?;
    let results: Vec<(hk_core::Result<EstimateReport>, f64)> = pool.install(|| {
        specs
            .par_iter()
            .map(|spec| {
                let start = Instant::now();
                let report = spec.run(&cfg.scan);
                (report, start.elapsed().as_secs_f64())
            })
            .collect()
    });

    let mut manifest = RunManifest {
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: cfg.clone(),
        reports: Vec::new(),
        wall_seconds: Vec::new(),
        errors: Vec::new(),
    };
    for ((result, secs), spec) in results.into_iter().zip(specs) {
        match result {
            Ok(r) => {
                manifest.reports.push(r);
                manifest.wall_seconds.push(secs);
            }
            Err(e) if e.is_usage() => return Err(CliError::Usage(e.to_string())),
            Err(e) => manifest.errors.push(format!("{}: {e}", spec_name(spec))),
        }
    }
    Ok(manifest)
}

fn spec_name(spec: &CheckSpec) -> String {
    serde_json::to_value(spec)
        .ok()
        .and_then(|v| v.get("check").and_then(|c| c.as_str()).map(str::to_string))
        .unwrap_or_else(|| "check".into())
}

/// 0 if everything passed, 1 on any failure or error, else 2 if anything
/// was inconclusive.
pub fn exit_code(manifest: &RunManifest) -> i32 {
    if !manifest.errors.is_empty() || manifest.reports.iter().any(|r| r.status == Status::Failed) {
        EXIT_FAILED
    } else if manifest.reports.iter().any(|r| r.status == Status::Inconclusive) {
        EXIT_INCONCLUSIVE
    } else {
        EXIT_OK
    }
}

/// Seventeen significant digits.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// One report as CSV with header `label,ratio,tolerance,passed`.
pub fn report_csv(report: &EstimateReport) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("writing to memory");
    for s in &report.samples {
        w.write_record([
            s.label.as_str(),
            &format_float(s.ratio),
            &format_float(s.tolerance),
            if s.passed { "true" } else { "false" },
        ])
        .expect("writing to memory");
    }
    w.into_inner().expect("flushing to memory")
}

pub fn manifest_json(manifest: &RunManifest) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(manifest).expect("manifest serialization");
    bytes.push(b'\n');
    bytes
}

pub fn parse_manifest(bytes: &[u8]) -> serde_json::Result<RunManifest> {
    serde_json::from_slice(bytes)
}

/// File stem for the `i`-th report.
pub fn report_stem(i: usize, report: &EstimateReport) -> String {
    let slug: String = report
        .name
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() {
                c.to_ascii_lowercase()
            } else {
                '_'
            }
        })
        .collect();
    format!("{i:02}_{slug}")
}

/// Writes the manifest and one table per report into `dir`.
pub fn write_outputs(dir: &Path, manifest: &RunManifest, format: Format) -> Result<Vec<PathBuf>, CliError> {
    let io = |e: std::io::Error, p: &Path| CliError::Io(format!("{}: {e}", p.display()));
    fs::create_dir_all(dir).map_err(|e| io(e, dir))?;
    let mut written = Vec::new();
    let path = dir.join("manifest.json");
    fs::write(&path, manifest_json(manifest)).map_err(|e| io(e, &path))?;
    written.push(path);
    for (i, report) in manifest.reports.iter().enumerate() {
        let (ext, bytes) = match format {
            Format::Csv => ("csv", report_csv(report)),
            Format::Json => ("json", serde_json::to_vec_pretty(report).expect("report serialization")),
        };
        let path = dir.join(format!("{}.{ext}", report_stem(i, report)));
        fs::write(&path, bytes).map_err(|e| io(e, &path))?;
        written.push(path);
    }
    Ok(written)
}

/// One line per report for the terminal.
pub fn summary(manifest: &RunManifest, out: &mut impl Write) -> std::io::Result<()> {
    for (r, secs) in manifest.reports.iter().zip(&manifest.wall_seconds) {
        let status = match r.status {
            Status::Passed => "PASS",
            Status::Failed => "FAIL",
            Status::Inconclusive => "INCONCLUSIVE",
        };
        writeln!(
            out,
            "{status:<12} {:<40} sup={:<12.6e} {:>8.2}s",
            r.name, r.sup_ratio, secs
        )?;
        if let Some(d) = &r.diagnostic {
            writeln!(out, "             {d}")?;
        }
        for c in r.conditions.iter().filter(|c| !c.passed) {
            writeln!(out, "             {} = {:e} (limit {:e})", c.name, c.value, c.limit)?;
        }
    }
    for e in &manifest.errors {
        writeln!(out, "ERROR        {e}")?;
    }
    Ok(())
}

/// Parses, runs and writes; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let cfg = cli.run_config();
    let result = plan(&cfg)
        .and_then(|specs| execute(&cfg, &specs, cli.jobs))
        .and_then(|m| write_outputs(&cli.out, &m, cli.format).map(|_| m));
    match result {
        Ok(manifest) => {
            let _ = summary(&manifest, &mut std::io::stdout());
            exit_code(&manifest)
        }
        Err(e) => {
            eprintln!("hk: {e}");
            e.exit_code()
        }
    }
}
