//! Command-line driver.
//!
//! Every option can come from a flag, from a JSON file given with
//! `--config`, or from the built-in default, in that order of precedence.
//! The default worker count is read from `CHOROWIDTH_WORKERS`.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::closedforms::{body_key, reference_table, Status};
use crate::error::{Error, Result};
use crate::estimators::{estimate_mc, estimate_quadrature3, vertex_distribution, Method, MomentReport};
use crate::oracles::{distribution_identity_test, width_density_test, xcheck, OracleBody};
use crate::polytopes::{make_polytope, PolytopeKind};

pub const WORKERS_ENV: &str = "CHOROWIDTH_WORKERS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Joint moments of cw and pw for one body.
    Moments,
    /// The table of exact and published constants.
    Reference,
    /// Shadow vertex-count frequencies.
    VertexDist,
    /// Piecewise oracle against the hull pipeline.
    Xcheck,
    /// Width density of the square or triangle against sampled widths.
    Density,
    /// KS test of cw(octahedron) against 2·cw(tetrahedron).
    IdentityTest,
    /// Monte Carlo z-scores against the reference table.
    Validate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodArg {
    Mc,
    Quadrature,
}

#[derive(Debug, Parser)]
#[command(name = "chorowidth", version, about = "Random planar shadows of regular polytopes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[arg(long, global = true)]
    pub polytope: Option<String>,
    #[arg(long, global = true)]
    pub dim: Option<usize>,
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub method: Option<MethodArg>,
    /// Node budget for both quadrature axes.
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    #[arg(long, global = true)]
    pub grid_theta: Option<usize>,
    #[arg(long, global = true)]
    pub grid_phi: Option<usize>,
    /// Histogram bins for `density`.
    #[arg(long, global = true)]
    pub bins: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

/// Optional settings as read from a `--config` file.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub polytope: Option<String>,
    pub dim: Option<usize>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub method: Option<MethodArg>,
    pub grid: Option<usize>,
    pub grid_theta: Option<usize>,
    pub grid_phi: Option<usize>,
    pub bins: Option<usize>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    /// `None` means every body of the dimension (for `validate`).
    pub polytope: Option<PolytopeKind>,
    pub dim: usize,
    pub n_samples: usize,
    pub seed: u64,
    pub workers: usize,
    pub method: Method,
    pub grid_theta: usize,
    pub grid_phi: usize,
    pub bins: usize,
    pub format: Format,
    pub out: Option<PathBuf>,
}

pub const DEFAULT_SAMPLES: usize = 100_000;
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_GRID: usize = 256;
pub const DEFAULT_BINS: usize = 20;
pub const VALIDATE_Z_LIMIT: f64 = 5.0;

fn default_workers() -> Result<usize> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("{WORKERS_ENV}={v:?} is not a worker count"))),
        Err(_) => Ok(0),
    }
}

impl RunConfig {
    pub fn resolve(cli: &Cli) -> Result<Self> {
        let file = match &cli.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };
        let polytope_name = cli.polytope.clone().or(file.polytope);
        let polytope = polytope_name.map(|s| s.parse::<PolytopeKind>()).transpose()?;
        let dim = cli.dim.or(file.dim).unwrap_or(match polytope {
            Some(PolytopeKind::Square | PolytopeKind::Triangle) => 2,
            _ => 3,
        });
        let grid = cli.grid.or(file.grid).unwrap_or(DEFAULT_GRID);
        let method = match cli.method.or(file.method).unwrap_or(MethodArg::Mc) {
            MethodArg::Mc => Method::MonteCarlo,
            MethodArg::Quadrature => Method::Quadrature,
        };
        let workers = match cli.workers.or(file.workers) {
            Some(w) => w,
            None => default_workers()?,
        };
        let cfg = RunConfig {
            command: cli.command,
            polytope,
            dim,
            n_samples: cli.samples.or(file.samples).unwrap_or(DEFAULT_SAMPLES),
            seed: cli.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            workers,
            method,
            grid_theta: cli.grid_theta.or(file.grid_theta).unwrap_or(grid),
            grid_phi: cli.grid_phi.or(file.grid_phi).unwrap_or(grid),
            bins: cli.bins.or(file.bins).unwrap_or(DEFAULT_BINS),
            format: cli.format.or(file.format).unwrap_or(Format::Json),
            out: cli.out.clone().or(file.out),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        if self.method == Method::Quadrature {
            if self.command != Command::Moments {
                return Err(Error::Config("--method quadrature only applies to `moments`".into()));
            }
            if self.dim != 3 {
                return Err(Error::UnsupportedMethod(format!(
                    "quadrature is only available in dimension 3, got {}",
                    self.dim
                )));
            }
        }
        match self.command {
            Command::Moments | Command::VertexDist => {
                make_polytope(self.body()?, self.dim)?;
            }
            Command::Validate => {
                if !matches!(self.dim, 3 | 4) {
                    return Err(Error::Config(format!("validate supports dimensions 3 and 4, got {}", self.dim)));
                }
                if let Some(p) = self.polytope {
                    make_polytope(p, self.dim)?;
                }
            }
            Command::Xcheck => {
                self.oracle_body()?;
            }
            Command::Density => {
                if !matches!(self.polytope, Some(PolytopeKind::Square | PolytopeKind::Triangle)) {
                    return Err(Error::Config("density needs --polytope square or triangle".into()));
                }
            }
            Command::Reference | Command::IdentityTest => {}
        }
        Ok(())
    }

    fn body(&self) -> Result<PolytopeKind> {
        self.polytope
            .ok_or_else(|| Error::Config(format!("{:?} needs --polytope", self.command)))
    }

    fn oracle_body(&self) -> Result<OracleBody> {
        self.body()?.as_str().parse()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationRow {
    pub key: String,
    pub status: Status,
    pub reference: f64,
    pub estimate: f64,
    pub se: f64,
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub dim: usize,
    pub n_samples: usize,
    pub seed: u64,
    pub z_limit: f64,
    pub rows: Vec<ValidationRow>,
    pub max_abs_z_exact: f64,
    pub passed: bool,
}

fn z_score(estimate: f64, reference: f64, se: f64) -> f64 {
    let d = estimate - reference;
    if se > 0.0 {
        d / se
    } else if d == 0.0 {
        0.0
    } else {
        d.signum() * f64::INFINITY
    }
}

/// Monte Carlo estimates of every tabulated quantity for the given bodies,
/// with z-scores against the table.
pub fn validate(kinds: &[PolytopeKind], dim: usize, n_samples: usize, seed: u64, workers: usize) -> Result<ValidationReport> {
    let table = reference_table();
    let mut rows = Vec::new();
    for &kind in kinds {
        let r = estimate_mc(&make_polytope(kind, dim)?, n_samples, seed, workers)?;
        let prefix = body_key(kind, dim);
        let mut quantities: Vec<(String, f64, f64)> = ["E_cw", "E_cw2", "E_pw", "E_pw2", "E_cwpw"]
            .iter()
            .zip(r.means().iter().zip(r.standard_errors()))
            .map(|(m, (&v, se))| (m.to_string(), v, se))
            .collect();
        quantities.push(("corr".into(), r.correlation, r.se_correlation));
        quantities.push(("EV".into(), r.mean_vertices, r.se_vertices));
        for k in 3..=8 {
            let key = format!("p{k}");
            if table.get(&format!("{prefix}.{key}")).is_some() {
                let p = r.vertex_hist.get(&k).copied().unwrap_or(0.0);
                quantities.push((key, p, r.vertex_se(k)));
            }
        }
        for (m, estimate, se) in quantities {
            let key = format!("{prefix}.{m}");
            let Some(e) = table.get(&key) else { continue };
            rows.push(ValidationRow {
                key,
                status: e.status,
                reference: e.value,
                estimate,
                se,
                z: z_score(estimate, e.value, se),
            });
        }
    }
    let max_abs_z_exact = rows
        .iter()
        .filter(|r| r.status == Status::Exact)
        .map(|r| r.z.abs())
        .fold(0.0, f64::max);
    Ok(ValidationReport {
        dim,
        n_samples,
        seed,
        z_limit: VALIDATE_Z_LIMIT,
        rows,
        max_abs_z_exact,
        passed: max_abs_z_exact <= VALIDATE_Z_LIMIT,
    })
}

impl ValidationReport {
    fn to_table(&self) -> String {
        let mut out = format!(
            "validate dim {} with {} samples, seed {}: {}\n",
            self.dim,
            self.n_samples,
            self.seed,
            if self.passed { "PASS" } else { "FAIL" }
        );
        out.push_str(&format!(
            "{:<16} {:<16} {:>20} {:>20} {:>11} {:>8}\n",
            "key", "status", "reference", "estimate", "se", "z"
        ));
        for r in &self.rows {
            out.push_str(&format!(
                "{:<16} {:<16} {:>20.15} {:>20.15} {:>11.3e} {:>8.2}\n",
                r.key,
                format!("{:?}", r.status),
                r.reference,
                r.estimate,
                r.se,
                r.z
            ));
        }
        out
    }

    fn to_csv(&self) -> String {
        let mut out = String::from("key,status,reference,estimate,se,z\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{:?},{:?},{:?},{:?},{:?}\n",
                r.key, r.status, r.reference, r.estimate, r.se, r.z
            ));
        }
        out
    }
}

fn json<T: Serialize>(v: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

/// Key-value lines for reports without a dedicated layout.
fn flat_table<T: Serialize>(v: &T) -> Result<String> {
    let value = serde_json::to_value(v)?;
    let mut out = String::new();
    if let serde_json::Value::Object(map) = value {
        for (k, v) in map {
            out.push_str(&format!("{k:<28} {v}\n"));
        }
    }
    Ok(out)
}

fn flat_csv<T: Serialize>(v: &T) -> Result<String> {
    let value = serde_json::to_value(v)?;
    let mut keys = Vec::new();
    let mut vals = Vec::new();
    if let serde_json::Value::Object(map) = value {
        for (k, v) in map {
            keys.push(k);
            vals.push(match v {
                serde_json::Value::String(s) => s,
                serde_json::Value::Object(o) => o
                    .iter()
                    .map(|(k, v)| format!("{k}:{v}"))
                    .collect::<Vec<_>>()
                    .join(";"),
                other => other.to_string(),
            });
        }
    }
    Ok(format!("{}\n{}\n", keys.join(","), vals.join(",")))
}

fn render<T: Serialize>(v: &T, format: Format) -> Result<String> {
    match format {
        Format::Json => json(v),
        Format::Csv => flat_csv(v),
        Format::Table => flat_table(v),
    }
}

fn moments_report(cfg: &RunConfig) -> Result<MomentReport> {
    let p = make_polytope(cfg.body()?, cfg.dim)?;
    match cfg.method {
        Method::MonteCarlo => estimate_mc(&p, cfg.n_samples, cfg.seed, cfg.workers),
        Method::Quadrature => crate::rng::pool(cfg.workers)
            .install(|| estimate_quadrature3(&p, cfg.grid_theta, cfg.grid_phi)),
    }
}

fn reference_csv() -> String {
    let mut out = String::from("key,formula,value,status\n");
    for e in &reference_table().entries {
        out.push_str(&format!("{},\"{}\",{:?},{:?}\n", e.key, e.formula, e.value, e.status));
    }
    out
}

/// Runs one command; returns the rendered report and whether it succeeded.
pub fn execute(cfg: &RunConfig) -> Result<(String, bool)> {
    let text = match cfg.command {
        Command::Moments => {
            let r = moments_report(cfg)?;
            match cfg.format {
                Format::Json => json(&r)?,
                Format::Csv => format!("{}\n{}\n", MomentReport::csv_header(), r.to_csv_row()),
                Format::Table => r.to_table(),
            }
        }
        Command::Reference => match cfg.format {
            Format::Json => json(&reference_table().entries)?,
            Format::Csv => reference_csv(),
            Format::Table => reference_table().to_text(),
        },
        Command::VertexDist => {
            let p = make_polytope(cfg.body()?, cfg.dim)?;
            let r = crate::rng::pool(cfg.workers).install(|| vertex_distribution(&p, cfg.n_samples, cfg.seed))?;
            match cfg.format {
                Format::Json => json(&r)?,
                Format::Csv => {
                    let mut out = String::from("vertices,p,se\n");
                    for (k, v) in &r.probabilities {
                        out.push_str(&format!("{k},{:?},{:?}\n", v.p, v.se));
                    }
                    out
                }
                Format::Table => {
                    let mut out = format!(
                        "{} (dim {}), {} samples, E(vertices) = {:.6} ± {:.2e}\n",
                        r.polytope, r.dim, r.n_samples, r.expected, r.se_expected
                    );
                    for (k, v) in &r.probabilities {
                        out.push_str(&format!("P({k}) = {:.6} ± {:.2e}\n", v.p, v.se));
                    }
                    out
                }
            }
        }
        Command::Xcheck => {
            let body = cfg.oracle_body()?;
            let r = crate::rng::pool(cfg.workers).install(|| xcheck(body, cfg.n_samples, cfg.seed))?;
            render(&r, cfg.format)?
        }
        Command::Density => {
            let r = width_density_test(cfg.body()?, cfg.n_samples, cfg.bins, cfg.seed)?;
            render(&r, cfg.format)?
        }
        Command::IdentityTest => {
            let r = crate::rng::pool(cfg.workers).install(|| distribution_identity_test(cfg.n_samples, cfg.seed))?;
            render(&r, cfg.format)?
        }
        Command::Validate => {
            let kinds = match cfg.polytope {
                Some(k) => vec![k],
                None => vec![PolytopeKind::Simplex, PolytopeKind::Cube, PolytopeKind::Crosspolytope],
            };
            let r = validate(&kinds, cfg.dim, cfg.n_samples, cfg.seed, cfg.workers)?;
            let text = match cfg.format {
                Format::Json => json(&r)?,
                Format::Csv => r.to_csv(),
                Format::Table => r.to_table(),
            };
            return Ok((text, r.passed));
        }
    };
    Ok((text, true))
}

fn write_output(cfg: &RunConfig, text: &str) -> Result<()> {
    match &cfg.out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Exit status of a run: 0 on success, 1 on a failed validation, 2 on error.
pub fn run(cfg: &RunConfig) -> i32 {
    match execute(cfg).and_then(|(text, ok)| write_output(cfg, &text).map(|_| ok)) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

/// Entry point for the binary.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match RunConfig::resolve(&cli) {
        Ok(cfg) => run(&cfg),
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

/// Summary counts of a validation report by status, for quick inspection.
pub fn status_counts(r: &ValidationReport) -> BTreeMap<String, usize> {
    let mut out = BTreeMap::new();
    for row in &r.rows {
        *out.entry(format!("{:?}", row.status)).or_insert(0) += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("chorowidth").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn defaults() {
        let cfg = RunConfig::resolve(&parse(&["reference"])).unwrap();
        assert_eq!(cfg.n_samples, DEFAULT_SAMPLES);
        assert_eq!(cfg.seed, 42);
        assert_eq!(cfg.format, Format::Json);
        assert_eq!(cfg.grid_theta, DEFAULT_GRID);
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(&path, r#"{"polytope": "cube", "samples": 500, "seed": 9, "grid": 64}"#).unwrap();
        let cfg = RunConfig::resolve(&parse(&[
            "moments",
            "--config",
            path.to_str().unwrap(),
            "--seed",
            "3",
            "--grid-phi",
            "32",
        ]))
        .unwrap();
        assert_eq!(cfg.polytope, Some(PolytopeKind::Cube));
        assert_eq!(cfg.n_samples, 500);
        assert_eq!(cfg.seed, 3);
        assert_eq!((cfg.grid_theta, cfg.grid_phi), (64, 32));
    }

    #[test]
    fn unknown_file_key_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(&path, r#"{"sampels": 5}"#).unwrap();
        assert!(RunConfig::resolve(&parse(&["reference", "--config", path.to_str().unwrap()])).is_err());
    }

    #[test]
    fn quadrature_needs_dim_3() {
        let err = RunConfig::resolve(&parse(&["moments", "--polytope", "cube", "--dim", "4", "--method", "quadrature"]));
        assert!(matches!(err, Err(Error::UnsupportedMethod(_))));
    }

    #[test]
    fn bad_polytope() {
        assert!(RunConfig::resolve(&parse(&["moments", "--polytope", "dodecahedron"])).is_err());
        assert!(RunConfig::resolve(&parse(&["moments", "--polytope", "square", "--dim", "3"])).is_err());
        assert!(RunConfig::resolve(&parse(&["density", "--polytope", "cube"])).is_err());
    }

    #[test]
    fn reference_contains_simplex4_pw() {
        let cfg = RunConfig::resolve(&parse(&["reference", "--format", "table"])).unwrap();
        let (text, ok) = execute(&cfg).unwrap();
        assert!(ok);
        assert!(text.contains("2.748401146360593"));
    }

    #[test]
    fn z_scores() {
        assert_eq!(z_score(1.0, 1.0, 0.0), 0.0);
        assert_eq!(z_score(1.1, 1.0, 0.0), f64::INFINITY);
        assert!((z_score(1.2, 1.0, 0.1) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn small_validation_passes() {
        let r = validate(&[PolytopeKind::Cube], 3, 20_000, 1, 2).unwrap();
        assert!(r.passed, "{}", r.to_table());
        assert_eq!(status_counts(&r)["Exact"], 8);
    }
}
