//! Command-line front end. `run` returns the exit code so tests can drive it
//! in-process.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use flatlab_core::audit::{h_minimal_analysis, direction_bound, DirectionReport, HMinimalReport, LatticeEvidence};
use flatlab_core::builders::{self, BuilderError};
use flatlab_core::cylinder::{decompose, CylinderDecomposition, CylinderError, DecompositionStatus};
use flatlab_core::exact::{ArithError, ExactReal};
use flatlab_core::geom::V2;
use flatlab_core::saddle::{in_thick_part, systole, SaddleError, SearchLimits};
use flatlab_core::sl2::{self, DecompositionKind, Factorization, Mat2, Sl2Error};
use flatlab_core::surface::{SurfaceError, TranslationSurface};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::experiment::{track_experiment, ConfigError, ExperimentConfig, SurveyRow};
use crate::format::{parse_surface_file, print_surface, FormatError};
use crate::parallel;
use crate::report::{self, cylinders_csv, fmt_f64, summary_csv, Format, ReportError, SurfaceDoc, SurfaceSummary};

pub const EXIT_OK: i32 = 0;
pub const EXIT_OTHER: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "flatlab", version, about = "Exact experiments on translation surfaces")]
pub struct Cli {
    /// Output format (json unless a subcommand says otherwise).
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Cap on pending wedges per saddle-connection search.
    #[arg(long, global = true)]
    pub max_frontier: Option<usize>,
    /// TOML file with defaults for the flags above and for experiment grids.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print a builder surface as a surface file (or JSON with --format json).
    Build { expr: String },
    /// Genus, stratum, area, cone angles and systole.
    Show {
        surface: Option<String>,
        /// Also test membership in the thick part for this epsilon.
        #[arg(long)]
        epsilon: Option<String>,
    },
    /// Saddle connections up to a length bound.
    Saddles {
        surface: Option<String>,
        #[arg(long)]
        bound: Option<String>,
    },
    /// Cylinder decomposition in a direction `p,q`.
    Cylinders {
        surface: Option<String>,
        #[arg(long)]
        direction: String,
        #[arg(long)]
        bound: Option<String>,
    },
    /// Periodicity and moduli commensurability over saddle-connection directions.
    LatticeScan {
        surface: Option<String>,
        #[arg(long)]
        bound: Option<String>,
    },
    /// Horocycle-minimal torus dimension and period in a direction.
    Hmin {
        surface: Option<String>,
        #[arg(long)]
        direction: String,
        #[arg(long)]
        bound: Option<String>,
    },
    /// Torus dimension and period for every periodic saddle-connection direction.
    OrbitSurvey {
        surface: Option<String>,
        #[arg(long)]
        bound: Option<String>,
    },
    /// Distance between rotated and horocycle-pushed geodesic images.
    Track {
        surface: Option<String>,
        #[arg(long = "t", value_delimiter = ',', allow_hyphen_values = true)]
        ts: Vec<f64>,
        #[arg(long = "psi", value_delimiter = ',', allow_hyphen_values = true)]
        psis: Vec<f64>,
    },
    /// Matrix utilities.
    Sl2 {
        #[command(subcommand)]
        command: Sl2Command,
    },
    /// List builder expressions.
    Builders,
}

#[derive(Debug, Subcommand)]
pub enum Sl2Command {
    /// Factor a determinant-one matrix given as `a,b,c,d` (row major).
    Decompose {
        #[arg(long, value_enum, default_value = "all")]
        kind: KindArg,
        #[arg(long, allow_hyphen_values = true)]
        matrix: String,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Iwasawa,
    Cartan,
    Bruhat,
    All,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Resource(String),
    #[error("{0}")]
    Other(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Resource(_) => EXIT_RESOURCE,
            CliError::Other(_) => EXIT_OTHER,
        }
    }
}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        match e {
            FormatError::Io { .. } => CliError::Other(e.to_string()),
            e => CliError::Input(e.to_string()),
        }
    }
}

impl From<SurfaceError> for CliError {
    fn from(e: SurfaceError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<ArithError> for CliError {
    fn from(e: ArithError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<BuilderError> for CliError {
    fn from(e: BuilderError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<Sl2Error> for CliError {
    fn from(e: Sl2Error) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<SaddleError> for CliError {
    fn from(e: SaddleError) -> Self {
        match e {
            SaddleError::BoundTooLargeForMemory { .. } => CliError::Resource(e.to_string()),
            e => CliError::Input(e.to_string()),
        }
    }
}

impl From<CylinderError> for CliError {
    fn from(e: CylinderError) -> Self {
        match e {
            CylinderError::Saddle(s) => s.into(),
            CylinderError::Inconsistent(_) => CliError::Other(e.to_string()),
            e => CliError::Input(e.to_string()),
        }
    }
}

impl From<ReportError> for CliError {
    fn from(e: ReportError) -> Self {
        match e {
            ReportError::NoCsv(_) => CliError::Input(e.to_string()),
            e => CliError::Other(e.to_string()),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        match e {
            ConfigError::Io { .. } => CliError::Other(e.to_string()),
            e => CliError::Input(e.to_string()),
        }
    }
}

/// Builder expression or path to a surface file.
pub fn load_surface(source: &str) -> Result<TranslationSurface, CliError> {
    let path = Path::new(source);
    if path.is_file() {
        return Ok(parse_surface_file(path)?);
    }
    builders::from_expr(source).map_err(|e| match e {
        BuilderError::UnknownBuilder(_) => {
            CliError::Input(format!("`{source}` is neither a surface file nor a builder ({})", builders::BUILDER_NAMES.join(", ")))
        }
        e => e.into(),
    })
}

pub fn parse_scalar(s: &str) -> Result<ExactReal, CliError> {
    s.parse().map_err(|e: ArithError| CliError::Input(e.to_string()))
}

pub fn parse_direction(s: &str) -> Result<V2, CliError> {
    let (p, q) = s
        .split_once(',')
        .ok_or_else(|| CliError::Input(format!("direction `{s}` must look like `p,q`")))?;
    let v = V2::new(parse_scalar(p.trim())?, parse_scalar(q.trim())?);
    if v.is_zero() {
        return Err(CliError::Input("direction must be nonzero".into()));
    }
    Ok(v)
}

/// Exact when every entry parses as an exact scalar, floating point otherwise.
pub fn parse_matrix(s: &str) -> Result<Mat2, CliError> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [a, b, c, d] = parts[..] else {
        return Err(CliError::Input(format!("matrix `{s}` must have four comma-separated entries")));
    };
    let exact: Result<Vec<ExactReal>, _> = [a, b, c, d].iter().map(|x| x.parse::<ExactReal>()).collect();
    if let Ok(e) = exact {
        let [a, b, c, d]: [ExactReal; 4] = e.try_into().expect("four entries");
        return Ok(Mat2::exact(a, b, c, d));
    }
    let f: Result<Vec<f64>, _> = [a, b, c, d].iter().map(|x| x.parse::<f64>()).collect();
    let f = f.map_err(|_| CliError::Input(format!("matrix `{s}` has an entry that is not a number")))?;
    Ok(Mat2::float(f[0], f[1], f[2], f[3]))
}

/// `lattice-scan` output.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeScan {
    pub evidence: LatticeEvidence,
    pub reports: Vec<DirectionReport>,
}

/// `hmin` output; `analysis` is absent when the direction stayed undecided.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HMinRecord {
    pub direction: V2,
    pub status: DecompositionStatus,
    pub moduli: Vec<ExactReal>,
    pub analysis: Option<HMinimalReport>,
}

/// `sl2 decompose` output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorRecord {
    pub factorization: Factorization,
    #[serde(with = "report::float17")]
    pub residual: f64,
}

struct Settings {
    format: Option<Format>,
    workers: Option<usize>,
    limits: SearchLimits,
    file: ExperimentConfig,
}

impl Settings {
    fn surface(&self, given: &Option<String>) -> Result<TranslationSurface, CliError> {
        let src = given
            .clone()
            .or_else(|| self.file.surface.clone())
            .ok_or_else(|| CliError::Input("no surface given (argument or config `surface`)".into()))?;
        load_surface(&src)
    }

    fn bound(&self, given: &Option<String>) -> Result<ExactReal, CliError> {
        let b = given
            .clone()
            .or_else(|| self.file.bound.clone())
            .ok_or_else(|| CliError::Input("no length bound given (--bound or config `bound`)".into()))?;
        let b = parse_scalar(&b)?;
        if !b.is_positive() {
            return Err(CliError::Input("length bound must be positive".into()));
        }
        Ok(b)
    }

    /// Explicit bound, else 20 times the larger of the direction length and
    /// the polygon diameter.
    fn direction_bound(&self, given: &Option<String>, m: &TranslationSurface, dir: &V2) -> Result<ExactReal, CliError> {
        if given.is_some() || self.file.bound.is_some() {
            return self.bound(given);
        }
        let len = ExactReal::from_int(dir.norm_sq().to_f64().sqrt().ceil() as i64);
        Ok(direction_bound(m, &len))
    }

    fn emit(&self, json: impl FnOnce() -> Result<String, ReportError>, csv: impl FnOnce() -> Result<String, ReportError>) -> Result<String, CliError> {
        Ok(match self.format.unwrap_or(Format::Json) {
            Format::Json => json()?,
            Format::Csv => csv()?,
        })
    }
}

/// Output text and the file it should go to.
fn execute(cli: Cli) -> Result<(String, Option<PathBuf>), CliError> {
    let file = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    let flags = ExperimentConfig {
        format: cli.format,
        out: cli.out.clone(),
        workers: cli.workers,
        max_frontier: cli.max_frontier,
        ..Default::default()
    };
    flags.validate()?;
    let merged = file.clone().overridden_by(flags);
    let s = Settings {
        format: merged.format,
        workers: merged.workers,
        limits: merged.max_frontier.map(|n| SearchLimits { max_frontier: n }).unwrap_or_default(),
        file,
    };
    let pool = parallel::pool(s.workers).map_err(|e| CliError::Other(e.to_string()))?;
    let text = pool.install(|| run_command(&s, cli.command, &merged))?;
    Ok((text, merged.out))
}

fn run_command(s: &Settings, command: Command, cfg: &ExperimentConfig) -> Result<String, CliError> {
    match command {
        Command::Build { expr } => {
            let m = builders::from_expr(&expr)?;
            match s.format {
                None => Ok(print_surface(&m)?),
                Some(Format::Json) => Ok(report::to_json("surface", &SurfaceDoc::from_surface(&m)?)?),
                Some(Format::Csv) => Err(ReportError::NoCsv("a surface").into()),
            }
        }
        Command::Show { surface, epsilon } => {
            let m = s.surface(&surface)?;
            let exact = !m.is_float_mode();
            let systole_sq = if exact { Some(systole(&m, s.limits)?.length_sq) } else { None };
            let eps = match epsilon {
                Some(e) => Some(parse_scalar(&e)?),
                None => cfg.epsilon.map(|e| parse_scalar(&e.to_string())).transpose()?,
            };
            let in_thick = match (&eps, exact) {
                (Some(e), true) => Some(in_thick_part(&m, e, s.limits)?.member),
                _ => None,
            };
            let summary = SurfaceSummary {
                field: m.field().to_string(),
                polygons: m.polygon_count(),
                genus: m.genus(),
                stratum: m.stratum_signature().to_string(),
                area: match m.area() {
                    sl2::ExactOrFloat::Exact(a) => a.to_string(),
                    sl2::ExactOrFloat::Float(a) => fmt_f64(a),
                },
                cone_angles: m.cone_points().iter().map(|c| c.angle_multiple).collect(),
                systole_sq,
                in_thick_part: in_thick,
            };
            s.emit(|| report::to_json("surface_summary", &summary), || summary_csv(&summary))
        }
        Command::Saddles { surface, bound } => {
            let m = s.surface(&surface)?;
            let b = s.bound(&bound)?;
            let all = parallel::saddle_connections(&m, &b, s.limits)?;
            s.emit(|| report::to_json("saddles", &all), || report::to_csv(&all))
        }
        Command::Cylinders { surface, direction, bound } => {
            let m = s.surface(&surface)?;
            let dir = parse_direction(&direction)?;
            let b = s.direction_bound(&bound, &m, &dir)?;
            let dec = decompose(&m, &dir, &b, s.limits)?;
            s.emit(|| report::to_json("cylinders", &dec), || cylinders_csv(&dec))
        }
        Command::LatticeScan { surface, bound } => {
            let m = s.surface(&surface)?;
            let b = s.bound(&bound)?;
            let (evidence, reports) = parallel::lattice_evidence(&m, &b, s.limits)?;
            let scan = LatticeScan { evidence, reports };
            s.emit(|| report::to_json("lattice_scan", &scan), || report::to_csv(&scan.reports))
        }
        Command::Hmin { surface, direction, bound } => {
            let m = s.surface(&surface)?;
            let dir = parse_direction(&direction)?;
            let b = s.direction_bound(&bound, &m, &dir)?;
            let dec: CylinderDecomposition = decompose(&m, &dir, &b, s.limits)?;
            let analysis = if dec.is_decomposed() { Some(h_minimal_analysis(&dec)?) } else { None };
            let mut moduli = dec.moduli();
            moduli.sort();
            let rec = HMinRecord { direction: dir.clone(), status: dec.status.clone(), moduli, analysis };
            let rows: Vec<SurveyRow> = rec
                .analysis
                .iter()
                .map(|a| SurveyRow { direction_p: dir.x.clone(), direction_q: dir.y.clone(), d: a.torus_dim, period: a.period.clone() })
                .collect();
            s.emit(|| report::to_json("hmin", &rec), || report::to_csv(&rows))
        }
        Command::OrbitSurvey { surface, bound } => {
            let m = s.surface(&surface)?;
            let b = s.bound(&bound)?;
            let rows = parallel::orbit_survey(&m, &b, s.limits)?;
            s.emit(|| report::to_json("orbit_survey", &rows), || report::to_csv(&rows))
        }
        Command::Track { surface, ts, psis } => {
            let m = s.surface(&surface)?;
            let ts = if ts.is_empty() { cfg.ts.clone().unwrap_or_else(|| vec![0.5, 1.0, 2.0]) } else { ts };
            let psis = if psis.is_empty() {
                cfg.thetas.clone().unwrap_or_else(|| (1..=6).map(|k| 10f64.powi(-k)).collect())
            } else {
                psis
            };
            let recs = track_experiment(&m, &ts, &psis);
            s.emit(|| report::to_json("track", &recs), || report::to_csv(&recs))
        }
        Command::Sl2 { command: Sl2Command::Decompose { kind, matrix } } => {
            let a = parse_matrix(&matrix)?;
            a.check_unimodular()?;
            let kinds = match kind {
                KindArg::Iwasawa => vec![DecompositionKind::Iwasawa],
                KindArg::Cartan => vec![DecompositionKind::Cartan],
                KindArg::Bruhat => vec![DecompositionKind::Bruhat],
                KindArg::All => vec![DecompositionKind::Iwasawa, DecompositionKind::Cartan, DecompositionKind::Bruhat],
            };
            let mut recs = Vec::new();
            for k in kinds {
                let f = sl2::decompose(k, &a)?;
                recs.push(FactorRecord { residual: f.residual(&a), factorization: f });
            }
            s.emit(|| report::to_json("sl2_decompose", &recs), || factor_csv(&recs))
        }
        Command::Builders => Ok(builders::BUILDER_NAMES.iter().map(|n| format!("{n}\n")).collect()),
    }
}

fn factor_csv(recs: &[FactorRecord]) -> Result<String, ReportError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["kind", "factor", "a", "b", "c", "d", "t", "iota_branch", "residual"])?;
    for r in recs {
        let kind = serde_json::to_value(r.factorization.kind)?.as_str().unwrap_or_default().to_string();
        for (i, m) in r.factorization.factors.iter().enumerate() {
            let entries: Vec<String> = match m.as_exact() {
                Some(e) => e.iter().map(|x| x.to_string()).collect(),
                None => m.to_float().iter().map(|x| fmt_f64(*x)).collect(),
            };
            let mut row = vec![kind.clone(), i.to_string()];
            row.extend(entries);
            row.extend([fmt_f64(r.factorization.t), r.factorization.iota_branch.to_string(), fmt_f64(r.residual)]);
            w.write_record(&row)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| ReportError::Csv(e.into_error().into()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Parses `args` (program name first), runs the command and writes its
/// output. Returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(stderr, "{e}") } else { write!(stdout, "{e}") };
            return code;
        }
    };
    let result = execute(cli).and_then(|(text, out_path)| match &out_path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Other(format!("{}: {e}", p.display()))),
        None => stdout.write_all(text.as_bytes()).map_err(|e| CliError::Other(e.to_string())),
    });
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
