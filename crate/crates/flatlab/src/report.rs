//! JSON and CSV output. Exact scalars are written in the scalar grammar
//! (`a+b*sqrt(D)`), floats with 17 significant digits.

use std::str::FromStr;

use flatlab_core::audit::DirectionReport;
use flatlab_core::cylinder::{CylinderDecomposition, DecompositionStatus};
use flatlab_core::exact::{ExactReal, Field};
use flatlab_core::geom::V2;
use flatlab_core::saddle::SaddleConnection;
use flatlab_core::surface::{build_surface, EdgeRef, PolygonSpec, SurfaceError, SurfaceSpec, TranslationSurface};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::experiment::{SurveyRow, TrackRecord};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("expected a `{expected}` report, found `{found}`")]
    WrongKind { expected: String, found: String },
    #[error("csv header mismatch: expected {expected:?}")]
    Header { expected: Vec<&'static str> },
    #[error("row {row}, column `{column}`: {message}")]
    Cell { row: usize, column: &'static str, message: String },
    #[error("{0} has no csv form")]
    NoCsv(&'static str),
    #[error("{0}")]
    Surface(#[from] SurfaceError),
}

/// Float formatting used everywhere in reports.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

/// Serde adapter writing `f64` as a JSON number with 17 significant digits.
pub mod float17 {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};
    use serde_json::value::RawValue;

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if !x.is_finite() {
            return s.serialize_none();
        }
        let raw = RawValue::from_string(super::fmt_f64(*x)).map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Option::<f64>::deserialize(d).map(|x| x.unwrap_or(f64::NAN))
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Document<T> {
    pub report: String,
    pub schema: u32,
    pub data: T,
}

pub fn to_json<T: Serialize>(kind: &str, data: &T) -> Result<String, ReportError> {
    let doc = Document { report: kind.to_string(), schema: SCHEMA_VERSION, data };
    let mut s = serde_json::to_string_pretty(&doc)?;
    s.push('\n');
    Ok(s)
}

pub fn from_json<T: DeserializeOwned>(kind: &str, text: &str) -> Result<T, ReportError> {
    let doc: Document<T> = serde_json::from_str(text)?;
    if doc.report != kind {
        return Err(ReportError::WrongKind { expected: kind.into(), found: doc.report });
    }
    Ok(doc.data)
}

/// A report with a row-per-record CSV form that parses back to the same value.
pub trait Table: Sized {
    const KIND: &'static str;
    const HEADER: &'static [&'static str];
    fn rows(&self) -> Vec<Vec<String>>;
    fn from_rows(rows: Vec<Vec<String>>) -> Result<Self, ReportError>;
}

pub fn to_csv<T: Table>(table: &T) -> Result<String, ReportError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(T::HEADER)?;
    for row in table.rows() {
        w.write_record(&row)?;
    }
    let bytes = w.into_inner().map_err(|e| ReportError::Csv(e.into_error().into()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn from_csv<T: Table>(text: &str) -> Result<T, ReportError> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = r.headers()?.iter().map(String::from).collect();
    if header != T::HEADER {
        return Err(ReportError::Header { expected: T::HEADER.to_vec() });
    }
    let rows = r
        .records()
        .map(|rec| rec.map(|rec| rec.iter().map(String::from).collect()))
        .collect::<Result<Vec<Vec<String>>, _>>()?;
    T::from_rows(rows)
}

fn cell<T: FromStr>(row: usize, column: &'static str, s: &str) -> Result<T, ReportError>
where
    T::Err: std::fmt::Display,
{
    s.parse().map_err(|e: T::Err| ReportError::Cell { row, column, message: e.to_string() })
}

fn opt_cell<T: FromStr>(row: usize, column: &'static str, s: &str) -> Result<Option<T>, ReportError>
where
    T::Err: std::fmt::Display,
{
    if s.is_empty() {
        Ok(None)
    } else {
        cell(row, column, s).map(Some)
    }
}

fn opt_str(x: &Option<ExactReal>) -> String {
    x.as_ref().map(|v| v.to_string()).unwrap_or_default()
}

impl Table for Vec<DirectionReport> {
    const KIND: &'static str = "direction_reports";
    const HEADER: &'static [&'static str] = &[
        "direction_p",
        "direction_q",
        "status",
        "undecided_bound",
        "moduli",
        "commensurable",
        "moduli_qdim",
        "saddle_length_ratio",
    ];

    fn rows(&self) -> Vec<Vec<String>> {
        self.iter()
            .map(|r| {
                let (status, bound) = match &r.status {
                    DecompositionStatus::Decomposed => ("decomposed", String::new()),
                    DecompositionStatus::Undecided { bound } => ("undecided", bound.to_string()),
                };
                vec![
                    r.direction.x.to_string(),
                    r.direction.y.to_string(),
                    status.to_string(),
                    bound,
                    r.moduli.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(";"),
                    r.commensurable.to_string(),
                    r.moduli_qdim.to_string(),
                    opt_str(&r.saddle_length_ratio),
                ]
            })
            .collect()
    }

    fn from_rows(rows: Vec<Vec<String>>) -> Result<Self, ReportError> {
        rows.iter()
            .enumerate()
            .map(|(i, r)| {
                let status = match r[2].as_str() {
                    "decomposed" => DecompositionStatus::Decomposed,
                    "undecided" => DecompositionStatus::Undecided { bound: cell(i, "undecided_bound", &r[3])? },
                    other => {
                        return Err(ReportError::Cell { row: i, column: "status", message: format!("unknown status `{other}`") })
                    }
                };
                let moduli = if r[4].is_empty() {
                    Vec::new()
                } else {
                    r[4].split(';').map(|m| cell(i, "moduli", m)).collect::<Result<_, _>>()?
                };
                Ok(DirectionReport {
                    direction: V2::new(cell(i, "direction_p", &r[0])?, cell(i, "direction_q", &r[1])?),
                    status,
                    moduli,
                    commensurable: cell(i, "commensurable", &r[5])?,
                    moduli_qdim: cell(i, "moduli_qdim", &r[6])?,
                    saddle_length_ratio: opt_cell(i, "saddle_length_ratio", &r[7])?,
                })
            })
            .collect()
    }
}

impl Table for Vec<SurveyRow> {
    const KIND: &'static str = "orbit_survey";
    const HEADER: &'static [&'static str] = &["direction_p", "direction_q", "d", "period"];

    fn rows(&self) -> Vec<Vec<String>> {
        self.iter()
            .map(|r| vec![r.direction_p.to_string(), r.direction_q.to_string(), r.d.to_string(), opt_str(&r.period)])
            .collect()
    }

    fn from_rows(rows: Vec<Vec<String>>) -> Result<Self, ReportError> {
        rows.iter()
            .enumerate()
            .map(|(i, r)| {
                Ok(SurveyRow {
                    direction_p: cell(i, "direction_p", &r[0])?,
                    direction_q: cell(i, "direction_q", &r[1])?,
                    d: cell(i, "d", &r[2])?,
                    period: opt_cell(i, "period", &r[3])?,
                })
            })
            .collect()
    }
}

impl Table for Vec<TrackRecord> {
    const KIND: &'static str = "track";
    const HEADER: &'static [&'static str] = &["t", "psi", "distance"];

    fn rows(&self) -> Vec<Vec<String>> {
        self.iter().map(|r| vec![fmt_f64(r.t), fmt_f64(r.psi), fmt_f64(r.distance)]).collect()
    }

    fn from_rows(rows: Vec<Vec<String>>) -> Result<Self, ReportError> {
        rows.iter()
            .enumerate()
            .map(|(i, r)| {
                Ok(TrackRecord { t: cell(i, "t", &r[0])?, psi: cell(i, "psi", &r[1])?, distance: cell(i, "distance", &r[2])? })
            })
            .collect()
    }
}

impl Table for Vec<SaddleConnection> {
    const KIND: &'static str = "saddles";
    const HEADER: &'static [&'static str] =
        &["holonomy_x", "holonomy_y", "length_sq", "start_cone", "start_sector", "end_cone", "end_sector"];

    fn rows(&self) -> Vec<Vec<String>> {
        self.iter()
            .map(|s| {
                vec![
                    s.holonomy.x.to_string(),
                    s.holonomy.y.to_string(),
                    s.length_sq.to_string(),
                    s.start_cone.to_string(),
                    s.start_sector.to_string(),
                    s.end_cone.to_string(),
                    s.end_sector.to_string(),
                ]
            })
            .collect()
    }

    fn from_rows(rows: Vec<Vec<String>>) -> Result<Self, ReportError> {
        rows.iter()
            .enumerate()
            .map(|(i, r)| {
                Ok(SaddleConnection {
                    holonomy: V2::new(cell(i, "holonomy_x", &r[0])?, cell(i, "holonomy_y", &r[1])?),
                    length_sq: cell(i, "length_sq", &r[2])?,
                    start_cone: cell(i, "start_cone", &r[3])?,
                    start_sector: cell(i, "start_sector", &r[4])?,
                    end_cone: cell(i, "end_cone", &r[5])?,
                    end_sector: cell(i, "end_sector", &r[6])?,
                })
            })
            .collect()
    }
}

/// One row per cylinder; emit-only (boundary saddle lists are JSON-only).
pub fn cylinders_csv(dec: &CylinderDecomposition) -> Result<String, ReportError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "direction_p",
        "direction_q",
        "status",
        "cylinder",
        "circumference",
        "height",
        "modulus",
        "original_modulus",
        "twist",
    ])?;
    let status = if dec.is_decomposed() { "decomposed" } else { "undecided" };
    for (i, c) in dec.cylinders.iter().enumerate() {
        w.write_record([
            dec.direction.x.to_string(),
            dec.direction.y.to_string(),
            status.to_string(),
            i.to_string(),
            c.circumference.to_string(),
            c.height.to_string(),
            c.modulus.to_string(),
            c.original_modulus.to_string(),
            c.twist.to_string(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| ReportError::Csv(e.into_error().into()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// JSON form of a surface: the validated polygons and gluings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfaceDoc {
    pub field: String,
    pub polygons: Vec<PolygonSpec>,
    pub gluings: Vec<(EdgeRef, EdgeRef)>,
}

impl SurfaceDoc {
    pub fn from_surface(m: &TranslationSurface) -> Result<Self, SurfaceError> {
        let spec = m.to_spec()?;
        Ok(SurfaceDoc { field: spec.field.to_string(), polygons: spec.polygons, gluings: spec.gluings })
    }

    pub fn to_surface(&self) -> Result<TranslationSurface, ReportError> {
        let field: Field = self.field.parse().map_err(|e| SurfaceError::Arith(e))?;
        Ok(build_surface(&SurfaceSpec {
            field,
            polygons: self.polygons.clone(),
            gluings: self.gluings.clone(),
            triangulate: false,
        })?)
    }
}

/// Invariants printed by `flatlab show`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfaceSummary {
    pub field: String,
    pub polygons: usize,
    pub genus: u32,
    pub stratum: String,
    pub area: String,
    /// Cone angle of each cone point divided by 2π.
    pub cone_angles: Vec<u32>,
    pub systole_sq: Option<ExactReal>,
    /// Whether no saddle connection is shorter than the requested epsilon.
    pub in_thick_part: Option<bool>,
}

impl SurfaceSummary {
    pub const HEADER: [&'static str; 8] =
        ["field", "polygons", "genus", "stratum", "area", "cone_angles", "systole_sq", "in_thick_part"];

    pub fn csv_row(&self) -> [String; 8] {
        [
            self.field.clone(),
            self.polygons.to_string(),
            self.genus.to_string(),
            self.stratum.clone(),
            self.area.clone(),
            self.cone_angles.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(";"),
            opt_str(&self.systole_sq),
            self.in_thick_part.map(|b| b.to_string()).unwrap_or_default(),
        ]
    }
}

pub fn summary_csv(s: &SurfaceSummary) -> Result<String, ReportError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(SurfaceSummary::HEADER)?;
    w.write_record(s.csv_row())?;
    let bytes = w.into_inner().map_err(|e| ReportError::Csv(e.into_error().into()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
