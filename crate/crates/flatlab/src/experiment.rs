//! Experiment drivers: the circle-versus-horocycle tracking distance and the
//! per-direction horocycle torus survey.

use std::path::{Path, PathBuf};

use flatlab_core::audit::{h_minimal_from_moduli, DirectionReport};
use flatlab_core::cylinder::CylinderError;
use flatlab_core::exact::ExactReal;
use flatlab_core::sl2::Mat2;
use flatlab_core::surface::TranslationSurface;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::report::{float17, Format};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrackRecord {
    #[serde(with = "float17")]
    pub t: f64,
    #[serde(with = "float17")]
    pub psi: f64,
    /// Distance in fixed-marking period coordinates between `g_t r_ψ M` and
    /// `h_{-e^{2t} tan ψ} g_t M`.
    #[serde(with = "float17")]
    pub distance: f64,
}

/// Edge vectors of a fan triangulation of the polygons, each glued pair
/// counted once. Both compared surfaces are linear images of these.
pub fn marking(m: &TranslationSurface) -> Vec<[f64; 2]> {
    let mut out = Vec::new();
    for (i, poly) in m.float_polygons().iter().enumerate() {
        let n = poly.len();
        for k in 0..n {
            if (i, k) <= m.partner((i, k)) {
                out.push(m.edge_vector_f64((i, k)));
            }
        }
        for k in 2..n.saturating_sub(1) {
            out.push([poly[k][0] - poly[0][0], poly[k][1] - poly[0][1]]);
        }
    }
    out
}

pub fn track_distance(edges: &[[f64; 2]], t: f64, psi: f64) -> f64 {
    let a = Mat2::g(t) * Mat2::rotation(psi);
    let b = Mat2::h_float(-(2.0 * t).exp() * psi.tan()) * Mat2::g(t);
    let d = {
        let (x, y) = (a.to_float(), b.to_float());
        [x[0] - y[0], x[1] - y[1], x[2] - y[2], x[3] - y[3]]
    };
    edges
        .iter()
        .map(|e| {
            let u = d[0] * e[0] + d[1] * e[1];
            let v = d[2] * e[0] + d[3] * e[1];
            u * u + v * v
        })
        .sum::<f64>()
        .sqrt()
}

/// One record per `(t, ψ)`, ordered by `t` then by the given `ψ` order.
pub fn track_experiment(m: &TranslationSurface, ts: &[f64], psis: &[f64]) -> Vec<TrackRecord> {
    let edges = marking(m);
    ts.iter()
        .flat_map(|&t| psis.iter().map(move |&psi| (t, psi)))
        .map(|(t, psi)| TrackRecord { t, psi, distance: track_distance(&edges, t, psi) })
        .collect()
}

/// One row of the horocycle torus survey.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurveyRow {
    pub direction_p: ExactReal,
    pub direction_q: ExactReal,
    /// Dimension of the horocycle-minimal torus.
    pub d: usize,
    pub period: Option<ExactReal>,
}

/// Rows for the periodic directions among `reports`, in the same order.
pub fn survey_from_reports(reports: &[DirectionReport]) -> Result<Vec<SurveyRow>, CylinderError> {
    reports
        .iter()
        .filter(|r| r.is_decomposed())
        .map(|r| {
            let h = h_minimal_from_moduli(&r.moduli)?;
            Ok(SurveyRow {
                direction_p: r.direction.x.clone(),
                direction_q: r.direction.y.clone(),
                d: h.torus_dim,
                period: h.period,
            })
        })
        .collect()
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Toml { path: String, source: toml::de::Error },
    #[error("{0}")]
    Invalid(String),
}

/// Settings shared by the CLI and the experiment drivers. Every field is
/// optional in the file; command-line flags take precedence.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Builder expression or surface file path.
    pub surface: Option<String>,
    pub bound: Option<String>,
    pub thetas: Option<Vec<f64>>,
    pub ts: Option<Vec<f64>>,
    pub epsilon: Option<f64>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
    pub max_frontier: Option<usize>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let p = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: p.clone(), source })?;
        let cfg: ExperimentConfig = toml::from_str(&text).map_err(|source| ConfigError::Toml { path: p, source })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.thetas.as_ref().is_some_and(|g| g.is_empty()) || self.ts.as_ref().is_some_and(|g| g.is_empty()) {
            return Err(ConfigError::Invalid("grids must be nonempty".into()));
        }
        if self.epsilon.is_some_and(|e| !(e > 0.0)) {
            return Err(ConfigError::Invalid("epsilon must be positive".into()));
        }
        if self.workers == Some(0) {
            return Err(ConfigError::Invalid("workers must be at least 1".into()));
        }
        if self.max_frontier == Some(0) {
            return Err(ConfigError::Invalid("max_frontier must be at least 1".into()));
        }
        Ok(())
    }

    /// `other` wins wherever it is set.
    pub fn overridden_by(self, other: ExperimentConfig) -> ExperimentConfig {
        ExperimentConfig {
            surface: other.surface.or(self.surface),
            bound: other.bound.or(self.bound),
            thetas: other.thetas.or(self.thetas),
            ts: other.ts.or(self.ts),
            epsilon: other.epsilon.or(self.epsilon),
            format: other.format.or(self.format),
            out: other.out.or(self.out),
            workers: other.workers.or(self.workers),
            max_frontier: other.max_frontier.or(self.max_frontier),
        }
    }
}
