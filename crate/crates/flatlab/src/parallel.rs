//! Rayon versions of the enumeration and scan drivers. Results come back in
//! the same order as the sequential versions.

use flatlab_core::audit::{
    aggregate_evidence, direction_bound, direction_report, scan_directions, DirectionReport, LatticeEvidence,
};
use flatlab_core::cylinder::CylinderError;
use flatlab_core::exact::ExactReal;
use flatlab_core::saddle::{
    canonical_cmp, min_triangle_area_of, saddles_from_corner, SaddleConnection, SaddleError, SearchLimits,
};
use flatlab_core::surface::TranslationSurface;
use flatlab_core::triangulation::delaunay;
use rayon::prelude::*;

use crate::experiment::{survey_from_reports, SurveyRow};

/// Thread pool of the given size, or of the available parallelism.
pub fn pool(workers: Option<usize>) -> Result<rayon::ThreadPool, rayon::ThreadPoolBuildError> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers {
        b = b.num_threads(n);
    }
    b.build()
}

pub fn saddle_connections(
    m: &TranslationSurface,
    bound: &ExactReal,
    limits: SearchLimits,
) -> Result<Vec<SaddleConnection>, SaddleError> {
    if !bound.is_positive() {
        return Err(SaddleError::NonpositiveBound);
    }
    let tri = delaunay(m)?;
    let bound_sq = bound.square();
    let per_corner = (0..tri.half_edge_count())
        .into_par_iter()
        .map(|c| saddles_from_corner(&tri, c, &bound_sq, limits))
        .collect::<Result<Vec<_>, _>>()?;
    let mut all: Vec<SaddleConnection> = per_corner.into_iter().flatten().collect();
    all.sort_by(canonical_cmp);
    Ok(all)
}

pub fn periodic_scan(
    m: &TranslationSurface,
    bound: &ExactReal,
    limits: SearchLimits,
) -> Result<Vec<DirectionReport>, CylinderError> {
    m.require_exact()?;
    let per_direction = direction_bound(m, bound);
    scan_directions(m, bound, limits)?
        .par_iter()
        .map(|d| direction_report(m, d, &per_direction, limits))
        .collect()
}

/// Scan results plus the aggregated verdict.
pub fn lattice_evidence(
    m: &TranslationSurface,
    bound: &ExactReal,
    limits: SearchLimits,
) -> Result<(LatticeEvidence, Vec<DirectionReport>), CylinderError> {
    let reports = periodic_scan(m, bound, limits)?;
    let dirs: Vec<_> = reports.iter().map(|r| r.direction.clone()).collect();
    let area = match min_triangle_area_of(dirs.iter()) {
        Ok(a) => Some(a),
        Err(SaddleError::InsufficientSaddleConnections) => None,
        Err(e) => return Err(e.into()),
    };
    Ok((aggregate_evidence(&reports, bound, area), reports))
}

pub fn orbit_survey(m: &TranslationSurface, bound: &ExactReal, limits: SearchLimits) -> Result<Vec<SurveyRow>, CylinderError> {
    survey_from_reports(&periodic_scan(m, bound, limits)?)
}
