//! Scans of saddle-connection directions: periodicity, commensurability of
//! moduli, and the horocycle-minimal torus attached to a periodic direction.
//!
//! Nothing here proves the lattice property. A scan either finds a periodic
//! direction with incommensurable moduli (a witness against) or it does not.

use alloc::vec::Vec;

use num_traits::Zero;

use crate::cylinder::{decompose, CylinderDecomposition, CylinderError, DecompositionStatus};
use crate::exact::{lcm_all, qspan_dim, ExactReal};
use crate::geom::V2;
use crate::saddle::{min_triangle_area_of, saddle_connections, SaddleError, SearchLimits};
use crate::surface::TranslationSurface;

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DirectionReport {
    pub direction: V2,
    pub status: DecompositionStatus,
    /// Cylinder moduli in the normalized frame, ascending.
    pub moduli: Vec<ExactReal>,
    pub commensurable: bool,
    /// ℚ-dimension of the span of the moduli; 0 when undecided.
    pub moduli_qdim: usize,
    /// Longest over shortest saddle connection in this direction, when the
    /// direction decomposed.
    pub saddle_length_ratio: Option<ExactReal>,
}

impl DirectionReport {
    pub fn from_decomposition(dec: &CylinderDecomposition) -> Result<Self, CylinderError> {
        let mut moduli = dec.moduli();
        moduli.sort();
        let (qdim, ratio) = if dec.is_decomposed() {
            let qdim = qspan_dim(&moduli)?.dimension;
            let lengths = dec.saddles.iter().map(|s| &s.length);
            let max = lengths.clone().max().expect("a periodic direction has saddle connections");
            let min = lengths.min().expect("nonempty");
            (qdim, Some(max.try_div(min)?))
        } else {
            (0, None)
        };
        Ok(DirectionReport {
            direction: dec.direction.clone(),
            status: dec.status.clone(),
            moduli,
            commensurable: qdim == 1,
            moduli_qdim: qdim,
            saddle_length_ratio: ratio,
        })
    }

    pub fn is_decomposed(&self) -> bool {
        self.status == DecompositionStatus::Decomposed
    }
}

pub fn direction_report(
    m: &TranslationSurface,
    direction: &V2,
    bound: &ExactReal,
    limits: SearchLimits,
) -> Result<DirectionReport, CylinderError> {
    DirectionReport::from_decomposition(&decompose(m, direction, bound, limits)?)
}

/// `v` or `-v`, whichever points into the upper half plane (positive
/// x-axis included).
pub fn projective_rep(v: &V2) -> V2 {
    if v.y.is_negative() || (v.y.is_zero() && v.x.is_negative()) {
        -v
    } else {
        v.clone()
    }
}

/// One shortest holonomy per saddle-connection direction of length at most
/// `bound`, ordered by angle in `[0, π)`.
pub fn scan_directions(m: &TranslationSurface, bound: &ExactReal, limits: SearchLimits) -> Result<Vec<V2>, SaddleError> {
    let all = saddle_connections(m, bound, limits)?;
    let mut dirs: Vec<V2> = Vec::new();
    // connections arrive sorted by length, so the first in each class is shortest
    for s in &all {
        let v = projective_rep(&s.holonomy);
        if !dirs.iter().any(|d| d.parallel(&v)) {
            dirs.push(v);
        }
    }
    dirs.sort_by(|a, b| a.angle_cmp(b));
    Ok(dirs)
}

/// Tracing bound used per direction by the scans: 20 times the larger of
/// the scan length and the polygon diameter.
pub fn direction_bound(m: &TranslationSurface, scan_bound: &ExactReal) -> ExactReal {
    let diam = ExactReal::from_int(libm::ceil(m.diameter_proxy()) as i64);
    let base = if diam > *scan_bound { diam } else { scan_bound.clone() };
    &base * &ExactReal::from_int(20)
}

/// One report per saddle-connection direction with holonomy length at most `bound`.
pub fn periodic_scan(
    m: &TranslationSurface,
    bound: &ExactReal,
    limits: SearchLimits,
) -> Result<Vec<DirectionReport>, CylinderError> {
    m.require_exact()?;
    let per_direction = direction_bound(m, bound);
    scan_directions(m, bound, limits)?
        .iter()
        .map(|d| direction_report(m, d, &per_direction, limits))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HMinimalReport {
    pub torus_dim: usize,
    /// Least `s > 0` with `s · μ` an integer for every modulus `μ`; present
    /// exactly when `torus_dim == 1`.
    pub period: Option<ExactReal>,
}

pub fn h_minimal_from_moduli(moduli: &[ExactReal]) -> Result<HMinimalReport, CylinderError> {
    let d = qspan_dim(moduli)?.dimension;
    if d != 1 {
        return Ok(HMinimalReport { torus_dim: d, period: None });
    }
    let first = &moduli[0];
    let mut dens = Vec::with_capacity(moduli.len());
    for mu in moduli {
        let r = mu.try_div(first)?;
        let r = r.as_rational().expect("dimension one means rational ratios");
        dens.push(r.denom().clone());
    }
    let t = lcm_all(&dens);
    let period = ExactReal::from_rational(t.into()).try_div(first)?;
    Ok(HMinimalReport { torus_dim: 1, period: Some(period) })
}

pub fn h_minimal_analysis(dec: &CylinderDecomposition) -> Result<HMinimalReport, CylinderError> {
    if !dec.is_decomposed() {
        return Err(CylinderError::NotDecomposed);
    }
    h_minimal_from_moduli(&dec.moduli())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Verdict {
    ConsistentWithLattice,
    WitnessAgainst,
    Inconclusive,
}

impl core::fmt::Display for Verdict {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            Verdict::ConsistentWithLattice => "consistent_with_lattice",
            Verdict::WitnessAgainst => "witness_against",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LatticeEvidence {
    pub verdict: Verdict,
    /// Periodic directions whose moduli are not commensurable.
    pub witnesses: Vec<DirectionReport>,
    pub scan_bound: ExactReal,
    pub directions_scanned: usize,
    pub undecided: usize,
    /// Smallest virtual triangle among holonomies within the scan bound.
    pub min_triangle_area: Option<ExactReal>,
    pub max_saddle_ratio: Option<ExactReal>,
}

/// Combines per-direction reports; the order of `reports` does not matter.
pub fn aggregate_evidence(
    reports: &[DirectionReport],
    scan_bound: &ExactReal,
    min_triangle_area: Option<ExactReal>,
) -> LatticeEvidence {
    let mut witnesses: Vec<DirectionReport> =
        reports.iter().filter(|r| r.is_decomposed() && !r.commensurable).cloned().collect();
    witnesses.sort_by(|a, b| a.direction.angle_cmp(&b.direction));
    let undecided = reports.iter().filter(|r| !r.is_decomposed()).count();
    let verdict = if !witnesses.is_empty() {
        Verdict::WitnessAgainst
    } else if undecided == 0 && !reports.is_empty() {
        Verdict::ConsistentWithLattice
    } else {
        Verdict::Inconclusive
    };
    let max_saddle_ratio = reports.iter().filter_map(|r| r.saddle_length_ratio.clone()).max();
    LatticeEvidence {
        verdict,
        witnesses,
        scan_bound: scan_bound.clone(),
        directions_scanned: reports.len(),
        undecided,
        min_triangle_area,
        max_saddle_ratio,
    }
}

pub fn lattice_evidence(
    m: &TranslationSurface,
    bound: &ExactReal,
    limits: SearchLimits,
) -> Result<LatticeEvidence, CylinderError> {
    let reports = periodic_scan(m, bound, limits)?;
    let dirs: Vec<V2> = reports.iter().map(|r| r.direction.clone()).collect();
    let area = match min_triangle_area_of(dirs.iter()) {
        Ok(a) => Some(a),
        Err(SaddleError::InsufficientSaddleConnections) => None,
        Err(e) => return Err(e.into()),
    };
    Ok(aggregate_evidence(&reports, bound, area))
}

/// Orders reports by direction angle.
pub fn sort_reports(reports: &mut [DirectionReport]) {
    reports.sort_by(|a, b| a.direction.angle_cmp(&b.direction));
}

/// `s · μ` is a positive integer for every modulus.
pub fn period_is_valid(period: &ExactReal, moduli: &[ExactReal]) -> bool {
    moduli.iter().all(|mu| {
        let x = period * mu;
        x.is_positive() && x.as_rational().is_some_and(|r| r.is_integer() && !r.is_zero())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders;
    use crate::cylinder::shear_cylinders;
    use crate::triangulation::equivalent;
    use alloc::vec;

    fn q(s: &str) -> ExactReal {
        s.parse().unwrap()
    }

    fn lim() -> SearchLimits {
        SearchLimits::default()
    }

    #[test]
    fn direction_reports() {
        let h = V2::ints(1, 0);
        let r = direction_report(&builders::three_square_l(), &h, &q("20"), lim()).unwrap();
        assert_eq!(r.moduli, vec![q("1/2"), q("1")]);
        assert!(r.commensurable);
        assert_eq!(r.moduli_qdim, 1);
        let r = direction_report(&builders::stretched_l(), &h, &q("20"), lim()).unwrap();
        assert_eq!(r.moduli, vec![q("1/2"), q("sqrt(2)")]);
        assert!(!r.commensurable);
        assert_eq!(r.moduli_qdim, 2);
        let r = direction_report(&builders::torus(), &h, &q("20"), lim()).unwrap();
        assert_eq!((r.moduli.len(), r.moduli_qdim), (1, 1));
        assert_eq!(r.saddle_length_ratio, Some(q("1")));
    }

    #[test]
    fn h_minimal_examples() {
        let h = V2::ints(1, 0);
        let run = |m: &TranslationSurface| {
            h_minimal_analysis(&decompose(m, &h, &q("20"), lim()).unwrap()).unwrap()
        };
        assert_eq!(run(&builders::torus()), HMinimalReport { torus_dim: 1, period: Some(q("1")) });
        assert_eq!(run(&builders::three_square_l()), HMinimalReport { torus_dim: 1, period: Some(q("2")) });
        assert_eq!(run(&builders::stretched_l()), HMinimalReport { torus_dim: 2, period: None });
        let undecided = decompose(&builders::torus(), &h, &q("1/2"), lim()).unwrap();
        assert_eq!(h_minimal_analysis(&undecided), Err(CylinderError::NotDecomposed));
    }

    #[test]
    fn period_is_minimal() {
        let moduli = [q("2/3"), q("4/9"), q("1/6")];
        let r = h_minimal_from_moduli(&moduli).unwrap();
        let p = r.period.unwrap();
        assert!(period_is_valid(&p, &moduli));
        for k in [2, 3, 5, 7] {
            assert!(!period_is_valid(&(&p / &ExactReal::from_int(k)), &moduli));
        }
        assert_eq!(p, q("18"));
    }

    #[test]
    fn period_shear_is_identity() {
        let h = V2::ints(1, 0);
        for m in [builders::torus(), builders::three_square_l(), builders::origami_from_cycles("(1,2,3)", "(1,2)").unwrap()] {
            let dec = decompose(&m, &h, &q("20"), lim()).unwrap();
            let p = h_minimal_analysis(&dec).unwrap().period.unwrap();
            let all: Vec<usize> = (0..dec.cylinders.len()).collect();
            assert!(equivalent(&shear_cylinders(&m, &dec, &all, &p).unwrap(), &m).unwrap());
        }
    }

    #[test]
    fn torus_scan() {
        let reports = periodic_scan(&builders::torus(), &q("3"), lim()).unwrap();
        // primitive vectors of length ≤ 3 up to sign
        let oracle = (-3i64..=3)
            .flat_map(|a| (-3i64..=3).map(move |b| (a, b)))
            .filter(|&(a, b)| (b > 0 || (b == 0 && a > 0)) && a * a + b * b <= 9 && num_integer::gcd(a, b) == 1)
            .count();
        assert_eq!(reports.len(), oracle);
        for r in &reports {
            assert!(r.is_decomposed() && r.commensurable);
        }
        let ev = lattice_evidence(&builders::torus(), &q("5"), lim()).unwrap();
        assert_eq!(ev.verdict, Verdict::ConsistentWithLattice);
    }

    #[test]
    fn stretched_l_witness() {
        let ev = lattice_evidence(&builders::stretched_l(), &q("2"), lim()).unwrap();
        assert_eq!(ev.verdict, Verdict::WitnessAgainst);
        assert!(ev.witnesses.iter().any(|w| w.direction.parallel(&V2::ints(1, 0)) && w.moduli_qdim == 2));
    }

    #[test]
    fn aggregation_rules() {
        let ok = DirectionReport {
            direction: V2::ints(1, 0),
            status: DecompositionStatus::Decomposed,
            moduli: vec![q("1")],
            commensurable: true,
            moduli_qdim: 1,
            saddle_length_ratio: Some(q("1")),
        };
        let undecided = DirectionReport {
            direction: V2::ints(0, 1),
            status: DecompositionStatus::Undecided { bound: q("1") },
            moduli: vec![],
            commensurable: false,
            moduli_qdim: 0,
            saddle_length_ratio: None,
        };
        assert_eq!(aggregate_evidence(&[ok.clone()], &q("1"), None).verdict, Verdict::ConsistentWithLattice);
        assert_eq!(aggregate_evidence(&[ok.clone(), undecided], &q("1"), None).verdict, Verdict::Inconclusive);
        assert_eq!(aggregate_evidence(&[], &q("1"), None).verdict, Verdict::Inconclusive);
    }
}
