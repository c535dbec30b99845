//! Cylinder decompositions in a field direction, and cylinder shears and
//! stretches.
//!
//! A direction `(p, q)` is first moved to the horizontal by a unimodular
//! matrix `N` with entries in the field. Circumferences, heights and moduli
//! are reported in that normalized frame; the modulus in the original frame
//! is the normalized one divided by `p² + q²`.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::exact::{ArithError, ExactReal};
use crate::geom::V2;
use crate::saddle::{explore_wedge, trace_ray, Hit, SaddleError, SearchLimits};
use crate::sl2::Mat2;
use crate::surface::{SurfaceError, TranslationSurface};
use crate::triangulation::{delaunay, prev, surface_from_triangles, MarkedTriangulation};

#[derive(Clone, Debug, PartialEq)]
pub enum CylinderError {
    ZeroDirection,
    NotDecomposed,
    EmptySubset,
    CylinderIndex(usize),
    NonpositiveFactor,
    /// A consistency check between boundary data failed.
    Inconsistent(&'static str),
    Saddle(SaddleError),
    Surface(SurfaceError),
    Arith(ArithError),
}

impl fmt::Display for CylinderError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CylinderError::ZeroDirection => f.write_str("direction must be nonzero"),
            CylinderError::NotDecomposed => f.write_str("direction is not certified periodic"),
            CylinderError::EmptySubset => f.write_str("no cylinders selected"),
            CylinderError::CylinderIndex(i) => write!(f, "no cylinder with index {i}"),
            CylinderError::NonpositiveFactor => f.write_str("stretch factor must be positive"),
            CylinderError::Inconsistent(what) => write!(f, "inconsistent cylinder data: {what}"),
            CylinderError::Saddle(e) => write!(f, "{e}"),
            CylinderError::Surface(e) => write!(f, "{e}"),
            CylinderError::Arith(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for CylinderError {}

impl From<SaddleError> for CylinderError {
    fn from(e: SaddleError) -> Self {
        match e {
            SaddleError::Surface(s) => CylinderError::Surface(s),
            e => CylinderError::Saddle(e),
        }
    }
}

impl From<SurfaceError> for CylinderError {
    fn from(e: SurfaceError) -> Self {
        CylinderError::Surface(e)
    }
}

impl From<ArithError> for CylinderError {
    fn from(e: ArithError) -> Self {
        CylinderError::Arith(e)
    }
}

/// Unimodular matrix with rows `(p, q)/(p² + q²)` and `(-q, p)`, sending
/// `(p, q)` to `(1, 0)`.
pub fn direction_normalizer(p: &ExactReal, q: &ExactReal) -> Result<Mat2, CylinderError> {
    let s = &p.square() + &q.square();
    if s.is_zero() {
        return Err(CylinderError::ZeroDirection);
    }
    let si = s.try_recip()?;
    Ok(Mat2::exact(p.try_mul(&si)?, q.try_mul(&si)?, -q, p.clone()))
}

/// A saddle connection parallel to the decomposition direction.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DirectionalSaddle {
    /// Length in the normalized frame (the holonomy there is `(length, 0)`).
    pub length: ExactReal,
    /// Holonomy in the original frame.
    pub holonomy: V2,
    pub start_cone: usize,
    pub end_cone: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Cylinder {
    pub circumference: ExactReal,
    pub height: ExactReal,
    /// `height / circumference`, normalized frame.
    pub modulus: ExactReal,
    /// Modulus measured in the original frame.
    pub original_modulus: ExactReal,
    /// Indices into [`CylinderDecomposition::saddles`], left to right.
    pub bottom_saddles: Vec<usize>,
    pub top_saddles: Vec<usize>,
    /// Horizontal offset from the start of the first bottom saddle to the
    /// start of the first top saddle, in `[0, circumference)`.
    pub twist: ExactReal,
    pub core_direction: V2,
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum DecompositionStatus {
    Decomposed,
    /// Some separatrix did not close up within this length bound.
    Undecided { bound: ExactReal },
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CylinderDecomposition {
    pub direction: V2,
    pub status: DecompositionStatus,
    pub cylinders: Vec<Cylinder>,
    pub saddles: Vec<DirectionalSaddle>,
    pub area: ExactReal,
}

impl CylinderDecomposition {
    pub fn is_decomposed(&self) -> bool {
        self.status == DecompositionStatus::Decomposed
    }

    pub fn moduli(&self) -> Vec<ExactReal> {
        self.cylinders.iter().map(|c| c.modulus.clone()).collect()
    }

    pub fn normalizer(&self) -> Mat2 {
        direction_normalizer(&self.direction.x, &self.direction.y).expect("nonzero direction")
    }
}

fn east() -> V2 {
    V2::ints(1, 0)
}

fn west() -> V2 {
    V2::ints(-1, 0)
}

/// Walks corners around a cone point from `start` (inclusive) until one
/// contains the direction `(1, 0)`.
fn find_east(tri: &MarkedTriangulation, start: usize, ccw: bool) -> usize {
    let mut c = start;
    for _ in 0..tri.half_edge_count() {
        if tri.corner_contains(c, &east()) {
            return c;
        }
        c = if ccw { tri.ccw_corner(c) } else { tri.cw_corner(c) };
    }
    panic!("cone point with no horizontal direction");
}

/// First vertices seen from the start of corner `c0` in the open upper half
/// plane, sweeping counter-clockwise from `(1, 0)` to `(-1, 0)`.
fn upper_sweep(
    tri: &MarkedTriangulation,
    c0: usize,
    bound_sq: &ExactReal,
    limits: SearchLimits,
) -> Result<Vec<Hit>, SaddleError> {
    let w = west();
    let mut hits = Vec::new();
    let mut c = c0;
    let mut s = east();
    loop {
        let e = tri.edge(c).clone();
        let f = -tri.edge(prev(c));
        if c != c0 {
            if e.same_direction(&w) {
                break;
            }
            if e.norm_sq() <= *bound_sq {
                hits.push(Hit { v: e.clone(), end_corner: tri.partner(c) });
            }
            s = e;
        }
        if s.cross(&w).is_positive() && !w.cross(&f).is_negative() {
            explore_wedge(tri, c, s, w, bound_sq, limits, &mut hits)?;
            break;
        }
        explore_wedge(tri, c, s.clone(), f, bound_sq, limits, &mut hits)?;
        c = tri.ccw_corner(c);
    }
    Ok(hits)
}

fn cycles_of(perm: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; perm.len()];
    let mut out = Vec::new();
    for s in 0..perm.len() {
        if seen[s] {
            continue;
        }
        let mut cyc = Vec::new();
        let mut x = s;
        while !seen[x] {
            seen[x] = true;
            cyc.push(x);
            x = perm[x];
        }
        out.push(cyc);
    }
    out
}

/// Decomposes `m` into cylinders in direction `direction`, tracing every
/// separatrix in that direction up to length `bound` (original units).
pub fn decompose(
    m: &TranslationSurface,
    direction: &V2,
    bound: &ExactReal,
    limits: SearchLimits,
) -> Result<CylinderDecomposition, CylinderError> {
    m.require_exact()?;
    let (p, q) = (&direction.x, &direction.y);
    let n = direction_normalizer(p, q)?;
    let scale = direction.norm_sq();
    let area = m.area_exact()?;
    let tri = delaunay(&m.apply_matrix(&n)?)?;
    let bound_sq = bound.square().try_div(&scale)?;

    // trace every eastward separatrix
    let mut by_corner: BTreeMap<usize, usize> = BTreeMap::new();
    let mut traced = Vec::new();
    for c in 0..tri.half_edge_count() {
        if !tri.corner_contains(c, &east()) {
            continue;
        }
        match trace_ray(&tri, c, &east(), &bound_sq) {
            Some(s) => {
                by_corner.insert(c, traced.len());
                traced.push(s);
            }
            None => {
                return Ok(CylinderDecomposition {
                    direction: direction.clone(),
                    status: DecompositionStatus::Undecided { bound: bound.clone() },
                    cylinders: Vec::new(),
                    saddles: Vec::new(),
                    area,
                })
            }
        }
    }
    let saddles: Vec<DirectionalSaddle> = traced
        .iter()
        .map(|s| DirectionalSaddle {
            length: s.holonomy.x.clone(),
            holonomy: V2::new(p * &s.holonomy.x, q * &s.holonomy.x),
            start_cone: s.start_cone,
            end_cone: s.end_cone,
        })
        .collect();
    let next_bottom: Vec<usize> =
        traced.iter().map(|s| by_corner[&find_east(&tri, s.end_sector, false)]).collect();
    let next_top: Vec<usize> = traced.iter().map(|s| by_corner[&find_east(&tri, s.end_sector, true)]).collect();
    let bottoms = cycles_of(&next_bottom);
    let tops = cycles_of(&next_top);
    if bottoms.len() != tops.len() {
        return Err(CylinderError::Inconsistent("boundary component counts differ"));
    }
    let mut top_of = vec![0usize; traced.len()];
    for (k, cyc) in tops.iter().enumerate() {
        for &s in cyc {
            top_of[s] = k;
        }
    }

    let mut cylinders = Vec::with_capacity(bottoms.len());
    let mut total = ExactReal::zero();
    for bottom in bottoms {
        let circumference = bottom.iter().fold(ExactReal::zero(), |acc, &s| acc + &saddles[s].length);
        let first = bottom[0];
        let sweep_sq = area.try_div(&circumference)?.square() + circumference.square();
        let hits = upper_sweep(&tri, traced[first].start_sector, &sweep_sq, limits)?;
        let lowest = hits
            .iter()
            .filter(|h| h.v.y.is_positive())
            .min_by(|a, b| a.v.y.cmp(&b.v.y).then_with(|| a.v.x.cmp(&b.v.x)))
            .ok_or(CylinderError::Inconsistent("no vertex above a bottom boundary"))?;
        let height = lowest.v.y.clone();
        let top_first = by_corner[&find_east(&tri, lowest.end_corner, true)];
        let cyc = &tops[top_of[top_first]];
        let pos = cyc.iter().position(|&s| s == top_first).expect("member of its cycle");
        let top: Vec<usize> = cyc[pos..].iter().chain(&cyc[..pos]).copied().collect();
        let top_len = top.iter().fold(ExactReal::zero(), |acc, &s| acc + &saddles[s].length);
        if top_len != circumference {
            return Err(CylinderError::Inconsistent("top and bottom lengths differ"));
        }
        let x = lowest.v.x.clone();
        let turns = x.try_div(&circumference)?.floor_to_int();
        let twist = &x - &(&circumference * &ExactReal::from_rational(turns.into()));
        let modulus = height.try_div(&circumference)?;
        total = total + &circumference * &height;
        cylinders.push(Cylinder {
            original_modulus: modulus.try_div(&scale)?,
            modulus,
            circumference,
            height,
            bottom_saddles: bottom,
            top_saddles: top,
            twist,
            core_direction: direction.clone(),
        });
    }
    if total != area {
        return Err(CylinderError::Inconsistent("cylinder areas do not sum to the surface area"));
    }
    cylinders.sort_by(|a, b| {
        a.modulus
            .cmp(&b.modulus)
            .then_with(|| a.circumference.cmp(&b.circumference))
            .then_with(|| a.bottom_saddles.cmp(&b.bottom_saddles))
    });
    Ok(CylinderDecomposition {
        direction: direction.clone(),
        status: DecompositionStatus::Decomposed,
        cylinders,
        saddles,
        area,
    })
}

/// Applies `[[1, shear], [0, factor]]` (normalized frame) to each selected
/// cylinder and re-glues.
pub fn affine_cylinders(
    m: &TranslationSurface,
    dec: &CylinderDecomposition,
    subset: &[usize],
    shear: &ExactReal,
    factor: &ExactReal,
) -> Result<TranslationSurface, CylinderError> {
    if !dec.is_decomposed() {
        return Err(CylinderError::NotDecomposed);
    }
    if subset.is_empty() {
        return Err(CylinderError::EmptySubset);
    }
    if let Some(&i) = subset.iter().find(|&&i| i >= dec.cylinders.len()) {
        return Err(CylinderError::CylinderIndex(i));
    }
    if !factor.is_positive() {
        return Err(CylinderError::NonpositiveFactor);
    }
    if m.area_exact()? != dec.area {
        return Err(CylinderError::Inconsistent("decomposition belongs to another surface"));
    }
    let field = m.field().join(shear.field())?.join(factor.field())?;
    let zero = ExactReal::zero();
    let horiz = |x: &ExactReal| V2::new(x.clone(), zero.clone());
    let mut edges: Vec<[V2; 3]> = Vec::new();
    let mut partner: Vec<usize> = Vec::new();
    // half-edges carrying each saddle on a cylinder bottom / top
    let mut bottom_he = vec![usize::MAX; dec.saddles.len()];
    let mut top_he = vec![usize::MAX; dec.saddles.len()];
    for (ci, cyl) in dec.cylinders.iter().enumerate() {
        let (t0, h) = if subset.contains(&ci) {
            (&cyl.twist + &(shear * &cyl.height), factor * &cyl.height)
        } else {
            (cyl.twist.clone(), cyl.height.clone())
        };
        let bx: Vec<ExactReal> = core::iter::once(zero.clone())
            .chain(cyl.bottom_saddles.iter().scan(zero.clone(), |acc, &s| {
                *acc = &*acc + &dec.saddles[s].length;
                Some(acc.clone())
            }))
            .collect();
        let tx: Vec<ExactReal> = core::iter::once(t0.clone())
            .chain(cyl.top_saddles.iter().scan(t0.clone(), |acc, &s| {
                *acc = &*acc + &dec.saddles[s].length;
                Some(acc.clone())
            }))
            .collect();
        let (nb, nt) = (cyl.bottom_saddles.len(), cyl.top_saddles.len());
        let base = edges.len();
        let (mut i, mut j) = (0, 0);
        let mut next_diag = Vec::with_capacity(nb + nt);
        while i < nb || j < nt {
            let k = edges.len();
            let bi = V2::new(bx[i].clone(), zero.clone());
            let tj = V2::new(tx[j].clone(), h.clone());
            let bottom_step = j == nt || (i < nb && bx[i + 1] <= tx[j + 1]);
            if bottom_step {
                let bn = V2::new(bx[i + 1].clone(), zero.clone());
                edges.push([horiz(&dec.saddles[cyl.bottom_saddles[i]].length), &tj - &bn, &bi - &tj]);
                bottom_he[cyl.bottom_saddles[i]] = 3 * k;
                next_diag.push(3 * k + 1);
                i += 1;
            } else {
                let tn = V2::new(tx[j + 1].clone(), h.clone());
                edges.push([&tn - &bi, -horiz(&dec.saddles[cyl.top_saddles[j]].length), &bi - &tj]);
                top_he[cyl.top_saddles[j]] = 3 * k + 1;
                next_diag.push(3 * k);
                j += 1;
            }
            partner.extend([usize::MAX; 3]);
        }
        let count = nb + nt;
        for (k, &d) in next_diag.iter().enumerate() {
            let following = 3 * (base + (k + 1) % count) + 2;
            partner[d] = following;
            partner[following] = d;
        }
    }
    for s in 0..dec.saddles.len() {
        let (b, t) = (bottom_he[s], top_he[s]);
        if b == usize::MAX || t == usize::MAX {
            return Err(CylinderError::Inconsistent("saddle missing from a boundary"));
        }
        partner[b] = t;
        partner[t] = b;
    }
    let normalized = surface_from_triangles(field, edges, partner)?;
    let n_inv = dec.normalizer().inverse().map_err(|_| CylinderError::ZeroDirection)?;
    Ok(normalized.apply_matrix(&n_inv)?)
}

/// Shears the selected cylinders by `h_t` in the normalized frame: each top
/// identification moves by `t · height`.
pub fn shear_cylinders(
    m: &TranslationSurface,
    dec: &CylinderDecomposition,
    subset: &[usize],
    t: &ExactReal,
) -> Result<TranslationSurface, CylinderError> {
    affine_cylinders(m, dec, subset, t, &ExactReal::one())
}

/// Multiplies the heights of the selected cylinders by `factor`.
pub fn stretch_cylinders(
    m: &TranslationSurface,
    dec: &CylinderDecomposition,
    subset: &[usize],
    factor: &ExactReal,
) -> Result<TranslationSurface, CylinderError> {
    affine_cylinders(m, dec, subset, &ExactReal::zero(), factor)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders;
    use crate::exact::qspan_dim;
    use crate::triangulation::equivalent;

    fn q(s: &str) -> ExactReal {
        s.parse().unwrap()
    }

    fn horizontal(m: &TranslationSurface) -> CylinderDecomposition {
        decompose(m, &V2::ints(1, 0), &q("20"), SearchLimits::default()).unwrap()
    }

    #[test]
    fn normalizer_examples() {
        assert_eq!(direction_normalizer(&q("1"), &q("0")).unwrap(), Mat2::identity());
        assert_eq!(direction_normalizer(&q("0"), &q("1")).unwrap(), Mat2::from_ints(0, 1, -1, 0));
        let n = direction_normalizer(&q("2"), &q("1")).unwrap();
        assert_eq!(n, Mat2::exact(q("2/5"), q("1/5"), q("-1"), q("2")));
        assert_eq!(n.apply_exact(&(q("2"), q("1"))).unwrap(), (q("1"), q("0")));
        assert_eq!(n.det().unwrap().to_f64(), 1.0);
        assert_eq!(direction_normalizer(&q("0"), &q("0")), Err(CylinderError::ZeroDirection));
    }

    #[test]
    fn torus_horizontal() {
        let d = horizontal(&builders::torus());
        assert!(d.is_decomposed());
        assert_eq!(d.cylinders.len(), 1);
        let c = &d.cylinders[0];
        assert_eq!((c.circumference.clone(), c.height.clone(), c.modulus.clone()), (q("1"), q("1"), q("1")));
    }

    #[test]
    fn torus_slope_direction() {
        let d = decompose(&builders::torus(), &V2::ints(2, 1), &q("20"), SearchLimits::default()).unwrap();
        assert_eq!(d.cylinders.len(), 1);
        // one cylinder of circumference √5 and height 1/√5 in the original frame
        assert_eq!(d.cylinders[0].original_modulus, q("1/5"));
        assert_eq!(d.cylinders[0].circumference, q("1"));
    }

    #[test]
    fn l_origami_horizontal() {
        let d = horizontal(&builders::three_square_l());
        let got: Vec<(ExactReal, ExactReal, ExactReal)> =
            d.cylinders.iter().map(|c| (c.circumference.clone(), c.height.clone(), c.modulus.clone())).collect();
        assert_eq!(got, vec![(q("2"), q("1"), q("1/2")), (q("1"), q("1"), q("1"))]);
        for c in &d.cylinders {
            assert_eq!(&c.modulus * &c.circumference, c.height);
        }
    }

    #[test]
    fn golden_l_horizontal() {
        let d = horizontal(&builders::golden_l());
        assert_eq!(d.cylinders.len(), 2);
        let m = d.moduli();
        assert_eq!(crate::exact::commensurable(&m[0], &m[1]).unwrap(), Some(crate::exact::Rational::from_integer(1.into())));
    }

    #[test]
    fn undecided_when_bound_too_small() {
        let d = decompose(&builders::torus(), &V2::ints(1, 0), &q("1/2"), SearchLimits::default()).unwrap();
        assert_eq!(d.status, DecompositionStatus::Undecided { bound: q("1/2") });
    }

    #[test]
    fn full_twists() {
        let t = builders::torus();
        let d = horizontal(&t);
        let s = shear_cylinders(&t, &d, &[0], &q("1")).unwrap();
        assert!(equivalent(&s, &t).unwrap());
        let s = shear_cylinders(&t, &d, &[0], &q("0")).unwrap();
        assert!(equivalent(&s, &t).unwrap());
        let half = shear_cylinders(&t, &d, &[0], &q("1/2")).unwrap();
        assert!(!equivalent(&half, &t).unwrap());

        let l = builders::three_square_l();
        let d = horizontal(&l);
        for (i, c) in d.cylinders.iter().enumerate() {
            let full = c.circumference.try_div(&c.height).unwrap();
            let s = shear_cylinders(&l, &d, &[i], &full).unwrap();
            assert!(equivalent(&s, &l).unwrap(), "cylinder {i}");
        }
    }

    #[test]
    fn stretches() {
        let l = builders::three_square_l();
        let d = horizontal(&l);
        let same = stretch_cylinders(&l, &d, &[0], &q("1")).unwrap();
        assert!(equivalent(&same, &l).unwrap());
        let top = d.cylinders.iter().position(|c| c.circumference == q("1")).unwrap();
        let s = stretch_cylinders(&l, &d, &[top], &q("sqrt(2)")).unwrap();
        let ds = horizontal(&s);
        let mut moduli = ds.moduli();
        moduli.sort();
        assert_eq!(moduli, vec![q("1/2"), q("sqrt(2)")]);
        assert_eq!(qspan_dim(&moduli).unwrap().dimension, 2);
        assert!(equivalent(&s, &builders::stretched_l()).unwrap());
        let all = stretch_cylinders(&l, &d, &[0, 1], &q("2")).unwrap();
        assert_eq!(all.area_exact().unwrap(), q("6"));
        assert_eq!(stretch_cylinders(&l, &d, &[0], &q("0")), Err(CylinderError::NonpositiveFactor));
        assert_eq!(stretch_cylinders(&l, &d, &[], &q("2")), Err(CylinderError::EmptySubset));
    }

    #[test]
    fn non_horizontal_shear() {
        let t = builders::golden_l();
        let d = decompose(&t, &V2::ints(0, 1), &q("20"), SearchLimits::default()).unwrap();
        assert!(d.is_decomposed());
        let full: Vec<ExactReal> = d.cylinders.iter().map(|c| c.circumference.try_div(&c.height).unwrap()).collect();
        for (i, f) in full.iter().enumerate() {
            assert!(equivalent(&shear_cylinders(&t, &d, &[i], f).unwrap(), &t).unwrap());
        }
    }
}
