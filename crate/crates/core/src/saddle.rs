//! Saddle connections by exact wedge unfolding.
//!
//! From each corner of a triangulation, an open wedge of directions is pushed
//! across triangle edges. Each time the wedge reaches a new triangle, its far
//! vertex either splits the wedge (and is recorded as a saddle connection)
//! or lies outside it, in which case the wedge continues through one edge.
//! A wedge is dropped once the part of the crossing edge it sees lies beyond
//! the length bound. Every test is an exact sign computation.

use alloc::collections::VecDeque;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::exact::ExactReal;
use crate::geom::V2;
use crate::surface::{SurfaceError, TranslationSurface};
use crate::triangulation::{delaunay, next, prev, MarkedTriangulation};

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SaddleConnection {
    pub holonomy: V2,
    pub length_sq: ExactReal,
    pub start_cone: usize,
    /// Corner (half-edge id of the search triangulation) the segment leaves from.
    pub start_sector: usize,
    pub end_cone: usize,
    /// Corner whose half-open sector contains the reversed direction at the end.
    pub end_sector: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SaddleError {
    /// The search frontier outgrew the configured cap.
    BoundTooLargeForMemory { frontier: usize },
    NonpositiveBound,
    InsufficientSaddleConnections,
    Surface(SurfaceError),
}

impl fmt::Display for SaddleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SaddleError::BoundTooLargeForMemory { frontier } => {
                write!(f, "search frontier exceeded the cap of {frontier} wedges")
            }
            SaddleError::NonpositiveBound => f.write_str("length bound must be positive"),
            SaddleError::InsufficientSaddleConnections => {
                f.write_str("fewer than two non-parallel saddle connections within the bound")
            }
            SaddleError::Surface(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for SaddleError {}

impl From<SurfaceError> for SaddleError {
    fn from(e: SurfaceError) -> Self {
        SaddleError::Surface(e)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchLimits {
    pub max_frontier: usize,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits { max_frontier: 1_000_000 }
    }
}

/// A vertex seen from the root corner.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hit {
    pub v: V2,
    pub end_corner: usize,
}

struct Wedge {
    tri: usize,
    /// edge of `tri` about to be crossed, from `a` (clockwise end) to `b`
    edge: usize,
    a: V2,
    b: V2,
    r: V2,
    l: V2,
}

/// Whether every point of the wedge `(r, l)` beyond segment `ab` is farther
/// than `sqrt(bound_sq)` from the origin.
fn beyond(a: &V2, b: &V2, r: &V2, l: &V2, bound_sq: &ExactReal) -> bool {
    let d = b - a;
    let n2 = d.norm_sq();
    let c = a.cross(b);
    let c2 = c.square();
    let ad = a.dot(&d);
    // which side of the wedge the foot of the perpendicular falls on
    let rd = r.cross(&d);
    if (&(&r.cross(a) * &n2) - &(&ad * &rd)).is_negative() {
        return &c2 * &r.norm_sq() > bound_sq * &rd.square();
    }
    let ld = l.cross(&d);
    if (&(&a.cross(l) * &n2) + &(&ad * &ld)).is_negative() {
        return &c2 * &l.norm_sq() > bound_sq * &ld.square();
    }
    c2 > bound_sq * &n2
}

/// Explores the open wedge `(r, l)` inside the sector of corner `corner` and
/// appends the first vertex hit in every direction, up to the bound.
pub fn explore_wedge(
    tri: &MarkedTriangulation,
    corner: usize,
    r: V2,
    l: V2,
    bound_sq: &ExactReal,
    limits: SearchLimits,
    out: &mut Vec<Hit>,
) -> Result<(), SaddleError> {
    if !r.cross(&l).is_positive() {
        return Ok(());
    }
    let a = tri.edge(corner).clone();
    let b = -tri.edge(prev(corner));
    let mut queue = VecDeque::new();
    let push = |q: &mut VecDeque<Wedge>, w: Wedge| -> Result<(), SaddleError> {
        if beyond(&w.a, &w.b, &w.r, &w.l, bound_sq) {
            return Ok(());
        }
        if q.len() >= limits.max_frontier {
            return Err(SaddleError::BoundTooLargeForMemory { frontier: limits.max_frontier });
        }
        q.push_back(w);
        Ok(())
    };
    push(&mut queue, Wedge { tri: corner / 3, edge: next(corner) % 3, a, b, r, l })?;
    while let Some(w) = queue.pop_front() {
        let g = tri.partner(3 * w.tri + w.edge);
        let (u, k) = (g / 3, g % 3);
        // entering u across its edge k, which runs from w.b to w.a
        let e_next = tri.edge(3 * u + (k + 1) % 3);
        let v = &w.a + e_next;
        let cr = w.r.cross(&v).signum();
        let cl = v.cross(&w.l).signum();
        if cr <= 0 {
            // v on or clockwise of r: the whole wedge exits through edge k + 2 (from v to w.b)
            push(&mut queue, Wedge { tri: u, edge: (k + 2) % 3, a: v, b: w.b, r: w.r, l: w.l })?;
        } else if cl <= 0 {
            // v on or counter-clockwise of l: exit through edge k + 1 (from w.a to v)
            push(&mut queue, Wedge { tri: u, edge: (k + 1) % 3, a: w.a, b: v, r: w.r, l: w.l })?;
        } else {
            if v.norm_sq() <= *bound_sq {
                out.push(Hit { v: v.clone(), end_corner: 3 * u + (k + 2) % 3 });
            }
            push(&mut queue, Wedge { tri: u, edge: (k + 1) % 3, a: w.a, b: v.clone(), r: w.r, l: v.clone() })?;
            push(&mut queue, Wedge { tri: u, edge: (k + 2) % 3, a: v.clone(), b: w.b, r: v, l: w.l })?;
        }
    }
    Ok(())
}

fn connection(tri: &MarkedTriangulation, start: usize, hit: Hit) -> SaddleConnection {
    SaddleConnection {
        length_sq: hit.v.norm_sq(),
        holonomy: hit.v,
        start_cone: tri.origin(start),
        start_sector: start,
        end_cone: tri.origin(hit.end_corner),
        end_sector: hit.end_corner,
    }
}

/// All saddle connections leaving corner `corner` with squared length at
/// most `bound_sq`.
pub fn saddles_from_corner(
    tri: &MarkedTriangulation,
    corner: usize,
    bound_sq: &ExactReal,
    limits: SearchLimits,
) -> Result<Vec<SaddleConnection>, SaddleError> {
    let mut hits = Vec::new();
    let e = tri.edge(corner).clone();
    if e.norm_sq() <= *bound_sq {
        hits.push(Hit { v: e.clone(), end_corner: tri.partner(corner) });
    }
    explore_wedge(tri, corner, e, -tri.edge(prev(corner)), bound_sq, limits, &mut hits)?;
    Ok(hits.into_iter().map(|h| connection(tri, corner, h)).collect())
}

/// Deterministic order: length, then angle from the positive x-axis, then start sector.
pub fn canonical_cmp(a: &SaddleConnection, b: &SaddleConnection) -> Ordering {
    a.length_sq
        .cmp(&b.length_sq)
        .then_with(|| a.holonomy.angle_cmp(&b.holonomy))
        .then_with(|| a.start_sector.cmp(&b.start_sector))
}

pub fn saddle_connections_in(
    tri: &MarkedTriangulation,
    bound_sq: &ExactReal,
    limits: SearchLimits,
) -> Result<Vec<SaddleConnection>, SaddleError> {
    let mut all = Vec::new();
    for corner in 0..tri.half_edge_count() {
        all.extend(saddles_from_corner(tri, corner, bound_sq, limits)?);
    }
    all.sort_by(canonical_cmp);
    Ok(all)
}

/// Every oriented saddle connection of length at most `bound`.
pub fn saddle_connections(
    m: &TranslationSurface,
    bound: &ExactReal,
    limits: SearchLimits,
) -> Result<Vec<SaddleConnection>, SaddleError> {
    if !bound.is_positive() {
        return Err(SaddleError::NonpositiveBound);
    }
    saddle_connections_in(&delaunay(m)?, &bound.square(), limits)
}

/// Follows the ray in direction `dir` out of corner `corner` (which must
/// contain `dir`) until it hits a vertex. Returns `None` once the ray passes
/// squared distance `bound_sq` without hitting one.
pub fn trace_ray(
    tri: &MarkedTriangulation,
    corner: usize,
    dir: &V2,
    bound_sq: &ExactReal,
) -> Option<SaddleConnection> {
    let e = tri.edge(corner);
    if e.same_direction(dir) {
        return (e.norm_sq() <= *bound_sq).then(|| connection(tri, corner, Hit { v: e.clone(), end_corner: tri.partner(corner) }));
    }
    let (mut t, mut j) = (corner / 3, next(corner) % 3);
    let mut a = e.clone();
    let mut b = -tri.edge(prev(corner));
    let dir_sq = dir.norm_sq();
    loop {
        // distance along the ray to the edge being crossed
        let d = &b - &a;
        let c = a.cross(&b);
        if &c.square() * &dir_sq > bound_sq * &dir.cross(&d).square() {
            return None;
        }
        let g = tri.partner(3 * t + j);
        let (u, k) = (g / 3, g % 3);
        let v = &a + tri.edge(3 * u + (k + 1) % 3);
        let side = dir.cross(&v).signum();
        if side == 0 {
            if v.norm_sq() > *bound_sq {
                return None;
            }
            return Some(connection(tri, corner, Hit { v, end_corner: 3 * u + (k + 2) % 3 }));
        }
        if side > 0 {
            (t, j, b) = (u, (k + 1) % 3, v);
        } else {
            (t, j, a) = (u, (k + 2) % 3, v);
        }
    }
}

/// Shortest saddle connection.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Systole {
    pub length_sq: ExactReal,
    /// The length itself when its square root is in a quadratic field.
    pub length: Option<ExactReal>,
    pub holonomy: V2,
}

/// The shortest Delaunay edge is a saddle connection, so searching up to
/// its length finds the systole.
pub fn systole(m: &TranslationSurface, limits: SearchLimits) -> Result<Systole, SaddleError> {
    let tri = delaunay(m)?;
    let bound_sq = tri.min_edge_len_sq();
    let all = saddle_connections_in(&tri, &bound_sq, limits)?;
    let first = all.into_iter().next().expect("shortest edge is a saddle connection");
    Ok(Systole { length: first.length_sq.sqrt_exact(), length_sq: first.length_sq, holonomy: first.holonomy })
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ThickPartQuery {
    pub epsilon: ExactReal,
    pub systole_sq: ExactReal,
    pub member: bool,
}

/// Membership in the set of surfaces with no saddle connection shorter than `epsilon`.
pub fn in_thick_part(
    m: &TranslationSurface,
    epsilon: &ExactReal,
    limits: SearchLimits,
) -> Result<ThickPartQuery, SaddleError> {
    let s = systole(m, limits)?;
    let member = epsilon.signum() <= 0 || s.length_sq >= epsilon.square();
    Ok(ThickPartQuery { epsilon: epsilon.clone(), systole_sq: s.length_sq, member })
}

/// Smallest `|v × w| / 2` over non-parallel holonomies within the bound.
pub fn min_virtual_triangle_area(
    m: &TranslationSurface,
    bound: &ExactReal,
    limits: SearchLimits,
) -> Result<ExactReal, SaddleError> {
    let all = saddle_connections(m, bound, limits)?;
    min_triangle_area_of(all.iter().map(|s| &s.holonomy))
}

pub fn min_triangle_area_of<'a>(holonomies: impl IntoIterator<Item = &'a V2>) -> Result<ExactReal, SaddleError> {
    let mut vs: Vec<V2> = Vec::new();
    for v in holonomies {
        // one representative per ±v
        let canon = if v.y.is_negative() || (v.y.is_zero() && v.x.is_negative()) { -v } else { v.clone() };
        if !vs.contains(&canon) {
            vs.push(canon);
        }
    }
    let mut best: Option<ExactReal> = None;
    for i in 0..vs.len() {
        for j in i + 1..vs.len() {
            let c = vs[i].cross(&vs[j]).abs();
            if c.is_zero() {
                continue;
            }
            if best.as_ref().is_none_or(|b| c < *b) {
                best = Some(c);
            }
        }
    }
    best.map(|b| b * ExactReal::from_ratio(1, 2)).ok_or(SaddleError::InsufficientSaddleConnections)
}
