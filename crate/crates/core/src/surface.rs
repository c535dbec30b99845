//! Translation surfaces presented as convex polygons glued by translations.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::exact::{ArithError, ExactReal, Field};
use crate::geom::{cross_f, V2};
use crate::sl2::{ExactOrFloat, Mat2};

/// `(polygon, edge)`; edge `k` runs from vertex `k` to vertex `k + 1`.
pub type EdgeRef = (usize, usize);

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PolygonSpec {
    pub name: String,
    pub vertices: Vec<V2>,
}

/// Unvalidated description of a surface.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfaceSpec {
    pub field: Field,
    pub polygons: Vec<PolygonSpec>,
    pub gluings: Vec<(EdgeRef, EdgeRef)>,
    /// Ear-clip every polygon first, so simple non-convex polygons are accepted.
    pub triangulate: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SurfaceError {
    TooFewVertices { polygon: usize },
    NonConvexPolygon { polygon: usize },
    NotSimplePolygon { polygon: usize },
    DuplicateName { polygon: usize },
    FieldMismatch { declared: Field, found: Field },
    EdgeOutOfRange { glue: usize },
    SelfGluedEdge { glue: usize },
    EdgeGluedTwice { glue: usize },
    GluingMismatch { glue: usize },
    Unglued { polygon: usize, edge: usize },
    Disconnected,
    NoPolygons,
    GaussBonnet,
    SingularMatrix,
    FloatModeUnsupported,
    Arith(ArithError),
}

impl fmt::Display for SurfaceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use SurfaceError::*;
        match self {
            TooFewVertices { polygon } => write!(f, "polygon {polygon} has fewer than 3 vertices"),
            NonConvexPolygon { polygon } => {
                write!(f, "polygon {polygon} is not strictly convex and counter-clockwise")
            }
            NotSimplePolygon { polygon } => write!(f, "polygon {polygon} cannot be triangulated"),
            DuplicateName { polygon } => write!(f, "polygon {polygon} reuses an earlier name"),
            FieldMismatch { declared, found } => {
                write!(f, "coordinate in {found} does not belong to declared field {declared}")
            }
            EdgeOutOfRange { glue } => write!(f, "gluing {glue} names a missing polygon or edge"),
            SelfGluedEdge { glue } => write!(f, "gluing {glue} glues an edge to itself"),
            EdgeGluedTwice { glue } => write!(f, "gluing {glue} reuses an edge that is already glued"),
            GluingMismatch { glue } => write!(f, "gluing {glue} pairs edges whose vectors are not opposite"),
            Unglued { polygon, edge } => write!(f, "edge {edge} of polygon {polygon} is not glued"),
            Disconnected => f.write_str("gluings leave the surface disconnected"),
            NoPolygons => f.write_str("surface has no polygons"),
            GaussBonnet => f.write_str("cone orders violate the Gauss-Bonnet relation"),
            SingularMatrix => f.write_str("matrix is singular"),
            FloatModeUnsupported => f.write_str("operation needs exact coordinates"),
            Arith(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for SurfaceError {}

impl From<ArithError> for SurfaceError {
    fn from(e: ArithError) -> Self {
        SurfaceError::Arith(e)
    }
}

/// A vertex class of the glued surface.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConePoint {
    /// Incident corners `(polygon, vertex)` in counter-clockwise order.
    pub corners: Vec<(usize, usize)>,
    /// Cone angle divided by 2π.
    pub angle_multiple: u32,
}

impl ConePoint {
    pub fn order(&self) -> u32 {
        self.angle_multiple - 1
    }
}

/// Positive cone orders, descending, and the number of order-0 points.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StratumSignature {
    pub orders: Vec<u32>,
    pub marked_points: usize,
}

impl fmt::Display for StratumSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("H(")?;
        for (i, o) in self.orders.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{o}")?;
        }
        f.write_str(")")?;
        if self.marked_points > 0 {
            write!(f, " + {} marked", self.marked_points)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TranslationSurface {
    names: Vec<String>,
    exact: Option<Vec<Vec<V2>>>,
    float: Vec<Vec<[f64; 2]>>,
    gluing: Vec<Vec<EdgeRef>>,
    field: Field,
    cones: Vec<ConePoint>,
    corner_cone: Vec<Vec<usize>>,
    genus: u32,
}

fn prev(j: usize, n: usize) -> usize {
    (j + n - 1) % n
}

fn strictly_convex(vs: &[V2]) -> bool {
    let n = vs.len();
    (0..n).all(|k| {
        let e0 = &vs[(k + 1) % n] - &vs[k];
        let e1 = &vs[(k + 2) % n] - &vs[(k + 1) % n];
        e0.cross(&e1).is_positive()
    })
}

/// Ear clipping. Returns triangles as vertex index triples and, per
/// triangle edge, either `Ok(original edge)` or `Err(diagonal id)`.
#[allow(clippy::type_complexity)]
fn ear_clip(vs: &[V2]) -> Option<Vec<([usize; 3], [Result<usize, usize>; 3])>> {
    let twice_area = (0..vs.len()).fold(ExactReal::zero(), |acc, k| acc + vs[k].cross(&vs[(k + 1) % vs.len()]));
    if !twice_area.is_positive() {
        return None;
    }
    // current polygon: vertex ids and the origin tag of the edge leaving each
    let mut ring: Vec<usize> = (0..vs.len()).collect();
    let mut tags: Vec<Result<usize, usize>> = (0..vs.len()).map(Ok).collect();
    let mut out = Vec::new();
    let mut next_diag = 0;
    while ring.len() > 3 {
        let m = ring.len();
        let ear = (0..m).find(|&k| {
            let (p, i, n) = (&vs[ring[prev(k, m)]], &vs[ring[k]], &vs[ring[(k + 1) % m]]);
            if !(i - p).cross(&(n - i)).is_positive() {
                return false;
            }
            ring.iter().all(|&o| {
                if o == ring[prev(k, m)] || o == ring[k] || o == ring[(k + 1) % m] {
                    return true;
                }
                let w = &vs[o];
                let c0 = (i - p).cross(&(w - p)).signum();
                let c1 = (n - i).cross(&(w - i)).signum();
                let c2 = (p - n).cross(&(w - n)).signum();
                c0 < 0 || c1 < 0 || c2 < 0
            })
        })?;
        let pk = prev(ear, m);
        let diag = next_diag;
        next_diag += 1;
        out.push(([ring[pk], ring[ear], ring[(ear + 1) % m]], [tags[pk], tags[ear], Err(diag)]));
        tags[pk] = Err(diag);
        ring.remove(ear);
        let _ = tags.remove(ear);
    }
    out.push(([ring[0], ring[1], ring[2]], [tags[0], tags[1], tags[2]]));
    if out.iter().any(|(t, _)| !(&vs[t[1]] - &vs[t[0]]).cross(&(&vs[t[2]] - &vs[t[1]])).is_positive()) {
        return None;
    }
    Some(out)
}

fn triangulate_spec(spec: &SurfaceSpec) -> Result<SurfaceSpec, SurfaceError> {
    let mut polygons = Vec::new();
    // (polygon, original edge) -> new edge ref
    let mut edge_map: BTreeMap<(usize, usize), EdgeRef> = BTreeMap::new();
    let mut internal = Vec::new();
    for (pi, poly) in spec.polygons.iter().enumerate() {
        if poly.vertices.len() < 3 {
            return Err(SurfaceError::TooFewVertices { polygon: pi });
        }
        let tris = ear_clip(&poly.vertices).ok_or(SurfaceError::NotSimplePolygon { polygon: pi })?;
        if tris.len() == 1 {
            edge_map.extend((0..poly.vertices.len()).map(|k| ((pi, k), (polygons.len(), k))));
            polygons.push(poly.clone());
            continue;
        }
        let mut diag_ends: BTreeMap<usize, Vec<EdgeRef>> = BTreeMap::new();
        for (ti, (idx, tags)) in tris.iter().enumerate() {
            let new = polygons.len();
            polygons.push(PolygonSpec {
                name: alloc::format!("{}.t{}", poly.name, ti),
                vertices: idx.iter().map(|&k| poly.vertices[k].clone()).collect(),
            });
            for (e, tag) in tags.iter().enumerate() {
                match tag {
                    Ok(k) => {
                        edge_map.insert((pi, *k), (new, e));
                    }
                    Err(d) => diag_ends.entry(*d).or_default().push((new, e)),
                }
            }
        }
        for ends in diag_ends.into_values() {
            internal.push((ends[0], ends[1]));
        }
    }
    let mut gluings = Vec::with_capacity(spec.gluings.len() + internal.len());
    for (g, &(a, b)) in spec.gluings.iter().enumerate() {
        let a = *edge_map.get(&a).ok_or(SurfaceError::EdgeOutOfRange { glue: g })?;
        let b = *edge_map.get(&b).ok_or(SurfaceError::EdgeOutOfRange { glue: g })?;
        gluings.push((a, b));
    }
    gluings.extend(internal);
    Ok(SurfaceSpec { field: spec.field, polygons, gluings, triangulate: false })
}

/// Validates a surface description and computes its cone points.
pub fn build_surface(spec: &SurfaceSpec) -> Result<TranslationSurface, SurfaceError> {
    if spec.triangulate {
        return build_surface(&triangulate_spec(spec)?);
    }
    if spec.polygons.is_empty() {
        return Err(SurfaceError::NoPolygons);
    }
    let mut seen_names = BTreeMap::new();
    for (pi, poly) in spec.polygons.iter().enumerate() {
        if seen_names.insert(poly.name.clone(), pi).is_some() {
            return Err(SurfaceError::DuplicateName { polygon: pi });
        }
        if poly.vertices.len() < 3 {
            return Err(SurfaceError::TooFewVertices { polygon: pi });
        }
        for v in &poly.vertices {
            for c in [&v.x, &v.y] {
                if !spec.field.contains(c.field()) {
                    return Err(SurfaceError::FieldMismatch { declared: spec.field, found: c.field() });
                }
            }
        }
        if !strictly_convex(&poly.vertices) {
            return Err(SurfaceError::NonConvexPolygon { polygon: pi });
        }
    }
    let mut gluing: Vec<Vec<Option<EdgeRef>>> = spec.polygons.iter().map(|p| vec![None; p.vertices.len()]).collect();
    for (g, &(a, b)) in spec.gluings.iter().enumerate() {
        let ok = |e: EdgeRef| e.0 < spec.polygons.len() && e.1 < spec.polygons[e.0].vertices.len();
        if !ok(a) || !ok(b) {
            return Err(SurfaceError::EdgeOutOfRange { glue: g });
        }
        if a == b {
            return Err(SurfaceError::SelfGluedEdge { glue: g });
        }
        if gluing[a.0][a.1].is_some() || gluing[b.0][b.1].is_some() {
            return Err(SurfaceError::EdgeGluedTwice { glue: g });
        }
        let edge = |e: EdgeRef| {
            let vs = &spec.polygons[e.0].vertices;
            &vs[(e.1 + 1) % vs.len()] - &vs[e.1]
        };
        if edge(a) != -edge(b) {
            return Err(SurfaceError::GluingMismatch { glue: g });
        }
        gluing[a.0][a.1] = Some(b);
        gluing[b.0][b.1] = Some(a);
    }
    let mut full = Vec::with_capacity(gluing.len());
    for (pi, row) in gluing.into_iter().enumerate() {
        let mut out = Vec::with_capacity(row.len());
        for (k, e) in row.into_iter().enumerate() {
            out.push(e.ok_or(SurfaceError::Unglued { polygon: pi, edge: k })?);
        }
        full.push(out);
    }
    let exact: Vec<Vec<V2>> = spec.polygons.iter().map(|p| p.vertices.clone()).collect();
    let names = spec.polygons.iter().map(|p| p.name.clone()).collect();
    TranslationSurface::assemble(names, Some(exact), None, full, spec.field, None)
}

impl TranslationSurface {
    fn assemble(
        names: Vec<String>,
        exact: Option<Vec<Vec<V2>>>,
        float: Option<Vec<Vec<[f64; 2]>>>,
        gluing: Vec<Vec<EdgeRef>>,
        field: Field,
        known_multiples: Option<&dyn Fn(&[(usize, usize)]) -> u32>,
    ) -> Result<Self, SurfaceError> {
        let float = match float {
            Some(f) => f,
            None => exact
                .as_ref()
                .expect("exact or float coordinates")
                .iter()
                .map(|p| p.iter().map(V2::to_f64).collect())
                .collect(),
        };
        // connectivity
        let np = gluing.len();
        let mut seen = vec![false; np];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(p) = stack.pop() {
            for &(q, _) in &gluing[p] {
                if !seen[q] {
                    seen[q] = true;
                    stack.push(q);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(SurfaceError::Disconnected);
        }
        // vertex classes: the next corner counter-clockwise of (i, j) is partner(i, j - 1)
        let mut corner_cone: Vec<Vec<usize>> = gluing.iter().map(|r| vec![usize::MAX; r.len()]).collect();
        let mut cones = Vec::new();
        for i in 0..np {
            for j in 0..gluing[i].len() {
                if corner_cone[i][j] != usize::MAX {
                    continue;
                }
                let id = cones.len();
                let mut corners = Vec::new();
                let (mut ci, mut cj) = (i, j);
                loop {
                    corner_cone[ci][cj] = id;
                    corners.push((ci, cj));
                    let n = gluing[ci].len();
                    let (ni, nj) = gluing[ci][prev(cj, n)];
                    (ci, cj) = (ni, nj);
                    if (ci, cj) == (i, j) {
                        break;
                    }
                }
                let angle_multiple = match (&exact, known_multiples) {
                    (_, Some(f)) => f(&corners),
                    (Some(ex), None) => wrap_count_exact(ex, &corners),
                    (None, None) => wrap_count_float(&float, &corners),
                };
                cones.push(ConePoint { corners, angle_multiple });
            }
        }
        let v = cones.len() as i64;
        let e = gluing.iter().map(Vec::len).sum::<usize>() as i64 / 2;
        let f = np as i64;
        let chi = v - e + f;
        if chi > 2 || chi % 2 != 0 {
            return Err(SurfaceError::GaussBonnet);
        }
        let genus = ((2 - chi) / 2) as u32;
        let order_sum: i64 = cones.iter().map(|c| c.angle_multiple as i64 - 1).sum();
        if cones.iter().any(|c| c.angle_multiple == 0) || order_sum != 2 * genus as i64 - 2 {
            return Err(SurfaceError::GaussBonnet);
        }
        Ok(TranslationSurface { names, exact, float, gluing, field, cones, corner_cone, genus })
    }

    pub fn polygon_count(&self) -> usize {
        self.gluing.len()
    }

    pub fn polygon_name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn vertex_count(&self, i: usize) -> usize {
        self.gluing[i].len()
    }

    /// Exact vertex lists, absent in float mode.
    pub fn exact_polygons(&self) -> Option<&[Vec<V2>]> {
        self.exact.as_deref()
    }

    pub fn require_exact(&self) -> Result<&[Vec<V2>], SurfaceError> {
        self.exact_polygons().ok_or(SurfaceError::FloatModeUnsupported)
    }

    pub fn float_polygons(&self) -> &[Vec<[f64; 2]>] {
        &self.float
    }

    pub fn is_float_mode(&self) -> bool {
        self.exact.is_none()
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn partner(&self, e: EdgeRef) -> EdgeRef {
        self.gluing[e.0][e.1]
    }

    pub fn gluings(&self) -> &[Vec<EdgeRef>] {
        &self.gluing
    }

    /// Each glued pair once, smaller edge first.
    pub fn gluing_pairs(&self) -> Vec<(EdgeRef, EdgeRef)> {
        let mut out = Vec::new();
        for (i, row) in self.gluing.iter().enumerate() {
            for (j, &b) in row.iter().enumerate() {
                if (i, j) < b {
                    out.push(((i, j), b));
                }
            }
        }
        out
    }

    pub fn edge_vector(&self, e: EdgeRef) -> Option<V2> {
        let vs = &self.exact.as_ref()?[e.0];
        Some(&vs[(e.1 + 1) % vs.len()] - &vs[e.1])
    }

    pub fn edge_vector_f64(&self, e: EdgeRef) -> [f64; 2] {
        let vs = &self.float[e.0];
        let (a, b) = (vs[e.1], vs[(e.1 + 1) % vs.len()]);
        [b[0] - a[0], b[1] - a[1]]
    }

    pub fn cone_points(&self) -> &[ConePoint] {
        &self.cones
    }

    /// Index into [`Self::cone_points`] of the cone at corner `(polygon, vertex)`.
    pub fn cone_of_corner(&self, i: usize, j: usize) -> usize {
        self.corner_cone[i][j]
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn stratum_signature(&self) -> StratumSignature {
        let mut orders: Vec<u32> = self.cones.iter().map(ConePoint::order).filter(|&o| o > 0).collect();
        orders.sort_by(|a, b| b.cmp(a));
        let marked_points = self.cones.iter().filter(|c| c.order() == 0).count();
        StratumSignature { orders, marked_points }
    }

    pub fn area(&self) -> ExactOrFloat {
        match &self.exact {
            Some(ex) => ExactOrFloat::Exact(ex.iter().fold(ExactReal::zero(), |acc, p| acc + polygon_area(p))),
            None => ExactOrFloat::Float(self.float.iter().map(|p| polygon_area_f64(p)).sum()),
        }
    }

    pub fn area_exact(&self) -> Result<ExactReal, SurfaceError> {
        match self.area() {
            ExactOrFloat::Exact(a) => Ok(a),
            ExactOrFloat::Float(_) => Err(SurfaceError::FloatModeUnsupported),
        }
    }

    /// Post-composes the charts with `a`. An orientation-reversing matrix
    /// reverses each vertex list so polygons stay counter-clockwise.
    pub fn apply_matrix(&self, a: &Mat2) -> Result<TranslationSurface, SurfaceError> {
        let det = a.det()?;
        let reverse = match &det {
            ExactOrFloat::Exact(d) if d.is_zero() => return Err(SurfaceError::SingularMatrix),
            ExactOrFloat::Float(d) if *d == 0.0 || !d.is_finite() => return Err(SurfaceError::SingularMatrix),
            ExactOrFloat::Exact(d) => d.is_negative(),
            ExactOrFloat::Float(d) => *d < 0.0,
        };
        let reindex = |n: usize, j: usize| if reverse { (n - j) % n } else { j };
        let re_edge = |n: usize, k: usize| if reverse { n - 1 - k } else { k };
        let gluing: Vec<Vec<EdgeRef>> = (0..self.gluing.len())
            .map(|i| {
                let n = self.gluing[i].len();
                (0..n)
                    .map(|k| {
                        let (pi, pk) = self.gluing[i][re_edge(n, k)];
                        (pi, re_edge(self.gluing[pi].len(), pk))
                    })
                    .collect()
            })
            .collect();
        let old_cones = &self.cones;
        let old_corner = &self.corner_cone;
        let multiples = |corners: &[(usize, usize)]| {
            let (i, j) = corners[0];
            old_cones[old_corner[i][reindex(old_corner[i].len(), j)]].angle_multiple
        };
        match (&self.exact, a) {
            (Some(ex), Mat2::Exact(_)) => {
                let field = a.field()?.unwrap_or(Field::Rational).join(self.field)?;
                let mut out = Vec::with_capacity(ex.len());
                for p in ex {
                    let n = p.len();
                    let mut q = Vec::with_capacity(n);
                    for j in 0..n {
                        let v = &p[reindex(n, j)];
                        let (x, y) = a.apply_exact(&(v.x.clone(), v.y.clone()))?;
                        q.push(V2::new(x, y));
                    }
                    out.push(q);
                }
                Self::assemble(self.names.clone(), Some(out), None, gluing, field, Some(&multiples))
            }
            _ => {
                let fl = self
                    .float
                    .iter()
                    .map(|p| {
                        let n = p.len();
                        (0..n).map(|j| a.apply_f64(p[reindex(n, j)])).collect()
                    })
                    .collect();
                Self::assemble(self.names.clone(), None, Some(fl), gluing, self.field, Some(&multiples))
            }
        }
    }

    /// Exact-mode copy with every vertex list rotated so vertex `shift[i]`
    /// comes first, and polygons permuted by `order`. Used to test
    /// relabeling invariance.
    pub fn relabeled(&self, order: &[usize], shift: &[usize]) -> Result<TranslationSurface, SurfaceError> {
        let ex = self.require_exact()?;
        let np = ex.len();
        let mut new_index = vec![0; np];
        for (new, &old) in order.iter().enumerate() {
            new_index[old] = new;
        }
        let polygons = order
            .iter()
            .map(|&old| {
                let n = ex[old].len();
                PolygonSpec {
                    name: self.names[old].clone(),
                    vertices: (0..n).map(|j| ex[old][(j + shift[old]) % n].clone()).collect(),
                }
            })
            .collect();
        let map_edge = |(p, k): EdgeRef| {
            let n = ex[p].len();
            (new_index[p], (k + n - shift[p] % n) % n)
        };
        let gluings = self.gluing_pairs().into_iter().map(|(a, b)| (map_edge(a), map_edge(b))).collect();
        build_surface(&SurfaceSpec { field: self.field, polygons, gluings, triangulate: false })
    }

    /// The validated description this surface was built from (exact mode).
    pub fn to_spec(&self) -> Result<SurfaceSpec, SurfaceError> {
        let ex = self.require_exact()?;
        Ok(SurfaceSpec {
            field: self.field,
            polygons: ex
                .iter()
                .zip(&self.names)
                .map(|(v, n)| PolygonSpec { name: n.clone(), vertices: v.clone() })
                .collect(),
            gluings: self.gluing_pairs(),
            triangulate: false,
        })
    }

    /// Largest distance between two vertices of one polygon, in floating
    /// point; a cheap size scale for search bounds.
    pub fn diameter_proxy(&self) -> f64 {
        let mut best = 0.0f64;
        for p in &self.float {
            for a in p {
                for b in p {
                    best = best.max(libm::hypot(a[0] - b[0], a[1] - b[1]));
                }
            }
        }
        best
    }
}

fn wrap_count_exact(ex: &[Vec<V2>], corners: &[(usize, usize)]) -> u32 {
    let out = |&(i, j): &(usize, usize)| {
        let p = &ex[i];
        &p[(j + 1) % p.len()] - &p[j]
    };
    let dirs: Vec<V2> = corners.iter().map(out).collect();
    let n = dirs.len();
    (0..n).filter(|&k| dirs[(k + 1) % n].angle_cmp(&dirs[k]) != Ordering::Greater).count() as u32
}

fn wrap_count_float(fl: &[Vec<[f64; 2]>], corners: &[(usize, usize)]) -> u32 {
    let total: f64 = corners
        .iter()
        .map(|&(i, j)| {
            let p = &fl[i];
            let n = p.len();
            let a = [p[(j + 1) % n][0] - p[j][0], p[(j + 1) % n][1] - p[j][1]];
            let b = [p[prev(j, n)][0] - p[j][0], p[prev(j, n)][1] - p[j][1]];
            libm::atan2(cross_f(a, b), a[0] * b[0] + a[1] * b[1])
        })
        .sum();
    libm::round(total / (2.0 * core::f64::consts::PI)) as u32
}

pub fn polygon_area(p: &[V2]) -> ExactReal {
    let n = p.len();
    let twice = (0..n).fold(ExactReal::zero(), |acc, k| acc + p[k].cross(&p[(k + 1) % n]));
    twice * ExactReal::from_ratio(1, 2)
}

pub fn polygon_area_f64(p: &[[f64; 2]]) -> f64 {
    let n = p.len();
    (0..n).map(|k| cross_f(p[k], p[(k + 1) % n])).sum::<f64>() / 2.0
}
