//! Marked triangulations, Delaunay flips, Delaunay cells and canonical codes.
//!
//! Half-edge `h = 3t + i` is edge `i` of triangle `t`, running from corner `i`
//! to corner `i + 1`. The corner at the start of `h` covers the half-open
//! sector from `e(h)` counter-clockwise to `-e(prev(h))`.

use alloc::collections::VecDeque;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::exact::{ExactReal, Field};
use crate::geom::V2;
use crate::sl2::{ExactOrFloat, Mat2};
use crate::surface::{build_surface, PolygonSpec, SurfaceError, SurfaceSpec, TranslationSurface};

#[derive(Clone, Debug, PartialEq)]
pub struct MarkedTriangulation {
    field: Field,
    edges: Vec<[V2; 3]>,
    partner: Vec<usize>,
    origin: Vec<usize>,
    cone_multiples: Vec<u32>,
    delaunay: bool,
}

pub fn next(h: usize) -> usize {
    3 * (h / 3) + (h % 3 + 1) % 3
}

pub fn prev(h: usize) -> usize {
    3 * (h / 3) + (h % 3 + 2) % 3
}

impl MarkedTriangulation {
    /// Fan triangulation of every polygon from its vertex 0.
    pub fn from_surface(m: &TranslationSurface) -> Result<Self, SurfaceError> {
        let ex = m.require_exact()?;
        let mut edges = Vec::new();
        let mut origin = Vec::new();
        // polygon edge -> half-edge
        let mut edge_he: Vec<Vec<usize>> = ex.iter().map(|p| vec![0; p.len()]).collect();
        let mut partner = Vec::new();
        for (pi, p) in ex.iter().enumerate() {
            let n = p.len();
            let mut last_diag: Option<usize> = None;
            for k in 1..n - 1 {
                let t = edges.len();
                edges.push([&p[k] - &p[0], &p[k + 1] - &p[k], &p[0] - &p[k + 1]]);
                origin.extend([m.cone_of_corner(pi, 0), m.cone_of_corner(pi, k), m.cone_of_corner(pi, k + 1)]);
                partner.extend([usize::MAX; 3]);
                edge_he[pi][k] = 3 * t + 1;
                match last_diag {
                    None => edge_he[pi][0] = 3 * t,
                    Some(d) => {
                        partner[d] = 3 * t;
                        partner[3 * t] = d;
                    }
                }
                if k == n - 2 {
                    edge_he[pi][n - 1] = 3 * t + 2;
                }
                last_diag = Some(3 * t + 2);
            }
        }
        for (pi, row) in m.gluings().iter().enumerate() {
            for (k, &(qi, qk)) in row.iter().enumerate() {
                partner[edge_he[pi][k]] = edge_he[qi][qk];
            }
        }
        let cone_multiples = m.cone_points().iter().map(|c| c.angle_multiple).collect();
        Ok(MarkedTriangulation { field: m.field(), edges, partner, origin, cone_multiples, delaunay: false })
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn triangle_count(&self) -> usize {
        self.edges.len()
    }

    pub fn half_edge_count(&self) -> usize {
        self.partner.len()
    }

    pub fn edge(&self, h: usize) -> &V2 {
        &self.edges[h / 3][h % 3]
    }

    pub fn triangle(&self, t: usize) -> &[V2; 3] {
        &self.edges[t]
    }

    pub fn partner(&self, h: usize) -> usize {
        self.partner[h]
    }

    /// Cone point id at the start of half-edge `h`.
    pub fn origin(&self, h: usize) -> usize {
        self.origin[h]
    }

    pub fn cone_count(&self) -> usize {
        self.cone_multiples.len()
    }

    pub fn cone_multiple(&self, cone: usize) -> u32 {
        self.cone_multiples[cone]
    }

    pub fn is_delaunay(&self) -> bool {
        self.delaunay
    }

    /// Next corner counter-clockwise around the same cone point.
    pub fn ccw_corner(&self, h: usize) -> usize {
        self.partner[prev(h)]
    }

    /// Next corner clockwise around the same cone point.
    pub fn cw_corner(&self, h: usize) -> usize {
        next(self.partner[h])
    }

    /// Whether direction `w` lies in the half-open sector of corner `h`.
    pub fn corner_contains(&self, h: usize, w: &V2) -> bool {
        crate::geom::in_sector(self.edge(h), &-self.edge(prev(h)), w)
    }

    /// Exact determinant whose sign tells whether the vertex opposite `h`
    /// across the edge lies inside the circumcircle of `h`'s triangle
    /// (negative: inside).
    pub fn incircle_det(&self, h0: usize) -> ExactReal {
        let g0 = self.partner[h0];
        let b = self.edge(h0).clone();
        let c = -self.edge(prev(h0));
        let d = self.edge(next(g0)).clone();
        let (bb, cc, dd) = (b.norm_sq(), c.norm_sq(), d.norm_sq());
        // det [[bx, by, |b|²], [cx, cy, |c|²], [dx, dy, |d|²]]
        &(&b.cross(&c) * &dd) - &(&(&b.cross(&d) * &cc) - &(&c.cross(&d) * &bb))
    }

    pub fn is_locally_delaunay(&self, h: usize) -> bool {
        !self.incircle_det(h).is_negative()
    }

    /// Whether the quadrilateral around the edge of `h` is strictly convex.
    pub fn is_flippable(&self, h0: usize) -> bool {
        let g0 = self.partner[h0];
        if g0 / 3 == h0 / 3 {
            return false;
        }
        let (h1, h2) = (self.edge(next(h0)), self.edge(prev(h0)));
        let (g1, g2) = (self.edge(next(g0)), self.edge(prev(g0)));
        let mid = -&(g1 + h2);
        g1.cross(&mid).is_positive() && g2.cross(h1).is_positive()
    }

    /// Replaces the diagonal of the quadrilateral around `h0` with the other
    /// diagonal. The two triangles keep their indices.
    pub fn flip(&mut self, h0: usize) {
        let g0 = self.partner[h0];
        let (t, u) = (h0 / 3, g0 / 3);
        let (h1, h2, g1, g2) = (next(h0), prev(h0), next(g0), prev(g0));
        let (eh1, eh2, eg1, eg2) =
            (self.edge(h1).clone(), self.edge(h2).clone(), self.edge(g1).clone(), self.edge(g2).clone());
        let (oa, ob, oc, od) = (self.origin[g1], self.origin[h1], self.origin[h2], self.origin[g2]);
        let mid = -&(&eg1 + &eh2);
        let old = [g1, h2, g2, h1];
        let new = [3 * t, 3 * t + 2, 3 * u, 3 * u + 1];
        let outer: Vec<usize> = old.iter().map(|&x| self.partner[x]).collect();
        self.edges[t] = [eg1, mid.clone(), eh2];
        self.edges[u] = [eg2, eh1, -mid];
        self.origin[3 * t] = oa;
        self.origin[3 * t + 1] = od;
        self.origin[3 * t + 2] = oc;
        self.origin[3 * u] = od;
        self.origin[3 * u + 1] = ob;
        self.origin[3 * u + 2] = oc;
        for (k, &o) in outer.iter().enumerate() {
            let target = match old.iter().position(|&x| x == o) {
                Some(j) => new[j],
                None => o,
            };
            self.partner[new[k]] = target;
            self.partner[target] = new[k];
        }
        self.partner[3 * t + 1] = 3 * u + 2;
        self.partner[3 * u + 2] = 3 * t + 1;
        self.delaunay = false;
    }

    /// Lawson flips until every edge passes the exact empty-circumdisk test.
    pub fn make_delaunay(mut self) -> Self {
        let mut stack: Vec<usize> = (0..self.partner.len()).filter(|&h| h < self.partner[h]).collect();
        while let Some(h) = stack.pop() {
            if self.is_locally_delaunay(h) {
                continue;
            }
            let g = self.partner[h];
            let (t, u) = (h / 3, g / 3);
            self.flip(h);
            for x in [3 * t, 3 * t + 2, 3 * u, 3 * u + 1] {
                stack.push(x.min(self.partner[x]));
            }
        }
        self.delaunay = true;
        self
    }

    pub fn check_delaunay(&self) -> bool {
        (0..self.partner.len()).all(|h| self.is_locally_delaunay(h))
    }

    /// Image under an exact matrix with positive determinant. The Delaunay
    /// flag is dropped since `A` need not be conformal.
    pub fn transformed(&self, a: &Mat2) -> Result<Self, SurfaceError> {
        match a.det()? {
            ExactOrFloat::Exact(d) if d.is_positive() => {}
            ExactOrFloat::Exact(_) => return Err(SurfaceError::SingularMatrix),
            ExactOrFloat::Float(_) => return Err(SurfaceError::FloatModeUnsupported),
        }
        let field = a.field()?.unwrap_or(Field::Rational).join(self.field)?;
        let mut edges = Vec::with_capacity(self.edges.len());
        for tri in &self.edges {
            let mut out = [V2::zero(), V2::zero(), V2::zero()];
            for (k, v) in tri.iter().enumerate() {
                let (x, y) = a.apply_exact(&(v.x.clone(), v.y.clone()))?;
                out[k] = V2::new(x, y);
            }
            edges.push(out);
        }
        Ok(MarkedTriangulation { field, edges, delaunay: false, ..self.clone() })
    }

    /// Builds a triangulation directly from triangle edge vectors and a
    /// half-edge pairing; cone points are recomputed.
    pub fn from_parts(field: Field, edges: Vec<[V2; 3]>, partner: Vec<usize>) -> Result<Self, SurfaceError> {
        let tri = MarkedTriangulation {
            field,
            edges,
            partner,
            origin: Vec::new(),
            cone_multiples: Vec::new(),
            delaunay: false,
        };
        MarkedTriangulation::from_surface(&tri.to_surface()?)
    }

    /// The triangles as a glued-polygon surface, triangle `t` named `t{t}`
    /// and placed with corner 0 at the origin.
    pub fn to_surface(&self) -> Result<TranslationSurface, SurfaceError> {
        let polygons = self
            .edges
            .iter()
            .enumerate()
            .map(|(t, e)| PolygonSpec { name: format!("t{t}"), vertices: vec![V2::zero(), e[0].clone(), &e[0] + &e[1]] })
            .collect();
        let gluings = (0..self.partner.len())
            .filter(|&h| h < self.partner[h])
            .map(|h| {
                let g = self.partner[h];
                ((h / 3, h % 3), (g / 3, g % 3))
            })
            .collect();
        build_surface(&SurfaceSpec { field: self.field, polygons, gluings, triangulate: false })
    }

    /// Shortest edge, squared.
    pub fn min_edge_len_sq(&self) -> ExactReal {
        self.edges.iter().flatten().map(V2::norm_sq).min().expect("nonempty triangulation")
    }

    /// Delaunay cells: maximal unions of triangles across cocircular edges,
    /// each given by its boundary half-edges in counter-clockwise order.
    pub fn delaunay_cells(&self) -> Vec<Vec<usize>> {
        let nh = self.partner.len();
        let internal: Vec<bool> = (0..nh).map(|h| self.incircle_det(h).is_zero()).collect();
        let mut visited = vec![false; nh];
        let mut cells = Vec::new();
        for start in 0..nh {
            if internal[start] || visited[start] {
                continue;
            }
            let mut cyc = Vec::new();
            let mut h = start;
            loop {
                visited[h] = true;
                cyc.push(h);
                let mut x = next(h);
                while internal[x] {
                    x = next(self.partner[x]);
                }
                h = x;
                if h == start {
                    break;
                }
            }
            cells.push(cyc);
        }
        cells
    }

    /// Lexicographically minimal breadth-first code of the Delaunay cell
    /// decomposition over all starting (cell, edge) flags. Two Delaunay
    /// triangulations have equal codes iff their surfaces are translation
    /// equivalent with matching cone-point sets.
    pub fn canonical_code(&self) -> Vec<CodeToken> {
        let cells = self.delaunay_cells();
        let mut where_is = vec![(usize::MAX, 0usize); self.partner.len()];
        for (c, cyc) in cells.iter().enumerate() {
            for (k, &h) in cyc.iter().enumerate() {
                where_is[h] = (c, k);
            }
        }
        let mut best: Option<Vec<CodeToken>> = None;
        for (c0, cyc) in cells.iter().enumerate() {
            for k0 in 0..cyc.len() {
                let code = self.bfs_code(&cells, &where_is, c0, k0, best.as_deref());
                if let Some(code) = code {
                    best = Some(code);
                }
            }
        }
        best.unwrap_or_default()
    }

    /// Code from one flag, or `None` once it is known to exceed `bound`.
    fn bfs_code(
        &self,
        cells: &[Vec<usize>],
        where_is: &[(usize, usize)],
        c0: usize,
        k0: usize,
        bound: Option<&[CodeToken]>,
    ) -> Option<Vec<CodeToken>> {
        let mut index = vec![usize::MAX; cells.len()];
        let mut offset = vec![0usize; cells.len()];
        let mut queue = VecDeque::new();
        index[c0] = 0;
        offset[c0] = k0;
        queue.push_back(c0);
        let mut count = 1;
        let mut code = Vec::new();
        let mut tied = bound.is_some();
        let mut emit = |code: &mut Vec<CodeToken>, tok: CodeToken| -> bool {
            if tied {
                let b = bound.expect("bound");
                match tok.cmp(&b[code.len()]) {
                    core::cmp::Ordering::Less => tied = false,
                    core::cmp::Ordering::Greater => return false,
                    core::cmp::Ordering::Equal => {}
                }
            }
            code.push(tok);
            true
        };
        while let Some(c) = queue.pop_front() {
            let cyc = &cells[c];
            let n = cyc.len();
            if !emit(&mut code, CodeToken::Size(n)) {
                return None;
            }
            for s in 0..n {
                let h = cyc[(offset[c] + s) % n];
                let v = self.edge(h);
                let (c2, pos2) = where_is[self.partner[h]];
                if index[c2] == usize::MAX {
                    index[c2] = count;
                    offset[c2] = pos2;
                    count += 1;
                    queue.push_back(c2);
                }
                let n2 = cells[c2].len();
                let toks = [
                    CodeToken::Vector(v.x.clone(), v.y.clone()),
                    CodeToken::Cell(index[c2]),
                    CodeToken::Offset((pos2 + n2 - offset[c2]) % n2),
                ];
                for tok in toks {
                    if !emit(&mut code, tok) {
                        return None;
                    }
                }
            }
        }
        if tied {
            // equal to the current best: keep the best
            return None;
        }
        Some(code)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CodeToken {
    Size(usize),
    Vector(ExactReal, ExactReal),
    Cell(usize),
    Offset(usize),
}

/// Glues triangles given by edge vectors and a half-edge pairing into a
/// surface, triangle `t` named `t{t}`.
pub fn surface_from_triangles(
    field: Field,
    edges: Vec<[V2; 3]>,
    partner: Vec<usize>,
) -> Result<TranslationSurface, SurfaceError> {
    MarkedTriangulation { field, edges, partner, origin: Vec::new(), cone_multiples: Vec::new(), delaunay: false }
        .to_surface()
}

/// Delaunay triangulation by Lawson flips (exact coordinates only).
pub fn delaunay(m: &TranslationSurface) -> Result<MarkedTriangulation, SurfaceError> {
    Ok(MarkedTriangulation::from_surface(m)?.make_delaunay())
}

/// Translation equivalence via canonical Delaunay codes.
pub fn equivalent(m1: &TranslationSurface, m2: &TranslationSurface) -> Result<bool, SurfaceError> {
    m1.require_exact()?;
    m2.require_exact()?;
    m1.field().join(m2.field()).map_err(|_| SurfaceError::FieldMismatch { declared: m1.field(), found: m2.field() })?;
    if m1.area_exact()? != m2.area_exact()? || m1.stratum_signature() != m2.stratum_signature() {
        return Ok(false);
    }
    Ok(delaunay(m1)?.canonical_code() == delaunay(m2)?.canonical_code())
}
