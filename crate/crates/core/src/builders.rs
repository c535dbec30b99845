//! Named surfaces: torus, regular octagon, golden L, origamis, perturbed L.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::exact::{ArithError, ExactReal, Field};
use crate::geom::V2;
use crate::surface::{build_surface, PolygonSpec, SurfaceError, SurfaceSpec, TranslationSurface};

#[derive(Clone, Debug, PartialEq)]
pub enum BuilderError {
    UnknownBuilder(String),
    BadArgument { builder: &'static str, reason: String },
    Surface(SurfaceError),
}

impl fmt::Display for BuilderError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BuilderError::UnknownBuilder(n) => write!(f, "unknown builder `{n}`"),
            BuilderError::BadArgument { builder, reason } => write!(f, "{builder}: {reason}"),
            BuilderError::Surface(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for BuilderError {}

impl From<SurfaceError> for BuilderError {
    fn from(e: SurfaceError) -> Self {
        BuilderError::Surface(e)
    }
}

fn q(s: &str) -> ExactReal {
    s.parse().expect("builder literal")
}

fn rect(name: &str, x0: &ExactReal, y0: &ExactReal, x1: &ExactReal, y1: &ExactReal) -> PolygonSpec {
    PolygonSpec {
        name: name.to_string(),
        vertices: vec![
            V2::new(x0.clone(), y0.clone()),
            V2::new(x1.clone(), y0.clone()),
            V2::new(x1.clone(), y1.clone()),
            V2::new(x0.clone(), y1.clone()),
        ],
    }
}

// rectangle edges
const BOTTOM: usize = 0;
const RIGHT: usize = 1;
const TOP: usize = 2;
const LEFT: usize = 3;

/// Unit square with opposite sides glued.
pub fn torus() -> TranslationSurface {
    let (z, o) = (ExactReal::zero(), ExactReal::one());
    let spec = SurfaceSpec {
        field: Field::Rational,
        polygons: vec![rect("sq", &z, &z, &o, &o)],
        gluings: vec![((0, BOTTOM), (0, TOP)), ((0, RIGHT), (0, LEFT))],
        triangulate: false,
    };
    build_surface(&spec).expect("torus")
}

/// Regular octagon with side 1, edge `i` glued to edge `i + 4`.
pub fn octagon() -> TranslationSurface {
    let s = q("0+1/2*sqrt(2)");
    let (z, o) = (ExactReal::zero(), ExactReal::one());
    let o_s = &o + &s;
    let o_2s = &o_s + &s;
    let vertices = vec![
        V2::new(z.clone(), z.clone()),
        V2::new(o.clone(), z.clone()),
        V2::new(o_s.clone(), s.clone()),
        V2::new(o_s.clone(), o_s.clone()),
        V2::new(o.clone(), o_2s.clone()),
        V2::new(z.clone(), o_2s),
        V2::new(-&s, o_s),
        V2::new(-&s, s),
    ];
    let spec = SurfaceSpec {
        field: Field::Sqrt(2),
        polygons: vec![PolygonSpec { name: "oct".into(), vertices }],
        gluings: (0..4).map(|i| ((0, i), (0, i + 4))).collect(),
        triangulate: false,
    };
    build_surface(&spec).expect("octagon")
}

/// L-shaped table made of a unit square `A`, a right arm `B = [1, 1 + w] × [0, 1]`
/// and an upper arm `C = [0, 1] × [1, 1 + h]`, with opposite sides glued.
fn l_table(w: &ExactReal, h: &ExactReal, field: Field) -> Result<TranslationSurface, SurfaceError> {
    let (z, o) = (ExactReal::zero(), ExactReal::one());
    let xw = &o + w;
    let yh = &o + h;
    let spec = SurfaceSpec {
        field,
        polygons: vec![rect("A", &z, &z, &o, &o), rect("B", &o, &z, &xw, &o), rect("C", &z, &o, &o, &yh)],
        gluings: vec![
            ((0, RIGHT), (1, LEFT)),
            ((1, RIGHT), (0, LEFT)),
            ((0, TOP), (2, BOTTOM)),
            ((2, TOP), (0, BOTTOM)),
            ((1, TOP), (1, BOTTOM)),
            ((2, RIGHT), (2, LEFT)),
        ],
        triangulate: false,
    };
    build_surface(&spec)
}

/// The golden L: vertices (0,0),(φ,0),(φ,1),(1,1),(1,φ),(0,φ), opposite sides glued.
pub fn golden_l() -> TranslationSurface {
    let arm = q("-1/2+1/2*sqrt(5)");
    l_table(&arm, &arm, Field::Sqrt(5)).expect("golden L")
}

/// Three-square L with the right arm widened by `eps_x` and the upper arm
/// lengthened by `eps_y`; both zero gives the square-tiled L.
pub fn perturbed_l(eps_x: &ExactReal, eps_y: &ExactReal) -> Result<TranslationSurface, BuilderError> {
    let field = eps_x.field().join(eps_y.field()).map_err(|e| bad("perturbed-l", e))?;
    let w = ExactReal::one() + eps_x;
    let h = ExactReal::one() + eps_y;
    if !w.is_positive() || !h.is_positive() {
        return Err(BuilderError::BadArgument { builder: "perturbed-l", reason: "arm sizes must stay positive".into() });
    }
    Ok(l_table(&w, &h, field)?)
}

/// The three-square L with its upper cylinder stretched vertically by √2.
pub fn stretched_l() -> TranslationSurface {
    perturbed_l(&ExactReal::zero(), &q("-1+1*sqrt(2)")).expect("stretched L")
}

fn bad(builder: &'static str, e: ArithError) -> BuilderError {
    BuilderError::BadArgument { builder, reason: e.to_string() }
}

/// A permutation of `{0, .., n-1}` as an image table.
pub type Perm = Vec<usize>;

/// Parses cycle notation with 1-based labels, e.g. `(1,2)(3,4,5)` or `(1 2)`;
/// `()` or an empty string is the identity. Returns the cycles.
pub fn parse_cycles(s: &str) -> Result<Vec<Vec<usize>>, String> {
    let mut cycles = Vec::new();
    let mut rest = s.trim();
    while !rest.is_empty() {
        let body_end = rest.find(')').ok_or_else(|| format!("unclosed cycle in `{s}`"))?;
        let body = rest.strip_prefix('(').ok_or_else(|| format!("expected `(` in `{s}`"))?;
        let body = &body[..body_end - 1];
        let labels = body
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<usize>().map_err(|_| format!("bad label `{t}` in `{s}`")))
            .collect::<Result<Vec<_>, _>>()?;
        if labels.contains(&0) {
            return Err(format!("labels start at 1 in `{s}`"));
        }
        if !labels.is_empty() {
            cycles.push(labels);
        }
        rest = rest[body_end + 1..].trim_start();
    }
    Ok(cycles)
}

/// Image table on `n` points of a product of disjoint cycles.
pub fn perm_from_cycles(cycles: &[Vec<usize>], n: usize) -> Result<Perm, String> {
    let mut p: Perm = (0..n).collect();
    let mut used = vec![false; n];
    for c in cycles {
        for (k, &x) in c.iter().enumerate() {
            if x > n {
                return Err(format!("label {x} exceeds {n}"));
            }
            if used[x - 1] {
                return Err(format!("label {x} appears twice"));
            }
            used[x - 1] = true;
            p[x - 1] = c[(k + 1) % c.len()] - 1;
        }
    }
    Ok(p)
}

/// Writes a permutation in cycle notation with 1-based labels.
pub fn cycles_string(p: &[usize]) -> String {
    let mut seen = vec![false; p.len()];
    let mut out = String::new();
    for s in 0..p.len() {
        if seen[s] || p[s] == s {
            continue;
        }
        out.push('(');
        let mut x = s;
        let mut first = true;
        while !seen[x] {
            seen[x] = true;
            if !first {
                out.push(',');
            }
            first = false;
            out.push_str(&format!("{}", x + 1));
            x = p[x];
        }
        out.push(')');
    }
    if out.is_empty() {
        out.push_str("()");
    }
    out
}

/// Square-tiled surface: square `i` has its right side glued to the left
/// side of `sigma_h(i)` and its top glued to the bottom of `sigma_v(i)`.
pub fn origami(sigma_h: &[usize], sigma_v: &[usize]) -> Result<TranslationSurface, BuilderError> {
    let n = sigma_h.len();
    let valid = |p: &[usize]| {
        let mut seen = vec![false; p.len()];
        p.iter().all(|&x| x < p.len() && !core::mem::replace(&mut seen[x], true))
    };
    if n == 0 || sigma_v.len() != n || !valid(sigma_h) || !valid(sigma_v) {
        return Err(BuilderError::BadArgument { builder: "origami", reason: "need two permutations of one set".into() });
    }
    let polygons = (0..n)
        .map(|i| {
            let x0 = ExactReal::from_int(2 * i as i64);
            let x1 = ExactReal::from_int(2 * i as i64 + 1);
            rect(&format!("s{}", i + 1), &x0, &ExactReal::zero(), &x1, &ExactReal::one())
        })
        .collect();
    let mut gluings = Vec::with_capacity(2 * n);
    for i in 0..n {
        gluings.push(((i, RIGHT), (sigma_h[i], LEFT)));
        gluings.push(((i, TOP), (sigma_v[i], BOTTOM)));
    }
    let spec = SurfaceSpec { field: Field::Rational, polygons, gluings, triangulate: false };
    build_surface(&spec).map_err(|e| match e {
        SurfaceError::Disconnected => {
            BuilderError::BadArgument { builder: "origami", reason: "permutations do not act transitively".into() }
        }
        e => BuilderError::Surface(e),
    })
}

pub fn origami_from_cycles(h: &str, v: &str) -> Result<TranslationSurface, BuilderError> {
    let arg = |reason: String| BuilderError::BadArgument { builder: "origami", reason };
    let ch = parse_cycles(h).map_err(arg)?;
    let cv = parse_cycles(v).map_err(arg)?;
    let n = ch.iter().chain(&cv).flatten().copied().max().unwrap_or(1);
    let ph = perm_from_cycles(&ch, n).map_err(arg)?;
    let pv = perm_from_cycles(&cv, n).map_err(arg)?;
    origami(&ph, &pv)
}

/// Three squares in an L: `σ_h = (1 2)`, `σ_v = (1 3)`.
pub fn three_square_l() -> TranslationSurface {
    origami_from_cycles("(1,2)", "(1,3)").expect("L origami")
}

/// Builds from an expression `NAME[:ARG[:ARG]]`:
/// `torus`, `octagon`, `golden-l`, `l3`, `stretched-l`,
/// `origami:SIGMA_H:SIGMA_V`, `perturbed-l:EPS_X:EPS_Y`.
pub fn from_expr(expr: &str) -> Result<TranslationSurface, BuilderError> {
    let expr = expr.trim();
    let (name, args) = match expr.split_once(':') {
        Some((n, a)) => (n, Some(a)),
        None => (expr, None),
    };
    let no_args = |s: TranslationSurface| match args {
        None => Ok(s),
        Some(_) => Err(BuilderError::BadArgument { builder: "builder", reason: format!("`{name}` takes no arguments") }),
    };
    match name {
        "torus" => no_args(torus()),
        "octagon" => no_args(octagon()),
        "golden-l" => no_args(golden_l()),
        "l3" => no_args(three_square_l()),
        "stretched-l" => no_args(stretched_l()),
        "origami" => {
            let a = args.unwrap_or("");
            // split at the `:` between the two cycle lists
            let (h, v) = a.split_once(':').ok_or(BuilderError::BadArgument {
                builder: "origami",
                reason: "expected origami:SIGMA_H:SIGMA_V".into(),
            })?;
            origami_from_cycles(h, v)
        }
        "perturbed-l" => {
            let a = args.unwrap_or("");
            let (x, y) = a.split_once(':').ok_or(BuilderError::BadArgument {
                builder: "perturbed-l",
                reason: "expected perturbed-l:EPS_X:EPS_Y".into(),
            })?;
            let ex: ExactReal = x.parse().map_err(|e| bad("perturbed-l", e))?;
            let ey: ExactReal = y.parse().map_err(|e| bad("perturbed-l", e))?;
            perturbed_l(&ex, &ey)
        }
        other => Err(BuilderError::UnknownBuilder(other.to_string())),
    }
}

/// Names accepted by [`from_expr`], with argument placeholders.
pub const BUILDER_NAMES: [&str; 7] =
    ["torus", "octagon", "golden-l", "l3", "stretched-l", "origami:SIGMA_H:SIGMA_V", "perturbed-l:EPS_X:EPS_Y"];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycles_round_trip() {
        let c = parse_cycles("(1,2)(3 4 5)").unwrap();
        assert_eq!(c, vec![vec![1, 2], vec![3, 4, 5]]);
        let p = perm_from_cycles(&c, 5).unwrap();
        assert_eq!(p, vec![1, 0, 3, 4, 2]);
        assert_eq!(cycles_string(&p), "(1,2)(3,4,5)");
        assert_eq!(cycles_string(&[0, 1]), "()");
        assert!(parse_cycles("(1,2").is_err());
        assert!(perm_from_cycles(&[vec![1, 2], vec![2, 3]], 3).is_err());
    }

    #[test]
    fn origami_checks() {
        assert!(origami_from_cycles("(1,2)", "(3)").is_err());
        let t = origami_from_cycles("()", "()").unwrap();
        assert_eq!(t.genus(), 1);
        let l = from_expr("origami:(1,2):(1,3)").unwrap();
        assert_eq!(l.polygon_count(), 3);
    }

    #[test]
    fn expressions() {
        assert_eq!(from_expr("golden-l").unwrap().genus(), 2);
        assert!(matches!(from_expr("klein"), Err(BuilderError::UnknownBuilder(_))));
        let p = from_expr("perturbed-l:1/3:0").unwrap();
        assert_eq!(p.area_exact().unwrap(), ExactReal::from_ratio(10, 3));
        assert_eq!(from_expr("perturbed-l:0:-1+1*sqrt(2)").unwrap(), stretched_l());
        assert!(from_expr("perturbed-l:-1:0").is_err());
        assert!(from_expr("torus:3").is_err());
    }
}
