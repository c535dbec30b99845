//! Plain-text surface files.
//!
//! ```text
//! # comment
//! field sqrt(5)
//! polygon A (0,0) (1,0) (1,1) (0,1)
//! glue A 1 A 3
//! triangulate
//! ```
//!
//! Edge `k` of a polygon runs from vertex `k` to vertex `k + 1`. With
//! `triangulate`, polygons only need to be simple; otherwise they must be
//! strictly convex and counter-clockwise.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use flatlab_core::exact::{ExactReal, Field};
use flatlab_core::geom::V2;
use flatlab_core::surface::{build_surface, PolygonSpec, SurfaceError, SurfaceSpec, TranslationSurface};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("{}{source}", line.map(|l| format!("line {l}: ")).unwrap_or_default())]
    Invariant { line: Option<usize>, source: SurfaceError },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl FormatError {
    pub fn line(&self) -> Option<usize> {
        match self {
            FormatError::Syntax { line, .. } => Some(*line),
            FormatError::Invariant { line, .. } => *line,
            FormatError::Io { .. } => None,
        }
    }
}

/// Whitespace-separated tokens with 1-based columns.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        match (ch.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push((s, &line[s..i]));
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, &line[s..]));
    }
    out.into_iter().map(|(s, t)| (line[..s].chars().count() + 1, t)).collect()
}

fn parse_vertex(tok: &str) -> Result<V2, String> {
    let inner = tok
        .strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .ok_or_else(|| format!("expected a vertex `(x,y)`, found `{tok}`"))?;
    let (x, y) = inner.split_once(',').ok_or_else(|| format!("vertex `{tok}` needs two coordinates"))?;
    let x: ExactReal = x.parse().map_err(|e| format!("{e}"))?;
    let y: ExactReal = y.parse().map_err(|e| format!("{e}"))?;
    Ok(V2::new(x, y))
}

pub fn parse_surface_text(text: &str) -> Result<TranslationSurface, FormatError> {
    let mut field: Option<Field> = None;
    let mut polygons: Vec<PolygonSpec> = Vec::new();
    let mut polygon_lines = Vec::new();
    let mut names: HashMap<String, usize> = HashMap::new();
    let mut gluings = Vec::new();
    let mut glue_lines = Vec::new();
    let mut triangulate = false;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        let toks = tokens(content);
        let Some(&(col, keyword)) = toks.first() else { continue };
        let syntax = |column: usize, message: String| FormatError::Syntax { line, column, message };
        match keyword {
            "field" => {
                if field.is_some() {
                    return Err(syntax(col, "field declared twice".into()));
                }
                let rest = &toks[1..];
                let [(c, f)] = rest else {
                    return Err(syntax(col, "expected `field rational` or `field sqrt(D)`".into()));
                };
                field = Some(f.parse().map_err(|e| syntax(*c, format!("{e}")))?);
            }
            "polygon" => {
                let Some(&(c, name)) = toks.get(1) else {
                    return Err(syntax(col, "polygon needs a name".into()));
                };
                if names.insert(name.to_string(), polygons.len()).is_some() {
                    return Err(syntax(c, format!("polygon name `{name}` already used")));
                }
                let mut vertices = Vec::new();
                for &(c, t) in &toks[2..] {
                    vertices.push(parse_vertex(t).map_err(|m| syntax(c, m))?);
                }
                polygons.push(PolygonSpec { name: name.to_string(), vertices });
                polygon_lines.push(line);
            }
            "glue" => {
                if toks.len() != 5 {
                    return Err(syntax(col, "expected `glue NAME EDGE NAME EDGE`".into()));
                }
                let edge = |k: usize| -> Result<(usize, usize), FormatError> {
                    let (c, name) = toks[k];
                    let p = *names
                        .get(name)
                        .ok_or_else(|| syntax(c, format!("unknown polygon `{name}` (declare polygons before gluing)")))?;
                    let (c, e) = toks[k + 1];
                    let e: usize = e.parse().map_err(|_| syntax(c, format!("edge index `{e}` is not a number")))?;
                    Ok((p, e))
                };
                let a = edge(1)?;
                let b = edge(3)?;
                gluings.push((a, b));
                glue_lines.push(line);
            }
            "triangulate" => {
                if toks.len() != 1 {
                    return Err(syntax(toks[1].0, "`triangulate` takes no arguments".into()));
                }
                triangulate = true;
            }
            other => return Err(syntax(col, format!("unknown statement `{other}`"))),
        }
    }
    let spec = SurfaceSpec { field: field.unwrap_or(Field::Rational), polygons, gluings, triangulate };
    build_surface(&spec).map_err(|source| {
        let line = match &source {
            SurfaceError::EdgeOutOfRange { glue }
            | SurfaceError::SelfGluedEdge { glue }
            | SurfaceError::EdgeGluedTwice { glue }
            | SurfaceError::GluingMismatch { glue } => glue_lines.get(*glue).copied(),
            SurfaceError::TooFewVertices { polygon }
            | SurfaceError::NonConvexPolygon { polygon }
            | SurfaceError::NotSimplePolygon { polygon }
            | SurfaceError::DuplicateName { polygon }
                if !triangulate || matches!(source, SurfaceError::NotSimplePolygon { .. }) =>
            {
                polygon_lines.get(*polygon).copied()
            }
            SurfaceError::Unglued { polygon, .. } if !triangulate => polygon_lines.get(*polygon).copied(),
            _ => None,
        };
        FormatError::Invariant { line, source }
    })
}

pub fn parse_surface_file(path: &Path) -> Result<TranslationSurface, FormatError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| FormatError::Io { path: path.display().to_string(), source })?;
    parse_surface_text(&text)
}

/// Canonical text form; parsing it gives back the same polygons and gluings.
pub fn print_surface(m: &TranslationSurface) -> Result<String, SurfaceError> {
    let spec = m.to_spec()?;
    let mut out = String::new();
    writeln!(out, "field {}", spec.field).unwrap();
    for p in &spec.polygons {
        write!(out, "polygon {}", p.name).unwrap();
        for v in &p.vertices {
            write!(out, " ({},{})", v.x, v.y).unwrap();
        }
        out.push('\n');
    }
    for ((pa, ea), (pb, eb)) in &spec.gluings {
        writeln!(out, "glue {} {} {} {}", spec.polygons[*pa].name, ea, spec.polygons[*pb].name, eb).unwrap();
    }
    Ok(out)
}
