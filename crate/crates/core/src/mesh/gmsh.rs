//! ASCII Gmsh `.msh` reader (format versions 2.2 and 4.1).
//!
//! Only 3-node triangles become mesh faces. Point and line elements
//! (physical curves, corner points) are skipped; any other element type is
//! rejected. Nodes that no triangle references are dropped.

use std::collections::HashMap;
use std::path::Path;

use super::{MeshError, SurfaceMesh};
use crate::scalar::Real;

const TRIANGLE: u32 = 2;
/// 2-node line, 3-node line, point, 4/5/6-node lines.
const SKIPPED: [u32; 6] = [1, 8, 15, 26, 27, 28];

#[derive(Clone, Copy, PartialEq)]
enum Version {
    V2,
    V4,
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            inner: text.lines().enumerate(),
            last: 0,
        }
    }

    /// Next non-blank line, trimmed, with its 1-based number.
    fn next(&mut self) -> Option<(usize, &'a str)> {
        for (i, l) in self.inner.by_ref() {
            self.last = i + 1;
            let t = l.trim();
            if !t.is_empty() {
                return Some((i + 1, t));
            }
        }
        None
    }

    fn expect(&mut self, what: &str) -> Result<(usize, &'a str), MeshError> {
        self.next().ok_or_else(|| MeshError::Parse {
            line: self.last + 1,
            message: format!("unexpected end of file while reading {what}"),
        })
    }

    fn expect_end(&mut self, section: &str) -> Result<(), MeshError> {
        let (line, l) = self.expect(section)?;
        if l != format!("$End{section}") {
            return Err(parse_err(line, format!("expected $End{section}, found `{l}`")));
        }
        Ok(())
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> MeshError {
    MeshError::Parse {
        line,
        message: message.into(),
    }
}

fn fields<V: std::str::FromStr>(line: usize, text: &str, min: usize, what: &str) -> Result<Vec<V>, MeshError> {
    let out: Result<Vec<V>, _> = text.split_whitespace().map(str::parse).collect();
    match out {
        Ok(v) if v.len() >= min => Ok(v),
        Ok(v) => Err(parse_err(
            line,
            format!("{what}: expected at least {min} fields, found {}", v.len()),
        )),
        Err(_) => Err(parse_err(line, format!("{what}: malformed number in `{text}`"))),
    }
}

/// Reads a mesh from a file.
pub fn read_gmsh<T: Real>(path: impl AsRef<Path>) -> Result<SurfaceMesh<T>, MeshError> {
    let text = std::fs::read_to_string(path)?;
    parse_gmsh(&text)
}

/// Parses the contents of an ASCII `.msh` file.
pub fn parse_gmsh<T: Real>(text: &str) -> Result<SurfaceMesh<T>, MeshError> {
    let mut lines = Lines::new(text);
    let mut version = None;
    let mut nodes: Vec<(u64, [f64; 3])> = Vec::new();
    let mut triangles: Vec<(usize, [u64; 3])> = Vec::new();
    let mut saw_nodes = false;

    while let Some((line, l)) = lines.next() {
        match l {
            "$MeshFormat" => {
                let (vl, v) = lines.expect("MeshFormat")?;
                let parts: Vec<&str> = v.split_whitespace().collect();
                let ver = parts.first().copied().unwrap_or("");
                version = Some(match ver {
                    "2.2" => Version::V2,
                    "4.1" => Version::V4,
                    other => {
                        return Err(MeshError::UnsupportedVersion {
                            line: vl,
                            version: other.to_string(),
                        })
                    }
                });
                if parts.get(1).copied() != Some("0") {
                    return Err(MeshError::UnsupportedVersion {
                        line: vl,
                        version: format!("{ver} (binary)"),
                    });
                }
                lines.expect_end("MeshFormat")?;
            }
            "$Nodes" => {
                let v = version.ok_or_else(|| parse_err(line, "$Nodes before $MeshFormat"))?;
                match v {
                    Version::V2 => read_nodes_v2(&mut lines, &mut nodes)?,
                    Version::V4 => read_nodes_v4(&mut lines, &mut nodes)?,
                }
                saw_nodes = true;
            }
            "$Elements" => {
                let v = version.ok_or_else(|| parse_err(line, "$Elements before $MeshFormat"))?;
                match v {
                    Version::V2 => read_elements_v2(&mut lines, &mut triangles)?,
                    Version::V4 => read_elements_v4(&mut lines, &mut triangles)?,
                }
            }
            s if s.starts_with('$') && !s.starts_with("$End") => {
                // unrelated section ($Entities, $PhysicalNames, ...)
                let end = format!("$End{}", &s[1..]);
                loop {
                    let (_, l) = lines.expect(&s[1..])?;
                    if l == end {
                        break;
                    }
                }
            }
            other => return Err(parse_err(line, format!("unexpected content `{other}`"))),
        }
    }
    if version.is_none() {
        return Err(parse_err(1, "missing $MeshFormat section"));
    }
    if !saw_nodes {
        return Err(parse_err(lines.last, "missing $Nodes section"));
    }
    if triangles.is_empty() {
        return Err(parse_err(lines.last, "no triangle elements found"));
    }

    let position: HashMap<u64, usize> = nodes.iter().enumerate().map(|(i, (tag, _))| (*tag, i)).collect();
    if position.len() != nodes.len() {
        return Err(parse_err(lines.last, "duplicate node tags"));
    }
    let mut tri_pos = Vec::with_capacity(triangles.len());
    let mut used = vec![false; nodes.len()];
    for (line, tags) in &triangles {
        let mut t = [0usize; 3];
        for (k, tag) in tags.iter().enumerate() {
            let &p = position
                .get(tag)
                .ok_or_else(|| parse_err(*line, format!("element references undefined node {tag}")))?;
            used[p] = true;
            t[k] = p;
        }
        tri_pos.push(t);
    }
    let mut remap = vec![usize::MAX; nodes.len()];
    let mut vertices = Vec::new();
    for (i, (_, x)) in nodes.iter().enumerate() {
        if used[i] {
            remap[i] = vertices.len();
            vertices.push([T::lit(x[0]), T::lit(x[1]), T::lit(x[2])]);
        }
    }
    let tris = tri_pos
        .iter()
        .map(|t| [remap[t[0]], remap[t[1]], remap[t[2]]])
        .collect();
    SurfaceMesh::new(vertices, tris, None)
}

fn read_nodes_v2(lines: &mut Lines<'_>, nodes: &mut Vec<(u64, [f64; 3])>) -> Result<(), MeshError> {
    let (line, l) = lines.expect("Nodes")?;
    let count: usize = l
        .parse()
        .map_err(|_| parse_err(line, format!("bad node count `{l}`")))?;
    nodes.reserve(count);
    for _ in 0..count {
        let (line, l) = lines.expect("Nodes")?;
        let mut it = l.split_whitespace();
        let tag: u64 = it
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| parse_err(line, "bad node tag"))?;
        let x: Vec<f64> = fields(line, &it.collect::<Vec<_>>().join(" "), 3, "node")?;
        nodes.push((tag, [x[0], x[1], x[2]]));
    }
    lines.expect_end("Nodes")
}

fn read_nodes_v4(lines: &mut Lines<'_>, nodes: &mut Vec<(u64, [f64; 3])>) -> Result<(), MeshError> {
    let (line, l) = lines.expect("Nodes")?;
    let head: Vec<usize> = fields(line, l, 4, "node header")?;
    let (blocks, total) = (head[0], head[1]);
    nodes.reserve(total);
    for _ in 0..blocks {
        let (line, l) = lines.expect("Nodes")?;
        let b: Vec<i64> = fields(line, l, 4, "node block header")?;
        let n = usize::try_from(b[3]).map_err(|_| parse_err(line, "negative node count"))?;
        let mut tags = Vec::with_capacity(n);
        for _ in 0..n {
            let (line, l) = lines.expect("Nodes")?;
            let t: u64 = l.parse().map_err(|_| parse_err(line, format!("bad node tag `{l}`")))?;
            tags.push(t);
        }
        for tag in tags {
            let (line, l) = lines.expect("Nodes")?;
            let x: Vec<f64> = fields(line, l, 3, "node coordinates")?;
            nodes.push((tag, [x[0], x[1], x[2]]));
        }
    }
    lines.expect_end("Nodes")
}

fn read_elements_v2(lines: &mut Lines<'_>, tris: &mut Vec<(usize, [u64; 3])>) -> Result<(), MeshError> {
    let (line, l) = lines.expect("Elements")?;
    let count: usize = l
        .parse()
        .map_err(|_| parse_err(line, format!("bad element count `{l}`")))?;
    for _ in 0..count {
        let (line, l) = lines.expect("Elements")?;
        let f: Vec<u64> = fields(line, l, 3, "element")?;
        let ty = f[1] as u32;
        let ntags = f[2] as usize;
        let conn = &f[(3 + ntags).min(f.len())..];
        if ty == TRIANGLE {
            if conn.len() != 3 {
                return Err(parse_err(
                    line,
                    format!("triangle element has {} node indices", conn.len()),
                ));
            }
            tris.push((line, [conn[0], conn[1], conn[2]]));
        } else if !SKIPPED.contains(&ty) {
            return Err(MeshError::UnsupportedElement { line, element_type: ty });
        }
    }
    lines.expect_end("Elements")
}

fn read_elements_v4(lines: &mut Lines<'_>, tris: &mut Vec<(usize, [u64; 3])>) -> Result<(), MeshError> {
    let (line, l) = lines.expect("Elements")?;
    let head: Vec<usize> = fields(line, l, 4, "element header")?;
    for _ in 0..head[0] {
        let (line, l) = lines.expect("Elements")?;
        let b: Vec<i64> = fields(line, l, 4, "element block header")?;
        let ty = u32::try_from(b[2]).map_err(|_| parse_err(line, "bad element type"))?;
        let n = usize::try_from(b[3]).map_err(|_| parse_err(line, "negative element count"))?;
        if ty != TRIANGLE && !SKIPPED.contains(&ty) {
            return Err(MeshError::UnsupportedElement { line, element_type: ty });
        }
        for _ in 0..n {
            let (line, l) = lines.expect("Elements")?;
            if ty != TRIANGLE {
                continue;
            }
            let f: Vec<u64> = fields(line, l, 1, "element")?;
            if f.len() != 4 {
                return Err(parse_err(
                    line,
                    format!("triangle element has {} node indices", f.len() - 1),
                ));
            }
            tris.push((line, [f[1], f[2], f[3]]));
        }
    }
    lines.expect_end("Elements")
}
