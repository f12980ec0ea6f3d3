//! Triangulated 2-manifolds embedded in 3-space.

mod generate;
mod gmsh;
mod off;

use std::collections::HashMap;

use thiserror::Error;

use crate::scalar::Real;

pub use generate::{gen_graded_square, gen_sphere, gen_torus, graded_nodes, tensor_grid, MAX_SPHERE_LEVEL};
pub use gmsh::{parse_gmsh, read_gmsh};
pub use off::{write_off, write_vertex_scalars};

/// Selects the discrete function space and the coercivity mechanism.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProblemMode {
    /// Homogeneous Dirichlet data on the boundary vertices.
    Dirichlet,
    /// Closed surface with a reaction coefficient that is not identically zero.
    PositiveReaction,
    /// Closed surface, no reaction: functions are taken with vanishing mean.
    ZeroMean,
}

impl ProblemMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            ProblemMode::Dirichlet => "dirichlet",
            ProblemMode::PositiveReaction => "positive-reaction",
            ProblemMode::ZeroMean => "zero-mean",
        }
    }
}

impl std::str::FromStr for ProblemMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dirichlet" => Ok(ProblemMode::Dirichlet),
            "positive-reaction" => Ok(ProblemMode::PositiveReaction),
            "zero-mean" => Ok(ProblemMode::ZeroMean),
            other => Err(format!("unknown problem mode `{other}`")),
        }
    }
}

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("mesh has no triangles")]
    Empty,
    #[error("triangle {triangle} references vertex {index} but the mesh has {count} vertices")]
    IndexOutOfRange {
        triangle: usize,
        index: usize,
        count: usize,
    },
    #[error("triangle {0} is degenerate")]
    Degenerate(usize),
    #[error("edge ({0}, {1}) is shared by more than two triangles")]
    NonManifoldEdge(usize, usize),
    #[error("edge ({0}, {1}) is traversed in the same direction by both of its triangles")]
    InconsistentOrientation(usize, usize),
    #[error("vertex {0} is not used by any triangle")]
    UnreferencedVertex(usize),
    #[error("invalid mesh parameters: {0}")]
    InvalidParameters(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: unsupported MSH format version {version} (expected 2.2 or 4.1 ASCII)")]
    UnsupportedVersion { line: usize, version: String },
    #[error("line {line}: element type {element_type} is not a 3-node triangle")]
    UnsupportedElement { line: usize, element_type: u32 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Validated surface triangulation.
#[derive(Debug, Clone)]
pub struct SurfaceMesh<T> {
    vertices: Vec<[T; 3]>,
    triangles: Vec<[usize; 3]>,
    boundary: Vec<bool>,
    num_edges: usize,
    mode_hint: ProblemMode,
}

impl<T: Real> SurfaceMesh<T> {
    /// Validates the triangulation and detects boundary vertices from edge
    /// incidence. `mode_hint = None` selects Dirichlet for meshes with a
    /// boundary and zero-mean for closed ones.
    pub fn new(
        vertices: Vec<[T; 3]>,
        triangles: Vec<[usize; 3]>,
        mode_hint: Option<ProblemMode>,
    ) -> Result<Self, MeshError> {
        if triangles.is_empty() {
            return Err(MeshError::Empty);
        }
        let nv = vertices.len();
        let mut used = vec![false; nv];
        for (k, tri) in triangles.iter().enumerate() {
            for &v in tri {
                if v >= nv {
                    return Err(MeshError::IndexOutOfRange {
                        triangle: k,
                        index: v,
                        count: nv,
                    });
                }
                used[v] = true;
            }
        }
        if let Some(v) = used.iter().position(|&u| !u) {
            return Err(MeshError::UnreferencedVertex(v));
        }

        let diam2 = bounding_diagonal_sq(&vertices);
        let tol = T::lit(1e-14) * diam2;
        for (k, tri) in triangles.iter().enumerate() {
            let area = triangle_area(&vertices[tri[0]], &vertices[tri[1]], &vertices[tri[2]]);
            if !(area > tol) || tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(MeshError::Degenerate(k));
            }
        }

        // key: sorted endpoints; value: (count, direction of the first traversal is low->high)
        let mut edges: HashMap<(usize, usize), (u8, bool)> = HashMap::with_capacity(3 * triangles.len() / 2 + 8);
        for tri in &triangles {
            for e in 0..3 {
                let (a, b) = (tri[e], tri[(e + 1) % 3]);
                let key = (a.min(b), a.max(b));
                let forward = a < b;
                let entry = edges.entry(key).or_insert((0, forward));
                entry.0 += 1;
                if entry.0 > 2 {
                    return Err(MeshError::NonManifoldEdge(key.0, key.1));
                }
                if entry.0 == 2 && entry.1 == forward {
                    return Err(MeshError::InconsistentOrientation(key.0, key.1));
                }
            }
        }
        let mut boundary = vec![false; nv];
        for (&(a, b), &(count, _)) in &edges {
            if count == 1 {
                boundary[a] = true;
                boundary[b] = true;
            }
        }
        let closed = !boundary.iter().any(|&b| b);
        let mode_hint = mode_hint.unwrap_or(if closed {
            ProblemMode::ZeroMean
        } else {
            ProblemMode::Dirichlet
        });
        Ok(Self {
            vertices,
            triangles,
            boundary,
            num_edges: edges.len(),
            mode_hint,
        })
    }

    pub fn vertices(&self) -> &[[T; 3]] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn num_edges(&self) -> usize {
        self.num_edges
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        self.boundary[v]
    }

    pub fn boundary_flags(&self) -> &[bool] {
        &self.boundary
    }

    pub fn boundary_vertices(&self) -> Vec<usize> {
        (0..self.vertices.len()).filter(|&v| self.boundary[v]).collect()
    }

    pub fn is_closed(&self) -> bool {
        !self.boundary.iter().any(|&b| b)
    }

    pub fn mode_hint(&self) -> ProblemMode {
        self.mode_hint
    }

    pub fn with_mode_hint(mut self, mode: ProblemMode) -> Self {
        self.mode_hint = mode;
        self
    }

    /// `V - E + F`
    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.num_edges as i64 + self.triangles.len() as i64
    }

    pub fn triangle_area(&self, k: usize) -> T {
        let [a, b, c] = self.triangles[k];
        triangle_area(&self.vertices[a], &self.vertices[b], &self.vertices[c])
    }

    pub fn total_area(&self) -> T {
        (0..self.triangles.len()).map(|k| self.triangle_area(k)).sum()
    }

    /// Longest edge over all triangles.
    pub fn max_edge_length(&self) -> T {
        let mut h = T::zero();
        for tri in &self.triangles {
            for e in 0..3 {
                let d = sub(&self.vertices[tri[(e + 1) % 3]], &self.vertices[tri[e]]);
                h = h.max(norm(&d));
            }
        }
        h
    }
}

pub(crate) fn sub<T: Real>(a: &[T; 3], b: &[T; 3]) -> [T; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn cross<T: Real>(a: &[T; 3], b: &[T; 3]) -> [T; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub(crate) fn dot3<T: Real>(a: &[T; 3], b: &[T; 3]) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn norm<T: Real>(a: &[T; 3]) -> T {
    dot3(a, a).sqrt()
}

pub(crate) fn triangle_area<T: Real>(a: &[T; 3], b: &[T; 3], c: &[T; 3]) -> T {
    T::lit(0.5) * norm(&cross(&sub(b, a), &sub(c, a)))
}

fn bounding_diagonal_sq<T: Real>(vertices: &[[T; 3]]) -> T {
    let mut lo = [T::infinity(); 3];
    let mut hi = [T::neg_infinity(); 3];
    for v in vertices {
        for d in 0..3 {
            lo[d] = lo[d].min(v[d]);
            hi[d] = hi[d].max(v[d]);
        }
    }
    (0..3).map(|d| (hi[d] - lo[d]) * (hi[d] - lo[d])).sum()
}
