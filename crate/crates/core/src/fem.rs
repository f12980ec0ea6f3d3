//! Linear finite elements on surface triangulations: mass and stiffness
//! assembly with vertex-interpolated coefficients, and right-hand sides.

use thiserror::Error;

use crate::mesh::{cross, dot3, norm, sub, ProblemMode, SurfaceMesh};
use crate::scalar::{dot, Real};
use crate::sparse::{assemble_family, pcg, CgConfig, CgError, CgStats, CsrMatrix};

#[derive(Debug, Error)]
pub enum FemError {
    #[error("problem mode {mode} does not fit this mesh: {reason}")]
    ModeMismatch { mode: &'static str, reason: &'static str },
    #[error("diffusion coefficient must be positive and finite (vertex {vertex}: {value})")]
    NonPositiveDiffusion { vertex: usize, value: f64 },
    #[error("reaction coefficient must be non-negative and finite (vertex {vertex}: {value})")]
    NegativeReaction { vertex: usize, value: f64 },
    #[error("expected {expected} values, got {got}")]
    Length { expected: usize, got: usize },
    #[error("mesh has no free degrees of freedom")]
    NoFreeDofs,
    #[error("mass solve failed: {0}")]
    Cg(#[from] CgError),
}

/// Vertex values of the diffusion coefficient `a > 0` and the reaction
/// coefficient `b >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientField<T> {
    a: Vec<T>,
    b: Vec<T>,
}

impl<T: Real> CoefficientField<T> {
    pub fn new(a: Vec<T>, b: Vec<T>) -> Result<Self, FemError> {
        if a.len() != b.len() {
            return Err(FemError::Length {
                expected: a.len(),
                got: b.len(),
            });
        }
        if let Some((vertex, &v)) = a.iter().enumerate().find(|(_, v)| !(**v > T::zero() && v.is_finite())) {
            return Err(FemError::NonPositiveDiffusion {
                vertex,
                value: v.to_f64_lossy(),
            });
        }
        if let Some((vertex, &v)) = b.iter().enumerate().find(|(_, v)| !(**v >= T::zero() && v.is_finite())) {
            return Err(FemError::NegativeReaction {
                vertex,
                value: v.to_f64_lossy(),
            });
        }
        Ok(Self { a, b })
    }

    pub fn constant(n: usize, a: T, b: T) -> Result<Self, FemError> {
        Self::new(vec![a; n], vec![b; n])
    }

    /// Interpolates `a(x)` and `b(x)` at the mesh vertices.
    pub fn from_fn(
        mesh: &SurfaceMesh<T>,
        a: impl Fn(&[T; 3]) -> T,
        b: impl Fn(&[T; 3]) -> T,
    ) -> Result<Self, FemError> {
        Self::new(
            mesh.vertices().iter().map(&a).collect(),
            mesh.vertices().iter().map(&b).collect(),
        )
    }

    pub fn diffusion(&self) -> &[T] {
        &self.a
    }

    pub fn reaction(&self) -> &[T] {
        &self.b
    }

    pub fn has_reaction(&self) -> bool {
        self.b.iter().any(|&v| v != T::zero())
    }
}

/// The pencil `(M, S)` restricted to the free degrees of freedom.
#[derive(Debug, Clone)]
pub struct AssembledOperator<T> {
    mass: CsrMatrix<T>,
    stiffness: CsrMatrix<T>,
    mode: ProblemMode,
    free_dofs: Vec<usize>,
    num_vertices: usize,
    mass_ones: Vec<T>,
    total_mass: T,
}

impl<T: Real> AssembledOperator<T> {
    /// Wraps an explicit pencil with every index free; useful for small
    /// algebraic test problems.
    pub fn from_matrices(mass: CsrMatrix<T>, stiffness: CsrMatrix<T>, mode: ProblemMode) -> Result<Self, FemError> {
        let n = mass.n();
        if stiffness.n() != n {
            return Err(FemError::Length {
                expected: n,
                got: stiffness.n(),
            });
        }
        if n == 0 {
            return Err(FemError::NoFreeDofs);
        }
        let mass_ones = mass.apply(&vec![T::one(); n]);
        let total_mass = mass_ones.iter().copied().sum();
        Ok(Self {
            mass,
            stiffness,
            mode,
            free_dofs: (0..n).collect(),
            num_vertices: n,
            mass_ones,
            total_mass,
        })
    }

    pub fn mass(&self) -> &CsrMatrix<T> {
        &self.mass
    }

    pub fn stiffness(&self) -> &CsrMatrix<T> {
        &self.stiffness
    }

    pub fn mode(&self) -> ProblemMode {
        self.mode
    }

    /// Mesh vertex index of every degree of freedom.
    pub fn free_dofs(&self) -> &[usize] {
        &self.free_dofs
    }

    pub fn n(&self) -> usize {
        self.free_dofs.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    /// `M·1` on the free dofs.
    pub fn mass_ones(&self) -> &[T] {
        &self.mass_ones
    }

    pub fn m_inner(&self, u: &[T], v: &[T]) -> T {
        dot(&self.mass.apply(u), v)
    }

    pub fn m_norm(&self, u: &[T]) -> T {
        self.m_inner(u, u).max(T::zero()).sqrt()
    }

    /// Picks the free-dof entries out of a per-vertex vector.
    pub fn restrict(&self, vertex_values: &[T]) -> Vec<T> {
        self.free_dofs.iter().map(|&v| vertex_values[v]).collect()
    }

    /// Per-vertex vector with zeros at constrained vertices.
    pub fn extend(&self, dofs: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.num_vertices];
        for (&v, &x) in self.free_dofs.iter().zip(dofs) {
            out[v] = x;
        }
        out
    }
}

/// `v - (1ᵀMv / 1ᵀM1)·1`.
pub fn deflate_mean<T: Real>(op: &AssembledOperator<T>, v: &[T]) -> Vec<T> {
    let mean = dot(op.mass_ones(), v) / op.total_mass;
    v.iter().map(|&x| x - mean).collect()
}

pub(crate) fn deflate_in_place<T: Real>(op: &AssembledOperator<T>, v: &mut [T]) {
    let mean = dot(op.mass_ones(), v) / op.total_mass;
    v.iter_mut().for_each(|x| *x -= mean);
}

fn check_mode<T: Real>(mesh: &SurfaceMesh<T>, coeffs: &CoefficientField<T>, mode: ProblemMode) -> Result<(), FemError> {
    let reason = match mode {
        ProblemMode::Dirichlet if mesh.is_closed() => Some("a closed surface has no boundary to constrain"),
        ProblemMode::ZeroMean if !mesh.is_closed() => Some("zero-mean mode needs a closed surface"),
        ProblemMode::ZeroMean if coeffs.has_reaction() => Some("zero-mean mode needs a vanishing reaction coefficient"),
        ProblemMode::PositiveReaction if !mesh.is_closed() => Some("positive-reaction mode needs a closed surface"),
        ProblemMode::PositiveReaction if !coeffs.has_reaction() => {
            Some("positive-reaction mode needs a reaction coefficient that is not identically zero")
        }
        _ => None,
    };
    match reason {
        Some(reason) => Err(FemError::ModeMismatch {
            mode: mode.as_str(),
            reason,
        }),
        None => Ok(()),
    }
}

/// Assembles `M_ij = ∫ φ_i φ_j` and `S_ij = ∫ ā ∇φ_i·∇φ_j + b_h φ_i φ_j`
/// (`ā` the triangle average of `a`, the reaction term by the edge-midpoint
/// rule). In Dirichlet mode boundary rows and columns are eliminated.
pub fn assemble<T: Real>(
    mesh: &SurfaceMesh<T>,
    coeffs: &CoefficientField<T>,
    mode: ProblemMode,
) -> Result<AssembledOperator<T>, FemError> {
    let nv = mesh.num_vertices();
    if coeffs.a.len() != nv {
        return Err(FemError::Length {
            expected: nv,
            got: coeffs.a.len(),
        });
    }
    check_mode(mesh, coeffs, mode)?;

    let mut dof_of = vec![usize::MAX; nv];
    let mut free_dofs = Vec::with_capacity(nv);
    for v in 0..nv {
        if !(mode == ProblemMode::Dirichlet && mesh.is_boundary(v)) {
            dof_of[v] = free_dofs.len();
            free_dofs.push(v);
        }
    }
    if free_dofs.is_empty() {
        return Err(FemError::NoFreeDofs);
    }

    let verts = mesh.vertices();
    let three = T::lit(3.0);
    let mut entries = Vec::with_capacity(9 * mesh.num_triangles());
    for tri in mesh.triangles() {
        let p = [verts[tri[0]], verts[tri[1]], verts[tri[2]]];
        let (k, area) = element_stiffness(&p);
        let a_bar = (coeffs.a[tri[0]] + coeffs.a[tri[1]] + coeffs.a[tri[2]]) / three;
        let b = [coeffs.b[tri[0]], coeffs.b[tri[1]], coeffs.b[tri[2]]];
        let b_sum = b[0] + b[1] + b[2];
        for i in 0..3 {
            let di = dof_of[tri[i]];
            if di == usize::MAX {
                continue;
            }
            for j in 0..3 {
                let dj = dof_of[tri[j]];
                if dj == usize::MAX {
                    continue;
                }
                let grad = a_bar * k[i][j];
                let (mass, reaction) = if i == j {
                    (area / T::lit(6.0), area * (b[i] + b_sum) / T::lit(24.0))
                } else {
                    (area / T::lit(12.0), area * (b[i] + b[j]) / T::lit(24.0))
                };
                entries.push((di, dj, [mass, grad + reaction]));
            }
        }
    }
    let n = free_dofs.len();
    let [mass, stiffness] = assemble_family(n, entries);
    let mass_ones = mass.apply(&vec![T::one(); n]);
    let total_mass = mass_ones.iter().copied().sum();
    Ok(AssembledOperator {
        mass,
        stiffness,
        mode,
        free_dofs,
        num_vertices: nv,
        mass_ones,
        total_mass,
    })
}

/// Unit-coefficient P1 stiffness `∫ ∇φ_i·∇φ_j = e_i·e_j / (4A)` of a flat
/// triangle (`e_i` the edge opposite vertex `i`), and its area.
pub fn element_stiffness<T: Real>(p: &[[T; 3]; 3]) -> ([[T; 3]; 3], T) {
    let e = [sub(&p[2], &p[1]), sub(&p[0], &p[2]), sub(&p[1], &p[0])];
    let area = T::lit(0.5) * norm(&cross(&e[2], &sub(&p[2], &p[0])));
    let k = std::array::from_fn(|i| std::array::from_fn(|j| dot3(&e[i], &e[j]) / (T::lit(4.0) * area)));
    (k, area)
}

/// Seven-point rule exact for polynomials of degree 5 on a triangle:
/// barycentric coordinates and weights summing to one.
pub fn degree5_rule<T: Real>() -> [([T; 3], T); 7] {
    let r = T::lit(15.0).sqrt();
    let d = T::lit(21.0);
    let b1 = (T::lit(6.0) + r) / d;
    let a1 = (T::lit(9.0) - T::lit(2.0) * r) / d;
    let b2 = (T::lit(6.0) - r) / d;
    let a2 = (T::lit(9.0) + T::lit(2.0) * r) / d;
    let w1 = (T::lit(155.0) + r) / T::lit(1200.0);
    let w2 = (T::lit(155.0) - r) / T::lit(1200.0);
    let c = T::one() / T::lit(3.0);
    [
        ([c, c, c], T::lit(9.0) / T::lit(40.0)),
        ([a1, b1, b1], w1),
        ([b1, a1, b1], w1),
        ([b1, b1, a1], w1),
        ([a2, b2, b2], w2),
        ([b2, a2, b2], w2),
        ([b2, b2, a2], w2),
    ]
}

pub(crate) fn barycentric_point<T: Real>(p: &[[T; 3]; 3], l: &[T; 3]) -> [T; 3] {
    std::array::from_fn(|d| l[0] * p[0][d] + l[1] * p[1][d] + l[2] * p[2][d])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RhsMethod {
    /// Vertex values of `f`.
    Interpolate,
    /// `M f_h = (∫ f φ_i)_i` with the seven-point rule.
    L2Project,
}

impl std::str::FromStr for RhsMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "interpolate" => Ok(RhsMethod::Interpolate),
            "project" | "l2-project" | "l2_project" => Ok(RhsMethod::L2Project),
            other => Err(format!("unknown right-hand side method `{other}`")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RhsVector<T> {
    pub values: Vec<T>,
    /// Triangles on which `f` departs from its linear interpolant by more
    /// than a quarter of `max |f|`: the quadrature there is unreliable.
    pub flagged_triangles: usize,
    pub mass_solve: Option<CgStats>,
}

/// Discrete right-hand side on the free dofs; deflated in zero-mean mode.
pub fn build_rhs<T: Real>(
    mesh: &SurfaceMesh<T>,
    op: &AssembledOperator<T>,
    f: impl Fn(&[T; 3]) -> T,
    method: RhsMethod,
    cg_tol: T,
) -> Result<RhsVector<T>, FemError> {
    let nodal: Vec<T> = mesh.vertices().iter().map(&f).collect();
    let (mut values, flagged_triangles, mass_solve) = match method {
        RhsMethod::Interpolate => (op.restrict(&nodal), 0, None),
        RhsMethod::L2Project => {
            let rule = degree5_rule::<T>();
            let mut load = vec![T::zero(); mesh.num_vertices()];
            let mut deviation = vec![T::zero(); mesh.num_triangles()];
            let mut fmax = nodal.iter().fold(T::zero(), |m, v| m.max(v.abs()));
            let verts = mesh.vertices();
            for (k, tri) in mesh.triangles().iter().enumerate() {
                let p = [verts[tri[0]], verts[tri[1]], verts[tri[2]]];
                let area = mesh.triangle_area(k);
                for (l, w) in &rule {
                    let fx = f(&barycentric_point(&p, l));
                    fmax = fmax.max(fx.abs());
                    let linear = l[0] * nodal[tri[0]] + l[1] * nodal[tri[1]] + l[2] * nodal[tri[2]];
                    deviation[k] = deviation[k].max((fx - linear).abs());
                    for c in 0..3 {
                        load[tri[c]] += *w * area * fx * l[c];
                    }
                }
            }
            let flagged = deviation.iter().filter(|&&d| d > T::lit(0.25) * fmax).count();
            let rhs = op.restrict(&load);
            let mut x = op.restrict(&nodal);
            let cfg = CgConfig::new(cg_tol, op.n());
            let stats = pcg(op.mass(), &op.mass().diagonal(), &rhs, &mut x, &cfg)?;
            (x, flagged, Some(stats))
        }
    };
    if flagged_triangles > 0 {
        log::warn!(
            "right-hand side varies sharply inside {flagged_triangles} triangles; quadrature accuracy is reduced there"
        );
    }
    if op.mode() == ProblemMode::ZeroMean {
        deflate_in_place(op, &mut values);
    }
    Ok(RhsVector {
        values,
        flagged_triangles,
        mass_solve,
    })
}
