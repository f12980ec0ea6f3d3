//! Brute-force references: dense spectral calculus on small pencils, the
//! closed-form solution on the unit sphere and the torus data.
//!
//! Dense linear algebra runs in `f64` regardless of the scalar type.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use thiserror::Error;

use crate::fem::{barycentric_point, degree5_rule, AssembledOperator};
use crate::jacobi::jacobi_p;
use crate::mesh::{ProblemMode, SurfaceMesh};
use crate::scalar::Real;

pub use crate::pade::{explicit_pade_coefficients, maclaurin_pade_oracle};

/// Largest pencil accepted by the dense eigensolver.
pub const DENSE_LIMIT: usize = 2000;
/// Largest truncation index accepted by [`sphere_series_solution`].
pub const MAX_SERIES_TERMS: usize = 10_000;

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("dense oracle limited to {limit} unknowns (got {n})")]
    TooLarge { n: usize, limit: usize },
    #[error("mass matrix is not positive definite")]
    MassNotDefinite,
    #[error("expected {expected} values, got {got}")]
    Length { expected: usize, got: usize },
    #[error("series truncation {0} exceeds {MAX_SERIES_TERMS}")]
    TooManyTerms(usize),
    #[error("torus radii must satisfy 0 < r < R")]
    TorusRadii,
}

/// Generalized eigenpairs `S ψ = λ M ψ` with `ΨᵀMΨ = I`, ascending.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<f64>,
    /// `MΨ`, so that `(f, ψ_j)_M = (MΨ)ᵀ_j f`.
    mass_eigenvectors: DMatrix<f64>,
    constant_removed: bool,
}

fn dense<T: Real>(m: &crate::sparse::CsrMatrix<T>) -> DMatrix<f64> {
    let n = m.n();
    let d: Vec<f64> = m.to_dense().into_iter().map(|v| v.to_f64_lossy()).collect();
    let a = DMatrix::from_row_slice(n, n, &d);
    (&a + a.transpose()) * 0.5
}

impl SpectralDecomposition {
    /// Cholesky `M = LLᵀ`, then the symmetric eigenproblem of `L⁻¹SL⁻ᵀ`.
    /// In zero-mean mode the eigenpair of the constant is dropped.
    pub fn new<T: Real>(op: &AssembledOperator<T>) -> Result<Self, OracleError> {
        let n = op.n();
        if n > DENSE_LIMIT {
            return Err(OracleError::TooLarge { n, limit: DENSE_LIMIT });
        }
        let m = dense(op.mass());
        let s = dense(op.stiffness());
        let l = m.clone().cholesky().ok_or(OracleError::MassNotDefinite)?.l();
        let y = l.solve_lower_triangular(&s).ok_or(OracleError::MassNotDefinite)?;
        let c = l
            .solve_lower_triangular(&y.transpose())
            .ok_or(OracleError::MassNotDefinite)?;
        let c = (&c + c.transpose()) * 0.5;
        let eig = SymmetricEigen::new(c);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let constant_removed = op.mode() == ProblemMode::ZeroMean;
        if constant_removed {
            order.remove(0);
        }
        let k = order.len();
        let mut v = DMatrix::zeros(n, k);
        for (col, &j) in order.iter().enumerate() {
            v.set_column(col, &eig.eigenvectors.column(j));
        }
        let eigenvectors = l
            .transpose()
            .solve_upper_triangular(&v)
            .ok_or(OracleError::MassNotDefinite)?;
        let mass_eigenvectors = &l * &v;
        let eigenvalues = order.iter().map(|&j| eig.eigenvalues[j]).collect();
        Ok(Self {
            eigenvalues,
            eigenvectors,
            mass_eigenvectors,
            constant_removed,
        })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Columns are `M`-orthonormal eigenvectors.
    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    pub fn constant_removed(&self) -> bool {
        self.constant_removed
    }

    /// `max_j ‖Sψ_j - λ_j Mψ_j‖ / ‖S‖_∞`.
    pub fn residual<T: Real>(&self, op: &AssembledOperator<T>) -> f64 {
        let s = dense(op.stiffness());
        let norm = op.stiffness().norm_inf().to_f64_lossy();
        let sv = &s * &self.eigenvectors;
        (0..self.eigenvalues.len())
            .map(|j| (sv.column(j) - self.mass_eigenvectors.column(j) * self.eigenvalues[j]).norm())
            .fold(0.0, f64::max)
            / norm
    }

    /// `Σ_j g(λ_j) (f, ψ_j)_M ψ_j`.
    pub fn apply<T: Real>(&self, f: &[T], g: impl Fn(f64) -> f64) -> Result<Vec<T>, OracleError> {
        let n = self.eigenvectors.nrows();
        if f.len() != n {
            return Err(OracleError::Length {
                expected: n,
                got: f.len(),
            });
        }
        let fv = DVector::from_iterator(n, f.iter().map(|v| v.to_f64_lossy()));
        let mut coeff = self.mass_eigenvectors.tr_mul(&fv);
        for (c, &l) in coeff.iter_mut().zip(&self.eigenvalues) {
            *c *= g(l);
        }
        let u = &self.eigenvectors * coeff;
        Ok(u.iter().map(|&v| T::lit(v)).collect())
    }

    /// `Σ_j λ_j^{-α} (f, ψ_j)_M ψ_j`.
    pub fn fractional<T: Real>(&self, alpha: f64, f: &[T]) -> Result<Vec<T>, OracleError> {
        self.apply(f, |l| l.powf(-alpha))
    }
}

/// One-shot dense `(M^{-1}S)^{-α} f`.
pub fn dense_fractional<T: Real>(op: &AssembledOperator<T>, alpha: f64, f: &[T]) -> Result<Vec<T>, OracleError> {
    SpectralDecomposition::new(op)?.fractional(alpha, f)
}

/// Legendre coefficient of `sign(s)`: `a_n = ((2n+1)/2) ∫ sign(s) P_n(s) ds`,
/// equal to `P_{n-1}(0) - P_{n+1}(0)` for odd `n` and zero for even `n`.
pub fn sign_legendre_coefficients(n_max: usize) -> Vec<f64> {
    // p0[k] = P_k(0)
    let mut p0 = vec![0.0; n_max + 2];
    p0[0] = 1.0;
    for k in (0..n_max).step_by(2) {
        p0[k + 2] = -((k + 1) as f64) / ((k + 2) as f64) * p0[k];
    }
    (0..=n_max)
        .map(|n| if n % 2 == 1 { p0[n - 1] - p0[n + 1] } else { 0.0 })
        .collect()
}

/// The same coefficient written as `((2n+1)/(2n)) P^{(1,1)}_{n-1}(0)` with the
/// classical Jacobi polynomial on `[-1, 1]`.
pub fn sign_coefficient_jacobi_form(n: usize) -> f64 {
    assert!(n >= 1);
    (2 * n + 1) as f64 / (2 * n) as f64 * jacobi_p(n - 1, 1.0, 1.0, 0.0)
}

/// Solution of `(-Δ)^α u = sign(x₃)` on the unit sphere, summed up to
/// degree `n_terms`: `u = Σ_n (n(n+1))^{-α} a_n P_n(x₃)`.
pub fn sphere_series_solution(alpha: f64, x3: f64, n_terms: usize) -> Result<f64, OracleError> {
    Ok(legendre_sum(&sphere_series_weights(alpha, n_terms)?, x3))
}

/// Legendre coefficients `(n(n+1))^{-α} a_n` of the sphere solution.
pub fn sphere_series_weights(alpha: f64, n_terms: usize) -> Result<Vec<f64>, OracleError> {
    if n_terms > MAX_SERIES_TERMS {
        return Err(OracleError::TooManyTerms(n_terms));
    }
    let mut w = sign_legendre_coefficients(n_terms);
    for (n, c) in w.iter_mut().enumerate().skip(1) {
        *c *= ((n * (n + 1)) as f64).powf(-alpha);
    }
    Ok(w)
}

/// `Σ_n c_n P_n(x)` by the three-term recurrence.
pub fn legendre_sum(coeffs: &[f64], x: f64) -> f64 {
    let x = x.clamp(-1.0, 1.0);
    let (mut prev, mut cur) = (1.0, x);
    let mut sum = coeffs.first().copied().unwrap_or(0.0);
    for n in 1..coeffs.len() {
        sum += coeffs[n] * cur;
        let next = ((2 * n + 1) as f64 * x * cur - n as f64 * prev) / (n + 1) as f64;
        prev = cur;
        cur = next;
    }
    sum
}

/// Mean curvature and source term at a torus point with angles `(φ₁, φ₂)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusFields {
    pub mean_curvature: f64,
    pub source: f64,
}

/// `H = (R + 2r cos φ₁) / (2r (R + r cos φ₁))`, from the principal
/// curvatures `1/r` and `cos φ₁ / (R + r cos φ₁)`; `f = H cos φ₂`.
pub fn torus_fields(major: f64, minor: f64, phi1: f64, phi2: f64) -> Result<TorusFields, OracleError> {
    if !(minor > 0.0 && minor < major) {
        return Err(OracleError::TorusRadii);
    }
    let c = phi1.cos();
    let h = (major + 2.0 * minor * c) / (2.0 * minor * (major + minor * c));
    Ok(TorusFields {
        mean_curvature: h,
        source: h * phi2.cos(),
    })
}

/// Angles `(φ₁, φ₂)` of a point on (or near) the torus.
pub fn torus_angles(major: f64, x: &[f64; 3]) -> (f64, f64) {
    let rho = x[0].hypot(x[1]);
    (x[2].atan2(rho - major), x[1].atan2(x[0]))
}

/// `‖u_h - u_ref‖_{L²(M_h)}` with the seven-point rule; `u_ref` is evaluated
/// at quadrature points of the flat triangles and should apply any lift
/// onto the exact surface itself.
pub fn l2_error_on_mesh<T: Real>(
    mesh: &SurfaceMesh<T>,
    op: &AssembledOperator<T>,
    u_h: &[T],
    u_ref: impl Fn(&[T; 3]) -> T,
) -> Result<T, OracleError> {
    if u_h.len() != op.n() {
        return Err(OracleError::Length {
            expected: op.n(),
            got: u_h.len(),
        });
    }
    let nodal = op.extend(u_h);
    let rule = degree5_rule::<T>();
    let verts = mesh.vertices();
    let mut acc = T::zero();
    for (k, tri) in mesh.triangles().iter().enumerate() {
        let p = [verts[tri[0]], verts[tri[1]], verts[tri[2]]];
        let area = mesh.triangle_area(k);
        let mut local = T::zero();
        for (l, w) in &rule {
            let uh = l[0] * nodal[tri[0]] + l[1] * nodal[tri[1]] + l[2] * nodal[tri[2]];
            let d = uh - u_ref(&barycentric_point(&p, l));
            local += *w * d * d;
        }
        acc += area * local;
    }
    Ok(acc.sqrt())
}

/// Observed order from two `(Dof, error)` pairs with `√Dof` as the inverse
/// mesh size: `ln(e₁/e₂) / ln(√(Dof₂/Dof₁))`.
pub fn conv_rate(e1: f64, dof1: usize, e2: f64, dof2: usize) -> f64 {
    (e1 / e2).ln() / ((dof2 as f64 / dof1 as f64).sqrt()).ln()
}
