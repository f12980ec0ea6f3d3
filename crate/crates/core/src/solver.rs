//! Application of `(M^{-1}S)^{-α}` to a vector through `m·(L+1)` sparse
//! symmetric positive definite solves.

use rayon::prelude::*;
use thiserror::Error;

use crate::fem::{deflate_in_place, AssembledOperator};
use crate::mesh::ProblemMode;
use crate::pade::{PadeApproximant, PadeError};
use crate::scalar::{dot, Real};
use crate::scheme::{scheme_error_bound, SchemeError, TimeGrid};
use crate::sparse::{pcg, CgConfig, CgError, CsrMatrix};

/// Largest problem size for which the inverse-power check of `λ̂` runs.
pub const LAMBDA_MIN_PROBE_LIMIT: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LambdaMax<T> {
    /// Power iteration on the pencil, times the safety factor.
    Auto,
    Value(T),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig<T> {
    pub lambda_hat: T,
    pub lambda_max: LambdaMax<T>,
    pub m: usize,
    pub cg_rel_tol: T,
    /// `None` selects [`CgConfig::default_max_iter`].
    pub cg_max_iter: Option<usize>,
    pub power_iters: usize,
    pub safety: T,
    /// Check `λ̂` against an inverse-power estimate of the smallest
    /// eigenvalue before solving (skipped above [`LAMBDA_MIN_PROBE_LIMIT`]).
    pub probe_lambda_min: bool,
}

impl<T: Real> SolverConfig<T> {
    pub fn new(lambda_hat: T, m: usize) -> Self {
        Self {
            lambda_hat,
            lambda_max: LambdaMax::Auto,
            m,
            cg_rel_tol: T::lit(1e-12),
            cg_max_iter: None,
            power_iters: 30,
            safety: T::lit(1.1),
            probe_lambda_min: true,
        }
    }

    pub fn with_lambda_max(mut self, lambda_max: T) -> Self {
        self.lambda_max = LambdaMax::Value(lambda_max);
        self
    }

    fn validate(&self) -> Result<(), SolverError> {
        let bad = |what: &str| Err(SolverError::InvalidConfig(what.to_string()));
        if !(self.lambda_hat > T::zero() && self.lambda_hat.is_finite()) {
            return bad("lambda_hat must be positive and finite");
        }
        if !(self.cg_rel_tol > T::zero() && self.cg_rel_tol < T::one()) {
            return bad("cg_rel_tol must lie in (0, 1)");
        }
        if !(self.safety >= T::one() && self.safety.is_finite()) {
            return bad("safety factor must be at least 1");
        }
        if self.power_iters == 0 {
            return bad("power_iters must be positive");
        }
        if let LambdaMax::Value(v) = self.lambda_max {
            if !(v > T::zero() && v.is_finite()) {
                return bad("lambda_max must be positive and finite");
            }
        }
        Ok(())
    }

    fn cg(&self, n: usize) -> CgConfig<T> {
        let mut c = CgConfig::new(self.cg_rel_tol, n);
        if let Some(k) = self.cg_max_iter {
            c.max_iter = k;
        }
        c
    }
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("vector has length {got}, operator has {expected} degrees of freedom")]
    Length { expected: usize, got: usize },
    #[error("right-hand side has non-zero mean ({0:.3e} relative) in zero-mean mode")]
    NotMeanFree(f64),
    #[error("shift {lambda_hat} exceeds the smallest eigenvalue estimate {estimate}; try lambda_hat <= {suggested}")]
    ShiftAboveSpectrum {
        lambda_hat: f64,
        estimate: f64,
        suggested: f64,
    },
    #[error("step {step}, solve {index}: shifted parameter {s} is outside (0, 1)")]
    ParameterOutsideUnit { step: usize, index: usize, s: f64 },
    #[error("step {step}, solve {index}: {source}")]
    Solve { step: usize, index: usize, source: CgError },
    #[error("spectral estimate: {0}")]
    Estimate(CgError),
    #[error(transparent)]
    Pade(#[from] PadeError),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
}

/// Power-iteration estimate of the largest eigenvalue of `M^{-1}S`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaMaxEstimate<T> {
    /// The value to use: `min(rayleigh · safety, ceiling)`.
    pub value: T,
    pub rayleigh: T,
    /// `2 max_i Σ_j |S_ij| / M_ii`, an upper bound whenever `M ⪰ ½ diag(M)`
    /// (true for the linear-element mass matrix and for any diagonal `M`).
    pub ceiling: T,
}

/// Deterministic start vector with components along every eigenvector.
fn start_vector<T: Real>(op: &AssembledOperator<T>) -> Vec<T> {
    let mut x: Vec<T> = (0..op.n())
        .map(|i| T::lit(1.0 + 0.5 * ((i as f64) * 0.754_877_666 + 0.3).sin()))
        .collect();
    if op.mode() == ProblemMode::ZeroMean {
        deflate_in_place(op, &mut x);
    }
    x
}

fn m_normalize<T: Real>(op: &AssembledOperator<T>, x: &mut [T]) -> T {
    let nrm = op.m_norm(x);
    if nrm > T::zero() {
        x.iter_mut().for_each(|v| *v /= nrm);
    }
    nrm
}

/// `1e-10`, or a hundred ulps where the scalar type cannot resolve that.
fn working_tol<T: Real>() -> T {
    T::lit(1e-10).max(T::lit(100.0) * T::epsilon())
}

/// `2 max_i Σ_j |S_ij| / M_ii`.
pub fn gershgorin_ceiling<T: Real>(op: &AssembledOperator<T>) -> T {
    let d = op.mass().diagonal();
    let s = op.stiffness();
    (0..op.n())
        .map(|i| T::lit(2.0) * s.row(i).1.iter().map(|v| v.abs()).sum::<T>() / d[i])
        .fold(T::zero(), T::max)
}

pub fn estimate_lambda_max<T: Real>(
    op: &AssembledOperator<T>,
    cfg: &SolverConfig<T>,
) -> Result<LambdaMaxEstimate<T>, SolverError> {
    cfg.validate()?;
    let ceiling = gershgorin_ceiling(op);
    let mass_diag = op.mass().diagonal();
    let mcfg = CgConfig::new(working_tol::<T>(), op.n());
    let mut x = start_vector(op);
    let mut y = vec![T::zero(); op.n()];
    m_normalize(op, &mut x);
    let mut rayleigh = T::zero();
    for _ in 0..cfg.power_iters {
        let sx = op.stiffness().apply(&x);
        rayleigh = dot(&sx, &x);
        y.copy_from_slice(&x);
        pcg(op.mass(), &mass_diag, &sx, &mut y, &mcfg).map_err(SolverError::Estimate)?;
        if op.mode() == ProblemMode::ZeroMean {
            deflate_in_place(op, &mut y);
        }
        if m_normalize(op, &mut y) == T::zero() {
            break;
        }
        std::mem::swap(&mut x, &mut y);
    }
    let rayleigh = rayleigh.max(dot(&op.stiffness().apply(&x), &x));
    let value = (rayleigh * cfg.safety).min(ceiling);
    Ok(LambdaMaxEstimate {
        value,
        rayleigh,
        ceiling,
    })
}

/// Rayleigh quotient after `iters` steps of inverse iteration on the pencil,
/// restricted to mean-free vectors in zero-mean mode. It is never below
/// the smallest eigenvalue.
pub fn estimate_lambda_min<T: Real>(op: &AssembledOperator<T>, iters: usize, cg_tol: T) -> Result<T, SolverError> {
    let s = op.stiffness();
    let sdiag = s.diagonal();
    let cfg = CgConfig::new(cg_tol, op.n());
    let mut x = start_vector(op);
    m_normalize(op, &mut x);
    for _ in 0..iters {
        let rhs = op.mass().apply(&x);
        let mut y = x.clone();
        // Any vector gives a Rayleigh quotient above the smallest eigenvalue,
        // so an inexact solve only costs tightness.
        match pcg(s, &sdiag, &rhs, &mut y, &cfg) {
            Ok(_) => {}
            Err(CgError::NotConverged {
                iterations, residual, ..
            }) => {
                log::debug!("inverse power step stopped at residual {residual:.2e} after {iterations} iterations");
            }
            // rounding along the null space of a zero-mean stiffness; the
            // iterate so far is still usable
            Err(CgError::Breakdown { iteration }) if iteration > 0 => {
                log::debug!("inverse power step broke down at iteration {iteration}");
            }
            Err(e) => return Err(SolverError::Estimate(e)),
        }
        if op.mode() == ProblemMode::ZeroMean {
            deflate_in_place(op, &mut y);
        }
        if m_normalize(op, &mut y) == T::zero() {
            break;
        }
        x = y;
    }
    Ok(dot(&s.apply(&x), &x) / op.m_inner(&x, &x))
}

/// Iteration count and final relative residual of one shifted solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveRecord {
    pub step: usize,
    pub index: usize,
    pub s: f64,
    pub iterations: usize,
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub struct FracSolveResult<T> {
    pub solution: Vec<T>,
    pub time_grid: TimeGrid<T>,
    pub lambda_max: T,
    pub lambda_min_estimate: Option<T>,
    pub total_solves: usize,
    pub solves: Vec<SolveRecord>,
    /// `ĉ λ̂^{-α} 32^{-N_s/(L+1)} ‖f_h‖_M`.
    pub a_priori_bound: T,
}

/// A-priori error bound in the `M`-norm for an input of norm `f_norm`.
pub fn apriori_bound<T: Real>(m: usize, alpha: T, lambda_hat: T, lambda_max: T, f_norm: T) -> Result<T, SolverError> {
    Ok(scheme_error_bound(m, alpha, lambda_hat, lambda_max)? * f_norm)
}

/// The shifted-operator matrix `(1-s)λ̂M + sS`.
pub fn shifted_matrix<T: Real>(op: &AssembledOperator<T>, lambda_hat: T, s: T) -> CsrMatrix<T> {
    op.mass()
        .lin_comb((T::one() - s) * lambda_hat, op.stiffness(), s)
        .expect("mass and stiffness share one pattern")
}

/// `U_{L+1} ≈ (M^{-1}S)^{-α} f`.
pub fn fractional_apply<T: Real>(
    op: &AssembledOperator<T>,
    f: &[T],
    alpha: T,
    cfg: &SolverConfig<T>,
) -> Result<FracSolveResult<T>, SolverError> {
    cfg.validate()?;
    let n = op.n();
    if f.len() != n {
        return Err(SolverError::Length {
            expected: n,
            got: f.len(),
        });
    }
    let pade = PadeApproximant::new(cfg.m, alpha)?;
    let f_norm = op.m_norm(f);
    if op.mode() == ProblemMode::ZeroMean && f_norm > T::zero() {
        let total: T = op.mass_ones().iter().copied().sum();
        let rel = dot(op.mass_ones(), f).abs() / (total.sqrt() * f_norm);
        if rel > working_tol::<T>() {
            return Err(SolverError::NotMeanFree(rel.to_f64_lossy()));
        }
    }

    let lambda_hat = cfg.lambda_hat;
    let lambda_max = match cfg.lambda_max {
        LambdaMax::Value(v) => v,
        LambdaMax::Auto => estimate_lambda_max(op, cfg)?.value,
    };
    let lambda_min_estimate = if cfg.probe_lambda_min && n <= LAMBDA_MIN_PROBE_LIMIT {
        let est = estimate_lambda_min(op, 10, T::lit(1e-8).max(T::lit(100.0) * T::epsilon()))?;
        if lambda_hat > est * (T::one() + T::lit(1e-8)) {
            return Err(SolverError::ShiftAboveSpectrum {
                lambda_hat: lambda_hat.to_f64_lossy(),
                estimate: est.to_f64_lossy(),
                suggested: (T::lit(0.95) * est).to_f64_lossy(),
            });
        }
        log::debug!(
            "smallest eigenvalue estimate {est}; suggested shift {}",
            T::lit(0.95) * est
        );
        Some(est)
    } else {
        if cfg.probe_lambda_min {
            log::warn!("{n} unknowns: skipping the smallest-eigenvalue check, trusting lambda_hat = {lambda_hat}");
        }
        None
    };
    let grid = TimeGrid::new(lambda_hat, lambda_max)?;
    let nodes = grid.nodes().to_vec();
    let beta = pade.beta();
    let cg = cfg.cg(n);

    for (l, w) in nodes.windows(2).enumerate() {
        let tau = w[1] - w[0];
        for (i, &b) in pade.den_roots().iter().enumerate() {
            let s = w[0] + b * tau;
            if !(s > T::zero() && s < T::one()) {
                return Err(SolverError::ParameterOutsideUnit {
                    step: l,
                    index: i,
                    s: s.to_f64_lossy(),
                });
            }
        }
    }

    let mut u: Vec<T> = f.iter().map(|&v| v * lambda_hat.powf(-alpha)).collect();
    let mut solves = Vec::with_capacity(cfg.m * grid.num_steps());
    for (l, w) in nodes.windows(2).enumerate() {
        let (t, tau) = (w[0], w[1] - w[0]);
        let mut rhs = op.mass().apply(&u);
        let su = op.stiffness().apply(&u);
        let cm = (T::one() - t) * lambda_hat;
        for (r, &sv) in rhs.iter_mut().zip(&su) {
            *r = cm * *r + t * sv;
        }
        let solved: Vec<Result<(Vec<T>, SolveRecord), SolverError>> = pade
            .den_roots()
            .par_iter()
            .enumerate()
            .map(|(i, &b)| {
                let s = t + b * tau;
                let a = shifted_matrix(op, lambda_hat, s);
                let mut x = u.clone();
                let stats = pcg(&a, &a.diagonal(), &rhs, &mut x, &cg).map_err(|source| SolverError::Solve {
                    step: l,
                    index: i,
                    source,
                })?;
                Ok((
                    x,
                    SolveRecord {
                        step: l,
                        index: i,
                        s: s.to_f64_lossy(),
                        iterations: stats.iterations,
                        residual: stats.residual,
                    },
                ))
            })
            .collect();
        let mut next: Vec<T> = u.iter().map(|&v| beta[0] * v).collect();
        for (res, &wi) in solved.into_iter().zip(&beta[1..]) {
            let (x, rec) = res?;
            for (nv, &xv) in next.iter_mut().zip(&x) {
                *nv += wi * xv;
            }
            solves.push(rec);
        }
        if op.mode() == ProblemMode::ZeroMean {
            deflate_in_place(op, &mut next);
        }
        u = next;
    }

    let a_priori_bound = apriori_bound(cfg.m, alpha, lambda_hat, lambda_max, f_norm)?;
    Ok(FracSolveResult {
        solution: u,
        total_solves: solves.len(),
        time_grid: grid,
        lambda_max,
        lambda_min_estimate,
        solves,
        a_priori_bound,
    })
}
