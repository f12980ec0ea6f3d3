//! Temporal grid of the operator-product factorisation and the scalar
//! transfer function `μ(λ)` that the operator algorithm applies to every
//! eigenpair.
//!
//! The factorisation writes `λ^{-α}` as
//! `λ̂^{-α} Π_k [1 + θ_k(λ)]^{-α}` with
//! `θ_k(λ) = τ_k (λ - λ̂) / (λ̂ + t_k (λ - λ̂))` and approximates each factor
//! by `r_m(θ_k)`. The nodes are chosen so that `θ_k(Λ) = 1` on every
//! unclipped step: `t_n = (2^n - 1) λ̂ / (Λ - λ̂)`, clipped at 1.

use thiserror::Error;

use crate::pade::{pade_constant, PadeApproximant, PadeError};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SchemeError {
    #[error("spectral shift must be positive and finite (got {0})")]
    InvalidShift(f64),
    #[error("upper spectral bound {lambda_max} must exceed the shift {lambda_hat}")]
    DegenerateGrid { lambda_hat: f64, lambda_max: f64 },
}

/// Nodes `0 = t_0 < t_1 < … < t_{L+1} = 1` for a shift `λ̂` and bound `Λ`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid<T> {
    lambda_hat: T,
    lambda_max: T,
    nodes: Vec<T>,
}

impl<T: Real> TimeGrid<T> {
    pub fn new(lambda_hat: T, lambda_max: T) -> Result<Self, SchemeError> {
        if !(lambda_hat > T::zero() && lambda_hat.is_finite()) {
            return Err(SchemeError::InvalidShift(lambda_hat.to_f64_lossy()));
        }
        if !(lambda_max > lambda_hat && lambda_max.is_finite()) {
            return Err(SchemeError::DegenerateGrid {
                lambda_hat: lambda_hat.to_f64_lossy(),
                lambda_max: lambda_max.to_f64_lossy(),
            });
        }
        let gap = lambda_max - lambda_hat;
        let mut nodes = vec![T::zero()];
        let mut pow = T::one();
        loop {
            pow *= T::lit(2.0);
            let reach = (pow - T::one()) * lambda_hat;
            if reach >= gap {
                nodes.push(T::one());
                break;
            }
            nodes.push(reach / gap);
        }
        Ok(Self {
            lambda_hat,
            lambda_max,
            nodes,
        })
    }

    pub fn lambda_hat(&self) -> T {
        self.lambda_hat
    }

    pub fn lambda_max(&self) -> T {
        self.lambda_max
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    /// Number of factors `L + 1`.
    pub fn num_steps(&self) -> usize {
        self.nodes.len() - 1
    }

    /// `τ_k = t_{k+1} - t_k`, `k = 0..=L`.
    pub fn steps(&self) -> Vec<T> {
        self.nodes.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// `θ_k(λ)`
    pub fn theta(&self, k: usize, lambda: T) -> T {
        let d = lambda - self.lambda_hat;
        let tau = self.nodes[k + 1] - self.nodes[k];
        tau * d / (self.lambda_hat + self.nodes[k] * d)
    }

    pub fn covers(&self, lambda: T) -> bool {
        lambda >= self.lambda_hat && lambda <= self.lambda_max
    }
}

/// Value of `μ(λ)` together with a flag set when `λ` lies above the bound
/// the grid was built for (the error bounds then no longer apply).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarMu<T> {
    pub value: T,
    pub beyond_bound: bool,
}

/// `μ_{L+1}(λ)`, evaluated exactly as the operator algorithm acts on an
/// eigenvector with eigenvalue `λ`: each step multiplies by
/// `β_0 + Σ_i β_i ((1-t_l)λ̂ + t_l λ) / ((1-s_i)λ̂ + s_i λ)` with
/// `s_i = t_l + b_i τ_l`.
pub fn scalar_mu<T: Real>(pade: &PadeApproximant<T>, grid: &TimeGrid<T>, lambda: T) -> ScalarMu<T> {
    let lh = grid.lambda_hat();
    let beta = pade.beta();
    let mut mu = lh.powf(-pade.alpha());
    for w in grid.nodes().windows(2) {
        let (t, tau) = (w[0], w[1] - w[0]);
        let rhs = (T::one() - t) * lh + t * lambda;
        let mut acc = beta[0];
        for (&wi, &b) in beta[1..].iter().zip(pade.den_roots()) {
            let s = t + b * tau;
            acc += wi * rhs / ((T::one() - s) * lh + s * lambda);
        }
        mu *= acc;
    }
    ScalarMu {
        value: mu,
        beyond_bound: lambda > grid.lambda_max(),
    }
}

/// The literal product recurrence `μ_n = r_m(θ_{n-1}(λ)) μ_{n-1}` using the
/// product form of `r_m`; a cross-check for [`scalar_mu`].
pub fn scalar_mu_product<T: Real>(pade: &PadeApproximant<T>, grid: &TimeGrid<T>, lambda: T) -> T {
    (0..grid.num_steps())
        .map(|k| pade.eval(grid.theta(k, lambda)))
        .fold(grid.lambda_hat().powf(-pade.alpha()), |mu, r| mu * r)
}

/// Signed error `μ(λ) - λ^{-α}` evaluated without cancellation.
///
/// Since `1 + θ_k(λ)` telescopes to `λ / λ̂` over the grid,
/// `μ(λ) / λ^{-α} = Π_k (1 + R_m(θ_k) (1 + θ_k)^α)` with `R_m` the Padé
/// remainder, so only the small remainders enter and the product is
/// accumulated through `log1p` / `expm1`. Requires every `θ_k` in `[0, 1]`,
/// which holds for `λ̂ <= λ <= Λ`.
pub fn scalar_mu_error<T: Real>(pade: &PadeApproximant<T>, grid: &TimeGrid<T>, lambda: T) -> Result<T, PadeError> {
    let alpha = pade.alpha();
    let mut log_ratio = T::zero();
    for k in 0..grid.num_steps() {
        let th = grid.theta(k, lambda);
        let rel = pade.remainder(th)? * (T::one() + th).powf(alpha);
        log_ratio += rel.ln_1p();
    }
    Ok(lambda.powf(-alpha) * log_ratio.exp_m1())
}

/// `ĉ = (α + 2) 2^{α-1} sin(πα) / α`.
pub fn scheme_constant<T: Real>(alpha: T) -> T {
    theorem_constant(alpha, T::lit(2.0))
}

/// `c̃ = (α + ν) 2^α c'_α / α` for a grid with step ratio at most `ν`.
pub fn theorem_constant<T: Real>(alpha: T, nu: T) -> T {
    (alpha + nu) * T::lit(2.0).powf(alpha) * pade_constant(alpha) / alpha
}

/// Per-eigenvalue bound `c̃ λ̂^{-α} 2^{-5m}` on `|λ^{-α} - μ(λ)|`.
pub fn theorem_error_bound<T: Real>(m: usize, alpha: T, nu: T, lambda_hat: T) -> T {
    theorem_constant(alpha, nu) * lambda_hat.powf(-alpha) * T::lit(2.0).powf(-T::lit(5.0) * T::from_usize_lossy(m))
}

/// Bound in terms of the total number of solves:
/// `ĉ λ̂^{-α} 32^{-N_s / ⌈log₂(Λ/λ̂)⌉}` with `N_s = m (L + 1)`.
pub fn scheme_error_bound<T: Real>(m: usize, alpha: T, lambda_hat: T, lambda_max: T) -> Result<T, SchemeError> {
    let grid = TimeGrid::new(lambda_hat, lambda_max)?;
    let steps = grid.num_steps();
    let total_solves = m * steps;
    let exponent = T::from_usize_lossy(total_solves) / T::from_usize_lossy(steps);
    Ok(scheme_constant(alpha) * lambda_hat.powf(-alpha) * T::lit(32.0).powf(-exponent))
}
