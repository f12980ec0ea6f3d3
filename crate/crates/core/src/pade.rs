//! Diagonal `(m, m)` Padé approximants of `(1 + t)^{-α}`.
//!
//! The approximant is stored through its two root families,
//!
//! ```text
//! r_m(t) = Π_i (1 + a_i t) / (1 + b_i t),   a_i = t_i(α,-α),  b_i = t_i(-α,α),
//! ```
//!
//! where `t_i(β,γ)` are the roots of the shifted Jacobi polynomial
//! `J_m^{β,γ}` on `[0, 1]`, and equivalently through the partial fractions
//! `r_m(t) = β_0 + Σ_i β_i / (1 + b_i t)` used by the operator algorithm.
//!
//! The a-priori constant `c'_α ≈ απ / (2 Γ(1-α) Γ(1+α))` is evaluated in
//! the closed form `sin(πα) / 2` using `Γ(1-α) Γ(1+α) = απ / sin(πα)`.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::jacobi::{gauss_jacobi, jacobi_roots, JacobiError};
use crate::scalar::Real;

/// Largest supported order. Beyond this the root families crowd the ends
/// of `[0, 1]` and double precision no longer separates them reliably.
pub const MAX_ORDER: usize = 64;

/// Largest order accepted by the Hankel-system oracle.
pub const MAX_ORACLE_ORDER: usize = 10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PadeError {
    #[error("Padé order must satisfy 1 <= m <= {max} (got {m})")]
    InvalidOrder { m: usize, max: usize },
    #[error("fractional exponent must lie in (0, 1) (got {0})")]
    InvalidExponent(f64),
    #[error("argument t = {0} is outside [0, 1] where the error bound holds")]
    OutOfDomain(f64),
    #[error("root families fail to interlace at index {index}")]
    Interlacing { index: usize },
    #[error("partial-fraction weight beta_{index} = {value} is not positive")]
    NonPositiveWeight { index: usize, value: f64 },
    #[error("Maclaurin oracle: singular Padé system at pivot {pivot}")]
    SingularSystem { pivot: usize },
    #[error(transparent)]
    Jacobi(#[from] JacobiError),
}

/// `(m, m)` Padé approximant `r_m` of `(1+t)^{-α}`.
#[derive(Debug, Clone)]
pub struct PadeApproximant<T> {
    m: usize,
    alpha: T,
    num_roots: Vec<T>,
    den_roots: Vec<T>,
    beta: Vec<T>,
    // Gauss-Jacobi rule for the remainder integral, built on first use.
    quadrature: OnceLock<(Vec<T>, Vec<T>)>,
}

impl<T: PartialEq> PartialEq for PadeApproximant<T> {
    fn eq(&self, other: &Self) -> bool {
        self.m == other.m
            && self.alpha == other.alpha
            && self.num_roots == other.num_roots
            && self.den_roots == other.den_roots
            && self.beta == other.beta
    }
}

fn check_alpha<T: Real>(alpha: T) -> Result<(), PadeError> {
    if !(alpha > T::zero() && alpha < T::one()) {
        return Err(PadeError::InvalidExponent(alpha.to_f64_lossy()));
    }
    Ok(())
}

impl<T: Real> PadeApproximant<T> {
    /// Builds `r_m` for `(1+t)^{-α}`, checking interlacing and positivity
    /// of the partial-fraction weights.
    pub fn new(m: usize, alpha: T) -> Result<Self, PadeError> {
        if m == 0 || m > MAX_ORDER {
            return Err(PadeError::InvalidOrder { m, max: MAX_ORDER });
        }
        check_alpha(alpha)?;
        let num_roots = jacobi_roots(m, alpha, -alpha)?;
        let den_roots = jacobi_roots(m, -alpha, alpha)?;

        for i in 0..m {
            if !(num_roots[i] < den_roots[i]) {
                return Err(PadeError::Interlacing { index: i });
            }
            if i + 1 < m && !(den_roots[i] < num_roots[i + 1]) {
                return Err(PadeError::Interlacing { index: i });
            }
        }

        let mut beta = Vec::with_capacity(m + 1);
        beta.push(num_roots.iter().zip(&den_roots).map(|(&a, &b)| a / b).product());
        for (i, &bi) in den_roots.iter().enumerate() {
            let numer: T = num_roots.iter().map(|&a| T::one() - a / bi).product();
            let denom: T = den_roots
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &b)| T::one() - b / bi)
                .product();
            beta.push(numer / denom);
        }
        if let Some((index, &value)) = beta.iter().enumerate().find(|(_, &b)| !(b > T::zero())) {
            return Err(PadeError::NonPositiveWeight {
                index,
                value: value.to_f64_lossy(),
            });
        }

        Ok(Self {
            m,
            alpha,
            num_roots,
            den_roots,
            beta,
            quadrature: OnceLock::new(),
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    /// `t_1(α,-α) < … < t_m(α,-α)`
    pub fn num_roots(&self) -> &[T] {
        &self.num_roots
    }

    /// `t_1(-α,α) < … < t_m(-α,α)`
    pub fn den_roots(&self) -> &[T] {
        &self.den_roots
    }

    /// Partial-fraction weights `β_0, …, β_m`.
    pub fn beta(&self) -> &[T] {
        &self.beta
    }

    /// Product form. Decreasing on `[0, ∞)` with values in `(0, 1]`.
    pub fn eval(&self, t: T) -> T {
        self.num_roots
            .iter()
            .zip(&self.den_roots)
            .map(|(&a, &b)| (T::one() + a * t) / (T::one() + b * t))
            .product()
    }

    /// Partial-fraction form; the form mirrored by the operator algorithm.
    pub fn eval_partial(&self, t: T) -> T {
        let tail: T = self.beta[1..]
            .iter()
            .zip(&self.den_roots)
            .map(|(&w, &b)| w / (T::one() + b * t))
            .sum();
        self.beta[0] + tail
    }

    /// `r_m(t) - (1+t)^{-α}` evaluated without cancellation.
    ///
    /// With `(1+t)^{-α} = 1 - t g(t)` and `g` the Stieltjes transform of the
    /// weight `s^α (1-s)^{-α}`, `r_m` is `1 - t` times the `m`-point Gauss
    /// rule for `g`, whose nodes are the denominator roots. The Gauss
    /// remainder for `1 / (1 + ts)` then gives
    ///
    /// ```text
    /// r_m(t) - (1+t)^{-α} = α t^{2m+1} / Q_m(t)^2 · E[π_m(s)^2 / (1 + ts)],
    /// ```
    ///
    /// with `π_m(s) = Π (s - b_i)`, `Q_m(t) = Π (1 + b_i t)` and the
    /// expectation over the normalised weight. The expectation is a smooth
    /// integral, evaluated by Gauss–Jacobi quadrature.
    pub fn remainder(&self, t: T) -> Result<T, PadeError> {
        if t == T::zero() {
            return Ok(T::zero());
        }
        if self.quadrature.get().is_none() {
            let rule = gauss_jacobi(self.m + 60, -self.alpha, self.alpha)?;
            let _ = self.quadrature.set(rule);
        }
        let (nodes, weights) = self.quadrature.get().expect("quadrature initialised");
        let expectation: T = nodes
            .iter()
            .zip(weights)
            .map(|(&s, &w)| {
                let pi: T = self.den_roots.iter().map(|&b| s - b).product();
                w * pi * pi / (T::one() + t * s)
            })
            .sum();
        let q: T = self.den_roots.iter().map(|&b| T::one() + b * t).product();
        Ok(self.alpha * t.powi(2 * self.m as i32 + 1) / (q * q) * expectation)
    }

    /// Coefficients (ascending powers) of the numerator and denominator
    /// polynomials expanded from the root families, both normalised to 1 at 0.
    pub fn coefficients(&self) -> PadeCoefficients<T> {
        PadeCoefficients {
            numerator: expand_unit_roots(&self.num_roots),
            denominator: expand_unit_roots(&self.den_roots),
        }
    }
}

/// `c'_α = sin(πα) / 2`.
pub fn pade_constant<T: Real>(alpha: T) -> T {
    (T::pi() * alpha).sin() / T::lit(2.0)
}

/// A-priori bound `c'_α 2^{-4m} t^{2m+1} 2^{-mt}` on `r_m(t) - (1+t)^{-α}`,
/// valid for `t ∈ [0, 1]`.
pub fn pade_error_bound<T: Real>(m: usize, alpha: T, t: T) -> Result<T, PadeError> {
    check_alpha(alpha)?;
    if !(t >= T::zero() && t <= T::one()) {
        return Err(PadeError::OutOfDomain(t.to_f64_lossy()));
    }
    let mf = T::from_usize_lossy(m);
    let two = T::lit(2.0);
    Ok(pade_constant(alpha) * two.powf(-T::lit(4.0) * mf - mf * t) * t.powi(2 * m as i32 + 1))
}

/// Numerator and denominator coefficients in ascending powers of `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct PadeCoefficients<T> {
    pub numerator: Vec<T>,
    pub denominator: Vec<T>,
}

impl<T: Real> PadeCoefficients<T> {
    pub fn eval(&self, t: T) -> T {
        horner(&self.numerator, t) / horner(&self.denominator, t)
    }

    /// Maclaurin coefficients of `P / Q` through `t^order`.
    pub fn series(&self, order: usize) -> Vec<T> {
        series_quotient(&self.numerator, &self.denominator, order)
    }
}

pub(crate) fn horner<T: Real>(coeffs: &[T], t: T) -> T {
    coeffs.iter().rev().fold(T::zero(), |acc, &c| acc * t + c)
}

/// Coefficients of `Π (1 + r_i t)`.
fn expand_unit_roots<T: Real>(roots: &[T]) -> Vec<T> {
    let mut c = vec![T::one()];
    for &r in roots {
        c.push(T::zero());
        for k in (1..c.len()).rev() {
            let prev = c[k - 1];
            c[k] += r * prev;
        }
    }
    c
}

/// Power-series quotient `num / den` through `t^order`; `den[0]` must be non-zero.
pub fn series_quotient<T: Real>(num: &[T], den: &[T], order: usize) -> Vec<T> {
    let mut s = Vec::with_capacity(order + 1);
    for j in 0..=order {
        let mut v = num.get(j).copied().unwrap_or(T::zero());
        for k in 1..=j.min(den.len().saturating_sub(1)) {
            v -= den[k] * s[j - k];
        }
        s.push(v / den[0]);
    }
    s
}

/// Maclaurin coefficients of `(1+t)^{-α}` through `t^order`:
/// `(-1)^j (α)_j / j!`.
pub fn binomial_series<T: Real>(alpha: T, order: usize) -> Vec<T> {
    let mut c = Vec::with_capacity(order + 1);
    let mut v = T::one();
    c.push(v);
    for j in 0..order {
        let jf = T::from_usize_lossy(j);
        v = v * (-alpha - jf) / (jf + T::one());
        c.push(v);
    }
    c
}

/// Independent construction of `r_m` from the Maclaurin coefficients alone:
/// the denominator solves the classical Padé system
/// `Σ_k q_k c_{j-k} = 0, j = m+1..2m` with `q_0 = 1`, and the numerator is
/// the truncated product `p_j = Σ_{k<=j} q_k c_{j-k}`.
///
/// The system is badly conditioned and the numerator sum cancels heavily, so
/// everything is done in exact rational arithmetic on the binary value of
/// `α` and rounded once at the end.
pub fn maclaurin_pade_oracle<T: Real>(m: usize, alpha: T) -> Result<PadeCoefficients<T>, PadeError> {
    if m == 0 || m > MAX_ORACLE_ORDER {
        return Err(PadeError::InvalidOrder {
            m,
            max: MAX_ORACLE_ORDER,
        });
    }
    check_alpha(alpha)?;
    let a = BigRational::from_float(alpha.to_f64_lossy()).ok_or(PadeError::InvalidExponent(alpha.to_f64_lossy()))?;
    let mut c = Vec::with_capacity(2 * m + 1);
    c.push(BigRational::one());
    for j in 0..2 * m {
        let jr = BigRational::from_integer(BigInt::from(j));
        let next = &c[j] * (-&a - &jr) / (jr + BigRational::one());
        c.push(next);
    }
    let coef = |i: isize| {
        if i < 0 {
            BigRational::zero()
        } else {
            c[i as usize].clone()
        }
    };

    let mut mat = vec![vec![BigRational::zero(); m]; m];
    let mut rhs = vec![BigRational::zero(); m];
    for r in 0..m {
        let j = (m + 1 + r) as isize;
        for k in 1..=m {
            mat[r][k - 1] = coef(j - k as isize);
        }
        rhs[r] = -coef(j);
    }
    let q_tail = solve_exact(mat, rhs)?;
    let mut q = vec![BigRational::one()];
    q.extend(q_tail);
    let p: Vec<BigRational> = (0..=m)
        .map(|j| (0..=j).fold(BigRational::zero(), |acc, k| acc + &q[k] * &c[j - k]))
        .collect();
    let round = |v: &[BigRational]| v.iter().map(|x| T::lit(x.to_f64().unwrap_or(f64::NAN))).collect();
    Ok(PadeCoefficients {
        numerator: round(&p),
        denominator: round(&q),
    })
}

fn solve_exact(mut a: Vec<Vec<BigRational>>, mut b: Vec<BigRational>) -> Result<Vec<BigRational>, PadeError> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .find(|&r| !a[r][col].is_zero())
            .ok_or(PadeError::SingularSystem { pivot: col })?;
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] / &a[col][col];
            for k in col..n {
                let v = &f * &a[col][k];
                a[r][k] -= v;
            }
            let v = &f * &b[col];
            b[r] -= v;
        }
    }
    let mut x = vec![BigRational::zero(); n];
    for r in (0..n).rev() {
        let mut v = b[r].clone();
        for k in r + 1..n {
            v -= &a[r][k] * &x[k];
        }
        x[r] = v / &a[r][r];
    }
    Ok(x)
}

/// Explicit hypergeometric coefficients
/// `P_m(t) = ₂F₁(-m, α-m; -2m; -t)` and `Q_m(t) = ₂F₁(-m, -α-m; -2m; -t)`.
pub fn explicit_pade_coefficients<T: Real>(m: usize, alpha: T) -> PadeCoefficients<T> {
    let build = |shift: T| {
        let mf = T::from_usize_lossy(m);
        let mut out = Vec::with_capacity(m + 1);
        let mut term = T::one();
        out.push(term);
        for j in 0..m {
            let jf = T::from_usize_lossy(j);
            // (-m)_j (shift - m)_j / (j! (-2m)_j) (-1)^j
            term = term * (-mf + jf) * (shift - mf + jf) / ((jf + T::one()) * (-T::lit(2.0) * mf + jf)) * -T::one();
            out.push(term);
        }
        out
    };
    PadeCoefficients {
        numerator: build(alpha),
        denominator: build(-alpha),
    }
}
