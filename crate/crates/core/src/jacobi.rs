//! Jacobi polynomials on `[0, 1]`: roots and Gauss quadrature via the
//! Golub–Welsch eigenproblem, plus the classical three-term evaluator.
//!
//! The shifted polynomial `J_m^{β,γ}(t)` is orthogonal for the weight
//! `(1-t)^β t^γ` and relates to the classical `P_m^{(β,γ)}(x)` on `[-1, 1]`
//! through `t = (1 + x) / 2`, with the parameters kept in the same order.

use thiserror::Error;

use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JacobiError {
    #[error("Jacobi parameters must exceed -1 (got beta = {beta}, gamma = {gamma})")]
    InvalidParameters { beta: f64, gamma: f64 },
    #[error("tridiagonal eigensolver did not converge for eigenvalue {index} after {iterations} sweeps")]
    NotConverged { index: usize, iterations: usize },
    #[error("computed Jacobi root {index} = {value} is not strictly inside (0, 1) or not increasing")]
    BadRoot { index: usize, value: f64 },
}

const MAX_QL_SWEEPS: usize = 60;

/// Entries of the symmetric Jacobi matrix of the monic classical recurrence
/// for weight `(1-x)^a (1+x)^b` on `[-1, 1]`: `(diagonal, off_diagonal)`,
/// where `off_diagonal[k]` couples rows `k` and `k + 1`.
fn jacobi_matrix<T: Real>(n: usize, a: T, b: T) -> (Vec<T>, Vec<T>) {
    let one = T::one();
    let two = T::lit(2.0);
    let four = T::lit(4.0);
    let ab = a + b;
    let mut diag = Vec::with_capacity(n);
    let mut off = Vec::with_capacity(n.saturating_sub(1));
    for k in 0..n {
        let kf = T::from_usize_lossy(k);
        let d = if k == 0 {
            // (b^2 - a^2) / ((a+b)(a+b+2)) with the removable a+b factor cancelled.
            (b - a) / (ab + two)
        } else {
            let s = two * kf + ab;
            (b * b - a * a) / (s * (s + two))
        };
        diag.push(d);
    }
    for k in 1..n {
        let kf = T::from_usize_lossy(k);
        let s = two * kf + ab;
        let v = if k == 1 {
            // (k + a + b) / (2k + a + b - 1) equals one at k = 1.
            four * (one + a) * (one + b) / (s * s * (s + one))
        } else {
            four * kf * (kf + a) * (kf + b) * (kf + ab) / (s * s * (s + one) * (s - one))
        };
        off.push(v.sqrt());
    }
    (diag, off)
}

/// Implicit-shift QL on a symmetric tridiagonal matrix. Returns the
/// eigenvalues and, when requested, the first component of each
/// normalised eigenvector (input order, unsorted).
pub(crate) fn tridiagonal_eigen<T: Real>(
    diag: &[T],
    off: &[T],
    want_first_components: bool,
) -> Result<(Vec<T>, Vec<T>), JacobiError> {
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut e = vec![T::zero(); n];
    e[..off.len()].copy_from_slice(off);
    let mut z = vec![T::zero(); if want_first_components { n } else { 0 }];
    if want_first_components && n > 0 {
        z[0] = T::one();
    }
    let eps = T::epsilon();
    let two = T::lit(2.0);

    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut mm = l;
            while mm + 1 < n {
                let dd = d[mm].abs() + d[mm + 1].abs();
                if e[mm].abs() <= eps * dd {
                    break;
                }
                mm += 1;
            }
            if mm == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_QL_SWEEPS {
                return Err(JacobiError::NotConverged {
                    index: l,
                    iterations: sweeps,
                });
            }
            let mut g = (d[l + 1] - d[l]) / (two * e[l]);
            let mut r = g.hypot(T::one());
            g = d[mm] - d[l] + e[l] / (g + if g >= T::zero() { r.abs() } else { -r.abs() });
            let (mut s, mut c, mut p) = (T::one(), T::one(), T::zero());
            let mut deflated = false;
            let mut i = mm;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == T::zero() {
                    d[i + 1] -= p;
                    e[mm] = T::zero();
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + two * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if want_first_components {
                    let zf = z[i + 1];
                    z[i + 1] = s * z[i] + c * zf;
                    z[i] = c * z[i] - s * zf;
                }
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[mm] = T::zero();
        }
    }
    Ok((d, z))
}

fn check_params<T: Real>(beta: T, gamma: T) -> Result<(), JacobiError> {
    let m1 = -T::one();
    if !(beta > m1 && gamma > m1) || !beta.is_finite() || !gamma.is_finite() {
        return Err(JacobiError::InvalidParameters {
            beta: beta.to_f64_lossy(),
            gamma: gamma.to_f64_lossy(),
        });
    }
    Ok(())
}

/// The `m` roots of `J_m^{β,γ}` on `[0, 1]`, strictly increasing.
///
/// `m = 0` yields an empty list.
pub fn jacobi_roots<T: Real>(m: usize, beta: T, gamma: T) -> Result<Vec<T>, JacobiError> {
    check_params(beta, gamma)?;
    if m == 0 {
        return Ok(Vec::new());
    }
    let (diag, off) = jacobi_matrix(m, beta, gamma);
    let (mut x, _) = tridiagonal_eigen(&diag, &off, false)?;
    x.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    let half = T::lit(0.5);
    let roots: Vec<T> = x.into_iter().map(|xi| half * (T::one() + xi)).collect();
    validate_roots(&roots)?;
    Ok(roots)
}

fn validate_roots<T: Real>(roots: &[T]) -> Result<(), JacobiError> {
    let mut prev = T::zero();
    for (index, &t) in roots.iter().enumerate() {
        if !(t > prev && t < T::one()) {
            return Err(JacobiError::BadRoot {
                index,
                value: t.to_f64_lossy(),
            });
        }
        prev = t;
    }
    Ok(())
}

/// Gauss quadrature on `[0, 1]` for the weight `(1-t)^β t^γ`, normalised so
/// that the weights sum to one. Returns `(nodes, weights)` with nodes
/// increasing.
pub fn gauss_jacobi<T: Real>(n: usize, beta: T, gamma: T) -> Result<(Vec<T>, Vec<T>), JacobiError> {
    check_params(beta, gamma)?;
    if n == 0 {
        return Ok((Vec::new(), Vec::new()));
    }
    let (diag, off) = jacobi_matrix(n, beta, gamma);
    let (x, z) = tridiagonal_eigen(&diag, &off, true)?;
    let mut pairs: Vec<(T, T)> = x.into_iter().zip(z.into_iter().map(|v| v * v)).collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite eigenvalues"));
    let total: T = pairs.iter().map(|p| p.1).sum();
    let half = T::lit(0.5);
    let nodes: Vec<T> = pairs.iter().map(|p| half * (T::one() + p.0)).collect();
    let weights = pairs.iter().map(|p| p.1 / total).collect();
    validate_roots(&nodes)?;
    Ok((nodes, weights))
}

/// Classical Jacobi polynomial `P_n^{(a,b)}(x)` on `[-1, 1]` by the
/// three-term recurrence.
pub fn jacobi_p<T: Real>(n: usize, a: T, b: T, x: T) -> T {
    let one = T::one();
    let two = T::lit(2.0);
    let p0 = one;
    if n == 0 {
        return p0;
    }
    let mut p_prev = p0;
    let mut p = (a + one) + (a + b + two) * (x - one) / two;
    for k in 2..=n {
        let kf = T::from_usize_lossy(k);
        let s = two * kf + a + b;
        let c1 = two * kf * (kf + a + b) * (s - two);
        let c2 = (s - one) * (s * (s - two) * x + a * a - b * b);
        let c3 = two * (kf + a - one) * (kf + b - one) * s;
        let next = (c2 * p - c3 * p_prev) / c1;
        p_prev = p;
        p = next;
    }
    p
}

/// Legendre polynomial `P_n(x)`; also returns `P_{n-1}(x)` for callers that
/// sweep degrees.
pub fn legendre<T: Real>(n: usize, x: T) -> T {
    let mut p_prev = T::one();
    if n == 0 {
        return p_prev;
    }
    let mut p = x;
    for k in 1..n {
        let kf = T::from_usize_lossy(k);
        let next = ((T::lit(2.0) * kf + T::one()) * x * p - kf * p_prev) / (kf + T::one());
        p_prev = p;
        p = next;
    }
    p
}
