//! Compressed sparse row matrices with a shared sparsity pattern, and a
//! Jacobi-preconditioned conjugate gradient solver.

use std::io::{self, Write};
use std::sync::Arc;

use thiserror::Error;

use crate::scalar::{axpy, dot, norm2, Real};

#[derive(Debug, PartialEq, Eq)]
pub struct CsrPattern {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
}

/// Square CSR matrix. Matrices built together by [`assemble_family`] share
/// one pattern, which makes linear combinations a single pass over values.
#[derive(Debug, Clone)]
pub struct CsrMatrix<T> {
    pattern: Arc<CsrPattern>,
    values: Vec<T>,
}

/// Builds `K` matrices on a common pattern from `(row, col, [v_1..v_K])`
/// entries. Duplicates are summed after sorting them by value, so the
/// result does not depend on the order of `entries`. Explicit zeros are kept.
pub fn assemble_family<T: Real, const K: usize>(
    n: usize,
    mut entries: Vec<(usize, usize, [T; K])>,
) -> [CsrMatrix<T>; K] {
    entries.sort_unstable_by_key(|e| (e.0, e.1));
    let mut row_ptr = vec![0usize; n + 1];
    let mut col_idx = Vec::new();
    let mut values: [Vec<T>; K] = std::array::from_fn(|_| Vec::new());
    let mut scratch: Vec<T> = Vec::new();
    let mut start = 0;
    while start < entries.len() {
        let (r, c) = (entries[start].0, entries[start].1);
        assert!(r < n && c < n, "entry ({r}, {c}) outside {n} x {n}");
        let mut end = start + 1;
        while end < entries.len() && entries[end].0 == r && entries[end].1 == c {
            end += 1;
        }
        for (k, vals) in values.iter_mut().enumerate() {
            scratch.clear();
            scratch.extend(entries[start..end].iter().map(|e| e.2[k]));
            scratch.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
            vals.push(scratch.iter().copied().sum());
        }
        col_idx.push(c);
        row_ptr[r + 1] += 1;
        start = end;
    }
    for i in 0..n {
        row_ptr[i + 1] += row_ptr[i];
    }
    let pattern = Arc::new(CsrPattern { n, row_ptr, col_idx });
    values.map(|values| CsrMatrix {
        pattern: Arc::clone(&pattern),
        values,
    })
}

impl<T: Real> CsrMatrix<T> {
    pub fn from_triplets(n: usize, entries: Vec<(usize, usize, T)>) -> Self {
        let [m] = assemble_family(n, entries.into_iter().map(|(r, c, v)| (r, c, [v])).collect());
        m
    }

    pub fn n(&self) -> usize {
        self.pattern.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn row(&self, i: usize) -> (&[usize], &[T]) {
        let (a, b) = (self.pattern.row_ptr[i], self.pattern.row_ptr[i + 1]);
        (&self.pattern.col_idx[a..b], &self.values[a..b])
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        let (cols, vals) = self.row(i);
        cols.binary_search(&j).map_or(T::zero(), |k| vals[k])
    }

    pub fn same_pattern(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.pattern, &other.pattern) || self.pattern == other.pattern
    }

    /// `y = A x`
    pub fn matvec(&self, x: &[T], y: &mut [T]) {
        let p = &*self.pattern;
        debug_assert!(x.len() == p.n && y.len() == p.n);
        for (i, yi) in y.iter_mut().enumerate() {
            let mut acc = T::zero();
            for k in p.row_ptr[i]..p.row_ptr[i + 1] {
                acc += self.values[k] * x[p.col_idx[k]];
            }
            *yi = acc;
        }
    }

    pub fn apply(&self, x: &[T]) -> Vec<T> {
        let mut y = vec![T::zero(); self.n()];
        self.matvec(x, &mut y);
        y
    }

    /// `a·self + b·other`; `None` when the patterns differ.
    pub fn lin_comb(&self, a: T, other: &Self, b: T) -> Option<Self> {
        if !self.same_pattern(other) {
            return None;
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&x, &y)| a * x + b * y)
            .collect();
        Some(Self {
            pattern: Arc::clone(&self.pattern),
            values,
        })
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.n()).map(|i| self.get(i, i)).collect()
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> T {
        (0..self.n())
            .map(|i| self.row(i).1.iter().map(|v| v.abs()).sum::<T>())
            .fold(T::zero(), T::max)
    }

    /// Largest `|A_ij - A_ji|`.
    pub fn asymmetry(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.n() {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                worst = worst.max((v - self.get(j, i)).abs());
            }
        }
        worst
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<T> {
        let n = self.n();
        let mut d = vec![T::zero(); n * n];
        for i in 0..n {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                d[i * n + j] = v;
            }
        }
        d
    }

    /// MatrixMarket coordinate format (general, 1-based).
    pub fn write_matrix_market<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
        writeln!(w, "{} {} {}", self.n(), self.n(), self.nnz())?;
        for i in 0..self.n() {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                writeln!(w, "{} {} {:.16e}", i + 1, j + 1, v)?;
            }
        }
        w.flush()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CgConfig<T> {
    pub rel_tol: T,
    pub max_iter: usize,
    /// Restarts allowed when the recursive residual has converged but the
    /// true residual `b - Ax` has not.
    pub max_restarts: usize,
}

impl<T: Real> CgConfig<T> {
    /// `100 + 50√n` iterations: enough for Jacobi-preconditioned P1
    /// Laplacians at a 1e-12 relative tolerance.
    pub fn default_max_iter(n: usize) -> usize {
        100 + (50.0 * (n as f64).sqrt()).ceil() as usize
    }

    pub fn new(rel_tol: T, n: usize) -> Self {
        Self {
            rel_tol,
            max_iter: Self::default_max_iter(n),
            max_restarts: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CgStats {
    pub iterations: usize,
    /// True relative residual `‖b - Ax‖ / ‖b‖` at exit.
    pub residual: f64,
    pub restarts: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CgError {
    #[error("CG did not reach the tolerance in {iterations} iterations (relative residual {residual:.3e})")]
    NotConverged {
        iterations: usize,
        residual: f64,
        history: Vec<f64>,
    },
    #[error("CG breakdown at iteration {iteration}: operator or preconditioner not positive definite")]
    Breakdown { iteration: usize },
    #[error("dimension mismatch: operator {n}, vector {len}")]
    Dimension { n: usize, len: usize },
}

/// Solves `A x = b` for symmetric positive definite `A`, preconditioned by
/// `diag`. `x` holds the initial guess on entry.
pub fn pcg<T: Real>(a: &CsrMatrix<T>, diag: &[T], b: &[T], x: &mut [T], cfg: &CgConfig<T>) -> Result<CgStats, CgError> {
    let n = a.n();
    for len in [diag.len(), b.len(), x.len()] {
        if len != n {
            return Err(CgError::Dimension { n, len });
        }
    }
    let bnorm = norm2(b);
    if bnorm == T::zero() {
        x.iter_mut().for_each(|v| *v = T::zero());
        return Ok(CgStats {
            iterations: 0,
            residual: 0.0,
            restarts: 0,
        });
    }
    let inv_diag: Vec<T> = diag.iter().map(|&d| T::one() / d).collect();
    if inv_diag.iter().any(|d| !(*d > T::zero()) || !d.is_finite()) {
        return Err(CgError::Breakdown { iteration: 0 });
    }
    let target = cfg.rel_tol * bnorm;
    let mut history = Vec::new();
    let mut r = vec![T::zero(); n];
    let mut z = vec![T::zero(); n];
    let mut ap = vec![T::zero(); n];
    let mut iterations = 0;
    let mut restarts = 0;

    loop {
        true_residual(a, b, x, &mut r);
        let rnorm = norm2(&r);
        if rnorm <= target {
            return Ok(CgStats {
                iterations,
                residual: (rnorm / bnorm).to_f64_lossy(),
                restarts,
            });
        }
        if restarts > cfg.max_restarts || iterations >= cfg.max_iter {
            return Err(CgError::NotConverged {
                iterations,
                residual: (rnorm / bnorm).to_f64_lossy(),
                history,
            });
        }
        if iterations > 0 {
            restarts += 1;
        }
        for i in 0..n {
            z[i] = inv_diag[i] * r[i];
        }
        let mut p = z.clone();
        let mut rz = dot(&r, &z);
        while iterations < cfg.max_iter {
            iterations += 1;
            a.matvec(&p, &mut ap);
            let pap = dot(&p, &ap);
            if !(pap > T::zero()) {
                return Err(CgError::Breakdown { iteration: iterations });
            }
            let step = rz / pap;
            axpy(step, &p, x);
            axpy(-step, &ap, &mut r);
            let rn = norm2(&r);
            history.push((rn / bnorm).to_f64_lossy());
            if rn <= target {
                break;
            }
            for i in 0..n {
                z[i] = inv_diag[i] * r[i];
            }
            let rz_new = dot(&r, &z);
            let gamma = rz_new / rz;
            rz = rz_new;
            for i in 0..n {
                p[i] = z[i] + gamma * p[i];
            }
        }
    }
}

fn true_residual<T: Real>(a: &CsrMatrix<T>, b: &[T], x: &[T], r: &mut [T]) {
    a.matvec(x, r);
    for (ri, &bi) in r.iter_mut().zip(b) {
        *ri = bi - *ri;
    }
}
