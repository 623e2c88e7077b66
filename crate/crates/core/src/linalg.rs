//! Dense symmetric eigendecomposition and spectral matrix functions.

use nalgebra::linalg::SymmetricEigen;
use nalgebra::{DMatrix, DVector};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("matrix contains non-finite entries")]
    NonFinite,
    #[error("symmetric eigensolver did not converge")]
    NoConvergence,
}

const MAX_SWEEPS: usize = 10_000;

/// Eigenpairs of a symmetric matrix, eigenvalues in descending order.
///
/// Column `i` of `vectors` belongs to `values[i]`. Each eigenvector is
/// sign-normalized so its largest-magnitude entry (first on ties) is
/// positive, which makes downstream embeddings reproducible.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `V diag(f(λ)) Vᵀ`.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
        let mapped: Vec<f64> = self.values.iter().map(|&v| f(v)).collect();
        self.reconstruct_with(&mapped)
    }

    /// `V diag(d) Vᵀ` for explicit diagonal weights.
    pub fn reconstruct_with(&self, diag: &[f64]) -> DMatrix<f64> {
        let mut scaled = self.vectors.clone();
        for (mut col, &d) in scaled.column_iter_mut().zip(diag) {
            col *= d;
        }
        let mut out = &scaled * self.vectors.transpose();
        symmetrize_in_place(&mut out);
        out
    }
}

pub fn max_asymmetry(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

/// Replaces `m` with `(m + mᵀ) / 2`.
pub fn symmetrize_in_place(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = avg;
            m[(j, i)] = avg;
        }
    }
}

/// Full eigendecomposition of a symmetric matrix. `sym_tol` is the largest
/// accepted `|m_ij - m_ji|`, relative to `max(1, max|m|)`.
pub fn sym_eig(m: &DMatrix<f64>, sym_tol: f64) -> Result<Spectrum, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(LinalgError::NonFinite);
    }
    let scale = m.amax().max(1.0);
    let asym = max_asymmetry(m);
    if asym > sym_tol * scale {
        return Err(LinalgError::NotSymmetric(asym));
    }
    let n = m.nrows();
    if n == 0 {
        return Ok(Spectrum {
            values: Vec::new(),
            vectors: DMatrix::zeros(0, 0),
        });
    }

    let eig = SymmetricEigen::try_new(m.clone(), f64::EPSILON, MAX_SWEEPS)
        .ok_or(LinalgError::NoConvergence)?;
    if eig.eigenvalues.iter().any(|v| !v.is_finite()) {
        return Err(LinalgError::NoConvergence);
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .total_cmp(&eig.eigenvalues[a])
            .then(a.cmp(&b))
    });

    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col: DVector<f64> = eig.eigenvectors.column(src).into_owned();
        let pivot = col
            .iter()
            .enumerate()
            .fold((0, 0.0_f64), |(bi, bv), (i, &v)| {
                if v.abs() > bv {
                    (i, v.abs())
                } else {
                    (bi, bv)
                }
            })
            .0;
        if col[pivot] < 0.0 {
            col.neg_mut();
        }
        vectors.set_column(dst, &col);
    }
    Ok(Spectrum { values, vectors })
}
