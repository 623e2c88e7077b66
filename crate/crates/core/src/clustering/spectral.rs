//! Spectral clustering on the leading eigenvectors of a kernel.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::kmeans::{kmeans, DEFAULT_RESTARTS};
use super::{check_k, ClusterError};
use crate::kernels::KernelMatrix;
use crate::linalg::Spectrum;
use crate::partition::Partition;

#[derive(Debug, Clone)]
pub struct SpectralResult {
    pub partition: Partition,
    /// The `k` kernel eigenvalues whose eigenvectors formed the embedding.
    pub eigenvalues: Vec<f64>,
    /// Set when the k-th and (k+1)-th eigenvalues coincide, so the chosen
    /// subspace is not uniquely determined by the kernel.
    pub degenerate_cut: bool,
    pub inertia: f64,
}

/// How node feature rows are formed from the leading eigenvectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum RowScaling {
    /// Each row rescaled to unit length (zero rows stay zero). Keeps
    /// high-degree nodes, whose eigenvector entries are large, from
    /// pulling centroids away from the bulk of their community.
    #[default]
    UnitRows,
    /// Raw eigenvector entries.
    Raw,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpectralOptions {
    pub restarts: usize,
    pub rows: RowScaling,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        Self {
            restarts: DEFAULT_RESTARTS,
            rows: RowScaling::default(),
        }
    }
}

/// `n × k` matrix of the first `k` eigenvectors (unit-norm columns). The
/// second value flags an eigenvalue tie at the cut.
pub fn spectral_embedding(spectrum: &Spectrum, k: usize, rows: RowScaling) -> (DMatrix<f64>, bool) {
    let n = spectrum.dim();
    let mut embedding = spectrum.vectors.columns(0, k).into_owned();
    if rows == RowScaling::UnitRows {
        for mut row in embedding.row_iter_mut() {
            let norm = row.norm();
            if norm > 0.0 {
                row /= norm;
            }
        }
    }
    let degenerate = k < n && {
        let scale = spectrum.values[0].abs().max(1.0);
        (spectrum.values[k - 1] - spectrum.values[k]).abs() <= 1e-10 * scale
    };
    (embedding, degenerate)
}

pub fn spectral_cluster(
    kernel: &KernelMatrix,
    k: usize,
    seed: u64,
) -> Result<SpectralResult, ClusterError> {
    spectral_cluster_with(kernel, k, seed, SpectralOptions::default())
}

/// k-means on the rows of the top-`k` eigenvector embedding of `kernel`.
pub fn spectral_cluster_with(
    kernel: &KernelMatrix,
    k: usize,
    seed: u64,
    options: SpectralOptions,
) -> Result<SpectralResult, ClusterError> {
    check_k(k, kernel.n())?;
    let spectrum = kernel.spectrum()?;
    spectral_cluster_spectrum(&spectrum, k, seed, options)
}

/// Same as [`spectral_cluster_with`], starting from the kernel's
/// eigenpairs (descending).
pub fn spectral_cluster_spectrum(
    spectrum: &Spectrum,
    k: usize,
    seed: u64,
    options: SpectralOptions,
) -> Result<SpectralResult, ClusterError> {
    check_k(k, spectrum.dim())?;
    let (embedding, degenerate_cut) = spectral_embedding(spectrum, k, options.rows);
    let km = kmeans(&embedding, k, seed, options.restarts)?;
    Ok(SpectralResult {
        partition: km.partition,
        eigenvalues: spectrum.values[..k].to_vec(),
        degenerate_cut,
        inertia: km.inertia,
    })
}
