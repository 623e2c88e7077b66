//! Partitions from kernels: Ward agglomeration on kernel distances and
//! k-means on the kernel's leading eigenvectors.

mod kmeans;
mod spectral;
mod ward;

use thiserror::Error;

use crate::kernels::KernelError;

pub use kmeans::{kmeans, KMeansResult, DEFAULT_RESTARTS, MAX_LLOYD_ITERATIONS};
pub use spectral::{
    spectral_cluster, spectral_cluster_spectrum, spectral_cluster_with, spectral_embedding,
    RowScaling, SpectralOptions, SpectralResult,
};
pub use ward::{ward_cluster, MergeStep, WardResult};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClusterError {
    #[error("requested {k} clusters for {n} points")]
    BadK { k: usize, n: usize },
    #[error("malformed squared-distance matrix: {0}")]
    MalformedDistance(String),
    #[error("k-means needs at least one restart")]
    NoRestarts,
    #[error("eigendecomposition failed: {0}")]
    EigFailure(#[from] KernelError),
}

pub(crate) fn check_k(k: usize, n: usize) -> Result<(), ClusterError> {
    if k == 0 || k > n {
        return Err(ClusterError::BadK { k, n });
    }
    Ok(())
}
