//! Graph proximity kernels and kernel-driven community detection.
//!
//! The crate covers the whole experimental pipeline:
//!
//! * [`graph`]: undirected graphs and their adjacency, Laplacian and Markov
//!   matrices;
//! * [`kernels`]: Walk, Communicability, Forest, Heat and PageRank kernels
//!   and the squared distances they induce;
//! * [`clustering`]: Ward agglomeration and spectral clustering;
//! * [`lfr`]: LFR benchmark graphs with planted communities;
//! * [`metrics`]: Rand and adjusted Rand indices;
//! * [`harness`]: parameter sweeps with α optimization, CSV and SVG output.

pub mod clustering;
pub mod graph;
pub mod harness;
pub mod kernels;
pub mod lfr;
pub mod linalg;
pub mod metrics;
pub mod partition;
pub mod rng;

pub use graph::{DenseMatrix, Graph, GraphError};
pub use kernels::{KernelMatrix, KernelParam, Measure};
pub use partition::Partition;
