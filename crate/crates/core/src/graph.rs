//! Undirected simple graphs and the dense matrices derived from them.
//!
//! Nodes are contiguous `0..n` indices. Edges are stored once, as `(i, j)`
//! with `i < j`, in sorted order so that every derived matrix and every
//! serialized edge list is deterministic.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use nalgebra::DMatrix;
use thiserror::Error;

use crate::linalg::{sym_eig, LinalgError};

/// Dense real matrix used for A, D, L, P and all kernels.
pub type DenseMatrix = DMatrix<f64>;

/// Errors raised while building graphs or their derived matrices.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("node {node} out of range for graph with {n} nodes")]
    IndexOutOfRange { node: usize, n: usize },
    #[error("self-loop on node {0}")]
    SelfLoop(usize),
    #[error("node {0} is isolated; the degree matrix is not invertible")]
    IsolatedNode(usize),
    #[error("graph must have at least one node")]
    Empty,
    #[error("edge list line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Undirected simple graph on nodes `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    /// Builds a graph from unordered pairs. Duplicates (in either
    /// orientation) collapse into a single edge.
    pub fn from_edge_list(n: usize, pairs: &[(usize, usize)]) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::Empty);
        }
        let mut set = BTreeSet::new();
        for &(i, j) in pairs {
            for node in [i, j] {
                if node >= n {
                    return Err(GraphError::IndexOutOfRange { node, n });
                }
            }
            if i == j {
                return Err(GraphError::SelfLoop(i));
            }
            set.insert((i.min(j), i.max(j)));
        }
        Ok(Self {
            n,
            edges: set.into_iter().collect(),
        })
    }

    /// Graph with `n` nodes and no edges.
    pub fn empty(n: usize) -> Result<Self, GraphError> {
        Self::from_edge_list(n, &[])
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Canonical edges `(i, j)` with `i < j`, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.edges.binary_search(&(i.min(j), i.max(j))).is_ok()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for &(i, j) in &self.edges {
            deg[i] += 1;
            deg[j] += 1;
        }
        deg
    }

    pub fn average_degree(&self) -> f64 {
        2.0 * self.edges.len() as f64 / self.n as f64
    }

    /// Nodes with no incident edge, ascending.
    pub fn isolated_nodes(&self) -> Vec<usize> {
        self.degrees()
            .iter()
            .enumerate()
            .filter(|(_, &d)| d == 0)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn adjacency_matrix(&self) -> DenseMatrix {
        let mut a = DenseMatrix::zeros(self.n, self.n);
        for &(i, j) in &self.edges {
            a[(i, j)] = 1.0;
            a[(j, i)] = 1.0;
        }
        a
    }

    pub fn degree_matrix(&self) -> DenseMatrix {
        let deg = self.degrees();
        DenseMatrix::from_fn(
            self.n,
            self.n,
            |i, j| if i == j { deg[i] as f64 } else { 0.0 },
        )
    }

    /// `L = D - A`.
    pub fn laplacian(&self) -> DenseMatrix {
        let mut l = DenseMatrix::zeros(self.n, self.n);
        for &(i, j) in &self.edges {
            l[(i, j)] = -1.0;
            l[(j, i)] = -1.0;
            l[(i, i)] += 1.0;
            l[(j, j)] += 1.0;
        }
        l
    }

    /// Random-walk transition matrix `P = D^{-1} A`.
    pub fn markov_matrix(&self) -> Result<DenseMatrix, GraphError> {
        let deg = self.degrees();
        if let Some(node) = deg.iter().position(|&d| d == 0) {
            return Err(GraphError::IsolatedNode(node));
        }
        let mut p = DenseMatrix::zeros(self.n, self.n);
        for &(i, j) in &self.edges {
            p[(i, j)] = 1.0 / deg[i] as f64;
            p[(j, i)] = 1.0 / deg[j] as f64;
        }
        Ok(p)
    }

    /// Writes the graph as `u v` lines, one edge per line.
    pub fn to_edge_list_string(&self) -> String {
        let mut out = String::with_capacity(self.edges.len() * 8);
        for &(i, j) in &self.edges {
            let _ = writeln!(out, "{i} {j}");
        }
        out
    }
}

/// Largest absolute eigenvalue of a symmetric matrix, taken from the full
/// eigendecomposition. `tol` bounds the accepted asymmetry of `m`.
pub fn spectral_radius(m: &DenseMatrix, tol: f64) -> Result<f64, GraphError> {
    if m.nrows() == 0 {
        return Ok(0.0);
    }
    let spectrum = sym_eig(m, tol.max(1e-12))?;
    Ok(spectrum
        .values
        .iter()
        .fold(0.0_f64, |acc, v| acc.max(v.abs())))
}

/// A parsed edge list together with the label of each node.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeListFile {
    pub graph: Graph,
    /// `labels[i]` is the token that node `i` carried in the file. `None`
    /// when every token was a non-negative integer and used verbatim.
    pub labels: Option<Vec<String>>,
}

/// Parses whitespace-separated `u v` lines; `#` lines and blank lines are
/// skipped. When every token is a non-negative integer, tokens are node
/// indices and the node count is `max + 1` (or `n` when given). Otherwise
/// tokens are treated as opaque labels numbered by first appearance.
pub fn parse_edge_list(text: &str, n: Option<usize>) -> Result<EdgeListFile, GraphError> {
    let mut raw = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let (Some(u), Some(v)) = (tokens.next(), tokens.next()) else {
            return Err(GraphError::Parse {
                line: lineno + 1,
                message: format!("expected two node tokens, got {trimmed:?}"),
            });
        };
        raw.push((u.to_owned(), v.to_owned()));
    }

    let numeric: Option<Vec<(usize, usize)>> = raw
        .iter()
        .map(|(u, v)| Some((u.parse().ok()?, v.parse().ok()?)))
        .collect();

    if let Some(pairs) = numeric {
        let inferred = pairs.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0);
        let n = n.unwrap_or(inferred);
        return Ok(EdgeListFile {
            graph: Graph::from_edge_list(n, &pairs)?,
            labels: None,
        });
    }

    let mut labels: Vec<String> = Vec::new();
    let mut index = std::collections::HashMap::new();
    let mut intern = |tok: &str| -> usize {
        *index.entry(tok.to_owned()).or_insert_with(|| {
            labels.push(tok.to_owned());
            labels.len() - 1
        })
    };
    let pairs: Vec<(usize, usize)> = raw.iter().map(|(u, v)| (intern(u), intern(v))).collect();
    let n = n.unwrap_or(labels.len()).max(labels.len());
    Ok(EdgeListFile {
        graph: Graph::from_edge_list(n, &pairs)?,
        labels: Some(labels),
    })
}
