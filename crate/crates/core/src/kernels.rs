//! The five proximity kernels and the squared distances they induce.
//!
//! Every kernel is a spectral function of one symmetric base matrix:
//!
//! | measure         | base                      | kernel eigenvalue     |
//! |-----------------|---------------------------|-----------------------|
//! | Walk            | A                         | 1 / (1 - αλ)          |
//! | Communicability | A                         | exp(αλ)               |
//! | Forest          | L                         | 1 / (1 + αμ)          |
//! | Heat            | L                         | exp(-αμ)              |
//! | PageRank        | D^{-1/2} A D^{-1/2}       | 1 / (1 - αλ), similar |
//!
//! [`KernelFactory`] factors each base once per graph and then evaluates any
//! number of α values from the cached eigenpairs.

use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{DenseMatrix, Graph, GraphError};
use crate::linalg::{sym_eig, symmetrize_in_place, LinalgError, Spectrum};

/// Walk α must satisfy `α <= WALK_MARGIN / q`.
pub const WALK_MARGIN: f64 = 1.0 - 1e-9;
/// Default upper end of the α grid for Communicability, Forest and Heat.
pub const DEFAULT_ALPHA_MAX: f64 = 10.0;
/// Squared distances in `[-NEG_D2_TOL·scale, 0)` are round-off and clamped.
pub const NEG_D2_TOL: f64 = 1e-9;

const SYM_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KernelError {
    #[error("alpha {alpha} outside the valid range of {measure} (0, {upper})")]
    AlphaOutOfRange {
        measure: Measure,
        alpha: f64,
        upper: f64,
    },
    #[error("kernel is not positive semidefinite: d2({i},{j}) = {value:e}")]
    NotPsd { i: usize, j: usize, value: f64 },
    #[error("kernel for {0} alpha={1} has non-finite entries")]
    NonFinite(Measure, f64),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Measure {
    Walk,
    Communicability,
    Forest,
    Heat,
    PageRank,
}

impl Measure {
    pub const ALL: [Measure; 5] = [
        Measure::Walk,
        Measure::Communicability,
        Measure::Forest,
        Measure::Heat,
        Measure::PageRank,
    ];

    /// Short name used in CSV output and on the command line.
    pub fn name(self) -> &'static str {
        match self {
            Measure::Walk => "Walk",
            Measure::Communicability => "Comm",
            Measure::Forest => "Forest",
            Measure::Heat => "Heat",
            Measure::PageRank => "PageRank",
        }
    }

    /// The measure whose spectral partitions this one reproduces exactly,
    /// if any: Comm shares Walk's eigenvectors and Heat shares Forest's.
    pub fn spectral_representative(self) -> Measure {
        match self {
            Measure::Communicability => Measure::Walk,
            Measure::Heat => Measure::Forest,
            other => other,
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Measure {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "walk" => Ok(Measure::Walk),
            "comm" | "communicability" => Ok(Measure::Communicability),
            "forest" => Ok(Measure::Forest),
            "heat" => Ok(Measure::Heat),
            "pagerank" | "pr" => Ok(Measure::PageRank),
            other => Err(format!("unknown measure {other:?}")),
        }
    }
}

/// A measure together with the α it was evaluated at.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelParam {
    pub measure: Measure,
    pub alpha: f64,
    /// Open upper limit α was validated against; infinite for the
    /// exponential and Forest kernels.
    pub alpha_upper_bound: f64,
}

/// Symmetric proximity matrix tagged with how it was produced.
#[derive(Debug, Clone)]
pub struct KernelMatrix {
    pub matrix: DenseMatrix,
    pub param: KernelParam,
    spectrum: Option<Arc<Spectrum>>,
}

impl KernelMatrix {
    /// Wraps an arbitrary symmetric matrix, e.g. one read from disk.
    pub fn from_matrix(matrix: DenseMatrix, param: KernelParam) -> Self {
        Self {
            matrix,
            param,
            spectrum: None,
        }
    }

    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }

    /// Eigenpairs of the kernel, descending. Reuses the factorization the
    /// kernel was built from when there is one; the eigenvectors are then
    /// exactly those of the base matrix.
    pub fn spectrum(&self) -> Result<Arc<Spectrum>, KernelError> {
        match &self.spectrum {
            Some(s) => Ok(Arc::clone(s)),
            None => Ok(Arc::new(sym_eig(&self.matrix, SYM_TOL)?)),
        }
    }

    /// Whether the kernel carries its own eigenpairs.
    pub fn has_cached_spectrum(&self) -> bool {
        self.spectrum.is_some()
    }

    /// Drops the cached eigenpairs so that [`KernelMatrix::spectrum`]
    /// recomputes them from the matrix entries.
    pub fn without_cached_spectrum(mut self) -> Self {
        self.spectrum = None;
        self
    }

    /// Rows of `n` comma-separated values with 12 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.n() {
            let row: Vec<String> = (0..self.n())
                .map(|j| format!("{:.11e}", self.matrix[(i, j)]))
                .collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

fn check_positive(measure: Measure, alpha: f64, upper: f64) -> Result<(), KernelError> {
    if !(alpha > 0.0 && alpha.is_finite() && alpha < upper) {
        return Err(KernelError::AlphaOutOfRange {
            measure,
            alpha,
            upper,
        });
    }
    Ok(())
}

/// Upper bound on α for `measure`, given the adjacency spectral radius `q`.
pub fn alpha_upper_bound(measure: Measure, q: f64) -> f64 {
    match measure {
        Measure::Walk if q > 0.0 => 1.0 / q,
        Measure::PageRank => 1.0,
        _ => f64::INFINITY,
    }
}

/// Interior α grid `i·U/(points+1)`, `i = 1..=points`, over the measure's
/// interval `(0, U)`: `U = 1/q` for Walk, `1` for PageRank and `alpha_max`
/// for the unbounded measures.
pub fn alpha_grid_with_radius(measure: Measure, q: f64, points: usize, alpha_max: f64) -> Vec<f64> {
    let upper = match measure {
        Measure::Walk if q > 0.0 => 1.0 / q,
        Measure::PageRank => 1.0,
        _ => alpha_max,
    };
    (1..=points)
        .map(|i| upper * i as f64 / (points + 1) as f64)
        .collect()
}

pub fn alpha_grid(
    measure: Measure,
    g: &Graph,
    points: usize,
    alpha_max: f64,
) -> Result<Vec<f64>, KernelError> {
    let q = if measure == Measure::Walk {
        crate::graph::spectral_radius(&g.adjacency_matrix(), SYM_TOL)?
    } else {
        0.0
    };
    Ok(alpha_grid_with_radius(measure, q, points, alpha_max))
}

struct PageRankBasis {
    spectrum: Arc<Spectrum>,
    sqrt_deg: Vec<f64>,
}

/// Lazily factors the base matrices of one graph and evaluates kernels
/// from them. Safe to share across threads.
pub struct KernelFactory<'g> {
    graph: &'g Graph,
    adjacency: OnceLock<Result<Arc<Spectrum>, KernelError>>,
    laplacian: OnceLock<Result<Arc<Spectrum>, KernelError>>,
    pagerank: OnceLock<Result<PageRankBasis, KernelError>>,
}

impl<'g> KernelFactory<'g> {
    pub fn new(graph: &'g Graph) -> Self {
        Self {
            graph,
            adjacency: OnceLock::new(),
            laplacian: OnceLock::new(),
            pagerank: OnceLock::new(),
        }
    }

    pub fn graph(&self) -> &Graph {
        self.graph
    }

    /// Eigenpairs of A, descending.
    pub fn adjacency_spectrum(&self) -> Result<Arc<Spectrum>, KernelError> {
        self.adjacency
            .get_or_init(|| Ok(Arc::new(sym_eig(&self.graph.adjacency_matrix(), SYM_TOL)?)))
            .clone()
    }

    /// Eigenpairs of L ordered by ascending eigenvalue, so that the
    /// Forest and Heat kernel eigenvalues come out descending.
    pub fn laplacian_spectrum(&self) -> Result<Arc<Spectrum>, KernelError> {
        self.laplacian
            .get_or_init(|| {
                let s = sym_eig(&self.graph.laplacian(), SYM_TOL)?;
                let n = s.dim();
                let values = s.values.iter().rev().copied().collect();
                let vectors = DenseMatrix::from_fn(n, n, |i, j| s.vectors[(i, n - 1 - j)]);
                Ok(Arc::new(Spectrum { values, vectors }))
            })
            .clone()
    }

    fn pagerank_basis(&self) -> Result<&PageRankBasis, KernelError> {
        self.pagerank
            .get_or_init(|| {
                let deg = self.graph.degrees();
                if let Some(node) = deg.iter().position(|&d| d == 0) {
                    return Err(GraphError::IsolatedNode(node).into());
                }
                let sqrt_deg: Vec<f64> = deg.iter().map(|&d| (d as f64).sqrt()).collect();
                let n = self.graph.node_count();
                let mut s = DenseMatrix::zeros(n, n);
                for &(i, j) in self.graph.edges() {
                    let w = 1.0 / (sqrt_deg[i] * sqrt_deg[j]);
                    s[(i, j)] = w;
                    s[(j, i)] = w;
                }
                Ok(PageRankBasis {
                    spectrum: Arc::new(sym_eig(&s, SYM_TOL)?),
                    sqrt_deg,
                })
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    /// Largest absolute adjacency eigenvalue `q`.
    pub fn spectral_radius(&self) -> Result<f64, KernelError> {
        let s = self.adjacency_spectrum()?;
        Ok(s.values.iter().fold(0.0_f64, |acc, v| acc.max(v.abs())))
    }

    pub fn alpha_upper_bound(&self, measure: Measure) -> Result<f64, KernelError> {
        let q = if measure == Measure::Walk {
            self.spectral_radius()?
        } else {
            0.0
        };
        Ok(alpha_upper_bound(measure, q))
    }

    pub fn alpha_grid(
        &self,
        measure: Measure,
        points: usize,
        alpha_max: f64,
    ) -> Result<Vec<f64>, KernelError> {
        let q = if measure == Measure::Walk {
            self.spectral_radius()?
        } else {
            0.0
        };
        Ok(alpha_grid_with_radius(measure, q, points, alpha_max))
    }

    /// Base spectrum and mapped eigenvalues for the four measures that are
    /// spectral functions of A or L; `None` for PageRank.
    #[allow(clippy::type_complexity)]
    fn spectral_parts(
        &self,
        measure: Measure,
        alpha: f64,
    ) -> Result<Option<(Arc<Spectrum>, Vec<f64>, f64)>, KernelError> {
        let (base, upper, mapped): (Arc<Spectrum>, f64, Vec<f64>) = match measure {
            Measure::Walk => {
                let q = self.spectral_radius()?;
                let upper = alpha_upper_bound(measure, q);
                // the margin keeps (I - αA) away from singular
                if !(alpha > 0.0 && (q == 0.0 || alpha * q <= WALK_MARGIN)) {
                    return Err(KernelError::AlphaOutOfRange {
                        measure,
                        alpha,
                        upper,
                    });
                }
                let base = self.adjacency_spectrum()?;
                let mapped = base
                    .values
                    .iter()
                    .map(|l| 1.0 / (1.0 - alpha * l))
                    .collect();
                (base, upper, mapped)
            }
            Measure::Communicability => {
                check_positive(measure, alpha, f64::INFINITY)?;
                let base = self.adjacency_spectrum()?;
                let mapped = base.values.iter().map(|l| (alpha * l).exp()).collect();
                (base, f64::INFINITY, mapped)
            }
            Measure::Forest => {
                check_positive(measure, alpha, f64::INFINITY)?;
                let base = self.laplacian_spectrum()?;
                let mapped = base
                    .values
                    .iter()
                    .map(|mu| 1.0 / (1.0 + alpha * mu))
                    .collect();
                (base, f64::INFINITY, mapped)
            }
            Measure::Heat => {
                check_positive(measure, alpha, f64::INFINITY)?;
                let base = self.laplacian_spectrum()?;
                let mapped = base.values.iter().map(|mu| (-alpha * mu).exp()).collect();
                (base, f64::INFINITY, mapped)
            }
            Measure::PageRank => return Ok(None),
        };
        if mapped.iter().any(|v: &f64| !v.is_finite()) {
            return Err(KernelError::NonFinite(measure, alpha));
        }
        Ok(Some((base, mapped, upper)))
    }

    pub fn kernel(&self, measure: Measure, alpha: f64) -> Result<KernelMatrix, KernelError> {
        if let Some((base, mapped, upper)) = self.spectral_parts(measure, alpha)? {
            let matrix = base.reconstruct_with(&mapped);
            finite_or_err(&matrix, measure, alpha)?;
            return Ok(KernelMatrix {
                matrix,
                param: KernelParam {
                    measure,
                    alpha,
                    alpha_upper_bound: upper,
                },
                spectrum: Some(Arc::new(sorted_spectrum(&base, mapped))),
            });
        }
        let raw = self.pagerank_resolvent(alpha)?;
        let mut matrix = raw;
        symmetrize_in_place(&mut matrix);
        finite_or_err(&matrix, measure, alpha)?;
        Ok(KernelMatrix {
            matrix,
            param: KernelParam {
                measure,
                alpha,
                alpha_upper_bound: 1.0,
            },
            spectrum: None,
        })
    }

    /// Eigenpairs of the kernel, descending. For all measures but PageRank
    /// this reuses the cached base factorization and never forms the
    /// `n × n` kernel.
    pub fn kernel_spectrum(
        &self,
        measure: Measure,
        alpha: f64,
    ) -> Result<Arc<Spectrum>, KernelError> {
        match self.spectral_parts(measure, alpha)? {
            Some((base, mapped, _)) => Ok(Arc::new(sorted_spectrum(&base, mapped))),
            None => self.kernel(measure, alpha)?.spectrum(),
        }
    }

    /// The unsymmetrized PageRank resolvent `R = (I - αP)^{-1}`, computed
    /// as `D^{-1/2} (I - αS)^{-1} D^{1/2}` with `S = D^{-1/2} A D^{-1/2}`.
    pub fn pagerank_resolvent(&self, alpha: f64) -> Result<DenseMatrix, KernelError> {
        check_positive(Measure::PageRank, alpha, 1.0)?;
        let basis = self.pagerank_basis()?;
        let mut m = basis.spectrum.apply(|l| 1.0 / (1.0 - alpha * l));
        let d = &basis.sqrt_deg;
        let n = m.nrows();
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] *= d[j] / d[i];
            }
        }
        Ok(m)
    }
}

fn finite_or_err(m: &DenseMatrix, measure: Measure, alpha: f64) -> Result<(), KernelError> {
    if m.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(KernelError::NonFinite(measure, alpha))
    }
}

/// Pairs mapped eigenvalues with the base eigenvectors, descending.
/// The sort is stable, so kernel eigenvalues that collapse numerically
/// (e.g. exp underflow) keep the order of the base spectrum.
fn sorted_spectrum(base: &Spectrum, mapped: Vec<f64>) -> Spectrum {
    let n = mapped.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| mapped[b].total_cmp(&mapped[a]));
    let values = order.iter().map(|&i| mapped[i]).collect();
    let vectors = DenseMatrix::from_fn(n, n, |r, c| base.vectors[(r, order[c])]);
    Spectrum { values, vectors }
}

/// `(I - αA)^{-1}`.
pub fn walk_kernel(g: &Graph, alpha: f64) -> Result<KernelMatrix, KernelError> {
    KernelFactory::new(g).kernel(Measure::Walk, alpha)
}

/// `exp(αA)`.
pub fn communicability_kernel(g: &Graph, alpha: f64) -> Result<KernelMatrix, KernelError> {
    KernelFactory::new(g).kernel(Measure::Communicability, alpha)
}

/// `(I + αL)^{-1}`.
pub fn forest_kernel(g: &Graph, alpha: f64) -> Result<KernelMatrix, KernelError> {
    KernelFactory::new(g).kernel(Measure::Forest, alpha)
}

/// `exp(-αL)`.
pub fn heat_kernel(g: &Graph, alpha: f64) -> Result<KernelMatrix, KernelError> {
    KernelFactory::new(g).kernel(Measure::Heat, alpha)
}

/// `((I - αP)^{-1} + (I - αP)^{-T}) / 2`.
pub fn pagerank_kernel(g: &Graph, alpha: f64) -> Result<KernelMatrix, KernelError> {
    KernelFactory::new(g).kernel(Measure::PageRank, alpha)
}

pub fn kernel(g: &Graph, measure: Measure, alpha: f64) -> Result<KernelMatrix, KernelError> {
    KernelFactory::new(g).kernel(measure, alpha)
}

/// Squared kernel distances `K_ii + K_jj - 2 K_ij`.
///
/// Negative values down to `-NEG_D2_TOL · max(1, max K_ii)` are treated as
/// round-off and clamped to zero; anything lower is reported as `NotPsd`.
pub fn kernel_to_distance(k: &KernelMatrix) -> Result<DenseMatrix, KernelError> {
    let m = &k.matrix;
    let n = m.nrows();
    let scale = (0..n).fold(1.0_f64, |acc, i| acc.max(m[(i, i)].abs()));
    let floor = -NEG_D2_TOL * scale;
    let mut d2 = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let mut v = m[(i, i)] + m[(j, j)] - m[(i, j)] - m[(j, i)];
            if v < 0.0 {
                if v < floor {
                    return Err(KernelError::NotPsd { i, j, value: v });
                }
                v = 0.0;
            }
            d2[(i, j)] = v;
            d2[(j, i)] = v;
        }
    }
    Ok(d2)
}
