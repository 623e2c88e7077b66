//! Topology sweeps over LFR graphs with per-measure α search.
//!
//! A sweep varies one generator parameter. For each value it generates the
//! same replicate graphs for every measure and method (replicate seeds
//! depend only on the master seed and the replicate index), clusters each
//! graph with the true community count at every α of the measure's grid,
//! and reports the ARI at the α with the best replicate-mean ARI.
//!
//! Walk grids are expressed in units of `1/q`, where `q` is the spectral
//! radius of the replicate graph: a Walk `best_alpha` of `0.5` means
//! `α = 0.5/q` on every graph. All other measures use absolute α.

mod config;
mod csv;
mod plot;

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::clustering::{kmeans, spectral_embedding, ward_cluster, RowScaling, DEFAULT_RESTARTS};
use crate::kernels::{self, KernelFactory, Measure, DEFAULT_ALPHA_MAX};
use crate::lfr::{generate_lfr, LfrParams};
use crate::metrics::adjusted_rand_index;
use crate::partition::Partition;
use crate::rng;

pub use config::parse_config;
pub use csv::{emit_csv, parse_csv, write_csv, CSV_HEADER};
pub use plot::{emit_plot, write_plot, PlotOptions};

pub const DEFAULT_REPLICATES: usize = 10;
pub const DEFAULT_ALPHA_POINTS: usize = 20;
pub const DEFAULT_WARD_MAX: usize = 1000;
/// Largest fraction of replicates a cell may skip before it fails.
pub const DEFAULT_SKIP_CEILING: f64 = 0.2;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },
    #[error("invalid experiment: {0}")]
    Invalid(String),
    #[error("cell {cell} failed: {reason}")]
    CellFailed { cell: String, reason: String },
    #[error("all {0} cells failed, first: {1}")]
    AllCellsFailed(usize, String),
    #[error("rows vary different parameters: {0} and {1}")]
    MixedSweep(Vary, Vary),
    #[error("csv line {line}: {message}")]
    Csv { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    Ward,
    Spectral,
}

impl Method {
    pub const ALL: [Method; 2] = [Method::Ward, Method::Spectral];

    pub fn name(self) -> &'static str {
        match self {
            Method::Ward => "Ward",
            Method::Spectral => "Spectral",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ward" => Ok(Method::Ward),
            "spectral" => Ok(Method::Spectral),
            other => Err(format!(
                "unknown method '{other}' (expected Ward or Spectral)"
            )),
        }
    }
}

/// The generator parameter a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Vary {
    N,
    M,
    Tau1,
    Tau2,
    SizeLimits,
    Mu,
}

impl Vary {
    pub const ALL: [Vary; 6] = [
        Vary::N,
        Vary::M,
        Vary::Tau1,
        Vary::Tau2,
        Vary::SizeLimits,
        Vary::Mu,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Vary::N => "n",
            Vary::M => "m",
            Vary::Tau1 => "tau1",
            Vary::Tau2 => "tau2",
            Vary::SizeLimits => "size_limits",
            Vary::Mu => "mu",
        }
    }

    /// The value grid used in the reference experiments.
    pub fn standard_values(self) -> Vec<VaryValue> {
        let reals = |v: &[f64]| v.iter().map(|&x| VaryValue::Real(x)).collect();
        match self {
            Vary::N => [100, 300, 500, 1000, 2000, 3000]
                .into_iter()
                .map(VaryValue::Count)
                .collect(),
            Vary::M => (2..=15).map(|m| VaryValue::Real(m as f64)).collect(),
            Vary::Tau1 => reals(&[2.0, 2.2, 2.4, 2.5, 2.6, 2.8, 3.0]),
            Vary::Tau2 => reals(&[1.0, 1.25, 1.5, 1.75, 2.0]),
            Vary::SizeLimits => [(20, 50), (50, 80), (80, 140), (140, 185)]
                .into_iter()
                .map(|(a, b)| VaryValue::Limits(a, b))
                .collect(),
            Vary::Mu => reals(&[0.1, 0.2, 0.3, 0.4, 0.5, 0.6]),
        }
    }

    /// Current value of this parameter in `params`.
    pub fn value_of(self, params: &LfrParams) -> VaryValue {
        match self {
            Vary::N => VaryValue::Count(params.n),
            Vary::M => VaryValue::Real(params.m),
            Vary::Tau1 => VaryValue::Real(params.tau1),
            Vary::Tau2 => VaryValue::Real(params.tau2),
            Vary::SizeLimits => VaryValue::Limits(params.cmin, params.cmax),
            Vary::Mu => VaryValue::Real(params.mu),
        }
    }

    pub fn parse_value(self, s: &str) -> Result<VaryValue, String> {
        let s = s.trim();
        match self {
            Vary::N => s
                .parse()
                .map(VaryValue::Count)
                .map_err(|_| format!("'{s}' is not a node count")),
            Vary::SizeLimits => {
                let (a, b) = s
                    .split_once(':')
                    .ok_or_else(|| format!("size limits '{s}' must look like cmin:cmax"))?;
                let parse = |x: &str| {
                    x.trim()
                        .parse::<usize>()
                        .map_err(|_| format!("'{x}' is not a community size"))
                };
                Ok(VaryValue::Limits(parse(a)?, parse(b)?))
            }
            _ => match s.parse::<f64>() {
                Ok(x) if x.is_finite() => Ok(VaryValue::Real(x)),
                _ => Err(format!("'{s}' is not a number")),
            },
        }
    }

    fn accepts(self, value: &VaryValue) -> bool {
        matches!(
            (self, value),
            (Vary::N, VaryValue::Count(_))
                | (Vary::SizeLimits, VaryValue::Limits(..))
                | (
                    Vary::M | Vary::Tau1 | Vary::Tau2 | Vary::Mu,
                    VaryValue::Real(_)
                )
        )
    }
}

impl fmt::Display for Vary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Vary {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        Vary::ALL
            .into_iter()
            .find(|v| v.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                format!("unknown parameter '{s}' (expected n, m, tau1, tau2, size_limits or mu)")
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum VaryValue {
    Count(usize),
    Real(f64),
    /// `(cmin, cmax)`.
    Limits(usize, usize),
}

impl VaryValue {
    /// `base` with this value substituted. Changing `n` scales the
    /// community size limits by the same factor.
    pub fn apply(&self, vary: Vary, base: &LfrParams) -> LfrParams {
        let mut p = base.clone();
        match (vary, *self) {
            (Vary::N, VaryValue::Count(n)) => {
                let scale = n as f64 / base.n as f64;
                p.n = n;
                p.cmin = ((base.cmin as f64 * scale).round() as usize).max(1);
                p.cmax = ((base.cmax as f64 * scale).round() as usize).clamp(p.cmin, n);
            }
            (Vary::M, VaryValue::Real(x)) => p.m = x,
            (Vary::Tau1, VaryValue::Real(x)) => p.tau1 = x,
            (Vary::Tau2, VaryValue::Real(x)) => p.tau2 = x,
            (Vary::Mu, VaryValue::Real(x)) => p.mu = x,
            (Vary::SizeLimits, VaryValue::Limits(a, b)) => {
                p.cmin = a;
                p.cmax = b;
            }
            _ => panic!("value {self} does not fit parameter {vary}"),
        }
        p
    }

    /// Numeric position on a plot axis (`cmin` for size limits).
    pub fn as_f64(&self) -> f64 {
        match *self {
            VaryValue::Count(n) => n as f64,
            VaryValue::Real(x) => x,
            VaryValue::Limits(a, _) => a as f64,
        }
    }

    pub fn total_cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (VaryValue::Limits(a, b), VaryValue::Limits(c, d)) => (a, b).cmp(&(c, d)),
            _ => self.as_f64().total_cmp(&other.as_f64()),
        }
    }
}

impl fmt::Display for VaryValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VaryValue::Count(n) => write!(f, "{n}"),
            VaryValue::Real(x) => f.write_str(&fixed6(*x)),
            VaryValue::Limits(a, b) => write!(f, "{a}:{b}"),
        }
    }
}

/// Six decimals, without a negative sign on zero.
pub(crate) fn fixed6(x: f64) -> String {
    let s = format!("{x:.6}");
    if s.trim_start_matches('-')
        .bytes()
        .all(|b| b == b'0' || b == b'.')
    {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Parameters held fixed; `seed` is ignored in favour of per-replicate
    /// seeds derived from `master_seed`.
    pub base: LfrParams,
    pub vary: Vary,
    pub values: Vec<VaryValue>,
    pub measures: Vec<Measure>,
    pub methods: Vec<Method>,
    pub replicates: usize,
    pub alpha_points: usize,
    /// Upper end of the grid for Communicability, Forest and Heat.
    pub alpha_max: f64,
    pub kmeans_seed: u64,
    pub master_seed: u64,
    pub kmeans_restarts: usize,
    /// Ward cells are left out for graphs with more nodes than this.
    pub ward_max: usize,
    pub skip_ceiling: f64,
    pub embedding_rows: RowScaling,
    /// Compute Spectral Comm and Heat cells from their own kernel matrices
    /// instead of copying the Walk and Forest results.
    pub verify_equivalence: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            base: LfrParams::default(),
            vary: Vary::Mu,
            values: Vary::Mu.standard_values(),
            measures: Measure::ALL.to_vec(),
            methods: Method::ALL.to_vec(),
            replicates: DEFAULT_REPLICATES,
            alpha_points: DEFAULT_ALPHA_POINTS,
            alpha_max: DEFAULT_ALPHA_MAX,
            kmeans_seed: 0,
            master_seed: 0,
            kmeans_restarts: DEFAULT_RESTARTS,
            ward_max: DEFAULT_WARD_MAX,
            skip_ceiling: DEFAULT_SKIP_CEILING,
            embedding_rows: RowScaling::default(),
            verify_equivalence: false,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |msg: String| Err(HarnessError::Invalid(msg));
        if self.values.is_empty() {
            return bad("no values to sweep".into());
        }
        if let Some(v) = self.values.iter().find(|v| !self.vary.accepts(v)) {
            return bad(format!("value {v} does not fit parameter {}", self.vary));
        }
        if self.measures.is_empty() || self.methods.is_empty() {
            return bad("need at least one measure and one method".into());
        }
        if self.replicates == 0 || self.alpha_points == 0 || self.kmeans_restarts == 0 {
            return bad("replicates, alpha_points and kmeans_restarts must be positive".into());
        }
        if !(self.alpha_max > 0.0 && self.alpha_max.is_finite()) {
            return bad(format!("alpha_max={} must be positive", self.alpha_max));
        }
        if !(0.0..=1.0).contains(&self.skip_ceiling) {
            return bad(format!("skip_ceiling={} outside [0, 1]", self.skip_ceiling));
        }
        for v in &self.values {
            v.apply(self.vary, &self.base)
                .validate()
                .map_err(|e| HarnessError::Invalid(format!("{}={v}: {e}", self.vary)))?;
        }
        Ok(())
    }

    /// α grid of `measure` (Walk in units of `1/q`).
    pub fn alpha_grid(&self, measure: Measure) -> Vec<f64> {
        cell_grid(measure, self.alpha_points, self.alpha_max)
    }

    /// Seeds of the replicate graphs, shared by every cell of the sweep.
    pub fn replicate_seeds(&self) -> Vec<u64> {
        (0..self.replicates as u64)
            .map(|r| rng::derive_seed(self.master_seed, &[r]))
            .collect()
    }

    fn cell_settings(&self) -> CellSettings {
        CellSettings {
            kmeans_seed: self.kmeans_seed,
            kmeans_restarts: self.kmeans_restarts,
            embedding_rows: self.embedding_rows,
            skip_ceiling: self.skip_ceiling,
            independent_spectra: self.verify_equivalence,
        }
    }
}

/// Grid of a cell: Walk values are multiples of `1/q`.
pub fn cell_grid(measure: Measure, points: usize, alpha_max: f64) -> Vec<f64> {
    kernels::alpha_grid_with_radius(measure, 1.0, points, alpha_max)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellSettings {
    pub kmeans_seed: u64,
    pub kmeans_restarts: usize,
    pub embedding_rows: RowScaling,
    pub skip_ceiling: f64,
    /// Recompute each Spectral kernel's eigenvectors from its own matrix
    /// and never share k-means results between measures.
    pub independent_spectra: bool,
}

impl Default for CellSettings {
    fn default() -> Self {
        ExperimentConfig::default().cell_settings()
    }
}

/// Aggregate of one (parameters, measure, method) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellStats {
    pub best_alpha: f64,
    pub ari_mean: f64,
    pub ari_std: f64,
    pub replicates_used: usize,
    pub skipped: usize,
    /// Mean number of ground-truth communities over the used replicates.
    pub avg_clusters: f64,
    /// Replicate-mean ARI per grid point; `None` where some replicate
    /// could not be clustered.
    pub alpha_means: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub measure: Measure,
    pub method: Method,
    pub vary: Vary,
    pub value: VaryValue,
    pub best_alpha: f64,
    pub ari_mean: f64,
    pub ari_std: f64,
    pub replicates_used: usize,
    pub skipped: usize,
    pub avg_clusters: f64,
    /// Set on Spectral rows whose partitions coincide with another
    /// measure's (Comm with Walk, Heat with Forest).
    pub equivalent_to: Option<Measure>,
}

impl ResultRow {
    fn from_stats(
        measure: Measure,
        method: Method,
        vary: Vary,
        value: VaryValue,
        s: &CellStats,
    ) -> Self {
        Self {
            measure,
            method,
            vary,
            value,
            best_alpha: s.best_alpha,
            ari_mean: s.ari_mean,
            ari_std: s.ari_std,
            replicates_used: s.replicates_used,
            skipped: s.skipped,
            avg_clusters: s.avg_clusters,
            equivalent_to: None,
        }
    }

    pub fn replicates(&self) -> usize {
        self.replicates_used + self.skipped
    }

    pub fn sort_key_cmp(&self, other: &Self) -> Ordering {
        self.value
            .total_cmp(&other.value)
            .then(self.method.cmp(&other.method))
            .then(self.measure.cmp(&other.measure))
    }
}

pub fn sort_rows(rows: &mut [ResultRow]) {
    rows.sort_by(|a, b| a.sort_key_cmp(b));
}

/// Marks Spectral Comm/Heat rows whose numbers equal the Walk/Forest row
/// at the same value, which is what a deduplicated sweep writes.
pub fn mark_equivalences(rows: &mut [ResultRow]) {
    let snapshot = rows.to_vec();
    for row in rows.iter_mut() {
        if row.method != Method::Spectral {
            continue;
        }
        let rep = row.measure.spectral_representative();
        if rep == row.measure {
            continue;
        }
        let twin = snapshot.iter().find(|r| {
            r.method == Method::Spectral
                && r.measure == rep
                && r.value.total_cmp(&row.value) == Ordering::Equal
        });
        if let Some(t) = twin {
            let same = t.best_alpha == row.best_alpha
                && t.ari_mean == row.ari_mean
                && t.ari_std == row.ari_std
                && t.replicates_used == row.replicates_used
                && t.skipped == row.skipped;
            if same {
                row.equivalent_to = Some(rep);
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct CellPlan {
    measure: Measure,
    method: Method,
}

/// Per-replicate result for one cell: `None` when the replicate was
/// skipped, otherwise one ARI per grid point (`None` on failure).
type CellScores = Option<Vec<Option<f64>>>;

struct ReplicateResult {
    communities: usize,
    cells: Vec<CellScores>,
}

fn replicate(
    params: &LfrParams,
    seed: u64,
    replicate_index: u64,
    plans: &[CellPlan],
    grids: &[Vec<f64>],
    settings: &CellSettings,
) -> Option<ReplicateResult> {
    let mut p = params.clone();
    p.seed = seed;
    let out = generate_lfr(&p).ok()?;
    let truth = &out.ground_truth;
    let k = truth.cluster_count();
    let factory = KernelFactory::new(&out.graph);
    let has_isolated = !out.graph.isolated_nodes().is_empty();
    let kseed = rng::derive_seed(settings.kmeans_seed, &[replicate_index]);
    let mut cache: Vec<(DMatrix<f64>, Partition)> = Vec::new();

    let cells = plans
        .iter()
        .zip(grids)
        .map(|(plan, grid)| {
            if plan.measure == Measure::PageRank && has_isolated {
                return None;
            }
            let q = if plan.measure == Measure::Walk {
                factory.spectral_radius().ok()?
            } else {
                1.0
            };
            let scores = grid
                .iter()
                .map(|&a| {
                    let alpha = if plan.measure == Measure::Walk && q > 0.0 {
                        a / q
                    } else {
                        a
                    };
                    let partition = match plan.method {
                        Method::Ward => {
                            let kernel = factory.kernel(plan.measure, alpha).ok()?;
                            let d2 = kernels::kernel_to_distance(&kernel).ok()?;
                            ward_cluster(&d2, k).ok()?.partition
                        }
                        Method::Spectral => {
                            let spectrum = if settings.independent_spectra {
                                factory
                                    .kernel(plan.measure, alpha)
                                    .ok()?
                                    .without_cached_spectrum()
                                    .spectrum()
                                    .ok()?
                            } else {
                                factory.kernel_spectrum(plan.measure, alpha).ok()?
                            };
                            let (embedding, _) =
                                spectral_embedding(&spectrum, k, settings.embedding_rows);
                            let hit = (!settings.independent_spectra)
                                .then(|| cache.iter().find(|(e, _)| *e == embedding))
                                .flatten();
                            match hit {
                                Some((_, part)) => part.clone(),
                                None => {
                                    let part =
                                        kmeans(&embedding, k, kseed, settings.kmeans_restarts)
                                            .ok()?
                                            .partition;
                                    if !settings.independent_spectra {
                                        cache.push((embedding, part.clone()));
                                    }
                                    part
                                }
                            }
                        }
                    };
                    adjusted_rand_index(&partition, truth).ok()
                })
                .collect();
            Some(scores)
        })
        .collect();
    Some(ReplicateResult {
        communities: k,
        cells,
    })
}

fn aggregate(
    per_replicate: &[Option<(usize, &CellScores)>],
    grid: &[f64],
    skip_ceiling: f64,
) -> Result<CellStats, String> {
    let total = per_replicate.len();
    let used: Vec<(usize, &Vec<Option<f64>>)> = per_replicate
        .iter()
        .filter_map(|r| r.and_then(|(k, s)| s.as_ref().map(|s| (k, s))))
        .collect();
    let skipped = total - used.len();
    if used.is_empty() {
        return Err(format!("all {total} replicates skipped"));
    }
    if skipped as f64 > skip_ceiling * total as f64 {
        return Err(format!(
            "{skipped} of {total} replicates skipped, above the ceiling of {skip_ceiling}"
        ));
    }
    let alpha_means: Vec<Option<f64>> = (0..grid.len())
        .map(|i| {
            let mut sum = 0.0;
            for (_, scores) in &used {
                sum += scores[i]?;
            }
            Some(sum / used.len() as f64)
        })
        .collect();
    let mut best: Option<(usize, f64)> = None;
    for (i, m) in alpha_means.iter().enumerate() {
        if let Some(m) = *m {
            if best.is_none_or(|(_, b)| m > b) {
                best = Some((i, m));
            }
        }
    }
    let (bi, mean) = best.ok_or("no grid point could be clustered on every replicate")?;
    let values: Vec<f64> = used.iter().map(|(_, s)| s[bi].expect("eligible")).collect();
    let std = if values.len() > 1 {
        let var =
            values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (values.len() - 1) as f64;
        var.sqrt()
    } else {
        0.0
    };
    let avg_clusters = used.iter().map(|(k, _)| *k as f64).sum::<f64>() / used.len() as f64;
    Ok(CellStats {
        best_alpha: grid[bi],
        ari_mean: mean,
        ari_std: std,
        replicates_used: used.len(),
        skipped,
        avg_clusters,
        alpha_means,
    })
}

/// Evaluates several cells on one shared set of replicate graphs.
fn run_cells(
    params: &LfrParams,
    plans: &[CellPlan],
    grids: &[Vec<f64>],
    seeds: &[u64],
    settings: &CellSettings,
) -> Vec<Result<CellStats, String>> {
    let results: Vec<Option<ReplicateResult>> = seeds
        .par_iter()
        .enumerate()
        .map(|(r, &seed)| replicate(params, seed, r as u64, plans, grids, settings))
        .collect();
    (0..plans.len())
        .map(|c| {
            let per: Vec<Option<(usize, &CellScores)>> = results
                .iter()
                .map(|r| r.as_ref().map(|r| (r.communities, &r.cells[c])))
                .collect();
            aggregate(&per, &grids[c], settings.skip_ceiling)
        })
        .collect()
}

/// Scores one measure/method pair over the graphs generated from
/// `params` with each of `seeds`, at every α in `alphas` (Walk: units of
/// `1/q`). The replicate index used for k-means seeding is the position
/// in `seeds`.
pub fn run_cell(
    params: &LfrParams,
    measure: Measure,
    method: Method,
    alphas: &[f64],
    seeds: &[u64],
    settings: &CellSettings,
) -> Result<CellStats, HarnessError> {
    if alphas.is_empty() || seeds.is_empty() {
        return Err(HarnessError::Invalid(
            "need at least one alpha and one seed".into(),
        ));
    }
    let plan = CellPlan { measure, method };
    run_cells(params, &[plan], &[alphas.to_vec()], seeds, settings)
        .pop()
        .expect("one cell")
        .map_err(|reason| HarnessError::CellFailed {
            cell: format!("{measure}/{method}"),
            reason,
        })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellFailure {
    pub measure: Measure,
    pub method: Method,
    pub value: VaryValue,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepOutput {
    /// Sorted by (value, method, measure).
    pub rows: Vec<ResultRow>,
    pub failures: Vec<CellFailure>,
}

pub fn sweep(config: &ExperimentConfig) -> Result<SweepOutput, HarnessError> {
    sweep_with_progress(config, |_, _| {})
}

/// Runs the sweep, calling `progress(index, value)` before each value.
pub fn sweep_with_progress(
    config: &ExperimentConfig,
    mut progress: impl FnMut(usize, &VaryValue),
) -> Result<SweepOutput, HarnessError> {
    config.validate()?;
    let seeds = config.replicate_seeds();
    let settings = config.cell_settings();
    let mut measures = config.measures.clone();
    measures.sort();
    measures.dedup();
    let mut methods = config.methods.clone();
    methods.sort();
    methods.dedup();

    let mut rows = Vec::new();
    let mut failures = Vec::new();
    let mut attempted = 0;
    for (vi, value) in config.values.iter().enumerate() {
        progress(vi, value);
        let params = value.apply(config.vary, &config.base);
        let mut plans = Vec::new();
        let mut copies = Vec::new();
        for &method in &methods {
            if method == Method::Ward && params.n > config.ward_max {
                continue;
            }
            for &measure in &measures {
                let rep = measure.spectral_representative();
                let dedup = method == Method::Spectral
                    && rep != measure
                    && measures.contains(&rep)
                    && !config.verify_equivalence;
                if dedup {
                    copies.push((measure, rep));
                } else {
                    plans.push(CellPlan { measure, method });
                }
            }
        }
        let grids: Vec<Vec<f64>> = plans.iter().map(|p| config.alpha_grid(p.measure)).collect();
        let results = run_cells(&params, &plans, &grids, &seeds, &settings);
        attempted += plans.len() + copies.len();
        let mut value_rows = Vec::new();
        for (plan, result) in plans.iter().zip(results) {
            match result {
                Ok(stats) => value_rows.push(ResultRow::from_stats(
                    plan.measure,
                    plan.method,
                    config.vary,
                    *value,
                    &stats,
                )),
                Err(reason) => failures.push(CellFailure {
                    measure: plan.measure,
                    method: plan.method,
                    value: *value,
                    reason,
                }),
            }
        }
        for (measure, rep) in copies {
            let source = value_rows
                .iter()
                .find(|r| r.method == Method::Spectral && r.measure == rep)
                .cloned();
            match source {
                Some(src) => value_rows.push(ResultRow {
                    measure,
                    equivalent_to: Some(rep),
                    ..src
                }),
                None => failures.push(CellFailure {
                    measure,
                    method: Method::Spectral,
                    value: *value,
                    reason: format!("equivalent {rep} cell failed"),
                }),
            }
        }
        if config.verify_equivalence {
            mark_equivalences(&mut value_rows);
        }
        rows.extend(value_rows);
    }
    if rows.is_empty() {
        let first = failures
            .first()
            .map(|f| format!("{}/{} at {}: {}", f.measure, f.method, f.value, f.reason))
            .unwrap_or_else(|| "no cells to run".into());
        return Err(HarnessError::AllCellsFailed(attempted, first));
    }
    sort_rows(&mut rows);
    Ok(SweepOutput { rows, failures })
}

/// Run description written next to the CSV.
#[derive(Debug, Clone, Serialize)]
pub struct SweepMetadata<'a> {
    pub version: &'static str,
    pub config: &'a ExperimentConfig,
    pub replicate_seeds: Vec<u64>,
    pub equivalences: Vec<String>,
    pub failures: &'a [CellFailure],
}

pub fn metadata_json(config: &ExperimentConfig, output: &SweepOutput) -> String {
    let equivalences = output
        .rows
        .iter()
        .filter_map(|r| {
            r.equivalent_to
                .map(|e| format!("{} {}={} at {}={}", r.method, r.measure, e, r.vary, r.value))
        })
        .collect();
    let meta = SweepMetadata {
        version: env!("CARGO_PKG_VERSION"),
        config,
        replicate_seeds: config.replicate_seeds(),
        equivalences,
        failures: &output.failures,
    };
    serde_json::to_string_pretty(&meta).expect("metadata serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> LfrParams {
        LfrParams {
            n: 120,
            cmin: 30,
            cmax: 60,
            ..LfrParams::default()
        }
    }

    fn seeds(count: u64) -> Vec<u64> {
        (0..count).map(|r| rng::derive_seed(3, &[r])).collect()
    }

    #[test]
    fn separated_communities_are_recovered() {
        let params = LfrParams {
            mu: 0.0,
            ..LfrParams::default()
        };
        for method in Method::ALL {
            let s = run_cell(
                &params,
                Measure::Forest,
                method,
                &[0.5, 2.0],
                &seeds(2),
                &CellSettings::default(),
            )
            .unwrap();
            assert!((s.ari_mean - 1.0).abs() <= 0.02, "{method}: {}", s.ari_mean);
        }
    }

    #[test]
    fn singleton_grid_is_the_best_alpha() {
        let s = run_cell(
            &small(),
            Measure::Heat,
            Method::Ward,
            &[0.7],
            &seeds(2),
            &CellSettings::default(),
        )
        .unwrap();
        assert_eq!(s.best_alpha, 0.7);
        assert_eq!(s.replicates_used + s.skipped, 2);
    }

    #[test]
    fn run_cell_is_deterministic() {
        let run = || {
            run_cell(
                &small(),
                Measure::PageRank,
                Method::Spectral,
                &cell_grid(Measure::PageRank, 3, 10.0),
                &seeds(1),
                &CellSettings::default(),
            )
            .unwrap()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn best_alpha_maximizes_mean_with_ties_to_smallest() {
        let grid = [0.1, 0.2, 0.3];
        let a = Some(vec![Some(0.5), Some(0.9), Some(0.9)]);
        let b = Some(vec![Some(0.7), Some(0.5), Some(0.5)]);
        let per = [Some((3, &a)), Some((4, &b))];
        let s = aggregate(&per, &grid, 0.2).unwrap();
        assert_eq!(s.best_alpha, 0.2);
        assert!((s.ari_mean - 0.7).abs() < 1e-12);
        assert!((s.ari_std - (0.08f64).sqrt()).abs() < 1e-12);
        assert_eq!(s.avg_clusters, 3.5);
    }

    #[test]
    fn failing_alpha_is_ineligible_and_skips_are_capped() {
        let grid = [0.1, 0.2];
        let a = Some(vec![Some(1.0), Some(0.5)]);
        let b = Some(vec![None, Some(0.6)]);
        let s = aggregate(&[Some((2, &a)), Some((2, &b))], &grid, 0.2).unwrap();
        assert_eq!(s.best_alpha, 0.2);
        assert_eq!(s.alpha_means[0], None);

        let skipped: CellScores = None;
        let per: Vec<_> = (0..5)
            .map(|i| {
                if i == 0 {
                    Some((2, &skipped))
                } else {
                    Some((2, &a))
                }
            })
            .collect();
        let s = aggregate(&per, &grid, 0.2).unwrap();
        assert_eq!((s.replicates_used, s.skipped), (4, 1));
        let mut per = per;
        per[1] = None;
        assert!(aggregate(&per, &grid, 0.2).is_err());
    }

    #[test]
    fn n_scales_size_limits() {
        let p = VaryValue::Count(3000).apply(Vary::N, &LfrParams::default());
        assert_eq!((p.n, p.cmin, p.cmax), (3000, 800, 1400));
        let p = VaryValue::Count(100).apply(Vary::N, &LfrParams::default());
        assert_eq!((p.cmin, p.cmax), (27, 47));
    }

    #[test]
    fn ward_only_mu_sweep_has_one_row_per_value_and_measure() {
        let config = ExperimentConfig {
            base: small(),
            methods: vec![Method::Ward],
            replicates: 1,
            alpha_points: 2,
            ..ExperimentConfig::default()
        };
        let out = sweep(&config).unwrap();
        assert_eq!(out.rows.len() + out.failures.len(), 30);
        assert!(out.rows.iter().all(|r| r.equivalent_to.is_none()));
    }

    #[test]
    fn spectral_twins_are_marked_and_ward_respects_size_cap() {
        let config = ExperimentConfig {
            base: small(),
            vary: Vary::N,
            values: vec![VaryValue::Count(90), VaryValue::Count(150)],
            measures: vec![Measure::Walk, Measure::Communicability],
            replicates: 2,
            alpha_points: 2,
            ward_max: 100,
            ..ExperimentConfig::default()
        };
        let out = sweep(&config).unwrap();
        let ward_above: Vec<_> = out
            .rows
            .iter()
            .filter(|r| r.method == Method::Ward && r.value == VaryValue::Count(150))
            .collect();
        assert!(ward_above.is_empty());
        let comm: Vec<_> = out
            .rows
            .iter()
            .filter(|r| r.method == Method::Spectral && r.measure == Measure::Communicability)
            .collect();
        assert_eq!(comm.len(), 2);
        assert!(comm.iter().all(|r| r.equivalent_to == Some(Measure::Walk)));
        let json = metadata_json(&config, &out);
        assert!(json.contains("Spectral Comm=Walk at n=90"));
    }
}
