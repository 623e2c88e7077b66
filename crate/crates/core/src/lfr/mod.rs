//! LFR benchmark graphs: power-law degrees, power-law community sizes and
//! a controlled fraction `μ` of inter-community edges.
//!
//! The pipeline is degree sampling → community sizes → node assignment →
//! stub matching (one pool per community plus one external pool) →
//! degree-preserving edge swaps to remove loops and multi-edges. A failed
//! attempt is retried with a fresh stream derived from the seed.

mod communities;
mod power_law;
mod wiring;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;
use crate::partition::Partition;
use crate::rng;

pub use communities::{sample_community_sizes, sizes_feasible};
pub use power_law::sample_power_law;

pub const DEFAULT_TOL_MU: f64 = 0.05;
pub const DEFAULT_TOL_DEGREE: f64 = 0.10;
/// Allowed relative gap between the sampled mean degree and `m`.
pub const DEGREE_MEAN_TOL: f64 = 0.02;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LfrError {
    #[error("invalid LFR parameters: {0}")]
    InvalidParams(String),
    #[error("bad sampling range: {0}")]
    BadRange(String),
    #[error("no community sizes in [{cmin}, {cmax}] sum to {n}")]
    Infeasible { n: usize, cmin: usize, cmax: usize },
    #[error("generation failed after {attempts} attempts: {reason}")]
    GenerationFailed { attempts: u32, reason: String },
}

/// Generation knobs. `Default` is the reference configuration
/// `n=300, m=5, τ₁=2.5, τ₂=1.5, cmin=80, cmax=140, μ=0.2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LfrParams {
    pub n: usize,
    /// Target average degree.
    pub m: f64,
    /// Degree distribution exponent.
    pub tau1: f64,
    /// Community size distribution exponent.
    pub tau2: f64,
    pub cmin: usize,
    pub cmax: usize,
    /// Fraction of edges joining different communities.
    pub mu: f64,
    pub seed: u64,
    pub max_retries: u32,
    /// Overrides the default maximum degree.
    pub kmax: Option<usize>,
}

impl Default for LfrParams {
    fn default() -> Self {
        Self {
            n: 300,
            m: 5.0,
            tau1: 2.5,
            tau2: 1.5,
            cmin: 80,
            cmax: 140,
            mu: 0.2,
            seed: 0,
            max_retries: 10,
            kmax: None,
        }
    }
}

impl LfrParams {
    /// Hard errors for unusable parameters; warnings for exponents outside
    /// the usual `2 ≤ τ₁ ≤ 3`, `1 ≤ τ₂ ≤ 2`.
    pub fn validate(&self) -> Result<Vec<String>, LfrError> {
        let bad = |msg: String| Err(LfrError::InvalidParams(msg));
        if self.n == 0 {
            return bad("n must be positive".into());
        }
        if !(self.m >= 1.0 && self.m.is_finite()) {
            return bad(format!("average degree m={} must be >= 1", self.m));
        }
        if !(self.tau1 > 0.0 && self.tau2 > 0.0 && self.tau1.is_finite() && self.tau2.is_finite()) {
            return bad("power-law exponents must be positive".into());
        }
        if !(1 <= self.cmin && self.cmin <= self.cmax && self.cmax <= self.n) {
            return bad(format!(
                "need 1 <= cmin ({}) <= cmax ({}) <= n ({})",
                self.cmin, self.cmax, self.n
            ));
        }
        if !(0.0..=1.0).contains(&self.mu) {
            return bad(format!("mu={} outside [0, 1]", self.mu));
        }
        let mut warnings = Vec::new();
        if !(2.0..=3.0).contains(&self.tau1) {
            warnings.push(format!(
                "tau1={} outside the typical range [2, 3]",
                self.tau1
            ));
        }
        if !(1.0..=2.0).contains(&self.tau2) {
            warnings.push(format!(
                "tau2={} outside the typical range [1, 2]",
                self.tau2
            ));
        }
        Ok(warnings)
    }

    /// `min(n - 1, 3·m·⌈ln n⌉)`, further capped so that a node's internal
    /// degree always fits inside a community of size `cmax`.
    pub fn effective_kmax(&self) -> usize {
        let default = (3.0 * self.m * (self.n as f64).ln().ceil()).round() as usize;
        let mut kmax = self.kmax.unwrap_or(default).min(self.n.saturating_sub(1));
        if self.mu < 1.0 {
            let fit = ((self.cmax.saturating_sub(1)) as f64 / (1.0 - self.mu)).floor() as usize;
            kmax = kmax.min(fit);
        }
        kmax.max(1)
    }
}

/// Measured properties of a generated graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LfrReport {
    pub average_degree: f64,
    pub mu: f64,
    pub community_sizes: Vec<usize>,
    /// Failed attempts before the successful one.
    pub retries: u32,
    pub kmax: usize,
    /// Lower end of the continuous degree relaxation found by bisection.
    pub degree_lower_bound: f64,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct LfrOutput {
    pub graph: Graph,
    pub ground_truth: Partition,
    pub realized: LfrReport,
}

/// Fraction of edges whose endpoints carry different labels; 0 for an
/// edgeless graph.
pub fn mixing_fraction(graph: &Graph, partition: &Partition) -> f64 {
    if graph.edge_count() == 0 {
        return 0.0;
    }
    let labels = partition.labels();
    let external = graph
        .edges()
        .iter()
        .filter(|&&(i, j)| labels[i] != labels[j])
        .count();
    external as f64 / graph.edge_count() as f64
}

fn degree_sequence(uniforms: &[f64], tau1: f64, lower: f64, kmax: usize) -> Vec<usize> {
    uniforms
        .iter()
        .map(|&u| power_law::discrete_from_uniform(u, tau1, lower, kmax))
        .collect()
}

fn mean(xs: &[usize]) -> f64 {
    xs.iter().sum::<usize>() as f64 / xs.len() as f64
}

/// Samples degrees once, then bisects the lower end of the continuous
/// relaxation until the mean is as close to `m` as it gets. The same
/// uniforms are reused, so the mean is monotone in the lower end.
fn sample_degrees(
    rng: &mut impl Rng,
    p: &LfrParams,
    kmax: usize,
    warnings: &mut Vec<String>,
) -> (Vec<usize>, f64) {
    let uniforms: Vec<f64> = (0..p.n).map(|_| rng.random::<f64>()).collect();
    let (mut lo, mut hi) = (0.5_f64, kmax as f64 + 0.5);
    let mut best = (f64::INFINITY, lo);
    for _ in 0..64 {
        let mid = 0.5 * (lo + hi);
        let avg = mean(&degree_sequence(&uniforms, p.tau1, mid, kmax));
        let gap = (avg - p.m).abs();
        if gap < best.0 {
            best = (gap, mid);
        }
        if avg < p.m {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    for bound in [0.5, kmax as f64 + 0.5] {
        let avg = mean(&degree_sequence(&uniforms, p.tau1, bound, kmax));
        if (avg - p.m).abs() < best.0 {
            best = ((avg - p.m).abs(), bound);
        }
    }
    let lower = best.1;
    if best.0 > DEGREE_MEAN_TOL * p.m {
        warnings.push(format!(
            "sampled mean degree misses m={} by {:.3}",
            p.m, best.0
        ));
    }
    let mut degrees = degree_sequence(&uniforms, p.tau1, lower, kmax);
    if degrees.iter().sum::<usize>() % 2 == 1 {
        let i = rng.random_range(0..p.n);
        if degrees[i] < kmax {
            degrees[i] += 1;
        } else {
            degrees[i] -= 1;
        }
    }
    (degrees, lower)
}

/// Splits `k` into internal and external parts with `E[external] = μk`.
fn split_degree(rng: &mut impl Rng, k: usize, mu: f64) -> usize {
    if mu <= 0.0 {
        return k;
    }
    if mu >= 1.0 {
        return 0;
    }
    let x = (1.0 - mu) * k as f64;
    let base = x.floor();
    let frac = x - base;
    let bump = usize::from(frac > 0.0 && rng.random::<f64>() < frac);
    (base as usize + bump).min(k)
}

/// Places nodes, largest internal degree first, into communities that
/// have room and are large enough to host that internal degree.
fn assign_communities(
    rng: &mut impl Rng,
    internal: &[usize],
    sizes: &[usize],
) -> Result<Vec<usize>, String> {
    let n = internal.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    order.sort_by(|&a, &b| internal[b].cmp(&internal[a]));
    let mut remaining = sizes.to_vec();
    let mut membership = vec![usize::MAX; n];
    for node in order {
        let need = internal[node];
        let total: usize = (0..sizes.len())
            .filter(|&c| sizes[c] > need)
            .map(|c| remaining[c])
            .sum();
        if total == 0 {
            return Err(format!("no community can host internal degree {need}"));
        }
        let mut target = rng.random_range(0..total);
        let chosen = (0..sizes.len())
            .filter(|&c| sizes[c] > need)
            .find(|&c| {
                if target < remaining[c] {
                    true
                } else {
                    target -= remaining[c];
                    false
                }
            })
            .expect("target below total capacity");
        remaining[chosen] -= 1;
        membership[node] = chosen;
    }
    Ok(membership)
}

struct Attempt {
    graph: Graph,
    membership: Vec<usize>,
    sizes: Vec<usize>,
    lower: f64,
    warnings: Vec<String>,
}

fn attempt(p: &LfrParams, attempt_index: u32, kmax: usize) -> Result<Attempt, LfrError> {
    let mut rng = rng::stream(p.seed, &[0x1F2, u64::from(attempt_index)]);
    let mut warnings = Vec::new();
    let (degrees, lower) = sample_degrees(&mut rng, p, kmax, &mut warnings);
    let sizes = communities::sample_sizes(&mut rng, p.n, p.tau2, p.cmin, p.cmax)?;
    let mut internal: Vec<usize> = degrees
        .iter()
        .map(|&k| split_degree(&mut rng, k, p.mu))
        .collect();
    let membership = assign_communities(&mut rng, &internal, &sizes).map_err(|reason| {
        LfrError::GenerationFailed {
            attempts: attempt_index + 1,
            reason,
        }
    })?;
    let mut external: Vec<usize> = degrees
        .iter()
        .zip(&internal)
        .map(|(&k, &i)| k - i)
        .collect();

    let mut members = vec![Vec::new(); sizes.len()];
    for (node, &c) in membership.iter().enumerate() {
        members[c].push(node);
    }
    // internal stub counts must be even within each community
    for group in &members {
        let sum: usize = group.iter().map(|&v| internal[v]).sum();
        if sum.is_multiple_of(2) {
            continue;
        }
        let candidates: Vec<usize> = if p.mu <= 0.0 {
            group
                .iter()
                .copied()
                .filter(|&v| internal[v] >= 2)
                .collect()
        } else {
            group
                .iter()
                .copied()
                .filter(|&v| internal[v] >= 1)
                .collect()
        };
        if let Some(&v) = candidates.as_slice().choose(&mut rng) {
            internal[v] -= 1;
            if p.mu > 0.0 {
                external[v] += 1;
            }
        } else if let Some(&v) = group
            .iter()
            .filter(|&&v| internal[v] + 1 < group.len())
            .collect::<Vec<_>>()
            .as_slice()
            .choose(&mut rng)
        {
            internal[*v] += 1;
        }
    }
    debug_assert_eq!(external.iter().sum::<usize>() % 2, 0);

    let mut edges = Vec::with_capacity(degrees.iter().sum::<usize>() / 2);
    for group in &members {
        let pool = wiring::Pool::internal(group, &internal, &mut rng);
        edges.extend(pool.repair(&membership, &mut rng).map_err(|reason| {
            LfrError::GenerationFailed {
                attempts: attempt_index + 1,
                reason,
            }
        })?);
    }
    let all: Vec<usize> = (0..p.n).collect();
    let pool = wiring::Pool::external(&all, &external, &mut rng);
    edges.extend(pool.repair(&membership, &mut rng).map_err(|reason| {
        LfrError::GenerationFailed {
            attempts: attempt_index + 1,
            reason,
        }
    })?);

    let graph = Graph::from_edge_list(p.n, &edges).map_err(|e| LfrError::GenerationFailed {
        attempts: attempt_index + 1,
        reason: e.to_string(),
    })?;
    if graph.edge_count() != edges.len() {
        return Err(LfrError::GenerationFailed {
            attempts: attempt_index + 1,
            reason: "duplicate edges survived rewiring".into(),
        });
    }
    Ok(Attempt {
        graph,
        membership,
        sizes,
        lower,
        warnings,
    })
}

/// Generates one LFR graph with its planted partition.
pub fn generate_lfr(params: &LfrParams) -> Result<LfrOutput, LfrError> {
    let warnings = params.validate()?;
    if !sizes_feasible(params.n, params.cmin, params.cmax) {
        return Err(LfrError::Infeasible {
            n: params.n,
            cmin: params.cmin,
            cmax: params.cmax,
        });
    }
    let kmax = params.effective_kmax();
    let mut last_reason = String::new();
    for retry in 0..=params.max_retries {
        match attempt(params, retry, kmax) {
            Ok(a) => {
                let mut warnings = warnings;
                warnings.extend(a.warnings);
                let ground_truth =
                    Partition::from_labels(&a.membership).expect("n > 0 checked above");
                let realized = LfrReport {
                    average_degree: a.graph.average_degree(),
                    mu: mixing_fraction(&a.graph, &ground_truth),
                    community_sizes: ground_truth.cluster_sizes(),
                    retries: retry,
                    kmax,
                    degree_lower_bound: a.lower,
                    warnings,
                };
                debug_assert_eq!(a.sizes.len(), ground_truth.cluster_count());
                return Ok(LfrOutput {
                    graph: a.graph,
                    ground_truth,
                    realized,
                });
            }
            Err(LfrError::GenerationFailed { reason, .. }) => last_reason = reason,
            Err(other) => return Err(other),
        }
    }
    Err(LfrError::GenerationFailed {
        attempts: params.max_retries + 1,
        reason: last_reason,
    })
}

/// Pass/fail checks of a generated graph against its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub simple: bool,
    pub sizes_in_bounds: bool,
    pub mu_ok: bool,
    pub degree_ok: bool,
    pub no_isolated: bool,
    pub measured_mu: f64,
    pub measured_average_degree: f64,
    pub isolated_nodes: Vec<usize>,
    pub out_of_bounds_sizes: Vec<usize>,
}

impl ValidationReport {
    /// All hard checks passed. Isolated nodes are reported separately.
    pub fn passed(&self) -> bool {
        self.simple && self.sizes_in_bounds && self.mu_ok && self.degree_ok
    }
}

pub fn validate_lfr(out: &LfrOutput, params: &LfrParams) -> ValidationReport {
    validate_lfr_with(out, params, DEFAULT_TOL_MU, DEFAULT_TOL_DEGREE)
}

pub fn validate_lfr_with(
    out: &LfrOutput,
    params: &LfrParams,
    tol_mu: f64,
    tol_degree: f64,
) -> ValidationReport {
    let g = &out.graph;
    let simple = g.edges().iter().all(|&(i, j)| i < j && j < g.node_count())
        && g.edges().windows(2).all(|w| w[0] < w[1])
        && out.ground_truth.len() == g.node_count();
    let out_of_bounds_sizes: Vec<usize> = out
        .ground_truth
        .cluster_sizes()
        .into_iter()
        .filter(|s| !(params.cmin..=params.cmax).contains(s))
        .collect();
    let measured_mu = if out.ground_truth.len() == g.node_count() {
        mixing_fraction(g, &out.ground_truth)
    } else {
        f64::NAN
    };
    let measured_average_degree = g.average_degree();
    let isolated_nodes = g.isolated_nodes();
    ValidationReport {
        simple,
        sizes_in_bounds: out_of_bounds_sizes.is_empty(),
        mu_ok: (measured_mu - params.mu).abs() <= tol_mu,
        degree_ok: (measured_average_degree - params.m).abs() / params.m <= tol_degree,
        no_isolated: isolated_nodes.is_empty(),
        measured_mu,
        measured_average_degree,
        isolated_nodes,
        out_of_bounds_sizes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_configuration_validates() {
        let p = LfrParams::default();
        let out = generate_lfr(&p).unwrap();
        assert_eq!(out.graph.node_count(), 300);
        let v = validate_lfr(&out, &p);
        assert!(v.passed(), "{v:?}");
        assert!(out.ground_truth.check_invariants());
        assert_eq!(
            out.realized.community_sizes,
            out.ground_truth.cluster_sizes()
        );
    }

    #[test]
    fn zero_mixing_has_no_external_edges() {
        let p = LfrParams {
            mu: 0.0,
            seed: 4,
            ..LfrParams::default()
        };
        let out = generate_lfr(&p).unwrap();
        assert_eq!(out.realized.mu, 0.0);
        let v = validate_lfr(&out, &p);
        assert!(v.mu_ok && v.measured_mu == 0.0);
    }

    #[test]
    fn deterministic_for_seed() {
        let p = LfrParams {
            seed: 17,
            ..LfrParams::default()
        };
        let a = generate_lfr(&p).unwrap();
        let b = generate_lfr(&p).unwrap();
        assert_eq!(a.graph, b.graph);
        assert_eq!(a.ground_truth, b.ground_truth);
        let c = generate_lfr(&LfrParams { seed: 18, ..p }).unwrap();
        assert_ne!(a.graph, c.graph);
    }

    #[test]
    fn oversized_community_fails_size_check() {
        let p = LfrParams {
            n: 6,
            m: 1.0,
            cmin: 2,
            cmax: 4,
            ..LfrParams::default()
        };
        let graph = Graph::from_edge_list(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (5, 0)]).unwrap();
        let ground_truth = Partition::from_labels(&[0, 0, 0, 0, 0, 1]).unwrap();
        let out = LfrOutput {
            realized: LfrReport {
                average_degree: graph.average_degree(),
                mu: mixing_fraction(&graph, &ground_truth),
                community_sizes: ground_truth.cluster_sizes(),
                retries: 0,
                kmax: 2,
                degree_lower_bound: 0.5,
                warnings: vec![],
            },
            graph,
            ground_truth,
        };
        let v = validate_lfr(&out, &p);
        assert!(!v.sizes_in_bounds);
        assert_eq!(v.out_of_bounds_sizes, vec![5, 1]);
        assert!(!v.passed());
    }

    #[test]
    fn rejects_invalid_params() {
        for p in [
            LfrParams {
                n: 0,
                ..LfrParams::default()
            },
            LfrParams {
                m: 0.5,
                ..LfrParams::default()
            },
            LfrParams {
                mu: 1.5,
                ..LfrParams::default()
            },
            LfrParams {
                cmin: 150,
                ..LfrParams::default()
            },
            LfrParams {
                cmax: 400,
                ..LfrParams::default()
            },
        ] {
            assert!(
                matches!(generate_lfr(&p), Err(LfrError::InvalidParams(_))),
                "{p:?}"
            );
        }
        let p = LfrParams {
            n: 50,
            cmin: 30,
            cmax: 40,
            ..LfrParams::default()
        };
        assert!(matches!(generate_lfr(&p), Err(LfrError::Infeasible { .. })));
    }

    #[test]
    fn warns_outside_typical_exponents() {
        let p = LfrParams {
            tau1: 3.5,
            tau2: 2.5,
            ..LfrParams::default()
        };
        assert_eq!(p.validate().unwrap().len(), 2);
        assert!(LfrParams::default().validate().unwrap().is_empty());
    }

    #[test]
    fn kmax_respects_cmax() {
        let p = LfrParams {
            cmin: 20,
            cmax: 50,
            ..LfrParams::default()
        };
        let kmax = p.effective_kmax();
        assert!(((1.0 - p.mu) * kmax as f64).ceil() as usize <= 49);
        assert_eq!(LfrParams::default().effective_kmax(), 90);
    }

    #[test]
    fn all_external_mixing() {
        let p = LfrParams {
            mu: 1.0,
            seed: 2,
            ..LfrParams::default()
        };
        let out = generate_lfr(&p).unwrap();
        assert_eq!(out.realized.mu, 1.0);
    }
}
