//! Ward agglomerative clustering driven by a squared-distance matrix.
//!
//! The merge cost of clusters `A` and `B` is the increase in the total
//! within-cluster sum of squared distances to the centroids,
//! `δ(A, B) = |A||B| / (|A| + |B|) · ‖m(A) − m(B)‖²`. For singletons it is
//! `d²/2`; after each merge the costs to the new cluster follow the
//! Lance–Williams recurrence, so no point coordinates are ever needed.

use super::{check_k, ClusterError};
use crate::graph::DenseMatrix;
use crate::partition::Partition;

const TIE_TOL: f64 = 1e-12;
const NEG_COST_TOL: f64 = 1e-9;

/// One agglomeration step. Ids follow the usual dendrogram convention:
/// `0..n` are the input points and step `s` creates cluster `n + s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MergeStep {
    pub left: usize,
    pub right: usize,
    /// Increase of the within-cluster sum of squares caused by the merge.
    pub cost: f64,
    /// Size of the merged cluster.
    pub size: usize,
}

#[derive(Debug, Clone)]
pub struct WardResult {
    pub partition: Partition,
    pub merges: Vec<MergeStep>,
}

fn validate(d2: &DenseMatrix) -> Result<(), ClusterError> {
    let n = d2.nrows();
    if d2.ncols() != n {
        return Err(ClusterError::MalformedDistance(format!(
            "{}x{} is not square",
            n,
            d2.ncols()
        )));
    }
    let scale = d2.amax().max(1.0);
    for i in 0..n {
        if d2[(i, i)] != 0.0 {
            return Err(ClusterError::MalformedDistance(format!(
                "nonzero diagonal at {i}"
            )));
        }
        for j in (i + 1)..n {
            let (a, b) = (d2[(i, j)], d2[(j, i)]);
            if !a.is_finite() || !b.is_finite() {
                return Err(ClusterError::MalformedDistance(format!(
                    "non-finite entry at ({i},{j})"
                )));
            }
            if a < 0.0 || b < 0.0 {
                return Err(ClusterError::MalformedDistance(format!(
                    "negative entry at ({i},{j})"
                )));
            }
            if (a - b).abs() > 1e-12 * scale {
                return Err(ClusterError::MalformedDistance(format!(
                    "asymmetric at ({i},{j})"
                )));
            }
        }
    }
    Ok(())
}

/// Merges from singletons until `k` clusters remain.
///
/// The cheapest pair is merged at each step; costs equal within `1e-12`
/// are resolved towards the lexicographically smallest `(left, right)`
/// id pair.
pub fn ward_cluster(d2: &DenseMatrix, k: usize) -> Result<WardResult, ClusterError> {
    let n = d2.nrows();
    check_k(k, n)?;
    validate(d2)?;

    let mut cost = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            cost[i * n + j] = 0.5 * d2[(i, j)];
        }
    }
    let mut size = vec![1usize; n];
    let mut id: Vec<usize> = (0..n).collect();
    let mut owner: Vec<usize> = (0..n).collect();
    let mut active: Vec<usize> = (0..n).collect();
    let mut merges = Vec::with_capacity(n - k);

    while active.len() > k {
        let mut best: Option<(f64, (usize, usize), usize, usize)> = None;
        for (ai, &i) in active.iter().enumerate() {
            let row = &cost[i * n..(i + 1) * n];
            for &j in &active[ai + 1..] {
                let c = row[j];
                let pair = (id[i].min(id[j]), id[i].max(id[j]));
                let better = match best {
                    None => true,
                    Some((bc, bp, _, _)) => {
                        c < bc - TIE_TOL || ((c - bc).abs() <= TIE_TOL && pair < bp)
                    }
                };
                if better {
                    best = Some((c, pair, i, j));
                }
            }
        }
        let (c, (left, right), a, b) = best.expect("at least two active clusters");
        let (sa, sb) = (size[a], size[b]);
        let ab = cost[a * n + b];
        for &other in &active {
            if other == a || other == b {
                continue;
            }
            let sc = size[other];
            let updated = ((sa + sc) as f64 * cost[a * n + other]
                + (sb + sc) as f64 * cost[b * n + other]
                - sc as f64 * ab)
                / (sa + sb + sc) as f64;
            cost[a * n + other] = updated;
            cost[other * n + a] = updated;
        }
        size[a] = sa + sb;
        id[a] = n + merges.len();
        for o in owner.iter_mut() {
            if *o == b {
                *o = a;
            }
        }
        active.retain(|&x| x != b);
        let cost_value = if c < 0.0 && c >= -NEG_COST_TOL * d2.amax().max(1.0) {
            0.0
        } else {
            c.max(0.0)
        };
        merges.push(MergeStep {
            left,
            right,
            cost: cost_value,
            size: sa + sb,
        });
    }

    let partition = Partition::from_labels(&owner).expect("n >= 1");
    Ok(WardResult { partition, merges })
}
