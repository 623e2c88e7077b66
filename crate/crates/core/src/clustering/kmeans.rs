//! Seeded k-means++ with Lloyd iterations and best-of-restarts selection.

use nalgebra::DMatrix;
use rand::Rng;
use rayon::prelude::*;

use super::{check_k, ClusterError};
use crate::partition::Partition;
use crate::rng;

pub const DEFAULT_RESTARTS: usize = 10;
pub const MAX_LLOYD_ITERATIONS: usize = 300;

#[derive(Debug, Clone)]
pub struct KMeansResult {
    pub partition: Partition,
    /// Within-cluster sum of squared distances to the centroids.
    pub inertia: f64,
    /// Index of the restart that produced this result.
    pub restart: usize,
    pub iterations: usize,
}

fn sq_dist(points: &DMatrix<f64>, i: usize, center: &[f64]) -> f64 {
    center
        .iter()
        .enumerate()
        .map(|(d, c)| {
            let diff = points[(i, d)] - c;
            diff * diff
        })
        .sum()
}

fn row(points: &DMatrix<f64>, i: usize) -> Vec<f64> {
    (0..points.ncols()).map(|d| points[(i, d)]).collect()
}

fn plus_plus_init(points: &DMatrix<f64>, k: usize, rng: &mut impl Rng) -> Vec<Vec<f64>> {
    let n = points.nrows();
    let mut centers = vec![row(points, rng.random_range(0..n))];
    let mut nearest: Vec<f64> = (0..n).map(|i| sq_dist(points, i, &centers[0])).collect();
    while centers.len() < k {
        let total: f64 = nearest.iter().sum();
        let pick = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut chosen = n - 1;
            for (i, &w) in nearest.iter().enumerate() {
                acc += w;
                if acc > target && w > 0.0 {
                    chosen = i;
                    break;
                }
            }
            chosen
        } else {
            rng.random_range(0..n)
        };
        let c = row(points, pick);
        for (i, d) in nearest.iter_mut().enumerate() {
            *d = d.min(sq_dist(points, i, &c));
        }
        centers.push(c);
    }
    centers
}

fn nearest_center(points: &DMatrix<f64>, i: usize, centers: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, center) in centers.iter().enumerate() {
        let d = sq_dist(points, i, center);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

fn lloyd(points: &DMatrix<f64>, mut centers: Vec<Vec<f64>>) -> (Vec<usize>, f64, usize) {
    let (n, dim) = points.shape();
    let k = centers.len();
    let mut labels = vec![usize::MAX; n];
    let mut iterations = 0;
    for iter in 0..MAX_LLOYD_ITERATIONS {
        iterations = iter + 1;
        let mut changed = false;
        let mut dists = vec![0.0; n];
        for i in 0..n {
            let (c, d) = nearest_center(points, i, &centers);
            dists[i] = d;
            if labels[i] != c {
                labels[i] = c;
                changed = true;
            }
        }
        if !changed {
            break;
        }

        let mut counts = vec![0usize; k];
        for &l in &labels {
            counts[l] += 1;
        }
        // Reseed empty clusters at the point farthest from its center.
        for c in 0..k {
            if counts[c] > 0 {
                continue;
            }
            let far = (0..n)
                .filter(|&i| counts[labels[i]] > 1)
                .max_by(|&a, &b| dists[a].total_cmp(&dists[b]).then(b.cmp(&a)));
            if let Some(p) = far {
                counts[labels[p]] -= 1;
                labels[p] = c;
                counts[c] = 1;
                dists[p] = 0.0;
            }
        }

        for (c, center) in centers.iter_mut().enumerate() {
            if counts[c] == 0 {
                continue;
            }
            center.iter_mut().for_each(|v| *v = 0.0);
            for i in (0..n).filter(|&i| labels[i] == c) {
                for d in 0..dim {
                    center[d] += points[(i, d)];
                }
            }
            let inv = 1.0 / counts[c] as f64;
            center.iter_mut().for_each(|v| *v *= inv);
        }
    }
    let inertia = (0..n)
        .map(|i| sq_dist(points, i, &centers[labels[i]]))
        .sum();
    (labels, inertia, iterations)
}

/// Clusters the rows of `points` into at most `k` groups.
///
/// Restart `r` draws its k-means++ seeds from a stream derived from
/// `(seed, r)`, so restarts are independent and may run in parallel. The
/// result with the smallest inertia wins; ties go to the lowest restart.
pub fn kmeans(
    points: &DMatrix<f64>,
    k: usize,
    seed: u64,
    restarts: usize,
) -> Result<KMeansResult, ClusterError> {
    let n = points.nrows();
    check_k(k, n)?;
    if restarts == 0 {
        return Err(ClusterError::NoRestarts);
    }
    let runs: Vec<(Vec<usize>, f64, usize)> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = rng::stream(seed, &[r as u64]);
            let centers = plus_plus_init(points, k, &mut rng);
            lloyd(points, centers)
        })
        .collect();
    let (restart, (labels, inertia, iterations)) = runs
        .into_iter()
        .enumerate()
        .min_by(|(ra, a), (rb, b)| a.1.total_cmp(&b.1).then(ra.cmp(rb)))
        .expect("restarts >= 1");
    let partition = Partition::from_labels(&labels).expect("n >= 1");
    Ok(KMeansResult {
        partition,
        inertia,
        restart,
        iterations,
    })
}
