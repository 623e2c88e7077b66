//! Independent reference implementations shared by the integration tests.
//! None of these call into the library's kernel, clustering or metric code.

#![allow(dead_code)]

use nalgebra::DMatrix;
use netprox::Graph;
use rand::Rng;

pub fn random_graph(rng: &mut impl Rng, n: usize, p: f64) -> Graph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    Graph::from_edge_list(n, &edges).unwrap()
}

pub fn adjacency(g: &Graph) -> DMatrix<f64> {
    let n = g.node_count();
    let mut a = DMatrix::zeros(n, n);
    for &(i, j) in g.edges() {
        a[(i, j)] = 1.0;
        a[(j, i)] = 1.0;
    }
    a
}

pub fn laplacian(g: &Graph) -> DMatrix<f64> {
    let a = adjacency(g);
    let n = a.nrows();
    let mut l = -a.clone();
    for i in 0..n {
        l[(i, i)] = a.row(i).sum();
    }
    l
}

pub fn markov(g: &Graph) -> DMatrix<f64> {
    let mut p = adjacency(g);
    for i in 0..p.nrows() {
        let d = p.row(i).sum();
        p.row_mut(i).scale_mut(1.0 / d);
    }
    p
}

/// Largest absolute eigenvalue by plain power iteration on `M²`.
pub fn power_radius(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let m2 = m * m;
    let mut v = DMatrix::from_fn(n, 1, |i, _| 1.0 + i as f64 * 0.01);
    let mut lambda = 0.0;
    for _ in 0..5000 {
        let w = &m2 * &v;
        let norm = w.norm();
        if norm == 0.0 {
            return 0.0;
        }
        lambda = norm / v.norm();
        v = w / norm;
    }
    lambda.sqrt()
}

/// `Σ_{k<terms} (c·M)^k`.
pub fn geometric_series(m: &DMatrix<f64>, c: f64, terms: usize) -> DMatrix<f64> {
    let n = m.nrows();
    let mut sum = DMatrix::identity(n, n);
    let mut term = DMatrix::identity(n, n);
    for _ in 1..terms {
        term = &term * m * c;
        sum += &term;
    }
    sum
}

/// `Σ_{k<terms} (c·M)^k / k!`.
pub fn exp_series(m: &DMatrix<f64>, c: f64, terms: usize) -> DMatrix<f64> {
    let n = m.nrows();
    let mut sum = DMatrix::identity(n, n);
    let mut term = DMatrix::identity(n, n);
    for k in 1..terms {
        term = &term * m * (c / k as f64);
        sum += &term;
    }
    sum
}

/// ARI from an explicit walk over all node pairs.
pub fn ari_by_pairs(x: &[usize], y: &[usize]) -> f64 {
    let n = x.len();
    let (mut both, mut in_x, mut in_y, mut total) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..n {
        for j in (i + 1)..n {
            let a = x[i] == x[j];
            let b = y[i] == y[j];
            total += 1.0;
            if a {
                in_x += 1.0;
            }
            if b {
                in_y += 1.0;
            }
            if a && b {
                both += 1.0;
            }
        }
    }
    let expected = if total > 0.0 {
        in_x * in_y / total
    } else {
        0.0
    };
    let max = 0.5 * (in_x + in_y);
    if max == expected {
        return if both == expected { 1.0 } else { 0.0 };
    }
    (both - expected) / (max - expected)
}

/// Ward merges computed from the centroid definition in kernel feature
/// space. Returns each merge as the two merged member sets, plus the
/// smallest gap between the best and second-best cost over all steps.
pub type MergeSets = Vec<(Vec<usize>, Vec<usize>)>;

pub fn brute_force_ward(k: &DMatrix<f64>) -> (MergeSets, f64) {
    let n = k.nrows();
    let mut clusters: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    let mut merges = Vec::new();
    let mut min_gap = f64::INFINITY;
    let block_mean = |a: &[usize], b: &[usize]| {
        let mut s = 0.0;
        for &i in a {
            for &j in b {
                s += k[(i, j)];
            }
        }
        s / (a.len() * b.len()) as f64
    };
    while clusters.len() > 1 {
        let mut costs = Vec::new();
        for a in 0..clusters.len() {
            for b in (a + 1)..clusters.len() {
                let (ca, cb) = (&clusters[a], &clusters[b]);
                let centroid_d2 =
                    block_mean(ca, ca) + block_mean(cb, cb) - 2.0 * block_mean(ca, cb);
                let (na, nb) = (ca.len() as f64, cb.len() as f64);
                costs.push((na * nb / (na + nb) * centroid_d2, a, b));
            }
        }
        costs.sort_by(|x, y| x.0.total_cmp(&y.0));
        if costs.len() > 1 {
            min_gap = min_gap.min(costs[1].0 - costs[0].0);
        }
        let (_, a, b) = costs[0];
        let right = clusters.remove(b);
        let left = clusters.remove(a);
        let mut merged = left.clone();
        merged.extend(&right);
        merged.sort();
        merges.push((left, right));
        clusters.push(merged);
    }
    (merges, min_gap)
}

/// Member sets of the clusters joined at each step of a scipy-style
/// merge list.
pub fn merge_sets(n: usize, merges: &[(usize, usize)]) -> MergeSets {
    let mut members: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    let mut out = Vec::new();
    for &(l, r) in merges {
        let (a, b) = (members[l].clone(), members[r].clone());
        let mut m = a.clone();
        m.extend(&b);
        m.sort();
        members.push(m);
        out.push((a, b));
    }
    out
}

pub fn same_merges(x: &[(Vec<usize>, Vec<usize>)], y: &[(Vec<usize>, Vec<usize>)]) -> bool {
    let norm = |(a, b): &(Vec<usize>, Vec<usize>)| {
        let (mut a, mut b) = (a.clone(), b.clone());
        a.sort();
        b.sort();
        if a > b {
            (b, a)
        } else {
            (a, b)
        }
    };
    x.len() == y.len() && x.iter().zip(y).all(|(p, q)| norm(p) == norm(q))
}

/// Random symmetric PSD matrix `X Xᵀ` with `X` of size `n × d`.
pub fn random_psd(rng: &mut impl Rng, n: usize, d: usize) -> DMatrix<f64> {
    let x = DMatrix::from_fn(n, d, |_, _| rng.random::<f64>() * 2.0 - 1.0);
    &x * x.transpose()
}

pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    fn ranks(v: &[f64]) -> Vec<f64> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
        let mut r = vec![0.0; v.len()];
        let mut i = 0;
        while i < idx.len() {
            let mut j = i;
            while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
                j += 1;
            }
            let avg = (i + j) as f64 / 2.0 + 1.0;
            for &t in &idx[i..=j] {
                r[t] = avg;
            }
            i = j + 1;
        }
        r
    }
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}
