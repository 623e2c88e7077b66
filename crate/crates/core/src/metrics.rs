//! Rand Index and Adjusted Rand Index via the contingency table.

use thiserror::Error;

use crate::partition::Partition;

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum MetricError {
    #[error("partitions cover {left} and {right} nodes")]
    LengthMismatch { left: usize, right: usize },
    #[error("pair-counting indices need at least two nodes, got {0}")]
    TooFewNodes(usize),
}

/// Cluster-overlap counts between two partitions of the same node set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    /// `counts[i][j] = |X_i ∩ Y_j|`.
    pub counts: Vec<Vec<u64>>,
    pub row_sums: Vec<u64>,
    pub col_sums: Vec<u64>,
    pub total: u64,
}

fn choose2(x: u64) -> u128 {
    let x = x as u128;
    x * x.saturating_sub(1) / 2
}

impl ContingencyTable {
    pub fn new(x: &Partition, y: &Partition) -> Result<Self, MetricError> {
        if x.len() != y.len() {
            return Err(MetricError::LengthMismatch {
                left: x.len(),
                right: y.len(),
            });
        }
        let mut counts = vec![vec![0u64; y.cluster_count()]; x.cluster_count()];
        for (&a, &b) in x.labels().iter().zip(y.labels()) {
            counts[a][b] += 1;
        }
        let row_sums = counts.iter().map(|r| r.iter().sum()).collect();
        let col_sums = (0..y.cluster_count())
            .map(|j| counts.iter().map(|r| r[j]).sum())
            .collect();
        Ok(Self {
            counts,
            row_sums,
            col_sums,
            total: x.len() as u64,
        })
    }

    /// `Σ C(n_ij, 2)`: pairs co-clustered in both partitions.
    pub fn pairs_together_in_both(&self) -> u128 {
        self.counts.iter().flatten().map(|&c| choose2(c)).sum()
    }

    pub fn pairs_together_in_rows(&self) -> u128 {
        self.row_sums.iter().map(|&c| choose2(c)).sum()
    }

    pub fn pairs_together_in_cols(&self) -> u128 {
        self.col_sums.iter().map(|&c| choose2(c)).sum()
    }

    pub fn total_pairs(&self) -> u128 {
        choose2(self.total)
    }
}

pub fn contingency_table(x: &Partition, y: &Partition) -> Result<ContingencyTable, MetricError> {
    ContingencyTable::new(x, y)
}

fn table_with_pairs(x: &Partition, y: &Partition) -> Result<ContingencyTable, MetricError> {
    let t = ContingencyTable::new(x, y)?;
    if t.total < 2 {
        return Err(MetricError::TooFewNodes(t.total as usize));
    }
    Ok(t)
}

/// Fraction of node pairs on which the partitions agree.
pub fn rand_index(x: &Partition, y: &Partition) -> Result<f64, MetricError> {
    let t = table_with_pairs(x, y)?;
    let both = t.pairs_together_in_both();
    let rows = t.pairs_together_in_rows();
    let cols = t.pairs_together_in_cols();
    let total = t.total_pairs();
    // separated in both = total - (together in X) - (together in Y) + both
    let agreements = both + (total + both - rows - cols);
    Ok(agreements as f64 / total as f64)
}

/// Hubert–Arabie adjusted Rand index.
pub fn adjusted_rand_index(x: &Partition, y: &Partition) -> Result<f64, MetricError> {
    let t = table_with_pairs(x, y)?;
    let index = t.pairs_together_in_both() as f64;
    let rows = t.pairs_together_in_rows();
    let cols = t.pairs_together_in_cols();
    let total = t.total_pairs() as f64;
    let expected = (rows * cols) as f64 / total;
    let max = 0.5 * (rows + cols) as f64;
    let denom = max - expected;
    if denom == 0.0 {
        // both partitions are all-singletons or all-in-one
        return Ok(if index == expected { 1.0 } else { 0.0 });
    }
    Ok((index - expected) / denom)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(labels: &[usize]) -> Partition {
        Partition::from_labels(labels).unwrap()
    }

    // Direct pair enumeration, no contingency table.
    fn ari_by_pairs(x: &[usize], y: &[usize]) -> f64 {
        let n = x.len();
        let (mut both, mut in_x, mut in_y, mut pairs) = (0.0, 0.0, 0.0, 0.0);
        for i in 0..n {
            for j in (i + 1)..n {
                let sx = x[i] == x[j];
                let sy = y[i] == y[j];
                pairs += 1.0;
                in_x += f64::from(u8::from(sx));
                in_y += f64::from(u8::from(sy));
                both += f64::from(u8::from(sx && sy));
            }
        }
        let expected = in_x * in_y / pairs;
        let max = 0.5 * (in_x + in_y);
        if max == expected {
            return if both == expected { 1.0 } else { 0.0 };
        }
        (both - expected) / (max - expected)
    }

    #[test]
    fn contingency_examples() {
        let x = p(&[0, 0, 1]);
        assert_eq!(
            contingency_table(&x, &x).unwrap().counts,
            vec![vec![2, 0], vec![0, 1]]
        );
        let t = contingency_table(&p(&[0, 0, 0, 0]), &p(&[0, 1, 2, 3])).unwrap();
        assert_eq!(t.counts, vec![vec![1, 1, 1, 1]]);
        let t = contingency_table(&p(&[0, 0, 1]), &p(&[0, 1, 1])).unwrap();
        assert_eq!(t.counts, vec![vec![1, 1], vec![0, 1]]);
        assert_eq!(t.row_sums, vec![2, 1]);
        assert_eq!(t.col_sums, vec![1, 2]);
        assert_eq!(t.total, 3);
    }

    #[test]
    fn rand_index_examples() {
        let x = p(&[0, 1, 1, 2]);
        assert_eq!(rand_index(&x, &x).unwrap(), 1.0);
        let ri = rand_index(&p(&[0, 0, 1]), &p(&[0, 1, 1])).unwrap();
        assert!((ri - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(rand_index(&p(&[0; 4]), &p(&[0, 1, 2, 3])).unwrap(), 0.0);
    }

    #[test]
    fn ari_examples() {
        let x = p(&[0, 0, 1, 1, 2]);
        assert_eq!(adjusted_rand_index(&x, &x).unwrap(), 1.0);
        assert_eq!(
            adjusted_rand_index(&p(&[0; 4]), &p(&[0, 1, 2, 3])).unwrap(),
            0.0
        );
        let (a, b) = ([0, 0, 1, 1], [0, 0, 1, 2]);
        let ari = adjusted_rand_index(&p(&a), &p(&b)).unwrap();
        // Index=1, Expected=2*1/6=1/3, Max=1.5
        assert!((ari - (1.0 - 1.0 / 3.0) / (1.5 - 1.0 / 3.0)).abs() < 1e-15);
        assert!((ari - ari_by_pairs(&a, &b)).abs() < 1e-12);
    }

    #[test]
    fn degenerate_identical_partitions_score_one() {
        assert_eq!(adjusted_rand_index(&p(&[0; 5]), &p(&[0; 5])).unwrap(), 1.0);
        let s = p(&[0, 1, 2, 3]);
        assert_eq!(adjusted_rand_index(&s, &s).unwrap(), 1.0);
    }

    #[test]
    fn errors() {
        assert_eq!(
            adjusted_rand_index(&p(&[0, 1]), &p(&[0, 1, 1])),
            Err(MetricError::LengthMismatch { left: 2, right: 3 })
        );
        assert_eq!(
            rand_index(&p(&[0]), &p(&[0])),
            Err(MetricError::TooFewNodes(1))
        );
    }

    #[test]
    fn exhaustive_small_partitions_match_pair_oracle() {
        // all label vectors over n = 4 with labels < 3
        let n = 4;
        let all: Vec<Vec<usize>> = (0..3usize.pow(n as u32))
            .map(|mut code| {
                (0..n)
                    .map(|_| {
                        let l = code % 3;
                        code /= 3;
                        l
                    })
                    .collect()
            })
            .collect();
        for a in &all {
            for b in &all {
                let ari = adjusted_rand_index(&p(a), &p(b)).unwrap();
                assert!((ari - ari_by_pairs(a, b)).abs() < 1e-12, "{a:?} {b:?}");
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn labels() -> impl Strategy<Value = (Vec<usize>, Vec<usize>)> {
            (2usize..40).prop_flat_map(|n| {
                (
                    proptest::collection::vec(0usize..6, n),
                    proptest::collection::vec(0usize..6, n),
                )
            })
        }

        proptest! {
            #[test]
            fn symmetric((a, b) in labels()) {
                let (x, y) = (p(&a), p(&b));
                prop_assert_eq!(adjusted_rand_index(&x, &y).unwrap(), adjusted_rand_index(&y, &x).unwrap());
                prop_assert_eq!(rand_index(&x, &y).unwrap(), rand_index(&y, &x).unwrap());
            }

            #[test]
            fn relabeling_invariant((a, b) in labels(), shift in 1usize..50) {
                let relabeled: Vec<usize> = b.iter().map(|l| (l * 7 + shift) % 97).collect();
                let x = p(&a);
                prop_assert_eq!(
                    adjusted_rand_index(&x, &p(&b)).unwrap(),
                    adjusted_rand_index(&x, &Partition::from_labels(&relabeled).unwrap()).unwrap()
                );
            }

            #[test]
            fn bounded((a, b) in labels()) {
                let ari = adjusted_rand_index(&p(&a), &p(&b)).unwrap();
                prop_assert!(ari > -1.0 && ari <= 1.0 + 1e-12);
                let ri = rand_index(&p(&a), &p(&b)).unwrap();
                prop_assert!((0.0..=1.0).contains(&ri));
            }
        }
    }
}
