//! Flat partitions of the node set and their file format.

use std::fmt::Write as _;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PartitionError {
    #[error("partition must cover at least one node")]
    Empty,
    #[error("partition file line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("partition file lists node {0} more than once")]
    DuplicateNode(usize),
    #[error("partition file is missing node {0}")]
    MissingNode(usize),
}

/// Assignment of nodes `0..n` to clusters `0..k`.
///
/// Labels are canonical: cluster ids are numbered in order of first
/// appearance, so two partitions are equal exactly when they group the
/// nodes identically.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    labels: Vec<usize>,
    k: usize,
}

impl Partition {
    /// Canonicalizes arbitrary labels.
    pub fn from_labels<L: Eq + std::hash::Hash + Clone>(raw: &[L]) -> Result<Self, PartitionError> {
        if raw.is_empty() {
            return Err(PartitionError::Empty);
        }
        let mut ids = std::collections::HashMap::new();
        let labels = raw
            .iter()
            .map(|l| {
                let next = ids.len();
                *ids.entry(l.clone()).or_insert(next)
            })
            .collect();
        Ok(Self {
            labels,
            k: ids.len(),
        })
    }

    pub fn single_cluster(n: usize) -> Result<Self, PartitionError> {
        Self::from_labels(&vec![0usize; n])
    }

    pub fn singletons(n: usize) -> Result<Self, PartitionError> {
        Self::from_labels(&(0..n).collect::<Vec<_>>())
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn cluster_count(&self) -> usize {
        self.k
    }

    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }

    /// Members of each cluster, ascending.
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.k];
        for (node, &l) in self.labels.iter().enumerate() {
            out[l].push(node);
        }
        out
    }

    /// Verifies the canonical-label invariants. Always true for values
    /// built through this type's constructors.
    pub fn check_invariants(&self) -> bool {
        let mut next = 0;
        let mut sizes = vec![0usize; self.k];
        for &l in &self.labels {
            if l > next || l >= self.k {
                return false;
            }
            if l == next {
                next += 1;
            }
            sizes[l] += 1;
        }
        next == self.k && sizes.iter().all(|&s| s > 0)
    }

    /// `node_id cluster_id` lines sorted by node id.
    pub fn to_file_string(&self) -> String {
        let mut out = String::with_capacity(self.labels.len() * 6);
        for (node, l) in self.labels.iter().enumerate() {
            let _ = writeln!(out, "{node} {l}");
        }
        out
    }

    /// Parses the `node_id cluster_id` format. Every node in `0..n` must
    /// appear exactly once; `#` and blank lines are ignored.
    pub fn parse(text: &str) -> Result<Self, PartitionError> {
        let mut entries = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let err = |message: String| PartitionError::Parse {
                line: lineno + 1,
                message,
            };
            let mut tok = t.split_whitespace();
            let node: usize = tok
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| err(format!("bad node id in {t:?}")))?;
            let cluster = tok
                .next()
                .ok_or_else(|| err(format!("missing cluster id in {t:?}")))?
                .to_owned();
            entries.push((node, cluster));
        }
        if entries.is_empty() {
            return Err(PartitionError::Empty);
        }
        entries.sort_by_key(|e| e.0);
        for (expected, (node, _)) in entries.iter().enumerate() {
            if *node < expected {
                return Err(PartitionError::DuplicateNode(*node));
            }
            if *node > expected {
                return Err(PartitionError::MissingNode(expected));
            }
        }
        let raw: Vec<String> = entries.into_iter().map(|e| e.1).collect();
        Self::from_labels(&raw)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonicalizes_by_first_occurrence() {
        let p = Partition::from_labels(&[7, 7, 3, 9, 3]).unwrap();
        assert_eq!(p.labels(), &[0, 0, 1, 2, 1]);
        assert_eq!(p.cluster_count(), 3);
        assert_eq!(p.cluster_sizes(), vec![2, 2, 1]);
        assert!(p.check_invariants());
    }

    #[test]
    fn relabelings_compare_equal() {
        let a = Partition::from_labels(&["x", "y", "x"]).unwrap();
        let b = Partition::from_labels(&[5, 1, 5]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn file_round_trip() {
        let p = Partition::from_labels(&[2, 0, 2, 1]).unwrap();
        let text = p.to_file_string();
        assert_eq!(text, "0 0\n1 1\n2 0\n3 2\n");
        assert_eq!(Partition::parse(&text).unwrap(), p);
    }

    #[test]
    fn parse_accepts_unsorted_and_symbolic() {
        let p = Partition::parse("# truth\n2 b\n0 a\n1 a\n").unwrap();
        assert_eq!(p.labels(), &[0, 0, 1]);
    }

    #[test]
    fn parse_rejects_gaps_and_duplicates() {
        assert_eq!(
            Partition::parse("0 1\n2 1\n"),
            Err(PartitionError::MissingNode(1))
        );
        assert_eq!(
            Partition::parse("0 1\n0 2\n"),
            Err(PartitionError::DuplicateNode(0))
        );
        assert!(Partition::parse("").is_err());
    }
}
