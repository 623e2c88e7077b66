//! Configuration-model stub matching with degree-preserving repair.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::Rng;

/// Attempted swaps per edge before an attempt is abandoned.
const SWAP_BUDGET_PER_EDGE: usize = 100;

fn key(u: usize, v: usize) -> (usize, usize) {
    (u.min(v), u.max(v))
}

/// Edges produced by pairing one set of stubs. Internal pools must end up
/// with simple edges; external pools additionally need endpoints in
/// different communities.
pub(crate) struct Pool {
    edges: Vec<(usize, usize)>,
    external: bool,
}

impl Pool {
    fn pair(nodes: &[usize], stubs: &[usize], external: bool, rng: &mut impl Rng) -> Self {
        let mut list: Vec<usize> = nodes
            .iter()
            .flat_map(|&v| std::iter::repeat_n(v, stubs[v]))
            .collect();
        list.shuffle(rng);
        let edges = list.chunks_exact(2).map(|c| (c[0], c[1])).collect();
        Self { edges, external }
    }

    pub(crate) fn internal(nodes: &[usize], stubs: &[usize], rng: &mut impl Rng) -> Self {
        Self::pair(nodes, stubs, false, rng)
    }

    pub(crate) fn external(nodes: &[usize], stubs: &[usize], rng: &mut impl Rng) -> Self {
        Self::pair(nodes, stubs, true, rng)
    }

    fn allowed(&self, u: usize, v: usize, membership: &[usize]) -> bool {
        u != v && (!self.external || membership[u] != membership[v])
    }

    /// Swaps endpoints of bad edges with random partner edges until the
    /// pool is simple, keeping every node's stub count. Fails once
    /// `100·|E|` swaps have been attempted.
    pub(crate) fn repair(
        mut self,
        membership: &[usize],
        rng: &mut impl Rng,
    ) -> Result<Vec<(usize, usize)>, String> {
        let m = self.edges.len();
        let mut counts: HashMap<(usize, usize), usize> = HashMap::with_capacity(m);
        for &(u, v) in &self.edges {
            *counts.entry(key(u, v)).or_insert(0) += 1;
        }
        let budget = SWAP_BUDGET_PER_EDGE * m.max(1);
        let mut attempts = 0;
        loop {
            let bad: Vec<usize> = {
                let mut seen = HashMap::with_capacity(m);
                (0..m)
                    .filter(|&e| {
                        let (u, v) = self.edges[e];
                        let first = seen.insert(key(u, v), ()).is_none();
                        !self.allowed(u, v, membership) || !first
                    })
                    .collect()
            };
            if bad.is_empty() {
                return Ok(self.edges);
            }
            if m < 2 {
                return Err("cannot rewire a pool with a single invalid edge".into());
            }
            for e in bad {
                loop {
                    let (u, v) = self.edges[e];
                    if self.allowed(u, v, membership) && counts[&key(u, v)] == 1 {
                        break;
                    }
                    if attempts >= budget {
                        return Err(format!("swap budget of {budget} exhausted"));
                    }
                    attempts += 1;
                    let f = rng.random_range(0..m);
                    if f == e {
                        continue;
                    }
                    let (x, y) = if rng.random::<bool>() {
                        self.edges[f]
                    } else {
                        let (a, b) = self.edges[f];
                        (b, a)
                    };
                    // (u,v),(x,y) -> (u,x),(v,y)
                    if !self.allowed(u, x, membership) || !self.allowed(v, y, membership) {
                        continue;
                    }
                    let (k1, k2) = (key(u, x), key(v, y));
                    if k1 == k2 {
                        continue;
                    }
                    let (old1, old2) = (key(u, v), key(x, y));
                    let count_after = |k: (usize, usize)| {
                        let c = counts.get(&k).copied().unwrap_or(0);
                        c - usize::from(k == old1) - usize::from(k == old2)
                    };
                    if count_after(k1) > 0 || count_after(k2) > 0 {
                        continue;
                    }
                    for old in [old1, old2] {
                        let c = counts.get_mut(&old).expect("edge present");
                        *c -= 1;
                        if *c == 0 {
                            counts.remove(&old);
                        }
                    }
                    *counts.entry(k1).or_insert(0) += 1;
                    *counts.entry(k2).or_insert(0) += 1;
                    self.edges[e] = (u, x);
                    self.edges[f] = (v, y);
                    break;
                }
            }
        }
    }
}
