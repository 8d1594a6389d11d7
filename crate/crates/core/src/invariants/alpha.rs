//! Largest induced `K_ell`-free subgraph by branch and bound.
//!
//! A search node keeps a candidate set `S` of vertices not yet excluded and a
//! forced set `F ⊆ S` of vertices committed to the solution. Whenever `F`
//! contains a `K_{ell-1}`, its common neighbours are excluded immediately.
//! The branching vertex is the free vertex of largest degree in `G[S]` that
//! lies in a `K_ell` of `G[S]` (ties to the smaller index); the two branches
//! exclude it, or force it. A node without such a vertex is `K_ell`-free.
//!
//! Upper bound: greedily partition `S` into cliques of `G`; a `K_ell`-free set
//! meets each clique `C` in at most `min(|C|, ell - 1)` vertices.

use std::ops::ControlFlow;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use super::cliques::{find_clique, for_each_clique};
use super::InvariantError;
use crate::graph::{Graph, VertexSet};

pub const DEFAULT_ALPHA_BUDGET: u64 = 2_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlphaEll {
    pub ell: usize,
    pub value: usize,
    pub witness: VertexSet,
    /// False when the node budget ran out; `value` is then a lower bound.
    pub exact: bool,
    pub nodes: u64,
}

pub fn alpha_ell(g: &Graph, ell: usize, budget: u64) -> Result<AlphaEll, InvariantError> {
    if ell < 2 {
        return Err(InvariantError::InvalidParameter(format!("alpha_ell needs ell >= 2, got {ell}")));
    }
    let greedy = greedy_free_set(g, ell);
    let mut search =
        Search { g, ell, budget, nodes: 0, exhausted: false, best: greedy.count_ones(..), witness: greedy };
    search.node(g.full_set(), FixedBitSet::with_capacity(g.n()));
    Ok(AlphaEll {
        ell,
        value: search.best,
        witness: VertexSet::from_bitset(&search.witness),
        exact: !search.exhausted,
        nodes: search.nodes,
    })
}

/// Whether `set` induces no `K_ell`.
pub fn is_k_free(g: &Graph, ell: usize, set: &FixedBitSet) -> bool {
    find_clique(g, ell, set).is_none()
}

fn greedy_free_set(g: &Graph, ell: usize) -> FixedBitSet {
    let mut order: Vec<usize> = (0..g.n()).collect();
    order.sort_by_key(|&v| (g.degree(v), v));
    let mut chosen = FixedBitSet::with_capacity(g.n());
    for v in order {
        let mut nb = g.neighbors(v).clone();
        nb.intersect_with(&chosen);
        if find_clique(g, ell - 1, &nb).is_none() {
            chosen.insert(v);
        }
    }
    chosen
}

struct Search<'a> {
    g: &'a Graph,
    ell: usize,
    budget: u64,
    nodes: u64,
    exhausted: bool,
    best: usize,
    witness: FixedBitSet,
}

impl Search<'_> {
    fn node(&mut self, set: FixedBitSet, forced: FixedBitSet) {
        if self.exhausted {
            return;
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            self.exhausted = true;
            return;
        }
        let size = set.count_ones(..);
        if size <= self.best || self.cover_bound(&set) <= self.best {
            return;
        }
        let Some(u) = self.branch_vertex(&set, &forced) else {
            self.best = size;
            self.witness = set;
            return;
        };

        let mut without = set.clone();
        without.set(u, false);
        self.node(without, forced.clone());

        let (set, forced) = self.force(set, forced, u);
        self.node(set, forced);
    }

    /// Adds `u` to the forced set and excludes every vertex that would close a
    /// `K_ell` with forced vertices.
    fn force(&self, mut set: FixedBitSet, mut forced: FixedBitSet, u: usize) -> (FixedBitSet, FixedBitSet) {
        let g = self.g;
        let mut forced_nb = forced.clone();
        forced_nb.intersect_with(g.neighbors(u));
        let mut doomed = FixedBitSet::with_capacity(g.n());
        let _ = for_each_clique(g, self.ell - 2, Some(&forced_nb), |q| {
            let mut common = g.neighbors(u).clone();
            for &w in q {
                common.intersect_with(g.neighbors(w));
            }
            doomed.union_with(&common);
            ControlFlow::Continue(())
        });
        doomed.difference_with(&forced);
        set.difference_with(&doomed);
        forced.insert(u);
        (set, forced)
    }

    fn branch_vertex(&self, set: &FixedBitSet, forced: &FixedBitSet) -> Option<usize> {
        let g = self.g;
        let mut free: Vec<(usize, usize)> =
            set.difference(forced).map(|v| (g.degree_into(v, set), v)).filter(|&(d, _)| d + 1 >= self.ell).collect();
        free.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        free.into_iter().map(|(_, v)| v).find(|&v| {
            let mut nb = g.neighbors(v).clone();
            nb.intersect_with(set);
            find_clique(g, self.ell - 1, &nb).is_some()
        })
    }

    fn cover_bound(&self, set: &FixedBitSet) -> usize {
        let g = self.g;
        let cap = self.ell - 1;
        let mut rest = set.clone();
        let mut bound = 0;
        while let Some(v) = rest.minimum() {
            rest.set(v, false);
            let mut size = 1;
            let mut cand = rest.clone();
            cand.intersect_with(g.neighbors(v));
            while let Some(w) = cand.minimum() {
                rest.set(w, false);
                cand.set(w, false);
                cand.intersect_with(g.neighbors(w));
                size += 1;
            }
            bound += size.min(cap);
            if bound > self.best + rest.count_ones(..) {
                // already loose enough that finishing the cover cannot prune
                return bound + rest.count_ones(..);
            }
        }
        bound
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::complete_multipartite;

    #[test]
    fn small_examples() {
        for n in 1..7 {
            assert_eq!(alpha_ell(&Graph::complete(n), 2, 1000).unwrap().value, 1);
        }
        let k66 = complete_multipartite(&[6, 6]).unwrap();
        assert_eq!(alpha_ell(&k66, 3, 10_000).unwrap().value, 12);
        assert_eq!(alpha_ell(&k66, 2, 10_000).unwrap().value, 6);
        let c5 = Graph::from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]).unwrap();
        let a = alpha_ell(&c5, 2, 1000).unwrap();
        assert_eq!(a.value, 2);
        assert!(a.exact);
        assert!(is_k_free(&c5, 2, &a.witness.to_bitset(5)));
    }

    #[test]
    fn k4_minus_cliques() {
        // K_{3,3,3}: largest triangle-free induced subgraph takes two parts.
        let g = complete_multipartite(&[3, 3, 3]).unwrap();
        assert_eq!(alpha_ell(&g, 3, 100_000).unwrap().value, 6);
        assert_eq!(alpha_ell(&g, 4, 100_000).unwrap().value, 9);
    }

    #[test]
    fn rejects_small_ell() {
        assert!(alpha_ell(&Graph::complete(3), 1, 10).is_err());
    }

    #[test]
    fn budget_exhaustion_is_flagged() {
        let g = crate::generate::gnp(40, 0.1, 3);
        let a = alpha_ell(&g, 2, 1).unwrap();
        assert!(!a.exact);
        assert!(is_k_free(&g, 2, &a.witness.to_bitset(40)));
        assert_eq!(a.witness.len(), a.value);
    }
}
