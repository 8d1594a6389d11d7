//! Random graphs and the extremal constructions.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::graph::{Graph, GraphError};
use crate::invariants::{alpha_ell, enumerate_cliques, AlphaEll};
use crate::seed;

/// Binomial random graph: each pair `u < v` (in lexicographic order) is kept
/// independently with probability `p`.
pub fn gnp(n: usize, p: f64, seed: u64) -> Graph {
    let mut g = Graph::empty(n);
    let mut rng = seed::rng(seed);
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.gen::<f64>() < p {
                g.add_edge(u, v);
            }
        }
    }
    g
}

/// Complete multipartite graph; part `i` occupies a consecutive index block.
pub fn complete_multipartite(sizes: &[usize]) -> Result<Graph, GraphError> {
    if sizes.is_empty() {
        return Err(GraphError::InvalidParameter("empty list of part sizes".into()));
    }
    if let Some(i) = sizes.iter().position(|&s| s == 0) {
        return Err(GraphError::InvalidParameter(format!("part {i} has size 0")));
    }
    let n = sizes.iter().sum();
    let part = part_labels(sizes);
    let mut g = Graph::empty(n);
    for u in 0..n {
        for v in (u + 1)..n {
            if part[u] != part[v] {
                g.add_edge(u, v);
            }
        }
    }
    Ok(g)
}

fn part_labels(sizes: &[usize]) -> Vec<usize> {
    sizes.iter().enumerate().flat_map(|(i, &s)| std::iter::repeat_n(i, s)).collect()
}

/// Parts `(n/3 - 1, n/3, n/3 + 1)`: minimum degree `2n/3 - 1` and no triangle factor.
pub fn hs_tripartite_sizes(n: usize) -> Result<[usize; 3], GraphError> {
    if !n.is_multiple_of(3) || n < 6 {
        return Err(GraphError::InvalidParameter(format!("tripartite construction needs 3 | n and n >= 6, got {n}")));
    }
    Ok([n / 3 - 1, n / 3, n / 3 + 1])
}

/// Disjoint union of `K_{n/2-1}` (vertices `0..n/2-1`) and `K_{n/2+1}`.
pub fn two_cliques(n: usize) -> Result<Graph, GraphError> {
    if !n.is_multiple_of(2) || n < 4 {
        return Err(GraphError::InvalidParameter(format!("two-cliques needs even n >= 4, got {n}")));
    }
    let a = n / 2 - 1;
    let mut g = Graph::empty(n);
    for u in 0..n {
        for v in (u + 1)..n {
            if (u < a) == (v < a) {
                g.add_edge(u, v);
            }
        }
    }
    Ok(g)
}

/// A `K_{ell+1}`-free graph sampled from `G(n, n^{-2/(ell+1)})`.
#[derive(Clone, Debug)]
pub struct Gamma {
    pub graph: Graph,
    pub ell: usize,
    pub p: f64,
    pub sampled_edges: usize,
    /// Edges deleted by the repair pass, in deletion order.
    pub removed: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GammaReport {
    pub ell: usize,
    pub n: usize,
    pub p: f64,
    pub sampled_edges: usize,
    pub removed_edges: usize,
    pub max_degree: usize,
    pub alpha_ell: AlphaEll,
}

/// Samples `G(n, n^{-2/(ell+1)})`, then walks the sample's `(ell+1)`-cliques in
/// lexicographic order and deletes the smallest edge of every one still intact.
pub fn gamma(ell: usize, n: usize, seed: u64) -> Result<Gamma, GraphError> {
    if ell < 2 {
        return Err(GraphError::InvalidParameter(format!("gamma needs ell >= 2, got {ell}")));
    }
    if n < ell + 1 {
        return Err(GraphError::InvalidParameter(format!("gamma needs n >= ell + 1 = {}, got {n}", ell + 1)));
    }
    Ok(sample_gamma(ell, n, seed))
}

fn sample_gamma(ell: usize, n: usize, seed: u64) -> Gamma {
    let p = (n as f64).powf(-2.0 / (ell as f64 + 1.0));
    let mut graph = gnp(n, p, seed);
    let sampled_edges = graph.edge_count();
    let mut removed = Vec::new();
    for clique in enumerate_cliques(&graph, ell + 1) {
        if graph.is_clique(&clique) {
            let e = (clique[0], clique[1]);
            graph.remove_edge(e.0, e.1);
            removed.push(e);
        }
    }
    Gamma { graph, ell, p, sampled_edges, removed }
}

impl Gamma {
    /// `alpha_ell` (within `budget` search nodes) and maximum degree.
    pub fn report(&self, budget: u64) -> GammaReport {
        GammaReport {
            ell: self.ell,
            n: self.graph.n(),
            p: self.p,
            sampled_edges: self.sampled_edges,
            removed_edges: self.removed.len(),
            max_degree: self.graph.max_degree(),
            alpha_ell: alpha_ell(&self.graph, self.ell, budget).expect("ell >= 2 checked at construction"),
        }
    }
}

/// The lower-bound construction: write `r = x*ell + y` with `1 <= y <= ell`,
/// take a complete `(x+1)`-partite graph with parts `(y n/r - 1, ell n/r + 1,
/// ell n/r, ..., ell n/r)` and place an independent `Gamma_ell` in every part.
#[derive(Clone, Debug)]
pub struct LowerBound {
    pub graph: Graph,
    pub r: usize,
    pub ell: usize,
    pub x: usize,
    pub y: usize,
    pub part_sizes: Vec<usize>,
}

impl LowerBound {
    pub fn part_of(&self, v: usize) -> usize {
        let mut acc = 0;
        for (i, &s) in self.part_sizes.iter().enumerate() {
            acc += s;
            if v < acc {
                return i;
            }
        }
        panic!("vertex {v} out of range");
    }
}

pub fn lower_bound_construction(r: usize, ell: usize, n: usize, seed: u64) -> Result<LowerBound, GraphError> {
    if ell < 2 || r <= ell {
        return Err(GraphError::InvalidParameter(format!("need r > ell >= 2, got r = {r}, ell = {ell}")));
    }
    if 2 * ell > r {
        return Err(GraphError::InvalidParameter(format!(
            "construction requires ell <= r/2, got r = {r}, ell = {ell}"
        )));
    }
    if !n.is_multiple_of(r) {
        return Err(GraphError::InvalidParameter(format!("construction requires r | n, got r = {r}, n = {n}")));
    }
    let x = (r - 1) / ell;
    let y = r - x * ell;
    debug_assert!((1..=ell).contains(&y));
    let unit = n / r;
    let mut part_sizes = vec![y * unit - 1, ell * unit + 1];
    part_sizes.extend(std::iter::repeat_n(ell * unit, x - 1));
    if part_sizes[0] == 0 {
        return Err(GraphError::InvalidParameter(format!("first part is empty for r = {r}, n = {n}")));
    }
    let mut graph = complete_multipartite(&part_sizes)?;
    let mut offset = 0;
    for (i, &size) in part_sizes.iter().enumerate() {
        let inner = sample_gamma(ell, size, seed::derive(seed, "lower-bound-part", i as u64));
        for (u, v) in inner.graph.edges() {
            graph.add_edge(offset + u, offset + v);
        }
        offset += size;
    }
    Ok(LowerBound { graph, r, ell, x, y, part_sizes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariants::{max_clique, min_degree};

    #[test]
    fn gnp_extremes() {
        for seed in 0..5 {
            assert_eq!(gnp(10, 0.0, seed).edge_count(), 0);
            assert_eq!(gnp(10, 1.0, seed), Graph::complete(10));
        }
    }

    #[test]
    fn gnp_is_seeded() {
        assert_eq!(gnp(30, 0.5, 7), gnp(30, 0.5, 7));
        assert_ne!(gnp(30, 0.5, 7), gnp(30, 0.5, 8));
    }

    #[test]
    fn multipartite_examples() {
        let g = complete_multipartite(&[3, 4, 5]).unwrap();
        assert_eq!(g.n(), 12);
        assert_eq!(min_degree(&g).unwrap(), 7);
        assert_eq!(complete_multipartite(&[1, 1, 1]).unwrap(), Graph::complete(3));
        let k66 = complete_multipartite(&[6, 6]).unwrap();
        assert_eq!(max_clique(&k66), 2);
        assert!(complete_multipartite(&[]).is_err());
        assert!(complete_multipartite(&[2, 0]).is_err());
        assert_eq!(hs_tripartite_sizes(12).unwrap(), [3, 4, 5]);
    }

    #[test]
    fn two_cliques_examples() {
        let g = two_cliques(12).unwrap();
        assert_eq!(min_degree(&g).unwrap(), 4);
        assert_eq!(g.edge_count(), 10 + 21);
        let g4 = two_cliques(4).unwrap();
        assert_eq!(g4.degrees(), vec![0, 2, 2, 2]);
        assert!(two_cliques(11).is_err());
    }

    #[test]
    fn gamma_is_clique_free() {
        let g2 = gamma(2, 40, 1).unwrap();
        assert!(max_clique(&g2.graph) <= 2);
        let g3 = gamma(3, 40, 1).unwrap();
        assert!(max_clique(&g3.graph) <= 3);
        let rep = g3.report(2_000_000);
        assert!(rep.alpha_ell.value < 40);
        assert!(gamma(1, 10, 0).is_err());
        assert!(gamma(3, 3, 0).is_err());
    }

    #[test]
    fn lower_bound_parts() {
        let lb = lower_bound_construction(4, 2, 16, 0).unwrap();
        assert_eq!((lb.x, lb.y), (1, 2));
        assert_eq!(lb.part_sizes, vec![7, 9]);
        assert_eq!(lb.graph.n(), 16);
        // (r - ell) n / r - 1
        assert!(min_degree(&lb.graph).unwrap() >= 7);
        assert!(lower_bound_construction(3, 2, 12, 0).is_err());
        assert!(lower_bound_construction(4, 2, 18, 0).is_err());

        let lb = lower_bound_construction(7, 3, 28, 5).unwrap();
        assert_eq!((lb.x, lb.y), (2, 1));
        assert_eq!(lb.part_sizes, vec![3, 13, 12]);
        assert_eq!(lb.part_of(2), 0);
        assert_eq!(lb.part_of(3), 1);
        assert_eq!(lb.part_of(16), 2);
    }
}
