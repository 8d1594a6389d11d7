//! Undirected simple graphs over `0..n`, vertex sets and tiling patterns.

use std::fmt;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("vertex {vertex} out of range for graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate vertex {0} in vertex set")]
    DuplicateVertex(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Undirected simple graph with bitset adjacency.
///
/// Adjacency is symmetric and irreflexive; neighbourhood intersections are
/// word-parallel.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adj: Vec<FixedBitSet>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph { n, adj: vec![FixedBitSet::with_capacity(n); n] }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Graph::empty(n);
        for u in 0..n {
            g.adj[u].insert_range(..);
            g.adj[u].set(u, false);
        }
        g
    }

    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Graph::empty(n);
        for (u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: w, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            g.add_edge(u, v);
        }
        Ok(g)
    }

    /// Parses the edge-list format: a header `n m` followed by `m` lines `u v`.
    /// Endpoints may appear in either order; blank lines are ignored and
    /// repeated edges collapse.
    pub fn parse(text: &str) -> Result<Self, GraphError> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty());
        let (hline, header) =
            lines.next().ok_or(GraphError::Parse { line: 1, reason: "missing header \"n m\"".into() })?;
        let (n, m) = parse_pair(hline, header)?;
        let mut g = Graph::empty(n);
        let mut seen = 0usize;
        for (lineno, line) in lines {
            let (u, v) = parse_pair(lineno, line)?;
            if u == v {
                return Err(GraphError::Parse { line: lineno, reason: format!("self-loop at vertex {u}") });
            }
            if u >= n || v >= n {
                return Err(GraphError::Parse { line: lineno, reason: format!("vertex index out of range (n = {n})") });
            }
            g.add_edge(u, v);
            seen += 1;
        }
        if seen != m {
            return Err(GraphError::Parse {
                line: 1,
                reason: format!("header announces {m} edges but {seen} edge lines follow"),
            });
        }
        Ok(g)
    }

    /// Writes the canonical edge list: header, then edges `u v` with `u < v`
    /// in lexicographic order.
    pub fn to_edge_list(&self) -> String {
        let edges: Vec<_> = self.edges().collect();
        let mut out = format!("{} {}", self.n, edges.len());
        for (u, v) in edges {
            out.push_str(&format!("\n{u} {v}"));
        }
        out.push('\n');
        out
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &FixedBitSet {
        &self.adj[v]
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].contains(v)
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count_ones(..)
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n).map(|v| self.degree(v)).collect()
    }

    pub fn max_degree(&self) -> usize {
        self.degrees().into_iter().max().unwrap_or(0)
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|a| a.count_ones(..)).sum::<usize>() / 2
    }

    /// Edges `(u, v)` with `u < v` in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| self.adj[u].ones().filter(move |&v| v > u).map(move |v| (u, v)))
    }

    /// Degree of `v` into `within`.
    pub fn degree_into(&self, v: usize, within: &FixedBitSet) -> usize {
        self.adj[v].intersection_count(within)
    }

    /// Bitset with every vertex set.
    pub fn full_set(&self) -> FixedBitSet {
        let mut s = FixedBitSet::with_capacity(self.n);
        s.insert_range(..);
        s
    }

    /// Common neighbourhood of `vs` (all vertices when `vs` is empty).
    pub fn common_neighbors(&self, vs: &[usize]) -> FixedBitSet {
        let mut s = self.full_set();
        for &v in vs {
            s.intersect_with(&self.adj[v]);
        }
        s
    }

    /// The subgraph induced by `set`; vertex `i` of the result is `map[i]` in `self`.
    pub fn induced_subgraph(&self, set: &VertexSet) -> Result<(Graph, Vec<usize>), GraphError> {
        if let Some(&last) = set.as_slice().last() {
            if last >= self.n {
                return Err(GraphError::VertexOutOfRange { vertex: last, n: self.n });
            }
        }
        let map = set.as_slice().to_vec();
        let k = map.len();
        let mut sub = Graph::empty(k);
        for i in 0..k {
            for j in (i + 1)..k {
                if self.has_edge(map[i], map[j]) {
                    sub.add_edge(i, j);
                }
            }
        }
        Ok((sub, map))
    }

    /// Checks that `vs` spans a complete subgraph.
    pub fn is_clique(&self, vs: &[usize]) -> bool {
        vs.iter().enumerate().all(|(i, &u)| vs[i + 1..].iter().all(|&v| self.has_edge(u, v)))
    }

    pub(crate) fn add_edge(&mut self, u: usize, v: usize) {
        debug_assert!(u != v);
        self.adj[u].insert(v);
        self.adj[v].insert(u);
    }

    pub(crate) fn remove_edge(&mut self, u: usize, v: usize) {
        self.adj[u].set(v, false);
        self.adj[v].set(u, false);
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph").field("n", &self.n).field("edges", &self.edges().collect::<Vec<_>>()).finish()
    }
}

fn parse_pair(line: usize, text: &str) -> Result<(usize, usize), GraphError> {
    let mut it = text.split_whitespace();
    let mut next = |what: &str| -> Result<usize, GraphError> {
        let tok = it.next().ok_or_else(|| GraphError::Parse { line, reason: format!("missing {what}") })?;
        tok.parse::<usize>()
            .map_err(|_| GraphError::Parse { line, reason: format!("not a non-negative integer: {tok:?}") })
    };
    let a = next("first field")?;
    let b = next("second field")?;
    if it.next().is_some() {
        return Err(GraphError::Parse { line, reason: "expected exactly two fields".into() });
    }
    Ok((a, b))
}

/// Sorted set of distinct vertex indices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexSet(Vec<usize>);

impl VertexSet {
    /// Validates membership in `0..n` and distinctness.
    pub fn new(mut vertices: Vec<usize>, n: usize) -> Result<Self, GraphError> {
        vertices.sort_unstable();
        for w in vertices.windows(2) {
            if w[0] == w[1] {
                return Err(GraphError::DuplicateVertex(w[0]));
            }
        }
        if let Some(&last) = vertices.last() {
            if last >= n {
                return Err(GraphError::VertexOutOfRange { vertex: last, n });
            }
        }
        Ok(VertexSet(vertices))
    }

    pub fn all(n: usize) -> Self {
        VertexSet((0..n).collect())
    }

    pub fn from_bitset(bits: &FixedBitSet) -> Self {
        VertexSet(bits.ones().collect())
    }

    /// Builds a set from an iterator, sorting and dropping duplicates.
    pub fn collect_from<I: IntoIterator<Item = usize>>(it: I) -> Self {
        let mut v: Vec<usize> = it.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        VertexSet(v)
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn to_bitset(&self, n: usize) -> FixedBitSet {
        let mut b = FixedBitSet::with_capacity(n);
        for &v in &self.0 {
            b.insert(v);
        }
        b
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return false,
            }
        }
        true
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        VertexSet::collect_from(self.iter().chain(other.iter()))
    }
}

impl<'a> IntoIterator for &'a VertexSet {
    type Item = &'a usize;
    type IntoIter = std::slice::Iter<'a, usize>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PatternKind {
    Clique(usize),
    General,
}

/// The graph `H` being tiled with.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pattern {
    graph: Graph,
    kind: PatternKind,
}

impl Pattern {
    pub fn clique(r: usize) -> Result<Self, GraphError> {
        if r < 2 {
            return Err(GraphError::InvalidParameter(format!("clique pattern needs r >= 2, got {r}")));
        }
        Ok(Pattern { graph: Graph::complete(r), kind: PatternKind::Clique(r) })
    }

    /// Wraps an arbitrary graph; complete graphs are tagged as cliques.
    pub fn general(graph: Graph) -> Result<Self, GraphError> {
        let h = graph.n();
        if h < 2 {
            return Err(GraphError::InvalidParameter(format!("pattern needs at least 2 vertices, got {h}")));
        }
        let kind = if graph.edge_count() == h * (h - 1) / 2 { PatternKind::Clique(h) } else { PatternKind::General };
        Ok(Pattern { graph, kind })
    }

    /// Parses `K<r>` (case-insensitive) or an edge-list document.
    pub fn parse_spec(spec: &str) -> Result<Self, GraphError> {
        let s = spec.trim();
        if let Some(rest) = s.strip_prefix(['K', 'k']) {
            if let Ok(r) = rest.parse::<usize>() {
                return Pattern::clique(r);
            }
        }
        Pattern::general(Graph::parse(s)?)
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn kind(&self) -> PatternKind {
        self.kind
    }

    #[inline]
    pub fn h(&self) -> usize {
        self.graph.n()
    }

    pub fn is_clique(&self) -> bool {
        matches!(self.kind, PatternKind::Clique(_))
    }

    pub fn is_connected(&self) -> bool {
        let h = self.h();
        let mut seen = FixedBitSet::with_capacity(h);
        let mut stack = vec![0];
        seen.insert(0);
        while let Some(u) = stack.pop() {
            for v in self.graph.neighbors(u).ones() {
                if !seen.put(v) {
                    stack.push(v);
                }
            }
        }
        seen.count_ones(..) == h
    }

    pub fn min_degree(&self) -> usize {
        self.graph.degrees().into_iter().min().unwrap_or(0)
    }

    pub fn name(&self) -> String {
        match self.kind {
            PatternKind::Clique(r) => format!("K{r}"),
            PatternKind::General => format!("H(v={}, e={})", self.h(), self.graph.edge_count()),
        }
    }
}
