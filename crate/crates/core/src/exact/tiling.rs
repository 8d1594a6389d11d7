use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, Pattern, VertexSet};

/// Vertex-disjoint copies of a pattern; each copy lists the image of pattern
/// vertex `0, 1, ..., h-1`. Serializes as a list of vertex lists.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Tiling {
    copies: Vec<Vec<usize>>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TilingViolation {
    #[error("copy {copy} has {len} vertices, pattern has {h}")]
    CopySize { copy: usize, len: usize, h: usize },
    #[error("copy {copy} uses vertex {vertex}, out of range")]
    OutOfRange { copy: usize, vertex: usize },
    #[error("vertex {vertex} appears in copy {first} and copy {second} (disjointness)")]
    RepeatedVertex { vertex: usize, first: usize, second: usize },
    #[error("copy {copy} maps pattern edge to non-edge {u}-{v} (edge preservation)")]
    MissingEdge { copy: usize, u: usize, v: usize },
    #[error("vertex {0} is not covered (factor)")]
    Uncovered(usize),
    #[error("vertex {0} lies outside the target set")]
    Outside(usize),
}

impl Tiling {
    pub fn new(copies: Vec<Vec<usize>>) -> Self {
        Tiling { copies }
    }

    pub fn copies(&self) -> &[Vec<usize>] {
        &self.copies
    }

    pub fn into_copies(self) -> Vec<Vec<usize>> {
        self.copies
    }

    pub fn len(&self) -> usize {
        self.copies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.copies.is_empty()
    }

    pub fn push(&mut self, copy: Vec<usize>) {
        self.copies.push(copy);
    }

    pub fn append(&mut self, other: Tiling) {
        self.copies.extend(other.copies);
    }

    /// Relabels every vertex through `map` (e.g. an induced-subgraph index map).
    pub fn mapped(&self, map: &[usize]) -> Tiling {
        Tiling::new(self.copies.iter().map(|c| c.iter().map(|&v| map[v]).collect()).collect())
    }

    pub fn covered(&self) -> VertexSet {
        VertexSet::collect_from(self.copies.iter().flatten().copied())
    }

    pub fn covered_count(&self) -> usize {
        self.copies.iter().map(Vec::len).sum()
    }
}

/// Checks sizes, disjointness and edge preservation.
pub fn verify_tiling(g: &Graph, pattern: &Pattern, tiling: &Tiling) -> Result<(), TilingViolation> {
    let h = pattern.h();
    let mut owner: HashMap<usize, usize> = HashMap::new();
    for (i, copy) in tiling.copies.iter().enumerate() {
        if copy.len() != h {
            return Err(TilingViolation::CopySize { copy: i, len: copy.len(), h });
        }
        for &v in copy {
            if v >= g.n() {
                return Err(TilingViolation::OutOfRange { copy: i, vertex: v });
            }
            if let Some(&first) = owner.get(&v) {
                return Err(TilingViolation::RepeatedVertex { vertex: v, first, second: i });
            }
            owner.insert(v, i);
        }
        for (a, b) in pattern.graph().edges() {
            if !g.has_edge(copy[a], copy[b]) {
                return Err(TilingViolation::MissingEdge { copy: i, u: copy[a], v: copy[b] });
            }
        }
    }
    Ok(())
}

/// A valid tiling covering exactly `target`.
pub fn verify_factor(g: &Graph, pattern: &Pattern, tiling: &Tiling, target: &VertexSet) -> Result<(), TilingViolation> {
    verify_tiling(g, pattern, tiling)?;
    let covered = tiling.covered();
    if let Some(v) = covered.iter().find(|&v| !target.contains(v)) {
        return Err(TilingViolation::Outside(v));
    }
    if let Some(v) = target.iter().find(|&v| !covered.contains(v)) {
        return Err(TilingViolation::Uncovered(v));
    }
    Ok(())
}
