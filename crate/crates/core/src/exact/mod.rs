//! Exact H-factor search, greedy maximal tilings and traversing copies.

mod embed;
mod tiling;

use std::collections::HashSet;

use fixedbitset::FixedBitSet;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use embed::{copies_through, find_copy, first_copy_through, for_each_embedding};
pub use tiling::{verify_factor, verify_tiling, Tiling, TilingViolation};

use crate::graph::{Graph, Pattern, PatternKind, VertexSet};
use crate::seed;

pub const DEFAULT_FACTOR_BUDGET: u64 = 5_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExactError {
    #[error("expected {expected} parts, got {got}")]
    PartCount { expected: usize, got: usize },
    #[error("vertex {0} appears in more than one part")]
    OverlappingParts(usize),
    #[error("vertex {vertex} out of range for graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum FactorOutcome {
    Factor { tiling: Tiling },
    NoFactor,
    BudgetExhausted,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorSearch {
    #[serde(flatten)]
    pub outcome: FactorOutcome,
    pub nodes: u64,
}

impl FactorSearch {
    pub fn tiling(&self) -> Option<&Tiling> {
        match &self.outcome {
            FactorOutcome::Factor { tiling } => Some(tiling),
            _ => None,
        }
    }

    pub fn into_tiling(self) -> Option<Tiling> {
        match self.outcome {
            FactorOutcome::Factor { tiling } => Some(tiling),
            _ => None,
        }
    }

    pub fn is_factor(&self) -> bool {
        matches!(self.outcome, FactorOutcome::Factor { .. })
    }

    pub fn is_none(&self) -> bool {
        matches!(self.outcome, FactorOutcome::NoFactor)
    }
}

/// Exact search for an H-factor of `g` within `budget` search nodes.
pub fn find_factor_exact(g: &Graph, pattern: &Pattern, budget: u64) -> FactorSearch {
    find_factor_within(g, pattern, &g.full_set(), budget)
}

/// Exact search for an H-factor of `G[within]`.
///
/// Branches on the lowest uncovered vertex over all copies through it, in
/// lexicographic order of vertex sets. Failed uncovered sets are memoised.
pub fn find_factor_within(g: &Graph, pattern: &Pattern, within: &FixedBitSet, budget: u64) -> FactorSearch {
    let h = pattern.h();
    if !within.count_ones(..).is_multiple_of(h) {
        return FactorSearch { outcome: FactorOutcome::NoFactor, nodes: 0 };
    }
    let mut solver = Solver {
        g,
        pattern,
        budget,
        nodes: 0,
        exhausted: false,
        failed: HashSet::new(),
        stack: Vec::new(),
        connected: pattern.is_connected(),
        min_deg: pattern.min_degree(),
    };
    let found = solver.solve(within.clone());
    let outcome = if found {
        FactorOutcome::Factor { tiling: Tiling::new(solver.stack) }
    } else if solver.exhausted {
        FactorOutcome::BudgetExhausted
    } else {
        FactorOutcome::NoFactor
    };
    FactorSearch { outcome, nodes: solver.nodes }
}

struct Solver<'a> {
    g: &'a Graph,
    pattern: &'a Pattern,
    budget: u64,
    nodes: u64,
    exhausted: bool,
    failed: HashSet<FixedBitSet>,
    stack: Vec<Vec<usize>>,
    connected: bool,
    min_deg: usize,
}

impl Solver<'_> {
    fn solve(&mut self, uncovered: FixedBitSet) -> bool {
        let Some(v) = uncovered.minimum() else {
            return true;
        };
        if self.nodes >= self.budget {
            self.exhausted = true;
            return false;
        }
        self.nodes += 1;
        if self.failed.contains(&uncovered) || !self.feasible(&uncovered) {
            return false;
        }
        for copy in copies_through(self.g, self.pattern, v, &uncovered) {
            let mut rest = uncovered.clone();
            for &x in &copy {
                rest.set(x, false);
            }
            self.stack.push(copy);
            if self.solve(rest) {
                return true;
            }
            self.stack.pop();
            if self.exhausted {
                break;
            }
        }
        if !self.exhausted {
            self.failed.insert(uncovered);
        }
        false
    }

    /// Degree and component-size necessary conditions.
    fn feasible(&self, uncovered: &FixedBitSet) -> bool {
        let g = self.g;
        if self.min_deg > 0 && uncovered.ones().any(|u| g.degree_into(u, uncovered) < self.min_deg) {
            return false;
        }
        if self.connected {
            let h = self.pattern.h();
            let mut rest = uncovered.clone();
            while let Some(s) = rest.minimum() {
                let mut comp = FixedBitSet::with_capacity(g.n());
                comp.insert(s);
                let mut frontier = comp.clone();
                while !frontier.is_clear() {
                    let mut next = FixedBitSet::with_capacity(g.n());
                    for u in frontier.ones() {
                        next.union_with(g.neighbors(u));
                    }
                    next.intersect_with(uncovered);
                    next.difference_with(&comp);
                    comp.union_with(&next);
                    frontier = next;
                }
                if !comp.count_ones(..).is_multiple_of(h) {
                    return false;
                }
                rest.difference_with(&comp);
            }
        }
        true
    }
}

/// A maximal tiling and the vertices it leaves uncovered.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GreedyTiling {
    pub tiling: Tiling,
    pub leftover: VertexSet,
}

/// Maximal tiling of `G - forbidden`: vertices are visited once in a seeded
/// random order and each still-free vertex takes the first copy through it.
/// Since free sets only shrink, the leftover contains no copy of `H`.
pub fn greedy_max_tiling(g: &Graph, pattern: &Pattern, forbidden: &VertexSet, seed: u64) -> GreedyTiling {
    let mut free = g.full_set();
    for v in forbidden.iter() {
        free.set(v, false);
    }
    greedy_tiling_within(g, pattern, free, seed)
}

pub(crate) fn greedy_tiling_within(g: &Graph, pattern: &Pattern, mut free: FixedBitSet, seed: u64) -> GreedyTiling {
    let mut order: Vec<usize> = free.ones().collect();
    order.shuffle(&mut seed::rng(seed));
    let mut tiling = Tiling::default();
    for v in order {
        if !free.contains(v) {
            continue;
        }
        if let Some(copy) = first_copy_through(g, pattern, v, &free) {
            for &x in &copy {
                free.set(x, false);
            }
            tiling.push(copy);
        }
    }
    GreedyTiling { tiling, leftover: VertexSet::from_bitset(&free) }
}

/// A copy of `H` with exactly one vertex in each of the `h` disjoint `parts`,
/// returned as the image of each pattern vertex. Clique patterns assign
/// pattern vertex `i` to `parts[i]`; general patterns try every assignment.
pub fn find_traversing_copy(
    g: &Graph,
    pattern: &Pattern,
    parts: &[VertexSet],
) -> Result<Option<Vec<usize>>, ExactError> {
    let h = pattern.h();
    let n = g.n();
    if parts.len() != h {
        return Err(ExactError::PartCount { expected: h, got: parts.len() });
    }
    let mut seen = FixedBitSet::with_capacity(n);
    let mut bits = Vec::with_capacity(h);
    for p in parts {
        let mut b = FixedBitSet::with_capacity(n);
        for v in p.iter() {
            if v >= n {
                return Err(ExactError::VertexOutOfRange { vertex: v, n });
            }
            if seen.put(v) {
                return Err(ExactError::OverlappingParts(v));
            }
            b.insert(v);
        }
        bits.push(b);
    }
    let mut t = Traverse {
        g,
        hg: pattern.graph(),
        parts: &bits,
        fixed_parts: matches!(pattern.kind(), PatternKind::Clique(_)),
        image: vec![usize::MAX; h],
        part_used: vec![false; h],
    };
    Ok(if t.extend(0) { Some(t.image) } else { None })
}

struct Traverse<'a> {
    g: &'a Graph,
    hg: &'a Graph,
    parts: &'a [FixedBitSet],
    fixed_parts: bool,
    image: Vec<usize>,
    part_used: Vec<bool>,
}

impl Traverse<'_> {
    fn extend(&mut self, i: usize) -> bool {
        let h = self.image.len();
        if i == h {
            return true;
        }
        let choices: Vec<usize> =
            if self.fixed_parts { vec![i] } else { (0..h).filter(|&p| !self.part_used[p]).collect() };
        for p in choices {
            let mut cand = self.parts[p].clone();
            for j in self.hg.neighbors(i).ones().filter(|&j| j < i) {
                cand.intersect_with(self.g.neighbors(self.image[j]));
            }
            self.part_used[p] = true;
            for x in cand.ones() {
                self.image[i] = x;
                if self.extend(i + 1) {
                    return true;
                }
            }
            self.part_used[p] = false;
        }
        self.image[i] = usize::MAX;
        false
    }
}
