//! The absorption step: an H-factor of `G[A ∪ R]` for a small remainder `R`.

use fixedbitset::FixedBitSet;

use super::{AbsorbError, AbsorbingStructure};
use crate::exact::{copies_through, find_copy, verify_factor, Tiling};
use crate::graph::{Graph, Pattern, VertexSet};

/// Largest admissible `|R|`: `floor(xi n)`, capped by the spare room
/// `|X| - m` that the `(h-1)`-sets `A_v` consume.
pub fn absorb_capacity(st: &AbsorbingStructure) -> usize {
    let xi_n = (st.config.xi * st.n as f64 + 1e-9).floor() as usize;
    let room = (st.x.len() - st.m()) / (st.h - 1);
    xi_n.min(room)
}

pub fn absorb(g: &Graph, pattern: &Pattern, st: &AbsorbingStructure, r: &VertexSet) -> Result<Tiling, AbsorbError> {
    let n = g.n();
    let h = pattern.h();
    if n != st.n || h != st.h {
        return Err(AbsorbError::InvalidSet("structure does not belong to this graph and pattern".into()));
    }
    if let Some(v) = r.iter().find(|&v| v >= n) {
        return Err(AbsorbError::InvalidSet(format!("vertex {v} out of range")));
    }
    if let Some(v) = r.iter().find(|&v| st.a.contains(v)) {
        return Err(AbsorbError::InvalidSet(format!("remainder vertex {v} lies in A")));
    }
    let total = st.a.len() + r.len();
    if !total.is_multiple_of(h) {
        return Err(AbsorbError::Divisibility { total, h });
    }
    let limit = absorb_capacity(st);
    if r.len() > limit {
        return Err(AbsorbError::RemainderTooLarge { size: r.len(), limit });
    }

    let (kept, chosen) =
        assignment(g, pattern, &st.copy_families, &st.x, st.m(), r.as_slice(), st.config.absorb_budget)?;

    let x_prime: Vec<usize> = st.x.iter().enumerate().filter(|(_, &v)| kept.contains(v)).map(|(j, _)| j).collect();
    let matching = st
        .template
        .perfect_matching(&x_prime)
        .ok_or_else(|| AbsorbError::Certificate(format!("template has no perfect matching for X'_m = {x_prime:?}")))?;

    let mut tiling = Tiling::default();
    for copy in chosen {
        tiling.push(embed(g, pattern, &copy)?);
    }
    let mut in_matching = vec![false; st.template.edges.len()];
    for e in matching {
        in_matching[e] = true;
    }
    for (e, a) in st.edge_absorbers.iter().enumerate() {
        let part = if in_matching[e] { &a.with } else { &a.without };
        tiling.append(part.clone());
    }
    verify_factor(g, pattern, &tiling, &st.a.union(r))
        .map_err(|e| AbsorbError::Certificate(format!("assembled tiling: {e}")))?;
    Ok(tiling)
}

/// An embedding of `pattern` onto exactly the vertex set `vs`.
fn embed(g: &Graph, pattern: &Pattern, vs: &[usize]) -> Result<Vec<usize>, AbsorbError> {
    let mut within = FixedBitSet::with_capacity(g.n());
    for &v in vs {
        within.insert(v);
    }
    find_copy(g, pattern, &within).ok_or_else(|| AbsorbError::Certificate(format!("{vs:?} carries no copy of H")))
}

/// Disjoint `A_v` for every `v` in `rem` plus surplus copies inside `x`,
/// leaving `m` vertices of `x`; returns the kept vertices and the chosen copies.
pub(crate) fn assignment(
    g: &Graph,
    pattern: &Pattern,
    families: &[Vec<Vec<usize>>],
    x: &[usize],
    m: usize,
    rem: &[usize],
    budget: u64,
) -> Result<(FixedBitSet, Vec<Vec<usize>>), AbsorbError> {
    let mut search = Assign { g, pattern, families, m, rem, budget, nodes: 0, chosen: Vec::new() };
    let mut free_x = FixedBitSet::with_capacity(g.n());
    for &v in x {
        free_x.insert(v);
    }
    match search.assign(0, free_x) {
        Some(kept) => Ok((kept, search.chosen)),
        None if search.nodes > budget => Err(AbsorbError::NoAssignment(format!("budget of {budget} nodes exhausted"))),
        None => Err(AbsorbError::NoAssignment("search space exhausted".into())),
    }
}

/// Backtracking over disjoint `A_v` choices, then over copies inside `X` that
/// leave exactly `m` vertices of `X` uncovered.
struct Assign<'a> {
    g: &'a Graph,
    pattern: &'a Pattern,
    families: &'a [Vec<Vec<usize>>],
    m: usize,
    rem: &'a [usize],
    budget: u64,
    nodes: u64,
    chosen: Vec<Vec<usize>>,
}

impl Assign<'_> {
    fn tick(&mut self) -> bool {
        self.nodes += 1;
        self.nodes <= self.budget
    }

    fn assign(&mut self, i: usize, free: FixedBitSet) -> Option<FixedBitSet> {
        if !self.tick() {
            return None;
        }
        if i == self.rem.len() {
            let m = self.m;
            let surplus = free.count_ones(..) - m;
            debug_assert_eq!(surplus % self.pattern.h(), 0);
            return self.cover(free.clone(), FixedBitSet::with_capacity(free.len()), surplus / self.pattern.h(), m);
        }
        let v = self.rem[i];
        for member in &self.families[v] {
            if member.iter().all(|&u| free.contains(u)) {
                let mut next = free.clone();
                for &u in member {
                    next.set(u, false);
                }
                let mut copy = member.clone();
                copy.push(v);
                copy.sort_unstable();
                self.chosen.push(copy);
                if let Some(kept) = self.assign(i + 1, next) {
                    return Some(kept);
                }
                self.chosen.pop();
                if self.nodes > self.budget {
                    return None;
                }
            }
        }
        None
    }

    fn cover(&mut self, pending: FixedBitSet, kept: FixedBitSet, need: usize, keep_left: usize) -> Option<FixedBitSet> {
        let mut search = Cover {
            g: self.g,
            pattern: self.pattern,
            budget: self.budget,
            nodes: self.nodes,
            chosen: std::mem::take(&mut self.chosen),
        };
        let out = search.run(pending, kept, need, keep_left);
        self.nodes = search.nodes;
        self.chosen = search.chosen;
        out
    }
}

struct Cover<'a> {
    g: &'a Graph,
    pattern: &'a Pattern,
    budget: u64,
    nodes: u64,
    chosen: Vec<Vec<usize>>,
}

impl Cover<'_> {
    /// `pending` vertices are undecided; each is either kept or covered.
    fn run(&mut self, pending: FixedBitSet, kept: FixedBitSet, need: usize, keep_left: usize) -> Option<FixedBitSet> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return None;
        }
        if need == 0 {
            let mut all = kept;
            all.union_with(&pending);
            return Some(all);
        }
        let u = pending.minimum()?;
        for copy in copies_through(self.g, self.pattern, u, &pending) {
            let mut next = pending.clone();
            for &x in &copy {
                next.set(x, false);
            }
            let mut sorted = copy.clone();
            sorted.sort_unstable();
            self.chosen.push(sorted);
            if let Some(k) = self.run(next, kept.clone(), need - 1, keep_left) {
                return Some(k);
            }
            self.chosen.pop();
            if self.nodes > self.budget {
                return None;
            }
        }
        if keep_left > 0 {
            let mut next = pending;
            next.set(u, false);
            let mut k = kept;
            k.insert(u);
            return self.run(next, k, need, keep_left - 1);
        }
        None
    }
}

/// Remainder sizes `absorb` accepts: up to the capacity, with `h | |A| + |R|`.
pub fn valid_remainder_sizes(st: &AbsorbingStructure) -> Vec<usize> {
    let free = st.n - st.a.len();
    (0..=absorb_capacity(st).min(free)).filter(|s| (st.a.len() + s).is_multiple_of(st.h)).collect()
}
