//! `(S, t)`-absorbers and the two disjoint-family constructions.

use fixedbitset::FixedBitSet;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::AbsorbError;
use crate::exact::{
    find_factor_within, find_traversing_copy, greedy_tiling_within, verify_factor, FactorOutcome, Tiling,
};
use crate::graph::{Graph, Pattern, VertexSet};
use crate::hypotheses::HypothesisCheck;
use crate::invariants::find_clique;
use crate::seed;

/// An `(S, t)`-absorber together with the two factor certificates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Absorber {
    pub s: VertexSet,
    pub set: VertexSet,
    pub t: usize,
    /// H-factor of `G[set]`.
    pub without: Tiling,
    /// H-factor of `G[set ∪ S]`.
    pub with: Tiling,
}

fn bits(n: usize, vs: impl IntoIterator<Item = usize>) -> FixedBitSet {
    let mut b = FixedBitSet::with_capacity(n);
    for v in vs {
        b.insert(v);
    }
    b
}

fn check_absorber_shape(
    g: &Graph,
    pattern: &Pattern,
    s: &VertexSet,
    set: &VertexSet,
    t: usize,
) -> Result<(), AbsorbError> {
    let h = pattern.h();
    if s.len() != h {
        return Err(AbsorbError::InvalidSet(format!("S has {} vertices, pattern has {h}", s.len())));
    }
    if set.len() != h * t {
        return Err(AbsorbError::InvalidSet(format!("absorber has {} vertices, expected h t = {}", set.len(), h * t)));
    }
    if !s.is_disjoint(set) {
        return Err(AbsorbError::InvalidSet("absorber meets S".into()));
    }
    if let Some(v) = s.iter().chain(set.iter()).find(|&v| v >= g.n()) {
        return Err(AbsorbError::InvalidSet(format!("vertex {v} out of range")));
    }
    Ok(())
}

/// Whether both `G[A_S]` and `G[A_S ∪ S]` have H-factors, decided by the exact solver.
pub fn is_st_absorber(
    g: &Graph,
    pattern: &Pattern,
    s: &VertexSet,
    a_s: &VertexSet,
    t: usize,
    budget: u64,
) -> Result<bool, AbsorbError> {
    Ok(certify_absorber(g, pattern, s, a_s, t, budget)?.is_some())
}

/// Exact-solver certificates for an absorber candidate.
pub fn certify_absorber(
    g: &Graph,
    pattern: &Pattern,
    s: &VertexSet,
    a_s: &VertexSet,
    t: usize,
    budget: u64,
) -> Result<Option<Absorber>, AbsorbError> {
    check_absorber_shape(g, pattern, s, a_s, t)?;
    let n = g.n();
    let solve = |within: FixedBitSet| -> Result<Option<Tiling>, AbsorbError> {
        let r = find_factor_within(g, pattern, &within, budget);
        match r.outcome {
            FactorOutcome::Factor { tiling } => Ok(Some(tiling)),
            FactorOutcome::NoFactor => Ok(None),
            FactorOutcome::BudgetExhausted => Err(AbsorbError::Budget { nodes: r.nodes }),
        }
    };
    let Some(without) = solve(bits(n, a_s.iter()))? else {
        return Ok(None);
    };
    let Some(with) = solve(bits(n, a_s.iter().chain(s.iter())))? else {
        return Ok(None);
    };
    Ok(Some(Absorber { s: s.clone(), set: a_s.clone(), t, without, with }))
}

/// Re-checks an absorber's sizes and both certificates.
pub fn verify_absorber(g: &Graph, pattern: &Pattern, a: &Absorber) -> Result<(), AbsorbError> {
    check_absorber_shape(g, pattern, &a.s, &a.set, a.t)?;
    verify_factor(g, pattern, &a.without, &a.set)
        .map_err(|e| AbsorbError::Certificate(format!("factor of G[A_S]: {e}")))?;
    verify_factor(g, pattern, &a.with, &a.set.union(&a.s))
        .map_err(|e| AbsorbError::Certificate(format!("factor of G[A_S ∪ S]: {e}")))
}

fn check_s(g: &Graph, pattern: &Pattern, s: &VertexSet, avoid: &FixedBitSet) -> Result<(), AbsorbError> {
    if s.len() != pattern.h() {
        return Err(AbsorbError::InvalidSet(format!("S has {} vertices, pattern has {}", s.len(), pattern.h())));
    }
    if let Some(v) = s.iter().find(|&v| v >= g.n()) {
        return Err(AbsorbError::InvalidSet(format!("vertex {v} out of range")));
    }
    if let Some(v) = s.iter().find(|&v| avoid.contains(v)) {
        return Err(AbsorbError::InvalidSet(format!("S contains avoided vertex {v}")));
    }
    Ok(())
}

/// The general construction with `t = h`: disjoint neighbourhood slices
/// `N_w`, a greedy tiling of each, and traversing copies across the designated
/// vertices `V_w`.
#[derive(Clone, Debug)]
pub struct GeneralAbsorbers {
    pub pattern: Pattern,
    pub epsilon: f64,
    /// `|N_w|`; defaults to `floor(eps n / (2h))`.
    pub nbhd_size: Option<usize>,
    pub warnings: Vec<String>,
}

impl GeneralAbsorbers {
    pub fn new(pattern: Pattern, epsilon: f64) -> Self {
        GeneralAbsorbers { pattern, epsilon, nbhd_size: None, warnings: Vec::new() }
    }

    pub fn with_hypotheses(mut self, check: &HypothesisCheck) -> Self {
        self.warnings = check.warnings();
        self
    }

    pub fn t(&self) -> usize {
        self.pattern.h()
    }

    pub fn nbhd_size(&self, n: usize) -> usize {
        self.nbhd_size.unwrap_or_else(|| (self.epsilon * n as f64 / (2 * self.pattern.h()) as f64).floor() as usize)
    }

    pub fn build(
        &self,
        g: &Graph,
        s: &VertexSet,
        avoid: &FixedBitSet,
        target: usize,
        seed: u64,
    ) -> Result<Vec<Absorber>, AbsorbError> {
        let pattern = &self.pattern;
        check_s(g, pattern, s, avoid)?;
        let n = g.n();
        let h = pattern.h();
        let size = self.nbhd_size(n);
        if size < h {
            return Err(AbsorbError::Config(format!("|N_w| = {size} is smaller than h = {h}")));
        }
        let mut taken = avoid.clone();
        for v in s.iter() {
            taken.insert(v);
        }
        // N_w: the first `size` free neighbours of w in a seeded order.
        let mut slices = Vec::with_capacity(h);
        for (i, w) in s.iter().enumerate() {
            let mut free: Vec<usize> = g.neighbors(w).ones().filter(|&u| !taken.contains(u)).collect();
            if free.len() < size {
                return Err(AbsorbError::Neighbourhood { w, available: free.len(), needed: size });
            }
            free.shuffle(&mut seed::rng(seed::derive(seed, "nbhd", i as u64)));
            free.truncate(size);
            let slice = bits(n, free);
            taken.union_with(&slice);
            slices.push(slice);
        }
        // Greedy tiling of each G[N_w]; V_w holds the image of pattern vertex 0.
        let mut tiles: Vec<Vec<Vec<usize>>> = Vec::with_capacity(h);
        let mut designated: Vec<Vec<usize>> = Vec::with_capacity(h);
        for (i, slice) in slices.into_iter().enumerate() {
            let tiling = greedy_tiling_within(g, pattern, slice, seed::derive(seed, "slice", i as u64)).tiling;
            designated.push(tiling.copies().iter().map(|c| c[0]).collect());
            tiles.push(tiling.into_copies());
        }
        let s_list: Vec<usize> = s.iter().collect();
        let mut used: Vec<Vec<bool>> = designated.iter().map(|d| vec![false; d.len()]).collect();
        let mut found = Vec::new();
        while found.len() < target {
            let parts: Vec<VertexSet> = designated
                .iter()
                .zip(&used)
                .map(|(d, u)| VertexSet::collect_from(d.iter().zip(u).filter(|(_, &used)| !used).map(|(&v, _)| v)))
                .collect();
            let Some(t_copy) = find_traversing_copy(g, pattern, &parts).expect("parts are disjoint slices") else {
                break;
            };
            let mut without = Tiling::default();
            let mut with = Tiling::new(vec![t_copy.clone()]);
            let mut set = Vec::with_capacity(h * h);
            for &u in &t_copy {
                let wi = designated.iter().position(|d| d.contains(&u)).expect("traversing vertex is designated");
                let j = designated[wi].iter().position(|&x| x == u).expect("designated index");
                used[wi][j] = true;
                let copy = &tiles[wi][j];
                set.extend_from_slice(copy);
                without.push(copy.clone());
                // w replaces u (pattern vertex 0): w sees all of N_w.
                let mut swapped = copy.clone();
                swapped[0] = s_list[wi];
                with.push(swapped);
            }
            found.push(Absorber { s: s.clone(), set: VertexSet::collect_from(set), t: h, without, with });
        }
        if found.len() < target {
            return Err(AbsorbError::Shortfall { stage: "traversing-copy", target, found });
        }
        Ok(found)
    }
}

/// The clique construction with `t = r`: a seeded partition of `V - S` into
/// `r + 1` parts, a `K_r` on `w_1..w_r` in the last part and a `K_{r-1}` in
/// `N(v_i) ∩ N(w_i) ∩ V_i` for every `i`.
#[derive(Clone, Debug)]
pub struct CliqueAbsorbers {
    pub r: usize,
    pub ell: usize,
    pub pattern: Pattern,
    pub reseeds: usize,
    pub warnings: Vec<String>,
}

impl CliqueAbsorbers {
    pub fn new(r: usize, ell: usize) -> Result<Self, AbsorbError> {
        if !(r > ell && ell >= 2) {
            return Err(AbsorbError::Config(format!("need r > ell >= 2, got r = {r}, ell = {ell}")));
        }
        Ok(CliqueAbsorbers { r, ell, pattern: Pattern::clique(r).expect("r >= 3"), reseeds: 20, warnings: Vec::new() })
    }

    pub fn with_hypotheses(mut self, check: &HypothesisCheck) -> Self {
        self.warnings = check.warnings();
        self
    }

    pub fn t(&self) -> usize {
        self.r
    }

    pub fn build(
        &self,
        g: &Graph,
        s: &VertexSet,
        avoid: &FixedBitSet,
        target: usize,
        seed: u64,
    ) -> Result<Vec<Absorber>, AbsorbError> {
        check_s(g, &self.pattern, s, avoid)?;
        let mut best: Vec<Absorber> = Vec::new();
        for attempt in 0..self.reseeds.max(1) {
            let found = self.attempt(g, s, avoid, target, seed::derive(seed, "partition", attempt as u64));
            if found.len() >= target {
                return Ok(found);
            }
            if found.len() > best.len() {
                best = found;
            }
        }
        Err(AbsorbError::Shortfall { stage: "clique-descent", target, found: best })
    }

    fn attempt(&self, g: &Graph, s: &VertexSet, avoid: &FixedBitSet, target: usize, seed: u64) -> Vec<Absorber> {
        let n = g.n();
        let r = self.r;
        let mut rest: Vec<usize> = (0..n).filter(|&v| !avoid.contains(v) && !s.contains(v)).collect();
        rest.shuffle(&mut seed::rng(seed));
        // parts[i] holds the still-unused vertices of V_{i+1}
        let mut parts: Vec<FixedBitSet> = vec![FixedBitSet::with_capacity(n); r + 1];
        for (i, v) in rest.into_iter().enumerate() {
            parts[i % (r + 1)].insert(v);
        }
        let vs: Vec<usize> = s.iter().collect();
        let mut found = Vec::new();
        while found.len() < target {
            match self.one_absorber(g, &vs, &parts) {
                Some((ws, legs)) => {
                    let mut without = Tiling::default();
                    let mut with = Tiling::new(vec![ws.clone()]);
                    let mut set = ws.clone();
                    for (i, leg) in legs.iter().enumerate() {
                        let mut a = leg.clone();
                        a.push(ws[i]);
                        without.push(a);
                        let mut b = leg.clone();
                        b.push(vs[i]);
                        with.push(b);
                        set.extend_from_slice(leg);
                        for &x in leg {
                            parts[i].set(x, false);
                        }
                    }
                    for &w in &ws {
                        parts[r].set(w, false);
                    }
                    found.push(Absorber { s: s.clone(), set: VertexSet::collect_from(set), t: r, without, with });
                }
                None => break,
            }
        }
        found
    }

    /// A `K_r` in the last part and, under some labelling, the `K_{r-1}` legs.
    fn one_absorber(&self, g: &Graph, vs: &[usize], parts: &[FixedBitSet]) -> Option<(Vec<usize>, Vec<Vec<usize>>)> {
        let r = self.r;
        let last = &parts[r];
        for start in last.ones() {
            let Some(ws) = descend(g, last, start, r, self.ell) else {
                continue;
            };
            let mut perm = ws.clone();
            loop {
                let legs: Option<Vec<Vec<usize>>> = (0..r)
                    .map(|i| {
                        let mut cand = parts[i].clone();
                        cand.intersect_with(g.neighbors(vs[i]));
                        cand.intersect_with(g.neighbors(perm[i]));
                        clique_in(g, &cand, r - 1, self.ell)
                    })
                    .collect();
                if let Some(legs) = legs {
                    return Some((perm, legs));
                }
                if !next_permutation(&mut perm) {
                    break;
                }
            }
        }
        None
    }
}

/// A `size`-clique in `cand` containing `start`: greedy common-neighbourhood
/// descent to `size - ell` vertices, then a `K_ell` in what remains.
fn descend(g: &Graph, cand: &FixedBitSet, start: usize, size: usize, ell: usize) -> Option<Vec<usize>> {
    let mut clique = vec![start];
    let mut common = cand.clone();
    common.intersect_with(g.neighbors(start));
    while clique.len() + ell < size {
        let next = common.minimum()?;
        clique.push(next);
        common.intersect_with(g.neighbors(next));
    }
    let need = size - clique.len();
    let tail = find_clique(g, need, &common)?;
    clique.extend(tail);
    clique.sort_unstable();
    Some(clique)
}

/// Tries the descent from every start vertex, then exact clique search.
fn clique_in(g: &Graph, cand: &FixedBitSet, size: usize, ell: usize) -> Option<Vec<usize>> {
    if size <= ell {
        return find_clique(g, size, cand);
    }
    cand.ones().find_map(|start| descend(g, cand, start, size, ell)).or_else(|| find_clique(g, size, cand))
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).expect("successor exists");
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// The family constructions behind one interface.
#[derive(Clone, Debug)]
pub enum FamilyBuilder {
    General(GeneralAbsorbers),
    Clique(CliqueAbsorbers),
}

impl FamilyBuilder {
    pub fn pattern(&self) -> &Pattern {
        match self {
            FamilyBuilder::General(b) => &b.pattern,
            FamilyBuilder::Clique(b) => &b.pattern,
        }
    }

    pub fn t(&self) -> usize {
        match self {
            FamilyBuilder::General(b) => b.t(),
            FamilyBuilder::Clique(b) => b.t(),
        }
    }

    pub fn warnings(&self) -> &[String] {
        match self {
            FamilyBuilder::General(b) => &b.warnings,
            FamilyBuilder::Clique(b) => &b.warnings,
        }
    }

    pub fn build(
        &self,
        g: &Graph,
        s: &VertexSet,
        avoid: &FixedBitSet,
        target: usize,
        seed: u64,
    ) -> Result<Vec<Absorber>, AbsorbError> {
        match self {
            FamilyBuilder::General(b) => b.build(g, s, avoid, target, seed),
            FamilyBuilder::Clique(b) => b.build(g, s, avoid, target, seed),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::complete_multipartite;

    fn set(vs: &[usize]) -> VertexSet {
        VertexSet::collect_from(vs.iter().copied())
    }

    #[test]
    fn st_absorber_examples() {
        let k3 = Pattern::clique(3).unwrap();
        assert!(is_st_absorber(&Graph::complete(9), &k3, &set(&[0, 1, 2]), &set(&[5, 6, 7]), 1, 1000).unwrap());
        let k66 = complete_multipartite(&[6, 6]).unwrap();
        assert!(!is_st_absorber(&k66, &k3, &set(&[0, 1, 6]), &set(&[2, 7, 8]), 1, 1000).unwrap());
        let g = complete_multipartite(&[4, 4, 4]).unwrap();
        assert!(!is_st_absorber(&g, &k3, &set(&[0, 1, 2]), &set(&[3, 4, 8]), 1, 1000).unwrap());
        assert!(is_st_absorber(&g, &k3, &set(&[0, 1, 2]), &set(&[3, 4, 8, 9]), 1, 1000).is_err());
    }

    #[test]
    fn general_on_complete_graph() {
        let g = Graph::complete(30);
        let k3 = Pattern::clique(3).unwrap();
        let b = GeneralAbsorbers { nbhd_size: Some(9), ..GeneralAbsorbers::new(k3.clone(), 1.0) };
        let s = set(&[0, 1, 2]);
        let found = b.build(&g, &s, &FixedBitSet::with_capacity(30), 2, 7).unwrap();
        assert_eq!(found.len(), 2);
        assert!(found[0].set.is_disjoint(&found[1].set));
        for a in &found {
            verify_absorber(&g, &k3, a).unwrap();
            assert!(is_st_absorber(&g, &k3, &s, &a.set, 3, 10_000).unwrap());
        }
    }

    #[test]
    fn general_fails_without_copies() {
        let g = complete_multipartite(&[8, 8]).unwrap();
        let b = GeneralAbsorbers { nbhd_size: Some(3), ..GeneralAbsorbers::new(Pattern::clique(3).unwrap(), 0.5) };
        let err = b.build(&g, &set(&[0, 1, 8]), &FixedBitSet::with_capacity(16), 1, 0).unwrap_err();
        assert!(matches!(err, AbsorbError::Shortfall { stage: "traversing-copy", .. }));
    }

    #[test]
    fn clique_on_complete_graph() {
        let g = Graph::complete(40);
        let b = CliqueAbsorbers::new(3, 2).unwrap();
        let s = set(&[3, 17, 29]);
        let found = b.build(&g, &s, &FixedBitSet::with_capacity(40), 3, 1).unwrap();
        assert_eq!(found.len(), 3);
        for a in &found {
            verify_absorber(&g, &b.pattern, a).unwrap();
        }
    }

    #[test]
    fn permutations_cover_all() {
        let mut p = vec![0, 1, 2];
        let mut count = 1;
        while next_permutation(&mut p) {
            count += 1;
        }
        assert_eq!(count, 6);
    }
}
