//! Robust bipartite template graphs `B_m`.
//!
//! Left side: `X_m` (indices `0..m+k`, `k = ceil(beta m)`) then `Y_m`
//! (`m+k..3m+k`). Right side: `Z_m` (`0..3m`). For every `m`-subset `X'` of
//! `X_m`, `X' ∪ Y_m` must be perfectly matchable into `Z_m`.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::AbsorbError;
use crate::matching::{hopcroft_karp, Bipartite};
use crate::seed;

pub const MAX_TEMPLATE_DEGREE: usize = 40;
const RANDOM_LEFT_DEGREE: usize = 8;

/// `ceil(beta m)`, tolerant of floating-point noise in `beta m`.
pub fn ceil_beta_m(beta: f64, m: usize) -> usize {
    (beta * m as f64 - 1e-9).ceil().max(0.0) as usize
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TemplateMode {
    /// Every `X_m ∪ Y_m`–`Z_m` pair; needs `3m + ceil(beta m) <= 40`.
    CompleteBipartite,
    /// Configuration-model pairing with degrees in `[8, 40]`.
    RandomRegular { seed: u64 },
    /// `y_j z_j` for `j < 2m`, and `x_j z_{2m+i}` for `i` in `[j-k, j] ∩ [0, m)`.
    Staircase,
    /// Complete bipartite when the degree bound allows, random otherwise.
    Auto { seed: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TemplateVerify {
    /// All `C(m+k, m)` subsets, refused above `cap`.
    Exhaustive {
        cap: u64,
    },
    Sampled {
        trials: usize,
        seed: u64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TemplateGraph {
    pub m: usize,
    pub beta: f64,
    pub k: usize,
    pub mode: TemplateMode,
    /// `(left, right)` pairs, sorted.
    pub edges: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TemplateCertificate {
    pub verify: TemplateVerify,
    pub subsets_checked: u64,
    pub attempts: usize,
}

impl TemplateGraph {
    pub fn x_len(&self) -> usize {
        self.m + self.k
    }

    pub fn y_len(&self) -> usize {
        2 * self.m
    }

    pub fn z_len(&self) -> usize {
        3 * self.m
    }

    pub fn left_len(&self) -> usize {
        self.x_len() + self.y_len()
    }

    pub fn bipartite(&self) -> Bipartite {
        let mut b = Bipartite::new(self.left_len(), self.z_len());
        for &(l, r) in &self.edges {
            b.add_edge(l, r);
        }
        b
    }

    pub fn max_degree(&self) -> usize {
        let mut left = vec![0usize; self.left_len()];
        let mut right = vec![0usize; self.z_len()];
        for &(l, r) in &self.edges {
            left[l] += 1;
            right[r] += 1;
        }
        left.into_iter().chain(right).max().unwrap_or(0)
    }

    /// Perfect matching of `X' ∪ Y_m` into `Z_m`, as template edge indices.
    pub fn perfect_matching(&self, x_prime: &[usize]) -> Option<Vec<usize>> {
        if x_prime.len() != self.m {
            return None;
        }
        let b = self.bipartite();
        let mut active = vec![false; self.left_len()];
        for &x in x_prime {
            if x >= self.x_len() {
                return None;
            }
            active[x] = true;
        }
        active[self.x_len()..self.left_len()].fill(true);
        let matching = hopcroft_karp(&b, Some(&active));
        if matching.size != self.z_len() {
            return None;
        }
        let mut chosen: Vec<usize> = matching
            .pair_left
            .iter()
            .enumerate()
            .filter_map(|(l, r)| r.map(|r| self.edge_index(l, r).expect("matched pair is an edge")))
            .collect();
        chosen.sort_unstable();
        Some(chosen)
    }

    pub fn edge_index(&self, l: usize, r: usize) -> Option<usize> {
        self.edges.binary_search(&(l, r)).ok()
    }

    /// Checks part sizes, edge ranges, the degree bound and the matching
    /// property under `verify`. Returns the number of subsets checked.
    pub fn verify(&self, verify: TemplateVerify) -> Result<u64, AbsorbError> {
        if self.k != ceil_beta_m(self.beta, self.m) {
            return Err(AbsorbError::Template(format!(
                "k = {} but ceil(beta m) = {}",
                self.k,
                ceil_beta_m(self.beta, self.m)
            )));
        }
        if let Some(&(l, r)) = self.edges.iter().find(|&&(l, r)| l >= self.left_len() || r >= self.z_len()) {
            return Err(AbsorbError::Template(format!("edge ({l}, {r}) out of range")));
        }
        if self.edges.windows(2).any(|w| w[0] >= w[1]) {
            return Err(AbsorbError::Template("edge list not strictly sorted".into()));
        }
        let d = self.max_degree();
        if d > MAX_TEMPLATE_DEGREE {
            return Err(AbsorbError::Template(format!("maximum degree {d} exceeds {MAX_TEMPLATE_DEGREE}")));
        }
        let x = self.x_len();
        match verify {
            TemplateVerify::Exhaustive { cap } => {
                let count = binomial(x, self.m);
                if count > cap as u128 {
                    return Err(AbsorbError::Template(format!(
                        "exhaustive verification needs {count} subsets, above the cap of {cap}"
                    )));
                }
                let mut subset: Vec<usize> = (0..self.m).collect();
                let mut checked = 0u64;
                loop {
                    checked += 1;
                    if self.perfect_matching(&subset).is_none() {
                        return Err(AbsorbError::TemplateFalsified { x_prime: subset });
                    }
                    if !next_combination(&mut subset, x) {
                        return Ok(checked);
                    }
                }
            }
            TemplateVerify::Sampled { trials, seed } => {
                let mut rng = seed::rng(seed);
                let mut pool: Vec<usize> = (0..x).collect();
                for _ in 0..trials {
                    let (head, _) = pool.partial_shuffle(&mut rng, self.m);
                    let mut subset = head.to_vec();
                    subset.sort_unstable();
                    if self.perfect_matching(&subset).is_none() {
                        return Err(AbsorbError::TemplateFalsified { x_prime: subset });
                    }
                }
                Ok(trials as u64)
            }
        }
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i + 1) as u128;
    }
    acc
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let Some(i) = (0..k).rev().find(|&i| c[i] < n - k + i) else {
        return false;
    };
    c[i] += 1;
    for j in i + 1..k {
        c[j] = c[j - 1] + 1;
    }
    true
}

/// Builds and verifies `B_m`; random templates are resampled up to
/// `attempts` times.
pub fn build_template(
    m: usize,
    beta: f64,
    mode: TemplateMode,
    verify: TemplateVerify,
    attempts: usize,
) -> Result<(TemplateGraph, TemplateCertificate), AbsorbError> {
    if m == 0 {
        return Err(AbsorbError::Template("template scale m must be at least 1".into()));
    }
    if beta.is_nan() || beta <= 0.0 {
        return Err(AbsorbError::Template(format!("beta = {beta} must be positive")));
    }
    let k = ceil_beta_m(beta, m);
    let mode = match mode {
        TemplateMode::Auto { seed } if 3 * m + k <= MAX_TEMPLATE_DEGREE => {
            let _ = seed;
            TemplateMode::CompleteBipartite
        }
        TemplateMode::Auto { seed } => TemplateMode::RandomRegular { seed },
        other => other,
    };
    let deterministic = !matches!(mode, TemplateMode::RandomRegular { .. });
    let tries = if deterministic { 1 } else { attempts.max(1) };
    let mut last_err = None;
    for attempt in 0..tries {
        let edges = match mode {
            TemplateMode::CompleteBipartite => {
                if 3 * m + k > MAX_TEMPLATE_DEGREE {
                    return Err(AbsorbError::Template(format!(
                        "complete bipartite template needs 3m + ceil(beta m) <= {MAX_TEMPLATE_DEGREE}, got {}",
                        3 * m + k
                    )));
                }
                complete_edges(m, k)
            }
            TemplateMode::Staircase => staircase_edges(m, k),
            TemplateMode::RandomRegular { seed } => {
                match random_edges(m, k, seed::derive(seed, "template", attempt as u64)) {
                    Some(e) => e,
                    None => {
                        last_err = Some(AbsorbError::Template("configuration pairing left multi-edges".into()));
                        continue;
                    }
                }
            }
            TemplateMode::Auto { .. } => unreachable!("resolved above"),
        };
        let template = TemplateGraph { m, beta, k, mode, edges };
        match template.verify(verify) {
            Ok(checked) => {
                return Ok((template, TemplateCertificate { verify, subsets_checked: checked, attempts: attempt + 1 }))
            }
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.expect("at least one attempt"))
}

fn complete_edges(m: usize, k: usize) -> Vec<(usize, usize)> {
    let left = 3 * m + k;
    (0..left).flat_map(|l| (0..3 * m).map(move |r| (l, r))).collect()
}

fn staircase_edges(m: usize, k: usize) -> Vec<(usize, usize)> {
    let x = m + k;
    let mut edges = Vec::new();
    for j in 0..x {
        let lo = j.saturating_sub(k);
        let hi = j.min(m - 1);
        for i in lo..=hi {
            edges.push((j, 2 * m + i));
        }
    }
    for j in 0..2 * m {
        edges.push((x + j, j));
    }
    edges.sort_unstable();
    edges
}

/// Left degree 8; right stubs spread evenly; duplicate pairs repaired by
/// random stub swaps.
fn random_edges(m: usize, k: usize, seed: u64) -> Option<Vec<(usize, usize)>> {
    let left = 3 * m + k;
    let right = 3 * m;
    let total = left * RANDOM_LEFT_DEGREE;
    let mut rng = seed::rng(seed);
    let mut right_stubs: Vec<usize> = (0..total).map(|i| i % right).collect();
    right_stubs.shuffle(&mut rng);
    let left_of = |i: usize| i / RANDOM_LEFT_DEGREE;
    let mut seen = std::collections::HashSet::new();
    let mut dup: Vec<usize> = Vec::new();
    let mut is_dup = vec![false; total];
    for (i, &r) in right_stubs.iter().enumerate() {
        if !seen.insert((left_of(i), r)) {
            dup.push(i);
            is_dup[i] = true;
        }
    }
    let mut guard = 0;
    while let Some(i) = dup.pop() {
        guard += 1;
        if guard > 100 * total {
            return None;
        }
        let j = rng.gen_range(0..total);
        let (li, lj) = (left_of(i), left_of(j));
        let (ri, rj) = (right_stubs[i], right_stubs[j]);
        if is_dup[j] || li == lj || ri == rj || seen.contains(&(li, rj)) || seen.contains(&(lj, ri)) {
            dup.push(i);
            continue;
        }
        // (li, ri) stays in `seen`: another stub still carries it
        seen.remove(&(lj, rj));
        seen.insert((li, rj));
        seen.insert((lj, ri));
        right_stubs.swap(i, j);
        is_dup[i] = false;
    }
    let mut edges: Vec<(usize, usize)> = right_stubs.iter().enumerate().map(|(i, &r)| (left_of(i), r)).collect();
    edges.sort_unstable();
    edges.dedup();
    if edges.len() != total {
        return None;
    }
    Some(edges)
}
