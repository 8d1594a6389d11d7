//! Probing the traversing-copy parameter: the smallest `s` such that every
//! family of `h` disjoint vertex sets of size `s` contains a copy of `H` with
//! one vertex in each set.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::InvariantError;
use crate::exact::find_traversing_copy;
use crate::graph::{Graph, Pattern, VertexSet};
use crate::seed;

pub const DEFAULT_FAMILY_CAP: u64 = 2_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AlphaStarMode {
    /// Every family of `h` pairwise-disjoint `s`-sets; refused above `cap` families.
    Exhaustive { cap: u64 },
    /// `trials` uniformly random families.
    Sampled { trials: usize, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum AlphaStarResult {
    Holds,
    Fails { witness: Vec<VertexSet> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlphaStarVerdict {
    pub s: usize,
    pub mode: AlphaStarMode,
    pub examined: u64,
    #[serde(flatten)]
    pub result: AlphaStarResult,
    pub note: String,
}

impl AlphaStarVerdict {
    pub fn holds(&self) -> bool {
        matches!(self.result, AlphaStarResult::Holds)
    }
}

/// Number of unordered families of `h` pairwise-disjoint `s`-subsets of an
/// `n`-set, saturating at `u128::MAX`.
pub fn family_count(n: usize, h: usize, s: usize) -> u128 {
    if h * s > n {
        return 0;
    }
    // n! / ((n - hs)! (s!)^h h!) built as a product of binomials C(n - is, s) / h!
    let mut total: u128 = 1;
    let mut left = n;
    for _ in 0..h {
        total = match total.checked_mul(binomial(left, s)) {
            Some(t) => t,
            None => return u128::MAX,
        };
        left -= s;
    }
    let hf: u128 = (1..=h as u128).product();
    total / hf
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

pub fn alpha_star_check(
    g: &Graph,
    pattern: &Pattern,
    s: usize,
    mode: AlphaStarMode,
) -> Result<AlphaStarVerdict, InvariantError> {
    let h = pattern.h();
    let n = g.n();
    if s == 0 || h * s > n {
        return Err(InvariantError::InvalidParameter(format!(
            "probe size s = {s} needs 1 <= s and h*s <= n (h = {h}, n = {n})"
        )));
    }
    match mode {
        AlphaStarMode::Exhaustive { cap } => {
            let count = family_count(n, h, s);
            if count > cap as u128 {
                return Err(InvariantError::CapExceeded { families: count, cap });
            }
            let mut examined = 0u64;
            let mut parts: Vec<Vec<usize>> = Vec::with_capacity(h);
            let mut used = vec![false; n];
            let witness = exhaustive(g, pattern, s, &mut parts, &mut used, &mut examined)?;
            Ok(AlphaStarVerdict {
                s,
                mode,
                examined,
                result: match witness {
                    Some(w) => AlphaStarResult::Fails { witness: w },
                    None => AlphaStarResult::Holds,
                },
                note: format!("exhaustive over all {count} families"),
            })
        }
        AlphaStarMode::Sampled { trials, seed } => {
            let mut rng = seed::rng(seed);
            let mut vertices: Vec<usize> = (0..n).collect();
            for trial in 0..trials {
                let (head, _) = vertices.partial_shuffle(&mut rng, h * s);
                let family: Vec<VertexSet> =
                    head.chunks(s).map(|c| VertexSet::collect_from(c.iter().copied())).collect();
                if find_traversing_copy(g, pattern, &family)?.is_none() {
                    return Ok(AlphaStarVerdict {
                        s,
                        mode,
                        examined: trial as u64 + 1,
                        result: AlphaStarResult::Fails { witness: family },
                        note: format!("failing family found at sample {}", trial + 1),
                    });
                }
            }
            Ok(AlphaStarVerdict {
                s,
                mode,
                examined: trials as u64,
                result: AlphaStarResult::Holds,
                note: format!("no failing family among {trials} random samples (empirical)"),
            })
        }
    }
}

/// Enumerates families with strictly increasing minima; returns the first
/// family without a traversing copy.
fn exhaustive(
    g: &Graph,
    pattern: &Pattern,
    s: usize,
    parts: &mut Vec<Vec<usize>>,
    used: &mut Vec<bool>,
    examined: &mut u64,
) -> Result<Option<Vec<VertexSet>>, InvariantError> {
    let h = pattern.h();
    if parts.len() == h {
        *examined += 1;
        let family: Vec<VertexSet> = parts.iter().map(|p| VertexSet::collect_from(p.iter().copied())).collect();
        return Ok(match find_traversing_copy(g, pattern, &family)? {
            Some(_) => None,
            None => Some(family),
        });
    }
    let n = g.n();
    // The new set's minimum is the smallest unused vertex above the previous minimum.
    let lo = parts.last().map_or(0, |p| p[0] + 1);
    let remaining_sets = h - parts.len();
    for first in lo..n {
        if used[first] {
            continue;
        }
        let free_after = (first..n).filter(|&v| !used[v]).count();
        if free_after < remaining_sets * s {
            break;
        }
        used[first] = true;
        let mut set = vec![first];
        if let Some(w) = subsets(g, pattern, s, first + 1, &mut set, parts, used, examined)? {
            return Ok(Some(w));
        }
        used[first] = false;
    }
    Ok(None)
}

#[allow(clippy::too_many_arguments)]
fn subsets(
    g: &Graph,
    pattern: &Pattern,
    s: usize,
    from: usize,
    set: &mut Vec<usize>,
    parts: &mut Vec<Vec<usize>>,
    used: &mut Vec<bool>,
    examined: &mut u64,
) -> Result<Option<Vec<VertexSet>>, InvariantError> {
    if set.len() == s {
        parts.push(set.clone());
        let r = exhaustive(g, pattern, s, parts, used, examined)?;
        parts.pop();
        return Ok(r);
    }
    for v in from..g.n() {
        if used[v] {
            continue;
        }
        used[v] = true;
        set.push(v);
        let r = subsets(g, pattern, s, v + 1, set, parts, used, examined)?;
        set.pop();
        used[v] = false;
        if r.is_some() {
            return Ok(r);
        }
    }
    Ok(None)
}

/// Result of the ascending scan over `s`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlphaStarEstimate {
    /// Smallest passing `s`; `None` is the infinity sentinel (no `s <= n/h` passes).
    pub value: Option<usize>,
    /// False in sampled mode: the value is an empirical estimate.
    pub exact: bool,
    pub verdicts: Vec<AlphaStarVerdict>,
}

/// Smallest `s` in `1..=n/h` for which [`alpha_star_check`] holds.
///
/// In sampled mode each probe size uses a seed derived from the mode's seed
/// and `s`.
pub fn alpha_star_upper(
    g: &Graph,
    pattern: &Pattern,
    mode: AlphaStarMode,
) -> Result<AlphaStarEstimate, InvariantError> {
    let h = pattern.h();
    let mut verdicts = Vec::new();
    for s in 1..=g.n() / h {
        let probe = match mode {
            AlphaStarMode::Sampled { trials, seed } => {
                AlphaStarMode::Sampled { trials, seed: seed::derive(seed, "alpha-star", s as u64) }
            }
            m => m,
        };
        let v = alpha_star_check(g, pattern, s, probe)?;
        let holds = v.holds();
        verdicts.push(v);
        if holds {
            return Ok(AlphaStarEstimate {
                value: Some(s),
                exact: matches!(mode, AlphaStarMode::Exhaustive { .. }),
                verdicts,
            });
        }
    }
    Ok(AlphaStarEstimate { value: None, exact: matches!(mode, AlphaStarMode::Exhaustive { .. }), verdicts })
}

/// Re-checks a failure witness: `h` pairwise-disjoint sets of size at least
/// `s` with no traversing copy.
pub fn verify_alpha_star_witness(g: &Graph, pattern: &Pattern, s: usize, witness: &[VertexSet]) -> Result<(), String> {
    if witness.len() != pattern.h() {
        return Err(format!("witness has {} sets, pattern has {} vertices", witness.len(), pattern.h()));
    }
    for (i, set) in witness.iter().enumerate() {
        if set.len() < s {
            return Err(format!("set {i} has {} < {s} vertices", set.len()));
        }
        if let Some(&v) = set.as_slice().last() {
            if v >= g.n() {
                return Err(format!("set {i} contains out-of-range vertex {v}"));
            }
        }
        for other in &witness[i + 1..] {
            if !set.is_disjoint(other) {
                return Err(format!("set {i} intersects a later set"));
            }
        }
    }
    match find_traversing_copy(g, pattern, witness) {
        Ok(None) => Ok(()),
        Ok(Some(copy)) => Err(format!("witness family has a traversing copy {copy:?}")),
        Err(e) => Err(e.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::complete_multipartite;

    #[test]
    fn family_counts() {
        assert_eq!(family_count(9, 3, 1), 84);
        assert_eq!(family_count(4, 2, 1), 6);
        // {ab|cd}, {ac|bd}, {ad|bc}
        assert_eq!(family_count(4, 2, 2), 3);
        assert_eq!(family_count(5, 3, 2), 0);
    }

    #[test]
    fn complete_graph_holds_at_one() {
        let k3 = Pattern::clique(3).unwrap();
        let v = alpha_star_check(&Graph::complete(9), &k3, 1, AlphaStarMode::Exhaustive { cap: 1000 }).unwrap();
        assert!(v.holds());
        assert_eq!(v.examined, 84);
        let est = alpha_star_upper(&Graph::complete(9), &k3, AlphaStarMode::Exhaustive { cap: 1000 }).unwrap();
        assert_eq!(est.value, Some(1));
    }

    #[test]
    fn bipartite_fails_with_checkable_witness() {
        let k3 = Pattern::clique(3).unwrap();
        let g = complete_multipartite(&[6, 6]).unwrap();
        let v = alpha_star_check(&g, &k3, 4, AlphaStarMode::Exhaustive { cap: 1_000_000 }).unwrap();
        match &v.result {
            AlphaStarResult::Fails { witness } => verify_alpha_star_witness(&g, &k3, 4, witness).unwrap(),
            AlphaStarResult::Holds => panic!("K_6,6 has no triangles"),
        }
        let est = alpha_star_upper(&g, &k3, AlphaStarMode::Exhaustive { cap: 1_000_000 }).unwrap();
        assert_eq!(est.value, None);
    }

    #[test]
    fn cap_is_enforced() {
        let k3 = Pattern::clique(3).unwrap();
        let err = alpha_star_check(&Graph::complete(30), &k3, 5, AlphaStarMode::Exhaustive { cap: 10 }).unwrap_err();
        assert!(matches!(err, InvariantError::CapExceeded { .. }));
    }

    #[test]
    fn oversized_probe_is_rejected() {
        let k3 = Pattern::clique(3).unwrap();
        assert!(alpha_star_check(&Graph::complete(6), &k3, 3, AlphaStarMode::Exhaustive { cap: 10 }).is_err());
    }
}
