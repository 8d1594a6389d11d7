//! Clique enumeration and maximum clique.

use std::ops::ControlFlow;

use fixedbitset::FixedBitSet;

use crate::graph::Graph;

/// Calls `f` on every `r`-clique inside `within` (all of `g` when `None`),
/// each given as an increasing vertex list, in lexicographic order.
pub fn for_each_clique<F>(g: &Graph, r: usize, within: Option<&FixedBitSet>, mut f: F) -> ControlFlow<()>
where
    F: FnMut(&[usize]) -> ControlFlow<()>,
{
    let cand = match within {
        Some(w) => w.clone(),
        None => g.full_set(),
    };
    let mut clique = Vec::with_capacity(r);
    extend(g, r, &mut clique, &cand, &mut f)
}

fn extend<F>(g: &Graph, r: usize, clique: &mut Vec<usize>, cand: &FixedBitSet, f: &mut F) -> ControlFlow<()>
where
    F: FnMut(&[usize]) -> ControlFlow<()>,
{
    if clique.len() == r {
        return f(clique);
    }
    let need = r - clique.len();
    let mut left = cand.count_ones(..);
    for v in cand.ones() {
        if left < need {
            break;
        }
        left -= 1;
        let mut next = cand.clone();
        next.intersect_with(g.neighbors(v));
        next.remove_range(..v + 1);
        if next.count_ones(..) + 1 < need {
            continue;
        }
        clique.push(v);
        extend(g, r, clique, &next, f)?;
        clique.pop();
    }
    ControlFlow::Continue(())
}

/// All `r`-cliques of `g` in lexicographic order.
pub fn enumerate_cliques(g: &Graph, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let _ = for_each_clique(g, r, None, |c| {
        out.push(c.to_vec());
        ControlFlow::Continue(())
    });
    out
}

/// Lexicographically first `r`-clique inside `within`.
pub fn find_clique(g: &Graph, r: usize, within: &FixedBitSet) -> Option<Vec<usize>> {
    let mut found = None;
    let _ = for_each_clique(g, r, Some(within), |c| {
        found = Some(c.to_vec());
        ControlFlow::Break(())
    });
    found
}

/// A maximum clique (Bron–Kerbosch with Tomita pivoting).
pub fn maximum_clique(g: &Graph) -> Vec<usize> {
    let mut best = Vec::new();
    let mut current = Vec::new();
    let p = g.full_set();
    let x = FixedBitSet::with_capacity(g.n());
    bron_kerbosch(g, &mut current, p, x, &mut best);
    best.sort_unstable();
    best
}

pub fn max_clique(g: &Graph) -> usize {
    maximum_clique(g).len()
}

fn bron_kerbosch(g: &Graph, r: &mut Vec<usize>, mut p: FixedBitSet, mut x: FixedBitSet, best: &mut Vec<usize>) {
    if p.is_clear() {
        if x.is_clear() && r.len() > best.len() {
            *best = r.clone();
        }
        return;
    }
    if r.len() + p.count_ones(..) <= best.len() {
        return;
    }
    let pivot = p
        .ones()
        .chain(x.ones())
        .max_by_key(|&u| (p.intersection_count(g.neighbors(u)), std::cmp::Reverse(u)))
        .expect("p is non-empty");
    let mut branch = p.clone();
    branch.difference_with(g.neighbors(pivot));
    for v in branch.ones() {
        let mut np = p.clone();
        np.intersect_with(g.neighbors(v));
        let mut nx = x.clone();
        nx.intersect_with(g.neighbors(v));
        r.push(v);
        bron_kerbosch(g, r, np, nx, best);
        r.pop();
        p.set(v, false);
        x.insert(v);
    }
}
