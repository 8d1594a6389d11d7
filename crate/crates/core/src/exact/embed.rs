//! Enumeration of pattern copies inside a vertex subset.

use std::collections::HashSet;
use std::ops::ControlFlow;

use fixedbitset::FixedBitSet;

use crate::graph::{Graph, Pattern, PatternKind};
use crate::invariants::for_each_clique;

/// Pattern-vertex visiting order starting at `root`: each next vertex has the
/// most already-placed neighbours (ties to the smaller index).
fn embedding_order(pattern: &Pattern, root: usize) -> Vec<usize> {
    let hg = pattern.graph();
    let h = pattern.h();
    let mut order = vec![root];
    let mut placed = FixedBitSet::with_capacity(h);
    placed.insert(root);
    while order.len() < h {
        let next = (0..h)
            .filter(|&v| !placed.contains(v))
            .max_by_key(|&v| (hg.neighbors(v).intersection_count(&placed), std::cmp::Reverse(v)))
            .expect("unplaced vertex remains");
        placed.insert(next);
        order.push(next);
    }
    order
}

/// Calls `f` with every embedding of `pattern` into `g` whose image lies in
/// `within`, optionally pinning pattern vertex `pin.0` to graph vertex `pin.1`.
/// The slice passed to `f` is indexed by pattern vertex.
pub fn for_each_embedding<F>(
    g: &Graph,
    pattern: &Pattern,
    within: &FixedBitSet,
    pin: Option<(usize, usize)>,
    mut f: F,
) -> ControlFlow<()>
where
    F: FnMut(&[usize]) -> ControlFlow<()>,
{
    let h = pattern.h();
    let root = pin.map_or(0, |p| p.0);
    let order = embedding_order(pattern, root);
    let hg = pattern.graph();
    // For each position, the earlier pattern vertices adjacent to it.
    let back: Vec<Vec<usize>> = order
        .iter()
        .enumerate()
        .map(|(i, &pv)| order[..i].iter().copied().filter(|&q| hg.has_edge(pv, q)).collect())
        .collect();
    let mut image = vec![usize::MAX; h];
    let mut used = FixedBitSet::with_capacity(g.n());
    let mut state =
        EmbedState { g, order: &order, back: &back, within, pin: pin.map(|p| p.1), image: &mut image, used: &mut used };
    state.extend(0, &mut f)
}

struct EmbedState<'a> {
    g: &'a Graph,
    order: &'a [usize],
    back: &'a [Vec<usize>],
    within: &'a FixedBitSet,
    pin: Option<usize>,
    image: &'a mut Vec<usize>,
    used: &'a mut FixedBitSet,
}

impl EmbedState<'_> {
    fn extend<F>(&mut self, pos: usize, f: &mut F) -> ControlFlow<()>
    where
        F: FnMut(&[usize]) -> ControlFlow<()>,
    {
        if pos == self.order.len() {
            return f(self.image);
        }
        let mut cand = self.within.clone();
        cand.difference_with(self.used);
        for &q in &self.back[pos] {
            cand.intersect_with(self.g.neighbors(self.image[q]));
        }
        if pos == 0 {
            if let Some(x) = self.pin {
                let keep = cand.contains(x);
                cand.clear();
                if keep {
                    cand.insert(x);
                }
            }
        }
        let pv = self.order[pos];
        for x in cand.ones() {
            self.image[pv] = x;
            self.used.insert(x);
            let r = self.extend(pos + 1, f);
            self.used.set(x, false);
            r?;
        }
        self.image[pv] = usize::MAX;
        ControlFlow::Continue(())
    }
}

/// Every copy of `pattern` inside `within` that contains `v`, one embedding per
/// vertex set, ordered lexicographically by sorted vertex set.
pub fn copies_through(g: &Graph, pattern: &Pattern, v: usize, within: &FixedBitSet) -> Vec<Vec<usize>> {
    if !within.contains(v) {
        return Vec::new();
    }
    match pattern.kind() {
        PatternKind::Clique(r) => {
            let mut nb = g.neighbors(v).clone();
            nb.intersect_with(within);
            let mut out = Vec::new();
            let _ = for_each_clique(g, r - 1, Some(&nb), |c| {
                let mut copy = c.to_vec();
                let at = copy.partition_point(|&x| x < v);
                copy.insert(at, v);
                out.push(copy);
                ControlFlow::Continue(())
            });
            out.sort_unstable();
            out
        }
        PatternKind::General => {
            let mut seen = HashSet::new();
            let mut out: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
            let dv = g.degree_into(v, within);
            for root in 0..pattern.h() {
                if pattern.graph().degree(root) > dv {
                    continue;
                }
                let _ = for_each_embedding(g, pattern, within, Some((root, v)), |img| {
                    let mut key = img.to_vec();
                    key.sort_unstable();
                    if seen.insert(key.clone()) {
                        out.push((key, img.to_vec()));
                    }
                    ControlFlow::Continue(())
                });
            }
            out.sort_unstable();
            out.into_iter().map(|(_, img)| img).collect()
        }
    }
}

/// Lexicographically first copy through `v` inside `within`.
pub fn first_copy_through(g: &Graph, pattern: &Pattern, v: usize, within: &FixedBitSet) -> Option<Vec<usize>> {
    if !within.contains(v) {
        return None;
    }
    match pattern.kind() {
        PatternKind::Clique(r) => {
            let mut nb = g.neighbors(v).clone();
            nb.intersect_with(within);
            let mut found = None;
            let _ = for_each_clique(g, r - 1, Some(&nb), |c| {
                let mut copy = c.to_vec();
                let at = copy.partition_point(|&x| x < v);
                copy.insert(at, v);
                found = Some(copy);
                ControlFlow::Break(())
            });
            found
        }
        PatternKind::General => copies_through(g, pattern, v, within).into_iter().next(),
    }
}

/// Any copy of `pattern` inside `within`.
pub fn find_copy(g: &Graph, pattern: &Pattern, within: &FixedBitSet) -> Option<Vec<usize>> {
    let mut found = None;
    let _ = match pattern.kind() {
        PatternKind::Clique(r) => for_each_clique(g, r, Some(within), |c| {
            found = Some(c.to_vec());
            ControlFlow::Break(())
        }),
        PatternKind::General => for_each_embedding(g, pattern, within, None, |img| {
            found = Some(img.to_vec());
            ControlFlow::Break(())
        }),
    };
    found
}
