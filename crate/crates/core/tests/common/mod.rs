//! Independent brute-force oracles. None of these call into the solvers they
//! are compared against; they only read adjacency.

#![allow(dead_code)]

use std::collections::VecDeque;

use tilinglab::{Graph, Pattern};

/// Whether `block` hosts a copy of `pattern` (some bijection maps every
/// pattern edge onto a graph edge).
pub fn block_hosts(g: &Graph, pattern: &Pattern, block: &[usize]) -> bool {
    let p = pattern.graph();
    let edges: Vec<(usize, usize)> = p.edges().collect();
    let mut perm: Vec<usize> = block.to_vec();
    perm.sort_unstable();
    loop {
        if edges.iter().all(|&(a, b)| g.has_edge(perm[a], perm[b])) {
            return true;
        }
        if !next_permutation(&mut perm) {
            return false;
        }
    }
}

fn next_permutation(v: &mut [usize]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        return false;
    };
    let j = (i..v.len()).rev().find(|&j| v[j] > v[i - 1]).unwrap();
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Enumerates every partition of `V(g)` into `h`-blocks.
pub fn brute_factor_exists(g: &Graph, pattern: &Pattern) -> bool {
    let n = g.n();
    let h = pattern.h();
    if !n.is_multiple_of(h) {
        return false;
    }
    fn rec(g: &Graph, pattern: &Pattern, free: &[usize]) -> bool {
        let Some(&v) = free.first() else {
            return true;
        };
        let rest: Vec<usize> = free[1..].to_vec();
        let k = pattern.h() - 1;
        let mut pick: Vec<usize> = (0..k).collect();
        if rest.len() < k {
            return false;
        }
        loop {
            let mut block = vec![v];
            block.extend(pick.iter().map(|&i| rest[i]));
            if block_hosts(g, pattern, &block) {
                let next: Vec<usize> = free.iter().copied().filter(|x| !block.contains(x)).collect();
                if rec(g, pattern, &next) {
                    return true;
                }
            }
            if !next_combination(&mut pick, rest.len()) {
                return false;
            }
        }
    }
    let free: Vec<usize> = (0..n).collect();
    rec(g, pattern, &free)
}

pub fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    if k == 0 {
        return false;
    }
    let Some(i) = (0..k).rev().find(|&i| c[i] < n - k + i) else {
        return false;
    };
    c[i] += 1;
    for j in i + 1..k {
        c[j] = c[j - 1] + 1;
    }
    true
}

const NONE: usize = usize::MAX;

/// Maximum matching size in a general graph via Edmonds' blossom algorithm.
pub fn blossom_matching(g: &Graph) -> usize {
    let n = g.n();
    let adj: Vec<Vec<usize>> = (0..n).map(|v| (0..n).filter(|&u| g.has_edge(u, v)).collect()).collect();
    let mut mate = vec![NONE; n];
    let mut size = 0;
    for root in 0..n {
        if mate[root] == NONE && augment(root, &adj, &mut mate) {
            size += 1;
        }
    }
    size
}

fn augment(root: usize, adj: &[Vec<usize>], mate: &mut [usize]) -> bool {
    let n = adj.len();
    let mut used = vec![false; n];
    let mut parent = vec![NONE; n];
    let mut base: Vec<usize> = (0..n).collect();
    used[root] = true;
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        for &to in &adj[v] {
            if base[v] == base[to] || mate[v] == to {
                continue;
            }
            if to == root || (mate[to] != NONE && parent[mate[to]] != NONE) {
                let cur = lca(v, to, &base, mate, &parent);
                let mut blossom = vec![false; n];
                mark_path(v, cur, to, &mut blossom, &base, mate, &mut parent);
                mark_path(to, cur, v, &mut blossom, &base, mate, &mut parent);
                for i in 0..n {
                    if blossom[base[i]] {
                        base[i] = cur;
                        if !used[i] {
                            used[i] = true;
                            queue.push_back(i);
                        }
                    }
                }
            } else if parent[to] == NONE {
                parent[to] = v;
                if mate[to] == NONE {
                    let mut u = to;
                    while u != NONE {
                        let pu = parent[u];
                        let next = mate[pu];
                        mate[u] = pu;
                        mate[pu] = u;
                        u = next;
                    }
                    return true;
                }
                used[mate[to]] = true;
                queue.push_back(mate[to]);
            }
        }
    }
    false
}

fn lca(a: usize, b: usize, base: &[usize], mate: &[usize], parent: &[usize]) -> usize {
    let mut seen = vec![false; base.len()];
    let mut a = a;
    loop {
        a = base[a];
        seen[a] = true;
        if mate[a] == NONE {
            break;
        }
        a = parent[mate[a]];
    }
    let mut b = b;
    loop {
        b = base[b];
        if seen[b] {
            return b;
        }
        b = parent[mate[b]];
    }
}

fn mark_path(
    mut v: usize,
    b: usize,
    mut child: usize,
    blossom: &mut [bool],
    base: &[usize],
    mate: &[usize],
    parent: &mut [usize],
) {
    while base[v] != b {
        blossom[base[v]] = true;
        blossom[base[mate[v]]] = true;
        parent[v] = child;
        child = mate[v];
        v = parent[mate[v]];
    }
}

/// Whether the vertices selected by `mask` contain a `K_ell`.
fn mask_has_clique(g: &Graph, mask: u32, ell: usize) -> bool {
    let vs: Vec<usize> = (0..g.n()).filter(|&v| mask & (1 << v) != 0).collect();
    if vs.len() < ell {
        return false;
    }
    let mut pick: Vec<usize> = (0..ell).collect();
    loop {
        if pick.iter().enumerate().all(|(i, &a)| pick[i + 1..].iter().all(|&b| g.has_edge(vs[a], vs[b]))) {
            return true;
        }
        if !next_combination(&mut pick, vs.len()) {
            return false;
        }
    }
}

/// `alpha_ell` by enumerating every vertex subset (n <= 16).
pub fn brute_alpha_ell(g: &Graph, ell: usize) -> usize {
    assert!(g.n() <= 16);
    (0u32..1 << g.n()).filter(|&m| !mask_has_clique(g, m, ell)).map(|m| m.count_ones() as usize).max().unwrap_or(0)
}

/// `d(H)` as a reduced `(numerator, denominator)` pair, enumerating every
/// vertex subset and counting edges from the edge list.
pub fn brute_density(pattern: &Pattern) -> (usize, usize) {
    let p = pattern.graph();
    let edges: Vec<(usize, usize)> = p.edges().collect();
    let mut best = (0usize, 1usize);
    for mask in 0u32..1 << p.n() {
        let k = mask.count_ones() as usize;
        if k < 2 {
            continue;
        }
        let e = edges.iter().filter(|&&(a, b)| mask & (1 << a) != 0 && mask & (1 << b) != 0).count();
        if e * best.1 > best.0 * (k - 1) {
            best = (e, k - 1);
        }
    }
    let g = gcd(best.0, best.1);
    (best.0 / g, best.1 / g)
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a.max(1)
    } else {
        gcd(b, a % b)
    }
}

/// Smallest `s` such that every ordered family of `K_h`-parts of size `s`
/// has a traversing clique; `None` when no `s <= n/h` works.
pub fn brute_alpha_star_clique(g: &Graph, h: usize) -> Option<usize> {
    (1..=g.n() / h).find(|&s| every_family_traversed(g, h, s))
}

fn every_family_traversed(g: &Graph, h: usize, s: usize) -> bool {
    let n = g.n();
    let mut label = vec![0usize; n];
    let mut counts = vec![0usize; h + 1];
    fn rec(g: &Graph, h: usize, s: usize, v: usize, label: &mut [usize], counts: &mut [usize]) -> bool {
        if (1..=h).all(|c| counts[c] == s) {
            return traversed(g, h, label);
        }
        if v == g.n() {
            return true;
        }
        for c in 0..=h {
            if c > 0 && counts[c] == s {
                continue;
            }
            label[v] = c;
            counts[c] += 1;
            let ok = rec(g, h, s, v + 1, label, counts);
            counts[c] -= 1;
            label[v] = 0;
            if !ok {
                return false;
            }
        }
        true
    }
    rec(g, h, s, 0, &mut label, &mut counts)
}

fn traversed(g: &Graph, h: usize, label: &[usize]) -> bool {
    let parts: Vec<Vec<usize>> = (1..=h).map(|c| (0..label.len()).filter(|&v| label[v] == c).collect()).collect();
    fn pick(g: &Graph, parts: &[Vec<usize>], chosen: &mut Vec<usize>) -> bool {
        let i = chosen.len();
        if i == parts.len() {
            return true;
        }
        for &v in &parts[i] {
            if chosen.iter().all(|&u| g.has_edge(u, v)) {
                chosen.push(v);
                if pick(g, parts, chosen) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
    pick(g, &parts, &mut Vec::new())
}
