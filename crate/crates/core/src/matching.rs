//! Hopcroft–Karp maximum bipartite matching.

use std::collections::VecDeque;

const NIL: usize = usize::MAX;

/// Bipartite graph with `left` and `right` vertex counts and adjacency from
/// the left side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bipartite {
    left: usize,
    right: usize,
    adj: Vec<Vec<usize>>,
}

impl Bipartite {
    pub fn new(left: usize, right: usize) -> Self {
        Bipartite { left, right, adj: vec![Vec::new(); left] }
    }

    pub fn add_edge(&mut self, l: usize, r: usize) {
        assert!(l < self.left && r < self.right, "edge ({l}, {r}) out of range");
        self.adj[l].push(r);
    }

    pub fn left(&self) -> usize {
        self.left
    }

    pub fn right(&self) -> usize {
        self.right
    }

    pub fn neighbors(&self, l: usize) -> &[usize] {
        &self.adj[l]
    }
}

/// Maximum matching; `pair_left[l]` is the right partner of `l`, if any.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matching {
    pub pair_left: Vec<Option<usize>>,
    pub size: usize,
}

impl Matching {
    pub fn is_left_perfect(&self) -> bool {
        self.size == self.pair_left.len()
    }
}

/// Maximum matching restricted to the left vertices with `active[l]` set.
pub fn hopcroft_karp(b: &Bipartite, active: Option<&[bool]>) -> Matching {
    let on = |l: usize| active.is_none_or(|a| a[l]);
    let mut pair_l = vec![NIL; b.left];
    let mut pair_r = vec![NIL; b.right];
    let mut dist = vec![0usize; b.left];
    let mut size = 0;
    loop {
        // BFS layers from free left vertices.
        let mut queue = VecDeque::new();
        for l in 0..b.left {
            if on(l) && pair_l[l] == NIL {
                dist[l] = 0;
                queue.push_back(l);
            } else {
                dist[l] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(l) = queue.pop_front() {
            for &r in &b.adj[l] {
                let m = pair_r[r];
                if m == NIL {
                    found = true;
                } else if dist[m] == usize::MAX {
                    dist[m] = dist[l] + 1;
                    queue.push_back(m);
                }
            }
        }
        if !found {
            break;
        }
        for l in 0..b.left {
            if on(l) && pair_l[l] == NIL && augment(b, l, &mut pair_l, &mut pair_r, &mut dist) {
                size += 1;
            }
        }
    }
    Matching { pair_left: pair_l.into_iter().map(|r| (r != NIL).then_some(r)).collect(), size }
}

fn augment(b: &Bipartite, l: usize, pair_l: &mut [usize], pair_r: &mut [usize], dist: &mut [usize]) -> bool {
    for i in 0..b.adj[l].len() {
        let r = b.adj[l][i];
        let m = pair_r[r];
        if m == NIL || (dist[m] == dist[l] + 1 && augment(b, m, pair_l, pair_r, dist)) {
            pair_l[l] = r;
            pair_r[r] = l;
            return true;
        }
    }
    dist[l] = usize::MAX;
    false
}
