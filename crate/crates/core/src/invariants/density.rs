//! The density `d(H) = max e(H') / (v(H') - 1)` over subgraphs with at least
//! two vertices. For a fixed vertex set the induced subgraph has the most
//! edges, so it suffices to range over vertex subsets.

use num_rational::Ratio;

use crate::graph::Pattern;

pub const MAX_DENSITY_VERTICES: usize = 20;

pub fn d_h(pattern: &Pattern) -> Ratio<usize> {
    let g = pattern.graph();
    let h = g.n();
    assert!(h <= MAX_DENSITY_VERTICES, "d(H) enumerates vertex subsets; h = {h} exceeds {MAX_DENSITY_VERTICES}");
    let masks: Vec<u32> = (0..h).map(|v| g.neighbors(v).ones().fold(0u32, |m, u| m | (1 << u))).collect();
    let mut best = Ratio::new(0, 1);
    for subset in 0u32..(1 << h) {
        let k = subset.count_ones() as usize;
        if k < 2 {
            continue;
        }
        let twice: u32 = (0..h).filter(|&v| subset & (1 << v) != 0).map(|v| (masks[v] & subset).count_ones()).sum();
        let r = Ratio::new(twice as usize / 2, k - 1);
        if r > best {
            best = r;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    #[test]
    fn small_patterns() {
        assert_eq!(d_h(&Pattern::clique(2).unwrap()), Ratio::new(1, 1));
        assert_eq!(d_h(&Pattern::clique(3).unwrap()), Ratio::new(3, 2));
        let c4 = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
        assert_eq!(d_h(&Pattern::general(c4).unwrap()), Ratio::new(4, 3));
        // A pendant edge lowers the global ratio, the triangle still wins.
        let paw = Graph::from_edges(4, [(0, 1), (1, 2), (0, 2), (2, 3)]).unwrap();
        assert_eq!(d_h(&Pattern::general(paw).unwrap()), Ratio::new(3, 2));
    }
}
