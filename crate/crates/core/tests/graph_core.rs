mod common;

use proptest::prelude::*;

use tilinglab::generate::{
    complete_multipartite, gamma, gnp, hs_tripartite_sizes, lower_bound_construction, two_cliques,
};
use tilinglab::invariants::{alpha_ell, max_clique, min_degree};
use tilinglab::{find_factor_exact, greedy_max_tiling, Graph, GraphError, Pattern, VertexSet};

fn k(r: usize) -> Pattern {
    Pattern::clique(r).unwrap()
}

#[test]
fn parse_examples() {
    assert_eq!(Graph::parse("3 3\n0 1\n0 2\n1 2").unwrap(), Graph::complete(3));
    let e = Graph::parse("2 0").unwrap();
    assert_eq!((e.n(), e.edge_count()), (2, 0));
    let c4 = Graph::parse("4 4\n0 1\n1 2\n2 3\n3 0").unwrap();
    assert_eq!(c4.degrees(), vec![2, 2, 2, 2]);
}

#[test]
fn parse_errors_name_the_line() {
    for (text, line) in [("3 1\n0 x", 2), ("3 1\n0 3", 2), ("3 1\n1 1", 2), ("3 2\n0 1\n1 2 2", 3)] {
        match Graph::parse(text) {
            Err(GraphError::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
            other => panic!("{text:?}: expected a parse error, got {other:?}"),
        }
    }
}

#[test]
fn gnp_edge_count_band() {
    // mean 217.5, sd 10.4: the 4-sd band is [176, 259]
    for seed in 0..100 {
        let m = gnp(30, 0.5, seed).edge_count();
        assert!((176..=259).contains(&m), "seed {seed}: {m} edges");
    }
}

#[test]
fn multipartite_and_two_cliques() {
    let g = complete_multipartite(&[3, 4, 5]).unwrap();
    assert_eq!((g.n(), min_degree(&g).unwrap(), max_clique(&g)), (12, 7, 3));
    assert_eq!(hs_tripartite_sizes(12).unwrap(), [3, 4, 5]);
    let k66 = complete_multipartite(&[6, 6]).unwrap();
    assert_eq!(max_clique(&k66), 2);

    let tc = two_cliques(12).unwrap();
    assert_eq!(min_degree(&tc).unwrap(), 4);
    assert!(find_factor_exact(&tc, &k(3), 1_000_000).is_none());
    let small = two_cliques(4).unwrap();
    assert_eq!(small.degrees(), vec![0, 2, 2, 2]);
    assert!(two_cliques(7).is_err());
}

#[test]
fn gamma_examples() {
    let g2 = gamma(2, 40, 1).unwrap();
    assert!(max_clique(&g2.graph) <= 2);
    let g3 = gamma(3, 40, 1).unwrap();
    assert!(max_clique(&g3.graph) <= 3);
    let a = alpha_ell(&g3.graph, 3, u64::MAX).unwrap();
    assert!(a.exact && a.value < 40);
    assert!(gamma(1, 10, 0).is_err());
}

#[test]
fn lower_bound_examples() {
    let lb = lower_bound_construction(4, 2, 16, 3).unwrap();
    assert_eq!((lb.x, lb.y), (1, 2));
    assert_eq!(lb.part_sizes, vec![7, 9]);
    assert!(find_factor_exact(&lb.graph, &k(4), 10_000_000).is_none());
    assert!(!common::brute_factor_exists(&lb.graph, &k(4)));
    assert!(lower_bound_construction(3, 2, 12, 0).is_err());
    assert!(lower_bound_construction(4, 2, 18, 0).is_err());
}

#[test]
fn induced_subgraph_examples() {
    let (g, map) = Graph::complete(5).induced_subgraph(&VertexSet::new(vec![0, 1, 2], 5).unwrap()).unwrap();
    assert_eq!((g, map), (Graph::complete(3), vec![0, 1, 2]));
    let c4 = Graph::parse("4 4\n0 1\n1 2\n2 3\n3 0").unwrap();
    let (g, _) = c4.induced_subgraph(&VertexSet::new(vec![0, 2], 4).unwrap()).unwrap();
    assert_eq!(g.edge_count(), 0);
    let t = complete_multipartite(&[3, 4, 5]).unwrap();
    let (g, _) = t.induced_subgraph(&VertexSet::new(vec![3, 4, 5, 6], 12).unwrap()).unwrap();
    assert_eq!((g.n(), g.edge_count()), (4, 0));
}

fn small_graph() -> impl Strategy<Value = Graph> {
    (1usize..16, 0.0f64..1.0, any::<u64>()).prop_map(|(n, p, seed)| gnp(n, p, seed))
}

proptest! {
    #[test]
    fn edge_list_round_trip(g in small_graph()) {
        prop_assert_eq!(Graph::parse(&g.to_edge_list()).unwrap(), g);
    }

    #[test]
    fn gamma_is_clique_free(ell in 2usize..5, n in 6usize..36, seed in any::<u64>()) {
        let g = gamma(ell, n, seed).unwrap();
        prop_assert!(max_clique(&g.graph) <= ell);
    }

    #[test]
    fn multipartite_min_degree(sizes in prop::collection::vec(1usize..6, 1..5)) {
        let g = complete_multipartite(&sizes).unwrap();
        let n: usize = sizes.iter().sum();
        prop_assert_eq!(min_degree(&g).unwrap(), n - sizes.iter().max().unwrap());
    }

    #[test]
    fn greedy_leftover_is_h_free(g in small_graph(), r in 2usize..5, seed in any::<u64>()) {
        let t = greedy_max_tiling(&g, &k(r), &VertexSet::default(), seed);
        prop_assert!(tilinglab::verify_tiling(&g, &k(r), &t.tiling).is_ok());
        prop_assert_eq!(t.tiling.covered_count() + t.leftover.len(), g.n());
        let left = t.leftover.as_slice();
        let mut pick: Vec<usize> = (0..r).collect();
        if left.len() >= r {
            loop {
                let block: Vec<usize> = pick.iter().map(|&i| left[i]).collect();
                prop_assert!(!common::block_hosts(&g, &k(r), &block), "leftover contains {:?}", block);
                if !common::next_combination(&mut pick, left.len()) {
                    break;
                }
            }
        }
    }
}
