mod common;

use rand::Rng;

use tilinglab::exact::find_traversing_copy;
use tilinglab::generate::{complete_multipartite, gnp};
use tilinglab::invariants::{
    alpha_ell, alpha_star_check, alpha_star_upper, d_h, max_clique, min_degree, verify_alpha_star_witness,
    AlphaStarMode, AlphaStarResult,
};
use tilinglab::{find_factor_exact, greedy_max_tiling, verify_factor, FactorOutcome, Graph, Pattern, VertexSet};

const EXHAUSTIVE: AlphaStarMode = AlphaStarMode::Exhaustive { cap: 10_000_000 };

fn k(r: usize) -> Pattern {
    Pattern::clique(r).unwrap()
}

fn pattern(edges: &[(usize, usize)], n: usize) -> Pattern {
    Pattern::general(Graph::from_edges(n, edges.iter().copied()).unwrap()).unwrap()
}

fn c(n: usize) -> Graph {
    Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
}

#[test]
fn perfect_matching_agrees_with_blossom() {
    let k2 = k(2);
    let mut positives = 0;
    for seed in 0..200u64 {
        let mut rng = tilinglab::seed::rng(seed ^ 0xb1055);
        let n = 2 * rng.gen_range(1..=20);
        // around the connectivity threshold, where both answers occur
        let p = rng.gen_range(0.5..2.5) * (n as f64).ln() / n as f64;
        let g = gnp(n, p.min(1.0), seed);
        let expected = common::blossom_matching(&g) * 2 == n;
        let got = find_factor_exact(&g, &k2, 200_000_000);
        match &got.outcome {
            FactorOutcome::Factor { tiling } => {
                assert!(expected, "seed {seed}: solver found a matching the oracle rules out");
                verify_factor(&g, &k2, tiling, &VertexSet::all(n)).unwrap();
            }
            FactorOutcome::NoFactor => assert!(!expected, "seed {seed}: solver missed a perfect matching"),
            FactorOutcome::BudgetExhausted => panic!("seed {seed}: budget exhausted at n = {n}"),
        }
        positives += usize::from(expected);
    }
    assert!(positives > 20 && positives < 180, "{positives} positives");
}

#[test]
fn general_patterns_agree_with_partition_enumeration() {
    let patterns = [
        pattern(&[(0, 1), (1, 2)], 3),
        pattern(&[(0, 1), (1, 2), (2, 3), (0, 3)], 4),
        pattern(&[(0, 1), (0, 2), (0, 3)], 4),
        pattern(&[(0, 1), (1, 2), (2, 3)], 4),
    ];
    for seed in 0..300u64 {
        let p = &patterns[seed as usize % patterns.len()];
        let n = [p.h(), 2 * p.h()][(seed / 4) as usize % 2].min(8);
        let g = gnp(n, 0.3 + (seed % 7) as f64 * 0.1, seed);
        let expected = common::brute_factor_exists(&g, p);
        let got = find_factor_exact(&g, p, 10_000_000);
        assert_eq!(got.is_factor(), expected, "seed {seed}, {}", p.name());
        assert!(got.is_factor() || got.is_none());
    }
}

#[test]
fn exact_examples() {
    let t = find_factor_exact(&Graph::complete(6), &k(3), 1_000).into_tiling().unwrap();
    assert_eq!(t.len(), 2);
    assert!(find_factor_exact(&complete_multipartite(&[3, 4, 5]).unwrap(), &k(3), 1_000_000).is_none());
    let m = find_factor_exact(&c(4), &k(2), 1_000).into_tiling().unwrap();
    assert_eq!(m.len(), 2);
}

#[test]
fn greedy_examples() {
    let empty = VertexSet::default();
    let t = greedy_max_tiling(&Graph::complete(9), &k(3), &empty, 0);
    assert_eq!((t.tiling.len(), t.leftover.len()), (3, 0));
    let k66 = complete_multipartite(&[6, 6]).unwrap();
    let t = greedy_max_tiling(&k66, &k(3), &empty, 0);
    assert_eq!((t.tiling.len(), t.leftover.len()), (0, 12));
}

#[test]
fn greedy_leftover_below_h_times_alpha_star() {
    let mode = AlphaStarMode::Sampled { trials: 300, seed: 1 };
    for seed in 0..10 {
        let g = gnp(60, 0.5, seed);
        let s = alpha_star_upper(&g, &k(3), mode).unwrap().value.unwrap();
        let t = greedy_max_tiling(&g, &k(3), &VertexSet::default(), seed);
        assert!(t.leftover.len() < 3 * s, "seed {seed}: leftover {} with s* = {s}", t.leftover.len());
    }
}

#[test]
fn traversing_copy_examples() {
    let singles: Vec<VertexSet> = [2, 5, 7].iter().map(|&v| VertexSet::new(vec![v], 9).unwrap()).collect();
    let copy = find_traversing_copy(&Graph::complete(9), &k(3), &singles).unwrap().unwrap();
    assert_eq!(copy, vec![2, 5, 7]);
    let k66 = complete_multipartite(&[6, 6]).unwrap();
    let parts: Vec<VertexSet> =
        [vec![0, 6], vec![1, 7], vec![2, 8]].into_iter().map(|p| VertexSet::new(p, 12).unwrap()).collect();
    assert_eq!(find_traversing_copy(&k66, &k(3), &parts).unwrap(), None);
    let t = complete_multipartite(&[4, 4, 4]).unwrap();
    let parts: Vec<VertexSet> = (0..3).map(|i| VertexSet::new((4 * i..4 * i + 4).collect(), 12).unwrap()).collect();
    let copy = find_traversing_copy(&t, &k(3), &parts).unwrap().unwrap();
    assert!(t.is_clique(&copy));
    let overlap = [
        VertexSet::new(vec![0, 1], 12).unwrap(),
        VertexSet::new(vec![1, 2], 12).unwrap(),
        VertexSet::new(vec![3], 12).unwrap(),
    ];
    assert!(find_traversing_copy(&t, &k(3), &overlap).is_err());
}

#[test]
fn invariant_examples() {
    assert_eq!(min_degree(&Graph::complete(4)).unwrap(), 3);
    assert_eq!(min_degree(&complete_multipartite(&[3, 4, 5]).unwrap()).unwrap(), 7);
    assert_eq!(min_degree(&Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap()).unwrap(), 1);
    assert_eq!(alpha_ell(&Graph::complete(7), 2, 1_000).unwrap().value, 1);
    assert_eq!(alpha_ell(&complete_multipartite(&[6, 6]).unwrap(), 3, 100_000).unwrap().value, 12);
    assert_eq!(alpha_ell(&c(5), 2, 1_000).unwrap().value, 2);
    assert_eq!((max_clique(&Graph::complete(5)), max_clique(&c(5))), (5, 2));
    assert_eq!(*d_h(&k(2)).numer(), 1);
    assert_eq!(common::brute_density(&k(3)), (3, 2));
}

#[test]
fn alpha_ell_agrees_with_subset_enumeration() {
    for seed in 0..150u64 {
        let n = 4 + (seed % 9) as usize;
        let g = gnp(n, 0.2 + (seed % 5) as f64 * 0.15, seed);
        for ell in 2..=4 {
            let a = alpha_ell(&g, ell, u64::MAX).unwrap();
            assert_eq!(a.value, common::brute_alpha_ell(&g, ell), "seed {seed}, ell {ell}");
            assert_eq!(a.witness.len(), a.value);
            assert!(tilinglab::invariants::is_k_free(&g, ell, &a.witness.to_bitset(n)));
        }
    }
}

#[test]
fn alpha_star_examples() {
    assert!(alpha_star_check(&Graph::complete(9), &k(3), 1, EXHAUSTIVE).unwrap().holds());
    assert_eq!(alpha_star_upper(&Graph::complete(9), &k(3), EXHAUSTIVE).unwrap().value, Some(1));
    let k66 = complete_multipartite(&[6, 6]).unwrap();
    let v = alpha_star_check(&k66, &k(3), 4, EXHAUSTIVE).unwrap();
    match &v.result {
        AlphaStarResult::Fails { witness } => verify_alpha_star_witness(&k66, &k(3), 4, witness).unwrap(),
        AlphaStarResult::Holds => panic!("K_6,6 has no triangle"),
    }
    assert_eq!(alpha_star_upper(&k66, &k(3), EXHAUSTIVE).unwrap().value, None);
    let g = gnp(60, 0.5, 3);
    assert!(alpha_star_check(&g, &k(3), 6, AlphaStarMode::Sampled { trials: 500, seed: 9 }).unwrap().holds());
}

#[test]
fn alpha_star_multipartite_is_three() {
    // Three 2-sets can sit inside two parts; three 3-sets cannot.
    let t = complete_multipartite(&[4, 4, 4]).unwrap();
    let est = alpha_star_upper(&t, &k(3), EXHAUSTIVE).unwrap();
    assert_eq!(est.value, Some(3));
    assert_eq!(common::brute_alpha_star_clique(&t, 3), Some(3));
}

#[test]
fn alpha_star_agrees_with_brute_force() {
    for seed in 0..40u64 {
        let n = 6 + (seed % 4) as usize;
        let g = gnp(n, 0.4 + (seed % 3) as f64 * 0.2, seed);
        for r in [2, 3] {
            let est = alpha_star_upper(&g, &k(r), EXHAUSTIVE).unwrap();
            assert!(est.exact);
            assert_eq!(est.value, common::brute_alpha_star_clique(&g, r), "seed {seed}, K{r}");
        }
    }
}
