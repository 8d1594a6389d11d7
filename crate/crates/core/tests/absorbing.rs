use fixedbitset::FixedBitSet;
use rand::seq::SliceRandom;

use tilinglab::absorbing::{
    absorb, absorb_capacity, build_absorbing_set, build_template, is_st_absorber, valid_remainder_sizes,
    verify_absorber, verify_structure, AbsorbError, AbsorberConfig, AbsorbingStructure, CliqueAbsorbers, FamilyBuilder,
    GeneralAbsorbers, TemplateGraph, TemplateMode, TemplateVerify,
};
use tilinglab::generate::{complete_multipartite, gnp, two_cliques};
use tilinglab::hypotheses::check_clique;
use tilinglab::pipeline::{Mode, PipelineConfig};
use tilinglab::{verify_factor, Graph, Pattern, VertexSet};

fn k(r: usize) -> Pattern {
    Pattern::clique(r).unwrap()
}

fn set(vs: &[usize]) -> VertexSet {
    VertexSet::collect_from(vs.iter().copied())
}

fn none(n: usize) -> FixedBitSet {
    FixedBitSet::with_capacity(n)
}

#[test]
fn template_examples() {
    let (t, cert) =
        build_template(4, 0.25, TemplateMode::CompleteBipartite, TemplateVerify::Exhaustive { cap: 100 }, 1).unwrap();
    assert_eq!((t.x_len(), t.y_len(), t.z_len()), (5, 8, 12));
    assert_eq!(cert.subsets_checked, 5);

    for mode in [TemplateMode::CompleteBipartite, TemplateMode::Staircase] {
        let (t, _) = build_template(1, 0.5, mode, TemplateVerify::Exhaustive { cap: 100 }, 1).unwrap();
        assert_eq!((t.z_len(), t.y_len() + 1), (3, 3));
    }

    assert!(
        build_template(10, 1.0, TemplateMode::CompleteBipartite, TemplateVerify::Exhaustive { cap: 10 }, 1).is_err()
    );
}

#[test]
fn staircase_templates_are_robust() {
    for m in 1..=6 {
        for beta in [0.2, 0.5, 1.0, 2.0] {
            let (t, _) =
                build_template(m, beta, TemplateMode::Staircase, TemplateVerify::Exhaustive { cap: 100_000 }, 1)
                    .unwrap();
            assert!(t.max_degree() <= 40);
        }
    }
}

#[test]
fn random_template_fixture_passes_its_recorded_check() {
    let t: TemplateGraph = serde_json::from_str(include_str!("fixtures/template_random_m50.json")).unwrap();
    assert_eq!(t.mode, TemplateMode::RandomRegular { seed: 2 });
    assert_eq!(t.verify(TemplateVerify::Sampled { trials: 1000, seed: 3 }).unwrap(), 1000);
    let (rebuilt, _) = build_template(50, 0.1, t.mode, TemplateVerify::Sampled { trials: 1000, seed: 2 }, 20).unwrap();
    assert_eq!(rebuilt, t);
}

#[test]
fn falsified_template_carries_the_subset() {
    let mut t: TemplateGraph = serde_json::from_str(include_str!("fixtures/template_random_m50.json")).unwrap();
    // cut every edge at Z_0, so no X' can be matched
    t.edges.retain(|&(_, r)| r != 0);
    assert!(matches!(
        t.verify(TemplateVerify::Sampled { trials: 10, seed: 0 }),
        Err(AbsorbError::TemplateFalsified { .. })
    ));
}

#[test]
fn st_absorber_ignores_enumeration_order() {
    let g = gnp(14, 0.7, 3);
    let p = k(3);
    for (s, a) in [(vec![0, 1, 2], vec![3, 4, 5, 6, 7, 8]), (vec![9, 2, 5], vec![13, 0, 7, 1, 11, 4])] {
        let base = is_st_absorber(&g, &p, &set(&s), &set(&a), 2, 100_000).unwrap();
        let mut s2 = s.clone();
        s2.reverse();
        let mut a2 = a.clone();
        a2.rotate_left(2);
        assert_eq!(is_st_absorber(&g, &p, &set(&s2), &set(&a2), 2, 100_000).unwrap(), base);
    }
}

#[test]
fn general_family_on_random_graph() {
    let g = gnp(90, 0.6, 5);
    let p = k(3);
    let mut order: Vec<usize> = (0..90).collect();
    order.shuffle(&mut tilinglab::seed::rng(5));
    let s = set(&order[..3]);
    // the default slice size epsilon n / 2h leaves too few designated vertices for five absorbers
    let b = GeneralAbsorbers { nbhd_size: Some(24), ..GeneralAbsorbers::new(p.clone(), 0.5) };
    let found = b.build(&g, &s, &none(90), 5, 5).unwrap();
    assert_eq!(found.len(), 5);
    for (i, a) in found.iter().enumerate() {
        assert_eq!(a.t, 3);
        verify_absorber(&g, &p, a).unwrap();
        assert!(is_st_absorber(&g, &p, &s, &a.set, 3, 1_000_000).unwrap());
        for other in &found[i + 1..] {
            assert!(a.set.is_disjoint(&other.set));
        }
    }
}

#[test]
fn clique_family_stays_inside_one_clique() {
    let g = two_cliques(40).unwrap();
    let b = CliqueAbsorbers::new(3, 2).unwrap();
    let s = set(&[20, 25, 30]);
    let found = b.build(&g, &s, &none(40), 1, 3).unwrap();
    assert_eq!(found.len(), 1);
    assert!(found[0].set.iter().all(|v| v >= 19));
    verify_absorber(&g, &b.pattern, &found[0]).unwrap();
}

#[test]
fn clique_family_fails_on_unbalanced_tripartite() {
    let g = complete_multipartite(&[13, 13, 14]).unwrap();
    let check = check_clique(&g, 3, 2, 0.1, 0.1, 1_000_000).unwrap();
    assert!(check.violated());
    let b = CliqueAbsorbers::new(3, 2).unwrap().with_hypotheses(&check);
    assert!(!b.warnings.is_empty());
    assert!(b.build(&g, &set(&[0, 1, 2]), &none(40), 1, 0).is_err());
}

fn desk_k2() -> (Graph, FamilyBuilder, AbsorberConfig) {
    let g = Graph::complete(60);
    let b = FamilyBuilder::General(GeneralAbsorbers::new(k(2), 0.2));
    let c = AbsorberConfig::desk(2, 2, 0.2, 0.06, 2.0).unwrap();
    (g, b, c)
}

#[test]
fn k60_structure_verifies_from_its_json() {
    let (g, b, c) = desk_k2();
    let st = build_absorbing_set(&g, &b, &c, 1).unwrap();
    let text = st.to_json();
    let back = AbsorbingStructure::from_json(&text).unwrap();
    verify_structure(&g, &back).unwrap();
    assert!(back.ledger.a == back.a.len() && back.a.len() <= 60);

    let pattern = back.pattern().unwrap();
    let outside: Vec<usize> = (0..60).filter(|&v| !back.a.contains(v)).collect();
    assert_eq!(back.a.len() % 2, 0);
    let empty = absorb(&g, &pattern, &back, &VertexSet::default()).unwrap();
    verify_factor(&g, &pattern, &empty, &back.a).unwrap();
    let r = set(&outside[3..5]);
    let t = absorb(&g, &pattern, &back, &r).unwrap();
    verify_factor(&g, &pattern, &t, &back.a.union(&r)).unwrap();
    let too_many = set(&outside[..absorb_capacity(&back) + 2]);
    assert!(matches!(absorb(&g, &pattern, &back, &too_many), Err(AbsorbError::RemainderTooLarge { .. })));
    assert!(matches!(absorb(&g, &pattern, &back, &set(&outside[..1])), Err(AbsorbError::Divisibility { .. })));
    assert!(absorb(&g, &pattern, &back, &set(&[back.a.as_slice()[0]])).is_err());
}

#[test]
fn bipartite_host_fails_in_stage_one() {
    let g = complete_multipartite(&[6, 6]).unwrap();
    let b = FamilyBuilder::General(GeneralAbsorbers::new(k(3), 0.5));
    let c = AbsorberConfig::desk(3, 3, 0.2, 0.06, 5.0).unwrap();
    match build_absorbing_set(&g, &b, &c, 0) {
        Err(e) => assert!(e.to_string().contains("copy-families") || matches!(e, AbsorbError::Shortfall { .. }), "{e}"),
        Ok(_) => panic!("K_6,6 has no triangles"),
    }
}

#[test]
fn paper_constants_are_empty_at_desk_scale() {
    let g = gnp(120, 0.7, 4);
    let c = AbsorberConfig::paper(3, 3, 0.2).unwrap();
    assert!(!c.overrides);
    assert!((c.xi - c.beta / 2.0).abs() < 1e-15);
    let b = FamilyBuilder::Clique(CliqueAbsorbers::new(3, 2).unwrap());
    match build_absorbing_set(&g, &b, &c, 0) {
        Ok(st) => assert!(st.ledger.within_gamma_n),
        Err(e) => assert!(!e.to_string().is_empty()),
    }
}

#[test]
fn k3_structure_on_random_graph() {
    let g = gnp(120, 0.7, 4);
    let p = k(3);
    let config = PipelineConfig::desk(&p, Mode::Clique { r: 3, ell: 2 }).unwrap();
    let check = check_clique(&g, 3, 2, 0.1, 0.1, 2_000_000).unwrap();
    let b = FamilyBuilder::Clique(CliqueAbsorbers::new(3, 2).unwrap().with_hypotheses(&check));
    let st = build_absorbing_set(&g, &b, &config.absorber, 2).unwrap();
    verify_structure(&g, &st).unwrap();
    assert!(st.config.overrides);
    assert_eq!(st.z_parts.len(), st.z.len() / 2);
    let sizes = valid_remainder_sizes(&st);
    assert!(!sizes.is_empty());
    let outside: Vec<usize> = (0..120).filter(|&v| !st.a.contains(v)).collect();
    for &s in &sizes {
        for start in 0..outside.len() - s {
            let r = set(&outside[start..start + s]);
            let t = absorb(&g, &p, &st, &r).unwrap();
            verify_factor(&g, &p, &t, &st.a.union(&r)).unwrap();
        }
    }
}
