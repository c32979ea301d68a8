mod common;

use common::*;
use homlab::decon::{decomp_from_treedepth_witness, self_deconstruction, Deconstruction, Mode};
use homlab::folog::{eval_interpretation, qrank, Formula};
use homlab::graphlib::{dfs_forest, generate, Graph};
use homlab::reduce::*;
use homlab::relstruct::{core, gaifman, hom_exists, is_core, pair, star_expand, Structure, Vocabulary};
use homlab::{Budget, Error, Limits};
use proptest::prelude::*;
use rand::Rng;

fn hom(a: &Structure, b: &Structure) -> bool {
    hom_exists(a, b, Budget::default()).unwrap()
}

fn answer(r: &ReductionReport) -> bool {
    r.target().is_some_and(|t| hom(r.source(), t))
}

fn outputs_validate(r: &ReductionReport) {
    assert!(r.source().validate().is_empty());
    if let Some(t) = r.target() {
        assert!(t.validate().is_empty());
    }
}

fn starred_target(rng: &mut impl Rng, g: &Structure) -> Structure {
    let m = rng.gen_range(1..=3);
    random_structure(rng, m, &star_vocabulary(g), 0.6)
}

#[test]
fn deconstruction_reduction_agrees_with_brute_force() {
    let mut rng = rng(11);
    let limits = Limits::default();
    for case in 0..60 {
        let n = rng.gen_range(1..=4);
        let g = random_graph(&mut rng, n, 0.5);
        let (d, kind) = random_deconstruction(&mut rng, &g);
        let d = if case % 5 == 0 { with_empty_component(&mut rng, &d) } else { d };
        let b = starred_target(&mut rng, g.as_structure());
        let r = decon_hom_reduction(&g, &d, &b, &limits).unwrap();
        outputs_validate(&r);
        let lhs = brute_hom(&star_expand(g.as_structure()).unwrap(), &b);
        assert_eq!(lhs, answer(&r), "case {case} ({kind}): {g:?}");
    }
}

#[test]
fn mixed_empty_bags_are_rejected() {
    let k2 = generate::complete(2).unwrap();
    let host = Graph::from_edges(["a", "b", "c"], [("a", "b"), ("b", "c")]).unwrap();
    let d = Deconstruction::new(k2.clone(), host, vec![vec![0], vec![0, 1], vec![]], Mode::Deconstruction).unwrap();
    let b = star_expand(k2.as_structure()).unwrap();
    let err = decon_hom_reduction(&k2, &d, &b, &Limits::default()).unwrap_err();
    assert!(matches!(err, Error::Precondition(_)), "{err}");
}

#[test]
fn decomposition_reduction_on_paths() {
    let mut rng = rng(12);
    let limits = Limits::default();
    for n in 2..=5 {
        let p = generate::path(n).unwrap();
        let a = p.to_structure();
        let t = dfs_forest(&p);
        let d = decomp_from_treedepth_witness(&p, &t).unwrap();
        for _ in 0..6 {
            let b = starred_target(&mut rng, &a);
            let r = decomp_hom_reduction(&a, &d, &b, &limits).unwrap();
            assert_eq!(brute_hom(&star_expand(&a).unwrap(), &b), answer(&r));
        }
    }
}

#[test]
fn decomposition_requires_covering_bags() {
    let mut sb = homlab::relstruct::StructureBuilder::new(Vocabulary::new().with("R", 3));
    let ids: Vec<_> = ["x", "y", "z"].iter().map(|n| sb.element(*n)).collect();
    sb.tuple("R", &ids).unwrap();
    let a = sb.finish().unwrap();
    // A path host whose bags cover the Gaifman edges pairwise but not the triple.
    let host = Graph::from_edges(["1", "2", "3"], [("1", "2"), ("2", "3")]).unwrap();
    let d = Deconstruction::new(gaifman(&a), host, vec![vec![0, 1], vec![1, 2], vec![0, 2]], Mode::Decomposition);
    let b = star_expand(&a).unwrap();
    assert!(d.and_then(|d| decomp_hom_reduction(&a, &d, &b, &Limits::default())).is_err());
}

#[test]
fn product_color_and_incidence_agree_with_brute_force() {
    let mut rng = rng(13);
    let limits = Limits::default();
    let vocab = Vocabulary::new().with("E", 2).with("U", 1);
    let mut cores = 0;
    while cores < 40 {
        let n = rng.gen_range(1..=4);
        let a = random_structure(&mut rng, n, &vocab, 0.4);
        let n = rng.gen_range(1..=3);
        let b = random_structure(&mut rng, n, &vocab, 0.5);
        let expected = brute_hom(&a, &b);

        let c = color_trivialize(&a, &b, &limits).unwrap();
        outputs_validate(&c);
        assert_eq!(expected, answer(&c));
        let i = incidence_reduction(&a, &b, &limits).unwrap();
        outputs_validate(&i);
        assert_eq!(expected, answer(&i));

        if is_core(&a, &limits).unwrap() {
            cores += 1;
            let bs = starred_target(&mut rng, &a);
            let p = product_reduction(&a, &bs, &limits).unwrap();
            assert_eq!(brute_hom(&star_expand(&a).unwrap(), &bs), answer(&p));
        }
    }
}

#[test]
fn corollary_chain() {
    let mut rng = rng(14);
    let limits = Limits::default();
    let vocab = Vocabulary::graph();
    for _ in 0..30 {
        let n = rng.gen_range(1..=4);
        let a = random_structure(&mut rng, n, &vocab, 0.4);
        let n = rng.gen_range(1..=3);
        let b = random_structure(&mut rng, n, &vocab, 0.5);
        let first = color_trivialize(&a, &b, &limits).unwrap();
        let c = core(&a, &limits).unwrap();
        let second = product_reduction(&c, first.target().unwrap(), &limits).unwrap();
        let direct = brute_hom(&a, &b);
        assert_eq!(direct, answer(&first));
        assert_eq!(direct, answer(&second));
    }
}

#[test]
fn pipeline_preserves_truth() {
    let mut rng = rng(15);
    let limits = Limits::default();
    let vocab = Vocabulary::new().with("E", 2).with("C", 1);
    for case in 0..100 {
        let n = rng.gen_range(1..=3);
        let f = random_sentence(&mut rng, n, 2);
        let n = rng.gen_range(1..=3);
        let b = random_structure(&mut rng, n, &vocab, 0.5);
        let (forest, r) = mc_to_hom_pipeline(&b, &f, 2, &limits).unwrap();
        assert_eq!(brute_models(&b, &f), answer(&r), "case {case}: {f}");
        assert!(forest.height() < qrank(&f).max(1), "case {case}: {f}");
    }
}

#[test]
fn single_tree_disjunct_gives_that_tree() {
    let f: Formula = "(exists x (exists y (and (atom E x y) (exists z (atom E y z)))))".parse().unwrap();
    let b = generate::complete(2).unwrap().to_structure();
    let (forest, r) = dpp_to_hom(&b, &f, &Limits::default()).unwrap();
    assert_eq!(forest.len(), 3);
    assert_eq!(forest.height(), 2);
    assert!(answer(&r));
}

#[test]
fn interpretation_matches_direct_output() {
    let mut rng = rng(16);
    let limits = Limits::default();
    let mut checked = 0;
    while checked < 10 {
        let n = rng.gen_range(1..=3);
        let g = random_graph(&mut rng, n, 0.6);
        let d = if rng.gen_bool(0.5) {
            self_deconstruction(&g)
        } else {
            random_deconstruction(&mut rng, &g).0
        };
        if d.bags().iter().any(Vec::is_empty) || d.max_bag() > 2 {
            continue;
        }
        let n = rng.gen_range(1..=2);
        let b = random_structure(&mut rng, n, &star_vocabulary(g.as_structure()), 0.6);
        let (aux, i) = deconstruction_interpretation(&g, &d).unwrap();
        assert_eq!(i.dimension, 2 * d.max_bag());
        let via = eval_interpretation(&i, &pair(&aux, &b).unwrap(), &limits).unwrap();
        let direct = decon_hom_reduction(&g, &d, &b, &limits).unwrap();
        let direct = direct.target().unwrap();
        match via {
            Some(v) => assert!(brute_isomorphic(&v, direct)),
            None => assert_eq!(direct.universe(), [INERT_VERTEX.to_string()]),
        }
        checked += 1;
    }
}

#[test]
fn reports_are_deterministic_and_serialize() {
    let k3 = generate::complete(3).unwrap();
    let d = self_deconstruction(&k3);
    let b = star_expand(k3.as_structure()).unwrap();
    let l = Limits::default();
    let r1 = decon_hom_reduction(&k3, &d, &b, &l).unwrap();
    let r2 = decon_hom_reduction(&k3, &d, &b, &l).unwrap();
    assert_eq!(r1.to_json(), r2.to_json());
    let v: serde_json::Value = serde_json::from_str(&r1.to_json()).unwrap();
    let target = Structure::from_json(&v["output"]["target"].to_string()).unwrap();
    assert_eq!(&target, r1.target().unwrap());
    assert_eq!(v["input_digest"].as_str().unwrap().len(), 64);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn self_deconstruction_reduction_is_exact(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let n = rng.gen_range(1..=4);
        let g = random_graph(&mut rng, n, 0.5);
        let b = starred_target(&mut rng, g.as_structure());
        let r = decon_hom_reduction(&g, &self_deconstruction(&g), &b, &Limits::default()).unwrap();
        prop_assert_eq!(brute_hom(&star_expand(g.as_structure()).unwrap(), &b), answer(&r));
    }

    #[test]
    fn incidence_reduction_is_exact_with_ternary_symbols(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let vocab = Vocabulary::new().with("R", 3).with("E", 2);
        let n = rng.gen_range(1..=3);
        let a = random_structure(&mut rng, n, &vocab, 0.15);
        let n = rng.gen_range(1..=3);
        let b = random_structure(&mut rng, n, &vocab, 0.4);
        let r = incidence_reduction(&a, &b, &Limits::default()).unwrap();
        prop_assert_eq!(brute_hom(&a, &b), answer(&r));
    }
}
