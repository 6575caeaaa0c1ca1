mod common;

use fxp_core::attribution::{characteristic_value, shap_all, shap_score, shapley_weight, ShapOptions};
use fxp_core::explain::{inflate, one_axp, one_cxp};
use fxp_core::format::{parse_model, print_model};
use fxp_core::model::{FeatureDecl, FeatureSpace, NodeBody, NodeSpec, Output, Task, ValueSet};
use fxp_core::rational::{int, ratio};
use fxp_core::semantics::{expected_value, expected_value_oracle};
use fxp_core::synth::{random_order, SynthParams};
use fxp_core::{enumerate_explanations, Error, FeatureSet, Problem, Rational, Similarity, TreeModel};
use num::{BigInt, One};
use proptest::prelude::*;

fn seeded(seed: u64) -> common::Instance {
    common::instance(&mut common::rng(seed), &SynthParams::default())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn paths_partition_the_space(seed in any::<u64>()) {
        let inst = seeded(seed);
        let p = inst.problem();
        for x in common::completions(&p, FeatureSet::EMPTY) {
            let hits: Vec<_> = inst.model.paths().iter().filter(|path| path.contains_point(&x)).collect();
            prop_assert_eq!(hits.len(), 1);
            prop_assert_eq!(&hits[0].output, inst.model.evaluate(&x).unwrap());
        }
    }

    #[test]
    fn model_files_round_trip(seed in any::<u64>()) {
        let inst = seeded(seed);
        let text = print_model(&inst.model);
        let back = parse_model(&text).unwrap();
        prop_assert!(back == inst.model);
        prop_assert_eq!(print_model(&back), text);
    }

    #[test]
    fn expected_value_matches_enumeration(seed in any::<u64>()) {
        let inst = seeded(seed);
        let p = inst.problem();
        for s in FeatureSet::all_subsets(p.m()) {
            let r = common::restriction(s, p.point());
            let brute = expected_value_oracle(p.model(), &r, common::CAP).unwrap();
            prop_assert_eq!(expected_value(p.model(), &r), brute.clone());
            prop_assert_eq!(brute, common::cf(&p, s));
        }
    }

    #[test]
    fn one_axp_uses_m_oracle_calls(seed in any::<u64>()) {
        let inst = seeded(seed);
        let p = inst.problem();
        let order = random_order(&mut common::rng(seed ^ 1), p.m());
        p.reset_oracle_calls();
        one_axp(&p, &order).unwrap();
        prop_assert_eq!(p.oracle_calls(), p.m());
    }

    #[test]
    fn explanations_hit_each_other(seed in any::<u64>()) {
        let inst = seeded(seed);
        let p = inst.problem();
        let state = enumerate_explanations(&p, None);
        prop_assert!(state.exhausted);
        for x in &state.axps {
            for y in &state.cxps {
                prop_assert!(x.intersects(*y), "AXp {} misses CXp {}", x, y);
            }
        }
        let union = |v: &[FeatureSet]| v.iter().fold(FeatureSet::EMPTY, |a, s| a.union(*s));
        prop_assert_eq!(union(&state.axps), union(&state.cxps));
    }

    #[test]
    fn limited_enumeration_is_a_prefix(seed in any::<u64>(), limit in 1usize..4) {
        let inst = seeded(seed);
        let p = inst.problem();
        let full = enumerate_explanations(&p, None);
        let part = enumerate_explanations(&p, Some(limit));
        prop_assert!(part.axps.iter().all(|x| full.axps.contains(x)));
        prop_assert!(part.cxps.iter().all(|y| full.cxps.contains(y)));
        let total = full.axps.len() + full.cxps.len();
        prop_assert_eq!(part.exhausted, limit >= total);
    }

    #[test]
    fn cxp_order_and_infeasibility(seed in any::<u64>()) {
        let inst = seeded(seed);
        let p = inst.problem();
        let order = random_order(&mut common::rng(!seed), p.m());
        match one_cxp(&p, &order) {
            Ok(y) => prop_assert!(common::cxps(&p).contains(&y.features)),
            Err(Error::NoCxp) => prop_assert!(common::cxps(&p).is_empty()),
            Err(e) => prop_assert!(false, "unexpected error {}", e),
        }
    }

    #[test]
    fn wcxp_witness_is_valid(seed in any::<u64>(), bits in any::<u64>()) {
        let inst = seeded(seed);
        let p = inst.problem();
        let free = FeatureSet::from_bits(bits & p.all().bits());
        match p.wcxp_witness(free) {
            Some(w) => {
                prop_assert!(common::wcxp(&p, free));
                prop_assert!(free.complement(p.m()).iter().all(|i| w.point[i] == p.point()[i]));
                prop_assert_eq!(inst.model.evaluate(&w.point).unwrap(), &w.output);
                prop_assert!(!p.similar(&w.point));
            }
            None => prop_assert!(!common::wcxp(&p, free)),
        }
    }

    #[test]
    fn inflation_is_sound_and_maximal(seed in any::<u64>()) {
        let inst = seeded(seed);
        let p = inst.problem();
        let axp = one_axp(&p, &(0..p.m()).collect::<Vec<_>>()).unwrap().features;
        let inflated = inflate(&p, axp, None).unwrap();
        let space = p.space();
        let covered = |lits: &[(usize, ValueSet)]| {
            common::completions(&p, FeatureSet::EMPTY)
                .into_iter()
                .filter(|x| lits.iter().all(|(i, set)| set.contains(x[*i])))
                .all(|x| p.similar(&x))
        };
        prop_assert!(covered(&inflated.literals));
        for (k, (i, set)) in inflated.literals.iter().enumerate() {
            prop_assert!(set.contains(p.point()[*i]));
            for u in (0..space.feature(*i).size()).filter(|&u| !set.contains(u)) {
                let mut wider = inflated.literals.clone();
                wider[k].1.insert(u);
                prop_assert!(!covered(&wider), "value {} could still be added to feature {}", u, i + 1);
            }
        }
        // An AXp is minimal, so no literal can swallow its whole domain.
        prop_assert!(inflated.removable.is_empty());
    }
}

#[test]
fn efficiency_on_random_models() {
    let mut rng = common::rng(500);
    for _ in 0..500 {
        let inst = common::instance(&mut rng, &SynthParams::default());
        let p = inst.problem();
        let report = shap_all(&p, ShapOptions::default()).expect("efficiency holds");
        let sum: Rational = report.scores.iter().sum();
        let tau = inst.model.evaluate(&inst.point).unwrap().numeric();
        assert_eq!(sum, tau - common::cf(&p, FeatureSet::EMPTY));
    }
}

#[test]
fn null_players_score_zero() {
    let mut rng = common::rng(77);
    let mut seen = 0;
    for _ in 0..200 {
        let inst = common::instance(&mut rng, &SynthParams::default());
        let p = inst.problem();
        let report = shap_all(&p, ShapOptions::default()).unwrap();
        for i in 0..p.m() {
            let null = FeatureSet::all_subsets(p.m())
                .filter(|s| !s.contains(i))
                .all(|s| characteristic_value(&p, s.with(i)) == characteristic_value(&p, s));
            if null {
                seen += 1;
                assert_eq!(report.scores[i], int(0));
            }
        }
    }
    assert!(seen > 0, "no null player was generated");
}

#[test]
fn single_feature_score_matches_memoized() {
    let mut rng = common::rng(91);
    for _ in 0..50 {
        let inst = common::instance(&mut rng, &SynthParams::default());
        let p = inst.problem();
        let report = shap_all(&p, ShapOptions::default()).unwrap();
        for i in 0..p.m() {
            assert_eq!(shap_score(&p, i, 20).unwrap(), report.scores[i]);
        }
    }
}

/// τ = x1 + x2 over {0,1,2}², plus a feature x3 the tree ignores.
fn symmetric_model() -> TreeModel {
    let space = FeatureSpace::new(vec![
        FeatureDecl::range("x1", 3).unwrap(),
        FeatureDecl::range("x2", 3).unwrap(),
        FeatureDecl::range("x3", 2).unwrap(),
    ])
    .unwrap();
    let mut specs = vec![NodeSpec {
        id: 1,
        body: NodeBody::Internal { feature: 0, edges: (0..3).map(|a| (ValueSet::singleton(a), 10 + a as i64)).collect() },
    }];
    for a in 0..3 {
        let edges = (0..3).map(|b| (ValueSet::singleton(b), 100 + 10 * a as i64 + b as i64)).collect();
        specs.push(NodeSpec { id: 10 + a as i64, body: NodeBody::Internal { feature: 1, edges } });
        for b in 0..3 {
            let out = Output::Value(int((a + b) as i64));
            specs.push(NodeSpec { id: 100 + 10 * a as i64 + b as i64, body: NodeBody::Leaf(out) });
        }
    }
    TreeModel::new(space, Task::Regression, 1, specs).unwrap()
}

#[test]
fn symmetric_features_swap_scores() {
    let model = symmetric_model();
    let sim = Similarity::threshold(ratio(1, 2), false);
    for (a, b, c) in [(2, 0, 1), (1, 2, 0), (0, 1, 1)] {
        let p = Problem::from_point(&model, vec![a, b, c], sim.clone()).unwrap();
        let q = Problem::from_point(&model, vec![b, a, c], sim.clone()).unwrap();
        let sp = shap_all(&p, ShapOptions::default()).unwrap().scores;
        let sq = shap_all(&q, ShapOptions::default()).unwrap().scores;
        assert_eq!((&sp[0], &sp[1]), (&sq[1], &sq[0]));
        assert_eq!(sp[2], int(0));
        // Additive model: each score is the deviation from the feature mean.
        assert_eq!(sp[0], int(a as i64) - int(1));
    }
}

#[test]
fn weights_normalize() {
    for m in 1..=20usize {
        let mut total = Rational::from_integer(BigInt::from(0));
        let mut binom = BigInt::one();
        for k in 0..m {
            total += Rational::from_integer(binom.clone()) * shapley_weight(m, k);
            binom = binom * BigInt::from(m - 1 - k) / BigInt::from(k + 1);
        }
        assert_eq!(total, int(1), "m = {m}");
    }
}

#[test]
fn duality_on_larger_domains() {
    let mut rng = common::rng(4242);
    let params = SynthParams { max_features: 7, max_domain: 4, max_depth: 6, max_points: 5_000, ..Default::default() };
    for _ in 0..60 {
        let inst = common::instance(&mut rng, &params);
        let p = inst.problem();
        let state = enumerate_explanations(&p, None);
        let mut axps = state.axps.clone();
        axps.sort_by(fxp_core::features::canonical_cmp);
        assert_eq!(axps, common::axps(&p));
        assert_eq!(fxp_core::minimal_hitting_sets(&state.cxps, p.all()).unwrap(), axps);
    }
}
