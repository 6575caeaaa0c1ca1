//! The JSON files under `fixtures/` parse and give the documented answers.

use std::path::PathBuf;

use fxp_core::format::{parse_instance, parse_model};
use fxp_core::{enumerate_explanations, AdversarialQuery, Epsilon, Error, FeatureSet, ModelError, Norm, Problem, Similarity};
use fxp_core::rational::{int, ratio};

fn read(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "fixtures", name].iter().collect();
    std::fs::read_to_string(p).unwrap()
}

#[test]
fn running_example_instances() {
    let model = parse_model(&read("running_example.json")).unwrap();
    assert!(model == fxp_core::fixtures::running_example());
    let v112 = parse_instance(&read("v112.json"), &model).unwrap();
    assert_eq!(v112.point, vec![1, 1, 2]);
    assert_eq!(v112.output.numeric(), ratio(1, 2));
    let v010 = parse_instance(&read("v010.json"), &model).unwrap();
    assert_eq!(v010.output.numeric(), int(0));

    let p = Problem::new(&model, v010, Similarity::threshold(int(0), false)).unwrap();
    let q = AdversarialQuery { norm: Norm::L1, eps: Epsilon::Unbounded, fixed: FeatureSet::from_ids([1, 2]) };
    let w = p.find_adversarial_example(&q).unwrap();
    assert_eq!(w.point, vec![0, 1, 1]);
    assert_eq!(w.distance, int(1));
}

#[test]
fn bad_partition_names_the_invariant() {
    match parse_model(&read("bad_partition.json")) {
        Err(Error::Model(e @ ModelError::EdgesNotPartition { .. })) => assert_eq!(e.invariant(), "EdgesNotPartition"),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn loan_classifier() {
    let model = parse_model(&read("loan.json")).unwrap();
    let sample = parse_instance(&read("loan_applicant.json"), &model).unwrap();
    assert_eq!(model.render_output(&sample.output), "reject");
    let p = Problem::new(&model, sample, Similarity::ClassEquality).unwrap();
    let state = enumerate_explanations(&p, None);
    assert_eq!(state.axps, vec![FeatureSet::from_ids([2, 3])]);
    let mut cxps = state.cxps;
    cxps.sort();
    assert_eq!(cxps, vec![FeatureSet::from_ids([2]), FeatureSet::from_ids([3])]);
    // Categorical income moves at unit cost under l1.
    let q = AdversarialQuery { norm: Norm::L1, eps: Epsilon::Unbounded, fixed: FeatureSet::from_ids([1]) };
    let w = p.find_adversarial_example(&q).unwrap();
    assert_eq!(model.space().render_point(&w.point), "(mid,3,yes)");
}
