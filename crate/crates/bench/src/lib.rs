//! Seeded workloads shared by the benchmarks.

use fxp_core::synth::{random_model, random_point, random_similarity, SynthParams};
use fxp_core::{Problem, Similarity, TreeModel};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub struct Workload {
    pub model: TreeModel,
    pub point: Vec<usize>,
    pub similarity: Similarity,
}

impl Workload {
    pub fn problem(&self) -> Problem<'_> {
        Problem::from_point(&self.model, self.point.clone(), self.similarity.clone()).expect("generated problems are valid")
    }
}

/// A random tree over exactly `features` features with domains of size up to 3.
pub fn workload(features: usize, depth: usize, seed: u64) -> Workload {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let params = SynthParams {
        min_features: features,
        max_features: features,
        max_domain: 3,
        max_depth: depth,
        max_points: u128::MAX,
        classification: 0.0,
    };
    let model = random_model(&mut rng, &params);
    let point = random_point(&mut rng, model.space());
    let similarity = random_similarity(&mut rng, model.task());
    Workload { model, point, similarity }
}

/// Workloads of increasing width, each with the tree depth it is generated at.
pub fn ladder(widths: &[usize], seed: u64) -> Vec<(usize, Workload)> {
    widths.iter().map(|&m| (m, workload(m, m.min(8), seed ^ m as u64))).collect()
}
