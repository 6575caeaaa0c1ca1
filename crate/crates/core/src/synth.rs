//! Random tree models and problems, for property tests and benchmarks.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::features::FeatureSet;
use crate::model::{FeatureDecl, FeatureSpace, NodeBody, NodeSpec, Output, Task, TreeModel, Value, ValueSet};
use crate::rational::{int, ratio, Rational};
use crate::semantics::Similarity;

#[derive(Clone, Debug)]
pub struct SynthParams {
    pub min_features: usize,
    pub max_features: usize,
    pub max_domain: usize,
    pub max_depth: usize,
    /// Upper bound on |𝔽|; feature counts shrink until it holds.
    pub max_points: u128,
    /// Probability of generating a classification model.
    pub classification: f64,
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams {
            min_features: 1,
            max_features: 6,
            max_domain: 3,
            max_depth: 5,
            max_points: 20_000,
            classification: 0.3,
        }
    }
}

fn leaf_pool() -> Vec<Rational> {
    vec![int(0), ratio(1, 2), int(1), ratio(3, 2), int(2), ratio(9, 4), ratio(9, 2), int(-1)]
}

fn random_space<R: Rng>(rng: &mut R, params: &SynthParams) -> FeatureSpace {
    loop {
        let m = rng.gen_range(params.min_features..=params.max_features);
        let decls: Vec<FeatureDecl> = (0..m)
            .map(|i| {
                let size = rng.gen_range(2..=params.max_domain.max(2));
                let name = format!("x{}", i + 1);
                if rng.gen_bool(0.25) {
                    let values = (0..size).map(|k| Value::Sym(format!("c{k}"))).collect();
                    FeatureDecl::new(name, values).expect("distinct symbols")
                } else {
                    // Ordinal values with uneven gaps exercise l1/l∞ distances.
                    let mut next = 0i64;
                    let values = (0..size)
                        .map(|_| {
                            let v = next;
                            next += rng.gen_range(1..=2);
                            Value::Int(v)
                        })
                        .collect();
                    FeatureDecl::new(name, values).expect("increasing integers")
                }
            })
            .collect();
        let space = FeatureSpace::new(decls).expect("nonempty, distinct names");
        if space.point_count().is_some_and(|n| n <= params.max_points) {
            return space;
        }
    }
}

struct Builder<'a, R> {
    rng: &'a mut R,
    space: &'a FeatureSpace,
    max_depth: usize,
    outputs: Vec<Output>,
    specs: Vec<NodeSpec>,
}

impl<R: Rng> Builder<'_, R> {
    fn node(&mut self, depth: usize, used: FeatureSet) -> i64 {
        let id = self.specs.len() as i64 + 1;
        let free: Vec<usize> = used.complement(self.space.len()).iter().collect();
        let stop = free.is_empty() || depth >= self.max_depth || (depth > 0 && self.rng.gen_bool(0.3));
        if stop {
            let output = self.outputs.choose(self.rng).expect("nonempty pool").clone();
            self.specs.push(NodeSpec { id, body: NodeBody::Leaf(output) });
            return id;
        }
        let feature = *free.choose(self.rng).expect("nonempty");
        let size = self.space.feature(feature).size();
        let mut values: Vec<usize> = (0..size).collect();
        values.shuffle(self.rng);
        let groups = self.rng.gen_range(2..=size);
        let mut sets = vec![ValueSet::empty(); groups];
        for (k, x) in values.into_iter().enumerate() {
            let g = if k < groups { k } else { self.rng.gen_range(0..groups) };
            sets[g].insert(x);
        }
        let slot = self.specs.len();
        self.specs.push(NodeSpec { id, body: NodeBody::Leaf(Output::Class(0)) });
        let edges = sets
            .into_iter()
            .map(|set| {
                let child = self.node(depth + 1, used.with(feature));
                (set, child)
            })
            .collect();
        self.specs[slot].body = NodeBody::Internal { feature, edges };
        id
    }
}

/// A random valid, non-constant tree. Features are never retested along a
/// branch, so every path literal equals one edge set.
pub fn random_model<R: Rng>(rng: &mut R, params: &SynthParams) -> TreeModel {
    loop {
        let space = random_space(rng, params);
        let (task, outputs) = if rng.gen_bool(params.classification) {
            let k = rng.gen_range(2..=3);
            let classes: Vec<String> = (0..k).map(|c| format!("k{c}")).collect();
            (Task::Classification { classes }, (0..k).map(Output::Class).collect())
        } else {
            let mut pool = leaf_pool();
            pool.shuffle(rng);
            let n = rng.gen_range(2..=4);
            (Task::Regression, pool.into_iter().take(n).map(Output::Value).collect())
        };
        let mut builder = Builder { rng, space: &space, max_depth: params.max_depth, outputs, specs: Vec::new() };
        builder.node(0, FeatureSet::EMPTY);
        let specs = builder.specs;
        if let Ok(model) = TreeModel::new(space.clone(), task, 1, specs) {
            return model;
        }
    }
}

pub fn random_point<R: Rng>(rng: &mut R, space: &FeatureSpace) -> Vec<usize> {
    space.features().iter().map(|f| rng.gen_range(0..f.size())).collect()
}

/// Class equality for classifiers; a threshold from a small grid otherwise,
/// never strict with δ = 0.
pub fn random_similarity<R: Rng>(rng: &mut R, task: &Task) -> Similarity {
    match task {
        Task::Classification { .. } => Similarity::ClassEquality,
        Task::Regression => {
            let grid = [int(0), ratio(1, 4), ratio(1, 2), int(1), int(2)];
            let delta = grid.choose(rng).expect("nonempty").clone();
            let strict = delta != int(0) && rng.gen_bool(0.5);
            Similarity::threshold(delta, strict)
        }
    }
}

/// A random permutation of `0..m`.
pub fn random_order<R: Rng>(rng: &mut R, m: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..m).collect();
    order.shuffle(rng);
    order
}
