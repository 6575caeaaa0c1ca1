//! Brute-force reference implementations. Everything here quantifies over
//! points with `TreeModel::evaluate` and never looks at tree paths, so it is
//! independent of the path-based algorithms under test.
#![allow(dead_code)]

use fxp_core::model::Value;
use fxp_core::rational::int;
use fxp_core::synth::{random_model, random_point, random_similarity, SynthParams};
use fxp_core::{Epsilon, FeatureSet, Norm, Problem, Rational, Restriction, Similarity, TreeModel};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const CAP: u128 = 20_000;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Every point agreeing with the sample on `fixed`.
pub fn completions(problem: &Problem<'_>, fixed: FeatureSet) -> Vec<Vec<usize>> {
    let space = problem.space();
    let mut out = vec![Vec::new()];
    for i in 0..space.len() {
        let values: Vec<usize> = if fixed.contains(i) { vec![problem.point()[i]] } else { (0..space.feature(i).size()).collect() };
        out = out
            .into_iter()
            .flat_map(|prefix| {
                values.iter().map(move |&u| {
                    let mut p = prefix.clone();
                    p.push(u);
                    p
                })
            })
            .collect();
    }
    out
}

fn similar(problem: &Problem<'_>, x: &[usize]) -> bool {
    let model = problem.model();
    problem.similarity().holds(&problem.sample().output, model.evaluate(x).unwrap())
}

pub fn waxp(problem: &Problem<'_>, fixed: FeatureSet) -> bool {
    completions(problem, fixed).iter().all(|x| similar(problem, x))
}

pub fn wcxp(problem: &Problem<'_>, free: FeatureSet) -> bool {
    completions(problem, free.complement(problem.m())).iter().any(|x| !similar(problem, x))
}

/// Subset-minimal sets satisfying a monotone predicate, by a full 2^m scan
/// (no reliance on monotonicity), in canonical order.
pub fn minimal_sets(m: usize, pred: impl Fn(FeatureSet) -> bool) -> Vec<FeatureSet> {
    let holds: Vec<FeatureSet> = FeatureSet::all_subsets(m).filter(|&s| pred(s)).collect();
    let mut out: Vec<FeatureSet> = holds.iter().copied().filter(|&s| !holds.iter().any(|&t| t != s && t.is_subset(s))).collect();
    out.sort_by(fxp_core::features::canonical_cmp);
    out
}

pub fn axps(problem: &Problem<'_>) -> Vec<FeatureSet> {
    minimal_sets(problem.m(), |s| waxp(problem, s))
}

pub fn cxps(problem: &Problem<'_>) -> Vec<FeatureSet> {
    minimal_sets(problem.m(), |s| wcxp(problem, s))
}

/// Minimal hitting sets over `m` features by exhaustive scan.
pub fn mhs(sets: &[FeatureSet], m: usize) -> Vec<FeatureSet> {
    minimal_sets(m, |h| sets.iter().all(|s| s.intersects(h)))
}

pub fn numeric(model: &TreeModel, x: &[usize]) -> Rational {
    model.evaluate(x).unwrap().numeric()
}

/// 𝐄[τ(x) | x_𝒮 = v_𝒮] by averaging over completions.
pub fn cf(problem: &Problem<'_>, fixed: FeatureSet) -> Rational {
    let points = completions(problem, fixed);
    let total: Rational = points.iter().map(|x| numeric(problem.model(), x)).sum();
    total / int(points.len() as i64)
}

pub fn dissimilarity(problem: &Problem<'_>, free: FeatureSet) -> Rational {
    let points = completions(problem, free.complement(problem.m()));
    let bad = points.iter().filter(|x| !similar(problem, x)).count();
    Rational::new((bad as i64).into(), (points.len() as i64).into())
}

fn coordinate(problem: &Problem<'_>, norm: Norm, i: usize, a: usize, b: usize) -> u128 {
    let decl = problem.space().feature(i);
    if norm == Norm::L0 || a == b {
        return u128::from(a != b);
    }
    match (&decl.domain()[a], &decl.domain()[b]) {
        (Value::Int(x), Value::Int(y)) => x.abs_diff(*y) as u128,
        _ => 1,
    }
}

pub fn distance(problem: &Problem<'_>, norm: Norm, x: &[usize]) -> u128 {
    let v = problem.point();
    let parts = (0..x.len()).map(|i| coordinate(problem, norm, i, x[i], v[i]));
    match norm {
        Norm::LInf => parts.max().unwrap_or(0),
        _ => parts.sum(),
    }
}

/// Closest dissimilar point with `fixed` held, ties broken lexicographically.
pub fn adversarial(problem: &Problem<'_>, norm: Norm, eps: &Epsilon, fixed: FeatureSet) -> Option<(Vec<usize>, u128)> {
    completions(problem, fixed)
        .into_iter()
        .filter(|x| !similar(problem, x))
        .map(|x| {
            let d = distance(problem, norm, &x);
            (d, x)
        })
        .filter(|(d, _)| match eps {
            Epsilon::Unbounded => true,
            Epsilon::Bounded(e) => &int(*d as i64) <= e,
        })
        .min()
        .map(|(d, x)| (x, d))
}

/// A random model with a random sample and similarity.
pub struct Instance {
    pub model: TreeModel,
    pub point: Vec<usize>,
    pub similarity: Similarity,
}

impl Instance {
    pub fn problem(&self) -> Problem<'_> {
        Problem::from_point(&self.model, self.point.clone(), self.similarity.clone()).unwrap()
    }
}

pub fn instance(rng: &mut ChaCha8Rng, params: &SynthParams) -> Instance {
    let model = random_model(rng, params);
    let point = random_point(rng, model.space());
    let similarity = random_similarity(rng, model.task());
    Instance { model, point, similarity }
}

pub fn restriction(fixed: FeatureSet, point: &[usize]) -> Restriction<'_> {
    Restriction::new(fixed, point)
}
