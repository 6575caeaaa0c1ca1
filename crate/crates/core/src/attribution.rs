//! Exact SHAP scores under the uniform distribution, with a contribution
//! ledger, and an audit that sets scores against feature relevancy.
//!
//! cf(𝒮) = 𝐄[τ(x) | x_𝒮 = v_𝒮]
//! Δ_i(𝒮) = cf(𝒮 ∪ {i}) − cf(𝒮)
//! ς(k) = k!(m−k−1)!/m!
//! sv(i) = Σ_{𝒮 ⊆ ℱ∖{i}} ς(|𝒮|)·Δ_i(𝒮)

use itertools::Itertools;
use num::{BigInt, BigUint, One, Zero};

use crate::enumerate::{relevant_features, RelevancyReport};
use crate::error::{Error, Result};
use crate::features::FeatureSet;
use crate::model::Restriction;
use crate::rational::{self, Rational};
use crate::semantics::{expected_value, Problem, Similarity};

/// Default cap on m for lattice scans (2^m characteristic values).
pub const DEFAULT_MAX_FEATURES: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Contribution {
    pub subset: FeatureSet,
    pub delta: Rational,
    pub weight: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShapReport {
    pub scores: Vec<Rational>,
    /// cf(∅) = 𝐄[τ].
    pub baseline: Rational,
    /// cf(ℱ) = τ(v).
    pub full: Rational,
    /// Per feature, one row per subset in order of size then ids.
    pub ledger: Option<Vec<Vec<Contribution>>>,
}

#[derive(Clone, Copy, Debug)]
pub struct ShapOptions {
    pub max_features: usize,
    pub ledger: bool,
}

impl Default for ShapOptions {
    fn default() -> Self {
        ShapOptions { max_features: DEFAULT_MAX_FEATURES, ledger: false }
    }
}

/// cf_e(𝒮; ℰ); classes contribute their ordinal position.
pub fn characteristic_value(problem: &Problem<'_>, subset: FeatureSet) -> Rational {
    expected_value(problem.model(), &Restriction::new(subset, problem.point()))
}

fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * k)
}

/// ς(k) for m features.
pub fn shapley_weight(m: usize, k: usize) -> Rational {
    assert!(k < m, "subset size must be below m");
    let num = factorial(k) * factorial(m - k - 1);
    Rational::new(BigInt::from(num), BigInt::from(factorial(m)))
}

fn check_cap(m: usize, cap: usize) -> Result<()> {
    if m > cap {
        return Err(Error::FeatureCapExceeded { features: m, cap });
    }
    Ok(())
}

/// Subsets of `0..m` without `i`, by size then lexicographically.
fn subsets_without(m: usize, i: usize) -> impl Iterator<Item = FeatureSet> {
    let rest: Vec<usize> = (0..m).filter(|&j| j != i).collect();
    (0..m).flat_map(move |k| rest.clone().into_iter().combinations(k).map(FeatureSet::from_iter).collect::<Vec<_>>())
}

/// sv(i) for a single feature, evaluating 2^m characteristic values.
pub fn shap_score(problem: &Problem<'_>, i: usize, max_features: usize) -> Result<Rational> {
    let m = problem.m();
    check_cap(m, max_features)?;
    if i >= m {
        return Err(Error::Config(format!("feature {} does not exist", i + 1)));
    }
    let weights: Vec<Rational> = (0..m).map(|k| shapley_weight(m, k)).collect();
    Ok(subsets_without(m, i)
        .map(|s| &weights[s.len()] * (characteristic_value(problem, s.with(i)) - characteristic_value(problem, s)))
        .sum())
}

/// Scores for every feature from one memo table of cf over the lattice; the
/// efficiency identity Σ sv(i) = cf(ℱ) − cf(∅) is checked before returning.
pub fn shap_all(problem: &Problem<'_>, options: ShapOptions) -> Result<ShapReport> {
    let m = problem.m();
    check_cap(m, options.max_features.min(63))?;
    let cf: Vec<Rational> = FeatureSet::all_subsets(m).map(|s| characteristic_value(problem, s)).collect();
    let at = |s: FeatureSet| &cf[s.bits() as usize];
    let weights: Vec<Rational> = (0..m).map(|k| shapley_weight(m, k)).collect();

    let mut scores = Vec::with_capacity(m);
    let mut ledger = options.ledger.then(Vec::new);
    for i in 0..m {
        let mut score = Rational::zero();
        let mut rows = Vec::new();
        for s in subsets_without(m, i) {
            let delta = at(s.with(i)) - at(s);
            let weight = &weights[s.len()];
            score += weight * &delta;
            if options.ledger {
                rows.push(Contribution { subset: s, delta, weight: weight.clone() });
            }
        }
        scores.push(score);
        if let Some(ledger) = ledger.as_mut() {
            ledger.push(rows);
        }
    }

    let baseline = at(FeatureSet::EMPTY).clone();
    let full = at(problem.all()).clone();
    let sum: Rational = scores.iter().sum();
    let expected = &full - &baseline;
    if sum != expected {
        return Err(Error::Efficiency { sum: rational::render(&sum), expected: rational::render(&expected) });
    }
    Ok(ShapReport { scores, baseline, full, ledger })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AuditFlag {
    /// Nonzero score for a feature in no AXp.
    IrrelevantNonzero,
    /// Zero score for a feature in some AXp.
    RelevantZero,
    Consistent,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Finding {
    pub feature: usize,
    pub relevant: bool,
    pub score: Rational,
    pub flag: AuditFlag,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuditReport {
    pub similarity: Similarity,
    pub shap: ShapReport,
    pub relevancy: RelevancyReport,
    pub findings: Vec<Finding>,
}

/// Joins SHAP scores with the relevancy of each feature under the problem's
/// own similarity predicate.
pub fn audit(problem: &Problem<'_>, options: ShapOptions, limit: Option<usize>) -> Result<AuditReport> {
    audit_against(problem, problem, options, limit)
}

/// Like [`audit`], with relevancy computed on `relevancy_problem`, which must
/// share the model and sample.
pub fn audit_against(
    problem: &Problem<'_>,
    relevancy_problem: &Problem<'_>,
    options: ShapOptions,
    limit: Option<usize>,
) -> Result<AuditReport> {
    let same_model = std::ptr::eq(problem.model(), relevancy_problem.model()) || problem.model() == relevancy_problem.model();
    if !same_model || problem.sample() != relevancy_problem.sample() {
        return Err(Error::Config("audit requires the same model and sample on both sides".into()));
    }
    let shap = shap_all(problem, options)?;
    let relevancy = relevant_features(relevancy_problem, limit)?;
    let findings = shap
        .scores
        .iter()
        .enumerate()
        .map(|(i, score)| {
            let relevant = relevancy.relevant.contains(i);
            let flag = match (relevant, score.is_zero()) {
                (false, false) => AuditFlag::IrrelevantNonzero,
                (true, true) => AuditFlag::RelevantZero,
                _ => AuditFlag::Consistent,
            };
            Finding { feature: i, relevant, score: score.clone(), flag }
        })
        .collect();
    Ok(AuditReport { similarity: relevancy_problem.similarity().clone(), shap, relevancy, findings })
}
