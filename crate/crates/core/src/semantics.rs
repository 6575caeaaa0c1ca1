//! The similarity predicate σ, explanation problems, and exact expectations
//! under the uniform independent-feature distribution.

use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::OnceLock;

use num::{BigInt, One, Signed, Zero};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::features::FeatureSet;
use crate::format::print_model;
use crate::model::{FeatureSpace, Output, Path, Restriction, Sample, Task, TreeModel};
use crate::rational::{self, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Comparison {
    /// |Δ| ≤ δ counts as similar.
    NonStrict,
    /// |Δ| < δ counts as similar.
    Strict,
}

/// When two model outputs are indistinguishable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Similarity {
    ClassEquality,
    Threshold { delta: Rational, comparison: Comparison },
}

impl Similarity {
    pub fn threshold(delta: Rational, strict: bool) -> Self {
        let comparison = if strict { Comparison::Strict } else { Comparison::NonStrict };
        Similarity::Threshold { delta, comparison }
    }

    /// The natural default for a task: class equality, or |Δ| ≤ 0.
    pub fn default_for(task: &Task) -> Self {
        match task {
            Task::Regression => Similarity::threshold(Rational::zero(), false),
            Task::Classification { .. } => Similarity::ClassEquality,
        }
    }

    pub fn holds(&self, reference: &Output, other: &Output) -> bool {
        match self {
            Similarity::ClassEquality => reference == other,
            Similarity::Threshold { delta, comparison } => {
                let gap = (other.numeric() - reference.numeric()).abs();
                match comparison {
                    Comparison::NonStrict => &gap <= delta,
                    Comparison::Strict => &gap < delta,
                }
            }
        }
    }
}

impl fmt::Display for Similarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Similarity::ClassEquality => f.write_str("class equality"),
            Similarity::Threshold { delta, comparison: Comparison::NonStrict } => {
                write!(f, "|Δ| <= {}", rational::render(delta))
            }
            Similarity::Threshold { delta, comparison: Comparison::Strict } => {
                write!(f, "|Δ| < {}", rational::render(delta))
            }
        }
    }
}

/// An explanation problem: a model, a target sample and a similarity predicate.
///
/// The paths whose leaf output is dissimilar from the sample's are collected
/// once at construction; every oracle query scans only those.
pub struct Problem<'m> {
    model: &'m TreeModel,
    sample: Sample,
    similarity: Similarity,
    dissimilar: Vec<usize>,
    fingerprint: OnceLock<String>,
    oracle_calls: AtomicUsize,
}

impl fmt::Debug for Problem<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Problem")
            .field("point", &self.model.space().render_point(&self.sample.point))
            .field("output", &self.model.render_output(&self.sample.output))
            .field("similarity", &self.similarity)
            .finish()
    }
}

impl<'m> Problem<'m> {
    pub fn new(model: &'m TreeModel, sample: Sample, similarity: Similarity) -> Result<Self> {
        let actual = model.evaluate(&sample.point)?;
        if actual != &sample.output {
            return Err(crate::InstanceError::OutputMismatch {
                declared: model.render_output(&sample.output),
                actual: model.render_output(actual),
            }
            .into());
        }
        match (&similarity, model.task()) {
            (Similarity::ClassEquality, Task::Classification { .. }) => {}
            (Similarity::ClassEquality, Task::Regression) => {
                return Err(Error::Config("class-equality similarity requires a classification model".into()));
            }
            (Similarity::Threshold { .. }, Task::Classification { .. }) => {
                return Err(Error::Config("a similarity threshold is not allowed for classification models".into()));
            }
            (Similarity::Threshold { delta, comparison }, Task::Regression) => {
                if delta.is_negative() {
                    return Err(Error::Config("delta must be nonnegative".into()));
                }
                if *comparison == Comparison::Strict && delta.is_zero() {
                    return Err(Error::Config(
                        "strict comparison with delta = 0 makes every output dissimilar, including the sample's".into(),
                    ));
                }
            }
        }
        let dissimilar = model
            .paths()
            .iter()
            .enumerate()
            .filter(|(_, p)| !similarity.holds(&sample.output, &p.output))
            .map(|(k, _)| k)
            .collect();
        Ok(Problem {
            model,
            sample,
            similarity,
            dissimilar,
            fingerprint: OnceLock::new(),
            oracle_calls: AtomicUsize::new(0),
        })
    }

    pub fn from_point(model: &'m TreeModel, point: Vec<usize>, similarity: Similarity) -> Result<Self> {
        let sample = Sample::new(model, point)?;
        Problem::new(model, sample, similarity)
    }

    /// Same model and sample under a different similarity predicate.
    pub fn with_similarity(&self, similarity: Similarity) -> Result<Problem<'m>> {
        Problem::new(self.model, self.sample.clone(), similarity)
    }

    pub fn model(&self) -> &'m TreeModel {
        self.model
    }

    pub fn space(&self) -> &'m FeatureSpace {
        self.model.space()
    }

    pub fn sample(&self) -> &Sample {
        &self.sample
    }

    pub fn point(&self) -> &[usize] {
        &self.sample.point
    }

    pub fn similarity(&self) -> &Similarity {
        &self.similarity
    }

    /// Number of features m.
    pub fn m(&self) -> usize {
        self.model.feature_count()
    }

    pub fn all(&self) -> FeatureSet {
        FeatureSet::full(self.m())
    }

    /// Paths whose leaf output is distinguishable from the sample's.
    pub fn dissimilar_paths(&self) -> impl Iterator<Item = &'m Path> + '_ {
        let paths = self.model.paths();
        self.dissimilar.iter().map(move |&k| &paths[k])
    }

    pub fn has_dissimilar_output(&self) -> bool {
        !self.dissimilar.is_empty()
    }

    pub fn is_similar_output(&self, output: &Output) -> bool {
        self.similarity.holds(&self.sample.output, output)
    }

    /// σ(x; ℰ).
    pub fn similar(&self, x: &[usize]) -> bool {
        self.is_similar_output(self.model.evaluate_valid(x))
    }

    /// Hex digest identifying model, sample and similarity settings.
    pub fn fingerprint(&self) -> &str {
        self.fingerprint.get_or_init(|| {
            let mut hasher = Sha256::new();
            hasher.update(print_model(self.model).as_bytes());
            hasher.update(self.model.space().render_point(&self.sample.point).as_bytes());
            hasher.update(self.similarity.to_string().as_bytes());
            hasher.finalize().iter().take(8).map(|b| format!("{b:02x}")).collect()
        })
    }

    pub(crate) fn count_oracle_call(&self) {
        self.oracle_calls.fetch_add(1, Ordering::Relaxed);
    }

    /// WAXp/WCXp oracle calls made through this problem so far.
    pub fn oracle_calls(&self) -> usize {
        self.oracle_calls.load(Ordering::Relaxed)
    }

    pub fn reset_oracle_calls(&self) {
        self.oracle_calls.store(0, Ordering::Relaxed);
    }
}

/// Probability that a uniformly drawn point of the restriction follows `path`.
pub(crate) fn path_probability(space: &FeatureSpace, path: &Path, restriction: &Restriction<'_>) -> Rational {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for (i, lit) in path.literals.iter().enumerate() {
        let Some(lit) = lit else { continue };
        if restriction.fixed.contains(i) {
            if !lit.contains(restriction.anchor[i]) {
                return Rational::zero();
            }
        } else {
            num *= lit.len();
            den *= space.feature(i).size();
        }
    }
    Rational::new(num, den)
}

/// 𝐄[τ(x) | x_𝒮 = v_𝒮] by path traversal.
pub fn expected_value(model: &TreeModel, restriction: &Restriction<'_>) -> Rational {
    model
        .paths()
        .iter()
        .map(|p| path_probability(model.space(), p, restriction) * p.output.numeric())
        .sum()
}

/// 𝐄[τ(x) | x_𝒮 = v_𝒮] by enumerating Υ(𝒮; v) and averaging.
pub fn expected_value_oracle(model: &TreeModel, restriction: &Restriction<'_>, cap: u128) -> Result<Rational> {
    let mut total = Rational::zero();
    let mut count = 0u128;
    for x in model.space().points(restriction, cap)? {
        total += model.evaluate_valid(&x).numeric();
        count += 1;
    }
    Ok(total / Rational::from_integer(BigInt::from(count)))
}

/// 𝐏(¬σ(x) | x_𝒮 = v_𝒮) with 𝒮 = ℱ ∖ `free`.
pub fn dissimilarity_probability(problem: &Problem<'_>, free: FeatureSet) -> Rational {
    let restriction = Restriction::new(free.complement(problem.m()), problem.point());
    problem
        .dissimilar_paths()
        .map(|p| path_probability(problem.space(), p, &restriction))
        .sum()
}
