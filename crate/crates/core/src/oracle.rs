//! WAXp/WCXp decision procedures and constrained adversarial-example search.
//!
//! Both predicates reduce to one question about the tree: is some path whose
//! leaf is dissimilar from the sample consistent with the fixed features?
//! A path is consistent with 𝒮 iff, for each feature it tests, either the
//! feature is free or the sample's value lies in the path's literal set.

use std::fmt;
use std::str::FromStr;

use num::{BigInt, Zero};

use crate::features::FeatureSet;
use crate::model::{FeatureSpace, Output, Path, ValueSet};
use crate::rational::{self, Rational};
use crate::semantics::Problem;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Norm {
    /// Number of changed coordinates.
    L0,
    /// Sum of per-coordinate distances.
    L1,
    /// Largest per-coordinate distance.
    LInf,
}

impl Norm {
    fn coordinate(self, space: &FeatureSpace, i: usize, a: usize, b: usize) -> u128 {
        match self {
            Norm::L0 => u128::from(a != b),
            Norm::L1 | Norm::LInf => space.feature(i).distance(a, b),
        }
    }

    fn combine(self, acc: u128, d: u128) -> u128 {
        match self {
            Norm::L0 | Norm::L1 => acc.saturating_add(d),
            Norm::LInf => acc.max(d),
        }
    }

    /// ||x − v|| under this norm; categorical coordinates count 0/1.
    pub fn distance(self, space: &FeatureSpace, x: &[usize], v: &[usize]) -> u128 {
        (0..space.len()).fold(0, |acc, i| self.combine(acc, self.coordinate(space, i, x[i], v[i])))
    }
}

impl FromStr for Norm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "0" | "l0" | "L0" => Ok(Norm::L0),
            "1" | "l1" | "L1" => Ok(Norm::L1),
            "inf" | "linf" | "Linf" | "LInf" => Ok(Norm::LInf),
            _ => Err(format!("unsupported norm {s:?}: expected 0, 1 or inf")),
        }
    }
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Norm::L0 => "l0",
            Norm::L1 => "l1",
            Norm::LInf => "linf",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Epsilon {
    Bounded(Rational),
    Unbounded,
}

impl Epsilon {
    fn admits(&self, distance: u128) -> bool {
        match self {
            Epsilon::Unbounded => true,
            Epsilon::Bounded(eps) => &Rational::from_integer(BigInt::from(distance)) <= eps,
        }
    }
}

/// Search for x with ||x − v||_p ≤ ε, x_𝒮 = v_𝒮 and ¬σ(x).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdversarialQuery {
    pub norm: Norm,
    pub eps: Epsilon,
    pub fixed: FeatureSet,
}

/// A dissimilar point reachable under some constraint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub point: Vec<usize>,
    pub output: Output,
    pub distance: Rational,
}

impl<'m> Problem<'m> {
    /// First dissimilar path consistent with fixing `fixed` to the sample.
    pub fn blocking_path(&self, fixed: FeatureSet) -> Option<&'m Path> {
        self.count_oracle_call();
        let v = self.point();
        self.dissimilar_paths().find(|p| p.admits(fixed, v))
    }

    /// WAXp(𝒮): every completion of v_𝒮 is similar.
    pub fn is_waxp(&self, fixed: FeatureSet) -> bool {
        self.blocking_path(fixed).is_none()
    }

    /// WCXp(𝒮): some point that only changes `free` is dissimilar.
    pub fn is_wcxp(&self, free: FeatureSet) -> bool {
        !self.is_waxp(free.complement(self.m()))
    }

    /// WAXp check where each listed feature ranges over a value set instead
    /// of being pinned to the sample; unlisted features are free.
    pub fn is_waxp_literals(&self, literals: &[(usize, ValueSet)]) -> bool {
        self.count_oracle_call();
        !self.dissimilar_paths().any(|p| {
            literals.iter().all(|(i, allowed)| p.literal(*i).map_or(true, |l| l.intersects(allowed)))
        })
    }

    /// A dissimilar point changing only `free`, built from the first
    /// consistent dissimilar path: free tested features take the smallest
    /// value of the path literal, everything else keeps the sample's value.
    /// Distance is Hamming.
    pub fn wcxp_witness(&self, free: FeatureSet) -> Option<Witness> {
        let v = self.point();
        let path = self.blocking_path(free.complement(self.m()))?;
        let point: Vec<usize> = (0..self.m())
            .map(|i| match path.literal(i) {
                Some(lit) if free.contains(i) => lit.first().expect("literals are nonempty"),
                _ => v[i],
            })
            .collect();
        let distance = Norm::L0.distance(self.space(), &point, v);
        Some(Witness { point, output: path.output.clone(), distance: Rational::from_integer(distance.into()) })
    }

    /// Minimum-distance constrained adversarial example; ties go to the
    /// lexicographically smallest point (by domain order).
    pub fn find_adversarial_example(&self, query: &AdversarialQuery) -> Option<Witness> {
        let space = self.space();
        let v = self.point();
        let norm = query.norm;

        // (path, per-coordinate (value, cost) options, cheapest combined cost)
        let mut candidates: Vec<(&Path, Options, u128)> = Vec::new();
        for path in self.dissimilar_paths() {
            if !path.admits(query.fixed, v) {
                continue;
            }
            let options: Vec<Vec<(usize, u128)>> = (0..space.len())
                .map(|i| {
                    if query.fixed.contains(i) {
                        return vec![(v[i], 0)];
                    }
                    let values: Vec<usize> = match path.literal(i) {
                        Some(lit) => lit.iter().collect(),
                        None => (0..space.feature(i).size()).collect(),
                    };
                    values.into_iter().map(|u| (u, norm.coordinate(space, i, u, v[i]))).collect()
                })
                .collect();
            let best = options
                .iter()
                .map(|opts| opts.iter().map(|&(_, d)| d).min().expect("nonempty options"))
                .fold(0, |acc, d| norm.combine(acc, d));
            if query.eps.admits(best) {
                candidates.push((path, options, best));
            }
        }

        let target = candidates.iter().map(|c| c.2).min()?;
        candidates
            .iter()
            .filter(|c| c.2 == target)
            .map(|(path, options, _)| (lex_smallest_within(norm, options, target), *path))
            .min_by(|a, b| a.0.cmp(&b.0))
            .map(|(point, path)| Witness {
                point,
                output: path.output.clone(),
                distance: Rational::from_integer(target.into()),
            })
    }
}

type Options = Vec<Vec<(usize, u128)>>;

/// Smallest point (lexicographically) choosing one option per coordinate with
/// combined cost at most `budget`. The budget must be feasible.
fn lex_smallest_within(norm: Norm, options: &[Vec<(usize, u128)>], budget: u128) -> Vec<usize> {
    let n = options.len();
    let mut suffix = vec![0u128; n + 1];
    for i in (0..n).rev() {
        let min = options[i].iter().map(|&(_, d)| d).min().unwrap_or(0);
        suffix[i] = norm.combine(suffix[i + 1], min);
    }
    let mut acc = 0u128;
    let mut point = Vec::with_capacity(n);
    for i in 0..n {
        let &(u, d) = options[i]
            .iter()
            .find(|&&(_, d)| norm.combine(norm.combine(acc, d), suffix[i + 1]) <= budget)
            .expect("budget is feasible");
        acc = norm.combine(acc, d);
        point.push(u);
    }
    point
}

impl fmt::Display for Epsilon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Epsilon::Unbounded => f.write_str("unbounded"),
            Epsilon::Bounded(e) => f.write_str(&rational::render(e)),
        }
    }
}

impl FromStr for Epsilon {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "unbounded" {
            return Ok(Epsilon::Unbounded);
        }
        match rational::parse(s) {
            Some(e) if e >= Rational::zero() => Ok(Epsilon::Bounded(e)),
            _ => Err(format!("invalid epsilon {s:?}: expected a nonnegative p/q or \"unbounded\"")),
        }
    }
}
