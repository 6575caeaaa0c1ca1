//! Enumeration of all AXps and CXps with a MARCO-style dual search, minimal
//! hitting sets, and feature relevancy/necessity queries.

mod hitting;
pub mod map;

pub use hitting::minimal_hitting_sets;

use crate::error::{Error, Result};
use crate::features::FeatureSet;
use crate::semantics::Problem;
use map::{Clause, MapSolver};

/// An explanation discovered by [`Marco`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Found {
    Axp(FeatureSet),
    Cxp(FeatureSet),
}

/// Lazily yields every AXp and CXp of a problem.
///
/// Each round takes a maximal model of the map as a seed fixed set. A WAXp
/// seed is shrunk to an AXp X and blocked with (∨_{i∈X} ¬u_i); otherwise the
/// seed is grown to a maximal non-WAXp fixed set whose complement is a CXp Y,
/// blocked with (∨_{i∈Y} u_i). The search ends when the map is unsatisfiable.
pub struct Marco<'p, 'm> {
    problem: &'p Problem<'m>,
    map: MapSolver,
    done: bool,
}

impl<'p, 'm> Marco<'p, 'm> {
    pub fn new(problem: &'p Problem<'m>) -> Self {
        Marco { problem, map: MapSolver::new(problem.m()), done: false }
    }

    /// True once the map has no models left.
    pub fn is_exhausted(&self) -> bool {
        self.done
    }

    fn shrink(&self, seed: FeatureSet) -> FeatureSet {
        let mut fixed = seed;
        for i in seed.iter() {
            if self.problem.is_waxp(fixed.without(i)) {
                fixed = fixed.without(i);
            }
        }
        fixed
    }

    fn grow(&self, seed: FeatureSet) -> FeatureSet {
        let mut fixed = seed;
        for i in seed.complement(self.problem.m()).iter() {
            if !self.problem.is_waxp(fixed.with(i)) {
                fixed = fixed.with(i);
            }
        }
        fixed
    }
}

impl Iterator for Marco<'_, '_> {
    type Item = Found;

    fn next(&mut self) -> Option<Found> {
        if self.done {
            return None;
        }
        let Some(bits) = self.map.maximal_model() else {
            self.done = true;
            return None;
        };
        let seed = FeatureSet::from_bits(bits);
        if self.problem.is_waxp(seed) {
            let axp = self.shrink(seed);
            self.map.add(Clause { pos: 0, neg: axp.bits() });
            Some(Found::Axp(axp))
        } else {
            let cxp = self.grow(seed).complement(self.problem.m());
            self.map.add(Clause { pos: cxp.bits(), neg: 0 });
            Some(Found::Cxp(cxp))
        }
    }
}

/// All explanations found, in discovery order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnumerationState {
    pub axps: Vec<FeatureSet>,
    pub cxps: Vec<FeatureSet>,
    pub exhausted: bool,
}

/// Runs MARCO until the map is exhausted or `limit` explanations (AXps plus
/// CXps) were found; in the latter case `exhausted` is false.
pub fn enumerate_explanations(problem: &Problem<'_>, limit: Option<usize>) -> EnumerationState {
    let mut marco = Marco::new(problem);
    let mut state = EnumerationState { axps: Vec::new(), cxps: Vec::new(), exhausted: false };
    loop {
        if limit.is_some_and(|n| state.axps.len() + state.cxps.len() >= n) {
            // One more probe tells whether the limit happened to coincide with exhaustion.
            state.exhausted = marco.map.maximal_model().is_none();
            return state;
        }
        match marco.next() {
            Some(Found::Axp(x)) => state.axps.push(x),
            Some(Found::Cxp(y)) => state.cxps.push(y),
            None => {
                state.exhausted = marco.is_exhausted();
                return state;
            }
        }
    }
}

/// 𝔉(ℰ) and the features common to every AXp.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelevancyReport {
    pub relevant: FeatureSet,
    pub irrelevant: FeatureSet,
    pub necessary: FeatureSet,
    /// For each relevant feature (ascending), the first AXp found containing it.
    pub witnesses: Vec<(usize, FeatureSet)>,
    pub axps: Vec<FeatureSet>,
    pub cxps: Vec<FeatureSet>,
}

pub fn relevant_features(problem: &Problem<'_>, limit: Option<usize>) -> Result<RelevancyReport> {
    let state = enumerate_explanations(problem, limit);
    if !state.exhausted {
        return Err(Error::LimitReached(limit.unwrap_or_default()));
    }
    Ok(relevancy_from(problem.m(), state))
}

pub(crate) fn relevancy_from(m: usize, state: EnumerationState) -> RelevancyReport {
    let relevant = state.axps.iter().fold(FeatureSet::EMPTY, |acc, x| acc.union(*x));
    let necessary = state.axps.iter().fold(FeatureSet::full(m), |acc, x| acc.intersection(*x));
    let witnesses = relevant
        .iter()
        .map(|i| (i, *state.axps.iter().find(|x| x.contains(i)).expect("relevant features occur in an AXp")))
        .collect();
    RelevancyReport {
        relevant,
        irrelevant: relevant.complement(m),
        necessary,
        witnesses,
        axps: state.axps,
        cxps: state.cxps,
    }
}

/// Features in every AXp: those whose removal from ℱ breaks WAXp. Uses m
/// oracle calls and no enumeration.
pub fn necessary_features_fast(problem: &Problem<'_>) -> FeatureSet {
    let all = problem.all();
    all.iter().filter(|&i| !problem.is_waxp(all.without(i))).collect()
}
