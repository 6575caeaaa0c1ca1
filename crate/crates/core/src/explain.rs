//! Deletion-based computation of one AXp or CXp, minimality checks, and
//! inflation of an AXp to value-set literals.

use std::fmt;

use crate::error::{Error, Result};
use crate::features::FeatureSet;
use crate::model::{Output, TreeModel, ValueSet};
use crate::semantics::Problem;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExplanationKind {
    AXp,
    CXp,
    WAXp,
    WCXp,
}

impl fmt::Display for ExplanationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExplanationKind::AXp => "AXp",
            ExplanationKind::CXp => "CXp",
            ExplanationKind::WAXp => "WAXp",
            ExplanationKind::WCXp => "WCXp",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Explanation {
    pub kind: ExplanationKind,
    pub features: FeatureSet,
    /// Identifies the problem (model, sample, similarity) it explains.
    pub fingerprint: String,
}

/// One row of a deletion run: try to drop `dropped` from `current`.
/// `path` is the dissimilar path the oracle found, if any (node ids).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeletionStep {
    pub current: FeatureSet,
    pub dropped: usize,
    pub path: Option<Vec<i64>>,
    pub result: FeatureSet,
}

fn check_order(problem: &Problem<'_>, order: &[usize]) -> Result<()> {
    let m = problem.m();
    let seen: FeatureSet = order.iter().copied().filter(|&i| i < m).collect();
    if order.len() != m || seen != problem.all() {
        return Err(Error::Config(format!("feature order must be a permutation of 1..={m}")));
    }
    Ok(())
}

/// Ascending feature order `0..m`.
pub fn default_order(problem: &Problem<'_>) -> Vec<usize> {
    (0..problem.m()).collect()
}

pub fn one_axp(problem: &Problem<'_>, order: &[usize]) -> Result<Explanation> {
    one_axp_traced(problem, order).map(|(e, _)| e)
}

/// Deletion algorithm over the fixed set: start from ℱ and drop each feature
/// (in `order`) unless some dissimilar path becomes consistent. Makes exactly
/// m oracle calls.
pub fn one_axp_traced(problem: &Problem<'_>, order: &[usize]) -> Result<(Explanation, Vec<DeletionStep>)> {
    check_order(problem, order)?;
    let mut fixed = problem.all();
    let mut trace = Vec::with_capacity(order.len());
    for &i in order {
        let candidate = fixed.without(i);
        let blocking = problem.blocking_path(candidate);
        let current = fixed;
        if blocking.is_none() {
            fixed = candidate;
        }
        trace.push(DeletionStep { current, dropped: i, path: blocking.map(|p| p.nodes.clone()), result: fixed });
    }
    Ok((explanation(problem, ExplanationKind::AXp, fixed), trace))
}

pub fn one_cxp(problem: &Problem<'_>, order: &[usize]) -> Result<Explanation> {
    one_cxp_traced(problem, order).map(|(e, _)| e)
}

/// Deletion over the free set: start with every feature free and keep a
/// feature free only while it is needed to reach a dissimilar output.
pub fn one_cxp_traced(problem: &Problem<'_>, order: &[usize]) -> Result<(Explanation, Vec<DeletionStep>)> {
    check_order(problem, order)?;
    let m = problem.m();
    let mut free = problem.all();
    if !problem.is_wcxp(free) {
        return Err(Error::NoCxp);
    }
    let mut trace = Vec::with_capacity(order.len());
    for &i in order {
        let candidate = free.without(i);
        let witness = problem.blocking_path(candidate.complement(m));
        let current = free;
        if witness.is_some() {
            free = candidate;
        }
        trace.push(DeletionStep { current, dropped: i, path: witness.map(|p| p.nodes.clone()), result: free });
    }
    Ok((explanation(problem, ExplanationKind::CXp, free), trace))
}

fn explanation(problem: &Problem<'_>, kind: ExplanationKind, features: FeatureSet) -> Explanation {
    Explanation { kind, features, fingerprint: problem.fingerprint().to_string() }
}

pub fn is_axp(problem: &Problem<'_>, set: FeatureSet) -> bool {
    problem.is_waxp(set) && set.iter().all(|i| !problem.is_waxp(set.without(i)))
}

pub fn is_cxp(problem: &Problem<'_>, set: FeatureSet) -> bool {
    problem.is_wcxp(set) && set.iter().all(|i| !problem.is_wcxp(set.without(i)))
}

/// An AXp whose literals `x_i = v_i` were widened to `x_i ∈ V_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InflatedExplanation {
    pub literals: Vec<(usize, ValueSet)>,
    pub output: Output,
    /// Features whose set grew to the whole domain: the input was not minimal.
    pub removable: FeatureSet,
}

impl InflatedExplanation {
    /// `IF x1 in {0} AND x3 in {0,2} THEN output = 0`
    pub fn render(&self, model: &TreeModel) -> String {
        let space = model.space();
        let conditions: Vec<String> = self
            .literals
            .iter()
            .map(|(i, set)| {
                let decl = space.feature(*i);
                let values: Vec<String> = set.iter().map(|x| decl.domain()[x].to_string()).collect();
                format!("{} in {{{}}}", decl.name(), values.join(","))
            })
            .collect();
        let premise = if conditions.is_empty() { "TRUE".to_string() } else { conditions.join(" AND ") };
        format!("IF {} THEN output = {}", premise, model.render_output(&self.output))
    }

    /// Drops every value but the sample's, recovering the plain AXp.
    pub fn concrete(&self, point: &[usize]) -> Vec<(usize, ValueSet)> {
        self.literals
            .iter()
            .map(|(i, set)| (*i, set.intersection(&ValueSet::singleton(point[*i]))))
            .collect()
    }
}

/// Greedily widens each literal of `axp` (features ascending, candidate
/// values in `value_order`, domain order by default), keeping a value only
/// if the widened rule still guarantees a similar output.
pub fn inflate(problem: &Problem<'_>, axp: FeatureSet, value_order: Option<&[Vec<usize>]>) -> Result<InflatedExplanation> {
    let space = problem.space();
    if let Some(orders) = value_order {
        if orders.len() != problem.m() {
            return Err(Error::Config("value order needs one entry per feature".into()));
        }
        for (i, order) in orders.iter().enumerate() {
            let size = space.feature(i).size();
            let as_set: ValueSet = order.iter().copied().collect();
            if order.len() != size || as_set != ValueSet::full(size) {
                return Err(Error::Config(format!("value order for feature {} is not a permutation", space.feature(i).name())));
            }
        }
    }
    if !problem.is_waxp(axp) {
        return Err(Error::Config(format!("{axp} is not a WAXp for this problem")));
    }
    let v = problem.point();
    let mut literals: Vec<(usize, ValueSet)> = axp.iter().map(|i| (i, ValueSet::singleton(v[i]))).collect();
    for k in 0..literals.len() {
        let i = literals[k].0;
        let candidates: Vec<usize> = match value_order {
            Some(orders) => orders[i].clone(),
            None => (0..space.feature(i).size()).collect(),
        };
        for u in candidates.into_iter().filter(|&u| u != v[i]) {
            literals[k].1.insert(u);
            if !problem.is_waxp_literals(&literals) {
                literals[k].1.remove(u);
            }
        }
    }
    let removable = literals
        .iter()
        .filter(|(i, set)| set.len() == space.feature(*i).size())
        .map(|(i, _)| *i)
        .collect();
    Ok(InflatedExplanation { literals, output: problem.sample().output.clone(), removable })
}
