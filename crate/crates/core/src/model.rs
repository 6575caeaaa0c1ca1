//! Feature spaces, tree models, samples and root-to-leaf paths.

use std::collections::{HashMap, HashSet};
use std::fmt;

use num::BigInt;

use crate::error::{InstanceError, ModelError, Result};
use crate::features::{FeatureSet, MAX_FEATURES};
use crate::rational::{self, Rational};

/// A single domain value: an ordinal integer or a named category.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Value {
    Int(i64),
    Sym(String),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(n) => write!(f, "{n}"),
            Value::Sym(s) => f.write_str(s),
        }
    }
}

/// Integer domains are ordinal; named domains are categorical.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FeatureKind {
    Ordinal,
    Categorical,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeatureDecl {
    name: String,
    domain: Vec<Value>,
    kind: FeatureKind,
}

impl FeatureDecl {
    pub fn new(name: impl Into<String>, domain: Vec<Value>) -> Result<Self, ModelError> {
        let name = name.into();
        let kind = match domain.first() {
            None => return Err(ModelError::EmptyDomain(name)),
            Some(Value::Int(_)) => FeatureKind::Ordinal,
            Some(Value::Sym(_)) => FeatureKind::Categorical,
        };
        let mut seen = HashSet::new();
        for value in &domain {
            let same_kind = matches!(
                (kind, value),
                (FeatureKind::Ordinal, Value::Int(_)) | (FeatureKind::Categorical, Value::Sym(_))
            );
            if !same_kind {
                return Err(ModelError::MixedDomain(name));
            }
            if !seen.insert(value) {
                return Err(ModelError::DuplicateValue { feature: name, value: value.to_string() });
            }
        }
        Ok(FeatureDecl { name, domain, kind })
    }

    /// Ordinal feature with domain `0..size`.
    pub fn range(name: impl Into<String>, size: i64) -> Result<Self, ModelError> {
        Self::new(name, (0..size).map(Value::Int).collect())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> &[Value] {
        &self.domain
    }

    pub fn kind(&self) -> FeatureKind {
        self.kind
    }

    pub fn size(&self) -> usize {
        self.domain.len()
    }

    pub fn index_of(&self, value: &Value) -> Option<usize> {
        self.domain.iter().position(|v| v == value)
    }

    /// Per-coordinate distance between two value indices: 0/1 for
    /// categorical features, absolute numeric difference for ordinal ones.
    pub fn distance(&self, a: usize, b: usize) -> u128 {
        match (&self.domain[a], &self.domain[b]) {
            (Value::Int(x), Value::Int(y)) => (i128::from(*x) - i128::from(*y)).unsigned_abs(),
            _ => u128::from(a != b),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeatureSpace {
    features: Vec<FeatureDecl>,
}

impl FeatureSpace {
    pub fn new(features: Vec<FeatureDecl>) -> Result<Self, ModelError> {
        if features.is_empty() {
            return Err(ModelError::NoFeatures);
        }
        if features.len() > MAX_FEATURES {
            return Err(ModelError::TooManyFeatures(features.len()));
        }
        let mut names = HashSet::new();
        for f in &features {
            if !names.insert(f.name.as_str()) {
                return Err(ModelError::DuplicateFeature(f.name.clone()));
            }
        }
        Ok(FeatureSpace { features })
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn feature(&self, i: usize) -> &FeatureDecl {
        &self.features[i]
    }

    pub fn features(&self) -> &[FeatureDecl] {
        &self.features
    }

    pub fn all(&self) -> FeatureSet {
        FeatureSet::full(self.len())
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.features.iter().position(|f| f.name == name)
    }

    /// |𝔽|, or `None` on overflow.
    pub fn point_count(&self) -> Option<u128> {
        self.features.iter().try_fold(1u128, |acc, f| acc.checked_mul(f.size() as u128))
    }

    pub fn check_point(&self, point: &[usize]) -> Result<(), InstanceError> {
        if point.len() != self.len() {
            return Err(InstanceError::WrongArity { expected: self.len(), got: point.len() });
        }
        for (f, &x) in self.features.iter().zip(point) {
            if x >= f.size() {
                return Err(InstanceError::DomainViolation {
                    feature: f.name.clone(),
                    value: format!("#{x}"),
                });
            }
        }
        Ok(())
    }

    /// Converts concrete values to value indices.
    pub fn point_from_values(&self, values: &[Value]) -> Result<Vec<usize>, InstanceError> {
        if values.len() != self.len() {
            return Err(InstanceError::WrongArity { expected: self.len(), got: values.len() });
        }
        self.features
            .iter()
            .zip(values)
            .map(|(f, v)| {
                f.index_of(v).ok_or_else(|| InstanceError::DomainViolation {
                    feature: f.name.clone(),
                    value: v.to_string(),
                })
            })
            .collect()
    }

    pub fn values_of(&self, point: &[usize]) -> Vec<Value> {
        point.iter().enumerate().map(|(i, &x)| self.features[i].domain[x].clone()).collect()
    }

    /// `(1,1,2)`
    pub fn render_point(&self, point: &[usize]) -> String {
        let parts: Vec<String> = self.values_of(point).iter().map(Value::to_string).collect();
        format!("({})", parts.join(","))
    }

    /// Enumerates Υ(fixed; anchor) in lexicographic order, refusing when the
    /// set is larger than `cap`.
    pub fn points(&self, restriction: &Restriction<'_>, cap: u128) -> Result<PointIter> {
        let needed = restriction.count(self).unwrap_or(u128::MAX);
        if needed > cap {
            return Err(crate::Error::CapExceeded { needed, cap });
        }
        Ok(PointIter::new(self, restriction))
    }
}

/// Odometer over the free coordinates of a restriction.
pub struct PointIter {
    sizes: Vec<usize>,
    free: Vec<usize>,
    current: Vec<usize>,
    done: bool,
}

impl PointIter {
    fn new(space: &FeatureSpace, restriction: &Restriction<'_>) -> Self {
        let free: Vec<usize> = (0..space.len()).filter(|&i| !restriction.fixed.contains(i)).collect();
        let mut current = restriction.anchor.to_vec();
        for &i in &free {
            current[i] = 0;
        }
        PointIter {
            sizes: space.features.iter().map(FeatureDecl::size).collect(),
            free,
            current,
            done: false,
        }
    }
}

impl Iterator for PointIter {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.current.clone();
        self.done = true;
        for &i in self.free.iter().rev() {
            self.current[i] += 1;
            if self.current[i] < self.sizes[i] {
                self.done = false;
                break;
            }
            self.current[i] = 0;
        }
        Some(out)
    }
}

/// Υ(𝒮; v): all points agreeing with `anchor` on `fixed`.
#[derive(Clone, Copy, Debug)]
pub struct Restriction<'a> {
    pub fixed: FeatureSet,
    pub anchor: &'a [usize],
}

impl<'a> Restriction<'a> {
    pub fn new(fixed: FeatureSet, anchor: &'a [usize]) -> Self {
        Restriction { fixed, anchor }
    }

    /// |Υ(𝒮; v)| = Π over free features of |𝔻_i|.
    pub fn count(&self, space: &FeatureSpace) -> Option<u128> {
        (0..space.len())
            .filter(|&i| !self.fixed.contains(i))
            .try_fold(1u128, |acc, i| acc.checked_mul(space.feature(i).size() as u128))
    }
}

/// A subset of one feature's domain, as a bitset over value indices.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct ValueSet {
    words: Vec<u64>,
}

impl ValueSet {
    pub fn empty() -> Self {
        ValueSet::default()
    }

    pub fn full(size: usize) -> Self {
        (0..size).collect()
    }

    pub fn singleton(x: usize) -> Self {
        std::iter::once(x).collect()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.words.get(x / 64).is_some_and(|w| w & (1 << (x % 64)) != 0)
    }

    pub fn insert(&mut self, x: usize) {
        let word = x / 64;
        if self.words.len() <= word {
            self.words.resize(word + 1, 0);
        }
        self.words[word] |= 1 << (x % 64);
    }

    pub fn remove(&mut self, x: usize) {
        if let Some(w) = self.words.get_mut(x / 64) {
            *w &= !(1 << (x % 64));
        }
        self.trim();
    }

    fn trim(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    #[must_use]
    pub fn intersection(&self, other: &ValueSet) -> ValueSet {
        let mut out = ValueSet {
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect(),
        };
        out.trim();
        out
    }

    pub fn intersects(&self, other: &ValueSet) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn union_with(&mut self, other: &ValueSet) {
        if self.words.len() < other.words.len() {
            self.words.resize(other.words.len(), 0);
        }
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn first(&self) -> Option<usize> {
        self.iter().next()
    }

    pub fn max(&self) -> Option<usize> {
        self.iter().last()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            (0..64).filter(move |b| w & (1 << b) != 0).map(move |b| k * 64 + b)
        })
    }
}

impl FromIterator<usize> for ValueSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut set = ValueSet::empty();
        for x in iter {
            set.insert(x);
        }
        set
    }
}

impl fmt::Debug for ValueSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Task {
    Regression,
    /// Classes are ordinal: attribution arithmetic uses their position.
    Classification { classes: Vec<String> },
}

impl Task {
    pub fn is_regression(&self) -> bool {
        matches!(self, Task::Regression)
    }
}

/// A model output: a rational (regression) or a class index (classification).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Output {
    Value(Rational),
    Class(usize),
}

impl Output {
    /// Numeric value used for expectations; classes map to their ordinal position.
    pub fn numeric(&self) -> Rational {
        match self {
            Output::Value(v) => v.clone(),
            Output::Class(k) => Rational::from_integer(BigInt::from(*k)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub values: ValueSet,
    pub child: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Node {
    Internal { feature: usize, edges: Vec<Edge> },
    Leaf { output: Output },
}

/// Input form for [`TreeModel::new`]: nodes refer to each other by id.
#[derive(Clone, Debug)]
pub struct NodeSpec {
    pub id: i64,
    pub body: NodeBody,
}

#[derive(Clone, Debug)]
pub enum NodeBody {
    Internal { feature: usize, edges: Vec<(ValueSet, i64)> },
    Leaf(Output),
}

/// A root-to-leaf path. `literals[i]` is the intersection of the edge sets for
/// feature `i` along the path, `None` when the path never tests `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Path {
    pub nodes: Vec<i64>,
    pub literals: Vec<Option<ValueSet>>,
    pub output: Output,
}

impl Path {
    pub fn literal(&self, i: usize) -> Option<&ValueSet> {
        self.literals[i].as_ref()
    }

    pub fn tested(&self) -> FeatureSet {
        self.literals.iter().enumerate().filter(|(_, l)| l.is_some()).map(|(i, _)| i).collect()
    }

    pub fn contains_point(&self, point: &[usize]) -> bool {
        self.literals.iter().zip(point).all(|(lit, &x)| lit.as_ref().map_or(true, |l| l.contains(x)))
    }

    /// Whether some point of Υ(fixed; anchor) follows this path.
    pub fn admits(&self, fixed: FeatureSet, anchor: &[usize]) -> bool {
        fixed.iter().all(|i| self.literals[i].as_ref().map_or(true, |l| l.contains(anchor[i])))
    }

    /// `⟨1,2,5⟩`
    pub fn render_nodes(&self) -> String {
        let ids: Vec<String> = self.nodes.iter().map(i64::to_string).collect();
        format!("⟨{}⟩", ids.join(","))
    }
}

/// A decision or regression tree over a discrete feature space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeModel {
    space: FeatureSpace,
    task: Task,
    nodes: Vec<Node>,
    ids: Vec<i64>,
    root: usize,
    paths: Vec<Path>,
}

impl TreeModel {
    pub fn new(space: FeatureSpace, task: Task, root: i64, specs: Vec<NodeSpec>) -> Result<Self, ModelError> {
        match &task {
            Task::Classification { classes } => {
                if classes.is_empty() {
                    return Err(ModelError::MissingClasses);
                }
                let mut seen = HashSet::new();
                for c in classes {
                    if !seen.insert(c) {
                        return Err(ModelError::DuplicateClass(c.clone()));
                    }
                }
            }
            Task::Regression => {}
        }

        let mut index = HashMap::new();
        for (k, spec) in specs.iter().enumerate() {
            if index.insert(spec.id, k).is_some() {
                return Err(ModelError::DuplicateNode(spec.id));
            }
        }
        let root_index = *index.get(&root).ok_or(ModelError::MissingRoot(root))?;

        let mut parents = vec![0usize; specs.len()];
        let mut nodes = Vec::with_capacity(specs.len());
        for spec in &specs {
            let node = match &spec.body {
                NodeBody::Leaf(output) => {
                    check_leaf(&task, spec.id, output)?;
                    Node::Leaf { output: output.clone() }
                }
                NodeBody::Internal { feature, edges } => {
                    let decl = space.features.get(*feature).ok_or_else(|| ModelError::UnknownFeature {
                        node: spec.id,
                        feature: format!("#{}", feature + 1),
                    })?;
                    if edges.is_empty() {
                        return Err(ModelError::NoEdges(spec.id));
                    }
                    let mut covered = ValueSet::empty();
                    let mut out = Vec::with_capacity(edges.len());
                    for (values, child) in edges {
                        if values.is_empty() {
                            return Err(ModelError::EmptyEdge(spec.id));
                        }
                        if let Some(x) = values.max().filter(|&x| x >= decl.size()) {
                            return Err(ModelError::ValueNotInDomain {
                                node: spec.id,
                                feature: decl.name.clone(),
                                value: format!("#{x}"),
                            });
                        }
                        if covered.intersects(values) {
                            return Err(ModelError::EdgesNotPartition { node: spec.id, feature: decl.name.clone() });
                        }
                        covered.union_with(values);
                        let c = *index
                            .get(child)
                            .ok_or(ModelError::UnknownChild { node: spec.id, child: *child })?;
                        parents[c] += 1;
                        out.push(Edge { values: values.clone(), child: c });
                    }
                    if covered.len() != decl.size() {
                        return Err(ModelError::EdgesNotPartition { node: spec.id, feature: decl.name.clone() });
                    }
                    Node::Internal { feature: *feature, edges: out }
                }
            };
            nodes.push(node);
        }

        if parents[root_index] > 0 {
            return Err(ModelError::RootHasParent(root));
        }
        if let Some(k) = parents.iter().position(|&p| p > 1) {
            return Err(ModelError::MultipleParents(specs[k].id));
        }
        let mut reached = vec![false; nodes.len()];
        let mut stack = vec![root_index];
        while let Some(k) = stack.pop() {
            reached[k] = true;
            if let Node::Internal { edges, .. } = &nodes[k] {
                stack.extend(edges.iter().map(|e| e.child));
            }
        }
        if let Some(k) = reached.iter().position(|r| !r) {
            return Err(ModelError::UnreachableNode(specs[k].id));
        }

        let ids: Vec<i64> = specs.iter().map(|s| s.id).collect();
        let mut model = TreeModel { space, task, nodes, ids, root: root_index, paths: Vec::new() };
        model.paths = model.collect_paths()?;

        let first = &model.paths[0].output;
        if model.paths.iter().all(|p| &p.output == first) {
            return Err(ModelError::ConstantModel);
        }
        Ok(model)
    }

    fn collect_paths(&self) -> Result<Vec<Path>, ModelError> {
        let mut out = Vec::new();
        let mut literals = vec![None; self.space.len()];
        let mut trail = Vec::new();
        self.walk(self.root, &mut literals, &mut trail, &mut out)?;
        Ok(out)
    }

    fn walk(
        &self,
        node: usize,
        literals: &mut Vec<Option<ValueSet>>,
        trail: &mut Vec<i64>,
        out: &mut Vec<Path>,
    ) -> Result<(), ModelError> {
        trail.push(self.ids[node]);
        match &self.nodes[node] {
            Node::Leaf { output } => {
                out.push(Path { nodes: trail.clone(), literals: literals.clone(), output: output.clone() });
            }
            Node::Internal { feature, edges } => {
                let saved = literals[*feature].clone();
                for edge in edges {
                    let narrowed = match &saved {
                        Some(prev) => prev.intersection(&edge.values),
                        None => edge.values.clone(),
                    };
                    if narrowed.is_empty() {
                        return Err(ModelError::DeadBranch {
                            node: self.ids[edge.child],
                            feature: self.space.feature(*feature).name.clone(),
                        });
                    }
                    literals[*feature] = Some(narrowed);
                    self.walk(edge.child, literals, trail, out)?;
                }
                literals[*feature] = saved;
            }
        }
        trail.pop();
        Ok(())
    }

    pub fn space(&self) -> &FeatureSpace {
        &self.space
    }

    pub fn task(&self) -> &Task {
        &self.task
    }

    pub fn feature_count(&self) -> usize {
        self.space.len()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node_id(&self, index: usize) -> i64 {
        self.ids[index]
    }

    pub fn root(&self) -> usize {
        self.root
    }

    /// One path per leaf, in depth-first edge order.
    pub fn paths(&self) -> &[Path] {
        &self.paths
    }

    /// Features tested somewhere in the tree.
    pub fn tested_features(&self) -> FeatureSet {
        self.nodes
            .iter()
            .filter_map(|n| match n {
                Node::Internal { feature, .. } => Some(*feature),
                Node::Leaf { .. } => None,
            })
            .collect()
    }

    pub fn evaluate(&self, point: &[usize]) -> Result<&Output, InstanceError> {
        self.space.check_point(point)?;
        Ok(self.evaluate_valid(point))
    }

    /// Evaluation for points already known to lie in 𝔽.
    pub fn evaluate_valid(&self, point: &[usize]) -> &Output {
        let mut node = self.root;
        loop {
            match &self.nodes[node] {
                Node::Leaf { output } => return output,
                Node::Internal { feature, edges } => {
                    let x = point[*feature];
                    node = edges
                        .iter()
                        .find(|e| e.values.contains(x))
                        .map(|e| e.child)
                        .expect("edges partition the domain");
                }
            }
        }
    }

    pub fn render_output(&self, output: &Output) -> String {
        match (output, &self.task) {
            (Output::Value(v), _) => rational::render(v),
            (Output::Class(k), Task::Classification { classes }) => classes[*k].clone(),
            (Output::Class(k), Task::Regression) => k.to_string(),
        }
    }
}

fn check_leaf(task: &Task, node: i64, output: &Output) -> Result<(), ModelError> {
    match (task, output) {
        (Task::Regression, Output::Value(_)) => Ok(()),
        (Task::Classification { classes }, Output::Class(k)) if *k < classes.len() => Ok(()),
        (Task::Classification { .. }, Output::Class(k)) => Err(ModelError::BadLeaf {
            node,
            value: format!("#{k}"),
            reason: "class index out of range".into(),
        }),
        (Task::Regression, Output::Class(k)) => Err(ModelError::BadLeaf {
            node,
            value: format!("#{k}"),
            reason: "regression leaves must be rationals".into(),
        }),
        (Task::Classification { .. }, Output::Value(v)) => Err(ModelError::BadLeaf {
            node,
            value: rational::render(v),
            reason: "classification leaves must name a class".into(),
        }),
    }
}

/// A target sample (v, q) with q = τ(v).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sample {
    pub point: Vec<usize>,
    pub output: Output,
}

impl Sample {
    pub fn new(model: &TreeModel, point: Vec<usize>) -> Result<Self, InstanceError> {
        let output = model.evaluate(&point)?.clone();
        Ok(Sample { point, output })
    }
}

/// Fraction of 𝔽 covered by a path's literals, times |𝔽|; used to check the
/// partition property.
pub fn path_volume(space: &FeatureSpace, path: &Path) -> BigInt {
    (0..space.len()).fold(BigInt::from(1), |acc, i| {
        let n = path.literal(i).map_or(space.feature(i).size(), ValueSet::len);
        acc * n
    })
}
