use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Violations of the model invariants, detected while building a [`TreeModel`].
///
/// [`TreeModel`]: crate::model::TreeModel
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("no features declared")]
    NoFeatures,
    #[error("too many features: {0} (at most 64 are supported)")]
    TooManyFeatures(usize),
    #[error("empty domain for feature {0}")]
    EmptyDomain(String),
    #[error("duplicate value {value} in domain of feature {feature}")]
    DuplicateValue { feature: String, value: String },
    #[error("duplicate feature name {0}")]
    DuplicateFeature(String),
    #[error("domain of feature {0} mixes integer and named values")]
    MixedDomain(String),
    #[error("classification task declares no classes")]
    MissingClasses,
    #[error("duplicate class {0}")]
    DuplicateClass(String),
    #[error("regression task must not declare classes")]
    UnexpectedClasses,
    #[error("unknown feature {feature} at node {node}")]
    UnknownFeature { node: i64, feature: String },
    #[error("duplicate node id {0}")]
    DuplicateNode(i64),
    #[error("root node {0} is not defined")]
    MissingRoot(i64),
    #[error("node {node} points to undefined child {child}")]
    UnknownChild { node: i64, child: i64 },
    #[error("node {0} has more than one parent")]
    MultipleParents(i64),
    #[error("root node {0} has a parent")]
    RootHasParent(i64),
    #[error("unreachable node {0}")]
    UnreachableNode(i64),
    #[error("internal node {0} has no edges")]
    NoEdges(i64),
    #[error("empty edge value set at node {0}")]
    EmptyEdge(i64),
    #[error("value {value} at node {node} is not in the domain of feature {feature}")]
    ValueNotInDomain { node: i64, feature: String, value: String },
    #[error("edges do not partition domain of feature {feature} at node {node}")]
    EdgesNotPartition { node: i64, feature: String },
    #[error("dead branch: empty value set for feature {feature} on the path to node {node}")]
    DeadBranch { node: i64, feature: String },
    #[error("constant model: every leaf has the same output")]
    ConstantModel,
    #[error("leaf {node} has invalid output {value}: {reason}")]
    BadLeaf { node: i64, value: String, reason: String },
}

impl ModelError {
    /// Name of the violated invariant, stable across releases.
    pub fn invariant(&self) -> &'static str {
        match self {
            ModelError::NoFeatures => "NoFeatures",
            ModelError::TooManyFeatures(_) => "TooManyFeatures",
            ModelError::EmptyDomain(_) => "EmptyDomain",
            ModelError::DuplicateValue { .. } => "DuplicateValue",
            ModelError::DuplicateFeature(_) => "DuplicateFeature",
            ModelError::MixedDomain(_) => "MixedDomain",
            ModelError::MissingClasses => "MissingClasses",
            ModelError::DuplicateClass(_) => "DuplicateClass",
            ModelError::UnexpectedClasses => "UnexpectedClasses",
            ModelError::UnknownFeature { .. } => "UnknownFeature",
            ModelError::DuplicateNode(_) => "DuplicateNode",
            ModelError::MissingRoot(_) => "MissingRoot",
            ModelError::UnknownChild { .. } => "UnknownChild",
            ModelError::MultipleParents(_) => "MultipleParents",
            ModelError::RootHasParent(_) => "RootHasParent",
            ModelError::UnreachableNode(_) => "UnreachableNode",
            ModelError::NoEdges(_) => "NoEdges",
            ModelError::EmptyEdge(_) => "EmptyEdge",
            ModelError::ValueNotInDomain { .. } => "ValueNotInDomain",
            ModelError::EdgesNotPartition { .. } => "EdgesNotPartition",
            ModelError::DeadBranch { .. } => "DeadBranch",
            ModelError::ConstantModel => "ConstantModel",
            ModelError::BadLeaf { .. } => "BadLeaf",
        }
    }
}

/// Problems with an instance (sample) relative to a model.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("unknown feature {0}")]
    UnknownFeature(String),
    #[error("missing value for feature {0}")]
    MissingFeature(String),
    #[error("domain violation: {value} is not in the domain of feature {feature}")]
    DomainViolation { feature: String, value: String },
    #[error("point has {got} coordinates, expected {expected}")]
    WrongArity { expected: usize, got: usize },
    #[error("invalid output {0}")]
    BadOutput(String),
    #[error("declared output {declared} does not match model output {actual}")]
    OutputMismatch { declared: String, actual: String },
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("invalid model: {0}")]
    Model(#[from] ModelError),
    #[error("invalid instance: {0}")]
    Instance(#[from] InstanceError),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("brute-force cap exceeded: {needed} points requested, cap is {cap}")]
    CapExceeded { needed: u128, cap: u128 },
    #[error("feature cap exceeded: {features} features, cap is {cap}")]
    FeatureCapExceeded { features: usize, cap: usize },
    #[error("enumeration limit of {0} explanations reached before exhaustion")]
    LimitReached(usize),
    #[error("no CXp exists; every AXp is ∅")]
    NoCxp,
    #[error("empty set in hitting-set input: no hitting set exists")]
    EmptySet,
    #[error("efficiency violation: scores sum to {sum}, expected {expected}")]
    Efficiency { sum: String, expected: String },
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Syntax { line: err.line(), column: err.column(), message: err.to_string() }
    }
}
