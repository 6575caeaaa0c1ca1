//! JSON model and instance files.
//!
//! Model file:
//!
//! ```json
//! { "features": [ { "name": "x1", "domain": [0, 1] } ],
//!   "task": "regression",
//!   "root": 1,
//!   "nodes": [ { "id": 1, "feature": "x1", "edges": [ { "values": [0], "child": 2 } ] },
//!              { "id": 2, "leaf": "1/2" } ] }
//! ```
//!
//! Classification models add `"classes": [..]` and name a class at each leaf.
//! Rationals are written as `"p/q"` strings or integers.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{InstanceError, ModelError, Result};
use crate::model::{FeatureDecl, FeatureSpace, Node, NodeBody, NodeSpec, Output, Sample, Task, TreeModel, Value, ValueSet};
use crate::rational::{self, Rational};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    features: Vec<FeatureFile>,
    task: TaskName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    classes: Option<Vec<String>>,
    root: i64,
    nodes: Vec<NodeFile>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FeatureFile {
    name: String,
    domain: Vec<Scalar>,
}

#[derive(Serialize, Deserialize, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
enum TaskName {
    Regression,
    Classification,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum NodeFile {
    Internal(InternalFile),
    Leaf(LeafFile),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InternalFile {
    id: i64,
    feature: String,
    edges: Vec<EdgeFile>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LeafFile {
    id: i64,
    leaf: Scalar,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeFile {
    values: Vec<Scalar>,
    child: i64,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(untagged)]
enum Scalar {
    Int(i64),
    Text(String),
}

impl Scalar {
    fn to_value(&self) -> Value {
        match self {
            Scalar::Int(n) => Value::Int(*n),
            Scalar::Text(s) => Value::Sym(s.clone()),
        }
    }

    fn from_value(v: &Value) -> Self {
        match v {
            Value::Int(n) => Scalar::Int(*n),
            Value::Sym(s) => Scalar::Text(s.clone()),
        }
    }

    fn describe(&self) -> String {
        match self {
            Scalar::Int(n) => n.to_string(),
            Scalar::Text(s) => s.clone(),
        }
    }

    fn to_rational(&self) -> Option<Rational> {
        match self {
            Scalar::Int(n) => Some(rational::int(*n)),
            Scalar::Text(s) => rational::parse(s),
        }
    }

    fn from_rational(r: &Rational) -> Self {
        match (r.is_integer(), i64::try_from(r.numer())) {
            (true, Ok(n)) => Scalar::Int(n),
            _ => Scalar::Text(rational::render(r)),
        }
    }
}

fn parse_output(task: &Task, scalar: &Scalar) -> Option<Output> {
    match task {
        Task::Regression => scalar.to_rational().map(Output::Value),
        Task::Classification { classes } => match scalar {
            Scalar::Text(s) => classes.iter().position(|c| c == s).map(Output::Class),
            Scalar::Int(_) => None,
        },
    }
}

fn output_scalar(model: &TreeModel, output: &Output) -> Scalar {
    match output {
        Output::Value(v) => Scalar::from_rational(v),
        Output::Class(_) => Scalar::Text(model.render_output(output)),
    }
}

/// Parses and validates a model file.
pub fn parse_model(text: &str) -> Result<TreeModel> {
    let file: ModelFile = serde_json::from_str(text)?;

    let decls = file
        .features
        .iter()
        .map(|f| FeatureDecl::new(f.name.clone(), f.domain.iter().map(Scalar::to_value).collect()))
        .collect::<Result<Vec<_>, _>>()?;
    let space = FeatureSpace::new(decls)?;

    let task = match (file.task, file.classes) {
        (TaskName::Regression, None) => Task::Regression,
        (TaskName::Regression, Some(_)) => return Err(ModelError::UnexpectedClasses.into()),
        (TaskName::Classification, None) => return Err(ModelError::MissingClasses.into()),
        (TaskName::Classification, Some(classes)) => Task::Classification { classes },
    };

    let mut specs = Vec::with_capacity(file.nodes.len());
    for node in &file.nodes {
        let spec = match node {
            NodeFile::Leaf(leaf) => {
                let output = parse_output(&task, &leaf.leaf).ok_or_else(|| ModelError::BadLeaf {
                    node: leaf.id,
                    value: leaf.leaf.describe(),
                    reason: match task {
                        Task::Regression => "expected an integer or \"p/q\" rational".into(),
                        Task::Classification { .. } => "not a declared class".into(),
                    },
                })?;
                NodeSpec { id: leaf.id, body: NodeBody::Leaf(output) }
            }
            NodeFile::Internal(internal) => {
                let feature = space.index_of(&internal.feature).ok_or_else(|| ModelError::UnknownFeature {
                    node: internal.id,
                    feature: internal.feature.clone(),
                })?;
                let decl = space.feature(feature);
                let mut edges = Vec::with_capacity(internal.edges.len());
                for edge in &internal.edges {
                    let mut set = ValueSet::empty();
                    for scalar in &edge.values {
                        let x = decl.index_of(&scalar.to_value()).ok_or_else(|| ModelError::ValueNotInDomain {
                            node: internal.id,
                            feature: decl.name().to_string(),
                            value: scalar.describe(),
                        })?;
                        if set.contains(x) {
                            return Err(ModelError::EdgesNotPartition {
                                node: internal.id,
                                feature: decl.name().to_string(),
                            }
                            .into());
                        }
                        set.insert(x);
                    }
                    edges.push((set, edge.child));
                }
                NodeSpec { id: internal.id, body: NodeBody::Internal { feature, edges } }
            }
        };
        specs.push(spec);
    }

    Ok(TreeModel::new(space, task, file.root, specs)?)
}

/// Serializes a model to the file format; `parse_model` inverts it.
pub fn print_model(model: &TreeModel) -> String {
    let space = model.space();
    let features = space
        .features()
        .iter()
        .map(|f| FeatureFile { name: f.name().to_string(), domain: f.domain().iter().map(Scalar::from_value).collect() })
        .collect();
    let (task, classes) = match model.task() {
        Task::Regression => (TaskName::Regression, None),
        Task::Classification { classes } => (TaskName::Classification, Some(classes.clone())),
    };
    let nodes = model
        .nodes()
        .iter()
        .enumerate()
        .map(|(k, node)| match node {
            Node::Leaf { output } => NodeFile::Leaf(LeafFile { id: model.node_id(k), leaf: output_scalar(model, output) }),
            Node::Internal { feature, edges } => {
                let decl = space.feature(*feature);
                NodeFile::Internal(InternalFile {
                    id: model.node_id(k),
                    feature: decl.name().to_string(),
                    edges: edges
                        .iter()
                        .map(|e| EdgeFile {
                            values: e.values.iter().map(|x| Scalar::from_value(&decl.domain()[x])).collect(),
                            child: model.node_id(e.child),
                        })
                        .collect(),
                })
            }
        })
        .collect();
    let file = ModelFile { features, task, classes, root: model.node_id(model.root()), nodes };
    serde_json::to_string_pretty(&file).expect("model serialization is infallible")
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    point: BTreeMap<String, Scalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    output: Option<Scalar>,
}

/// Parses an instance file against a model. The output is recomputed and,
/// when the file declares one, cross-checked.
pub fn parse_instance(text: &str, model: &TreeModel) -> Result<Sample> {
    let file: InstanceFile = serde_json::from_str(text)?;
    let space = model.space();
    for name in file.point.keys() {
        if space.index_of(name).is_none() {
            return Err(InstanceError::UnknownFeature(name.clone()).into());
        }
    }
    let mut point = Vec::with_capacity(space.len());
    for decl in space.features() {
        let scalar = file
            .point
            .get(decl.name())
            .ok_or_else(|| InstanceError::MissingFeature(decl.name().to_string()))?;
        let x = decl.index_of(&scalar.to_value()).ok_or_else(|| InstanceError::DomainViolation {
            feature: decl.name().to_string(),
            value: scalar.describe(),
        })?;
        point.push(x);
    }
    let sample = Sample::new(model, point)?;
    if let Some(declared) = &file.output {
        let parsed = parse_output(model.task(), declared).ok_or_else(|| InstanceError::BadOutput(declared.describe()))?;
        if parsed != sample.output {
            return Err(InstanceError::OutputMismatch {
                declared: declared.describe(),
                actual: model.render_output(&sample.output),
            }
            .into());
        }
    }
    Ok(sample)
}

/// Serializes a sample as an instance file, including its output.
pub fn print_instance(model: &TreeModel, sample: &Sample) -> String {
    let space = model.space();
    let point = space
        .features()
        .iter()
        .zip(&sample.point)
        .map(|(f, &x)| (f.name().to_string(), Scalar::from_value(&f.domain()[x])))
        .collect();
    let file = InstanceFile { point, output: Some(output_scalar(model, &sample.output)) };
    serde_json::to_string_pretty(&file).expect("instance serialization is infallible")
}
