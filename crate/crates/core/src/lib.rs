//! Formal explanations for tree models over discrete feature spaces.
//!
//! Given a decision or regression tree, a sample and a similarity predicate,
//! this crate decides weak abductive/contrastive explanations by path
//! inspection, computes one subset-minimal AXp or CXp by deletion, enumerates
//! all of them with a MARCO-style dual search, answers relevancy and
//! necessity queries, searches constrained adversarial examples, and computes
//! exact SHAP scores in rational arithmetic.
//!
//! ```
//! use fxp_core::{fixtures, Problem, Similarity, FeatureSet};
//! use fxp_core::rational::ratio;
//!
//! let model = fixtures::running_example();
//! let problem = Problem::from_point(&model, vec![1, 1, 2], Similarity::threshold(ratio(1, 2), true)).unwrap();
//! let axp = fxp_core::explain::one_axp(&problem, &[0, 1, 2]).unwrap();
//! assert_eq!(axp.features, FeatureSet::from_ids([1]));
//! ```

pub mod attribution;
pub mod enumerate;
pub mod error;
pub mod explain;
pub mod features;
pub mod fixtures;
pub mod format;
pub mod model;
pub mod oracle;
pub mod rational;
pub mod semantics;
pub mod synth;

pub use attribution::{audit, shap_all, AuditFlag, AuditReport, ShapOptions, ShapReport};
pub use enumerate::{enumerate_explanations, minimal_hitting_sets, necessary_features_fast, relevant_features, EnumerationState, RelevancyReport};
pub use error::{Error, InstanceError, ModelError, Result};
pub use explain::{inflate, one_axp, one_cxp, Explanation, ExplanationKind, InflatedExplanation};
pub use features::FeatureSet;
pub use format::{parse_instance, parse_model, print_model};
pub use model::{FeatureSpace, Output, Path, Restriction, Sample, Task, TreeModel, Value};
pub use oracle::{AdversarialQuery, Epsilon, Norm, Witness};
pub use rational::Rational;
pub use semantics::{Comparison, Problem, Similarity};

/// Default cap on the number of points a brute-force scan may visit.
pub const DEFAULT_BRUTE_CAP: u128 = 20_000;
