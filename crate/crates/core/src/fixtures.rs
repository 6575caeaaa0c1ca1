//! The four-leaf regression tree used throughout the docs and tests.
//!
//! x1 ∈ {0,1}, x2 ∈ {0,1}, x3 ∈ {0,1,2}:
//!
//! ```text
//! 1: x1 ── 1 ──> 3: 1/2
//!      └── 0 ──> 2: x3 ── {0,2} ──> 5: 0
//!                     └── 1 ──> 4: x2 ── 0 ──> 6: 9/2
//!                                    └── 1 ──> 7: 9/4
//! ```

use crate::format::parse_model;
use crate::model::TreeModel;

pub const RUNNING_EXAMPLE: &str = include_str!("../../../fixtures/running_example.json");

pub fn running_example() -> TreeModel {
    parse_model(RUNNING_EXAMPLE).expect("bundled fixture is valid")
}
