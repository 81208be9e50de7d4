//! Spatial decision trees over the interval logic of hyperrectangles.
//!
//! Images are finite grids of pixels; decisions test whether some
//! rectangle reachable from the current reference rectangles (through an
//! Allen-relation tuple, or an RCC8/RCC5 relation built from such tuples)
//! has at least a fraction γ of pixels with `A ⋈ a`. Trees are grown
//! greedily by information gain, C4.5-style.
//!
//! Start with the cargo examples: `cargo run --example allen_relations`.

pub mod data;
pub mod error;
pub mod experiment;
pub mod geometry;
pub mod learner;
pub mod logic;
pub mod metrics;
pub mod model;
pub mod oracle;
pub mod tree;

pub use error::{Error, Result};
pub use geometry::{AllenRelation, GridBounds, HyperRectangle, Interval, RelationTuple};
pub use learner::{learn, LearnerConfig, ThresholdPolicy};
pub use logic::{Comparator, Decision, FragmentId, Gamma, OperatorSpec};
pub use model::{AnchoredDataset, R0Policy, SpatialInstance};
pub use tree::{RenderFormat, SpatialDecisionTree};
