//! Simulation library for majority votes of empirical risk minimizers.
//!
//! The crate provides exact interval-set algebra on (0, 1], two hard
//! instances (a finite domain and the unit interval), deliberately bad ERMs,
//! voting learners built on top of them, exact error evaluation, closed-form
//! bound shapes, and a deterministic parallel trial harness.

pub mod bounds;
pub mod erms;
pub mod error;
pub mod evaluation;
pub mod geometry;
pub mod instances;
pub mod learners;
pub mod stats;

pub use erms::{ErmKind, Fit, Hypothesis, IndexSelection, PartitionScheme};
pub use error::{Error, Result};
pub use evaluation::{ErrorMethod, ErrorReport};
pub use geometry::{Interval, IntervalSet};
pub use instances::{DomainKind, DomainPoint, Instance, Sample};
pub use learners::{LearnerKind, LearnerOutput, LearnerSpec};
pub use stats::{ErrorStats, ExperimentConfig, ExperimentResult, NBasis, TrialRecord};
