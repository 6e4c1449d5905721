//! Observation-based models of imperfect-information games built on top of
//! perfect-information game trees: induced partitions, property checkers,
//! the stable modification, coarse models and a reference corpus.

pub mod cli;
pub mod corpus;
pub mod error;
pub mod game;
pub mod observations;
pub mod partitions;
pub mod properties;
pub mod transforms;

pub use error::{GameError, TreeViolation, ValidationErrors};
pub use game::{ActionLabel, ClassicalPartition, GameTree, History, NodeId, PlayerId, RawGame};
pub use observations::{ObservationAssignment, ObservationHistories, Token, Variant};
pub use partitions::{induce_partition, Partition};
