//! Hub persistence analysis for multilayer networks.
//!
//! A multilayer graph shares one node set across several named edge layers.
//! Each layer yields a hub vector (total degree per node); correlating hub
//! vectors across a pre-registered "similar" and "dissimilar" layer pair and
//! comparing the two coefficients is the experiment this crate runs.
//!
//! Module map:
//!
//! - [`graph`]: multilayer graph model, JSON schema, validation, seeded random controls
//! - [`metrics`]: hub vectors, mid-ranks, Pearson and Spearman coefficients
//! - [`stats`]: seeded permutation tests, Student-t fallback, exact binomial tails
//! - [`experiment`]: similar-vs-dissimilar experiments and verdict rules
//! - [`prereg`]: canonical hypothesis documents, SHA-256 digests, append-only ledger
//! - [`extract`]: software layers from source imports and `git log` co-change
//! - [`transfer`]: cross-graph structural role comparison
//! - [`rng`]: the pinned random stream contract shared by every seeded routine

pub mod experiment;
pub mod extract;
pub mod graph;
pub mod metrics;
mod par;
pub mod prereg;
pub mod rng;
pub mod stats;
pub mod transfer;

pub use graph::{Edge, GrammarClass, Layer, MultilayerGraph, Node};
pub use metrics::{CorrelationValue, HubVector, RankVector};
