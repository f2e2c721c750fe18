//! Software layers from repository evidence.
//!
//! - declared imports (d1): [`scan_imports`] over source text
//! - structural coupling (d2): [`build_structural_coupling`] from an import layer
//! - behavioral co-change (d3): [`build_cochange_layer`] from `git log` output
//!
//! Nothing in here touches the filesystem, a clock, or a repository; callers
//! pass text in.

mod cochange;
mod coupling;
mod gitlog;
mod imports;
mod modules;

use thiserror::Error;

pub use cochange::{build_cochange_layer, cochange_modules, DEFAULT_BULK_THRESHOLD};
pub use coupling::build_structural_coupling;
pub use gitlog::{parse_git_log, CommitRecord, GIT_LOG_COMMAND};
pub use imports::{scan_imports, source_modules, ImportPatternSet};
pub use modules::{DefaultModule, ModuleMap, ModuleRule};

use crate::graph::{GraphError, Layer, MultilayerGraph, Node};

#[derive(Debug, Error, PartialEq)]
pub enum ExtractError {
    #[error("malformed git log at line {line}: {message}")]
    MalformedLog { line: usize, message: String },
    #[error("layer {0:?} is not a directed declared-import layer")]
    BadLayerKind(String),
    #[error("bad import pattern {pattern:?}: {message}")]
    BadPattern { pattern: String, message: String },
    #[error("bad module map: {0}")]
    BadModuleMap(String),
}

/// Wraps extracted layers into a validated graph over `modules` (in the
/// given order). Layers may only reference listed modules.
pub fn assemble_graph(
    name: impl Into<String>,
    modules: impl IntoIterator<Item = String>,
    layers: Vec<Layer>,
) -> Result<MultilayerGraph, GraphError> {
    MultilayerGraph::new(name, modules.into_iter().map(Node::new).collect(), layers)
}

/// Adds `layer` to `graph`, appending any modules the graph lacks (sorted)
/// to the end of the node order so existing indices are preserved.
pub fn merge_layer(graph: &MultilayerGraph, layer: Layer, modules: &[String]) -> Result<MultilayerGraph, GraphError> {
    let mut g = graph.clone();
    let known: std::collections::HashSet<String> = g.node_ids().map(str::to_string).collect();
    let mut extra: Vec<&String> = modules.iter().filter(|m| !known.contains(*m)).collect();
    extra.sort();
    extra.dedup();
    g.nodes.extend(extra.into_iter().map(|m| Node::new(m.clone())));
    g.layers.retain(|l| l.name != layer.name);
    g.layers.push(layer);
    MultilayerGraph::new(g.name, g.nodes, g.layers)
}
