//! Multilayer graph model and its JSON document form.
//!
//! Node order in a document is authoritative: every hub vector, rank vector
//! and permutation indexes nodes by their position in [`MultilayerGraph::nodes`].

mod random;
mod validate;

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use random::{generate_random_control, DEFAULT_EDGE_PROB};
pub use validate::{validate, Violation};

/// Grammar class of a layer: declared (d1), structural (d2) or behavioral (d3) coupling.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GrammarClass {
    #[serde(rename = "d1")]
    Declared,
    #[serde(rename = "d2")]
    Structural,
    #[serde(rename = "d3")]
    Behavioral,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: String,
    #[serde(default)]
    pub attrs: BTreeMap<String, f64>,
}

impl Node {
    pub fn new(id: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            attrs: BTreeMap::new(),
        }
    }

    pub fn with_attr(mut self, name: impl Into<String>, value: f64) -> Self {
        self.attrs.insert(name.into(), value);
        self
    }
}

fn unit_weight() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub src: String,
    pub dst: String,
    #[serde(default = "unit_weight")]
    pub weight: f64,
}

impl Edge {
    pub fn new(src: impl Into<String>, dst: impl Into<String>) -> Self {
        Self::weighted(src, dst, 1.0)
    }

    pub fn weighted(src: impl Into<String>, dst: impl Into<String>, weight: f64) -> Self {
        Self {
            src: src.into(),
            dst: dst.into(),
            weight,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub name: String,
    pub directed: bool,
    pub weighted: bool,
    #[serde(default)]
    pub grammar_class: Option<GrammarClass>,
    #[serde(default)]
    pub edges: Vec<Edge>,
}

impl Layer {
    pub fn new(name: impl Into<String>, directed: bool, weighted: bool) -> Self {
        Self {
            name: name.into(),
            directed,
            weighted,
            grammar_class: None,
            edges: Vec::new(),
        }
    }

    pub fn with_class(mut self, class: GrammarClass) -> Self {
        self.grammar_class = Some(class);
        self
    }

    pub fn with_edges(mut self, edges: impl IntoIterator<Item = Edge>) -> Self {
        self.edges.extend(edges);
        self
    }
}

/// A shared node set with named edge layers.
///
/// Fields are public so that callers can build graphs incrementally;
/// [`MultilayerGraph::new`] and [`parse_graph`] are the validating entry points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultilayerGraph {
    pub name: String,
    pub nodes: Vec<Node>,
    #[serde(default)]
    pub layers: Vec<Layer>,
}

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("duplicate node id {0:?}")]
    DuplicateNode(String),
    #[error("edge in layer {layer:?} references unknown node {id:?}")]
    UnknownEndpoint { layer: String, id: String },
    #[error("edge {src:?}->{dst:?} in layer {layer:?} has invalid weight {weight}")]
    BadWeight {
        layer: String,
        src: String,
        dst: String,
        weight: f64,
    },
    #[error("invalid graph: {0}")]
    Invalid(Violation),
    #[error("unknown layer {0:?}")]
    UnknownLayer(String),
    #[error("bad parameter: {0}")]
    BadParameter(String),
}

impl From<Violation> for GraphError {
    fn from(v: Violation) -> Self {
        match v {
            Violation::DuplicateNode { id } => GraphError::DuplicateNode(id),
            Violation::UnknownEndpoint { layer, id } => GraphError::UnknownEndpoint { layer, id },
            Violation::BadWeight {
                layer,
                src,
                dst,
                weight,
            } => GraphError::BadWeight {
                layer,
                src,
                dst,
                weight,
            },
            other => GraphError::Invalid(other),
        }
    }
}

impl MultilayerGraph {
    /// Builds and validates a graph; the first violation becomes the error.
    pub fn new(name: impl Into<String>, nodes: Vec<Node>, layers: Vec<Layer>) -> Result<Self, GraphError> {
        let g = Self {
            name: name.into(),
            nodes,
            layers,
        };
        g.check()?;
        Ok(g)
    }

    fn check(&self) -> Result<(), GraphError> {
        match validate(self).into_iter().next() {
            Some(v) => Err(v.into()),
            None => Ok(()),
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn layer_count(&self) -> usize {
        self.layers.len()
    }

    pub fn layer(&self, name: &str) -> Option<&Layer> {
        self.layers.iter().find(|l| l.name == name)
    }

    pub fn require_layer(&self, name: &str) -> Result<&Layer, GraphError> {
        self.layer(name)
            .ok_or_else(|| GraphError::UnknownLayer(name.to_string()))
    }

    pub fn node_position(&self, id: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.id == id)
    }

    /// Map from node id to its index in node order.
    pub fn index(&self) -> HashMap<&str, usize> {
        self.nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.id.as_str(), i))
            .collect()
    }

    pub fn node_ids(&self) -> impl Iterator<Item = &str> {
        self.nodes.iter().map(|n| n.id.as_str())
    }

    /// Pretty JSON document; [`parse_graph`] reads it back to an equal graph.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("graph serialization is infallible")
    }
}

/// Parses and validates a graph document.
pub fn parse_graph(text: &str) -> Result<MultilayerGraph, GraphError> {
    let g: MultilayerGraph =
        serde_json::from_str(text).map_err(|e| GraphError::Schema(e.to_string()))?;
    g.check()?;
    Ok(g)
}
