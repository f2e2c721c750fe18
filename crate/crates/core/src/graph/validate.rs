use std::collections::HashSet;
use std::fmt;

use super::MultilayerGraph;

/// One broken graph invariant, naming the offending element.
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    NoNodes,
    EmptyNodeId { position: usize },
    DuplicateNode { id: String },
    NonFiniteAttr { node: String, attr: String },
    EmptyLayerName { position: usize },
    DuplicateLayer { name: String },
    UnknownEndpoint { layer: String, id: String },
    SelfLoop { layer: String, node: String },
    DuplicateEdge { layer: String, src: String, dst: String },
    BadWeight { layer: String, src: String, dst: String, weight: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoNodes => write!(f, "NoNodes: graph has no nodes"),
            Violation::EmptyNodeId { position } => {
                write!(f, "EmptyNodeId: node at position {position} has an empty id")
            }
            Violation::DuplicateNode { id } => write!(f, "DuplicateNode: {id:?}"),
            Violation::NonFiniteAttr { node, attr } => {
                write!(f, "NonFiniteAttr: node {node:?} attribute {attr:?}")
            }
            Violation::EmptyLayerName { position } => {
                write!(f, "EmptyLayerName: layer at position {position}")
            }
            Violation::DuplicateLayer { name } => write!(f, "DuplicateLayer: {name:?}"),
            Violation::UnknownEndpoint { layer, id } => {
                write!(f, "UnknownEndpoint: layer {layer:?} references {id:?}")
            }
            Violation::SelfLoop { layer, node } => {
                write!(f, "SelfLoop: layer {layer:?} node {node:?}")
            }
            Violation::DuplicateEdge { layer, src, dst } => {
                write!(f, "DuplicateEdge: layer {layer:?} edge {src:?}-{dst:?}")
            }
            Violation::BadWeight {
                layer,
                src,
                dst,
                weight,
            } => write!(
                f,
                "BadWeight: layer {layer:?} edge {src:?}-{dst:?} weight {weight}"
            ),
        }
    }
}

/// Lists every invariant violation in document order. Empty means valid.
pub fn validate(graph: &MultilayerGraph) -> Vec<Violation> {
    let mut out = Vec::new();
    if graph.nodes.is_empty() {
        out.push(Violation::NoNodes);
    }

    let mut ids = HashSet::new();
    for (position, node) in graph.nodes.iter().enumerate() {
        if node.id.is_empty() {
            out.push(Violation::EmptyNodeId { position });
        } else if !ids.insert(node.id.as_str()) {
            out.push(Violation::DuplicateNode {
                id: node.id.clone(),
            });
        }
        for (attr, value) in &node.attrs {
            if !value.is_finite() {
                out.push(Violation::NonFiniteAttr {
                    node: node.id.clone(),
                    attr: attr.clone(),
                });
            }
        }
    }

    let mut layer_names = HashSet::new();
    for (position, layer) in graph.layers.iter().enumerate() {
        if layer.name.is_empty() {
            out.push(Violation::EmptyLayerName { position });
        } else if !layer_names.insert(layer.name.as_str()) {
            out.push(Violation::DuplicateLayer {
                name: layer.name.clone(),
            });
        }

        let mut seen: HashSet<(&str, &str)> = HashSet::new();
        for edge in &layer.edges {
            let mut endpoints_ok = true;
            for id in [&edge.src, &edge.dst] {
                if !ids.contains(id.as_str()) {
                    endpoints_ok = false;
                    out.push(Violation::UnknownEndpoint {
                        layer: layer.name.clone(),
                        id: id.clone(),
                    });
                }
            }
            if edge.src == edge.dst {
                out.push(Violation::SelfLoop {
                    layer: layer.name.clone(),
                    node: edge.src.clone(),
                });
            }
            let weight_ok = edge.weight.is_finite()
                && edge.weight > 0.0
                && (layer.weighted || edge.weight == 1.0);
            if !weight_ok {
                out.push(Violation::BadWeight {
                    layer: layer.name.clone(),
                    src: edge.src.clone(),
                    dst: edge.dst.clone(),
                    weight: edge.weight,
                });
            }
            if endpoints_ok {
                let key = if layer.directed || edge.src <= edge.dst {
                    (edge.src.as_str(), edge.dst.as_str())
                } else {
                    (edge.dst.as_str(), edge.src.as_str())
                };
                if !seen.insert(key) {
                    out.push(Violation::DuplicateEdge {
                        layer: layer.name.clone(),
                        src: edge.src.clone(),
                        dst: edge.dst.clone(),
                    });
                }
            }
        }
    }
    out
}
