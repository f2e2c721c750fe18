//! Structural role comparison across two graphs.
//!
//! A module's role in one graph is its vector of per-layer percentile hub
//! ranks. Roles are compared by cosine similarity, so a module keeps its
//! role when the same architecture is rebuilt with different names.

use std::collections::HashSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::MultilayerGraph;
use crate::metrics::{self, MetricsError};

/// Rows at or above this similarity are reported as structural matches.
pub const STRUCTURAL_MATCH_THRESHOLD: f64 = 0.65;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TransferError {
    #[error("unknown layer {0:?}")]
    UnknownLayer(String),
    #[error("unknown node {0:?}")]
    UnknownNode(String),
    #[error("role vectors differ in length ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
    #[error("invalid alignment: {0}")]
    InvalidAlignment(String),
}

impl From<MetricsError> for TransferError {
    fn from(e: MetricsError) -> Self {
        match e {
            MetricsError::UnknownLayer(l) => TransferError::UnknownLayer(l),
            other => TransferError::InvalidAlignment(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoleVector {
    pub module: String,
    /// Percentile hub rank per layer, 1 for the top hub, 0 for the bottom.
    pub components: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Alignment {
    /// (layer in A, layer in B)
    pub layer_pairs: Vec<(String, String)>,
    /// (module in A, module in B)
    #[serde(default)]
    pub module_pairs: Vec<(String, String)>,
}

impl Alignment {
    /// Same layer names on both sides, every node of `g` paired with itself.
    pub fn identity(g: &MultilayerGraph) -> Self {
        Self {
            layer_pairs: g.layers.iter().map(|l| (l.name.clone(), l.name.clone())).collect(),
            module_pairs: g.node_ids().map(|id| (id.to_string(), id.to_string())).collect(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, TransferError> {
        serde_json::from_str(text).map_err(|e| TransferError::InvalidAlignment(e.to_string()))
    }

    pub fn validate(&self, a: &MultilayerGraph, b: &MultilayerGraph) -> Result<(), TransferError> {
        if self.layer_pairs.is_empty() {
            return Err(TransferError::InvalidAlignment("no layer pairs".into()));
        }
        for (la, lb) in &self.layer_pairs {
            for (g, l) in [(a, la), (b, lb)] {
                if g.layer(l).is_none() {
                    return Err(TransferError::UnknownLayer(l.clone()));
                }
            }
        }
        let (mut left, mut right) = (HashSet::new(), HashSet::new());
        for (ma, mb) in &self.module_pairs {
            if a.node_position(ma).is_none() {
                return Err(TransferError::UnknownNode(ma.clone()));
            }
            if b.node_position(mb).is_none() {
                return Err(TransferError::UnknownNode(mb.clone()));
            }
            if !left.insert(ma.as_str()) || !right.insert(mb.as_str()) {
                return Err(TransferError::InvalidAlignment(format!(
                    "module repeated in pair ({ma}, {mb})"
                )));
            }
        }
        Ok(())
    }
}

/// Descending average-tie rank of the node at `pos` (1 = largest degree).
fn descending_rank(graph: &MultilayerGraph, layer: &str, pos: usize) -> Result<f64, TransferError> {
    let l = graph
        .layer(layer)
        .ok_or_else(|| TransferError::UnknownLayer(layer.to_string()))?;
    let hub = metrics::degree_vector(graph, layer, l.weighted)?;
    let ascending = metrics::mid_ranks(&hub.values);
    Ok(hub.values.len() as f64 + 1.0 - ascending[pos])
}

fn position(graph: &MultilayerGraph, module: &str) -> Result<usize, TransferError> {
    graph
        .node_position(module)
        .ok_or_else(|| TransferError::UnknownNode(module.to_string()))
}

/// Role of `module` over `layers`. Weighted layers rank by weighted degree.
pub fn role_vector(graph: &MultilayerGraph, module: &str, layers: &[String]) -> Result<RoleVector, TransferError> {
    let pos = position(graph, module)?;
    let n = graph.node_count();
    let components = layers
        .iter()
        .map(|layer| {
            let rank = descending_rank(graph, layer, pos)?;
            Ok(if n == 1 {
                1.0
            } else {
                1.0 - (rank - 1.0) / (n as f64 - 1.0)
            })
        })
        .collect::<Result<_, TransferError>>()?;
    Ok(RoleVector {
        module: module.to_string(),
        components,
    })
}

/// Cosine similarity of the components. Two zero vectors are identical
/// roles (1); exactly one zero vector gives 0.
pub fn role_similarity(a: &RoleVector, b: &RoleVector) -> Result<f64, TransferError> {
    let (x, y) = (&a.components, &b.components);
    if x.len() != y.len() || x.is_empty() {
        return Err(TransferError::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    let dot: f64 = x.iter().zip(y).map(|(p, q)| p * q).sum();
    let xx: f64 = x.iter().map(|p| p * p).sum();
    let yy: f64 = y.iter().map(|q| q * q).sum();
    Ok(match (xx == 0.0, yy == 0.0) {
        (true, true) => 1.0,
        (true, false) | (false, true) => 0.0,
        _ => (dot / (xx * yy).sqrt()).clamp(0.0, 1.0),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoleMatch {
    pub module_a: String,
    pub module_b: String,
    pub similarity: f64,
    pub structural_match: bool,
}

/// One row per module pair, most similar first; ties keep alignment order.
pub fn compare_graphs(
    a: &MultilayerGraph,
    b: &MultilayerGraph,
    alignment: &Alignment,
) -> Result<Vec<RoleMatch>, TransferError> {
    alignment.validate(a, b)?;
    let (layers_a, layers_b): (Vec<String>, Vec<String>) = alignment.layer_pairs.iter().cloned().unzip();
    let mut rows = alignment
        .module_pairs
        .iter()
        .map(|(ma, mb)| {
            let similarity = role_similarity(&role_vector(a, ma, &layers_a)?, &role_vector(b, mb, &layers_b)?)?;
            Ok(RoleMatch {
                module_a: ma.clone(),
                module_b: mb.clone(),
                similarity,
                structural_match: similarity >= STRUCTURAL_MATCH_THRESHOLD,
            })
        })
        .collect::<Result<Vec<_>, TransferError>>()?;
    rows.sort_by(|x, y| y.similarity.total_cmp(&x.similarity));
    Ok(rows)
}

pub fn render_table(rows: &[RoleMatch]) -> String {
    let wa = rows.iter().map(|r| r.module_a.len()).max().unwrap_or(0).max("module_a".len());
    let wb = rows.iter().map(|r| r.module_b.len()).max().unwrap_or(0).max("module_b".len());
    let mut out = format!("{:<wa$}  {:<wb$}  similarity  match\n", "module_a", "module_b");
    for r in rows {
        let _ = writeln!(
            out,
            "{:<wa$}  {:<wb$}  {:>10.4}  {}",
            r.module_a,
            r.module_b,
            r.similarity,
            if r.structural_match { "yes" } else { "no" }
        );
    }
    out
}

/// True iff `module`'s descending average-tie rank in `layer` is at most
/// `max_rank`.
pub fn hub_identity_check(
    graph: &MultilayerGraph,
    layer: &str,
    module: &str,
    max_rank: u32,
) -> Result<bool, TransferError> {
    let pos = position(graph, module)?;
    Ok(descending_rank(graph, layer, pos)? <= max_rank as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Edge, Layer, Node};

    fn star() -> MultilayerGraph {
        // hub "h" with leaves a, b; "c" isolated in the first layer
        MultilayerGraph::new(
            "star",
            ["h", "a", "b", "c"].into_iter().map(Node::new).collect(),
            vec![
                Layer::new("x", false, false).with_edges([Edge::new("h", "a"), Edge::new("h", "b")]),
                Layer::new("y", true, false).with_edges([Edge::new("a", "h"), Edge::new("b", "h"), Edge::new("c", "h")]),
            ],
        )
        .unwrap()
    }

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn top_and_bottom() {
        let g = star();
        let layers = names(&["x", "y"]);
        assert_eq!(role_vector(&g, "h", &layers).unwrap().components, vec![1.0, 1.0]);
        assert_eq!(role_vector(&g, "c", &layers).unwrap().components[0], 0.0);
    }

    #[test]
    fn second_of_three() {
        let g = MultilayerGraph::new(
            "path",
            ["a", "b", "c"].into_iter().map(Node::new).collect(),
            vec![Layer::new("l", true, false).with_edges([Edge::new("a", "b"), Edge::new("a", "c"), Edge::new("b", "a")])],
        );
        // a:3, b:2, c:1 but a->b and b->a are distinct directed edges
        let g = g.unwrap();
        assert_eq!(role_vector(&g, "b", &names(&["l"])).unwrap().components, vec![0.5]);
    }

    #[test]
    fn ties_share_average_rank() {
        let g = star();
        // a, b tie at degree 1 in x, ranks 2 and 3 -> 2.5, percentile 1 - 1.5/3
        let v = role_vector(&g, "a", &names(&["x"])).unwrap();
        assert!((v.components[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn single_node_is_top() {
        let g = MultilayerGraph::new("one", vec![Node::new("m")], vec![Layer::new("l", false, false)]).unwrap();
        assert_eq!(role_vector(&g, "m", &names(&["l"])).unwrap().components, vec![1.0]);
    }

    #[test]
    fn similarity_cases() {
        let rv = |c: Vec<f64>| RoleVector { module: "m".into(), components: c };
        assert_eq!(role_similarity(&rv(vec![0.3, 0.7]), &rv(vec![0.3, 0.7])).unwrap(), 1.0);
        assert_eq!(role_similarity(&rv(vec![1.0, 0.0]), &rv(vec![0.0, 1.0])).unwrap(), 0.0);
        assert_eq!(role_similarity(&rv(vec![0.0, 0.0]), &rv(vec![0.0, 0.0])).unwrap(), 1.0);
        assert_eq!(role_similarity(&rv(vec![0.0, 0.0]), &rv(vec![0.5, 0.0])).unwrap(), 0.0);
        // cos 45 degrees
        let s = role_similarity(&rv(vec![1.0, 0.0]), &rv(vec![1.0, 1.0])).unwrap();
        assert!((s - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert_eq!(
            role_similarity(&rv(vec![1.0]), &rv(vec![1.0, 0.0])),
            Err(TransferError::LengthMismatch { left: 1, right: 2 })
        );
    }

    #[test]
    fn relabelled_copy_matches_itself() {
        let g = star();
        let rename = |s: &str| format!("{s}_js");
        let copy = MultilayerGraph::new(
            "copy",
            g.nodes.iter().rev().map(|n| Node::new(rename(&n.id))).collect(),
            g.layers
                .iter()
                .map(|l| {
                    let mut l = l.clone();
                    l.edges.iter_mut().for_each(|e| {
                        e.src = rename(&e.src);
                        e.dst = rename(&e.dst);
                    });
                    l
                })
                .collect(),
        )
        .unwrap();
        let mut alignment = Alignment::identity(&g);
        alignment.module_pairs.iter_mut().for_each(|(_, b)| *b = rename(b));
        let rows = compare_graphs(&g, &copy, &alignment).unwrap();
        assert_eq!(rows.len(), 4);
        assert!(rows.iter().all(|r| r.similarity == 1.0 && r.structural_match));
    }

    #[test]
    fn rows_sorted_and_flagged() {
        let g = star();
        let alignment = Alignment {
            layer_pairs: vec![("x".into(), "x".into()), ("y".into(), "y".into())],
            module_pairs: vec![("c".into(), "a".into()), ("h".into(), "h".into())],
        };
        let rows = compare_graphs(&g, &g, &alignment).unwrap();
        assert_eq!(rows[0].module_a, "h");
        assert!(rows[0].similarity >= rows[1].similarity);
        assert!(rows[0].structural_match);
        assert!(render_table(&rows).contains("yes"));
        let empty = Alignment { module_pairs: vec![], ..alignment };
        assert!(compare_graphs(&g, &g, &empty).unwrap().is_empty());
    }

    #[test]
    fn alignment_errors() {
        let g = star();
        let bad_layer = Alignment { layer_pairs: vec![("x".into(), "zz".into())], module_pairs: vec![] };
        assert_eq!(bad_layer.validate(&g, &g), Err(TransferError::UnknownLayer("zz".into())));
        let repeated = Alignment {
            layer_pairs: vec![("x".into(), "x".into())],
            module_pairs: vec![("h".into(), "a".into()), ("h".into(), "b".into())],
        };
        assert!(matches!(repeated.validate(&g, &g), Err(TransferError::InvalidAlignment(_))));
        let unknown = Alignment { layer_pairs: vec![("x".into(), "x".into())], module_pairs: vec![("q".into(), "h".into())] };
        assert_eq!(unknown.validate(&g, &g), Err(TransferError::UnknownNode("q".into())));
        assert!(Alignment::from_json(r#"{"layer_pairs": [["x","x"]], "extra": 1}"#).is_err());
    }

    #[test]
    fn hub_identity() {
        let g = star();
        assert!(hub_identity_check(&g, "y", "h", 1).unwrap());
        assert!(!hub_identity_check(&g, "x", "a", 2).unwrap());
        assert!(hub_identity_check(&g, "x", "a", 3).unwrap());
        assert_eq!(hub_identity_check(&g, "q", "h", 1), Err(TransferError::UnknownLayer("q".into())));
        assert_eq!(hub_identity_check(&g, "x", "q", 1), Err(TransferError::UnknownNode("q".into())));
    }
}
