use std::collections::{BTreeMap, BTreeSet};

use super::ExtractError;
use crate::graph::{Edge, GrammarClass, Layer};

/// Undirected `structural_coupling` layer: `{a, b}` iff the import
/// out-neighbourhoods of `a` and `b` share at least one target.
pub fn build_structural_coupling(imports: &Layer) -> Result<Layer, ExtractError> {
    let declared = matches!(imports.grammar_class, None | Some(GrammarClass::Declared));
    if !imports.directed || !declared {
        return Err(ExtractError::BadLayerKind(imports.name.clone()));
    }
    let mut out: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for e in &imports.edges {
        out.entry(e.src.as_str()).or_default().insert(e.dst.as_str());
    }
    let sources: Vec<(&str, &BTreeSet<&str>)> = out.iter().map(|(k, v)| (*k, v)).collect();
    let mut edges = Vec::new();
    for (i, (a, na)) in sources.iter().enumerate() {
        for (b, nb) in &sources[i + 1..] {
            if !na.is_disjoint(nb) {
                edges.push(Edge::new(*a, *b));
            }
        }
    }
    Ok(Layer::new("structural_coupling", false, false)
        .with_class(GrammarClass::Structural)
        .with_edges(edges))
}
