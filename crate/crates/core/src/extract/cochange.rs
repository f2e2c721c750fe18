use std::collections::{BTreeMap, BTreeSet};

use super::{CommitRecord, ModuleMap};
use crate::graph::{Edge, GrammarClass, Layer};

/// Commits touching more distinct modules than this are treated as bulk
/// changes (imports, reformatting) and skipped.
pub const DEFAULT_BULK_THRESHOLD: usize = 30;

fn commit_modules(commit: &CommitRecord, map: &ModuleMap) -> BTreeSet<String> {
    commit.files.iter().filter_map(|f| map.resolve(f)).collect()
}

/// Every module any commit touches, sorted.
pub fn cochange_modules(commits: &[CommitRecord], map: &ModuleMap) -> Vec<String> {
    commits
        .iter()
        .flat_map(|c| commit_modules(c, map))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}

/// Undirected weighted `co_change` layer: the weight of `{a, b}` is the
/// number of surviving commits whose module set contains both.
pub fn build_cochange_layer(commits: &[CommitRecord], map: &ModuleMap, bulk_threshold: usize) -> Layer {
    let mut weights: BTreeMap<(String, String), u64> = BTreeMap::new();
    for commit in commits {
        let modules: Vec<String> = commit_modules(commit, map).into_iter().collect();
        if modules.len() > bulk_threshold {
            continue;
        }
        for (i, a) in modules.iter().enumerate() {
            for b in &modules[i + 1..] {
                *weights.entry((a.clone(), b.clone())).or_default() += 1;
            }
        }
    }
    Layer::new("co_change", false, true)
        .with_class(GrammarClass::Behavioral)
        .with_edges(
            weights
                .into_iter()
                .map(|((a, b), w)| Edge::weighted(a, b, w as f64)),
        )
}
