use std::collections::{BTreeMap, BTreeSet};

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::{ExtractError, ModuleMap};
use crate::graph::{Edge, GrammarClass, Layer};
use crate::par;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PatternSetDoc {
    language_label: String,
    line_patterns: Vec<String>,
    #[serde(default)]
    separator: Option<String>,
    #[serde(default)]
    suffixes: Vec<String>,
}

/// Line-anchored regular expressions that pull an import target out of one
/// source line.
///
/// Each pattern must start with `^` and capture the target either in a group
/// named `target` or in group 1. An optional `member` group (the first name
/// after `from x import`) is tried as `target<separator>member` before the
/// bare target. A target resolves to a module, in order:
///
/// 1. leading `separator` and `/` characters are stripped;
/// 2. a target equal to a known module name resolves to it;
/// 3. otherwise `separator` is replaced by `/`, each of `suffixes` (and the
///    bare form) is appended, and the first source path (sorted) equal to or
///    ending in `/<candidate>` supplies the module.
///
/// Unresolved targets are dropped.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "PatternSetDoc", into = "PatternSetDoc")]
pub struct ImportPatternSet {
    doc: PatternSetDoc,
    compiled: Vec<Regex>,
}

impl TryFrom<PatternSetDoc> for ImportPatternSet {
    type Error = ExtractError;

    fn try_from(doc: PatternSetDoc) -> Result<Self, Self::Error> {
        let compiled = doc
            .line_patterns
            .iter()
            .map(|p| {
                let bad = |message: &str| ExtractError::BadPattern {
                    pattern: p.clone(),
                    message: message.to_string(),
                };
                if !p.starts_with('^') {
                    return Err(bad("pattern must be anchored with ^"));
                }
                let re = Regex::new(p).map_err(|e| bad(&e.to_string()))?;
                if re.captures_len() < 2 {
                    return Err(bad("pattern needs a capture group for the target"));
                }
                Ok(re)
            })
            .collect::<Result<_, _>>()?;
        Ok(Self { doc, compiled })
    }
}

impl From<ImportPatternSet> for PatternSetDoc {
    fn from(p: ImportPatternSet) -> Self {
        p.doc
    }
}

impl ImportPatternSet {
    pub fn new(
        language_label: impl Into<String>,
        line_patterns: Vec<String>,
        separator: Option<String>,
        suffixes: Vec<String>,
    ) -> Result<Self, ExtractError> {
        Self::try_from(PatternSetDoc {
            language_label: language_label.into(),
            line_patterns,
            separator,
            suffixes,
        })
    }

    /// `import a.b`, `from a.b import c`, `from .a import c`.
    pub fn python() -> Self {
        Self::new(
            "python",
            vec![
                r"^\s*import\s+(?P<target>[\w.]+)".into(),
                r"^\s*from\s+(?P<target>[\w.]+)\s+import\s+\(?\s*(?P<member>\w+)".into(),
            ],
            Some(".".into()),
            vec![".py".into(), "/__init__.py".into()],
        )
        .expect("built-in patterns compile")
    }

    pub fn from_json(text: &str) -> Result<Self, ExtractError> {
        serde_json::from_str(text).map_err(|e| ExtractError::BadPattern {
            pattern: String::new(),
            message: e.to_string(),
        })
    }

    pub fn language_label(&self) -> &str {
        &self.doc.language_label
    }

    /// Candidate targets per matching pattern, most specific first.
    fn targets<'s>(&'s self, line: &'s str) -> impl Iterator<Item = Vec<String>> + 's {
        let sep = self.doc.separator.as_deref().unwrap_or("/");
        self.compiled.iter().filter_map(move |re| {
            let caps = re.captures(line)?;
            let target = caps.name("target").or_else(|| caps.get(1))?.as_str();
            let mut out = Vec::with_capacity(2);
            if let Some(member) = caps.name("member") {
                let joined = if target.ends_with(sep) {
                    format!("{target}{}", member.as_str())
                } else {
                    format!("{target}{sep}{}", member.as_str())
                };
                out.push(joined);
            }
            out.push(target.to_string());
            Some(out)
        })
    }
}

struct Resolver<'a> {
    modules: BTreeSet<&'a str>,
    /// (path, module), sorted by path.
    paths: Vec<(&'a str, &'a str)>,
    separator: Option<&'a str>,
    suffixes: &'a [String],
}

impl<'a> Resolver<'a> {
    fn resolve(&self, token: &str) -> Option<&'a str> {
        let sep = self.separator.unwrap_or("");
        let mut t = token.trim();
        loop {
            let before = t.len();
            if !sep.is_empty() {
                t = t.trim_start_matches(sep);
            }
            t = t.trim_start_matches('/');
            if t.len() == before {
                break;
            }
        }
        if t.is_empty() {
            return None;
        }
        if let Some(m) = self.modules.get(t) {
            return Some(m);
        }
        let as_path = if sep.is_empty() {
            t.to_string()
        } else {
            t.replace(sep, "/")
        };
        std::iter::once("")
            .chain(self.suffixes.iter().map(String::as_str))
            .map(|suffix| format!("{as_path}{suffix}"))
            .find_map(|candidate| {
                let tail = format!("/{candidate}");
                self.paths
                    .iter()
                    .find(|(p, _)| *p == candidate || p.ends_with(&tail))
                    .map(|(_, m)| *m)
            })
    }
}

/// Modules owning at least one of `sources`, sorted.
pub fn source_modules(sources: &BTreeMap<String, String>, map: &ModuleMap) -> Vec<String> {
    sources
        .keys()
        .filter_map(|p| map.resolve(p))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}

/// Directed unweighted `imports` layer: `a -> b` when a source file of module
/// `a` has a line whose import target resolves to module `b != a`.
pub fn scan_imports(sources: &BTreeMap<String, String>, patterns: &ImportPatternSet, map: &ModuleMap) -> Layer {
    let owned: Vec<(&str, String)> = sources
        .keys()
        .filter_map(|p| map.resolve(p).map(|m| (p.as_str(), m)))
        .collect();
    let resolver = Resolver {
        modules: owned.iter().map(|(_, m)| m.as_str()).collect(),
        paths: owned.iter().map(|(p, m)| (*p, m.as_str())).collect(),
        separator: patterns.doc.separator.as_deref(),
        suffixes: &patterns.doc.suffixes,
    };

    let per_file = par::map_indices(owned.len() as u64, |i| {
        let (path, module) = &owned[i as usize];
        let mut edges = BTreeSet::new();
        for line in sources[*path].lines() {
            for candidates in patterns.targets(line) {
                if let Some(dst) = candidates.iter().find_map(|t| resolver.resolve(t)) {
                    if dst != module {
                        edges.insert((module.clone(), dst.to_string()));
                    }
                }
            }
        }
        edges
    });
    let edges: BTreeSet<(String, String)> = per_file.into_iter().flatten().collect();

    Layer::new("imports", true, false)
        .with_class(GrammarClass::Declared)
        .with_edges(edges.into_iter().map(|(a, b)| Edge::new(a, b)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sources(items: &[(&str, &str)]) -> BTreeMap<String, String> {
        items.iter().map(|(p, t)| (p.to_string(), t.to_string())).collect()
    }

    fn flask_map() -> ModuleMap {
        ModuleMap::from_json(r#"{"rules": [{"pattern": "src/flask/*.py", "module": "{stem}"}]}"#).unwrap()
    }

    #[test]
    fn module_importing_another() {
        let src = sources(&[
            ("src/flask/a.py", "import os\nfrom .b import thing\n"),
            ("src/flask/b.py", "x = 1\n"),
        ]);
        let layer = scan_imports(&src, &ImportPatternSet::python(), &flask_map());
        assert_eq!(layer.edges, vec![Edge::new("a", "b")]);
        assert!(layer.directed && !layer.weighted);
        assert_eq!(layer.grammar_class, Some(GrammarClass::Declared));
    }

    #[test]
    fn unresolved_and_intra_module_targets_dropped() {
        let src = sources(&[
            ("src/flask/a.py", "import numpy\nfrom . import a\nimport flask.a\n"),
            ("src/flask/b.py", ""),
        ]);
        assert!(scan_imports(&src, &ImportPatternSet::python(), &flask_map()).edges.is_empty());
    }

    #[test]
    fn duplicate_imports_collapse() {
        let map = ModuleMap::from_json(
            r#"{"rules": [{"pattern": "pkg/a/**", "module": "a"}, {"pattern": "pkg/b/**", "module": "b"}]}"#,
        )
        .unwrap();
        let src = sources(&[
            ("pkg/a/one.py", "import b\n"),
            ("pkg/a/two.py", "from b import y\nimport b\n"),
            ("pkg/b/__init__.py", ""),
        ]);
        let layer = scan_imports(&src, &ImportPatternSet::python(), &map);
        assert_eq!(layer.edges, vec![Edge::new("a", "b")]);
    }

    #[test]
    fn dotted_path_resolution() {
        let src = sources(&[
            ("src/flask/app.py", "from flask.sansio.scaffold import Scaffold\n"),
            ("src/flask/sansio/scaffold.py", ""),
        ]);
        let map = ModuleMap::from_json(
            r#"{"rules": [{"pattern": "src/flask/**/*.py", "module": "{stem}"}]}"#,
        )
        .unwrap();
        let layer = scan_imports(&src, &ImportPatternSet::python(), &map);
        assert_eq!(layer.edges, vec![Edge::new("app", "scaffold")]);
    }

    #[test]
    fn php_includes_via_custom_patterns() {
        let php = ImportPatternSet::from_json(
            r#"{"language_label": "php",
                "line_patterns": ["^\\s*(?:require|include)(?:_once)?\\b.*'(?P<target>[^']+\\.php)'"]}"#,
        )
        .unwrap();
        let src = sources(&[
            ("wp-includes/load.php", "require_once ABSPATH . WPINC . '/functions.php';\n"),
            ("wp-includes/functions.php", "<?php\n"),
        ]);
        let layer = scan_imports(&src, &php, &ModuleMap::basename_only());
        assert_eq!(layer.edges, vec![Edge::new("load.php", "functions.php")]);
        assert_eq!(php.language_label(), "php");
    }

    #[test]
    fn from_package_import_submodule() {
        let src = sources(&[
            ("src/flask/a.py", "from flask import b\nfrom . import c\n"),
            ("src/flask/b.py", ""),
            ("src/flask/c.py", ""),
        ]);
        let layer = scan_imports(&src, &ImportPatternSet::python(), &flask_map());
        assert_eq!(layer.edges, vec![Edge::new("a", "b"), Edge::new("a", "c")]);
    }

    #[test]
    fn patterns_must_be_anchored_and_capture() {
        assert!(ImportPatternSet::new("x", vec!["import (\\w+)".into()], None, vec![]).is_err());
        assert!(ImportPatternSet::new("x", vec!["^import \\w+".into()], None, vec![]).is_err());
        assert!(ImportPatternSet::new("x", vec!["^import (".into()], None, vec![]).is_err());
    }

    #[test]
    fn modules_listed() {
        let src = sources(&[("src/flask/a.py", ""), ("README", ""), ("src/flask/b.py", "")]);
        assert_eq!(source_modules(&src, &flask_map()), ["a", "b"]);
    }
}
