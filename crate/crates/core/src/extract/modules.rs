use globset::{GlobBuilder, GlobMatcher};
use serde::{Deserialize, Serialize};

use super::ExtractError;

/// What to do with paths that match no rule.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DefaultModule {
    #[default]
    Ignore,
    /// Use the file name (last path component) as the module.
    Basename,
}

/// `pattern` is a glob (`*` stays within one path component, `**` crosses
/// them). `module` may contain `{basename}`, `{stem}` and `{dir}`
/// placeholders, filled from the matched path.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleRule {
    pub pattern: String,
    pub module: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModuleMapDoc {
    #[serde(default)]
    rules: Vec<ModuleRule>,
    #[serde(default)]
    default: DefaultModule,
}

/// Ordered path-to-module rules; the first matching rule wins.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "ModuleMapDoc", into = "ModuleMapDoc")]
pub struct ModuleMap {
    rules: Vec<ModuleRule>,
    default: DefaultModule,
    matchers: Vec<GlobMatcher>,
}

impl TryFrom<ModuleMapDoc> for ModuleMap {
    type Error = ExtractError;

    fn try_from(doc: ModuleMapDoc) -> Result<Self, Self::Error> {
        ModuleMap::new(doc.rules, doc.default)
    }
}

impl From<ModuleMap> for ModuleMapDoc {
    fn from(m: ModuleMap) -> Self {
        ModuleMapDoc {
            rules: m.rules,
            default: m.default,
        }
    }
}

impl PartialEq for ModuleMap {
    fn eq(&self, other: &Self) -> bool {
        self.rules == other.rules && self.default == other.default
    }
}

fn basename(path: &str) -> &str {
    path.rsplit('/').next().unwrap_or(path)
}

fn stem(path: &str) -> &str {
    let base = basename(path);
    match base.rfind('.') {
        Some(i) if i > 0 => &base[..i],
        _ => base,
    }
}

fn parent_dir(path: &str) -> &str {
    let mut parts = path.rsplit('/');
    parts.next();
    parts.next().unwrap_or("")
}

impl ModuleMap {
    pub fn new(rules: Vec<ModuleRule>, default: DefaultModule) -> Result<Self, ExtractError> {
        let matchers = rules
            .iter()
            .map(|r| {
                if r.module.is_empty() {
                    return Err(ExtractError::BadModuleMap(format!(
                        "rule {:?} has an empty module name",
                        r.pattern
                    )));
                }
                GlobBuilder::new(&r.pattern)
                    .literal_separator(true)
                    .build()
                    .map(|g| g.compile_matcher())
                    .map_err(|e| ExtractError::BadModuleMap(e.to_string()))
            })
            .collect::<Result<_, _>>()?;
        Ok(Self {
            rules,
            default,
            matchers,
        })
    }

    /// Every path becomes its own module, named by file name.
    pub fn basename_only() -> Self {
        Self::new(Vec::new(), DefaultModule::Basename).expect("no rules to compile")
    }

    pub fn from_json(text: &str) -> Result<Self, ExtractError> {
        serde_json::from_str(text).map_err(|e| ExtractError::BadModuleMap(e.to_string()))
    }

    pub fn rules(&self) -> &[ModuleRule] {
        &self.rules
    }

    /// Module of `path`, or `None` when it is ignored.
    pub fn resolve(&self, path: &str) -> Option<String> {
        let path = path.trim_start_matches("./");
        for (rule, m) in self.rules.iter().zip(&self.matchers) {
            if m.is_match(path) {
                let name = rule
                    .module
                    .replace("{basename}", basename(path))
                    .replace("{stem}", stem(path))
                    .replace("{dir}", parent_dir(path));
                return (!name.is_empty()).then_some(name);
            }
        }
        match self.default {
            DefaultModule::Ignore => None,
            DefaultModule::Basename => {
                let b = basename(path);
                (!b.is_empty()).then(|| b.to_string())
            }
        }
    }
}
