//! Similar-pair versus dissimilar-pair experiments.
//!
//! An experiment correlates the hub vectors of two pre-registered layer
//! pairs on one graph. The law predicts `r_sim > r_dis`; the gap
//! `delta_r = r_sim - r_dis` is the effect size, and the verdict combines it
//! with the significance of the similar pair.

mod table;
mod verdict;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::MultilayerGraph;
use crate::metrics::{degree_vector, pearson, spearman, HubVector, MetricsError};
use crate::prereg::{Clock, SystemClock};
use crate::stats::{
    permutation_test, t_test_p, CountingRule, PermutationMode, PermutationResult, StatsError,
    DEFAULT_PERMUTATIONS, DEFAULT_SEED,
};

pub use table::{canonical_rows, replay_table, ReplayRow, TableRow, CANONICAL_TABLE};
pub use verdict::{classify_verdict, matching_clauses, Criterion, ThresholdClause, Verdict};

pub const REPORT_SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_DELTA_R_FLOOR: f64 = 0.20;
pub const DEFAULT_ALPHA: f64 = 0.05;

#[derive(Debug, Error, PartialEq)]
pub enum ExperimentError {
    #[error("config does not match graph: {0}")]
    ConfigMismatch(String),
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("invalid report: {0}")]
    InvalidReport(String),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Stats(#[from] StatsError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairClass {
    Similar,
    Dissimilar,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayerPair {
    pub layer_a: String,
    pub layer_b: String,
    pub classification: PairClass,
}

impl LayerPair {
    pub fn similar(a: impl Into<String>, b: impl Into<String>) -> Self {
        Self {
            layer_a: a.into(),
            layer_b: b.into(),
            classification: PairClass::Similar,
        }
    }

    pub fn dissimilar(a: impl Into<String>, b: impl Into<String>) -> Self {
        Self {
            layer_a: a.into(),
            layer_b: b.into(),
            classification: PairClass::Dissimilar,
        }
    }
}

/// Evidence tier. Carried into reports as metadata only.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Tier {
    /// Pre-registered canonical.
    A,
    /// Pre-registered external validation.
    B,
    /// Exploratory, not pre-registered.
    #[default]
    C,
    /// Internal consistency or control.
    D,
}

/// Source of the p-value that drives the verdict.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Inference {
    #[default]
    Permutation,
    TTest,
}

fn default_permutations() -> u64 {
    DEFAULT_PERMUTATIONS
}
fn default_seed() -> u64 {
    DEFAULT_SEED
}
fn default_floor() -> f64 {
    DEFAULT_DELTA_R_FLOOR
}
fn default_alpha() -> f64 {
    DEFAULT_ALPHA
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub graph_name: String,
    pub similar: LayerPair,
    pub dissimilar: LayerPair,
    #[serde(default)]
    pub use_weights: bool,
    #[serde(default = "default_permutations")]
    pub n_permutations: u64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub counting_rule: CountingRule,
    #[serde(default)]
    pub criterion: Criterion,
    #[serde(default = "default_floor")]
    pub delta_r_floor: f64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default)]
    pub inference: Inference,
    #[serde(default)]
    pub tier: Tier,
    #[serde(default)]
    pub prereg_digest: Option<String>,
}

impl ExperimentConfig {
    /// Defaults: 200 permutations, seed 42, Δr floor 0.20, α 0.05.
    pub fn new(graph_name: impl Into<String>, similar: LayerPair, dissimilar: LayerPair) -> Self {
        Self {
            graph_name: graph_name.into(),
            similar,
            dissimilar,
            use_weights: false,
            n_permutations: DEFAULT_PERMUTATIONS,
            seed: DEFAULT_SEED,
            counting_rule: CountingRule::default(),
            criterion: Criterion::default(),
            delta_r_floor: DEFAULT_DELTA_R_FLOOR,
            alpha: DEFAULT_ALPHA,
            inference: Inference::default(),
            tier: Tier::default(),
            prereg_digest: None,
        }
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        let bad = |m: String| Err(ExperimentError::InvalidConfig(m));
        if self.similar.classification != PairClass::Similar {
            return bad("`similar` pair must be classified similar".into());
        }
        if self.dissimilar.classification != PairClass::Dissimilar {
            return bad("`dissimilar` pair must be classified dissimilar".into());
        }
        for pair in [&self.similar, &self.dissimilar] {
            if pair.layer_a == pair.layer_b {
                return bad(format!("pair uses layer {:?} twice", pair.layer_a));
            }
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return bad(format!("alpha must lie in (0, 1), got {}", self.alpha));
        }
        if self.delta_r_floor.is_nan() || self.delta_r_floor < 0.0 || !self.delta_r_floor.is_finite() {
            return bad(format!(
                "delta_r_floor must be finite and >= 0, got {}",
                self.delta_r_floor
            ));
        }
        if self.n_permutations == 0 {
            return bad("n_permutations must be positive".into());
        }
        if let Some(d) = &self.prereg_digest {
            if d.len() != 64 || !d.bytes().all(|b| b.is_ascii_hexdigit()) {
                return bad(format!("prereg_digest must be 64 hex characters, got {d:?}"));
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self, ExperimentError> {
        let cfg: Self =
            serde_json::from_str(text).map_err(|e| ExperimentError::InvalidConfig(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairResult {
    pub layer_a: String,
    pub layer_b: String,
    pub r: f64,
    pub rho: f64,
    /// Absent when inference runs on the t fallback only.
    pub p_permutation: Option<f64>,
    pub p_t_fallback: f64,
    pub n: usize,
    pub permutation: Option<PermutationResult>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub config: ExperimentConfig,
    pub sim: PairResult,
    pub dis: PairResult,
    pub delta_r: f64,
    pub verdict: Verdict,
    /// The p-value fed to the verdict rule (permutation unless disabled).
    pub verdict_p: f64,
    pub sign_agreement: bool,
    pub tier: Tier,
    pub timestamp_utc: String,
}

impl ExperimentReport {
    /// Rechecks the stored invariants: schema version, Δr arithmetic, verdict.
    pub fn check(&self) -> Result<(), ExperimentError> {
        let bad = |m: String| Err(ExperimentError::InvalidReport(m));
        if self.schema_version != REPORT_SCHEMA_VERSION {
            return bad(format!("unsupported schema_version {}", self.schema_version));
        }
        self.config.validate()?;
        if self.delta_r != self.sim.r - self.dis.r {
            return bad("delta_r differs from sim.r - dis.r".into());
        }
        let expected_p = match self.config.inference {
            Inference::Permutation => self.sim.p_permutation,
            Inference::TTest => Some(self.sim.p_t_fallback),
        };
        if expected_p != Some(self.verdict_p) {
            return bad("verdict_p does not match the configured inference".into());
        }
        let c = &self.config;
        let v = classify_verdict(self.delta_r, self.verdict_p, c.criterion, c.delta_r_floor, c.alpha);
        if v != self.verdict {
            return bad(format!("stored verdict {} but rule gives {v}", self.verdict));
        }
        for pr in [&self.sim, &self.dis] {
            if !(-1.0..=1.0).contains(&pr.r) || !(-1.0..=1.0).contains(&pr.rho) {
                return bad("correlation outside [-1, 1]".into());
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization is infallible")
    }

    pub fn from_json(text: &str) -> Result<Self, ExperimentError> {
        let report: Self =
            serde_json::from_str(text).map_err(|e| ExperimentError::InvalidReport(e.to_string()))?;
        report.check()?;
        Ok(report)
    }
}

fn hub(graph: &MultilayerGraph, name: &str, use_weights: bool) -> Result<HubVector, ExperimentError> {
    let layer = graph
        .layer(name)
        .ok_or_else(|| ExperimentError::ConfigMismatch(format!("layer {name:?} not in graph {:?}", graph.name)))?;
    Ok(degree_vector(graph, name, use_weights && layer.weighted)?)
}

/// Correlation, rank correlation and both significance routes for one pair.
pub fn analyze_pair(
    graph: &MultilayerGraph,
    pair: &LayerPair,
    config: &ExperimentConfig,
) -> Result<PairResult, ExperimentError> {
    let a = hub(graph, &pair.layer_a, config.use_weights)?;
    let b = hub(graph, &pair.layer_b, config.use_weights)?;
    let r = pearson(&a, &b)?.r;
    let rho = spearman(&a, &b)?.r;
    let t = t_test_p(r, a.len() as u64)?;
    let permutation = match config.inference {
        Inference::Permutation => Some(permutation_test(
            &a,
            &b,
            config.n_permutations,
            config.seed,
            PermutationMode::Sampled,
            config.counting_rule,
        )?),
        Inference::TTest => None,
    };
    Ok(PairResult {
        layer_a: pair.layer_a.clone(),
        layer_b: pair.layer_b.clone(),
        r,
        rho,
        p_permutation: permutation.as_ref().map(|p| p.p_value),
        p_t_fallback: t.p_two_tailed,
        n: a.len(),
        permutation,
    })
}

pub fn run_experiment(graph: &MultilayerGraph, config: &ExperimentConfig) -> Result<ExperimentReport, ExperimentError> {
    run_experiment_with_clock(graph, config, &SystemClock)
}

/// [`run_experiment`] with an injected clock; everything except
/// `timestamp_utc` is a pure function of `(graph, config)`.
pub fn run_experiment_with_clock(
    graph: &MultilayerGraph,
    config: &ExperimentConfig,
    clock: &dyn Clock,
) -> Result<ExperimentReport, ExperimentError> {
    config.validate()?;
    if config.graph_name != graph.name {
        return Err(ExperimentError::ConfigMismatch(format!(
            "config targets graph {:?} but graph is {:?}",
            config.graph_name, graph.name
        )));
    }
    let sim = analyze_pair(graph, &config.similar, config)?;
    let dis = analyze_pair(graph, &config.dissimilar, config)?;
    let delta_r = sim.r - dis.r;
    let verdict_p = match config.inference {
        Inference::Permutation => sim.p_permutation.expect("permutation inference stores p"),
        Inference::TTest => sim.p_t_fallback,
    };
    let verdict = classify_verdict(delta_r, verdict_p, config.criterion, config.delta_r_floor, config.alpha);
    let sign_agreement = sim.r.signum() == sim.rho.signum() || (sim.r == 0.0 && sim.rho == 0.0);
    Ok(ExperimentReport {
        schema_version: REPORT_SCHEMA_VERSION,
        config: config.clone(),
        sim,
        dis,
        delta_r,
        verdict,
        verdict_p,
        sign_agreement,
        tier: config.tier,
        timestamp_utc: crate::prereg::format_utc(clock.now()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_random_control, Edge, Layer, Node};
    use crate::prereg::FixedClock;

    /// Threshold graph on 8 nodes (i ~ j iff i + j > 8), an identical twin
    /// layer, and its complement. Degrees are [1,2,3,4,4,5,6,7], so the twin
    /// correlates at r = 1 and the complement (degree 7 - d) at r = -1.
    pub(crate) fn extremal_graph() -> MultilayerGraph {
        let n = 8;
        let id = |i: usize| format!("m{i}");
        let nodes: Vec<Node> = (1..=n).map(|i| Node::new(id(i))).collect();
        let mut base = Layer::new("base", false, false);
        let mut anti = Layer::new("anti", false, false);
        for i in 1..=n {
            for j in (i + 1)..=n {
                let layer = if i + j > n { &mut base } else { &mut anti };
                layer.edges.push(Edge::new(id(i), id(j)));
            }
        }
        let twin = Layer {
            name: "twin".into(),
            ..base.clone()
        };
        MultilayerGraph::new("extremal", nodes, vec![base, twin, anti]).unwrap()
    }

    fn extremal_config(criterion: Criterion) -> ExperimentConfig {
        let mut c = ExperimentConfig::new(
            "extremal",
            LayerPair::similar("base", "twin"),
            LayerPair::dissimilar("base", "anti"),
        );
        c.criterion = criterion;
        c
    }

    #[test]
    fn extremal_fixture_confirms() {
        let g = extremal_graph();
        for criterion in [Criterion::LegacyDirectional, Criterion::ThresholdedV2] {
            let report = run_experiment(&g, &extremal_config(criterion)).unwrap();
            assert_eq!(report.sim.r, 1.0);
            assert_eq!(report.dis.r, -1.0);
            assert_eq!(report.delta_r, 2.0);
            assert_eq!(report.verdict, Verdict::Confirmed, "{criterion:?}");
            assert!(report.verdict_p < 0.05);
            assert!(report.sign_agreement);
            report.check().unwrap();
        }
    }

    #[test]
    fn self_twin_is_denied_under_legacy() {
        let g = extremal_graph();
        let cfg = ExperimentConfig {
            criterion: Criterion::LegacyDirectional,
            ..ExperimentConfig::new(
                "extremal",
                LayerPair::similar("base", "anti"),
                LayerPair::dissimilar("base", "anti"),
            )
        };
        let report = run_experiment(&g, &cfg).unwrap();
        assert_eq!(report.delta_r, 0.0);
        assert_eq!(report.verdict, Verdict::Denied);
    }

    #[test]
    fn missing_layer_is_config_mismatch() {
        let g = extremal_graph();
        let cfg = ExperimentConfig::new(
            "extremal",
            LayerPair::similar("base", "ghost"),
            LayerPair::dissimilar("base", "anti"),
        );
        assert!(matches!(
            run_experiment(&g, &cfg),
            Err(ExperimentError::ConfigMismatch(_))
        ));
        let wrong_graph = ExperimentConfig {
            graph_name: "other".into(),
            ..extremal_config(Criterion::ThresholdedV2)
        };
        assert!(matches!(
            run_experiment(&g, &wrong_graph),
            Err(ExperimentError::ConfigMismatch(_))
        ));
    }

    #[test]
    fn config_validation() {
        let mut c = extremal_config(Criterion::ThresholdedV2);
        c.alpha = 1.0;
        assert!(c.validate().is_err());
        let mut c = extremal_config(Criterion::ThresholdedV2);
        c.similar.classification = PairClass::Dissimilar;
        assert!(c.validate().is_err());
        let mut c = extremal_config(Criterion::ThresholdedV2);
        c.dissimilar.layer_b = "base".into();
        assert!(c.validate().is_err());
        let mut c = extremal_config(Criterion::ThresholdedV2);
        c.prereg_digest = Some("abc".into());
        assert!(c.validate().is_err());
        c.prereg_digest = Some("a".repeat(64));
        assert!(c.validate().is_ok());
    }

    #[test]
    fn config_json_defaults() {
        let cfg = ExperimentConfig::from_json(
            r#"{"graph_name": "g",
                "similar": {"layer_a": "x", "layer_b": "y", "classification": "similar"},
                "dissimilar": {"layer_a": "x", "layer_b": "z", "classification": "dissimilar"}}"#,
        )
        .unwrap();
        assert_eq!((cfg.n_permutations, cfg.seed), (200, 42));
        assert_eq!((cfg.delta_r_floor, cfg.alpha), (0.20, 0.05));
        assert_eq!(cfg.criterion, Criterion::ThresholdedV2);
    }

    #[test]
    fn report_round_trips_and_is_deterministic() {
        let g = generate_random_control(12, 3, 0.3, 11).unwrap();
        let cfg = ExperimentConfig::new(
            g.name.clone(),
            LayerPair::similar("L1", "L2"),
            LayerPair::dissimilar("L1", "L3"),
        );
        let clock = FixedClock::at_unix(1_700_000_000);
        let a = run_experiment_with_clock(&g, &cfg, &clock).unwrap();
        let b = run_experiment_with_clock(&g, &cfg, &clock).unwrap();
        assert_eq!(a, b);
        let back = ExperimentReport::from_json(&a.to_json()).unwrap();
        assert_eq!(back, a);
        assert_eq!(a.timestamp_utc, "2023-11-14T22:13:20Z");
    }

    #[test]
    fn tampered_report_fails_check() {
        let g = extremal_graph();
        let mut report = run_experiment(&g, &extremal_config(Criterion::LegacyDirectional)).unwrap();
        report.verdict = Verdict::Denied;
        assert!(report.check().is_err());
        let mut report = run_experiment(&g, &extremal_config(Criterion::LegacyDirectional)).unwrap();
        report.delta_r = 1.5;
        assert!(ExperimentReport::from_json(&report.to_json()).is_err());
    }

    #[test]
    fn random_controls_rarely_confirm() {
        let confirmed = (0..100u64)
            .filter(|&s| {
                let g = generate_random_control(12, 3, 0.25, s).unwrap();
                let cfg = ExperimentConfig::new(
                    g.name.clone(),
                    LayerPair::similar("L1", "L2"),
                    LayerPair::dissimilar("L1", "L3"),
                );
                matches!(run_experiment(&g, &cfg), Ok(r) if r.verdict == Verdict::Confirmed)
            })
            .count();
        assert!(confirmed <= 5, "{confirmed} of 100 confirmed");
    }
}
