//! Hub vectors, mid-ranks and correlation coefficients.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::MultilayerGraph;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("unknown layer {0:?}")]
    UnknownLayer(String),
    #[error("layer {0:?} is unweighted; weighted degree unavailable")]
    WeightsUnavailable(String),
    #[error("vector {0} has zero variance; correlation undefined")]
    DegenerateVector(&'static str),
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("correlation needs at least 2 observations, got {0}")]
    TooShort(usize),
    #[error("node {node:?} lacks attribute {attr:?}")]
    MissingAttribute { node: String, attr: String },
}

/// Total degree of every node in one layer, aligned to graph node order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HubVector {
    pub layer_name: String,
    pub values: Vec<f64>,
    pub weighted: bool,
}

impl HubVector {
    /// Wraps raw values, e.g. an attribute column or a test fixture.
    pub fn from_values(layer_name: impl Into<String>, values: Vec<f64>) -> Self {
        Self {
            layer_name: layer_name.into(),
            values,
            weighted: false,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Average (mid) ranks, 1 = smallest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankVector {
    pub values: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationValue {
    pub r: f64,
    pub n: usize,
}

/// Neumaier-compensated sum in iteration order.
pub(crate) fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Hub scores of `layer_name`. Undirected edges add to both endpoints;
/// directed edges add to the source (out) and the target (in), so every
/// entry is in-degree plus out-degree.
pub fn degree_vector(
    graph: &MultilayerGraph,
    layer_name: &str,
    use_weights: bool,
) -> Result<HubVector, MetricsError> {
    let layer = graph
        .layer(layer_name)
        .ok_or_else(|| MetricsError::UnknownLayer(layer_name.to_string()))?;
    if use_weights && !layer.weighted {
        return Err(MetricsError::WeightsUnavailable(layer_name.to_string()));
    }
    let index = graph.index();
    let mut values = vec![0.0; graph.node_count()];
    for edge in &layer.edges {
        let w = if use_weights { edge.weight } else { 1.0 };
        // Validated graphs always resolve; unknown endpoints are skipped.
        if let (Some(&s), Some(&d)) = (index.get(edge.src.as_str()), index.get(edge.dst.as_str())) {
            values[s] += w;
            values[d] += w;
        }
    }
    Ok(HubVector {
        layer_name: layer_name.to_string(),
        values,
        weighted: use_weights,
    })
}

/// Hub vectors for every layer, in layer order.
pub fn all_degree_vectors(graph: &MultilayerGraph, use_weights: bool) -> Result<Vec<HubVector>, MetricsError> {
    graph
        .layers
        .iter()
        .map(|l| degree_vector(graph, &l.name, use_weights && l.weighted))
        .collect()
}

/// Mid-ranks of a slice: ties share the mean of the positions they span.
pub fn mid_ranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]).then(i.cmp(&j)));
    let mut ranks = vec![0.0; n];
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // Positions start+1 ..= end share their average.
        let avg = (start + 1 + end) as f64 / 2.0;
        for &idx in &order[start..end] {
            ranks[idx] = avg;
        }
        start = end;
    }
    ranks
}

pub fn rank_vector(h: &HubVector) -> RankVector {
    RankVector {
        values: mid_ranks(&h.values),
    }
}

/// Precomputed centred copy of one vector for repeated correlations.
#[derive(Clone, Debug)]
pub(crate) struct Centered {
    pub values: Vec<f64>,
    pub sum_sq: f64,
}

impl Centered {
    pub fn new(values: &[f64], label: &'static str) -> Result<Self, MetricsError> {
        let n = values.len() as f64;
        let mean = compensated_sum(values.iter().copied()) / n;
        let centered: Vec<f64> = values.iter().map(|v| v - mean).collect();
        let sum_sq = compensated_sum(centered.iter().map(|d| d * d));
        // Constant vectors centre to exact zeros; a relative floor also
        // catches spread lost to rounding.
        let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if sum_sq == 0.0 || sum_sq <= (scale * f64::EPSILON).powi(2) * n {
            return Err(MetricsError::DegenerateVector(label));
        }
        Ok(Self {
            values: centered,
            sum_sq,
        })
    }

    /// Pearson r against `other`, reading `other` through `perm`
    /// (`other[perm[i]]` pairs with `self[i]`).
    pub fn correlate_permuted(&self, other: &Centered, perm: &[usize]) -> f64 {
        let cross = compensated_sum(
            self.values
                .iter()
                .zip(perm)
                .map(|(x, &j)| x * other.values[j]),
        );
        clamp_unit(cross / (self.sum_sq * other.sum_sq).sqrt())
    }

    pub fn correlate(&self, other: &Centered) -> f64 {
        let cross = compensated_sum(self.values.iter().zip(&other.values).map(|(x, y)| x * y));
        clamp_unit(cross / (self.sum_sq * other.sum_sq).sqrt())
    }
}

fn clamp_unit(r: f64) -> f64 {
    r.clamp(-1.0, 1.0)
}

pub(crate) fn check_pair(a: &[f64], b: &[f64]) -> Result<(), MetricsError> {
    if a.len() != b.len() {
        return Err(MetricsError::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if a.len() < 2 {
        return Err(MetricsError::TooShort(a.len()));
    }
    Ok(())
}

/// Product-moment coefficient of two equal-length slices.
pub fn pearson_values(a: &[f64], b: &[f64]) -> Result<CorrelationValue, MetricsError> {
    check_pair(a, b)?;
    let ca = Centered::new(a, "a")?;
    let cb = Centered::new(b, "b")?;
    Ok(CorrelationValue {
        r: ca.correlate(&cb),
        n: a.len(),
    })
}

pub fn pearson(a: &HubVector, b: &HubVector) -> Result<CorrelationValue, MetricsError> {
    pearson_values(&a.values, &b.values)
}

/// Pearson on mid-ranks.
pub fn spearman(a: &HubVector, b: &HubVector) -> Result<CorrelationValue, MetricsError> {
    check_pair(&a.values, &b.values)?;
    pearson_values(&rank_vector(a).values, &rank_vector(b).values)
}

/// Pearson between a node attribute column and the layer's unweighted hub vector.
pub fn attr_degree_correlation(
    graph: &MultilayerGraph,
    layer_name: &str,
    attr_name: &str,
) -> Result<CorrelationValue, MetricsError> {
    let attrs = graph
        .nodes
        .iter()
        .map(|n| {
            n.attrs
                .get(attr_name)
                .copied()
                .ok_or_else(|| MetricsError::MissingAttribute {
                    node: n.id.clone(),
                    attr: attr_name.to_string(),
                })
        })
        .collect::<Result<Vec<f64>, _>>()?;
    let hubs = degree_vector(graph, layer_name, false)?;
    pearson_values(&attrs, &hubs.values)
}
