use super::{Edge, GraphError, Layer, MultilayerGraph, Node};
use crate::rng::Stream;

/// Edge probability used by the CLI when none is given.
pub const DEFAULT_EDGE_PROB: f64 = 0.25;

/// Seeded multilayer Erdős–Rényi control graph.
///
/// Nodes are `v1..vn`, layers `L1..Lk`, all undirected and unweighted. Layer
/// `i` (0-based) draws from substream `mix(seed, i)`; pairs `(a, b)` with
/// `a < b` are visited in lexicographic index order and kept when
/// `next_f64() < edge_prob`.
pub fn generate_random_control(
    n_nodes: usize,
    n_layers: usize,
    edge_prob: f64,
    seed: u64,
) -> Result<MultilayerGraph, GraphError> {
    if n_nodes < 2 {
        return Err(GraphError::BadParameter(format!(
            "n_nodes must be at least 2, got {n_nodes}"
        )));
    }
    if n_layers == 0 {
        return Err(GraphError::BadParameter("n_layers must be positive".into()));
    }
    if !(edge_prob > 0.0 && edge_prob < 1.0) {
        return Err(GraphError::BadParameter(format!(
            "edge_prob must lie in (0, 1), got {edge_prob}"
        )));
    }

    let ids: Vec<String> = (1..=n_nodes).map(|i| format!("v{i}")).collect();
    let layers = (0..n_layers)
        .map(|li| {
            let mut rng = Stream::substream(seed, li as u64);
            let mut layer = Layer::new(format!("L{}", li + 1), false, false);
            for a in 0..n_nodes {
                for b in (a + 1)..n_nodes {
                    if rng.next_f64() < edge_prob {
                        layer.edges.push(Edge::new(ids[a].clone(), ids[b].clone()));
                    }
                }
            }
            layer
        })
        .collect();

    Ok(MultilayerGraph {
        name: format!("random_control_n{n_nodes}_k{n_layers}_seed{seed}"),
        nodes: ids.into_iter().map(Node::new).collect(),
        layers,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{parse_graph, validate};

    #[test]
    fn same_seed_same_bytes() {
        let a = generate_random_control(12, 3, 0.25, 99).unwrap().to_json();
        let b = generate_random_control(12, 3, 0.25, 99).unwrap().to_json();
        assert_eq!(a, b);
    }

    #[test]
    fn different_seeds_differ() {
        let mut differ = 0;
        for s in 0..100u64 {
            let a = generate_random_control(12, 3, 0.25, 2 * s).unwrap();
            let b = generate_random_control(12, 3, 0.25, 2 * s + 1).unwrap();
            if a.layers != b.layers {
                differ += 1;
            }
        }
        assert!(differ >= 99, "{differ}");
    }

    #[test]
    fn two_nodes_have_at_most_one_edge() {
        for s in 0..50 {
            let g = generate_random_control(2, 1, 0.5, s).unwrap();
            assert!(g.layers[0].edges.len() <= 1);
        }
    }

    #[test]
    fn output_is_valid_and_round_trips() {
        let g = generate_random_control(15, 4, 0.3, 5).unwrap();
        assert!(validate(&g).is_empty());
        assert_eq!(parse_graph(&g.to_json()).unwrap(), g);
    }

    #[test]
    fn mean_edge_count_matches_binomial() {
        let (n, p) = (12usize, 0.25);
        let pairs = (n * (n - 1) / 2) as f64;
        let seeds = 1000;
        let total: usize = (0..seeds)
            .map(|s| generate_random_control(n, 1, p, s).unwrap().layers[0].edges.len())
            .sum();
        let mean = total as f64 / seeds as f64;
        // Standard deviation of the mean edge count over independent layers.
        let sd_mean = (pairs * p * (1.0 - p) / seeds as f64).sqrt();
        assert!((mean - p * pairs).abs() <= 4.0 * sd_mean, "mean {mean}");
    }

    #[test]
    fn bad_parameters() {
        assert!(generate_random_control(1, 1, 0.5, 0).is_err());
        assert!(generate_random_control(3, 0, 0.5, 0).is_err());
        assert!(generate_random_control(3, 1, 0.0, 0).is_err());
        assert!(generate_random_control(3, 1, 1.0, 0).is_err());
        assert!(generate_random_control(3, 1, f64::NAN, 0).is_err());
    }
}
