use serde::{Deserialize, Serialize};

use super::verdict::{classify_verdict, Criterion, Verdict};

/// One published experiment row used for regression replay.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub domain: &'static str,
    pub n: u32,
    pub r_sim: f64,
    pub r_dis: f64,
    pub published_delta_r: f64,
    /// Permutation (or t fallback) p on the similar pair.
    pub p_sim: f64,
    /// True where only an upper bound (`p < 0.001`) was published.
    pub p_is_bound: bool,
    pub published_verdict: Verdict,
}

macro_rules! row {
    ($domain:expr, $n:expr, $rs:expr, $rd:expr, $dr:expr, $p:expr, $bound:expr, $v:ident) => {
        TableRow {
            domain: $domain,
            n: $n,
            r_sim: $rs,
            r_dis: $rd,
            published_delta_r: $dr,
            p_sim: $p,
            p_is_bound: $bound,
            published_verdict: Verdict::$v,
        }
    };
}

/// The twelve canonical domain results: nine directional confirmations and
/// three boundary conditions.
pub const CANONICAL_TABLE: [TableRow; 12] = [
    row!("Linux Kernel (v6.x)", 30, 0.703, -0.145, 0.848, 0.002, false, Confirmed),
    row!("Human Brain Connectome", 16, 0.703, 0.178, 0.525, 0.004, false, Confirmed),
    row!("Internet AS Topology", 18, 0.516, -0.267, 0.783, 0.026, false, Confirmed),
    row!("CPU Block Design", 10, 0.622, -0.649, 1.271, 0.030, false, Confirmed),
    row!("Ecology (Serengeti, weighted)", 15, 0.559, -0.065, 0.624, 0.034, false, Confirmed),
    row!("Cytokine Cascade", 18, 0.512, -0.408, 0.920, 0.030, false, Confirmed),
    row!("p53 Network (STRING v12.0)", 15, 0.973, -0.161, 1.134, 0.001, true, Confirmed),
    row!("English Lexical Network", 20, 0.276, -0.748, 1.024, 0.241, false, Confirmed),
    row!("Software (real git)", 14, 0.941, -0.304, 1.245, 0.001, true, Confirmed),
    row!("Finance 2008", 16, 0.042, 0.183, -0.141, 0.824, false, Denied),
    row!("Psychiatry (DSM)", 20, 0.769, 0.808, -0.039, 0.002, false, Denied),
    row!("Mathematics", 20, 0.105, 0.280, -0.175, 0.705, false, Denied),
];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplayRow {
    pub delta_r: f64,
    pub verdict: Verdict,
}

fn round3(x: f64) -> f64 {
    (x * 1000.0).round() / 1000.0
}

/// Recomputes Δr (to three decimals) and the legacy directional verdict
/// for `(r_sim, r_dis, p_sim)` rows.
pub fn replay_table(rows: &[(f64, f64, f64)]) -> Vec<ReplayRow> {
    rows.iter()
        .map(|&(r_sim, r_dis, p_sim)| {
            let delta_r = round3(r_sim - r_dis);
            ReplayRow {
                delta_r,
                verdict: classify_verdict(delta_r, p_sim, Criterion::LegacyDirectional, 0.0, 0.05),
            }
        })
        .collect()
}

pub fn canonical_rows() -> Vec<(f64, f64, f64)> {
    CANONICAL_TABLE
        .iter()
        .map(|r| (r.r_sim, r.r_dis, r.p_sim))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_rows() {
        let out = replay_table(&[(0.703, -0.145, 0.002), (0.769, 0.808, 0.002), (0.622, -0.649, 0.030)]);
        assert_eq!(out[0], ReplayRow { delta_r: 0.848, verdict: Verdict::Confirmed });
        assert_eq!(out[1], ReplayRow { delta_r: -0.039, verdict: Verdict::Denied });
        assert_eq!(out[2], ReplayRow { delta_r: 1.271, verdict: Verdict::Confirmed });
    }

    #[test]
    fn canonical_table_replays() {
        let out = replay_table(&canonical_rows());
        for (row, got) in CANONICAL_TABLE.iter().zip(&out) {
            assert!((got.delta_r - row.published_delta_r).abs() <= 1e-3, "{}", row.domain);
            assert_eq!(got.verdict, row.published_verdict, "{}", row.domain);
        }
        let confirmed = out.iter().filter(|r| r.verdict == Verdict::Confirmed).count();
        assert_eq!((confirmed, out.len() - confirmed), (9, 3));
    }
}
