use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Denied,
    Partial,
    Confirmed,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Denied => "DENIED",
            Verdict::Partial => "PARTIAL",
            Verdict::Confirmed => "CONFIRMED",
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    /// CONFIRMED iff Δr > 0, otherwise DENIED.
    LegacyDirectional,
    /// Effect-size floor plus significance on the similar pair.
    #[default]
    ThresholdedV2,
}

/// Which clause of the thresholded rule a point falls in. Exposed so tests
/// can check that the clauses partition the plane.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ThresholdClause {
    Confirmed,
    PartialNotSignificant,
    PartialBelowFloor,
    Denied,
}

impl ThresholdClause {
    pub fn verdict(self) -> Verdict {
        match self {
            ThresholdClause::Confirmed => Verdict::Confirmed,
            ThresholdClause::PartialNotSignificant | ThresholdClause::PartialBelowFloor => {
                Verdict::Partial
            }
            ThresholdClause::Denied => Verdict::Denied,
        }
    }
}

/// Every thresholded clause that holds at `(delta_r, p_sim)`. A well-formed
/// rule returns exactly one.
pub fn matching_clauses(delta_r: f64, p_sim: f64, delta_r_floor: f64, alpha: f64) -> Vec<ThresholdClause> {
    let significant = p_sim < alpha;
    let mut out = Vec::with_capacity(1);
    if delta_r >= delta_r_floor && significant {
        out.push(ThresholdClause::Confirmed);
    }
    if delta_r >= 0.0 && !significant {
        out.push(ThresholdClause::PartialNotSignificant);
    }
    // Δr = 0 with p < α lands here.
    if delta_r >= 0.0 && delta_r < delta_r_floor && significant {
        out.push(ThresholdClause::PartialBelowFloor);
    }
    if delta_r < 0.0 {
        out.push(ThresholdClause::Denied);
    }
    out
}

pub fn classify_verdict(
    delta_r: f64,
    p_sim: f64,
    criterion: Criterion,
    delta_r_floor: f64,
    alpha: f64,
) -> Verdict {
    match criterion {
        Criterion::LegacyDirectional => {
            if delta_r > 0.0 {
                Verdict::Confirmed
            } else {
                Verdict::Denied
            }
        }
        Criterion::ThresholdedV2 => matching_clauses(delta_r, p_sim, delta_r_floor, alpha)
            .first()
            .map(|c| c.verdict())
            // NaN inputs satisfy no clause.
            .unwrap_or(Verdict::Denied),
    }
}
