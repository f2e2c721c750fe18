use serde::{Deserialize, Serialize};
use statrs::function::beta::checked_beta_reg;

use super::StatsError;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TTestResult {
    /// Infinite (serialized as null) when `saturated`.
    pub t: f64,
    pub df: u64,
    pub p_two_tailed: f64,
    /// Set when |r| = 1: the statistic diverges and p is reported as 0.
    pub saturated: bool,
}

/// Analytical two-tailed test of a correlation coefficient:
/// `t = r sqrt(n - 2) / sqrt(1 - r^2)` against Student's t with `n - 2` df.
pub fn t_test_p(r: f64, n: u64) -> Result<TTestResult, StatsError> {
    if n < 3 {
        return Err(StatsError::BadParameter(format!(
            "t test needs n >= 3, got {n}"
        )));
    }
    if !r.is_finite() || r.abs() > 1.0 {
        return Err(StatsError::BadParameter(format!(
            "correlation must lie in [-1, 1], got {r}"
        )));
    }
    let df = n - 2;
    if r.abs() == 1.0 {
        return Ok(TTestResult {
            t: r.signum() * f64::INFINITY,
            df,
            p_two_tailed: 0.0,
            saturated: true,
        });
    }
    let t = r * (df as f64).sqrt() / (1.0 - r * r).sqrt();
    let p = (2.0 * student_t_sf(t.abs(), df)?).min(1.0);
    Ok(TTestResult {
        t,
        df,
        p_two_tailed: p,
        saturated: false,
    })
}

/// One-sided survival function `P(T > t)` of Student's t, for `t >= 0`,
/// via `0.5 * I_x(df/2, 1/2)` with `x = df / (df + t^2)`.
pub fn student_t_sf(t: f64, df: u64) -> Result<f64, StatsError> {
    if df == 0 {
        return Err(StatsError::BadParameter("df must be positive".into()));
    }
    if t.is_nan() || t < 0.0 {
        return Err(StatsError::BadParameter(format!(
            "t must be non-negative, got {t}"
        )));
    }
    if t.is_infinite() {
        return Ok(0.0);
    }
    let nu = df as f64;
    let x = nu / (nu + t * t);
    let ix = checked_beta_reg(nu / 2.0, 0.5, x)
        .map_err(|e| StatsError::BadParameter(e.to_string()))?;
    Ok(0.5 * ix)
}
