//! The lambda grid shared by every alpha of a search.

use crate::data::Dataset;
use crate::error::{Error, Result};

/// Lower clamp on alpha when computing the all-zero boundary; without it the
/// boundary diverges as alpha goes to 0.
pub const ALPHA_FLOOR: f64 = 1e-3;

/// Relative headroom added to the boundary so that floating-point rounding in
/// the solver cannot leave a coordinate a hair above its threshold.
const BOUNDARY_HEADROOM: f64 = 1e-9;

pub const DEFAULT_NLAMBDA: usize = 100;

/// `1e-4` when there are more observations than predictors, `1e-2` otherwise.
pub fn default_lambda_min_ratio(n: usize, p: usize) -> f64 {
    if n > p {
        1e-4
    } else {
        1e-2
    }
}

/// Smallest lambda at which the all-zero slope vector solves the problem at
/// `alpha`: `max_j |(1/N) sum_i x_ij (y_i - ybar)| / max(alpha, 0.001)`.
///
/// `data` must be in the working basis. For the binomial family `ybar` is the
/// observed event rate, which is also the null fitted probability.
pub fn lambda_max(data: &Dataset, alpha: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::invalid(format!("alpha must lie in [0, 1], got {alpha}")));
    }
    let y = data.y();
    if data.response_is_degenerate() {
        return Err(Error::DegenerateResponse);
    }
    let n = data.n() as f64;
    let ybar = y.sum() / n;
    let resid = y.mapv(|v| v - ybar);
    let top = data
        .x()
        .columns()
        .into_iter()
        .map(|c| (c.dot(&resid) / n).abs())
        .fold(0.0f64, f64::max);
    let spread = resid.iter().map(|r| r.abs()).fold(0.0f64, f64::max);
    if !(top > 1e-14 * spread) {
        return Err(Error::DegenerateResponse);
    }
    Ok(top / alpha.max(ALPHA_FLOOR) * (1.0 + BOUNDARY_HEADROOM))
}

/// `nlambda` log-uniform values from `top` down to `top * ratio`.
pub fn log_spaced(top: f64, nlambda: usize, ratio: f64) -> Vec<f64> {
    if nlambda == 1 {
        return vec![top];
    }
    let (hi, lo) = (top.ln(), (top * ratio).ln());
    let step = (hi - lo) / (nlambda - 1) as f64;
    (0..nlambda)
        .map(|k| {
            if k == 0 {
                top
            } else {
                (hi - step * k as f64).exp()
            }
        })
        .collect()
}

/// One decreasing lambda sequence used for every alpha in `alphas`.
///
/// It starts at the largest all-zero boundary over the supplied alphas (the
/// smallest clamped alpha) and descends log-uniformly to `lambda_min_ratio`
/// times that value.
pub fn build_shared_grid(
    data: &Dataset,
    alphas: &[f64],
    nlambda: usize,
    lambda_min_ratio: f64,
) -> Result<Vec<f64>> {
    validate_alphas(alphas)?;
    if nlambda < 1 {
        return Err(Error::invalid("nlambda must be at least 1"));
    }
    if !(lambda_min_ratio > 0.0 && lambda_min_ratio < 1.0) {
        return Err(Error::invalid("lambda_min_ratio must lie in (0, 1)"));
    }
    let mut top = 0.0f64;
    for &a in alphas {
        top = top.max(lambda_max(data, a)?);
    }
    Ok(log_spaced(top, nlambda, lambda_min_ratio))
}

pub(crate) fn validate_alphas(alphas: &[f64]) -> Result<()> {
    if alphas.is_empty() {
        return Err(Error::invalid("alphas must be non-empty"));
    }
    if alphas.iter().any(|a| !(0.0..=1.0).contains(a)) {
        return Err(Error::invalid("every alpha must lie in [0, 1]"));
    }
    if alphas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("alphas must be sorted ascending and unique"));
    }
    Ok(())
}
