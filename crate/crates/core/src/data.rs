//! Datasets, predictor standardization and the penalized least-squares objective.

use ndarray::{Array1, Array2, ArrayView1, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Response distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Gaussian,
    Binomial,
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(Family::Gaussian),
            "binomial" => Ok(Family::Binomial),
            other => Err(Error::invalid(format!("unknown family '{other}'"))),
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Family::Gaussian => "gaussian",
            Family::Binomial => "binomial",
        })
    }
}

/// An `N x p` predictor matrix with its response.
///
/// Rows are observations. For the binomial family every response is exactly
/// `0.0` or `1.0` and both classes occur.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    x: Array2<f64>,
    y: Array1<f64>,
    column_names: Vec<String>,
    family: Family,
}

impl Dataset {
    pub fn new(
        x: Array2<f64>,
        y: Array1<f64>,
        column_names: Vec<String>,
        family: Family,
    ) -> Result<Self> {
        let (n, p) = x.dim();
        if n < 2 {
            return Err(Error::InvalidData(format!("need at least 2 observations, got {n}")));
        }
        if p < 1 {
            return Err(Error::InvalidData("need at least 1 predictor".into()));
        }
        if y.len() != n {
            return Err(Error::invalid(format!(
                "response has length {} but x has {n} rows",
                y.len()
            )));
        }
        if column_names.len() != p {
            return Err(Error::invalid(format!(
                "{} column names for {p} predictors",
                column_names.len()
            )));
        }
        if let Some(((i, j), v)) = x.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidData(format!(
                "non-finite value {v} at row {}, column '{}'",
                i + 1,
                column_names[j]
            )));
        }
        if let Some((i, v)) = y.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidData(format!("non-finite response {v} at row {}", i + 1)));
        }
        if family == Family::Binomial {
            if let Some((i, v)) = y.iter().enumerate().find(|(_, &v)| v != 0.0 && v != 1.0) {
                return Err(Error::InvalidData(format!(
                    "binomial response must be 0 or 1, found {v} at row {}",
                    i + 1
                )));
            }
            let ones = y.iter().filter(|&&v| v == 1.0).count();
            if ones == 0 || ones == n {
                return Err(Error::InvalidData(
                    "binomial response needs both classes present".into(),
                ));
            }
        }
        Ok(Dataset {
            x,
            y,
            column_names,
            family,
        })
    }

    /// Builds a dataset with predictor names `x1, x2, ...`.
    pub fn with_default_names(x: Array2<f64>, y: Array1<f64>, family: Family) -> Result<Self> {
        let names = (1..=x.ncols()).map(|j| format!("x{j}")).collect();
        Dataset::new(x, y, names, family)
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    pub fn x(&self) -> &Array2<f64> {
        &self.x
    }

    pub fn y(&self) -> &Array1<f64> {
        &self.y
    }

    pub fn column_names(&self) -> &[String] {
        &self.column_names
    }

    pub fn family(&self) -> Family {
        self.family
    }

    /// Subset of rows, in the given order. Skips the class-balance check so
    /// that fold training sets can be inspected by the caller.
    pub(crate) fn select_rows(&self, rows: &[usize]) -> Dataset {
        Dataset {
            x: self.x.select(Axis(0), rows),
            y: self.y.select(Axis(0), rows),
            column_names: self.column_names.clone(),
            family: self.family,
        }
    }

    /// Copy with predictor `j` multiplied by `factor`.
    pub fn with_scaled_column(&self, j: usize, factor: f64) -> Result<Dataset> {
        if j >= self.p() {
            return Err(Error::invalid(format!("column {j} out of range")));
        }
        let mut out = self.clone();
        out.x.column_mut(j).mapv_inplace(|v| v * factor);
        Dataset::new(out.x, out.y, out.column_names, out.family)
    }

    /// True when the response has no spread (Gaussian) or only one class (binomial).
    pub(crate) fn response_is_degenerate(&self) -> bool {
        let first = self.y[0];
        self.y.iter().all(|&v| v == first)
    }
}

/// Column means and scales used to move between the original and working bases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StandardizationStats {
    pub means: Vec<f64>,
    /// Population standard deviation (divisor `N`); `1.0` for constant columns.
    pub scales: Vec<f64>,
    /// Zero-variance columns. Their coefficients are held at zero.
    pub constant: Vec<bool>,
}

impl StandardizationStats {
    pub fn identity(p: usize) -> Self {
        StandardizationStats {
            means: vec![0.0; p],
            scales: vec![1.0; p],
            constant: vec![false; p],
        }
    }

    pub fn p(&self) -> usize {
        self.means.len()
    }
}

/// One `(alpha, lambda)` point of the tuning plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PenaltyPoint {
    pub alpha: f64,
    pub lambda: f64,
}

impl PenaltyPoint {
    pub fn new(alpha: f64, lambda: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::invalid(format!("alpha must lie in [0, 1], got {alpha}")));
        }
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(Error::invalid(format!(
                "lambda must be finite and non-negative, got {lambda}"
            )));
        }
        Ok(PenaltyPoint { alpha, lambda })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScaleBasis {
    Standardized,
    Original,
}

/// Intercept and slopes of a fitted linear predictor.
#[derive(Debug, Clone, PartialEq)]
pub struct Coefficients {
    pub intercept: f64,
    pub beta: Array1<f64>,
    pub basis: ScaleBasis,
}

impl Coefficients {
    pub fn zeros(p: usize, basis: ScaleBasis) -> Self {
        Coefficients {
            intercept: 0.0,
            beta: Array1::zeros(p),
            basis,
        }
    }

    /// Number of slopes that are exactly nonzero.
    pub fn nzero(&self) -> usize {
        self.beta.iter().filter(|&&b| b != 0.0).count()
    }

    /// Linear predictor `intercept + x * beta` for every row of `x`.
    pub fn predict(&self, x: &Array2<f64>) -> Array1<f64> {
        x.dot(&self.beta) + self.intercept
    }
}

/// Elastic net penalty `sum_j (1 - alpha)/2 * b_j^2 + alpha * |b_j|`.
pub fn penalty(beta: ArrayView1<'_, f64>, alpha: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::invalid(format!("alpha must lie in [0, 1], got {alpha}")));
    }
    if beta.iter().any(|b| !b.is_finite()) {
        return Err(Error::invalid("non-finite coefficient"));
    }
    Ok(penalty_unchecked(beta, alpha))
}

pub(crate) fn penalty_unchecked(beta: ArrayView1<'_, f64>, alpha: f64) -> f64 {
    beta.iter()
        .map(|&b| 0.5 * (1.0 - alpha) * b * b + alpha * b.abs())
        .sum()
}

/// Penalized least-squares objective `(1/2N) * ||y - b0 - X b||^2 + lambda * P_alpha(b)`.
pub fn objective(data: &Dataset, coef: &Coefficients, point: PenaltyPoint) -> Result<f64> {
    if data.family() != Family::Gaussian {
        return Err(Error::invalid("objective is defined for the gaussian family"));
    }
    if coef.beta.len() != data.p() {
        return Err(Error::invalid(format!(
            "{} coefficients for {} predictors",
            coef.beta.len(),
            data.p()
        )));
    }
    let resid = data.y() - &coef.predict(data.x());
    let rss: f64 = resid.iter().map(|r| r * r).sum();
    let pen = penalty(coef.beta.view(), point.alpha)?;
    Ok(rss / (2.0 * data.n() as f64) + point.lambda * pen)
}

fn column_stats(data: &Dataset) -> (Vec<f64>, Vec<f64>, Vec<bool>) {
    let n = data.n() as f64;
    let mut means = Vec::with_capacity(data.p());
    let mut sds = Vec::with_capacity(data.p());
    let mut constant = Vec::with_capacity(data.p());
    for col in data.x().columns() {
        let mean = col.sum() / n;
        let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        let sd = var.sqrt();
        let first = col[0];
        let is_const = col.iter().all(|&v| v == first) || sd <= 1e-13 * mean.abs().max(1.0);
        means.push(mean);
        sds.push(sd);
        constant.push(is_const);
    }
    (means, sds, constant)
}

fn transform(
    data: &Dataset,
    means: Vec<f64>,
    scales: Vec<f64>,
    constant: Vec<bool>,
) -> Result<(Dataset, StandardizationStats)> {
    if constant.iter().all(|&c| c) {
        return Err(Error::NoVaryingPredictors);
    }
    let mut x = data.x().clone();
    for (j, mut col) in x.columns_mut().into_iter().enumerate() {
        if constant[j] {
            col.fill(0.0);
        } else {
            let (m, s) = (means[j], scales[j]);
            col.mapv_inplace(|v| (v - m) / s);
        }
    }
    let out = Dataset {
        x,
        y: data.y().clone(),
        column_names: data.column_names().to_vec(),
        family: data.family(),
    };
    Ok((
        out,
        StandardizationStats {
            means,
            scales,
            constant,
        },
    ))
}

/// Centers every predictor and scales it to unit population standard deviation.
///
/// Constant columns are flagged and zeroed rather than divided by their
/// (zero) spread. The response is left untouched.
pub fn standardize(data: &Dataset) -> Result<(Dataset, StandardizationStats)> {
    let (means, sds, constant) = column_stats(data);
    let scales = sds
        .iter()
        .zip(&constant)
        .map(|(&s, &c)| if c { 1.0 } else { s })
        .collect();
    transform(data, means, scales, constant)
}

/// Centers predictors without rescaling them.
pub fn center(data: &Dataset) -> Result<(Dataset, StandardizationStats)> {
    let (means, _, constant) = column_stats(data);
    let scales = vec![1.0; data.p()];
    transform(data, means, scales, constant)
}

/// Moves working-basis coefficients back to the scale of the raw predictors.
pub fn destandardize(coef: &Coefficients, stats: &StandardizationStats) -> Result<Coefficients> {
    if coef.basis != ScaleBasis::Standardized {
        return Err(Error::invalid("coefficients are already on the original scale"));
    }
    if coef.beta.len() != stats.p() {
        return Err(Error::invalid(format!(
            "{} coefficients for {} standardized columns",
            coef.beta.len(),
            stats.p()
        )));
    }
    let beta: Array1<f64> = coef
        .beta
        .iter()
        .enumerate()
        .map(|(j, &b)| if stats.constant[j] { 0.0 } else { b / stats.scales[j] })
        .collect();
    let shift: f64 = beta.iter().zip(&stats.means).map(|(b, m)| b * m).sum();
    Ok(Coefficients {
        intercept: coef.intercept - shift,
        beta,
        basis: ScaleBasis::Original,
    })
}
