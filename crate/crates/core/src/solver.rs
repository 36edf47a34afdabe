//! Cyclic coordinate descent for the elastic net, with an IRLS outer loop for
//! logistic regression and a path driver that warm-starts along a decreasing
//! lambda grid.
//!
//! All fitting happens in the working basis produced by [`standardize`] (or
//! [`center`] when standardization is switched off). Paths report
//! coefficients on the original predictor scale.

use ndarray::{Array1, Array2};

use crate::data::{
    center, destandardize, penalty_unchecked, standardize, Coefficients, Dataset, Family,
    PenaltyPoint, ScaleBasis, StandardizationStats,
};
use crate::error::{Error, Result};

/// Stopping rules for the coordinate-descent and IRLS loops.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Bound on `max_j xv_j * (delta beta_j)^2` over one pass, where `xv_j` is
    /// the weighted mean square of column `j` (1 for standardized columns).
    pub tol: f64,
    /// Coordinate passes allowed per inner solve.
    pub max_passes: usize,
    pub irls_max_iter: usize,
    /// Bound on the largest absolute coefficient change across one IRLS step.
    pub irls_tol: f64,
    /// Fitted probabilities are clamped to `[min_prob_clamp, 1 - min_prob_clamp]`.
    pub min_prob_clamp: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tol: 1e-14,
            max_passes: 100_000,
            irls_max_iter: 25,
            irls_tol: 1e-8,
            min_prob_clamp: 1e-5,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::invalid("solver tol must be positive"));
        }
        if self.max_passes < 1 || self.irls_max_iter < 1 {
            return Err(Error::invalid("iteration limits must be at least 1"));
        }
        if !(self.irls_tol > 0.0 && self.irls_tol.is_finite()) {
            return Err(Error::invalid("irls_tol must be positive"));
        }
        if !(self.min_prob_clamp > 0.0 && self.min_prob_clamp < 0.5) {
            return Err(Error::invalid("min_prob_clamp must lie in (0, 0.5)"));
        }
        Ok(())
    }
}

/// Result of a single-point fit, in the working basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Fit {
    pub coef: Coefficients,
    pub converged: bool,
    /// Coordinate passes used (summed over IRLS steps for the binomial family).
    pub passes: usize,
    /// A fitted probability hit the clamp (typically a sign of separation).
    pub clamped: bool,
}

/// Solutions along a decreasing lambda grid at one alpha.
#[derive(Debug, Clone, PartialEq)]
pub struct FitPath {
    pub alpha: f64,
    pub lambdas: Vec<f64>,
    /// Original-scale intercepts, one per lambda.
    pub intercepts: Vec<f64>,
    /// Original-scale slopes, `L x p`.
    pub betas: Array2<f64>,
    pub nzero: Vec<usize>,
    pub converged: Vec<bool>,
    pub clamped: Vec<bool>,
    pub std_intercepts: Vec<f64>,
    pub std_betas: Array2<f64>,
    pub stats: StandardizationStats,
}

impl FitPath {
    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    pub fn coefficients(&self, k: usize) -> Coefficients {
        Coefficients {
            intercept: self.intercepts[k],
            beta: self.betas.row(k).to_owned(),
            basis: ScaleBasis::Original,
        }
    }

    pub fn standardized_coefficients(&self, k: usize) -> Coefficients {
        Coefficients {
            intercept: self.std_intercepts[k],
            beta: self.std_betas.row(k).to_owned(),
            basis: ScaleBasis::Standardized,
        }
    }
}

/// `sign(z) * max(|z| - gamma, 0)`.
#[inline]
pub fn soft_threshold(z: f64, gamma: f64) -> f64 {
    if z > gamma {
        z - gamma
    } else if z < -gamma {
        z + gamma
    } else {
        0.0
    }
}

/// Column-major copy of the working design.
pub(crate) struct Design {
    n: usize,
    p: usize,
    cols: Vec<f64>,
}

impl Design {
    pub(crate) fn new(x: &Array2<f64>) -> Self {
        let (n, p) = x.dim();
        let mut cols = Vec::with_capacity(n * p);
        for col in x.columns() {
            cols.extend(col.iter());
        }
        Design { n, p, cols }
    }

    #[inline]
    fn col(&self, j: usize) -> &[f64] {
        &self.cols[j * self.n..(j + 1) * self.n]
    }

    fn linear_predictor(&self, b0: f64, beta: &[f64]) -> Vec<f64> {
        let mut eta = vec![b0; self.n];
        for (j, &b) in beta.iter().enumerate() {
            if b != 0.0 {
                for (e, &x) in eta.iter_mut().zip(self.col(j)) {
                    *e += x * b;
                }
            }
        }
        eta
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Weighted quadratic subproblem
/// `(1/2N) sum_i w_i (z_i - b0 - x_i b)^2 + lambda * P_alpha(b)`.
struct Quadratic<'a> {
    design: &'a Design,
    z: &'a [f64],
    /// `None` means unit weights.
    w: Option<&'a [f64]>,
    lambda: f64,
    alpha: f64,
}

struct CdOutcome {
    converged: bool,
    passes: usize,
}

impl Quadratic<'_> {
    fn objective(&self, resid: &[f64], beta: &[f64]) -> f64 {
        let n = self.design.n as f64;
        let loss: f64 = match self.w {
            Some(w) => resid.iter().zip(w).map(|(r, w)| w * r * r).sum(),
            None => resid.iter().map(|r| r * r).sum(),
        };
        loss / (2.0 * n) + self.lambda * penalty_unchecked(ndarray::ArrayView1::from(beta), self.alpha)
    }

    /// Minimizes in place from `(b0, beta)`. When `trace` is given, the
    /// objective is appended after every pass.
    fn solve(
        &self,
        b0: &mut f64,
        beta: &mut [f64],
        tol: f64,
        max_passes: usize,
        mut trace: Option<&mut Vec<f64>>,
    ) -> Result<CdOutcome> {
        let d = self.design;
        let nf = d.n as f64;
        let l1 = self.lambda * self.alpha;
        let l2 = self.lambda * (1.0 - self.alpha);

        let mut wx_buf: Vec<f64> = Vec::new();
        let xv: Vec<f64> = (0..d.p)
            .map(|j| match self.w {
                Some(w) => d.col(j).iter().zip(w).map(|(x, w)| w * x * x).sum::<f64>() / nf,
                None => dot(d.col(j), d.col(j)) / nf,
            })
            .collect();
        // pre-multiplied weighted columns keep the inner product a single dot
        if let Some(w) = self.w {
            wx_buf.reserve(d.n * d.p);
            for j in 0..d.p {
                wx_buf.extend(d.col(j).iter().zip(w).map(|(x, w)| x * w));
            }
        }
        let wcol = |j: usize| -> &[f64] {
            if self.w.is_some() {
                &wx_buf[j * d.n..(j + 1) * d.n]
            } else {
                d.col(j)
            }
        };
        let sum_w = self.w.map_or(nf, |w| w.iter().sum());

        let eta = d.linear_predictor(*b0, beta);
        let mut resid: Vec<f64> = self.z.iter().zip(&eta).map(|(z, e)| z - e).collect();

        let mut passes = 0usize;
        let fail = |reason: &str| Error::NumericFailure {
            alpha: self.alpha,
            lambda: self.lambda,
            reason: reason.to_string(),
        };

        // one sweep over the intercept and the listed coordinates
        let sweep = |coords: &mut dyn Iterator<Item = usize>,
                         b0: &mut f64,
                         beta: &mut [f64],
                         resid: &mut [f64]|
         -> Result<f64> {
            let mut max_change = 0.0f64;
            let shift = match self.w {
                Some(w) => dot(w, resid) / sum_w,
                None => resid.iter().sum::<f64>() / nf,
            };
            if shift != 0.0 {
                *b0 += shift;
                resid.iter_mut().for_each(|r| *r -= shift);
                max_change = max_change.max(sum_w / nf * shift * shift);
            }
            for j in coords {
                if xv[j] <= 0.0 {
                    continue;
                }
                let old = beta[j];
                let grad = dot(wcol(j), resid) / nf + xv[j] * old;
                let new = soft_threshold(grad, l1) / (xv[j] + l2);
                if !new.is_finite() {
                    return Err(fail("non-finite coefficient update"));
                }
                let delta = new - old;
                if delta != 0.0 {
                    beta[j] = new;
                    for (r, &x) in resid.iter_mut().zip(d.col(j)) {
                        *r -= x * delta;
                    }
                    max_change = max_change.max(xv[j] * delta * delta);
                }
            }
            if !b0.is_finite() {
                return Err(fail("non-finite intercept"));
            }
            Ok(max_change)
        };

        loop {
            let change = sweep(&mut (0..d.p), b0, beta, &mut resid)?;
            passes += 1;
            if let Some(t) = trace.as_deref_mut() {
                t.push(self.objective(&resid, beta));
            }
            if change < tol {
                return Ok(CdOutcome {
                    converged: true,
                    passes,
                });
            }
            if passes >= max_passes {
                return Ok(CdOutcome {
                    converged: false,
                    passes,
                });
            }
            let active: Vec<usize> = (0..d.p).filter(|&j| beta[j] != 0.0).collect();
            loop {
                let change = sweep(&mut active.iter().copied(), b0, beta, &mut resid)?;
                passes += 1;
                if let Some(t) = trace.as_deref_mut() {
                    t.push(self.objective(&resid, beta));
                }
                if change < tol {
                    break;
                }
                if passes >= max_passes {
                    return Ok(CdOutcome {
                        converged: false,
                        passes,
                    });
                }
            }
        }
    }
}

fn check_warm(data: &Dataset, warm: &Coefficients) -> Result<()> {
    if warm.basis != ScaleBasis::Standardized {
        return Err(Error::invalid("warm start must be in the standardized basis"));
    }
    if warm.beta.len() != data.p() {
        return Err(Error::invalid(format!(
            "warm start has {} coefficients for {} predictors",
            warm.beta.len(),
            data.p()
        )));
    }
    Ok(())
}

fn gaussian_fit(
    design: &Design,
    y: &[f64],
    point: PenaltyPoint,
    warm: &Coefficients,
    cfg: &SolverConfig,
    trace: Option<&mut Vec<f64>>,
) -> Result<Fit> {
    let problem = Quadratic {
        design,
        z: y,
        w: None,
        lambda: point.lambda,
        alpha: point.alpha,
    };
    let mut b0 = warm.intercept;
    let mut beta = warm.beta.to_vec();
    let out = problem.solve(&mut b0, &mut beta, cfg.tol, cfg.max_passes, trace)?;
    Ok(Fit {
        coef: Coefficients {
            intercept: b0,
            beta: Array1::from(beta),
            basis: ScaleBasis::Standardized,
        },
        converged: out.converged,
        passes: out.passes,
        clamped: false,
    })
}

/// Gaussian elastic net fit at one penalty point, warm-started from `warm`.
///
/// `data` must already be in the working basis (see [`standardize`]).
pub fn fit_at(
    data: &Dataset,
    point: PenaltyPoint,
    warm: &Coefficients,
    cfg: &SolverConfig,
) -> Result<Fit> {
    if data.family() != Family::Gaussian {
        return Err(Error::invalid("fit_at handles the gaussian family; use fit_binomial_at"));
    }
    check_warm(data, warm)?;
    let design = Design::new(data.x());
    let y = data.y().to_vec();
    gaussian_fit(&design, &y, point, warm, cfg, None)
}

/// [`fit_at`] that also returns the objective after every coordinate pass.
pub fn fit_at_traced(
    data: &Dataset,
    point: PenaltyPoint,
    warm: &Coefficients,
    cfg: &SolverConfig,
) -> Result<(Fit, Vec<f64>)> {
    if data.family() != Family::Gaussian {
        return Err(Error::invalid("objective trace is defined for the gaussian family"));
    }
    check_warm(data, warm)?;
    let design = Design::new(data.x());
    let y = data.y().to_vec();
    let mut trace = Vec::new();
    let fit = gaussian_fit(&design, &y, point, warm, cfg, Some(&mut trace))?;
    Ok((fit, trace))
}

const MAX_HALVINGS: usize = 20;

#[inline]
fn sigmoid(eta: f64) -> f64 {
    1.0 / (1.0 + (-eta).exp())
}

/// Mean negative log-likelihood plus penalty.
fn binomial_objective(y: &[f64], eta: &[f64], beta: &[f64], point: PenaltyPoint) -> f64 {
    // log(1 + e^eta) - y * eta, evaluated without overflow
    let nll: f64 = y
        .iter()
        .zip(eta)
        .map(|(&y, &e)| e.max(0.0) + (-e.abs()).exp().ln_1p() - y * e)
        .sum();
    nll / y.len() as f64
        + point.lambda * penalty_unchecked(ndarray::ArrayView1::from(beta), point.alpha)
}

fn binomial_fit(
    design: &Design,
    y: &[f64],
    point: PenaltyPoint,
    warm: &Coefficients,
    cfg: &SolverConfig,
) -> Result<Fit> {
    let clamp = cfg.min_prob_clamp;
    let mut b0 = warm.intercept;
    let mut beta = warm.beta.to_vec();
    let mut eta = design.linear_predictor(b0, &beta);
    let mut prev_obj = binomial_objective(y, &eta, &beta, point);
    let mut increases = 0usize;
    let mut passes = 0usize;
    let mut clamped = false;
    let mut converged = false;

    let mut w = vec![0.0; design.n];
    let mut z = vec![0.0; design.n];
    for _ in 0..cfg.irls_max_iter {
        for i in 0..design.n {
            let raw = sigmoid(eta[i]);
            let p = raw.clamp(clamp, 1.0 - clamp);
            if p != raw {
                clamped = true;
            }
            w[i] = p * (1.0 - p);
            z[i] = eta[i] + (y[i] - p) / w[i];
        }
        let problem = Quadratic {
            design,
            z: &z,
            w: Some(&w),
            lambda: point.lambda,
            alpha: point.alpha,
        };
        let (old_b0, old_beta) = (b0, beta.clone());
        let out = problem.solve(&mut b0, &mut beta, cfg.tol, cfg.max_passes, None)?;
        passes += out.passes;

        eta = design.linear_predictor(b0, &beta);
        let mut obj = binomial_objective(y, &eta, &beta, point);
        // step halving while the penalized deviance goes up
        let tolerance = 1e-12 * prev_obj.abs().max(1.0);
        let mut halvings = 0;
        while !(obj <= prev_obj + tolerance) && halvings < MAX_HALVINGS {
            b0 = 0.5 * (b0 + old_b0);
            for (b, o) in beta.iter_mut().zip(&old_beta) {
                *b = 0.5 * (*b + o);
            }
            eta = design.linear_predictor(b0, &beta);
            obj = binomial_objective(y, &eta, &beta, point);
            halvings += 1;
        }
        if !obj.is_finite() {
            return Err(Error::NumericFailure {
                alpha: point.alpha,
                lambda: point.lambda,
                reason: "non-finite penalized deviance".into(),
            });
        }
        let change = beta
            .iter()
            .zip(&old_beta)
            .map(|(a, b)| (a - b).abs())
            .fold((b0 - old_b0).abs(), f64::max);
        if obj > prev_obj + tolerance {
            increases += 1;
            if increases >= 3 {
                return Err(Error::NumericFailure {
                    alpha: point.alpha,
                    lambda: point.lambda,
                    reason: "penalized deviance increased over 3 consecutive IRLS steps".into(),
                });
            }
        } else {
            increases = 0;
        }
        prev_obj = obj;
        if change < cfg.irls_tol && out.converged {
            converged = true;
            break;
        }
    }
    Ok(Fit {
        coef: Coefficients {
            intercept: b0,
            beta: Array1::from(beta),
            basis: ScaleBasis::Standardized,
        },
        converged,
        passes,
        clamped,
    })
}

/// Penalized logistic regression at one point via IRLS with a weighted
/// coordinate-descent inner loop. `data` must be in the working basis.
pub fn fit_binomial_at(
    data: &Dataset,
    point: PenaltyPoint,
    warm: &Coefficients,
    cfg: &SolverConfig,
) -> Result<Fit> {
    if data.family() != Family::Binomial {
        return Err(Error::invalid("fit_binomial_at needs a binomial dataset"));
    }
    check_warm(data, warm)?;
    let design = Design::new(data.x());
    let y = data.y().to_vec();
    binomial_fit(&design, &y, point, warm, cfg)
}

/// Moves a dataset into the working basis.
pub fn working_basis(data: &Dataset, standardize_x: bool) -> Result<(Dataset, StandardizationStats)> {
    if standardize_x {
        standardize(data)
    } else {
        center(data)
    }
}

pub(crate) fn check_lambdas(lambdas: &[f64]) -> Result<()> {
    if lambdas.is_empty() {
        return Err(Error::invalid("lambda sequence is empty"));
    }
    if lambdas.iter().any(|l| !(l.is_finite() && *l >= 0.0)) {
        return Err(Error::invalid("lambdas must be finite and non-negative"));
    }
    if lambdas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::invalid("lambdas must be strictly decreasing"));
    }
    Ok(())
}

/// Fits a path on data that is already in the working basis.
pub(crate) fn fit_path_working(
    work: &Dataset,
    stats: &StandardizationStats,
    alpha: f64,
    lambdas: &[f64],
    cfg: &SolverConfig,
) -> Result<FitPath> {
    check_lambdas(lambdas)?;
    cfg.validate()?;
    let (n, p) = (work.n(), work.p());
    let l = lambdas.len();
    let design = Design::new(work.x());
    let y = work.y().to_vec();
    let family = work.family();

    let mut warm = Coefficients::zeros(p, ScaleBasis::Standardized);
    if family == Family::Binomial {
        let ybar = y.iter().sum::<f64>() / n as f64;
        warm.intercept = (ybar / (1.0 - ybar)).ln();
    } else {
        warm.intercept = y.iter().sum::<f64>() / n as f64;
    }

    let mut path = FitPath {
        alpha,
        lambdas: lambdas.to_vec(),
        intercepts: Vec::with_capacity(l),
        betas: Array2::zeros((l, p)),
        nzero: Vec::with_capacity(l),
        converged: Vec::with_capacity(l),
        clamped: Vec::with_capacity(l),
        std_intercepts: Vec::with_capacity(l),
        std_betas: Array2::zeros((l, p)),
        stats: stats.clone(),
    };
    for (k, &lambda) in lambdas.iter().enumerate() {
        let point = PenaltyPoint::new(alpha, lambda)?;
        let fit = match family {
            Family::Gaussian => gaussian_fit(&design, &y, point, &warm, cfg, None)?,
            Family::Binomial => binomial_fit(&design, &y, point, &warm, cfg)?,
        };
        let orig = destandardize(&fit.coef, stats)?;
        path.std_intercepts.push(fit.coef.intercept);
        path.std_betas.row_mut(k).assign(&fit.coef.beta);
        path.intercepts.push(orig.intercept);
        path.betas.row_mut(k).assign(&orig.beta);
        path.nzero.push(orig.nzero());
        path.converged.push(fit.converged);
        path.clamped.push(fit.clamped);
        warm = fit.coef;
    }
    Ok(path)
}

/// Fits the whole decreasing `lambdas` sequence at one `alpha`, warm-starting
/// each point from its predecessor. `data` is on the original scale; it is
/// standardized (or only centered) internally and the path reports
/// original-scale coefficients.
pub fn fit_path(
    data: &Dataset,
    alpha: f64,
    lambdas: &[f64],
    cfg: &SolverConfig,
    standardize_x: bool,
) -> Result<FitPath> {
    let (work, stats) = working_basis(data, standardize_x)?;
    fit_path_working(&work, &stats, alpha, lambdas, cfg)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KktViolation {
    /// `None` for the intercept.
    pub coordinate: Option<usize>,
    pub excess: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KktReport {
    pub passed: bool,
    pub max_excess: f64,
    pub violations: Vec<KktViolation>,
}

/// First-order optimality check of a Gaussian fit in the working basis.
///
/// With `g_j = (1/N) sum_i x_ij r_i`, an active coordinate needs
/// `|g_j - lambda(1-alpha) b_j - lambda alpha sign(b_j)| <= tol`, an inactive one
/// `|g_j| <= lambda alpha + tol`, and the residuals must average to zero.
pub fn kkt_check(data: &Dataset, coef: &Coefficients, point: PenaltyPoint, tol: f64) -> Result<KktReport> {
    if data.family() != Family::Gaussian {
        return Err(Error::invalid("kkt_check handles the gaussian family"));
    }
    if coef.beta.len() != data.p() {
        return Err(Error::invalid("coefficient length does not match predictors"));
    }
    let n = data.n() as f64;
    let resid = data.y() - &coef.predict(data.x());
    let (l1, l2) = (point.lambda * point.alpha, point.lambda * (1.0 - point.alpha));

    let mut violations = Vec::new();
    let mut max_excess = 0.0f64;
    let mut record = |coordinate: Option<usize>, excess: f64| {
        max_excess = max_excess.max(excess);
        if excess > 0.0 {
            violations.push(KktViolation { coordinate, excess });
        }
    };

    record(None, (resid.sum() / n).abs() - tol);
    for (j, col) in data.x().columns().into_iter().enumerate() {
        let g = col.dot(&resid) / n;
        let b = coef.beta[j];
        let excess = if b != 0.0 {
            (g - l2 * b - l1 * b.signum()).abs() - tol
        } else {
            g.abs() - l1 - tol
        };
        record(Some(j), excess);
    }
    Ok(KktReport {
        passed: violations.is_empty(),
        max_excess,
        violations,
    })
}
