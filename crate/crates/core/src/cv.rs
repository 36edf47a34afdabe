//! K-fold cross-validation of a lambda path at a fixed alpha.
//!
//! Fold membership comes from a ChaCha8 stream seeded with the user's 64-bit
//! seed, so assignments are reproducible across platforms. One
//! [`FoldAssignment`] is reused for every alpha of a search.

use std::sync::Arc;

use ndarray::{Array1, Array2};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Family, StandardizationStats};
use crate::error::{Error, Result};
use crate::solver::{check_lambdas, fit_path_working, working_basis, FitPath, SolverConfig};

/// Probability clamp used by the held-out deviance.
pub const DEVIANCE_CLAMP: f64 = 1e-5;

pub const DEFAULT_FOLDS: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldAssignment {
    /// 1-based fold label of every observation.
    pub fold_of: Vec<usize>,
    pub k: usize,
    pub seed: u64,
    pub stratified: bool,
    /// Some stratum had fewer members than folds, so it could not be spread
    /// over every fold.
    pub stratum_fallback: bool,
}

impl FoldAssignment {
    pub fn n(&self) -> usize {
        self.fold_of.len()
    }

    /// Rows held out by fold `f` (1-based).
    pub fn held_out(&self, f: usize) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.fold_of[i] == f).collect()
    }

    /// Rows used to train fold `f` (1-based).
    pub fn training(&self, f: usize) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.fold_of[i] != f).collect()
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in &self.fold_of {
            sizes[f - 1] += 1;
        }
        sizes
    }
}

/// Deterministic K-fold assignment.
///
/// Fold labels are dealt cyclically, continuing the cycle from one stratum to
/// the next, and then shuffled within each stratum. Fold sizes therefore
/// differ by at most one overall and within every stratum.
pub fn assign_folds(n: usize, k: usize, seed: u64, strata: Option<&[bool]>) -> Result<FoldAssignment> {
    if k < 2 {
        return Err(Error::invalid(format!("need at least 2 folds, got {k}")));
    }
    if k > n {
        return Err(Error::invalid(format!("{k} folds requested for {n} observations")));
    }
    if n < 2 * k {
        return Err(Error::invalid(format!(
            "{k} folds over {n} observations would leave a fold with fewer than 2 rows"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fold_of = vec![0usize; n];
    let mut stratum_fallback = false;

    let groups: Vec<Vec<usize>> = match strata {
        Some(s) => {
            if s.len() != n {
                return Err(Error::invalid("strata length does not match n"));
            }
            let zeros: Vec<usize> = (0..n).filter(|&i| !s[i]).collect();
            let ones: Vec<usize> = (0..n).filter(|&i| s[i]).collect();
            [zeros, ones].into_iter().filter(|g| !g.is_empty()).collect()
        }
        None => vec![(0..n).collect()],
    };

    let mut offset = 0usize;
    for rows in &groups {
        if strata.is_some() && rows.len() < k {
            stratum_fallback = true;
        }
        let mut labels: Vec<usize> = (0..rows.len()).map(|i| (offset + i) % k + 1).collect();
        labels.shuffle(&mut rng);
        for (&row, label) in rows.iter().zip(labels) {
            fold_of[row] = label;
        }
        offset += rows.len();
    }

    Ok(FoldAssignment {
        fold_of,
        k,
        seed,
        stratified: strata.is_some(),
        stratum_fallback,
    })
}

/// Cross-validated error along the shared lambda grid at one alpha.
#[derive(Debug, Clone, PartialEq)]
pub struct CvCurve {
    pub alpha: f64,
    pub lambdas: Arc<Vec<f64>>,
    pub cvm: Vec<f64>,
    pub cvsd: Vec<f64>,
    /// Nonzero slopes of the full-data fit at each lambda.
    pub nzero: Vec<usize>,
}

/// A fold's training set in the working basis plus its held-out rows.
pub(crate) struct FoldData {
    train: Dataset,
    stats: StandardizationStats,
    test_x: Array2<f64>,
    test_y: Array1<f64>,
}

pub(crate) fn prepare_folds(
    data: &Dataset,
    folds: &FoldAssignment,
    standardize_x: bool,
) -> Result<Vec<FoldData>> {
    if folds.n() != data.n() {
        return Err(Error::invalid(format!(
            "fold assignment covers {} rows, data has {}",
            folds.n(),
            data.n()
        )));
    }
    (1..=folds.k)
        .map(|f| {
            let train = data.select_rows(&folds.training(f));
            if train.response_is_degenerate() {
                return Err(Error::DegenerateFold { fold: f });
            }
            let (train, stats) = working_basis(&train, standardize_x)?;
            let test = data.select_rows(&folds.held_out(f));
            Ok(FoldData {
                train,
                stats,
                test_x: test.x().clone(),
                test_y: test.y().clone(),
            })
        })
        .collect()
}

fn held_out_losses(fold: &FoldData, path: &FitPath, family: Family) -> Vec<f64> {
    let m = fold.test_y.len() as f64;
    (0..path.len())
        .map(|k| {
            let eta = path.coefficients(k).predict(&fold.test_x);
            let total: f64 = match family {
                Family::Gaussian => eta
                    .iter()
                    .zip(fold.test_y.iter())
                    .map(|(e, y)| (y - e) * (y - e))
                    .sum(),
                Family::Binomial => eta
                    .iter()
                    .zip(fold.test_y.iter())
                    .map(|(&e, &y)| {
                        let p = (1.0 / (1.0 + (-e).exp())).clamp(DEVIANCE_CLAMP, 1.0 - DEVIANCE_CLAMP);
                        -2.0 * (y * p.ln() + (1.0 - y) * (1.0 - p).ln())
                    })
                    .sum(),
            };
            total / m
        })
        .collect()
}

/// Mean of the fold means and its standard error (sd with divisor `K - 1`, over `sqrt(K)`).
pub(crate) fn aggregate(fold_means: &[Vec<f64>], nlambda: usize) -> (Vec<f64>, Vec<f64>) {
    let k = fold_means.len() as f64;
    let mut cvm = vec![0.0; nlambda];
    let mut cvsd = vec![0.0; nlambda];
    for l in 0..nlambda {
        let mean = fold_means.iter().map(|f| f[l]).sum::<f64>() / k;
        let ss: f64 = fold_means.iter().map(|f| (f[l] - mean).powi(2)).sum();
        cvm[l] = mean;
        cvsd[l] = if k > 1.0 { (ss / (k - 1.0)).sqrt() / k.sqrt() } else { 0.0 };
    }
    (cvm, cvsd)
}

pub(crate) fn cv_error(
    folds: &[FoldData],
    family: Family,
    alpha: f64,
    lambdas: &[f64],
    cfg: &SolverConfig,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let fold_means: Vec<Vec<f64>> = folds
        .par_iter()
        .map(|fold| {
            let path = fit_path_working(&fold.train, &fold.stats, alpha, lambdas, cfg)?;
            Ok(held_out_losses(fold, &path, family))
        })
        .collect::<Result<_>>()?;
    Ok(aggregate(&fold_means, lambdas.len()))
}

/// Cross-validates the path at `alpha` over `folds`, standardizing each
/// training set with its own statistics. Returns the curve together with the
/// full-data path that supplies `nzero`.
pub fn cv_path_with_fit(
    data: &Dataset,
    alpha: f64,
    lambdas: &Arc<Vec<f64>>,
    folds: &FoldAssignment,
    cfg: &SolverConfig,
    standardize_x: bool,
) -> Result<(CvCurve, FitPath)> {
    check_lambdas(lambdas)?;
    let prepared = prepare_folds(data, folds, standardize_x)?;
    let (cvm, cvsd) = cv_error(&prepared, data.family(), alpha, lambdas, cfg)?;
    let (work, stats) = working_basis(data, standardize_x)?;
    let full = fit_path_working(&work, &stats, alpha, lambdas, cfg)?;
    let curve = CvCurve {
        alpha,
        lambdas: Arc::clone(lambdas),
        cvm,
        cvsd,
        nzero: full.nzero.clone(),
    };
    Ok((curve, full))
}

/// Cross-validated error curve at one alpha.
pub fn cv_path(
    data: &Dataset,
    alpha: f64,
    lambdas: &Arc<Vec<f64>>,
    folds: &FoldAssignment,
    cfg: &SolverConfig,
    standardize_x: bool,
) -> Result<CvCurve> {
    cv_path_with_fit(data, alpha, lambdas, folds, cfg, standardize_x).map(|(c, _)| c)
}
