//! Simultaneous search of the lambda-alpha plane.
//!
//! Every alpha is cross-validated on one shared lambda grid and one fold
//! assignment, so the resulting errors are directly comparable across the
//! whole plane. The summary table has one [`CvRecord`] per grid point.

use std::cmp::Ordering;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cv::{assign_folds, cv_error, prepare_folds, CvCurve, FoldAssignment, DEFAULT_FOLDS};
use crate::data::{Coefficients, Dataset, Family, StandardizationStats};
use crate::error::{Error, Result};
use crate::grid::{build_shared_grid, default_lambda_min_ratio, validate_alphas, DEFAULT_NLAMBDA};
use crate::solver::{fit_path_working, working_basis, FitPath, SolverConfig};

/// `n` evenly spaced values from `lo` to `hi` inclusive.
pub fn alpha_sequence(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let by = (hi - lo) / (n - 1) as f64;
            (0..n).map(|i| lo + by * i as f64).collect()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    /// Sorted, unique, each in `[0, 1]`.
    pub alphas: Vec<f64>,
    pub nlambda: usize,
    /// `None` picks `1e-4` when `N > p` and `1e-2` otherwise.
    pub lambda_min_ratio: Option<f64>,
    pub k_folds: usize,
    pub seed: u64,
    pub standardize: bool,
    pub solver: SolverConfig,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            alphas: alpha_sequence(0.05, 0.95, 10),
            nlambda: DEFAULT_NLAMBDA,
            lambda_min_ratio: None,
            k_folds: DEFAULT_FOLDS,
            seed: 0,
            standardize: true,
            solver: SolverConfig::default(),
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        validate_alphas(&self.alphas)?;
        if self.nlambda < 1 {
            return Err(Error::invalid("nlambda must be at least 1"));
        }
        if let Some(r) = self.lambda_min_ratio {
            if !(r > 0.0 && r < 1.0) {
                return Err(Error::invalid("lambda_min_ratio must lie in (0, 1)"));
            }
        }
        self.solver.validate()
    }
}

/// One row of the search summary.
///
/// `l_index` is the 1-based position of the row's alpha in the ascending
/// alpha sequence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CvRecord {
    pub nzero: usize,
    pub l_index: usize,
    pub lambda: f64,
    pub cvm: f64,
    pub alpha: f64,
    pub cvsd: f64,
}

/// Orders records by cvm, breaking exact ties toward larger lambda and then
/// smaller alpha.
pub fn selection_order(a: &CvRecord, b: &CvRecord) -> Ordering {
    a.cvm
        .total_cmp(&b.cvm)
        .then_with(|| b.lambda.total_cmp(&a.lambda))
        .then_with(|| a.alpha.total_cmp(&b.alpha))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub config: SearchConfig,
    pub family: Family,
    pub column_names: Vec<String>,
    pub lambdas: Arc<Vec<f64>>,
    pub folds: Arc<FoldAssignment>,
    pub curves: Vec<CvCurve>,
    /// Full-data paths, one per alpha.
    pub full_fits: Vec<FitPath>,
    pub stats: StandardizationStats,
    pub summary: Vec<CvRecord>,
}

impl SearchResult {
    fn lambda_index(&self, lambda: f64) -> Option<usize> {
        self.lambdas.iter().position(|&l| l == lambda)
    }
}

fn build_summary(curves: &[CvCurve]) -> Vec<CvRecord> {
    curves
        .iter()
        .enumerate()
        .flat_map(|(i, c)| {
            (0..c.lambdas.len()).map(move |l| CvRecord {
                nzero: c.nzero[l],
                l_index: i + 1,
                lambda: c.lambdas[l],
                cvm: c.cvm[l],
                alpha: c.alpha,
                cvsd: c.cvsd[l],
            })
        })
        .collect()
}

/// Cross-validates every alpha of `config` on one shared lambda grid and one
/// fold assignment.
pub fn search(data: &Dataset, config: &SearchConfig) -> Result<SearchResult> {
    config.validate()?;
    let (work, stats) = working_basis(data, config.standardize)?;
    let ratio = config
        .lambda_min_ratio
        .unwrap_or_else(|| default_lambda_min_ratio(data.n(), data.p()));
    let lambdas = Arc::new(build_shared_grid(&work, &config.alphas, config.nlambda, ratio)?);

    let strata: Option<Vec<bool>> =
        (data.family() == Family::Binomial).then(|| data.y().iter().map(|&v| v == 1.0).collect());
    let folds = Arc::new(assign_folds(
        data.n(),
        config.k_folds,
        config.seed,
        strata.as_deref(),
    )?);
    let prepared = prepare_folds(data, &folds, config.standardize)?;

    let per_alpha: Vec<(CvCurve, FitPath)> = config
        .alphas
        .par_iter()
        .map(|&alpha| {
            let run = || -> Result<(CvCurve, FitPath)> {
                let (cvm, cvsd) = cv_error(&prepared, data.family(), alpha, &lambdas, &config.solver)?;
                let full = fit_path_working(&work, &stats, alpha, &lambdas, &config.solver)?;
                let curve = CvCurve {
                    alpha,
                    lambdas: Arc::clone(&lambdas),
                    cvm,
                    cvsd,
                    nzero: full.nzero.clone(),
                };
                Ok((curve, full))
            };
            run().map_err(|e| e.at_alpha(alpha))
        })
        .collect::<Result<_>>()?;

    let (curves, full_fits): (Vec<_>, Vec<_>) = per_alpha.into_iter().unzip();
    let summary = build_summary(&curves);
    Ok(SearchResult {
        config: config.clone(),
        family: data.family(),
        column_names: data.column_names().to_vec(),
        lambdas,
        folds,
        curves,
        full_fits,
        stats,
        summary,
    })
}

/// One row per grid point, ordered by `l_index` and then by descending lambda.
pub fn summarize(result: &SearchResult) -> Vec<CvRecord> {
    build_summary(&result.curves)
}

/// The minimum-cvm row for each distinct `nzero`, sorted by ascending cvm.
pub fn best_by_nzero(result: &SearchResult) -> Vec<CvRecord> {
    let mut best: std::collections::BTreeMap<usize, CvRecord> = Default::default();
    for rec in summarize(result) {
        best.entry(rec.nzero)
            .and_modify(|cur| {
                if selection_order(&rec, cur) == Ordering::Less {
                    *cur = rec;
                }
            })
            .or_insert(rec);
    }
    let mut rows: Vec<CvRecord> = best.into_values().collect();
    rows.sort_by(|a, b| selection_order(a, b).then(a.nzero.cmp(&b.nzero)));
    rows
}

fn argmin(records: &[CvRecord]) -> CvRecord {
    *records
        .iter()
        .min_by(|a, b| selection_order(a, b))
        .expect("a search has at least one grid point")
}

/// The grid point with the smallest cvm, together with its full-data
/// coefficients on the original predictor scale.
pub fn preferable(result: &SearchResult) -> (CvRecord, Coefficients) {
    let best = argmin(&summarize(result));
    let k = result
        .lambda_index(best.lambda)
        .expect("summary lambdas come from the shared grid");
    let coef = result.full_fits[best.l_index - 1].coefficients(k);
    (best, coef)
}

/// Floor applied to `Z` before taking `log10`, so the minimum maps to -2.
pub const Z_FLOOR: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZPoint {
    pub alpha: f64,
    pub lambda: f64,
    pub l_index: usize,
    pub z: f64,
    pub log10z: f64,
    pub is_min: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZSurface {
    pub points: Vec<ZPoint>,
    pub cvm_min: f64,
    pub cvsd_at_min: f64,
    /// `cvsd` was zero at the minimum, so `z` is a raw cvm difference rather
    /// than a count of standard errors.
    pub unit_fallback: bool,
}

impl ZSurface {
    pub fn minimum(&self) -> &ZPoint {
        self.points
            .iter()
            .find(|p| p.is_min)
            .expect("surface always flags its minimum")
    }
}

/// Number of standard errors each grid point sits above the global minimum cvm.
pub fn z_surface(result: &SearchResult) -> ZSurface {
    z_surface_from(&summarize(result))
}

/// [`z_surface`] over an explicit record table.
pub fn z_surface_from(records: &[CvRecord]) -> ZSurface {
    let best = argmin(records);
    let unit_fallback = !(best.cvsd > 0.0);
    let scale = if unit_fallback { 1.0 } else { best.cvsd };
    let mut flagged = false;
    let points = records
        .iter()
        .map(|r| {
            let is_min = !flagged && r == &best;
            flagged |= is_min;
            let z = (r.cvm - best.cvm) / scale;
            ZPoint {
                alpha: r.alpha,
                lambda: r.lambda,
                l_index: r.l_index,
                z,
                log10z: z.max(Z_FLOOR).log10(),
                is_min,
            }
        })
        .collect();
    ZSurface {
        points,
        cvm_min: best.cvm,
        cvsd_at_min: best.cvsd,
        unit_fallback,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepSelection {
    pub alpha: f64,
    pub lambda: f64,
    pub l_index: usize,
    pub cvm: f64,
    pub nzero: usize,
    pub nonzero: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepOutcome {
    pub rep: usize,
    pub seed: u64,
    pub selection: Option<RepSelection>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityReport {
    pub reps: Vec<RepOutcome>,
    pub column_names: Vec<String>,
    /// Per predictor, the share of successful reps whose preferable model
    /// keeps it.
    pub selection_frequency: Vec<f64>,
}

/// Reruns the search with fold memberships drawn from `seed + rep` for
/// `rep in 0..n_reps`, recording each rep's preferable model.
pub fn sensitivity_analysis(data: &Dataset, config: &SearchConfig, n_reps: usize) -> Result<SensitivityReport> {
    if n_reps < 2 {
        return Err(Error::invalid("sensitivity analysis needs at least 2 reps"));
    }
    let seeds: Vec<u64> = (0..n_reps as u64).map(|r| config.seed.wrapping_add(r)).collect();
    sensitivity_with_seeds(data, config, &seeds)
}

/// [`sensitivity_analysis`] with explicit per-rep seeds.
pub fn sensitivity_with_seeds(data: &Dataset, config: &SearchConfig, seeds: &[u64]) -> Result<SensitivityReport> {
    config.validate()?;
    let reps: Vec<RepOutcome> = seeds
        .par_iter()
        .enumerate()
        .map(|(rep, &seed)| {
            let cfg = SearchConfig {
                seed,
                ..config.clone()
            };
            match search(data, &cfg) {
                Ok(res) => {
                    let (rec, coef) = preferable(&res);
                    RepOutcome {
                        rep,
                        seed,
                        selection: Some(RepSelection {
                            alpha: rec.alpha,
                            lambda: rec.lambda,
                            l_index: rec.l_index,
                            cvm: rec.cvm,
                            nzero: rec.nzero,
                            nonzero: coef.beta.iter().map(|&b| b != 0.0).collect(),
                        }),
                        error: None,
                    }
                }
                Err(e) => RepOutcome {
                    rep,
                    seed,
                    selection: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();

    let ok: Vec<&RepSelection> = reps.iter().filter_map(|r| r.selection.as_ref()).collect();
    if ok.is_empty() {
        let first = reps[0].error.clone().unwrap_or_default();
        return Err(Error::InvalidData(format!("every sensitivity rep failed; first: {first}")));
    }
    let selection_frequency = (0..data.p())
        .map(|j| ok.iter().filter(|s| s.nonzero[j]).count() as f64 / ok.len() as f64)
        .collect();
    Ok(SensitivityReport {
        reps,
        column_names: data.column_names().to_vec(),
        selection_frequency,
    })
}
