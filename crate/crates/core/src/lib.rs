//! Elastic net regression by coordinate descent, with a cross-validated
//! search over the whole lambda-alpha tuning plane.
//!
//! The pieces, bottom up:
//!
//! - [`data`]: datasets, standardization, the penalty and objective.
//! - [`solver`]: coordinate descent (Gaussian) and IRLS (binomial) along a
//!   warm-started lambda path, plus a KKT optimality check.
//! - [`grid`]: the lambda grid shared by every alpha.
//! - [`cv`]: seeded fold assignment and K-fold error curves.
//! - [`search`]: the lambda-alpha search, its summary table, model selection
//!   and the Z surface.

pub mod cv;
pub mod data;
pub mod error;
pub mod grid;
pub mod search;
pub mod solver;
pub mod synth;

pub use cv::{assign_folds, cv_path, cv_path_with_fit, CvCurve, FoldAssignment};
pub use data::{
    center, destandardize, objective, penalty, standardize, Coefficients, Dataset, Family,
    PenaltyPoint, ScaleBasis, StandardizationStats,
};
pub use error::{Error, Result};
pub use grid::{build_shared_grid, default_lambda_min_ratio, lambda_max};
pub use search::{
    alpha_sequence, best_by_nzero, preferable, search, sensitivity_analysis,
    sensitivity_with_seeds, summarize, z_surface, z_surface_from, CvRecord, SearchConfig,
    SearchResult, SensitivityReport, ZPoint, ZSurface,
};
pub use solver::{
    fit_at, fit_at_traced, fit_binomial_at, fit_path, kkt_check, soft_threshold, working_basis,
    Fit, FitPath, KktReport, SolverConfig,
};
