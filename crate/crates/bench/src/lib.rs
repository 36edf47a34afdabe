//! Fixed datasets shared by the benchmarks.

use enetsearch::synth::{gaussian_regression, BinaryCodes};
use enetsearch::Dataset;

/// Gaussian regression with five active predictors and mild correlation.
pub fn gaussian(n: usize, p: usize) -> Dataset {
    gaussian_regression(n, p, 5.min(p), 0.3, 1.0, 1)
        .expect("synthetic design is valid")
        .data
}

/// Twelve binary predictors with a binary outcome.
pub fn binary_codes(n: usize) -> Dataset {
    BinaryCodes::injury_like()
        .generate(n, 1)
        .expect("synthetic design is valid")
        .data
}
