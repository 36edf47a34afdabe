//! Seeded synthetic datasets with known coefficients.

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::data::{Dataset, Family};
use crate::error::Result;

#[derive(Debug, Clone)]
pub struct Synthetic {
    pub data: Dataset,
    pub intercept: f64,
    pub beta: Vec<f64>,
}

impl Synthetic {
    /// Indices of the predictors with a nonzero generating coefficient.
    pub fn support(&self) -> Vec<usize> {
        (0..self.beta.len()).filter(|&j| self.beta[j] != 0.0).collect()
    }
}

/// Gaussian design whose columns share pairwise correlation `rho`, which
/// bounds the condition number of `X'X/N` near `(1 + (p-1) rho) / (1 - rho)`.
pub fn correlated_design(n: usize, p: usize, rho: f64, rng: &mut impl Rng) -> Array2<f64> {
    let a = rho.sqrt();
    let b = (1.0 - rho).sqrt();
    let mut x = Array2::zeros((n, p));
    for i in 0..n {
        let shared: f64 = rng.sample(StandardNormal);
        for j in 0..p {
            let own: f64 = rng.sample(StandardNormal);
            x[[i, j]] = a * shared + b * own;
        }
    }
    x
}

/// Linear model `y = 1 + X beta + noise` with `k_signal` leading nonzero
/// slopes of alternating sign and decreasing size.
pub fn gaussian_regression(
    n: usize,
    p: usize,
    k_signal: usize,
    rho: f64,
    noise_sd: f64,
    seed: u64,
) -> Result<Synthetic> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = correlated_design(n, p, rho, &mut rng);
    let beta: Vec<f64> = (0..p)
        .map(|j| {
            if j < k_signal {
                let mag = 2.0 / (1.0 + j as f64 * 0.5);
                if j % 2 == 0 {
                    mag
                } else {
                    -mag
                }
            } else {
                0.0
            }
        })
        .collect();
    let intercept = 1.0;
    let eta = x.dot(&Array1::from(beta.clone())) + intercept;
    let y = eta.mapv(|e| e + noise_sd * rng.sample::<f64, _>(StandardNormal));
    Ok(Synthetic {
        data: Dataset::with_default_names(x, y, Family::Gaussian)?,
        intercept,
        beta,
    })
}

/// Layout of a binary-predictor, binary-outcome dataset.
#[derive(Debug, Clone)]
pub struct BinaryCodes {
    pub names: Vec<String>,
    /// Probability that each predictor is 1.
    pub prevalence: Vec<f64>,
    /// Generating log-odds coefficients.
    pub beta: Vec<f64>,
    pub intercept: f64,
}

impl BinaryCodes {
    /// Six procedure codes and six billing codes; the outcome depends on
    /// three of them. The active codes are common (prevalence 0.5) while the
    /// inactive ones are rarer, as diagnosis and procedure indicators
    /// typically are.
    pub fn injury_like() -> Self {
        let names = (1..=6)
            .map(|i| format!("pcode{i}"))
            .chain((1..=6).map(|i| format!("ncode{i}")))
            .collect();
        let mut prevalence = vec![0.1, 0.15, 0.2, 0.12, 0.18, 0.25, 0.1, 0.15, 0.2, 0.12, 0.18, 0.25];
        let mut beta = vec![0.0; 12];
        for (j, b) in [(0usize, 1.5), (3, -1.2), (7, 1.0)] {
            beta[j] = b;
            prevalence[j] = 0.5;
        }
        BinaryCodes {
            names,
            prevalence,
            beta,
            intercept: -0.5,
        }
    }

    pub fn generate(&self, n: usize, seed: u64) -> Result<Synthetic> {
        let p = self.beta.len();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut x = Array2::zeros((n, p));
        let mut y = Array1::zeros(n);
        for i in 0..n {
            let mut eta = self.intercept;
            for j in 0..p {
                if rng.random::<f64>() < self.prevalence[j] {
                    x[[i, j]] = 1.0;
                    eta += self.beta[j];
                }
            }
            let prob = 1.0 / (1.0 + (-eta).exp());
            y[i] = if rng.random::<f64>() < prob { 1.0 } else { 0.0 };
        }
        Ok(Synthetic {
            data: Dataset::new(x, y, self.names.clone(), Family::Binomial)?,
            intercept: self.intercept,
            beta: self.beta.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_generation_is_reproducible() {
        let a = gaussian_regression(30, 4, 2, 0.3, 1.0, 5).unwrap();
        let b = gaussian_regression(30, 4, 2, 0.3, 1.0, 5).unwrap();
        assert_eq!(a.data, b.data);
        assert_eq!(a.support(), vec![0, 1]);
    }

    #[test]
    fn binary_codes_shape() {
        let s = BinaryCodes::injury_like().generate(500, 1).unwrap();
        assert_eq!(s.data.p(), 12);
        assert_eq!(s.support(), vec![0, 3, 7]);
        assert!(s.data.x().iter().all(|&v| v == 0.0 || v == 1.0));
        assert_eq!(s.data.column_names()[6], "ncode1");
    }
}
