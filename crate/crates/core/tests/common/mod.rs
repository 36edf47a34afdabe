//! Independent reference computations used by the integration tests. Nothing
//! here calls into the solver.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use ndarray::{Array1, Array2};

fn to_na(x: &Array2<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(x.nrows(), x.ncols(), |i, j| x[[i, j]])
}

/// Least squares with an intercept, via the normal equations. Returns
/// `(intercept, slopes)`.
pub fn ols(x: &Array2<f64>, y: &Array1<f64>) -> (f64, Vec<f64>) {
    let (n, p) = x.dim();
    let a = DMatrix::from_fn(n, p + 1, |i, j| if j == 0 { 1.0 } else { x[[i, j - 1]] });
    let b = DVector::from_iterator(n, y.iter().copied());
    let xtx = a.transpose() * &a;
    let xty = a.transpose() * b;
    let sol = xtx.lu().solve(&xty).expect("normal equations are singular");
    (sol[0], sol.iter().skip(1).copied().collect())
}

/// Ridge slopes `(X'X/N + lambda I)^-1 X'(y - ybar)/N` for a centered design.
pub fn ridge(x: &Array2<f64>, y: &Array1<f64>, lambda: f64) -> Vec<f64> {
    let (n, p) = x.dim();
    let xm = to_na(x);
    let ybar = y.sum() / n as f64;
    let yc = DVector::from_iterator(n, y.iter().map(|v| v - ybar));
    let lhs = xm.transpose() * &xm / n as f64 + DMatrix::identity(p, p) * lambda;
    let rhs = xm.transpose() * yc / n as f64;
    lhs.lu().solve(&rhs).unwrap().iter().copied().collect()
}

/// Unpenalized logistic regression by Newton-Raphson.
pub fn newton_logistic(x: &Array2<f64>, y: &Array1<f64>) -> (f64, Vec<f64>) {
    let (n, p) = x.dim();
    let a = DMatrix::from_fn(n, p + 1, |i, j| if j == 0 { 1.0 } else { x[[i, j - 1]] });
    let yv = DVector::from_iterator(n, y.iter().copied());
    let mut beta = DVector::zeros(p + 1);
    for _ in 0..100 {
        let eta = &a * &beta;
        let prob = eta.map(|e| 1.0 / (1.0 + (-e).exp()));
        let w = prob.map(|q| q * (1.0 - q));
        let grad = a.transpose() * (&yv - &prob);
        let mut hess = DMatrix::zeros(p + 1, p + 1);
        for i in 0..n {
            let row = a.row(i);
            hess += row.transpose() * row * w[i];
        }
        let step = hess.lu().solve(&grad).unwrap();
        beta += &step;
        if step.amax() < 1e-13 {
            break;
        }
    }
    (beta[0], beta.iter().skip(1).copied().collect())
}

/// Elastic net objective evaluated with explicit loops.
pub fn objective_loops(x: &Array2<f64>, y: &Array1<f64>, b0: f64, beta: &[f64], alpha: f64, lambda: f64) -> f64 {
    let (n, p) = x.dim();
    let mut rss = 0.0;
    for i in 0..n {
        let mut fit = b0;
        for j in 0..p {
            fit += x[[i, j]] * beta[j];
        }
        rss += (y[i] - fit) * (y[i] - fit);
    }
    let mut pen = 0.0;
    for &b in beta {
        pen += (1.0 - alpha) / 2.0 * b * b + alpha * b.abs();
    }
    rss / (2.0 * n as f64) + lambda * pen
}

/// An `n x p` design with `X'X / n = I` and zero column means (requires `n >= p + 1`).
pub fn orthonormal_design(n: usize, p: usize, seed: u64) -> Array2<f64> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut m = DMatrix::from_fn(n, p + 1, |_, j| if j == 0 { 1.0 } else { rng.random::<f64>() - 0.5 });
    // Gram-Schmidt against the constant column and each other
    for j in 0..=p {
        for k in 0..j {
            let proj = m.column(j).dot(&m.column(k));
            let ck = m.column(k).clone_owned();
            m.column_mut(j).axpy(-proj, &ck, 1.0);
        }
        let norm = m.column(j).norm();
        m.column_mut(j).scale_mut(1.0 / norm);
    }
    let scale = (n as f64).sqrt();
    Array2::from_shape_fn((n, p), |(i, j)| m[(i, j + 1)] * scale)
}
