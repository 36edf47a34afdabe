//! Reference computations that do not call into the solver.

use nalgebra::{DMatrix, DVector};
use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn with_intercept(x: &Array2<f64>) -> DMatrix<f64> {
    let (n, p) = x.dim();
    DMatrix::from_fn(n, p + 1, |i, j| if j == 0 { 1.0 } else { x[[i, j - 1]] })
}

/// Least squares with an intercept via the normal equations.
pub fn ols(x: &Array2<f64>, y: &Array1<f64>) -> (f64, Vec<f64>) {
    let a = with_intercept(x);
    let b = DVector::from_iterator(y.len(), y.iter().copied());
    let sol = (a.transpose() * &a).lu().solve(&(a.transpose() * b)).expect("singular normal equations");
    (sol[0], sol.iter().skip(1).copied().collect())
}

/// `(X'X/N + lambda I)^-1 X'(y - ybar)/N` for a centered design.
pub fn ridge(x: &Array2<f64>, y: &Array1<f64>, lambda: f64) -> Vec<f64> {
    let (n, p) = x.dim();
    let xm = DMatrix::from_fn(n, p, |i, j| x[[i, j]]);
    let ybar = y.sum() / n as f64;
    let yc = DVector::from_iterator(n, y.iter().map(|v| v - ybar));
    let lhs = xm.transpose() * &xm / n as f64 + DMatrix::identity(p, p) * lambda;
    let rhs = xm.transpose() * yc / n as f64;
    lhs.lu().solve(&rhs).unwrap().iter().copied().collect()
}

/// Unpenalized logistic regression by Newton-Raphson.
pub fn newton_logistic(x: &Array2<f64>, y: &Array1<f64>) -> (f64, Vec<f64>) {
    let a = with_intercept(x);
    let (n, q) = a.shape();
    let yv = DVector::from_iterator(n, y.iter().copied());
    let mut beta = DVector::zeros(q);
    for _ in 0..100 {
        let prob = (&a * &beta).map(|e| 1.0 / (1.0 + (-e).exp()));
        let grad = a.transpose() * (&yv - &prob);
        let mut hess = DMatrix::zeros(q, q);
        for i in 0..n {
            let row = a.row(i);
            hess += row.transpose() * row * (prob[i] * (1.0 - prob[i]));
        }
        let step = hess.lu().solve(&grad).unwrap();
        beta += &step;
        if step.amax() < 1e-13 {
            break;
        }
    }
    (beta[0], beta.iter().skip(1).copied().collect())
}

/// Zero-mean `n x p` design with `X'X / n = I`.
pub fn orthonormal_design(n: usize, p: usize, seed: u64) -> Array2<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = DMatrix::from_fn(n, p + 1, |_, j| if j == 0 { 1.0 } else { rng.random::<f64>() - 0.5 });
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
