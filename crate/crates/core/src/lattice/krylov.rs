//! Lanczos ground states and Krylov-subspace propagation for Hermitian
//! operators given only through their action on vectors.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::operators::inner;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LanczosOptions {
    /// Krylov vectors kept per restart cycle.
    pub subspace: usize,
    /// Target for `|| H x - E x ||`.
    pub tolerance: f64,
    pub max_restarts: usize,
    /// Seed of the random start vector.
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self {
            subspace: 60,
            tolerance: 1e-8,
            max_restarts: 60,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KrylovOptions {
    pub max_dim: usize,
    /// Failure threshold on the a-posteriori error estimate of one step.
    pub tolerance: f64,
}

impl Default for KrylovOptions {
    fn default() -> Self {
        Self {
            max_dim: 20,
            tolerance: 1e-10,
        }
    }
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

fn axpy(alpha: Complex64, x: &[Complex64], y: &mut [Complex64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn scale(v: &mut [Complex64], s: f64) {
    for c in v.iter_mut() {
        *c *= s;
    }
}

fn orthogonalize(w: &mut [Complex64], basis: &[Vec<Complex64>]) {
    for v in basis {
        let overlap = inner(v, w);
        axpy(-overlap, v, w);
    }
}

fn tridiagonal(alphas: &[f64], betas: &[f64]) -> SymmetricEigen<f64, nalgebra::Dyn> {
    let k = alphas.len();
    let mut t = DMatrix::<f64>::zeros(k, k);
    for i in 0..k {
        t[(i, i)] = alphas[i];
        if i + 1 < k {
            t[(i, i + 1)] = betas[i];
            t[(i + 1, i)] = betas[i];
        }
    }
    SymmetricEigen::new(t)
}

/// Lanczos basis with its tridiagonal projection. New vectors are
/// reorthogonalized (twice) against all previous ones.
struct Sweep {
    basis: Vec<Vec<Complex64>>,
    alphas: Vec<f64>,
    betas: Vec<f64>,
}

impl Sweep {
    fn new(start: Vec<Complex64>) -> Self {
        Self {
            basis: vec![start],
            alphas: Vec::new(),
            betas: Vec::new(),
        }
    }

    /// One Lanczos step; leaves the unnormalized next vector in `w` and returns its norm.
    fn extend<F>(&mut self, matvec: &mut F, w: &mut Vec<Complex64>) -> f64
    where
        F: FnMut(&[Complex64], &mut [Complex64]),
    {
        let k = self.alphas.len();
        let v = &self.basis[k];
        matvec(v, w);
        let alpha = inner(v, w).re;
        axpy(Complex64::new(-alpha, 0.0), v, w);
        if k > 0 {
            let beta = self.betas[k - 1];
            axpy(Complex64::new(-beta, 0.0), &self.basis[k - 1], w);
        }
        orthogonalize(w, &self.basis);
        orthogonalize(w, &self.basis);
        self.alphas.push(alpha);
        norm(w)
    }
}

/// Lowest eigenpair by restarted Lanczos.
///
/// Each cycle restarts from the current Ritz vector; stops when the true
/// residual `|| H x - E x ||` drops below `options.tolerance`.
pub fn ground_state<F>(
    mut matvec: F,
    start: Vec<Complex64>,
    options: &LanczosOptions,
) -> Result<(Vec<Complex64>, f64)>
where
    F: FnMut(&[Complex64], &mut [Complex64]),
{
    let dim = start.len();
    let mut x = start;
    let n0 = norm(&x);
    if n0 == 0.0 {
        return Err(Error::InvalidParameter("zero Lanczos start vector".into()));
    }
    scale(&mut x, 1.0 / n0);
    let mut w = vec![Complex64::new(0.0, 0.0); dim];
    let mut residual = f64::INFINITY;
    for cycle in 0..options.max_restarts.max(1) {
        let mut sweep = Sweep::new(x.clone());
        let m = options.subspace.max(2).min(dim);
        for _ in 0..m {
            let beta = sweep.extend(&mut matvec, &mut w);
            if beta < 1e-13 || sweep.alphas.len() == m {
                break;
            }
            sweep.betas.push(beta);
            let mut next = w.clone();
            scale(&mut next, 1.0 / beta);
            sweep.basis.push(next);
        }
        let k = sweep.alphas.len();
        let eig = tridiagonal(&sweep.alphas, &sweep.betas[..k - 1]);
        let (lowest, _) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, &e)| if e < acc.1 { (i, e) } else { acc });
        x.fill(Complex64::new(0.0, 0.0));
        for (i, v) in sweep.basis.iter().take(k).enumerate() {
            axpy(Complex64::new(eig.eigenvectors[(i, lowest)], 0.0), v, &mut x);
        }
        let nx = norm(&x);
        scale(&mut x, 1.0 / nx);
        matvec(&x, &mut w);
        let energy = inner(&x, &w).re;
        axpy(Complex64::new(-energy, 0.0), &x, &mut w);
        residual = norm(&w);
        if residual < options.tolerance {
            return Ok((x, energy));
        }
        if cycle + 1 == options.max_restarts {
            break;
        }
    }
    Err(Error::Convergence {
        iterations: options.max_restarts,
        residual,
    })
}

/// `exp(-i H dt) psi` in a Krylov subspace of adaptive dimension.
///
/// The subspace grows until the estimate `beta_k |[exp(-i T_k dt) e_1]_k|`
/// falls four orders below `options.tolerance`; if it is still above the
/// tolerance at `max_dim`, a [`Error::StepSize`] is returned.
pub fn expm_step<F>(
    mut matvec: F,
    psi: &[Complex64],
    dt: f64,
    options: &KrylovOptions,
) -> Result<Vec<Complex64>>
where
    F: FnMut(&[Complex64], &mut [Complex64]),
{
    let beta0 = norm(psi);
    if beta0 == 0.0 {
        return Ok(psi.to_vec());
    }
    let mut v0 = psi.to_vec();
    scale(&mut v0, 1.0 / beta0);
    let mut sweep = Sweep::new(v0);
    let mut w = vec![Complex64::new(0.0, 0.0); psi.len()];
    let max_dim = options.max_dim.max(1).min(psi.len());
    let exit = options.tolerance * 1e-4;
    let mut estimate;
    let mut coefficients;

    loop {
        let beta = sweep.extend(&mut matvec, &mut w);
        let k = sweep.alphas.len();
        let eig = tridiagonal(&sweep.alphas, &sweep.betas);
        // c = V exp(-i Lambda dt) V^T e_1
        coefficients = (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| {
                        let z = eig.eigenvectors[(i, j)] * eig.eigenvectors[(0, j)];
                        Complex64::from_polar(z, -eig.eigenvalues[j] * dt)
                    })
                    .sum::<Complex64>()
            })
            .collect::<Vec<_>>();
        let happy = beta < 1e-13;
        estimate = if happy {
            0.0
        } else {
            beta * coefficients[k - 1].norm()
        };
        if happy || estimate < exit || k == max_dim {
            break;
        }
        sweep.betas.push(beta);
        let mut next = w.clone();
        scale(&mut next, 1.0 / beta);
        sweep.basis.push(next);
    }
    if estimate > options.tolerance {
        return Err(Error::StepSize {
            estimate,
            tolerance: options.tolerance,
        });
    }
    let mut out = vec![Complex64::new(0.0, 0.0); psi.len()];
    for (c, v) in coefficients.iter().zip(&sweep.basis) {
        axpy(c * beta0, v, &mut out);
    }
    Ok(out)
}
