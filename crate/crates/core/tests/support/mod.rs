//! Dense reference implementations used by the integration tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64 as C64;

use imposter::lattice::SectorBasis;

fn kron(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    a.kronecker(b)
}

fn identity(n: usize) -> DMatrix<C64> {
    DMatrix::identity(n, n)
}

/// Annihilator of mode `m` among `modes` fermionic modes, with the
/// Jordan-Wigner string on all lower modes. Fock index bit `m` is mode `m`.
pub fn annihilator(m: usize, modes: usize) -> DMatrix<C64> {
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let lower = DMatrix::from_row_slice(2, 2, &[zero, one, zero, zero]);
    let z = DMatrix::from_row_slice(2, 2, &[one, zero, zero, -one]);
    let mut op = identity(1);
    for mode in (0..modes).rev() {
        let factor = if mode == m {
            lower.clone()
        } else if mode < m {
            z.clone()
        } else {
            identity(2)
        };
        op = kron(&op, &factor);
    }
    op
}

/// Ring operators in the full Fock space, projected on a sector basis.
pub struct DenseRing {
    /// `K = sum_{j,s} c+_{j,s} c_{j+1,s}`.
    pub k: DMatrix<C64>,
    /// `sum_j n_{j,up} n_{j,dn}`.
    pub double: DMatrix<C64>,
    pub hopping: f64,
    pub interaction: f64,
    pub spacing: f64,
}

impl DenseRing {
    pub fn new(basis: &SectorBasis, hopping: f64, interaction: f64, spacing: f64) -> Self {
        let l = basis.sites();
        let modes = 2 * l;
        let c: Vec<DMatrix<C64>> = (0..modes).map(|m| annihilator(m, modes)).collect();
        let cd: Vec<DMatrix<C64>> = c.iter().map(|x| x.adjoint()).collect();
        let dim = 1usize << modes;
        let mut k = DMatrix::<C64>::zeros(dim, dim);
        let mut double = DMatrix::<C64>::zeros(dim, dim);
        for s in 0..2 {
            for j in 0..l {
                let a = s * l + j;
                let b = s * l + (j + 1) % l;
                k += &cd[a] * &c[b];
            }
        }
        for j in 0..l {
            double += (&cd[j] * &c[j]) * (&cd[l + j] * &c[l + j]);
        }
        let fock: Vec<usize> = (0..basis.dimension())
            .map(|i| {
                let (up, dn) = basis.state_of(i);
                up as usize | ((dn as usize) << l)
            })
            .collect();
        let project = |m: &DMatrix<C64>| {
            DMatrix::from_fn(fock.len(), fock.len(), |r, s| m[(fock[r], fock[s])])
        };
        Self {
            k: project(&k),
            double: project(&double),
            hopping,
            interaction,
            spacing,
        }
    }

    pub fn kinetic(&self, phase: f64) -> DMatrix<C64> {
        let e = C64::from_polar(1.0, -phase);
        (&self.k * e + self.k.adjoint() * e.conj()) * C64::new(-self.hopping, 0.0)
    }

    pub fn hamiltonian(&self, phase: f64) -> DMatrix<C64> {
        self.kinetic(phase) + &self.double * C64::new(self.interaction, 0.0)
    }

    pub fn current(&self, phase: f64) -> DMatrix<C64> {
        let e = C64::from_polar(1.0, -phase);
        (&self.k * e - self.k.adjoint() * e.conj()) * C64::new(0.0, -self.spacing * self.hopping)
    }
}

pub fn expectation(op: &DMatrix<C64>, psi: &DVector<C64>) -> C64 {
    psi.dotc(&(op * psi))
}

/// `exp(-i H dt) psi` through the eigendecomposition of Hermitian `h`.
pub fn expm_apply(h: &DMatrix<C64>, psi: &DVector<C64>, dt: f64) -> DVector<C64> {
    let eig = SymmetricEigen::new(h.clone());
    let v = &eig.eigenvectors;
    let mut coeff = v.adjoint() * psi;
    for (c, &e) in coeff.iter_mut().zip(eig.eigenvalues.iter()) {
        *c *= C64::from_polar(1.0, -e * dt);
    }
    v * coeff
}

/// Lowest eigenpair of Hermitian `h`.
pub fn lowest(h: &DMatrix<C64>) -> (f64, DVector<C64>) {
    let eig = SymmetricEigen::new(h.clone());
    let (i, e) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &e)| if e < acc.1 { (i, e) } else { acc });
    (e, eig.eigenvectors.column(i).into_owned())
}

/// `int_0^t E0 cos(w s) sin^2(pi s / T) ds`.
pub fn pulse_integral(e0: f64, omega: f64, duration: f64, t: f64) -> f64 {
    let b = 2.0 * std::f64::consts::PI / duration;
    e0 * ((omega * t).sin() / (2.0 * omega)
        - (((omega - b) * t).sin() / (omega - b) + ((omega + b) * t).sin() / (omega + b)) / 4.0)
}

/// Dense grid Hamiltonian `-1/2 d^2/dx^2 + V` with the Fourier kinetic
/// operator written out as a full matrix on an `n`-point periodic grid.
pub fn fourier_hamiltonian(dx: f64, potential: &[f64]) -> DMatrix<f64> {
    let n = potential.len();
    let length = n as f64 * dx;
    let mut h = DMatrix::<f64>::zeros(n, n);
    for r in 0..n {
        for s in 0..n {
            let mut t = 0.0;
            for m in 0..n {
                let q = if m <= n / 2 { m as f64 } else { m as f64 - n as f64 };
                let k = 2.0 * std::f64::consts::PI * q / length;
                t += 0.5 * k * k * (2.0 * std::f64::consts::PI * q * (r as f64 - s as f64) / n as f64).cos();
            }
            h[(r, s)] = t / n as f64;
        }
        h[(r, r)] += potential[r];
    }
    h
}
