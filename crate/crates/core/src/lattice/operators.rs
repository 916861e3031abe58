use num_complex::Complex64;

use super::basis::SectorBasis;
use super::LatticeModel;
use crate::error::{Error, Result};

/// Matrix element `<to| c+_j c_{j+1} |from>` of one spin species.
#[derive(Debug, Clone, Copy)]
struct Hop {
    from: u32,
    to: u32,
    sign: f64,
}

/// Hops `c+_j c_{j+1}` on every bond of the ring, including the wrap bond.
///
/// The fermionic sign is the parity of occupied sites strictly between the
/// two sites, with creation operators ordered by site and up before down.
fn forward_hops(sites: usize, states: &[u32], lookup: &[u32]) -> Vec<Hop> {
    let mut hops = Vec::new();
    for (from, &mask) in states.iter().enumerate() {
        for j in 0..sites {
            let next = (j + 1) % sites;
            let (bj, bn) = (1u32 << j, 1u32 << next);
            if mask & bn == 0 || mask & bj != 0 {
                continue;
            }
            let (lo, hi) = (j.min(next), j.max(next));
            let between = if hi > lo + 1 {
                ((1u32 << hi) - 1) & !((1u32 << (lo + 1)) - 1)
            } else {
                0
            };
            let sign = if (mask & between).count_ones() % 2 == 0 {
                1.0
            } else {
                -1.0
            };
            let target = mask ^ bj ^ bn;
            hops.push(Hop {
                from: from as u32,
                to: lookup[target as usize],
                sign,
            });
        }
    }
    hops
}

/// Complex amplitudes over a sector basis.
#[derive(Debug, Clone, PartialEq)]
pub struct ManyBodyState {
    pub sector: (usize, usize, usize),
    pub amplitudes: Vec<Complex64>,
    pub time: f64,
}

impl ManyBodyState {
    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }
}

/// Hamiltonian, current and kinetic operators of a model on one sector.
#[derive(Debug, Clone)]
pub struct HubbardOperators {
    model: LatticeModel,
    basis: SectorBasis,
    up_hops: Vec<Hop>,
    down_hops: Vec<Hop>,
    double_occupancy: Vec<f64>,
}

pub(crate) fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

impl HubbardOperators {
    pub fn new(model: LatticeModel, basis: SectorBasis) -> Result<Self> {
        model.validate()?;
        if basis.sites() != model.sites {
            return Err(Error::InvalidParameter(format!(
                "basis has {} sites, model has {}",
                basis.sites(),
                model.sites
            )));
        }
        let up_hops = forward_hops(model.sites, basis.up_states(), basis.up_lookup());
        let down_hops = forward_hops(model.sites, basis.down_states(), basis.down_lookup());
        let double_occupancy = (0..basis.dimension())
            .map(|i| {
                let (u, d) = basis.state_of(i);
                f64::from((u & d).count_ones())
            })
            .collect();
        Ok(Self {
            model,
            basis,
            up_hops,
            down_hops,
            double_occupancy,
        })
    }

    pub fn model(&self) -> &LatticeModel {
        &self.model
    }

    pub fn basis(&self) -> &SectorBasis {
        &self.basis
    }

    pub fn dimension(&self) -> usize {
        self.basis.dimension()
    }

    /// Same basis and hops with a different interaction strength.
    pub fn with_interaction(&self, interaction: f64) -> Result<Self> {
        let model = LatticeModel {
            interaction,
            ..self.model
        };
        model.validate()?;
        Ok(Self {
            model,
            ..self.clone()
        })
    }

    pub fn zero_state(&self) -> ManyBodyState {
        ManyBodyState {
            sector: self.basis.sector(),
            amplitudes: vec![Complex64::new(0.0, 0.0); self.dimension()],
            time: 0.0,
        }
    }

    fn check(&self, state: &ManyBodyState) -> Result<()> {
        let expected = self.basis.sector();
        if state.sector != expected || state.amplitudes.len() != self.dimension() {
            return Err(Error::SectorMismatch {
                expected,
                found: state.sector,
            });
        }
        Ok(())
    }

    /// `out += (fwd K + bwd K^dagger) psi` with `K = sum_{j,s} c+_{j,s} c_{j+1,s}`.
    fn accumulate_hopping(
        &self,
        psi: &[Complex64],
        fwd: Complex64,
        bwd: Complex64,
        out: &mut [Complex64],
    ) {
        let nd = self.basis.down_states().len();
        for hop in &self.up_hops {
            let a = hop.from as usize * nd;
            let b = hop.to as usize * nd;
            let f = fwd * hop.sign;
            let g = bwd * hop.sign;
            for k in 0..nd {
                out[b + k] += f * psi[a + k];
                out[a + k] += g * psi[b + k];
            }
        }
        for (row_out, row_in) in out.chunks_exact_mut(nd).zip(psi.chunks_exact(nd)) {
            for hop in &self.down_hops {
                let a = hop.from as usize;
                let b = hop.to as usize;
                row_out[b] += fwd * hop.sign * row_in[a];
                row_out[a] += bwd * hop.sign * row_in[b];
            }
        }
    }

    /// `<psi| K |psi>`.
    fn hopping_overlap(&self, psi: &[Complex64]) -> Complex64 {
        let nd = self.basis.down_states().len();
        let mut acc = Complex64::new(0.0, 0.0);
        for hop in &self.up_hops {
            let a = hop.from as usize * nd;
            let b = hop.to as usize * nd;
            let mut s = Complex64::new(0.0, 0.0);
            for k in 0..nd {
                s += psi[b + k].conj() * psi[a + k];
            }
            acc += s * hop.sign;
        }
        for row in psi.chunks_exact(nd) {
            for hop in &self.down_hops {
                acc += row[hop.to as usize].conj() * row[hop.from as usize] * hop.sign;
            }
        }
        acc
    }

    fn kinetic_factors(&self, phase: f64) -> (Complex64, Complex64) {
        let t0 = self.model.hopping;
        (
            Complex64::from_polar(-t0, -phase),
            Complex64::from_polar(-t0, phase),
        )
    }

    fn current_factors(&self, phase: f64) -> (Complex64, Complex64) {
        let c = self.model.spacing * self.model.hopping;
        let i = Complex64::i();
        (
            -i * Complex64::from_polar(c, -phase),
            i * Complex64::from_polar(c, phase),
        )
    }

    /// `out = H(phase) psi`.
    pub fn hamiltonian_into(&self, psi: &[Complex64], phase: f64, out: &mut [Complex64]) {
        let u = self.model.interaction;
        for ((o, p), d) in out.iter_mut().zip(psi).zip(&self.double_occupancy) {
            *o = p * (u * d);
        }
        let (f, b) = self.kinetic_factors(phase);
        self.accumulate_hopping(psi, f, b, out);
    }

    /// `out = J(phase) psi`.
    pub fn current_into(&self, psi: &[Complex64], phase: f64, out: &mut [Complex64]) {
        out.fill(Complex64::new(0.0, 0.0));
        let (f, b) = self.current_factors(phase);
        self.accumulate_hopping(psi, f, b, out);
    }

    /// `out = H_kin(phase) psi`.
    pub fn kinetic_into(&self, psi: &[Complex64], phase: f64, out: &mut [Complex64]) {
        out.fill(Complex64::new(0.0, 0.0));
        let (f, b) = self.kinetic_factors(phase);
        self.accumulate_hopping(psi, f, b, out);
    }

    pub fn apply_hamiltonian(&self, state: &ManyBodyState, phase: f64) -> Result<ManyBodyState> {
        self.check(state)?;
        let mut out = self.zero_state();
        out.time = state.time;
        self.hamiltonian_into(&state.amplitudes, phase, &mut out.amplitudes);
        Ok(out)
    }

    pub fn apply_current(&self, state: &ManyBodyState, phase: f64) -> Result<ManyBodyState> {
        self.check(state)?;
        let mut out = self.zero_state();
        out.time = state.time;
        self.current_into(&state.amplitudes, phase, &mut out.amplitudes);
        Ok(out)
    }

    /// `<H_kin(phase)> = -2 t0 Re(e^{-i phase} <K>)`.
    pub fn kinetic_of(&self, psi: &[Complex64], phase: f64) -> f64 {
        let z = Complex64::from_polar(1.0, -phase) * self.hopping_overlap(psi);
        -2.0 * self.model.hopping * z.re
    }

    /// `<J(phase)> = 2 a t0 Im(e^{-i phase} <K>)`.
    pub fn current_of(&self, psi: &[Complex64], phase: f64) -> f64 {
        let z = Complex64::from_polar(1.0, -phase) * self.hopping_overlap(psi);
        2.0 * self.model.spacing * self.model.hopping * z.im
    }

    /// `<H(phase)>`.
    pub fn energy_of(&self, psi: &[Complex64], phase: f64) -> f64 {
        let interaction: f64 = psi
            .iter()
            .zip(&self.double_occupancy)
            .map(|(p, d)| p.norm_sqr() * d)
            .sum();
        self.kinetic_of(psi, phase) + self.model.interaction * interaction
    }

    /// `i <[H, J]>`, evaluated as `-2 Im <H psi | J psi>`.
    pub fn commutator_of(&self, psi: &[Complex64], phase: f64) -> f64 {
        let mut h = vec![Complex64::new(0.0, 0.0); psi.len()];
        let mut j = vec![Complex64::new(0.0, 0.0); psi.len()];
        self.hamiltonian_into(psi, phase, &mut h);
        self.current_into(psi, phase, &mut j);
        -2.0 * inner(&h, &j).im
    }

    pub fn kinetic_expectation(&self, state: &ManyBodyState, phase: f64) -> Result<f64> {
        self.check(state)?;
        Ok(self.kinetic_of(&state.amplitudes, phase))
    }

    pub fn current_expectation(&self, state: &ManyBodyState, phase: f64) -> Result<f64> {
        self.check(state)?;
        Ok(self.current_of(&state.amplitudes, phase))
    }

    pub fn commutator_term(&self, state: &ManyBodyState, phase: f64) -> Result<f64> {
        self.check(state)?;
        Ok(self.commutator_of(&state.amplitudes, phase))
    }
}

#[cfg(test)]
mod tests {
    use super::super::basis::build_sector_basis;
    use super::*;

    fn ops(sites: usize, nu: usize, nd: usize, u: f64) -> HubbardOperators {
        let model = LatticeModel::new(sites, 1.0, u, 1.0).unwrap();
        HubbardOperators::new(model, build_sector_basis(sites, nu, nd).unwrap()).unwrap()
    }

    fn dense(op: &HubbardOperators, phase: f64) -> Vec<Vec<Complex64>> {
        let n = op.dimension();
        (0..n)
            .map(|col| {
                let mut e = vec![Complex64::new(0.0, 0.0); n];
                e[col] = Complex64::new(1.0, 0.0);
                let mut out = vec![Complex64::new(0.0, 0.0); n];
                op.hamiltonian_into(&e, phase, &mut out);
                out
            })
            .collect()
    }

    #[test]
    fn two_site_single_fermion() {
        let op = ops(2, 1, 0, 0.0);
        let cols = dense(&op, 0.0);
        // both ring bonds join the same pair: off-diagonal -2 t0
        assert!((cols[0][1].re + 2.0).abs() < 1e-15);
        assert!((cols[1][0].re + 2.0).abs() < 1e-15);
        assert_eq!(cols[0][0].norm(), 0.0);
    }

    #[test]
    fn interaction_counts_double_occupancy() {
        let op = ops(3, 2, 2, 4.0);
        let basis = op.basis();
        for i in 0..op.dimension() {
            let (u, d) = basis.state_of(i);
            let mut e = vec![Complex64::new(0.0, 0.0); op.dimension()];
            e[i] = Complex64::new(1.0, 0.0);
            let energy = op.energy_of(&e, 0.3);
            assert!((energy - 4.0 * f64::from((u & d).count_ones())).abs() < 1e-14);
        }
    }

    #[test]
    fn sector_mismatch_is_rejected() {
        let op = ops(4, 2, 2, 1.0);
        let other = ops(4, 1, 2, 1.0).zero_state();
        assert!(matches!(
            op.apply_hamiltonian(&other, 0.0),
            Err(Error::SectorMismatch { .. })
        ));
    }

    #[test]
    fn empty_lattice_has_no_kinetic_energy() {
        let op = ops(5, 0, 0, 2.0);
        let mut state = op.zero_state();
        state.amplitudes[0] = Complex64::new(1.0, 0.0);
        assert_eq!(op.kinetic_expectation(&state, 0.4).unwrap(), 0.0);
        assert_eq!(op.current_expectation(&state, 0.4).unwrap(), 0.0);
    }

    #[test]
    fn closed_forms_match_operator_application() {
        let op = ops(4, 2, 1, 3.0);
        let psi: Vec<Complex64> = (0..op.dimension())
            .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.91).cos()))
            .collect();
        let phase = 0.7;
        let mut out = vec![Complex64::new(0.0, 0.0); psi.len()];
        op.kinetic_into(&psi, phase, &mut out);
        let direct = inner(&psi, &out);
        assert!((direct.re - op.kinetic_of(&psi, phase)).abs() < 1e-12);
        assert!(direct.im.abs() < 1e-12);
        op.current_into(&psi, phase, &mut out);
        let direct = inner(&psi, &out);
        assert!((direct.re - op.current_of(&psi, phase)).abs() < 1e-12);
        assert!(direct.im.abs() < 1e-12);
    }
}
