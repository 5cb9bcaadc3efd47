use nalgebra::{DMatrix, SymmetricEigen};

use super::basis::{apply_product, Ladder, MAX_FULL_SITES};
use super::hamiltonian::{build_hamiltonian, Space};
use super::lanczos::lowest_eigenpair;
use crate::error::{Error, Result};
use crate::lattice::{MeasurementKind, MeasurementSpec, ModelSpec};
use crate::linalg::{hermitian_eigenvalues, CMatrix, CVector, C64};
use crate::region::Region;

/// Largest sector dimension diagonalized densely; Lanczos above.
pub const DENSE_LIMIT: usize = 1024;
/// Ground-state gap below which the ground state counts as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-10;

/// Normalized many-body amplitudes over all `2^L` occupation states.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseState {
    n_sites: usize,
    amplitudes: CVector,
}

impl DenseState {
    pub fn new(n_sites: usize, amplitudes: CVector) -> Result<Self> {
        if n_sites > MAX_FULL_SITES {
            return Err(Error::SizeGuard(format!("dense states limited to {MAX_FULL_SITES} sites")));
        }
        if amplitudes.len() != 1 << n_sites {
            return Err(Error::SizeMismatch { expected: 1 << n_sites, got: amplitudes.len() });
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::Numerical(format!("state norm {norm} differs from 1")));
        }
        Ok(DenseState { n_sites, amplitudes })
    }

    /// Normalizes `amplitudes`; fails on a vanishing vector.
    pub fn normalized(n_sites: usize, mut amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if !(norm > 1e-300) || !norm.is_finite() {
            return Err(Error::ZeroNorm);
        }
        amplitudes.unscale_mut(norm);
        DenseState::new(n_sites, amplitudes)
    }

    pub fn basis_state(n_sites: usize, occupation: u64) -> Result<Self> {
        let mut a = CVector::zeros(1 << n_sites);
        a[occupation as usize] = C64::new(1.0, 0.0);
        DenseState::new(n_sites, a)
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> CVector {
        self.amplitudes
    }

    pub fn overlap(&self, other: &DenseState) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    pub fn fidelity(&self, other: &DenseState) -> f64 {
        self.overlap(other).norm_sqr()
    }

    /// Weight outside the sector with `n` particles.
    pub fn weight_outside_sector(&self, n: usize) -> f64 {
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(s, _)| s.count_ones() as usize != n)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    fn fix_phase(&mut self) {
        let max = self.amplitudes.iter().fold(0.0f64, |m, a| m.max(a.norm()));
        if let Some(a) = self.amplitudes.iter().find(|a| a.norm() > max * (1.0 - 1e-10)).copied() {
            let phase = a.conj() / a.norm();
            self.amplitudes.iter_mut().for_each(|x| *x *= phase);
        }
    }
}

/// Nondegenerate ground state in the model's particle-number sector, with the
/// largest-magnitude amplitude made real and positive.
pub fn ground_state_ed(model: &ModelSpec) -> Result<(DenseState, f64)> {
    let space = Space::particle_sector(model)?;
    if model.n_sites > MAX_FULL_SITES {
        return Err(Error::SizeGuard(format!("dense states limited to {MAX_FULL_SITES} sites")));
    }
    let h = build_hamiltonian(model, space)?;
    let dim = h.dim();
    let (e0, e1, vector) = if dim <= DENSE_LIMIT {
        let eig = SymmetricEigen::new(h.to_dense());
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let e1 = if dim > 1 { eig.eigenvalues[order[1]] } else { f64::INFINITY };
        (eig.eigenvalues[order[0]], e1, eig.eigenvectors.column(order[0]).iter().copied().collect::<Vec<_>>())
    } else {
        let op = |x: &[f64], y: &mut [f64]| h.apply(x, y);
        let g = lowest_eigenpair(op, dim, &[], 1e-13, 400)?;
        let second = lowest_eigenpair(op, dim, std::slice::from_ref(&g.vector), 1e-10, 400)?;
        (g.value, second.value, g.vector)
    };
    let gap = e1 - e0;
    if gap <= DEGENERACY_TOL {
        return Err(Error::Degenerate {
            gap,
            threshold: DEGENERACY_TOL,
            hint: "use an open chain, n_sites ≡ 2 (mod 4) on a periodic ring, or n_sites ≡ 0 (mod 4) on an antiperiodic ring".into(),
        });
    }
    let mut amps = CVector::zeros(1 << model.n_sites);
    for (i, x) in vector.iter().enumerate() {
        amps[h.space().state(i) as usize] = C64::new(*x, 0.0);
    }
    let mut state = DenseState::normalized(model.n_sites, amps)?;
    state.fix_phase();
    Ok((state, e0))
}

/// Hermitian generator on the full `2^L` space.
#[derive(Debug, Clone, PartialEq)]
pub enum Generator {
    /// Diagonal in the occupation basis.
    Diagonal(Vec<f64>),
    Dense(CMatrix),
}

impl Generator {
    /// `Σ_j w_j n_j`.
    pub fn density(weights: &[f64]) -> Self {
        let l = weights.len();
        Generator::Diagonal(
            (0u64..1 << l)
                .map(|s| (0..l).filter(|j| s >> j & 1 == 1).map(|j| weights[j]).sum())
                .collect(),
        )
    }

    /// Diagonal generator of a density measurement per unit strength, so that
    /// `exp(-W G)` is the measurement operator for strength `W`.
    pub fn for_density_measurement(meas: &MeasurementSpec, n_sites: usize) -> Result<Self> {
        let unit = meas.with_strength(1.0);
        Ok(Generator::density(&unit.density_weights(n_sites)?))
    }

    pub fn dim(&self) -> usize {
        match self {
            Generator::Diagonal(d) => d.len(),
            Generator::Dense(m) => m.nrows(),
        }
    }

    pub fn apply(&self, x: &CVector) -> CVector {
        match self {
            Generator::Diagonal(d) => CVector::from_iterator(x.len(), x.iter().zip(d).map(|(a, g)| a * *g)),
            Generator::Dense(m) => m * x,
        }
    }

    pub fn expectation(&self, state: &DenseState) -> f64 {
        state.amplitudes.dotc(&self.apply(&state.amplitudes)).re
    }
}

/// `exp(-τ G)|ψ⟩`, normalized, through the eigendecomposition of `G`.
pub fn imaginary_time_reference(state: &DenseState, generator: &Generator, tau: f64) -> Result<DenseState> {
    if generator.dim() != state.amplitudes.len() {
        return Err(Error::SizeMismatch { expected: state.amplitudes.len(), got: generator.dim() });
    }
    if !(tau >= 0.0) {
        return Err(Error::Domain(format!("imaginary time {tau} must be >= 0")));
    }
    let amps = match generator {
        Generator::Diagonal(d) => {
            let shift = d.iter().copied().fold(f64::INFINITY, f64::min);
            CVector::from_iterator(
                d.len(),
                state.amplitudes.iter().zip(d).map(|(a, g)| a * (-tau * (g - shift)).exp()),
            )
        }
        Generator::Dense(m) => {
            if state.n_sites > 12 {
                return Err(Error::SizeGuard("dense generators limited to 12 sites".into()));
            }
            let eig = SymmetricEigen::new(m.clone());
            let shift = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
            let coeffs = eig.eigenvectors.adjoint() * &state.amplitudes;
            let scaled = CVector::from_iterator(
                coeffs.len(),
                coeffs.iter().zip(eig.eigenvalues.iter()).map(|(c, l)| c * (-tau * (l - shift)).exp()),
            );
            &eig.eigenvectors * scaled
        }
    };
    DenseState::normalized(state.n_sites, amps)
}

/// Post-selected state `M|ψ⟩ / ‖M|ψ⟩‖` with the exact many-body operator.
pub fn apply_measurement_ed(state: &DenseState, meas: &MeasurementSpec, model: &ModelSpec) -> Result<DenseState> {
    let l = state.n_sites;
    if model.n_sites != l {
        return Err(Error::SizeMismatch { expected: model.n_sites, got: l });
    }
    meas.validate(l)?;
    let w = meas.strength;
    let mut amps = state.amplitudes.clone();
    match meas.kind {
        MeasurementKind::DensityStaggered | MeasurementKind::DensityPattern => {
            let weights = meas.density_weights(l)?;
            let shift: f64 = weights.iter().filter(|x| **x < 0.0).sum();
            for (s, a) in amps.iter_mut().enumerate() {
                let exponent: f64 = (0..l).filter(|j| s >> j & 1 == 1).map(|j| weights[j]).sum();
                *a *= (-(exponent - shift)).exp();
            }
        }
        MeasurementKind::BondXxYyPaired => {
            // exp(W T) = 1 + (cosh W - 1) T² + sinh W T, T = c†_a c_b + c†_b c_a
            let (ch, sh) = (w.cosh(), w.sinh());
            for (a, b) in MeasurementSpec::paired_bonds(l) {
                let hop = apply_terms(&amps, &[(1.0, vec![Ladder::Create(a), Ladder::Annihilate(b)]), (1.0, vec![Ladder::Create(b), Ladder::Annihilate(a)])]);
                let mut next = amps.clone();
                for (s, x) in next.iter_mut().enumerate() {
                    let single = ((s >> a) ^ (s >> b)) & 1 == 1;
                    if single {
                        *x *= ch;
                    }
                    *x += hop[s] * sh;
                }
                amps = next;
            }
        }
        MeasurementKind::BondXx => {
            // exp(W/2 X) = cosh(W/2) + sinh(W/2) X, X = (c†_j - c_j)(c†_k + c_k), X² = 1
            let (ch, sh) = ((0.5 * w).cosh(), (0.5 * w).sinh());
            for (j, k, bond_sign) in model.signed_bonds() {
                let x = apply_terms(
                    &amps,
                    &[
                        (1.0, vec![Ladder::Create(j), Ladder::Create(k)]),
                        (1.0, vec![Ladder::Create(j), Ladder::Annihilate(k)]),
                        (-1.0, vec![Ladder::Annihilate(j), Ladder::Create(k)]),
                        (-1.0, vec![Ladder::Annihilate(j), Ladder::Annihilate(k)]),
                    ],
                );
                amps = amps * C64::new(ch, 0.0) + x * C64::new(sh * bond_sign, 0.0);
            }
        }
    }
    DenseState::normalized(l, amps)
}

fn apply_terms(amps: &CVector, terms: &[(f64, Vec<Ladder>)]) -> CVector {
    let mut out = CVector::zeros(amps.len());
    for (s, a) in amps.iter().enumerate() {
        if a.norm_sqr() == 0.0 {
            continue;
        }
        for (coef, ops) in terms {
            if let Some((t, sign)) = apply_product(s as u64, ops) {
                out[t as usize] += a * (coef * sign);
            }
        }
    }
    out
}

/// Fermionic entanglement entropy (nats) of `region`.
///
/// The region's modes are anticommuted to the front of the mode ordering before
/// the amplitudes are reshaped, so non-contiguous regions get the fermionic
/// reduced density matrix that the Gaussian engine computes.
pub fn ee_ed(state: &DenseState, region: &Region) -> Result<f64> {
    reduced_entropy(state, region, true)
}

/// Entanglement entropy of `region` for the spin (qubit) tensor-product
/// structure. Equal to [`ee_ed`] for intervals starting at site 0.
pub fn ee_spin(state: &DenseState, region: &Region) -> Result<f64> {
    reduced_entropy(state, region, false)
}

fn reduced_entropy(state: &DenseState, region: &Region, fermionic: bool) -> Result<f64> {
    let l = state.n_sites;
    region.check(l)?;
    let inside: Vec<usize> = region.sites().to_vec();
    let outside: Vec<usize> = (0..l).filter(|j| !region.contains(*j)).collect();
    if inside.is_empty() || outside.is_empty() {
        return Ok(0.0);
    }
    let (na, nb) = (inside.len(), outside.len());
    let mut m = DMatrix::<C64>::zeros(1 << na, 1 << nb);
    for (s, amp) in state.amplitudes.iter().enumerate() {
        let s = s as u64;
        let a = compress(s, &inside);
        let b = compress(s, &outside);
        let mut sign = 1.0;
        if fermionic {
            // inversions: complement mode before an occupied region mode
            let mut crossings = 0u32;
            for &i in &inside {
                if s >> i & 1 == 1 {
                    crossings += (s & ((1u64 << i) - 1) & !mask(&inside)).count_ones();
                }
            }
            if crossings % 2 == 1 {
                sign = -1.0;
            }
        }
        m[(a as usize, b as usize)] = amp * sign;
    }
    let rho = if na <= nb { &m * m.adjoint() } else { m.adjoint() * &m };
    Ok(hermitian_eigenvalues(&rho).iter().filter(|p| **p > 1e-300).map(|p| -p * p.ln()).sum())
}

fn mask(sites: &[usize]) -> u64 {
    sites.iter().fold(0, |m, &j| m | 1 << j)
}

fn compress(s: u64, sites: &[usize]) -> u64 {
    sites.iter().enumerate().fold(0, |acc, (k, &j)| acc | ((s >> j & 1) << k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Boundary;
    use std::f64::consts::LN_2;

    #[test]
    fn two_site_ground_state() {
        let m = ModelSpec::new(2, Boundary::Open, 0.0).unwrap();
        let (psi, e) = ground_state_ed(&m).unwrap();
        assert!((e + 1.0).abs() < 1e-13);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((psi.amplitudes()[0b01].re - r).abs() < 1e-12);
        assert!((psi.amplitudes()[0b10].re - r).abs() < 1e-12);
        assert!((ee_ed(&psi, &Region::interval(0, 1)).unwrap() - LN_2).abs() < 1e-12);
        assert!(ee_ed(&psi, &Region::interval(0, 2)).unwrap().abs() < 1e-14);
    }

    #[test]
    fn two_site_staggered_reweighting() {
        let m = ModelSpec::new(2, Boundary::Open, 0.0).unwrap();
        let (psi, _) = ground_state_ed(&m).unwrap();
        let w = 0.6f64;
        let out = apply_measurement_ed(&psi, &MeasurementSpec::staggered(w), &m).unwrap();
        // site 0 occupied is bit pattern 0b01 and gains e^{+W}
        let ratio = out.amplitudes()[0b01].re / out.amplitudes()[0b10].re;
        assert!((ratio - (2.0 * w).exp()).abs() < 1e-12);
        let p = (2.0 * w).exp() / (2.0 * (2.0 * w).cosh());
        let binary = -p * p.ln() - (1.0 - p) * (1.0 - p).ln();
        assert!((ee_ed(&out, &Region::interval(0, 1)).unwrap() - binary).abs() < 1e-12);
    }

    #[test]
    fn degenerate_ring() {
        let m = ModelSpec::new(8, Boundary::Periodic, 0.0).unwrap();
        assert!(matches!(ground_state_ed(&m), Err(Error::Degenerate { .. })));
    }

    #[test]
    fn imaginary_time_matches_measurement() {
        let m = ModelSpec::new(6, Boundary::Open, 0.3).unwrap();
        let (psi, _) = ground_state_ed(&m).unwrap();
        let meas = MeasurementSpec::staggered(0.4);
        let g = Generator::for_density_measurement(&meas, 6).unwrap();
        let a = imaginary_time_reference(&psi, &g, 0.4).unwrap();
        let b = apply_measurement_ed(&psi, &meas, &m).unwrap();
        assert!((a.fidelity(&b) - 1.0).abs() < 1e-12);
        assert!((a.amplitudes() - b.amplitudes()).norm() < 1e-12);
        let dense = match &g {
            Generator::Diagonal(d) => Generator::Dense(CMatrix::from_diagonal(&CVector::from_iterator(d.len(), d.iter().map(|x| C64::new(*x, 0.0))))),
            _ => unreachable!(),
        };
        let c = imaginary_time_reference(&psi, &dense, 0.4).unwrap();
        assert!((c.fidelity(&b) - 1.0).abs() < 1e-12);
        assert_eq!(imaginary_time_reference(&psi, &g, 0.0).unwrap(), psi);
    }

    #[test]
    fn bell_pair_entropy() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let mut a = CVector::zeros(4);
        a[0b00] = C64::new(r, 0.0);
        a[0b11] = C64::new(r, 0.0);
        let psi = DenseState::new(2, a).unwrap();
        assert!((ee_ed(&psi, &Region::interval(1, 1)).unwrap() - LN_2).abs() < 1e-14);
        assert!((ee_spin(&psi, &Region::interval(1, 1)).unwrap() - LN_2).abs() < 1e-14);
    }
}
