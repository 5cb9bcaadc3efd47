use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ed::DenseState;
use crate::error::{Error, Result};
use crate::linalg::{CVector, C64};

/// Largest register handled by the state-vector ansatz.
pub const MAX_QUBITS: usize = 16;
/// Initial angle of the seed gate; the matching layer-1 rotation starts at its negative.
pub const SEED_ANGLE: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Pauli {
    X,
    Y,
    Z,
}

/// `exp(iθ·scale·P)` with `P` a Pauli string on one or two qubits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gate {
    pub pauli: Pauli,
    pub sites: (usize, Option<usize>),
    pub scale: f64,
}

impl Gate {
    fn single(pauli: Pauli, site: usize) -> Self {
        Gate { pauli, sites: (site, None), scale: 0.5 }
    }

    fn pair(pauli: Pauli, a: usize, b: usize) -> Self {
        Gate { pauli, sites: (a, Some(b)), scale: 1.0 }
    }

    fn masks(&self) -> (u64, u64, u32) {
        let bits = 1u64 << self.sites.0 | self.sites.1.map_or(0, |b| 1 << b);
        let count = bits.count_ones();
        match self.pauli {
            Pauli::X => (bits, 0, 0),
            Pauli::Y => (bits, bits, count),
            Pauli::Z => (0, bits, 0),
        }
    }

    /// `P|ψ⟩`.
    pub fn apply_pauli(&self, amps: &CVector) -> CVector {
        let (flip, sign_mask, n_y) = self.masks();
        let global = [C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(-1.0, 0.0), C64::new(0.0, -1.0)][n_y as usize % 4];
        let mut out = CVector::zeros(amps.len());
        for (s, a) in amps.iter().enumerate() {
            let s = s as u64;
            let phase = if (s & sign_mask).count_ones() % 2 == 0 { global } else { -global };
            out[(s ^ flip) as usize] = a * phase;
        }
        out
    }

    /// `exp(iθ·scale·P)|ψ⟩`, in place.
    pub fn apply(&self, theta: f64, amps: &mut CVector) {
        let angle = theta * self.scale;
        if angle == 0.0 {
            return;
        }
        let (flip, sign_mask, n_y) = self.masks();
        let global = [C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(-1.0, 0.0), C64::new(0.0, -1.0)][n_y as usize % 4];
        let (c, s) = (angle.cos(), angle.sin());
        let is = C64::new(0.0, s);
        let phase = |x: u64| if (x & sign_mask).count_ones() % 2 == 0 { global } else { -global };
        let a = amps.as_mut_slice();
        if flip == 0 {
            for (x, v) in a.iter_mut().enumerate() {
                *v *= c + is * phase(x as u64);
            }
            return;
        }
        let low = flip & flip.wrapping_neg();
        for x in 0..a.len() as u64 {
            if x & low != 0 {
                continue;
            }
            let y = x ^ flip;
            let (vx, vy) = (a[x as usize], a[y as usize]);
            // (P ψ)[y] = phase(x) ψ[x] and (P ψ)[x] = phase(y) ψ[y]
            a[x as usize] = vx * c + is * phase(y) * vy;
            a[y as usize] = vy * c + is * phase(x) * vx;
        }
    }

    /// `iG|ψ⟩` with `G = scale·P`.
    pub fn generator_insertion(&self, amps: &CVector) -> CVector {
        self.apply_pauli(amps) * C64::new(0.0, self.scale)
    }
}

/// Layered open-chain circuit preceded by a single seed rotation on site 0.
///
/// Application order per layer: odd-bond `xx, yy, zz`, even-bond `xx, yy, zz`,
/// then single-site `x, y, z`. Odd bonds are `(0,1), (2,3), ...`; even bonds
/// `(1,2), (3,4), ...`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnsatzSpec {
    pub n_qubits: usize,
    pub n_layers: usize,
}

impl AnsatzSpec {
    pub fn new(n_qubits: usize, n_layers: usize) -> Result<Self> {
        let spec = AnsatzSpec { n_qubits, n_layers };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_qubits < 2 {
            return Err(Error::InvalidSpec("ansatz needs at least 2 qubits".into()));
        }
        if self.n_qubits > MAX_QUBITS {
            return Err(Error::SizeGuard(format!("ansatz limited to {MAX_QUBITS} qubits")));
        }
        Ok(())
    }

    pub fn odd_bonds(&self) -> Vec<(usize, usize)> {
        (0..self.n_qubits - 1).step_by(2).map(|i| (i, i + 1)).collect()
    }

    pub fn even_bonds(&self) -> Vec<(usize, usize)> {
        (1..self.n_qubits - 1).step_by(2).map(|i| (i, i + 1)).collect()
    }

    pub fn n_params(&self) -> usize {
        self.n_layers * (3 * (self.odd_bonds().len() + self.even_bonds().len()) + 3 * self.n_qubits) + 1
    }

    /// Gates in application order; parameter `a` drives gate `a`.
    pub fn gates(&self) -> Vec<Gate> {
        let mut gates = vec![Gate::single(Pauli::Z, 0)];
        let paulis = [Pauli::X, Pauli::Y, Pauli::Z];
        for _ in 0..self.n_layers {
            for bonds in [self.odd_bonds(), self.even_bonds()] {
                for p in paulis {
                    gates.extend(bonds.iter().map(|&(a, b)| Gate::pair(p, a, b)));
                }
            }
            for p in paulis {
                gates.extend((0..self.n_qubits).map(|j| Gate::single(p, j)));
            }
        }
        gates
    }

    /// Index of the first layer's `z` rotation on site 0.
    pub fn seed_partner(&self) -> Option<usize> {
        (self.n_layers > 0).then(|| 1 + 3 * (self.n_qubits - 1) + 2 * self.n_qubits)
    }

    /// Seed at `+SEED_ANGLE`, its partner at `-SEED_ANGLE`, everything else zero.
    pub fn seeded_theta(&self) -> Vec<f64> {
        let mut theta = vec![0.0; self.n_params()];
        if let Some(k) = self.seed_partner() {
            theta[0] = SEED_ANGLE;
            theta[k] = -SEED_ANGLE;
        }
        theta
    }

    fn check(&self, theta: &[f64], base: &DenseState) -> Result<()> {
        self.validate()?;
        if theta.len() != self.n_params() {
            return Err(Error::SizeMismatch { expected: self.n_params(), got: theta.len() });
        }
        if base.n_sites() != self.n_qubits {
            return Err(Error::SizeMismatch { expected: self.n_qubits, got: base.n_sites() });
        }
        Ok(())
    }
}

/// `U(θ)|base⟩`.
pub fn ansatz_state(spec: &AnsatzSpec, theta: &[f64], base: &DenseState) -> Result<DenseState> {
    spec.check(theta, base)?;
    let mut amps = base.amplitudes().clone();
    for (g, t) in spec.gates().iter().zip(theta) {
        g.apply(*t, &mut amps);
    }
    let drift = (amps.norm() - 1.0).abs();
    if drift > 1e-9 {
        return Err(Error::Numerical(format!("circuit changed the norm by {drift:.3e}")));
    }
    DenseState::normalized(spec.n_qubits, amps)
}

/// `∂U(θ)|base⟩/∂θ_a` for every parameter, in parameter order.
pub fn tangent_vectors(spec: &AnsatzSpec, theta: &[f64], base: &DenseState) -> Result<Vec<CVector>> {
    spec.check(theta, base)?;
    let gates = spec.gates();
    // prefix[a] = state after gates 0..=a
    let mut prefix = Vec::with_capacity(gates.len());
    let mut amps = base.amplitudes().clone();
    for (g, t) in gates.iter().zip(theta) {
        g.apply(*t, &mut amps);
        prefix.push(amps.clone());
    }
    Ok((0..gates.len())
        .into_par_iter()
        .map(|a| {
            let mut v = gates[a].generator_insertion(&prefix[a]);
            for (g, t) in gates.iter().zip(theta).skip(a + 1) {
                g.apply(*t, &mut v);
            }
            v
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parameter_count() {
        let s = AnsatzSpec::new(6, 6).unwrap();
        assert_eq!(s.n_params(), 199);
        assert_eq!(s.gates().len(), 199);
        assert_eq!(s.odd_bonds(), vec![(0, 1), (2, 3), (4, 5)]);
        assert_eq!(s.even_bonds(), vec![(1, 2), (3, 4)]);
        let g = s.gates()[s.seed_partner().unwrap()];
        assert_eq!((g.pauli, g.sites), (Pauli::Z, (0, None)));
    }

    #[test]
    fn xx_rotation_at_quarter_turn() {
        let base = DenseState::basis_state(2, 0b00).unwrap();
        let g = Gate::pair(Pauli::X, 0, 1);
        let mut a = base.amplitudes().clone();
        g.apply(std::f64::consts::FRAC_PI_2, &mut a);
        assert!((a[0b11] - C64::new(0.0, 1.0)).norm() < 1e-15);
        assert!(a[0b00].norm() < 1e-15);
    }

    #[test]
    fn in_place_rotation_matches_pauli_action() {
        let mut a = CVector::from_fn(16, |i, _| C64::new((i as f64 * 0.7).sin(), (i as f64 * 1.3).cos()));
        a.unscale_mut(a.norm());
        for g in [Gate::pair(Pauli::Y, 1, 3), Gate::pair(Pauli::X, 0, 2), Gate::single(Pauli::Z, 2), Gate::single(Pauli::Y, 0)] {
            let theta = 0.37;
            let expected = &a * C64::new((theta * g.scale).cos(), 0.0) + g.apply_pauli(&a) * C64::new(0.0, (theta * g.scale).sin());
            let mut b = a.clone();
            g.apply(theta, &mut b);
            assert!((b - expected).norm() < 1e-14);
        }
    }

    #[test]
    fn pauli_y_convention() {
        let g = Gate::single(Pauli::Y, 0);
        let a = g.apply_pauli(DenseState::basis_state(1, 0).unwrap().amplitudes());
        assert_eq!(a[1], C64::new(0.0, 1.0));
        let b = g.apply_pauli(DenseState::basis_state(1, 1).unwrap().amplitudes());
        assert_eq!(b[0], C64::new(0.0, -1.0));
    }

    #[test]
    fn seeded_theta_is_identity() {
        let s = AnsatzSpec::new(4, 2).unwrap();
        let r = 0.5f64;
        let mut a = CVector::from_element(16, C64::new(0.25, 0.0));
        a[3] = C64::new(0.25 * r, 0.25 * r);
        let base = DenseState::normalized(4, a).unwrap();
        let out = ansatz_state(&s, &s.seeded_theta(), &base).unwrap();
        assert!((out.amplitudes() - base.amplitudes()).norm() < 1e-12);
        assert!(ansatz_state(&s, &[0.0; 3], &base).is_err());
    }
}
