use nalgebra::DMatrix;

use super::state::{real_to_complex, SlaterState};
use crate::error::{Error, Result};
use crate::lattice::{Boundary, ModelSpec};

/// Minimum single-particle gap at the Fermi level.
pub const FERMI_GAP_TOL: f64 = 1e-12;

/// Single-particle hopping matrix `H_ij = -t` on every bond (`+t` across an
/// antiperiodic wrap).
pub fn hopping_matrix(model: &ModelSpec) -> DMatrix<f64> {
    let l = model.n_sites;
    let mut h = DMatrix::zeros(l, l);
    for (i, j, sign) in model.signed_bonds() {
        h[(i, j)] -= sign * model.hopping;
        h[(j, i)] -= sign * model.hopping;
    }
    h
}

/// Ground state of the free (`delta = 0`) chain and its energy.
pub fn ground_state_quadratic(model: &ModelSpec) -> Result<(SlaterState, f64)> {
    model.validate()?;
    if model.delta != 0.0 {
        return Err(Error::Domain(format!("quadratic ground state needs delta = 0, got {}", model.delta)));
    }
    let l = model.n_sites;
    let n = model.n_particles();
    let eig = hopping_matrix(model).symmetric_eigen();
    let mut order: Vec<usize> = (0..l).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let energies: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    if n < l {
        let gap = energies[n] - energies[n - 1];
        if gap <= FERMI_GAP_TOL {
            let hint = match model.boundary {
                Boundary::Periodic => format!(
                    "use an open chain, an antiperiodic ring, or n_sites ≡ 2 (mod 4) for a periodic half-filled ring (e.g. {} or {})",
                    nearest_ring(l, -1, 2),
                    nearest_ring(l, 1, 2)
                ),
                Boundary::Antiperiodic => format!(
                    "use an open chain, a periodic ring, or n_sites ≡ 0 (mod 4) for an antiperiodic half-filled ring (e.g. {} or {})",
                    nearest_ring(l, -1, 0),
                    nearest_ring(l, 1, 0)
                ),
                Boundary::Open => "change n_sites or the filling".to_string(),
            };
            return Err(Error::Degenerate { gap, threshold: FERMI_GAP_TOL, hint });
        }
    }
    let mut orbitals = DMatrix::zeros(l, n);
    for (m, &k) in order.iter().take(n).enumerate() {
        let mut col = eig.eigenvectors.column(k).into_owned();
        fix_sign(col.as_mut_slice());
        orbitals.set_column(m, &col);
    }
    let energy = energies.iter().take(n).sum();
    Ok((SlaterState::from_orthonormal(real_to_complex(&orbitals)), energy))
}

fn nearest_ring(l: usize, dir: isize, residue: isize) -> usize {
    let mut c = l as isize;
    loop {
        c += dir;
        if c >= 4 && c % 4 == residue {
            return c as usize;
        }
        if c < 4 {
            return if residue == 0 { 4 } else { 6 };
        }
    }
}

// Make the first entry of largest magnitude positive; fixes eigenvector signs.
fn fix_sign(col: &mut [f64]) {
    let max = col.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if let Some(x) = col.iter().find(|x| x.abs() > max * (1.0 - 1e-10)) {
        if *x < 0.0 {
            col.iter_mut().for_each(|y| *y = -*y);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn two_site_bonding_orbital() {
        let m = ModelSpec::new(2, Boundary::Open, 0.0).unwrap();
        let (s, e) = ground_state_quadratic(&m).unwrap();
        assert!((e + 1.0).abs() < 1e-14);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s.orbitals()[(0, 0)].re - r).abs() < 1e-14);
        assert!((s.orbitals()[(1, 0)].re - r).abs() < 1e-14);
    }

    #[test]
    fn periodic_four_sites_is_degenerate() {
        let m = ModelSpec::new(4, Boundary::Periodic, 0.0).unwrap();
        match ground_state_quadratic(&m) {
            Err(Error::Degenerate { hint, .. }) => assert!(hint.contains("2 (mod 4)")),
            other => panic!("expected degeneracy, got {other:?}"),
        }
    }

    #[test]
    fn open_chain_energy_matches_momenta() {
        let l = 8;
        let m = ModelSpec::new(l, Boundary::Open, 0.0).unwrap();
        let (_, e) = ground_state_quadratic(&m).unwrap();
        let expected: f64 = (1..=l / 2).map(|k| -2.0 * (PI * k as f64 / (l as f64 + 1.0)).cos()).sum();
        assert!((e - expected).abs() < 1e-12);
    }

    #[test]
    fn rejects_interactions() {
        let m = ModelSpec::new(6, Boundary::Open, 0.3).unwrap();
        assert!(matches!(ground_state_quadratic(&m), Err(Error::Domain(_))));
    }
}
