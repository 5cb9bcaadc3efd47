use super::state::GaussianState;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, neg_x_ln_x_clipped, CMatrix};
use crate::region::Region;

const SPECTRUM_SLACK: f64 = 1e-9;

/// Von Neumann entropy (nats) of `region` from the restricted correlation matrix.
pub fn entanglement_entropy(state: &GaussianState, region: &Region) -> Result<f64> {
    let l = state.n_sites();
    region.check(l)?;
    if region.is_empty() {
        return Ok(0.0);
    }
    match state {
        GaussianState::Slater(s) => {
            let c = restrict(&s.correlation(), region.sites());
            let spectrum = checked_spectrum(&c)?;
            Ok(spectrum.iter().map(|&x| neg_x_ln_x_clipped(x) + neg_x_ln_x_clipped(1.0 - x)).sum())
        }
        GaussianState::Bogoliubov(b) => {
            let doubled: Vec<usize> = region.sites().iter().copied().chain(region.sites().iter().map(|i| i + l)).collect();
            let g = restrict(&b.nambu_correlation(), &doubled);
            // eigenvalues come in pairs {ν, 1 - ν}
            let spectrum = checked_spectrum(&g)?;
            Ok(spectrum.iter().map(|&x| neg_x_ln_x_clipped(x)).sum())
        }
    }
}

/// `I_AB = S_A + S_B - S_{A∪B}` for disjoint regions.
pub fn mutual_information(state: &GaussianState, a: &Region, b: &Region) -> Result<f64> {
    let ab = a.disjoint_union(b)?;
    if a.is_empty() || b.is_empty() {
        return Ok(0.0);
    }
    let value = entanglement_entropy(state, a)? + entanglement_entropy(state, b)? - entanglement_entropy(state, &ab)?;
    if value < -SPECTRUM_SLACK {
        return Err(Error::Numerical(format!("negative mutual information {value:.3e}")));
    }
    Ok(value.max(0.0))
}

fn restrict(m: &CMatrix, idx: &[usize]) -> CMatrix {
    CMatrix::from_fn(idx.len(), idx.len(), |i, j| m[(idx[i], idx[j])])
}

fn checked_spectrum(m: &CMatrix) -> Result<Vec<f64>> {
    let ev = hermitian_eigenvalues(m);
    if let Some(x) = ev.iter().find(|x| **x < -SPECTRUM_SLACK || **x > 1.0 + SPECTRUM_SLACK) {
        return Err(Error::Numerical(format!("correlation eigenvalue {x} outside [0, 1]: corrupted state")));
    }
    Ok(ev)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::{apply_measurement, ground_state_quadratic};
    use crate::lattice::{Boundary, MeasurementKind, MeasurementSpec, ModelSpec};

    fn binary(p: f64) -> f64 {
        -p * p.ln() - (1.0 - p) * (1.0 - p).ln()
    }

    #[test]
    fn bonding_pair_has_ln2() {
        let m = ModelSpec::new(2, Boundary::Open, 0.0).unwrap();
        let psi: GaussianState = ground_state_quadratic(&m).unwrap().0.into();
        let s = entanglement_entropy(&psi, &Region::interval(0, 1)).unwrap();
        assert!((s - 2f64.ln()).abs() < 1e-12);
        assert_eq!(entanglement_entropy(&psi, &Region::empty()).unwrap(), 0.0);
        assert!(entanglement_entropy(&psi, &Region::interval(0, 2)).unwrap() < 1e-9);
    }

    #[test]
    fn two_site_staggered_measurement() {
        let m = ModelSpec::new(2, Boundary::Open, 0.0).unwrap();
        let psi: GaussianState = ground_state_quadratic(&m).unwrap().0.into();
        for w in [0.1f64, 0.5, 1.3] {
            let p = (2.0 * w).exp() / (2.0 * (2.0 * w).cosh());
            let out = apply_measurement(&psi, &MeasurementSpec::staggered(w), &m).unwrap();
            let s = entanglement_entropy(&out, &Region::interval(0, 1)).unwrap();
            assert!((s - binary(p)).abs() < 1e-12);
            // site 0 carries the enhanced weight e^{+W}
            assert!((out.correlation()[(0, 0)].re - p).abs() < 1e-12);
        }
    }

    #[test]
    fn bogoliubov_pure_and_symmetric() {
        let m = ModelSpec::new(10, Boundary::Periodic, 0.0).unwrap();
        let psi: GaussianState = ground_state_quadratic(&m).unwrap().0.into();
        let out = apply_measurement(&psi, &MeasurementSpec::new(MeasurementKind::BondXx, 0.8), &m).unwrap();
        assert!(matches!(out, GaussianState::Bogoliubov(_)));
        let f = out.anomalous();
        assert!((0..10).all(|i| (0..10).all(|j| (f[(i, j)] + f[(j, i)]).norm() < 1e-10)));
        let g = out.nambu_correlation();
        assert!(crate::linalg::max_abs_diff(&(&g * &g), &g) < 1e-9);
        assert!(entanglement_entropy(&out, &Region::interval(0, 10)).unwrap() < 1e-9);
    }

    #[test]
    fn invalid_regions() {
        let m = ModelSpec::new(6, Boundary::Open, 0.0).unwrap();
        let psi: GaussianState = ground_state_quadratic(&m).unwrap().0.into();
        assert!(entanglement_entropy(&psi, &Region::interval(4, 3)).is_err());
        assert!(matches!(
            mutual_information(&psi, &Region::interval(0, 3), &Region::interval(2, 2)),
            Err(Error::Overlap(2))
        ));
        assert_eq!(mutual_information(&psi, &Region::interval(0, 3), &Region::empty()).unwrap(), 0.0);
    }
}
