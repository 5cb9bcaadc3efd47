use super::state::{BogoliubovState, GaussianState, SlaterState};
use crate::error::{Error, Result};
use crate::lattice::{MeasurementKind, MeasurementSpec, ModelSpec};
use crate::linalg::{hermitian_expm, orthonormalize_columns, CMatrix, C64};

/// Orthonormality tolerance after re-orthonormalization.
pub const QR_TOL: f64 = 1e-8;

/// Quadratic generator `h` of a measurement operator `M = exp(h)`.
#[derive(Debug, Clone, PartialEq)]
pub enum QuadraticGenerator {
    /// `h = Σ_ij h_ij c†_i c_j`.
    SingleParticle(CMatrix),
    /// `h = Σ A_ij c†_i c_j + ½ Σ (B_ij c†_i c†_j + h.c.)`, stored as the
    /// `2L × 2L` matrix `[[A, B], [-B*, -A*]]`. Conjugating a linear mode
    /// operator by `exp(h)` multiplies its Nambu vector by `exp` of this matrix.
    Nambu(CMatrix),
}

impl QuadraticGenerator {
    pub fn for_measurement(meas: &MeasurementSpec, model: &ModelSpec) -> Result<Self> {
        let l = model.n_sites;
        meas.validate(l)?;
        let w = meas.strength;
        let re = |x: f64| C64::new(x, 0.0);
        Ok(match meas.kind {
            MeasurementKind::DensityStaggered | MeasurementKind::DensityPattern => {
                let weights = meas.density_weights(l)?;
                let mut h = CMatrix::zeros(l, l);
                for (j, wj) in weights.iter().enumerate() {
                    h[(j, j)] = re(-wj);
                }
                QuadraticGenerator::SingleParticle(h)
            }
            MeasurementKind::BondXxYyPaired => {
                // (W/2)(σˣσˣ + σʸσʸ) = W (c†_a c_b + c†_b c_a) on a nearest-neighbour pair
                let mut h = CMatrix::zeros(l, l);
                for (a, b) in MeasurementSpec::paired_bonds(l) {
                    h[(a, b)] += re(w);
                    h[(b, a)] += re(w);
                }
                QuadraticGenerator::SingleParticle(h)
            }
            MeasurementKind::BondXx => {
                // (W/2)(c†_j - c_j)(c†_k + c_k) on every bond (j, k)
                let mut a = CMatrix::zeros(l, l);
                let mut b = CMatrix::zeros(l, l);
                for (j, k, sign) in model.signed_bonds() {
                    let x = re(0.5 * w * sign);
                    a[(j, k)] += x;
                    a[(k, j)] += x;
                    b[(j, k)] += x;
                    b[(k, j)] -= x;
                }
                QuadraticGenerator::Nambu(nambu_matrix(&a, &b))
            }
        })
    }

    fn nambu(&self) -> CMatrix {
        match self {
            QuadraticGenerator::SingleParticle(h) => nambu_matrix(h, &CMatrix::zeros(h.nrows(), h.nrows())),
            QuadraticGenerator::Nambu(k) => k.clone(),
        }
    }
}

fn nambu_matrix(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let l = a.nrows();
    let mut k = CMatrix::zeros(2 * l, 2 * l);
    k.view_mut((0, 0), (l, l)).copy_from(a);
    k.view_mut((0, l), (l, l)).copy_from(b);
    k.view_mut((l, 0), (l, l)).copy_from(&(-b.conjugate()));
    k.view_mut((l, l), (l, l)).copy_from(&(-a.conjugate()));
    k
}

fn propagator(h: &CMatrix) -> CMatrix {
    let l = h.nrows();
    let diagonal = (0..l).all(|i| (0..l).all(|j| i == j || h[(i, j)] == C64::new(0.0, 0.0)));
    if diagonal {
        let mut e = CMatrix::zeros(l, l);
        for i in 0..l {
            e[(i, i)] = h[(i, i)].exp();
        }
        e
    } else {
        hermitian_expm(h)
    }
}

/// Post-selected state `M|ψ⟩ / ‖M|ψ⟩‖` for a measurement on the chain `model`.
///
/// Number-conserving kinds keep a Slater determinant in the Slater form;
/// `bond_xx` promotes it to a Bogoliubov state.
pub fn apply_measurement(state: &GaussianState, meas: &MeasurementSpec, model: &ModelSpec) -> Result<GaussianState> {
    if state.n_sites() != model.n_sites {
        return Err(Error::SizeMismatch { expected: model.n_sites, got: state.n_sites() });
    }
    let generator = QuadraticGenerator::for_measurement(meas, model)?;
    match (state, &generator) {
        (GaussianState::Slater(s), QuadraticGenerator::SingleParticle(h)) => {
            let evolved = propagator(h) * s.orbitals();
            Ok(SlaterState::from_orthonormal(orthonormalize_columns(&evolved, QR_TOL)?).into())
        }
        (_, g) => {
            let w = state.to_bogoliubov().stacked();
            let evolved = propagator(&g.nambu()) * w;
            Ok(BogoliubovState::from_stacked(&orthonormalize_columns(&evolved, QR_TOL)?).into())
        }
    }
}
