use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{orthonormality_residual, CMatrix, C64};

/// Number-conserving Gaussian state `Π_m c†(φ_m) |0⟩`.
///
/// `orbitals` is `L × N`; column `m` holds the amplitudes of `φ_m` on the sites.
#[derive(Debug, Clone, PartialEq)]
pub struct SlaterState {
    orbitals: CMatrix,
}

impl SlaterState {
    pub fn new(orbitals: CMatrix) -> Result<Self> {
        if orbitals.ncols() > orbitals.nrows() {
            return Err(Error::InvalidSpec(format!(
                "{} orbitals on {} sites",
                orbitals.ncols(),
                orbitals.nrows()
            )));
        }
        let residual = orthonormality_residual(&orbitals);
        if residual > 1e-10 {
            return Err(Error::Numerical(format!("orbitals not orthonormal (residual {residual:.3e})")));
        }
        Ok(SlaterState { orbitals })
    }

    pub(crate) fn from_orthonormal(orbitals: CMatrix) -> Self {
        SlaterState { orbitals }
    }

    pub fn orbitals(&self) -> &CMatrix {
        &self.orbitals
    }

    pub fn n_sites(&self) -> usize {
        self.orbitals.nrows()
    }

    pub fn n_particles(&self) -> usize {
        self.orbitals.ncols()
    }

    /// `C_ij = ⟨c†_i c_j⟩ = Σ_m conj(φ_m(i)) φ_m(j)`.
    pub fn correlation(&self) -> CMatrix {
        (&self.orbitals * self.orbitals.adjoint()).conjugate()
    }

    /// Orthonormal basis of the unoccupied single-particle space, `L × (L - N)`.
    pub fn complement(&self) -> CMatrix {
        let l = self.n_sites();
        let n = self.n_particles();
        if n == l {
            return CMatrix::zeros(l, 0);
        }
        let projector = CMatrix::identity(l, l) - &self.orbitals * self.orbitals.adjoint();
        let eig = projector.symmetric_eigen();
        let mut order: Vec<usize> = (0..l).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let mut out = CMatrix::zeros(l, l - n);
        for (k, &j) in order.iter().take(l - n).enumerate() {
            out.set_column(k, &eig.eigenvectors.column(j));
        }
        out
    }

    /// Same state written as a quasiparticle vacuum.
    pub fn to_bogoliubov(&self) -> BogoliubovState {
        let l = self.n_sites();
        let n = self.n_particles();
        let holes = self.complement();
        let mut u = CMatrix::zeros(l, l);
        let mut v = CMatrix::zeros(l, l);
        u.view_mut((0, 0), (l, n)).copy_from(&self.orbitals);
        v.view_mut((0, n), (l, l - n)).copy_from(&holes.conjugate());
        BogoliubovState { u, v }
    }
}

/// Pure Gaussian state with pairing, stored as the vacuum of the `L` operators
/// `b_k = Σ_i (u_ik c†_i + v_ik c_i)`.
///
/// The stacked `2L × L` matrix `[u; v]` has orthonormal columns spanning a
/// maximal isotropic subspace, which fixes the state up to a phase. For a Slater
/// determinant the occupied orbitals sit in `u` and conjugated holes in `v`.
#[derive(Debug, Clone, PartialEq)]
pub struct BogoliubovState {
    u: CMatrix,
    v: CMatrix,
}

impl BogoliubovState {
    pub fn new(u: CMatrix, v: CMatrix) -> Result<Self> {
        let l = u.nrows();
        if u.shape() != (l, l) || v.shape() != (l, l) {
            return Err(Error::SizeMismatch { expected: l, got: v.nrows() });
        }
        let s = BogoliubovState { u, v };
        let residual = orthonormality_residual(&s.stacked());
        if residual > 1e-10 {
            return Err(Error::Numerical(format!("[u; v] columns not orthonormal (residual {residual:.3e})")));
        }
        Ok(s)
    }

    pub(crate) fn from_stacked(w: &CMatrix) -> Self {
        let l = w.ncols();
        BogoliubovState { u: w.rows(0, l).into_owned(), v: w.rows(l, l).into_owned() }
    }

    pub fn u(&self) -> &CMatrix {
        &self.u
    }

    pub fn v(&self) -> &CMatrix {
        &self.v
    }

    pub fn n_sites(&self) -> usize {
        self.u.nrows()
    }

    pub fn stacked(&self) -> CMatrix {
        let l = self.n_sites();
        let mut w = CMatrix::zeros(2 * l, l);
        w.rows_mut(0, l).copy_from(&self.u);
        w.rows_mut(l, l).copy_from(&self.v);
        w
    }

    /// `C_ij = ⟨c†_i c_j⟩ = (1 - v v†)_ij`.
    pub fn correlation(&self) -> CMatrix {
        let l = self.n_sites();
        CMatrix::identity(l, l) - &self.v * self.v.adjoint()
    }

    /// `F_ij = ⟨c_i c_j⟩ = -(u v†)_ij`.
    pub fn anomalous(&self) -> CMatrix {
        -(&self.u * self.v.adjoint())
    }

    /// Nambu correlation `Γ_{αβ} = ⟨ξ†_α ξ_β⟩` with `ξ = (c_1..c_L, c†_1..c†_L)`,
    /// i.e. blocks `[[⟨c†c⟩, ⟨c†c†⟩], [⟨cc⟩, ⟨cc†⟩]]`.
    pub fn nambu_correlation(&self) -> CMatrix {
        let l = self.n_sites();
        let mut swapped = CMatrix::zeros(2 * l, l);
        swapped.rows_mut(0, l).copy_from(&self.v);
        swapped.rows_mut(l, l).copy_from(&self.u);
        CMatrix::identity(2 * l, 2 * l) - &swapped * swapped.adjoint()
    }
}

/// Either representation of a pure fermionic Gaussian state.
#[derive(Debug, Clone, PartialEq)]
pub enum GaussianState {
    Slater(SlaterState),
    Bogoliubov(BogoliubovState),
}

impl GaussianState {
    pub fn n_sites(&self) -> usize {
        match self {
            GaussianState::Slater(s) => s.n_sites(),
            GaussianState::Bogoliubov(b) => b.n_sites(),
        }
    }

    pub fn correlation(&self) -> CMatrix {
        match self {
            GaussianState::Slater(s) => s.correlation(),
            GaussianState::Bogoliubov(b) => b.correlation(),
        }
    }

    pub fn anomalous(&self) -> CMatrix {
        match self {
            GaussianState::Slater(s) => CMatrix::zeros(s.n_sites(), s.n_sites()),
            GaussianState::Bogoliubov(b) => b.anomalous(),
        }
    }

    pub fn to_bogoliubov(&self) -> BogoliubovState {
        match self {
            GaussianState::Slater(s) => s.to_bogoliubov(),
            GaussianState::Bogoliubov(b) => b.clone(),
        }
    }

    pub fn nambu_correlation(&self) -> CMatrix {
        self.to_bogoliubov().nambu_correlation()
    }

    pub fn as_slater(&self) -> Option<&SlaterState> {
        match self {
            GaussianState::Slater(s) => Some(s),
            _ => None,
        }
    }
}

impl From<SlaterState> for GaussianState {
    fn from(s: SlaterState) -> Self {
        GaussianState::Slater(s)
    }
}

impl From<BogoliubovState> for GaussianState {
    fn from(b: BogoliubovState) -> Self {
        GaussianState::Bogoliubov(b)
    }
}

pub(crate) fn real_to_complex(m: &DMatrix<f64>) -> CMatrix {
    m.map(|x| C64::new(x, 0.0))
}
