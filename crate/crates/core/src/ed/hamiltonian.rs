use std::collections::BTreeMap;

use nalgebra::DMatrix;

use super::basis::{apply_product, Ladder, SectorBasis, MAX_FULL_SITES};
use crate::error::{Error, Result};
use crate::lattice::ModelSpec;

/// Hilbert space an operator acts on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Space {
    Sector(SectorBasis),
    Full { n_sites: usize },
}

impl Space {
    pub fn full(n_sites: usize) -> Result<Self> {
        if n_sites > MAX_FULL_SITES {
            return Err(Error::SizeGuard(format!("full space limited to {MAX_FULL_SITES} sites, got {n_sites}")));
        }
        Ok(Space::Full { n_sites })
    }

    pub fn particle_sector(model: &ModelSpec) -> Result<Self> {
        Ok(Space::Sector(SectorBasis::new(model.n_sites, model.n_particles())?))
    }

    pub fn n_sites(&self) -> usize {
        match self {
            Space::Sector(b) => b.n_sites,
            Space::Full { n_sites } => *n_sites,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Space::Sector(b) => b.dim(),
            Space::Full { n_sites } => 1 << n_sites,
        }
    }

    pub fn state(&self, i: usize) -> u64 {
        match self {
            Space::Sector(b) => b.states()[i],
            Space::Full { .. } => i as u64,
        }
    }

    pub fn index(&self, s: u64) -> Option<usize> {
        match self {
            Space::Sector(b) => b.index(s),
            Space::Full { n_sites } => ((s >> n_sites) == 0).then_some(s as usize),
        }
    }
}

/// Real symmetric sparse operator in compressed-row form.
#[derive(Debug, Clone)]
pub struct Hamiltonian {
    space: Space,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl Hamiltonian {
    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// `y = H x`, rows in fixed order.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (r, out) in y.iter_mut().enumerate() {
            let mut acc = 0.0;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            *out = acc;
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for r in 0..n {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                m[(r, self.cols[k])] += self.vals[k];
            }
        }
        m
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        let d = self.to_dense();
        (&d - d.transpose()).amax() <= tol
    }
}

/// `-t Σ_b (c†_i c_j + c†_j c_i) + V Σ_b (n_i - ½)(n_j - ½)` over the bonds of `model`.
pub fn build_hamiltonian(model: &ModelSpec, space: Space) -> Result<Hamiltonian> {
    model.validate()?;
    if space.n_sites() != model.n_sites {
        return Err(Error::SizeMismatch { expected: model.n_sites, got: space.n_sites() });
    }
    let bonds = model.signed_bonds();
    let t = model.hopping;
    let v = model.delta * t;
    let dim = space.dim();
    let mut row_ptr = Vec::with_capacity(dim + 1);
    let mut cols = Vec::new();
    let mut vals = Vec::new();
    row_ptr.push(0);
    for r in 0..dim {
        let s = space.state(r);
        let mut row: BTreeMap<usize, f64> = BTreeMap::new();
        let mut diag = 0.0;
        for &(i, j, bond_sign) in &bonds {
            let ni = (s >> i & 1) as f64 - 0.5;
            let nj = (s >> j & 1) as f64 - 0.5;
            diag += v * ni * nj;
            for ops in [[Ladder::Create(i), Ladder::Annihilate(j)], [Ladder::Create(j), Ladder::Annihilate(i)]] {
                if let Some((s2, sign)) = apply_product(s, &ops) {
                    let c = space.index(s2).ok_or_else(|| Error::Numerical("hopping left the sector".into()))?;
                    *row.entry(c).or_default() -= t * sign * bond_sign;
                }
            }
        }
        if diag != 0.0 {
            *row.entry(r).or_default() += diag;
        }
        for (c, x) in row {
            if x != 0.0 {
                cols.push(c);
                vals.push(x);
            }
        }
        row_ptr.push(cols.len());
    }
    Ok(Hamiltonian { space, row_ptr, cols, vals })
}
