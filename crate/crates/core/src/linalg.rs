//! Small dense linear-algebra helpers shared by the engines.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// `exp(H)` for Hermitian `H`, through its eigendecomposition.
pub fn hermitian_expm(h: &CMatrix) -> CMatrix {
    let eig = SymmetricEigen::new(h.clone());
    let v = &eig.eigenvectors;
    let mut scaled = v.clone();
    for (j, lambda) in eig.eigenvalues.iter().enumerate() {
        let f = lambda.exp();
        scaled.column_mut(j).iter_mut().for_each(|x| *x *= f);
    }
    &scaled * v.adjoint()
}

/// Real eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(h: &CMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = h.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

/// Orthonormal basis of the column span of `m` by thin QR.
///
/// Fails when the column space has collapsed so far that `Q†Q` deviates from
/// the identity by more than `tol`.
pub fn orthonormalize_columns(m: &CMatrix, tol: f64) -> Result<CMatrix> {
    let q = m.clone().qr().q();
    let residual = orthonormality_residual(&q);
    if !(residual <= tol) {
        return Err(Error::Numerical(format!("orthonormality residual {residual:.3e} after QR exceeds {tol:.1e}")));
    }
    Ok(q)
}

/// `max |(Q†Q - I)_{ij}|`.
pub fn orthonormality_residual(q: &CMatrix) -> f64 {
    let g = q.adjoint() * q;
    let n = g.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g[(i, j)] - C64::new(target, 0.0)).norm());
        }
    }
    worst
}

/// Entropy contribution `-x ln x` with `x` clipped to `[1e-14, 1 - 1e-14]`.
pub(crate) fn neg_x_ln_x_clipped(x: f64) -> f64 {
    let x = x.clamp(1e-14, 1.0 - 1e-14);
    -x * x.ln()
}

/// Largest absolute entry difference between two matrices.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expm_of_diagonal() {
        let h = CMatrix::from_diagonal(&CVector::from_vec(vec![C64::new(0.3, 0.0), C64::new(-1.0, 0.0)]));
        let e = hermitian_expm(&h);
        assert!((e[(0, 0)].re - 0.3f64.exp()).abs() < 1e-14);
        assert!((e[(1, 1)].re - (-1.0f64).exp()).abs() < 1e-14);
        assert!(e[(0, 1)].norm() < 1e-15);
    }

    #[test]
    fn expm_of_pair_hopping() {
        let w = 0.8;
        let h = CMatrix::from_row_slice(2, 2, &[C64::new(0.0, 0.0), C64::new(w, 0.0), C64::new(w, 0.0), C64::new(0.0, 0.0)]);
        let e = hermitian_expm(&h);
        assert!((e[(0, 0)].re - w.cosh()).abs() < 1e-14);
        assert!((e[(0, 1)].re - w.sinh()).abs() < 1e-14);
    }
}
