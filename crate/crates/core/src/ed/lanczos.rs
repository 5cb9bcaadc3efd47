//! Lowest eigenpair of a real symmetric operator by Lanczos iteration with
//! full reorthogonalization.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct LanczosResult {
    pub value: f64,
    pub vector: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
}

/// Lowest eigenpair of `op` restricted to the orthogonal complement of `deflate`.
///
/// The start vector is a fixed pseudo-random sequence, so repeated calls are
/// bitwise reproducible.
pub fn lowest_eigenpair<F>(op: F, dim: usize, deflate: &[Vec<f64>], tol: f64, max_iter: usize) -> Result<LanczosResult>
where
    F: Fn(&[f64], &mut [f64]),
{
    let max_iter = max_iter.min(dim.saturating_sub(deflate.len())).max(1);
    let mut q = start_vector(dim);
    project_out(&mut q, deflate);
    normalize(&mut q).ok_or_else(|| Error::Numerical("Lanczos start vector vanished".into()))?;

    let mut basis: Vec<Vec<f64>> = vec![q];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut w = vec![0.0; dim];
    let mut best: Option<(f64, Vec<f64>, f64)> = None;

    for it in 0..max_iter {
        op(&basis[it], &mut w);
        let a = dot(&w, &basis[it]);
        alpha.push(a);
        // two passes of classical Gram-Schmidt
        for _ in 0..2 {
            project_out(&mut w, deflate);
            project_out(&mut w, &basis);
        }
        let b = norm(&w);

        let m = alpha.len();
        let check = it + 1 == max_iter || b < 1e-14 || m % 4 == 0;
        if check {
            let t = tridiagonal(&alpha, &beta);
            let eig = SymmetricEigen::new(t);
            let (k, &value) = eig
                .eigenvalues
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.total_cmp(b.1))
                .unwrap();
            let y = eig.eigenvectors.column(k);
            let residual = (b * y[m - 1]).abs();
            best = Some((value, y.iter().copied().collect(), residual));
            if residual < tol * value.abs().max(1.0) || b < 1e-14 {
                break;
            }
        }
        if it + 1 == max_iter {
            break;
        }
        beta.push(b);
        basis.push(w.iter().map(|x| x / b).collect());
    }

    let (value, y, residual) = best.unwrap();
    if residual > tol.sqrt() * value.abs().max(1.0) {
        return Err(Error::Numerical(format!("Lanczos residual {residual:.3e} after {} iterations", alpha.len())));
    }
    let mut vector = vec![0.0; dim];
    for (coef, qk) in y.iter().zip(&basis) {
        for (v, x) in vector.iter_mut().zip(qk) {
            *v += coef * x;
        }
    }
    project_out(&mut vector, deflate);
    normalize(&mut vector);
    Ok(LanczosResult { value, vector, iterations: alpha.len(), residual })
}

fn tridiagonal(alpha: &[f64], beta: &[f64]) -> DMatrix<f64> {
    let m = alpha.len();
    DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            alpha[i]
        } else if i + 1 == j {
            beta[i]
        } else if j + 1 == i {
            beta[j]
        } else {
            0.0
        }
    })
}

fn start_vector(dim: usize) -> Vec<f64> {
    // splitmix64
    let mut state: u64 = 0x9E37_79B9_7F4A_7C15;
    (0..dim)
        .map(|_| {
            state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
            let mut z = state;
            z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
            z ^= z >> 31;
            (z >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        })
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn normalize(a: &mut [f64]) -> Option<()> {
    let n = norm(a);
    if n < 1e-300 {
        return None;
    }
    a.iter_mut().for_each(|x| *x /= n);
    Some(())
}

fn project_out(w: &mut [f64], vecs: &[Vec<f64>]) {
    for v in vecs {
        let c = dot(w, v);
        for (x, y) in w.iter_mut().zip(v) {
            *x -= c * y;
        }
    }
}
