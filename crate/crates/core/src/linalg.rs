//! Dense complex matrix helpers shared by every module.

use ndarray::{Array1, Array2, ArrayView2, Axis};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };
pub const I: C64 = C64 { re: 0.0, im: 1.0 };

pub fn identity(n: usize) -> Array2<C64> {
    Array2::eye(n)
}

/// Kronecker product `a ⊗ b` with row-major block layout.
pub fn kron(a: &ArrayView2<C64>, b: &ArrayView2<C64>) -> Array2<C64> {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = Array2::zeros((ar * br, ac * bc));
    for i in 0..ar {
        for j in 0..ac {
            let aij = a[[i, j]];
            if aij == ZERO {
                continue;
            }
            let mut block = out.slice_mut(ndarray::s![i * br..(i + 1) * br, j * bc..(j + 1) * bc]);
            block.zip_mut_with(b, |o, &bv| *o = aij * bv);
        }
    }
    out
}

/// Conjugate transpose.
pub fn dagger(a: &ArrayView2<C64>) -> Array2<C64> {
    a.t().mapv(|z| z.conj())
}

pub fn trace(a: &ArrayView2<C64>) -> C64 {
    a.diag().sum()
}

pub fn frobenius_norm(a: &ArrayView2<C64>) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs(a: &ArrayView2<C64>) -> f64 {
    a.iter().fold(0.0, |m, z| m.max(z.norm()))
}

/// Induced 1-norm (maximum absolute column sum).
pub fn one_norm(a: &ArrayView2<C64>) -> f64 {
    a.axis_iter(Axis(1))
        .map(|col| col.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `max |a_ij - a_ji^*|`.
pub fn hermiticity_defect(a: &ArrayView2<C64>) -> f64 {
    let n = a.nrows();
    let mut m: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            m = m.max((a[[i, j]] - a[[j, i]].conj()).norm());
        }
    }
    m
}

/// Eigen-decomposition of a Hermitian matrix: ascending real eigenvalues and
/// the matching orthonormal eigenvectors as columns.
///
/// The input is symmetrized as `(a + a†)/2` first, so tiny anti-Hermitian
/// rounding noise does not leak into the spectrum.
pub fn eigh(a: &ArrayView2<C64>) -> (Array1<f64>, Array2<C64>) {
    let n = a.nrows();
    let m = nalgebra::DMatrix::<C64>::from_fn(n, n, |i, j| 0.5 * (a[[i, j]] + a[[j, i]].conj()));
    let eig = nalgebra::SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[x].total_cmp(&eig.eigenvalues[y]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = Array2::zeros((n, n));
    for (col, &k) in order.iter().enumerate() {
        for row in 0..n {
            vectors[[row, col]] = eig.eigenvectors[(row, k)];
        }
    }
    (values, vectors)
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn eigvalsh(a: &ArrayView2<C64>) -> Array1<f64> {
    let n = a.nrows();
    let m = nalgebra::DMatrix::<C64>::from_fn(n, n, |i, j| 0.5 * (a[[i, j]] + a[[j, i]].conj()));
    let mut v: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    Array1::from(v)
}

/// Solves `a x = b` for a square `a` by LU with partial pivoting.
pub fn solve(a: &ArrayView2<C64>, b: &ArrayView2<C64>) -> Result<Array2<C64>> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::invalid("solve: matrix is not square"));
    }
    Error::check_dim(n, b.nrows())?;
    let mut lu = a.to_owned();
    let mut x = b.to_owned();
    for k in 0..n {
        let (piv, pmag) = (k..n)
            .map(|r| (r, lu[[r, k]].norm()))
            .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pmag == 0.0 || !pmag.is_finite() {
            return Err(Error::invalid("solve: singular matrix"));
        }
        if piv != k {
            for c in 0..n {
                lu.swap([k, c], [piv, c]);
            }
            for c in 0..x.ncols() {
                x.swap([k, c], [piv, c]);
            }
        }
        let inv = lu[[k, k]].inv();
        for r in k + 1..n {
            let f = lu[[r, k]] * inv;
            if f == ZERO {
                continue;
            }
            lu[[r, k]] = f;
            for c in k + 1..n {
                let t = lu[[k, c]];
                lu[[r, c]] -= f * t;
            }
            for c in 0..x.ncols() {
                let t = x[[k, c]];
                x[[r, c]] -= f * t;
            }
        }
    }
    for c in 0..x.ncols() {
        for r in (0..n).rev() {
            let mut s = x[[r, c]];
            for k in r + 1..n {
                s -= lu[[r, k]] * x[[k, c]];
            }
            x[[r, c]] = s / lu[[r, r]];
        }
    }
    Ok(x)
}
