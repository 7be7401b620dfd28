//! Dense kernels delegated to faer. nalgebra stays the matrix type used
//! throughout; its complex SVD returns inaccurate singular vectors on nearly
//! rank-deficient inputs, which deflation-based factorizations cannot afford.

use faer::{Mat, Side};
use nalgebra::DMatrix;

use crate::fock::{C64, ZERO};

fn to_faer(m: &DMatrix<C64>) -> Mat<C64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn from_faer(m: faer::MatRef<'_, C64>) -> DMatrix<C64> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Full SVD M = U·diag(σ)·V†, σ nonincreasing. Empty matrices give empty
/// factors.
pub(crate) fn svd(m: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>, DMatrix<C64>) {
    let (r, c) = m.shape();
    if r == 0 || c == 0 {
        return (Vec::new(), DMatrix::identity(r, r), DMatrix::identity(c, c));
    }
    let f = to_faer(m).svd().expect("SVD converges on finite input");
    let values = f.S().column_vector().iter().map(|s| s.re).collect();
    (values, from_faer(f.U()), from_faer(f.V()))
}

/// Singular values, nonincreasing.
pub(crate) fn singular_values(m: &DMatrix<C64>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    to_faer(m).singular_values().expect("SVD converges on finite input")
}

/// Eigenvalues (nonincreasing) and eigenvectors of a Hermitian matrix.
pub(crate) fn hermitian_eigen(h: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let n = h.nrows();
    let sym = (h + h.adjoint()) * C64::new(0.5, 0.0);
    let e = to_faer(&sym).self_adjoint_eigen(Side::Lower).expect("eigensolver converges on finite input");
    let vals: Vec<f64> = e.S().column_vector().iter().map(|s| s.re).collect();
    let vecs = from_faer(e.U());
    let order: Vec<usize> = (0..n).rev().collect();
    let values = order.iter().map(|&k| vals[k]).collect();
    (values, DMatrix::from_fn(n, n, |i, j| vecs[(i, order[j])]))
}

/// Minimum-norm least-squares solution of A·x = b, discarding singular
/// values below `rel_cut` times the largest.
pub(crate) fn lstsq(a: &DMatrix<C64>, b: &DMatrix<C64>, rel_cut: f64) -> DMatrix<C64> {
    let (values, u, v) = svd(a);
    let mut x = DMatrix::from_element(a.ncols(), b.ncols(), ZERO);
    let cut = values.first().copied().unwrap_or(0.0) * rel_cut;
    for (k, &s) in values.iter().enumerate() {
        if s <= cut || s == 0.0 {
            break;
        }
        let coeff = u.column(k).adjoint() * b / C64::new(s, 0.0);
        x += v.column(k) * coeff;
    }
    x
}
