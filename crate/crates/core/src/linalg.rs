//! Verified Hermitian eigendecomposition.
//!
//! nalgebra's complex `symmetric_eigen` can silently mispair eigenvectors
//! and eigenvalues for some near-block-diagonal Hermitian matrices: the
//! returned basis stays orthonormal but `H V != V L` by O(1e-2). Every
//! eigenvector consumer in this crate goes through [`hermitian_eigen`],
//! which checks the decomposition residual and falls back to the real
//! symmetric embedding `[[Re H, -Im H], [Im H, Re H]]` when the direct
//! route fails.

use crate::{c64, CMatrix, CVector};
use nalgebra::{DMatrix, DVector};

/// Eigenvalues (ascending is not guaranteed) and matching orthonormal
/// eigenvectors of a Hermitian matrix, with the decomposition verified.
pub(crate) fn hermitian_eigen(h: &CMatrix) -> (DVector<f64>, CMatrix) {
    let d = h.nrows();
    if d == 0 {
        return (DVector::zeros(0), CMatrix::zeros(0, 0));
    }
    if d == 1 {
        return (DVector::from_element(1, h[(0, 0)].re), CMatrix::identity(1, 1));
    }
    let scale = h.norm().max(1e-300);
    let eig = h.clone().symmetric_eigen();
    if decomposition_residual(h, &eig.eigenvalues, &eig.eigenvectors) <= 1e-11 * scale {
        return (eig.eigenvalues, eig.eigenvectors);
    }
    hermitian_eigen_via_real_embedding(h)
}

fn decomposition_residual(h: &CMatrix, values: &DVector<f64>, vectors: &CMatrix) -> f64 {
    let lambda = CMatrix::from_diagonal(&values.map(|l| c64(l, 0.0)));
    (h * vectors - vectors * lambda).norm()
}

/// Diagonalize via the doubled real symmetric matrix; each complex
/// eigenvector appears as a degenerate pair `(x; y)`, `(-y; x)`, and the
/// complex basis is recovered by Gram-Schmidt over the recombined vectors.
fn hermitian_eigen_via_real_embedding(h: &CMatrix) -> (DVector<f64>, CMatrix) {
    let d = h.nrows();
    let mut big = DMatrix::<f64>::zeros(2 * d, 2 * d);
    for i in 0..d {
        for j in 0..d {
            let z = h[(i, j)];
            big[(i, j)] = z.re;
            big[(i, j + d)] = -z.im;
            big[(i + d, j)] = z.im;
            big[(i + d, j + d)] = z.re;
        }
    }
    let eig = big.symmetric_eigen();
    let mut order: Vec<usize> = (0..2 * d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());

    let mut values = Vec::with_capacity(d);
    let mut vectors: Vec<CVector> = Vec::with_capacity(d);
    for &idx in &order {
        if vectors.len() == d {
            break;
        }
        let col = eig.eigenvectors.column(idx);
        let mut u = CVector::from_fn(d, |i, _| c64(col[i], col[i + d]));
        // remove components along the vectors already accepted; the pair
        // partner of an accepted vector projects to (numerically) zero
        for v in &vectors {
            let overlap = v.dotc(&u);
            u.axpy(-overlap, v, c64(1.0, 0.0));
        }
        let norm = u.norm();
        if norm > 1e-6 {
            vectors.push(u / c64(norm, 0.0));
            values.push(eig.eigenvalues[idx]);
        }
    }
    assert_eq!(vectors.len(), d, "real-embedding eigendecomposition lost directions");
    let mut vmat = CMatrix::zeros(d, d);
    for (k, v) in vectors.iter().enumerate() {
        vmat.set_column(k, v);
    }
    (DVector::from_vec(values), vmat)
}
