//! Dense complex linear algebra on small matrices.

mod eigen;
mod matrix;

pub use eigen::{eig_hermitian, eigvals_hermitian, min_eig, null_space, EigenDecomposition};
pub use matrix::{inner, vec_norm, ComplexMatrix, C64};

pub(crate) use eigen::require_square;
pub(crate) use matrix::{ONE, ZERO};

use crate::{Error, Result};

/// Eigenvalues below `-SQRT_PSD_TOL` make [`sqrt_psd`] fail.
pub const SQRT_PSD_TOL: f64 = 1e-10;

/// Frobenius-nearest PSD matrix: `Q · max(Λ, 0) · Q*`.
pub fn psd_project(a: &ComplexMatrix, hermitian_tol: f64) -> Result<ComplexMatrix> {
    let e = eig_hermitian(a, hermitian_tol)?;
    if e.min() >= 0.0 {
        // Already PSD; returning the symmetrised input keeps the projection idempotent bit for bit.
        return Ok(a.hermitian_part());
    }
    Ok(e.recompose(|l| l.max(0.0)))
}

/// Square root of a PSD matrix. Eigenvalues in `[-1e-10, 0)` are clipped to zero.
pub fn sqrt_psd(a: &ComplexMatrix, hermitian_tol: f64) -> Result<ComplexMatrix> {
    let e = eig_hermitian(a, hermitian_tol)?;
    if e.min() < -SQRT_PSD_TOL {
        return Err(Error::NotPsd { min_eig: e.min() });
    }
    Ok(e.recompose(|l| l.max(0.0).sqrt()))
}

/// `|X| = (X*X)^{1/2}` for a row vector `X`.
///
/// Computed in closed form as `‖X‖ · P_ξ` with `ξ = X*/‖X‖`, i.e.
/// `|X| = X*X / ‖X‖`; the zero row maps to the zero matrix.
pub fn abs_row(x: &ComplexMatrix) -> Result<ComplexMatrix> {
    if x.rows() != 1 {
        return Err(Error::DimensionMismatch(format!(
            "abs_row expects a 1xn row, got {}x{}",
            x.rows(),
            x.cols()
        )));
    }
    let n = x.cols();
    let norm = x.frobenius_norm();
    if norm == 0.0 {
        return Ok(ComplexMatrix::zeros(n, n));
    }
    let r = x.row_slice(0);
    Ok(ComplexMatrix::from_fn(n, n, |i, j| r[i].conj() * r[j] / norm))
}

/// Transposition of the outer 2×2 block index of a `2k × 2k` matrix:
/// the off-diagonal `k × k` blocks trade places, the diagonal blocks stay.
///
/// The map is an involution and a Frobenius isometry.
pub fn partial_transpose(h: &ComplexMatrix, block_dim: usize) -> Result<ComplexMatrix> {
    let side = require_square(h)?;
    if side % 2 != 0 {
        return Err(Error::OddDimension(side));
    }
    if 2 * block_dim != side {
        return Err(Error::DimensionMismatch(format!(
            "block dimension {block_dim} does not halve side {side}"
        )));
    }
    Ok(partial_transpose_unchecked(h, block_dim))
}

pub(crate) fn partial_transpose_unchecked(h: &ComplexMatrix, k: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(2 * k, 2 * k, |r, c| {
        let (bi, i) = (r / k, r % k);
        let (bj, j) = (c / k, c % k);
        h[(bj * k + i, bi * k + j)]
    })
}

/// Unitary whose column `target_col` is the unit vector `v`.
///
/// The remaining columns come from Gram–Schmidt on the standard basis with
/// the pivot vector removed, the pivot being the lowest index `i` with
/// `|v_i| > 1/(2√dim)`. Standard basis vectors are therefore returned
/// unchanged when `v` is one of them.
pub fn complete_unitary(v: &[C64], target_col: usize) -> Result<ComplexMatrix> {
    let dim = v.len();
    if target_col >= dim {
        return Err(Error::InvalidArgument(format!(
            "column {target_col} out of range for dimension {dim}"
        )));
    }
    let norm = vec_norm(v);
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!("vector norm {norm} is not 1")));
    }
    let threshold = 1.0 / (2.0 * (dim as f64).sqrt());
    let pivot = v
        .iter()
        .position(|z| z.norm() > threshold)
        .expect("a unit vector has a component above 1/(2 sqrt(dim))");

    let mut basis: Vec<Vec<C64>> = vec![v.to_vec()];
    for i in (0..dim).filter(|&i| i != pivot) {
        let mut w = vec![ZERO; dim];
        w[i] = ONE;
        for b in &basis {
            let proj = inner(b, &w);
            for (wk, bk) in w.iter_mut().zip(b) {
                *wk -= proj * bk;
            }
        }
        // Second pass for numerical orthogonality.
        for b in &basis {
            let proj = inner(b, &w);
            for (wk, bk) in w.iter_mut().zip(b) {
                *wk -= proj * bk;
            }
        }
        let wn = vec_norm(&w);
        basis.push(w.iter().map(|z| z / wn).collect());
    }

    // basis[0] goes to target_col, the rest fill the other columns in order.
    let mut cols: Vec<Vec<C64>> = basis.split_off(1);
    cols.insert(target_col, basis.pop().expect("v is present"));
    Ok(ComplexMatrix::from_fn(dim, dim, |i, j| cols[j][i]))
}
