use crate::choi::{blocks, blocks_unchecked, half_side, BlockDecomposition};
use crate::linalg::{min_eig, partial_transpose_unchecked, ComplexMatrix};
use crate::{Margin, ToleranceConfig};

use super::DecompositionResult;

/// Tolerance on the blocks that must vanish in both parts of a splitting of
/// a face-form matrix.
pub const FACE_CLOSURE_TOL: f64 = 1e-6;

/// Largest entry of the mandatory zero row of the `φ(E₂₂)` block.
fn face_row(h: &ComplexMatrix, k: usize) -> f64 {
    (k..2 * k)
        .flat_map(|j| [h[(k, j)].norm(), h[(j, k)].norm()])
        .fold(0.0, f64::max)
}

fn block_sum_defect(
    d: &BlockDecomposition,
    d1: &BlockDecomposition,
    d2: &BlockDecomposition,
    pick: impl Fn(&BlockDecomposition) -> ComplexMatrix,
) -> f64 {
    (&pick(d1) + &pick(d2)).distance(&pick(d))
}

/// Margins describing how well `r` splits `h`.
///
/// Always: the sum identity and both cone memberships. For face-form `h`
/// additionally: both parts stay in the face, `H₁` has no `Z` block, `H₂`
/// has no `Y` block, and the blocks `a, B, T, U` add up.
pub fn verify_decomposition(h: &ComplexMatrix, r: &DecompositionResult, tol: &ToleranceConfig) -> Vec<Margin> {
    let scale = h.frobenius_norm().max(1.0);
    let sum_tol = 1e-12 * scale;
    let mut out = vec![Margin::new("sum_identity", -(&r.h1 + &r.h2).distance(h), sum_tol)];

    let Ok(k) = half_side(h) else {
        return out;
    };
    if r.h1.shape() != h.shape() || r.h2.shape() != h.shape() {
        return out;
    }
    let lmin = |a: &ComplexMatrix| min_eig(&a.hermitian_part(), f64::INFINITY).unwrap_or(f64::NEG_INFINITY);
    out.push(Margin::new("H1_psd", lmin(&r.h1), tol.feas_tol));
    out.push(Margin::new("H2_ppt", lmin(&partial_transpose_unchecked(&r.h2, k)), tol.feas_tol));

    if let Ok(d) = blocks(h, tol) {
        let d1 = blocks_unchecked(&r.h1, k);
        let d2 = blocks_unchecked(&r.h2, k);
        out.push(Margin::new("H1_face_zeros", -face_row(&r.h1, k), FACE_CLOSURE_TOL));
        out.push(Margin::new("H2_face_zeros", -face_row(&r.h2, k), FACE_CLOSURE_TOL));
        out.push(Margin::new("H1_Z_zero", -d1.z.frobenius_norm(), FACE_CLOSURE_TOL));
        out.push(Margin::new("H2_Y_zero", -d2.y.frobenius_norm(), FACE_CLOSURE_TOL));
        let scalar = |x: f64| ComplexMatrix::from_real_diag(&[x]);
        out.push(Margin::new("a_sum", -block_sum_defect(&d, &d1, &d2, |b| scalar(b.a)), sum_tol));
        out.push(Margin::new("B_sum", -block_sum_defect(&d, &d1, &d2, |b| b.b.clone()), sum_tol));
        out.push(Margin::new("T_sum", -block_sum_defect(&d, &d1, &d2, |b| b.t.clone()), sum_tol));
        out.push(Margin::new("U_sum", -block_sum_defect(&d, &d1, &d2, |b| b.u.clone()), sum_tol));
    }
    out
}
