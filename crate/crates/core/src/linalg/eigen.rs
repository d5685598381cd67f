//! Cyclic Jacobi eigensolver for dense Hermitian matrices.
//!
//! Each sweep visits every pair `(p, q)`, `p < q`, in row order and applies a
//! complex plane rotation that annihilates the `(p, q)` entry. Iteration stops
//! once the off-diagonal Frobenius mass drops below `1e-14 · ‖A‖_F`.
//!
//! For the matrix sizes used here (side ≤ 12) this is fast enough and it is
//! bit-reproducible: the rotation sequence depends only on the input bits.

use super::matrix::{ComplexMatrix, C64, ONE, ZERO};
use crate::{Error, Result};

const OFF_DIAGONAL_TOL: f64 = 1e-14;
const MAX_SWEEPS: usize = 100;

/// Spectrum of a Hermitian matrix, eigenvalues in descending order.
///
/// Column `k` of `eigenvectors` belongs to `eigenvalues[k]`.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl EigenDecomposition {
    pub fn min(&self) -> f64 {
        *self.eigenvalues.last().expect("empty spectrum")
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// Eigenvector paired with the smallest eigenvalue.
    pub fn min_vector(&self) -> Vec<C64> {
        self.eigenvectors.col_vec(self.eigenvalues.len() - 1)
    }

    /// `Q f(Λ) Q*`.
    pub fn recompose(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let q = &self.eigenvectors;
        let n = q.rows();
        let vals: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, &lambda) in vals.iter().enumerate() {
            if lambda == 0.0 {
                continue;
            }
            for i in 0..n {
                let qi = q[(i, k)] * lambda;
                for j in 0..n {
                    out[(i, j)] += qi * q[(j, k)].conj();
                }
            }
        }
        out.hermitian_part()
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Fails on non-square input or when `‖A − A*‖_F > hermitian_tol · ‖A‖_F`.
pub fn eig_hermitian(a: &ComplexMatrix, hermitian_tol: f64) -> Result<EigenDecomposition> {
    a.check_hermitian(hermitian_tol)?;
    Ok(jacobi(a.hermitian_part()))
}

/// Same as [`eig_hermitian`] but only the eigenvalues, still descending.
pub fn eigvals_hermitian(a: &ComplexMatrix, hermitian_tol: f64) -> Result<Vec<f64>> {
    Ok(eig_hermitian(a, hermitian_tol)?.eigenvalues)
}

fn off_diagonal_mass(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn jacobi(mut a: ComplexMatrix) -> EigenDecomposition {
    let n = a.rows();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm();
    let target = OFF_DIAGONAL_TOL * scale;

    if scale > 0.0 {
        for _ in 0..MAX_SWEEPS {
            if off_diagonal_mass(&a) <= target {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    rotate(&mut a, &mut v, p, q);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    // Stable sort keeps the sweep order among ties.
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let eigenvalues = order.iter().map(|&i| a[(i, i)].re).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    EigenDecomposition {
        eigenvalues,
        eigenvectors,
    }
}

/// Applies `A ← J* A J`, `V ← V J` with `J` chosen to zero `A[p][q]`.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // Negligible against both diagonal entries: the rotation would be lost in rounding.
    if r < 1e-300 || (app.abs() + r == app.abs() && aqq.abs() + r == aqq.abs()) {
        a[(p, q)] = ZERO;
        a[(q, p)] = ZERO;
        return;
    }
    let phase = apq / r;
    let theta = (aqq - app) / (2.0 * r);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    // J = [[c, s·e^{iφ}], [−s·e^{−iφ}, c]] on the (p, q) plane.
    let jpq = phase * s;
    let jqp = -phase.conj() * s;
    let n = a.rows();

    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c + akq * jqp;
        a[(k, q)] = akp * jpq + akq * c;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c + aqk * jqp.conj();
        a[(q, k)] = apk * jpq.conj() + aqk * c;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = C64::new(app - t * r, 0.0);
    a[(q, q)] = C64::new(aqq + t * r, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c + vkq * jqp;
        v[(k, q)] = vkp * jpq + vkq * c;
    }
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eig(a: &ComplexMatrix, hermitian_tol: f64) -> Result<f64> {
    Ok(eig_hermitian(a, hermitian_tol)?.min())
}

/// Orthonormal basis of the eigenspace with eigenvalues `≤ threshold`,
/// returned as columns.
pub fn null_space(a: &ComplexMatrix, threshold: f64, hermitian_tol: f64) -> Result<Vec<Vec<C64>>> {
    let e = eig_hermitian(a, hermitian_tol)?;
    Ok(e.eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &l)| l <= threshold)
        .map(|(k, _)| e.eigenvectors.col_vec(k))
        .collect())
}

pub(crate) fn require_square(a: &ComplexMatrix) -> Result<usize> {
    if a.is_square() {
        Ok(a.rows())
    } else {
        Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        })
    }
}

#[allow(dead_code)]
pub(crate) fn unit(n: usize, i: usize) -> Vec<C64> {
    let mut e = vec![ZERO; n];
    e[i] = ONE;
    e
}
