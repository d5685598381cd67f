//! Inequalities that the blocks of a positive face-form map must satisfy,
//! and the structural descriptions of CP and co-CP maps in the face.

use super::scan_margin;
use crate::choi::BlockDecomposition;
use crate::linalg::{abs_row, eig_hermitian, min_eig, sqrt_psd, ComplexMatrix, C64};
use crate::{Error, Margin, Result, ToleranceConfig};

fn lmin(a: &ComplexMatrix) -> f64 {
    min_eig(&a.hermitian_part(), f64::INFINITY).expect("square by construction")
}

/// `aB − C*C`.
fn abcc(d: &BlockDecomposition) -> ComplexMatrix {
    &d.b.scale(d.a) - &(&d.c.adjoint() * &d.c)
}

/// `[[B, T], [T*, U]]`.
fn btu(d: &BlockDecomposition) -> ComplexMatrix {
    let n = d.n();
    let mut m = ComplexMatrix::zeros(2 * n, 2 * n);
    m.set_block(0, 0, &d.b);
    m.set_block(0, n, &d.t);
    m.set_block(n, 0, &d.t.adjoint());
    m.set_block(n, n, &d.u);
    m
}

/// Necessary conditions on the blocks of a positive map in the face:
/// `a ≥ 0`, `B, U ⪰ 0`, `aB ⪰ C*C`, `C = 0` when `a = 0`, `x = 0`, and
/// block-positivity of `[[B, T], [T*, U]]` over its outer 2×2 index.
pub fn check_prop21(d: &BlockDecomposition, grid: usize, tol: &ToleranceConfig) -> Vec<Margin> {
    let c_zero = if d.a.abs() <= tol.structural_tol {
        Margin::new("face.C_zero_if_a_zero", -d.c.frobenius_norm(), tol.structural_tol)
    } else {
        Margin::skipped("face.C_zero_if_a_zero", tol.structural_tol)
    };
    vec![
        Margin::new("face.a_nonneg", d.a, tol.psd_tol),
        Margin::new("face.B_psd", lmin(&d.b), tol.psd_tol),
        Margin::new("face.U_psd", lmin(&d.u), tol.psd_tol),
        Margin::new("face.aB_minus_CC_psd", lmin(&abcc(d)), tol.psd_tol),
        c_zero,
        Margin::new("face.x_zero", -d.x.norm(), tol.structural_tol),
        Margin::new("face.BTU_block_positive", scan_margin(&btu(d), d.n(), grid), tol.pos_tol),
    ]
}

/// `λ_min(a^{1/2} U^{1/2} − |Y| − |Z|)`.
pub fn check_yz_bound(d: &BlockDecomposition, tol: &ToleranceConfig) -> Result<Margin> {
    if d.a < -tol.psd_tol {
        return Err(Error::InvalidArgument(format!("a = {} is negative", d.a)));
    }
    let root = sqrt_psd(&d.u.hermitian_part(), f64::INFINITY)?.scale(d.a.max(0.0).sqrt());
    let m = &(&root - &abs_row(&d.y)?) - &abs_row(&d.z)?;
    Ok(Margin::new("yz_bound", lmin(&m), tol.psd_tol))
}

/// `[[a, C, R], [C*, B, S], [R*, S*, U]]`, side `2n + 1`.
fn compressed(d: &BlockDecomposition, r: &ComplexMatrix, s: &ComplexMatrix) -> ComplexMatrix {
    let n = d.n();
    let mut m = ComplexMatrix::zeros(2 * n + 1, 2 * n + 1);
    m[(0, 0)] = C64::new(d.a, 0.0);
    m.set_block(0, 1, &d.c);
    m.set_block(1, 0, &d.c.adjoint());
    m.set_block(0, n + 1, r);
    m.set_block(n + 1, 0, &r.adjoint());
    m.set_block(1, 1, &d.b);
    m.set_block(1, n + 1, s);
    m.set_block(n + 1, 1, &s.adjoint());
    m.set_block(n + 1, n + 1, &d.u);
    m
}

/// `B⁻¹` when `λ_min(B) > inv_tol`.
fn inverse_if_safe(b: &ComplexMatrix, tol: &ToleranceConfig) -> Option<ComplexMatrix> {
    let e = eig_hermitian(&b.hermitian_part(), f64::INFINITY).ok()?;
    (e.min() > tol.inv_tol).then(|| e.recompose(|l| 1.0 / l))
}

/// Conditions A1–A5 describing CP maps in the face.
///
/// A1 (`Z = 0`) and A2 (positivity of `[[a, C, Y], [C*, B, T], [Y*, T*, U]]`)
/// characterise complete positivity; A3–A5 are consequences of A2. A3 is
/// skipped when `B` is numerically singular.
pub fn check_lemma24_cp(d: &BlockDecomposition, tol: &ToleranceConfig) -> Vec<Margin> {
    let a3 = match inverse_if_safe(&d.b, tol) {
        Some(binv) => Margin::new("A3", lmin(&(&d.u - &binv.congruence(&d.t))), tol.psd_tol),
        None => Margin::skipped("A3", tol.psd_tol),
    };
    vec![
        Margin::new("A1", -d.z.frobenius_norm(), tol.psd_tol),
        Margin::new("A2", lmin(&compressed(d, &d.y, &d.t)), tol.psd_tol),
        a3,
        Margin::new("A4", lmin(&abcc(d)), tol.psd_tol),
        Margin::new("A5", lmin(&(&d.u.scale(d.a) - &(&d.y.adjoint() * &d.y))), tol.psd_tol),
    ]
}

/// Conditions B1–B5 describing co-CP maps in the face; the mirror of
/// [`check_lemma24_cp`] with `Y ↔ Z` and `T ↔ T*`.
pub fn check_lemma24_ccp(d: &BlockDecomposition, tol: &ToleranceConfig) -> Vec<Margin> {
    let th = d.t.adjoint();
    let b3 = match inverse_if_safe(&d.b, tol) {
        Some(binv) => Margin::new("B3", lmin(&(&d.u - &binv.congruence(&th))), tol.psd_tol),
        None => Margin::skipped("B3", tol.psd_tol),
    };
    vec![
        Margin::new("B1", -d.y.frobenius_norm(), tol.psd_tol),
        Margin::new("B2", lmin(&compressed(d, &d.z, &th)), tol.psd_tol),
        b3,
        Margin::new("B4", lmin(&abcc(d)), tol.psd_tol),
        Margin::new("B5", lmin(&(&d.u.scale(d.a) - &(&d.z.adjoint() * &d.z))), tol.psd_tol),
    ]
}

fn named(margins: &[Margin], names: &[&str]) -> bool {
    names
        .iter()
        .all(|n| crate::find_margin(margins, n).is_some_and(Margin::passed))
}

/// A1 ∧ A2.
pub fn cp_structural(margins: &[Margin]) -> bool {
    named(margins, &["A1", "A2"])
}

/// B1 ∧ B2.
pub fn ccp_structural(margins: &[Margin]) -> bool {
    named(margins, &["B1", "B2"])
}

/// The three scalar conditions for `n = 1`: `|c|² ≤ ab`, `|t|² ≤ bu` and
/// `|y| + |z| ≤ (au)^{1/2}`.
pub fn check_choi22(d: &BlockDecomposition, tol: &ToleranceConfig) -> Result<Vec<Margin>> {
    if d.n() != 1 {
        return Err(Error::WrongBlockDim {
            expected: 1,
            actual: d.n(),
        });
    }
    let a = d.a;
    let b = d.b[(0, 0)].re;
    let u = d.u[(0, 0)].re;
    Ok(vec![
        Margin::new("choi22.c", a * b - d.c[(0, 0)].norm_sqr(), tol.pos_tol),
        Margin::new("choi22.t", b * u - d.t[(0, 0)].norm_sqr(), tol.pos_tol),
        Margin::new(
            "choi22.yz",
            (a * u).max(0.0).sqrt() - d.y[(0, 0)].norm() - d.z[(0, 0)].norm(),
            tol.pos_tol,
        ),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn value(ms: &[Margin], name: &str) -> f64 {
        crate::find_margin(ms, name).unwrap().value.unwrap()
    }

    fn unital(n: usize) -> BlockDecomposition {
        let mut d = BlockDecomposition::zeros(n);
        d.a = 1.0;
        d.b = ComplexMatrix::identity(n).scale(0.5);
        d.u = ComplexMatrix::identity(n).scale(0.5);
        d
    }

    #[test]
    fn face_inequality_examples() {
        let tol = ToleranceConfig::default();
        let ms = check_prop21(&unital(2), 300, &tol);
        assert!(ms.iter().all(Margin::passed));

        let mut d = BlockDecomposition::zeros(2);
        d.c = ComplexMatrix::row(&[c(1.0, 0.0), c(0.0, 0.0)]);
        let ms = check_prop21(&d, 300, &tol);
        assert!(!crate::find_margin(&ms, "face.C_zero_if_a_zero").unwrap().passed());
        assert!(!crate::find_margin(&ms, "face.aB_minus_CC_psd").unwrap().passed());

        let mut d = unital(2);
        d.x = c(0.1, 0.0);
        let ms = check_prop21(&d, 300, &tol);
        assert!((value(&ms, "face.x_zero") + 0.1).abs() < 1e-16);
    }

    #[test]
    fn yz_examples() {
        let tol = ToleranceConfig::default();
        let mut d = unital(2);
        d.u = ComplexMatrix::from_real_diag(&[0.25, 0.0]);
        // Y = Z = 0: margin is λ_min(U^{1/2}) = 0.
        assert!(check_yz_bound(&d, &tol).unwrap().value.unwrap().abs() < 1e-15);

        let mut d = BlockDecomposition::zeros(1);
        d.a = 1.0;
        d.u = ComplexMatrix::identity(1);
        d.y = ComplexMatrix::row(&[c(0.5, 0.0)]);
        d.z = ComplexMatrix::row(&[c(0.0, 0.5)]);
        assert!(check_yz_bound(&d, &tol).unwrap().value.unwrap().abs() < 1e-15);

        let mut d = BlockDecomposition::zeros(2);
        d.a = 1.0;
        d.u = ComplexMatrix::identity(2);
        d.y = ComplexMatrix::row(&[c(1.0, 0.0), c(0.0, 0.0)]);
        d.z = ComplexMatrix::row(&[c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(check_yz_bound(&d, &tol).unwrap().value.unwrap().abs() < 1e-15);

        d.u = ComplexMatrix::from_real_diag(&[1.0, -1.0]);
        assert!(check_yz_bound(&d, &tol).is_err());
    }

    #[test]
    fn zero_blocks_skip_the_inverse() {
        let tol = ToleranceConfig::default();
        let d = BlockDecomposition::zeros(2);
        for ms in [check_lemma24_cp(&d, &tol), check_lemma24_ccp(&d, &tol)] {
            assert!(ms.iter().all(Margin::passed));
            assert!(ms.iter().all(|m| m.value.is_none_or(|v| v == 0.0)));
        }
        assert!(crate::find_margin(&check_lemma24_cp(&d, &tol), "A3").unwrap().value.is_none());
    }

    #[test]
    fn nonzero_z_fails_the_cp_form() {
        let tol = ToleranceConfig::default();
        let mut d = unital(2);
        d.z = ComplexMatrix::row(&[c(0.1, 0.0), c(0.0, 0.0)]);
        let ms = check_lemma24_cp(&d, &tol);
        assert!(!cp_structural(&ms));
        assert!(ccp_structural(&check_lemma24_ccp(&d, &tol)));
    }

    #[test]
    fn choi22_examples() {
        let tol = ToleranceConfig::default();
        let mut d = BlockDecomposition::zeros(1);
        d.a = 1.0;
        d.b = ComplexMatrix::identity(1);
        d.u = ComplexMatrix::identity(1);
        d.y = ComplexMatrix::row(&[c(0.5, 0.0)]);
        d.z = ComplexMatrix::row(&[c(0.5, 0.0)]);
        let ms = check_choi22(&d, &tol).unwrap();
        let vals: Vec<f64> = ms.iter().map(|m| m.value.unwrap()).collect();
        assert_eq!(vals, vec![1.0, 1.0, 0.0]);

        let ms = check_choi22(&BlockDecomposition::zeros(1), &tol).unwrap();
        assert!(ms.iter().all(|m| m.value == Some(0.0)));

        assert!(matches!(
            check_choi22(&BlockDecomposition::zeros(2), &tol),
            Err(Error::WrongBlockDim { expected: 1, actual: 2 })
        ));
    }
}
