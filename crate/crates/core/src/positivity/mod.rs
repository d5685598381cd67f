//! Positivity classification of Choi matrices.
//!
//! Three cone tests are available: complete positivity (`H ⪰ 0`), complete
//! copositivity (`H^Γ ⪰ 0`) and plain positivity of the map, i.e.
//! block-positivity of `H`. The latter has two independent routes: a scan of
//! `λ_min(φ(P_ξ))` over the Bloch sphere ([`is_block_positive_scan`], the
//! reference verdict) and a search for refuting positive functionals
//! ([`search_nier1_violation`]).

mod structural;
mod witness;

pub use structural::{
    check_choi22, check_lemma24_ccp, check_lemma24_cp, check_prop21, check_yz_bound, cp_structural,
    ccp_structural,
};
pub use witness::{nier1_holds, nier1_objective, search_nier1_violation, FunctionalWitness};

use crate::bloch;
use crate::choi::{blocks, half_side, image_of_projection};
use crate::linalg::{eigvals_hermitian, min_eig, partial_transpose_unchecked, ComplexMatrix};
use crate::{Margin, Result, ToleranceConfig, Verdict};

/// Complete positivity: `margin = λ_min(H)`, tolerance `psd_tol`.
pub fn is_cp(h: &ComplexMatrix, tol: &ToleranceConfig) -> Result<Verdict> {
    Ok(Verdict::new(min_eig(h, tol.hermitian_tol)?, tol.psd_tol))
}

/// Complete copositivity: `margin = λ_min(H^Γ)`, tolerance `psd_tol`.
pub fn is_ccp(h: &ComplexMatrix, tol: &ToleranceConfig) -> Result<Verdict> {
    let k = half_side(h)?;
    h.check_hermitian(tol.hermitian_tol)?;
    Ok(Verdict::new(
        min_eig(&partial_transpose_unchecked(h, k), f64::INFINITY)?,
        tol.psd_tol,
    ))
}

/// Block-positivity by minimising `λ_min(φ(P_ξ))` over the Bloch sphere.
pub fn is_block_positive_scan(h: &ComplexMatrix, grid: usize, tol: &ToleranceConfig) -> Result<Verdict> {
    let k = half_side(h)?;
    h.check_hermitian(tol.hermitian_tol)?;
    Ok(Verdict::new(scan_margin(h, k, grid), tol.pos_tol))
}

/// `min_ξ λ_min(Σ ξ_i conj(ξ_j) H_ij)` for a Hermitian `2k × 2k` matrix.
pub(crate) fn scan_margin(h: &ComplexMatrix, k: usize, grid: usize) -> f64 {
    let h = h.hermitian_part();
    let f = |xi: &[crate::C64; 2]| {
        let p = image_of_projection(&h, k, xi).hermitian_part();
        eigvals_hermitian(&p, f64::INFINITY).map_or(f64::INFINITY, |v| *v.last().expect("k >= 1"))
    };
    bloch::minimize(grid, f).value
}

/// Everything [`classify`] learns about a Choi matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct PositivityReport {
    pub is_block_positive: Verdict,
    pub is_cp: Verdict,
    pub is_ccp: Verdict,
    /// `None` when the matrix is not in the face layout.
    pub face_form: Option<FaceFormReport>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FaceFormReport {
    pub structural: Vec<Margin>,
}

impl FaceFormReport {
    pub fn all_passed(&self) -> bool {
        self.structural.iter().all(Margin::passed)
    }
}

/// Runs every cone test and, for face-form input, every structural check.
pub fn classify(h: &ComplexMatrix, grid: usize, tol: &ToleranceConfig) -> Result<PositivityReport> {
    let is_block_positive = is_block_positive_scan(h, grid, tol)?;
    let is_cp = is_cp(h, tol)?;
    let is_ccp = is_ccp(h, tol)?;
    let face_form = match blocks(h, tol) {
        Ok(d) => {
            let mut structural = check_prop21(&d, grid, tol);
            if let Ok(m) = check_yz_bound(&d, tol) {
                structural.push(m);
            }
            structural.extend(check_lemma24_cp(&d, tol));
            structural.extend(check_lemma24_ccp(&d, tol));
            if d.n() == 1 {
                structural.extend(check_choi22(&d, tol)?);
            }
            Some(FaceFormReport { structural })
        }
        Err(_) => None,
    };
    Ok(PositivityReport {
        is_block_positive,
        is_cp,
        is_ccp,
        face_form,
    })
}
