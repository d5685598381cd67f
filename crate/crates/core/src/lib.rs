//! Positive linear maps `M₂(ℂ) → M_{n+1}(ℂ)` studied through their Choi
//! matrices.
//!
//! The crate is organised bottom-up:
//!
//! - [`linalg`]: a small dense complex matrix type, a Jacobi eigensolver for
//!   Hermitian matrices, projection onto the PSD cone, PSD square roots,
//!   partial transposition and the absolute value of a row vector.
//! - [`choi`]: the Choi matrix of a map, its named blocks in the maximal face
//!   `F_{e₂,f₁}`, and unitary canonicalisation into that face.
//! - [`positivity`]: complete positivity, complete copositivity and
//!   block-positivity tests, plus every structural inequality satisfied by
//!   positive maps in the face, and the functional-witness refutation search.
//! - [`decompose`]: CP + co-CP splittings by Dykstra's alternating
//!   projections, their verification, the multi-start uniqueness probe and
//!   samplers for unital positive maps in the face.
//!
//! All tolerances are collected in [`ToleranceConfig`].

pub mod bloch;
pub mod choi;
pub mod decompose;
pub mod linalg;
pub mod positivity;
pub mod random;

mod error;
mod margin;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, C64};
pub use margin::{find_margin, Margin, Verdict};

/// Numerical tolerances shared by every module.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceConfig {
    /// Relative Hermiticity defect accepted by Hermitian-only operations.
    pub hermitian_tol: f64,
    /// Smallest eigenvalue accepted as PSD by the CP and co-CP tests.
    pub psd_tol: f64,
    /// Block-positivity scan margin accepted as positive.
    pub pos_tol: f64,
    /// Magnitude under which the mandatory zeros of the face layout count as zero.
    pub structural_tol: f64,
    /// Residual `‖φ(P_ξ)η‖` accepted as face membership.
    pub face_tol: f64,
    /// Functional-witness margin below which positivity counts as refuted.
    pub witness_tol: f64,
    /// Cone-membership slack accepted from the decomposition solver.
    pub feas_tol: f64,
    /// `B` is inverted only when its smallest eigenvalue exceeds this.
    pub inv_tol: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            hermitian_tol: 1e-12,
            psd_tol: 1e-9,
            pos_tol: 1e-8,
            structural_tol: 1e-10,
            face_tol: 1e-9,
            witness_tol: 1e-10,
            feas_tol: 1e-8,
            inv_tol: 1e-10,
        }
    }
}
