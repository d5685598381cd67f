//! Random unital positive maps in the face `F_{e₂,f₁}`.
//!
//! Samples have `a = 1`, `C = 0`, `x = 0`, `B = I − U`. With these blocks,
//! `λ_min(φ(P_ξ)) ≥ 0` for `ξ = (p, q)`, `p ≠ 0`, reduces (Schur complement
//! on the scalar entry, `s = |q|/|p|`) to
//!
//! `B + s·K_θ + s²·(U − R_θ*R_θ) ⪰ 0` for all `s ≥ 0` and phases `θ`,
//!
//! with `K_θ = e^{iθ}T + e^{−iθ}T*` and `R_θ = e^{iθ}Y + e^{−iθ}Z`. The
//! sampler first fixes `U, Y, Z` so that `U ⪰ R_θ*R_θ` for every `θ`, then
//! draws `T` and halves it until the Bloch scan confirms positivity.

use std::f64::consts::PI;

use rand::Rng;

use crate::choi::{assemble, map_from_choi, BlockDecomposition, MapImages};
use crate::linalg::{abs_row, eig_hermitian, inner, min_eig, vec_norm, ComplexMatrix, C64};
use crate::positivity::{check_prop21, check_yz_bound, scan_margin};
use crate::random::{complex_normal, gaussian_matrix, stream_rng, unitary, SeededRng};
use crate::{Error, Margin, Result, ToleranceConfig};

/// Fresh `(U, Y, Z)` draws before giving up.
const MAX_ATTEMPTS: u64 = 100;
/// Halvings of `T` per draw.
const MAX_SHRINKS: usize = 100;
/// Bloch lattice used to accept a sample.
const SAMPLER_GRID: usize = 2000;
/// The sampler insists on a scan margin this close to zero, far tighter than
/// `pos_tol`, so that downstream refutation searches never meet a sample
/// that is negative below the verdict tolerance.
const SAMPLER_SCAN_TOL: f64 = 1e-12;
/// Eigenvalue range of `U`.
const MU_RANGE: (f64, f64) = (0.05, 0.95);
/// Range of `‖Y‖ / (‖Y‖ + ‖Z‖)` on the aligned branch.
const SPLIT_RANGE: (f64, f64) = (0.1, 0.9);

/// Unital positive map in `F_{e₂,f₁}` with `λ_min(U^{1/2} − |Y| − |Z|) = slack · λ_min(U^{1/2})`.
///
/// `slack = 1` gives `Y = Z = 0`; `slack = 0` gives the boundary stratum
/// `|Y| + |Z| = U^{1/2}`, realised with `U` of rank one. Fails with
/// [`Error::SamplerExhausted`] if no draw passes the positivity checks.
pub fn random_face_map(seed: u64, n: usize, slack: f64, tol: &ToleranceConfig) -> Result<MapImages> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    if !(0.0..=1.0).contains(&slack) {
        return Err(Error::InvalidArgument(format!("slack {slack} outside [0, 1]")));
    }
    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = stream_rng(seed, attempt);
        if let Some(d) = draw(&mut rng, n, slack, tol) {
            return map_from_choi(&assemble(&d)?);
        }
    }
    Err(Error::SamplerExhausted(format!(
        "no positive sample for seed {seed}, n = {n}, slack = {slack}"
    )))
}

/// `random_face_map(n = 2, slack = 0)` conditioned on `‖Y‖, ‖Z‖, λ_max(U) > 0.01`.
pub fn random_boundary_map(seed: u64, tol: &ToleranceConfig) -> Result<MapImages> {
    for j in 0..MAX_ATTEMPTS {
        let derived = seed.wrapping_add(j.wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let m = random_face_map(derived, 2, 0.0, tol)?;
        let d = crate::choi::blocks(&crate::choi::choi_from_map(&m), tol)?;
        let umax = eig_hermitian(&d.u, f64::INFINITY)?.max();
        if d.y.frobenius_norm() > 0.01 && d.z.frobenius_norm() > 0.01 && umax > 0.01 {
            return Ok(m);
        }
    }
    Err(Error::SamplerExhausted(format!("no boundary sample for seed {seed}")))
}

fn diag_conj(q: &ComplexMatrix, mu: &[f64]) -> ComplexMatrix {
    let d = ComplexMatrix::from_real_diag(mu);
    (&(q * &d) * &q.adjoint()).hermitian_part()
}

fn draw(rng: &mut SeededRng, n: usize, slack: f64, tol: &ToleranceConfig) -> Option<BlockDecomposition> {
    let q = unitary(rng, n);
    let mut mu: Vec<f64> = (0..n).map(|_| rng.random_range(MU_RANGE.0..MU_RANGE.1)).collect();
    if slack == 0.0 {
        mu[1..].iter_mut().for_each(|m| *m = 0.0);
    }
    let u = diag_conj(&q, &mu);
    let root_min = mu.iter().cloned().fold(f64::INFINITY, f64::min).sqrt();

    let mut d = BlockDecomposition::zeros(n);
    d.a = 1.0;
    d.u = u.clone();
    d.b = &ComplexMatrix::identity(n) - &u;

    let mut aligned_phase = None;
    if slack < 1.0 {
        let generic = (slack > 0.0).then(|| generic_rows(rng, &q, &mu, slack * root_min)).flatten();
        match generic {
            Some((y, z)) => {
                d.y = y;
                d.z = z;
            }
            None => {
                let (y, z, theta0) = aligned_rows(rng, &q, mu[0].sqrt() - slack * root_min);
                d.y = y;
                d.z = z;
                aligned_phase = Some(theta0);
            }
        }
    }

    let t0 = match aligned_phase.filter(|_| slack == 0.0) {
        Some(theta0) => boundary_t(rng, &q, theta0),
        None => gaussian_matrix(rng, n, n).scale(0.5),
    };

    let mut t = t0;
    for _ in 0..MAX_SHRINKS {
        d.t = t.clone();
        let h = assemble(&d).ok()?;
        if scan_margin(&h, n + 1, SAMPLER_GRID) >= -SAMPLER_SCAN_TOL {
            return accept(d, tol);
        }
        t = t.scale(0.5);
    }
    None
}

/// Final gate: every necessary condition must hold.
fn accept(d: BlockDecomposition, tol: &ToleranceConfig) -> Option<BlockDecomposition> {
    let prop = check_prop21(&d, SAMPLER_GRID, tol);
    let yz = check_yz_bound(&d, tol).ok()?;
    (prop.iter().all(Margin::passed) && yz.passed()).then_some(d)
}

/// `λ_min(U^{1/2} − s(|Y₀| + |Z₀|))`.
fn yz_margin(root_u: &ComplexMatrix, abs_sum: &ComplexMatrix, s: f64) -> f64 {
    min_eig(&(root_u - &abs_sum.scale(s)), f64::INFINITY).unwrap_or(f64::NEG_INFINITY)
}

/// Generic directions for `Y, Z`, scaled by bisection to hit `target`.
///
/// Accepted only if `U ⪰ R_θ*R_θ` for every `θ`, i.e.
/// `‖Y′‖² + ‖Z′‖² + 2|⟨Y′, Z′⟩| ≤ 1` with `Y′ = Y U^{−1/2}`; otherwise the
/// caller falls back to the aligned construction.
fn generic_rows(rng: &mut SeededRng, q: &ComplexMatrix, mu: &[f64], target: f64) -> Option<(ComplexMatrix, ComplexMatrix)> {
    let n = mu.len();
    let y0 = gaussian_matrix(rng, 1, n);
    let z0 = gaussian_matrix(rng, 1, n);
    let root_u = diag_conj(q, &mu.iter().map(|m| m.sqrt()).collect::<Vec<_>>());
    let inv_root = diag_conj(q, &mu.iter().map(|m| 1.0 / m.sqrt()).collect::<Vec<_>>());
    let abs_sum = &abs_row(&y0).ok()? + &abs_row(&z0).ok()?;

    let mut hi = 1.0;
    while yz_margin(&root_u, &abs_sum, hi) > target {
        hi *= 2.0;
        if hi > 1e6 {
            return None;
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if yz_margin(&root_u, &abs_sum, mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-16 * hi {
            break;
        }
    }
    let s = lo;
    let y = y0.scale(s);
    let z = z0.scale(s);
    let yp = (&y * &inv_root).row_slice(0).to_vec();
    let zp = (&z * &inv_root).row_slice(0).to_vec();
    let worst = vec_norm(&yp).powi(2) + vec_norm(&zp).powi(2) + 2.0 * inner(&yp, &zp).norm();
    (worst < 1.0 - 1e-9).then_some((y, z))
}

/// `Y = y e^{iα} ξ*`, `Z = z e^{iβ} ξ*` along the first eigenvector `ξ` of `U`,
/// with `y + z = total`. Returns the phase `θ₀ = (β − α)/2` at which
/// `R_θ*R_θ` is largest.
fn aligned_rows(rng: &mut SeededRng, q: &ComplexMatrix, total: f64) -> (ComplexMatrix, ComplexMatrix, f64) {
    let xi = q.col_vec(0);
    let r = rng.random_range(SPLIT_RANGE.0..SPLIT_RANGE.1);
    let alpha = rng.random_range(0.0..2.0 * PI);
    let beta = rng.random_range(0.0..2.0 * PI);
    let row = |mag: f64, phase: f64| {
        let w = C64::from_polar(mag, phase);
        ComplexMatrix::from_fn(1, xi.len(), |_, j| w * xi[j].conj())
    };
    (row(r * total, alpha), row((1.0 - r) * total, beta), (beta - alpha) / 2.0)
}

/// `T = i e^{−iθ₀} S` with `S = σ P_ξ + ξv* + vξ*`, `v ⊥ ξ`.
///
/// On the boundary stratum `U − R_θ₀*R_θ₀` vanishes, which forces
/// `K_θ₀ = 0` and `T` to vanish on `ξ^⊥ × ξ^⊥`; this shape satisfies both.
fn boundary_t(rng: &mut SeededRng, q: &ComplexMatrix, theta0: f64) -> ComplexMatrix {
    let n = q.rows();
    let xi = q.col_vec(0);
    let sigma: f64 = rng.random_range(-1.0..1.0);
    let mut v = vec![C64::new(0.0, 0.0); n];
    for col in 1..n {
        let c = complex_normal(rng) * 0.5;
        for (vi, qi) in v.iter_mut().zip(q.col_vec(col)) {
            *vi += c * qi;
        }
    }
    let s = ComplexMatrix::from_fn(n, n, |i, j| {
        C64::new(sigma, 0.0) * xi[i] * xi[j].conj() + xi[i] * v[j].conj() + v[i] * xi[j].conj()
    });
    s.scale_c(C64::new(0.0, 1.0) * C64::from_polar(1.0, -theta0))
}
