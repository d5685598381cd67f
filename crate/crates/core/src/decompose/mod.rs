//! Splitting a Choi matrix into a CP part and a co-CP part.
//!
//! [`dykstra_decompose`] looks for `H₁` in the intersection of
//! `C₁ = {X ⪰ 0}` and `C₂ = {X : (H − X)^Γ ⪰ 0}` by Dykstra's alternating
//! projections; `H₂ = H − H₁` is then co-CP. Both projections are exact
//! eigenvalue clippings because partial transposition is a Frobenius
//! isometry.
//!
//! Before iterating, the solver restricts both cones to the face cut out by
//! product vectors `e_o ⊗ b` with `b` in the kernel of a diagonal block
//! `H_oo`. Any splitting must vanish there (the expectation of `H` on a
//! product vector is the sum of two non-negative terms), so nothing is lost,
//! and removing these directions turns the intersection from a set with
//! empty interior into one Dykstra converges on quickly. Feasibility is
//! always judged against the original cones.
//!
//! On thin intersections Dykstra still converges only linearly with a rate
//! close to 1. After a share of the budget the solver therefore drops the
//! correction terms and continues with alternating projections under
//! safeguarded Anderson extrapolation; see [`DykstraConfig::dykstra_share`].

mod anderson;
mod probe;
mod sampler;
mod verify;

pub use probe::{uniqueness_probe, Interpretation, UniquenessReport};
pub use sampler::{random_boundary_map, random_face_map};
pub use verify::{verify_decomposition, FACE_CLOSURE_TOL};

use crate::choi::half_side;
use anderson::{diff, norm, Anderson};
use crate::linalg::{eig_hermitian, partial_transpose_unchecked, psd_project, ComplexMatrix, C64, ZERO};
use crate::{Error, Result};

/// Metric projection onto `{X : (H − X)^Γ ⪰ 0}`:
/// `H − Γ(psd_project(Γ(H − X)))`.
pub fn project_onto_shifted_ppt(x: &ComplexMatrix, h: &ComplexMatrix) -> Result<ComplexMatrix> {
    if x.shape() != h.shape() {
        return Err(Error::DimensionMismatch(format!(
            "X is {}x{}, H is {}x{}",
            x.rows(),
            x.cols(),
            h.rows(),
            h.cols()
        )));
    }
    let k = half_side(h)?;
    let diff = partial_transpose_unchecked(&(h - x), k);
    let clipped = psd_project(&diff, 1e-12)?;
    Ok(h - &partial_transpose_unchecked(&clipped, k))
}

#[derive(Debug, Clone)]
pub struct DykstraConfig {
    pub max_iter: usize,
    pub feas_tol: f64,
    /// Defaults to `H/2`.
    pub start: Option<ComplexMatrix>,
    /// Feasibility is tested every `check_every` iterations.
    pub check_every: usize,
    /// Eigenvalues of the diagonal blocks at most `null_tol · max(1, ‖H‖_F)`
    /// count as kernel for the facial reduction.
    pub null_tol: f64,
    pub facial_reduction: bool,
    /// Keep the distance between consecutive `C₁` iterates.
    pub record_steps: bool,
    /// Fraction of `max_iter` run as Dykstra with correction terms. The rest
    /// of the budget runs plain alternating projections from the current
    /// point with Anderson extrapolation, which handles thin intersections
    /// far better. `1.0` gives pure Dykstra.
    pub dykstra_share: f64,
    /// Anderson memory for the second phase; 0 disables extrapolation.
    /// Extrapolated points are kept only if they shrink the sweep residual.
    pub anderson: usize,
}

impl Default for DykstraConfig {
    fn default() -> Self {
        Self {
            max_iter: 50_000,
            feas_tol: 1e-8,
            start: None,
            check_every: 10,
            null_tol: 1e-10,
            facial_reduction: true,
            record_steps: false,
            dykstra_share: 0.2,
            anderson: 5,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DecompositionResult {
    /// CP part.
    pub h1: ComplexMatrix,
    /// Co-CP part, `H − H₁`.
    pub h2: ComplexMatrix,
    /// Frobenius distance between the last iterates in the two reduced cones;
    /// bounds `max(dist(H₁, C₁), dist(H₁, C₂))`.
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
    /// `λ_min(H₁)`.
    pub cp_margin: f64,
    /// `λ_min(H₂^Γ)`.
    pub ppt_margin: f64,
    /// Residual stayed above `10·feas_tol` without progress over the last
    /// tenth of the run. Evidence only, never a certificate.
    pub likely_non_decomposable: bool,
    /// Dimension removed by the facial reduction.
    pub reduced_directions: usize,
    pub step_norms: Vec<f64>,
}

/// Convergence also needs `‖x − P₁(x)‖_F ≤ GAP_FACTOR · feas_tol` between the
/// last `C₂` iterate and its `C₁` projection.
pub const GAP_FACTOR: f64 = 10.0;

/// Dykstra's method from `start` (default `H/2`) with default settings otherwise.
pub fn dykstra_decompose(
    h: &ComplexMatrix,
    max_iter: usize,
    feas_tol: f64,
    start: Option<&ComplexMatrix>,
) -> Result<DecompositionResult> {
    let cfg = DykstraConfig {
        max_iter,
        feas_tol,
        start: start.cloned(),
        ..DykstraConfig::default()
    };
    dykstra_with(h, &cfg)
}

/// Orthonormal basis (as columns) of the complement of the forced kernel.
fn face_basis(h: &ComplexMatrix, k: usize, threshold: f64) -> Option<ComplexMatrix> {
    let mut cols: Vec<Vec<C64>> = Vec::new();
    let mut removed = 0;
    for o in 0..2 {
        let block = h.submatrix(o * k, o * k, k, k);
        let e = eig_hermitian(&block, f64::INFINITY).ok()?;
        for (idx, &l) in e.eigenvalues.iter().enumerate() {
            if l.abs() <= threshold {
                removed += 1;
                continue;
            }
            let mut v = vec![ZERO; 2 * k];
            for i in 0..k {
                v[o * k + i] = e.eigenvectors[(i, idx)];
            }
            cols.push(v);
        }
    }
    (removed > 0).then(|| ComplexMatrix::from_fn(2 * k, cols.len(), |i, j| cols[j][i]))
}

/// Projection onto the PSD matrices supported on the columns of `q`.
struct FaceProjector {
    q: Option<ComplexMatrix>,
}

impl FaceProjector {
    fn project(&self, a: &ComplexMatrix) -> ComplexMatrix {
        match &self.q {
            None => clip(&a.hermitian_part()),
            Some(q) => {
                if q.cols() == 0 {
                    return ComplexMatrix::zeros(a.rows(), a.cols());
                }
                let inner = clip(&a.congruence(q).hermitian_part());
                (&(q * &inner) * &q.adjoint()).hermitian_part()
            }
        }
    }
}

fn clip(a: &ComplexMatrix) -> ComplexMatrix {
    let e = eig_hermitian(a, f64::INFINITY).expect("Hermitian by construction");
    if e.min() >= 0.0 {
        return a.clone();
    }
    e.recompose(|l| l.max(0.0))
}

/// `λ_min` and the Frobenius norm of the negative part.
fn negativity(a: &ComplexMatrix) -> (f64, f64) {
    let e = eig_hermitian(&a.hermitian_part(), f64::INFINITY).expect("Hermitian by construction");
    let neg = e.eigenvalues.iter().map(|l| l.min(0.0).powi(2)).sum::<f64>().sqrt();
    (e.min(), neg)
}

/// Dykstra's alternating projections with full configuration.
pub fn dykstra_with(h: &ComplexMatrix, cfg: &DykstraConfig) -> Result<DecompositionResult> {
    let k = half_side(h)?;
    h.check_hermitian(1e-12)?;
    let h = h.hermitian_part();
    let x0 = match &cfg.start {
        Some(s) => {
            if s.shape() != h.shape() {
                return Err(Error::DimensionMismatch("start has the wrong shape".into()));
            }
            s.hermitian_part()
        }
        None => h.scale(0.5),
    };

    let assess = |x: &ComplexMatrix| {
        let (m1, n1) = negativity(x);
        let (m2, n2) = negativity(&partial_transpose_unchecked(&(&h - x), k));
        (m1, m2, n1.max(n2))
    };
    let feasible = |m1: f64, m2: f64| m1 >= -cfg.feas_tol && m2 >= -cfg.feas_tol;

    let (m1, m2, res) = assess(&x0);
    if feasible(m1, m2) {
        return Ok(finish(&h, x0, res, 0, true, (m1, m2), false, 0, Vec::new()));
    }

    let threshold = cfg.null_tol * h.frobenius_norm().max(1.0);
    let q = if cfg.facial_reduction { face_basis(&h, k, threshold) } else { None };
    let reduced = q.as_ref().map_or(0, |q| 2 * k - q.cols());
    let p1 = FaceProjector { q: q.clone() };
    // The PPT face is cut out by the same product vectors.
    let p2 = FaceProjector { q };
    let project2 = |z: &ComplexMatrix| &h - &partial_transpose_unchecked(&p2.project(&partial_transpose_unchecked(&(&h - z), k)), k);

    let side = 2 * k;
    // One Dykstra sweep; returns the new state and the C₁ iterate. Without
    // corrections this is plain alternating projection.
    let sweep = |z: &[f64], corrections: bool| -> (Vec<f64>, ComplexMatrix) {
        let [x, p, q] = unflatten(z, side);
        let xp = &x + &p;
        let y = p1.project(&xp);
        let yq = &y + &q;
        let x = project2(&yq);
        if corrections {
            let p = &xp - &y;
            let q = &yq - &x;
            (flatten(&[&x, &p, &q]), y)
        } else {
            let zeros = ComplexMatrix::zeros(side, side);
            (flatten(&[&x, &zeros, &zeros]), y)
        }
    };
    let gap_tol = GAP_FACTOR * cfg.feas_tol;
    let check_every = cfg.check_every.max(1);
    let switch_at = (cfg.dykstra_share.clamp(0.0, 1.0) * cfg.max_iter as f64).ceil() as usize;
    let mut corrections = switch_at > 0;
    let mut aa = Anderson::new(cfg.anderson);
    let mut steps = Vec::new();
    let mut history: Vec<(usize, f64)> = Vec::new();

    let zeros = ComplexMatrix::zeros(side, side);
    let mut z = flatten(&[&x0, &zeros, &zeros]);
    let (mut tz, mut last_y) = sweep(&z, corrections);
    let mut g = diff(&tz, &z);
    let mut evals = 1;
    let mut next_check = check_every;
    loop {
        if evals >= next_check || evals >= cfg.max_iter {
            next_check = evals + check_every;
            // x lies in the reduced C₂; its projection c onto the reduced C₁
            // is PSD with the forced zeros. A small gap keeps the blocks that
            // only one of the two parts may carry close to zero.
            let x = unflatten(&tz, side)[0].clone();
            let c = p1.project(&x);
            let gap = x.distance(&c);
            let (m1, m2, _) = assess(&c);
            if feasible(m1, m2) && gap <= gap_tol {
                return Ok(finish(&h, c, gap, evals, true, (m1, m2), false, reduced, steps));
            }
            history.push((evals, gap));
        }
        if evals >= cfg.max_iter {
            break;
        }

        if corrections && evals >= switch_at {
            corrections = false;
            let x = unflatten(&tz, side)[0].clone();
            z = flatten(&[&x, &zeros, &zeros]);
            let (t, y) = sweep(&z, false);
            evals += 1;
            g = diff(&t, &z);
            tz = t;
            last_y = record(&mut steps, cfg.record_steps, last_y, y);
            continue;
        }

        let mut accepted = None;
        if !corrections {
            aa.push(&z, &g);
            if let Some(cand) = aa.extrapolate(&z, &g) {
                let (tc, y) = sweep(&cand, false);
                evals += 1;
                let gc = diff(&tc, &cand);
                if norm(&gc) <= norm(&g) {
                    accepted = Some((cand, tc, gc, y));
                }
            }
        }
        let (z1, tz1, g1, y) = match accepted {
            Some(s) => s,
            None if evals < cfg.max_iter => {
                let (t2, y) = sweep(&tz, corrections);
                evals += 1;
                let g2 = diff(&t2, &tz);
                (tz, t2, g2, y)
            }
            None => continue,
        };
        last_y = record(&mut steps, cfg.record_steps, last_y, y);
        z = z1;
        tz = tz1;
        g = g1;
    }

    let x = unflatten(&tz, side)[0].clone();
    let c = p1.project(&x);
    let gap = x.distance(&c);
    let (m1, m2, _) = assess(&c);
    let stalled = stalled(&history, cfg.max_iter);
    let likely = gap > 10.0 * cfg.feas_tol && stalled;
    Ok(finish(&h, c, gap, cfg.max_iter, false, (m1, m2), likely, reduced, steps))
}

fn record(steps: &mut Vec<f64>, on: bool, last: ComplexMatrix, y: ComplexMatrix) -> ComplexMatrix {
    if on {
        steps.push(y.distance(&last));
    }
    y
}

fn flatten(ms: &[&ComplexMatrix]) -> Vec<f64> {
    ms.iter().flat_map(|m| m.as_slice().iter().flat_map(|c| [c.re, c.im])).collect()
}

fn unflatten(z: &[f64], side: usize) -> [ComplexMatrix; 3] {
    let n = side * side;
    std::array::from_fn(|i| {
        let part = &z[2 * n * i..2 * n * (i + 1)];
        ComplexMatrix::from_fn(side, side, |r, c| {
            let at = 2 * (r * side + c);
            C64::new(part[at], part[at + 1])
        })
    })
}

/// Residual over the final 10% of the run decreased by less than 1%.
fn stalled(history: &[(usize, f64)], max_iter: usize) -> bool {
    let Some(&(_, final_res)) = history.last() else {
        return false;
    };
    let cutoff = max_iter - max_iter / 10;
    let Some(&(_, earlier)) = history.iter().rev().find(|(it, _)| *it <= cutoff) else {
        return false;
    };
    earlier - final_res <= 0.01 * earlier
}

#[allow(clippy::too_many_arguments)]
fn finish(
    h: &ComplexMatrix,
    h1: ComplexMatrix,
    residual: f64,
    iterations: usize,
    converged: bool,
    margins: (f64, f64),
    likely_non_decomposable: bool,
    reduced_directions: usize,
    step_norms: Vec<f64>,
) -> DecompositionResult {
    let h2 = h - &h1;
    DecompositionResult {
        h1,
        h2,
        residual,
        iterations,
        converged,
        cp_margin: margins.0,
        ppt_margin: margins.1,
        likely_non_decomposable,
        reduced_directions,
        step_norms,
    }
}
