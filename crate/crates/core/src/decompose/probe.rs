use rand::Rng;

use crate::choi::blocks;
use crate::positivity::check_yz_bound;
use crate::random::{hermitian, stream_rng};
use crate::{ComplexMatrix, Result, ToleranceConfig};

use super::{dykstra_decompose, DecompositionResult};

/// Size of the random perturbation of a start, relative to `‖H‖_F`.
const START_SPREAD: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Interpretation {
    /// Diameter at most `10·feas_tol`.
    ConsistentWithUniqueness,
    /// Diameter above `100·feas_tol`: two distinct splittings were found.
    NonUniqueCertified,
    /// In between.
    Inconclusive,
    /// Fewer than two starts converged.
    InsufficientSamples,
}

#[derive(Debug, Clone)]
pub struct UniquenessReport {
    /// Converged `H₁`, in start order.
    pub samples: Vec<ComplexMatrix>,
    /// Start index of each sample.
    pub sample_starts: Vec<usize>,
    pub diameter_estimate: f64,
    /// `λ_min(U^{1/2} − |Y| − |Z|)` of the input with `a` set to 1; `None`
    /// when the input is not in face form.
    pub boundary_margin: Option<f64>,
    pub per_start_iterations: Vec<usize>,
    pub per_start_converged: Vec<bool>,
    pub interpretation: Interpretation,
    /// Indices into `samples` of the pair realising the diameter.
    pub evidence: Option<(usize, usize)>,
}

impl UniquenessReport {
    pub fn converged_starts(&self) -> usize {
        self.samples.len()
    }
}

/// Starting points: `H/2`, `H`, `0`, then `tH + ε G` with `t` uniform in
/// `[0, 1]` and `G` a random Hermitian matrix of norm `0.1·‖H‖_F`.
fn starts(h: &ComplexMatrix, n_starts: usize, seed: u64) -> Vec<ComplexMatrix> {
    let side = h.rows();
    let mut out = vec![h.scale(0.5), h.clone(), ComplexMatrix::zeros(side, side)];
    out.truncate(n_starts);
    let norm = h.frobenius_norm();
    for i in out.len()..n_starts {
        let mut rng = stream_rng(seed, i as u64);
        let t: f64 = rng.random_range(0.0..1.0);
        let g = hermitian(&mut rng, side);
        let g = g.scale(START_SPREAD * norm / g.frobenius_norm().max(f64::MIN_POSITIVE));
        out.push(&h.scale(t) + &g);
    }
    out
}

/// Runs the solver from several starts and measures how far apart the
/// resulting CP parts are.
///
/// Non-convergent starts are excluded from the diameter and flagged in
/// `per_start_converged`. The report never claims uniqueness; a small
/// diameter is only consistent with it.
pub fn uniqueness_probe(
    h: &ComplexMatrix,
    n_starts: usize,
    seed: u64,
    max_iter: usize,
    feas_tol: f64,
    tol: &ToleranceConfig,
) -> Result<UniquenessReport> {
    let mut runs: Vec<DecompositionResult> = Vec::with_capacity(n_starts);
    for s in starts(h, n_starts, seed) {
        runs.push(dykstra_decompose(h, max_iter, feas_tol, Some(&s))?);
    }

    let mut samples = Vec::new();
    let mut sample_starts = Vec::new();
    for (i, r) in runs.iter().enumerate() {
        if r.converged {
            samples.push(r.h1.clone());
            sample_starts.push(i);
        }
    }

    let mut diameter = 0.0;
    let mut evidence = None;
    for i in 0..samples.len() {
        for j in (i + 1)..samples.len() {
            let d = samples[i].distance(&samples[j]);
            if d > diameter {
                diameter = d;
                evidence = Some((i, j));
            }
        }
    }

    let interpretation = if samples.len() < 2 {
        Interpretation::InsufficientSamples
    } else if diameter <= 10.0 * feas_tol {
        Interpretation::ConsistentWithUniqueness
    } else if diameter > 100.0 * feas_tol {
        Interpretation::NonUniqueCertified
    } else {
        Interpretation::Inconclusive
    };

    let boundary_margin = blocks(h, tol).ok().and_then(|mut d| {
        d.a = 1.0;
        check_yz_bound(&d, tol).ok().and_then(|m| m.value)
    });

    Ok(UniquenessReport {
        samples,
        sample_starts,
        diameter_estimate: diameter,
        boundary_margin,
        per_start_iterations: runs.iter().map(|r| r.iterations).collect(),
        per_start_converged: runs.iter().map(|r| r.converged).collect(),
        interpretation,
        evidence: if interpretation == Interpretation::NonUniqueCertified { evidence } else { None },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn start_list() {
        let h = ComplexMatrix::identity(4);
        let s = starts(&h, 5, 1);
        assert_eq!(s.len(), 5);
        assert_eq!(s[0], h.scale(0.5));
        assert_eq!(s[1], h);
        assert_eq!(s[2], ComplexMatrix::zeros(4, 4));
        assert_eq!(starts(&h, 2, 1).len(), 2);
        assert_eq!(starts(&h, 5, 1)[4], starts(&h, 5, 1)[4]);
    }

    #[test]
    fn psd_and_ppt_interior_is_not_unique() {
        // The identity is both PSD and PPT; every tH is a valid CP part.
        let h = ComplexMatrix::identity(6);
        let r = uniqueness_probe(&h, 3, 0, 1000, 1e-8, &ToleranceConfig::default()).unwrap();
        assert_eq!(r.interpretation, Interpretation::NonUniqueCertified);
        assert!((r.diameter_estimate - 6f64.sqrt()).abs() < 1e-12);
    }
}
