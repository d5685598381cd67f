//! Positive functionals as positivity certificates.
//!
//! A positive functional `ω(X) = Σ G_kl X_kl` on `M_{n+1}` with
//! `G = [[α, Γ], [Γ*, Λ]] ⪰ 0` turns `φ` into the 2×2 map `ω∘φ`, and `φ`
//! is positive exactly when every such `ω∘φ` is. For a face-form map this
//! reduces to one scalar inequality per witness, evaluated by
//! [`nier1_holds`]. A negative value refutes positivity of `φ`.

use crate::choi::{assemble, BlockDecomposition};
use crate::linalg::{inner, min_eig, ComplexMatrix, C64};
use crate::random::{gaussian_matrix, stream_rng};
use crate::{Error, Result, ToleranceConfig};

/// Relative slack on the witness invariants `α ≥ 0`, `Λ ⪰ 0`, `Γ*Γ ⪯ αΛ`.
const INVARIANT_TOL: f64 = 1e-9;
/// Descent steps per restart.
const DESCENT_STEPS: usize = 60;
/// Backtracking halvings before a restart gives up.
const MAX_HALVINGS: usize = 40;

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalWitness {
    pub alpha: f64,
    /// 1×n
    pub gamma: ComplexMatrix,
    /// n×n
    pub lambda: ComplexMatrix,
}

impl FunctionalWitness {
    /// Validates `α ≥ 0`, `Λ ⪰ 0` and `Γ*Γ ⪯ αΛ` up to a relative tolerance.
    pub fn new(alpha: f64, gamma: ComplexMatrix, lambda: ComplexMatrix) -> Result<Self> {
        let w = Self { alpha, gamma, lambda };
        w.validate()?;
        Ok(w)
    }

    /// Reads `(α, Γ, Λ)` off a PSD matrix `G = [[α, Γ], [Γ*, Λ]]`.
    pub fn from_gram(g: &ComplexMatrix) -> Result<Self> {
        let k = crate::linalg::require_square(g)?;
        if k < 2 {
            return Err(Error::InvalidWitness("functional matrix must be at least 2x2".into()));
        }
        let n = k - 1;
        Self::new(
            g[(0, 0)].re,
            g.submatrix(0, 1, 1, n),
            g.submatrix(1, 1, n, n).hermitian_part(),
        )
    }

    pub fn n(&self) -> usize {
        self.lambda.rows()
    }

    fn validate(&self) -> Result<()> {
        let n = self.lambda.rows();
        if n == 0 || self.lambda.cols() != n || self.gamma.shape() != (1, n) {
            return Err(Error::InvalidWitness("inconsistent witness dimensions".into()));
        }
        let scale = self.alpha.abs().max(self.lambda.frobenius_norm()).max(self.gamma.frobenius_norm());
        let slack = INVARIANT_TOL * scale.max(f64::MIN_POSITIVE);
        if self.alpha < -slack {
            return Err(Error::InvalidWitness(format!("alpha = {} is negative", self.alpha)));
        }
        self.lambda
            .check_hermitian(INVARIANT_TOL)
            .map_err(|e| Error::InvalidWitness(e.to_string()))?;
        let l = min_eig(&self.lambda, f64::INFINITY)?;
        if l < -slack {
            return Err(Error::InvalidWitness(format!("Lambda has eigenvalue {l}")));
        }
        let schur = &self.lambda.scale(self.alpha) - &(&self.gamma.adjoint() * &self.gamma);
        let s = min_eig(&schur.hermitian_part(), f64::INFINITY)?;
        if s < -slack * scale {
            return Err(Error::InvalidWitness(format!(
                "Gamma*Gamma exceeds alpha*Lambda by {}",
                -s
            )));
        }
        Ok(())
    }
}

/// `Σ_ij Λ_ij M_ij = Tr(Λᵗ M)`.
fn pair(lambda: &ComplexMatrix, m: &ComplexMatrix) -> C64 {
    (&lambda.transpose() * m).trace()
}

/// Signed margin of the witness inequality:
///
/// `[αa + Tr(ΛᵗB) + 2Re⟨C*, Γᵗ⟩]·Tr(ΛᵗU) − |⟨Y*, Γᵗ⟩ + conj⟨Z*, Γᵗ⟩ + Tr(ΛᵗT)|²`.
///
/// `x` does not enter; the inequality is stated for maps with `x = 0`.
pub fn nier1_holds(d: &BlockDecomposition, w: &FunctionalWitness) -> Result<f64> {
    w.validate()?;
    if w.n() != d.n() {
        return Err(Error::DimensionMismatch(format!(
            "witness for n = {} applied to blocks with n = {}",
            w.n(),
            d.n()
        )));
    }
    let gt = w.gamma.transpose().col_vec(0);
    let c_star = d.c.adjoint().col_vec(0);
    let y_star = d.y.adjoint().col_vec(0);
    let z_star = d.z.adjoint().col_vec(0);

    let left = w.alpha * d.a + pair(&w.lambda, &d.b).re + 2.0 * inner(&c_star, &gt).re;
    let right = pair(&w.lambda, &d.u).re;
    let cross = inner(&y_star, &gt) + inner(&z_star, &gt).conj() + pair(&w.lambda, &d.t);
    Ok(left * right - cross.norm_sqr())
}

/// The four `k × k` blocks `H_ij` of a Choi matrix.
struct Blocks {
    h: [ComplexMatrix; 4],
}

impl Blocks {
    fn new(h: &ComplexMatrix) -> Self {
        let k = h.rows() / 2;
        Self {
            h: [
                h.submatrix(0, 0, k, k),
                h.submatrix(0, k, k, k),
                h.submatrix(k, 0, k, k),
                h.submatrix(k, k, k, k),
            ],
        }
    }

    /// `ω(H_ij) = Tr(M* H_ij M)` for all four blocks, with the products `H_ij M`.
    fn evaluate(&self, m: &ComplexMatrix) -> ([C64; 4], [ComplexMatrix; 4]) {
        let mh = m.adjoint();
        let prods = [&self.h[0] * m, &self.h[1] * m, &self.h[2] * m, &self.h[3] * m];
        let vals = [
            (&mh * &prods[0]).trace(),
            (&mh * &prods[1]).trace(),
            (&mh * &prods[2]).trace(),
            (&mh * &prods[3]).trace(),
        ];
        (vals, prods)
    }
}

/// `ω(H₁₁)·ω(H₂₂) − |ω(H₁₂)|²` for `ω(X) = Tr(M* X M)`.
///
/// This evaluates the same inequality as [`nier1_holds`] from the whole Choi
/// matrix instead of the named blocks.
pub fn nier1_objective(d: &BlockDecomposition, m: &ComplexMatrix) -> Result<f64> {
    let h = assemble(d)?;
    if m.rows() != d.n() + 1 {
        return Err(Error::DimensionMismatch("factor has the wrong number of rows".into()));
    }
    let (v, _) = Blocks::new(&h).evaluate(m);
    Ok(v[0].re * v[3].re - v[1].norm_sqr())
}

/// `G_kl = Σ_r conj(M_kr) M_lr`, so that `Σ G_kl X_kl = Tr(M* X M)`.
fn gram(m: &ComplexMatrix) -> ComplexMatrix {
    (m * &m.adjoint()).transpose().hermitian_part()
}

/// Random-restart descent for a functional that refutes positivity.
///
/// The functional is parametrised as `ω(X) = Tr(M* X M)` with `‖M‖_F = 1`,
/// which keeps `G ⪰ 0` at every iterate. Each restart draws `M` from its own
/// seeded stream and runs projected gradient descent with backtracking on
/// `f(M) = ω(H₁₁)ω(H₂₂) − |ω(H₁₂)|²`. The first candidate whose margin,
/// recomputed by [`nier1_holds`], is below `-tol.witness_tol` is returned.
pub fn search_nier1_violation(
    d: &BlockDecomposition,
    budget: usize,
    seed: u64,
    tol: &ToleranceConfig,
) -> Option<FunctionalWitness> {
    let h = assemble(d).ok()?;
    let scale = h.frobenius_norm();
    if scale == 0.0 {
        return None;
    }
    let blocks = Blocks::new(&h);
    let k = d.n() + 1;
    let target = -tol.witness_tol;

    let objective = |m: &ComplexMatrix| {
        let (v, p) = blocks.evaluate(m);
        (v[0].re * v[3].re - v[1].norm_sqr(), v, p)
    };

    for restart in 0..budget {
        let mut rng = stream_rng(seed, restart as u64);
        let mut m = gaussian_matrix(&mut rng, k, k);
        m = m.scale(1.0 / m.frobenius_norm());
        let (mut f, mut v, mut p) = objective(&m);
        let mut step = 1.0 / (scale * scale);

        for _ in 0..DESCENT_STEPS {
            if f < 10.0 * target {
                break;
            }
            let (r, s, l, lb) = (v[0].re, v[3].re, v[1], v[2]);
            // ∂f/∂M̄
            let mut g = &(&p[0].scale(s) + &p[3].scale(r)) - &(&p[1].scale_c(lb) + &p[2].scale_c(l));
            // Tangent to the unit sphere.
            let radial: C64 = m.as_slice().iter().zip(g.as_slice()).map(|(a, b)| a.conj() * b).sum();
            g -= &m.scale(radial.re);
            let gnorm2 = g.frobenius_norm().powi(2);
            if gnorm2 <= (1e-14 * scale * scale).powi(2) {
                break;
            }

            step *= 2.0;
            let mut accepted = false;
            for _ in 0..MAX_HALVINGS {
                let trial = &m - &g.scale(step);
                let trial = trial.scale(1.0 / trial.frobenius_norm());
                let (ft, vt, pt) = objective(&trial);
                if ft <= f - 1e-4 * step * gnorm2 {
                    m = trial;
                    (f, v, p) = (ft, vt, pt);
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if !accepted {
                break;
            }
        }

        if f < target {
            if let Ok(w) = FunctionalWitness::from_gram(&gram(&m)) {
                if nier1_holds(d, &w).is_ok_and(|margin| margin < target) {
                    return Some(w);
                }
            }
        }
    }
    None
}
