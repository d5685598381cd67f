//! Choi matrices of maps `φ: M₂(ℂ) → M_{n+1}(ℂ)` and their block structure.
//!
//! The Choi matrix is `H = [[φ(E₁₁), φ(E₁₂)], [φ(E₂₁), φ(E₂₂)]]`, a Hermitian
//! matrix of side `2(n+1)` for Hermiticity-preserving maps. A map in the
//! maximal face `F_{e₂,f₁}` (those with `φ(E₂₂)f₁ = 0`) has the layout
//!
//! ```text
//!     ┌ a   C │ x   Y ┐
//! H = │ C*  B │ Z*  T │
//!     │ x̄   Z │ 0   0 │
//!     └ Y*  T*│ 0   U ┘
//! ```
//!
//! with `a`, `x` scalars, `C`, `Y`, `Z` rows of length `n` and `B`, `T`, `U`
//! of side `n`. [`blocks`] and [`assemble`] convert between the two forms.

use crate::bloch::{self, BlochPoint};
use crate::linalg::{complete_unitary, eig_hermitian, vec_norm, ComplexMatrix, C64, ONE, ZERO};
use crate::{Error, Result, ToleranceConfig};

/// The four images `φ(E₁₁), φ(E₁₂), φ(E₂₁), φ(E₂₂)` that determine a map.
#[derive(Debug, Clone, PartialEq)]
pub struct MapImages {
    images: [ComplexMatrix; 4],
}

impl MapImages {
    /// Images in the order `E₁₁, E₁₂, E₂₁, E₂₂`; all must be square of one size.
    pub fn new(images: [ComplexMatrix; 4]) -> Result<Self> {
        let n = images[0].rows();
        if n == 0 {
            return Err(Error::DimensionMismatch("empty image".into()));
        }
        for img in &images {
            if img.shape() != (n, n) {
                return Err(Error::DimensionMismatch(format!(
                    "images must all be {n}x{n}, found {}x{}",
                    img.rows(),
                    img.cols()
                )));
            }
        }
        Ok(Self { images })
    }

    /// Output dimension `n + 1`.
    pub fn n_out(&self) -> usize {
        self.images[0].rows()
    }

    /// `φ(E_ij)` for `i, j ∈ {0, 1}`.
    pub fn image(&self, i: usize, j: usize) -> &ComplexMatrix {
        &self.images[2 * i + j]
    }

    pub fn images(&self) -> &[ComplexMatrix; 4] {
        &self.images
    }

    /// `φ(E₂₁) = φ(E₁₂)*` and the diagonal images are Hermitian.
    pub fn is_hermiticity_preserving(&self, tol: f64) -> bool {
        let scale = self.images.iter().map(|m| m.frobenius_norm()).fold(1.0, f64::max);
        self.image(1, 0).distance(&self.image(0, 1).adjoint()) <= tol * scale
            && self.image(0, 0).hermitian_defect() <= tol * scale
            && self.image(1, 1).hermitian_defect() <= tol * scale
    }

    /// The zero map into `M_{n_out}`.
    pub fn zero(n_out: usize) -> Self {
        let z = ComplexMatrix::zeros(n_out, n_out);
        Self {
            images: [z.clone(), z.clone(), z.clone(), z],
        }
    }

    /// Map defined by a closure on 2×2 inputs, evaluated on matrix units.
    pub fn from_fn(n_out: usize, f: impl Fn(&ComplexMatrix) -> ComplexMatrix) -> Result<Self> {
        let unit = |i: usize, j: usize| {
            let mut e = ComplexMatrix::zeros(2, 2);
            e[(i, j)] = ONE;
            e
        };
        let imgs = [f(&unit(0, 0)), f(&unit(0, 1)), f(&unit(1, 0)), f(&unit(1, 1))];
        let m = Self::new(imgs)?;
        if m.n_out() != n_out {
            return Err(Error::DimensionMismatch(format!(
                "closure produced {}x{} images, expected {n_out}",
                m.n_out(),
                m.n_out()
            )));
        }
        Ok(m)
    }
}

/// `H = [φ(E_ij)]`.
pub fn choi_from_map(m: &MapImages) -> ComplexMatrix {
    let k = m.n_out();
    let mut h = ComplexMatrix::zeros(2 * k, 2 * k);
    for i in 0..2 {
        for j in 0..2 {
            h.set_block(i * k, j * k, m.image(i, j));
        }
    }
    h
}

/// Reads the four `k × k` blocks back out of a Choi matrix.
pub fn map_from_choi(h: &ComplexMatrix) -> Result<MapImages> {
    let k = half_side(h)?;
    MapImages::new([
        h.submatrix(0, 0, k, k),
        h.submatrix(0, k, k, k),
        h.submatrix(k, 0, k, k),
        h.submatrix(k, k, k, k),
    ])
}

pub(crate) fn half_side(h: &ComplexMatrix) -> Result<usize> {
    let side = crate::linalg::require_square(h)?;
    if side % 2 != 0 {
        return Err(Error::OddDimension(side));
    }
    if side == 0 {
        return Err(Error::DimensionMismatch("empty Choi matrix".into()));
    }
    Ok(side / 2)
}

/// `φ(A) = Σ A_ij φ(E_ij)`.
pub fn apply_map(m: &MapImages, a: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.shape() != (2, 2) {
        return Err(Error::DimensionMismatch(format!(
            "maps act on 2x2 matrices, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let k = m.n_out();
    let mut out = ComplexMatrix::zeros(k, k);
    for i in 0..2 {
        for j in 0..2 {
            out += &m.image(i, j).scale_c(a[(i, j)]);
        }
    }
    Ok(out)
}

/// `φ(P_ξ)` computed straight from the Choi matrix with block size `k`:
/// `Σ ξ_i conj(ξ_j) H_ij`.
pub fn image_of_projection(h: &ComplexMatrix, k: usize, xi: &[C64; 2]) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(k, k);
    for bi in 0..2 {
        for bj in 0..2 {
            let w = xi[bi] * xi[bj].conj();
            if w == ZERO {
                continue;
            }
            for r in 0..k {
                for c in 0..k {
                    out[(r, c)] += w * h[(bi * k + r, bj * k + c)];
                }
            }
        }
    }
    out
}

/// The named blocks of a Choi matrix in face form.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockDecomposition {
    pub a: f64,
    /// 1×n
    pub c: ComplexMatrix,
    pub x: C64,
    /// 1×n
    pub y: ComplexMatrix,
    /// n×n, Hermitian
    pub b: ComplexMatrix,
    /// 1×n
    pub z: ComplexMatrix,
    /// n×n
    pub t: ComplexMatrix,
    /// n×n, Hermitian
    pub u: ComplexMatrix,
}

impl BlockDecomposition {
    pub fn n(&self) -> usize {
        self.b.rows()
    }

    /// All-zero blocks of size `n`.
    pub fn zeros(n: usize) -> Self {
        Self {
            a: 0.0,
            c: ComplexMatrix::zeros(1, n),
            x: ZERO,
            y: ComplexMatrix::zeros(1, n),
            b: ComplexMatrix::zeros(n, n),
            z: ComplexMatrix::zeros(1, n),
            t: ComplexMatrix::zeros(n, n),
            u: ComplexMatrix::zeros(n, n),
        }
    }

    fn check_dims(&self) -> Result<()> {
        let n = self.n();
        let rows_ok = [&self.c, &self.y, &self.z].iter().all(|r| r.shape() == (1, n));
        let squares_ok = [&self.b, &self.t, &self.u].iter().all(|m| m.shape() == (n, n));
        if n == 0 || !rows_ok || !squares_ok {
            return Err(Error::DimensionMismatch(format!(
                "inconsistent block sizes for n = {n}"
            )));
        }
        Ok(())
    }
}

/// Extracts the blocks of a face-form Choi matrix.
///
/// Fails if `H` is not Hermitian or if the scalar zero of `φ(E₂₂)` or the
/// rest of its first row exceed `tol.structural_tol` in magnitude.
pub fn blocks(h: &ComplexMatrix, tol: &ToleranceConfig) -> Result<BlockDecomposition> {
    let k = half_side(h)?;
    h.check_hermitian(tol.hermitian_tol)?;
    if k < 2 {
        return Err(Error::DimensionMismatch("face form needs n >= 1".into()));
    }
    for j in k..2 * k {
        for (r, c) in [(k, j), (j, k)] {
            let magnitude = h[(r, c)].norm();
            if magnitude > tol.structural_tol {
                return Err(Error::NotInFaceForm {
                    row: r,
                    col: c,
                    magnitude,
                });
            }
        }
    }
    Ok(blocks_unchecked(h, k))
}

/// Block extraction by index ranges without any face-form check.
pub fn blocks_unchecked(h: &ComplexMatrix, k: usize) -> BlockDecomposition {
    let n = k - 1;
    BlockDecomposition {
        a: h[(0, 0)].re,
        c: h.submatrix(0, 1, 1, n),
        x: h[(0, k)],
        y: h.submatrix(0, k + 1, 1, n),
        b: h.submatrix(1, 1, n, n),
        z: h.submatrix(k, 1, 1, n),
        t: h.submatrix(1, k + 1, n, n),
        u: h.submatrix(k + 1, k + 1, n, n),
    }
}

/// Inverse of [`blocks`]: lays the blocks out as a `2(n+1)` Choi matrix.
pub fn assemble(d: &BlockDecomposition) -> Result<ComplexMatrix> {
    d.check_dims()?;
    let n = d.n();
    let k = n + 1;
    let mut h = ComplexMatrix::zeros(2 * k, 2 * k);
    h[(0, 0)] = C64::new(d.a, 0.0);
    h.set_block(0, 1, &d.c);
    h.set_block(1, 0, &d.c.adjoint());
    h.set_block(1, 1, &d.b);
    h[(0, k)] = d.x;
    h[(k, 0)] = d.x.conj();
    h.set_block(0, k + 1, &d.y);
    h.set_block(k + 1, 0, &d.y.adjoint());
    h.set_block(k, 1, &d.z);
    h.set_block(1, k, &d.z.adjoint());
    h.set_block(1, k + 1, &d.t);
    h.set_block(k + 1, 1, &d.t.adjoint());
    h.set_block(k + 1, k + 1, &d.u);
    Ok(h)
}

/// A pair `(ξ, η)` naming the maximal face `F_{ξ,η} = {φ : φ(P_ξ)η = 0}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FacePair {
    pub xi: [C64; 2],
    pub eta: Vec<C64>,
}

impl FacePair {
    pub fn new(xi: [C64; 2], eta: Vec<C64>) -> Result<Self> {
        let nx = vec_norm(&xi);
        let ne = vec_norm(&eta);
        if (nx - 1.0).abs() > 1e-12 || (ne - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "face vectors must be unit vectors (|xi| = {nx}, |eta| = {ne})"
            )));
        }
        Ok(Self { xi, eta })
    }

    /// The canonical pair `(e₂, f₁)` in dimension `n_out`.
    pub fn canonical(n_out: usize) -> Self {
        let mut eta = vec![ZERO; n_out];
        eta[0] = ONE;
        Self {
            xi: [ZERO, ONE],
            eta,
        }
    }
}

/// `‖φ(P_ξ)η‖`.
pub fn face_residual(m: &MapImages, f: &FacePair) -> Result<f64> {
    if f.eta.len() != m.n_out() {
        return Err(Error::DimensionMismatch(format!(
            "eta has length {}, map has output dimension {}",
            f.eta.len(),
            m.n_out()
        )));
    }
    let p = ComplexMatrix::outer(&f.xi);
    Ok(vec_norm(&apply_map(m, &p)?.mul_vec(&f.eta)))
}

/// Output of [`canonicalize`]: `φ′(A) = V* φ(W A W*) V` with `W e₂ = ξ`, `V f₁ = η`.
#[derive(Debug, Clone)]
pub struct Canonicalized {
    pub map: MapImages,
    pub w: ComplexMatrix,
    pub v: ComplexMatrix,
}

/// Moves a map in `F_{ξ,η}` into `F_{e₂,f₁}` by unitary conjugation.
pub fn canonicalize(m: &MapImages, f: &FacePair, tol: &ToleranceConfig) -> Result<Canonicalized> {
    let residual = face_residual(m, f)?;
    if residual > tol.face_tol {
        return Err(Error::FaceConditionViolated { residual });
    }
    let w = complete_unitary(&f.xi, 1)?;
    let v = complete_unitary(&f.eta, 0)?;
    Ok(Canonicalized {
        map: conjugate(m, &w, &v),
        w,
        v,
    })
}

/// `A ↦ V* φ(W A W*) V`.
pub fn conjugate(m: &MapImages, w: &ComplexMatrix, v: &ComplexMatrix) -> MapImages {
    let k = m.n_out();
    let vh = v.adjoint();
    let image = |i: usize, j: usize| {
        // W E_ij W* = Σ_kl W_ki conj(W_lj) E_kl
        let mut acc = ComplexMatrix::zeros(k, k);
        for kk in 0..2 {
            for ll in 0..2 {
                let coeff = w[(kk, i)] * w[(ll, j)].conj();
                if coeff != ZERO {
                    acc += &m.image(kk, ll).scale_c(coeff);
                }
            }
        }
        &(&vh * &acc) * v
    };
    MapImages {
        images: [image(0, 0), image(0, 1), image(1, 0), image(1, 1)],
    }
}

/// Searches the Bloch sphere for `(ξ, η)` with `φ(P_ξ)η ≈ 0`.
///
/// `λ_min(φ(P_ξ))` is scanned on a Fibonacci lattice of `grid` points and
/// polished by golden-section search; `η` is the matching eigenvector.
/// Returns `None` when the best residual exceeds `tol.face_tol`. A `None`
/// does not prove that the map lies in no maximal face.
pub fn find_face(m: &MapImages, grid: usize, tol: &ToleranceConfig) -> Option<FacePair> {
    let k = m.n_out();
    let h = choi_from_map(m);
    let lowest = |xi: &[C64; 2]| {
        let p = image_of_projection(&h, k, xi).hermitian_part();
        eig_hermitian(&p, f64::INFINITY).ok()
    };
    let best = bloch::minimize(grid, |xi| lowest(xi).map_or(f64::INFINITY, |e| e.min()));
    let xi = BlochPoint::xi(&best.point);
    let eta = lowest(&xi)?.min_vector();
    let pair = FacePair { xi, eta };
    let residual = face_residual(m, &pair).ok()?;
    (residual <= tol.face_tol).then_some(pair)
}
