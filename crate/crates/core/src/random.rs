//! Seeded random matrices.
//!
//! Every stochastic routine in the crate takes a `u64` seed and derives
//! independent streams from it with [`stream_rng`], so results do not depend
//! on evaluation order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{vec_norm, ComplexMatrix, C64};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `stream` of the generator seeded with `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> SeededRng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Standard complex Gaussian (real and imaginary parts N(0, 1/2)).
pub fn complex_normal(rng: &mut impl Rng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

/// Hermitian matrix `(G + G*)/2` from a complex Gaussian `G`.
pub fn hermitian(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    gaussian_matrix(rng, n, n).hermitian_part()
}

/// PSD matrix `G G*` with `G` Gaussian of size `n × rank`.
pub fn psd(rng: &mut impl Rng, n: usize, rank: usize) -> ComplexMatrix {
    let g = gaussian_matrix(rng, n, rank);
    (&g * &g.adjoint()).hermitian_part()
}

pub fn unit_vector(rng: &mut impl Rng, n: usize) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..n).map(|_| complex_normal(rng)).collect();
        let norm = vec_norm(&v);
        if norm > 1e-8 {
            return v.iter().map(|z| z / norm).collect();
        }
    }
}

/// Haar-distributed unitary via Gram–Schmidt on a Gaussian matrix.
pub fn unitary(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    let g = gaussian_matrix(rng, n, n);
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(n);
    for j in 0..n {
        let mut v = g.col_vec(j);
        for _ in 0..2 {
            for q in &cols {
                let p = crate::linalg::inner(q, &v);
                for (vk, qk) in v.iter_mut().zip(q) {
                    *vk -= p * qk;
                }
            }
        }
        let norm = vec_norm(&v);
        cols.push(v.iter().map(|z| z / norm).collect());
    }
    ComplexMatrix::from_fn(n, n, |i, j| cols[j][i])
}

/// Choi matrix `GG*` of a CP map in face form: row `n + 1` of `G` is zero,
/// so the `φ(E₂₂)` block has the mandatory zero first row.
pub fn cp_face_choi(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    let k = n + 1;
    let mut g = gaussian_matrix(rng, 2 * k, 2 * k);
    for j in 0..2 * k {
        g[(k, j)] = C64::new(0.0, 0.0);
    }
    (&g * &g.adjoint()).hermitian_part()
}

/// Partial transpose of [`cp_face_choi`]: a co-CP map in face form.
pub fn ccp_face_choi(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    let h = cp_face_choi(rng, n);
    crate::linalg::partial_transpose_unchecked(&h, n + 1)
}

/// Hermitian face-form Choi matrix with `x = 0`, `a > 0`, `B, U ⪰ 0` and
/// Gaussian off-diagonal blocks. Not necessarily positive.
pub fn face_form_choi(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    let k = n + 1;
    let b = psd(rng, n, n);
    let u = psd(rng, n, n);
    let mut h = ComplexMatrix::zeros(2 * k, 2 * k);
    let a: f64 = rng.random_range(0.1..2.0);
    h[(0, 0)] = C64::new(a, 0.0);
    h.set_block(1, 1, &b);
    h.set_block(k + 1, k + 1, &u);
    let c = gaussian_matrix(rng, 1, n).scale(0.5);
    let y = gaussian_matrix(rng, 1, n).scale(0.5);
    let z = gaussian_matrix(rng, 1, n).scale(0.5);
    let t = gaussian_matrix(rng, n, n).scale(0.5);
    h.set_block(0, 1, &c);
    h.set_block(1, 0, &c.adjoint());
    h.set_block(0, k + 1, &y);
    h.set_block(k + 1, 0, &y.adjoint());
    h.set_block(k, 1, &z);
    h.set_block(1, k, &z.adjoint());
    h.set_block(1, k + 1, &t);
    h.set_block(k + 1, 1, &t.adjoint());
    h
}
