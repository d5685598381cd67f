use posmap::linalg::{abs_row, eig_hermitian, partial_transpose, psd_project, sqrt_psd, ComplexMatrix};
use posmap::random;
use proptest::prelude::*;

fn reconstruction_error(a: &ComplexMatrix) -> (f64, f64) {
    let e = eig_hermitian(a, 1e-12).unwrap();
    let q = &e.eigenvectors;
    let rec = e.recompose(|l| l);
    let scale = a.frobenius_norm().max(1.0);
    let n = a.rows();
    let orth = (&q.adjoint() * q).distance(&ComplexMatrix::identity(n)) / (n as f64).sqrt();
    (rec.distance(a) / scale, orth)
}

#[test]
fn eigensolver_on_seeded_matrices() {
    let mut worst = (0.0f64, 0.0f64);
    for seed in 0..1000u64 {
        let side = 2 + (seed % 11) as usize;
        let mut rng = random::rng(seed);
        let a = random::hermitian(&mut rng, side);
        let (r, o) = reconstruction_error(&a);
        worst = (worst.0.max(r), worst.1.max(o));
    }
    assert!(worst.0 <= 1e-10 && worst.1 <= 1e-10, "{worst:?}");
}

#[test]
fn eigenvalues_descend() {
    let mut rng = random::rng(7);
    let a = random::hermitian(&mut rng, 9);
    let e = eig_hermitian(&a, 1e-12).unwrap();
    assert!(e.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn psd_project_is_nearest(seed in any::<u64>(), side in 2usize..9, rank in 1usize..9) {
        let mut rng = random::rng(seed);
        let a = random::hermitian(&mut rng, side);
        let p = random::psd(&mut rng, side, rank.min(side));
        let proj = psd_project(&a, 1e-12).unwrap();
        prop_assert!(a.distance(&proj) <= a.distance(&p) + 1e-12);
        // Idempotent on its own output.
        prop_assert!(psd_project(&proj, 1e-12).unwrap().distance(&proj) <= 1e-12);
    }

    #[test]
    fn abs_row_squares_to_gram(seed in any::<u64>(), n in 1usize..7) {
        let mut rng = random::rng(seed);
        let x = random::gaussian_matrix(&mut rng, 1, n);
        let r = abs_row(&x).unwrap();
        let gram = &x.adjoint() * &x;
        prop_assert!((&r * &r).distance(&gram) <= 1e-12 * gram.frobenius_norm().max(1.0));
    }

    #[test]
    fn partial_transpose_involution(seed in any::<u64>(), k in 1usize..7) {
        let mut rng = random::rng(seed);
        let h = random::hermitian(&mut rng, 2 * k);
        let once = partial_transpose(&h, k).unwrap();
        prop_assert_eq!(partial_transpose(&once, k).unwrap(), h.clone());
        prop_assert!((once.frobenius_norm() - h.frobenius_norm()).abs() <= 1e-12 * h.frobenius_norm());
    }

    #[test]
    fn sqrt_psd_squares_back(seed in any::<u64>(), side in 1usize..9, rank in 1usize..9) {
        let mut rng = random::rng(seed);
        let a = random::psd(&mut rng, side, rank.min(side));
        let s = sqrt_psd(&a, 1e-12).unwrap();
        prop_assert!((&s * &s).distance(&a) <= 1e-9 * a.frobenius_norm().max(1.0));
    }
}

#[test]
fn abs_row_on_seeded_rows() {
    for seed in 0..1000u64 {
        let n = 1 + (seed % 6) as usize;
        let mut rng = random::rng(seed);
        let x = random::gaussian_matrix(&mut rng, 1, n);
        let r = abs_row(&x).unwrap();
        assert!((&r * &r).distance(&(&x.adjoint() * &x)) <= 1e-12, "seed {seed}");
    }
}
