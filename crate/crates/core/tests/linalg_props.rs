mod common;

use common::{random_matrix, singular_values};
use proptest::prelude::*;
use simcone::linalg::{
    banach_inverse_bound, lu_factor, lu_solve, negative_part, norm2, positive_part, sign_pattern, spectral_norm,
    Matrix,
};
use simcone::rng::SplitMix64;

#[test]
fn lu_reconstructs_random_matrices() {
    let mut rng = SplitMix64::new(1);
    let mut tested = 0;
    while tested < 1000 {
        let n = 1 + (rng.next_u64() % 8) as usize;
        let a = random_matrix(&mut rng, n, n, -1.0, 1.0);
        let Ok(f) = lu_factor(&a) else { continue };
        tested += 1;
        let pa = f.permutation_matrix().matmul(&a);
        let lu = f.lower.matmul(&f.upper);
        let defect = pa.sub(&lu).max_abs();
        assert!(defect <= 1e-12 * a.max_abs(), "n={n} defect={defect:e}");
        for i in 0..n {
            assert_eq!(f.lower[(i, i)], 1.0);
            for j in i + 1..n {
                assert_eq!(f.lower[(i, j)], 0.0);
                assert_eq!(f.upper[(j, i)], 0.0);
            }
        }
    }
}

#[test]
fn lu_solve_residual_bound() {
    let mut rng = SplitMix64::new(2);
    for _ in 0..500 {
        let n = 1 + (rng.next_u64() % 10) as usize;
        let a = random_matrix(&mut rng, n, n, -1.0, 1.0);
        let Ok(f) = lu_factor(&a) else { continue };
        let rhs = rng.uniform_vec(n, -5.0, 5.0);
        let x = lu_solve(&f, &rhs).unwrap();
        let ax = a.mul_vec(&x);
        let res: f64 = ax.iter().zip(&rhs).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
        let bound = 1e-10 * (spectral_norm(&a) * norm2(&x) + norm2(&rhs));
        assert!(res <= bound, "res {res:e} bound {bound:e}");
    }
}

#[test]
fn spectral_norm_matches_jacobi_oracle() {
    // [[0, 1], [1, 1]] is symmetric with eigenvalues (1 ± √5)/2.
    let a = Matrix::from_rows(&[[0.0, 1.0], [1.0, 1.0]]).unwrap();
    let oracle = singular_values(&a)[0];
    assert!((oracle - 1.618_033_988_749_895).abs() < 1e-14);
    assert!((spectral_norm(&a) - oracle).abs() <= 1e-8 * oracle);

    // Random matrices whose top two singular values are separated; power
    // iteration accuracy depends on that gap.
    let mut rng = SplitMix64::new(3);
    let mut checked = 0;
    while checked < 300 {
        let n = 1 + (rng.next_u64() % 8) as usize;
        let m = random_matrix(&mut rng, n, n, -1.0, 1.0);
        let sv = singular_values(&m);
        if n > 1 && sv[1] > 0.9 * sv[0] {
            continue;
        }
        checked += 1;
        let est = spectral_norm(&m);
        assert!((est - sv[0]).abs() <= 1e-8 * sv[0], "n={n} est={est} oracle={}", sv[0]);
    }
}

#[test]
fn spectral_norm_never_overestimates() {
    let mut rng = SplitMix64::new(4);
    for _ in 0..300 {
        let n = 2 + (rng.next_u64() % 6) as usize;
        let m = random_matrix(&mut rng, n, n, -1.0, 1.0);
        let sv = singular_values(&m)[0];
        assert!(spectral_norm(&m) <= sv * (1.0 + 1e-12));
    }
}

#[test]
fn norm_inequalities_on_random_pairs() {
    let mut rng = SplitMix64::new(5);
    for _ in 0..500 {
        let n = 1 + (rng.next_u64() % 6) as usize;
        let l = random_matrix(&mut rng, n, n, -1.0, 1.0);
        let m = random_matrix(&mut rng, n, n, -1.0, 1.0);
        let x = rng.uniform_vec(n, -1.0, 1.0);
        let nm = spectral_norm(&m);
        assert!(norm2(&m.mul_vec(&x)) <= nm * norm2(&x) + 1e-8);
        assert!(spectral_norm(&l.matmul(&m)) <= spectral_norm(&l) * nm + 1e-8);
    }
}

#[test]
fn banach_bound_on_random_contractions() {
    let mut rng = SplitMix64::new(6);
    for _ in 0..500 {
        let n = 1 + (rng.next_u64() % 6) as usize;
        let e = random_matrix(&mut rng, n, n, -1.0, 1.0);
        let target = rng.uniform_in(0.0, 0.9);
        let norm = spectral_norm(&e);
        let e = e.scale(target / norm);
        let est = banach_inverse_bound(&e).unwrap();
        assert!(est.holds(1e-8), "{est:?}");
    }
}

fn finite_vec() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![-1e6..1e6f64, Just(0.0), Just(-0.0), -1e-300..1e-300f64], 1..12)
}

proptest! {
    #[test]
    fn parts_recombine_exactly(x in finite_vec()) {
        let plus = positive_part(&x);
        let minus = negative_part(&x);
        for i in 0..x.len() {
            prop_assert_eq!(plus[i] - minus[i], x[i]);
            prop_assert_eq!(minus[i], plus[i] - x[i]);
            prop_assert!(plus[i] >= 0.0 && minus[i] >= 0.0);
            prop_assert!(plus[i] == 0.0 || minus[i] == 0.0);
        }
    }

    #[test]
    fn pattern_of_positive_part_is_pattern(x in finite_vec()) {
        prop_assert_eq!(sign_pattern(&positive_part(&x)), sign_pattern(&x));
    }
}
