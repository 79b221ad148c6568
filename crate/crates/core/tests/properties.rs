//! Property tests for the invariants that hold over the whole input space,
//! not just the worked examples.

use favprop_core::channel::{
    one_ring_covariance, sample_channel, ula_los, ArrayGeometry, RngStream, UserProfile,
};
use favprop_core::experiment::estimate_cdf;
use favprop_core::interference::{instantaneous_interference, mean_interference};
use favprop_core::linalg::{
    frobenius_norm, hermitian_eig, hermitian_part, max_abs_diff, trace_re, CMatrix,
};
use favprop_core::performance::capacity_per_user;
use num_complex::Complex64;
use proptest::prelude::*;

fn random_hermitian(m: usize, seed: u64) -> CMatrix {
    let mut rng = RngStream::new(seed, 0).rng();
    let a = CMatrix::from_fn(m, m, |_, _| {
        favprop_core::channel::standard_complex_normal(&mut rng)
    });
    hermitian_part(&a)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn steering_vectors_have_unit_modulus_entries(
        m in 1usize..200,
        theta in -10.0f64..10.0,
        spacing in 0.05f64..2.0,
    ) {
        let v = ula_los(ArrayGeometry::with_spacing(m, spacing), theta);
        for z in v.iter() {
            prop_assert!((z.norm_sqr() - 1.0).abs() < 1e-12);
        }
        prop_assert!((v.norm_squared() - m as f64).abs() <= 1e-9 * m as f64);
    }

    #[test]
    fn one_ring_is_hermitian_toeplitz_with_unit_diagonal(
        m in 2usize..24,
        delta in 0.01f64..3.1,
        phi0 in 0.0f64..std::f64::consts::TAU,
    ) {
        let r = one_ring_covariance(ArrayGeometry::new(m), delta, phi0).unwrap();
        for i in 0..m {
            prop_assert_eq!(r[(i, i)], Complex64::new(1.0, 0.0));
            for j in 0..m {
                prop_assert!((r[(i, j)] - r[(j, i)].conj()).norm() <= 1e-12);
                if i + 1 < m && j + 1 < m {
                    prop_assert!((r[(i, j)] - r[(i + 1, j + 1)]).norm() <= 1e-12);
                }
            }
        }
        prop_assert_eq!(trace_re(&r), m as f64);
    }

    #[test]
    fn eigendecomposition_reconstructs_and_preserves_trace(
        m in 1usize..16,
        seed in 0u64..1000,
    ) {
        let h = random_hermitian(m, seed);
        let eig = hermitian_eig(&h).unwrap();
        // descending order
        for w in eig.eigenvalues().windows(2) {
            prop_assert!(w[0] >= w[1]);
        }
        let sum: f64 = eig.eigenvalues().iter().sum();
        prop_assert!((sum - trace_re(&h)).abs() <= 1e-10 * trace_re(&h).abs().max(1.0));
        // unitary to tolerance
        let gram = eig.eigenvectors().adjoint() * eig.eigenvectors();
        prop_assert!(max_abs_diff(&gram, &CMatrix::identity(m, m)) <= 1e-10);
        // reconstruction
        let mut scaled = eig.eigenvectors().clone();
        for (mut col, &l) in scaled.column_iter_mut().zip(eig.eigenvalues()) {
            col *= Complex64::new(l, 0.0);
        }
        let rebuilt = scaled * eig.eigenvectors().adjoint();
        let denom = frobenius_norm(&h).max(1e-300);
        prop_assert!(frobenius_norm(&(&rebuilt - &h)) / denom <= 1e-10);
    }

    #[test]
    fn mean_interference_is_symmetric_and_bounded(
        m in 2usize..20,
        k1 in 0.0f64..5.0,
        k2 in 0.0f64..5.0,
        t1 in 0.0f64..std::f64::consts::TAU,
        t2 in 0.0f64..std::f64::consts::TAU,
        d1 in 0.05f64..3.0,
        d2 in 0.05f64..3.0,
    ) {
        let geom = ArrayGeometry::new(m);
        let u1 = UserProfile::one_ring(geom, k1, t1, d1, 1.0).unwrap();
        let u2 = UserProfile::one_ring(geom, k2, t2, d2, 1.0).unwrap();
        let ab = mean_interference(&u1, &u2).unwrap();
        let ba = mean_interference(&u2, &u1).unwrap();
        prop_assert!((ab.total - ba.total).abs() <= 1e-12 * ab.total.max(1e-300));
        prop_assert!((ab.term1 - ba.term4).abs() <= 1e-12 * ab.term1.max(1e-300));
        prop_assert!((ab.term2 - ba.term2).abs() <= 1e-12 * ab.term2.max(1e-300));
        let m2 = (m * m) as f64;
        for term in [ab.term1, ab.term2, ab.term3, ab.term4] {
            prop_assert!(term >= 0.0);
            prop_assert!(term / m2 <= 1.0 + 1e-9);
        }
        let sum = ab.term1 + ab.term2 + ab.term3 + ab.term4;
        prop_assert!((ab.total - sum).abs() <= 1e-12 * sum.max(1e-300));
    }

    #[test]
    fn instantaneous_interference_obeys_cauchy_schwarz(
        m in 1usize..32,
        seed in 0u64..1000,
    ) {
        let mut rng = RngStream::new(seed, 1).rng();
        let user = UserProfile::iid(
            1.0,
            ula_los(ArrayGeometry::new(m), 0.7),
            1.0,
        ).unwrap();
        let a = sample_channel(&user, &mut rng);
        let b = sample_channel(&user, &mut rng);
        let t = instantaneous_interference(&a, &b).unwrap();
        prop_assert!(t >= 0.0);
        prop_assert!(t <= a.norm_squared() * b.norm_squared() * (1.0 + 1e-12));
    }

    #[test]
    fn empirical_cdf_is_a_distribution_function(values in prop::collection::vec(-1e6f64..1e6, 1..200)) {
        let grid = estimate_cdf(&values).unwrap();
        prop_assert_eq!(grid.last().unwrap().1, 1.0);
        for w in grid.windows(2) {
            prop_assert!(w[0].0 < w[1].0);
            prop_assert!(w[0].1 < w[1].1);
        }
        for &(_, p) in &grid {
            prop_assert!(p > 0.0 && p <= 1.0);
        }
    }

    #[test]
    fn capacity_is_permutation_invariant(
        m in 2usize..16,
        l in 1usize..5,
        seed in 0u64..500,
        rotate in 0usize..4,
    ) {
        let mut rng = RngStream::new(seed, 2).rng();
        let g = CMatrix::from_fn(m, l, |_, _| {
            favprop_core::channel::standard_complex_normal(&mut rng)
        });
        let d: Vec<f64> = (0..l).map(|i| 0.3 + 0.2 * i as f64).collect();
        let c = capacity_per_user(&g, &d, 1.0).unwrap();
        prop_assert!(c >= 0.0);

        let shift = rotate % l;
        let mut g2 = CMatrix::zeros(m, l);
        for k in 0..l {
            g2.column_mut(k).copy_from(&g.column((k + shift) % l));
        }
        let d2: Vec<f64> = (0..l).map(|k| d[(k + shift) % l]).collect();
        let c2 = capacity_per_user(&g2, &d2, 1.0).unwrap();
        prop_assert!((c - c2).abs() <= 1e-12 * c.max(1.0));
    }
}
