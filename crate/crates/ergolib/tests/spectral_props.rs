//! Property and invariant tests for the spectral decomposition: random-matrix
//! reconstruction, agreement of the two independent projection constructions,
//! idempotence, exact nilpotency at the declared index, and the rank oracle
//! for reducible invertibility.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ergolib::fixtures::{plant_jordan, random_complex_matrix, JordanBlockSpec};
use ergolib::linalg::rank_with_cutoff;
use ergolib::matrix::ComplexMatrix;
use ergolib::scalar::complex;
use ergolib::spectral::{
    eigen_cluster, reducible_invertibility, riesz_projection_contour, spectral_decompose,
    ToleranceConfig,
};
use ergolib::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    complex(re, im)
}

/// Tolerances for planted-Jordan fixtures: the cluster radius must cover the
/// ~eps^{1/3} eigenvalue scatter of index-3 blocks.
fn planted_tolerances(a: &ComplexMatrix<f64>) -> ToleranceConfig<f64> {
    let mut tol = ToleranceConfig::for_matrix(a).unwrap();
    tol.eig_cluster_tol = 1e-4;
    tol
}

#[test]
fn reconstruction_over_200_random_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(20240817);
    for case in 0..200 {
        let n = 2 + (case % 7);
        let a = random_complex_matrix::<f64>(n, &mut rng);
        let tol = ToleranceConfig::for_matrix(&a).unwrap();
        let d = spectral_decompose(&a, &tol).unwrap();
        let err = d.reconstruct().sub(&a).max_norm();
        assert!(err < 1e-8, "case {case}: reconstruction error {err}");
        let sum: usize = d.items.iter().map(|i| i.alg_mult).sum();
        assert_eq!(sum, n);
    }
}

#[test]
fn contour_agrees_with_eigenspace_projection() {
    let mut rng = ChaCha8Rng::seed_from_u64(5150);
    for case in 0..20 {
        let blocks = vec![
            JordanBlockSpec {
                lambda: c(0.0, 0.0),
                size: 2,
            },
            JordanBlockSpec {
                lambda: c(0.0, 1.0),
                size: 1,
            },
            JordanBlockSpec {
                lambda: c(-1.0, 0.0),
                size: 2,
            },
        ];
        let planted = plant_jordan(blocks, &mut rng);
        let a = &planted.matrix;
        let tol = planted_tolerances(a);
        let d = spectral_decompose(a, &tol).unwrap();
        for item in &d.items {
            // Menu separations are >= 0.3; radius 0.14 keeps the contour
            // clear of the rest of the spectrum.
            let p = riesz_projection_contour(a, item.lambda, 0.14, 128).unwrap();
            let err = p.sub(&item.projector).max_norm();
            assert!(err < 1e-7, "case {case}: contour disagreement {err}");
        }
    }
}

#[test]
fn projections_are_idempotent() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for case in 0..50 {
        let n = 2 + (case % 7);
        let a = random_complex_matrix::<f64>(n, &mut rng);
        let tol = ToleranceConfig::for_matrix(&a).unwrap();
        let d = spectral_decompose(&a, &tol).unwrap();
        for item in &d.items {
            let pp = item.projector.matmul(&item.projector);
            let err = pp.sub(&item.projector).max_norm();
            assert!(err < tol.residual_tol, "case {case}: idempotence {err}");
        }
    }
}

#[test]
fn nilpotency_is_exact_at_declared_index() {
    let mut rng = ChaCha8Rng::seed_from_u64(424242);
    for _ in 0..20 {
        let blocks = vec![
            JordanBlockSpec {
                lambda: c(0.0, 0.0),
                size: 3,
            },
            JordanBlockSpec {
                lambda: c(-1.0, 0.0),
                size: 2,
            },
            JordanBlockSpec {
                lambda: c(0.0, -1.0),
                size: 1,
            },
        ];
        let planted = plant_jordan(blocks, &mut rng);
        let tol = planted_tolerances(&planted.matrix);
        let d = spectral_decompose(&planted.matrix, &tol).unwrap();
        for item in &d.items {
            let expected_index = planted.expected_index(item.lambda_nearest(&planted));
            assert_eq!(item.index, expected_index);
            let power = item.nilpotent.pow(item.index);
            let cutoff = tol.rank_cutoff_for(&power).max(1e-8);
            assert_eq!(rank_with_cutoff(&power, cutoff), 0, "Q^k must vanish");
            if item.index > 1 {
                let below = item.nilpotent.pow(item.index - 1);
                let cutoff = tol.rank_cutoff_for(&below).max(1e-8);
                assert!(
                    rank_with_cutoff(&below, cutoff) > 0,
                    "Q^(k-1) must not vanish"
                );
            }
        }
    }
}

#[test]
fn reducibility_matches_rank_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(31007);
    // Planted fixtures with and without an index-1 zero eigenvalue, plus
    // random (almost surely invertible) matrices.
    let layouts: Vec<Vec<JordanBlockSpec<f64>>> = vec![
        vec![
            JordanBlockSpec {
                lambda: c(0.0, 0.0),
                size: 1,
            },
            JordanBlockSpec {
                lambda: c(-1.0, 0.0),
                size: 2,
            },
        ],
        vec![
            JordanBlockSpec {
                lambda: c(0.0, 0.0),
                size: 2,
            },
            JordanBlockSpec {
                lambda: c(0.0, 1.0),
                size: 1,
            },
        ],
        vec![
            JordanBlockSpec {
                lambda: c(0.0, 0.0),
                size: 1,
            },
            JordanBlockSpec {
                lambda: c(0.0, 0.0),
                size: 1,
            },
            JordanBlockSpec {
                lambda: c(0.4, 0.0),
                size: 2,
            },
        ],
        vec![
            JordanBlockSpec {
                lambda: c(0.0, 0.0),
                size: 3,
            },
            JordanBlockSpec {
                lambda: c(-0.3, 0.0),
                size: 1,
            },
        ],
    ];
    for layout in layouts {
        for _ in 0..5 {
            let planted = plant_jordan(layout.clone(), &mut rng);
            let a = &planted.matrix;
            let tol = planted_tolerances(a);
            let verdict = reducible_invertibility(a, &tol).unwrap().holds;
            let a2 = a.matmul(a);
            // rank(A^2) == rank(A) iff the zero eigenvalue has index <= 1.
            let cutoff_a = tol.rank_cutoff_for(a);
            let cutoff_a2 = tol.rank_cutoff_for(&a2);
            let oracle = rank_with_cutoff(&a2, cutoff_a2) == rank_with_cutoff(a, cutoff_a);
            assert_eq!(verdict, oracle, "layout with zero blocks disagrees");
        }
    }
    for _ in 0..20 {
        let a = random_complex_matrix::<f64>(5, &mut rng);
        let tol = ToleranceConfig::for_matrix(&a).unwrap();
        let verdict = reducible_invertibility(&a, &tol).unwrap().holds;
        let a2 = a.matmul(&a);
        let oracle = rank_with_cutoff(&a2, tol.rank_cutoff_for(&a2))
            == rank_with_cutoff(&a, tol.rank_cutoff_for(&a));
        assert_eq!(verdict, oracle);
    }
}

#[test]
fn planted_five_dimensional_fixture_matches_expected_structure() {
    let mut rng = ChaCha8Rng::seed_from_u64(777);
    let blocks = vec![
        JordanBlockSpec {
            lambda: c(0.0, 0.0),
            size: 2,
        },
        JordanBlockSpec {
            lambda: c(0.0, 1.0),
            size: 1,
        },
        JordanBlockSpec {
            lambda: c(-1.0, 0.0),
            size: 2,
        },
    ];
    let planted = plant_jordan(blocks, &mut rng);
    let tol = planted_tolerances(&planted.matrix);
    let d = spectral_decompose(&planted.matrix, &tol).unwrap();
    assert_eq!(d.items.len(), 3);

    for item in &d.items {
        let lambda = item.lambda_nearest(&planted);
        assert!((item.lambda - lambda).norm() < 1e-6);
        assert_eq!(item.index, planted.expected_index(lambda));
        let p_err = item
            .projector
            .sub(&planted.expected_projector(lambda))
            .max_norm();
        let q_err = item
            .nilpotent
            .sub(&planted.expected_nilpotent(lambda))
            .max_norm();
        assert!(p_err < 1e-9, "projector error {p_err}");
        assert!(q_err < 1e-9, "nilpotent error {q_err}");
        // Contour construction agrees with the eigenspace construction.
        let contour = riesz_projection_contour(&planted.matrix, lambda, 0.14, 128).unwrap();
        assert!(contour.sub(&item.projector).max_norm() < 1e-8);
    }
    let indices: Vec<(Complex64, usize)> = d.items.iter().map(|i| (i.lambda, i.index)).collect();
    let zero = indices.iter().find(|(l, _)| l.norm() < 1e-6).unwrap();
    assert_eq!(zero.1, 2);
}

/// Helper trait to map a computed eigenvalue back to the planted menu value.
trait NearestLambda {
    fn lambda_nearest(&self, planted: &ergolib::fixtures::PlantedJordan<f64>) -> Complex64;
}

impl NearestLambda for ergolib::spectral::EigenItem<f64> {
    fn lambda_nearest(&self, planted: &ergolib::fixtures::PlantedJordan<f64>) -> Complex64 {
        planted
            .distinct_eigenvalues()
            .into_iter()
            .map(|(l, _)| l)
            .min_by(|a, b| {
                (self.lambda - a)
                    .norm()
                    .partial_cmp(&(self.lambda - b).norm())
                    .unwrap()
            })
            .expect("planted fixture has eigenvalues")
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_matrices_reconstruct_and_cluster(seed in 0u64..1u64 << 48, n in 2usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_complex_matrix::<f64>(n, &mut rng);
        let tol = ToleranceConfig::for_matrix(&a).unwrap();
        let clusters = eigen_cluster(&a, &tol).unwrap();
        prop_assert_eq!(clusters.iter().map(|c| c.1).sum::<usize>(), n);
        let d = spectral_decompose(&a, &tol).unwrap();
        prop_assert!(d.reconstruct().sub(&a).max_norm() < 1e-8);
    }

    #[test]
    fn decomposition_is_scale_invariant(seed in 0u64..1u64 << 40, log_scale in -6i32..=6) {
        // The default tolerances are matrix-scaled, so the decomposition
        // must work identically across twelve orders of magnitude.
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let base = random_complex_matrix::<f64>(4, &mut rng);
        let scale = 10f64.powi(log_scale);
        let a = base.scale(ergolib::complex(scale, 0.0));
        let tol = ToleranceConfig::for_matrix(&a).unwrap();
        let d = spectral_decompose(&a, &tol).unwrap();
        let relative = d.reconstruct().sub(&a).max_norm() / a.max_norm();
        prop_assert!(relative < 1e-12, "relative reconstruction {}", relative);
    }
}
