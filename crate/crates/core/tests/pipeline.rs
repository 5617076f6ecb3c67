use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sspn_core::greedy::{greedy_reduce, LowRankMode, ReductionOptions, StopReason};
use sspn_core::linalg::spd_inverse;
use sspn_core::mvee::{ellipsoid_width, fit_bound_factor, infinity_fit, mvee};
use sspn_core::oracle::{brute_force_width, exact_p2_width, make_planted, DEFAULT_RESOLUTION};
use sspn_core::pointset::{distance_p, reduce_to_span, symmetrize};
use sspn_core::{AffineSubspace, DenseMatrix, PNorm, PointSet};

/// Anisotropic points that are not centered.
fn cloud(seed: u64, ambient: usize, m: usize) -> PointSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cols: Vec<Vec<f64>> = (0..m)
        .map(|_| {
            (0..ambient)
                .map(|k| 0.5 + rng.gen_range(-1.0..1.0) / (1.0 + k as f64))
                .collect()
        })
        .collect();
    PointSet::new(DenseMatrix::from_columns(&cols).unwrap())
}

#[test]
fn infinity_fit_is_within_its_bound_of_the_oracle() {
    for seed in 0..6 {
        let p = cloud(seed, 3, 14);
        let fit = infinity_fit(&p, 1, 2.0, 0.1, &ReductionOptions::default()).unwrap();
        let sym = symmetrize(&p);
        let opt = brute_force_width(&sym, 1, PNorm::Infinity, DEFAULT_RESOLUTION).unwrap();
        // P's residuals are among those of its symmetrization, which the bound covers
        assert!(fit.certificate <= fit.bound_factor * opt + 1e-9, "seed {seed}");
        let recomputed = distance_p(&p, &fit.subspace, PNorm::Infinity).unwrap();
        assert!((recomputed - fit.certificate).abs() <= 1e-10);
    }
}

#[test]
fn planted_fit_recovers_the_noise_level() {
    let inst = make_planted(30, 150, 2, 0.02, 4).unwrap();
    let fit = infinity_fit(&inst.points, 2, 2.0, 0.1, &ReductionOptions::default()).unwrap();
    let truth = AffineSubspace::linear(inst.true_subspace.clone());
    let reference = distance_p(&inst.points, &truth, PNorm::Infinity).unwrap();
    assert!(reference <= inst.noise_level + 1e-12);
    assert!(fit.certificate <= fit.bound_factor * inst.noise_level);
    assert_eq!(fit.subspace.basis().dim(), 2);
    let m = inst.points.nonzero_count();
    assert_eq!(fit.bound_factor, fit_bound_factor(2, m, 2.0, 0.1));
}

#[test]
fn first_round_matches_exact_least_squares_width() {
    let p = symmetrize(&cloud(9, 8, 40));
    let rep = greedy_reduce(&p, 3, &ReductionOptions::default()).unwrap();
    let frob: f64 = p
        .residuals_to(&rep.rounds[0].subspace)
        .iter()
        .map(|r| r * r)
        .sum::<f64>()
        .sqrt();
    assert!((frob - exact_p2_width(&p, 3).unwrap()).abs() <= 1e-9);
}

#[test]
fn reduction_log_is_consistent() {
    let p = symmetrize(&cloud(2, 12, 60));
    let rep = greedy_reduce(
        &p,
        2,
        &ReductionOptions {
            p: PNorm::Finite(4.0),
            ..ReductionOptions::default()
        },
    )
    .unwrap();
    let mut left = p.nonzero_count();
    for r in &rep.rounds {
        assert_eq!(r.points_in, left);
        left = r.remaining;
    }
    match rep.stop {
        StopReason::Exhausted => assert_eq!(left, 0),
        StopReason::RoundCap => assert_eq!(rep.rounds.len(), rep.dimension_bound / 2),
        StopReason::EarlyStop { .. } => panic!("early stop was not requested"),
    }
    let achieved = PNorm::Finite(4.0).norm(&p.residuals_to(&rep.reduced_subspace));
    assert!((achieved - rep.achieved).abs() <= 1e-12 * achieved.max(1.0));
}

#[test]
fn ellipsoid_of_a_box_has_the_box_widths() {
    // the inner ellipsoid of the box [-2,2] x [-1,1] touches its edges
    let pts = symmetrize(
        &PointSet::from_points(&[vec![2.0, 1.0], vec![2.0, -1.0], vec![-2.0, 1.0], vec![-2.0, -1.0]]).unwrap(),
    );
    let (coords, _) = reduce_to_span(&pts).unwrap();
    let e = mvee(&coords, 1e-6).unwrap();
    let axes = e.semi_axes().unwrap();
    assert!((axes[0] - 2.0).abs() < 1e-3 && (axes[1] - 1.0).abs() < 1e-3, "{axes:?}");
    assert!((ellipsoid_width(&e, 1).unwrap() - axes[1]).abs() < 1e-12);
    let inv = spd_inverse(e.shape()).unwrap();
    assert!(inv.get(0, 1).abs() < 1e-3);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn reduced_space_beats_any_round_alone(seed in 0u64..1000, n in 1usize..3, randomized in any::<bool>()) {
        let p = symmetrize(&cloud(seed, 6, 30));
        let opts = ReductionOptions {
            lowrank_mode: if randomized { LowRankMode::Randomized } else { LowRankMode::DeterministicSvd },
            seed,
            ..ReductionOptions::default()
        };
        let rep = greedy_reduce(&p, n, &opts).unwrap();
        prop_assert!(rep.reduced_subspace.dim() <= rep.dimension_bound);
        for r in &rep.rounds {
            let alone = PNorm::Infinity.norm(&p.residuals_to(&r.subspace));
            prop_assert!(rep.achieved <= alone + 1e-12);
        }
    }

    #[test]
    fn fit_never_beats_the_oracle(seed in 0u64..1000) {
        let p = symmetrize(&cloud(seed, 3, 10));
        let fit = infinity_fit(&p, 2, 2.0, 0.1, &ReductionOptions::default()).unwrap();
        let opt = brute_force_width(&p, 2, PNorm::Infinity, DEFAULT_RESOLUTION).unwrap();
        prop_assert!(fit.certificate >= opt - 1e-7);
        prop_assert!(fit.certificate <= fit.bound_factor * opt + 1e-9);
    }
}
