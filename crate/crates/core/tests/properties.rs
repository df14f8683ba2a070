mod common;

use common::*;
use framekit::diagnostics::{
    minor_determinants, necessary_identities, orthonormality_characterization, planar_tightness,
    planar_tightness_at,
};
use framekit::frame::frame_operator;
use framekit::scaling::{decide_scalability, length_bounds, oracle_scale};
use framekit::{canonicalize, construct, equivalent, random_parseval, verify, FrameMatrix};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::Rng;

fn max_entry_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).amax()
}

fn rotated_and_flipped(frame: &FrameMatrix, seed: u64) -> FrameMatrix {
    let mut rng = rng(seed);
    let q = random_rotation(&mut rng, frame.dim());
    let signs = random_signs(&mut rng, frame.count());
    frame.transformed(&q).unwrap().scaled(&signs).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn random_parseval_verifies(n in 1usize..=10, extra in 0usize..=5, seed in any::<u64>()) {
        let frame = random_parseval(n, n + extra, seed).unwrap();
        let report = verify(&frame, 1e-10);
        prop_assert!(report.is_parseval);
        prop_assert!(report.is_tight);
        let total: f64 = frame.norms().iter().map(|l| l * l).sum();
        prop_assert!((total - n as f64).abs() <= (n + extra) as f64 * 1e-10);
    }

    #[test]
    fn parseval_verdict_matches_frame_operator(n in 1usize..6, extra in 0usize..3, seed in any::<u64>(), eps in 0.0f64..1e-6) {
        let frame = random_parseval(n, n + extra, seed).unwrap();
        let mut factors = vec![1.0; n + extra];
        factors[0] += eps;
        let frame = frame.scaled(&factors).unwrap();
        let tol = 1e-9;
        let deviation = (frame_operator(&frame) - DMatrix::<f64>::identity(n, n)).amax();
        prop_assert_eq!(verify(&frame, tol).is_parseval, deviation <= tol);
    }

    #[test]
    fn canonicalize_is_idempotent(n in 1usize..7, extra in 0usize..4, seed in any::<u64>(), parseval in any::<bool>()) {
        let frame = if parseval {
            random_parseval(n, n + extra, seed).unwrap()
        } else {
            random_unit_frame(&mut rng(seed), n, n + extra)
        };
        let once = canonicalize(&frame).unwrap();
        let twice = canonicalize(&once.frame).unwrap();
        prop_assert!(max_entry_diff(once.frame.matrix(), twice.frame.matrix()) <= 1e-12);
    }

    #[test]
    fn equivalence_relation(n in 1usize..6, extra in 0usize..3, s1 in any::<u64>(), s2 in any::<u64>(), s3 in any::<u64>()) {
        let a = random_parseval(n, n + extra, s1).unwrap();
        let b = rotated_and_flipped(&a, s2);
        let c = random_parseval(n, n + extra, s3).unwrap();
        prop_assert!(equivalent(&a, &a, 1e-9).unwrap());
        prop_assert!(equivalent(&a, &b, 1e-9).unwrap());
        prop_assert!(equivalent(&b, &a, 1e-9).unwrap());
        prop_assert_eq!(equivalent(&a, &c, 1e-9).unwrap(), equivalent(&c, &a, 1e-9).unwrap());
        let c2 = rotated_and_flipped(&c, s2 ^ 1);
        prop_assert_eq!(equivalent(&a, &c, 1e-9).unwrap(), equivalent(&b, &c2, 1e-9).unwrap());
    }

    #[test]
    fn weights_invariant_under_equivalence(n in 2usize..7, s1 in any::<u64>(), s2 in any::<u64>()) {
        let (u, _) = random_parseval(n, n + 1, s1).unwrap().normalized().unwrap();
        let moved = rotated_and_flipped(&u, s2);
        let a = decide_scalability(&u, 1e-9).unwrap();
        let b = decide_scalability(&moved, 1e-9).unwrap();
        prop_assert_eq!(a.scalable, b.scalable);
        if let (Some(wa), Some(wb)) = (a.weights, b.weights) {
            prop_assert!(max_abs_diff(wa.lengths(), wb.lengths()) <= 1e-9);
        }
    }

    #[test]
    fn orthonormality_iff_parseval_for_bases(n in 1usize..8, seed in any::<u64>()) {
        let basis = random_parseval(n, n, seed).unwrap();
        let check = orthonormality_characterization(&basis, 1e-10).unwrap();
        prop_assert!(check.parseval && check.orthonormal);
    }
}

#[test]
fn construct_trace_invariants() {
    for n in 2..=10 {
        let mut rng = rng(500 + n as u64);
        for _ in 0..1000 {
            let w = random_seed(&mut rng, n, 0.999);
            let built = construct(&w).unwrap();
            assert!(verify(&built.frame, 1e-10).is_parseval);
            assert!(minor_determinants(&built.frame).unwrap() <= 1e-9);
            for level in &built.trace.levels {
                let y_norm = level.y.iter().map(|v| v * v).sum::<f64>().sqrt();
                assert!((y_norm - 1.0).abs() <= 1e-10, "|y| = {y_norm}");
                assert!(level.lambda.abs() < 1.0);
                assert!((level.x1 * level.x1 + level.lambda * level.lambda - 1.0).abs() <= 1e-10);
            }
        }
    }
}

#[test]
fn forward_soundness_and_weight_sums() {
    for n in 2..=8 {
        for k in 0..150u64 {
            let p = random_parseval(n, n + 1, 77_000 + 1000 * n as u64 + k).unwrap();
            let (u, lengths) = p.normalized().unwrap();
            let verdict = decide_scalability(&u, 1e-9).unwrap();
            let weights = verdict
                .weights
                .expect("normalized Parseval frame is scalable");
            assert!(max_abs_diff(weights.lengths(), &lengths) <= 1e-8);
            let total: f64 = weights.squares().iter().sum();
            assert!((total - n as f64).abs() <= 1e-9);
            assert!(length_bounds(&weights).half_exception_holds());
        }
    }
}

#[test]
fn oracle_agrees_on_mixed_frames() {
    for n in [2, 3] {
        let mut rng = rng(900 + n as u64);
        for k in 0..200 {
            let u = if k % 2 == 0 {
                random_parseval(n, n + 1, rng.gen())
                    .unwrap()
                    .normalized()
                    .unwrap()
                    .0
            } else {
                random_unit_frame(&mut rng, n, n + 1)
            };
            let verdict = decide_scalability(&u, 1e-9).unwrap();
            assert_eq!(verdict.scalable, oracle_scale(&u).is_some());
        }
    }
}

#[test]
fn identities_hold_for_random_parseval() {
    for n in 2..=8 {
        for count in n..=n + 3 {
            for k in 0..40u64 {
                let frame =
                    random_parseval(n, count, 31 * k + 7 * count as u64 + n as u64).unwrap();
                let r = necessary_identities(&frame).unwrap();
                assert!(r.cos <= 1e-9 && r.sin <= 1e-9 && r.cos2 <= 1e-9);
            }
        }
    }
}

#[test]
fn planar_tightness_matches_verify() {
    let mut rng = rng(4242);
    let mut tight = 0;
    for k in 0..500 {
        let count = rng.gen_range(2..7);
        let frame = if k % 2 == 0 {
            let a: f64 = rng.gen_range(0.1..5.0);
            random_parseval(2, count, rng.gen())
                .unwrap()
                .scaled(&vec![a.sqrt(); count])
                .unwrap()
        } else {
            let cols: Vec<Vec<f64>> = (0..count).map(|_| gaussian_vector(&mut rng, 2)).collect();
            FrameMatrix::from_columns(&cols).unwrap()
        };
        let verdict = planar_tightness(&frame).unwrap() <= 1e-10;
        assert_eq!(verdict, verify(&frame, 1e-10).is_tight);
        tight += usize::from(verdict);
        for i in 1..count {
            assert_eq!(planar_tightness_at(&frame, i).unwrap() <= 1e-10, verdict);
        }
    }
    assert!(tight >= 250);
}

#[test]
fn minor_determinants_for_random_n_plus_one() {
    for n in 1..=8 {
        for seed in 0..50u64 {
            let frame = random_parseval(n, n + 1, seed).unwrap();
            assert!(minor_determinants(&frame).unwrap() <= 1e-9);
        }
    }
}
