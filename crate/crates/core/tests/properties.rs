//! Randomized invariant checks.

use credal_core::credal::{is_nested, predict_box, tighten_reachable};
use credal_core::likelihood::{delta_loglik, fit, SolverConfig};
use credal_core::metrics::auroc;
use credal_core::rng::SplitMix64;
use credal_core::{AlphaLevel, BoxCredalSet, LabeledLogits, LogitMatrix, Mode, ProbabilityInterval};
use proptest::prelude::*;

fn small_data(seed: u64, n: usize, k: usize) -> LabeledLogits {
    let mut rng = SplitMix64::new(seed);
    let data: Vec<f64> = (0..n * k).map(|_| rng.next_normal()).collect();
    let mut labels: Vec<usize> = (0..n).map(|_| rng.next_index(k)).collect();
    labels[0] = 0;
    labels[1] = 1; // at least two classes
    LabeledLogits::new(LogitMatrix::new(data, k).unwrap(), labels).unwrap()
}

fn arb_box(k: usize) -> impl Strategy<Value = BoxCredalSet> {
    (
        proptest::collection::vec(0.0..1.0f64, k),
        proptest::collection::vec(0.0..1.0f64, k),
    )
        .prop_filter_map("box must intersect the simplex", |(centers, widths)| {
            let total: f64 = centers.iter().sum();
            if total <= 0.0 {
                return None;
            }
            let ivs: Vec<ProbabilityInterval> = centers
                .iter()
                .zip(&widths)
                .map(|(&c, &w)| {
                    let c = c / total; // put the anchor point on the simplex
                    ProbabilityInterval::new((c - w * 0.5).max(0.0), (c + w * 0.5).min(1.0))
                        .unwrap()
                })
                .collect();
            BoxCredalSet::new(ivs).ok()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn delta_loglik_translation_invariant(seed in 0u64..1000, t in -20.0..20.0f64) {
        let data = small_data(seed, 12, 3);
        let mut rng = SplitMix64::new(seed ^ 0xABCD);
        let c: Vec<f64> = (0..3).map(|_| 3.0 * rng.next_normal()).collect();
        let shifted: Vec<f64> = c.iter().map(|x| x + t).collect();
        let a = delta_loglik(&data, &c);
        let b = delta_loglik(&data, &shifted);
        prop_assert!((a - b).abs() < 1e-9, "{a} vs {b}");
    }

    #[test]
    fn delta_loglik_midpoint_concave(seed in 0u64..1000, lambda in 0.01..0.99f64) {
        let data = small_data(seed, 12, 3);
        let mut rng = SplitMix64::new(seed ^ 0x1234);
        let c1: Vec<f64> = (0..3).map(|_| 4.0 * rng.next_normal()).collect();
        let c2: Vec<f64> = (0..3).map(|_| 4.0 * rng.next_normal()).collect();
        let mix: Vec<f64> = c1.iter().zip(&c2).map(|(a, b)| lambda * a + (1.0 - lambda) * b).collect();
        let lhs = delta_loglik(&data, &mix);
        let rhs =
            lambda * delta_loglik(&data, &c1) + (1.0 - lambda) * delta_loglik(&data, &c2);
        prop_assert!(lhs >= rhs - 1e-9, "concavity violated: {lhs} < {rhs}");
    }

    #[test]
    fn tighten_is_idempotent_and_never_widens(b in arb_box(4)) {
        let t1 = tighten_reachable(&b).unwrap();
        let t2 = tighten_reachable(&t1).unwrap();
        for k in 0..4 {
            prop_assert!(t1.interval(k).lower() >= b.interval(k).lower() - 1e-15);
            prop_assert!(t1.interval(k).upper() <= b.interval(k).upper() + 1e-15);
            prop_assert!((t1.interval(k).lower() - t2.interval(k).lower()).abs() <= 1e-15);
            prop_assert!((t1.interval(k).upper() - t2.interval(k).upper()).abs() <= 1e-15);
        }
    }

    #[test]
    fn tighten_preserves_simplex_members(b in arb_box(4), seed in 0u64..10_000) {
        let t = tighten_reachable(&b).unwrap();
        let mut rng = SplitMix64::new(seed);
        // sample 3 coordinates freely in their intervals, force the 4th onto
        // the simplex, keep the point when it lands back inside the box
        let mut found = 0;
        for attempt in 0..2000 {
            if found >= 5 {
                break;
            }
            let dep = attempt % 4;
            let mut raw = [0.0f64; 4];
            let mut rest = 0.0;
            for (k, slot) in raw.iter_mut().enumerate() {
                if k == dep {
                    continue;
                }
                let iv = b.interval(k);
                *slot = iv.lower() + (iv.upper() - iv.lower()) * rng.next_f64();
                rest += *slot;
            }
            raw[dep] = 1.0 - rest;
            let iv = b.interval(dep);
            if raw[dep] < iv.lower() || raw[dep] > iv.upper() {
                continue;
            }
            found += 1;
            for (k, &v) in raw.iter().enumerate() {
                prop_assert!(v >= t.interval(k).lower() - 1e-12);
                prop_assert!(v <= t.interval(k).upper() + 1e-12);
            }
        }
    }

    #[test]
    fn boxes_nest_across_alpha(seed in 0u64..500) {
        let data = small_data(seed, 20, 3);
        let alphas: Vec<AlphaLevel> = [0.2, 0.5, 0.9]
            .iter()
            .map(|&a| AlphaLevel::new(a).unwrap())
            .collect();
        let model = fit(&data, &alphas, Mode::Base, &SolverConfig::default()).unwrap();
        let mut rng = SplitMix64::new(seed ^ 0x77);
        let z: Vec<f64> = (0..3).map(|_| 2.0 * rng.next_normal()).collect();
        let b_loose = predict_box(&model, &z, alphas[0]).unwrap();
        let b_mid = predict_box(&model, &z, alphas[1]).unwrap();
        let b_tight = predict_box(&model, &z, alphas[2]).unwrap();
        prop_assert!(is_nested(&b_tight, &b_mid));
        prop_assert!(is_nested(&b_mid, &b_loose));
    }

    #[test]
    fn auroc_complement(seed in 0u64..10_000) {
        let mut rng = SplitMix64::new(seed);
        let n_pos = 2 + rng.next_index(20);
        let n_neg = 2 + rng.next_index(20);
        let pos: Vec<f64> = (0..n_pos).map(|_| rng.next_normal()).collect();
        let neg: Vec<f64> = (0..n_neg).map(|_| rng.next_normal()).collect();
        let a = auroc(&pos, &neg).unwrap();
        let b = auroc(&neg, &pos).unwrap();
        prop_assert!((a + b - 1.0).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&a));
    }

    #[test]
    fn auroc_rank_invariance(seed in 0u64..10_000) {
        let mut rng = SplitMix64::new(seed);
        let pos: Vec<f64> = (0..12).map(|_| rng.next_normal()).collect();
        let neg: Vec<f64> = (0..15).map(|_| rng.next_normal()).collect();
        let a = auroc(&pos, &neg).unwrap();
        let f = |x: f64| (x * 0.7).tanh() * 3.0 + x.max(-5.0) * 0.01;
        let tp: Vec<f64> = pos.iter().map(|&x| f(x)).collect();
        let tn: Vec<f64> = neg.iter().map(|&x| f(x)).collect();
        prop_assert!((a - auroc(&tp, &tn).unwrap()).abs() < 1e-12);
    }
}
