use bhl_core::attractor::{
    attractor_approx, cloud_from_json, cloud_norm, cloud_to_json, hausdorff_semi, hausdorff_semi_pruned,
    hausdorff_sym, implicit_stepper, sample_ball, tail_profile, AttractorConfig, CloudMeta, PointCloud,
};
use bhl_core::implicit::StepConfig;
use bhl_core::{LatticeWindow, Params, Space, TruncatedState};
use proptest::prelude::*;

type T = TruncatedState<f64>;
type W = LatticeWindow<f64>;

fn cloud(m: usize, n: usize, seed: u64, r: f64) -> PointCloud<T> {
    sample_ball(r, Space::Truncated { m }, n, seed).unwrap()
}

/// Brute-force `sup_a inf_b ||a - b||` from raw coordinates.
fn brute(a: &PointCloud<T>, b: &PointCloud<T>) -> f64 {
    let d = |x: &T, y: &T| -> f64 {
        x.values()
            .iter()
            .zip(y.values())
            .map(|(p, q)| (p - q) * (p - q))
            .sum::<f64>()
            .sqrt()
    };
    a.points()
        .iter()
        .map(|x| b.points().iter().map(|y| d(x, y)).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

#[test]
fn uniform_ball_radial_mean() {
    // E ||x|| / r = d / (d + 1) for the uniform ball in R^d
    let c = cloud(1, 20000, 7, 2.0);
    let mean = c.points().iter().map(|p| p.norm() / 2.0).sum::<f64>() / c.len() as f64;
    assert!((mean - 0.75).abs() < 0.01, "radial mean {mean}");
    assert!(c.points().iter().all(|p| p.norm() <= 2.0));
}

#[test]
fn sampling_is_seeded() {
    let a = cloud(3, 10, 11, 1.0);
    let b = cloud(3, 10, 11, 1.0);
    let c = cloud(3, 10, 12, 1.0);
    assert_eq!(a.points(), b.points());
    assert_ne!(a.points(), c.points());
}

#[test]
fn mismatched_spaces_are_rejected() {
    let a = cloud(2, 4, 1, 1.0);
    let b = cloud(3, 4, 1, 1.0);
    assert!(hausdorff_semi(&a, &b).is_err());
}

#[test]
fn unforced_window_attractor_is_the_origin() {
    let p = Params::new(1.0, 1.0, 1.0, 0.5, 8.0, W::zero()).unwrap();
    let c = p.derived_constants().unwrap();
    let cfg = AttractorConfig {
        sample_count: 16,
        ..AttractorConfig::default()
    };
    let step = implicit_stepper::<f64, W>(&p, StepConfig::new(0.02)).unwrap();
    let run = attractor_approx(&step, &cfg, cfg.burn_in_for(0.02, c.gap), 1.0, Space::Window { half_width: 4 })
        .unwrap();
    assert!(cloud_norm(&run.cloud) <= 1e-6);
    assert!(tail_profile(&run.cloud, 1) <= 1e-12);
}

#[test]
fn forced_attractor_is_within_norm_bound() {
    let f = 1.4375 / 16.0;
    let p = Params::new(1.0, 1.0, 1.0, 0.5, 8.0, W::scaled_unit(0, f)).unwrap();
    let c = p.derived_constants().unwrap();
    let cfg = AttractorConfig {
        sample_count: 16,
        ..AttractorConfig::default()
    };
    let step = implicit_stepper::<f64, T>(&p, StepConfig::new(0.02)).unwrap();
    let run = attractor_approx(&step, &cfg, cfg.burn_in_for(0.02, c.gap), c.r_star, Space::Truncated { m: 6 })
        .unwrap();
    let n = cloud_norm(&run.cloud);
    assert!(n > 0.0 && n <= f / c.gap + 2.0 * cfg.stabilization_tol);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pruned_and_parallel_match_brute_force(na in 1usize..64, nb in 1usize..64, seed in 0u64..1000) {
        let a = cloud(2, na, seed, 1.0);
        let b = cloud(2, nb, seed + 5000, 1.5);
        let want = brute(&a, &b);
        prop_assert_eq!(hausdorff_semi(&a, &b).unwrap().to_bits(), want.to_bits());
        prop_assert_eq!(hausdorff_semi_pruned(&a, &b).unwrap().to_bits(), want.to_bits());
    }

    #[test]
    fn hausdorff_metric_properties(seed in 0u64..1000, c in 0.1f64..4.0) {
        let a = cloud(2, 12, seed, 1.0);
        let b = cloud(2, 9, seed + 1, 1.0);
        let z = cloud(2, 7, seed + 2, 2.0);
        prop_assert_eq!(hausdorff_semi(&a, &a).unwrap(), 0.0);
        let ab = hausdorff_semi(&a, &b).unwrap();
        let bz = hausdorff_semi(&b, &z).unwrap();
        let az = hausdorff_semi(&a, &z).unwrap();
        prop_assert!(az <= ab + bz + 1e-12);
        let scaled = hausdorff_semi(&a.scaled(c), &b.scaled(c)).unwrap();
        prop_assert!((scaled - c * ab).abs() <= 1e-12 * (1.0 + c * ab));
        let sym = hausdorff_sym(&a, &b).unwrap();
        prop_assert!(sym >= ab && sym == hausdorff_sym(&b, &a).unwrap());
        // A subset of B gives d(A, B) = 0
        let sub = PointCloud::new(b.points()[..3].to_vec(), CloudMeta::default()).unwrap();
        prop_assert_eq!(hausdorff_semi(&sub, &b).unwrap(), 0.0);
    }

    #[test]
    fn cloud_json_round_trip(seed in 0u64..1000, hw in 0usize..5) {
        let w: PointCloud<W> = sample_ball(1.0, Space::Window { half_width: hw }, 5, seed).unwrap();
        let back: PointCloud<W> = cloud_from_json(&cloud_to_json(&w).unwrap()).unwrap();
        prop_assert_eq!(back.meta.clone(), w.meta.clone());
        for (a, b) in w.points().iter().zip(back.points()) {
            let h = hw as i64;
            for i in -h..=h {
                prop_assert_eq!(a.get(i).to_bits(), b.get(i).to_bits());
            }
        }
        let t = cloud(hw + 1, 4, seed, 1.0);
        let back: PointCloud<T> = cloud_from_json(&cloud_to_json(&t).unwrap()).unwrap();
        prop_assert_eq!(back.points(), t.points());
    }
}
