mod common;

use bhl_core::attractor::{cloud_norm, hausdorff_sym, sample_ball};
use bhl_core::lattice::vector_field;
use bhl_core::reference::flow_state;
use bhl_core::stochastic::{
    absorbing_radius, derive_seed, ergodic_average, ou_path, pullback_along, pullback_sample, random_field,
    random_field_jvp, NoiseConfig, OUPath, OuTransition, PullbackMethod,
};
use bhl_core::{Error, LatticeWindow, Params, Space, TruncatedState, WindowPolicy};
use common::*;
use proptest::prelude::*;

type W = LatticeWindow<f64>;
type T = TruncatedState<f64>;

const F0: f64 = 1.4375 / 16.0;

fn forced() -> Params<f64> {
    Params::new(NU, ALPHA, BETA, GAMMA, 8.0, W::scaled_unit(0, F0)).unwrap()
}

fn unforced() -> Params<f64> {
    forced().with_force(W::zero())
}

fn sample_variance(z: &[f64]) -> f64 {
    let n = z.len() as f64;
    let mean = z.iter().sum::<f64>() / n;
    z.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
}

#[test]
fn ln2_transition() {
    let s = OuTransition::new(2f64.ln());
    assert!((s.decay - 0.5).abs() <= 1e-15);
    assert!((s.sd() - 0.6123724356957945).abs() <= 1e-15);
}

#[test]
fn stationary_variance_and_autocorrelation() {
    let h = 0.1;
    let path = ou_path(2024, -(99_999.0 * h), 0.0, h).unwrap();
    assert_eq!(path.len(), 100_000);
    let var = sample_variance(&path.z);
    assert!((0.45..=0.55).contains(&var), "variance {var}");
    // lag-one autocorrelation of the stationary process is e^{-h}
    let n = path.len();
    let mean = path.z.iter().sum::<f64>() / n as f64;
    let cov = (0..n - 1).map(|j| (path.z[j] - mean) * (path.z[j + 1] - mean)).sum::<f64>() / (n - 1) as f64;
    assert!((cov / var - (-h).exp()).abs() < 0.01);
}

#[test]
fn ergodic_average_over_long_horizon() {
    // seed 0 recorded as passing
    let path = ou_path(0, -10_000.0, 0.0, 0.01).unwrap();
    let avg = ergodic_average(&path);
    assert!(avg.abs() <= 0.05, "average {avg}");
    let twice = ergodic_average(&path.scaled(2.0));
    assert!((twice - 2.0 * avg).abs() <= 1e-12);
}

#[test]
fn zero_path_averages_to_zero() {
    let path = OUPath {
        z: vec![0.0; 20001],
        ..ou_path(1, -200.0, 0.0, 0.01).unwrap()
    };
    assert_eq!(ergodic_average(&path), 0.0);
}

#[test]
fn derived_seeds_are_distinct() {
    let seeds: std::collections::BTreeSet<u64> = (0..1000).map(|i| derive_seed(42, i)).collect();
    assert_eq!(seeds.len(), 1000);
    assert_ne!(derive_seed(1, 0), derive_seed(2, 0));
}

#[test]
fn sigma_continuity_constant_is_stable() {
    let p = forced();
    let u = W::new(-2, vec![0.3, -0.5, 0.6, 0.2, -0.1]).unwrap();
    let z = 0.8;
    let c = |s: f64| random_field(&p, s, z, &u).distance(&vector_field(&p, &u)) / s;
    let (c1, c2, c3) = (c(0.1), c(0.05), c(0.025));
    assert!(((c1 - c2) / c2).abs() < 0.1 && ((c2 - c3) / c3).abs() < 0.1, "{c1} {c2} {c3}");
}

#[test]
fn radius_limits() {
    let path = ou_path(3, -12.0, 0.0, 0.01).unwrap();
    assert_eq!(absorbing_radius(&unforced(), 0.4, &path, 1e-6).unwrap().value, 1.0);
    let p = forced();
    let gap = 8.0 - lambda_star(&DEFAULT);
    let r = absorbing_radius(&p, 0.0, &path, 1e-6).unwrap().value;
    assert!((r - (1.0 + F0 * F0 / (gap * gap))).abs() <= 1e-6);
    let half = p.clone().with_force(W::scaled_unit(0, F0 / 2.0));
    assert!(absorbing_radius(&half, 0.2, &path, 1e-6).unwrap().value <= absorbing_radius(&p, 0.2, &path, 1e-6).unwrap().value);
    let short = ou_path(3, -2.0, 0.0, 0.01).unwrap();
    assert!(matches!(absorbing_radius(&p, 0.2, &short, 1e-6), Err(Error::HorizonTooShort { .. })));
}

#[test]
fn radius_mean_is_stable_under_doubling() {
    let p = forced();
    let mean = |n: u64| -> f64 {
        (0..n)
            .map(|i| {
                let path = ou_path(derive_seed(9, i), -16.0, 0.0, 0.01).unwrap();
                absorbing_radius(&p, 0.4, &path, 1e-6).unwrap().value
            })
            .sum::<f64>()
            / n as f64
    };
    let (a, b) = (mean(20), mean(40));
    assert!(a.is_finite() && ((b - a) / a).abs() <= 0.05);
}

#[test]
fn zero_noise_pullback_is_the_deterministic_flow() {
    let p = forced();
    let cloud = sample_ball::<T>(1.0, Space::Truncated { m: 4 }, 6, 5).unwrap();
    let path = ou_path(8, -2.0, 0.0, 0.01).unwrap();
    let out = pullback_along(&p, 0.0, &path, 0.002, PullbackMethod::Rk4, &cloud).unwrap();
    for (a, b) in cloud.points().iter().zip(out.points()) {
        let det = flow_state(&p, a, 2.0, 0.002, &WindowPolicy::default()).unwrap();
        assert!(det.distance(b) <= 1e-9);
    }
    assert_eq!(out.meta.sigma, Some(0.0));
}

#[test]
fn unforced_zero_noise_pullback_decays() {
    let p = unforced();
    let gap = 8.0 - lambda_star(&DEFAULT);
    let t = (40.0 / gap / 0.01).ceil() * 0.01;
    let cloud = sample_ball::<T>(1.0, Space::Truncated { m: 3 }, 4, 6).unwrap();
    let path = ou_path(8, -t, 0.0, 0.01).unwrap();
    let out = pullback_along(&p, 0.0, &path, 0.005, PullbackMethod::Rk4, &cloud).unwrap();
    assert!(cloud_norm(&out) <= 1e-6);
}

#[test]
fn pullback_section_stabilizes_when_horizon_doubles() {
    let p = forced();
    let cloud = sample_ball::<T>(1.0, Space::Truncated { m: 4 }, 4, 7).unwrap();
    let short = ou_path(99, -8.0, 0.0, 0.01).unwrap();
    let long = ou_path(99, -16.0, 0.0, 0.01).unwrap();
    let a = pullback_along(&p, 0.2, &short, 0.005, PullbackMethod::Rk4, &cloud).unwrap();
    let b = pullback_along(&p, 0.2, &long, 0.005, PullbackMethod::Rk4, &cloud).unwrap();
    assert!(hausdorff_sym(&a, &b).unwrap() <= 1e-5);
}

#[test]
fn implicit_pullback_tracks_rk4() {
    let p = forced();
    let cloud = sample_ball::<T>(1.0, Space::Truncated { m: 3 }, 3, 1).unwrap();
    let noise = NoiseConfig {
        sigma: 0.2,
        pullback_t: 4.0,
        ..NoiseConfig::default()
    };
    let a = pullback_sample(&p, &noise, 0, 0.001, &cloud).unwrap();
    let b = pullback_sample(
        &p,
        &NoiseConfig {
            method: PullbackMethod::ImplicitEuler,
            ..noise.clone()
        },
        0,
        0.001,
        &cloud,
    )
    .unwrap();
    assert!(hausdorff_sym(&a, &b).unwrap() <= 1e-2);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn two_steps_compose_to_one(h in 1e-4f64..3.0) {
        let one = OuTransition::new(h);
        let two = one.then(&one);
        prop_assert!((two.decay - (-2.0 * h).exp()).abs() <= 1e-12);
        prop_assert!((two.variance - (1.0 - (-4.0 * h).exp()) / 2.0).abs() <= 1e-12);
        let direct = OuTransition::new(2.0 * h);
        prop_assert!((two.variance - direct.variance).abs() <= 1e-12);
    }

    #[test]
    fn paths_extend_backwards(seed in any::<u64>(), n in 1usize..200, extra in 1usize..200) {
        let h = 0.05;
        let a = ou_path(seed, -(n as f64) * h, 0.0, h).unwrap();
        let b = ou_path(seed, -((n + extra) as f64) * h, 0.0, h).unwrap();
        prop_assert_eq!(a.len(), n + 1);
        prop_assert_eq!(&b.z[extra..], &a.z[..]);
        prop_assert!(a.z.iter().all(|v| v.is_finite()));
        prop_assert_eq!(OUPath::from_json(&a.to_json().unwrap()).unwrap(), a);
    }

    #[test]
    fn zero_intensity_reduces_to_deterministic_field(u in any_state(), z in -5.0f64..5.0) {
        let p = forced();
        let a = random_field(&p, 0.0, z, &u);
        let b = vector_field(&p, &u);
        for i in -10..20 {
            prop_assert!((a.get(i) - b.get(i)).abs() <= 1e-15);
        }
    }

    #[test]
    fn random_field_matches_expanded_form(u in state_in_ball(2.0), sigma in 0.0f64..0.5, z in -3.0f64..3.0) {
        let p = forced();
        let a = (sigma * z).exp();
        let got = random_field(&p, sigma, z, &u);
        for i in -8..8i64 {
            let (l, c, r) = (u.get(i - 1), u.get(i), u.get(i + 1));
            let want = NU * (-l + 2.0 * c - r) - ALPHA * a * c * (l - c) - BETA * a * a * c.powi(3)
                + BETA * (1.0 + GAMMA) * a * c * c
                - BETA * GAMMA * c
                - 8.0 * c
                + p.f.get(i) / a
                + sigma * z * c;
            prop_assert!((got.get(i) - want).abs() <= 1e-12 * (1.0 + want.abs()));
        }
    }

    #[test]
    fn random_jvp_matches_central_differences(u in state_in_ball(1.0), v in state_in_ball(1.0), sigma in 0.0f64..0.5, z in -2.0f64..2.0) {
        let p = forced();
        let h = 1e-6;
        let fd = random_field(&p, sigma, z, &u.axpy(h, &v))
            .sub(&random_field(&p, sigma, z, &u.axpy(-h, &v)))
            .scale(0.5 / h);
        let jv = random_field_jvp(&p, sigma, z, &u, &v);
        prop_assert!(jv.distance(&fd) <= 1e-7 * (1.0 + jv.norm()));
    }
}
