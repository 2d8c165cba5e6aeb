//! Invariant checks across all modules, collected into one JSON report.

use bhl_core::attractor::{
    attractor_approx, cloud_from_json, cloud_norm, cloud_to_json, hausdorff_semi, hausdorff_semi_pruned,
    implicit_stepper, sample_ball, AttractorConfig, PointCloud,
};
use bhl_core::implicit::{picard_iteration_cap, step_residual, step_state};
use bhl_core::lattice::{d_minus, d_plus, laplacian, lambda_star_of, vector_field, LatticeWindow};
use bhl_core::reference::flow_state;
use bhl_core::stochastic::{absorbing_radius, ou_path, pullback_along, random_field, OuTransition};
use bhl_core::truncation::{d_minus_m, d_plus_m, laplacian_m, null_expansion};
use bhl_core::{Params, Space, TruncatedState, WindowPolicy};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::ExperimentConfig;
use crate::experiments::step_config;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub check_name: String,
    pub status: Status,
    pub witness: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub config_hash: String,
    pub master_seed: u64,
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status == Status::Pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| c.status == Status::Fail)
    }
}

/// `Ok((passed, witness))` or an error, which counts as a failure.
type Check = Result<(bool, Value), String>;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// Window clouds of every sample width `0..=4`, so that both spiky and
/// spread-out states are drawn.
fn ball_points(r: f64, per_width: usize, seed: u64) -> Result<Vec<LatticeWindow<f64>>, String> {
    let mut out = Vec::new();
    for hw in 0..=4usize {
        let c = sample_ball::<LatticeWindow<f64>>(r, Space::Window { half_width: hw }, per_width, seed + hw as u64)
            .map_err(err)?;
        out.extend(c.into_points());
    }
    Ok(out)
}

fn check_constants(p: &Params<f64>) -> Check {
    let c = p.derived_constants().map_err(err)?;
    let (nu, al, be, ga, la) = (p.nu, p.alpha, p.beta, p.gamma, p.lambda);
    let ls = 4.0 * nu + (2.0 * al + be + be * ga).powi(2) / (4.0 * be) - be * ga;
    let r = 1.0 + p.f_norm() / (la - ls);
    let m = |r: f64| be * r.powi(3) + (2.0 * al + be + be * ga) * r * r + (4.0 * nu + be * ga + la) * r + p.f_norm();
    let l = |r: f64| {
        4.0 * nu
            + 2.0 * 5f64.sqrt() * r * al
            + (12.0 * r * r * (1.0 + ga).powi(2) + 27.0 * r.powi(4) + 3.0 * ga * ga).sqrt() * be
            + la
    };
    let e = (1.0 / m(r + 1.0)).min(1.0 / (1.0 + l(r + 1.0)));
    let ok = (c.lambda_star - ls).abs() <= 1e-12 && (c.r_star - r).abs() <= 1e-12 && (c.eps_star - e).abs() <= 1e-12;
    Ok((ok, json!({"lambda_star": c.lambda_star, "r_star": c.r_star, "eps_star": c.eps_star})))
}

fn check_lipschitz(p: &Params<f64>, seed: u64) -> Check {
    let c = p.derived_constants().map_err(err)?;
    let mut worst_l: f64 = 0.0;
    let mut worst_m: f64 = 0.0;
    let mut pairs = 0;
    for (k, r) in [0.5, 1.0, c.r_star].into_iter().enumerate() {
        let us = ball_points(r, 200, seed + 10 * k as u64)?;
        let vs = ball_points(r, 200, seed + 10 * k as u64 + 100)?;
        for (u, v) in us.iter().zip(&vs) {
            let fu = vector_field(p, u);
            let fv = vector_field(p, v);
            worst_m = worst_m.max(fu.norm() / c.m_of_r(r));
            let d = u.distance(v);
            if d > 0.0 {
                worst_l = worst_l.max(fu.distance(&fv) / (c.l_of_r(r) * d));
            }
            pairs += 1;
        }
    }
    Ok((
        worst_l <= 1.0 && worst_m <= 1.0,
        json!({"pairs": pairs, "max_lipschitz_ratio": worst_l, "max_growth_ratio": worst_m}),
    ))
}

fn check_solver(p: &Params<f64>, cfg: &ExperimentConfig, seed: u64) -> Check {
    let c = p.derived_constants().map_err(err)?;
    let eps = cfg.grids.eps_list[0];
    let sc = step_config(cfg, eps);
    let cap = picard_iteration_cap(&c, eps, sc.fp_tol);
    let a = c.gap;
    let f2 = p.f_norm().powi(2);
    let mut worst_res: f64 = 0.0;
    let mut max_iter = 0;
    let mut max_norm: f64 = 0.0;
    let mut energy_excess = f64::NEG_INFINITY;
    let mut steps = 0;
    for u0 in ball_points(c.r_star, 20, seed)? {
        let mut u = u0;
        for _ in 0..100 {
            let out = step_state(p, &c, &sc, &u).map_err(err)?;
            worst_res = worst_res.max(step_residual(p, eps, &u, &out.state));
            max_iter = max_iter.max(out.iterations);
            max_norm = max_norm.max(out.state.norm());
            let bound = (u.norm_sq() + eps * f2 / a) / (1.0 + eps * a);
            energy_excess = energy_excess.max(out.state.norm_sq() - bound);
            u = out.state;
            steps += 1;
        }
    }
    let slack = 10.0 * sc.fp_tol;
    let ok = worst_res <= sc.fp_tol && max_iter <= cap && max_norm <= c.r_star + slack && energy_excess <= 2.0 * c.r_star * slack;
    Ok((
        ok,
        json!({"steps": steps, "max_residual": worst_res, "max_iterations": max_iter, "iteration_cap": cap,
               "max_norm": max_norm, "r_star": c.r_star, "max_energy_excess": energy_excess}),
    ))
}

fn check_operators(seed: u64) -> Check {
    let mut worst: f64 = 0.0;
    for u in ball_points(3.0, 20, seed)? {
        worst = worst.max(laplacian(&u).distance(&d_plus(&d_minus(&u))));
    }
    for m in [1usize, 2, 5, 8] {
        let cloud = sample_ball::<TruncatedState<f64>>(2.0, Space::Truncated { m }, 20, seed + m as u64).map_err(err)?;
        for x in cloud.points() {
            let lm = laplacian_m(x);
            worst = worst.max(lm.distance(&d_plus_m(&d_minus_m(x))));
            let full = laplacian(&null_expansion(x));
            for i in -(m as i64) + 1..m as i64 {
                worst = worst.max((lm.get(i) - full.get(i)).abs());
            }
        }
    }
    Ok((worst <= 1e-14, json!({"max_deviation": worst})))
}

fn check_hausdorff(seed: u64) -> Check {
    let mut mismatches = 0;
    for k in 0..20u64 {
        let a = sample_ball::<TruncatedState<f64>>(1.0, Space::Truncated { m: 2 }, 1 + (k as usize * 3) % 64, seed + k)
            .map_err(err)?;
        let b = sample_ball::<TruncatedState<f64>>(1.0, Space::Truncated { m: 2 }, 64 - (k as usize * 5) % 60, seed + 50 + k)
            .map_err(err)?;
        let x = hausdorff_semi(&a, &b).map_err(err)?;
        let y = hausdorff_semi_pruned(&a, &b).map_err(err)?;
        if x.to_bits() != y.to_bits() {
            mismatches += 1;
        }
    }
    Ok((mismatches == 0, json!({"pairs": 20, "mismatches": mismatches})))
}

fn check_ou() -> Check {
    let mut worst: f64 = 0.0;
    for h in [0.01, 0.1, 0.5, 2f64.ln()] {
        let one = OuTransition::new(h);
        let two = one.then(&one);
        worst = worst.max((two.decay - (-2.0 * h).exp()).abs());
        worst = worst.max((two.variance - (1.0 - (-4.0 * h).exp()) / 2.0).abs());
    }
    Ok((worst <= 1e-12, json!({"max_moment_error": worst})))
}

fn check_random_field(p: &Params<f64>, seed: u64) -> Check {
    let mut worst: f64 = 0.0;
    for (k, u) in ball_points(1.0, 20, seed)?.into_iter().enumerate() {
        let z = (k as f64 * 0.37).sin() * 3.0;
        let a = random_field(p, 0.0, z, &u);
        let b = vector_field(p, &u);
        worst = worst.max(a.distance(&b));
    }
    Ok((worst <= 1e-15, json!({"max_deviation": worst})))
}

fn check_radius(p: &Params<f64>, cfg: &ExperimentConfig) -> Check {
    let c = p.derived_constants().map_err(err)?;
    let tol = cfg.study.quad_tol;
    let horizon = (-tol.ln() / c.gap).ceil() + 1.0;
    let path = ou_path(cfg.seed(20), -horizon, 0.0, cfg.noise.h_path).map_err(err)?;
    let unforced = p.clone().with_force(LatticeWindow::zero());
    let r0 = absorbing_radius(&unforced, 0.3, &path, tol).map_err(err)?.value;
    let r = absorbing_radius(p, 0.0, &path, tol).map_err(err)?.value;
    let limit = 1.0 + p.f_norm().powi(2) / (c.gap * c.gap);
    Ok((
        r0 == 1.0 && (r - limit).abs() <= tol,
        json!({"unforced": r0, "sigma_zero": r, "limit": limit}),
    ))
}

fn check_pullback(p: &Params<f64>, cfg: &ExperimentConfig) -> Check {
    let c = p.derived_constants().map_err(err)?;
    let m = cfg.study.noise_m;
    let cloud = sample_ball::<TruncatedState<f64>>(c.r_star, Space::Truncated { m }, 4, cfg.seed(21)).map_err(err)?;
    let path = ou_path(cfg.seed(22), -1.0, 0.0, cfg.noise.h_path).map_err(err)?;
    let dt = cfg.study.noise_dt;
    let out = pullback_along(p, 0.0, &path, dt, Default::default(), &cloud).map_err(err)?;
    let mut worst: f64 = 0.0;
    for (a, b) in cloud.points().iter().zip(out.points()) {
        let det = flow_state(p, a, path.horizon(), dt, &WindowPolicy::default()).map_err(err)?;
        worst = worst.max(det.distance(b));
    }
    Ok((worst <= 1e-9, json!({"max_deviation": worst})))
}

fn check_trivial_attractor(p: &Params<f64>, cfg: &ExperimentConfig) -> Check {
    let unforced = p.clone().with_force(LatticeWindow::zero());
    let c = unforced.derived_constants().map_err(err)?;
    let eps = cfg.grids.eps_list[0];
    let ac = AttractorConfig {
        sample_count: 16,
        keep_snapshots: true,
        seed: cfg.seed(23),
        ..cfg.attractor.clone()
    };
    let step = implicit_stepper::<f64, TruncatedState<f64>>(&unforced, step_config(cfg, eps)).map_err(err)?;
    let m = cfg.grids.m_list[0];
    let run = attractor_approx(&step, &ac, ac.burn_in_for(eps, c.gap), c.r_star, Space::Truncated { m })
        .map_err(|e| err(bhl_core::Error::from(e)))?;
    let norm = cloud_norm(&run.cloud);
    let dists: Vec<f64> = run
        .snapshots
        .iter()
        .map(|s| hausdorff_semi(s, &run.cloud).map_err(err))
        .collect::<Result<_, _>>()?;
    let tol = ac.stabilization_tol;
    let monotone = dists.windows(2).all(|w| w[1] <= w[0] + tol);
    Ok((norm <= 1e-6 && monotone, json!({"norm": norm, "snapshot_distances": dists})))
}

fn check_cloud_io(seed: u64) -> Check {
    let w = sample_ball::<LatticeWindow<f64>>(1.0, Space::Window { half_width: 3 }, 8, seed).map_err(err)?;
    let back: PointCloud<LatticeWindow<f64>> = cloud_from_json(&cloud_to_json(&w).map_err(err)?).map_err(err)?;
    let same = w
        .points()
        .iter()
        .zip(back.points())
        .all(|(a, b)| (-3..=3).all(|i| a.get(i).to_bits() == b.get(i).to_bits()));
    Ok((same && back.meta == w.meta, json!({"points": w.len()})))
}

fn check_dissipativity(p: &Params<f64>) -> Check {
    match p.derived_constants() {
        Ok(c) => Ok((true, json!({"lambda": p.lambda, "lambda_star": c.lambda_star}))),
        Err(e) => Ok((
            false,
            json!({"error": e.to_string(), "lambda": p.lambda,
                   "lambda_star": lambda_star_of(p.nu, p.alpha, p.beta, p.gamma)}),
        )),
    }
}

/// Runs every check. The report holds no timings, so it depends only on
/// the configuration.
pub fn run_verify(cfg: &ExperimentConfig) -> VerifyReport {
    let seed = cfg.seed(100);
    let mut checks = Vec::new();
    let mut record = |name: &str, r: Check| {
        let (status, witness) = match r {
            Ok((true, w)) => (Status::Pass, w),
            Ok((false, w)) => (Status::Fail, w),
            Err(e) => (Status::Fail, json!({ "error": e })),
        };
        checks.push(CheckResult {
            check_name: name.to_string(),
            status,
            witness,
        });
    };
    match cfg.params() {
        Err(e) => record("params", Err(e.to_string())),
        Ok(p) => {
            record("dissipativity", check_dissipativity(&p));
            record("closed_form_constants", check_constants(&p));
            record("growth_and_lipschitz_bounds", check_lipschitz(&p, seed));
            record("implicit_solver_contract", check_solver(&p, cfg, seed + 1));
            record("operator_algebra", check_operators(seed + 2));
            record("hausdorff_pruning_oracle", check_hausdorff(seed + 3));
            record("ou_exact_moments", check_ou());
            record("random_field_reduction", check_random_field(&p, seed + 4));
            record("absorbing_radius_limits", check_radius(&p, cfg));
            record("pullback_zero_noise", check_pullback(&p, cfg));
            record("trivial_attractor", check_trivial_attractor(&p, cfg));
            record("cloud_round_trip", check_cloud_io(seed + 5));
        }
    }
    VerifyReport {
        config_hash: cfg.hash(),
        master_seed: cfg.master_seed,
        checks,
    }
}
