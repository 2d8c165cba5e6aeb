use bhl_core::attractor::{cloud_norm, hausdorff_semi, sample_ball};
use bhl_core::stochastic::{absorbing_radius, pullback_along};
use bhl_core::{Error, Space, TruncatedState};
use rayon::prelude::*;

use super::{reference_attractor, Outcome};
use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::table::ResultTable;

fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Pullback samples of the truncated random attractor against the
/// deterministic truncated attractor, per noise intensity.
pub fn run_noise_convergence(cfg: &ExperimentConfig) -> Result<Outcome> {
    cfg.validate()?;
    let p = cfg.params()?;
    let consts = p.derived_constants()?;
    let m = cfg.study.noise_m;
    let space = Space::Truncated { m };
    let det = reference_attractor::<TruncatedState<f64>>(&p, cfg, space, cfg.seed(2))?;
    let initial = sample_ball::<TruncatedState<f64>>(consts.r_star, space, cfg.study.noise_cloud, cfg.seed(3))?;
    let realizations = cfg.noise.realizations;
    let sigmas = &cfg.grids.sigma_list;
    let dt = cfg.study.noise_dt;

    // one OU path per realization, shared by every sigma
    let base = cfg.noise_at(0.0);
    let paths = (0..realizations as u64).map(|i| base.path(i)).collect::<Result<Vec<_>, Error>>()?;
    let jobs: Vec<(usize, usize)> = (0..sigmas.len()).flat_map(|s| (0..realizations).map(move |r| (s, r))).collect();
    let results = jobs
        .par_iter()
        .map(|&(s, r)| -> Result<Option<(f64, f64)>> {
            let sigma = sigmas[s];
            let sample = match pullback_along(&p, sigma, &paths[r], dt, base.method, &initial) {
                Ok(c) => c,
                Err(Error::NonFinite(what)) => {
                    log::warn!("sigma = {sigma}, realization {r}: non-finite ({what}); excluded");
                    return Ok(None);
                }
                Err(e) => return Err(e.into()),
            };
            let d = hausdorff_semi(&sample.to_window_cloud(), &det.cloud.to_window_cloud())?;
            let radius = absorbing_radius(&p, sigma, &paths[r], cfg.study.quad_tol)?;
            Ok(Some((d, radius.value)))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut table = ResultTable::new(
        "converge_noise",
        cfg,
        &[
            "sigma",
            "mean_distance",
            "max_distance",
            "se_distance",
            "realizations",
            "failed",
            "mean_radius",
            "se_radius",
        ],
    );
    for (s, &sigma) in sigmas.iter().enumerate() {
        let row = &results[s * realizations..(s + 1) * realizations];
        let ok: Vec<(f64, f64)> = row.iter().flatten().copied().collect();
        let d: Vec<f64> = ok.iter().map(|x| x.0).collect();
        let r: Vec<f64> = ok.iter().map(|x| x.1).collect();
        let (dm, dse) = mean_se(&d);
        let (rm, rse) = mean_se(&r);
        let dmax = d.iter().copied().fold(f64::NAN, f64::max);
        table.push_row(&[
            sigma,
            dm,
            dmax,
            dse,
            ok.len() as f64,
            (realizations - ok.len()) as f64,
            rm,
            rse,
        ]);
    }

    let mean = table.column("mean_distance").unwrap_or_default().to_vec();
    let se = table.column("se_distance").unwrap_or_default().to_vec();
    let positive: Vec<usize> = (0..sigmas.len()).filter(|&i| sigmas[i] > 0.0).collect();
    let trend_ok = positive
        .windows(2)
        .all(|w| mean[w[1]] <= mean[w[0]] + se[w[0]].max(se[w[1]]));
    let f2 = p.f_norm().powi(2);
    let radius_limit = 1.0 + f2 / (consts.gap * consts.gap);
    table.set("m", m);
    table.set("dt", dt);
    table.set("pullback_t", cfg.noise.pullback_t);
    table.set("h_path", cfg.noise.h_path);
    table.set("cloud_size", initial.len());
    table.set("trend_ok", trend_ok);
    table.set("trend_slack", "one standard error");
    table.set("radius_limit", radius_limit);
    table.set("quad_tol", cfg.study.quad_tol);
    table.set("deterministic_norm", cloud_norm(&det.cloud));
    if let Some(z) = sigmas.iter().position(|&s| s == 0.0) {
        table.set("zero_row_distance", mean[z]);
        let rz = table.column("mean_radius").unwrap_or_default()[z];
        table.set("zero_row_radius_error", (rz - radius_limit).abs());
    }
    table.finish();
    let mut outcome = Outcome::new(table);
    outcome.add_cloud(&format!("deterministic_m{m}"), &det.cloud)?;
    Ok(outcome)
}
