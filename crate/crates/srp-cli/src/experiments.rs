//! The experiment drivers, one per config kind.
//!
//! Every driver writes its plot-ready CSVs into the output directory and
//! returns summary metrics; the caller persists those as `summary.csv`.
//! All Monte Carlo averaging loops run in a fixed order over the
//! configured seeds, and every random stream is derived from (seed,
//! particle counter), so outputs are byte-identical across runs and
//! thread counts.

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::csvout::{write_csv, Summary};
use anyhow::{bail, Context, Result};
use srp_core::burgers::{self, PdeCheckConfig};
use srp_core::fit::{fit_b, FitOptions, ObservationSet};
use srp_core::timechange::{
    timechange_limit, timechange_observable, zipf_mixture, zipf_weights_and_z, CurveForm,
    RankingCurve,
};
use srp_core::{Layout, LimitEvaluator, ParticleSystem};
use std::path::Path;

/// Runs one experiment, writing its tables under `out_dir`.
pub fn run_experiment(config: &ExperimentConfig, out_dir: &Path) -> Result<Summary> {
    std::fs::create_dir_all(out_dir)
        .with_context(|| format!("cannot create output directory {}", out_dir.display()))?;
    match config.kind {
        ExperimentKind::BoundaryConvergence | ExperimentKind::SupNormSweep => {
            boundary_sweep(config, out_dir)
        }
        ExperimentKind::TailConvergence => tail_convergence(config, out_dir),
        ExperimentKind::PdeResidual => pde_residual(config, out_dir),
        ExperimentKind::Timechange => timechange(config, out_dir),
        ExperimentKind::Fit => fit(config, out_dir),
    }
}

/// Seed-averaged empirical boundary curve and its per-seed sups against
/// the limit. Shared by `boundary_convergence` (coarse grid, convergence
/// in N) and `sup_norm_sweep` (dense grid, uniform-in-time deviation).
fn boundary_sweep(config: &ExperimentConfig, out_dir: &Path) -> Result<Summary> {
    let kind = config.kind;
    let mixture = config.require_mixture()?;
    let layout = config.require_layout()?;
    let seeds = config.require_seeds()?;
    let times = config.require_grid("time_grid")?;
    let horizon = config.require_horizon(*times.last().expect("non-empty grid"))?;
    let ev = LimitEvaluator::new(&mixture, layout);
    let limit: Vec<f64> = times
        .iter()
        .map(|&t| ev.y_c(t).map_err(anyhow::Error::from))
        .collect::<Result<_>>()?;

    write_csv(
        &out_dir.join(format!("{kind}_limit.csv")),
        "t,Yc_limit",
        times
            .iter()
            .zip(&limit)
            .map(|(&t, &y)| format!("{t},{y}")),
    )?;

    let mut summary = Summary::default();
    for &n in config.require_n_list()? {
        let mut avg = vec![0.0; times.len()];
        let mut worst_seed_sup = 0.0f64;
        for &seed in seeds {
            let system = ParticleSystem::init(n, &mixture, layout, horizon, seed)?;
            let mut seed_sup = 0.0f64;
            for (j, &t) in times.iter().enumerate() {
                let y = system.boundary_fraction(t)?;
                avg[j] += y;
                seed_sup = seed_sup.max((y - limit[j]).abs());
            }
            worst_seed_sup = worst_seed_sup.max(seed_sup);
        }
        for v in &mut avg {
            *v /= seeds.len() as f64;
        }

        write_csv(
            &out_dir.join(format!("{kind}_{n}.csv")),
            "t,Yc_emp",
            times.iter().zip(&avg).map(|(&t, &y)| format!("{t},{y}")),
        )?;

        let sup = times
            .iter()
            .enumerate()
            .map(|(j, _)| (avg[j] - limit[j]).abs())
            .fold(0.0f64, f64::max);
        summary.push(kind, n, "sup_abs_dev", sup);
        summary.push(kind, n, "max_seed_sup", worst_seed_sup);
    }
    Ok(summary)
}

/// Seed-averaged per-class empirical tails on a (y, t) grid against the
/// closed-form limit tails.
fn tail_convergence(config: &ExperimentConfig, out_dir: &Path) -> Result<Summary> {
    let kind = config.kind;
    let mixture = config.require_mixture()?;
    let layout = config.require_layout()?;
    let seeds = config.require_seeds()?;
    let times = config.require_grid("time_grid")?;
    let y_grid = config.require_grid("y_grid")?;
    if y_grid.iter().any(|&y| !(0.0..1.0).contains(&y)) {
        bail!("y_grid: values must lie in [0, 1)");
    }
    let horizon = config.require_horizon(*times.last().expect("non-empty grid"))?;
    let k = mixture.n_classes();
    let ev = LimitEvaluator::new(&mixture, layout);

    let mut limit_rows = Vec::new();
    let mut limit = vec![vec![vec![0.0; y_grid.len()]; k]; times.len()];
    for (ti, &t) in times.iter().enumerate() {
        for (yi, &y) in y_grid.iter().enumerate() {
            let tails = ev.limit_tail(y, t)?;
            for (alpha, &u) in tails.iter().enumerate() {
                limit[ti][alpha][yi] = u;
                limit_rows.push(format!("{t},{y},{alpha},{u}"));
            }
        }
    }
    write_csv(
        &out_dir.join(format!("{kind}_limit.csv")),
        "t,y,alpha,U_limit",
        &limit_rows,
    )?;

    let mut summary = Summary::default();
    for &n in config.require_n_list()? {
        let mut avg = vec![vec![vec![0.0; y_grid.len()]; k]; times.len()];
        for &seed in seeds {
            let system = ParticleSystem::init(n, &mixture, layout, horizon, seed)?;
            for (ti, &t) in times.iter().enumerate() {
                let tails = system.empirical_tail(t, &y_grid)?;
                for alpha in 0..k {
                    for yi in 0..y_grid.len() {
                        avg[ti][alpha][yi] += tails[alpha][yi];
                    }
                }
            }
        }
        let scale = 1.0 / seeds.len() as f64;
        let mut rows = Vec::new();
        let mut max_dev = 0.0f64;
        for (ti, &t) in times.iter().enumerate() {
            for (yi, &y) in y_grid.iter().enumerate() {
                for alpha in 0..k {
                    let u = avg[ti][alpha][yi] * scale;
                    rows.push(format!("{t},{y},{alpha},{u}"));
                    max_dev = max_dev.max((u - limit[ti][alpha][yi]).abs());
                }
            }
        }
        write_csv(
            &out_dir.join(format!("{kind}_{n}.csv")),
            "t,y,alpha,U_emp",
            &rows,
        )?;
        summary.push(kind, n, "max_abs_dev", max_dev);
    }
    Ok(summary)
}

/// Central-difference residuals of the limit PDE at the configured h and
/// at h/2, plus exactness of the boundary and initial data.
fn pde_residual(config: &ExperimentConfig, out_dir: &Path) -> Result<Summary> {
    let kind = config.kind;
    let mixture = config.require_mixture()?;
    let layout = config.require_layout()?;
    if layout != Layout::Proportional {
        bail!("layout: PDE residuals need the proportional layout");
    }
    let times = config.require_grid("time_grid")?;
    let side = config.require_grid_side()?;
    let h = config.require_h()?;
    // inversion noise must sit far below the O(h²) truncation error
    let ev = LimitEvaluator::new(&mixture, layout).with_inversion_tolerance(1e-15);

    let mut rows = Vec::new();
    let mut max_at = [0.0f64; 2];
    for (pass, h_run) in [h, 0.5 * h].into_iter().enumerate() {
        let cfg = PdeCheckConfig {
            h: h_run,
            ..PdeCheckConfig::default()
        };
        let samples = burgers::residual_grid(&ev, &cfg, &times, side)?;
        for sample in &samples {
            for (alpha, &r) in sample.residuals.iter().enumerate() {
                rows.push(format!(
                    "{},{},{alpha},{r},{}",
                    sample.y, sample.t, sample.h
                ));
                max_at[pass] = max_at[pass].max(r.abs());
            }
        }
    }
    write_csv(
        &out_dir.join(format!("{kind}_{side}.csv")),
        "y,t,alpha,residual,h",
        &rows,
    )?;

    let boundary_dev = times
        .iter()
        .map(|&t| -> Result<f64> {
            let u = ev.limit_tail(0.0, t)?;
            Ok(u.iter()
                .zip(ev.atoms())
                .map(|(&v, atom)| (v - atom.weight).abs())
                .fold(0.0, f64::max))
        })
        .try_fold(0.0f64, |m, v| v.map(|v| m.max(v)))?;
    let initial_dev = (0..side)
        .map(|j| -> Result<f64> {
            let y = 0.99 * j as f64 / (side - 1) as f64;
            let u = ev.limit_tail(y, 0.0)?;
            Ok(u.iter()
                .enumerate()
                .map(|(alpha, &v)| (v - ev.initial_tail(alpha, y)).abs())
                .fold(0.0, f64::max))
        })
        .try_fold(0.0f64, |m, v| v.map(|v| m.max(v)))?;

    let mut summary = Summary::default();
    summary.push(kind, side, "max_residual", max_at[0]);
    summary.push(kind, side, "max_residual_half_h", max_at[1]);
    summary.push(kind, side, "order_ratio", max_at[0] / max_at[1]);
    summary.push(kind, side, "boundary_dev", boundary_dev);
    summary.push(kind, side, "initial_dev", initial_dev);
    Ok(summary)
}

/// The time-changed boundary observable against its profile-free limit,
/// plus the two analytic forms of the ranking curve on the same S axis.
fn timechange(config: &ExperimentConfig, out_dir: &Path) -> Result<Summary> {
    let kind = config.kind;
    let seeds = config.require_seeds()?;
    let profile = config.require_profile()?;
    let t_grid = config.require_grid("scaled_time_grid")?;
    let t_max = *t_grid.last().expect("non-empty grid");
    let horizon = config.require_horizon(t_max)?;

    let mut summary = Summary::default();
    for &n in config.require_n_list()? {
        let fam = config.require_zipf(n)?;
        if fam.b() >= 1.0 {
            bail!("zipf.b: the Γ-form curve column needs 0 < b < 1");
        }
        let (weights, _, z_total) = zipf_weights_and_z(&fam, n)?;
        let mixture = zipf_mixture(&fam, &profile)?;

        let mut avg = vec![0.0; t_grid.len()];
        for &seed in seeds {
            let system =
                ParticleSystem::init(n, &mixture, Layout::Proportional, horizon, seed)?;
            for (j, &t) in t_grid.iter().enumerate() {
                avg[j] += timechange_observable(&system, z_total, t)?;
            }
        }
        for v in &mut avg {
            *v /= seeds.len() as f64;
        }
        let limit: Vec<f64> = t_grid.iter().map(|&t| timechange_limit(&weights, t)).collect();

        write_csv(
            &out_dir.join(format!("{kind}_{n}.csv")),
            "t_scaled,Yc_timechanged,Yc_limit",
            t_grid
                .iter()
                .zip(avg.iter().zip(&limit))
                .map(|(&t, (&y, &l))| format!("{t},{y},{l}")),
        )?;

        let sum_curve = RankingCurve::new(n, fam.b(), CurveForm::Sum)?;
        let gamma_curve = RankingCurve::new(n, fam.b(), CurveForm::Gamma)?;
        write_csv(
            &out_dir.join(format!("{kind}_curve_{n}.csv")),
            "S,x_sum_form,x_gamma_form",
            t_grid
                .iter()
                .map(|&t| -> Result<String> {
                    let s = z_total * t;
                    Ok(format!(
                        "{s},{},{}",
                        sum_curve.x_at(s)?,
                        gamma_curve.x_at(s)?
                    ))
                })
                .collect::<Result<Vec<_>>>()?,
        )?;

        let max_dev = avg
            .iter()
            .zip(&limit)
            .map(|(&y, &l)| (y - l).abs())
            .fold(0.0f64, f64::max);
        summary.push(kind, n, "max_abs_dev", max_dev);
        summary.push(kind, n, "z_total", z_total);
    }
    Ok(summary)
}

fn read_observations(path: &Path, n: usize) -> Result<ObservationSet> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read observations {}", path.display()))?;
    let mut lines = text.lines();
    match lines.next() {
        Some("S,x") => {}
        other => bail!(
            "fit_input: expected header \"S,x\", found {:?}",
            other.unwrap_or("")
        ),
    }
    let records = lines
        .enumerate()
        .filter(|(_, line)| !line.trim().is_empty())
        .map(|(i, line)| {
            let mut parts = line.splitn(2, ',');
            let parse = |part: Option<&str>| -> Result<f64> {
                part.map(str::trim)
                    .ok_or_else(|| anyhow::anyhow!("fit_input: line {} malformed", i + 2))?
                    .parse::<f64>()
                    .with_context(|| format!("fit_input: line {} malformed", i + 2))
            };
            Ok((parse(parts.next())?, parse(parts.next())?))
        })
        .collect::<Result<Vec<_>>>()?;
    ObservationSet::new(n, records).context("fit_input: invalid records")
}

/// Synthetic (S, x) records from one simulated trajectory of the
/// time-changed boundary position.
fn generate_observations(
    config: &ExperimentConfig,
    n: usize,
    seed: u64,
) -> Result<ObservationSet> {
    let profile = config.require_profile()?;
    let t_grid = config.require_grid("scaled_time_grid")?;
    let t_max = *t_grid.last().expect("non-empty grid");
    let horizon = config.require_horizon(t_max)?;
    let fam = config.require_zipf(n)?;
    let (_, _, z_total) = zipf_weights_and_z(&fam, n)?;
    let mixture = zipf_mixture(&fam, &profile)?;
    let system = ParticleSystem::init(n, &mixture, Layout::Proportional, horizon, seed)?;
    let records = t_grid
        .iter()
        .map(|&t| -> Result<(f64, f64)> {
            let y = timechange_observable(&system, z_total, t)?;
            let x = (n as f64 * y + 1.0).min(n as f64);
            Ok((z_total * t, x))
        })
        .collect::<Result<Vec<_>>>()?;
    ObservationSet::new(n, records).context("generated observations invalid")
}

/// Exponent recovery: read or simulate (S, x) records, fit b, report the
/// estimate with its bootstrap confidence half-width.
fn fit(config: &ExperimentConfig, out_dir: &Path) -> Result<Summary> {
    let kind = config.kind;
    let seeds = config.require_seeds()?;
    let mut summary = Summary::default();
    for &n in config.require_n_list()? {
        let obs = match &config.fit_input {
            Some(path) => read_observations(path, n)?,
            None => generate_observations(config, n, seeds[0])?,
        };
        write_csv(
            &out_dir.join(format!("{kind}_obs_{n}.csv")),
            "S,x",
            obs.records().iter().map(|&(s, x)| format!("{s},{x}")),
        )?;

        let options = FitOptions {
            seed: seeds[0],
            ..FitOptions::default()
        };
        let result = fit_b(&obs, &options)?;
        write_csv(
            &out_dir.join(format!("{kind}_{n}.csv")),
            "b_hat,rms,ci90",
            [format!(
                "{},{},{}",
                result.b_hat, result.residual_norm, result.ci_halfwidth
            )],
        )?;
        summary.push(kind, n, "b_hat", result.b_hat);
        summary.push(kind, n, "rms", result.residual_norm);
        summary.push(kind, n, "ci90", result.ci_halfwidth);
    }
    Ok(summary)
}
