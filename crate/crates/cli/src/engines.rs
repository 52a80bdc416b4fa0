//! Runs a validated configuration and collects output files in memory.

use anyhow::{Context, Result};
use rayon::prelude::*;
use serde_json::{json, Value};

use tatspin::bosonic::{self, BosonicParams};
use tatspin::collective::tat_moments;
use tatspin::dtwa::{self, DtwaConfig, IntegratorOptions};
use tatspin::observables::{
    detect_crossover, optimal_squeezing, peak_variance_scaling, series_peak, squeezing_exponent, time_scaling,
};
use tatspin::series::Series;
use tatspin::spinwave::{self, rsw_observables, stability_map};
use tatspin::{LatticeSpec, Observable, ObservableSeries};

use crate::config::{Engine, ExperimentConfig};

/// Everything a run produces, before anything touches the disk.
#[derive(Debug, Default)]
pub struct Outcome {
    /// `(file name, contents)` in a fixed order.
    pub files: Vec<(String, String)>,
    pub warnings: Vec<String>,
    /// Engine-specific metadata for the manifest.
    pub details: Vec<Value>,
}

struct SeriesRun {
    series: ObservableSeries,
    details: Option<Value>,
}

fn point_label(engine: Engine, field: f64, size: usize) -> String {
    let key = if engine.counts_spins() { "n" } else { "l" };
    format!("{}_omega{field}_{key}{size}", engine.name())
}

fn lattice(config: &ExperimentConfig, l: usize) -> Result<LatticeSpec> {
    Ok(LatticeSpec::new(config.dimension, l, config.alpha, config.coupling)?)
}

fn run_series(config: &ExperimentConfig, engine: Engine, field: f64, size: usize) -> Result<SeriesRun> {
    let grid = config.time_grid();
    let run = match engine {
        Engine::Collective => {
            let moments = tat_moments(size, field, config.coupling, &grid)?;
            SeriesRun { series: ObservableSeries::from_moments("collective", size, &moments, None), details: None }
        }
        Engine::Bosonic => SeriesRun { series: bosonic_series(config, field, size)?, details: None },
        Engine::Rsw => {
            let spec = lattice(config, size)?;
            let r = rsw_observables(&spec, field, &grid, &config.correlation_times)?;
            let details = json!({
                "engine": "rsw", "omega": field, "L": size,
                "lambda_eff": r.spectrum.lambda_eff,
                "lambda_max": r.spectrum.lambda_max(),
                "breakdown_time": r.breakdown_time,
            });
            SeriesRun { series: r.series, details: Some(details) }
        }
        Engine::Dtwa => {
            let spec = lattice(config, size)?;
            let mut dc = DtwaConfig::new(config.trajectories, config.seed);
            dc.correlation_times = config.correlation_times.clone();
            dc.options = IntegratorOptions {
                energy_tolerance: config.energy_tolerance,
                length_tolerance: config.length_tolerance,
                ..IntegratorOptions::default()
            };
            let r = dtwa::run(&spec, field, &grid, &dc)?;
            SeriesRun { series: r.series, details: Some(serde_json::to_value(&r.metadata)?) }
        }
        Engine::Stability | Engine::Scaling => unreachable!("validated: not a series engine"),
    };
    Ok(run)
}

/// Linearised collective-spin model: squeezing, `Var(J^y)` and the depleted
/// `<J^x>`; stops where the mode population reaches `N / 2`.
fn bosonic_series(config: &ExperimentConfig, field: f64, n: usize) -> Result<ObservableSeries> {
    let grid = config.time_grid();
    let params = BosonicParams::new(field, config.coupling)?;
    let mut valid = grid.len();
    for (i, t) in grid.iter().enumerate() {
        if !bosonic::squeezing_estimate(&params, n, *t).valid {
            valid = i;
            break;
        }
    }
    let mut out = ObservableSeries::new("bosonic", n, grid[..valid].to_vec());
    let est: Vec<_> = grid[..valid].iter().map(|t| bosonic::squeezing_estimate(&params, n, *t)).collect();
    out.series.insert(Observable::Xi2, Series::exact(est.iter().map(|e| e.xi2).collect()));
    out.series.insert(
        Observable::Jx,
        Series::exact(est.iter().map(|e| 0.5 * n as f64 - e.boson_number).collect()),
    );
    out.series.insert(
        Observable::VarJy,
        Series::exact(grid[..valid].iter().map(|t| bosonic::var_jy(&params, n, *t)).collect()),
    );
    out.xi2_angle = grid[..valid].iter().map(|t| bosonic::min_variance_angle(&params, *t).angle).collect();
    out.xi2_reliable = vec![true; valid];
    if valid < grid.len() {
        out.warnings.push(format!(
            "bosonic model invalid (mode population >= N/2) from t = {}; series truncated",
            grid[valid]
        ));
    }
    if let Some(i) = est.iter().position(|e| !e.quantitative) {
        out.warnings.push(format!("bosonic mode population exceeds N/20 from t = {}", grid[i]));
    }
    Ok(out)
}

fn collect_warnings(label: &str, series: &ObservableSeries, out: &mut Vec<String>) {
    for w in &series.warnings {
        out.push(format!("{label}: {w}"));
    }
    let unreliable = series.xi2_reliable.iter().filter(|r| !**r).count();
    if unreliable > 0 {
        out.push(format!("{label}: squeezing unreliable at {unreliable} grid points"));
    }
}

fn grid_points(config: &ExperimentConfig) -> Vec<(f64, usize)> {
    config.fields.iter().flat_map(|&f| config.sizes.iter().map(move |&s| (f, s))).collect()
}

fn run_time_series(config: &ExperimentConfig) -> Result<Outcome> {
    let engines: Vec<Engine> = std::iter::once(config.engine).chain(config.compare.iter().copied()).collect();
    let jobs: Vec<(Engine, f64, usize)> = engines
        .iter()
        .flat_map(|&e| grid_points(config).into_iter().map(move |(f, s)| (e, f, s)))
        .collect();
    let results: Vec<Result<SeriesRun>> = jobs
        .par_iter()
        .map(|&(e, f, s)| {
            run_series(config, e, f, s).with_context(|| format!("{} at omega = {f}, size = {s}", e.name()))
        })
        .collect();
    let mut outcome = Outcome::default();
    for (&(e, f, s), result) in jobs.iter().zip(results) {
        let run = result?;
        let label = point_label(e, f, s);
        collect_warnings(&label, &run.series, &mut outcome.warnings);
        outcome.files.push((format!("{label}.csv"), run.series.to_csv()));
        if !run.series.correlations.is_empty() {
            outcome.files.push((format!("{label}_correlations.csv"), run.series.correlations_csv()));
        }
        if let Some(d) = run.details {
            outcome.details.push(d);
        }
    }
    Ok(outcome)
}

fn run_stability(config: &ExperimentConfig) -> Result<Outcome> {
    let map = stability_map(config.dimension, config.alpha, config.coupling, &config.fields, &config.sizes)?;
    let mut outcome = Outcome::default();
    outcome.files.push(("stability.csv".into(), map.to_csv()));
    let sizes: Vec<f64> = map.sizes.iter().map(|&l| l as f64).collect();
    let fit = tatspin::observables::power_law_fit(&sizes, &map.critical_field)
        .map(|f| f.with_provenance("critical field vs linear size"));
    let fit_json = match fit {
        Ok(f) => serde_json::to_value(f)?,
        Err(e) => {
            outcome.warnings.push(format!("critical-field fit skipped: {e}"));
            Value::Null
        }
    };
    let fits = json!({
        "dimension": map.dimension,
        "alpha": map.alpha,
        "sizes": map.sizes,
        "critical_field": map.critical_field,
        "predicted_exponent": -2.0 * spinwave::dynamical_exponent(map.dimension, map.alpha),
        "critical_field_power_law": fit_json,
    });
    outcome.files.push(("fits.json".into(), serde_json::to_string_pretty(&fits)? + "\n"));
    Ok(outcome)
}

fn fit_or_warn<T: serde::Serialize>(
    what: &str,
    field: f64,
    fit: tatspin::Result<T>,
    warnings: &mut Vec<String>,
) -> Result<Value> {
    Ok(match fit {
        Ok(v) => serde_json::to_value(v)?,
        Err(e) => {
            warnings.push(format!("omega {field}: {what} skipped: {e}"));
            Value::Null
        }
    })
}

fn run_scaling(config: &ExperimentConfig) -> Result<Outcome> {
    let source = config.source.unwrap_or(Engine::Collective);
    let points = grid_points(config);
    let runs: Vec<Result<SeriesRun>> = points
        .par_iter()
        .map(|&(f, s)| run_series(config, source, f, s).with_context(|| format!("{} at omega = {f}, size = {s}", source.name())))
        .collect();
    let mut outcome = Outcome::default();
    let mut csv = String::from("omega,size,n_spins,xi2_opt,t_opt,xi2_boundary,var_jy_peak,peak_time,peak_rule\n");
    let mut per_field = Vec::new();
    for &field in &config.fields {
        let mut n_spins = Vec::new();
        let mut xi = Vec::new();
        let mut t_opt = Vec::new();
        let mut peaks = Vec::new();
        for ((f, s), run) in points.iter().zip(&runs) {
            if *f != field {
                continue;
            }
            let run = run.as_ref().map_err(|e| anyhow::anyhow!("{e:#}"))?;
            let label = point_label(source, field, *s);
            collect_warnings(&label, &run.series, &mut outcome.warnings);
            if let Some(d) = &run.details {
                outcome.details.push(d.clone());
            }
            let n = run.series.n_spins as f64;
            let opt = optimal_squeezing(&run.series).with_context(|| format!("{label}: optimal squeezing"))?;
            let peak = series_peak(&run.series, field).with_context(|| format!("{label}: Var(Jy) peak"))?;
            if opt.boundary {
                outcome.warnings.push(format!("{label}: squeezing minimum on the edge of the time grid"));
            }
            csv.push_str(&format!(
                "{field},{s},{n},{},{},{},{},{},{:?}\n",
                opt.xi2_opt, opt.t_opt, opt.boundary, peak.value, peak.time, peak.rule
            ));
            n_spins.push(n);
            xi.push(opt.xi2_opt);
            t_opt.push(opt.t_opt);
            peaks.push(peak.value);
        }
        let lambda = if source.counts_spins() {
            BosonicParams::new(field, config.coupling).map(|p| p.lambda).unwrap_or(0.0)
        } else {
            let largest = *config.sizes.iter().max().expect("validated non-empty");
            spinwave::spectrum(&lattice(config, largest)?, field)?.lambda_eff
        };
        let w = &mut outcome.warnings;
        let nu = fit_or_warn("squeezing exponent", field, squeezing_exponent(&n_spins, &xi), w)?;
        let times = if lambda > 0.0 {
            fit_or_warn("time scaling", field, time_scaling(&n_spins, &t_opt, lambda), w)?
        } else {
            Value::Null
        };
        let peak_fit = fit_or_warn("peak scaling", field, peak_variance_scaling(&n_spins, &peaks), w)?;
        let crossover = if n_spins.len() >= 6 {
            fit_or_warn("crossover", field, detect_crossover(&n_spins, &peaks), w)?
        } else {
            Value::Null
        };
        per_field.push(json!({
            "omega": field,
            "lambda": lambda,
            "squeezing_exponent": nu,
            "time_scaling": times,
            "peak_variance_scaling": peak_fit,
            "peak_crossover": crossover,
        }));
    }
    outcome.files.push(("scaling.csv".into(), csv));
    let fits = json!({ "source": source.name(), "fits": per_field });
    outcome.files.push(("fits.json".into(), serde_json::to_string_pretty(&fits)? + "\n"));
    Ok(outcome)
}

pub fn run(config: &ExperimentConfig) -> Result<Outcome> {
    match config.engine {
        Engine::Stability => run_stability(config),
        Engine::Scaling => run_scaling(config),
        _ => run_time_series(config),
    }
}
