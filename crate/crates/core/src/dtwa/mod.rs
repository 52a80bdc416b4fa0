//! Discrete truncated Wigner sampling of the lattice dynamics.
//!
//! Each trajectory starts from the four-point phase-space distribution of the
//! x-polarised product state (`s^x = 1/2`, `s^y, s^z = +-1/2`) and follows the
//! classical precession equations. Quantum symmetric moments are trajectory
//! averages; their errors come from a jackknife over fixed trajectory blocks.
//!
//! Note that the sampled spins have length `sqrt(3)/2`, the Casimir value of
//! a spin-1/2; conservation is therefore checked against the initial length.

mod field;
mod integrator;
mod stats;

pub use field::{FftConvolution, FieldEvaluator};
pub use integrator::{Dynamics, Workspace};
pub use stats::{BlockSums, Jackknife};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::collective::transverse_extrema;
use crate::error::{invalid, Error, Result};
use crate::lattice::LatticeSpec;
use crate::series::{CorrelationSnapshot, Observable, ObservableSeries, Series};
use integrator::{length_drift, lengths};

/// Trajectory ensemble, trajectory-major: spin `i` of trajectory `r` starts
/// at `3 (r N + i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinEnsemble {
    pub n_sites: usize,
    pub n_traj: usize,
    pub seed: u64,
    pub t: f64,
    pub spins: Vec<f64>,
}

impl SpinEnsemble {
    pub fn trajectory(&self, r: usize) -> &[f64] {
        &self.spins[3 * r * self.n_sites..3 * (r + 1) * self.n_sites]
    }

    /// Total spin of one trajectory.
    pub fn collective(&self, r: usize) -> [f64; 3] {
        total_spin(self.trajectory(r))
    }
}

fn total_spin(spins: &[f64]) -> [f64; 3] {
    let mut j = [0.0; 3];
    for s in spins.chunks_exact(3) {
        for a in 0..3 {
            j[a] += s[a];
        }
    }
    j
}

/// Initial spins of trajectory `r`; every trajectory owns the ChaCha stream
/// `r` of `seed`, so results do not depend on how work is split.
pub fn sample_trajectory(n_sites: usize, seed: u64, r: usize, out: &mut [f64]) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(r as u64);
    for s in out[..3 * n_sites].chunks_exact_mut(3) {
        s[0] = 0.5;
        s[1] = if rng.gen::<bool>() { 0.5 } else { -0.5 };
        s[2] = if rng.gen::<bool>() { 0.5 } else { -0.5 };
    }
}

pub fn sample_initial(spec: &LatticeSpec, n_traj: usize, seed: u64) -> Result<SpinEnsemble> {
    spec.validate()?;
    if n_traj < 2 {
        return Err(invalid("n_traj", format!("need at least 2 trajectories, got {n_traj}")));
    }
    let n = spec.n_sites();
    let mut spins = vec![0.0; 3 * n * n_traj];
    spins
        .par_chunks_mut(3 * n)
        .enumerate()
        .for_each(|(r, chunk)| sample_trajectory(n, seed, r, chunk));
    Ok(SpinEnsemble { n_sites: n, n_traj, seed, t: 0.0, spins })
}

/// `ds_i/dt` for every spin of every trajectory, same layout as the ensemble.
pub fn equations_of_motion(dynamics: &Dynamics, ensemble: &SpinEnsemble) -> Vec<f64> {
    let n = ensemble.n_sites;
    let mut out = vec![0.0; ensemble.spins.len()];
    out.par_chunks_mut(3 * n)
        .zip(ensemble.spins.par_chunks(3 * n))
        .for_each_init(|| dynamics.workspace(), |ws, (d, s)| dynamics.derivative(s, d, ws));
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegratorOptions {
    /// Largest allowed relative energy drift per trajectory.
    pub energy_tolerance: f64,
    /// Largest allowed relative drift of any spin length.
    pub length_tolerance: f64,
    /// Starting step; defaults to `0.05 / rate bound`.
    pub initial_step: Option<f64>,
    pub max_halvings: usize,
    /// Trajectories used to choose the step before the full run.
    pub pilot_trajectories: usize,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        Self {
            energy_tolerance: 1e-6,
            length_tolerance: 1e-8,
            initial_step: None,
            max_halvings: 12,
            pilot_trajectories: 4,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Drift {
    pub energy: f64,
    pub length: f64,
}

impl Drift {
    fn max(self, other: Drift) -> Drift {
        Drift { energy: self.energy.max(other.energy), length: self.length.max(other.length) }
    }

    fn within(&self, options: &IntegratorOptions) -> bool {
        self.energy < options.energy_tolerance && self.length < options.length_tolerance
    }
}

fn check_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.is_empty()
        || t_grid[0] < 0.0
        || t_grid.iter().any(|t| !t.is_finite())
        || t_grid.windows(2).any(|w| w[1] < w[0])
    {
        return Err(Error::BadTimeGrid);
    }
    Ok(())
}

/// Evolve one trajectory from `t = 0` through `t_grid`, reporting each grid
/// point to `visit` and returning the worst drift seen.
fn evolve_trajectory(
    dynamics: &Dynamics,
    spins: &mut [f64],
    t_grid: &[f64],
    dt: f64,
    ws: &mut Workspace,
    mut visit: impl FnMut(usize, &[f64], f64),
) -> Drift {
    let reference = lengths(spins);
    let e0 = dynamics.energy(spins, ws);
    let n = dynamics.n_sites() as f64;
    let scale = e0.abs().max(n * (0.25 * dynamics.evaluator.row_sum().abs() + 0.5 * dynamics.field.abs()));
    let mut drift = Drift::default();
    let mut t = 0.0;
    for (k, &tk) in t_grid.iter().enumerate() {
        dynamics.advance(spins, t, tk, dt, ws);
        t = tk;
        let e = dynamics.energy(spins, ws);
        let finite = |x: f64| if x.is_nan() { f64::INFINITY } else { x };
        drift = drift.max(Drift {
            energy: finite((e - e0).abs() / scale),
            length: finite(length_drift(spins, &reference)),
        });
        visit(k, spins, e);
    }
    drift
}

fn initial_step(dynamics: &Dynamics, options: &IntegratorOptions) -> f64 {
    options.initial_step.unwrap_or_else(|| 0.05 / dynamics.rate_bound().max(1e-12))
}

/// Halve the step until the pilot states integrate within tolerance.
fn choose_step(
    dynamics: &Dynamics,
    pilots: &[Vec<f64>],
    t_grid: &[f64],
    options: &IntegratorOptions,
) -> Result<(f64, usize)> {
    let mut dt = initial_step(dynamics, options);
    let mut ws = dynamics.workspace();
    for halvings in 0..=options.max_halvings {
        let drift = pilots.iter().fold(Drift::default(), |acc, p| {
            let mut s = p.clone();
            acc.max(evolve_trajectory(dynamics, &mut s, t_grid, dt, &mut ws, |_, _, _| {}))
        });
        if drift.within(options) {
            return Ok((dt, halvings));
        }
        if halvings == options.max_halvings {
            return Err(Error::IntegratorDrift {
                halvings,
                energy_drift: drift.energy,
                length_drift: drift.length,
            });
        }
        dt *= 0.5;
    }
    unreachable!()
}

#[derive(Clone, Debug)]
pub struct Integration {
    pub snapshots: Vec<SpinEnsemble>,
    pub step: f64,
    pub drift: Drift,
}

/// Integrate every trajectory and keep full snapshots on `t_grid`. Memory
/// grows with the grid; [`run`] streams instead.
pub fn integrate(
    ensemble: &SpinEnsemble,
    dynamics: &Dynamics,
    t_grid: &[f64],
    options: &IntegratorOptions,
) -> Result<Integration> {
    check_grid(t_grid)?;
    if dynamics.n_sites() != ensemble.n_sites {
        return Err(invalid("ensemble", "site count differs from the coupling table"));
    }
    let n = ensemble.n_sites;
    let pilots: Vec<Vec<f64>> = (0..ensemble.n_traj.min(options.pilot_trajectories.max(1)))
        .map(|r| ensemble.trajectory(r).to_vec())
        .collect();
    let (mut dt, mut halvings) = choose_step(dynamics, &pilots, t_grid, options)?;
    loop {
        let results: Vec<(Vec<Vec<f64>>, Drift)> = (0..ensemble.n_traj)
            .into_par_iter()
            .map_init(
                || dynamics.workspace(),
                |ws, r| {
                    let mut s = ensemble.trajectory(r).to_vec();
                    let mut frames = Vec::with_capacity(t_grid.len());
                    let d = evolve_trajectory(dynamics, &mut s, t_grid, dt, ws, |_, spins, _| frames.push(spins.to_vec()));
                    (frames, d)
                },
            )
            .collect();
        let drift = results.iter().fold(Drift::default(), |a, (_, d)| a.max(*d));
        if drift.within(options) {
            let snapshots = t_grid
                .iter()
                .enumerate()
                .map(|(k, &t)| SpinEnsemble {
                    n_sites: n,
                    n_traj: ensemble.n_traj,
                    seed: ensemble.seed,
                    t,
                    spins: results.iter().flat_map(|(f, _)| f[k].iter().copied()).collect(),
                })
                .collect();
            return Ok(Integration { snapshots, step: dt, drift });
        }
        if halvings >= options.max_halvings {
            return Err(Error::IntegratorDrift { halvings, energy_drift: drift.energy, length_drift: drift.length });
        }
        dt *= 0.5;
        halvings += 1;
    }
}

/// Scalars recorded per trajectory and grid time.
const SCALARS: usize = 10;
const JX: usize = 0;
const JY: usize = 1;
const JZ: usize = 2;
const JX2: usize = 3;
const JY2: usize = 4;
const JZ2: usize = 5;
const JYJZ: usize = 6;
const ENERGY: usize = 9;

/// Layout of one trajectory's record: `SCALARS` per grid time, then
/// `C^yy(d)` for `d = 0..=L/2` at each correlation time.
#[derive(Clone, Debug)]
struct RecordLayout {
    spec: LatticeSpec,
    n_times: usize,
    corr_indices: Vec<usize>,
    n_d: usize,
}

impl RecordLayout {
    fn new(spec: &LatticeSpec, t_grid: &[f64], correlation_times: &[f64]) -> Self {
        let corr_indices = correlation_times
            .iter()
            .filter_map(|&t| (0..t_grid.len()).min_by(|&a, &b| (t_grid[a] - t).abs().total_cmp(&(t_grid[b] - t).abs())))
            .collect();
        Self { spec: *spec, n_times: t_grid.len(), corr_indices, n_d: spec.linear_size / 2 + 1 }
    }

    fn len(&self) -> usize {
        self.n_times * SCALARS + self.corr_indices.len() * self.n_d
    }

    fn record(&self, k: usize, spins: &[f64], energy: f64, out: &mut [f64]) {
        let [x, y, z] = total_spin(spins);
        out[k * SCALARS..(k + 1) * SCALARS].copy_from_slice(&[x, y, z, x * x, y * y, z * z, y * z, x * y, x * z, energy]);
        for (c, _) in self.corr_indices.iter().enumerate().filter(|(_, &i)| i == k) {
            let base = self.n_times * SCALARS + c * self.n_d;
            self.correlations(spins, &mut out[base..base + self.n_d]);
        }
    }

    /// `(1/N) sum_i s_i^y s_{i+d}^y`, averaged over lattice axes.
    fn correlations(&self, spins: &[f64], out: &mut [f64]) {
        let l = self.spec.linear_size;
        let n = self.spec.n_sites();
        let axes = self.spec.dimension;
        for (d, slot) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for i in 0..n {
                let [x, y] = self.spec.coords(i);
                let sy = spins[3 * i + 1];
                acc += sy * spins[3 * self.spec.site([(x + d) % l, y]) + 1];
                if axes == 2 {
                    acc += sy * spins[3 * self.spec.site([x, (y + d) % l]) + 1];
                }
            }
            *slot = acc / (n * axes) as f64;
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DtwaConfig {
    pub n_traj: usize,
    pub seed: u64,
    /// Times (snapped to the nearest grid point) for `C^yy(d)` snapshots.
    pub correlation_times: Vec<f64>,
    pub options: IntegratorOptions,
    /// Jackknife blocks; also the unit of parallel work.
    pub blocks: usize,
}

impl DtwaConfig {
    pub fn new(n_traj: usize, seed: u64) -> Self {
        Self { n_traj, seed, correlation_times: Vec::new(), options: IntegratorOptions::default(), blocks: 64 }
    }
}

/// Run metadata, serialisable next to the series.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DtwaMetadata {
    pub seed: u64,
    pub n_traj: usize,
    pub blocks: usize,
    pub lattice: LatticeSpec,
    pub field: f64,
    pub step: f64,
    pub options: IntegratorOptions,
    pub max_energy_drift: f64,
    pub max_length_drift: f64,
    pub build: String,
}

#[derive(Clone, Debug)]
pub struct DtwaRun {
    pub series: ObservableSeries,
    pub metadata: DtwaMetadata,
}

/// Build identifier recorded in metadata.
pub fn build_id() -> String {
    match option_env!("TATSPIN_BUILD_ID") {
        Some(id) => format!("{}+{id}", env!("CARGO_PKG_VERSION")),
        None => env!("CARGO_PKG_VERSION").to_string(),
    }
}

/// Monte Carlo dTWA estimate of the observables on `t_grid`.
pub fn run(spec: &LatticeSpec, field: f64, t_grid: &[f64], config: &DtwaConfig) -> Result<DtwaRun> {
    let dynamics = Dynamics::new(FieldEvaluator::for_lattice(spec)?, field);
    run_with(&dynamics, spec, t_grid, config)
}

pub fn run_with(dynamics: &Dynamics, spec: &LatticeSpec, t_grid: &[f64], config: &DtwaConfig) -> Result<DtwaRun> {
    check_grid(t_grid)?;
    if config.n_traj < 2 {
        return Err(invalid("n_traj", format!("need at least 2 trajectories, got {}", config.n_traj)));
    }
    if !field_ok(dynamics.field) {
        return Err(invalid("omega", "field must be finite"));
    }
    let n = spec.n_sites();
    let layout = RecordLayout::new(spec, t_grid, &config.correlation_times);
    let options = &config.options;
    let pilots: Vec<Vec<f64>> = (0..config.n_traj.min(options.pilot_trajectories.max(1)))
        .map(|r| {
            let mut s = vec![0.0; 3 * n];
            sample_trajectory(n, config.seed, r, &mut s);
            s
        })
        .collect();
    let (mut dt, mut halvings) = choose_step(dynamics, &pilots, t_grid, options)?;
    let n_blocks = config.blocks.clamp(2, config.n_traj);
    loop {
        let blocks: Vec<(BlockSums, Drift)> = (0..n_blocks)
            .into_par_iter()
            .map(|b| {
                let mut ws = dynamics.workspace();
                let mut sums = BlockSums::new(layout.len());
                let mut record = vec![0.0; layout.len()];
                let mut spins = vec![0.0; 3 * n];
                let mut drift = Drift::default();
                for r in b * config.n_traj / n_blocks..(b + 1) * config.n_traj / n_blocks {
                    sample_trajectory(n, config.seed, r, &mut spins);
                    let d = evolve_trajectory(dynamics, &mut spins, t_grid, dt, &mut ws, |k, s, e| {
                        layout.record(k, s, e, &mut record)
                    });
                    drift = drift.max(d);
                    sums.add(&record, 1.0);
                }
                (sums, drift)
            })
            .collect();
        let drift = blocks.iter().fold(Drift::default(), |a, (_, d)| a.max(*d));
        if drift.within(options) {
            let sums: Vec<BlockSums> = blocks.into_iter().map(|(s, _)| s).collect();
            let series = build_series("dtwa", n, t_grid, &layout, &Jackknife::from_blocks(&sums));
            let metadata = DtwaMetadata {
                seed: config.seed,
                n_traj: config.n_traj,
                blocks: n_blocks,
                lattice: *spec,
                field: dynamics.field,
                step: dt,
                options: *options,
                max_energy_drift: drift.energy,
                max_length_drift: drift.length,
                build: build_id(),
            };
            return Ok(DtwaRun { series, metadata });
        }
        if halvings >= options.max_halvings {
            return Err(Error::IntegratorDrift { halvings, energy_drift: drift.energy, length_drift: drift.length });
        }
        dt *= 0.5;
        halvings += 1;
    }
}

fn field_ok(field: f64) -> bool {
    field.is_finite()
}

fn build_series(engine: &str, n: usize, t_grid: &[f64], layout: &RecordLayout, jk: &Jackknife) -> ObservableSeries {
    let mut out = ObservableSeries::new(engine, n, t_grid.to_vec());
    let nf = n as f64;
    let mut columns: Vec<(Observable, Series)> = Observable::ALL.iter().map(|&o| (o, Series::default())).collect();
    for k in 0..t_grid.len() {
        let o = k * SCALARS;
        let var = move |m: &[f64], a: usize, a2: usize| m[o + a2] - m[o + a] * m[o + a];
        let xi2 = move |m: &[f64]| {
            let cov = m[o + JYJZ] - m[o + JY] * m[o + JZ];
            nf * transverse_extrema(var(m, JY, JY2), var(m, JZ, JZ2), cov).min / (m[o + JX] * m[o + JX])
        };
        for (obs, col) in columns.iter_mut() {
            let (mean, se) = match obs {
                Observable::Jx => jk.estimate(|m| m[o + JX]),
                Observable::Jy => jk.estimate(|m| m[o + JY]),
                Observable::Jz => jk.estimate(|m| m[o + JZ]),
                Observable::VarJx => jk.estimate(|m| var(m, JX, JX2)),
                Observable::VarJy => jk.estimate(|m| var(m, JY, JY2)),
                Observable::VarJz => jk.estimate(|m| var(m, JZ, JZ2)),
                Observable::CovYz => jk.estimate(|m| m[o + JYJZ] - m[o + JY] * m[o + JZ]),
                Observable::Xi2 => jk.estimate(xi2),
                Observable::Energy => jk.estimate(|m| m[o + ENERGY]),
            };
            col.mean.push(mean);
            col.stderr.push(se);
        }
        let m = &jk.mean;
        let cov = m[o + JYJZ] - m[o + JY] * m[o + JZ];
        out.xi2_angle.push(transverse_extrema(var(m, JY, JY2), var(m, JZ, JZ2), cov).angle);
        let (jx, se) = jk.estimate(|m| m[o + JX]);
        let threshold = if jk.leave_out.is_empty() { 1e-24 * nf * nf } else { 10.0 * se * se };
        out.xi2_reliable.push(jx * jx >= threshold);
    }
    out.series = columns.into_iter().collect();
    for (c, &k) in layout.corr_indices.iter().enumerate() {
        let base = layout.n_times * SCALARS + c * layout.n_d;
        let (mean, stderr) = (0..layout.n_d).map(|d| jk.estimate(|m| m[base + d])).unzip();
        out.correlations.push(CorrelationSnapshot { time: t_grid[k], mean, stderr });
    }
    if out.xi2_reliable.iter().any(|r| !r) {
        out.warnings.push("squeezing unreliable where <J^x>^2 is within 10 standard errors squared of zero".into());
    }
    out
}

/// Largest system for which [`all_to_all_discrete_average`] enumerates.
pub const ENUMERATION_MAX_SITES: usize = 16;

/// Exact average over all `4^N` discrete initial states of the all-to-all
/// model. Spins of equal `(s^y, s^z)` are interchangeable, so only the
/// `C(N + 3, 3)` type compositions are integrated, weighted multinomially.
pub fn all_to_all_discrete_average(
    n: usize,
    field: f64,
    coupling: f64,
    t_grid: &[f64],
    options: &IntegratorOptions,
) -> Result<ObservableSeries> {
    check_grid(t_grid)?;
    if !(1..=ENUMERATION_MAX_SITES).contains(&n) {
        return Err(invalid("n", format!("enumeration supports 1..={ENUMERATION_MAX_SITES} spins, got {n}")));
    }
    let spec = LatticeSpec::new(1, n.max(2), 0.0, coupling)?;
    let dynamics = Dynamics::new(FieldEvaluator::AllToAll { n, pair: coupling / n as f64 }, field);
    let layout = RecordLayout::new(&spec, t_grid, &[]);

    let types = [(0.5, 0.5), (0.5, -0.5), (-0.5, 0.5), (-0.5, -0.5)];
    let mut configs = Vec::new();
    for a in 0..=n {
        for b in 0..=n - a {
            for c in 0..=n - a - b {
                let counts = [a, b, c, n - a - b - c];
                let log_w = ln_factorial(n) - counts.iter().map(|&k| ln_factorial(k)).sum::<f64>()
                    - n as f64 * 4f64.ln();
                let spins: Vec<f64> = counts
                    .iter()
                    .zip(&types)
                    .flat_map(|(&k, &(y, z))| std::iter::repeat_n([0.5, y, z], k).flatten())
                    .collect();
                configs.push((spins, log_w.exp()));
            }
        }
    }
    let (mut dt, mut halvings) = choose_step(&dynamics, &[configs[configs.len() / 2].0.clone()], t_grid, options)?;
    loop {
        let mut sums = BlockSums::new(layout.len());
        let mut ws = dynamics.workspace();
        let mut record = vec![0.0; layout.len()];
        let mut drift = Drift::default();
        for (spins, w) in &configs {
            let mut s = spins.clone();
            drift = drift.max(evolve_trajectory(&dynamics, &mut s, t_grid, dt, &mut ws, |k, st, e| {
                layout.record(k, st, e, &mut record)
            }));
            sums.add(&record, *w);
        }
        if drift.within(options) {
            return Ok(build_series("enumeration", n, t_grid, &layout, &Jackknife::from_blocks(&[sums])));
        }
        if halvings >= options.max_halvings {
            return Err(Error::IntegratorDrift { halvings, energy_drift: drift.energy, length_drift: drift.length });
        }
        dt *= 0.5;
        halvings += 1;
    }
}

fn ln_factorial(k: usize) -> f64 {
    (2..=k).map(|i| (i as f64).ln()).sum()
}
