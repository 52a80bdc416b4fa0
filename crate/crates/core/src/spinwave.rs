//! Rotor / spin-wave theory around the x-polarised state.
//!
//! Holstein-Primakoff bosons on top of the coherent state split into the
//! `k = 0` rotor, evolved exactly as a collective spin with coupling
//! `J_eff`, and finite-`k` spin waves with the quadratic Hamiltonian
//! `H_k = A_k b_k'b_k + (B_k / 2)(b_k b_-k + h.c.)`, where
//! `A_k = J (g_0 - g_k / 2) - Omega`, `B_k = -J g_k / 2` and `g` are the
//! Kac-normalised lattice sums. In quadratures the mode reads
//! `((A + B) / 2) x^2 + ((A - B) / 2) p^2` with `x` the `y` spin component.

use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::collective::{self, CollectiveMoments};
use crate::error::{invalid, Error, Result};
use crate::lattice::{fourier_factors, gamma_at, FourierFactors, LatticeSpec};
use crate::series::{CorrelationSnapshot, Observable, ObservableSeries, Series};

/// Spin-wave theory is abandoned once the total occupation exceeds this
/// fraction of `N`.
pub const BREAKDOWN_FRACTION: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeRecord {
    /// Wavevector folded into `(-pi, pi]^D`.
    pub k: [f64; 2],
    /// Kac-normalised lattice sum.
    pub gamma: f64,
    pub a: f64,
    pub b: f64,
    /// `sqrt(A^2 - B^2)`; purely imaginary for unstable modes.
    pub omega: Complex64,
    pub lambda: f64,
    pub stable: bool,
}

impl ModeRecord {
    fn new(k: [f64; 2], gamma: f64, gamma0: f64, coupling: f64, field: f64) -> Self {
        let a = coupling * (gamma0 - 0.5 * gamma) - field;
        let b = -0.5 * coupling * gamma;
        let w2 = a * a - b * b;
        let stable = w2 >= 0.0;
        let (omega, lambda) = if stable {
            (Complex64::new(w2.sqrt(), 0.0), 0.0)
        } else {
            let l = (-w2).sqrt();
            (Complex64::new(0.0, l), l)
        };
        Self { k, gamma, a, b, omega, lambda, stable }
    }

    /// `A^2 - B^2`, signed.
    pub fn omega_squared(&self) -> f64 {
        self.a * self.a - self.b * self.b
    }

    /// `n_k(t)` after a vacuum quench: `(B/w)^2 sin^2(w t)` or its
    /// hyperbolic continuation, regular at `w = 0`.
    pub fn occupation(&self, t: f64) -> f64 {
        let s = self.b * t * sinc_signed(self.omega_squared(), t);
        s * s
    }

    /// `<y_k y_-k>(t) = (cos^2 + ((A - B)/w)^2 sin^2) / 4`, from `1/4` at `t = 0`.
    pub fn transverse_variance(&self, t: f64) -> f64 {
        let w2 = self.omega_squared();
        let c = cos_signed(w2, t);
        let s = (self.a - self.b) * t * sinc_signed(w2, t);
        0.25 * (c * c + s * s)
    }
}

/// `cos(sqrt(w2) t)`, continued to `cosh` for negative `w2`.
fn cos_signed(w2: f64, t: f64) -> f64 {
    if w2 >= 0.0 {
        (w2.sqrt() * t).cos()
    } else {
        ((-w2).sqrt() * t).cosh()
    }
}

/// `sin(w t) / (w t)` with `w = sqrt(w2)`, continued to `sinh` for negative `w2`.
fn sinc_signed(w2: f64, t: f64) -> f64 {
    let x2 = w2 * t * t;
    if x2.abs() < 1e-8 {
        return 1.0 - x2 / 6.0;
    }
    if w2 > 0.0 {
        let x = x2.sqrt();
        x.sin() / x
    } else {
        let x = (-x2).sqrt();
        x.sinh() / x
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpinWaveSpectrum {
    pub spec: LatticeSpec,
    pub field: f64,
    /// Indexed like sites; entry 0 is the `k = 0` rotor mode.
    pub modes: Vec<ModeRecord>,
    /// `N J g_0 / (N - 1)`.
    pub effective_coupling: f64,
    /// `sqrt(Omega (J_eff - Omega))`, zero outside the squeezing window.
    pub lambda_eff: f64,
    pub dynamical_exponent: f64,
}

impl SpinWaveSpectrum {
    pub fn n_sites(&self) -> usize {
        self.modes.len()
    }

    pub fn finite_modes(&self) -> impl Iterator<Item = &ModeRecord> {
        self.modes.iter().skip(1)
    }

    /// Largest instability rate at finite wavevector.
    pub fn lambda_max(&self) -> f64 {
        self.finite_modes().map(|m| m.lambda).fold(0.0, f64::max)
    }
}

/// Dispersion exponent `z` of the `Omega = 0` spin waves, `w_k ~ k^z`:
/// `(alpha - D) / 2` for `D < alpha < D + 2`, 1 beyond, and 0 (gapped) for
/// `alpha <= D`.
pub fn dynamical_exponent(dimension: usize, alpha: f64) -> f64 {
    let d = dimension as f64;
    if alpha <= d {
        0.0
    } else if alpha < d + 2.0 {
        0.5 * (alpha - d)
    } else {
        1.0
    }
}

fn effective_coupling(spec: &LatticeSpec, gamma0: f64) -> f64 {
    let n = spec.n_sites() as f64;
    n * spec.coupling * gamma0 / (n - 1.0)
}

fn lambda_eff(j_eff: f64, field: f64) -> f64 {
    (field * (j_eff - field)).max(0.0).sqrt()
}

fn check_field(field: f64) -> Result<()> {
    if !field.is_finite() || field < 0.0 {
        return Err(invalid("omega", format!("field must be finite and non-negative, got {field}")));
    }
    Ok(())
}

/// Spectrum from precomputed lattice sums.
pub fn spectrum_from_factors(factors: &FourierFactors, field: f64) -> Result<SpinWaveSpectrum> {
    check_field(field)?;
    let spec = *factors.spec();
    let gamma0 = factors.normalized(0);
    let modes = (0..factors.len())
        .map(|m| ModeRecord::new(factors.wavevector(m), factors.normalized(m), gamma0, spec.coupling, field))
        .collect();
    let j_eff = effective_coupling(&spec, gamma0);
    Ok(SpinWaveSpectrum {
        spec,
        field,
        modes,
        effective_coupling: j_eff,
        lambda_eff: lambda_eff(j_eff, field),
        dynamical_exponent: dynamical_exponent(spec.dimension, spec.alpha),
    })
}

pub fn spectrum(spec: &LatticeSpec, field: f64) -> Result<SpinWaveSpectrum> {
    spectrum_from_factors(&fourier_factors(spec)?, field)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalField {
    /// Field above which the smallest finite wavevector is unstable.
    pub value: f64,
    /// Predicted large-`L` behaviour `Omega_c ~ L^exponent`, i.e. `-2 z`.
    pub asymptotic_exponent: f64,
}

/// `Omega_c = J (g_0 - g_(2 pi / L, 0))`, from two single-wavevector sums.
pub fn critical_field(spec: &LatticeSpec) -> Result<CriticalField> {
    spec.validate()?;
    if spec.linear_size < 3 {
        return Err(Error::InvalidLattice(format!(
            "critical field needs L >= 3, got {}",
            spec.linear_size
        )));
    }
    let kac = spec.kac_factor();
    let g0 = gamma_at(spec, [0, 0]);
    let g1 = gamma_at(spec, [1, 0]);
    Ok(CriticalField {
        value: spec.coupling * (g0 - g1) / kac,
        asymptotic_exponent: -2.0 * dynamical_exponent(spec.dimension, spec.alpha),
    })
}

/// `lambda_max` over a grid of fields and sizes.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StabilityMap {
    pub dimension: usize,
    pub alpha: f64,
    pub coupling: f64,
    pub fields: Vec<f64>,
    pub sizes: Vec<usize>,
    /// `lambda_max[size][field]`.
    pub lambda_max: Vec<Vec<f64>>,
    pub critical_field: Vec<f64>,
}

impl StabilityMap {
    /// `omega,L,lambda_max,critical_field`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("omega,L,lambda_max,critical_field\n");
        for (s, &l) in self.sizes.iter().enumerate() {
            for (f, &omega) in self.fields.iter().enumerate() {
                let _ = writeln!(out, "{omega},{l},{},{}", self.lambda_max[s][f], self.critical_field[s]);
            }
        }
        out
    }
}

pub fn stability_map(
    dimension: usize,
    alpha: f64,
    coupling: f64,
    fields: &[f64],
    sizes: &[usize],
) -> Result<StabilityMap> {
    if fields.is_empty() || sizes.is_empty() {
        return Err(invalid("grid", "field and size grids must be non-empty"));
    }
    for &f in fields {
        check_field(f)?;
    }
    let rows: Vec<(Vec<f64>, f64)> = sizes
        .par_iter()
        .map(|&l| -> Result<(Vec<f64>, f64)> {
            let spec = LatticeSpec::new(dimension, l, alpha, coupling)?;
            let factors = fourier_factors(&spec)?;
            let g0 = factors.normalized(0);
            let row = fields
                .iter()
                .map(|&field| {
                    (1..factors.len())
                        .map(|m| ModeRecord::new([0.0; 2], factors.normalized(m), g0, coupling, field).lambda)
                        .fold(0.0, f64::max)
                })
                .collect();
            Ok((row, critical_field(&spec)?.value))
        })
        .collect::<Result<_>>()?;
    let (lambda_max, critical_field) = rows.into_iter().unzip();
    Ok(StabilityMap {
        dimension,
        alpha,
        coupling,
        fields: fields.to_vec(),
        sizes: sizes.to_vec(),
        lambda_max,
        critical_field,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModeOccupations {
    /// Per mode, entry 0 (the rotor) is zero. Values are capped at `N`.
    pub n: Vec<f64>,
    pub total: f64,
    /// Total occupation above `BREAKDOWN_FRACTION * N`.
    pub breakdown: bool,
}

pub fn mode_occupations(spectrum: &SpinWaveSpectrum, t: f64) -> Result<ModeOccupations> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::BadTimeGrid);
    }
    let cap = spectrum.n_sites() as f64;
    let mut n = vec![0.0; spectrum.n_sites()];
    for (slot, mode) in n.iter_mut().zip(&spectrum.modes).skip(1) {
        let value = mode.occupation(t);
        *slot = if value.is_finite() { value.min(cap) } else { cap };
    }
    let total: f64 = n.iter().sum();
    Ok(ModeOccupations { n, total, breakdown: total > BREAKDOWN_FRACTION * cap })
}

#[derive(Clone, Debug)]
pub struct RswResult {
    pub series: ObservableSeries,
    pub spectrum: SpinWaveSpectrum,
    /// First grid time at which the spin-wave population broke the validity
    /// threshold; the series stops before it.
    pub breakdown_time: Option<f64>,
}

/// Composite rotor + spin-wave observables on `t_grid`.
///
/// Correlations `C^yy(d, t)` for `d = 0..=L/2` are produced at the grid
/// points nearest to `correlation_times`, averaged over both lattice axes in
/// two dimensions.
pub fn rsw_observables(
    spec: &LatticeSpec,
    field: f64,
    t_grid: &[f64],
    correlation_times: &[f64],
) -> Result<RswResult> {
    let spectrum = spectrum(spec, field)?;
    let n = spec.n_sites();
    let rotor = collective::tat_moments(n, field, spectrum.effective_coupling, t_grid)?;

    let mut jx = Vec::with_capacity(t_grid.len());
    let mut breakdown_time = None;
    for m in &rotor {
        let occ = mode_occupations(&spectrum, m.time)?;
        if occ.breakdown {
            breakdown_time = Some(m.time);
            break;
        }
        jx.push(m.mean[0] - occ.total);
    }
    let kept = jx.len();
    let rotor = &rotor[..kept];

    let mut series = ObservableSeries::from_moments("rsw", n, rotor, None);
    series.series.insert(Observable::Jx, Series::exact(jx.clone()));
    let xi2 = rotor
        .iter()
        .zip(&jx)
        .map(|(m, &x)| n as f64 * m.transverse_extrema().min / (x * x))
        .collect();
    series.series.insert(Observable::Xi2, Series::exact(xi2));
    series.xi2_reliable = jx.iter().map(|x| *x > 0.0).collect();
    if let Some(t) = breakdown_time {
        series.warnings.push(format!(
            "spin-wave population exceeded {BREAKDOWN_FRACTION} N at t = {t}; series truncated"
        ));
    }

    for &target in correlation_times {
        let Some(index) = nearest_index(&series.t_grid, target) else { continue };
        series.correlations.push(correlation_snapshot(&spectrum, &rotor[index]));
    }
    Ok(RswResult { series, spectrum, breakdown_time })
}

fn nearest_index(grid: &[f64], t: f64) -> Option<usize> {
    (0..grid.len()).min_by(|&a, &b| (grid[a] - t).abs().total_cmp(&(grid[b] - t).abs()))
}

fn correlation_snapshot(spectrum: &SpinWaveSpectrum, rotor: &CollectiveMoments) -> CorrelationSnapshot {
    let spec = spectrum.spec;
    let n = spec.n_sites() as f64;
    let t = rotor.time;
    let ymodes: Vec<f64> = spectrum.modes.iter().map(|m| m.transverse_variance(t)).collect();
    let axes = spec.dimension;
    let mean = (0..=spec.linear_size / 2)
        .map(|d| {
            let d = d as f64;
            let wave: f64 = spectrum
                .modes
                .iter()
                .zip(&ymodes)
                .skip(1)
                .map(|(m, y)| {
                    let phase: f64 = (0..axes).map(|a| (m.k[a] * d).cos()).sum::<f64>() / axes as f64;
                    phase * y
                })
                .sum();
            rotor.variance(1) / (n * n) + wave / n
        })
        .collect::<Vec<_>>();
    let stderr = vec![0.0; mean.len()];
    CorrelationSnapshot { time: t, mean, stderr }
}
