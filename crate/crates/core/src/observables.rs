//! Engine-agnostic analysis: squeezing optima, scaling fits, peak rules and
//! crossover detection.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::series::{Observable, ObservableSeries};

/// Least-squares fits refuse fewer points than this.
pub const MIN_FIT_POINTS: usize = 4;
/// Local maxima need at least this fraction of the series range as
/// prominence to count.
pub const PEAK_PROMINENCE: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitModel {
    /// `log y = c + slope log x`.
    PowerLaw,
    /// `log y = c + slope t`.
    ExponentialInT,
    /// `y = c + slope log x`.
    LogTime,
    /// `y = c + slope x`.
    Linear,
}

/// Straight-line least-squares fit with parameter standard errors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub model: FitModel,
    pub slope: f64,
    pub slope_stderr: f64,
    pub intercept: f64,
    pub intercept_stderr: f64,
    /// Range of the independent variable as supplied (before transforms).
    pub window: (f64, f64),
    /// Root of the residual sum of squares in the fitted coordinates.
    pub residual_norm: f64,
    pub n_points: usize,
    pub provenance: String,
}

impl ScalingFit {
    pub fn with_provenance(mut self, provenance: impl Into<String>) -> Self {
        self.provenance = provenance.into();
        self
    }

    pub fn predict(&self, x: f64) -> f64 {
        match self.model {
            FitModel::PowerLaw => (self.intercept + self.slope * x.ln()).exp(),
            FitModel::ExponentialInT => (self.intercept + self.slope * x).exp(),
            FitModel::LogTime => self.intercept + self.slope * x.ln(),
            FitModel::Linear => self.intercept + self.slope * x,
        }
    }
}

/// Ordinary least squares `y = c + m x`. Points are sorted first so the
/// result does not depend on input order.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<ScalingFit> {
    fit(FitModel::Linear, x, y)
}

fn fit(model: FitModel, x_raw: &[f64], y_raw: &[f64]) -> Result<ScalingFit> {
    if x_raw.len() != y_raw.len() {
        return Err(invalid("points", "x and y lengths differ"));
    }
    let n = x_raw.len();
    if n < MIN_FIT_POINTS {
        return Err(Error::TooFewPoints { needed: MIN_FIT_POINTS, got: n });
    }
    let transform = |x: f64, y: f64| -> (f64, f64) {
        match model {
            FitModel::PowerLaw => (x.ln(), y.ln()),
            FitModel::ExponentialInT => (x, y.ln()),
            FitModel::LogTime => (x.ln(), y),
            FitModel::Linear => (x, y),
        }
    };
    let mut pts: Vec<(f64, f64)> = x_raw.iter().zip(y_raw).map(|(&x, &y)| transform(x, y)).collect();
    if pts.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(invalid("points", format!("non-finite value after {model:?} transform")));
    }
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let nf = n as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx <= 0.0 {
        return Err(invalid("points", "independent variable has no spread"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let sigma2 = rss / (nf - 2.0);
    let slope_var = sigma2 / sxx;
    let intercept_var = sigma2 * (1.0 / nf + mx * mx / sxx);
    let lo = x_raw.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = x_raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(ScalingFit {
        model,
        slope,
        slope_stderr: slope_var.sqrt(),
        intercept,
        intercept_stderr: intercept_var.sqrt(),
        window: (lo, hi),
        residual_norm: rss.sqrt(),
        n_points: n,
        provenance: String::new(),
    })
}

pub fn power_law_fit(x: &[f64], y: &[f64]) -> Result<ScalingFit> {
    fit(FitModel::PowerLaw, x, y)
}

/// Fit `y ~ e^{rate t}` over the points with `t` inside `window`.
pub fn exponential_fit(t: &[f64], y: &[f64], window: (f64, f64)) -> Result<ScalingFit> {
    let (tw, yw): (Vec<f64>, Vec<f64>) =
        t.iter().zip(y).filter(|(t, _)| **t >= window.0 && **t <= window.1).map(|(a, b)| (*a, *b)).unzip();
    fit(FitModel::ExponentialInT, &tw, &yw)
}

pub fn log_time_fit(x: &[f64], t: &[f64]) -> Result<ScalingFit> {
    fit(FitModel::LogTime, x, t)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SqueezingOptimum {
    pub t_opt: f64,
    pub xi2_opt: f64,
    pub angle: f64,
    /// The discrete minimum sat on the first or last usable point.
    pub boundary: bool,
}

/// Minimum of `xi2` with parabolic refinement through the discrete minimum
/// and its neighbours. Points flagged unreliable are ignored.
pub fn optimal_squeezing(series: &ObservableSeries) -> Result<SqueezingOptimum> {
    let xi2 = series
        .get(Observable::Xi2)
        .ok_or_else(|| Error::Analysis("series has no squeezing column".into()))?;
    let reliable = |i: usize| series.xi2_reliable.get(i).copied().unwrap_or(true);
    let idx: Vec<usize> = (0..series.len()).filter(|&i| reliable(i) && xi2.mean[i].is_finite()).collect();
    let t: Vec<f64> = idx.iter().map(|&i| series.t_grid[i]).collect();
    let v: Vec<f64> = idx.iter().map(|&i| xi2.mean[i]).collect();
    let angle: Vec<f64> = idx.iter().map(|&i| series.xi2_angle.get(i).copied().unwrap_or(f64::NAN)).collect();
    optimal_squeezing_values(&t, &v, &angle)
}

pub fn optimal_squeezing_values(t: &[f64], xi2: &[f64], angle: &[f64]) -> Result<SqueezingOptimum> {
    const MIN_POINTS: usize = 10;
    if t.len() < MIN_POINTS {
        return Err(Error::TooFewPoints { needed: MIN_POINTS, got: t.len() });
    }
    let k = (0..xi2.len()).min_by(|&a, &b| xi2[a].total_cmp(&xi2[b])).unwrap();
    let angle_at = |i: usize| angle.get(i).copied().unwrap_or(f64::NAN);
    if k == 0 || k + 1 == t.len() {
        return Ok(SqueezingOptimum { t_opt: t[k], xi2_opt: xi2[k], angle: angle_at(k), boundary: true });
    }
    let (x0, x1, x2) = (t[k - 1], t[k], t[k + 1]);
    let (y0, y1, y2) = (xi2[k - 1], xi2[k], xi2[k + 1]);
    // vertex of the parabola through three (possibly unevenly spaced) points
    let d01 = (y1 - y0) / (x1 - x0);
    let d12 = (y2 - y1) / (x2 - x1);
    let curvature = (d12 - d01) / (x2 - x0);
    let (t_opt, xi2_opt) = if curvature > 0.0 {
        let slope_mid = d01 + curvature * (x1 - x0);
        let tv = x1 - slope_mid / (2.0 * curvature);
        let tv = tv.clamp(x0, x2);
        (tv, y1 + slope_mid * (tv - x1) + curvature * (tv - x1).powi(2))
    } else {
        (x1, y1)
    };
    Ok(SqueezingOptimum { t_opt, xi2_opt: xi2_opt.min(y1), angle: angle_at(k), boundary: false })
}

/// `xi2_opt ~ N^-nu`; the returned slope is `-nu`.
pub fn squeezing_exponent(sizes: &[f64], xi2_opt: &[f64]) -> Result<ScalingFit> {
    power_law_fit(sizes, xi2_opt)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeScaling {
    pub fit: ScalingFit,
    /// Slope expected from `t_min ~ log(sqrt N) / lambda`, i.e. `1 / (2 lambda)`.
    pub predicted_slope: f64,
    pub relative_deviation: f64,
}

/// Fit `t_opt = c + slope log N` and compare with `1 / (2 lambda)`.
pub fn time_scaling(sizes: &[f64], t_opts: &[f64], lambda_hint: f64) -> Result<TimeScaling> {
    let fit = log_time_fit(sizes, t_opts)?;
    let predicted_slope = 0.5 / lambda_hint;
    let relative_deviation = (fit.slope - predicted_slope) / predicted_slope;
    Ok(TimeScaling { fit, predicted_slope, relative_deviation })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PeakRule {
    SecondMaximum,
    /// No second maximum found; the first was used.
    FirstMaximumFallback,
    Plateau,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub time: f64,
    pub value: f64,
    pub rule: PeakRule,
}

/// Indices of local maxima whose topographic prominence is at least
/// `PEAK_PROMINENCE` of the series range.
pub fn prominent_maxima(values: &[f64]) -> Vec<usize> {
    let n = values.len();
    if n < 3 {
        return Vec::new();
    }
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let threshold = PEAK_PROMINENCE * (hi - lo);
    let mut out = Vec::new();
    let mut i = 1;
    while i + 1 < n {
        // plateaus count once, at their left end
        let mut j = i;
        while j + 1 < n && values[j + 1] == values[i] {
            j += 1;
        }
        if values[i] > values[i - 1] && j + 1 < n && values[j + 1] < values[i] {
            let peak = values[i];
            let mut left_min = peak;
            for &v in values[..i].iter().rev() {
                if v > peak {
                    break;
                }
                left_min = left_min.min(v);
            }
            let mut right_min = peak;
            for &v in &values[j + 1..] {
                if v > peak {
                    break;
                }
                right_min = right_min.min(v);
            }
            if peak - left_min.max(right_min) >= threshold {
                out.push(i);
            }
        }
        i = j + 1;
    }
    out
}

/// Peak of `Var(J^y)(t)`: the second prominent local maximum when the field
/// is nonzero, the mean of the final quarter (plateau) at zero field.
pub fn select_peak(t: &[f64], values: &[f64], field: f64) -> Result<Peak> {
    if t.len() != values.len() || t.len() < 3 {
        return Err(invalid("series", "need at least three aligned points"));
    }
    if field == 0.0 {
        let start = t.len() - (t.len() / 4).max(1);
        let tail = &values[start..];
        let value = tail.iter().sum::<f64>() / tail.len() as f64;
        return Ok(Peak { time: t[start], value, rule: PeakRule::Plateau });
    }
    let maxima = prominent_maxima(values);
    match maxima.as_slice() {
        [_, second, ..] => Ok(Peak { time: t[*second], value: values[*second], rule: PeakRule::SecondMaximum }),
        [first] => Ok(Peak { time: t[*first], value: values[*first], rule: PeakRule::FirstMaximumFallback }),
        [] => Err(Error::Analysis("no prominent maximum in series".into())),
    }
}

/// Peak of `Var(J^y)` for one series, with the rule used.
pub fn series_peak(series: &ObservableSeries, field: f64) -> Result<Peak> {
    let v = series
        .get(Observable::VarJy)
        .ok_or_else(|| Error::Analysis("series has no Var(J^y) column".into()))?;
    select_peak(&series.t_grid, &v.mean, field)
}

/// Power-law exponent of peak values against system size.
pub fn peak_variance_scaling(sizes: &[f64], peaks: &[f64]) -> Result<ScalingFit> {
    power_law_fit(sizes, peaks)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Crossover {
    /// Break point in the original size units.
    pub size: f64,
    /// Standard error of `log(size)`.
    pub log_size_stderr: f64,
    pub slope_below: f64,
    pub slope_above: f64,
    pub residual_norm: f64,
}

/// Result of a two-segment log-log fit; `crossover` is `None` when a single
/// slope describes the data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossoverFit {
    pub crossover: Option<Crossover>,
    pub single: ScalingFit,
}

/// Continuous two-segment fit of `log value` against `log size`.
pub fn detect_crossover(sizes: &[f64], values: &[f64]) -> Result<CrossoverFit> {
    const MIN_SIZES: usize = 6;
    if sizes.len() < MIN_SIZES {
        return Err(Error::TooFewPoints { needed: MIN_SIZES, got: sizes.len() });
    }
    let single = power_law_fit(sizes, values)?;
    let mut pts: Vec<(f64, f64)> = sizes.iter().zip(values).map(|(s, v)| (s.ln(), v.ln())).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let n = pts.len();

    // scan break points between the second and second-to-last sizes, then
    // refine by golden section on the best bracket
    let scan = 400;
    let (lo, hi) = (pts[1].0, pts[n - 2].0);
    let rss_at = |x0: f64| hinge_least_squares(&pts, x0).1;
    let mut best = (lo, f64::INFINITY);
    for s in 0..=scan {
        let x0 = lo + (hi - lo) * s as f64 / scan as f64;
        let r = rss_at(x0);
        if r < best.1 {
            best = (x0, r);
        }
    }
    let step = (hi - lo) / scan as f64;
    let (mut a, mut b) = ((best.0 - step).max(lo), (best.0 + step).min(hi));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..100 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if rss_at(c) < rss_at(d) {
            b = d;
        } else {
            a = c;
        }
    }
    let x0 = 0.5 * (a + b);
    let ([_, b1, b2], rss) = hinge_least_squares(&pts, x0);

    let rss_single = single.residual_norm.powi(2);
    let dof = (n - 4) as f64;
    let scale = pts.iter().map(|p| p.1 * p.1).sum::<f64>().max(1e-300);
    let significant = if rss <= 1e-24 * scale {
        rss_single > 1e-20 * scale
    } else {
        ((rss_single - rss) / 2.0) / (rss / dof) > 10.0
    };
    let distinct = (b1 - b2).abs() > 0.05 * b1.abs().max(b2.abs());
    if !(significant && distinct) {
        return Ok(CrossoverFit { crossover: None, single });
    }

    // Gauss-Newton covariance of (c0, b1, b2, x0)
    let sigma2 = rss / dof;
    let mut jtj = [[0.0; 4]; 4];
    for &(x, _) in &pts {
        let row = if x < x0 { [1.0, x - x0, 0.0, -b1] } else { [1.0, 0.0, x - x0, -b2] };
        for r in 0..4 {
            for c in 0..4 {
                jtj[r][c] += row[r] * row[c];
            }
        }
    }
    let log_size_stderr = invert4(jtj).map_or(f64::NAN, |inv| (sigma2 * inv[3][3]).max(0.0).sqrt());
    Ok(CrossoverFit {
        crossover: Some(Crossover {
            size: x0.exp(),
            log_size_stderr,
            slope_below: b1,
            slope_above: b2,
            residual_norm: rss.sqrt(),
        }),
        single,
    })
}

/// Least squares for `y = c + b1 min(x - x0, 0) + b2 max(x - x0, 0)`.
fn hinge_least_squares(pts: &[(f64, f64)], x0: f64) -> ([f64; 3], f64) {
    let mut ata = [[0.0; 3]; 3];
    let mut aty = [0.0; 3];
    for &(x, y) in pts {
        let row = [1.0, (x - x0).min(0.0), (x - x0).max(0.0)];
        for r in 0..3 {
            aty[r] += row[r] * y;
            for c in 0..3 {
                ata[r][c] += row[r] * row[c];
            }
        }
    }
    let Some(p) = solve3(ata, aty) else { return ([0.0; 3], f64::INFINITY) };
    let rss = pts
        .iter()
        .map(|&(x, y)| (y - p[0] - p[1] * (x - x0).min(0.0) - p[2] * (x - x0).max(0.0)).powi(2))
        .sum();
    (p, rss)
}

fn solve3(a: [[f64; 3]; 3], b: [f64; 3]) -> Option<[f64; 3]> {
    let det = |m: [[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(a);
    if d.abs() < 1e-300 {
        return None;
    }
    let mut out = [0.0; 3];
    for (k, slot) in out.iter_mut().enumerate() {
        let mut m = a;
        for r in 0..3 {
            m[r][k] = b[r];
        }
        *slot = det(m) / d;
    }
    Some(out)
}

fn invert4(m: [[f64; 4]; 4]) -> Option<[[f64; 4]; 4]> {
    let mut a = m;
    let mut inv = [[0.0; 4]; 4];
    for (i, row) in inv.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for col in 0..4 {
        let pivot = (col..4).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col];
        for c in 0..4 {
            a[col][c] /= p;
            inv[col][c] /= p;
        }
        for r in 0..4 {
            if r != col {
                let f = a[r][col];
                for c in 0..4 {
                    a[r][c] -= f * a[col][c];
                    inv[r][c] -= f * inv[col][c];
                }
            }
        }
    }
    Some(inv)
}

pub fn to_decibels(xi2: f64) -> Result<f64> {
    if !(xi2 > 0.0) || !xi2.is_finite() {
        return Err(invalid("xi2", format!("must be positive and finite, got {xi2}")));
    }
    Ok(10.0 * xi2.log10())
}

pub fn from_decibels(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// First time a series falls below `threshold`, linearly interpolated.
pub fn first_crossing_below(t: &[f64], values: &[f64], threshold: f64) -> Option<f64> {
    if values.first().is_some_and(|&v| v < threshold) {
        return t.first().copied();
    }
    t.windows(2).zip(values.windows(2)).find_map(|(tw, vw)| {
        (vw[0] >= threshold && vw[1] < threshold)
            .then(|| tw[0] + (tw[1] - tw[0]) * (vw[0] - threshold) / (vw[0] - vw[1]))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn refuses_short_windows() {
        assert!(matches!(linear_fit(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]), Err(Error::TooFewPoints { .. })));
    }

    #[test]
    fn exact_log_input_recovers_slope() {
        let sizes = [64.0, 128.0, 256.0, 512.0, 1024.0];
        let t: Vec<f64> = sizes.iter().map(|n: &f64| 0.3 + 1.7 * n.ln()).collect();
        let s = time_scaling(&sizes, &t, 0.5).unwrap();
        assert!((s.fit.slope - 1.7).abs() < 1e-10);
        assert!((s.predicted_slope - 1.0).abs() < 1e-15);
    }

    #[test]
    fn constant_series_has_zero_exponent() {
        let f = peak_variance_scaling(&[8.0, 16.0, 32.0, 64.0], &[3.0; 4]).unwrap();
        assert!(f.slope.abs() < 1e-14);
    }

    #[test]
    fn power_law_recovery() {
        let n = [64.0, 128.0, 256.0, 512.0];
        let y: Vec<f64> = n.iter().map(|x: &f64| 2.5 * x.powf(-0.5)).collect();
        let f = squeezing_exponent(&n, &y).unwrap();
        assert!((f.slope + 0.5).abs() < 1e-12);
        assert!((f.predict(100.0) - 0.25).abs() < 1e-12);
    }

    #[test]
    fn uncertainties_shrink_with_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut se = Vec::new();
        for n in [16usize, 64, 256, 1024] {
            let mut acc = 0.0;
            for _ in 0..20 {
                let x: Vec<f64> = (0..n).map(|i| i as f64 / n as f64).collect();
                let y: Vec<f64> = x.iter().map(|x| 1.0 + 2.0 * x + 0.1 * (rng.gen::<f64>() - 0.5)).collect();
                acc += linear_fit(&x, &y).unwrap().slope_stderr;
            }
            se.push(acc / 20.0);
        }
        for w in se.windows(2) {
            let ratio = w[0] / w[1];
            assert!((1.6..2.5).contains(&ratio), "{ratio}");
        }
    }

    #[test]
    fn parabolic_refinement_finds_vertex() {
        let t: Vec<f64> = (0..20).map(|i| 0.1 * i as f64).collect();
        let xi: Vec<f64> = t.iter().map(|t| 0.3 + (t - 0.937).powi(2)).collect();
        let angle = vec![2.0; 20];
        let o = optimal_squeezing_values(&t, &xi, &angle).unwrap();
        assert!(!o.boundary);
        assert!((o.t_opt - 0.937).abs() < 1e-12);
        assert!((o.xi2_opt - 0.3).abs() < 1e-12);
        assert_eq!(o.angle, 2.0);
    }

    #[test]
    fn boundary_minimum_is_flagged() {
        let t: Vec<f64> = (0..12).map(|i| i as f64).collect();
        let xi: Vec<f64> = t.iter().map(|t| 1.0 / (1.0 + t)).collect();
        assert!(optimal_squeezing_values(&t, &xi, &[]).unwrap().boundary);
        assert!(optimal_squeezing_values(&t[..5], &xi[..5], &[]).is_err());
    }

    #[test]
    fn second_maximum_rule() {
        let t: Vec<f64> = (0..400).map(|i| 0.01 * i as f64).collect();
        let v: Vec<f64> = t.iter().map(|t| (1.0 - (-t).exp()) * (1.0 + 0.3 * (4.0 * t).sin())).collect();
        let p = select_peak(&t, &v, 0.5).unwrap();
        assert_eq!(p.rule, PeakRule::SecondMaximum);
        let maxima = prominent_maxima(&v);
        assert!(p.time > t[maxima[0]]);
        // small ripples do not count
        let noisy: Vec<f64> = v.iter().enumerate().map(|(i, x)| x + 1e-4 * ((i % 2) as f64)).collect();
        assert_eq!(prominent_maxima(&noisy), maxima);
        let single: Vec<f64> = t.iter().map(|t| (-(t - 2.0).powi(2)).exp()).collect();
        assert_eq!(select_peak(&t, &single, 0.5).unwrap().rule, PeakRule::FirstMaximumFallback);
        assert_eq!(select_peak(&t, &single, 0.0).unwrap().rule, PeakRule::Plateau);
    }

    #[test]
    fn synthetic_crossover_round_trip() {
        let sizes: Vec<f64> = (0..12).map(|i| 50.0 * 1.4f64.powi(i)).collect();
        let values: Vec<f64> = sizes
            .iter()
            .map(|&n: &f64| if n < 400.0 { n.powi(2) } else { 400f64.powi(2) * (n / 400.0).powf(1.2) })
            .collect();
        let fit = detect_crossover(&sizes, &values).unwrap();
        let c = fit.crossover.expect("crossover");
        assert!((c.size / 400.0 - 1.0).abs() < 0.2, "{}", c.size);
        assert!((c.slope_below - 2.0).abs() < 1e-6 && (c.slope_above - 1.2).abs() < 1e-6);
    }

    #[test]
    fn single_slope_has_no_crossover() {
        let sizes: Vec<f64> = (0..8).map(|i| 10.0 * 2f64.powi(i)).collect();
        let values: Vec<f64> = sizes.iter().map(|n| n.powf(1.7)).collect();
        assert!(detect_crossover(&sizes, &values).unwrap().crossover.is_none());
        assert!(detect_crossover(&sizes[..5], &values[..5]).is_err());
    }

    #[test]
    fn decibels() {
        assert_eq!(to_decibels(1.0).unwrap(), 0.0);
        assert!((to_decibels(10f64.powf(-1.5)).unwrap() + 15.0).abs() < 1e-12);
        assert!(to_decibels(0.0).is_err());
        assert!(to_decibels(-1.0).is_err());
    }

    #[test]
    fn crossing_time() {
        let t = [0.0, 1.0, 2.0, 3.0];
        let v = [0.5, 0.4, 0.2, 0.3];
        assert!((first_crossing_below(&t, &v, 0.25).unwrap() - 1.75).abs() < 1e-12);
        assert!(first_crossing_below(&t, &v, 0.1).is_none());
    }

    proptest! {
        #[test]
        fn decibel_round_trip(x in 1e-8..1e8f64) {
            let back = from_decibels(to_decibels(x).unwrap());
            prop_assert!((back - x).abs() <= 1e-12 * x);
        }

        #[test]
        fn fits_ignore_point_order(seed in 0u64..1000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x: Vec<f64> = (0..9).map(|_| rng.gen_range(1.0..100.0)).collect();
            let y: Vec<f64> = x.iter().map(|x| x.powf(1.3) * rng.gen_range(0.9..1.1)).collect();
            let a = power_law_fit(&x, &y).unwrap();
            let mut order: Vec<usize> = (0..9).collect();
            order.reverse();
            order.swap(2, 5);
            let xs: Vec<f64> = order.iter().map(|&i| x[i]).collect();
            let ys: Vec<f64> = order.iter().map(|&i| y[i]).collect();
            let b = power_law_fit(&xs, &ys).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}
