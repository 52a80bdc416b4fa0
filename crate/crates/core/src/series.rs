//! Engine-independent container for observable time series.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::collective::CollectiveMoments;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    Jx,
    Jy,
    Jz,
    VarJx,
    VarJy,
    VarJz,
    CovYz,
    Xi2,
    Energy,
}

impl Observable {
    pub const ALL: [Observable; 9] = [
        Observable::Jx,
        Observable::Jy,
        Observable::Jz,
        Observable::VarJx,
        Observable::VarJy,
        Observable::VarJz,
        Observable::CovYz,
        Observable::Xi2,
        Observable::Energy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Observable::Jx => "jx",
            Observable::Jy => "jy",
            Observable::Jz => "jz",
            Observable::VarJx => "var_jx",
            Observable::VarJy => "var_jy",
            Observable::VarJz => "var_jz",
            Observable::CovYz => "cov_yz",
            Observable::Xi2 => "xi2",
            Observable::Energy => "energy",
        }
    }
}

/// Means and standard errors on the series time grid. Exact engines report
/// zero errors.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
}

impl Series {
    pub fn exact(mean: Vec<f64>) -> Self {
        let stderr = vec![0.0; mean.len()];
        Self { mean, stderr }
    }
}

/// `C^yy(d, t)` at one time, indexed by axis displacement `d = 0..`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationSnapshot {
    pub time: f64,
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObservableSeries {
    pub engine: String,
    pub n_spins: usize,
    pub t_grid: Vec<f64>,
    pub series: BTreeMap<Observable, Series>,
    /// Squeezing direction in the `(y, z)` plane, from `y` towards `z`.
    pub xi2_angle: Vec<f64>,
    /// False where `<J^x>^2` is too close to zero for `xi2` to mean anything.
    pub xi2_reliable: Vec<bool>,
    pub correlations: Vec<CorrelationSnapshot>,
    pub warnings: Vec<String>,
}

impl ObservableSeries {
    pub fn new(engine: impl Into<String>, n_spins: usize, t_grid: Vec<f64>) -> Self {
        Self {
            engine: engine.into(),
            n_spins,
            t_grid,
            series: BTreeMap::new(),
            xi2_angle: Vec::new(),
            xi2_reliable: Vec::new(),
            correlations: Vec::new(),
            warnings: Vec::new(),
        }
    }

    /// Series from exact collective moments; `energies` is optional.
    pub fn from_moments(
        engine: impl Into<String>,
        n_spins: usize,
        moments: &[CollectiveMoments],
        energies: Option<Vec<f64>>,
    ) -> Self {
        let t_grid = moments.iter().map(|m| m.time).collect();
        let mut out = Self::new(engine, n_spins, t_grid);
        let column = |f: &dyn Fn(&CollectiveMoments) -> f64| Series::exact(moments.iter().map(f).collect());
        out.series.insert(Observable::Jx, column(&|m| m.mean[0]));
        out.series.insert(Observable::Jy, column(&|m| m.mean[1]));
        out.series.insert(Observable::Jz, column(&|m| m.mean[2]));
        out.series.insert(Observable::VarJx, column(&|m| m.covariance[0][0]));
        out.series.insert(Observable::VarJy, column(&|m| m.covariance[1][1]));
        out.series.insert(Observable::VarJz, column(&|m| m.covariance[2][2]));
        out.series.insert(Observable::CovYz, column(&|m| m.covariance[1][2]));
        out.series.insert(Observable::Xi2, column(&|m| m.squeezing(n_spins)));
        if let Some(e) = energies {
            out.series.insert(Observable::Energy, Series::exact(e));
        }
        out.xi2_angle = moments.iter().map(|m| m.transverse_extrema().angle).collect();
        out.xi2_reliable = moments.iter().map(|m| m.mean[0].abs() > 1e-12 * n_spins as f64).collect();
        out
    }

    pub fn len(&self) -> usize {
        self.t_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t_grid.is_empty()
    }

    pub fn get(&self, observable: Observable) -> Option<&Series> {
        self.series.get(&observable)
    }

    /// Means of `observable`; panics if the engine did not produce it.
    pub fn mean(&self, observable: Observable) -> &[f64] {
        &self.series[&observable].mean
    }

    pub fn stderr(&self, observable: Observable) -> &[f64] {
        &self.series[&observable].stderr
    }

    /// Keep only the first `len` time points.
    pub fn truncate(&mut self, len: usize) {
        self.t_grid.truncate(len);
        for s in self.series.values_mut() {
            s.mean.truncate(len);
            s.stderr.truncate(len);
        }
        self.xi2_angle.truncate(len);
        self.xi2_reliable.truncate(len);
    }

    /// Long format `t,name,mean,stderr`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,name,mean,stderr\n");
        for (i, t) in self.t_grid.iter().enumerate() {
            for (obs, s) in &self.series {
                let _ = writeln!(out, "{t},{},{},{}", obs.name(), s.mean[i], s.stderr[i]);
            }
        }
        out
    }

    /// `t,d,mean,stderr` for every correlation snapshot.
    pub fn correlations_csv(&self) -> String {
        let mut out = String::from("t,d,mean,stderr\n");
        for snap in &self.correlations {
            for (d, (m, e)) in snap.mean.iter().zip(&snap.stderr).enumerate() {
                let _ = writeln!(out, "{},{d},{m},{e}", snap.time);
            }
        }
        out
    }
}
