//! Linearised Holstein-Primakoff model of the all-to-all dynamics.
//!
//! Around the coherent state the collective spin maps onto one bosonic mode
//! with `H_b = -(chi/2)(a^2 + a'^2) - (delta/2)(a'a + aa')`, a squeezing
//! Hamiltonian after a Bogolyubov rotation. Everything here is closed form.
//!
//! Quadrature variances are evaluated in the regular form
//! `1/2 + chi (chi - delta cos 2theta) t^2 shc(lambda t)^2
//!  + chi sin 2theta t shc(2 lambda t)` with `shc(x) = sinh(x)/x`, which is
//! algebraically the constant plus `e^{+-2 lambda t}` expansion and stays
//! finite at the window edges where `lambda -> 0`.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Relative `lambda / chi` below which the three-term expansion is replaced
/// by the regular form.
const EDGE_THRESHOLD: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BosonicParams {
    /// `N / (4 I) = J / 2`.
    pub chi: f64,
    /// Detuning from the optimal field, `Omega - J / 2`.
    pub delta: f64,
    /// Squeezing rate `sqrt(chi^2 - delta^2) = sqrt(Omega (J - Omega))`.
    pub lambda: f64,
    /// Bogolyubov coefficients; infinite at the window edges.
    pub u: f64,
    pub v: f64,
    /// Optimal field `J / 2`.
    pub omega0: f64,
}

impl BosonicParams {
    /// Parameters for field `omega` and coupling `coupling`; the field must
    /// lie in `[0, coupling]`.
    pub fn new(omega: f64, coupling: f64) -> Result<Self> {
        if !(coupling > 0.0) || !coupling.is_finite() {
            return Err(invalid("coupling", format!("must be positive, got {coupling}")));
        }
        let chi = 0.5 * coupling;
        let delta = omega - chi;
        if !omega.is_finite() || delta.abs() > chi {
            return Err(invalid(
                "omega",
                format!("field {omega} outside the window [0, {coupling}] where the mode is squeezing"),
            ));
        }
        let lambda = (chi * chi - delta * delta).max(0.0).sqrt();
        let ratio = chi / lambda;
        let u = (0.5 * (ratio + 1.0)).sqrt();
        let v = delta.signum() * (0.5 * (ratio - 1.0)).sqrt();
        let v = if delta == 0.0 { 0.0 } else { v };
        Ok(Self { chi, delta, lambda, u, v, omega0: chi })
    }

    pub fn omega(&self) -> f64 {
        self.omega0 + self.delta
    }

    fn at_edge(&self) -> bool {
        self.lambda < EDGE_THRESHOLD * self.chi
    }

    /// Coefficients `(A, B, C)` of `<X_theta^2> = A + B cos 2theta + C sin 2theta`.
    pub fn quadrature_coefficients(&self, t: f64) -> (f64, f64, f64) {
        let (chi, delta) = (self.chi, self.delta);
        let s1 = t * sinhc(self.lambda * t);
        let s2 = t * sinhc(2.0 * self.lambda * t);
        (0.5 + chi * chi * s1 * s1, -chi * delta * s1 * s1, chi * s2)
    }
}

fn sinhc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 + x2 / 6.0 * (1.0 + x2 / 20.0)
    } else {
        x.sinh() / x
    }
}

/// `<X_theta^2>` for the vacuum evolved for time `t` (negative allowed).
pub fn quadrature_variance(params: &BosonicParams, theta: f64, t: f64) -> f64 {
    if params.at_edge() {
        let (a, b, c) = params.quadrature_coefficients(t);
        return a + b * (2.0 * theta).cos() + c * (2.0 * theta).sin();
    }
    let BosonicParams { chi, delta, lambda, .. } = *params;
    let (c2, s2) = ((2.0 * theta).cos(), (2.0 * theta).sin());
    let r = chi / lambda;
    let d = delta / lambda;
    0.5 * delta / (lambda * lambda) * (-delta + chi * c2)
        + 0.25 * r * (r + s2 - d * c2) * (2.0 * lambda * t).exp()
        + 0.25 * r * (r - s2 - d * c2) * (-2.0 * lambda * t).exp()
}

/// `<a'a> = (chi / lambda)^2 sinh^2(lambda t)`; `(chi t)^2` at the edges.
pub fn boson_number(params: &BosonicParams, t: f64) -> f64 {
    let s = params.chi * t * sinhc(params.lambda * t);
    s * s
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureExtrema {
    pub min: f64,
    pub max: f64,
    /// Minimising angle in `[0, pi)`.
    pub angle: f64,
    /// All angles equivalent (isotropic vacuum).
    pub degenerate: bool,
}

pub fn quadrature_extrema(params: &BosonicParams, t: f64) -> QuadratureExtrema {
    let (a, b, c) = params.quadrature_coefficients(t);
    let radius = b.hypot(c);
    if radius <= 1e-300 {
        return QuadratureExtrema { min: a, max: a, angle: 0.0, degenerate: true };
    }
    let angle = (0.5 * (c.atan2(b) + PI)).rem_euclid(PI);
    QuadratureExtrema { min: a - radius, max: a + radius, angle, degenerate: false }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MinVarianceAngle {
    pub angle: f64,
    pub degenerate: bool,
}

pub fn min_variance_angle(params: &BosonicParams, t: f64) -> MinVarianceAngle {
    let e = quadrature_extrema(params, t);
    MinVarianceAngle { angle: e.angle, degenerate: e.degenerate }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SqueezingEstimate {
    pub xi2: f64,
    pub boson_number: f64,
    /// Linearisation usable at all (`<a'a> < N / 2`).
    pub valid: bool,
    /// Depletion small enough for quantitative comparison (`<a'a> < N / 20`).
    pub quantitative: bool,
}

/// `xi_R^2 = 2 min_theta <X_theta^2> / (1 - 2 <a'a> / N)^2`.
pub fn squeezing_estimate(params: &BosonicParams, n_spins: usize, t: f64) -> SqueezingEstimate {
    let n = n_spins as f64;
    let bosons = boson_number(params, t);
    let depletion = 1.0 - 2.0 * bosons / n;
    let min = quadrature_extrema(params, t).min;
    SqueezingEstimate {
        xi2: 2.0 * min / (depletion * depletion),
        boson_number: bosons,
        valid: bosons < 0.5 * n,
        quantitative: bosons < 0.05 * n,
    }
}

/// Collective-spin variances predicted by the mode: `(N/2) <X^2>` for the
/// squeezed and anti-squeezed transverse components.
pub fn spin_variances(params: &BosonicParams, n_spins: usize, t: f64) -> (f64, f64) {
    let e = quadrature_extrema(params, t);
    let scale = 0.5 * n_spins as f64;
    (scale * e.min, scale * e.max)
}

/// `<X^2>` along `y` (`theta = 0`), i.e. `2 Var(J^y) / N`.
pub fn var_jy(params: &BosonicParams, n_spins: usize, t: f64) -> f64 {
    0.5 * n_spins as f64 * quadrature_variance(params, 0.0, t)
}

/// Angle equivalence modulo pi, as a signed difference in `(-pi/2, pi/2]`.
pub fn angle_difference(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(PI);
    if d > FRAC_PI_2 {
        d - PI
    } else {
        d
    }
}
