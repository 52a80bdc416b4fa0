//! Exact dynamics of the all-to-all model inside the maximal-spin Dicke
//! sector, `H = (J / N) (J^z)^2 + Omega J^x`.
//!
//! States are stored in the `J^z` eigenbasis where the Hamiltonian is real
//! symmetric tridiagonal. The same machinery drives the rotor of the
//! rotor/spin-wave decomposition, with the coupling replaced by the
//! effective one.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::tridiagonal::{ChebyshevPropagator, SpectralPropagator, SymTridiagonal};

/// Norm tolerance enforced at every output time.
pub const NORM_TOLERANCE: f64 = 1e-10;

/// Above this dimension propagation switches from a full
/// eigendecomposition to Chebyshev stepping.
pub const SPECTRAL_MAX_DIM: usize = 1025;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BasisAxis {
    X,
    Z,
}

/// Pure state of `N` spins-1/2 in the `J = N / 2` sector. Amplitude `k`
/// belongs to magnetic quantum number `m = k - N / 2` along `basis_axis`.
#[derive(Clone, Debug, PartialEq)]
pub struct DickeState {
    n_spins: usize,
    amplitudes: Vec<Complex64>,
    basis_axis: BasisAxis,
}

impl DickeState {
    pub fn from_amplitudes(
        n_spins: usize,
        amplitudes: Vec<Complex64>,
        basis_axis: BasisAxis,
    ) -> Result<Self> {
        if amplitudes.len() != n_spins + 1 {
            return Err(invalid(
                "amplitudes",
                format!("expected {} amplitudes, got {}", n_spins + 1, amplitudes.len()),
            ));
        }
        Ok(Self { n_spins, amplitudes, basis_axis })
    }

    /// `|->_x>^N` written in the `J^z` basis: binomial amplitudes
    /// `2^-J sqrt(C(2J, J + m))`, all positive.
    pub fn coherent_x(n_spins: usize) -> Self {
        let n = n_spins;
        let mut log_binomial = 0.0;
        let log_two = std::f64::consts::LN_2;
        let amplitudes = (0..=n)
            .map(|k| {
                if k > 0 {
                    log_binomial += ((n - k + 1) as f64).ln() - (k as f64).ln();
                }
                Complex64::new((0.5 * log_binomial - 0.5 * n as f64 * log_two).exp(), 0.0)
            })
            .collect();
        Self { n_spins, amplitudes, basis_axis: BasisAxis::Z }
    }

    /// The same coherent state in its own `J^x` basis (weight on `m = +J`).
    pub fn coherent_x_in_x_basis(n_spins: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); n_spins + 1];
        amplitudes[n_spins] = Complex64::new(1.0, 0.0);
        Self { n_spins, amplitudes, basis_axis: BasisAxis::X }
    }

    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    pub fn spin_length(&self) -> f64 {
        0.5 * self.n_spins as f64
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn basis_axis(&self) -> BasisAxis {
        self.basis_axis
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Magnetic quantum number of amplitude `k`.
    pub fn m(&self, k: usize) -> f64 {
        k as f64 - self.spin_length()
    }

    /// Re-express in the `J^z` basis. `J^x` eigenstates map to `J^z`
    /// eigenstates under a rotation by `-pi/2` about `y`.
    pub fn to_z_basis(&self) -> DickeState {
        match self.basis_axis {
            BasisAxis::Z => self.clone(),
            BasisAxis::X => {
                let rotated = rotate_about_y(self.n_spins, &self.amplitudes, std::f64::consts::FRAC_PI_2);
                Self { n_spins: self.n_spins, amplitudes: rotated, basis_axis: BasisAxis::Z }
            }
        }
    }

    /// Weight outside the sector that is even under `m -> -m` (the `J^x`
    /// parity sector of the initial coherent state).
    pub fn odd_parity_weight(&self) -> f64 {
        let n = self.amplitudes.len();
        (0..n)
            .map(|k| 0.25 * (self.amplitudes[k] - self.amplitudes[n - 1 - k]).norm_sqr())
            .sum()
    }
}

/// `exp(-i angle J^y)` applied in the `J^z` basis. `-i J^y` is real and
/// antisymmetric there, so a scaled Taylor series stays real-exact.
fn rotate_about_y(n_spins: usize, psi: &[Complex64], angle: f64) -> Vec<Complex64> {
    let j = 0.5 * n_spins as f64;
    let ladder: Vec<f64> = (0..n_spins)
        .map(|k| {
            let m = k as f64 - j;
            (j * (j + 1.0) - m * (m + 1.0)).sqrt()
        })
        .collect();
    // -i J^y = (J^- - J^+) / 2
    let generator = |v: &[Complex64]| -> Vec<Complex64> {
        let n = v.len();
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for k in 0..n {
            if k + 1 < n {
                out[k] += v[k + 1] * (0.5 * ladder[k]);
            }
            if k > 0 {
                out[k] -= v[k - 1] * (0.5 * ladder[k - 1]);
            }
        }
        out
    };
    let steps = ((angle.abs() * (j + 1.0)).ceil() as usize).max(1);
    let h = angle / steps as f64;
    let mut state = psi.to_vec();
    for _ in 0..steps {
        let mut term = state.clone();
        let mut next = state.clone();
        for order in 1..40 {
            term = generator(&term);
            let scale = h / order as f64;
            term.iter_mut().for_each(|t| *t *= scale);
            let size: f64 = term.iter().map(|t| t.norm_sqr()).sum();
            next.iter_mut().zip(&term).for_each(|(a, b)| *a += b);
            if size < 1e-34 {
                break;
            }
        }
        state = next;
    }
    state
}

/// The twist-and-turn Hamiltonian `(J / N) (J^z)^2 + Omega J^x` on the
/// Dicke sector, in the `J^z` basis, additive constant dropped.
#[derive(Clone, Debug)]
pub struct TatHamiltonian {
    n_spins: usize,
    omega: f64,
    coupling: f64,
    matrix: SymTridiagonal,
}

impl TatHamiltonian {
    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn matrix(&self) -> &SymTridiagonal {
        &self.matrix
    }

    pub fn energy(&self, state: &DickeState) -> f64 {
        self.matrix.expectation(&state.amplitudes)
    }
}

pub fn build_tat_hamiltonian(n_spins: usize, omega: f64, coupling: f64) -> Result<TatHamiltonian> {
    if n_spins < 2 {
        return Err(invalid("n_spins", format!("need at least 2 spins, got {n_spins}")));
    }
    if !(coupling > 0.0) || !coupling.is_finite() {
        return Err(invalid("coupling", format!("must be positive, got {coupling}")));
    }
    if !omega.is_finite() {
        return Err(invalid("omega", "must be finite"));
    }
    let j = 0.5 * n_spins as f64;
    let inertia = coupling / n_spins as f64;
    let diag = (0..=n_spins)
        .map(|k| {
            let m = k as f64 - j;
            inertia * m * m
        })
        .collect();
    let off = (0..n_spins)
        .map(|k| {
            let m = k as f64 - j;
            0.5 * omega * (j * (j + 1.0) - m * (m + 1.0)).sqrt()
        })
        .collect();
    Ok(TatHamiltonian { n_spins, omega, coupling, matrix: SymTridiagonal::new(diag, off) })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Propagation {
    /// Eigendecomposition up to [`SPECTRAL_MAX_DIM`], Chebyshev above.
    Auto,
    Spectral,
    Chebyshev,
}

/// `exp(-i H t) |state>` at every time of an ascending grid starting at
/// or after zero.
pub fn evolve(state: &DickeState, hamiltonian: &TatHamiltonian, t_grid: &[f64]) -> Result<Vec<DickeState>> {
    evolve_with(state, hamiltonian, t_grid, Propagation::Auto)
}

pub fn evolve_with(
    state: &DickeState,
    hamiltonian: &TatHamiltonian,
    t_grid: &[f64],
    method: Propagation,
) -> Result<Vec<DickeState>> {
    if state.n_spins != hamiltonian.n_spins {
        return Err(invalid("state", "spin number differs from the Hamiltonian's"));
    }
    check_grid(t_grid)?;
    let initial = state.to_z_basis();
    let dim = initial.amplitudes.len();
    let method = match method {
        Propagation::Auto if dim <= SPECTRAL_MAX_DIM => Propagation::Spectral,
        Propagation::Auto => Propagation::Chebyshev,
        other => other,
    };

    let wrap = |amplitudes: Vec<Complex64>, t: f64| -> Result<DickeState> {
        let out = DickeState { n_spins: state.n_spins, amplitudes, basis_axis: BasisAxis::Z };
        let norm = out.norm();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NormDrift { time: t, norm, tolerance: NORM_TOLERANCE });
        }
        Ok(out)
    };

    match method {
        Propagation::Spectral => {
            let propagator = SpectralPropagator::new(&hamiltonian.matrix)?;
            let coefficients = propagator.project(&initial.amplitudes);
            t_grid
                .iter()
                .map(|&t| {
                    if t == 0.0 {
                        wrap(initial.amplitudes.clone(), t)
                    } else {
                        wrap(propagator.at(&coefficients, t), t)
                    }
                })
                .collect()
        }
        _ => {
            let propagator = ChebyshevPropagator::new(&hamiltonian.matrix);
            let mut out = Vec::with_capacity(t_grid.len());
            let mut current = initial.amplitudes.clone();
            let mut now = 0.0;
            for &t in t_grid {
                if t > now {
                    current = propagator.step(&current, t - now);
                    now = t;
                }
                out.push(wrap(current.clone(), t)?);
            }
            Ok(out)
        }
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

/// First moments and symmetrised covariance of the collective spin.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CollectiveMoments {
    pub time: f64,
    pub mean: [f64; 3],
    pub covariance: [[f64; 3]; 3],
}

impl CollectiveMoments {
    pub fn variance(&self, axis: usize) -> f64 {
        self.covariance[axis][axis]
    }

    /// `<J^2>` from means and covariances.
    pub fn total_spin_squared(&self) -> f64 {
        (0..3).map(|a| self.covariance[a][a] + self.mean[a] * self.mean[a]).sum()
    }

    /// Minimum and maximum variance in the `(y, z)` plane with the angle
    /// (from `y` towards `z`, in `[0, pi)`) of the minimising direction.
    pub fn transverse_extrema(&self) -> TransverseExtrema {
        transverse_extrema(self.covariance[1][1], self.covariance[2][2], self.covariance[1][2])
    }

    /// `N min_perp Var / <J^x>^2`.
    pub fn squeezing(&self, n_spins: usize) -> f64 {
        n_spins as f64 * self.transverse_extrema().min / (self.mean[0] * self.mean[0])
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransverseExtrema {
    pub min: f64,
    pub max: f64,
    pub angle: f64,
}

pub fn transverse_extrema(var_y: f64, var_z: f64, cov_yz: f64) -> TransverseExtrema {
    let mean = 0.5 * (var_y + var_z);
    let half_diff = 0.5 * (var_y - var_z);
    let radius = half_diff.hypot(cov_yz);
    // maximal direction at angle phi with tan(2 phi) = 2 cov / (vy - vz)
    let max_angle = 0.5 * cov_yz.atan2(half_diff);
    let angle = (max_angle + std::f64::consts::FRAC_PI_2).rem_euclid(std::f64::consts::PI);
    TransverseExtrema { min: mean - radius, max: mean + radius, angle }
}

/// Exact moments via ladder-operator matrix elements in the `J^z` basis.
pub fn moments(state: &DickeState, time: f64) -> CollectiveMoments {
    let state = state.to_z_basis();
    let psi = &state.amplitudes;
    let n = psi.len();
    let j = state.spin_length();
    let jj = j * (j + 1.0);
    let ladder = |m: f64| (jj - m * (m + 1.0)).max(0.0).sqrt();

    let mut jz = 0.0;
    let mut jz2 = 0.0;
    let mut jp = Complex64::new(0.0, 0.0);
    let mut jp2 = Complex64::new(0.0, 0.0);
    let mut z_jp = Complex64::new(0.0, 0.0);
    let mut jp_jm = 0.0;
    let mut jm_jp = 0.0;
    for k in 0..n {
        let m = k as f64 - j;
        let w = psi[k].norm_sqr();
        jz += m * w;
        jz2 += m * m * w;
        jp_jm += (jj - m * (m - 1.0)) * w;
        jm_jp += (jj - m * (m + 1.0)) * w;
        if k + 1 < n {
            // <m+1| J^+ |m>
            let element = psi[k + 1].conj() * psi[k] * ladder(m);
            jp += element;
            // {J^z, J^+}: (m + 1) + m
            z_jp += element * (2.0 * m + 1.0);
        }
        if k + 2 < n {
            jp2 += psi[k + 2].conj() * psi[k] * ladder(m) * ladder(m + 1.0);
        }
    }

    let jx = jp.re;
    let jy = jp.im;
    let jx2 = 0.25 * (2.0 * jp2.re + jp_jm + jm_jp);
    let jy2 = 0.25 * (-2.0 * jp2.re + jp_jm + jm_jp);
    let sym_xy = 0.5 * jp2.im;
    let sym_zx = 0.5 * z_jp.re;
    let sym_zy = 0.5 * z_jp.im;

    let mean = [jx, jy, jz];
    let cxy = sym_xy - jx * jy;
    let cxz = sym_zx - jx * jz;
    let cyz = sym_zy - jy * jz;
    CollectiveMoments {
        time,
        mean,
        covariance: [
            [jx2 - jx * jx, cxy, cxz],
            [cxy, jy2 - jy * jy, cyz],
            [cxz, cyz, jz2 - jz * jz],
        ],
    }
}

/// Moments of the coherent state evolved under the TaT Hamiltonian.
pub fn tat_moments(n_spins: usize, omega: f64, coupling: f64, t_grid: &[f64]) -> Result<Vec<CollectiveMoments>> {
    let hamiltonian = build_tat_hamiltonian(n_spins, omega, coupling)?;
    let states = evolve(&DickeState::coherent_x(n_spins), &hamiltonian, t_grid)?;
    Ok(states.iter().zip(t_grid).map(|(s, &t)| moments(s, t)).collect())
}
