//! Periodic hypercubic lattices with power-law XY couplings.
//!
//! Sites are indexed row-major, `i = x + L * y` in two dimensions. All
//! distances use the minimum-image convention on the torus, so the coupling
//! between two sites depends only on their displacement.

use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest lattice for which a dense `N x N` coupling table is built.
pub const DEFAULT_MAX_SITES: usize = 10_000;

/// Imaginary parts of lattice sums below this are rounding noise.
const IMAG_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub dimension: usize,
    pub linear_size: usize,
    /// Power-law exponent; `0` means all-to-all.
    pub alpha: f64,
    /// Overall coupling scale, the unit of energy.
    pub coupling: f64,
}

impl LatticeSpec {
    pub fn new(dimension: usize, linear_size: usize, alpha: f64, coupling: f64) -> Result<Self> {
        let spec = Self { dimension, linear_size, alpha, coupling };
        spec.validate()?;
        Ok(spec)
    }

    /// Dipolar (`alpha = 3`) square lattice with unit coupling.
    pub fn dipolar_square(linear_size: usize) -> Result<Self> {
        Self::new(2, linear_size, 3.0, 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=2).contains(&self.dimension) {
            return Err(Error::InvalidLattice(format!(
                "dimension must be 1 or 2, got {}",
                self.dimension
            )));
        }
        if self.linear_size < 2 {
            return Err(Error::InvalidLattice(format!(
                "linear size must be at least 2, got {}",
                self.linear_size
            )));
        }
        if !self.alpha.is_finite() || self.alpha < 0.0 {
            return Err(Error::InvalidLattice(format!(
                "alpha must be finite and non-negative, got {}",
                self.alpha
            )));
        }
        if !(self.coupling > 0.0) || !self.coupling.is_finite() {
            return Err(Error::InvalidLattice(format!(
                "coupling must be positive, got {}",
                self.coupling
            )));
        }
        Ok(())
    }

    pub fn n_sites(&self) -> usize {
        self.linear_size.pow(self.dimension as u32)
    }

    pub fn is_long_range(&self) -> bool {
        self.alpha <= self.dimension as f64
    }

    /// Lattice coordinates of site `i`.
    pub fn coords(&self, i: usize) -> [usize; 2] {
        let l = self.linear_size;
        match self.dimension {
            1 => [i, 0],
            _ => [i % l, i / l],
        }
    }

    pub fn site(&self, coords: [usize; 2]) -> usize {
        let l = self.linear_size;
        match self.dimension {
            1 => coords[0] % l,
            _ => coords[0] % l + l * (coords[1] % l),
        }
    }

    /// Minimum-image component of a displacement along one axis.
    pub fn wrap(&self, delta: isize) -> isize {
        let l = self.linear_size as isize;
        let d = delta.rem_euclid(l);
        if d > l / 2 {
            d - l
        } else {
            d
        }
    }

    /// Minimum-image displacement from site `i` to site `j`.
    pub fn displacement(&self, i: usize, j: usize) -> [isize; 2] {
        let a = self.coords(i);
        let b = self.coords(j);
        [
            self.wrap(b[0] as isize - a[0] as isize),
            self.wrap(b[1] as isize - a[1] as isize),
        ]
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        let [dx, dy] = self.displacement(i, j);
        ((dx * dx + dy * dy) as f64).sqrt()
    }

    /// `r^-alpha` for the displacement of every site from site 0, with the
    /// origin set to zero. Indexed like sites.
    pub fn distance_kernel(&self) -> Vec<f64> {
        (0..self.n_sites())
            .map(|j| if j == 0 { 0.0 } else { self.distance(0, j).powf(-self.alpha) })
            .collect()
    }

    /// Kac factor: `1 + sum_{r != 0} r^-alpha` when `alpha <= D`, else 1.
    pub fn kac_factor(&self) -> f64 {
        if self.is_long_range() {
            1.0 + self.distance_kernel().iter().sum::<f64>()
        } else {
            1.0
        }
    }
}

/// Dense pair-coupling table `J / (N_alpha r_ij^alpha)`.
#[derive(Clone, Debug)]
pub struct CouplingTable {
    spec: LatticeSpec,
    n: usize,
    kac_factor: f64,
    pair_coupling: Vec<f64>,
    min_image_distances: Vec<f64>,
}

impl CouplingTable {
    pub fn spec(&self) -> &LatticeSpec {
        &self.spec
    }

    pub fn n_sites(&self) -> usize {
        self.n
    }

    pub fn kac_factor(&self) -> f64 {
        self.kac_factor
    }

    pub fn coupling(&self, i: usize, j: usize) -> f64 {
        self.pair_coupling[i * self.n + j]
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.min_image_distances[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.pair_coupling[i * self.n..(i + 1) * self.n]
    }

    pub fn row_sum(&self, i: usize) -> f64 {
        self.row(i).iter().sum()
    }

    pub fn check_symmetric(&self) -> Result<()> {
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                if self.coupling(i, j) != self.coupling(j, i) {
                    return Err(Error::AsymmetricCouplings { i, j });
                }
            }
        }
        Ok(())
    }

    /// CSV dump with one `(i, j, value)` row per entry.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("i,j,value\n");
        for i in 0..self.n {
            for j in 0..self.n {
                let _ = writeln!(out, "{},{},{}", i, j, self.coupling(i, j));
            }
        }
        out
    }
}

pub fn build_couplings(spec: &LatticeSpec) -> Result<CouplingTable> {
    build_couplings_with_limit(spec, DEFAULT_MAX_SITES)
}

pub fn build_couplings_with_limit(spec: &LatticeSpec, max_sites: usize) -> Result<CouplingTable> {
    spec.validate()?;
    let n = spec.n_sites();
    if n > max_sites {
        return Err(Error::TooManySites { sites: n, max: max_sites });
    }
    let kac_factor = spec.kac_factor();
    let scale = spec.coupling / kac_factor;
    let mut pair_coupling = vec![0.0; n * n];
    let mut min_image_distances = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let r = spec.distance(i, j);
            min_image_distances[i * n + j] = r;
            pair_coupling[i * n + j] = scale * r.powf(-spec.alpha);
        }
    }
    Ok(CouplingTable { spec: *spec, n, kac_factor, pair_coupling, min_image_distances })
}

/// Lattice sums `gamma_k = sum_{r != 0} e^{i k.r} r^-alpha` over the allowed
/// wavevectors `k = 2 pi n / L`.
///
/// The raw sums carry no Kac factor; [`FourierFactors::normalized`] divides it
/// out, which is the form the spin-wave and rotor couplings use.
#[derive(Clone, Debug)]
pub struct FourierFactors {
    spec: LatticeSpec,
    kac_factor: f64,
    gamma: Vec<f64>,
}

impl FourierFactors {
    pub fn spec(&self) -> &LatticeSpec {
        &self.spec
    }

    pub fn len(&self) -> usize {
        self.gamma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gamma.is_empty()
    }

    /// Raw sum at mode index `m` (indexed like sites: `m = n_x + L n_y`).
    pub fn gamma(&self, mode: usize) -> f64 {
        self.gamma[mode]
    }

    pub fn gamma_zero(&self) -> f64 {
        self.gamma[0]
    }

    pub fn kac_factor(&self) -> f64 {
        self.kac_factor
    }

    pub fn normalized(&self, mode: usize) -> f64 {
        self.gamma[mode] / self.kac_factor
    }

    pub fn raw(&self) -> &[f64] {
        &self.gamma
    }

    /// Integer mode numbers `(n_x, n_y)` of mode `m`.
    pub fn mode_numbers(&self, mode: usize) -> [usize; 2] {
        self.spec.coords(mode)
    }

    /// Wavevector of mode `m`, folded into `(-pi, pi]`.
    pub fn wavevector(&self, mode: usize) -> [f64; 2] {
        let l = self.spec.linear_size;
        let [nx, ny] = self.mode_numbers(mode);
        let fold = |n: usize| 2.0 * PI * self.spec.wrap(n as isize) as f64 / l as f64;
        [fold(nx), if self.spec.dimension == 1 { 0.0 } else { fold(ny) }]
    }
}

/// Direct summation of the lattice sums for every wavevector.
pub fn fourier_factors(spec: &LatticeSpec) -> Result<FourierFactors> {
    spec.validate()?;
    let n = spec.n_sites();
    let l = spec.linear_size;
    let kernel = spec.distance_kernel();
    let cos_table: Vec<f64> = (0..l).map(|m| (2.0 * PI * m as f64 / l as f64).cos()).collect();
    let sin_table: Vec<f64> = (0..l).map(|m| (2.0 * PI * m as f64 / l as f64).sin()).collect();
    let displacements: Vec<[isize; 2]> = (0..n).map(|j| spec.displacement(0, j)).collect();
    let scale = kernel.iter().sum::<f64>().max(1.0);

    let mut gamma = Vec::with_capacity(n);
    for mode in 0..n {
        let [nx, ny] = spec.coords(mode);
        let (mut re, mut im) = (0.0, 0.0);
        for (w, d) in kernel.iter().zip(&displacements) {
            if *w == 0.0 {
                continue;
            }
            let phase = (nx as isize * d[0] + ny as isize * d[1]).rem_euclid(l as isize) as usize;
            re += w * cos_table[phase];
            im += w * sin_table[phase];
        }
        if im.abs() > IMAG_TOLERANCE * scale {
            return Err(Error::ComplexFourierFactor { mode: vec![nx, ny], imag: im });
        }
        gamma.push(re);
    }
    Ok(FourierFactors { spec: *spec, kac_factor: spec.kac_factor(), gamma })
}

/// Same lattice sums, taken from a dense coupling table's first row; refuses
/// tables that are not symmetric.
pub fn fourier_factors_from_table(table: &CouplingTable) -> Result<FourierFactors> {
    table.check_symmetric()?;
    let spec = table.spec;
    let mut factors = fourier_factors(&spec)?;
    // the table already includes J / N_alpha; rescale its row to cross-check
    let row_sum = table.row_sum(0) * table.kac_factor() / spec.coupling;
    let direct = factors.gamma_zero();
    if (row_sum - direct).abs() > 1e-9 * direct.abs().max(1.0) {
        return Err(Error::Analysis(format!(
            "coupling row sum {row_sum} disagrees with lattice sum {direct}"
        )));
    }
    factors.kac_factor = table.kac_factor();
    Ok(factors)
}

/// Raw lattice sum at a single wavevector given by integer mode numbers.
pub fn gamma_at(spec: &LatticeSpec, mode_numbers: [usize; 2]) -> f64 {
    let l = spec.linear_size as f64;
    (1..spec.n_sites())
        .map(|j| {
            let d = spec.displacement(0, j);
            let phase = 2.0 * PI * (mode_numbers[0] as f64 * d[0] as f64
                + mode_numbers[1] as f64 * d[1] as f64)
                / l;
            phase.cos() * spec.distance(0, j).powf(-spec.alpha)
        })
        .sum()
}
