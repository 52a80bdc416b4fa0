//! Real symmetric tridiagonal operators: eigendecomposition by implicit QL
//! and Chebyshev propagation of `exp(-i H t)`.

use num_complex::Complex64;

use crate::error::{Error, Result};

const MAX_QL_ITERATIONS: usize = 60;

/// Symmetric tridiagonal matrix stored as its diagonal and first
/// off-diagonal (`off[k]` couples `k` and `k + 1`).
#[derive(Clone, Debug, PartialEq)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert_eq!(off.len() + 1, diag.len().max(1), "off-diagonal length mismatch");
        Self { diag, off }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn apply(&self, x: &[Complex64], out: &mut [Complex64]) {
        let n = self.dim();
        for k in 0..n {
            let mut acc = x[k] * self.diag[k];
            if k > 0 {
                acc += x[k - 1] * self.off[k - 1];
            }
            if k + 1 < n {
                acc += x[k + 1] * self.off[k];
            }
            out[k] = acc;
        }
    }

    pub fn expectation(&self, x: &[Complex64]) -> f64 {
        let mut e = 0.0;
        for k in 0..self.dim() {
            e += self.diag[k] * x[k].norm_sqr();
            if k + 1 < self.dim() {
                e += 2.0 * self.off[k] * (x[k].conj() * x[k + 1]).re;
            }
        }
        e
    }

    /// Gershgorin bounds on the spectrum.
    pub fn spectral_bounds(&self) -> (f64, f64) {
        let n = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for k in 0..n {
            let mut radius = 0.0;
            if k > 0 {
                radius += self.off[k - 1].abs();
            }
            if k + 1 < n {
                radius += self.off[k].abs();
            }
            lo = lo.min(self.diag[k] - radius);
            hi = hi.max(self.diag[k] + radius);
        }
        (lo, hi)
    }
}

/// Eigenvalues and orthonormal eigenvectors; eigenvector `j` is the
/// contiguous slice `vectors[j * n..(j + 1) * n]`.
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: Vec<f64>,
}

impl Eigen {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn vector(&self, j: usize) -> &[f64] {
        let n = self.dim();
        &self.vectors[j * n..(j + 1) * n]
    }
}

/// Implicit QL with Wilkinson shifts.
pub fn eigen(matrix: &SymTridiagonal) -> Result<Eigen> {
    let n = matrix.dim();
    let mut d = matrix.diag.clone();
    let mut e = matrix.off.clone();
    e.push(0.0);
    let mut z = vec![0.0; n * n];
    for j in 0..n {
        z[j * n + j] = 1.0;
    }

    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            if iterations > MAX_QL_ITERATIONS {
                return Err(Error::NoConvergence { iterations });
            }

            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;

                let (left, right) = z.split_at_mut((i + 1) * n);
                let zi = &mut left[i * n..];
                let zi1 = &mut right[..n];
                for (a, b) in zi.iter_mut().zip(zi1.iter_mut()) {
                    let f = *b;
                    *b = s * *a + c * f;
                    *a = c * *a - s * f;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(Eigen { values: d, vectors: z })
}

/// Spectral propagator built from one eigendecomposition.
#[derive(Clone, Debug)]
pub struct SpectralPropagator {
    eigen: Eigen,
}

impl SpectralPropagator {
    pub fn new(matrix: &SymTridiagonal) -> Result<Self> {
        Ok(Self { eigen: eigen(matrix)? })
    }

    pub fn eigen(&self) -> &Eigen {
        &self.eigen
    }

    /// Coefficients of `psi` in the eigenbasis.
    pub fn project(&self, psi: &[Complex64]) -> Vec<Complex64> {
        (0..self.eigen.dim())
            .map(|j| {
                self.eigen
                    .vector(j)
                    .iter()
                    .zip(psi)
                    .map(|(v, p)| p * *v)
                    .sum()
            })
            .collect()
    }

    /// `exp(-i H t) psi` given the eigenbasis coefficients of `psi`.
    pub fn at(&self, coefficients: &[Complex64], t: f64) -> Vec<Complex64> {
        let n = self.eigen.dim();
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (j, c) in coefficients.iter().enumerate() {
            let phase = Complex64::from_polar(1.0, -self.eigen.values[j] * t) * c;
            if phase.norm_sqr() == 0.0 {
                continue;
            }
            for (o, v) in out.iter_mut().zip(self.eigen.vector(j)) {
                *o += phase * *v;
            }
        }
        out
    }
}

/// Bessel functions `J_0(x) .. J_{n_max}(x)` for `x >= 0` by Miller's
/// downward recurrence normalised with `J_0 + 2 sum J_{2k} = 1`.
pub fn bessel_j_sequence(x: f64, n_max: usize) -> Vec<f64> {
    if x == 0.0 {
        let mut out = vec![0.0; n_max + 1];
        out[0] = 1.0;
        return out;
    }
    let start = {
        let guess = n_max.max(x.ceil() as usize) + 20 + (x.sqrt() as usize) * 4;
        guess + guess % 2
    };
    let mut values = vec![0.0; start + 2];
    let mut next = 0.0;
    let mut current = 1e-300;
    let mut norm = 0.0;
    for k in (0..=start).rev() {
        values[k] = current;
        if k % 2 == 0 {
            norm += if k == 0 { current } else { 2.0 * current };
        }
        if k == 0 {
            break;
        }
        let previous = 2.0 * k as f64 / x * current - next;
        next = current;
        current = previous;
        if current.abs() > 1e250 {
            // rescale to avoid overflow
            let scale = 1e-250;
            current *= scale;
            next *= scale;
            norm *= scale;
            for v in values[k..].iter_mut() {
                *v *= scale;
            }
        }
    }
    values.truncate(n_max + 1);
    values.iter_mut().for_each(|v| *v /= norm);
    values
}

/// Chebyshev expansion of `exp(-i H dt)`; needs only matrix-vector products,
/// so it scales to large tridiagonal operators.
#[derive(Clone, Debug)]
pub struct ChebyshevPropagator {
    matrix: SymTridiagonal,
    center: f64,
    half_width: f64,
}

impl ChebyshevPropagator {
    pub fn new(matrix: &SymTridiagonal) -> Self {
        let (lo, hi) = matrix.spectral_bounds();
        let center = 0.5 * (lo + hi);
        let half_width = (0.5 * (hi - lo)).max(1e-12) * (1.0 + 1e-9);
        Self { matrix: matrix.clone(), center, half_width }
    }

    pub fn step(&self, psi: &[Complex64], dt: f64) -> Vec<Complex64> {
        let n = psi.len();
        let x = self.half_width * dt.abs();
        let n_terms = (x * 1.1 + 40.0 + 10.0 * x.powf(1.0 / 3.0)) as usize;
        let bessel = bessel_j_sequence(x, n_terms);
        let sign = if dt >= 0.0 { 1.0 } else { -1.0 };
        // (-i sign)^k
        let unit = Complex64::new(0.0, -sign);

        let scaled = |v: &[Complex64], out: &mut [Complex64]| {
            self.matrix.apply(v, out);
            for (o, vi) in out.iter_mut().zip(v) {
                *o = (*o - vi * self.center) / self.half_width;
            }
        };

        let mut t_prev: Vec<Complex64> = psi.to_vec();
        let mut t_curr = vec![Complex64::new(0.0, 0.0); n];
        scaled(&t_prev, &mut t_curr);
        let mut acc: Vec<Complex64> = t_prev.iter().map(|v| v * bessel[0]).collect();
        let mut coeff = unit * 2.0 * bessel[1];
        for (a, v) in acc.iter_mut().zip(&t_curr) {
            *a += v * coeff;
        }
        let mut tmp = vec![Complex64::new(0.0, 0.0); n];
        let mut power = unit;
        for (k, b) in bessel.iter().enumerate().skip(2) {
            scaled(&t_curr, &mut tmp);
            for (t, p) in tmp.iter_mut().zip(&t_prev) {
                *t = *t * 2.0 - p;
            }
            std::mem::swap(&mut t_prev, &mut t_curr);
            std::mem::swap(&mut t_curr, &mut tmp);
            power *= unit;
            coeff = power * 2.0 * *b;
            for (a, v) in acc.iter_mut().zip(&t_curr) {
                *a += v * coeff;
            }
            if k > x as usize + 10 && b.abs() < 1e-17 {
                break;
            }
        }
        let global = Complex64::from_polar(1.0, -self.center * dt);
        acc.iter_mut().for_each(|a| *a *= global);
        acc
    }
}
