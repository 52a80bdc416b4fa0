//! Independent reference implementations used only by tests.
#![allow(dead_code)]

use num_complex::Complex64;

/// Brute-force state-vector evolution of `N` spin-1/2 with all-to-all XY
/// couplings `-(J/N) sum_{i != j} (S^x S^x + S^y S^y) + Omega sum S^x` in
/// the full `2^N` space. Bit `i` set means spin `i` is up along `z`.
pub struct FullSpace {
    pub n: usize,
    pub coupling: f64,
    pub field: f64,
}

pub type Moments = ([f64; 3], [[f64; 3]; 3]);

impl FullSpace {
    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn apply_h(&self, psi: &[Complex64], out: &mut [Complex64]) {
        let pair = -self.coupling / self.n as f64;
        let flip = 0.5 * self.field;
        for (state, o) in out.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..self.n {
                acc += flip * psi[state ^ (1 << i)];
                for j in (i + 1)..self.n {
                    // S+S- + S-S+ connects states with spins i, j opposite
                    if ((state >> i) & 1) != ((state >> j) & 1) {
                        acc += pair * psi[state ^ (1 << i) ^ (1 << j)];
                    }
                }
            }
            *o = acc;
        }
    }

    pub fn x_polarised(&self) -> Vec<Complex64> {
        let a = (self.dim() as f64).powf(-0.5);
        vec![Complex64::new(a, 0.0); self.dim()]
    }

    /// `exp(-i H t) psi` by Taylor series over short steps.
    pub fn evolve(&self, psi: &[Complex64], t: f64) -> Vec<Complex64> {
        let bound = self.coupling * self.n as f64 / 2.0 + self.field.abs() * self.n as f64 / 2.0;
        let steps = ((t.abs() * bound / 0.25).ceil() as usize).max(1);
        let h = t / steps as f64;
        let mut state = psi.to_vec();
        let mut term = vec![Complex64::new(0.0, 0.0); self.dim()];
        let mut next = term.clone();
        for _ in 0..steps {
            term.copy_from_slice(&state);
            for k in 1..40 {
                self.apply_h(&term, &mut next);
                let c = Complex64::new(0.0, -h / k as f64);
                let mut size = 0.0;
                for (t, n) in term.iter_mut().zip(&next) {
                    *t = c * n;
                    size += t.norm_sqr();
                }
                for (s, t) in state.iter_mut().zip(&term) {
                    *s += t;
                }
                if size < 1e-40 {
                    break;
                }
            }
        }
        state
    }

    /// `J^a psi` for `a = x, y, z`.
    fn apply_j(&self, psi: &[Complex64], axis: usize) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim()];
        for (state, o) in out.iter_mut().enumerate() {
            for i in 0..self.n {
                let up = (state >> i) & 1 == 1;
                let flipped = psi[state ^ (1 << i)];
                *o += match axis {
                    0 => 0.5 * flipped,
                    // <up| S^y |down> = -i/2, <down| S^y |up> = +i/2
                    1 => Complex64::new(0.0, if up { -0.5 } else { 0.5 }) * flipped,
                    _ => (if up { 0.5 } else { -0.5 }) * psi[state],
                };
            }
        }
        out
    }

    pub fn moments(&self, psi: &[Complex64]) -> Moments {
        let dot = |a: &[Complex64], b: &[Complex64]| a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<Complex64>();
        let j: Vec<Vec<Complex64>> = (0..3).map(|a| self.apply_j(psi, a)).collect();
        let mean: [f64; 3] = std::array::from_fn(|a| dot(psi, &j[a]).re);
        let cov = std::array::from_fn(|a| std::array::from_fn(|b| dot(&j[a], &j[b]).re - mean[a] * mean[b]));
        (mean, cov)
    }
}

/// Two classical spins with coupling `J_12 = coupling`, integrated with an
/// adaptive Dormand-Prince 5(4) scheme. Written independently of the crate's
/// ensemble integrator.
pub fn two_spin_reference(s0: [[f64; 3]; 2], coupling: f64, field: f64, t_end: f64, tol: f64) -> [[f64; 3]; 2] {
    let rhs = |y: &[f64; 6]| -> [f64; 6] {
        let mut d = [0.0; 6];
        for i in 0..2 {
            let o = 3 * (1 - i);
            let (bx, by) = (field - 2.0 * coupling * y[o], -2.0 * coupling * y[o + 1]);
            let s = &y[3 * i..3 * i + 3];
            d[3 * i] = by * s[2];
            d[3 * i + 1] = -bx * s[2];
            d[3 * i + 2] = bx * s[1] - by * s[0];
        }
        d
    };
    const A: [[f64; 6]; 7] = [
        [0.0; 6],
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
        [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
        [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
    ];
    const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
    const B4: [f64; 7] = [
        5179.0 / 57600.0,
        0.0,
        7571.0 / 16695.0,
        393.0 / 640.0,
        -92097.0 / 339200.0,
        187.0 / 2100.0,
        1.0 / 40.0,
    ];
    let mut y = [s0[0][0], s0[0][1], s0[0][2], s0[1][0], s0[1][1], s0[1][2]];
    let mut t = 0.0;
    let mut h: f64 = 1e-3;
    while t < t_end {
        h = h.min(t_end - t);
        let mut k = [[0.0; 6]; 7];
        for s in 0..7 {
            let mut ys = y;
            for (p, kp) in k.iter().enumerate().take(s) {
                for c in 0..6 {
                    ys[c] += h * A[s][p] * kp[c];
                }
            }
            k[s] = rhs(&ys);
        }
        let mut y5 = y;
        let mut err: f64 = 0.0;
        for c in 0..6 {
            let (mut d5, mut d4) = (0.0, 0.0);
            for s in 0..7 {
                d5 += B5[s] * k[s][c];
                d4 += B4[s] * k[s][c];
            }
            y5[c] += h * d5;
            err = err.max((h * (d5 - d4)).abs());
        }
        if err <= tol {
            y = y5;
            t += h;
        }
        let factor = if err == 0.0 { 2.0 } else { 0.9 * (tol / err).powf(0.2) };
        h *= factor.clamp(0.2, 2.0);
    }
    [[y[0], y[1], y[2]], [y[3], y[4], y[5]]]
}
