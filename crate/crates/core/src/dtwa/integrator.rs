//! Classical spin precession `ds_i/dt = b_i x s_i` and its fixed-step RK4
//! integration.

use super::field::{FieldEvaluator, Scratch};

/// `H = -sum_{i != j} J_ij (s_i^x s_j^x + s_i^y s_j^y) + Omega sum_i s_i^x`
/// for classical spins stored as `[x, y, z]` triples.
#[derive(Clone, Debug)]
pub struct Dynamics {
    pub evaluator: FieldEvaluator,
    pub field: f64,
}

pub struct Workspace {
    hx: Vec<f64>,
    hy: Vec<f64>,
    k: [Vec<f64>; 4],
    stage: Vec<f64>,
    scratch: Scratch,
}

impl Dynamics {
    pub fn new(evaluator: FieldEvaluator, field: f64) -> Self {
        Self { evaluator, field }
    }

    pub fn n_sites(&self) -> usize {
        self.evaluator.n_sites()
    }

    pub fn workspace(&self) -> Workspace {
        let n = self.n_sites();
        Workspace {
            hx: vec![0.0; n],
            hy: vec![0.0; n],
            k: std::array::from_fn(|_| vec![0.0; 3 * n]),
            stage: vec![0.0; 3 * n],
            scratch: self.evaluator.scratch(),
        }
    }

    /// Effective field `b_i = dH/ds_i = (Omega - 2 h^x_i, -2 h^y_i, 0)` with
    /// `h_i = sum_j J_ij s_j`.
    pub fn local_fields(&self, spins: &[f64], ws: &mut Workspace) -> Vec<[f64; 3]> {
        self.evaluator.exchange(spins, &mut ws.hx, &mut ws.hy, &mut ws.scratch);
        ws.hx
            .iter()
            .zip(&ws.hy)
            .map(|(x, y)| [self.field - 2.0 * x, -2.0 * y, 0.0])
            .collect()
    }

    pub fn derivative(&self, spins: &[f64], out: &mut [f64], ws: &mut Workspace) {
        self.evaluator.exchange(spins, &mut ws.hx, &mut ws.hy, &mut ws.scratch);
        derivative_from_exchange(self.field, spins, &ws.hx, &ws.hy, out);
    }

    pub fn energy(&self, spins: &[f64], ws: &mut Workspace) -> f64 {
        self.evaluator.exchange(spins, &mut ws.hx, &mut ws.hy, &mut ws.scratch);
        spins
            .chunks_exact(3)
            .zip(ws.hx.iter().zip(&ws.hy))
            .map(|(s, (hx, hy))| self.field * s[0] - s[0] * hx - s[1] * hy)
            .sum()
    }

    pub fn rk4_step(&self, spins: &mut [f64], h: f64, ws: &mut Workspace) {
        let mut k = std::mem::take(&mut ws.k);
        let mut stage = std::mem::take(&mut ws.stage);
        self.derivative(spins, &mut k[0], ws);
        for (c, kin) in [(0.5, 0), (0.5, 1), (1.0, 2)] {
            for ((st, s), d) in stage.iter_mut().zip(spins.iter()).zip(&k[kin]) {
                *st = s + c * h * d;
            }
            let (_, rest) = k.split_at_mut(kin + 1);
            self.derivative(&stage, &mut rest[0], ws);
        }
        let w = h / 6.0;
        for (i, s) in spins.iter_mut().enumerate() {
            *s += w * (k[0][i] + 2.0 * k[1][i] + 2.0 * k[2][i] + k[3][i]);
        }
        ws.k = k;
        ws.stage = stage;
    }

    /// Integrate from `t0` to `t1` in equal steps no longer than `dt`.
    pub fn advance(&self, spins: &mut [f64], t0: f64, t1: f64, dt: f64, ws: &mut Workspace) {
        let span = t1 - t0;
        if span <= 0.0 {
            return;
        }
        let steps = (span / dt).ceil().max(1.0) as usize;
        let h = span / steps as f64;
        for _ in 0..steps {
            self.rk4_step(spins, h, ws);
        }
    }

    /// Generous precession-rate bound used to seed the step size.
    pub fn rate_bound(&self) -> f64 {
        self.field.abs() + 2.0 * self.evaluator.row_sum().abs()
    }
}

fn derivative_from_exchange(field: f64, spins: &[f64], hx: &[f64], hy: &[f64], out: &mut [f64]) {
    for (i, (s, d)) in spins.chunks_exact(3).zip(out.chunks_exact_mut(3)).enumerate() {
        let bx = field - 2.0 * hx[i];
        let by = -2.0 * hy[i];
        d[0] = by * s[2];
        d[1] = -bx * s[2];
        d[2] = bx * s[1] - by * s[0];
    }
}

/// Largest relative deviation of a spin length from its reference.
pub fn length_drift(spins: &[f64], reference: &[f64]) -> f64 {
    spins
        .chunks_exact(3)
        .zip(reference)
        .map(|(s, r)| ((s[0] * s[0] + s[1] * s[1] + s[2] * s[2]).sqrt() - r).abs() / r)
        .fold(0.0, |a, d| if d.is_nan() || d > a { d } else { a })
}

pub fn lengths(spins: &[f64]) -> Vec<f64> {
    spins.chunks_exact(3).map(|s| (s[0] * s[0] + s[1] * s[1] + s[2] * s[2]).sqrt()).collect()
}
