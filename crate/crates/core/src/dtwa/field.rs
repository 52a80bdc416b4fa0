//! Local exchange fields `h_i = sum_j J_ij s_j` for the `x` and `y` spin
//! components.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::lattice::{CouplingTable, LatticeSpec};

/// Below this many sites a dense table is cheaper than the FFT route.
const DENSE_MAX_SITES: usize = 64;

#[derive(Clone)]
pub enum FieldEvaluator {
    /// Every pair coupled with `J / N`.
    AllToAll { n: usize, pair: f64 },
    Dense(Arc<CouplingTable>),
    /// Circular convolution with the minimum-image kernel.
    Fft(Arc<FftConvolution>),
}

impl std::fmt::Debug for FieldEvaluator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FieldEvaluator::AllToAll { n, .. } => write!(f, "AllToAll({n})"),
            FieldEvaluator::Dense(t) => write!(f, "Dense({})", t.n_sites()),
            FieldEvaluator::Fft(c) => write!(f, "Fft({})", c.n),
        }
    }
}

impl FieldEvaluator {
    /// Cheapest exact evaluator for the lattice.
    pub fn for_lattice(spec: &LatticeSpec) -> crate::Result<Self> {
        spec.validate()?;
        let n = spec.n_sites();
        if spec.alpha == 0.0 {
            Ok(FieldEvaluator::AllToAll { n, pair: spec.coupling / n as f64 })
        } else if n <= DENSE_MAX_SITES {
            Ok(FieldEvaluator::Dense(Arc::new(crate::lattice::build_couplings(spec)?)))
        } else {
            Ok(FieldEvaluator::Fft(Arc::new(FftConvolution::new(spec))))
        }
    }

    pub fn dense(table: CouplingTable) -> Self {
        FieldEvaluator::Dense(Arc::new(table))
    }

    pub fn fft(spec: &LatticeSpec) -> Self {
        FieldEvaluator::Fft(Arc::new(FftConvolution::new(spec)))
    }

    pub fn n_sites(&self) -> usize {
        match self {
            FieldEvaluator::AllToAll { n, .. } => *n,
            FieldEvaluator::Dense(t) => t.n_sites(),
            FieldEvaluator::Fft(c) => c.n,
        }
    }

    /// Writes `h^x`, `h^y` for spins stored as `[x, y, z]` triples.
    pub fn exchange(&self, spins: &[f64], hx: &mut [f64], hy: &mut [f64], scratch: &mut Scratch) {
        match self {
            FieldEvaluator::AllToAll { n, pair } => {
                let (mut sx, mut sy) = (0.0, 0.0);
                for s in spins.chunks_exact(3) {
                    sx += s[0];
                    sy += s[1];
                }
                for i in 0..*n {
                    hx[i] = pair * (sx - spins[3 * i]);
                    hy[i] = pair * (sy - spins[3 * i + 1]);
                }
            }
            FieldEvaluator::Dense(table) => {
                for i in 0..table.n_sites() {
                    let (mut x, mut y) = (0.0, 0.0);
                    for (j, c) in table.row(i).iter().enumerate() {
                        x += c * spins[3 * j];
                        y += c * spins[3 * j + 1];
                    }
                    hx[i] = x;
                    hy[i] = y;
                }
            }
            FieldEvaluator::Fft(conv) => conv.apply(spins, hx, hy, scratch),
        }
    }

    /// `sum_j J_0j`, the same for every site.
    pub fn row_sum(&self) -> f64 {
        match self {
            FieldEvaluator::AllToAll { n, pair } => pair * (*n as f64 - 1.0),
            FieldEvaluator::Dense(t) => t.row_sum(0),
            FieldEvaluator::Fft(c) => c.kernel_hat[0] * c.n as f64,
        }
    }

    pub fn scratch(&self) -> Scratch {
        match self {
            FieldEvaluator::Fft(c) => Scratch {
                buffer: vec![Complex64::default(); c.n],
                transposed: vec![Complex64::default(); c.n],
                fft: vec![Complex64::default(); c.scratch_len],
            },
            _ => Scratch::default(),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Scratch {
    buffer: Vec<Complex64>,
    transposed: Vec<Complex64>,
    fft: Vec<Complex64>,
}

/// `h = K * s` on the periodic lattice via `s^x + i s^y` packing; the kernel
/// is real and even, so its transform is real and the two components do not
/// mix.
pub struct FftConvolution {
    n: usize,
    l: usize,
    dimension: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    /// Kernel transform divided by `N`, in the layout left by `forward_in_place`.
    kernel_hat: Vec<f64>,
    scratch_len: usize,
}

impl FftConvolution {
    pub fn new(spec: &LatticeSpec) -> Self {
        let n = spec.n_sites();
        let l = spec.linear_size;
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(l);
        let inverse = planner.plan_fft_inverse(l);
        let scratch_len = forward.get_inplace_scratch_len().max(inverse.get_inplace_scratch_len());
        let scale = spec.coupling / spec.kac_factor();
        let mut this = Self {
            n,
            l,
            dimension: spec.dimension,
            forward,
            inverse,
            kernel_hat: Vec::new(),
            scratch_len,
        };
        let mut kernel: Vec<Complex64> =
            spec.distance_kernel().iter().map(|w| Complex64::new(scale * w, 0.0)).collect();
        let mut transposed = vec![Complex64::default(); n];
        let mut fft_scratch = vec![Complex64::default(); scratch_len];
        this.forward_in_place(&mut kernel, &mut transposed, &mut fft_scratch);
        this.kernel_hat = kernel.iter().map(|c| c.re / n as f64).collect();
        this
    }

    /// Leaves the transform in `data` (transposed in 2D).
    fn forward_in_place(&self, data: &mut [Complex64], transposed: &mut [Complex64], scratch: &mut [Complex64]) {
        self.forward.process_with_scratch(data, scratch);
        if self.dimension == 2 {
            transpose(data, transposed, self.l);
            self.forward.process_with_scratch(transposed, scratch);
            data.copy_from_slice(transposed);
        }
    }

    fn inverse_in_place(&self, data: &mut [Complex64], transposed: &mut [Complex64], scratch: &mut [Complex64]) {
        self.inverse.process_with_scratch(data, scratch);
        if self.dimension == 2 {
            transpose(data, transposed, self.l);
            self.inverse.process_with_scratch(transposed, scratch);
            data.copy_from_slice(transposed);
        }
    }

    fn apply(&self, spins: &[f64], hx: &mut [f64], hy: &mut [f64], scratch: &mut Scratch) {
        let Scratch { buffer, transposed, fft } = scratch;
        for (b, s) in buffer.iter_mut().zip(spins.chunks_exact(3)) {
            *b = Complex64::new(s[0], s[1]);
        }
        self.forward_in_place(buffer, transposed, fft);
        for (b, k) in buffer.iter_mut().zip(&self.kernel_hat) {
            *b *= *k;
        }
        self.inverse_in_place(buffer, transposed, fft);
        for (i, b) in buffer.iter().enumerate() {
            hx[i] = b.re;
            hy[i] = b.im;
        }
    }
}

fn transpose(src: &[Complex64], dst: &mut [Complex64], l: usize) {
    for r in 0..l {
        for c in 0..l {
            dst[c * l + r] = src[r * l + c];
        }
    }
}
