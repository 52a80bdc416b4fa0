//! Streaming trajectory sums and leave-one-block-out jackknife errors.

/// Weighted sums of per-trajectory records for one block of trajectories.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockSums {
    pub weight: f64,
    pub sums: Vec<f64>,
}

impl BlockSums {
    pub fn new(len: usize) -> Self {
        Self { weight: 0.0, sums: vec![0.0; len] }
    }

    pub fn add(&mut self, record: &[f64], weight: f64) {
        self.weight += weight;
        for (s, r) in self.sums.iter_mut().zip(record) {
            *s += weight * r;
        }
    }
}

/// Full-sample means plus the leave-one-block-out means.
#[derive(Clone, Debug)]
pub struct Jackknife {
    pub mean: Vec<f64>,
    pub leave_out: Vec<Vec<f64>>,
}

impl Jackknife {
    pub fn from_blocks(blocks: &[BlockSums]) -> Self {
        let len = blocks.first().map_or(0, |b| b.sums.len());
        let mut total = BlockSums::new(len);
        for b in blocks {
            total.weight += b.weight;
            for (t, s) in total.sums.iter_mut().zip(&b.sums) {
                *t += s;
            }
        }
        let mean = total.sums.iter().map(|s| s / total.weight).collect();
        let leave_out = if blocks.len() < 2 {
            Vec::new()
        } else {
            blocks
                .iter()
                .map(|b| {
                    let w = total.weight - b.weight;
                    total.sums.iter().zip(&b.sums).map(|(t, s)| (t - s) / w).collect()
                })
                .collect()
        };
        Self { mean, leave_out }
    }

    /// Estimate and jackknife standard error of `f` applied to the means.
    pub fn estimate(&self, f: impl Fn(&[f64]) -> f64) -> (f64, f64) {
        let value = f(&self.mean);
        let b = self.leave_out.len();
        if b < 2 {
            return (value, 0.0);
        }
        let samples: Vec<f64> = self.leave_out.iter().map(|m| f(m)).collect();
        let avg = samples.iter().sum::<f64>() / b as f64;
        let var = samples.iter().map(|s| (s - avg).powi(2)).sum::<f64>() * (b as f64 - 1.0) / b as f64;
        (value, var.sqrt())
    }
}
