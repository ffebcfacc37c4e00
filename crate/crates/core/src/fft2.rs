//! Parallel 2-D complex FFT on square arrays, with optional row pruning
//! for zero-padded inputs and partially needed outputs.
//!
//! Layout matches [`crate::grid::GridField`]: `data[ix * n + iy]`, so the
//! "rows" of the transform are constant-`ix` lines.

use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

pub type C64 = Complex<f64>;

pub struct Fft2 {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl Fft2 {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Fft2 {
            n,
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn run_rows(&self, data: &mut [C64], rows: usize, forward: bool) {
        let n = self.n;
        let fft = if forward { &self.fwd } else { &self.inv };
        let scratch = fft.get_inplace_scratch_len();
        data[..rows * n]
            .par_chunks_mut(n)
            .for_each_init(|| vec![C64::default(); scratch], |scr, row| {
                fft.process_with_scratch(row, scr);
            });
    }

    fn transpose(&self, data: &[C64], out: &mut [C64]) {
        let n = self.n;
        // blocked transpose, parallel over row bands
        const B: usize = 64;
        out.par_chunks_mut(n * B).enumerate().for_each(|(bi, band)| {
            let i0 = bi * B;
            let rows = band.len() / n;
            for jb in (0..n).step_by(B) {
                for i in 0..rows {
                    for j in jb..(jb + B).min(n) {
                        band[i * n + j] = data[j * n + (i0 + i)];
                    }
                }
            }
        });
    }

    /// Forward transform in place. `nonzero_rows < n` skips the row stage
    /// for trailing rows known to be zero.
    pub fn forward(&self, data: &mut [C64], scratch: &mut Vec<C64>, nonzero_rows: usize) {
        let n = self.n;
        debug_assert_eq!(data.len(), n * n);
        self.run_rows(data, nonzero_rows, true);
        scratch.resize(n * n, C64::default());
        self.transpose(data, scratch);
        self.run_rows(scratch, n, true);
        self.transpose(scratch, data);
    }

    /// Inverse transform in place, unnormalized (scale by `1/n^2` yourself
    /// or fold it into the multipliers). `needed_rows < n` skips the final
    /// row stage for rows that will not be read.
    pub fn inverse(&self, data: &mut [C64], scratch: &mut Vec<C64>, needed_rows: usize) {
        let n = self.n;
        debug_assert_eq!(data.len(), n * n);
        scratch.resize(n * n, C64::default());
        self.transpose(data, scratch);
        self.run_rows(scratch, n, false);
        self.transpose(scratch, data);
        self.run_rows(data, needed_rows, false);
    }
}

/// Angular wavenumbers `2 pi k / L` in FFT ordering, with the Nyquist mode
/// zeroed so that spectral derivatives of real fields stay real.
pub fn wavenumbers(n: usize, domain: f64) -> Vec<f64> {
    let mut k = vec![0.0; n];
    let f = 2.0 * std::f64::consts::PI / domain;
    for (i, kk) in k.iter_mut().enumerate() {
        let m = if i <= n / 2 { i as isize } else { i as isize - n as isize };
        *kk = f * m as f64;
    }
    k[n / 2] = 0.0;
    k
}

/// Squared wavenumbers including the Nyquist mode (for the Laplacian the
/// Nyquist term is real and kept).
pub fn wavenumbers_sq(n: usize, domain: f64) -> Vec<f64> {
    let f = 2.0 * std::f64::consts::PI / domain;
    (0..n)
        .map(|i| {
            let m = if i <= n / 2 { i as isize } else { i as isize - n as isize };
            let k = f * m as f64;
            k * k
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_pruning() {
        let n = 64;
        let fft = Fft2::new(n);
        let mut scratch = Vec::new();
        let mut data: Vec<C64> = (0..n * n)
            .map(|i| {
                if i / n < n / 2 {
                    C64::new((i as f64 * 0.37).sin(), 0.0)
                } else {
                    C64::default()
                }
            })
            .collect();
        let orig = data.clone();
        // pruned forward must equal full forward on half-zero input
        let mut full = data.clone();
        fft.forward(&mut full, &mut scratch, n);
        fft.forward(&mut data, &mut scratch, n / 2);
        for (a, b) in data.iter().zip(&full) {
            assert!((a - b).norm() < 1e-12);
        }
        fft.inverse(&mut data, &mut scratch, n);
        let scale = 1.0 / (n * n) as f64;
        for (a, b) in data.iter().zip(&orig) {
            assert!((a * scale - b).norm() < 1e-12);
        }
    }

    #[test]
    fn spectral_derivative_of_sine() {
        let n = 32;
        let l = 2.0 * std::f64::consts::PI;
        let fft = Fft2::new(n);
        let mut scratch = Vec::new();
        let h = l / n as f64;
        let mut data: Vec<C64> = (0..n * n)
            .map(|idx| {
                let x = (idx / n) as f64 * h;
                C64::new((3.0 * x).sin(), 0.0)
            })
            .collect();
        fft.forward(&mut data, &mut scratch, n);
        let kx = wavenumbers(n, l);
        for i in 0..n {
            for j in 0..n {
                data[i * n + j] *= C64::new(0.0, kx[i]) / (n * n) as f64;
            }
        }
        fft.inverse(&mut data, &mut scratch, n);
        for idx in (0..n * n).step_by(7) {
            let x = (idx / n) as f64 * h;
            assert!(
                (data[idx].re - 3.0 * (3.0 * x).cos()).abs() < 1e-10,
                "d/dx sin(3x) at {x}"
            );
        }
    }
}
