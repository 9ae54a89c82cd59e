//! 3D FFT plumbing shared by every spectral operation in the crate.
//!
//! The transform works on `n^3` complex buffers laid out x-fastest, matching
//! the field storage. Each axis pass runs 1-D FFTs on contiguous lines and
//! then applies a cyclic transpose `(x, y, z) -> (y, z, x)`; three passes
//! restore the original orientation.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::f64::consts::PI;
use std::sync::Arc;

pub struct Fft3 {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl Fft3 {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self { n, fwd: planner.plan_fft_forward(n), inv: planner.plan_fft_inverse(n) }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn cyclic_transpose(&self, data: &mut [Complex64], scratch: &mut [Complex64]) {
        let n = self.n;
        for z in 0..n {
            for y in 0..n {
                let src = n * (y + n * z);
                for x in 0..n {
                    scratch[y + n * (z + n * x)] = data[src + x];
                }
            }
        }
        data.copy_from_slice(scratch);
    }

    fn run(&self, data: &mut [Complex64], scratch: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        debug_assert_eq!(data.len(), self.n * self.n * self.n);
        for _ in 0..3 {
            for line in data.chunks_exact_mut(self.n) {
                plan.process(line);
            }
            self.cyclic_transpose(data, scratch);
        }
    }

    /// Unnormalized forward transform, in place.
    pub fn forward(&self, data: &mut [Complex64], scratch: &mut [Complex64]) {
        self.run(data, scratch, &self.fwd);
    }

    /// Inverse transform including the 1/n^3 normalization, in place.
    pub fn inverse(&self, data: &mut [Complex64], scratch: &mut [Complex64]) {
        self.run(data, scratch, &self.inv);
        let scale = 1.0 / (self.n * self.n * self.n) as f64;
        for v in data.iter_mut() {
            *v *= scale;
        }
    }

    pub fn scratch(&self) -> Vec<Complex64> {
        vec![Complex64::default(); self.n * self.n * self.n]
    }

    /// Forward transform of a real plane into a freshly allocated buffer.
    pub fn forward_real(&self, plane: &[f64], scratch: &mut [Complex64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = plane.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward(&mut buf, scratch);
        buf
    }

    /// Inverse transform, discarding the (roundoff-level) imaginary part.
    pub fn inverse_to_real(&self, mut buf: Vec<Complex64>, scratch: &mut [Complex64]) -> Vec<f64> {
        self.inverse(&mut buf, scratch);
        buf.into_iter().map(|v| v.re).collect()
    }
}

/// Signed mode index for DFT bin `m` on an `n`-point grid.
#[inline]
pub fn signed_mode(m: usize, n: usize) -> i64 {
    if m <= n / 2 {
        m as i64
    } else {
        m as i64 - n as i64
    }
}

/// Squared wavenumbers `|k|^2` for every mode, same x-fastest layout as the
/// data, with `k = 2 pi m / L` per axis.
pub fn wavenumber_sq(n: usize, box_len: f64) -> Vec<f64> {
    let base = 2.0 * PI / box_len;
    let axis: Vec<f64> = (0..n)
        .map(|m| {
            let s = signed_mode(m, n) as f64 * base;
            s * s
        })
        .collect();
    let mut out = Vec::with_capacity(n * n * n);
    for z in 0..n {
        for y in 0..n {
            let yz = axis[y] + axis[z];
            for x in 0..n {
                out.push(axis[x] + yz);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_identity() {
        let n = 8;
        let fft = Fft3::new(n);
        let mut scratch = fft.scratch();
        let plane: Vec<f64> = (0..n * n * n).map(|i| ((i * 37 % 101) as f64).sin()).collect();
        let spec = fft.forward_real(&plane, &mut scratch);
        let back = fft.inverse_to_real(spec, &mut scratch);
        for (a, b) in plane.iter().zip(back.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn single_mode_lands_in_right_bin() {
        let n = 16;
        let fft = Fft3::new(n);
        let mut scratch = fft.scratch();
        // e^{2 pi i (2x + y)/n} should put all mass in bin (2, 1, 0)
        let mut plane = vec![Complex64::default(); n * n * n];
        for z in 0..n {
            for y in 0..n {
                for x in 0..n {
                    let phase = 2.0 * PI * (2.0 * x as f64 + y as f64) / n as f64;
                    plane[x + n * (y + n * z)] = Complex64::new(phase.cos(), phase.sin());
                }
            }
        }
        fft.forward(&mut plane, &mut scratch);
        let idx = 2 + n * 1;
        let total: f64 = plane.iter().map(|v| v.norm()).sum();
        assert!((plane[idx].re - (n * n * n) as f64).abs() < 1e-6);
        assert!((total - plane[idx].norm()).abs() < 1e-5);
    }

    #[test]
    fn wavenumbers_match_spectral_laplacian() {
        let n = 16;
        let box_len = 2.0 * PI;
        let k2 = wavenumber_sq(n, box_len);
        assert_eq!(k2[0], 0.0);
        // mode (1, 0, 0): |k|^2 = 1 for L = 2 pi
        assert!((k2[1] - 1.0).abs() < 1e-14);
        // mode (n-1, 0, 0) aliases to -1
        assert!((k2[n - 1] - 1.0).abs() < 1e-14);
    }
}
