//! Fourier multipliers and weighted spectral norms on the periodic
//! extension of [-L, L).
//!
//! Profiles vanish near +-L by the decay gate, so the wrap-around error of
//! treating the truncated line as one period is below the gate tolerance.
//! Wavenumbers are k_m = pi m / L for signed integer frequencies m.

use crate::grid::Grid;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

/// Forward/inverse transform pair for one grid size.
pub struct ModeTransform {
    n: usize,
    forward: std::sync::Arc<dyn rustfft::Fft<f64>>,
    inverse: std::sync::Arc<dyn rustfft::Fft<f64>>,
    wavenumbers: Vec<f64>,
}

impl ModeTransform {
    pub fn new(grid: &Grid) -> Self {
        let n = grid.len();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let l = grid.half_width();
        let wavenumbers = (0..n)
            .map(|m| {
                let signed = if m <= n / 2 {
                    m as isize
                } else {
                    m as isize - n as isize
                };
                std::f64::consts::PI * signed as f64 / l
            })
            .collect();
        Self {
            n,
            forward,
            inverse,
            wavenumbers,
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Signed wavenumber of FFT bin m.
    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    pub fn forward(&self, v: &[f64]) -> Vec<Complex<f64>> {
        let mut buf: Vec<Complex<f64>> = v.iter().map(|&x| Complex::new(x, 0.0)).collect();
        self.forward.process(&mut buf);
        buf
    }

    fn inverse_real(&self, mut buf: Vec<Complex<f64>>) -> Vec<f64> {
        self.inverse.process(&mut buf);
        let scale = 1.0 / self.n as f64;
        buf.iter().map(|c| c.re * scale).collect()
    }

    /// Applies a real even multiplier m(k) (e.g. -c|k| or a Sobolev weight).
    pub fn apply_real_multiplier(&self, v: &[f64], mult: impl Fn(f64) -> f64) -> Vec<f64> {
        let mut coeffs = self.forward(v);
        for (c, &k) in coeffs.iter_mut().zip(&self.wavenumbers) {
            *c *= mult(k);
        }
        self.inverse_real(coeffs)
    }

    /// Spectral derivative d/dxi (multiplier i k).
    pub fn derivative(&self, v: &[f64]) -> Vec<f64> {
        let mut coeffs = self.forward(v);
        for (c, &k) in coeffs.iter_mut().zip(&self.wavenumbers) {
            *c *= Complex::new(0.0, k);
        }
        self.inverse_real(coeffs)
    }

    /// Power per FFT bin, normalized so the sum equals the trapezoid L2
    /// norm squared.
    pub fn power_spectrum(&self, grid: &Grid, v: &[f64]) -> Vec<f64> {
        let coeffs = self.forward(v);
        let scale = grid.spacing() / self.n as f64;
        coeffs.iter().map(|c| scale * c.norm_sqr()).collect()
    }
}

/// Weighted spectral norm ||(1+k^2)^{s/2} F[g]||_2 on the periodic extension,
/// normalized so s = 0 reproduces the flat trapezoid L2 norm.
pub fn sobolev_norm(grid: &Grid, v: &[f64], s_exp: f64) -> f64 {
    let tf = ModeTransform::new(grid);
    let coeffs = tf.forward(v);
    let scale = grid.spacing() / grid.len() as f64;
    coeffs
        .iter()
        .zip(tf.wavenumbers())
        .map(|(c, &k)| scale * (1.0 + k * k).powf(s_exp) * c.norm_sqr())
        .sum::<f64>()
        .sqrt()
}
