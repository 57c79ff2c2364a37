//! Internal FFT helpers shared by the simulation, estimation and Toeplitz
//! linear-algebra code. All routines operate on real data through complex
//! transforms; workspaces are per call, so everything here is thread-safe.

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::cell::RefCell;
use std::sync::Arc;

/// Smallest power of two `>= n` (and `>= 1`).
pub fn next_pow2(n: usize) -> usize {
    n.max(1).next_power_of_two()
}

thread_local! {
    // Plans carry precomputed twiddles; reuse them across calls.
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

pub fn plan_forward(len: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(len))
}

pub fn plan_inverse(len: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(len))
}

fn fft_forward(buf: &mut [Complex64]) {
    plan_forward(buf.len()).process(buf);
}

fn fft_inverse(buf: &mut [Complex64]) {
    plan_inverse(buf.len()).process(buf);
    let scale = 1.0 / buf.len() as f64;
    for v in buf.iter_mut() {
        *v *= scale;
    }
}

/// Lagged products `r_k = sum_j s[j] * s[j+k]` for `k = 0..=max_lag`,
/// computed through a zero-padded FFT so that the circular correlation
/// coincides with the linear one.
pub fn autocorrelation(s: &[f64], max_lag: usize) -> Vec<f64> {
    let max_lag = max_lag.min(s.len().saturating_sub(1));
    let n = next_pow2(s.len() + max_lag + 1);
    let mut buf: Vec<Complex64> = s.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    buf.resize(n, Complex64::new(0.0, 0.0));
    fft_forward(&mut buf);
    for v in buf.iter_mut() {
        *v = Complex64::new(v.norm_sqr(), 0.0);
    }
    fft_inverse(&mut buf);
    (0..=max_lag).map(|k| buf[k].re).collect()
}

/// Direct `O(len * max_lag)` version of [`autocorrelation`]; preferred for
/// small problems where it is both faster and exact in the same sense as a
/// hand-written sum.
pub fn autocorrelation_direct(s: &[f64], max_lag: usize) -> Vec<f64> {
    let max_lag = max_lag.min(s.len().saturating_sub(1));
    (0..=max_lag)
        .map(|k| (0..s.len() - k).map(|j| s[j] * s[j + k]).sum())
        .collect()
}

/// Lagged products with an automatic direct/FFT cutover.
pub fn lagged_products(s: &[f64], max_lag: usize) -> Vec<f64> {
    let max_lag = max_lag.min(s.len().saturating_sub(1));
    if s.len().saturating_mul(max_lag + 1) <= 1 << 22 {
        autocorrelation_direct(s, max_lag)
    } else {
        autocorrelation(s, max_lag)
    }
}

/// Complex spectrum `A(theta_j) = sum_s coeffs[s] e^{-i s theta_j}` on the
/// uniform grid `theta_j = 2 pi j / n`, `j = 0..n`. Requires `n >= coeffs.len()`
/// so that zero padding interpolates the transform without aliasing.
pub fn spectrum_on_grid(coeffs: &[f64], n: usize) -> Vec<Complex64> {
    assert!(n >= coeffs.len(), "grid must resolve every coefficient");
    let mut buf: Vec<Complex64> = coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    buf.resize(n, Complex64::new(0.0, 0.0));
    fft_forward(&mut buf);
    buf
}

/// `|FFT(x)|^2 / T` on the full Fourier grid `omega_s = 2 pi s / T`.
pub fn periodogram_grid(x: &[f64]) -> Vec<f64> {
    let t = x.len();
    let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft_forward(&mut buf);
    buf.into_iter().map(|c| c.norm_sqr() / t as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn autocorrelation_matches_direct() {
        let s = [1.0, -2.0, 0.5, 3.0, -1.0, 0.25, 2.0];
        let fft = autocorrelation(&s, 6);
        let direct = autocorrelation_direct(&s, 6);
        for (a, b) in fft.iter().zip(direct.iter()) {
            assert!((a - b).abs() < 1e-12, "fft {a} vs direct {b}");
        }
    }

    #[test]
    fn spectrum_grid_matches_pointwise() {
        let coeffs = [1.0, 0.5, -0.25, 0.125];
        let n = 16;
        let grid = spectrum_on_grid(&coeffs, n);
        for (j, value) in grid.iter().enumerate() {
            let theta = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
            let mut re = 0.0;
            let mut im = 0.0;
            for (s, &c) in coeffs.iter().enumerate() {
                re += c * (s as f64 * theta).cos();
                im -= c * (s as f64 * theta).sin();
            }
            assert!((value.re - re).abs() < 1e-12);
            assert!((value.im - im).abs() < 1e-12);
        }
    }
}
