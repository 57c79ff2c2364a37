//! Periodogram, lag-window spectral estimates, certified maxima of
//! trigonometric polynomials, and the symbol-based eigenvalue brackets that
//! connect spectral densities to symmetric Toeplitz matrices.
//!
//! The key fact used throughout: a symmetric Toeplitz matrix whose first
//! column holds the cosine coefficients `gamma_k` of a symbol
//! `f(theta) = (2 pi)^{-1} (gamma_0 + 2 sum gamma_k cos k theta)` has all its
//! eigenvalues inside `[2 pi min f, 2 pi max f]`, for every dimension. Grid
//! extrema of trigonometric polynomials extend to certified global bounds by
//! an oversampling inequality: with `l >= 2 (1+delta) n` equispaced points,
//! `max |S| <= (1 + 1/delta) max_j |S(x_j)|`.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::estimators::{Taper, TimeSeries};
use crate::fft;

/// A symmetric function on `[-pi, pi]`, typically a spectral density or
/// lag-window estimate. When the function is a trigonometric (cosine)
/// polynomial its order unlocks the certified-maximum machinery.
#[derive(Clone)]
pub struct SpectralFunction {
    repr: Repr,
}

#[derive(Clone)]
enum Repr {
    /// `f(theta) = sum_k coeffs[k] cos(k theta)`.
    CosinePolynomial { coeffs: Vec<f64> },
    Custom {
        eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        poly_order: Option<usize>,
    },
}

impl std::fmt::Debug for SpectralFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.repr {
            Repr::CosinePolynomial { coeffs } => f
                .debug_struct("SpectralFunction")
                .field("kind", &"cosine-polynomial")
                .field("order", &(coeffs.len() - 1))
                .finish(),
            Repr::Custom { poly_order, .. } => f
                .debug_struct("SpectralFunction")
                .field("kind", &"custom")
                .field("poly_order", poly_order)
                .finish(),
        }
    }
}

impl SpectralFunction {
    /// Cosine polynomial `sum coeffs[k] cos(k theta)`; symmetric by
    /// construction, with `poly_order = coeffs.len() - 1`.
    pub fn from_cosine_coefficients(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::invalid("coefficient list must be nonempty"));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("coefficients must be finite"));
        }
        Ok(Self {
            repr: Repr::CosinePolynomial { coeffs },
        })
    }

    /// The spectral density determined by autocovariances `gammas[k]`:
    /// `(2 pi)^{-1} (gamma_0 + 2 sum_{k>=1} gamma_k cos k theta)`.
    pub fn from_autocovariances(gammas: &[f64]) -> Result<Self> {
        if gammas.is_empty() {
            return Err(Error::invalid("autocovariance list must be nonempty"));
        }
        let mut coeffs = Vec::with_capacity(gammas.len());
        coeffs.push(gammas[0] / (2.0 * PI));
        coeffs.extend(gammas[1..].iter().map(|g| g / PI));
        Self::from_cosine_coefficients(coeffs)
    }

    /// Wrap an arbitrary evaluator. Symmetry `f(theta) = f(-theta)` is
    /// checked on a grid (within 1e-10); supply `poly_order` when the
    /// function is a trigonometric polynomial of known order.
    pub fn from_evaluator(
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
        poly_order: Option<usize>,
    ) -> Result<Self> {
        for j in 0..=200 {
            let theta = PI * j as f64 / 200.0;
            let plus = eval(theta);
            let minus = eval(-theta);
            if !plus.is_finite() || (plus - minus).abs() > 1e-10 {
                return Err(Error::invalid(format!(
                    "evaluator is not symmetric at theta = {theta}: {plus} vs {minus}"
                )));
            }
        }
        Ok(Self {
            repr: Repr::Custom {
                eval: Arc::new(eval),
                poly_order,
            },
        })
    }

    /// Polynomial order, when known.
    pub fn poly_order(&self) -> Option<usize> {
        match &self.repr {
            Repr::CosinePolynomial { coeffs } => Some(coeffs.len() - 1),
            Repr::Custom { poly_order, .. } => *poly_order,
        }
    }

    pub fn evaluate(&self, theta: f64) -> f64 {
        match &self.repr {
            Repr::CosinePolynomial { coeffs } => coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c * (k as f64 * theta).cos())
                .sum(),
            Repr::Custom { eval, .. } => eval(theta),
        }
    }

    /// Values on the uniform grid `theta_j = 2 pi j / l`, `j = 0..l`.
    /// Cosine polynomials use one FFT when the grid resolves them.
    pub fn grid_values(&self, l: usize) -> Vec<f64> {
        match &self.repr {
            Repr::CosinePolynomial { coeffs } if l >= coeffs.len() && l >= 64 => {
                fft::spectrum_on_grid(coeffs, l)
                    .into_iter()
                    .map(|c| c.re)
                    .collect()
            }
            _ => (0..l)
                .map(|j| self.evaluate(2.0 * PI * j as f64 / l as f64))
                .collect(),
        }
    }

    /// Certified bound on `max |S|` for a trigonometric polynomial of known
    /// order `n`: the maximum of `|S|` over `l = ceil(2 (1+delta) n)` grid
    /// points, inflated by `(1 + 1/delta)`. The true maximum lies in
    /// `[grid_max, upper_bound]`.
    pub fn certified_abs_max(&self, delta: f64) -> Result<CertifiedMax> {
        let order = self.poly_order().ok_or_else(|| {
            Error::invalid("certified maximum requires a known polynomial order")
        })?;
        if !(delta > 0.0) {
            return Err(Error::invalid(format!("delta = {delta} must be positive")));
        }
        let inflation = 1.0 + 1.0 / delta;
        if order == 0 {
            let value = self.evaluate(0.0).abs();
            return Ok(CertifiedMax {
                grid_max: value,
                upper_bound: inflation * value,
                grid_points: 1,
            });
        }
        let l = (2.0 * (1.0 + delta) * order as f64).ceil() as usize;
        let grid_max = self
            .grid_values(l)
            .into_iter()
            .fold(0.0f64, |m, v| m.max(v.abs()));
        Ok(CertifiedMax {
            grid_max,
            upper_bound: inflation * grid_max,
            grid_points: l,
        })
    }
}

/// Result of [`SpectralFunction::certified_abs_max`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertifiedMax {
    /// Maximum of `|S|` over the sampling grid (a lower bound on `max |S|`).
    pub grid_max: f64,
    /// Certified upper bound `(1 + 1/delta) * grid_max`.
    pub upper_bound: f64,
    pub grid_points: usize,
}

/// Eigenvalue bracket `[2 pi min f, 2 pi max f]` for symmetric Toeplitz
/// matrices with symbol `2 pi f`, estimated on a dense grid. For symbols of
/// known polynomial order the `certified` interval encloses the true bracket
/// with proven slack; the `lower`/`upper` grid estimates are accurate to the
/// grid resolution and slightly inside it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenvalueBracket {
    pub lower: f64,
    pub upper: f64,
    /// Proven outer interval, when the symbol's order (or a Lipschitz
    /// constant) is available.
    pub certified: Option<(f64, f64)>,
    pub grid_points: usize,
}

impl EigenvalueBracket {
    /// Containment in the grid-estimated bracket with additive slack.
    pub fn contains(&self, lambda: f64, slack: f64) -> bool {
        lambda >= self.lower - slack && lambda <= self.upper + slack
    }

    /// Containment in the proven outer interval.
    pub fn certified_contains(&self, lambda: f64) -> bool {
        match self.certified {
            Some((lo, hi)) => lambda >= lo && lambda <= hi,
            None => false,
        }
    }
}

/// Grid size for symbol bounds: a power of two covering both the minimum
/// density and a comfortable oversampling factor for certification.
fn bounds_grid(order: usize) -> usize {
    let wanted = (32usize.saturating_mul(order)).max(4096);
    fft::next_pow2(wanted).min(1 << 22)
}

/// Eigenvalue bracket for the symmetric Toeplitz matrices (of any dimension)
/// whose first column holds the autocovariances of the symbol `f`:
/// `2 pi min f <= lambda_min <= lambda_max <= 2 pi max f`.
pub fn symbol_eigenvalue_bounds(symbol: &SpectralFunction) -> EigenvalueBracket {
    match symbol.poly_order() {
        Some(order) => {
            let l = bounds_grid(order).max(2 * order + 2);
            let values = symbol.grid_values(l);
            let (min, max) = min_max(&values);
            // Oversampling inequality applied to f - const: with
            // delta = l / (2n) - 1,
            //   min f >= grid_min - (grid_max - grid_min) / delta,
            //   max f <= grid_max + (grid_max - grid_min) / delta.
            let certified = if order == 0 {
                Some((2.0 * PI * min, 2.0 * PI * max))
            } else {
                let delta = l as f64 / (2.0 * order as f64) - 1.0;
                if delta > 0.0 {
                    let slack = (max - min) / delta;
                    Some((2.0 * PI * (min - slack), 2.0 * PI * (max + slack)))
                } else {
                    None
                }
            };
            EigenvalueBracket {
                lower: 2.0 * PI * min,
                upper: 2.0 * PI * max,
                certified,
                grid_points: l,
            }
        }
        None => {
            let l = 4096;
            let values = symbol.grid_values(l);
            let (min, max) = min_max(&values);
            EigenvalueBracket {
                lower: 2.0 * PI * min,
                upper: 2.0 * PI * max,
                certified: None,
                grid_points: l,
            }
        }
    }
}

/// Variant for symbols of unbounded order with a known Lipschitz constant:
/// the true extrema lie within `lipschitz * h / 2` of the grid extrema,
/// `h` the grid spacing.
pub fn symbol_eigenvalue_bounds_lipschitz(
    symbol: &SpectralFunction,
    grid_points: usize,
    lipschitz: f64,
) -> Result<EigenvalueBracket> {
    if grid_points < 2 || !(lipschitz >= 0.0) {
        return Err(Error::invalid(
            "need at least two grid points and a nonnegative Lipschitz constant",
        ));
    }
    let values = symbol.grid_values(grid_points);
    let (min, max) = min_max(&values);
    let slack = lipschitz * PI / grid_points as f64;
    Ok(EigenvalueBracket {
        lower: 2.0 * PI * min,
        upper: 2.0 * PI * max,
        certified: Some((2.0 * PI * (min - slack), 2.0 * PI * (max + slack))),
        grid_points,
    })
}

fn min_max(values: &[f64]) -> (f64, f64) {
    values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
        (lo.min(v), hi.max(v))
    })
}

/// Periodogram `I_T(theta) = T^{-1} |sum_t X_t e^{i t theta}|^2`.
pub fn periodogram(x: &TimeSeries, theta: f64) -> f64 {
    let mut re = 0.0;
    let mut im = 0.0;
    for (t, &v) in x.values().iter().enumerate() {
        let (sin, cos) = ((t + 1) as f64 * theta).sin_cos();
        re += v * cos;
        im += v * sin;
    }
    (re * re + im * im) / x.len() as f64
}

/// Periodogram on the Fourier frequencies `omega_s = 2 pi s / T` for
/// `s = 0 .. ceil(T/2) - 1`, computed by FFT in `O(T log T)`.
pub fn periodogram_fourier_grid(x: &TimeSeries) -> Vec<f64> {
    let mut grid = fft::periodogram_grid(x.values());
    grid.truncate(x.len().div_ceil(2));
    grid
}

/// Periodogram on the full Fourier grid `s = 0 .. T-1` (used e.g. for the
/// Parseval identity `sum_s I_T(omega_s) = T * gamma_hat_0`).
pub fn periodogram_full_fourier_grid(x: &TimeSeries) -> Vec<f64> {
    fft::periodogram_grid(x.values())
}

/// Lag-window spectral estimate
/// `(2 pi)^{-1} sum_{|k| <= B} K(k/B) gamma_hat_k cos(k theta)`, a
/// trigonometric polynomial of order `B`. `2 pi` times this function is the
/// symbol of the tapered covariance matrix with the same kernel and
/// bandwidth.
pub fn lag_window_estimate(
    x: &TimeSeries,
    taper: &Taper,
    bandwidth: usize,
) -> Result<SpectralFunction> {
    let t = x.len();
    if bandwidth < 1 || bandwidth > t - 1 {
        return Err(Error::OutOfRange {
            what: "bandwidth",
            value: bandwidth,
            min: 1,
            max: t - 1,
        });
    }
    let gammas = x.sample_acov(bandwidth)?;
    let mut coeffs = Vec::with_capacity(bandwidth + 1);
    coeffs.push(gammas.gamma(0) / (2.0 * PI));
    for k in 1..=bandwidth {
        coeffs.push(taper.weight(k as f64 / bandwidth as f64) * gammas.gamma(k) / PI);
    }
    SpectralFunction::from_cosine_coefficients(coeffs)
}
