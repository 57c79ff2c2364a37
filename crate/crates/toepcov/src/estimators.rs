//! Sample autocovariances and the regularized Toeplitz matrix estimators:
//! plug-in, banded/tapered (Schur product with a kernel window), and
//! hard-thresholded, plus the deterministic bias bound for tapered
//! estimates.
//!
//! Conventions: the sample autocovariance uses divisor `T` (not `T - k`),
//! which makes the plug-in matrix nonnegative definite; thresholding acts on
//! lags rather than raw matrix entries (equivalent for Toeplitz estimates and
//! keeps storage `O(T)`); the diagonal is never thresholded. Banded estimates
//! may be indefinite and are reported as-is.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fft;
use crate::process::{AutocovarianceSequence, TailBound};
use crate::toeplitz::SymmetricToeplitz;

/// A single realization `X_1, ..., X_T` of a stationary process.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    values: Vec<f64>,
    mean_known_zero: bool,
}

impl TimeSeries {
    /// A series whose mean is known to be zero (simulated or pre-centered
    /// data); required by the uncentered estimators.
    pub fn zero_mean(values: Vec<f64>) -> Result<Self> {
        Self::build(values, true)
    }

    /// Observed data with unknown mean; use the centered estimators.
    pub fn observed(values: Vec<f64>) -> Result<Self> {
        Self::build(values, false)
    }

    fn build(values: Vec<f64>, mean_known_zero: bool) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::invalid(format!(
                "time series length {} must be at least 2",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("time series values must be finite"));
        }
        Ok(Self {
            values,
            mean_known_zero,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mean_known_zero(&self) -> bool {
        self.mean_known_zero
    }

    /// Plug-in sample autocovariances
    /// `gamma_hat_k = T^{-1} sum_{t=k+1}^{T} X_{t-k} X_t`, `k = 0..=kmax`.
    pub fn sample_acov(&self, kmax: usize) -> Result<AutocovarianceSequence> {
        if !self.mean_known_zero {
            return Err(Error::invalid(
                "uncentered autocovariances require a zero-mean series; \
                 use sample_acov_centered for observed data",
            ));
        }
        self.acov_of(&self.values, kmax)
    }

    /// Centered sample autocovariances
    /// `T^{-1} sum (X_{t-k} - mean)(X_t - mean)`; invariant to adding a
    /// constant to the series.
    pub fn sample_acov_centered(&self, kmax: usize) -> Result<AutocovarianceSequence> {
        let mean = self.values.iter().sum::<f64>() / self.len() as f64;
        let centered: Vec<f64> = self.values.iter().map(|v| v - mean).collect();
        self.acov_of(&centered, kmax)
    }

    fn acov_of(&self, data: &[f64], kmax: usize) -> Result<AutocovarianceSequence> {
        let t = self.len();
        if kmax >= t {
            return Err(Error::OutOfRange {
                what: "kmax",
                value: kmax,
                min: 0,
                max: t - 1,
            });
        }
        let mut values = fft::lagged_products(data, kmax);
        let scale = 1.0 / t as f64;
        for v in values.iter_mut() {
            *v *= scale;
        }
        // Lags k >= T are empty sums, hence exactly zero.
        let tail = if kmax == t - 1 {
            TailBound::Zero
        } else {
            TailBound::Unknown
        };
        AutocovarianceSequence::with_tail(values, tail)
    }
}

/// A lag-window kernel `K` with its metadata. `K` must satisfy `K(0) = 1`,
/// `|K(x)| <= 1`, `K(x) = 0` for `|x| > 1` and `K(-x) = K(x)`; custom
/// kernels are checked on a 1001-point grid at construction.
#[derive(Clone)]
pub struct Taper {
    name: String,
    positive_definite: bool,
    kernel: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl fmt::Debug for Taper {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Taper")
            .field("name", &self.name)
            .field("positive_definite", &self.positive_definite)
            .finish()
    }
}

impl Taper {
    /// Rectangular (truncation) window: banding. Not positive definite.
    pub fn rectangular() -> Self {
        Self {
            name: "rectangular".into(),
            positive_definite: false,
            kernel: Arc::new(|x: f64| if x.abs() <= 1.0 { 1.0 } else { 0.0 }),
        }
    }

    /// Bartlett (triangular) window `max(0, 1 - |x|)`; positive definite, so
    /// the tapered estimate inherits nonnegative definiteness from the
    /// plug-in matrix by the Schur product theorem.
    pub fn bartlett() -> Self {
        Self {
            name: "bartlett".into(),
            positive_definite: true,
            kernel: Arc::new(|x: f64| (1.0 - x.abs()).max(0.0)),
        }
    }

    /// User-supplied kernel, validated on a grid over `[-2, 2]`.
    pub fn custom(
        name: impl Into<String>,
        positive_definite: bool,
        kernel: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        let taper = Self {
            name: name.into(),
            positive_definite,
            kernel: Arc::new(kernel),
        };
        taper.validate()?;
        Ok(taper)
    }

    /// Re-check the kernel conditions on the validation grid.
    pub fn validate(&self) -> Result<()> {
        let fail = |reason: String| Error::InvalidTaper {
            name: self.name.clone(),
            reason,
        };
        let k0 = (self.kernel)(0.0);
        if (k0 - 1.0).abs() > 1e-12 {
            return Err(fail(format!("K(0) = {k0}, must equal 1")));
        }
        let points = 1001;
        for i in 0..points {
            let x = -2.0 + 4.0 * i as f64 / (points - 1) as f64;
            let v = (self.kernel)(x);
            if !v.is_finite() {
                return Err(fail(format!("K({x}) is not finite")));
            }
            if v.abs() > 1.0 + 1e-12 {
                return Err(fail(format!("|K({x})| = {} exceeds 1", v.abs())));
            }
            if x.abs() > 1.0 && v.abs() > 1e-12 {
                return Err(fail(format!("K({x}) = {v}, must vanish for |x| > 1")));
            }
            let w = (self.kernel)(-x);
            if (v - w).abs() > 1e-10 {
                return Err(fail(format!("K({x}) = {v} differs from K({}) = {w}", -x)));
            }
        }
        Ok(())
    }

    /// Kernel weight `K(x)`.
    pub fn weight(&self, x: f64) -> f64 {
        (self.kernel)(x)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_positive_definite(&self) -> bool {
        self.positive_definite
    }

    /// Look up a built-in taper by name.
    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "rectangular" => Ok(Self::rectangular()),
            "bartlett" => Ok(Self::bartlett()),
            other => Err(Error::invalid(format!(
                "unknown taper `{other}` (built-ins: rectangular, bartlett)"
            ))),
        }
    }
}

/// Tapered first column from precomputed autocovariances `gammas[k]`,
/// `k = 0..T-1`: entry `k` is `K(k/B) gamma_k`, zero beyond the bandwidth.
pub fn tapered_first_column(gammas: &[f64], taper: &Taper, bandwidth: usize) -> Result<Vec<f64>> {
    let t = gammas.len();
    if t < 2 || bandwidth < 1 || bandwidth > t - 1 {
        return Err(Error::OutOfRange {
            what: "bandwidth",
            value: bandwidth,
            min: 1,
            max: t.saturating_sub(1),
        });
    }
    let mut col = vec![0.0; t];
    col[0] = gammas[0];
    for k in 1..=bandwidth.min(t - 1) {
        col[k] = taper.weight(k as f64 / bandwidth as f64) * gammas[k];
    }
    Ok(col)
}

/// Hard-thresholded first column: lag 0 is always kept; lag `k >= 1` is kept
/// iff `|gamma_k| >= threshold`.
pub fn thresholded_first_column(gammas: &[f64], threshold: f64) -> Result<Vec<f64>> {
    if !(threshold >= 0.0) {
        return Err(Error::invalid(format!(
            "threshold {threshold} must be nonnegative"
        )));
    }
    let mut col = gammas.to_vec();
    for v in col.iter_mut().skip(1) {
        if v.abs() < threshold {
            *v = 0.0;
        }
    }
    Ok(col)
}

/// Plug-in sample autocovariance matrix (all `T` lags, divisor `T`).
/// Nonnegative definite by construction.
pub fn plug_in_matrix(x: &TimeSeries) -> Result<SymmetricToeplitz> {
    let gammas = x.sample_acov(x.len() - 1)?;
    SymmetricToeplitz::new(gammas.values().to_vec())
}

/// Tapered (for the rectangular kernel: banded) sample covariance matrix
/// with entries `K((s-t)/B) gamma_hat_{s-t}`.
pub fn tapered_matrix(x: &TimeSeries, taper: &Taper, bandwidth: usize) -> Result<SymmetricToeplitz> {
    let t = x.len();
    if bandwidth < 1 || bandwidth > t - 1 {
        return Err(Error::OutOfRange {
            what: "bandwidth",
            value: bandwidth,
            min: 1,
            max: t - 1,
        });
    }
    // Only lags up to the bandwidth are needed.
    let gammas = x.sample_acov(bandwidth.min(t - 1))?;
    let mut padded = gammas.values().to_vec();
    padded.resize(t, 0.0);
    SymmetricToeplitz::new(tapered_first_column(&padded, taper, bandwidth)?)
}

/// Hard-thresholded sample autocovariance matrix; the diagonal is never
/// thresholded. May be indefinite.
pub fn thresholded_matrix(x: &TimeSeries, threshold: f64) -> Result<SymmetricToeplitz> {
    let gammas = x.sample_acov(x.len() - 1)?;
    SymmetricToeplitz::new(thresholded_first_column(gammas.values(), threshold)?)
}

/// Tapering followed by hard thresholding of the tapered entries
/// (diagonal preserved).
pub fn threshold_after_banding(
    x: &TimeSeries,
    taper: &Taper,
    bandwidth: usize,
    threshold: f64,
) -> Result<SymmetricToeplitz> {
    let tapered = tapered_matrix(x, taper, bandwidth)?;
    SymmetricToeplitz::new(thresholded_first_column(tapered.first_column(), threshold)?)
}

/// Budget for analytic tail estimates folded into the bias bound.
const BIAS_TAIL_BUDGET: f64 = 1e-10;

/// Deterministic bias bound for the tapered estimate at dimension `t`:
///
/// ```text
/// b_T = 2 sum_{k<=B} [1 - K(k/B)] |gamma_k|
///     + (2/T) sum_{k<=B} k |gamma_k|
///     + 2 sum_{B<k<=T-1} |gamma_k|
/// ```
///
/// The first term vanishes for the rectangular kernel. Lags beyond the
/// truth's horizon are covered by its analytic tail bound when that
/// contributes less than `1e-10`; otherwise the horizon is insufficient.
pub fn bias_bound(
    truth: &AutocovarianceSequence,
    taper: &Taper,
    bandwidth: usize,
    t: usize,
) -> Result<f64> {
    if t < 2 {
        return Err(Error::invalid("dimension must be at least 2"));
    }
    if bandwidth < 1 || bandwidth > t - 1 {
        return Err(Error::OutOfRange {
            what: "bandwidth",
            value: bandwidth,
            min: 1,
            max: t - 1,
        });
    }
    let kmax = truth.kmax();
    let b = bandwidth as f64;
    let mut total = 0.0;
    for k in 1..=bandwidth.min(kmax) {
        let g = truth.gamma(k).abs();
        total += 2.0 * (1.0 - taper.weight(k as f64 / b)) * g;
        total += 2.0 / t as f64 * k as f64 * g;
    }
    for k in (bandwidth + 1)..t.min(kmax + 1) {
        total += 2.0 * truth.gamma(k).abs();
    }

    if kmax < t - 1 {
        let tail = truth.tail();
        let missing = (|| {
            let mut extra = 0.0;
            if bandwidth > kmax {
                // 1 - K in [0, 2]; weight tail by k for the second term.
                extra += 4.0 * tail.abs_sum(kmax + 1, bandwidth)?;
                extra += 2.0 / t as f64 * tail.weighted_abs_sum(kmax + 1, bandwidth)?;
            }
            extra += 2.0 * tail.abs_sum(bandwidth.max(kmax) + 1, t - 1)?;
            Some(extra)
        })();
        match missing {
            Some(extra) if extra <= BIAS_TAIL_BUDGET => total += extra,
            _ => {
                return Err(Error::InsufficientHorizon {
                    have: kmax,
                    need: t - 1,
                })
            }
        }
    }
    Ok(total)
}
