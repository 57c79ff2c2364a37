//! Linear-process models with exact autocovariances, spectral densities,
//! physical dependence measures and seeded simulation.
//!
//! A model is a causal MA(∞) filter `X_t = sigma * sum_{s>=0} a_s e_{t-s}`
//! of i.i.d. standard Gaussian innovations, materialized by truncating the
//! coefficient sequence at a lag `L` where the squared tail mass is
//! negligible (relative `1e-12`, hard cap `L = 10^6`). Everything downstream
//! (truth matrices, dependence constants, simulation) refers to the same
//! truncated filter, so the test corpus is internally consistent.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;
use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};
use crate::estimators::TimeSeries;
use crate::fft;

/// Relative squared-tail mass allowed when truncating MA(∞) coefficients.
const TRUNCATION_TOL: f64 = 1e-12;
/// Hard cap on the truncation lag.
const MAX_TRUNCATION_LAG: usize = 1_000_000;

/// Bound on the autocovariances beyond the materialized horizon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TailBound {
    /// `gamma_k = 0` exactly for `k > kmax` (finite-order filters).
    Zero,
    /// `|gamma_k| <= scale * k^{-exponent}` for `k > kmax`.
    PowerLaw { scale: f64, exponent: f64 },
    /// Nothing known beyond `kmax`.
    Unknown,
}

impl TailBound {
    /// Upper bound on `sum_{k=from..=to} |gamma_k|`, if one is available.
    pub fn abs_sum(&self, from: usize, to: usize) -> Option<f64> {
        if from > to {
            return Some(0.0);
        }
        match *self {
            TailBound::Zero => Some(0.0),
            TailBound::PowerLaw { scale, exponent } => {
                Some((from..=to).map(|k| scale * (k as f64).powf(-exponent)).sum())
            }
            TailBound::Unknown => None,
        }
    }

    /// Upper bound on `sum_{k=from..=to} k * |gamma_k|`, if available.
    pub fn weighted_abs_sum(&self, from: usize, to: usize) -> Option<f64> {
        if from > to {
            return Some(0.0);
        }
        match *self {
            TailBound::Zero => Some(0.0),
            TailBound::PowerLaw { scale, exponent } => Some(
                (from..=to)
                    .map(|k| scale * (k as f64).powf(1.0 - exponent))
                    .sum(),
            ),
            TailBound::Unknown => None,
        }
    }
}

/// Lag-indexed autocovariances `gamma_0, gamma_1, ..., gamma_kmax` — the
/// unique content of a symmetric Toeplitz covariance matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AutocovarianceSequence {
    values: Vec<f64>,
    tail: TailBound,
}

impl AutocovarianceSequence {
    /// Build a sequence, checking `gamma_0 >= 0` and `|gamma_k| <= gamma_0`
    /// (Cauchy-Schwarz) up to rounding slack.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        Self::with_tail(values, TailBound::Unknown)
    }

    pub fn with_tail(values: Vec<f64>, tail: TailBound) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("autocovariance sequence must be nonempty"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("autocovariance values must be finite"));
        }
        let gamma0 = values[0];
        if gamma0 < 0.0 {
            return Err(Error::invalid(format!("gamma_0 = {gamma0} must be >= 0")));
        }
        let slack = 1e-12 * gamma0.max(1.0);
        if let Some((k, &v)) = values
            .iter()
            .enumerate()
            .skip(1)
            .find(|(_, v)| v.abs() > gamma0 + slack)
        {
            return Err(Error::invalid(format!(
                "|gamma_{k}| = {} exceeds gamma_0 = {gamma0}",
                v.abs()
            )));
        }
        Ok(Self { values, tail })
    }

    /// Largest materialized lag.
    pub fn kmax(&self) -> usize {
        self.values.len() - 1
    }

    /// `gamma_k`, treating lags beyond the horizon as zero.
    pub fn gamma(&self, k: usize) -> f64 {
        self.values.get(k).copied().unwrap_or(0.0)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn tail(&self) -> TailBound {
        self.tail
    }

    /// First `t` lags as a covariance-matrix first column. Fails when the
    /// horizon is too short and the tail is not exactly zero.
    pub fn first_column(&self, t: usize) -> Result<Vec<f64>> {
        if t == 0 {
            return Err(Error::invalid("dimension must be positive"));
        }
        if t > self.values.len() && self.tail != TailBound::Zero {
            return Err(Error::InsufficientHorizon {
                have: self.kmax(),
                need: t - 1,
            });
        }
        let mut col = self.values.clone();
        col.resize(t, 0.0);
        col.truncate(t);
        Ok(col)
    }
}

/// Physical dependence summary of a linear process at moment order `p > 2`.
///
/// The pointwise measure of a linear Gaussian filter is
/// `delta_p(t) = |a_t| * sqrt(2) * sigma * nu_p` with
/// `nu_p = (E|Z|^p)^{1/p}`; the profile aggregates its tail sums.
#[derive(Debug, Clone)]
pub struct DependenceProfile {
    p: f64,
    deltas: Vec<f64>,
}

impl DependenceProfile {
    /// Moment order `p`.
    pub fn p(&self) -> f64 {
        self.p
    }

    /// Pointwise measure `delta_p(t)` (zero beyond the truncation lag).
    pub fn delta(&self, t: usize) -> f64 {
        self.deltas.get(t).copied().unwrap_or(0.0)
    }

    /// Tail sum `Theta_p(m) = sum_{t>=m} delta_p(t)`.
    pub fn theta(&self, m: usize) -> f64 {
        self.deltas.iter().skip(m).sum()
    }

    /// `Psi_p(m) = (sum_{t>=m} delta_p(t)^2)^{1/2}` (`p' = min(2, p) = 2`).
    pub fn psi(&self, m: usize) -> f64 {
        self.deltas
            .iter()
            .skip(m)
            .map(|d| d * d)
            .sum::<f64>()
            .sqrt()
    }

    /// `Delta_p(m) = sum_{t>=0} min(C_p * Psi_p(m), delta_p(t))`.
    pub fn delta_tail(&self, m: usize) -> f64 {
        let cap = self.moment_constant() * self.psi(m);
        self.deltas.iter().map(|d| d.min(cap)).sum()
    }

    /// Burkholder/Rio constant `C_p = sqrt(p - 1)` for `p > 2`.
    pub fn moment_constant(&self) -> f64 {
        (self.p - 1.0).sqrt()
    }
}

/// `nu_p = (E|Z|^p)^{1/p}` for standard normal `Z`, via
/// `E|Z|^p = 2^{p/2} Gamma((p+1)/2) / sqrt(pi)`.
pub fn normal_abs_moment_root(p: f64) -> f64 {
    assert!(p > 0.0, "moment order must be positive");
    let log_moment = 0.5 * p * 2f64.ln() + ln_gamma(0.5 * (p + 1.0)) - 0.5 * PI.ln();
    (log_moment / p).exp()
}

/// A causal linear filter `X_t = sigma * sum_{s=0}^{L} a_s e_{t-s}` of
/// i.i.d. standard Gaussian innovations.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProcessModel {
    coefficients: Vec<f64>,
    innovation_sd: f64,
    /// `|a_s| <= scale * s^{-exponent}` for all `s >= 1`, when known.
    coefficient_decay: Option<(f64, f64)>,
}

impl LinearProcessModel {
    /// Build a model from explicit coefficients `a_0, a_1, ..., a_L`.
    pub fn from_coefficients(coefficients: Vec<f64>, innovation_sd: f64) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::invalid("coefficient sequence must be nonempty"));
        }
        if coefficients.iter().any(|a| !a.is_finite()) {
            return Err(Error::invalid("coefficients must be finite"));
        }
        if !(innovation_sd > 0.0) || !innovation_sd.is_finite() {
            return Err(Error::invalid(format!(
                "innovation standard deviation {innovation_sd} must be positive and finite"
            )));
        }
        let sq: f64 = coefficients.iter().map(|a| a * a).sum();
        if !sq.is_finite() {
            return Err(Error::invalid("sum of squared coefficients overflows"));
        }
        Ok(Self {
            coefficients,
            innovation_sd,
            coefficient_decay: None,
        })
    }

    fn with_decay(mut self, scale: f64, exponent: f64) -> Self {
        self.coefficient_decay = Some((scale, exponent));
        self
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Largest retained coefficient lag `L`.
    pub fn truncation_lag(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn innovation_sd(&self) -> f64 {
        self.innovation_sd
    }

    /// Process variance `gamma_0 = sigma^2 sum a_s^2`.
    pub fn variance(&self) -> f64 {
        let s2 = self.innovation_sd * self.innovation_sd;
        s2 * self.coefficients.iter().map(|a| a * a).sum::<f64>()
    }

    /// Exact autocovariances of the (truncated) filter:
    /// `gamma_k = sigma^2 sum_j a_j a_{j+k}`, zero beyond the truncation lag.
    pub fn autocovariances(&self, kmax: usize) -> AutocovarianceSequence {
        let s2 = self.innovation_sd * self.innovation_sd;
        let lag = kmax.min(self.truncation_lag());
        let mut values = fft::lagged_products(&self.coefficients, lag);
        for v in values.iter_mut() {
            *v *= s2;
        }
        values.resize(kmax + 1, 0.0);
        let tail = if kmax >= self.truncation_lag() {
            TailBound::Zero
        } else if let Some((scale, exponent)) = self.coefficient_decay {
            // |gamma_k| <= sigma^2 * (sum_j |a_j|) * sup_{j>=k} |a_j|
            let l1: f64 = self.coefficients.iter().map(|a| a.abs()).sum::<f64>()
                + if exponent > 1.0 {
                    scale * (self.truncation_lag() as f64).powf(1.0 - exponent)
                        / (exponent - 1.0)
                } else {
                    0.0
                };
            TailBound::PowerLaw {
                scale: s2 * l1 * scale,
                exponent,
            }
        } else {
            TailBound::Unknown
        };
        AutocovarianceSequence::with_tail(values, tail)
            .expect("model autocovariances satisfy Cauchy-Schwarz")
    }

    /// Spectral density `f(theta) = sigma^2 / (2 pi) * |sum_s a_s e^{i s theta}|^2`.
    ///
    /// Nonnegative, even and `2 pi`-periodic in `theta`.
    pub fn spectral_density(&self, theta: f64) -> f64 {
        let mut re = 0.0;
        let mut im = 0.0;
        for (s, &a) in self.coefficients.iter().enumerate() {
            let (sin, cos) = (s as f64 * theta).sin_cos();
            re += a * cos;
            im += a * sin;
        }
        let s2 = self.innovation_sd * self.innovation_sd;
        s2 * (re * re + im * im) / (2.0 * PI)
    }

    /// Physical dependence profile at moment order `p > 2`.
    pub fn dependence_profile(&self, p: f64) -> Result<DependenceProfile> {
        if !(p > 2.0) {
            return Err(Error::invalid(format!(
                "moment order p = {p} must exceed 2"
            )));
        }
        let unit = 2f64.sqrt() * self.innovation_sd * normal_abs_moment_root(p);
        let deltas = self.coefficients.iter().map(|a| a.abs() * unit).collect();
        Ok(DependenceProfile { p, deltas })
    }

    /// `Theta_2 = sqrt(2) * sigma * sum_t |a_t|` (the second-order tail sum
    /// at the origin, used by the inconsistency bracket).
    pub fn theta2(&self) -> f64 {
        2f64.sqrt() * self.innovation_sd * self.coefficients.iter().map(|a| a.abs()).sum::<f64>()
    }

    /// `zeta_p(k) = sum_j delta_p(j) delta_p(j+k)`, which dominates
    /// `|gamma_k|` at `p = 2`.
    pub fn zeta(&self, p: f64, k: usize) -> f64 {
        assert!(p > 0.0, "moment order must be positive");
        let unit = 2f64.sqrt() * self.innovation_sd * normal_abs_moment_root(p);
        let a = &self.coefficients;
        if k > self.truncation_lag() {
            return 0.0;
        }
        let unit2 = unit * unit;
        (0..a.len() - k).map(|j| a[j].abs() * a[j + k].abs()).sum::<f64>() * unit2
    }

    /// Theoretical hard threshold `A_T = 2 c_p' sqrt(log T / T)` with
    /// `c_p' = 6 (p+4) e^{p/4} ||X_0||_4 Theta_4`. Requires `p > 4`.
    pub fn theoretical_threshold(&self, t: usize, p: f64) -> Result<f64> {
        if !(p > 4.0) {
            return Err(Error::invalid(format!(
                "moment order p = {p} must exceed 4"
            )));
        }
        if t < 2 {
            return Err(Error::invalid("series length must be at least 2"));
        }
        // ||X_0||_4 for a Gaussian marginal with variance gamma_0.
        let x0_norm4 = 3f64.powf(0.25) * self.variance().sqrt();
        let theta4 = self.dependence_profile(4.0)?.theta(0);
        let c = 6.0 * (p + 4.0) * (p / 4.0).exp() * x0_norm4 * theta4;
        let tf = t as f64;
        Ok(2.0 * c * (tf.ln() / tf).sqrt())
    }

    /// Simulate `X_1..X_len` using `L + len` Gaussian innovations drawn from
    /// a ChaCha stream seeded with `seed`. Deterministic given
    /// `(model, len, seed)`.
    pub fn simulate(&self, len: usize, seed: u64) -> Result<TimeSeries> {
        Ok(self.simulator(len)?.run(seed))
    }

    /// Prepare a reusable simulator for series of length `len`; amortizes
    /// the filter's FFT across replicates.
    pub fn simulator(&self, len: usize) -> Result<Simulator> {
        Simulator::new(self, len)
    }
}

/// Reusable sampler for one `(model, length)` pair. Drawing a replicate
/// costs one Gaussian sweep plus (for long filters) two cached-plan FFTs.
pub struct Simulator {
    len: usize,
    lag: usize,
    sigma: f64,
    strategy: ConvolveStrategy,
}

enum ConvolveStrategy {
    Direct {
        coefficients: Vec<f64>,
    },
    Fft {
        /// Forward transform of the zero-padded coefficients.
        spectrum: Vec<rustfft::num_complex::Complex64>,
    },
}

impl Simulator {
    fn new(model: &LinearProcessModel, len: usize) -> Result<Self> {
        if len < 2 {
            return Err(Error::invalid(format!(
                "series length {len} must be at least 2"
            )));
        }
        let lag = model.truncation_lag();
        let eps_len = lag + len;
        // Same cutover as the one-shot convolution so that every API path
        // produces bit-identical series for a given (model, len, seed).
        let strategy = if (lag + 1).saturating_mul(eps_len) <= 1 << 20 {
            ConvolveStrategy::Direct {
                coefficients: model.coefficients.clone(),
            }
        } else {
            let n = fft::next_pow2(lag + eps_len);
            ConvolveStrategy::Fft {
                spectrum: fft::spectrum_on_grid(&model.coefficients, n),
            }
        };
        Ok(Self {
            len,
            lag,
            sigma: model.innovation_sd,
            strategy,
        })
    }

    pub fn run(&self, seed: u64) -> TimeSeries {
        use rustfft::num_complex::Complex64;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let eps_len = self.lag + self.len;
        let values: Vec<f64> = match &self.strategy {
            ConvolveStrategy::Direct { coefficients } => {
                let eps: Vec<f64> = (0..eps_len)
                    .map(|_| StandardNormal.sample(&mut rng))
                    .collect();
                (0..self.len)
                    .map(|t| {
                        let top = self.lag + t;
                        coefficients
                            .iter()
                            .enumerate()
                            .map(|(s, &a)| a * eps[top - s])
                            .sum::<f64>()
                            * self.sigma
                    })
                    .collect()
            }
            ConvolveStrategy::Fft { spectrum } => {
                let n = spectrum.len();
                let mut buf = vec![Complex64::new(0.0, 0.0); n];
                for slot in buf.iter_mut().take(eps_len) {
                    *slot = Complex64::new(StandardNormal.sample(&mut rng), 0.0);
                }
                fft::plan_forward(n).process(&mut buf);
                for (b, s) in buf.iter_mut().zip(spectrum.iter()) {
                    *b *= *s;
                }
                fft::plan_inverse(n).process(&mut buf);
                let scale = self.sigma / n as f64;
                buf[self.lag..self.lag + self.len]
                    .iter()
                    .map(|c| c.re * scale)
                    .collect()
            }
        };
        TimeSeries::zero_mean(values).expect("simulated series is finite and long enough")
    }
}

/// Autocovariances of the sparse-lag process: `gamma_0 = 3` and
/// `gamma_k = A^{-alpha j}` exactly when `k = A^j` for some `j >= 1`.
///
/// Only the sequence is modeled; the process itself is not simulated.
pub fn sparse_lag_acov(base: u32, alpha: f64, kmax: usize) -> Result<AutocovarianceSequence> {
    if base < 2 || !base.is_multiple_of(2) {
        return Err(Error::invalid(format!(
            "sparse-lag base A = {base} must be an even integer >= 2"
        )));
    }
    if !(alpha > 0.0) {
        return Err(Error::invalid(format!("alpha = {alpha} must be positive")));
    }
    let decay = (base as f64).powf(-alpha);
    if decay > 0.2 {
        return Err(Error::invalid(format!(
            "A^-alpha = {decay:.4} exceeds 1/5; the sparse-lag process requires A^-alpha <= 1/5"
        )));
    }
    let mut values = vec![0.0; kmax + 1];
    values[0] = 3.0;
    let mut power: u128 = base as u128;
    let mut j = 1u32;
    while power <= kmax as u128 {
        values[power as usize] = decay.powi(j as i32);
        j += 1;
        power *= base as u128;
    }
    AutocovarianceSequence::with_tail(
        values,
        TailBound::PowerLaw {
            scale: 1.0,
            exponent: alpha,
        },
    )
}

/// Named model presets, serializable as `{"kind": ..., "params": ...}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "kebab-case")]
pub enum ModelPreset {
    /// `a_0 = 1`, `a_s = c s^{-(1+alpha)}`.
    XProcess { c: f64, alpha: f64 },
    /// `b_0 = 1`, `b_s = c (s/2)^{-(1+alpha)}` for even `s`, zero otherwise.
    YProcess { c: f64, alpha: f64 },
    /// `X_t = e_t + theta_1 e_{t-1} + ... + theta_q e_{t-q}`.
    Ma { coefficients: Vec<f64> },
    /// AR(1) materialized as the geometric filter `a_s = phi^s`.
    Ar1 { phi: f64 },
    WhiteNoise,
    /// Sparse-lag counterexample sequence (autocovariances only).
    SparseLag { base: u32, alpha: f64 },
}

/// Truncation lag for a power-law filter `|a_s| <= c s^{-(1+alpha)}`:
/// smallest `L` with squared tail below `TRUNCATION_TOL`, capped.
fn power_law_truncation(c: f64, alpha: f64) -> usize {
    // sum_{s>L} c^2 s^{-2-2a} <= c^2 L^{-(1+2a)} / (1+2a)
    let budget = TRUNCATION_TOL * (1.0 + 2.0 * alpha) / (c * c);
    let l = budget.powf(-1.0 / (1.0 + 2.0 * alpha)).ceil();
    (l.max(1.0) as usize).min(MAX_TRUNCATION_LAG)
}

impl ModelPreset {
    /// Materialize a linear model. Fails for [`ModelPreset::SparseLag`],
    /// which only defines an autocovariance sequence.
    pub fn linear_model(&self) -> Result<LinearProcessModel> {
        match self {
            ModelPreset::XProcess { c, alpha } => {
                if !(*c > 0.0) || !(*alpha > 0.0) {
                    return Err(Error::invalid("x-process requires c > 0 and alpha > 0"));
                }
                let l = power_law_truncation(*c, *alpha);
                let mut coeffs = Vec::with_capacity(l + 1);
                coeffs.push(1.0);
                for s in 1..=l {
                    coeffs.push(c * (s as f64).powf(-(1.0 + alpha)));
                }
                Ok(LinearProcessModel::from_coefficients(coeffs, 1.0)?
                    .with_decay(*c, 1.0 + alpha))
            }
            ModelPreset::YProcess { c, alpha } => {
                if !(*c > 0.0) || !(*alpha > 0.0) {
                    return Err(Error::invalid("y-process requires c > 0 and alpha > 0"));
                }
                let l = (2 * power_law_truncation(*c, *alpha)).min(MAX_TRUNCATION_LAG);
                let mut coeffs = vec![0.0; l + 1];
                coeffs[0] = 1.0;
                let mut s = 2;
                while s <= l {
                    coeffs[s] = c * (s as f64 / 2.0).powf(-(1.0 + alpha));
                    s += 2;
                }
                let scale = c * 2f64.powf(1.0 + alpha);
                Ok(LinearProcessModel::from_coefficients(coeffs, 1.0)?
                    .with_decay(scale, 1.0 + alpha))
            }
            ModelPreset::Ma { coefficients } => {
                let mut coeffs = Vec::with_capacity(coefficients.len() + 1);
                coeffs.push(1.0);
                coeffs.extend_from_slice(coefficients);
                LinearProcessModel::from_coefficients(coeffs, 1.0)
            }
            ModelPreset::Ar1 { phi } => {
                if !(phi.abs() < 1.0) {
                    return Err(Error::invalid(format!(
                        "ar1 requires |phi| < 1, got {phi}"
                    )));
                }
                if *phi == 0.0 {
                    return LinearProcessModel::from_coefficients(vec![1.0], 1.0);
                }
                // |phi|^{2(L+1)} < TRUNCATION_TOL * sum phi^{2s}
                let l = (-TRUNCATION_TOL.ln() / (2.0 * (1.0 / phi.abs()).ln()))
                    .ceil()
                    .max(1.0) as usize;
                let l = l.min(MAX_TRUNCATION_LAG);
                let coeffs = (0..=l).map(|s| phi.powi(s as i32)).collect();
                LinearProcessModel::from_coefficients(coeffs, 1.0)
            }
            ModelPreset::WhiteNoise => LinearProcessModel::from_coefficients(vec![1.0], 1.0),
            ModelPreset::SparseLag { .. } => Err(Error::invalid(
                "sparse-lag defines autocovariances only; it has no linear filter to simulate",
            )),
        }
    }

    /// True autocovariances up to `kmax`, for any preset.
    pub fn autocovariances(&self, kmax: usize) -> Result<AutocovarianceSequence> {
        match self {
            ModelPreset::SparseLag { base, alpha } => sparse_lag_acov(*base, *alpha, kmax),
            _ => Ok(self.linear_model()?.autocovariances(kmax)),
        }
    }

    /// Polynomial decay rate `alpha` of the dependence tail sums, when the
    /// preset has one (x/y processes and the sparse-lag sequence).
    pub fn decay_exponent(&self) -> Option<f64> {
        match self {
            ModelPreset::XProcess { alpha, .. }
            | ModelPreset::YProcess { alpha, .. }
            | ModelPreset::SparseLag { alpha, .. } => Some(*alpha),
            _ => None,
        }
    }

    /// Parse the compact form used on the command line, e.g.
    /// `x-process(0.5,1)`, `ar1(0.6)`, `ma(0.4,0.2)`, `white-noise`,
    /// `sparse-lag(4,2)`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::BadPreset(s.to_string());
        let (name, args) = match s.find('(') {
            None => (s, Vec::new()),
            Some(open) => {
                let close = s.rfind(')').ok_or_else(bad)?;
                if close != s.len() - 1 || close < open {
                    return Err(bad());
                }
                let args = s[open + 1..close]
                    .split(',')
                    .map(|a| a.trim().parse::<f64>().map_err(|_| bad()))
                    .collect::<Result<Vec<f64>>>()?;
                (&s[..open], args)
            }
        };
        match (name, args.as_slice()) {
            ("white-noise", []) => Ok(ModelPreset::WhiteNoise),
            ("ar1", [phi]) => Ok(ModelPreset::Ar1 { phi: *phi }),
            ("ma", coeffs) if !coeffs.is_empty() => Ok(ModelPreset::Ma {
                coefficients: coeffs.to_vec(),
            }),
            ("x-process", [c, alpha]) => Ok(ModelPreset::XProcess {
                c: *c,
                alpha: *alpha,
            }),
            ("y-process", [c, alpha]) => Ok(ModelPreset::YProcess {
                c: *c,
                alpha: *alpha,
            }),
            ("sparse-lag", [base, alpha]) => {
                if base.fract() != 0.0 || *base < 2.0 || *base > u32::MAX as f64 {
                    return Err(bad());
                }
                Ok(ModelPreset::SparseLag {
                    base: *base as u32,
                    alpha: *alpha,
                })
            }
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for ModelPreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelPreset::XProcess { c, alpha } => write!(f, "x-process({c},{alpha})"),
            ModelPreset::YProcess { c, alpha } => write!(f, "y-process({c},{alpha})"),
            ModelPreset::Ma { coefficients } => {
                let args: Vec<String> = coefficients.iter().map(|c| c.to_string()).collect();
                write!(f, "ma({})", args.join(","))
            }
            ModelPreset::Ar1 { phi } => write!(f, "ar1({phi})"),
            ModelPreset::WhiteNoise => write!(f, "white-noise"),
            ModelPreset::SparseLag { base, alpha } => write!(f, "sparse-lag({base},{alpha})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ma1() -> LinearProcessModel {
        LinearProcessModel::from_coefficients(vec![1.0, 0.5], 1.0).unwrap()
    }

    #[test]
    fn ma1_autocovariances() {
        let acov = ma1().autocovariances(2);
        assert!((acov.gamma(0) - 1.25).abs() < 1e-15);
        assert!((acov.gamma(1) - 0.5).abs() < 1e-15);
        assert_eq!(acov.gamma(2), 0.0);
        assert_eq!(acov.tail(), TailBound::Zero);
    }

    #[test]
    fn white_noise_autocovariances() {
        let acov = ModelPreset::WhiteNoise.autocovariances(4).unwrap();
        assert_eq!(acov.gamma(0), 1.0);
        for k in 1..=4 {
            assert_eq!(acov.gamma(k), 0.0);
        }
    }

    #[test]
    fn x_process_gamma1_against_brute_force() {
        let preset = ModelPreset::XProcess { c: 0.5, alpha: 1.0 };
        let model = preset.linear_model().unwrap();
        assert!((model.coefficients()[1] - 0.5).abs() < 1e-15);
        assert!((model.coefficients()[2] - 0.125).abs() < 1e-15);

        // Brute-force oracle at L = 10^6.
        let oracle: f64 = {
            let a = |s: usize| {
                if s == 0 {
                    1.0
                } else {
                    0.5 * (s as f64).powi(-2)
                }
            };
            (0..1_000_000).map(|j| a(j) * a(j + 1)).sum()
        };
        let gamma1 = model.autocovariances(1).gamma(1);
        assert!(
            (gamma1 - oracle).abs() < 1e-9,
            "gamma_1 = {gamma1}, oracle = {oracle}"
        );
        // Analytic value: 0.5 + 0.25 * (pi^2/3 - 3).
        let exact = 0.5 + 0.25 * (PI * PI / 3.0 - 3.0);
        assert!((gamma1 - exact).abs() < 1e-9);
    }

    #[test]
    fn spectral_density_white_noise_flat() {
        let model = ModelPreset::WhiteNoise.linear_model().unwrap();
        for theta in [-3.0, -1.0, 0.0, 0.5, 3.1] {
            assert!((model.spectral_density(theta) - 1.0 / (2.0 * PI)).abs() < 1e-15);
        }
    }

    #[test]
    fn spectral_density_ma1_at_zero() {
        let f0 = ma1().spectral_density(0.0);
        assert!((f0 - 2.25 / (2.0 * PI)).abs() < 1e-15);
    }

    #[test]
    fn spectral_density_matches_cosine_expansion() {
        let model = LinearProcessModel::from_coefficients(
            vec![1.0, 0.4, -0.3, 0.2, 0.1, -0.05],
            1.3,
        )
        .unwrap();
        let acov = model.autocovariances(5);
        for j in 0..200 {
            let theta = -PI + 2.0 * PI * j as f64 / 199.0;
            let expansion = (acov.gamma(0)
                + 2.0 * (1..=5).map(|k| acov.gamma(k) * (k as f64 * theta).cos()).sum::<f64>())
                / (2.0 * PI);
            let direct = model.spectral_density(theta);
            assert!(
                (expansion - direct).abs() < 1e-8,
                "theta={theta}: {expansion} vs {direct}"
            );
        }
    }

    #[test]
    fn dependence_profile_geometric_oracle() {
        let model = ModelPreset::Ar1 { phi: 0.5 }.linear_model().unwrap();
        let profile = model.dependence_profile(4.0).unwrap();
        let nu4 = normal_abs_moment_root(4.0);
        assert!((nu4 - 3f64.powf(0.25)).abs() < 1e-12);
        let l = model.truncation_lag() as i32;
        for m in [0usize, 1, 3, 7] {
            // Closed-form geometric sum over the materialized lags m..=L.
            let finite = 2f64.sqrt() * nu4 * (0.5f64.powi(m as i32) - 0.5f64.powi(l + 1))
                / (1.0 - 0.5);
            let got = profile.theta(m);
            assert!(
                (got - finite).abs() / finite < 1e-12,
                "Theta_4({m}) = {got}, finite-geometric oracle {finite}"
            );
            // The ideal infinite-filter value differs only by the truncated tail.
            let ideal = 2f64.sqrt() * nu4 * 0.5f64.powi(m as i32) / (1.0 - 0.5);
            assert!((got - ideal).abs() / ideal < 1e-3);
        }
    }

    #[test]
    fn dependence_profile_white_noise() {
        let model = ModelPreset::WhiteNoise.linear_model().unwrap();
        let profile = model.dependence_profile(6.0).unwrap();
        assert!(profile.theta(0) > 0.0);
        assert_eq!(profile.theta(1), 0.0);
    }

    #[test]
    fn dependence_profile_rejects_low_order() {
        let err = ma1().dependence_profile(2.0).unwrap_err();
        assert!(matches!(err, Error::InvalidParameter(_)));
    }

    #[test]
    fn theta_tail_monotone_and_psi_dominated() {
        let model = ModelPreset::XProcess { c: 0.5, alpha: 1.0 }
            .linear_model()
            .unwrap();
        let profile = model.dependence_profile(4.0).unwrap();
        assert!(profile.theta(10) <= profile.theta(5));
        for m in [0usize, 1, 2, 5, 10, 50] {
            assert!(profile.psi(m) <= profile.theta(m) + 1e-15);
        }
    }

    #[test]
    fn zeta_examples() {
        let model = ModelPreset::WhiteNoise.linear_model().unwrap();
        assert_eq!(model.zeta(2.0, 1), 0.0);

        let zeta1 = ma1().zeta(2.0, 1);
        assert!((zeta1 - 1.0).abs() < 1e-12, "zeta_2(1) = {zeta1}");
        let gamma1 = ma1().autocovariances(1).gamma(1);
        assert!(gamma1.abs() <= zeta1);
    }

    #[test]
    fn zeta_dominates_autocovariances() {
        let presets = [
            ModelPreset::WhiteNoise,
            ModelPreset::Ma {
                coefficients: vec![0.5, -0.3, 0.2],
            },
            ModelPreset::Ar1 { phi: -0.7 },
            ModelPreset::XProcess { c: 0.5, alpha: 1.0 },
            ModelPreset::YProcess { c: 0.5, alpha: 1.0 },
        ];
        for preset in presets {
            let model = preset.linear_model().unwrap();
            let acov = model.autocovariances(50);
            for k in 0..=50 {
                assert!(
                    acov.gamma(k).abs() <= model.zeta(2.0, k) + 1e-10,
                    "{preset}, lag {k}"
                );
            }
        }
    }

    #[test]
    fn simulation_is_deterministic() {
        let model = ma1();
        let a = model.simulate(64, 7).unwrap();
        let b = model.simulate(64, 7).unwrap();
        assert_eq!(a.values(), b.values());
        let c = model.simulate(64, 8).unwrap();
        assert_ne!(a.values(), c.values());
    }

    #[test]
    fn simulation_white_noise_variance() {
        let model = ModelPreset::WhiteNoise.linear_model().unwrap();
        let x = model.simulate(100_000, 42).unwrap();
        let var: f64 =
            x.values().iter().map(|v| v * v).sum::<f64>() / x.values().len() as f64;
        assert!((var - 1.0).abs() < 0.03, "sample variance {var}");
    }

    #[test]
    fn simulation_matches_exact_lag1_autocovariance() {
        let preset = ModelPreset::XProcess { c: 0.5, alpha: 1.0 };
        let model = preset.linear_model().unwrap();
        let t = 100_000;
        let x = model.simulate(t, 2024).unwrap();
        let acov = model.autocovariances(60);
        let sample = x.sample_acov(1).unwrap();
        // Bartlett-type standard error for gamma_hat_1.
        let var: f64 = (-(59i64)..=59)
            .map(|k| {
                let g = |i: i64| acov.gamma(i.unsigned_abs() as usize);
                g(k) * g(k) + g(k + 1) * g(k - 1)
            })
            .sum::<f64>()
            / t as f64;
        let se = var.sqrt();
        let diff = (sample.gamma(1) - acov.gamma(1)).abs();
        assert!(diff <= 3.0 * se, "diff {diff} vs 3 se {}", 3.0 * se);
    }

    #[test]
    fn sparse_lag_examples() {
        let seq = sparse_lag_acov(4, 2.0, 20).unwrap();
        assert_eq!(seq.gamma(0), 3.0);
        for k in 1..=20 {
            let expected = match k {
                4 => 4f64.powi(-2),
                16 => 4f64.powi(-4),
                _ => 0.0,
            };
            assert_eq!(seq.gamma(k), expected, "lag {k}");
        }

        let tiny = sparse_lag_acov(4, 2.0, 3).unwrap();
        assert!(tiny.values()[1..].iter().all(|&v| v == 0.0));

        assert!(sparse_lag_acov(3, 2.0, 10).is_err(), "odd base");
        assert!(sparse_lag_acov(4, 0.5, 10).is_err(), "A^-alpha > 1/5");
    }

    #[test]
    fn sparse_lag_spectral_density_positive() {
        let seq = sparse_lag_acov(4, 2.0, 1 << 12).unwrap();
        let n = 10_000;
        for j in 0..n {
            let theta = -PI + 2.0 * PI * j as f64 / (n - 1) as f64;
            let f = (seq.gamma(0)
                + 2.0
                    * (1..=seq.kmax())
                        .filter(|&k| seq.gamma(k) != 0.0)
                        .map(|k| seq.gamma(k) * (k as f64 * theta).cos())
                        .sum::<f64>())
                / (2.0 * PI);
            assert!(f > 0.0, "f({theta}) = {f}");
        }
    }

    #[test]
    fn spectral_density_integrates_to_variance() {
        // Trapezoid quadrature over [-pi, pi] against gamma_0.
        for preset in [
            ModelPreset::Ma {
                coefficients: vec![0.5, -0.3, 0.2],
            },
            ModelPreset::Ar1 { phi: 0.6 },
        ] {
            let model = preset.linear_model().unwrap();
            let n = 1 << 12;
            let h = 2.0 * PI / n as f64;
            let mut integral = 0.0;
            for j in 0..n {
                let theta = -PI + j as f64 * h;
                integral += model.spectral_density(theta) * h;
            }
            let gamma0 = model.variance();
            assert!(
                (integral - gamma0).abs() < 1e-6,
                "{preset}: integral {integral} vs gamma_0 {gamma0}"
            );
        }
    }

    #[test]
    fn preset_parse_and_display_round_trip() {
        for s in [
            "white-noise",
            "ar1(0.5)",
            "ma(0.5,-0.25)",
            "x-process(0.5,1)",
            "y-process(0.5,0.2)",
            "sparse-lag(4,2)",
        ] {
            let preset = ModelPreset::parse(s).unwrap();
            assert_eq!(ModelPreset::parse(&preset.to_string()).unwrap(), preset);
        }
        assert!(ModelPreset::parse("nope(1)").is_err());
        assert!(ModelPreset::parse("ar1(0.5").is_err());
    }

    #[test]
    fn preset_json_shape() {
        let preset = ModelPreset::XProcess { c: 0.5, alpha: 1.0 };
        let json = serde_json::to_value(&preset).unwrap();
        assert_eq!(json["kind"], "x-process");
        assert_eq!(json["params"]["c"], 0.5);
        let back: ModelPreset = serde_json::from_value(json).unwrap();
        assert_eq!(back, preset);
    }

    #[test]
    fn sparse_lag_has_no_linear_model() {
        let err = ModelPreset::SparseLag { base: 4, alpha: 2.0 }
            .linear_model()
            .unwrap_err();
        assert!(matches!(err, Error::InvalidParameter(_)));
    }

    #[test]
    fn theoretical_threshold_scales_down_in_t() {
        let model = ModelPreset::XProcess { c: 0.5, alpha: 1.0 }
            .linear_model()
            .unwrap();
        let a100 = model.theoretical_threshold(100, 8.0).unwrap();
        let a10k = model.theoretical_threshold(10_000, 8.0).unwrap();
        assert!(a100 > a10k && a10k > 0.0);
        assert!(model.theoretical_threshold(100, 4.0).is_err());
    }
}
