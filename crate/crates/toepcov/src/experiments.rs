//! Monte Carlo harness: oracle bandwidth/threshold selection against a known
//! truth matrix, per-cell error tables, the inconsistency bracket for the
//! plug-in estimate, and convergence-rate fits for the regularized
//! estimators.
//!
//! Reproducibility: replicate `r` draws its innovations from a ChaCha stream
//! seeded by `splitmix(seed, r)`, so reports are bit-identical for a given
//! configuration regardless of thread count or scheduling. Aggregation is a
//! deterministic reduction in replicate order.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::estimators::{tapered_first_column, thresholded_first_column, Taper, TimeSeries};
use crate::process::LinearProcessModel;
use crate::spectral::{symbol_eigenvalue_bounds, SpectralFunction};
use crate::toeplitz::SymmetricToeplitz;

/// Norm tolerance for oracle searches and table cells (dense eigensolves
/// at table sizes, where it is not binding).
const NORM_TOL: f64 = 1e-7;
/// Looser tolerances for the large-T Monte Carlo checks, where the extreme
/// eigenvalues of smooth-symbol Toeplitz matrices cluster and high-accuracy
/// Lanczos iterations would dominate the runtime. The induced value error
/// (about tol * Gershgorin) is orders of magnitude below the Monte Carlo
/// noise these checks aggregate.
const BRACKET_NORM_TOL: f64 = 1e-5;
const RATE_NORM_TOL: f64 = 1e-4;

/// Derive an independent sub-seed for replicate `r` (splitmix64 step).
pub fn replicate_seed(seed: u64, r: u64) -> u64 {
    let mut z = seed.wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(r.wrapping_add(1)));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Estimators the harness can evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimatorKind {
    /// Tapered estimate with oracle bandwidth (banded for the rectangular
    /// kernel).
    Banded,
    /// Hard threshold chosen by oracle over the absolute sample
    /// autocovariances.
    Thresholded,
    /// Raw plug-in sample autocovariance matrix.
    PlugIn,
    /// Oracle bandwidth first, then an oracle threshold on the tapered
    /// entries.
    ThresholdAfterBanding,
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            EstimatorKind::Banded => "banded",
            EstimatorKind::Thresholded => "thresholded",
            EstimatorKind::PlugIn => "plug-in",
            EstimatorKind::ThresholdAfterBanding => "threshold-after-banding",
        };
        f.write_str(name)
    }
}

impl FromStr for EstimatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "banded" => Ok(EstimatorKind::Banded),
            "thresholded" => Ok(EstimatorKind::Thresholded),
            "plug-in" | "plug_in" => Ok(EstimatorKind::PlugIn),
            "threshold-after-banding" => Ok(EstimatorKind::ThresholdAfterBanding),
            other => Err(Error::invalid(format!(
                "unknown estimator `{other}` (banded, thresholded, plug-in, \
                 threshold-after-banding)"
            ))),
        }
    }
}

/// One Monte Carlo cell: a model, a sample size, and the estimators to score.
#[derive(Clone)]
pub struct ExperimentConfig {
    pub model: LinearProcessModel,
    pub len: usize,
    pub replications: usize,
    pub seed: u64,
    pub estimators: Vec<EstimatorKind>,
    pub taper: Taper,
    /// Demean each simulated series before estimation. The reference error
    /// tables work with centered observations, so this defaults to `true`
    /// in [`ExperimentConfig::table_cell`].
    pub center: bool,
}

impl ExperimentConfig {
    /// Configuration reproducing one error-table cell: oracle banded,
    /// oracle thresholded and plug-in estimates of a centered series, with
    /// the rectangular kernel.
    pub fn table_cell(model: LinearProcessModel, len: usize, replications: usize, seed: u64) -> Self {
        Self {
            model,
            len,
            replications,
            seed,
            estimators: vec![
                EstimatorKind::Banded,
                EstimatorKind::Thresholded,
                EstimatorKind::PlugIn,
            ],
            taper: Taper::rectangular(),
            center: true,
        }
    }
}

impl ExperimentConfig {
    fn validate(&self) -> Result<()> {
        if self.len < 4 {
            return Err(Error::invalid("cell sample size must be at least 4"));
        }
        if self.replications < 1 {
            return Err(Error::invalid("need at least one replication"));
        }
        if self.estimators.is_empty() {
            return Err(Error::invalid("no estimators selected"));
        }
        Ok(())
    }
}

/// Per-estimator Monte Carlo summary (population standard deviations).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorSummary {
    pub estimator: EstimatorKind,
    pub mean_error: f64,
    pub sd_error: f64,
    /// Number of retained diagonals including the main one: oracle
    /// bandwidth + 1 for the banded estimate, the nonzero retained lag
    /// count for thresholded variants. Absent for the plug-in estimate.
    /// This is the statistic the reference tables tabulate, making the
    /// banded and thresholded columns directly comparable.
    pub mean_bandwidth_or_nnz: Option<f64>,
    pub sd_bandwidth_or_nnz: Option<f64>,
}

/// Monte Carlo report for one `(model, T)` cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub replications: usize,
    pub summaries: Vec<EstimatorSummary>,
}

impl ExperimentReport {
    pub fn summary(&self, kind: EstimatorKind) -> Option<&EstimatorSummary> {
        self.summaries.iter().find(|s| s.estimator == kind)
    }

    /// Plain-text table: one line per estimator with `error (sd)` and,
    /// where defined, `bandwidth-or-nonzero-count (sd)`.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "{:<24} {:>14} {:>16}\n",
            "estimator", "error (sd)", "bw/nnz (sd)"
        ));
        for s in &self.summaries {
            let stat = match (s.mean_bandwidth_or_nnz, s.sd_bandwidth_or_nnz) {
                (Some(m), Some(sd)) => format!("{m:.2} ({sd:.2})"),
                _ => String::new(),
            };
            out.push_str(&format!(
                "{:<24} {:>6.2} ({:.2}) {:>16}\n",
                s.estimator.to_string(),
                s.mean_error,
                s.sd_error,
                stat
            ));
        }
        out
    }
}

/// Oracle bandwidth: minimize the operator-norm distance to the truth over
/// `B = 1..T-1`; ties go to the smaller bandwidth. Returns
/// `(bandwidth, achieved error)`.
pub fn oracle_bandwidth(
    x: &TimeSeries,
    truth: &SymmetricToeplitz,
    taper: &Taper,
) -> Result<(usize, f64)> {
    let t = truth.dimension();
    if x.len() != t {
        return Err(Error::DimensionMismatch {
            expected: t,
            actual: x.len(),
        });
    }
    let gammas = x.sample_acov(t - 1)?;
    let mut best: Option<(usize, f64)> = None;
    for b in 1..t {
        let column = tapered_first_column(gammas.values(), taper, b)?;
        let error = difference_norm(&column, truth)?;
        if best.is_none_or(|(_, e)| error < e) {
            best = Some((b, error));
        }
    }
    Ok(best.expect("t >= 2 guarantees at least one candidate"))
}

/// Oracle hard threshold: minimize the distance to the truth over the
/// candidate set `{ |gamma_hat_k| : 0 <= k <= T-1 }`; ties go to the larger
/// (sparser) threshold. Returns `(threshold, achieved error)`.
pub fn oracle_threshold(x: &TimeSeries, truth: &SymmetricToeplitz) -> Result<(f64, f64)> {
    let t = truth.dimension();
    if x.len() != t {
        return Err(Error::DimensionMismatch {
            expected: t,
            actual: x.len(),
        });
    }
    let gammas = x.sample_acov(t - 1)?;
    let (threshold, error, _) = oracle_threshold_on(gammas.values(), truth)?;
    Ok((threshold, error))
}

/// Shared threshold search; also returns the retained-lag count of the
/// winning estimate.
fn oracle_threshold_on(gammas: &[f64], truth: &SymmetricToeplitz) -> Result<(f64, f64, usize)> {
    let mut candidates: Vec<f64> = gammas.iter().map(|g| g.abs()).collect();
    candidates.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
    candidates.dedup();
    let mut best: Option<(f64, f64, usize)> = None;
    for &a in &candidates {
        let column = thresholded_first_column(gammas, a)?;
        let error = difference_norm(&column, truth)?;
        if best.is_none_or(|(_, e, _)| error < e) {
            let nnz = column.iter().filter(|&&v| v != 0.0).count();
            best = Some((a, error, nnz));
        }
    }
    Ok(best.expect("candidate set is nonempty"))
}

fn difference_norm(column: &[f64], truth: &SymmetricToeplitz) -> Result<f64> {
    let diff: Vec<f64> = column
        .iter()
        .zip(truth.first_column())
        .map(|(a, b)| a - b)
        .collect();
    Ok(SymmetricToeplitz::new(diff)?.operator_norm(NORM_TOL)?.value)
}

struct ReplicateOutcome {
    error: f64,
    stat: Option<f64>,
}

fn run_replicate(
    x: &TimeSeries,
    truth: &SymmetricToeplitz,
    taper: &Taper,
    kind: EstimatorKind,
) -> Result<ReplicateOutcome> {
    match kind {
        EstimatorKind::Banded => {
            let (bandwidth, error) = oracle_bandwidth(x, truth, taper)?;
            Ok(ReplicateOutcome {
                error,
                stat: Some((bandwidth + 1) as f64),
            })
        }
        EstimatorKind::Thresholded => {
            let gammas = x.sample_acov(truth.dimension() - 1)?;
            let (_, error, nnz) = oracle_threshold_on(gammas.values(), truth)?;
            Ok(ReplicateOutcome {
                error,
                stat: Some(nnz as f64),
            })
        }
        EstimatorKind::PlugIn => {
            let gammas = x.sample_acov(truth.dimension() - 1)?;
            let error = difference_norm(gammas.values(), truth)?;
            Ok(ReplicateOutcome { error, stat: None })
        }
        EstimatorKind::ThresholdAfterBanding => {
            let (bandwidth, _) = oracle_bandwidth(x, truth, taper)?;
            let gammas = x.sample_acov(truth.dimension() - 1)?;
            let tapered = tapered_first_column(gammas.values(), taper, bandwidth)?;
            let (_, error, nnz) = oracle_threshold_on(&tapered, truth)?;
            Ok(ReplicateOutcome {
                error,
                stat: Some(nnz as f64),
            })
        }
    }
}

/// Run one Monte Carlo table cell: simulate `replications` series, score
/// every configured estimator against the exact truth matrix, and aggregate
/// means and population SDs of the errors and of the bandwidth / retained
/// lag counts.
pub fn run_table_cell(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let t = config.len;
    let truth = SymmetricToeplitz::new(config.model.autocovariances(t - 1).values().to_vec())?;
    let simulator = config.model.simulator(t)?;

    let per_replicate: Vec<Vec<ReplicateOutcome>> = (0..config.replications)
        .into_par_iter()
        .map(|r| {
            let mut x = simulator.run(replicate_seed(config.seed, r as u64));
            if config.center {
                let mean = x.values().iter().sum::<f64>() / t as f64;
                let centered = x.values().iter().map(|v| v - mean).collect();
                x = TimeSeries::zero_mean(centered).expect("centered series stays valid");
            }
            config
                .estimators
                .iter()
                .map(|&kind| run_replicate(&x, &truth, &config.taper, kind))
                .collect::<Result<Vec<_>>>()
                .map_err(|e| Error::Replicate {
                    index: r,
                    source: Box::new(e),
                })
        })
        .collect::<Result<Vec<_>>>()?;

    let summaries = config
        .estimators
        .iter()
        .enumerate()
        .map(|(j, &estimator)| {
            let errors: Vec<f64> = per_replicate.iter().map(|row| row[j].error).collect();
            let stats: Option<Vec<f64>> = per_replicate.iter().map(|row| row[j].stat).collect();
            let (mean_error, sd_error) = mean_sd(&errors);
            let (mean_stat, sd_stat) = match stats {
                Some(values) => {
                    let (m, s) = mean_sd(&values);
                    (Some(m), Some(s))
                }
                None => (None, None),
            };
            EstimatorSummary {
                estimator,
                mean_error,
                sd_error,
                mean_bandwidth_or_nnz: mean_stat,
                sd_bandwidth_or_nnz: sd_stat,
            }
        })
        .collect();

    Ok(ExperimentReport {
        replications: config.replications,
        summaries,
    })
}

fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// One row of the plug-in inconsistency check at sample size `len`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BracketCheckRow {
    pub len: usize,
    /// Bracket `[pi f_min^2 log T / (12 Theta_2^2), 10 Theta_2^2 log T]`.
    pub lower: f64,
    pub upper: f64,
    /// Fraction of replicates with `lambda(plug-in)` inside the bracket.
    pub containment_frequency: f64,
    pub median_norm: f64,
    pub mean_norm_over_log_t: f64,
    pub sd_norm_over_log_t: f64,
}

/// Empirically check the order-of-magnitude bracket for the operator norm of
/// the raw plug-in estimate: over `replications` simulations at each sample
/// size, report how often `lambda(plug-in matrix)` lands inside
/// `[pi f_min^2 log T / (12 Theta_2^2), 10 Theta_2^2 log T]`.
///
/// Requires a model whose spectral density is certifiably bounded away from
/// zero.
pub fn inconsistency_bracket_check(
    model: &LinearProcessModel,
    t_grid: &[usize],
    replications: usize,
    seed: u64,
) -> Result<Vec<BracketCheckRow>> {
    if t_grid.is_empty() || replications == 0 {
        return Err(Error::invalid("need a nonempty grid and replications"));
    }
    let horizon = model.truncation_lag();
    let symbol = SpectralFunction::from_autocovariances(model.autocovariances(horizon).values())?;
    let bracket = symbol_eigenvalue_bounds(&symbol);
    let certified_min = bracket
        .certified
        .map(|(lo, _)| lo / (2.0 * PI))
        .unwrap_or(f64::NEG_INFINITY);
    if certified_min <= 0.0 {
        return Err(Error::invalid(format!(
            "spectral density is not certifiably positive (certified min {certified_min:.3e})"
        )));
    }
    let f_min = bracket.lower / (2.0 * PI);
    let theta2 = model.theta2();

    let mut rows = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        if t < 4 {
            return Err(Error::invalid("grid sample sizes must be at least 4"));
        }
        let simulator = model.simulator(t)?;
        let norms: Vec<f64> = (0..replications)
            .into_par_iter()
            .map(|r| -> Result<f64> {
                let x = simulator.run(replicate_seed(seed, r as u64));
                let wrap = |e: Error| Error::Replicate {
                    index: r,
                    source: Box::new(e),
                };
                let gammas = x.sample_acov(t - 1).map_err(wrap)?;
                let norm = SymmetricToeplitz::new(gammas.values().to_vec())
                    .and_then(|m| m.operator_norm(BRACKET_NORM_TOL))
                    .map_err(wrap)?;
                Ok(norm.value)
            })
            .collect::<Result<Vec<f64>>>()?;

        let log_t = (t as f64).ln();
        let lower = PI * f_min * f_min * log_t / (12.0 * theta2 * theta2);
        let upper = 10.0 * theta2 * theta2 * log_t;
        let inside = norms.iter().filter(|&&v| v >= lower && v <= upper).count() as f64
            / replications as f64;
        let scaled: Vec<f64> = norms.iter().map(|v| v / log_t).collect();
        let (mean_scaled, sd_scaled) = mean_sd(&scaled);
        let mut sortable = norms;
        rows.push(BracketCheckRow {
            len: t,
            lower,
            upper,
            containment_frequency: inside,
            median_norm: median(&mut sortable),
            mean_norm_over_log_t: mean_scaled,
            sd_norm_over_log_t: sd_scaled,
        });
    }
    Ok(rows)
}

/// Which theoretically-tuned estimator a rate check drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RateEstimator {
    /// Banded (rectangular) estimate with `B_T = round((T / log T)^{1/(2a+1)})`.
    BandedTheoretical,
    /// Hard threshold `A_T = 2 c_p' sqrt(log T / T)` at `p = 8`.
    ThresholdedTheoretical,
}

/// Fitted versus theoretical convergence-rate exponents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateCheckResult {
    /// `(T, mean operator-norm error)` per grid point.
    pub grid: Vec<(usize, f64)>,
    /// Least-squares slope of `log mean-error` against `log(log T / T)`.
    pub fitted_slope: f64,
    pub theoretical_slope: f64,
}

/// Fit the empirical convergence rate of a theoretically-tuned estimator on
/// a grid of sample sizes. `decay` is the polynomial decay exponent `alpha`
/// of the model's dependence tail sums.
pub fn rate_check(
    model: &LinearProcessModel,
    estimator: RateEstimator,
    decay: f64,
    t_grid: &[usize],
    replications: usize,
    seed: u64,
) -> Result<RateCheckResult> {
    if t_grid.len() < 3 {
        return Err(Error::invalid("rate grid needs at least 3 sample sizes"));
    }
    if !t_grid.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::invalid("rate grid must be strictly increasing"));
    }
    if !(decay > 0.0) {
        return Err(Error::invalid("decay exponent must be positive"));
    }
    if replications == 0 {
        return Err(Error::invalid("need at least one replication"));
    }

    let mut grid = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        if t < 8 {
            return Err(Error::invalid("grid sample sizes must be at least 8"));
        }
        let truth = model.autocovariances(t - 1);
        let truth_col = truth.values();
        let simulator = model.simulator(t)?;
        let log_t = (t as f64).ln();

        let errors: Vec<f64> = (0..replications)
            .into_par_iter()
            .map(|r| -> Result<f64> {
                let x = simulator.run(replicate_seed(seed, r as u64));
                let wrap = |e: Error| Error::Replicate {
                    index: r,
                    source: Box::new(e),
                };
                let column = match estimator {
                    RateEstimator::BandedTheoretical => {
                        let b = (t as f64 / log_t)
                            .powf(1.0 / (2.0 * decay + 1.0))
                            .round()
                            .clamp(1.0, (t - 1) as f64) as usize;
                        let gammas = x.sample_acov(b).map_err(wrap)?;
                        let mut padded = gammas.values().to_vec();
                        padded.resize(t, 0.0);
                        tapered_first_column(&padded, &Taper::rectangular(), b).map_err(wrap)?
                    }
                    RateEstimator::ThresholdedTheoretical => {
                        let a = model.theoretical_threshold(t, 8.0).map_err(wrap)?;
                        let gammas = x.sample_acov(t - 1).map_err(wrap)?;
                        thresholded_first_column(gammas.values(), a).map_err(wrap)?
                    }
                };
                let diff: Vec<f64> = column.iter().zip(truth_col).map(|(a, b)| a - b).collect();
                SymmetricToeplitz::new(diff)
                    .and_then(|m| m.operator_norm(RATE_NORM_TOL))
                    .map(|n| n.value)
                    .map_err(wrap)
            })
            .collect::<Result<Vec<f64>>>()?;
        let (mean, _) = mean_sd(&errors);
        grid.push((t, mean));
    }

    let xs: Vec<f64> = grid
        .iter()
        .map(|&(t, _)| ((t as f64).ln() / t as f64).ln())
        .collect();
    let ys: Vec<f64> = grid.iter().map(|&(_, e)| e.ln()).collect();
    let fitted_slope = least_squares_slope(&xs, &ys);
    let theoretical_slope = match estimator {
        RateEstimator::BandedTheoretical => decay / (2.0 * decay + 1.0),
        RateEstimator::ThresholdedTheoretical => decay / (2.0 * (1.0 + decay)),
    };
    Ok(RateCheckResult {
        grid,
        fitted_slope,
        theoretical_slope,
    })
}

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let cov: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    cov / var
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::plug_in_matrix;
    use crate::process::ModelPreset;

    fn white_noise() -> LinearProcessModel {
        ModelPreset::WhiteNoise.linear_model().unwrap()
    }

    #[test]
    fn oracle_bandwidth_zero_error_at_full_band() {
        // Truth equal to the plug-in estimate of x itself: the search must
        // return the smallest bandwidth achieving zero error, here T-1.
        let x = white_noise().simulate(24, 3).unwrap();
        let truth = plug_in_matrix(&x).unwrap();
        let (b, err) = oracle_bandwidth(&x, &truth, &Taper::rectangular()).unwrap();
        assert_eq!(b, 23);
        assert!(err <= 1e-12, "error {err}");
    }

    #[test]
    fn oracle_threshold_can_return_plug_in() {
        let x = white_noise().simulate(16, 5).unwrap();
        let truth = plug_in_matrix(&x).unwrap();
        let (threshold, err) = oracle_threshold(&x, &truth).unwrap();
        // The minimal candidate keeps every lag, reproducing the plug-in
        // matrix exactly; no other candidate can beat zero error.
        let gammas = x.sample_acov(15).unwrap();
        let min_abs = gammas
            .values()
            .iter()
            .map(|g| g.abs())
            .fold(f64::INFINITY, f64::min);
        assert_eq!(threshold, min_abs);
        assert!(err <= 1e-12);
    }

    #[test]
    fn report_with_one_replicate_has_zero_sd() {
        let config = ExperimentConfig {
            model: white_noise(),
            len: 32,
            replications: 1,
            seed: 11,
            estimators: vec![
                EstimatorKind::Banded,
                EstimatorKind::Thresholded,
                EstimatorKind::PlugIn,
            ],
            taper: Taper::rectangular(),
            center: false,
        };
        let report = run_table_cell(&config).unwrap();
        for s in &report.summaries {
            assert_eq!(s.sd_error, 0.0);
            assert!(s.mean_error >= 0.0);
            if let Some(sd) = s.sd_bandwidth_or_nnz {
                assert_eq!(sd, 0.0);
            }
        }
        assert!(report.summary(EstimatorKind::PlugIn).is_some());
    }

    #[test]
    fn reports_are_reproducible() {
        let config = ExperimentConfig {
            model: ModelPreset::Ma {
                coefficients: vec![0.5],
            }
            .linear_model()
            .unwrap(),
            len: 24,
            replications: 8,
            seed: 99,
            estimators: vec![EstimatorKind::Banded, EstimatorKind::ThresholdAfterBanding],
            taper: Taper::rectangular(),
            center: true,
        };
        let a = run_table_cell(&config).unwrap();
        let b = run_table_cell(&config).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn bracket_endpoints_ordered_for_valid_models() {
        for preset in [
            ModelPreset::WhiteNoise,
            ModelPreset::Ar1 { phi: 0.5 },
            ModelPreset::Ma {
                coefficients: vec![0.5],
            },
        ] {
            let model = preset.linear_model().unwrap();
            let rows = inconsistency_bracket_check(&model, &[64], 2, 7).unwrap();
            assert!(rows[0].lower > 0.0);
            assert!(rows[0].lower < rows[0].upper, "{preset}");
        }
    }

    #[test]
    fn rate_check_validates_grid() {
        let model = white_noise();
        let err = rate_check(
            &model,
            RateEstimator::BandedTheoretical,
            1.0,
            &[100, 200],
            2,
            1,
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidParameter(_)));

        let err = rate_check(
            &model,
            RateEstimator::BandedTheoretical,
            1.0,
            &[100, 200, 150],
            2,
            1,
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidParameter(_)));
    }

    #[test]
    fn rate_check_reports_theoretical_slopes() {
        let model = ModelPreset::XProcess { c: 0.5, alpha: 1.0 }
            .linear_model()
            .unwrap();
        let banded = rate_check(
            &model,
            RateEstimator::BandedTheoretical,
            1.0,
            &[64, 128, 256],
            4,
            5,
        )
        .unwrap();
        assert!((banded.theoretical_slope - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(banded.grid.len(), 3);
        assert!(banded.grid.windows(2).all(|w| w[0].0 < w[1].0));

        let thresholded = rate_check(
            &model,
            RateEstimator::ThresholdedTheoretical,
            1.0,
            &[64, 128, 256],
            2,
            5,
        )
        .unwrap();
        assert!((thresholded.theoretical_slope - 0.25).abs() < 1e-12);
    }

    #[test]
    fn rate_check_white_noise_errors_shrink() {
        let model = white_noise();
        let result = rate_check(
            &model,
            RateEstimator::BandedTheoretical,
            1.0,
            &[128, 256, 512],
            10,
            2,
        )
        .unwrap();
        assert!(result.grid.windows(2).all(|w| w[1].1 < w[0].1));
        assert!(result.fitted_slope > 0.0);
    }

    #[test]
    fn replicate_seeds_are_spread() {
        let a = replicate_seed(42, 0);
        let b = replicate_seed(42, 1);
        let c = replicate_seed(43, 0);
        assert_ne!(a, b);
        assert_ne!(a, c);
    }
}
