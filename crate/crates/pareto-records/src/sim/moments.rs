//! Sample moments of observation-time record statistics.
//!
//! Per-trial quantities are small integer counts, so sums, squares, and
//! cross-products accumulate exactly in 128-bit integers; floating point
//! enters only when the final mean/covariance quotients are taken. Reference
//! means and (where known) variances come from the exact engine for modest n,
//! and from float summation of the same formulas beyond that.

use serde::Serialize;

use super::rng::{mix_seed, trial_rng};
use super::runner::{run_chunked, ExecPlan};
use super::{Mode, ObservationTally, SimError, TrialConfig};
use crate::exact::{cumulative_h_over_i_f64, harmonic_f64, ExactEngine};
use crate::frontier::Staircase;
use crate::rational::ratio_to_f64;

/// Two-sided 99% standard-normal quantile.
pub const Z_99: f64 = 2.575_829_303_548_900_4;

/// Largest n for which reference values are computed with exact rational
/// arithmetic; larger n falls back to compensated float summation. This keeps
/// harmonic-table growth bounded — the table costs O(n) big-rational updates.
const EXACT_REFERENCE_LIMIT: u64 = 2_000;

const FIXED_NAMES: [&str; 6] = [
    "records_set",
    "remaining_records",
    "kills_total",
    "first_coord_records",
    "both_coord_records",
    "both_coords_zero_kills",
];

/// Known theoretical values for one estimated quantity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReferenceValues {
    /// Theoretical mean. Exact (up to f64 rounding) when `mean_error_cap`
    /// is None; otherwise an approximation off by at most the cap.
    pub mean: f64,
    pub mean_error_cap: Option<f64>,
    /// Theoretical variance where a closed form is known.
    pub variance: Option<f64>,
}

/// Sample moments for one quantity, with a 99% confidence interval for the
/// mean and the reference values it should straddle.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentEstimate {
    pub name: String,
    pub mean: f64,
    /// Unbiased sample variance.
    pub variance: f64,
    /// Standard error of the mean: sqrt(variance / trials).
    pub std_error: f64,
    pub ci99_low: f64,
    pub ci99_high: f64,
    pub reference: Option<ReferenceValues>,
}

/// Full moment report for an observation-time campaign.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentReport {
    pub observations_per_trial: u64,
    pub trials: u64,
    pub master_seed: u64,
    pub k_max: usize,
    /// Fixed quantities first (see `FIXED_NAMES` order), then one per kill
    /// bin k = 0..=k_max, then the overflow bin.
    pub estimates: Vec<MomentEstimate>,
    /// Sample covariance matrix of the kill bins (k = 0..=k_max, overflow),
    /// row-major, symmetric, with the bin variances on the diagonal.
    pub bin_covariance: Vec<Vec<f64>>,
}

/// Exact integer moment accumulator over a fixed quantity layout.
#[derive(Debug, Clone)]
struct MomentAcc {
    dims: usize,
    trials: u64,
    sum: Vec<i128>,
    /// Upper triangle (including diagonal) of Σ v·vᵀ, row-major.
    cross: Vec<i128>,
}

impl MomentAcc {
    fn new(dims: usize) -> Self {
        Self {
            dims,
            trials: 0,
            sum: vec![0; dims],
            cross: vec![0; dims * (dims + 1) / 2],
        }
    }

    fn push(&mut self, values: &[u64]) {
        debug_assert_eq!(values.len(), self.dims);
        self.trials += 1;
        let mut idx = 0;
        for i in 0..self.dims {
            let vi = values[i] as i128;
            self.sum[i] += vi;
            for j in i..self.dims {
                self.cross[idx] += vi * values[j] as i128;
                idx += 1;
            }
        }
    }

    fn merge(&mut self, other: &MomentAcc) {
        debug_assert_eq!(self.dims, other.dims);
        self.trials += other.trials;
        for (a, b) in self.sum.iter_mut().zip(&other.sum) {
            *a += b;
        }
        for (a, b) in self.cross.iter_mut().zip(&other.cross) {
            *a += b;
        }
    }

    fn cross_index(&self, i: usize, j: usize) -> usize {
        let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
        // Row lo starts after the rows above it: Σ_{r<lo} (dims − r).
        lo * self.dims - lo * (lo + 1) / 2 + lo + (hi - lo)
    }

    fn mean(&self, i: usize) -> f64 {
        self.sum[i] as f64 / self.trials as f64
    }

    /// Unbiased sample covariance, numerator formed exactly in integers:
    /// (T·Σxy − Σx·Σy) / (T·(T−1)).
    fn covariance(&self, i: usize, j: usize) -> f64 {
        let t = self.trials as i128;
        let numerator = t * self.cross[self.cross_index(i, j)] - self.sum[i] * self.sum[j];
        numerator as f64 / (self.trials as f64 * (self.trials - 1) as f64)
    }

    fn variance(&self, i: usize) -> f64 {
        self.covariance(i, i)
    }
}

fn quantities(tally: &ObservationTally, out: &mut Vec<u64>) {
    out.clear();
    out.push(tally.records);
    out.push(tally.remaining);
    out.push(tally.killed_total);
    out.push(tally.first_coord_records);
    out.push(tally.both_coord_records);
    out.push(tally.both[0]);
    out.extend_from_slice(&tally.by_kills);
}

/// Reference mean/variance per quantity. h1/h2/h4 are H_n of orders 1, 2, 4;
/// c2 is Σ_{i≤n} H_i/i. `rho_hat(k)` is the approximate expected
/// count of records killing exactly k, with its uniform error cap.
struct References {
    h1: f64,
    h2: f64,
    h4: f64,
    c2: f64,
}

impl References {
    fn build(n: u64) -> Result<Self, SimError> {
        if n <= EXACT_REFERENCE_LIMIT {
            let engine = ExactEngine::new();
            Ok(Self {
                h1: ratio_to_f64(&engine.harmonic(n, 1)?),
                h2: ratio_to_f64(&engine.harmonic(n, 2)?),
                h4: ratio_to_f64(&engine.harmonic(n, 4)?),
                c2: ratio_to_f64(&engine.roman_harmonic2(n)?),
            })
        } else {
            Ok(Self {
                h1: harmonic_f64(n, 1),
                h2: harmonic_f64(n, 2),
                h4: harmonic_f64(n, 4),
                c2: cumulative_h_over_i_f64(n),
            })
        }
    }

    fn rho_hat(&self, k: u64) -> (f64, f64) {
        let value = self.c2 / 2f64.powi(k as i32 + 1)
            - (k as f64 - 1.0) * self.h1 / 2f64.powi(k as i32 + 2);
        (value, self.h2 / 2.0)
    }

    fn for_quantity(&self, index: usize, k_max: usize) -> Option<ReferenceValues> {
        let exactish = |mean: f64, variance: Option<f64>| {
            Some(ReferenceValues {
                mean,
                mean_error_cap: None,
                variance,
            })
        };
        match index {
            0 => exactish(self.c2, None),
            1 => exactish(self.h1, Some(self.h1 - self.h2)),
            2 => exactish(self.c2 - self.h1, None),
            3 => exactish(self.h1, Some(self.h1 - self.h2)),
            4 => exactish(self.h2, Some(self.h2 - self.h4)),
            5 => exactish(1.0, Some(0.0)),
            _ => {
                let k = index - FIXED_NAMES.len();
                if k > k_max {
                    return None; // overflow bin: no closed form
                }
                let (mean, cap) = self.rho_hat(k as u64);
                Some(ReferenceValues {
                    mean,
                    mean_error_cap: Some(cap),
                    variance: None,
                })
            }
        }
    }
}

/// Run an observation-time campaign and estimate means, variances, and the
/// kill-bin covariance matrix from per-trial counts. Requires at least two
/// trials. Deterministic for a fixed config across thread counts.
pub fn estimate_moments(config: &TrialConfig, plan: ExecPlan) -> Result<MomentReport, SimError> {
    config.validate()?;
    let n = match config.mode {
        Mode::ByObservations { observations } => observations,
        Mode::ByRecords { .. } => {
            return Err(SimError::InvalidConfig(
                "moment estimation runs in observation-time mode".into(),
            ))
        }
    };
    if config.trials < 2 {
        return Err(SimError::InvalidConfig(
            "variance estimation requires at least 2 trials".into(),
        ));
    }
    let bins = config.k_max + 2;
    let dims = FIXED_NAMES.len() + bins;

    let partials = run_chunked(config.trials, plan, |range| {
        let mut acc = MomentAcc::new(dims);
        let mut staircase = Staircase::new();
        let mut values = Vec::with_capacity(dims);
        for trial in range {
            let mut rng = trial_rng(mix_seed(config.master_seed, trial));
            let tally = super::drive::observation_trial(n, config.k_max, &mut rng, &mut staircase);
            quantities(&tally, &mut values);
            acc.push(&values);
        }
        Ok(acc)
    })?;
    let mut acc = MomentAcc::new(dims);
    for partial in &partials {
        acc.merge(partial);
    }
    debug_assert_eq!(acc.trials, config.trials);

    let references = References::build(n)?;
    let name_of = |i: usize| -> String {
        if i < FIXED_NAMES.len() {
            FIXED_NAMES[i].to_string()
        } else {
            let k = i - FIXED_NAMES.len();
            if k > config.k_max {
                "kills_overflow".to_string()
            } else {
                format!("kills_{k}")
            }
        }
    };

    let estimates = (0..dims)
        .map(|i| {
            let mean = acc.mean(i);
            let variance = acc.variance(i);
            let std_error = (variance / acc.trials as f64).sqrt();
            MomentEstimate {
                name: name_of(i),
                mean,
                variance,
                std_error,
                ci99_low: mean - Z_99 * std_error,
                ci99_high: mean + Z_99 * std_error,
                reference: references.for_quantity(i, config.k_max),
            }
        })
        .collect();

    let offset = FIXED_NAMES.len();
    let bin_covariance = (0..bins)
        .map(|i| {
            (0..bins)
                .map(|j| acc.covariance(offset + i, offset + j))
                .collect()
        })
        .collect();

    Ok(MomentReport {
        observations_per_trial: n,
        trials: config.trials,
        master_seed: config.master_seed,
        k_max: config.k_max,
        estimates,
        bin_covariance,
    })
}
