//! Monte Carlo driver for the record process.
//!
//! Two clocks are supported: observation time (process exactly n uniform
//! observations) and record time (run until the m-th record is set). Record
//! time is simulated on the embedded record chain: non-record observations
//! change no state, so given the current staircase with record-setting region
//! of area λ, the next record lands uniformly in that region and the number
//! of observations consumed is Geometric(λ). This is exact in law and is the
//! only practical route — the expected observation count to reach m records
//! grows like exp(√(2m)). The literal observation-by-observation loop is kept
//! as an alternative strategy with an observation budget, both as a debugging
//! path and as the oracle for the time-change consistency tests.
//!
//! Determinism contract: every trial draws from its own stream seeded by a
//! stable mix of (master_seed, trial index), trials are processed in
//! fixed-size chunks, and chunk results are merged in chunk order with
//! integer accumulators — so any thread count produces bit-identical output.

mod chain;
mod compare;
mod drive;
mod gof;
mod moments;
mod rng;
mod runner;

use serde::Serialize;
use thiserror::Error;

use crate::exact::ExactError;

pub use compare::{empirical_vs_exact, ComparisonReport, ComparisonRow};
pub use drive::{
    observation_trial_with_seed, record_trial_with_seed, run_by_observations, run_by_records,
    write_observation_trace, SingleRecordRun,
};
pub use gof::{gof_geometric, GofBin, GofReport};
pub use moments::{estimate_moments, MomentEstimate, MomentReport, ReferenceValues, Z_99};
pub use rng::{mix_seed, open_unit, trial_rng};
pub use runner::ExecPlan;

/// Tally cutoff: kill counts above this go to one overflow bin.
pub const DEFAULT_K_MAX: usize = 32;
/// Upper limit on records per trial in record-time mode. A guard against
/// accidental non-termination, not a precision promise; see [`run_by_records`].
pub const DEFAULT_RECORD_CAP: u64 = 1_000_000;
/// Default per-trial observation budget for the literal record-time strategy.
pub const DEFAULT_OBSERVATION_BUDGET: u64 = 100_000_000;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
    #[error("requested {requested} records per trial exceeds the cap of {cap}")]
    RecordCapExceeded { requested: u64, cap: u64 },
    #[error(
        "observation budget exhausted in trial {trial}: {records_completed} records after {observations_used} observations"
    )]
    BudgetExhausted {
        trial: u64,
        records_completed: u64,
        observations_used: u64,
        /// Counts gathered before the abort (completed trials plus the
        /// partial trial; record times only for completed trials).
        partial: Box<RecordTimeTally>,
    },
    #[error(
        "record-setting area underflowed to zero after {records_completed} records; \
         coordinates shrink like exp(-sqrt(2m)) and leave f64 range near m ≈ 2.7e5"
    )]
    PrecisionExhausted { records_completed: u64 },
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("could not set up worker threads: {0}")]
    ExecutionSetup(String),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// Which clock a simulation runs on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Run each trial until this many records have been set.
    ByRecords { records: u64 },
    /// Run each trial for exactly this many observations.
    ByObservations { observations: u64 },
}

/// Strategy for record-time runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecordStrategy {
    /// Simulate the embedded record chain directly (exact in law, fast).
    Direct { max_records: u64 },
    /// Generate every observation literally. Only viable for small record
    /// targets; aborts with [`SimError::BudgetExhausted`] when a trial
    /// consumes more than `observation_budget` observations. Always runs
    /// single-threaded.
    ViaObservations { observation_budget: u64 },
}

impl Default for RecordStrategy {
    fn default() -> Self {
        RecordStrategy::Direct {
            max_records: DEFAULT_RECORD_CAP,
        }
    }
}

/// Complete description of a simulation campaign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TrialConfig {
    pub mode: Mode,
    pub master_seed: u64,
    pub trials: u64,
    pub k_max: usize,
}

impl TrialConfig {
    pub fn by_records(records: u64, master_seed: u64, trials: u64, k_max: usize) -> Self {
        Self {
            mode: Mode::ByRecords { records },
            master_seed,
            trials,
            k_max,
        }
    }

    pub fn by_observations(observations: u64, master_seed: u64, trials: u64, k_max: usize) -> Self {
        Self {
            mode: Mode::ByObservations { observations },
            master_seed,
            trials,
            k_max,
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if self.trials == 0 {
            return Err(SimError::InvalidConfig("trials must be at least 1".into()));
        }
        match self.mode {
            Mode::ByRecords { records } if records == 0 => Err(SimError::InvalidConfig(
                "records per trial must be at least 1".into(),
            )),
            Mode::ByObservations { observations } if observations == 0 => Err(
                SimError::InvalidConfig("observations per trial must be at least 1".into()),
            ),
            _ => Ok(()),
        }
    }
}

/// Index of the tally bin for a kill count: k itself, or the overflow bin.
pub(crate) fn kill_bin(killed: u64, k_max: usize) -> usize {
    if killed > k_max as u64 {
        k_max + 1
    } else {
        killed as usize
    }
}

/// Aggregated record-time results: how many records killed exactly k, plus
/// the observation time at which each trial set its last record.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecordTimeTally {
    pub records_per_trial: u64,
    pub trials: u64,
    pub k_max: usize,
    /// counts[k] for k = 0..=k_max, then one overflow bin.
    pub counts: Vec<u64>,
    /// Observation time of the final record, one entry per completed trial,
    /// in trial order. Exact while below 2^53; thereafter a faithful f64.
    pub record_times: Vec<f64>,
}

impl RecordTimeTally {
    pub(crate) fn empty(records_per_trial: u64, k_max: usize) -> Self {
        Self {
            records_per_trial,
            trials: 0,
            k_max,
            counts: vec![0; k_max + 2],
            record_times: Vec::new(),
        }
    }

    /// Total records across all trials (including the overflow bin).
    pub fn total_records(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Empirical record-time frequency of bin `k`.
    pub fn p_tilde(&self, bin: usize) -> f64 {
        self.counts[bin] as f64 / self.total_records() as f64
    }

    pub(crate) fn merge(&mut self, other: &RecordTimeTally) {
        debug_assert_eq!(self.k_max, other.k_max);
        self.trials += other.trials;
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.record_times.extend_from_slice(&other.record_times);
    }
}

/// Everything counted over one observation-time trial.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ObservationTally {
    pub n: u64,
    /// Records set (any type).
    pub records: u64,
    /// Remaining records at the end (staircase size).
    pub remaining: u64,
    /// Total records killed over the whole trial.
    pub killed_total: u64,
    /// Records that killed exactly k, k = 0..=k_max plus overflow.
    pub by_kills: Vec<u64>,
    /// Exclusive split of `by_kills` by record type: a record is interior,
    /// a new minimum in x only, in y only, or in both.
    pub interior: Vec<u64>,
    pub first_only: Vec<u64>,
    pub second_only: Vec<u64>,
    pub both: Vec<u64>,
    /// All records that set a new x minimum (first_only plus both): the
    /// one-dimensional record count of the x sequence, mean H_n.
    pub first_coord_records: u64,
    /// All records that set new minima in both coordinates, mean H_n^(2).
    pub both_coord_records: u64,
}

impl ObservationTally {
    pub(crate) fn empty(n: u64, k_max: usize) -> Self {
        let bins = k_max + 2;
        Self {
            n,
            records: 0,
            remaining: 0,
            killed_total: 0,
            by_kills: vec![0; bins],
            interior: vec![0; bins],
            first_only: vec![0; bins],
            second_only: vec![0; bins],
            both: vec![0; bins],
            first_coord_records: 0,
            both_coord_records: 0,
        }
    }

    pub fn k_max(&self) -> usize {
        self.by_kills.len() - 2
    }

    /// Per-trial bookkeeping identities; used by tests and debug assertions.
    pub fn conserved(&self) -> bool {
        let sum: u64 = self.by_kills.iter().sum();
        let split_ok = (0..self.by_kills.len()).all(|b| {
            self.by_kills[b]
                == self.interior[b] + self.first_only[b] + self.second_only[b] + self.both[b]
        });
        sum == self.records
            && split_ok
            && self.records == self.remaining + self.killed_total
            && self.first_coord_records
                == self.first_only.iter().sum::<u64>() + self.both.iter().sum::<u64>()
    }

    pub(crate) fn merge(&mut self, other: &ObservationTally) {
        debug_assert_eq!(self.n, other.n);
        self.records += other.records;
        self.remaining += other.remaining;
        self.killed_total += other.killed_total;
        for (a, b) in self.by_kills.iter_mut().zip(&other.by_kills) {
            *a += b;
        }
        for (a, b) in self.interior.iter_mut().zip(&other.interior) {
            *a += b;
        }
        for (a, b) in self.first_only.iter_mut().zip(&other.first_only) {
            *a += b;
        }
        for (a, b) in self.second_only.iter_mut().zip(&other.second_only) {
            *a += b;
        }
        for (a, b) in self.both.iter_mut().zip(&other.both) {
            *a += b;
        }
        self.first_coord_records += other.first_coord_records;
        self.both_coord_records += other.both_coord_records;
    }
}

/// Observation-time results summed across trials.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ObservationAggregate {
    pub observations_per_trial: u64,
    pub trials: u64,
    pub master_seed: u64,
    pub k_max: usize,
    /// Field-wise sums of the per-trial tallies.
    pub totals: ObservationTally,
}
