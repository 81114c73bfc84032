//! Side-by-side comparison of the simulated law of the n-th observation's
//! kill count against the exact distribution.
//!
//! Each trial draws n observations and classifies only the final one: not a
//! record (k = −1), or a record killing exactly k, with the
//! dominates-everything corner tracked separately (its total probability is
//! exactly n^(−2), and its per-k split is the C component of the pmf). Every
//! row carries the exact probability, the binomial standard error under the
//! null, and the resulting z-score.

use serde::Serialize;

use super::rng::{mix_seed, sample_point, trial_rng};
use super::runner::{run_chunked, ExecPlan};
use super::{kill_bin, Mode, SimError, TrialConfig};
use crate::exact::ExactEngine;
use crate::frontier::{RecordType, Staircase};
use crate::rational::ratio_to_f64;
use num_rational::BigRational;
use num_traits::Zero;

/// One compared event.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub label: String,
    pub observed: u64,
    pub empirical: f64,
    /// Exact probability, rounded to f64.
    pub exact: f64,
    /// Binomial standard error under the exact null: sqrt(p(1−p)/trials).
    pub std_error: f64,
    /// (empirical − exact) / std_error; 0 when the null is degenerate and
    /// matched, infinite when an impossible event was observed.
    pub z: f64,
}

/// Comparison of the simulated final-observation law with exact values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub n: u64,
    pub trials: u64,
    pub master_seed: u64,
    pub k_max: usize,
    pub rows: Vec<ComparisonRow>,
    pub max_abs_z: f64,
}

#[derive(Debug, Clone)]
struct FinalTally {
    no_record: u64,
    by_kills: Vec<u64>,
    kill_all: Vec<u64>,
}

impl FinalTally {
    fn empty(k_max: usize) -> Self {
        Self {
            no_record: 0,
            by_kills: vec![0; k_max + 2],
            kill_all: vec![0; k_max + 2],
        }
    }

    fn merge(&mut self, other: &FinalTally) {
        self.no_record += other.no_record;
        for (a, b) in self.by_kills.iter_mut().zip(&other.by_kills) {
            *a += b;
        }
        for (a, b) in self.kill_all.iter_mut().zip(&other.kill_all) {
            *a += b;
        }
    }
}

fn row(label: String, observed: u64, trials: u64, exact: f64) -> ComparisonRow {
    let empirical = observed as f64 / trials as f64;
    let std_error = (exact * (1.0 - exact) / trials as f64).sqrt();
    let z = if std_error > 0.0 {
        (empirical - exact) / std_error
    } else if empirical == exact {
        0.0
    } else if empirical > exact {
        f64::INFINITY
    } else {
        f64::NEG_INFINITY
    };
    ComparisonRow {
        label,
        observed,
        empirical,
        exact,
        std_error,
        z,
    }
}

/// Simulate the law of the n-th observation's kill count and compare every
/// tallied event with its exact probability.
///
/// The exact references require the full pmf row at n, whose construction
/// costs O(n²) big-rational operations — intended for modest n (hundreds).
pub fn empirical_vs_exact(
    config: &TrialConfig,
    plan: ExecPlan,
    engine: &ExactEngine,
) -> Result<ComparisonReport, SimError> {
    config.validate()?;
    let n = match config.mode {
        Mode::ByObservations { observations } => observations,
        Mode::ByRecords { .. } => {
            return Err(SimError::InvalidConfig(
                "law comparison runs in observation-time mode".into(),
            ))
        }
    };
    let k_max = config.k_max;

    let partials = run_chunked(config.trials, plan, |range| {
        let mut tally = FinalTally::empty(k_max);
        let mut staircase = Staircase::new();
        for trial in range {
            let mut rng = trial_rng(mix_seed(config.master_seed, trial));
            staircase.clear();
            for _ in 0..n - 1 {
                staircase.insert(sample_point(&mut rng));
            }
            let outcome = staircase.insert(sample_point(&mut rng));
            if !outcome.is_record {
                tally.no_record += 1;
            } else {
                let bin = kill_bin(outcome.killed, k_max);
                tally.by_kills[bin] += 1;
                if outcome.record_type == RecordType::BothCoords {
                    tally.kill_all[bin] += 1;
                }
            }
        }
        Ok(tally)
    })?;
    let mut tally = FinalTally::empty(k_max);
    for partial in &partials {
        tally.merge(partial);
    }

    let pmf_row = engine.pmf_row(n)?;
    let record_probability = engine.prob_any_record(n)?;
    let trials = config.trials;
    let exact_at = |k: usize, column: &[BigRational]| -> BigRational {
        column.get(k).cloned().unwrap_or_else(BigRational::zero)
    };

    let mut rows = Vec::with_capacity(2 * (k_max + 2) + 3);
    rows.push(row(
        "k=-1".to_string(),
        tally.no_record,
        trials,
        1.0 - ratio_to_f64(&record_probability),
    ));
    let mut pmf_head = BigRational::zero();
    let mut c_head = BigRational::zero();
    for k in 0..=k_max {
        let exact = exact_at(k, &pmf_row.pmf);
        pmf_head += &exact;
        rows.push(row(
            format!("k={k}"),
            tally.by_kills[k],
            trials,
            ratio_to_f64(&exact),
        ));
    }
    rows.push(row(
        "k_overflow".to_string(),
        tally.by_kills[k_max + 1],
        trials,
        ratio_to_f64(&(&record_probability - &pmf_head)),
    ));
    rows.push(row(
        "any_record".to_string(),
        trials - tally.no_record,
        trials,
        ratio_to_f64(&record_probability),
    ));
    let corner_total = BigRational::new(
        1.into(),
        num_bigint::BigInt::from(n) * num_bigint::BigInt::from(n),
    );
    debug_assert_eq!(
        corner_total,
        pmf_row.c.iter().sum::<BigRational>(),
        "corner mass must match the C-row total",
    );
    rows.push(row(
        "kill_all".to_string(),
        tally.kill_all.iter().sum(),
        trials,
        ratio_to_f64(&corner_total),
    ));
    for k in 0..=k_max {
        let exact = exact_at(k, &pmf_row.c);
        c_head += &exact;
        rows.push(row(
            format!("kill_all_k={k}"),
            tally.kill_all[k],
            trials,
            ratio_to_f64(&exact),
        ));
    }
    rows.push(row(
        "kill_all_overflow".to_string(),
        tally.kill_all[k_max + 1],
        trials,
        ratio_to_f64(&(&corner_total - &c_head)),
    ));

    let max_abs_z = rows
        .iter()
        .map(|r| r.z.abs())
        .fold(0.0, f64::max);

    Ok(ComparisonReport {
        n,
        trials,
        master_seed: config.master_seed,
        k_max,
        rows,
        max_abs_z,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(n: u64, seed: u64, trials: u64, k_max: usize) -> ComparisonReport {
        let cfg = TrialConfig::by_observations(n, seed, trials, k_max);
        empirical_vs_exact(&cfg, ExecPlan::single_threaded(), &ExactEngine::new()).unwrap()
    }

    fn by_label<'a>(report: &'a ComparisonReport, label: &str) -> &'a ComparisonRow {
        report
            .rows
            .iter()
            .find(|r| r.label == label)
            .unwrap_or_else(|| panic!("missing row {label}"))
    }

    #[test]
    fn first_observation_is_deterministic() {
        let report = run(1, 9, 50, 4);
        assert_eq!(by_label(&report, "k=0").observed, 50);
        assert_eq!(by_label(&report, "k=0").z, 0.0, "P = 1 matched exactly");
        assert_eq!(by_label(&report, "k=-1").observed, 0);
        assert_eq!(by_label(&report, "kill_all").exact, 1.0);
        assert_eq!(by_label(&report, "kill_all_k=0").observed, 50);
        assert_eq!(report.max_abs_z, 0.0);
    }

    #[test]
    fn counts_partition_the_trials() {
        let report = run(6, 123, 3_000, 8);
        let k_rows: u64 = (0..=8)
            .map(|k| by_label(&report, &format!("k={k}")).observed)
            .sum();
        let total = by_label(&report, "k=-1").observed
            + k_rows
            + by_label(&report, "k_overflow").observed;
        assert_eq!(total, 3_000);
        assert_eq!(
            by_label(&report, "any_record").observed,
            3_000 - by_label(&report, "k=-1").observed,
        );
    }

    #[test]
    fn golden_row_alignment_at_n5() {
        let report = run(5, 20_260_825, 40_000, 6);
        // Exact pmf at n = 5: 167/600, 7/60, 7/150, 1/75, 1/600; corner total 1/25.
        assert!((by_label(&report, "k=0").exact - 167.0 / 600.0).abs() < 1e-15);
        assert!((by_label(&report, "k=4").exact - 1.0 / 600.0).abs() < 1e-15);
        assert_eq!(by_label(&report, "k=5").exact, 0.0);
        assert_eq!(by_label(&report, "k_overflow").exact, 0.0);
        assert!((by_label(&report, "kill_all").exact - 0.04).abs() < 1e-15);
        assert!((by_label(&report, "kill_all_k=2").exact - 11.0 / 600.0).abs() < 1e-15);
        assert!(
            report.max_abs_z.is_finite() && report.max_abs_z < 5.0,
            "max |z| = {} should sit well inside 5σ",
            report.max_abs_z,
        );
    }

    #[test]
    fn impossible_event_with_observations_would_flag_infinite_z() {
        // Structural zero rows (k ≥ n) must report exact 0 and z = 0 when
        // unobserved; the z formula escalates to ±∞ only on a violation.
        let report = run(3, 4, 500, 6);
        for k in 3..=6 {
            let r = by_label(&report, &format!("k={k}"));
            assert_eq!(r.exact, 0.0);
            assert_eq!(r.observed, 0);
            assert_eq!(r.z, 0.0);
        }
    }

    #[test]
    fn thread_invariance() {
        let cfg = TrialConfig::by_observations(4, 77, 2_000, 5);
        let engine = ExactEngine::new();
        let a = empirical_vs_exact(&cfg, ExecPlan::single_threaded(), &engine).unwrap();
        let b = empirical_vs_exact(&cfg, ExecPlan::with_threads(3), &engine).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn record_mode_config_is_rejected() {
        let cfg = TrialConfig::by_records(5, 0, 10, 4);
        assert!(matches!(
            empirical_vs_exact(&cfg, ExecPlan::single_threaded(), &ExactEngine::new()),
            Err(SimError::InvalidConfig(_))
        ));
    }
}
