//! Trial drivers and the public simulation entry points.

use std::io::Write;

use rand_chacha::ChaCha8Rng;

use super::chain::RecordChain;
use super::rng::{mix_seed, sample_point, trial_rng};
use super::runner::{run_chunked, ExecPlan};
use super::{
    kill_bin, Mode, ObservationAggregate, ObservationTally, RecordStrategy, RecordTimeTally,
    SimError, TrialConfig,
};
use crate::frontier::{InsertOutcome, RecordType, Staircase, TraceRow};

fn record_into(tally: &mut ObservationTally, outcome: &InsertOutcome, k_max: usize) {
    if !outcome.is_record {
        return;
    }
    let bin = kill_bin(outcome.killed, k_max);
    tally.records += 1;
    tally.killed_total += outcome.killed;
    tally.by_kills[bin] += 1;
    match outcome.record_type {
        RecordType::Interior => tally.interior[bin] += 1,
        RecordType::FirstCoordOnly => tally.first_only[bin] += 1,
        RecordType::SecondCoordOnly => tally.second_only[bin] += 1,
        RecordType::BothCoords => tally.both[bin] += 1,
        RecordType::None => unreachable!("a record outcome always has a record type"),
    }
}

fn finalize(tally: &mut ObservationTally, staircase: &Staircase) {
    tally.remaining = staircase.size();
    tally.both_coord_records = tally.both.iter().sum();
    tally.first_coord_records = tally.first_only.iter().sum::<u64>() + tally.both_coord_records;
    debug_assert!(tally.conserved(), "per-trial tally identities violated");
}

pub(super) fn observation_trial(
    n: u64,
    k_max: usize,
    rng: &mut ChaCha8Rng,
    staircase: &mut Staircase,
) -> ObservationTally {
    staircase.clear();
    let mut tally = ObservationTally::empty(n, k_max);
    for _ in 0..n {
        let outcome = staircase.insert(sample_point(rng));
        record_into(&mut tally, &outcome, k_max);
    }
    finalize(&mut tally, staircase);
    tally
}

/// One observation-time trial on an explicit stream seed (no master-seed
/// mixing). The stream is consumed as two uniforms per observation, identical
/// to the literal record-time strategy — which is what makes the time-change
/// cross-checks exact.
pub fn observation_trial_with_seed(n: u64, stream_seed: u64, k_max: usize) -> ObservationTally {
    let mut staircase = Staircase::new();
    observation_trial(n, k_max, &mut trial_rng(stream_seed), &mut staircase)
}

fn record_trial_direct(
    records: u64,
    k_max: usize,
    rng: &mut ChaCha8Rng,
    chain: &mut RecordChain,
    counts: &mut [u64],
) -> Result<f64, SimError> {
    chain.reset();
    for _ in 0..records {
        let outcome = chain.step(rng)?;
        counts[kill_bin(outcome.killed, k_max)] += 1;
    }
    debug_assert_eq!(chain.records_set(), records);
    Ok(chain.time())
}

/// Outcome of one literal record-time trial.
struct ViaObsRun {
    time: f64,
    observations: u64,
}

fn record_trial_via_observations(
    records: u64,
    k_max: usize,
    budget: u64,
    rng: &mut ChaCha8Rng,
    staircase: &mut Staircase,
    counts: &mut [u64],
) -> Result<ViaObsRun, (u64, u64)> {
    staircase.clear();
    let mut set = 0u64;
    let mut observations = 0u64;
    while set < records {
        if observations >= budget {
            return Err((set, observations));
        }
        observations += 1;
        let outcome = staircase.insert(sample_point(rng));
        if outcome.is_record {
            counts[kill_bin(outcome.killed, k_max)] += 1;
            set += 1;
        }
    }
    Ok(ViaObsRun {
        time: observations as f64,
        observations,
    })
}

/// Run a record-time campaign: each trial generates records until
/// `config.mode`'s target is reached.
///
/// The direct strategy walks the embedded record chain and is the default;
/// its per-trial record target is capped (`RecordStrategy::Direct`) because
/// the observation clock grows like exp(√(2m)). The literal strategy
/// generates every observation, honors a per-trial observation budget, and
/// always runs sequentially — it exists for small targets and for
/// cross-checking the chain.
pub fn run_by_records(
    config: &TrialConfig,
    strategy: RecordStrategy,
    plan: ExecPlan,
) -> Result<RecordTimeTally, SimError> {
    config.validate()?;
    let records = match config.mode {
        Mode::ByRecords { records } => records,
        Mode::ByObservations { .. } => {
            return Err(SimError::InvalidConfig(
                "run_by_records requires record-time mode".into(),
            ))
        }
    };
    match strategy {
        RecordStrategy::Direct { max_records } => {
            if records > max_records {
                return Err(SimError::RecordCapExceeded {
                    requested: records,
                    cap: max_records,
                });
            }
            let partials = run_chunked(config.trials, plan, |range| {
                let mut chunk = RecordTimeTally::empty(records, config.k_max);
                let mut chain = RecordChain::new();
                for trial in range {
                    let mut rng = trial_rng(mix_seed(config.master_seed, trial));
                    let time = record_trial_direct(
                        records,
                        config.k_max,
                        &mut rng,
                        &mut chain,
                        &mut chunk.counts,
                    )?;
                    chunk.trials += 1;
                    chunk.record_times.push(time);
                }
                Ok(chunk)
            })?;
            let mut tally = RecordTimeTally::empty(records, config.k_max);
            for partial in &partials {
                tally.merge(partial);
            }
            Ok(tally)
        }
        RecordStrategy::ViaObservations { observation_budget } => {
            let mut tally = RecordTimeTally::empty(records, config.k_max);
            let mut staircase = Staircase::new();
            for trial in 0..config.trials {
                let mut rng = trial_rng(mix_seed(config.master_seed, trial));
                match record_trial_via_observations(
                    records,
                    config.k_max,
                    observation_budget,
                    &mut rng,
                    &mut staircase,
                    &mut tally.counts,
                ) {
                    Ok(run) => {
                        tally.trials += 1;
                        tally.record_times.push(run.time);
                    }
                    Err((records_completed, observations_used)) => {
                        return Err(SimError::BudgetExhausted {
                            trial,
                            records_completed,
                            observations_used,
                            partial: Box::new(tally),
                        });
                    }
                }
            }
            Ok(tally)
        }
    }
}

/// Result of a single record-time trial run on an explicit stream seed.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleRecordRun {
    /// Kill-count bins (k = 0..=k_max plus overflow).
    pub counts: Vec<u64>,
    /// Observation time of the final record.
    pub record_time: f64,
    /// Observations actually generated — literal strategy only.
    pub observations_used: Option<u64>,
}

/// One record-time trial on an explicit stream seed (no master-seed mixing).
pub fn record_trial_with_seed(
    records: u64,
    stream_seed: u64,
    k_max: usize,
    strategy: RecordStrategy,
) -> Result<SingleRecordRun, SimError> {
    if records == 0 {
        return Err(SimError::InvalidConfig(
            "records per trial must be at least 1".into(),
        ));
    }
    let mut rng = trial_rng(stream_seed);
    let mut counts = vec![0u64; k_max + 2];
    match strategy {
        RecordStrategy::Direct { max_records } => {
            if records > max_records {
                return Err(SimError::RecordCapExceeded {
                    requested: records,
                    cap: max_records,
                });
            }
            let mut chain = RecordChain::new();
            let record_time =
                record_trial_direct(records, k_max, &mut rng, &mut chain, &mut counts)?;
            Ok(SingleRecordRun {
                counts,
                record_time,
                observations_used: None,
            })
        }
        RecordStrategy::ViaObservations { observation_budget } => {
            let mut staircase = Staircase::new();
            match record_trial_via_observations(
                records,
                k_max,
                observation_budget,
                &mut rng,
                &mut staircase,
                &mut counts,
            ) {
                Ok(run) => Ok(SingleRecordRun {
                    counts,
                    record_time: run.time,
                    observations_used: Some(run.observations),
                }),
                Err((records_completed, observations_used)) => {
                    let mut partial = RecordTimeTally::empty(records, k_max);
                    partial.counts = counts;
                    Err(SimError::BudgetExhausted {
                        trial: 0,
                        records_completed,
                        observations_used,
                        partial: Box::new(partial),
                    })
                }
            }
        }
    }
}

/// Run an observation-time campaign and sum the per-trial tallies.
pub fn run_by_observations(
    config: &TrialConfig,
    plan: ExecPlan,
) -> Result<ObservationAggregate, SimError> {
    config.validate()?;
    let n = match config.mode {
        Mode::ByObservations { observations } => observations,
        Mode::ByRecords { .. } => {
            return Err(SimError::InvalidConfig(
                "run_by_observations requires observation-time mode".into(),
            ))
        }
    };
    let partials = run_chunked(config.trials, plan, |range| {
        let mut totals = ObservationTally::empty(n, config.k_max);
        let mut staircase = Staircase::new();
        let mut trials = 0u64;
        for trial in range {
            let mut rng = trial_rng(mix_seed(config.master_seed, trial));
            let tally = observation_trial(n, config.k_max, &mut rng, &mut staircase);
            totals.merge(&tally);
            trials += 1;
        }
        Ok((trials, totals))
    })?;
    let mut totals = ObservationTally::empty(n, config.k_max);
    let mut trials = 0u64;
    for (count, partial) in &partials {
        trials += count;
        totals.merge(partial);
    }
    Ok(ObservationAggregate {
        observations_per_trial: n,
        trials,
        master_seed: config.master_seed,
        k_max: config.k_max,
        totals,
    })
}

/// Run one observation-time trial while writing a CSV trace line per
/// observation (header first). The stream and the resulting tally are
/// identical to [`observation_trial_with_seed`] on the same arguments.
pub fn write_observation_trace<W: Write>(
    n: u64,
    stream_seed: u64,
    k_max: usize,
    writer: &mut W,
) -> std::io::Result<ObservationTally> {
    let mut staircase = Staircase::new();
    let mut rng = trial_rng(stream_seed);
    let mut tally = ObservationTally::empty(n, k_max);
    writeln!(writer, "{}", TraceRow::CSV_HEADER)?;
    for i in 1..=n {
        let point = sample_point(&mut rng);
        let outcome = staircase.insert(point);
        record_into(&mut tally, &outcome, k_max);
        let row = TraceRow {
            n: i,
            x: point.x(),
            y: point.y(),
            is_record: outcome.is_record,
            killed: outcome.killed,
            record_type: outcome.record_type,
            remaining: staircase.size(),
        };
        writeln!(writer, "{}", row.to_csv_line())?;
    }
    finalize(&mut tally, &staircase);
    Ok(tally)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::DEFAULT_RECORD_CAP;

    fn records_cfg(m: u64, seed: u64, trials: u64) -> TrialConfig {
        TrialConfig::by_records(m, seed, trials, 8)
    }

    #[test]
    fn single_record_always_kills_zero() {
        let cfg = records_cfg(1, 5, 10);
        let tally =
            run_by_records(&cfg, RecordStrategy::default(), ExecPlan::single_threaded()).unwrap();
        assert_eq!(tally.counts[0], 10);
        assert_eq!(tally.total_records(), 10);
        assert!(tally.record_times.iter().all(|&t| t == 1.0));
    }

    #[test]
    fn direct_runs_are_deterministic_and_thread_invariant() {
        let cfg = records_cfg(200, 99, 600);
        let a = run_by_records(&cfg, RecordStrategy::default(), ExecPlan::single_threaded())
            .unwrap();
        let b = run_by_records(&cfg, RecordStrategy::default(), ExecPlan::with_threads(4))
            .unwrap();
        let c = run_by_records(&cfg, RecordStrategy::default(), ExecPlan::default()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
        assert_eq!(a.total_records(), 200 * 600);
    }

    #[test]
    fn record_cap_is_enforced() {
        let cfg = records_cfg(DEFAULT_RECORD_CAP + 1, 0, 1);
        match run_by_records(&cfg, RecordStrategy::default(), ExecPlan::single_threaded()) {
            Err(SimError::RecordCapExceeded { requested, cap }) => {
                assert_eq!(requested, DEFAULT_RECORD_CAP + 1);
                assert_eq!(cap, DEFAULT_RECORD_CAP);
            }
            other => panic!("expected cap error, got {other:?}"),
        }
    }

    #[test]
    fn budget_exhaustion_reports_partial_progress() {
        let cfg = records_cfg(10_000, 3, 2);
        let strategy = RecordStrategy::ViaObservations {
            observation_budget: 100,
        };
        match run_by_records(&cfg, strategy, ExecPlan::single_threaded()) {
            Err(SimError::BudgetExhausted {
                trial,
                records_completed,
                observations_used,
                partial,
            }) => {
                assert_eq!(trial, 0);
                assert_eq!(observations_used, 100);
                assert!(records_completed < 10_000);
                assert_eq!(partial.total_records(), records_completed);
                assert_eq!(partial.trials, 0, "no trial completed");
            }
            other => panic!("expected budget exhaustion, got {other:?}"),
        }
    }

    #[test]
    fn literal_strategy_small_target_matches_mode_invariants() {
        let cfg = records_cfg(1, 11, 5);
        let strategy = RecordStrategy::ViaObservations {
            observation_budget: 1000,
        };
        let tally = run_by_records(&cfg, strategy, ExecPlan::single_threaded()).unwrap();
        assert_eq!(tally.counts[0], 5);
        assert!(tally.record_times.iter().all(|&t| t == 1.0));
    }

    #[test]
    fn time_change_consistency() {
        // Running the literal record-time strategy to its m-th record and
        // then replaying the same stream in observation time for exactly
        // T_m observations must reproduce the record count and every bin.
        let k_max = 8;
        for trial in 0..20u64 {
            let seed = mix_seed(0xC0FFEE, trial);
            let run = record_trial_with_seed(
                25,
                seed,
                k_max,
                RecordStrategy::ViaObservations {
                    observation_budget: 10_000_000,
                },
            )
            .unwrap();
            let t_m = run.record_time as u64;
            assert_eq!(run.observations_used, Some(t_m));
            let tally = observation_trial_with_seed(t_m, seed, k_max);
            assert_eq!(tally.records, 25, "trial {trial}");
            assert_eq!(tally.by_kills, run.counts, "trial {trial}");
        }
    }

    #[test]
    fn monotone_paths_within_a_trial() {
        // The same stream truncated later dominates the earlier tally
        // bin-by-bin: record counts only grow along a trial.
        for trial in 0..10u64 {
            let seed = mix_seed(42, trial);
            let early = observation_trial_with_seed(200, seed, 8);
            let late = observation_trial_with_seed(400, seed, 8);
            assert!(late.records >= early.records);
            assert!(late.first_coord_records >= early.first_coord_records);
            assert!(late.both_coord_records >= early.both_coord_records);
            for (l, e) in late.by_kills.iter().zip(&early.by_kills) {
                assert!(l >= e, "trial {trial}");
            }
        }
    }

    #[test]
    fn observation_mode_basics_and_first_trial() {
        let cfg = TrialConfig::by_observations(1, 7, 3, 4);
        let agg = run_by_observations(&cfg, ExecPlan::single_threaded()).unwrap();
        assert_eq!(agg.trials, 3);
        assert_eq!(agg.totals.records, 3);
        assert_eq!(agg.totals.remaining, 3);
        assert_eq!(agg.totals.by_kills[0], 3);
        assert_eq!(agg.totals.both[0], 3, "the first observation is always a double record");
    }

    #[test]
    fn observation_mode_thread_invariance() {
        let cfg = TrialConfig::by_observations(60, 21, 700, 8);
        let a = run_by_observations(&cfg, ExecPlan::single_threaded()).unwrap();
        let b = run_by_observations(&cfg, ExecPlan::with_threads(3)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn per_trial_tallies_conserve() {
        for trial in 0..50u64 {
            let tally = observation_trial_with_seed(300, mix_seed(9, trial), 6);
            assert!(tally.conserved());
            assert_eq!(tally.both[0], 1, "exactly one double record kills zero");
        }
    }

    #[test]
    fn trace_matches_untraced_run_byte_for_byte_semantics() {
        let mut buffer = Vec::new();
        let traced = write_observation_trace(150, 1234, 6, &mut buffer).unwrap();
        let untraced = observation_trial_with_seed(150, 1234, 6);
        assert_eq!(traced, untraced);
        let text = String::from_utf8(buffer).unwrap();
        assert_eq!(text.lines().count(), 151, "header plus one line per observation");
        assert!(text.starts_with("n,x,y,is_record,killed,record_type,remaining\n"));
    }

    #[test]
    fn wrong_mode_is_rejected() {
        let cfg = TrialConfig::by_observations(5, 0, 1, 4);
        assert!(matches!(
            run_by_records(&cfg, RecordStrategy::default(), ExecPlan::single_threaded()),
            Err(SimError::InvalidConfig(_))
        ));
        let cfg = records_cfg(5, 0, 1);
        assert!(matches!(
            run_by_observations(&cfg, ExecPlan::single_threaded()),
            Err(SimError::InvalidConfig(_))
        ));
    }
}
