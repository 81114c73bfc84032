//! Deterministic chunked execution of independent trials.

use rayon::prelude::*;

use super::SimError;

/// Trials per work chunk. Fixed (never derived from the thread count) so the
/// trial → chunk assignment, and therefore every merge order, is identical no
/// matter how the chunks are scheduled.
pub(crate) const CHUNK_TRIALS: u64 = 256;

/// How to execute a campaign. `threads == 0` uses the process-wide default
/// pool; `threads == 1` stays on the calling thread (the debugging path);
/// anything else runs on a dedicated pool of that size. All choices produce
/// bit-identical results.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExecPlan {
    pub threads: usize,
}

impl Default for ExecPlan {
    fn default() -> Self {
        Self { threads: 0 }
    }
}

impl ExecPlan {
    pub fn single_threaded() -> Self {
        Self { threads: 1 }
    }

    pub fn with_threads(threads: usize) -> Self {
        Self { threads }
    }
}

/// Run `per_chunk` over [0, trials) split into fixed chunks, returning the
/// per-chunk results in chunk order. Errors are surfaced in chunk order too,
/// so even failures are reproducible across thread counts.
pub(crate) fn run_chunked<P, F>(
    trials: u64,
    plan: ExecPlan,
    per_chunk: F,
) -> Result<Vec<P>, SimError>
where
    P: Send,
    F: Fn(std::ops::Range<u64>) -> Result<P, SimError> + Sync + Send,
{
    let ranges: Vec<std::ops::Range<u64>> = (0..trials)
        .step_by(CHUNK_TRIALS as usize)
        .map(|start| start..(start + CHUNK_TRIALS).min(trials))
        .collect();

    let results: Vec<Result<P, SimError>> = if plan.threads == 1 {
        ranges.into_iter().map(per_chunk).collect()
    } else if plan.threads == 0 {
        ranges.into_par_iter().map(per_chunk).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(plan.threads)
            .build()
            .map_err(|e| SimError::ExecutionSetup(e.to_string()))?;
        pool.install(|| ranges.into_par_iter().map(per_chunk).collect())
    };

    results.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sum_of_squares(plan: ExecPlan, trials: u64) -> Vec<u64> {
        run_chunked(trials, plan, |range| Ok(range.map(|t| t * t).sum::<u64>())).unwrap()
    }

    #[test]
    fn chunk_results_are_identical_across_thread_counts() {
        let trials = 10_000;
        let sequential = sum_of_squares(ExecPlan::single_threaded(), trials);
        let default_pool = sum_of_squares(ExecPlan::default(), trials);
        let four = sum_of_squares(ExecPlan::with_threads(4), trials);
        assert_eq!(sequential, default_pool);
        assert_eq!(sequential, four);
        assert_eq!(
            sequential.iter().sum::<u64>(),
            (0..trials).map(|t| t * t).sum::<u64>()
        );
    }

    #[test]
    fn errors_surface_in_chunk_order() {
        // Chunks 3 and 7 both fail; the reported failure must always be
        // chunk 3 (trial range start 768) regardless of scheduling.
        for plan in [ExecPlan::single_threaded(), ExecPlan::with_threads(4)] {
            let err = run_chunked(10 * CHUNK_TRIALS, plan, |range| {
                let chunk = range.start / CHUNK_TRIALS;
                if chunk == 3 || chunk == 7 {
                    Err(SimError::InvalidConfig(format!("chunk {chunk}")))
                } else {
                    Ok(())
                }
            })
            .unwrap_err();
            match err {
                SimError::InvalidConfig(msg) => assert_eq!(msg, "chunk 3"),
                other => panic!("unexpected error {other:?}"),
            }
        }
    }

    #[test]
    fn empty_and_partial_chunks() {
        assert_eq!(sum_of_squares(ExecPlan::default(), 0).len(), 0);
        let partial = sum_of_squares(ExecPlan::default(), CHUNK_TRIALS + 10);
        assert_eq!(partial.len(), 2);
    }
}
