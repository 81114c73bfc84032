//! The embedded record chain: record-time simulation without generating
//! non-record observations.
//!
//! Conditioned on the current staircase, the next record is uniform on the
//! record-setting region (the area under the staircase), and the number of
//! observations consumed to produce it is Geometric(λ) on {1, 2, …} where λ
//! is that region's area — non-record observations are i.i.d. rejections
//! that change no state. Sampling (landing point, gap) per record therefore
//! reproduces the law of the record subsequence exactly while skipping the
//! exp(√(2m))-sized dead time.

use rand_chacha::ChaCha8Rng;

use super::rng::open_unit;
use super::SimError;
use crate::frontier::{InsertOutcome, Point, Staircase};

/// Record-time process state for a single trial.
#[derive(Debug, Default)]
pub(crate) struct RecordChain {
    staircase: Staircase,
    /// Scratch: one area per vertical slab of the record-setting region.
    areas: Vec<f64>,
    /// Observation clock. Grows like exp(√(2m)); kept in f64, which is exact
    /// below 2^53 and faithful far beyond.
    time: f64,
    records_set: u64,
}

impl RecordChain {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn reset(&mut self) {
        self.staircase.clear();
        self.areas.clear();
        self.time = 0.0;
        self.records_set = 0;
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn records_set(&self) -> u64 {
        self.records_set
    }

    /// Advance to the next record: sample its gap and landing point, insert
    /// it, and report the insertion outcome (always a record).
    ///
    /// Draw order per step is fixed — slab selector, x, y (point re-drawn if
    /// rounding pushed it onto a closed boundary), gap — so a given stream
    /// seed fully determines the trajectory.
    pub fn step(&mut self, rng: &mut ChaCha8Rng) -> Result<InsertOutcome, SimError> {
        let pts = self.staircase.points();
        let slabs = pts.len() + 1;
        self.areas.clear();
        let mut total = 0.0;
        let mut prev_x = 0.0;
        for i in 0..slabs {
            let (hi_x, height) = if i < pts.len() {
                (pts[i].0, if i == 0 { 1.0 } else { pts[i - 1].1 })
            } else {
                (1.0, pts.last().map_or(1.0, |p| p.1))
            };
            let area = (hi_x - prev_x) * height;
            self.areas.push(area);
            total += area;
            prev_x = hi_x;
        }
        if total <= 0.0 {
            return Err(SimError::PrecisionExhausted {
                records_completed: self.records_set,
            });
        }

        // Pick a slab with probability proportional to its area.
        let target = open_unit(rng) * total;
        let mut acc = 0.0;
        let mut slab = slabs - 1;
        for (i, area) in self.areas.iter().enumerate() {
            acc += area;
            if target <= acc {
                slab = i;
                break;
            }
        }
        let lo_x = if slab == 0 { 0.0 } else { pts[slab - 1].0 };
        let hi_x = if slab < pts.len() { pts[slab].0 } else { 1.0 };
        let height = if slab == 0 { 1.0 } else { pts[slab - 1].1 };

        // Uniform in the slab. Coordinates can only leave the open square by
        // rounding onto 1.0, in which case we re-draw.
        let point = loop {
            let x = lo_x + open_unit(rng) * (hi_x - lo_x);
            let y = open_unit(rng) * height;
            if let Ok(p) = Point::new(x, y) {
                break p;
            }
        };

        // Observations consumed: Geometric(λ) on {1, 2, …} by inversion,
        // λ clamped to 1 against accumulated rounding in `total`.
        let lambda = total.min(1.0);
        let gap = (open_unit(rng).ln() / (-lambda).ln_1p()).floor() + 1.0;
        self.time += gap;
        self.records_set += 1;

        let outcome = self.staircase.insert(point);
        debug_assert!(
            outcome.is_record,
            "record-chain landing point must always be a record"
        );
        Ok(outcome)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::rng::trial_rng;

    #[test]
    fn first_step_takes_exactly_one_observation() {
        let mut chain = RecordChain::new();
        let mut rng = trial_rng(123);
        let out = chain.step(&mut rng).unwrap();
        assert!(out.is_record);
        assert_eq!(out.killed, 0);
        assert_eq!(chain.time(), 1.0);
        assert_eq!(chain.records_set(), 1);
    }

    #[test]
    fn time_is_strictly_increasing_and_gaps_are_integers() {
        let mut chain = RecordChain::new();
        let mut rng = trial_rng(99);
        let mut last = 0.0;
        for _ in 0..500 {
            chain.step(&mut rng).unwrap();
            let t = chain.time();
            assert!(t > last);
            assert_eq!(t.fract(), 0.0, "time must advance by whole observations");
            last = t;
        }
        assert_eq!(chain.records_set(), 500);
    }

    #[test]
    fn reset_reproduces_the_same_trajectory() {
        let mut chain = RecordChain::new();
        let mut rng = trial_rng(7);
        for _ in 0..50 {
            chain.step(&mut rng).unwrap();
        }
        let t1 = chain.time();
        chain.reset();
        let mut rng = trial_rng(7);
        for _ in 0..50 {
            chain.step(&mut rng).unwrap();
        }
        assert_eq!(chain.time(), t1);
    }

    #[test]
    fn kill_conservation_along_the_chain() {
        // records set − records killed = remaining records, at every step.
        let mut chain = RecordChain::new();
        let mut rng = trial_rng(2024);
        let mut killed_total = 0;
        for m in 1..=2000u64 {
            let out = chain.step(&mut rng).unwrap();
            killed_total += out.killed;
            assert_eq!(chain.staircase.size(), m - killed_total);
        }
    }
}
