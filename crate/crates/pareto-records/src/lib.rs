//! Bivariate Pareto records: exact kill-count laws and Monte Carlo
//! simulation.
//!
//! Observations are i.i.d. uniform points in the open unit square. A point
//! sets a (record-small) record when no earlier point has both coordinates
//! strictly smaller; setting a record "kills" every remaining record the new
//! point dominates. The surviving records form a staircase-shaped antichain.
//!
//! The crate has two halves that check each other:
//!
//! * [`exact`] — arbitrary-precision rational arithmetic for the law of the
//!   kill count K_n (−1 when the n-th observation is not a record, otherwise
//!   the number of records it kills), its geometric approximation with a
//!   certified error bound, and derived expectations.
//! * [`sim`] — deterministic, seedable Monte Carlo. Observation-time
//!   campaigns replay the process literally through the [`frontier`]
//!   staircase; record-time campaigns walk an embedded chain that skips
//!   non-record observations without changing the law. Moments accumulate in
//!   exact integer arithmetic; empirical laws come back with exact references
//!   and z-scores.
//!
//! [`report`] renders every table and report as CSV or JSON with rationals
//! preserved as numerator/denominator strings next to their f64 rounding.

pub mod exact;
pub mod frontier;
pub mod rational;
pub mod report;
pub mod sim;
