//! Geometric approximation of the kill-count law and its certified error
//! bound.
//!
//! The conditional law of K_n converges to Geometric(1/2) on {0, 1, 2, …}.
//! The unconditional pmf admits the first-order approximation
//!
//!   p̂(n, k) = 2^(−(k+1)) · H_n/n − (k−1) · 2^(−(k+2)) / n,
//!
//! whose error is at most 1/(2n²) uniformly in k, with the optimal constant
//! 1/4 in place of 1/2 attained at exactly four small (n, k) pairs. Dividing
//! by P(K_n ≥ 0) = H_n/n turns the second term into the correction
//! α(n, k) = −(k−1)·2^(−(k+2))/H_n to the limiting geometric weights.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::rational::{from_u64, inv_u64, pow2_inv};

/// Approximate pmf values and geometric corrections for one n, k = 0..=k_max.
#[derive(Debug, Clone)]
pub struct ApproxRow {
    pub n: u64,
    /// p̂(n, k) for k = 0..=k_max.
    pub approx: Vec<BigRational>,
    /// α(n, k): signed correction to the geometric weight 2^(−(k+1)) in the
    /// conditional law. Positive at k = 0, zero at k = 1, negative beyond.
    pub alpha: Vec<BigRational>,
    /// Certified absolute error bound for |pmf − p̂|: 1/(2n²).
    pub bound: BigRational,
}

/// p̂(n, k) = (2·H_n − (k−1)) / (n · 2^(k+2)).
pub(crate) fn approx_pmf(n: u64, k: u64, h_n: &BigRational) -> BigRational {
    let k_minus_1 = BigRational::from_integer(BigInt::from(k as i64 - 1));
    (h_n * from_u64(2) - k_minus_1) * inv_u64(n) * pow2_inv(k + 2)
}

/// α(n, k) = −(k−1) / (2^(k+2) · H_n).
pub(crate) fn alpha(k: u64, h_n: &BigRational) -> BigRational {
    let k_minus_1 = BigRational::from_integer(BigInt::from(k as i64 - 1));
    -k_minus_1 * pow2_inv(k + 2) / h_n
}

pub(crate) fn error_bound(n: u64) -> BigRational {
    inv_u64(2 * n * n)
}

pub(crate) fn build_approx_row(n: u64, k_max: u64, h_n: &BigRational) -> ApproxRow {
    let approx = (0..=k_max).map(|k| approx_pmf(n, k, h_n)).collect();
    let alpha = (0..=k_max).map(|k| alpha(k, h_n)).collect();
    ApproxRow { n, approx, alpha, bound: error_bound(n) }
}

/// Per-(n, k) diagnostic from the exhaustive bound sweep.
#[derive(Debug, Clone)]
pub struct BoundDiagnostic {
    pub n: u64,
    pub k: u64,
    /// Signed error pmf_exact(n, k) − p̂(n, k).
    pub error: BigRational,
    /// C_k / 4 for the same (n, k): the error's conjectured asymptotic size
    /// (the approximation is expected to undershoot by about this much).
    /// Reported for comparison, never asserted.
    pub quarter_c: BigRational,
    /// n² · |error|, the scale on which the optimal constant 1/4 lives.
    pub scaled_abs_error: BigRational,
}

/// Result of sweeping the error bound over all n ≤ n_max, k ≤ n.
#[derive(Debug, Clone)]
pub struct BoundReport {
    pub n_max: u64,
    /// Observed supremum of n²·|pmf − p̂| over the sweep.
    pub sup_scaled_error: BigRational,
    /// Every (n, k) attaining the supremum exactly.
    pub attained_at: Vec<(u64, u64)>,
    /// One diagnostic row per (n, k) pair swept.
    pub diagnostics: Vec<BoundDiagnostic>,
}

/// Check |pmf − p̂| ≤ 1/(2n²) for one pair, producing the diagnostic row.
/// Returns `None` if the bound is violated.
pub(crate) fn check_pair(
    n: u64,
    k: u64,
    exact: &BigRational,
    c_k: &BigRational,
    h_n: &BigRational,
) -> Option<BoundDiagnostic> {
    let error = exact - approx_pmf(n, k, h_n);
    let scaled_abs_error = error.abs() * from_u64(n * n);
    if error.abs() > error_bound(n) {
        return None;
    }
    Some(BoundDiagnostic {
        n,
        k,
        error,
        quarter_c: c_k / from_u64(4),
        scaled_abs_error,
    })
}

/// Fold a stream of diagnostics into the supremum report.
pub(crate) fn summarize(n_max: u64, diagnostics: Vec<BoundDiagnostic>) -> BoundReport {
    let mut sup = BigRational::zero();
    let mut attained_at = Vec::new();
    for d in &diagnostics {
        if d.scaled_abs_error > sup {
            sup = d.scaled_abs_error.clone();
            attained_at.clear();
            attained_at.push((d.n, d.k));
        } else if d.scaled_abs_error == sup && !sup.is_zero() {
            attained_at.push((d.n, d.k));
        }
    }
    BoundReport { n_max, sup_scaled_error: sup, attained_at, diagnostics }
}
