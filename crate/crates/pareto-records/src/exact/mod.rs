//! Arbitrary-precision engine for the exact distribution of kill counts in
//! the bivariate Pareto record process.
//!
//! Everything here is pure rational arithmetic — no floating point. Results
//! are memoized per n behind a mutex: tables grow append-only, so repeated
//! queries and full-table sweeps reuse all smaller computations.

mod approx;
mod harmonic;
mod kill_law;

use std::sync::{Arc, Mutex};

use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

use crate::rational::{from_u64, inv_u64};

pub use approx::{ApproxRow, BoundDiagnostic, BoundReport};
pub use harmonic::{cumulative_h_over_i_f64, harmonic_f64, HarmonicTable};
pub use kill_law::KillPmfRow;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExactError {
    #[error("harmonic order {0} is not supported (only 1, 2 and 4 are tabulated)")]
    UnsupportedOrder(u32),
    #[error("n must be at least 1")]
    NTooSmall,
    #[error("k_max = {k_max} out of range for n = {n} (need k_max ≤ n − 1)")]
    KMaxOutOfRange { n: u64, k_max: u64 },
    #[error("approximation error bound violated at n = {n}, k = {k}")]
    BoundViolation { n: u64, k: u64 },
}

#[derive(Default)]
struct Tables {
    harmonic: HarmonicTable,
    /// rows[i] is the kill-count row for n = i + 1; grown densely on demand.
    rows: Vec<Arc<KillPmfRow>>,
}

/// Exact-arithmetic calculator for the kill-count law, its geometric
/// approximation, and the derived expectation formulas.
///
/// Cheap to share: all methods take `&self`, and the memo tables are guarded
/// by a mutex (computations are pure functions of their arguments, so lock
/// contention only ever duplicates work, never changes results).
pub struct ExactEngine {
    tables: Mutex<Tables>,
}

impl Default for ExactEngine {
    fn default() -> Self {
        Self::new()
    }
}

impl ExactEngine {
    pub fn new() -> Self {
        Self {
            tables: Mutex::new(Tables {
                harmonic: HarmonicTable::new(),
                rows: Vec::new(),
            }),
        }
    }

    /// H_n^(r) for r ∈ {1, 2, 4}; H_0 = 0.
    pub fn harmonic(&self, n: u64, r: u32) -> Result<BigRational, ExactError> {
        if !matches!(r, 1 | 2 | 4) {
            return Err(ExactError::UnsupportedOrder(r));
        }
        let mut t = self.lock();
        t.harmonic.extend_to(n);
        Ok(t.harmonic.h(n, r).clone())
    }

    /// c_n = Σ_{i≤n} H_i/i = (H_n² + H_n^(2))/2, the expected number of
    /// records among n observations.
    pub fn roman_harmonic2(&self, n: u64) -> Result<BigRational, ExactError> {
        if n == 0 {
            return Err(ExactError::NTooSmall);
        }
        let mut t = self.lock();
        t.harmonic.extend_to(n);
        Ok(t.harmonic.cumulative_h_over_i(n).clone())
    }

    /// P(K_n ≥ 0) = H_n / n: the probability that the n-th observation sets a
    /// record.
    pub fn prob_any_record(&self, n: u64) -> Result<BigRational, ExactError> {
        if n == 0 {
            return Err(ExactError::NTooSmall);
        }
        let mut t = self.lock();
        t.harmonic.extend_to(n);
        Ok(t.harmonic.h(n, 1) * inv_u64(n))
    }

    /// C_k: the "kill everything below the staircase corner" component of
    /// P(K_n = k). Exact 0 for k ≥ n.
    pub fn c_kill_all(&self, n: u64, k: u64) -> Result<BigRational, ExactError> {
        if n == 0 {
            return Err(ExactError::NTooSmall);
        }
        if k >= n {
            return Ok(BigRational::zero());
        }
        Ok(self.row(n)?.c[k as usize].clone())
    }

    /// Full C row for k = 0..n−1.
    pub fn c_kill_row(&self, n: u64) -> Result<Vec<BigRational>, ExactError> {
        Ok(self.row(n)?.c.clone())
    }

    /// The k = 0 values (A_0, B_0, C_0) seeding the recurrences.
    pub fn base_terms(
        &self,
        n: u64,
    ) -> Result<(BigRational, BigRational, BigRational), ExactError> {
        if n == 0 {
            return Err(ExactError::NTooSmall);
        }
        let h_n = self.harmonic(n, 1)?;
        Ok(kill_law::base_terms(n, &h_n))
    }

    /// Closed-form solutions (A_k, B_k) for k = 0..=k_max. Requires
    /// k_max ≤ n − 1.
    pub fn solve_ab(
        &self,
        n: u64,
        k_max: u64,
    ) -> Result<(Vec<BigRational>, Vec<BigRational>), ExactError> {
        if n == 0 {
            return Err(ExactError::NTooSmall);
        }
        if k_max >= n {
            return Err(ExactError::KMaxOutOfRange { n, k_max });
        }
        let row = self.row(n)?;
        let upto = k_max as usize + 1;
        Ok((row.a[..upto].to_vec(), row.b[..upto].to_vec()))
    }

    /// P(K_n = k). Exact 0 for k ≥ n.
    pub fn pmf_exact(&self, n: u64, k: u64) -> Result<BigRational, ExactError> {
        if n == 0 {
            return Err(ExactError::NTooSmall);
        }
        if k >= n {
            return Ok(BigRational::zero());
        }
        Ok(self.row(n)?.pmf[k as usize].clone())
    }

    /// The complete row (components, pmf, conditional pmf) for one n.
    pub fn pmf_row(&self, n: u64) -> Result<Arc<KillPmfRow>, ExactError> {
        self.row(n)
    }

    /// p̂(n, k), the geometric-with-correction approximation to P(K_n = k).
    pub fn approx_pmf(&self, n: u64, k: u64) -> Result<BigRational, ExactError> {
        if n == 0 {
            return Err(ExactError::NTooSmall);
        }
        let h_n = self.harmonic(n, 1)?;
        Ok(approx::approx_pmf(n, k, &h_n))
    }

    /// α(n, k), the signed correction to the limiting geometric weight
    /// 2^(−(k+1)) in the conditional law.
    pub fn alpha(&self, n: u64, k: u64) -> Result<BigRational, ExactError> {
        if n == 0 {
            return Err(ExactError::NTooSmall);
        }
        let h_n = self.harmonic(n, 1)?;
        Ok(approx::alpha(k, &h_n))
    }

    /// Approximation row for k = 0..=k_max (any k_max; the approximating
    /// family is defined for all k).
    pub fn approx_row(&self, n: u64, k_max: u64) -> Result<ApproxRow, ExactError> {
        if n == 0 {
            return Err(ExactError::NTooSmall);
        }
        let h_n = self.harmonic(n, 1)?;
        Ok(approx::build_approx_row(n, k_max, &h_n))
    }

    /// Exhaustively verify |pmf − p̂| ≤ 1/(2n²) over all n ≤ n_max, k ≤ n,
    /// reporting the observed supremum of n²·|error|, every pair attaining
    /// it, and per-pair diagnostics. A violated bound is a hard error naming
    /// the offending pair.
    pub fn verify_bound(&self, n_max: u64) -> Result<BoundReport, ExactError> {
        if n_max == 0 {
            return Err(ExactError::NTooSmall);
        }
        let zero = BigRational::zero();
        let mut diagnostics = Vec::new();
        for n in 1..=n_max {
            let row = self.row(n)?;
            let h_n = self.harmonic(n, 1)?;
            for k in 0..=n {
                let exact = if k < n { &row.pmf[k as usize] } else { &zero };
                let c_k = if k < n { &row.c[k as usize] } else { &zero };
                let diagnostic = approx::check_pair(n, k, exact, c_k, &h_n)
                    .ok_or(ExactError::BoundViolation { n, k })?;
                diagnostics.push(diagnostic);
            }
        }
        Ok(approx::summarize(n_max, diagnostics))
    }

    /// Expected number of records among n observations: c_n, identical to
    /// Σ_{i≤n} P(K_i ≥ 0).
    pub fn expected_records(&self, n: u64) -> Result<BigRational, ExactError> {
        self.roman_harmonic2(n)
    }

    /// Approximate expected count of records-killing-exactly-k among n
    /// observations, with its certified error cap:
    ///
    ///   ρ̂(n, k) = 2^(−(k+1)) c_n − (k−1) 2^(−(k+2)) H_n,  |ρ̂ − ρ| ≤ H_n^(2)/2.
    pub fn expected_kills_approx(
        &self,
        n: u64,
        k: u64,
    ) -> Result<(BigRational, BigRational), ExactError> {
        if n == 0 {
            return Err(ExactError::NTooSmall);
        }
        let c_n = self.roman_harmonic2(n)?;
        let h_n = self.harmonic(n, 1)?;
        let k_minus_1 = BigRational::from_integer(num_bigint::BigInt::from(k as i64 - 1));
        let rho_hat = c_n * crate::rational::pow2_inv(k + 1)
            - k_minus_1 * crate::rational::pow2_inv(k + 2) * h_n;
        let cap = self.harmonic(n, 2)? / from_u64(2);
        Ok((rho_hat, cap))
    }

    /// Exact ρ(n, k) = Σ_{i≤n} P(K_i = k), the expected number of
    /// records-killing-exactly-k among the first n observations.
    pub fn expected_kills_exact(&self, n: u64, k: u64) -> Result<BigRational, ExactError> {
        if n == 0 {
            return Err(ExactError::NTooSmall);
        }
        let mut total = BigRational::zero();
        for i in (k + 1).max(1)..=n {
            total += self.row(i)?.pmf[k as usize].clone();
        }
        Ok(total)
    }

    fn lock(&self) -> std::sync::MutexGuard<'_, Tables> {
        self.tables.lock().expect("exact-engine cache mutex poisoned")
    }

    fn row(&self, n: u64) -> Result<Arc<KillPmfRow>, ExactError> {
        if n == 0 {
            return Err(ExactError::NTooSmall);
        }
        let mut t = self.lock();
        t.harmonic.extend_to(n);
        while (t.rows.len() as u64) < n {
            let next_n = t.rows.len() as u64 + 1;
            let row = kill_law::build_row(next_n, t.harmonic.h(next_n, 1));
            t.rows.push(Arc::new(row));
        }
        Ok(Arc::clone(&t.rows[n as usize - 1]))
    }
}
