//! Memoized generalized harmonic numbers.

use num_rational::BigRational;
use num_traits::Zero;

use crate::rational::{from_u64, inv_u64};

/// Generalized harmonic numbers H_n^(r) = Σ_{i≤n} i^(-r) for r ∈ {1, 2, 4},
/// plus the "second-order" cumulative sums c_n = Σ_{i≤n} H_i / i.
///
/// Values are exact rationals, grown append-only: `extend_to(n)` fills every
/// index up to `n`, so lookups below the current maximum never recompute.
/// Cost of an extension step at index i is dominated by gcd reduction on
/// numbers with O(i) digits; the table is meant for the exact-arithmetic
/// range (thousands of terms at most). For quick floating-point references at
/// large n use [`harmonic_f64`] / [`cumulative_h_over_i_f64`] instead.
#[derive(Debug, Default)]
pub struct HarmonicTable {
    h1: Vec<BigRational>,
    h2: Vec<BigRational>,
    h4: Vec<BigRational>,
    cumulative: Vec<BigRational>,
}

impl HarmonicTable {
    pub fn new() -> Self {
        Self {
            h1: vec![BigRational::zero()],
            h2: vec![BigRational::zero()],
            h4: vec![BigRational::zero()],
            cumulative: vec![BigRational::zero()],
        }
    }

    /// Largest index currently tabulated.
    pub fn max_n(&self) -> u64 {
        (self.h1.len() - 1) as u64
    }

    /// Grow all four tables to cover index `n`.
    pub fn extend_to(&mut self, n: u64) {
        for i in (self.h1.len() as u64)..=n {
            let inv = inv_u64(i);
            let inv2 = &inv * &inv;
            self.h1.push(self.h1.last().unwrap() + &inv);
            self.h2.push(self.h2.last().unwrap() + &inv2);
            self.h4.push(self.h4.last().unwrap() + &inv2 * &inv2);
            let h_i_over_i = self.h1.last().unwrap() * &inv;
            self.cumulative.push(self.cumulative.last().unwrap() + h_i_over_i);
            // The cumulative sum has the closed form (H_i² + H_i^(2)) / 2;
            // both computations must agree exactly.
            debug_assert_eq!(
                *self.cumulative.last().unwrap(),
                (self.h1.last().unwrap() * self.h1.last().unwrap()
                    + self.h2.last().unwrap())
                    / from_u64(2),
                "cumulative H_i/i sum diverged from its closed form at i = {i}",
            );
        }
    }

    /// H_n^(r). The table must already cover `n`; `r` must be 1, 2, or 4.
    pub fn h(&self, n: u64, r: u32) -> &BigRational {
        let table = match r {
            1 => &self.h1,
            2 => &self.h2,
            4 => &self.h4,
            _ => panic!("order {r} not tabulated"),
        };
        &table[n as usize]
    }

    /// c_n = Σ_{i≤n} H_i / i. The table must already cover `n`.
    pub fn cumulative_h_over_i(&self, n: u64) -> &BigRational {
        &self.cumulative[n as usize]
    }
}

/// Floating-point H_n^(r) by direct summation, for large-n diagnostics where
/// exact arithmetic would be needlessly expensive.
pub fn harmonic_f64(n: u64, r: u32) -> f64 {
    (1..=n).map(|i| (i as f64).powi(-(r as i32))).sum()
}

/// Floating-point Σ_{i≤n} H_i / i by direct summation.
pub fn cumulative_h_over_i_f64(n: u64) -> f64 {
    let mut h = 0.0;
    let mut total = 0.0;
    for i in 1..=n {
        h += 1.0 / i as f64;
        total += h / i as f64;
    }
    total
}
