//! Goodness of fit of tallied kill counts against the limiting
//! Geometric(1/2) law on {0, 1, 2, …}: p_k = 2^(−(k+1)).

use serde::Serialize;

use super::SimError;

/// One cell of the pooled goodness-of-fit table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GofBin {
    pub label: String,
    pub observed: u64,
    pub expected: f64,
    /// Pearson contribution (observed − expected)² / expected.
    pub contribution: f64,
}

/// Pearson chi-square report against Geometric(1/2), with small-expectation
/// tail bins pooled into one cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GofReport {
    /// Total records tallied.
    pub records: u64,
    /// First kill count folded into the pooled tail cell.
    pub tail_bin: usize,
    pub statistic: f64,
    /// Cells minus one; the null law is fully specified.
    pub dof: usize,
    pub bins: Vec<GofBin>,
    /// Largest |empirical − geometric| probability deviation over the raw
    /// (unpooled) bins, and the bin attaining it (k_max+1 = overflow bin).
    pub sup_deviation: f64,
    pub sup_k: usize,
}

/// Geometric(1/2) mass of a single kill count.
fn geometric_mass(k: usize) -> f64 {
    0.5f64.powi(k as i32 + 1)
}

/// Geometric(1/2) tail mass P(K ≥ k).
fn geometric_tail(k: usize) -> f64 {
    0.5f64.powi(k as i32)
}

/// Test tallied kill counts against Geometric(1/2).
///
/// `counts` is the standard bin layout: index k for k = 0..=k_max plus a
/// final overflow bin, so `counts.len() = k_max + 2`. Counts from `tail_bin`
/// upward (including overflow) are pooled into one cell whose expectation is
/// the geometric tail mass; `tail_bin` is clamped to the overflow bin when
/// it points past the layout. The sup deviation is computed before pooling,
/// with the overflow bin compared against its own tail mass.
pub fn gof_geometric(counts: &[u64], tail_bin: usize) -> Result<GofReport, SimError> {
    if counts.len() < 2 {
        return Err(SimError::InvalidConfig(
            "counts must hold at least one kill bin plus the overflow bin".into(),
        ));
    }
    if tail_bin == 0 {
        return Err(SimError::InvalidConfig(
            "tail_bin must be at least 1 so the table keeps a non-pooled cell".into(),
        ));
    }
    let k_max = counts.len() - 2;
    let records: u64 = counts.iter().sum();
    if records == 0 {
        return Err(SimError::Degenerate(
            "no records tallied; empirical law is undefined".into(),
        ));
    }
    let total = records as f64;
    let tail_bin = tail_bin.min(k_max + 1);

    let mut sup_deviation = 0.0;
    let mut sup_k = 0;
    for (k, &count) in counts.iter().enumerate() {
        let reference = if k <= k_max {
            geometric_mass(k)
        } else {
            geometric_tail(k)
        };
        let deviation = (count as f64 / total - reference).abs();
        if deviation > sup_deviation {
            sup_deviation = deviation;
            sup_k = k;
        }
    }

    let mut bins = Vec::with_capacity(tail_bin + 1);
    let mut statistic = 0.0;
    for (k, &observed) in counts.iter().enumerate().take(tail_bin) {
        let expected = total * geometric_mass(k);
        let contribution = (observed as f64 - expected).powi(2) / expected;
        statistic += contribution;
        bins.push(GofBin {
            label: format!("k={k}"),
            observed,
            expected,
            contribution,
        });
    }
    let pooled: u64 = counts[tail_bin..].iter().sum();
    let expected = total * geometric_tail(tail_bin);
    let contribution = (pooled as f64 - expected).powi(2) / expected;
    statistic += contribution;
    bins.push(GofBin {
        label: format!("k>={tail_bin}"),
        observed: pooled,
        expected,
        contribution,
    });

    Ok(GofReport {
        records,
        tail_bin,
        statistic,
        dof: bins.len() - 1,
        bins,
        sup_deviation,
        sup_k,
    })
}
