//! Output formatting shared by the command-line interface and the Python
//! bindings: rational-preserving table rows, CSV writers, and JSON encoding.
//!
//! CSV output uses comma separators, a single header line, LF line endings,
//! and floats printed with 17 significant digits so values round-trip
//! exactly. Exact rational quantities always travel with their reduced
//! numerator and denominator alongside the rounded float.

use std::io::{self, Write};

use num_rational::BigRational;
use serde::Serialize;

use crate::exact::{BoundReport, ExactEngine, ExactError};
use crate::rational::{f64_repr, ratio_to_f64};
use crate::sim::{
    ComparisonReport, GofReport, MomentReport, ObservationAggregate, RecordTimeTally,
};

/// A rational number in reduced form, with its nearest f64.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RationalRepr {
    pub num: String,
    pub den: String,
    pub float: f64,
}

impl RationalRepr {
    pub fn from_ratio(value: &BigRational) -> Self {
        Self {
            num: value.numer().to_string(),
            den: value.denom().to_string(),
            float: ratio_to_f64(value),
        }
    }
}

/// One (n, k, quantity) cell of the exact tables.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactTableRow {
    pub n: u64,
    pub k: u64,
    pub quantity: &'static str,
    pub value: RationalRepr,
    /// Sum of this quantity over every tabulated k at this n. With the full
    /// support tabulated, pmf rows sum to H_n/n, conditional rows to 1, and
    /// C rows to 1/n².
    pub row_sum: RationalRepr,
}

/// All exact quantities for one n in long (tidy) format, grouped by quantity
/// so each group reads as one matrix row; k runs over the law's support,
/// 0..=min(k_max, n−1).
///
/// Quantities: the pmf P(K_n = k), the conditional pmf given a record, the
/// three components A, B, C (pmf = A + 2B + C), the approximation p̂, and the
/// geometric correction α. Every cell carries its quantity's row sum.
pub fn exact_table_rows(
    engine: &ExactEngine,
    n: u64,
    k_max: u64,
) -> Result<Vec<ExactTableRow>, ExactError> {
    let row = engine.pmf_row(n)?;
    let cap = k_max.min(n - 1);
    let approx = engine.approx_row(n, cap)?;
    let take = cap as usize + 1;
    let columns: [(&'static str, &[BigRational]); 7] = [
        ("pmf", &row.pmf[..take]),
        ("conditional", &row.conditional[..take]),
        ("component_a", &row.a[..take]),
        ("component_b", &row.b[..take]),
        ("component_c", &row.c[..take]),
        ("approx_pmf", &approx.approx[..take]),
        ("alpha", &approx.alpha[..take]),
    ];
    let mut rows = Vec::with_capacity(take * 7);
    for (quantity, column) in columns {
        let sum = column
            .iter()
            .fold(BigRational::from_integer(0.into()), |acc, v| acc + v);
        let row_sum = RationalRepr::from_ratio(&sum);
        for (k, value) in column.iter().enumerate() {
            rows.push(ExactTableRow {
                n,
                k: k as u64,
                quantity,
                value: RationalRepr::from_ratio(value),
                row_sum: row_sum.clone(),
            });
        }
    }
    Ok(rows)
}

pub fn write_exact_table_csv<W: Write>(rows: &[ExactTableRow], w: &mut W) -> io::Result<()> {
    writeln!(
        w,
        "n,k,quantity,numerator,denominator,float,row_sum_numerator,row_sum_denominator,row_sum_float"
    )?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            r.n,
            r.k,
            r.quantity,
            r.value.num,
            r.value.den,
            f64_repr(r.value.float),
            r.row_sum.num,
            r.row_sum.den,
            f64_repr(r.row_sum.float),
        )?;
    }
    Ok(())
}

/// JSON-ready mirror of one bound diagnostic.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundDiagnosticRepr {
    pub n: u64,
    pub k: u64,
    pub error: RationalRepr,
    pub quarter_c: RationalRepr,
    pub scaled_abs_error: RationalRepr,
}

/// JSON-ready mirror of the bound sweep report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReportRepr {
    pub n_max: u64,
    pub sup_scaled_error: RationalRepr,
    pub attained_at: Vec<(u64, u64)>,
    pub diagnostics: Vec<BoundDiagnosticRepr>,
}

pub fn bound_report_repr(report: &BoundReport) -> BoundReportRepr {
    BoundReportRepr {
        n_max: report.n_max,
        sup_scaled_error: RationalRepr::from_ratio(&report.sup_scaled_error),
        attained_at: report.attained_at.clone(),
        diagnostics: report
            .diagnostics
            .iter()
            .map(|d| BoundDiagnosticRepr {
                n: d.n,
                k: d.k,
                error: RationalRepr::from_ratio(&d.error),
                quarter_c: RationalRepr::from_ratio(&d.quarter_c),
                scaled_abs_error: RationalRepr::from_ratio(&d.scaled_abs_error),
            })
            .collect(),
    }
}

pub fn write_bound_report_csv<W: Write>(report: &BoundReportRepr, w: &mut W) -> io::Result<()> {
    writeln!(
        w,
        "n,k,error_float,scaled_abs_error_num,scaled_abs_error_den,scaled_abs_error_float,quarter_c_float"
    )?;
    for d in &report.diagnostics {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            d.n,
            d.k,
            f64_repr(d.error.float),
            d.scaled_abs_error.num,
            d.scaled_abs_error.den,
            f64_repr(d.scaled_abs_error.float),
            f64_repr(d.quarter_c.float),
        )?;
    }
    Ok(())
}

/// Kill-bin table row for record-time tallies, with the Geometric(1/2)
/// limit law as the reference column.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecordBinRow {
    pub bin: usize,
    /// "0", "1", … for literal kill counts, ">{k_max}" for the overflow bin.
    pub kill_count: String,
    pub count: u64,
    /// Empirical share p̃ of all tallied records.
    pub p_tilde: f64,
    /// Reference count under Geometric(1/2): total × 2^(−(bin+1)), the
    /// overflow bin carrying the whole tail mass 2^(−(k_max+1)).
    pub expected: f64,
    /// count − expected, in units of the binomial standard deviation
    /// √(total·q·(1−q)) of the reference mass q.
    pub deviation: f64,
}

pub fn record_bin_rows(tally: &RecordTimeTally) -> Vec<RecordBinRow> {
    let total = tally.total_records();
    let total_f = total as f64;
    tally
        .counts
        .iter()
        .enumerate()
        .map(|(bin, &count)| {
            let overflow = bin > tally.k_max;
            let q = 0.5f64.powi(if overflow { tally.k_max } else { bin } as i32 + 1);
            let expected = total_f * q;
            let sd = (total_f * q * (1.0 - q)).sqrt();
            RecordBinRow {
                bin,
                kill_count: if overflow {
                    format!(">{}", tally.k_max)
                } else {
                    bin.to_string()
                },
                count,
                p_tilde: if total == 0 { 0.0 } else { count as f64 / total_f },
                expected,
                deviation: if sd > 0.0 {
                    (count as f64 - expected) / sd
                } else {
                    0.0
                },
            }
        })
        .collect()
}

pub fn write_record_bins_csv<W: Write>(rows: &[RecordBinRow], w: &mut W) -> io::Result<()> {
    writeln!(w, "bin,kill_count,count,p_tilde,expected,deviation")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            r.bin,
            r.kill_count,
            r.count,
            f64_repr(r.p_tilde),
            f64_repr(r.expected),
            f64_repr(r.deviation),
        )?;
    }
    Ok(())
}

/// Scalar summary of a record-time campaign (record times reduced to their
/// mean and range; None when no trial completed).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecordTimeSummary {
    pub records_per_trial: u64,
    pub trials: u64,
    pub k_max: usize,
    pub total_records: u64,
    pub time_mean: Option<f64>,
    pub time_min: Option<f64>,
    pub time_max: Option<f64>,
}

pub fn record_time_summary(tally: &RecordTimeTally) -> RecordTimeSummary {
    let times = &tally.record_times;
    let (time_mean, time_min, time_max) = if times.is_empty() {
        (None, None, None)
    } else {
        (
            Some(times.iter().sum::<f64>() / times.len() as f64),
            Some(times.iter().cloned().fold(f64::INFINITY, f64::min)),
            Some(times.iter().cloned().fold(f64::NEG_INFINITY, f64::max)),
        )
    };
    RecordTimeSummary {
        records_per_trial: tally.records_per_trial,
        trials: tally.trials,
        k_max: tally.k_max,
        total_records: tally.total_records(),
        time_mean,
        time_min,
        time_max,
    }
}

/// Long-format row for observation-time aggregates: scalars have no bin.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObservationRow {
    pub quantity: &'static str,
    pub bin: Option<usize>,
    pub value: u64,
}

pub fn observation_rows(agg: &ObservationAggregate) -> Vec<ObservationRow> {
    let t = &agg.totals;
    let mut rows = vec![
        ObservationRow { quantity: "observations_per_trial", bin: None, value: agg.observations_per_trial },
        ObservationRow { quantity: "trials", bin: None, value: agg.trials },
        ObservationRow { quantity: "records_set", bin: None, value: t.records },
        ObservationRow { quantity: "remaining_records", bin: None, value: t.remaining },
        ObservationRow { quantity: "kills_total", bin: None, value: t.killed_total },
        ObservationRow { quantity: "first_coord_records", bin: None, value: t.first_coord_records },
        ObservationRow { quantity: "both_coord_records", bin: None, value: t.both_coord_records },
    ];
    let columns: [(&'static str, &Vec<u64>); 5] = [
        ("by_kills", &t.by_kills),
        ("interior", &t.interior),
        ("first_coord_only", &t.first_only),
        ("second_coord_only", &t.second_only),
        ("both_coords", &t.both),
    ];
    for (quantity, column) in columns {
        for (bin, &value) in column.iter().enumerate() {
            rows.push(ObservationRow {
                quantity,
                bin: Some(bin),
                value,
            });
        }
    }
    rows
}

pub fn write_observation_csv<W: Write>(rows: &[ObservationRow], w: &mut W) -> io::Result<()> {
    writeln!(w, "quantity,bin,value")?;
    for r in rows {
        let bin = r.bin.map(|b| b.to_string()).unwrap_or_default();
        writeln!(w, "{},{},{}", r.quantity, bin, r.value)?;
    }
    Ok(())
}

pub fn write_moments_csv<W: Write>(report: &MomentReport, w: &mut W) -> io::Result<()> {
    writeln!(
        w,
        "name,mean,variance,std_error,ci99_low,ci99_high,ref_mean,ref_mean_error_cap,ref_variance"
    )?;
    for e in &report.estimates {
        let (ref_mean, ref_cap, ref_var) = match &e.reference {
            Some(r) => (
                f64_repr(r.mean),
                r.mean_error_cap.map(f64_repr).unwrap_or_default(),
                r.variance.map(f64_repr).unwrap_or_default(),
            ),
            None => (String::new(), String::new(), String::new()),
        };
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            e.name,
            f64_repr(e.mean),
            f64_repr(e.variance),
            f64_repr(e.std_error),
            f64_repr(e.ci99_low),
            f64_repr(e.ci99_high),
            ref_mean,
            ref_cap,
            ref_var,
        )?;
    }
    Ok(())
}

/// Kill-bin covariance matrix in long format; `row`/`col` index the bins
/// (k = 0..=k_max, then the overflow bin).
pub fn write_moment_covariance_csv<W: Write>(report: &MomentReport, w: &mut W) -> io::Result<()> {
    writeln!(w, "row,col,covariance")?;
    for (i, row) in report.bin_covariance.iter().enumerate() {
        for (j, &value) in row.iter().enumerate() {
            writeln!(w, "{i},{j},{}", f64_repr(value))?;
        }
    }
    Ok(())
}

pub fn write_comparison_csv<W: Write>(report: &ComparisonReport, w: &mut W) -> io::Result<()> {
    writeln!(w, "label,observed,empirical,exact,std_error,z")?;
    for r in &report.rows {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            r.label,
            r.observed,
            f64_repr(r.empirical),
            f64_repr(r.exact),
            f64_repr(r.std_error),
            f64_repr(r.z),
        )?;
    }
    Ok(())
}

pub fn write_gof_csv<W: Write>(report: &GofReport, w: &mut W) -> io::Result<()> {
    writeln!(w, "label,observed,expected,contribution")?;
    for b in &report.bins {
        writeln!(
            w,
            "{},{},{},{}",
            b.label,
            b.observed,
            f64_repr(b.expected),
            f64_repr(b.contribution),
        )?;
    }
    Ok(())
}

/// Pretty JSON with a trailing newline; the standard output encoding for
/// every report type.
pub fn to_json_pretty<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("reports are always serializable");
    text.push('\n');
    text
}
