//! Tabular output rows shared by the certification table and start sweeps.

use serde::Serialize;

use crate::instance::Instance;
use crate::metric::Length;
use crate::optimum::{bounds, ratio_to_f64, RatioRow};
use crate::sweep::SweepRow;

/// Column order of every CSV report.
pub const CSV_HEADER: &str =
    "k,n,metric,policy,start,open_len,closed_len,opt,ratio_open,ratio_closed,chain,lower_bound,upper_bound";

/// Significant digits for non-integer values.
pub const SIGNIFICANT_DIGITS: usize = 12;

/// Formats `x` with at most 12 significant digits, without exponent or
/// trailing zeros.
pub fn format_number(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    format!("{}", round_significant(x))
}

/// The value [`format_number`] prints.
pub fn round_significant(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .expect("formatted float parses")
}

pub fn format_length(len: &Length) -> String {
    match len.exact_true() {
        Some(v) => v.to_string(),
        None => format_number(len.approx),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportRow {
    pub k: Option<u32>,
    pub n: usize,
    pub metric: String,
    pub policy: String,
    pub start: usize,
    pub open_len: f64,
    pub closed_len: f64,
    pub opt: Option<f64>,
    pub ratio_open: Option<f64>,
    pub ratio_closed: Option<f64>,
    pub chain: Option<f64>,
    pub lower_bound: f64,
    pub upper_bound: f64,
}

impl ReportRow {
    pub fn from_ratio(row: &RatioRow) -> Self {
        Self {
            k: row.k,
            n: row.n,
            metric: row.metric.to_string(),
            policy: row.policy.clone(),
            start: row.start,
            open_len: round_significant(row.nnr_open_length.approx),
            closed_len: round_significant(row.nnr_closed_length.approx),
            opt: Some(round_significant(row.opt_length.approx)),
            ratio_open: Some(round_significant(row.ratio_open)),
            ratio_closed: Some(round_significant(row.ratio_closed)),
            chain: row.bounds.chain.map(ratio_to_f64),
            lower_bound: round_significant(row.bounds.lower_bound),
            upper_bound: row.bounds.upper_bound,
        }
    }

    pub fn from_sweep(instance: &Instance, row: &SweepRow) -> Self {
        let b = bounds(instance.len() as u64, instance.family_k());
        Self {
            k: instance.family_k(),
            n: instance.len(),
            metric: instance.metric_kind().to_string(),
            policy: row.policy.to_string(),
            start: row.start,
            open_len: round_significant(row.open_length.approx),
            closed_len: round_significant(row.closed_length.approx),
            opt: row.optimum.map(|o| round_significant(o.approx)),
            ratio_open: row.ratio_open.map(round_significant),
            ratio_closed: row.ratio_closed.map(round_significant),
            chain: b.chain.map(ratio_to_f64),
            lower_bound: round_significant(b.lower_bound),
            upper_bound: b.upper_bound,
        }
    }

    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map(format_number).unwrap_or_default();
        [
            self.k.map(|k| k.to_string()).unwrap_or_default(),
            self.n.to_string(),
            self.metric.clone(),
            self.policy.clone(),
            self.start.to_string(),
            format_number(self.open_len),
            format_number(self.closed_len),
            opt(self.opt),
            opt(self.ratio_open),
            opt(self.ratio_closed),
            opt(self.chain),
            format_number(self.lower_bound),
            format_number(self.upper_bound),
        ]
        .join(",")
    }
}

/// Header plus one line per row, newline-terminated.
pub fn to_csv(rows: &[ReportRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.to_csv());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::MetricKind;
    use crate::optimum::theorem_row;
    use proptest::prelude::*;

    #[test]
    fn irrational_lengths_use_twelve_digits() {
        assert_eq!(format_number(9.0 + 5f64.sqrt()), "11.2360679775");
        assert_eq!(format_number(2.0), "2");
        assert_eq!(format_number(0.9), "0.9");
        assert_eq!(format_number(1021.0 / 506.0), "2.01778656126");
    }

    #[test]
    fn k0_row() {
        let row = ReportRow::from_ratio(&theorem_row(0, MetricKind::L2).unwrap());
        assert_eq!(
            row.to_csv(),
            "0,10,l2,adversarial,0,9,11.2360679775,10,0.9,1.12360679775,0.75,0.580482023722,2.5"
        );
        assert_eq!(CSV_HEADER.split(',').count(), row.to_csv().split(',').count());
    }

    proptest! {
        #[test]
        fn csv_numbers_round_trip(x in -1e9f64..1e9) {
            let s = format_number(x);
            let back: f64 = s.parse().unwrap();
            prop_assert_eq!(back, round_significant(x));
            prop_assert_eq!(format_number(back), s);
        }
    }
}
