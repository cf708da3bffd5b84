//! Stable numeric formatting for reports.
//!
//! Every real number written to JSON or CSV is first rounded to 12 significant
//! digits, so report bytes do not depend on last-ulp differences.

use serde::Serializer;

pub const SIGNIFICANT_DIGITS: usize = 12;

/// Rounds `v` to [`SIGNIFICANT_DIGITS`] significant decimal digits.
pub fn round_sig(v: f64) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return v;
    }
    let s = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, v);
    s.parse().unwrap_or(v)
}

/// Shortest decimal representation of `round_sig(v)`.
pub fn format_value(v: f64) -> String {
    let r = round_sig(v);
    if r == 0.0 {
        // collapse -0
        return "0".to_string();
    }
    format!("{r}")
}

pub fn format_opt(v: Option<f64>) -> String {
    v.map(format_value).unwrap_or_default()
}

pub(crate) fn ser_f64<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(round_sig(*v))
}

pub(crate) fn ser_opt_f64<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(v) => s.serialize_f64(round_sig(*v)),
        None => s.serialize_none(),
    }
}
