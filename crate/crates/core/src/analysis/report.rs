use std::io::{self, Write};

use serde_json::{json, Map, Value};

use super::TrialRow;

pub const CSV_HEADER: &str =
    "protocol,param_name,param_value,trial,efficiency,z_ctrl_err,x_ctrl_err,test_err,aborted,eve_accuracy,eve_coverage";

/// Formats like C's `%.6g`: six significant digits, trailing zeros dropped,
/// scientific notation outside `[1e-4, 1e6)`.
pub fn format_sig6(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..6).contains(&exp) {
        let mantissa = trim_fraction(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (5 - exp) as usize;
        trim_fraction(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn csv_line(row: &TrialRow) -> String {
    [
        row.protocol.name().to_string(),
        row.param_name.clone(),
        format_sig6(row.param_value),
        row.trial.to_string(),
        format_sig6(row.efficiency),
        format_sig6(row.z_ctrl_err),
        format_sig6(row.x_ctrl_err),
        format_sig6(row.test_err),
        u8::from(row.aborted).to_string(),
        format_sig6(row.eve_accuracy.unwrap_or(f64::NAN)),
        format_sig6(row.eve_coverage),
    ]
    .join(",")
}

/// Writes `# key=value` metadata lines, the column header, then one line per row.
pub fn write_csv<'a, W: Write + ?Sized>(
    out: &mut W,
    metadata: &[(String, String)],
    rows: impl IntoIterator<Item = &'a TrialRow>,
) -> io::Result<()> {
    for (k, v) in metadata {
        writeln!(out, "# {k}={v}")?;
    }
    writeln!(out, "{CSV_HEADER}")?;
    for row in rows {
        writeln!(out, "{}", csv_line(row))?;
    }
    Ok(())
}

/// Same content as [`write_csv`]: `{"header": {...}, "rows": [...]}`.
pub fn to_json<'a>(metadata: &[(String, String)], rows: impl IntoIterator<Item = &'a TrialRow>) -> Value {
    let header: Map<String, Value> = metadata
        .iter()
        .map(|(k, v)| (k.clone(), Value::String(v.clone())))
        .collect();
    let rows: Vec<Value> = rows
        .into_iter()
        .map(|r| {
            json!({
                "protocol": r.protocol.name(),
                "param_name": r.param_name,
                "param_value": r.param_value,
                "trial": r.trial,
                "efficiency": r.efficiency,
                "z_ctrl_err": r.z_ctrl_err,
                "x_ctrl_err": r.x_ctrl_err,
                "test_err": r.test_err,
                "aborted": r.aborted,
                "eve_accuracy": r.eve_accuracy,
                "eve_coverage": r.eve_coverage,
            })
        })
        .collect();
    json!({ "header": header, "rows": rows })
}
