use lisbt::experiments::MetricRow;

pub const CSV_HEADER: &str = "sweep,estimator,rate_bps_hz,mse_alpha1,mse_alpha2,pilots,realizations,exclusions";

/// Nine significant digits in scientific notation.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else {
        format!("{x:.8e}")
    }
}

pub fn to_csv(rows: &[MetricRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            format_float(r.sweep_value),
            r.estimator,
            format_float(r.rate),
            format_float(r.mse_alpha1),
            format_float(r.mse_alpha2),
            format_float(r.mean_pilots),
            r.realizations,
            r.exclusions
        ));
    }
    out
}
