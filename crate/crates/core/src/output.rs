//! Fixed text formatting shared by every CSV writer.

/// 17 significant digits in scientific notation; round-trips any `f64`.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}
