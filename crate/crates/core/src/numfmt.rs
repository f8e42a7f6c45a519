//! Number formatting shared by every CSV/report emitter: scientific
//! notation with 12 significant digits, so outputs round-trip losslessly
//! enough for reproducibility audits.

pub fn sig12(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{x:.11e}")
    }
}
