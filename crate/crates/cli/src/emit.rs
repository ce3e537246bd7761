//! Numeric and file output: a fixed 12-significant-digit decimal format so
//! emitted CSV/JSON bytes are deterministic and re-ingestable, with "inf" as
//! the literal spelling of saturated values.

use crate::Failure;
use std::io::Write;
use std::path::PathBuf;

/// Formats with 12 significant digits, trailing zeros trimmed; infinities
/// spell "inf"/"-inf".
pub fn sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-5..=14).contains(&exp) {
        let s = format!("{:.11e}", x);
        let (mantissa, e) = s.split_once('e').expect("scientific format");
        let mantissa = mantissa.trim_end_matches('0').trim_end_matches('.');
        return format!("{mantissa}e{e}");
    }
    let decimals = (11 - exp).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// JSON scalar: bare number at 12 significant digits, quoted "inf" when
/// saturated.
pub fn json_num(x: f64) -> String {
    if x.is_finite() {
        sig12(x)
    } else {
        format!("\"{}\"", sig12(x))
    }
}

/// Writes to `out` when given, standard output otherwise.
pub fn write_out(out: &Option<PathBuf>, body: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, body)
            .map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(body.as_bytes())
                .and_then(|()| stdout.flush())
                .map_err(|e| Failure::input(format!("cannot write standard output: {e}")))
        }
    }
}
