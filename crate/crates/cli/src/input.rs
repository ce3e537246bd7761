//! Input parsing: forecast CSV files (one realized-event probability per
//! row) and flat key=value run configs. Errors carry 1-based data-row or
//! line numbers so a bad cell is locatable.

use crate::Failure;
use riskprof::profile::ForecastSet;
use std::path::Path;

/// Reads a forecast CSV. Requires a `realized_prob` column with values in
/// [0, 1]; other columns (`correct`, `model_id`, ...) pass through unchecked.
pub fn read_forecast_file(path: &Path) -> Result<ForecastSet, Failure> {
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| Failure::input(format!("cannot open {}: {e}", path.display())))?;
    let headers = reader
        .headers()
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    let col = headers
        .iter()
        .position(|h| h.trim() == "realized_prob")
        .ok_or_else(|| {
            Failure::input(format!(
                "{}: missing required column realized_prob",
                path.display()
            ))
        })?;

    let mut probs = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let row = idx + 1;
        let record =
            record.map_err(|e| Failure::input(format!("{}: row {row}: {e}", path.display())))?;
        let field = record.get(col).ok_or_else(|| {
            Failure::input(format!("{}: row {row}: missing realized_prob", path.display()))
        })?;
        let p: f64 = field.trim().parse().map_err(|_| {
            Failure::input(format!(
                "{}: row {row}: cannot parse realized_prob {field:?}",
                path.display()
            ))
        })?;
        if !(0.0..=1.0).contains(&p) {
            return Err(Failure::input(format!(
                "{}: row {row}: realized_prob {p} outside [0, 1]",
                path.display()
            )));
        }
        probs.push(p);
    }

    ForecastSet::new(probs)
        .map_err(|_| Failure::input(format!("{}: no forecast rows", path.display())))
}

/// Parses a flat key=value config file; `#` starts a comment line.
pub fn read_key_values(path: &Path) -> Result<Vec<(String, String)>, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("cannot open {}: {e}", path.display())))?;
    let mut pairs = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Failure::input(format!(
                "{}: line {}: expected key=value",
                path.display(),
                idx + 1
            ))
        })?;
        pairs.push((key.trim().to_string(), value.trim().to_string()));
    }
    Ok(pairs)
}

/// Parses one typed config field, naming the field on failure.
pub fn parse_field<T: std::str::FromStr>(field: &str, value: &str) -> Result<T, Failure> {
    value
        .parse()
        .map_err(|_| Failure::input(format!("invalid value for {field}: {value:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_temp(name: &str, body: &str) -> std::path::PathBuf {
        let path = std::env::temp_dir().join(format!("riskprof-input-{name}-{}", std::process::id()));
        let mut f = std::fs::File::create(&path).unwrap();
        f.write_all(body.as_bytes()).unwrap();
        path
    }

    #[test]
    fn forecast_file_roundtrip() {
        let path = write_temp("ok.csv", "model_id,realized_prob,correct\nm,0.2,0\nm,0.8,1\n");
        let fs = read_forecast_file(&path).unwrap();
        assert_eq!(fs.probs(), &[0.2, 0.8]);
        std::fs::remove_file(path).unwrap();
    }

    #[test]
    fn forecast_errors_carry_row_numbers() {
        let path = write_temp("bad.csv", "realized_prob\n0.4\n1.7\n");
        let err = read_forecast_file(&path).unwrap_err();
        assert!(err.message.contains("row 2"), "{}", err.message);
        assert_eq!(err.code, 2);
        std::fs::remove_file(path).unwrap();
    }

    #[test]
    fn header_only_file_is_rejected() {
        let path = write_temp("empty.csv", "realized_prob\n");
        assert!(read_forecast_file(&path).is_err());
        std::fs::remove_file(path).unwrap();
    }

    #[test]
    fn key_values_skip_comments() {
        let path = write_temp("cfg", "# run\nseed = 7\n\nn_trials=3\n");
        let pairs = read_key_values(&path).unwrap();
        assert_eq!(
            pairs,
            vec![
                ("seed".to_string(), "7".to_string()),
                ("n_trials".to_string(), "3".to_string())
            ]
        );
        std::fs::remove_file(path).unwrap();
    }
}
