//! Plain-text and JSON vector files for states and diagonal observables.
//!
//! A file holds either a JSON array of numbers or one decimal number per
//! line. Blank lines and lines starting with `#` are ignored in the text form.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::observables::DiagonalObservable;
use crate::states::RealWavefunction;

pub fn parse_vector(text: &str) -> Result<Vec<f64>> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('[') {
        return serde_json::from_str(trimmed).map_err(|e| Error::Parse(e.to_string()));
    }
    text.lines()
        .enumerate()
        .map(|(i, line)| (i, line.trim()))
        .filter(|(_, line)| !line.is_empty() && !line.starts_with('#'))
        .map(|(i, line)| {
            line.parse::<f64>()
                .map_err(|e| Error::Parse(format!("line {}: {e}: {line:?}", i + 1)))
        })
        .collect()
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

/// Loads amplitudes, renormalizing when within 1% of unit norm.
pub fn load_state(path: &Path) -> Result<RealWavefunction> {
    RealWavefunction::from_loaded(parse_vector(&read(path)?)?)
}

pub fn load_observable(path: &Path) -> Result<DiagonalObservable> {
    let label = path
        .file_stem()
        .map_or_else(|| "file".to_string(), |s| s.to_string_lossy().into_owned());
    DiagonalObservable::new(parse_vector(&read(path)?)?, label)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_and_text_agree() {
        let a = parse_vector("[0.5, -0.5, 0.5, 0.5]").unwrap();
        let b = parse_vector("# amplitudes\n0.5\n-0.5\n\n0.5\n0.5\n").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn bad_line_is_reported() {
        let err = parse_vector("1.0\nabc\n").unwrap_err();
        assert!(matches!(err, Error::Parse(ref m) if m.contains("line 2")));
        assert!(parse_vector("[1.0, ").is_err());
    }
}
