//! Channel files, inline channel vectors and comma-separated lists.

use std::fs;
use std::path::Path;

use mse_region::io::parse_channel_json;
use mse_region::ChannelSet;
use num_complex::Complex64;

use crate::error::{CliError, CliResult};

/// Parses `3`, `-2i`, `i`, `1.5-2i`, `1e-3+4e2i` and the like.
pub fn parse_complex(s: &str) -> CliResult<Complex64> {
    let text = s.trim();
    let bad = || CliError::input(format!("cannot parse complex number {s:?}"));
    let Some(body) = text.strip_suffix('i') else {
        return text.parse::<f64>().map(Complex64::from).map_err(|_| bad());
    };
    // split at the last sign that is not leading and not an exponent sign
    let split = body
        .char_indices()
        .filter(|&(i, c)| {
            (c == '+' || c == '-') && i > 0 && !matches!(body.as_bytes()[i - 1], b'e' | b'E')
        })
        .map(|(i, _)| i)
        .next_back();
    let imag = |t: &str| -> CliResult<f64> {
        match t {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => t.parse::<f64>().map_err(|_| bad()),
        }
    };
    match split {
        Some(i) => {
            let re = body[..i].parse::<f64>().map_err(|_| bad())?;
            Ok(Complex64::new(re, imag(&body[i..])?))
        }
        None => Ok(Complex64::new(0.0, imag(body)?)),
    }
}

pub fn parse_complex_list(s: &str) -> CliResult<Vec<Complex64>> {
    s.split(',').map(parse_complex).collect()
}

pub fn parse_real_list(s: &str) -> CliResult<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| CliError::input(format!("cannot parse number {t:?} in {s:?}")))
        })
        .collect()
}

pub fn read_channel_file(path: &Path) -> CliResult<ChannelSet<f64>> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    parse_channel_json(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

/// A channel file, or two inline vectors for quick two-user runs.
pub fn load_channels(
    file: Option<&Path>,
    h1: Option<&str>,
    h2: Option<&str>,
) -> CliResult<ChannelSet<f64>> {
    match (file, h1, h2) {
        (Some(path), None, None) => read_channel_file(path),
        (None, Some(a), Some(b)) => {
            let (a, b) = (parse_complex_list(a)?, parse_complex_list(b)?);
            if a.len() != b.len() {
                return Err(CliError::input(format!(
                    "--h1 has {} entries but --h2 has {}",
                    a.len(),
                    b.len()
                )));
            }
            Ok(ChannelSet::from_columns(vec![a, b])?)
        }
        _ => Err(CliError::input("give either --channels FILE or both --h1 and --h2")),
    }
}
