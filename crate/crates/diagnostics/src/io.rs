//! Plain-text spectrum and Walsh tables.
//!
//! Spectrum files hold `# key=value` metadata lines followed by one
//! eigenvalue (GHz) per line. Walsh files are CSV with the columns
//! `bitstring,E_b,c_b,tracking_quality`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{DiagnosticsError, Result};
use crate::walsh::{bitstring, parse_bitstring, WalshSpectrum};

pub const SPECTRUM_SCHEMA: &str = "spectrum-v1";
pub const WALSH_SCHEMA: &str = "walsh-v1";
pub const WALSH_HEADER: &str = "bitstring,E_b,c_b,tracking_quality";

pub fn write_spectrum(levels: &[f64], metadata: &BTreeMap<String, String>) -> String {
    let mut out = format!("# schema={SPECTRUM_SCHEMA}\n");
    for (k, v) in metadata.iter().filter(|(k, _)| k.as_str() != "schema") {
        let _ = writeln!(out, "# {k}={v}");
    }
    for e in levels {
        let _ = writeln!(out, "{e:e}");
    }
    out
}

pub fn read_spectrum(text: &str) -> Result<(Vec<f64>, BTreeMap<String, String>)> {
    let mut metadata = BTreeMap::new();
    let mut levels = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            if let Some((k, v)) = rest.split_once('=') {
                metadata.insert(k.trim().to_string(), v.trim().to_string());
            }
            continue;
        }
        let value = line.split(',').next().unwrap_or(line).trim();
        let e: f64 = value
            .parse()
            .map_err(|_| DiagnosticsError::Parse { line: i + 1, reason: format!("`{value}` is not a number") })?;
        if !e.is_finite() {
            return Err(DiagnosticsError::Parse { line: i + 1, reason: "non-finite eigenvalue".into() });
        }
        levels.push(e);
    }
    if let Some(schema) = metadata.get("schema") {
        if schema != SPECTRUM_SCHEMA {
            return Err(DiagnosticsError::Parse { line: 1, reason: format!("unsupported schema `{schema}`") });
        }
    }
    Ok((levels, metadata))
}

pub fn write_walsh(spectrum: &WalshSpectrum) -> String {
    let mut out = format!("# schema={WALSH_SCHEMA}\n{WALSH_HEADER}\n");
    for b in 0..spectrum.levels.len() {
        let _ = writeln!(
            out,
            "{},{:e},{:e},{}",
            bitstring(b, spectrum.n_sites),
            spectrum.levels[b],
            spectrum.coefficients[b],
            spectrum.tracking_quality[b]
        );
    }
    out
}

pub fn read_walsh(text: &str) -> Result<WalshSpectrum> {
    let mut rows: Vec<(usize, f64, f64, f64)> = Vec::new();
    let mut n_sites = None;
    let mut header_seen = false;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !header_seen {
            if line != WALSH_HEADER {
                return Err(DiagnosticsError::Parse { line: i + 1, reason: format!("expected header `{WALSH_HEADER}`") });
            }
            header_seen = true;
            continue;
        }
        let parse_err = |reason: String| DiagnosticsError::Parse { line: i + 1, reason };
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 4 {
            return Err(parse_err(format!("expected 4 fields, got {}", fields.len())));
        }
        let len = fields[0].len();
        if *n_sites.get_or_insert(len) != len {
            return Err(parse_err("bitstrings of different lengths".into()));
        }
        let b = parse_bitstring(fields[0]).map_err(|e| parse_err(e.to_string()))?;
        let num = |s: &str| s.parse::<f64>().map_err(|_| parse_err(format!("`{s}` is not a number")));
        rows.push((b, num(fields[1])?, num(fields[2])?, num(fields[3])?));
    }
    let n_sites = n_sites.ok_or(DiagnosticsError::IncompleteLevels { expected: 1, got: 0 })?;
    let size = 1usize << n_sites;
    if rows.len() != size {
        return Err(DiagnosticsError::IncompleteLevels { expected: size, got: rows.len() });
    }
    let mut levels = vec![f64::NAN; size];
    let mut coefficients = vec![f64::NAN; size];
    let mut quality = vec![f64::NAN; size];
    for (b, e, c, q) in rows {
        if !levels[b].is_nan() {
            return Err(DiagnosticsError::InvalidInput(format!("duplicate bitstring {}", bitstring(b, n_sites))));
        }
        levels[b] = e;
        coefficients[b] = c;
        quality[b] = q;
    }
    Ok(WalshSpectrum { n_sites, levels, coefficients, tracking_quality: quality })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spectrum_round_trip() {
        let levels = vec![-1.25, 0.0, 3.0e-7, 12.5];
        let meta = BTreeMap::from([("seed".to_string(), "7".to_string()), ("T".to_string(), "0.003".to_string())]);
        let text = write_spectrum(&levels, &meta);
        let (back, back_meta) = read_spectrum(&text).unwrap();
        assert_eq!(back, levels);
        assert_eq!(back_meta["seed"], "7");
        assert_eq!(back_meta["schema"], SPECTRUM_SCHEMA);
    }

    #[test]
    fn spectrum_errors() {
        assert!(matches!(read_spectrum("1.0\nabc\n"), Err(DiagnosticsError::Parse { line: 2, .. })));
        assert!(read_spectrum("# schema=spectrum-v9\n1.0\n").is_err());
        assert!(read_spectrum("inf\n").is_err());
    }

    #[test]
    fn walsh_round_trip() {
        let w = WalshSpectrum::from_levels(3, vec![0.0, 5.0, 5.1, 10.2, 4.9, 9.8, 10.0, 15.3], Some(vec![1.0, 0.97, 0.99, 0.5, 1.0, 0.8, 0.7, 0.6]))
            .unwrap();
        let back = read_walsh(&write_walsh(&w)).unwrap();
        assert_eq!(back, w);
    }

    #[test]
    fn walsh_errors() {
        assert!(read_walsh("bitstring,E_b,c_b,tracking_quality\n00,0,0,1\n").is_err());
        assert!(read_walsh("a,b\n").is_err());
        assert!(read_walsh("bitstring,E_b,c_b,tracking_quality\n0,0,0,1\n0,1,0,1\n").is_err());
    }
}
