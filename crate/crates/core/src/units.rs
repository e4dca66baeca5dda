//! Energy units. Every energy in this crate is in GHz (h = 1).

use crate::error::{ModelError, Result};

pub const MHZ: f64 = 1e-3;
pub const KHZ: f64 = 1e-6;

/// Parses an energy such as `12.5`, `12.5GHz`, `3 MHz` or `100kHz` into GHz.
/// A bare number is taken to be GHz.
pub fn parse_energy(text: &str) -> Result<f64> {
    let trimmed = text.trim();
    let lower = trimmed.to_ascii_lowercase();
    let (number, scale) = if let Some(rest) = lower.strip_suffix("ghz") {
        (rest, 1.0)
    } else if let Some(rest) = lower.strip_suffix("mhz") {
        (rest, MHZ)
    } else if let Some(rest) = lower.strip_suffix("khz") {
        (rest, KHZ)
    } else {
        (lower.as_str(), 1.0)
    };
    number
        .trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .map(|v| v * scale)
        .ok_or_else(|| ModelError::BadEnergy(trimmed.to_string()))
}
