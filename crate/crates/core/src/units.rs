//! Physical constants, decibel helpers, and SI-suffixed quantity parsing.

use crate::error::{Error, Result};

/// Planck constant (J s), 2019 SI exact value.
pub const PLANCK_CONSTANT: f64 = 6.62607015e-34;

/// Speed of light in vacuum (m/s), exact.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Elementary charge (C), 2019 SI exact value.
pub const ELECTRON_CHARGE: f64 = 1.602176634e-19;

/// Energy of one photon at wavelength `lambda_m` (J).
pub fn photon_energy(lambda_m: f64) -> f64 {
    PLANCK_CONSTANT * SPEED_OF_LIGHT / lambda_m
}

/// Power ratio to decibels.
pub fn db(ratio: f64) -> f64 {
    10.0 * ratio.log10()
}

/// Decibels to power ratio.
pub fn db_to_linear(db: f64) -> f64 {
    10.0_f64.powf(db / 10.0)
}

/// Power in watts to dBm.
pub fn watts_to_dbm(p_w: f64) -> f64 {
    10.0 * (p_w / 1e-3).log10()
}

/// dBm to watts.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    1e-3 * 10.0_f64.powf(dbm / 10.0)
}

/// Parse a number with an optional SI prefix and unit word, e.g. `0.5 nW`,
/// `1.3MHz`, `1064 nm`, `2e-3`, `-139`. The unit word itself (W, Hz, s, m,
/// rad, ...) is checked for a known prefix and otherwise ignored, so the
/// caller decides what the value means.
pub fn parse_quantity(text: &str) -> Result<f64> {
    let s = text.trim();
    if s.is_empty() {
        return Err(Error::domain("empty quantity"));
    }
    // Longest prefix of the string that parses as a number.
    let mut split = 0;
    for i in (1..=s.len()).rev() {
        if s.is_char_boundary(i) && s[..i].parse::<f64>().is_ok() {
            split = i;
            break;
        }
    }
    if split == 0 {
        return Err(Error::domain(format!("`{s}` is not a number")));
    }
    let (num, rest) = s.split_at(split);
    let value: f64 = num.parse().expect("prefix already validated");
    let unit = rest.trim();
    if unit.is_empty() {
        return Ok(value);
    }
    let mult = si_multiplier(unit)
        .ok_or_else(|| Error::domain(format!("unrecognized unit `{unit}` in `{s}`")))?;
    Ok(value * mult)
}

/// Multiplier implied by the SI prefix of a unit token, or None if the
/// token is not a recognized unit.
fn si_multiplier(unit: &str) -> Option<f64> {
    const BASES: [&str; 9] = ["Hz", "rad", "dB", "W", "s", "m", "V", "A", "J"];
    for b in BASES {
        if let Some(prefix) = unit.strip_suffix(b) {
            return prefix_multiplier(prefix);
        }
    }
    None
}

fn prefix_multiplier(prefix: &str) -> Option<f64> {
    match prefix {
        "" => Some(1.0),
        "f" => Some(1e-15),
        "p" => Some(1e-12),
        "n" => Some(1e-9),
        "u" | "µ" => Some(1e-6),
        "m" => Some(1e-3),
        "k" => Some(1e3),
        "M" => Some(1e6),
        "G" => Some(1e9),
        "T" => Some(1e12),
        _ => None,
    }
}
