//! Scenario documents: a flat, human-readable key/value description of one
//! detection run, with a canonical form and a content digest used as the
//! reproducibility stamp on every artifact.
//!
//! Canonical keys (all always present in canonical form, sorted):
//!
//! ```text
//! cyclostationary  true|false        2Ω-modulated noise variance
//! dark_floor       W/Hz              additive electronic floor (0 = off)
//! detuning         Hz                beat frequency Ω/2π
//! duration         s                 trace length
//! eta              -                 quantum efficiency
//! gain             -                 electronic power gain
//! hypothesis       standard|cancel   image-vacuum noise hypothesis
//! jitter_rms       rad               residual phase jitter (scanned mode)
//! lo_kind          mono|bichromatic
//! lo_power         W                 total local-oscillator power
//! lock_k           integer           lock point k·π (locked mode)
//! phase_mode       averaged|locked|scanned
//! phi_0 phi_1 phi_2 phi_s  rad       optical phases
//! rbw              Hz                resolution bandwidth
//! sample_rate      Hz                0 = auto (16 × detuning)
//! scan_rate        rad/s             phase sweep rate (scanned mode)
//! seed             u64               master random seed
//! signal_power     W                 optical signal power
//! signal_state     coherent|vacuum|squeezed
//! squeezing        -                 squeezing parameter s
//! wavelength       m
//! ```
//!
//! Values accept SI suffixes on parse (`0.5 nW`, `1.3 MHz`); the canonical
//! form stores plain base-unit numbers.

use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::model::NoiseHypothesis;
use crate::units::parse_quantity;

/// Local-oscillator kind selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoKind {
    Mono,
    Bichromatic,
}

/// Signal quantum-state selector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SignalStateKey {
    Coherent,
    Vacuum,
    Squeezed,
}

/// Phase-handling selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseModeKey {
    Averaged,
    Locked,
    Scanned,
}

/// A parsed scenario document with every field resolved to base units.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioDoc {
    pub signal_power_w: f64,
    pub signal_state: SignalStateKey,
    pub squeezing: f64,
    pub wavelength_m: f64,
    pub lo_kind: LoKind,
    pub lo_power_w: f64,
    pub detuning_hz: f64,
    pub phi_s: f64,
    pub phi_0: f64,
    pub phi_1: f64,
    pub phi_2: f64,
    pub phase_mode: PhaseModeKey,
    pub lock_k: i64,
    pub scan_rate_rad_s: f64,
    pub jitter_rms_rad: f64,
    pub hypothesis: NoiseHypothesis,
    pub eta: f64,
    pub gain: f64,
    pub rbw_hz: f64,
    pub sample_rate_hz: f64,
    pub duration_s: f64,
    pub seed: u64,
    pub cyclostationary: bool,
    pub dark_floor_w_per_hz: f64,
}

impl Default for ScenarioDoc {
    /// The reference bench: 0.5 nW coherent signal at 1064 nm, 2.0 mW
    /// bichromatic oscillator detuned ±1.3 MHz, 70% efficiency, 1 kHz RBW,
    /// calibrated default gain.
    fn default() -> Self {
        Self {
            signal_power_w: 0.5e-9,
            signal_state: SignalStateKey::Coherent,
            squeezing: 0.0,
            wavelength_m: 1064e-9,
            lo_kind: LoKind::Bichromatic,
            lo_power_w: 2.0e-3,
            detuning_hz: 1.3e6,
            phi_s: 0.0,
            phi_0: 0.0,
            phi_1: 0.0,
            phi_2: 0.0,
            phase_mode: PhaseModeKey::Averaged,
            lock_k: 0,
            scan_rate_rad_s: 0.0,
            jitter_rms_rad: 0.0,
            hypothesis: NoiseHypothesis::VacuumCancellation,
            eta: 0.7,
            gain: crate::pipeline::DEFAULT_GAIN,
            rbw_hz: 1e3,
            sample_rate_hz: 0.0, // auto
            duration_s: 0.01,
            seed: 1,
            cyclostationary: false,
            dark_floor_w_per_hz: 0.0,
        }
    }
}

impl ScenarioDoc {
    /// Sample rate with the auto default resolved.
    pub fn resolved_sample_rate_hz(&self) -> f64 {
        if self.sample_rate_hz > 0.0 {
            self.sample_rate_hz
        } else {
            16.0 * self.detuning_hz
        }
    }

    /// Apply one key/value assignment. Unknown keys and malformed values
    /// are reported with the offending key named.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let num = || -> Result<f64> {
            parse_quantity(value).map_err(|e| Error::parse(key, e.to_string()))
        };
        match key {
            "signal_power" => self.signal_power_w = num()?,
            "signal_state" => {
                self.signal_state = match value {
                    "coherent" => SignalStateKey::Coherent,
                    "vacuum" => SignalStateKey::Vacuum,
                    "squeezed" => SignalStateKey::Squeezed,
                    _ => {
                        return Err(Error::parse(
                            key,
                            format!("`{value}` is not coherent|vacuum|squeezed"),
                        ))
                    }
                }
            }
            "squeezing" => self.squeezing = num()?,
            "wavelength" => self.wavelength_m = num()?,
            "lo_kind" => {
                self.lo_kind = match value {
                    "mono" => LoKind::Mono,
                    "bichromatic" | "blo" => LoKind::Bichromatic,
                    _ => {
                        return Err(Error::parse(
                            key,
                            format!("`{value}` is not mono|bichromatic"),
                        ))
                    }
                }
            }
            "lo_power" => self.lo_power_w = num()?,
            "detuning" => self.detuning_hz = num()?,
            "phi_s" => self.phi_s = num()?,
            "phi_0" => self.phi_0 = num()?,
            "phi_1" => self.phi_1 = num()?,
            "phi_2" => self.phi_2 = num()?,
            "phase_mode" => {
                self.phase_mode = match value {
                    "averaged" => PhaseModeKey::Averaged,
                    "locked" => PhaseModeKey::Locked,
                    "scanned" | "scan" => PhaseModeKey::Scanned,
                    _ => {
                        return Err(Error::parse(
                            key,
                            format!("`{value}` is not averaged|locked|scanned"),
                        ))
                    }
                }
            }
            "lock_k" => {
                self.lock_k = value
                    .parse()
                    .map_err(|_| Error::parse(key, format!("`{value}` is not an integer")))?
            }
            "scan_rate" => self.scan_rate_rad_s = num()?,
            "jitter_rms" => self.jitter_rms_rad = num()?,
            "hypothesis" => {
                self.hypothesis = match value {
                    "standard" => NoiseHypothesis::StandardImageVacuum,
                    "cancel" | "cancellation" => NoiseHypothesis::VacuumCancellation,
                    _ => {
                        return Err(Error::parse(
                            key,
                            format!("`{value}` is not standard|cancel"),
                        ))
                    }
                }
            }
            "eta" => self.eta = num()?,
            "gain" => self.gain = num()?,
            "rbw" => self.rbw_hz = num()?,
            "sample_rate" => self.sample_rate_hz = if value == "auto" { 0.0 } else { num()? },
            "duration" => self.duration_s = num()?,
            "seed" => {
                self.seed = value
                    .parse()
                    .map_err(|_| Error::parse(key, format!("`{value}` is not a u64")))?
            }
            "cyclostationary" => {
                self.cyclostationary = match value {
                    "true" | "1" | "yes" => true,
                    "false" | "0" | "no" => false,
                    _ => return Err(Error::parse(key, format!("`{value}` is not a boolean"))),
                }
            }
            "dark_floor" => self.dark_floor_w_per_hz = num()?,
            _ => return Err(Error::parse(key, "unknown scenario key")),
        }
        Ok(())
    }

    /// Parse a scenario document. Lines are `key = value`; `#` starts a
    /// comment; later assignments win.
    pub fn parse(text: &str) -> Result<Self> {
        let mut doc = ScenarioDoc::default();
        for raw in text.lines() {
            let line = match raw.find('#') {
                Some(i) => &raw[..i],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::parse(line, "expected `key = value`"));
            };
            doc.set(key.trim(), value.trim())?;
        }
        Ok(doc)
    }

    /// Canonical form: every key present, sorted, base units, sample rate
    /// resolved. The digest is computed over exactly this text.
    pub fn canonical(&self) -> String {
        let mut kv: BTreeMap<&str, String> = BTreeMap::new();
        kv.insert("cyclostationary", self.cyclostationary.to_string());
        kv.insert("dark_floor", self.dark_floor_w_per_hz.to_string());
        kv.insert("detuning", self.detuning_hz.to_string());
        kv.insert("duration", self.duration_s.to_string());
        kv.insert("eta", self.eta.to_string());
        kv.insert("gain", self.gain.to_string());
        kv.insert(
            "hypothesis",
            match self.hypothesis {
                NoiseHypothesis::StandardImageVacuum => "standard".into(),
                NoiseHypothesis::VacuumCancellation => "cancel".into(),
            },
        );
        kv.insert("jitter_rms", self.jitter_rms_rad.to_string());
        kv.insert(
            "lo_kind",
            match self.lo_kind {
                LoKind::Mono => "mono".into(),
                LoKind::Bichromatic => "bichromatic".into(),
            },
        );
        kv.insert("lo_power", self.lo_power_w.to_string());
        kv.insert("lock_k", self.lock_k.to_string());
        kv.insert(
            "phase_mode",
            match self.phase_mode {
                PhaseModeKey::Averaged => "averaged".into(),
                PhaseModeKey::Locked => "locked".into(),
                PhaseModeKey::Scanned => "scanned".into(),
            },
        );
        kv.insert("phi_0", self.phi_0.to_string());
        kv.insert("phi_1", self.phi_1.to_string());
        kv.insert("phi_2", self.phi_2.to_string());
        kv.insert("phi_s", self.phi_s.to_string());
        kv.insert("rbw", self.rbw_hz.to_string());
        kv.insert("sample_rate", self.resolved_sample_rate_hz().to_string());
        kv.insert("scan_rate", self.scan_rate_rad_s.to_string());
        kv.insert("seed", self.seed.to_string());
        kv.insert("signal_power", self.signal_power_w.to_string());
        kv.insert(
            "signal_state",
            match self.signal_state {
                SignalStateKey::Coherent => "coherent".into(),
                SignalStateKey::Vacuum => "vacuum".into(),
                SignalStateKey::Squeezed => "squeezed".into(),
            },
        );
        kv.insert("squeezing", self.squeezing.to_string());
        kv.insert("wavelength", self.wavelength_m.to_string());

        let mut out = String::new();
        for (k, v) in kv {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }

    /// Raw 32-byte digest of the canonical document.
    pub fn digest_raw(&self) -> [u8; 32] {
        let mut h = Sha256::new();
        h.update(self.canonical().as_bytes());
        h.finalize().into()
    }

    /// Short hex digest used to stamp artifacts.
    pub fn digest(&self) -> String {
        let raw = self.digest_raw();
        raw[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_round_trips_through_parse() {
        let doc = ScenarioDoc {
            signal_power_w: 1.7e-9,
            seed: 99,
            phase_mode: PhaseModeKey::Locked,
            lock_k: -3,
            ..ScenarioDoc::default()
        };
        let text = doc.canonical();
        let back = ScenarioDoc::parse(&text).unwrap();
        assert_eq!(back.digest(), doc.digest());
        assert_eq!(back, {
            let mut d = doc.clone();
            d.sample_rate_hz = doc.resolved_sample_rate_hz();
            d
        });
    }

    #[test]
    fn si_suffixes_and_comments() {
        let text = "\
# bench setup
signal_power = 0.5 nW
lo_power = 2 mW   # total
rbw = 1 kHz
detuning = 1.3 MHz
wavelength = 1064 nm
";
        let doc = ScenarioDoc::parse(text).unwrap();
        assert_eq!(doc.signal_power_w, 0.5e-9);
        assert_eq!(doc.lo_power_w, 2e-3);
        assert_eq!(doc.rbw_hz, 1e3);
        assert_eq!(doc.detuning_hz, 1.3e6);
        assert_eq!(doc.wavelength_m, 1064e-9);
    }

    #[test]
    fn unknown_key_is_named() {
        let err = ScenarioDoc::parse("wavelenght = 1064 nm").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("wavelenght"), "{msg}");
    }

    #[test]
    fn digest_tracks_content() {
        let a = ScenarioDoc::default();
        let mut b = ScenarioDoc::default();
        assert_eq!(a.digest(), b.digest());
        b.seed = 2;
        assert_ne!(a.digest(), b.digest());
    }
}
