//! Domain types shared by every module: optical fields, detector
//! configuration, phase bookkeeping, and the data products of a run.
//!
//! All amplitudes are real and carry units of sqrt(photons/s), so the
//! squared amplitude of a field is its photon flux. Photocurrent powers
//! are normalized to a 1 Ω load throughout; the electronic power gain in
//! [`DetectorConfig`] maps internal watts to displayed levels.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Quantum state of an optical mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum StateKind {
    /// Coherent state with the mean amplitude of its carrying field.
    Coherent,
    /// Vacuum; the mean amplitude must be zero.
    Vacuum,
    /// Signal/image pair with correlated quadratures; `s` is the
    /// dimensionless squeezing parameter.
    TwoModeSqueezed { s: f64 },
}

/// The optical signal to be detected.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SignalField {
    /// Optical angular frequency (rad/s).
    pub omega_s: f64,
    /// Mean amplitude, sqrt(photons/s). Squared, this is the photon flux.
    pub alpha_s: f64,
    /// Optical phase (rad).
    pub phi_s: f64,
    pub state: StateKind,
}

impl SignalField {
    pub fn coherent(omega_s: f64, alpha_s: f64, phi_s: f64) -> Result<Self> {
        Self::new(omega_s, alpha_s, phi_s, StateKind::Coherent)
    }

    pub fn vacuum(omega_s: f64, phi_s: f64) -> Result<Self> {
        Self::new(omega_s, 0.0, phi_s, StateKind::Vacuum)
    }

    pub fn two_mode_squeezed(omega_s: f64, alpha_s: f64, phi_s: f64, s: f64) -> Result<Self> {
        Self::new(omega_s, alpha_s, phi_s, StateKind::TwoModeSqueezed { s })
    }

    pub fn new(omega_s: f64, alpha_s: f64, phi_s: f64, state: StateKind) -> Result<Self> {
        if !(omega_s > 0.0) {
            return Err(Error::invariant("signal frequency must be positive"));
        }
        if !(alpha_s >= 0.0) {
            return Err(Error::invariant("signal amplitude must be non-negative"));
        }
        if let StateKind::Vacuum = state {
            if alpha_s != 0.0 {
                return Err(Error::invariant(
                    "a vacuum signal must have zero mean amplitude",
                ));
            }
        }
        if let StateKind::TwoModeSqueezed { s } = state {
            if !s.is_finite() || s < 0.0 {
                return Err(Error::invariant(
                    "squeezing parameter must be finite and non-negative",
                ));
            }
        }
        Ok(Self {
            omega_s,
            alpha_s,
            phi_s,
            state,
        })
    }

    /// Photon flux of the field (photons/s).
    pub fn flux(&self) -> f64 {
        self.alpha_s * self.alpha_s
    }
}

/// The strong coherent reference field.
///
/// For the bichromatic variant, `e_l` is the per-tone amplitude before the
/// 1/sqrt(2) split, so `e_l^2` is the total oscillator photon flux in both
/// variants.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub enum LocalOscillator {
    Mono {
        omega_0: f64,
        e_l: f64,
        phi_0: f64,
    },
    Bichromatic {
        /// Upper tone (rad/s); must exceed `omega_2`.
        omega_1: f64,
        omega_2: f64,
        e_l: f64,
        phi_1: f64,
        phi_2: f64,
    },
}

impl LocalOscillator {
    pub fn mono(omega_0: f64, e_l: f64, phi_0: f64) -> Result<Self> {
        if !(e_l > 0.0) {
            return Err(Error::invariant("oscillator amplitude must be positive"));
        }
        if !(omega_0 > 0.0) {
            return Err(Error::invariant("oscillator frequency must be positive"));
        }
        Ok(LocalOscillator::Mono {
            omega_0,
            e_l,
            phi_0,
        })
    }

    pub fn bichromatic(
        omega_1: f64,
        omega_2: f64,
        e_l: f64,
        phi_1: f64,
        phi_2: f64,
    ) -> Result<Self> {
        if !(e_l > 0.0) {
            return Err(Error::invariant("oscillator amplitude must be positive"));
        }
        if !(omega_2 > 0.0) || !(omega_1 > omega_2) {
            return Err(Error::invariant(
                "bichromatic tones must satisfy omega_1 > omega_2 > 0",
            ));
        }
        Ok(LocalOscillator::Bichromatic {
            omega_1,
            omega_2,
            e_l,
            phi_1,
            phi_2,
        })
    }

    /// Amplitude of the oscillator, sqrt(photons/s).
    pub fn amplitude(&self) -> f64 {
        match *self {
            LocalOscillator::Mono { e_l, .. } => e_l,
            LocalOscillator::Bichromatic { e_l, .. } => e_l,
        }
    }

    pub fn is_bichromatic(&self) -> bool {
        matches!(self, LocalOscillator::Bichromatic { .. })
    }

    /// Beat (heterodyne) angular frequency against the given signal.
    pub fn beat_omega(&self, sig: &SignalField) -> f64 {
        match *self {
            LocalOscillator::Mono { omega_0, .. } => (sig.omega_s - omega_0).abs(),
            LocalOscillator::Bichromatic { omega_1, .. } => (omega_1 - sig.omega_s).abs(),
        }
    }

    /// Check the tone placement against the paired signal: the two
    /// bichromatic tones must sit symmetrically about the signal, and a
    /// monochromatic oscillator must be detuned from it.
    pub fn check_symmetry(&self, sig: &SignalField) -> Result<()> {
        match *self {
            LocalOscillator::Mono { omega_0, .. } => {
                if (sig.omega_s - omega_0).abs() == 0.0 {
                    return Err(Error::invariant(
                        "monochromatic oscillator must be detuned from the signal",
                    ));
                }
                Ok(())
            }
            LocalOscillator::Bichromatic {
                omega_1, omega_2, ..
            } => {
                let up = omega_1 - sig.omega_s;
                let down = sig.omega_s - omega_2;
                if !(up > 0.0 && down > 0.0) {
                    return Err(Error::invariant(
                        "bichromatic tones must straddle the signal frequency",
                    ));
                }
                // Tolerate rounding at the level of the beat itself.
                if (up - down).abs() > 1e-6 * up.max(down) {
                    return Err(Error::invariant(format!(
                        "bichromatic tones are not symmetric about the signal: \
                         omega_1 - omega_s = {up:.6e}, omega_s - omega_2 = {down:.6e}"
                    )));
                }
                Ok(())
            }
        }
    }
}

/// One image-band mode: the mirror frequency that also beats to the
/// heterodyne frequency.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ImageMode {
    pub omega_i: f64,
    pub phi_i: f64,
    pub state: StateKind,
}

/// The image sideband modes participating in the detection: one for a
/// monochromatic oscillator, two for a bichromatic one. Unexcited image
/// modes default to vacuum.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub enum ImageBandSet {
    Mono(ImageMode),
    Bichromatic(ImageMode, ImageMode),
}

impl ImageBandSet {
    /// Vacuum image band for a monochromatic oscillator: the mirror of the
    /// signal about the oscillator frequency.
    pub fn for_mono(sig: &SignalField, lo: &LocalOscillator) -> Result<Self> {
        let LocalOscillator::Mono { omega_0, .. } = *lo else {
            return Err(Error::invariant(
                "mono image band requires a monochromatic oscillator",
            ));
        };
        Ok(ImageBandSet::Mono(ImageMode {
            omega_i: 2.0 * omega_0 - sig.omega_s,
            phi_i: 0.0,
            state: StateKind::Vacuum,
        }))
    }

    /// Vacuum image bands for a bichromatic oscillator: one above the upper
    /// tone, one below the lower tone, each offset by the beat frequency.
    pub fn for_blo(sig: &SignalField, lo: &LocalOscillator) -> Result<Self> {
        let LocalOscillator::Bichromatic {
            omega_1, omega_2, ..
        } = *lo
        else {
            return Err(Error::invariant(
                "bichromatic image bands require a bichromatic oscillator",
            ));
        };
        lo.check_symmetry(sig)?;
        let beat = omega_1 - sig.omega_s;
        Ok(ImageBandSet::Bichromatic(
            ImageMode {
                omega_i: omega_1 + beat,
                phi_i: 0.0,
                state: StateKind::Vacuum,
            },
            ImageMode {
                omega_i: omega_2 - beat,
                phi_i: 0.0,
                state: StateKind::Vacuum,
            },
        ))
    }

    /// Validate the image placement against the signal/oscillator pair.
    pub fn check_placement(&self, sig: &SignalField, lo: &LocalOscillator) -> Result<()> {
        let tol = |a: f64, b: f64| (a - b).abs() <= 1e-6 * a.abs().max(b.abs()).max(1.0);
        match (self, lo) {
            (ImageBandSet::Mono(im), LocalOscillator::Mono { omega_0, .. }) => {
                if !tol(im.omega_i, 2.0 * omega_0 - sig.omega_s) {
                    return Err(Error::invariant(
                        "image mode is not the mirror of the signal about the oscillator",
                    ));
                }
                Ok(())
            }
            (
                ImageBandSet::Bichromatic(i1, i2),
                LocalOscillator::Bichromatic {
                    omega_1, omega_2, ..
                },
            ) => {
                let beat = omega_1 - sig.omega_s;
                if !tol(i1.omega_i - omega_1, beat) || !tol(omega_2 - i2.omega_i, beat) {
                    return Err(Error::invariant(
                        "image modes are not offset from the oscillator tones by the beat",
                    ));
                }
                Ok(())
            }
            _ => Err(Error::invariant(
                "image band set does not match the oscillator kind",
            )),
        }
    }
}

/// How the relative optical phase is handled during a measurement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PhaseMode {
    /// The relative phase is uniformly distributed on [0, 2π); powers are
    /// statistical averages over it.
    Averaged,
    /// The relative phase is servo-locked at `k`·π (maximal beat signal).
    Locked { k: i64 },
    /// The relative phase is swept at a constant rate with optional
    /// residual jitter (RMS radians).
    Scanned {
        rate_rad_per_s: f64,
        jitter_rms_rad: f64,
    },
}

impl PhaseMode {
    pub fn validate(&self) -> Result<()> {
        if let PhaseMode::Scanned {
            rate_rad_per_s,
            jitter_rms_rad,
        } = self
        {
            if !(*rate_rad_per_s > 0.0) {
                return Err(Error::invariant("scan rate must be positive"));
            }
            if !(*jitter_rms_rad >= 0.0) {
                return Err(Error::invariant("phase jitter RMS must be non-negative"));
            }
        }
        Ok(())
    }
}

/// Reduced phase combinations entering the detection formulas. The fields
/// are always derived from the underlying optical phases by the
/// constructors (never stored independently) and reduced mod 2π.
///
/// For a monochromatic oscillator the relevant pair is (`phi`,
/// `delta_phi`); for a bichromatic one it is (`phi_prime`,
/// `delta_phi_prime`). The pair that does not apply is `None`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PhaseConfig {
    /// phi = phi_0 − (phi_s + phi_i)/2.
    pub phi: Option<f64>,
    /// delta_phi = (phi_s − phi_i)/2.
    pub delta_phi: Option<f64>,
    /// phi' = phi_s − (phi_1 + phi_2)/2.
    pub phi_prime: Option<f64>,
    /// delta_phi' = (phi_2 − phi_1)/2.
    pub delta_phi_prime: Option<f64>,
    pub mode: PhaseMode,
}

fn wrap_2pi(x: f64) -> f64 {
    x.rem_euclid(2.0 * PI)
}

impl PhaseConfig {
    pub fn for_mono(phi_s: f64, phi_i: f64, phi_0: f64, mode: PhaseMode) -> Result<Self> {
        mode.validate()?;
        Ok(Self {
            phi: Some(wrap_2pi(phi_0 - 0.5 * (phi_s + phi_i))),
            delta_phi: Some(wrap_2pi(0.5 * (phi_s - phi_i))),
            phi_prime: None,
            delta_phi_prime: None,
            mode,
        })
    }

    pub fn for_blo(phi_s: f64, phi_1: f64, phi_2: f64, mode: PhaseMode) -> Result<Self> {
        mode.validate()?;
        Ok(Self {
            phi: None,
            delta_phi: None,
            phi_prime: Some(wrap_2pi(phi_s - 0.5 * (phi_1 + phi_2))),
            delta_phi_prime: Some(wrap_2pi(0.5 * (phi_2 - phi_1))),
            mode,
        })
    }

    /// Relative phase for a monochromatic detection; errors when this
    /// configuration was built for a bichromatic one.
    pub fn mono_pair(&self) -> Result<(f64, f64)> {
        match (self.phi, self.delta_phi) {
            (Some(p), Some(d)) => Ok((p, d)),
            _ => Err(Error::invariant(
                "phase configuration carries no monochromatic phases",
            )),
        }
    }

    pub fn blo_pair(&self) -> Result<(f64, f64)> {
        match (self.phi_prime, self.delta_phi_prime) {
            (Some(p), Some(d)) => Ok((p, d)),
            _ => Err(Error::invariant(
                "phase configuration carries no bichromatic phases",
            )),
        }
    }
}

/// Which quantum-noise contribution the image sideband vacuum makes to the
/// differenced photocurrent. Every noise-power computation takes one of
/// these explicitly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NoiseHypothesis {
    /// Image-band vacuum modes add their full quantum noise.
    StandardImageVacuum,
    /// Image-band vacuum noise is cancelled; only the signal-band vacuum
    /// contributes.
    VacuumCancellation,
}

impl NoiseHypothesis {
    pub fn label(&self) -> &'static str {
        match self {
            NoiseHypothesis::StandardImageVacuum => "standard",
            NoiseHypothesis::VacuumCancellation => "cancel",
        }
    }
}

/// Detector and readout configuration.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DetectorConfig {
    /// Quantum efficiency in (0, 1].
    pub eta: f64,
    /// Charge per photoelectron (C).
    pub e_charge: f64,
    /// Electronic power gain applied to the 1 Ω-normalized photocurrent
    /// power before display.
    pub gain: f64,
    /// Resolution bandwidth of the analyzer (Hz).
    pub rbw_hz: f64,
    /// Measurement time (s); defaults to 1/RBW.
    pub t_meas_s: f64,
    /// Optical wavelength (nm).
    pub lambda_nm: f64,
}

impl DetectorConfig {
    pub fn new(eta: f64, gain: f64, rbw_hz: f64, lambda_nm: f64) -> Result<Self> {
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(Error::invariant("quantum efficiency must lie in (0, 1]"));
        }
        if !(gain > 0.0) {
            return Err(Error::invariant("electronic gain must be positive"));
        }
        if !(rbw_hz > 0.0) {
            return Err(Error::invariant("resolution bandwidth must be positive"));
        }
        if !(lambda_nm > 0.0) {
            return Err(Error::invariant("wavelength must be positive"));
        }
        Ok(Self {
            eta,
            e_charge: crate::units::ELECTRON_CHARGE,
            gain,
            rbw_hz,
            t_meas_s: 1.0 / rbw_hz,
            lambda_nm,
        })
    }

    /// Override the default measurement time.
    pub fn with_t_meas(mut self, t_meas_s: f64) -> Result<Self> {
        if !(t_meas_s > 0.0) {
            return Err(Error::invariant("measurement time must be positive"));
        }
        self.t_meas_s = t_meas_s;
        Ok(self)
    }

    /// Wavelength in meters.
    pub fn lambda_m(&self) -> f64 {
        self.lambda_nm * 1e-9
    }
}

/// Sampled differenced photocurrent, 1 Ω-normalized, before electronic
/// gain. Regenerating with the same seed and scenario digest yields an
/// identical sample vector.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PhotocurrentTrace {
    pub sample_rate_hz: f64,
    /// Samples in amperes.
    pub samples: Vec<f64>,
    pub seed: u64,
    /// Digest of the canonical scenario document that produced the trace.
    pub scenario_digest: String,
    pub duration_s: f64,
}

impl PhotocurrentTrace {
    pub fn new(
        sample_rate_hz: f64,
        samples: Vec<f64>,
        seed: u64,
        scenario_digest: String,
        duration_s: f64,
    ) -> Result<Self> {
        let expect = (sample_rate_hz * duration_s).round() as usize;
        if samples.len() != expect {
            return Err(Error::invariant(format!(
                "trace length {} does not match rate x duration = {}",
                samples.len(),
                expect
            )));
        }
        Ok(Self {
            sample_rate_hz,
            samples,
            seed,
            scenario_digest,
            duration_s,
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Averaged one-sided power spectral density, post-gain, 1 Ω.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PsdEstimate {
    pub freq_bins_hz: Vec<f64>,
    pub density_w_per_hz: Vec<f64>,
    pub rbw_hz: f64,
    pub n_averages: usize,
    pub window_name: String,
}

impl PsdEstimate {
    /// Bin spacing (Hz).
    pub fn bin_spacing_hz(&self) -> f64 {
        if self.freq_bins_hz.len() < 2 {
            return self.rbw_hz;
        }
        self.freq_bins_hz[1] - self.freq_bins_hz[0]
    }
}

/// One noise-figure measurement row: input and output signal-to-noise
/// ratios and their difference, with the spread over repeated runs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NoiseFigureReport {
    /// Optical signal power (nW).
    pub p_s_nw: f64,
    pub snr_in_db: f64,
    pub snr_out_db: f64,
    /// Always exactly `snr_in_db - snr_out_db`.
    pub nf_db: f64,
    pub u_snr_in_db: f64,
    pub u_snr_out_db: f64,
    pub u_nf_db: f64,
    pub hypothesis: NoiseHypothesis,
    pub phase_mode: PhaseMode,
    pub scenario_digest: String,
    pub seeds: Vec<u64>,
}

impl NoiseFigureReport {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        p_s_nw: f64,
        snr_in_db: f64,
        snr_out_db: f64,
        u_snr_in_db: f64,
        u_snr_out_db: f64,
        hypothesis: NoiseHypothesis,
        phase_mode: PhaseMode,
        scenario_digest: String,
        seeds: Vec<u64>,
    ) -> Self {
        Self {
            p_s_nw,
            snr_in_db,
            snr_out_db,
            nf_db: snr_in_db - snr_out_db,
            u_snr_in_db,
            u_snr_out_db,
            u_nf_db: (u_snr_in_db * u_snr_in_db + u_snr_out_db * u_snr_out_db).sqrt(),
            hypothesis,
            phase_mode,
            scenario_digest,
            seeds,
        }
    }
}
