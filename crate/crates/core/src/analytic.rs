//! Closed-form detection theory: mean beatnote power and quantum-noise
//! density for monochromatic and bichromatic local oscillators, input/output
//! signal-to-noise ratios, and the predicted noise-figure matrix.
//!
//! All powers are 1 Ω-normalized watts before electronic gain. Noise powers
//! are densities (W/Hz): the noise power in a measurement time `t` occupies
//! a bandwidth `1/t`, so the density equals the noise power measured over
//! one second.

use crate::error::{Error, Result};
use crate::model::{
    DetectorConfig, LocalOscillator, NoiseHypothesis, PhaseConfig, PhaseMode, SignalField,
    StateKind,
};
use crate::units::{photon_energy, ELECTRON_CHARGE};

/// Mean photoelectric signal power at the beat frequency and quantum-noise
/// power density of the differenced photocurrent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerPair {
    /// Mean beatnote power (W, 1 Ω, pre-gain).
    pub p_i_w: f64,
    /// Quantum-noise density (W/Hz, 1 Ω, pre-gain).
    pub p_n_w_per_hz: f64,
}

/// Detector families whose noise figure can be predicted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DetectorKind {
    Homodyne,
    MonoHeterodyne,
    BloHeterodyne,
}

/// Photon flux (photons/s) carried by an optical power at a wavelength.
pub fn photon_flux(p_opt_w: f64, lambda_m: f64) -> Result<f64> {
    if !(lambda_m > 0.0) {
        return Err(Error::domain("wavelength must be positive"));
    }
    if !(p_opt_w >= 0.0) {
        return Err(Error::domain("optical power must be non-negative"));
    }
    Ok(p_opt_w / photon_energy(lambda_m))
}

/// Input signal-to-noise ratio (dB) of coherent light at the detector: the
/// mean photoelectron number collected in one measurement time. The quantum
/// efficiency is folded into the photon number.
pub fn snr_input(p_s_w: f64, cfg: &DetectorConfig) -> Result<f64> {
    if !(p_s_w > 0.0) {
        return Err(Error::domain("signal power must be positive"));
    }
    let n_gamma = cfg.eta * photon_flux(p_s_w, cfg.lambda_m())? * cfg.t_meas_s;
    Ok(10.0 * n_gamma.log10())
}

/// Output signal-to-noise ratio (dB) implied by a power pair: beatnote
/// power against the noise collected in one measurement time.
pub fn snr_output(pp: &PowerPair, cfg: &DetectorConfig) -> f64 {
    10.0 * (pp.p_i_w * cfg.t_meas_s / pp.p_n_w_per_hz).log10()
}

/// Noise figure (dB): input SNR minus output SNR.
pub fn noise_figure(snr_in_db: f64, snr_out_db: f64) -> f64 {
    snr_in_db - snr_out_db
}

/// Quadrature-noise scale of a two-mode squeezed input at a fixed relative
/// phase: `exp(2s)·cos²(phi) + exp(−2s)·sin²(phi)`.
pub fn squeezed_noise_factor_at(s: f64, phi: f64) -> f64 {
    let c = phi.cos();
    let sn = phi.sin();
    (2.0 * s).exp() * c * c + (-2.0 * s).exp() * sn * sn
}

/// Squeezed noise scale under a phase-handling mode. Averaging over a
/// uniform phase gives cosh(2s); a lock at an integer multiple of π pins
/// the anti-squeezed quadrature, giving exp(2s).
fn squeezed_noise_factor(s: f64, mode: PhaseMode) -> f64 {
    match mode {
        PhaseMode::Averaged | PhaseMode::Scanned { .. } => (2.0 * s).cosh(),
        PhaseMode::Locked { .. } => (2.0 * s).exp(),
    }
}

/// Beatnote power and noise density for a monochromatic local oscillator.
///
/// The beatnote power is phase-insensitive. For a coherent signal the noise
/// density is set by the oscillator alone; a two-mode squeezed input scales
/// it by the quadrature factor evaluated per the phase mode. The image
/// band is vacuum and its noise is already contained in these forms, so no
/// hypothesis applies here.
pub fn mono_heterodyne_powers(
    sig: &SignalField,
    lo: &LocalOscillator,
    phases: &PhaseConfig,
) -> Result<PowerPair> {
    let LocalOscillator::Mono { e_l, .. } = *lo else {
        return Err(Error::invariant(
            "mono_heterodyne_powers requires a monochromatic oscillator",
        ));
    };
    let base = (ELECTRON_CHARGE * e_l) * (ELECTRON_CHARGE * e_l);
    let p_i = 0.5 * (ELECTRON_CHARGE * sig.alpha_s * e_l) * (ELECTRON_CHARGE * sig.alpha_s * e_l);
    let p_n = match sig.state {
        StateKind::Coherent | StateKind::Vacuum => base,
        StateKind::TwoModeSqueezed { s } => base * squeezed_noise_factor(s, phases.mode),
    };
    Ok(PowerPair {
        p_i_w: p_i,
        p_n_w_per_hz: p_n,
    })
}

/// Effective relative phase between signal and bichromatic oscillator: the
/// stored value, unless a lock servo pins it at k·π.
fn effective_cos_phi_prime(phases: &PhaseConfig) -> Result<f64> {
    match phases.mode {
        PhaseMode::Locked { k } => Ok(if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 }),
        _ => {
            let (phi_p, _) = phases.blo_pair()?;
            Ok(phi_p.cos())
        }
    }
}

/// Mean differenced photocurrent (A) at time `t_s` for a bichromatic local
/// oscillator: an oscillation at the beat frequency whose amplitude is set
/// by the relative phase. This is the phase-sensitive response.
pub fn blo_mean_current(
    t_s: f64,
    sig: &SignalField,
    lo: &LocalOscillator,
    phases: &PhaseConfig,
) -> Result<f64> {
    let LocalOscillator::Bichromatic { e_l, .. } = *lo else {
        return Err(Error::invariant(
            "blo_mean_current requires a bichromatic oscillator",
        ));
    };
    let omega = lo.beat_omega(sig);
    if !(omega > 0.0) {
        return Err(Error::invariant("beat frequency must be positive"));
    }
    let (_, delta_p) = phases.blo_pair()?;
    let cos_phi_p = effective_cos_phi_prime(phases)?;
    let amp = std::f64::consts::SQRT_2 * ELECTRON_CHARGE * e_l * sig.alpha_s * cos_phi_p;
    Ok(amp * (omega * t_s + delta_p).cos())
}

/// Beatnote power and quantum-noise density for a bichromatic local
/// oscillator under an explicit image-vacuum hypothesis.
///
/// The beatnote power is a statistical average over the relative phase:
/// uniform for `Averaged` (and a full sweep for `Scanned`), pinned at its
/// maximum for `Locked`. The noise term oscillating at twice the beat
/// frequency averages to zero over the measurement window and is dropped;
/// the simulator's cyclostationary mode retains it.
pub fn blo_powers(
    sig: &SignalField,
    lo: &LocalOscillator,
    phases: &PhaseConfig,
    hyp: NoiseHypothesis,
) -> Result<PowerPair> {
    let LocalOscillator::Bichromatic { e_l, .. } = *lo else {
        return Err(Error::invariant(
            "blo_powers requires a bichromatic oscillator",
        ));
    };
    if let StateKind::TwoModeSqueezed { .. } = sig.state {
        return Err(Error::Unsupported(
            "squeezed input is only modeled for a monochromatic oscillator".into(),
        ));
    }
    let peak = (ELECTRON_CHARGE * sig.alpha_s * e_l) * (ELECTRON_CHARGE * sig.alpha_s * e_l);
    let p_i = match phases.mode {
        // <cos²> over a uniform relative phase.
        PhaseMode::Averaged | PhaseMode::Scanned { .. } => 0.5 * peak,
        PhaseMode::Locked { .. } => peak,
    };
    let base = (ELECTRON_CHARGE * e_l) * (ELECTRON_CHARGE * e_l);
    let p_n = match hyp {
        NoiseHypothesis::StandardImageVacuum => base,
        NoiseHypothesis::VacuumCancellation => 0.5 * base,
    };
    Ok(PowerPair {
        p_i_w: p_i,
        p_n_w_per_hz: p_n,
    })
}

/// Noise density of the differenced photocurrent written in terms of the
/// signal/image correlation `C`: `(e·E_l)²·(1 + C/2)`. `C = 0` reproduces
/// the standard image-vacuum density and `C = −1` the cancellation one.
pub fn correlation_noise_power(e_l: f64, corr_c: f64) -> Result<f64> {
    if !(e_l > 0.0) {
        return Err(Error::domain("oscillator amplitude must be positive"));
    }
    if !(corr_c >= -2.0) {
        return Err(Error::domain(
            "correlation below -2 would give a negative noise density",
        ));
    }
    let base = (ELECTRON_CHARGE * e_l) * (ELECTRON_CHARGE * e_l);
    Ok(base * (1.0 + 0.5 * corr_c))
}

/// Predicted noise figure (dB) for a detector family, phase handling, and
/// image-vacuum hypothesis, computed from the power formulas on a unit
/// reference signal rather than from hard-coded constants.
///
/// A homodyne detector preserves the SNR of the measured quadrature; a
/// monochromatic heterodyne detector ignores the hypothesis (its image
/// vacuum noise is not in question).
pub fn nf_predicted(kind: DetectorKind, mode: PhaseMode, hyp: NoiseHypothesis) -> f64 {
    // Reference detection: unit amplitudes, unit measurement time, perfect
    // efficiency. SNR_in = alpha² · t = 1.
    let snr_in_lin: f64 = 1.0;
    let snr_out_lin = match kind {
        DetectorKind::Homodyne => snr_in_lin,
        DetectorKind::MonoHeterodyne => {
            let sig = SignalField::coherent(2.0, 1.0, 0.0).expect("reference signal");
            let lo = LocalOscillator::mono(1.0, 1.0, 0.0).expect("reference oscillator");
            let phases = PhaseConfig::for_mono(0.0, 0.0, 0.0, mode).expect("reference phases");
            let pp = mono_heterodyne_powers(&sig, &lo, &phases).expect("reference powers");
            pp.p_i_w / pp.p_n_w_per_hz
        }
        DetectorKind::BloHeterodyne => {
            let sig = SignalField::coherent(2.0, 1.0, 0.0).expect("reference signal");
            let lo = LocalOscillator::bichromatic(3.0, 1.0, 1.0, 0.0, 0.0)
                .expect("reference oscillator");
            let phases = PhaseConfig::for_blo(0.0, 0.0, 0.0, mode).expect("reference phases");
            let pp = blo_powers(&sig, &lo, &phases, hyp).expect("reference powers");
            pp.p_i_w / pp.p_n_w_per_hz
        }
    };
    10.0 * (snr_in_lin / snr_out_lin).log10()
}

/// The five-entry prediction matrix: (label, NF dB).
pub fn nf_prediction_matrix() -> Vec<(&'static str, f64)> {
    use DetectorKind::*;
    use NoiseHypothesis::*;
    let avg = PhaseMode::Averaged;
    let locked = PhaseMode::Locked { k: 0 };
    vec![
        ("homodyne", nf_predicted(Homodyne, avg, StandardImageVacuum)),
        (
            "mono-heterodyne",
            nf_predicted(MonoHeterodyne, avg, StandardImageVacuum),
        ),
        (
            "blo standard averaged",
            nf_predicted(BloHeterodyne, avg, StandardImageVacuum),
        ),
        (
            "blo cancel averaged",
            nf_predicted(BloHeterodyne, avg, VacuumCancellation),
        ),
        (
            "blo cancel locked",
            nf_predicted(BloHeterodyne, locked, VacuumCancellation),
        ),
    ]
}

/// Convenience: noise density (W/Hz, pre-gain) of the differenced
/// photocurrent for an oscillator of detected amplitude `e_l_detected`
/// under a hypothesis, signal blocked. For a monochromatic oscillator use
/// `StandardImageVacuum`.
pub fn shot_noise_density(e_l_detected: f64, hyp: NoiseHypothesis) -> f64 {
    let base = (ELECTRON_CHARGE * e_l_detected) * (ELECTRON_CHARGE * e_l_detected);
    match hyp {
        NoiseHypothesis::StandardImageVacuum => base,
        NoiseHypothesis::VacuumCancellation => 0.5 * base,
    }
}
