//! Seeded Monte Carlo synthesis of differenced-photocurrent traces: the
//! deterministic beatnote plus Gaussian noise at the quantum-limited
//! density of the selected hypothesis.
//!
//! Noise is generated in fixed-length segments, each from its own
//! counter-based substream keyed by (seed, scenario digest, purpose,
//! segment index), so a trace is bit-identical no matter how many workers
//! generate it. The oscillator power dominates the signal by six orders of
//! magnitude in every scenario of interest, so the Gaussian limit of the
//! photocurrent statistics is used directly with the variance taken from
//! the closed-form densities.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use std::f64::consts::PI;

use crate::analytic;
use crate::error::{Error, Result};
use crate::model::{
    DetectorConfig, ImageBandSet, LocalOscillator, NoiseHypothesis, PhaseConfig, PhaseMode,
    PhotocurrentTrace, SignalField, StateKind,
};
use crate::scenario::{LoKind, PhaseModeKey, ScenarioDoc, SignalStateKey};

/// Samples per noise substream segment. Fixed: changing it changes every
/// generated trace.
pub const SEGMENT_LEN: usize = 16_384;

/// Minimum sample rate in units of the beat frequency.
pub const ALIAS_GUARD: f64 = 10.0;

/// Correlation time of the residual phase-jitter process (s).
const JITTER_CORR_TIME_S: f64 = 0.05;

const PURPOSE_NOISE: u32 = 0;
const PURPOSE_PHASE: u32 = 1;
const PURPOSE_JITTER: u32 = 2;

/// A fully resolved detection run: fields, phases, detector, noise
/// hypothesis, and sampling plan. Amplitudes carried by `sig` and `lo` are
/// detected amplitudes: the quantum efficiency already scales both photon
/// fluxes.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub sig: SignalField,
    pub lo: LocalOscillator,
    pub images: ImageBandSet,
    pub phases: PhaseConfig,
    pub cfg: DetectorConfig,
    pub hyp: NoiseHypothesis,
    pub cyclostationary: bool,
    pub dark_floor_w_per_hz: f64,
    pub duration_s: f64,
    pub sample_rate_hz: f64,
    pub seed: u64,
    /// Incident optical signal power (W), before efficiency.
    pub p_s_w: f64,
    /// Incident oscillator power (W), before efficiency.
    pub lo_power_w: f64,
    doc: ScenarioDoc,
    digest: String,
    digest_raw: [u8; 32],
}

impl Scenario {
    /// Build and validate a scenario from a document. Rejects asymmetric
    /// oscillator placement, aliasing sample rates, and windows shorter
    /// than one resolution cell.
    pub fn from_doc(doc: &ScenarioDoc) -> Result<Self> {
        let mut doc = doc.clone();
        doc.sample_rate_hz = doc.resolved_sample_rate_hz();

        let lambda_m = doc.wavelength_m;
        let cfg = DetectorConfig::new(doc.eta, doc.gain, doc.rbw_hz, lambda_m * 1e9)?;
        let omega_s = 2.0 * PI * crate::units::SPEED_OF_LIGHT / lambda_m;
        let omega_beat = 2.0 * PI * doc.detuning_hz;
        if !(omega_beat > 0.0) {
            return Err(Error::config("detuning must be positive"));
        }

        // Detected amplitudes: efficiency scales the photon flux of both
        // the signal and the oscillator before current conversion.
        let alpha_s = (doc.eta * analytic::photon_flux(doc.signal_power_w, lambda_m)?).sqrt();
        let e_l = (doc.eta * analytic::photon_flux(doc.lo_power_w, lambda_m)?).sqrt();

        let sig = match doc.signal_state {
            SignalStateKey::Coherent => SignalField::coherent(omega_s, alpha_s, doc.phi_s)?,
            SignalStateKey::Vacuum => {
                if doc.signal_power_w != 0.0 {
                    return Err(Error::invariant(
                        "a vacuum signal must have zero optical power",
                    ));
                }
                SignalField::vacuum(omega_s, doc.phi_s)?
            }
            SignalStateKey::Squeezed => {
                SignalField::two_mode_squeezed(omega_s, alpha_s, doc.phi_s, doc.squeezing)?
            }
        };

        let mode = match doc.phase_mode {
            PhaseModeKey::Averaged => PhaseMode::Averaged,
            PhaseModeKey::Locked => PhaseMode::Locked { k: doc.lock_k },
            PhaseModeKey::Scanned => PhaseMode::Scanned {
                rate_rad_per_s: doc.scan_rate_rad_s,
                jitter_rms_rad: doc.jitter_rms_rad,
            },
        };

        let (lo, images, phases) = match doc.lo_kind {
            LoKind::Mono => {
                let lo = LocalOscillator::mono(omega_s - omega_beat, e_l, doc.phi_0)?;
                let images = ImageBandSet::for_mono(&sig, &lo)?;
                let ImageBandSet::Mono(im) = images else {
                    unreachable!()
                };
                let phases = PhaseConfig::for_mono(doc.phi_s, im.phi_i, doc.phi_0, mode)?;
                (lo, images, phases)
            }
            LoKind::Bichromatic => {
                if matches!(sig.state, StateKind::TwoModeSqueezed { .. }) {
                    return Err(Error::Unsupported(
                        "squeezed input is only modeled for a monochromatic oscillator".into(),
                    ));
                }
                let lo = LocalOscillator::bichromatic(
                    omega_s + omega_beat,
                    omega_s - omega_beat,
                    e_l,
                    doc.phi_1,
                    doc.phi_2,
                )?;
                lo.check_symmetry(&sig)?;
                let images = ImageBandSet::for_blo(&sig, &lo)?;
                images.check_placement(&sig, &lo)?;
                let phases = PhaseConfig::for_blo(doc.phi_s, doc.phi_1, doc.phi_2, mode)?;
                (lo, images, phases)
            }
        };

        let fs = doc.sample_rate_hz;
        if fs < ALIAS_GUARD * doc.detuning_hz {
            return Err(Error::config(format!(
                "sample rate {fs:.3e} Hz aliases the beat; need at least {:.3e} Hz",
                ALIAS_GUARD * doc.detuning_hz
            )));
        }
        if doc.duration_s * doc.rbw_hz < 1.0 {
            return Err(Error::config(format!(
                "duration {:.3e} s is shorter than one resolution cell 1/RBW = {:.3e} s",
                doc.duration_s,
                1.0 / doc.rbw_hz
            )));
        }

        Ok(Self {
            sig,
            lo,
            images,
            phases,
            cfg,
            hyp: doc.hypothesis,
            cyclostationary: doc.cyclostationary,
            dark_floor_w_per_hz: doc.dark_floor_w_per_hz,
            duration_s: doc.duration_s,
            sample_rate_hz: fs,
            seed: doc.seed,
            p_s_w: doc.signal_power_w,
            lo_power_w: doc.lo_power_w,
            digest: doc.digest(),
            digest_raw: doc.digest_raw(),
            doc,
        })
    }

    pub fn digest(&self) -> &str {
        &self.digest
    }

    pub fn doc(&self) -> &ScenarioDoc {
        &self.doc
    }

    /// Beat angular frequency (rad/s).
    pub fn beat_omega(&self) -> f64 {
        self.lo.beat_omega(&self.sig)
    }

    /// One-sided quantum-noise density of the differenced photocurrent for
    /// this scenario (W/Hz, 1 Ω, pre-gain), evaluated at a fixed relative
    /// phase where the state requires one, plus any dark floor.
    pub fn noise_density_at(&self, phi: f64) -> f64 {
        let e = self.cfg.e_charge;
        let e_l = self.lo.amplitude();
        let base = (e * e_l) * (e * e_l);
        let quantum = match (&self.lo, self.sig.state) {
            (LocalOscillator::Mono { .. }, StateKind::TwoModeSqueezed { s }) => {
                base * analytic::squeezed_noise_factor_at(s, phi)
            }
            (LocalOscillator::Mono { .. }, _) => base,
            (LocalOscillator::Bichromatic { .. }, _) => match self.hyp {
                NoiseHypothesis::StandardImageVacuum => base,
                NoiseHypothesis::VacuumCancellation => 0.5 * base,
            },
        };
        quantum + self.dark_floor_w_per_hz
    }

    fn substream(&self, purpose: u32, index: u64) -> ChaCha8Rng {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&self.seed.to_le_bytes());
        key[8..16].copy_from_slice(&self.digest_raw[..8]);
        key[16..20].copy_from_slice(&purpose.to_le_bytes());
        key[20..28].copy_from_slice(&index.to_le_bytes());
        key[28..32].copy_from_slice(b"htsm");
        ChaCha8Rng::from_seed(key)
    }

    fn sample_count(&self) -> usize {
        (self.sample_rate_hz * self.duration_s).round() as usize
    }

    /// Starting relative phase of a scanned run.
    pub fn scan_phi0(&self) -> Result<f64> {
        Ok(self.phases.blo_pair()?.0)
    }

    /// Scan rate (rad/s) of a scanned run.
    pub fn scan_rate(&self) -> Result<f64> {
        match self.phases.mode {
            PhaseMode::Scanned { rate_rad_per_s, .. } => Ok(rate_rad_per_s),
            _ => Err(Error::config("scenario is not in scanned mode")),
        }
    }
}

/// Parameters of the deterministic beatnote `amp · cos(Ω t + offset)`.
fn beat_tone(sc: &Scenario, cos_phi_prime: f64) -> (f64, f64) {
    let e = sc.cfg.e_charge;
    let e_l = sc.lo.amplitude();
    let alpha = sc.sig.alpha_s;
    match &sc.lo {
        LocalOscillator::Mono { .. } => {
            // Phase-insensitive amplitude; the relative phase only shifts
            // the beat in time.
            let (phi, delta_phi) = sc.phases.mono_pair().unwrap_or((0.0, 0.0));
            (e * e_l * alpha, phi - delta_phi)
        }
        LocalOscillator::Bichromatic { .. } => {
            let (_, delta_p) = sc.phases.blo_pair().unwrap_or((0.0, 0.0));
            (
                std::f64::consts::SQRT_2 * e * e_l * alpha * cos_phi_prime,
                delta_p,
            )
        }
    }
}

/// Relative phase the trace realizes, resolved per the phase mode: locked
/// traces pin k·π, averaged traces draw one uniform phase per (seed, salt),
/// everything else keeps the configured value.
fn realized_phi(sc: &Scenario, salt: u64) -> f64 {
    match sc.phases.mode {
        PhaseMode::Locked { k } => k as f64 * PI,
        PhaseMode::Averaged => {
            let mut rng = sc.substream(PURPOSE_PHASE, salt);
            rng.gen::<f64>() * 2.0 * PI
        }
        PhaseMode::Scanned { .. } => match &sc.lo {
            LocalOscillator::Bichromatic { .. } => sc.phases.blo_pair().map(|p| p.0).unwrap_or(0.0),
            LocalOscillator::Mono { .. } => sc.phases.mono_pair().map(|p| p.0).unwrap_or(0.0),
        },
    }
}

/// 2Ω modulation of the instantaneous noise variance relative to its time
/// average, for the cyclostationary mode. Zero-mean over a beat period.
fn cyclo_depth(sc: &Scenario) -> f64 {
    match (&sc.lo, sc.hyp) {
        (LocalOscillator::Bichromatic { .. }, NoiseHypothesis::StandardImageVacuum) => 0.5,
        (LocalOscillator::Bichromatic { .. }, NoiseHypothesis::VacuumCancellation) => 1.0,
        // The monochromatic coherent variance has no 2Ω component.
        (LocalOscillator::Mono { .. }, _) => 0.0,
    }
}

/// Synthesize the differenced photocurrent for a scenario.
///
/// Samples are `beatnote(t) + w[n]` with `w` zero-mean Gaussian of
/// one-sided density equal to the scenario's hypothesis noise density;
/// with the cyclostationary flag the instantaneous variance is modulated
/// at 2Ω without changing its time average. Identical (seed, scenario)
/// always yields identical samples.
pub fn synth_trace(sc: &Scenario) -> Result<PhotocurrentTrace> {
    if let PhaseMode::Scanned { .. } = sc.phases.mode {
        return Ok(phase_scan_trace(sc)?.0);
    }
    synth_trace_with_phase(sc, None, 0)
}

/// Trace synthesis with an explicit relative-phase override and substream
/// salt; the salt separates the noise of repeated draws within one seed
/// (e.g. the points of a fringe grid).
pub fn synth_trace_with_phase(
    sc: &Scenario,
    phi_prime_override: Option<f64>,
    salt: u64,
) -> Result<PhotocurrentTrace> {
    let n = sc.sample_count();
    let fs = sc.sample_rate_hz;
    let phi = phi_prime_override.unwrap_or_else(|| realized_phi(sc, salt));
    let (amp, offset) = beat_tone(sc, phi.cos());
    let n0 = sc.noise_density_at(phi);
    let sigma = (n0 * fs / 2.0).sqrt();
    let omega = sc.beat_omega();
    let depth = if sc.cyclostationary {
        cyclo_depth(sc)
    } else {
        0.0
    };
    // 2Ω variance modulation phase: twice the beat offset of the noise
    // sidebands, i.e. phi_2 - phi_1 for a bichromatic oscillator.
    let two_omega_phase = match &sc.lo {
        LocalOscillator::Bichromatic { phi_1, phi_2, .. } => phi_2 - phi_1,
        LocalOscillator::Mono { .. } => 0.0,
    };

    let mut samples = vec![0.0f64; n];
    samples
        .par_chunks_mut(SEGMENT_LEN)
        .enumerate()
        .for_each(|(seg, chunk)| {
            let mut rng = sc.substream(PURPOSE_NOISE, (salt << 32) | seg as u64);
            let base = seg * SEGMENT_LEN;
            for (k, out) in chunk.iter_mut().enumerate() {
                let t = (base + k) as f64 / fs;
                let mean = amp * (omega * t + offset).cos();
                let w: f64 = rng.sample(StandardNormal);
                let s = if depth > 0.0 {
                    sigma * (1.0 + depth * (2.0 * omega * t + two_omega_phase).cos()).sqrt()
                } else {
                    sigma
                };
                *out = mean + s * w;
            }
        });

    PhotocurrentTrace::new(fs, samples, sc.seed, sc.digest.clone(), sc.duration_s)
}

/// Ground truth of a phase scan: the relative phase and beat amplitude at
/// regular instants along the trace.
#[derive(Debug, Clone)]
pub struct PhaseScanRecord {
    pub time_s: Vec<f64>,
    pub phi_prime_rad: Vec<f64>,
    /// Instantaneous beatnote amplitude (A).
    pub beat_amplitude_a: Vec<f64>,
}

/// Synthesize a trace while the relative phase is swept at the configured
/// rate, with first-order low-pass Gaussian jitter of the configured RMS
/// held constant over each resolution cell. The record carries the true
/// phase for assertions and plotting.
pub fn phase_scan_trace(sc: &Scenario) -> Result<(PhotocurrentTrace, PhaseScanRecord)> {
    let PhaseMode::Scanned {
        rate_rad_per_s,
        jitter_rms_rad,
    } = sc.phases.mode
    else {
        return Err(Error::config("phase scan requires the scanned phase mode"));
    };
    if !sc.lo.is_bichromatic() {
        return Err(Error::config(
            "phase scan fringes require a bichromatic oscillator",
        ));
    }
    let omega = sc.beat_omega();
    if !(rate_rad_per_s > 0.0) {
        return Err(Error::config("scan rate must be positive"));
    }
    // Quasi-static fringes: the phase must move negligibly within a beat
    // period.
    if rate_rad_per_s > 0.01 * omega {
        return Err(Error::config(format!(
            "scan rate {rate_rad_per_s:.3e} rad/s is too fast for quasi-static fringes \
             (limit {:.3e} rad/s)",
            0.01 * omega
        )));
    }

    let n = sc.sample_count();
    let fs = sc.sample_rate_hz;
    let phi0 = sc.phases.blo_pair()?.0;
    let (_, delta_p) = sc.phases.blo_pair()?;
    let e = sc.cfg.e_charge;
    let peak_amp = std::f64::consts::SQRT_2 * e * sc.lo.amplitude() * sc.sig.alpha_s;
    let n0 = sc.noise_density_at(phi0);
    let sigma = (n0 * fs / 2.0).sqrt();

    // Jitter held constant over each resolution cell, driven by a
    // first-order autoregressive chain at the stationary RMS.
    let win = (fs / sc.cfg.rbw_hz).round().max(1.0) as usize;
    let n_win = n.div_ceil(win);
    let jitter = {
        let mut v = vec![0.0f64; n_win];
        if jitter_rms_rad > 0.0 {
            let mut rng = sc.substream(PURPOSE_JITTER, 0);
            let dt = win as f64 / fs;
            let a = (-dt / JITTER_CORR_TIME_S).exp();
            let drive = jitter_rms_rad * (1.0 - a * a).sqrt();
            let mut x: f64 = jitter_rms_rad * rng.sample::<f64, _>(StandardNormal);
            for slot in v.iter_mut() {
                *slot = x;
                x = a * x + drive * rng.sample::<f64, _>(StandardNormal);
            }
        }
        v
    };

    let phi_at = |idx: usize| -> f64 {
        let t = idx as f64 / fs;
        phi0 + rate_rad_per_s * t + jitter[idx / win]
    };

    let mut samples = vec![0.0f64; n];
    samples
        .par_chunks_mut(SEGMENT_LEN)
        .enumerate()
        .for_each(|(seg, chunk)| {
            let mut rng = sc.substream(PURPOSE_NOISE, seg as u64);
            let base = seg * SEGMENT_LEN;
            for (k, out) in chunk.iter_mut().enumerate() {
                let idx = base + k;
                let t = idx as f64 / fs;
                let mean = peak_amp * phi_at(idx).cos() * (omega * t + delta_p).cos();
                let w: f64 = rng.sample(StandardNormal);
                *out = mean + sigma * w;
            }
        });

    // Record one entry per resolution cell, at the cell center.
    let mut record = PhaseScanRecord {
        time_s: Vec::with_capacity(n_win),
        phi_prime_rad: Vec::with_capacity(n_win),
        beat_amplitude_a: Vec::with_capacity(n_win),
    };
    for w_idx in 0..n_win {
        let center = (w_idx * win + win / 2).min(n - 1);
        let p = phi_at(center);
        record.time_s.push(center as f64 / fs);
        record.phi_prime_rad.push(p);
        record.beat_amplitude_a.push(peak_amp * p.cos());
    }

    let trace = PhotocurrentTrace::new(fs, samples, sc.seed, sc.digest.clone(), sc.duration_s)?;
    Ok((trace, record))
}
