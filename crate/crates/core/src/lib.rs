//! Balanced optical heterodyne detection, simulated end to end: closed-form
//! quantum-noise theory for monochromatic and bichromatic local
//! oscillators, seeded Monte Carlo synthesis of the differenced
//! photocurrent, spectrum-analyzer emulation with RBW control, and a
//! pipeline that measures noise figures and reproduces the reference
//! bench results.
//!
//! The crate is organized around the measurement chain:
//!
//! - [`model`] — domain types: fields, oscillator, phases, detector,
//!   traces, spectra, reports.
//! - [`analytic`] — the closed-form powers and noise densities; the oracle
//!   for everything the Monte Carlo path produces.
//! - [`simulate`] — deterministic, counter-seeded trace synthesis.
//! - [`spectral`] — averaged-periodogram densities and band powers.
//! - [`pipeline`] — calibration, noise-figure experiments, reproductions.
//! - [`scenario`] — the flat key/value scenario format and its digest.

// Validations use negated comparisons (`!(x > 0.0)`) so NaN inputs are
// rejected along with out-of-range ones.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod error;
pub mod io;
pub mod model;
pub mod pipeline;
pub mod scenario;
pub mod simulate;
pub mod spectral;
pub mod units;

pub use analytic::{DetectorKind, PowerPair};
pub use error::{Error, Result};
pub use model::{
    DetectorConfig, ImageBandSet, LocalOscillator, NoiseFigureReport, NoiseHypothesis, PhaseConfig,
    PhaseMode, PhotocurrentTrace, PsdEstimate, SignalField, StateKind,
};
pub use pipeline::{BandCheck, CalibrationRecord, ExperimentResult};
pub use scenario::ScenarioDoc;
pub use simulate::{PhaseScanRecord, Scenario};
pub use spectral::Window;
