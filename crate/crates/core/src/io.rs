//! Artifact export: traces as CSV or packed binary, spectra and fringe
//! curves as CSV/JSON, reports as JSON and aligned text. Every artifact
//! carries the tool version, scenario digest, and seed in its header.

use serde::Serialize;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::{NoiseFigureReport, PhotocurrentTrace, PsdEstimate};
use crate::pipeline::{BandCheck, FringeCurve};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

fn header_lines(digest: &str, seed: u64) -> String {
    format!("# hetsim {TOOL_VERSION}\n# digest = {digest}\n# seed = {seed}\n")
}

/// JSON artifact wrapper carrying the provenance stamp.
#[derive(Debug, Serialize)]
pub struct Artifact<T: Serialize> {
    pub tool_version: &'static str,
    pub scenario_digest: String,
    pub seed: u64,
    pub data: T,
}

pub fn write_json<T: Serialize>(path: &Path, digest: &str, seed: u64, data: T) -> Result<()> {
    let artifact = Artifact {
        tool_version: TOOL_VERSION,
        scenario_digest: digest.to_string(),
        seed,
        data,
    };
    let mut f = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut f, &artifact)
        .map_err(|e| Error::config(format!("json serialization failed: {e}")))?;
    f.write_all(b"\n")?;
    Ok(())
}

pub fn write_trace_csv(path: &Path, trace: &PhotocurrentTrace) -> Result<()> {
    let mut f = BufWriter::new(File::create(path)?);
    f.write_all(header_lines(&trace.scenario_digest, trace.seed).as_bytes())?;
    writeln!(f, "# sample_rate_hz = {}", trace.sample_rate_hz)?;
    writeln!(f, "# duration_s = {}", trace.duration_s)?;
    writeln!(f, "current_a")?;
    for s in &trace.samples {
        writeln!(f, "{s}")?;
    }
    Ok(())
}

/// Packed trace: one text header line, then little-endian 64-bit floats.
pub fn write_trace_bin(path: &Path, trace: &PhotocurrentTrace) -> Result<()> {
    let mut f = BufWriter::new(File::create(path)?);
    writeln!(
        f,
        "hetsim-trace v1 tool={TOOL_VERSION} digest={} seed={} sample_rate_hz={} n={}",
        trace.scenario_digest,
        trace.seed,
        trace.sample_rate_hz,
        trace.len()
    )?;
    for s in &trace.samples {
        f.write_all(&s.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_trace_bin(path: &Path) -> Result<PhotocurrentTrace> {
    let mut r = BufReader::new(File::open(path)?);
    let mut header = String::new();
    r.read_line(&mut header)?;
    let mut digest = String::new();
    let mut seed = 0u64;
    let mut rate = 0.0f64;
    let mut n = 0usize;
    for token in header.split_whitespace() {
        if let Some(v) = token.strip_prefix("digest=") {
            digest = v.to_string();
        } else if let Some(v) = token.strip_prefix("seed=") {
            seed = v
                .parse()
                .map_err(|_| Error::config("bad seed in trace header"))?;
        } else if let Some(v) = token.strip_prefix("sample_rate_hz=") {
            rate = v
                .parse()
                .map_err(|_| Error::config("bad rate in trace header"))?;
        } else if let Some(v) = token.strip_prefix("n=") {
            n = v
                .parse()
                .map_err(|_| Error::config("bad length in trace header"))?;
        }
    }
    if digest.is_empty() || rate <= 0.0 {
        return Err(Error::config("malformed trace header"));
    }
    let mut bytes = Vec::with_capacity(n * 8);
    r.read_to_end(&mut bytes)?;
    if bytes.len() != n * 8 {
        return Err(Error::config(format!(
            "trace payload is {} bytes, expected {}",
            bytes.len(),
            n * 8
        )));
    }
    let samples: Vec<f64> = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect();
    PhotocurrentTrace::new(rate, samples, seed, digest, n as f64 / rate)
}

pub fn write_psd_csv(path: &Path, psd: &PsdEstimate, digest: &str, seed: u64) -> Result<()> {
    let mut f = BufWriter::new(File::create(path)?);
    f.write_all(header_lines(digest, seed).as_bytes())?;
    writeln!(f, "# rbw_hz = {}", psd.rbw_hz)?;
    writeln!(f, "# n_averages = {}", psd.n_averages)?;
    writeln!(f, "# window = {}", psd.window_name)?;
    writeln!(f, "freq_hz,dbm_per_hz")?;
    for (fq, d) in psd.freq_bins_hz.iter().zip(&psd.density_w_per_hz) {
        let dbm = if *d > 0.0 {
            crate::units::watts_to_dbm(*d)
        } else {
            f64::NEG_INFINITY
        };
        writeln!(f, "{fq},{dbm}")?;
    }
    Ok(())
}

pub fn write_fringe_csv(path: &Path, curve: &FringeCurve) -> Result<()> {
    let mut f = BufWriter::new(File::create(path)?);
    f.write_all(header_lines(&curve.scenario_digest, curve.seed).as_bytes())?;
    writeln!(f, "# p_s_nw = {}", curve.p_s_nw)?;
    writeln!(f, "time_s,phi_prime_rad,power_dbm")?;
    for i in 0..curve.time_s.len() {
        writeln!(
            f,
            "{},{},{}",
            curve.time_s[i], curve.phi_prime_rad[i], curve.power_dbm[i]
        )?;
    }
    Ok(())
}

/// Aligned text table of noise-figure rows.
pub fn format_nf_table(rows: &[NoiseFigureReport]) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:>8}  {:>18}  {:>18}  {:>18}  {:<10} {:<9}\n",
        "P_s(nW)", "SNR_in(dB)", "SNR_out(dB)", "NF(dB)", "hypothesis", "phase"
    ));
    for r in rows {
        let phase = match r.phase_mode {
            crate::model::PhaseMode::Averaged => "averaged".to_string(),
            crate::model::PhaseMode::Locked { k } => format!("locked:{k}"),
            crate::model::PhaseMode::Scanned { .. } => "scanned".to_string(),
        };
        out.push_str(&format!(
            "{:>8.2}  {:>10.2} ±{:>5.2}  {:>10.2} ±{:>5.2}  {:>10.2} ±{:>5.2}  {:<10} {:<9}\n",
            r.p_s_nw,
            r.snr_in_db,
            r.u_snr_in_db,
            r.snr_out_db,
            r.u_snr_out_db,
            r.nf_db,
            r.u_nf_db,
            r.hypothesis.label(),
            phase,
        ));
    }
    out
}

/// Aligned text listing of band checks with PASS/FAIL flags.
pub fn format_checks(checks: &[BandCheck]) -> String {
    let mut out = String::new();
    for c in checks {
        out.push_str(&format!(
            "{}  {:<48} {:>12.4} in [{:>9.4}, {:>9.4}]\n",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.value,
            c.lo,
            c.hi
        ));
    }
    out
}
