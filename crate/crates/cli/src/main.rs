//! Command-line front end: scenario parsing, experiment dispatch, and
//! artifact emission for external plotting.
//!
//! Exit codes: 0 on success (all reference bands PASS), 2 when a
//! reproduction check fails its band, 1 on usage or configuration errors.

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

use hetsim_core::analytic;
use hetsim_core::io;
use hetsim_core::model::NoiseHypothesis;
use hetsim_core::pipeline;
use hetsim_core::scenario::{LoKind, PhaseModeKey, ScenarioDoc, SignalStateKey};
use hetsim_core::simulate::{phase_scan_trace, synth_trace, Scenario};
use hetsim_core::spectral::{self, Window};
use hetsim_core::units::{parse_quantity, watts_to_dbm};
use hetsim_core::DetectorConfig;

/// Environment variable providing the default artifact directory.
const OUT_DIR_ENV: &str = "HETSIM_OUT_DIR";

fn qty(s: &str) -> Result<f64, String> {
    parse_quantity(s).map_err(|e| e.to_string())
}

#[derive(Parser)]
#[command(
    name = "hetsim",
    version,
    about = "Balanced optical heterodyne detection simulator",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum HypArg {
    Standard,
    Cancel,
}

impl From<HypArg> for NoiseHypothesis {
    fn from(h: HypArg) -> Self {
        match h {
            HypArg::Standard => NoiseHypothesis::StandardImageVacuum,
            HypArg::Cancel => NoiseHypothesis::VacuumCancellation,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum PhaseArg {
    Averaged,
    Locked,
    Scan,
}

#[derive(Clone, Copy, ValueEnum)]
enum LoKindArg {
    Mono,
    Bichromatic,
}

#[derive(Clone, Copy, ValueEnum)]
enum StateArg {
    Coherent,
    Vacuum,
    Squeezed,
}

#[derive(Clone, Copy, ValueEnum)]
enum WindowArg {
    Hann,
    Rect,
}

impl From<WindowArg> for Window {
    fn from(w: WindowArg) -> Self {
        match w {
            WindowArg::Hann => Window::Hann,
            WindowArg::Rect => Window::Rect,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum TraceFormat {
    Csv,
    Bin,
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Table2,
    Fig5,
    Fig6,
}

/// Scenario source plus inline overrides. Flags mirror scenario keys
/// one-to-one; an inline flag overrides the file value (last wins).
#[derive(Args)]
struct ScenarioArgs {
    /// Scenario file (flat `key = value` document).
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Print the canonical scenario document and exit.
    #[arg(long)]
    dump_scenario: bool,

    #[arg(long, value_parser = qty)]
    signal_power: Option<f64>,
    #[arg(long, value_enum)]
    signal_state: Option<StateArg>,
    #[arg(long, value_parser = qty)]
    squeezing: Option<f64>,
    #[arg(long, value_parser = qty)]
    wavelength: Option<f64>,
    #[arg(long, value_enum)]
    lo_kind: Option<LoKindArg>,
    #[arg(long, value_parser = qty)]
    lo_power: Option<f64>,
    #[arg(long, value_parser = qty)]
    detuning: Option<f64>,
    #[arg(long, value_parser = qty)]
    phi_s: Option<f64>,
    #[arg(long, value_parser = qty)]
    phi_0: Option<f64>,
    #[arg(long, value_parser = qty)]
    phi_1: Option<f64>,
    #[arg(long, value_parser = qty)]
    phi_2: Option<f64>,
    /// Phase handling: averaged, locked, or scan.
    #[arg(long, value_enum)]
    phase: Option<PhaseArg>,
    #[arg(long)]
    lock_k: Option<i64>,
    #[arg(long, value_parser = qty)]
    scan_rate: Option<f64>,
    #[arg(long, value_parser = qty)]
    jitter_rms: Option<f64>,
    #[arg(long, value_enum)]
    hypothesis: Option<HypArg>,
    #[arg(long, value_parser = qty)]
    eta: Option<f64>,
    #[arg(long, value_parser = qty)]
    gain: Option<f64>,
    #[arg(long, value_parser = qty)]
    rbw: Option<f64>,
    #[arg(long, value_parser = qty)]
    sample_rate: Option<f64>,
    #[arg(long, value_parser = qty)]
    duration: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    cyclostationary: Option<bool>,
    #[arg(long, value_parser = qty)]
    dark_floor: Option<f64>,
}

impl ScenarioArgs {
    /// Resolve the document: file (or defaults), then inline overrides.
    /// Returns the doc and the names of the overridden keys.
    fn resolve(&self) -> hetsim_core::Result<(ScenarioDoc, Vec<&'static str>)> {
        let mut doc = match &self.scenario {
            Some(path) => ScenarioDoc::parse(&std::fs::read_to_string(path)?)?,
            None => ScenarioDoc::default(),
        };
        let mut over = Vec::new();
        macro_rules! set {
            ($field:ident, $key:literal, $value:expr) => {
                if let Some(v) = $value {
                    doc.$field = v;
                    over.push($key);
                }
            };
        }
        set!(signal_power_w, "signal_power", self.signal_power);
        set!(squeezing, "squeezing", self.squeezing);
        set!(wavelength_m, "wavelength", self.wavelength);
        set!(lo_power_w, "lo_power", self.lo_power);
        set!(detuning_hz, "detuning", self.detuning);
        set!(phi_s, "phi_s", self.phi_s);
        set!(phi_0, "phi_0", self.phi_0);
        set!(phi_1, "phi_1", self.phi_1);
        set!(phi_2, "phi_2", self.phi_2);
        set!(lock_k, "lock_k", self.lock_k);
        set!(scan_rate_rad_s, "scan_rate", self.scan_rate);
        set!(jitter_rms_rad, "jitter_rms", self.jitter_rms);
        set!(eta, "eta", self.eta);
        set!(gain, "gain", self.gain);
        set!(rbw_hz, "rbw", self.rbw);
        set!(sample_rate_hz, "sample_rate", self.sample_rate);
        set!(duration_s, "duration", self.duration);
        set!(seed, "seed", self.seed);
        set!(cyclostationary, "cyclostationary", self.cyclostationary);
        set!(dark_floor_w_per_hz, "dark_floor", self.dark_floor);
        if let Some(s) = self.signal_state {
            doc.signal_state = match s {
                StateArg::Coherent => SignalStateKey::Coherent,
                StateArg::Vacuum => SignalStateKey::Vacuum,
                StateArg::Squeezed => SignalStateKey::Squeezed,
            };
            if matches!(s, StateArg::Vacuum) {
                doc.signal_power_w = 0.0;
            }
            over.push("signal_state");
        }
        if let Some(k) = self.lo_kind {
            doc.lo_kind = match k {
                LoKindArg::Mono => LoKind::Mono,
                LoKindArg::Bichromatic => LoKind::Bichromatic,
            };
            over.push("lo_kind");
        }
        if let Some(p) = self.phase {
            doc.phase_mode = match p {
                PhaseArg::Averaged => PhaseModeKey::Averaged,
                PhaseArg::Locked => PhaseModeKey::Locked,
                PhaseArg::Scan => PhaseModeKey::Scanned,
            };
            over.push("phase_mode");
        }
        if let Some(h) = self.hypothesis {
            doc.hypothesis = h.into();
            over.push("hypothesis");
        }
        // A scan needs a rate; default to one turn per configured duration.
        if doc.phase_mode == PhaseModeKey::Scanned && doc.scan_rate_rad_s == 0.0 {
            doc.scan_rate_rad_s = 2.0 * std::f64::consts::PI / doc.duration_s;
        }
        Ok((doc, over))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print the predicted noise-figure matrix.
    Predict {
        #[arg(long)]
        json: bool,
    },
    /// Synthesize a photocurrent trace and write it to the output directory.
    Simulate {
        #[command(flatten)]
        sc: ScenarioArgs,
        #[arg(long, value_enum, default_value = "csv")]
        format: TraceFormat,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Estimate the power spectral density of a synthesized trace.
    Psd {
        #[command(flatten)]
        sc: ScenarioArgs,
        #[arg(long, default_value_t = 8)]
        averages: usize,
        #[arg(long, value_enum, default_value = "hann")]
        window: WindowArg,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Sweep the relative phase and export the fringe curve.
    PhaseScan {
        #[command(flatten)]
        sc: ScenarioArgs,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Measure the noise figure of a scenario by Monte Carlo.
    Nf {
        #[command(flatten)]
        sc: ScenarioArgs,
        #[arg(long, default_value_t = 20)]
        seeds: usize,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Re-run a canned experiment and check its reference bands.
    Reproduce {
        #[arg(value_enum)]
        what: Target,
        #[arg(long, default_value_t = 100)]
        seeds: usize,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Solve for the electronic gain that puts a shot-noise floor at a
    /// target level (dBm/Hz).
    Calibrate {
        #[arg(long, value_parser = qty, default_value = "-139", allow_hyphen_values = true)]
        target_floor: f64,
        #[arg(long, value_parser = qty, default_value = "1 mW")]
        lo_power: f64,
        #[arg(long, value_parser = qty, default_value = "0.7")]
        eta: f64,
        #[arg(long, value_parser = qty, default_value = "1064 nm")]
        wavelength: f64,
        #[arg(long, value_enum, default_value = "cancel")]
        hypothesis: HypArg,
    },
}

fn out_dir(flag: &Option<PathBuf>) -> hetsim_core::Result<PathBuf> {
    let dir = flag
        .clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn print_run_header(sc: &Scenario, overrides: &[&str]) {
    println!("hetsim {}", io::TOOL_VERSION);
    println!("scenario digest {}", sc.digest());
    println!("seed {}", sc.seed);
    if !overrides.is_empty() {
        println!("overrides: {}", overrides.join(", "));
    }
}

/// Dump the canonical scenario to stdout when requested; true when the
/// command should stop there.
fn maybe_dump(args: &ScenarioArgs, doc: &ScenarioDoc) -> bool {
    if args.dump_scenario {
        print!("{}", doc.canonical());
        return true;
    }
    false
}

fn run(cli: Cli) -> hetsim_core::Result<i32> {
    match cli.cmd {
        Command::Predict { json } => {
            let matrix = analytic::nf_prediction_matrix();
            if json {
                let rows: Vec<serde_pair> = matrix
                    .iter()
                    .map(|(k, v)| serde_pair {
                        detector: k.to_string(),
                        nf_db: *v,
                    })
                    .collect();
                println!(
                    "{}",
                    serde_json::to_string_pretty(&rows).expect("matrix serializes")
                );
            } else {
                println!("predicted noise figure (dB), computed from the power formulas");
                for (name, nf) in matrix {
                    println!("  {name:<24} {nf:+7.2}");
                }
            }
            Ok(0)
        }
        Command::Simulate {
            sc,
            format,
            out_dir: od,
        } => {
            let (doc, over) = sc.resolve()?;
            if maybe_dump(&sc, &doc) {
                return Ok(0);
            }
            let scn = Scenario::from_doc(&doc)?;
            print_run_header(&scn, &over);
            let trace = synth_trace(&scn)?;
            let dir = out_dir(&od)?;
            let path = match format {
                TraceFormat::Csv => {
                    let p = dir.join(format!("trace-{}.csv", scn.digest()));
                    io::write_trace_csv(&p, &trace)?;
                    p
                }
                TraceFormat::Bin => {
                    let p = dir.join(format!("trace-{}.bin", scn.digest()));
                    io::write_trace_bin(&p, &trace)?;
                    p
                }
            };
            let rms =
                (trace.samples.iter().map(|s| s * s).sum::<f64>() / trace.len() as f64).sqrt();
            println!("samples {}  rms {:.4e} A", trace.len(), rms);
            println!("wrote {}", path.display());
            Ok(0)
        }
        Command::Psd {
            sc,
            averages,
            window,
            out_dir: od,
        } => {
            let (doc, over) = sc.resolve()?;
            if maybe_dump(&sc, &doc) {
                return Ok(0);
            }
            let scn = Scenario::from_doc(&doc)?;
            print_run_header(&scn, &over);
            let trace = synth_trace(&scn)?;
            let psd =
                spectral::psd_estimate(&trace, doc.rbw_hz, averages, window.into(), doc.gain)?;
            let f_beat = scn.beat_omega() / (2.0 * std::f64::consts::PI);
            let floor = spectral::floor_density(&psd, f_beat, 6.0 * doc.rbw_hz)?;
            println!(
                "floor {:.2} dBm/Hz ({} averages)",
                watts_to_dbm(floor),
                psd.n_averages
            );
            if scn.sig.alpha_s > 0.0 {
                let beat = spectral::band_power_dbm(&psd, f_beat, 4.0 * doc.rbw_hz)?;
                println!("beatnote band power {beat:.2} dBm at {f_beat:.4e} Hz");
            }
            let dir = out_dir(&od)?;
            let csv = dir.join(format!("psd-{}.csv", scn.digest()));
            io::write_psd_csv(&csv, &psd, scn.digest(), scn.seed)?;
            let json = dir.join(format!("psd-{}.json", scn.digest()));
            io::write_json(&json, scn.digest(), scn.seed, &psd)?;
            println!("wrote {}", csv.display());
            println!("wrote {}", json.display());
            Ok(0)
        }
        Command::PhaseScan { sc, out_dir: od } => {
            let (mut doc, over) = sc.resolve()?;
            if doc.phase_mode != PhaseModeKey::Scanned {
                doc.phase_mode = PhaseModeKey::Scanned;
                if doc.scan_rate_rad_s == 0.0 {
                    doc.scan_rate_rad_s = 2.0 * std::f64::consts::PI / doc.duration_s;
                }
            }
            if maybe_dump(&sc, &doc) {
                return Ok(0);
            }
            let scn = Scenario::from_doc(&doc)?;
            print_run_header(&scn, &over);
            let (trace, record) = phase_scan_trace(&scn)?;
            let rms =
                (trace.samples.iter().map(|s| s * s).sum::<f64>() / trace.len() as f64).sqrt();
            println!(
                "scan {:.3e} rad/s over {:.4} s, {} fringe samples, trace rms {:.4e} A",
                doc.scan_rate_rad_s,
                doc.duration_s,
                record.time_s.len(),
                rms
            );
            let dir = out_dir(&od)?;
            let path = dir.join(format!("scan-{}.csv", scn.digest()));
            let mut rows = String::from("time_s,phi_prime_rad,beat_amplitude_a\n");
            for i in 0..record.time_s.len() {
                rows.push_str(&format!(
                    "{},{},{}\n",
                    record.time_s[i], record.phi_prime_rad[i], record.beat_amplitude_a[i]
                ));
            }
            std::fs::write(
                &path,
                format!(
                    "# hetsim {}\n# digest = {}\n# seed = {}\n{rows}",
                    io::TOOL_VERSION,
                    scn.digest(),
                    scn.seed
                ),
            )?;
            println!("wrote {}", path.display());
            Ok(0)
        }
        Command::Nf {
            sc,
            seeds,
            out_dir: od,
        } => {
            let (doc, over) = sc.resolve()?;
            if maybe_dump(&sc, &doc) {
                return Ok(0);
            }
            let scn = Scenario::from_doc(&doc)?;
            print_run_header(&scn, &over);
            let report = pipeline::run_nf_experiment(&scn, seeds)?;
            print!("{}", io::format_nf_table(std::slice::from_ref(&report)));
            let dir = out_dir(&od)?;
            let path = dir.join(format!("nf-{}.json", scn.digest()));
            io::write_json(&path, scn.digest(), scn.seed, &report)?;
            println!("wrote {}", path.display());
            Ok(0)
        }
        Command::Reproduce {
            what,
            seeds,
            out_dir: od,
        } => {
            let dir = out_dir(&od)?;
            match what {
                Target::Table2 => {
                    let res = pipeline::reproduce_table2(seeds)?;
                    print!("{}", io::format_nf_table(&res.rows));
                    print!("{}", io::format_checks(&res.checks));
                    let json = dir.join("table2.json");
                    io::write_json(&json, "table2", seeds as u64, &res)?;
                    let txt = dir.join("table2.txt");
                    std::fs::write(
                        &txt,
                        format!(
                            "# hetsim {}\n{}{}",
                            io::TOOL_VERSION,
                            io::format_nf_table(&res.rows),
                            io::format_checks(&res.checks)
                        ),
                    )?;
                    println!("wrote {}", json.display());
                    println!("wrote {}", txt.display());
                    Ok(if res.pass() { 0 } else { 2 })
                }
                Target::Fig5 => {
                    let res = pipeline::reproduce_fig5()?;
                    print!("{}", io::format_checks(&res.checks));
                    for curve in &res.curves {
                        let path = dir.join(format!(
                            "fringe-{}nw-{}.csv",
                            curve.p_s_nw, curve.scenario_digest
                        ));
                        io::write_fringe_csv(&path, curve)?;
                        println!("wrote {}", path.display());
                    }
                    let json = dir.join("fig5.json");
                    io::write_json(&json, "fig5", 0, &res)?;
                    println!("wrote {}", json.display());
                    Ok(if res.pass() { 0 } else { 2 })
                }
                Target::Fig6 => {
                    let res = pipeline::reproduce_fig6(seeds.min(16))?;
                    print!("{}", io::format_checks(&res.checks));
                    println!(
                        "floors: 1 mW {:.2} dBm/Hz, 2 mW {:.2} dBm/Hz, beatnote {:.2} dBm/Hz",
                        res.floor_1mw_dbm_per_hz,
                        res.floor_2mw_dbm_per_hz,
                        res.beat_floor_dbm_per_hz
                    );
                    for (name, psd) in [
                        ("beatnote-1mw", &res.beatnote_psd),
                        ("blocked-1mw", &res.blocked_1mw_psd),
                        ("blocked-2mw", &res.blocked_2mw_psd),
                    ] {
                        let path = dir.join(format!("fig6-{name}.csv"));
                        io::write_psd_csv(&path, psd, "fig6", 0)?;
                        println!("wrote {}", path.display());
                    }
                    let json = dir.join("fig6.json");
                    io::write_json(&json, "fig6", 0, &res)?;
                    println!("wrote {}", json.display());
                    Ok(if res.pass() { 0 } else { 2 })
                }
            }
        }
        Command::Calibrate {
            target_floor,
            lo_power,
            eta,
            wavelength,
            hypothesis,
        } => {
            let cfg = DetectorConfig::new(eta, 1.0, 1e3, wavelength * 1e9)?;
            let gain = pipeline::calibrate_gain(target_floor, lo_power, &cfg, hypothesis.into())?;
            println!(
                "gain = {gain:.6e} ({:.2} dB) puts the {} hypothesis floor of a {:.3e} W \
                 oscillator at {target_floor} dBm/Hz",
                10.0 * gain.log10(),
                NoiseHypothesis::from(hypothesis).label(),
                lo_power
            );
            Ok(0)
        }
    }
}

#[derive(serde::Serialize)]
#[allow(non_camel_case_types)]
struct serde_pair {
    detector: String,
    nf_db: f64,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
