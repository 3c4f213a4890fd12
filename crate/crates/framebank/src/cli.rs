//! Command-line front end: construction, analysis, training, and
//! verification as batch commands with JSON/CSV payloads.
//!
//! Exit codes: 0 success, 1 usage error (unknown/missing flags), 2
//! domain or numeric error (invalid parameter values, non-frame banks,
//! resource guards), 3 I/O or file-format error. Exactly one
//! machine-readable payload goes to stdout; human diagnostics go to
//! stderr. κ = ∞ and infinite dB values serialize as JSON `null`.

use crate::error::Error;
use crate::filterbank::{
    compose_hybrid, load, make_auditory, make_random, make_stft, save, AuditorySpec,
};
use crate::frame::{frame_bounds_exact, frame_bounds_fft, reconstruct, FrameBounds};
use crate::montecarlo::{verify_hybrid_tightness, verify_random_tightness, TightnessEstimate};
use crate::objectives::{mcs, recon_snr, si_sdr, McsParams};
use crate::signal::analyze;
use crate::trainer::{enhance, ideal_ratio_mask, tighten, GradMode, TrainConfig};
use crate::wav::{wav_read, wav_write};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use std::ffi::OsString;
use std::path::{Path, PathBuf};

/// Outcome of one CLI invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandResult {
    /// 0 success, 1 usage, 2 domain/numeric, 3 I/O.
    pub exit_code: i32,
    /// The single machine-readable payload (JSON or CSV), if any.
    pub stdout: String,
    /// Human diagnostics.
    pub stderr: String,
}

/// dB floor used by `analyze --log-mag`: 20·log₁₀(|c| + 1e-10).
pub const LOG_MAG_FLOOR: f64 = 1e-10;

#[derive(Parser)]
#[command(
    name = "framebank",
    version,
    about = "Filterbank construction, frame analysis, training, and verification",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Kind {
    Stft,
    Auditory,
    Random,
    Hybrid,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum VerifyMode {
    Random,
    Hybrid,
}

#[derive(Subcommand)]
enum Command {
    /// Construct a filterbank and write it as a container JSON file.
    Generate {
        /// Family to construct.
        #[arg(long, value_enum)]
        kind: Kind,
        /// Output container path.
        #[arg(long)]
        out: PathBuf,
        /// Decimation hop (defaults: stft window/2, others 1).
        #[arg(long)]
        hop: Option<usize>,
        /// stft: number of DFT bins; auditory: mel centers; random: J.
        #[arg(long)]
        channels: Option<usize>,
        /// stft only: Hann window length.
        #[arg(long)]
        window_length: Option<usize>,
        /// auditory only: sample rate in Hz.
        #[arg(long)]
        sample_rate: Option<u32>,
        /// auditory only: lowest center frequency in Hz (default 0).
        #[arg(long)]
        f_min: Option<f64>,
        /// auditory only: highest center frequency in Hz (default
        /// Nyquist).
        #[arg(long)]
        f_max: Option<f64>,
        /// auditory: filter length; random: T.
        #[arg(long)]
        filter_length: Option<usize>,
        /// random only: per-tap variance (default 1/(J·T)).
        #[arg(long)]
        sigma2: Option<f64>,
        /// random only: RNG seed (default 0).
        #[arg(long)]
        seed: Option<u64>,
        /// hybrid only: container path of the fixed bank.
        #[arg(long)]
        fixed: Option<PathBuf>,
        /// hybrid only: container path of the trainable bank.
        #[arg(long)]
        trainable: Option<PathBuf>,
    },
    /// Frame bounds and condition number of a stored filterbank.
    Bounds {
        #[arg(long)]
        fb: PathBuf,
        /// Transform length N.
        #[arg(long)]
        signal_length: usize,
        /// Use the dense decimation-aware oracle at the bank's own hop
        /// instead of the undecimated DFT spectrum.
        #[arg(long, default_value_t = false)]
        hop_exact: bool,
    },
    /// Analysis coefficients of a WAV file as CSV (n,j,re,im).
    Analyze {
        #[arg(long)]
        fb: PathBuf,
        /// Input mono WAV file.
        #[arg(long = "in")]
        input: PathBuf,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Emit n,j,log_magnitude rows: 20·log10(|c| + 1e-10).
        #[arg(long, default_value_t = false)]
        log_mag: bool,
    },
    /// Analysis→synthesis round trip quality of a stored bank.
    Roundtrip {
        #[arg(long)]
        fb: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Minimize κ over the trainable filter entries.
    Tighten {
        #[arg(long)]
        fb: PathBuf,
        /// Transform length N for the spectral bounds.
        #[arg(long)]
        signal_length: usize,
        /// Optimization steps (default 500).
        #[arg(long, default_value_t = 500)]
        steps: usize,
        /// Learning rate (default 1e-3, the desk-scale value).
        #[arg(long, default_value_t = 1e-3)]
        lr: f64,
        /// Output container path for the tightened bank.
        #[arg(long)]
        out: PathBuf,
        /// Optional CSV trace (step,loss,mcs_term,kappa,grad_norm).
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Mixed compressed spectral loss between two WAV files.
    Mcs {
        #[arg(long)]
        fb: PathBuf,
        /// Reference WAV.
        #[arg(long = "ref")]
        reference: PathBuf,
        /// Estimate WAV.
        #[arg(long = "est")]
        estimate: PathBuf,
        /// Compression exponent (default 0.3).
        #[arg(long, default_value_t = 0.3)]
        c: f64,
        /// Phase-term weight (default 0.3).
        #[arg(long, default_value_t = 0.3)]
        gamma: f64,
        /// κ-penalty weight (default 1e-5).
        #[arg(long, default_value_t = 1e-5)]
        beta: f64,
    },
    /// Oracle-mask enhancement: encoder → ideal ratio mask → decoder.
    Enhance {
        #[arg(long)]
        fb: PathBuf,
        #[arg(long)]
        noisy: PathBuf,
        #[arg(long)]
        clean: PathBuf,
        /// Output WAV for the enhanced signal.
        #[arg(long)]
        out: PathBuf,
    },
    /// Monte Carlo check of the random-filter tightness identities.
    #[command(name = "verify-theorem1")]
    VerifyTheorem1 {
        #[arg(long, value_enum)]
        mode: VerifyMode,
        /// random mode: channel count J.
        #[arg(long = "J")]
        j: Option<usize>,
        /// Filter length T of the random (trainable) part.
        #[arg(long = "T")]
        t: usize,
        /// Per-tap variance σ².
        #[arg(long)]
        sigma2: f64,
        /// Signal length N.
        #[arg(long = "N")]
        n: usize,
        /// Monte Carlo trials (default 10000).
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        /// Base seed; trial k derives seed + k.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// hybrid mode: container path of the tight fixed bank.
        #[arg(long)]
        fixed: Option<PathBuf>,
    },
}

enum RunError {
    /// Flag-combination problems detected after clap parsing.
    Usage(String),
    Lib(Error),
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        RunError::Lib(e)
    }
}

fn usage<T>(msg: impl Into<String>) -> Result<T, RunError> {
    Err(RunError::Usage(msg.into()))
}

fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::InvalidArgument(_) | Error::Domain(_) | Error::Resource(_) => 2,
        Error::Io { .. } | Error::Parse(_) => 3,
    }
}

fn finite_or_null(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        Value::Null
    }
}

fn bounds_json(b: &FrameBounds) -> Value {
    json!({
        "A": b.a,
        "B": b.b,
        "kappa": finite_or_null(b.kappa),
    })
}

fn estimate_json(e: &TightnessEstimate) -> Value {
    json!({
        "mean_ratio": e.mean_ratio,
        "stderr": e.stderr,
        "trials": e.trials,
        "expected_constant": e.expected_constant,
    })
}

fn payload(v: Value) -> String {
    let mut s = serde_json::to_string_pretty(&v).expect("JSON payloads serialize");
    s.push('\n');
    s
}

/// Runs one CLI invocation without touching process-global state.
///
/// The first element of `argv` is the program name, as in `std::env::args_os`.
pub fn run<I, A>(argv: I) -> CommandResult
where
    I: IntoIterator<Item = A>,
    A: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // --help/--version are successful no-ops by convention.
            let code = if e.use_stderr() { 1 } else { 0 };
            let rendered = e.render().to_string();
            return if code == 0 {
                CommandResult {
                    exit_code: 0,
                    stdout: rendered,
                    stderr: String::new(),
                }
            } else {
                CommandResult {
                    exit_code: 1,
                    stdout: String::new(),
                    stderr: rendered,
                }
            };
        }
    };
    match dispatch(cli.command) {
        Ok(stdout) => CommandResult {
            exit_code: 0,
            stdout,
            stderr: String::new(),
        },
        Err(RunError::Usage(msg)) => CommandResult {
            exit_code: 1,
            stdout: String::new(),
            stderr: format!("usage error: {msg}\n"),
        },
        Err(RunError::Lib(err)) => CommandResult {
            exit_code: exit_code_for(&err),
            stdout: String::new(),
            stderr: format!("error: {err}\n"),
        },
    }
}

fn dispatch(command: Command) -> Result<String, RunError> {
    match command {
        Command::Generate {
            kind,
            out,
            hop,
            channels,
            window_length,
            sample_rate,
            f_min,
            f_max,
            filter_length,
            sigma2,
            seed,
            fixed,
            trainable,
        } => {
            let fb = match kind {
                Kind::Stft => {
                    let channels = require(channels, "--channels", "stft")?;
                    let window = require(window_length, "--window-length", "stft")?;
                    make_stft(channels, window, hop.unwrap_or(window / 2))?
                }
                Kind::Auditory => {
                    let sample_rate = require(sample_rate, "--sample-rate", "auditory")?;
                    let spec = AuditorySpec {
                        channels: require(channels, "--channels", "auditory")?,
                        sample_rate,
                        f_min: f_min.unwrap_or(0.0),
                        f_max: f_max.unwrap_or(f64::from(sample_rate) / 2.0),
                        filter_length: require(filter_length, "--filter-length", "auditory")?,
                        hop: hop.unwrap_or(1),
                    };
                    make_auditory(&spec)?
                }
                Kind::Random => {
                    let j = require(channels, "--channels", "random")?;
                    let t = require(filter_length, "--filter-length", "random")?;
                    let sigma2 = sigma2.unwrap_or(1.0 / (j as f64 * t as f64));
                    make_random(j, t, sigma2, hop.unwrap_or(1), seed.unwrap_or(0))?
                }
                Kind::Hybrid => {
                    let fixed = load(&require(fixed, "--fixed", "hybrid")?)?;
                    let trainable = load(&require(trainable, "--trainable", "hybrid")?)?;
                    compose_hybrid(&fixed, &trainable, hop)?
                }
            };
            save(&fb, &out)?;
            Ok(payload(json!({
                "written": out.display().to_string(),
                "kind": fb.tag().as_str(),
                "channels": fb.n_channels(),
                "hop": fb.hop(),
                "max_filter_length": fb.max_filter_length(),
            })))
        }
        Command::Bounds {
            fb,
            signal_length,
            hop_exact,
        } => {
            let bank = load(&fb)?;
            let bounds = if hop_exact {
                frame_bounds_exact(&bank, signal_length, bank.hop())?
            } else {
                frame_bounds_fft(&bank, signal_length)?
            };
            Ok(payload(bounds_json(&bounds)))
        }
        Command::Analyze {
            fb,
            input,
            out,
            log_mag,
        } => {
            let bank = load(&fb)?;
            let x = wav_read(&input)?;
            let coef = analyze(&bank, &x)?;
            let mut csv = String::from(if log_mag {
                "n,j,log_magnitude\n"
            } else {
                "n,j,re,im\n"
            });
            for n in 0..coef.n_frames() {
                for j in 0..coef.n_channels() {
                    let v = coef.value(n, j);
                    if log_mag {
                        let db = 20.0 * (v.norm() + LOG_MAG_FLOOR).log10();
                        csv.push_str(&format!("{n},{j},{db}\n"));
                    } else {
                        csv.push_str(&format!("{n},{j},{},{}\n", v.re, v.im));
                    }
                }
            }
            match out {
                Some(path) => {
                    write_text(&path, &csv)?;
                    Ok(payload(json!({
                        "written": path.display().to_string(),
                        "n_frames": coef.n_frames(),
                        "n_channels": coef.n_channels(),
                        "hop": coef.hop(),
                    })))
                }
                None => Ok(csv),
            }
        }
        Command::Roundtrip { fb, input } => {
            let bank = load(&fb)?;
            let x = wav_read(&input)?;
            let (xhat, err) = reconstruct(&bank, &x)?;
            let snr = recon_snr(&x, &xhat)?;
            Ok(payload(json!({
                "recon_error": err,
                "recon_snr_db": finite_or_null(snr),
            })))
        }
        Command::Tighten {
            fb,
            signal_length,
            steps,
            lr,
            out,
            trace,
        } => {
            let bank = load(&fb)?;
            let cfg = TrainConfig {
                learning_rate: lr,
                steps,
                grad_mode: GradMode::AnalyticKappaOnly,
                ..TrainConfig::default()
            };
            let mask = vec![true; bank.n_channels()];
            let report = tighten(&bank, &mask, signal_length, &cfg)?;
            save(&report.filterbank, &out)?;
            if let Some(path) = &trace {
                write_text(path, &report.trace_csv())?;
            }
            Ok(payload(json!({
                "written": out.display().to_string(),
                "initial_kappa": report.initial_kappa(),
                "final_kappa": report.final_kappa(),
                "converged": report.converged,
                "steps": steps,
            })))
        }
        Command::Mcs {
            fb,
            reference,
            estimate,
            c,
            gamma,
            beta,
        } => {
            let bank = load(&fb)?;
            let x = wav_read(&reference)?;
            let y = wav_read(&estimate)?;
            let p = McsParams { c, gamma, beta };
            let loss = mcs(&x, &y, &bank, &p)?;
            let bounds = frame_bounds_fft(&bank, x.len())?;
            let penalized = if bounds.kappa.is_finite() {
                json!(loss + p.beta * bounds.kappa)
            } else {
                Value::Null
            };
            Ok(payload(json!({
                "mcs": loss,
                "kappa": finite_or_null(bounds.kappa),
                "mcs_beta": penalized,
                "c": c,
                "gamma": gamma,
                "beta": beta,
                "normalization": "sum over coefficients",
            })))
        }
        Command::Enhance {
            fb,
            noisy,
            clean,
            out,
        } => {
            let bank = load(&fb)?;
            let noisy_sig = wav_read(&noisy)?;
            let clean_sig = wav_read(&clean)?;
            if noisy_sig.sample_rate() != clean_sig.sample_rate() {
                return Err(Error::invalid(format!(
                    "sample rates differ: noisy {} Hz vs clean {} Hz",
                    noisy_sig.sample_rate(),
                    clean_sig.sample_rate()
                ))
                .into());
            }
            let mask = ideal_ratio_mask(&clean_sig, &noisy_sig, &bank)?;
            let enhanced = enhance(&bank, &noisy_sig, &mask)?;
            wav_write(&out, &enhanced)?;
            let before = si_sdr(&clean_sig, &noisy_sig)?;
            let after = si_sdr(&clean_sig, &enhanced)?;
            Ok(payload(json!({
                "written": out.display().to_string(),
                "si_sdr_in": finite_or_null(before),
                "si_sdr_out": finite_or_null(after),
            })))
        }
        Command::VerifyTheorem1 {
            mode,
            j,
            t,
            sigma2,
            n,
            trials,
            seed,
            fixed,
        } => {
            let estimate = match mode {
                VerifyMode::Random => {
                    let j = require(j, "--J", "random")?;
                    if fixed.is_some() {
                        return usage("--fixed applies only to --mode hybrid");
                    }
                    verify_random_tightness(j, t, sigma2, n, trials, seed)?
                }
                VerifyMode::Hybrid => {
                    let path = require(fixed, "--fixed", "hybrid")?;
                    if j.is_some() {
                        return usage("--J applies only to --mode random (hybrid takes its channel count from --fixed)");
                    }
                    let bank = load(&path)?;
                    verify_hybrid_tightness(&bank, t, sigma2, n, trials, seed)?
                }
            };
            Ok(payload(estimate_json(&estimate)))
        }
    }
}

fn require<T>(value: Option<T>, flag: &str, context: &str) -> Result<T, RunError> {
    match value {
        Some(v) => Ok(v),
        None => usage(format!("{flag} is required for {context}")),
    }
}

fn write_text(path: &Path, content: &str) -> Result<(), Error> {
    std::fs::write(path, content).map_err(|e| Error::io(format!("writing {}", path.display()), e))
}
