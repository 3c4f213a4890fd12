//! Trainable 1-D convolutional filterbanks with frame-theoretic stability
//! guarantees.
//!
//! The crate builds, analyzes, and trains finite-length filterbanks
//! (auditory, STFT, random, and fixed⊛trainable hybrids) on circular
//! length-N signals. Stability is tracked through the optimal frame
//! bounds A ≤ B and their ratio κ = B/A: κ = 1 means energy
//! preservation and perfect reconstruction; large κ means noise
//! amplification in any inverse. Everything runs in f64.
//!
//! Main entry points:
//!
//! - [`filterbank::Filterbank`] and the constructors
//!   [`filterbank::make_auditory`], [`filterbank::make_stft`],
//!   [`filterbank::make_random`], [`filterbank::compose_hybrid`],
//!   [`filterbank::canonical_tight`];
//! - [`signal::analyze`] / [`signal::synthesize`] — the analysis operator
//!   Φ and its adjoint under hop decimation;
//! - [`frame::frame_bounds_fft`] (DFT spectrum, Eq.-style bounds),
//!   [`frame::frame_bounds_exact`] (dense eigen-oracle),
//!   [`frame::kappa_gradient`], [`frame::reconstruct`];
//! - [`objectives`] — mixed compressed spectral loss, its κ-penalized
//!   variant, SI-SDR and reconstruction SNR metrics;
//! - [`trainer`] — κ-tightening and hybrid encoder training, the
//!   oracle-mask enhancement pipeline;
//! - [`montecarlo`] — statistical verification of the random-filter
//!   tightness identities;
//! - [`cli`] — the command-line front end used by the `framebank` binary.
//!
//! Conventions, fixed crate-wide: circular (mod-N) boundary handling,
//! unnormalized forward DFT with 1/N inverse, decimation by keeping every
//! hop-th output with hop | N.

// Positivity guards are written `!(x > 0.0)` on purpose: unlike
// `x <= 0.0`, the negated form also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod fft;
pub mod filterbank;
pub mod frame;
pub mod montecarlo;
pub mod objectives;
pub mod signal;
pub mod trainer;
pub mod wav;

pub use error::{Error, Result};
pub use filterbank::{
    canonical_tight, compose_hybrid, make_auditory, make_random, make_stft, AuditorySpec,
    Filterbank, Tag,
};
pub use frame::{
    frame_bounds_exact, frame_bounds_fft, is_tight, kappa_gradient, reconstruct, FrameBounds,
};
pub use montecarlo::{verify_hybrid_tightness, verify_random_tightness, TightnessEstimate};
pub use objectives::{mcs, mcs_beta, recon_snr, si_sdr, McsParams};
pub use signal::{analyze, synthesize, Coefficients, Signal};
pub use trainer::{
    enhance, fit_hybrid, ideal_ratio_mask, tighten, GradMode, MaskArray, OptimizerKind, TraceEntry,
    TrainConfig, TrainReport,
};
