//! Training objectives and evaluation metrics: the mixed compressed
//! spectral (MCS) loss on encoder coefficients, its κ-penalized variant,
//! and the SI-SDR / reconstruction-SNR metrics used to score enhancement.
//!
//! All losses are plain sums over coefficients (no mean normalization);
//! the κ-penalty weight β is calibrated against magnitudes of that
//! family, and the CLI reports the convention alongside the value.

use crate::error::{Error, Result};
use crate::filterbank::Filterbank;
use crate::frame::frame_bounds_fft;
use crate::signal::{analyze, Signal};
use num_complex::Complex64;

/// Parameters of the mixed compressed spectral loss.
///
/// `c` is the magnitude-compression exponent, `gamma` mixes the
/// phase-aware and magnitude-only terms, and `beta` weights the κ
/// penalty in [`mcs_beta`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McsParams {
    /// Compression exponent ∈ (0, 1]; 1 disables compression.
    pub c: f64,
    /// Phase-term weight ∈ [0, 1]; 0 keeps only magnitudes.
    pub gamma: f64,
    /// κ-penalty weight ≥ 0 (used by [`mcs_beta`] and training).
    pub beta: f64,
}

impl Default for McsParams {
    fn default() -> Self {
        McsParams {
            c: 0.3,
            gamma: 0.3,
            beta: 1e-5,
        }
    }
}

impl McsParams {
    /// Checks the parameter ranges: c ∈ (0, 1], gamma ∈ [0, 1], beta ≥ 0.
    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c <= 1.0) {
            return Err(Error::invalid(format!(
                "compression exponent c must lie in (0, 1], got {}",
                self.c
            )));
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::invalid(format!(
                "gamma must lie in [0, 1], got {}",
                self.gamma
            )));
        }
        if !(self.beta >= 0.0) {
            return Err(Error::invalid(format!(
                "beta must be nonnegative, got {}",
                self.beta
            )));
        }
        Ok(())
    }
}

/// Magnitude-compresses one coefficient: |v|^c · e^{j·arg v}, with the
/// zero-magnitude phase pinned to 0 so the map is continuous at the
/// origin for c > 0.
fn compress(v: Complex64, c: f64) -> (Complex64, f64) {
    let m = v.norm();
    if m == 0.0 {
        return (Complex64::new(0.0, 0.0), 0.0);
    }
    let mc = m.powf(c);
    ((v / m) * mc, mc)
}

/// Mixed compressed spectral loss between two equal-length signals under
/// one encoder:
///
///   MCS(x, x̃) = γ·‖|Φx|^c e^{jφ} − |Φx̃|^c e^{jφ̃}‖²
///             + (1−γ)·‖|Φx|^c − |Φx̃|^c‖²,
///
/// squared Frobenius sums over all (frame, channel) coefficients of the
/// decimated analysis.
pub fn mcs(x: &Signal, x_tilde: &Signal, fb: &Filterbank, p: &McsParams) -> Result<f64> {
    p.validate()?;
    if x.len() != x_tilde.len() {
        return Err(Error::invalid(format!(
            "signal lengths differ: {} vs {}",
            x.len(),
            x_tilde.len()
        )));
    }
    let cx = analyze(fb, x)?;
    let cy = analyze(fb, x_tilde)?;
    let mut phase_term = 0.0;
    let mut mag_term = 0.0;
    for (u, w) in cx.as_slice().iter().zip(cy.as_slice()) {
        let (uc, um) = compress(*u, p.c);
        let (wc, wm) = compress(*w, p.c);
        phase_term += (uc - wc).norm_sqr();
        mag_term += (um - wm) * (um - wm);
    }
    Ok(p.gamma * phase_term + (1.0 - p.gamma) * mag_term)
}

/// κ-penalized MCS loss: MCS(x, x̃) + β·κ with κ from the undecimated
/// DFT spectrum at length `n`.
pub fn mcs_beta(
    x: &Signal,
    x_tilde: &Signal,
    fb: &Filterbank,
    p: &McsParams,
    n: usize,
) -> Result<f64> {
    let bounds = frame_bounds_fft(fb, n)?;
    if !bounds.kappa.is_finite() {
        return Err(Error::domain(
            "penalized loss undefined: filterbank is not a frame (kappa = infinity)",
        ));
    }
    Ok(mcs(x, x_tilde, fb, p)? + p.beta * bounds.kappa)
}

/// Scale-invariant signal-to-distortion ratio in dB.
///
/// With α = ⟨estimate, reference⟩/‖reference‖², returns
/// 10·log₁₀(‖α·reference‖²/‖α·reference − estimate‖²). Exact matches up
/// to scale give +∞; an estimate orthogonal to the reference gives −∞.
/// Callers needing finite values clamp explicitly.
pub fn si_sdr(reference: &Signal, estimate: &Signal) -> Result<f64> {
    if reference.len() != estimate.len() {
        return Err(Error::invalid(format!(
            "signal lengths differ: {} vs {}",
            reference.len(),
            estimate.len()
        )));
    }
    let ref_energy = reference.energy();
    if ref_energy == 0.0 {
        return Err(Error::invalid(
            "SI-SDR reference signal is identically zero",
        ));
    }
    let dot: f64 = estimate
        .samples()
        .iter()
        .zip(reference.samples())
        .map(|(e, r)| e * r)
        .sum();
    let alpha = dot / ref_energy;
    if alpha == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    let mut distortion = 0.0;
    for (e, r) in estimate.samples().iter().zip(reference.samples()) {
        let d = alpha * r - e;
        distortion += d * d;
    }
    if distortion == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (alpha * alpha * ref_energy / distortion).log10())
}

/// Plain (scale-sensitive) reconstruction SNR in dB:
/// 10·log₁₀(‖reference‖²/‖reference − estimate‖²), +∞ on an exact match.
pub fn recon_snr(reference: &Signal, estimate: &Signal) -> Result<f64> {
    if reference.len() != estimate.len() {
        return Err(Error::invalid(format!(
            "signal lengths differ: {} vs {}",
            reference.len(),
            estimate.len()
        )));
    }
    let ref_energy = reference.energy();
    if ref_energy == 0.0 {
        return Err(Error::invalid("SNR reference signal is identically zero"));
    }
    let mut err = 0.0;
    for (r, e) in reference.samples().iter().zip(estimate.samples()) {
        let d = r - e;
        err += d * d;
    }
    if err == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (ref_energy / err).log10())
}
