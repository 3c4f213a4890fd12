//! Signal and coefficient containers plus the analysis operator Φ and its
//! transpose.
//!
//! Boundary handling is circular (mod N) throughout: the convolution that
//! defines the encoder is (Φx)[n, j] = Σ_k w_j[k]·x[(n−k) mod N], and
//! decimation keeps every hop-th circular output under the constraint
//! hop | N, so every frame index is well defined and the decimated frame
//! operator stays block-circulant.

use crate::error::{Error, Result};
use crate::fft;
use crate::filterbank::Filterbank;
use num_complex::Complex64;

/// A finite real-valued audio signal with its sample rate.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    samples: Vec<f64>,
    sample_rate: u32,
}

impl Signal {
    /// Wraps a sample vector, rejecting empty or non-finite input.
    pub fn new(samples: Vec<f64>, sample_rate: u32) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::invalid("signal must contain at least one sample"));
        }
        if sample_rate == 0 {
            return Err(Error::invalid("sample rate must be positive"));
        }
        if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
            return Err(Error::invalid(format!("signal sample {i} is not finite")));
        }
        Ok(Signal {
            samples,
            sample_rate,
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        false // guaranteed non-empty by construction
    }

    /// Squared Euclidean norm ‖x‖².
    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|s| s * s).sum()
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }
}

/// Complex analysis coefficients, logically a matrix with rows indexed by
/// frame (time, hop-spaced) and columns by channel.
///
/// Under the circular convention the row count is exactly
/// `source_length / hop` (hop divides N by construction). The sample rate
/// of the analyzed signal travels along so synthesis can return a
/// `Signal` without extra plumbing.
#[derive(Debug, Clone, PartialEq)]
pub struct Coefficients {
    values: Vec<Complex64>, // row-major: values[n * n_channels + j]
    n_frames: usize,
    n_channels: usize,
    hop: usize,
    source_length: usize,
    sample_rate: u32,
}

impl Coefficients {
    pub(crate) fn zeros(
        n_frames: usize,
        n_channels: usize,
        hop: usize,
        source_length: usize,
        sample_rate: u32,
    ) -> Self {
        Coefficients {
            values: vec![Complex64::new(0.0, 0.0); n_frames * n_channels],
            n_frames,
            n_channels,
            hop,
            source_length,
            sample_rate,
        }
    }

    pub fn n_frames(&self) -> usize {
        self.n_frames
    }

    pub fn n_channels(&self) -> usize {
        self.n_channels
    }

    pub fn hop(&self) -> usize {
        self.hop
    }

    pub fn source_length(&self) -> usize {
        self.source_length
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    /// Coefficient at frame `n`, channel `j`.
    pub fn value(&self, n: usize, j: usize) -> Complex64 {
        self.values[n * self.n_channels + j]
    }

    pub fn value_mut(&mut self, n: usize, j: usize) -> &mut Complex64 {
        &mut self.values[n * self.n_channels + j]
    }

    /// Row-major view of all coefficients.
    pub fn as_slice(&self) -> &[Complex64] {
        &self.values
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    /// Squared Frobenius norm ‖Φx‖² over all (frame, channel) entries.
    pub fn energy(&self) -> f64 {
        self.values.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Real part of the Frobenius inner product Re⟨self, other⟩.
    pub fn re_inner(&self, other: &Coefficients) -> Result<f64> {
        if self.n_frames != other.n_frames || self.n_channels != other.n_channels {
            return Err(Error::invalid(format!(
                "coefficient shapes differ: {}x{} vs {}x{}",
                self.n_frames, self.n_channels, other.n_frames, other.n_channels
            )));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a * b.conj()).re)
            .sum())
    }
}

/// Circular convolution out[n] = Σ_{k<T} w[k]·x[(n−k) mod N] via the FFT:
/// out = idft(dft(x) ⊙ dft(zero-pad(w, N))).
///
/// This is the production path; [`circular_convolve_direct`] is the O(N·T)
/// reference the tests cross-check against.
pub fn circular_convolve(x: &[f64], w: &[Complex64]) -> Result<Vec<Complex64>> {
    check_conv_args(x, w)?;
    let n = x.len();
    let x_hat = fft::dft_real(x);
    let w_hat = fft::padded_dft(w, n);
    let mut prod: Vec<Complex64> = x_hat.iter().zip(&w_hat).map(|(a, b)| a * b).collect();
    fft::inverse_in_place(&mut prod);
    let scale = 1.0 / n as f64;
    for v in &mut prod {
        *v *= scale;
    }
    Ok(prod)
}

/// Direct evaluation of the same modular sum, accumulating real and
/// imaginary parts separately.
pub fn circular_convolve_direct(x: &[f64], w: &[Complex64]) -> Result<Vec<Complex64>> {
    check_conv_args(x, w)?;
    let n = x.len();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for (pos, slot) in out.iter_mut().enumerate() {
        let mut re = 0.0;
        let mut im = 0.0;
        for (k, wk) in w.iter().enumerate() {
            let xv = x[(pos + n - (k % n)) % n];
            re += wk.re * xv;
            im += wk.im * xv;
        }
        *slot = Complex64::new(re, im);
    }
    Ok(out)
}

fn check_conv_args(x: &[f64], w: &[Complex64]) -> Result<()> {
    if x.is_empty() || w.is_empty() {
        return Err(Error::invalid("convolution operands must be non-empty"));
    }
    if w.len() > x.len() {
        return Err(Error::invalid(format!(
            "filter length {} exceeds signal length {}",
            w.len(),
            x.len()
        )));
    }
    Ok(())
}

/// Applies the encoder: values[m, j] = circular_convolve(x, w_j)[m·hop].
///
/// Requires every filter to fit the signal and the hop to divide N so the
/// decimated output has exactly N/hop frames per channel.
pub fn analyze(fb: &Filterbank, x: &Signal) -> Result<Coefficients> {
    let n = x.len();
    let hop = fb.hop();
    if !n.is_multiple_of(hop) {
        return Err(Error::invalid(format!(
            "hop {hop} does not divide signal length {n}"
        )));
    }
    for (j, w) in fb.filters().iter().enumerate() {
        if w.len() > n {
            return Err(Error::invalid(format!(
                "filter {j} (length {}) is longer than the signal (length {n})",
                w.len()
            )));
        }
    }
    let n_frames = n / hop;
    let n_channels = fb.filters().len();
    let mut out = Coefficients::zeros(n_frames, n_channels, hop, n, x.sample_rate());
    let x_hat = fft::dft_real(x.samples());
    for (j, w) in fb.filters().iter().enumerate() {
        let w_hat = fft::padded_dft(w, n);
        let mut prod: Vec<Complex64> = x_hat.iter().zip(&w_hat).map(|(a, b)| a * b).collect();
        fft::inverse_in_place(&mut prod);
        let scale = 1.0 / n as f64;
        for (m, slot) in prod.iter().step_by(hop).enumerate() {
            *out.value_mut(m, j) = slot * scale;
        }
    }
    Ok(out)
}

/// Applies the transposed encoder Φᵀ, the exact adjoint of [`analyze`]
/// under the real inner product: Re⟨Φx, c⟩ = ⟨x, Φᵀc⟩.
///
/// Computed per channel by hop-upsampling the coefficients and correlating
/// with the filter in the frequency domain:
/// out = Re idft(Σ_j dft(upsample(c_j)) ⊙ conj(ŵ_j)).
pub fn synthesize(fb: &Filterbank, c: &Coefficients) -> Result<Signal> {
    let n = c.source_length();
    let hop = fb.hop();
    if c.hop() != hop {
        return Err(Error::invalid(format!(
            "coefficient hop {} does not match filterbank hop {hop}",
            c.hop()
        )));
    }
    if c.n_channels() != fb.filters().len() {
        return Err(Error::invalid(format!(
            "coefficient channels {} do not match filterbank channels {}",
            c.n_channels(),
            fb.filters().len()
        )));
    }
    if !n.is_multiple_of(hop) || c.n_frames() != n / hop {
        return Err(Error::invalid(format!(
            "coefficient frame count {} inconsistent with length {n} at hop {hop}",
            c.n_frames()
        )));
    }
    for (j, w) in fb.filters().iter().enumerate() {
        if w.len() > n {
            return Err(Error::invalid(format!(
                "filter {j} (length {}) is longer than the target signal (length {n})",
                w.len()
            )));
        }
    }
    let mut acc = vec![Complex64::new(0.0, 0.0); n];
    let mut upsampled = vec![Complex64::new(0.0, 0.0); n];
    for (j, w) in fb.filters().iter().enumerate() {
        upsampled
            .iter_mut()
            .for_each(|v| *v = Complex64::new(0.0, 0.0));
        for m in 0..c.n_frames() {
            upsampled[m * hop] = c.value(m, j);
        }
        let u_hat = fft::dft(&upsampled)?;
        let w_hat = fft::padded_dft(w, n);
        for (slot, (u, wv)) in acc.iter_mut().zip(u_hat.iter().zip(&w_hat)) {
            *slot += u * wv.conj();
        }
    }
    fft::inverse_in_place(&mut acc);
    let scale = 1.0 / n as f64;
    let samples: Vec<f64> = acc.iter().map(|v| v.re * scale).collect();
    Signal::new(samples, c.sample_rate())
}
