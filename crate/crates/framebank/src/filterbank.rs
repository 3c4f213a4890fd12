//! Construction of the four encoder families (STFT, auditory, random,
//! hybrid), canonical tightening, and filterbank serialization.

use crate::error::{Error, Result};
use crate::fft;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde_json::{json, Map, Value};
use std::f64::consts::PI;
use std::fs;
use std::path::Path;

/// Which generator produced a bank; recorded in the container format.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tag {
    Stft,
    Auditory,
    Random,
    Hybrid,
}

impl Tag {
    pub fn as_str(self) -> &'static str {
        match self {
            Tag::Stft => "stft",
            Tag::Auditory => "auditory",
            Tag::Random => "random",
            Tag::Hybrid => "hybrid",
        }
    }

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "stft" => Ok(Tag::Stft),
            "auditory" => Ok(Tag::Auditory),
            "random" => Ok(Tag::Random),
            "hybrid" => Ok(Tag::Hybrid),
            other => Err(Error::parse(format!(
                "unknown filterbank tag \"{other}\" (expected stft|auditory|random|hybrid)"
            ))),
        }
    }
}

/// The fixed and trainable parts of a hybrid bank, retained so the
/// Eq.-style decomposition (and the chain-rule gradient through the fixed
/// filters) stays available after composition.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridParents {
    pub fixed: Filterbank,
    pub trainable: Filterbank,
}

/// A set of J complex FIR filters plus a hop size: the encoder Φ.
///
/// Immutable after construction; all generator functions validate their
/// inputs and the filters are guaranteed non-empty and finite-valued.
/// Hand-assembled banks (via [`Filterbank::from_filters`]) carry the
/// generic `random` tag.
#[derive(Debug, Clone, PartialEq)]
pub struct Filterbank {
    filters: Vec<Vec<Complex64>>,
    hop: usize,
    tag: Tag,
    metadata: Map<String, Value>,
    parents: Option<Box<HybridParents>>,
}

impl Filterbank {
    /// Wraps raw impulse responses, validating shape and finiteness.
    pub fn from_filters(filters: Vec<Vec<Complex64>>, hop: usize) -> Result<Self> {
        if filters.is_empty() {
            return Err(Error::invalid("filterbank needs at least one filter"));
        }
        if hop == 0 {
            return Err(Error::invalid("hop must be positive"));
        }
        for (j, w) in filters.iter().enumerate() {
            if w.is_empty() {
                return Err(Error::invalid(format!("filter {j} has zero length")));
            }
            if w.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
                return Err(Error::invalid(format!(
                    "filter {j} contains non-finite values"
                )));
            }
        }
        Ok(Filterbank {
            filters,
            hop,
            tag: Tag::Random,
            metadata: Map::new(),
            parents: None,
        })
    }

    pub fn filters(&self) -> &[Vec<Complex64>] {
        &self.filters
    }

    pub fn hop(&self) -> usize {
        self.hop
    }

    pub fn tag(&self) -> Tag {
        self.tag
    }

    pub fn metadata(&self) -> &Map<String, Value> {
        &self.metadata
    }

    /// Number of channels J.
    pub fn n_channels(&self) -> usize {
        self.filters.len()
    }

    /// Length of the longest filter.
    pub fn max_filter_length(&self) -> usize {
        self.filters.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// The decomposition of a hybrid bank, when this bank was produced by
    /// [`compose_hybrid`] (or loaded from a container that recorded it).
    pub fn hybrid_parents(&self) -> Option<&HybridParents> {
        self.parents.as_deref()
    }

    /// Returns a copy with a different hop; filters are shared semantics.
    pub fn with_hop(&self, hop: usize) -> Result<Self> {
        if hop == 0 {
            return Err(Error::invalid("hop must be positive"));
        }
        let mut out = self.clone();
        out.hop = hop;
        Ok(out)
    }

    /// Returns a copy whose metadata contains the given extra entry.
    pub fn with_metadata(&self, key: &str, value: Value) -> Self {
        let mut out = self.clone();
        out.metadata.insert(key.to_string(), value);
        out
    }

    /// Returns a copy with replaced filter coefficients, preserving hop,
    /// tag, and metadata. The channel count must not change; this is the
    /// optimizer's update path. Hybrid banks refuse direct replacement —
    /// update the trainable parent and re-compose instead.
    pub fn with_filters(&self, filters: Vec<Vec<Complex64>>) -> Result<Self> {
        if self.parents.is_some() {
            return Err(Error::invalid(
                "cannot replace filters of a composed hybrid bank directly; \
                 replace the trainable parent and re-compose",
            ));
        }
        if filters.len() != self.filters.len() {
            return Err(Error::invalid(format!(
                "replacement has {} channels, expected {}",
                filters.len(),
                self.filters.len()
            )));
        }
        let mut out = Self::from_filters(filters, self.hop)?;
        out.tag = self.tag;
        out.metadata = self.metadata.clone();
        Ok(out)
    }

    /// Folds every filter modulo `n`: h'[t] = Σ_p h[t + p·n].
    ///
    /// Under the circular convention, analyzing a length-N signal with a
    /// filter longer than N is by definition the analysis with that
    /// filter's length-N folding (the DFT of the folding equals the
    /// length-N DFT of the original). `analyze` itself insists on
    /// T ≤ N, so callers with longer composed filters fold first.
    pub fn fold_to_length(&self, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("fold length must be positive"));
        }
        let folded = self
            .filters
            .iter()
            .map(|w| {
                let mut out = vec![Complex64::new(0.0, 0.0); n.min(w.len())];
                for (t, v) in w.iter().enumerate() {
                    out[t % n] += v;
                }
                out
            })
            .collect();
        let mut out = self.clone();
        out.filters = folded;
        Ok(out)
    }
}

/// HTK-variant mel scale: mel(f) = 2595·log₁₀(1 + f/700).
pub fn mel(f_hz: f64) -> f64 {
    2595.0 * (1.0 + f_hz / 700.0).log10()
}

/// Inverse mel scale: f = 700·(10^(m/2595) − 1).
pub fn mel_inv(m: f64) -> f64 {
    700.0 * (10.0f64.powf(m / 2595.0) - 1.0)
}

/// Draws J filters of length T with i.i.d. real Gaussian entries of
/// variance `sigma2` (imaginary parts zero), reproducible from `seed`.
pub fn make_random(j: usize, t: usize, sigma2: f64, hop: usize, seed: u64) -> Result<Filterbank> {
    if j == 0 || t == 0 {
        return Err(Error::invalid("make_random: J and T must be at least 1"));
    }
    if !(sigma2 > 0.0) {
        return Err(Error::invalid(format!(
            "make_random: sigma2 must be positive, got {sigma2}"
        )));
    }
    if hop == 0 {
        return Err(Error::invalid("make_random: hop must be positive"));
    }
    let normal = Normal::new(0.0, sigma2.sqrt())
        .map_err(|e| Error::invalid(format!("make_random: bad distribution: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let filters = (0..j)
        .map(|_| {
            (0..t)
                .map(|_| Complex64::new(normal.sample(&mut rng), 0.0))
                .collect()
        })
        .collect();
    let mut fb = Filterbank::from_filters(filters, hop)?;
    fb.tag = Tag::Random;
    fb.metadata.insert("sigma2".into(), json!(sigma2));
    fb.metadata.insert("seed".into(), json!(seed));
    Ok(fb)
}

/// Builds a modulated-Hann STFT bank: filter j is
/// w_j[t] = hann(t)·e^{2πi·j·t/L} for t ∈ [0, L), one channel per FFT bin
/// j = 0..num_channels−1, with the periodic Hann window
/// hann(t) = 0.5·(1 − cos(2πt/L)).
///
/// Note on channel bookkeeping: covering bins 0..L−1 gives the
/// conjugate-complete system whose decimated condition number at hop L/2
/// is exactly 2; covering only the lower half-spectrum (bins 0..L/2−1)
/// yields κ = φ⁴ ≈ 6.854 instead, because the one-sided bank is far from
/// norm-balanced. A "C-channel" one-sided configuration in the usual
/// spectrogram sense therefore corresponds to `num_channels = 2·C` here.
pub fn make_stft(num_channels: usize, window_length: usize, hop: usize) -> Result<Filterbank> {
    if num_channels == 0 || window_length == 0 {
        return Err(Error::invalid(
            "make_stft: channels and window length must be at least 1",
        ));
    }
    if num_channels > window_length {
        return Err(Error::invalid(format!(
            "make_stft: num_channels {num_channels} exceeds window length {window_length}"
        )));
    }
    if hop == 0 {
        return Err(Error::invalid("make_stft: hop must be positive"));
    }
    let l = window_length as f64;
    let filters = (0..num_channels)
        .map(|j| {
            (0..window_length)
                .map(|t| {
                    let tt = t as f64;
                    let hann = 0.5 * (1.0 - (2.0 * PI * tt / l).cos());
                    let phase = 2.0 * PI * j as f64 * tt / l;
                    Complex64::new(hann * phase.cos(), hann * phase.sin())
                })
                .collect()
        })
        .collect();
    let mut fb = Filterbank::from_filters(filters, hop)?;
    fb.tag = Tag::Stft;
    fb.metadata.insert("window".into(), json!("hann_periodic"));
    fb.metadata
        .insert("window_length".into(), json!(window_length));
    fb.metadata
        .insert("num_channels".into(), json!(num_channels));
    Ok(fb)
}

/// Parameters of an auditory (mel-spaced) filterbank.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditorySpec {
    /// Number of mel bands J (conjugate twins for interior bands are added
    /// on top, so the constructed bank holds 2J−2 filters).
    pub channels: usize,
    pub sample_rate: u32,
    pub f_min: f64,
    pub f_max: f64,
    /// Target impulse-response length T in samples.
    pub filter_length: usize,
    pub hop: usize,
}

impl AuditorySpec {
    fn validate(&self) -> Result<()> {
        if self.channels < 2 {
            return Err(Error::invalid("auditory spec: channels must be at least 2"));
        }
        if self.sample_rate == 0 {
            return Err(Error::invalid(
                "auditory spec: sample rate must be positive",
            ));
        }
        let nyquist = self.sample_rate as f64 / 2.0;
        if !(0.0 <= self.f_min && self.f_min < self.f_max && self.f_max <= nyquist) {
            return Err(Error::invalid(format!(
                "auditory spec: need 0 <= f_min < f_max <= {nyquist}, got [{}, {}]",
                self.f_min, self.f_max
            )));
        }
        if self.filter_length < 4 {
            return Err(Error::invalid(
                "auditory spec: filter_length must be at least 4",
            ));
        }
        if self.hop == 0 {
            return Err(Error::invalid("auditory spec: hop must be positive"));
        }
        Ok(())
    }
}

// Half-support of the raised-cosine frequency bump, per unit of
// mel-neighbor spacing: solves 0.5·(1 + cos(π·(δ/2)/W)) = 1/√2 so that
// adjacent responses cross at −3 dB when W = c·δ.
fn half_width_per_spacing() -> f64 {
    PI / (2.0 * (std::f64::consts::SQRT_2 - 1.0).acos())
}

// Raised-cosine profile with half-support `w`, peak 1 at d = 0.
fn hann_bump(d: f64, w: f64) -> f64 {
    if d.abs() <= w {
        0.5 * (1.0 + (PI * d / w).cos())
    } else {
        0.0
    }
}

/// Builds a mel-spaced auditory filterbank.
///
/// Construction: J raised-cosine frequency bumps with centers equally
/// spaced on the mel scale over [f_min, f_max] are laid out on a design
/// grid of 4·filter_length bins. The lowest band is plateau-extended down
/// to DC and the highest through Nyquist (both real-valued), so the bank
/// covers the whole spectrum; strictly interior bands are complex analytic
/// and get conjugate (negative-frequency) twins. Impulse responses are
/// truncated to `filter_length` centered on their energy peak with a Hann
/// taper over the outer 10% of samples, and the result is re-tightened
/// with [`canonical_tight`] at `filter_length`, so the returned bank has
/// κ = 1 at hop 1 for signals of length `filter_length`.
pub fn make_auditory(spec: &AuditorySpec) -> Result<Filterbank> {
    spec.validate()?;
    let j_bands = spec.channels;
    let t_len = spec.filter_length;
    let design_len = 4 * t_len;
    let fs = spec.sample_rate as f64;

    // Mel-equispaced center frequencies, in Hz and fractional design bins.
    let (mel_lo, mel_hi) = (mel(spec.f_min), mel(spec.f_max));
    let centers_hz: Vec<f64> = (0..j_bands)
        .map(|j| mel_inv(mel_lo + (mel_hi - mel_lo) * j as f64 / (j_bands - 1) as f64))
        .collect();
    let nu: Vec<f64> = centers_hz
        .iter()
        .map(|f| f * design_len as f64 / fs)
        .collect();

    // Local spacing and −3 dB half-supports in bins (floor of 2 bins keeps
    // very dense banks non-singular before tightening).
    let scale = half_width_per_spacing();
    let half_width = |j: usize| -> f64 {
        let spacing = if j == 0 {
            nu[1] - nu[0]
        } else if j == j_bands - 1 {
            nu[j_bands - 1] - nu[j_bands - 2]
        } else {
            0.5 * (nu[j + 1] - nu[j - 1])
        };
        (scale * spacing).max(2.0)
    };

    // Signed frequency position of design bin k.
    let signed = |k: usize| -> f64 {
        if k <= design_len / 2 {
            k as f64
        } else {
            k as f64 - design_len as f64
        }
    };

    let mut responses: Vec<(Vec<f64>, bool)> = Vec::new(); // (response, is_real)
    for j in 0..j_bands {
        let w = half_width(j);
        let resp: Vec<f64> = (0..design_len)
            .map(|k| {
                let p = signed(k);
                if j == 0 {
                    // Lowpass: plateau from DC out to the first center.
                    if p.abs() <= nu[0] {
                        1.0
                    } else {
                        hann_bump(p.abs() - nu[0], w)
                    }
                } else if j == j_bands - 1 {
                    // Highpass: plateau from the last center through Nyquist.
                    if p.abs() >= nu[j_bands - 1] {
                        1.0
                    } else {
                        hann_bump(nu[j_bands - 1] - p.abs(), w)
                    }
                } else {
                    hann_bump(p - nu[j], w)
                }
            })
            .collect();
        responses.push((resp, j == 0 || j == j_bands - 1));
    }

    // To time domain; analytic interior bands get conjugate twins so the
    // spectrum S[k] is covered on both half-axes.
    let mut raw: Vec<Vec<Complex64>> = Vec::new();
    for (resp, is_real) in &responses {
        let spec_vec: Vec<Complex64> = resp.iter().map(|&r| Complex64::new(r, 0.0)).collect();
        let ir = fft::idft(&spec_vec)?;
        if *is_real {
            raw.push(ir.iter().map(|v| Complex64::new(v.re, 0.0)).collect());
        } else {
            let twin: Vec<Complex64> = ir.iter().map(|v| v.conj()).collect();
            raw.push(ir);
            raw.push(twin);
        }
    }

    let truncated: Vec<Vec<Complex64>> = raw.iter().map(|w| truncate_centered(w, t_len)).collect();
    let bank = Filterbank::from_filters(truncated, spec.hop)?;
    let mut tight = canonical_tight(&bank, t_len)?;
    tight.tag = Tag::Auditory;
    tight
        .metadata
        .insert("channels".into(), json!(spec.channels));
    tight
        .metadata
        .insert("sample_rate".into(), json!(spec.sample_rate));
    tight.metadata.insert("f_min".into(), json!(spec.f_min));
    tight.metadata.insert("f_max".into(), json!(spec.f_max));
    tight
        .metadata
        .insert("filter_length".into(), json!(spec.filter_length));
    tight
        .metadata
        .insert("center_frequencies_hz".into(), json!(centers_hz));
    Ok(tight)
}

// Extracts a length-`t_len` circular window centered on the energy peak
// and applies a Hann taper over the outer 10% of samples (5% each side)
// to suppress truncation ripple.
fn truncate_centered(w: &[Complex64], t_len: usize) -> Vec<Complex64> {
    if w.len() <= t_len {
        return w.to_vec();
    }
    let l = w.len();
    let peak = w
        .iter()
        .enumerate()
        .max_by(|(_, a), (_, b)| a.norm_sqr().total_cmp(&b.norm_sqr()))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let start = (peak + l - t_len / 2) % l;
    let mut out: Vec<Complex64> = (0..t_len).map(|i| w[(start + i) % l]).collect();
    let q = ((0.05 * t_len as f64).ceil() as usize).max(1);
    for i in 0..q.min(t_len) {
        let ramp = 0.5 * (1.0 - (PI * (i as f64 + 0.5) / q as f64).cos());
        out[i] *= ramp;
        out[t_len - 1 - i] *= ramp;
    }
    out
}

/// Channel-wise linear (non-circular) convolution of a fixed bank's
/// filters with trainable ones: filter j of the result is
/// w_j ∗ ψ_j with length T_w + T_ψ − 1.
///
/// The hop is taken from `hop`, defaulting to the fixed bank's hop. The
/// result records both parents so the decomposition (and the chain-rule
/// κ gradient through the fixed part) remains available.
pub fn compose_hybrid(
    fixed: &Filterbank,
    trainable: &Filterbank,
    hop: Option<usize>,
) -> Result<Filterbank> {
    if fixed.n_channels() != trainable.n_channels() {
        return Err(Error::invalid(format!(
            "channel-count mismatch: fixed has {} filters, trainable has {}",
            fixed.n_channels(),
            trainable.n_channels()
        )));
    }
    let hop = hop.unwrap_or(fixed.hop());
    if hop == 0 {
        return Err(Error::invalid("hop must be positive"));
    }
    let filters: Vec<Vec<Complex64>> = fixed
        .filters()
        .iter()
        .zip(trainable.filters())
        .map(|(psi, w)| linear_convolve(psi, w))
        .collect();
    let mut out = Filterbank::from_filters(filters, hop)?;
    out.tag = Tag::Hybrid;
    out.metadata
        .insert("fixed_tag".into(), json!(fixed.tag().as_str()));
    out.metadata
        .insert("trainable_tag".into(), json!(trainable.tag().as_str()));
    out.parents = Some(Box::new(HybridParents {
        fixed: fixed.clone(),
        trainable: trainable.clone(),
    }));
    Ok(out)
}

fn linear_convolve(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, &av) in a.iter().enumerate() {
        for (k, &bv) in b.iter().enumerate() {
            out[i + k] += av * bv;
        }
    }
    out
}

/// Divides each filter's zero-padded DFT pointwise by √S[k] so the
/// resulting bank has S'[k] ≡ 1 (κ = 1 at hop 1) for signals of length
/// `n`. Filters come back at full length n; truncation is the caller's
/// choice.
///
/// Fails with a domain error when the bank is not a frame at length n,
/// detected as min S ≤ 1e-14·max S (an exact spectral hole never rises
/// above roundoff of the surrounding bins).
pub fn canonical_tight(fb: &Filterbank, n: usize) -> Result<Filterbank> {
    if let Some(w) = fb.filters().iter().find(|w| w.len() > n) {
        return Err(Error::invalid(format!(
            "canonical_tight: filter length {} exceeds transform length {n}",
            w.len()
        )));
    }
    let hats: Vec<Vec<Complex64>> = fb.filters().iter().map(|w| fft::padded_dft(w, n)).collect();
    let mut s = vec![0.0f64; n];
    for hat in &hats {
        for (sk, h) in s.iter_mut().zip(hat) {
            *sk += h.norm_sqr();
        }
    }
    let (s_min, s_max) = s.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| {
        (lo.min(v), hi.max(v))
    });
    if s_min <= 1e-14 * s_max {
        return Err(Error::domain(format!(
            "filterbank does not cover the spectrum (min S = {s_min:.3e} at length {n})"
        )));
    }
    let inv_sqrt: Vec<f64> = s.iter().map(|&v| 1.0 / v.sqrt()).collect();
    let mut filters = Vec::with_capacity(hats.len());
    for hat in &hats {
        let scaled: Vec<Complex64> = hat.iter().zip(&inv_sqrt).map(|(h, &g)| h * g).collect();
        filters.push(fft::idft(&scaled)?);
    }
    let mut out = fb.clone();
    out.filters = filters;
    out.metadata.insert("tightened_at".into(), json!(n));
    Ok(out)
}

const CONTAINER_FORMAT: &str = "framebank-filterbank";
const CONTAINER_VERSION: u64 = 1;

/// Serializes a filterbank into the JSON container document.
///
/// Filters are nested arrays of [re, im] pairs; floating-point values are
/// emitted with enough digits to reparse to the identical bits, so
/// load∘save is exact. Hybrid banks embed both parent documents.
pub fn to_json_value(fb: &Filterbank) -> Value {
    let filters: Vec<Value> = fb
        .filters()
        .iter()
        .map(|w| Value::Array(w.iter().map(|v| json!([v.re, v.im])).collect()))
        .collect();
    let mut doc = Map::new();
    doc.insert("format".into(), json!(CONTAINER_FORMAT));
    doc.insert("version".into(), json!(CONTAINER_VERSION));
    doc.insert("tag".into(), json!(fb.tag().as_str()));
    doc.insert("hop".into(), json!(fb.hop()));
    doc.insert("metadata".into(), Value::Object(fb.metadata().clone()));
    doc.insert("filters".into(), Value::Array(filters));
    if let Some(parents) = fb.hybrid_parents() {
        doc.insert(
            "parents".into(),
            json!({
                "fixed": to_json_value(&parents.fixed),
                "trainable": to_json_value(&parents.trainable),
            }),
        );
    }
    Value::Object(doc)
}

/// Reconstructs a filterbank from its container document.
pub fn from_json_value(doc: &Value) -> Result<Filterbank> {
    let obj = doc
        .as_object()
        .ok_or_else(|| Error::parse("container root is not a JSON object"))?;
    let format = require_str(obj, "format")?;
    if format != CONTAINER_FORMAT {
        return Err(Error::parse(format!(
            "field \"format\" is \"{format}\", expected \"{CONTAINER_FORMAT}\""
        )));
    }
    let version = require_u64(obj, "version")?;
    if version != CONTAINER_VERSION {
        return Err(Error::parse(format!(
            "unsupported container version {version} (this build reads version {CONTAINER_VERSION})"
        )));
    }
    let tag = Tag::from_str(require_str(obj, "tag")?)?;
    let hop = require_u64(obj, "hop")? as usize;
    let metadata = match obj.get("metadata") {
        Some(Value::Object(m)) => m.clone(),
        Some(_) => return Err(Error::parse("field \"metadata\" is not an object")),
        None => Map::new(),
    };
    let filters_val = obj
        .get("filters")
        .ok_or_else(|| Error::parse("missing field \"filters\""))?
        .as_array()
        .ok_or_else(|| Error::parse("field \"filters\" is not an array"))?;
    let mut filters = Vec::with_capacity(filters_val.len());
    for (j, fv) in filters_val.iter().enumerate() {
        let taps = fv
            .as_array()
            .ok_or_else(|| Error::parse(format!("filter {j} is not an array")))?;
        let mut w = Vec::with_capacity(taps.len());
        for (t, tap) in taps.iter().enumerate() {
            let pair = tap.as_array().filter(|p| p.len() == 2).ok_or_else(|| {
                Error::parse(format!("filter {j} tap {t} is not a [re, im] pair"))
            })?;
            let re = pair[0]
                .as_f64()
                .ok_or_else(|| Error::parse(format!("filter {j} tap {t}: re is not a number")))?;
            let im = pair[1]
                .as_f64()
                .ok_or_else(|| Error::parse(format!("filter {j} tap {t}: im is not a number")))?;
            w.push(Complex64::new(re, im));
        }
        filters.push(w);
    }
    let mut fb = Filterbank::from_filters(filters, hop)?;
    fb.tag = tag;
    fb.metadata = metadata;
    if let Some(pv) = obj.get("parents") {
        let pobj = pv
            .as_object()
            .ok_or_else(|| Error::parse("field \"parents\" is not an object"))?;
        let fixed = from_json_value(
            pobj.get("fixed")
                .ok_or_else(|| Error::parse("missing field \"parents.fixed\""))?,
        )?;
        let trainable = from_json_value(
            pobj.get("trainable")
                .ok_or_else(|| Error::parse("missing field \"parents.trainable\""))?,
        )?;
        fb.parents = Some(Box::new(HybridParents { fixed, trainable }));
    }
    Ok(fb)
}

fn require_str<'a>(obj: &'a Map<String, Value>, field: &str) -> Result<&'a str> {
    obj.get(field)
        .ok_or_else(|| Error::parse(format!("missing field \"{field}\"")))?
        .as_str()
        .ok_or_else(|| Error::parse(format!("field \"{field}\" is not a string")))
}

fn require_u64(obj: &Map<String, Value>, field: &str) -> Result<u64> {
    obj.get(field)
        .ok_or_else(|| Error::parse(format!("missing field \"{field}\"")))?
        .as_u64()
        .ok_or_else(|| Error::parse(format!("field \"{field}\" is not a nonnegative integer")))
}

/// Writes the container document for `fb` to `path`.
pub fn save(fb: &Filterbank, path: &Path) -> Result<()> {
    let doc = to_json_value(fb);
    let text = serde_json::to_string(&doc)
        .map_err(|e| Error::parse(format!("serialization failed: {e}")))?;
    fs::write(path, text + "\n").map_err(|e| Error::io(format!("writing {}", path.display()), e))
}

/// Reads a container document from `path`.
pub fn load(path: &Path) -> Result<Filterbank> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
    let doc: Value = serde_json::from_str(&text)
        .map_err(|e| Error::parse(format!("{}: invalid JSON: {e}", path.display())))?;
    from_json_value(&doc)
}
