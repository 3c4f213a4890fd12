//! Frame bounds, condition number κ, the analytic κ subgradient used for
//! penalization, tightness tests, and reconstruction.
//!
//! Two independent code paths compute the bounds: `frame_bounds_fft`
//! evaluates the DFT spectrum S[k] = Σ_j |ŵ_j[k]|² (stride ignored), and
//! `frame_bounds_exact` eigendecomposes the dense decimated frame
//! operator. They agree at hop 1 and the exact oracle is the honest
//! reference under decimation; training always uses the spectral path,
//! matching the convention that aliasing is neglected.

use crate::error::{Error, Result};
use crate::fft;
use crate::filterbank::Filterbank;
use crate::signal::{analyze, synthesize, Coefficients, Signal};
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Maximum length accepted by the dense eigendecomposition oracle.
pub const EXACT_ORACLE_MAX_N: usize = 4096;

/// Optimal frame bounds A ≤ B, their ratio κ = B/A, and the spectrum they
/// were read from.
///
/// `kappa` is `f64::INFINITY` when A = 0 (not a frame); that value is
/// handled explicitly wherever κ is consumed and serializes as JSON null.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameBounds {
    /// Lower frame bound (0 when the bank fails to cover the spectrum).
    pub a: f64,
    /// Upper frame bound.
    pub b: f64,
    /// Condition number B/A, +∞ when A = 0.
    pub kappa: f64,
    /// For the FFT path: the Eq.-(6) spectrum S[k] = Σ_j |ŵ_j[k]|² over
    /// the N DFT bins. For the exact oracle: the eigenvalue spectrum of
    /// the decimated frame operator (ascending). The two coincide up to
    /// ordering at hop 1.
    pub spectrum: Vec<f64>,
    /// Index into `spectrum` where A is attained (ties broken toward the
    /// lowest index).
    pub argmin_bin: usize,
    /// Index into `spectrum` where B is attained (lowest index on ties).
    pub argmax_bin: usize,
}

impl FrameBounds {
    fn from_spectrum(spectrum: Vec<f64>) -> Self {
        let mut argmin = 0;
        let mut argmax = 0;
        for (k, &v) in spectrum.iter().enumerate() {
            if v < spectrum[argmin] {
                argmin = k;
            }
            if v > spectrum[argmax] {
                argmax = k;
            }
        }
        let a = spectrum[argmin];
        let b = spectrum[argmax];
        let kappa = if a == 0.0 { f64::INFINITY } else { b / a };
        FrameBounds {
            a,
            b,
            kappa,
            spectrum,
            argmin_bin: argmin,
            argmax_bin: argmax,
        }
    }
}

/// Frame bounds from the zero-padded filter DFTs per Eq. (6):
/// A = min_k S[k], B = max_k S[k]. Decimation is ignored by construction.
pub fn frame_bounds_fft(fb: &Filterbank, n: usize) -> Result<FrameBounds> {
    if n == 0 {
        return Err(Error::invalid("transform length must be positive"));
    }
    if let Some(w) = fb.filters().iter().find(|w| w.len() > n) {
        return Err(Error::invalid(format!(
            "filter length {} exceeds transform length {n}",
            w.len()
        )));
    }
    let mut s = vec![0.0f64; n];
    for w in fb.filters() {
        let hat = fft::padded_dft(w, n);
        for (sk, h) in s.iter_mut().zip(&hat) {
            *sk += h.norm_sqr();
        }
    }
    Ok(FrameBounds::from_spectrum(s))
}

/// Decimation-aware frame bounds: builds the N×N matrix of Φᵀ_hop·Φ_hop
/// by applying synthesize∘analyze to the canonical basis vectors,
/// symmetrizes it ((M + Mᵀ)/2 kills O(1e-13) numerical asymmetry), and
/// returns the extreme eigenvalues.
///
/// This is the honest oracle the spectral path approximates under
/// decimation; it is used in tests, never in training.
pub fn frame_bounds_exact(fb: &Filterbank, n: usize, hop: usize) -> Result<FrameBounds> {
    if n == 0 || hop == 0 {
        return Err(Error::invalid("length and hop must be positive"));
    }
    if !n.is_multiple_of(hop) {
        return Err(Error::invalid(format!("hop {hop} does not divide N = {n}")));
    }
    if n > EXACT_ORACLE_MAX_N {
        return Err(Error::resource(format!(
            "dense frame-operator oracle is limited to N <= {EXACT_ORACLE_MAX_N} \
             (got {n}); use frame_bounds_fft for large undecimated bounds"
        )));
    }
    let fb_hop = fb.with_hop(hop)?;
    let mut m = DMatrix::<f64>::zeros(n, n);
    for basis in 0..n {
        let mut e = vec![0.0; n];
        e[basis] = 1.0;
        let x = Signal::new(e, 1)?;
        let coef = analyze(&fb_hop, &x)?;
        let col = synthesize(&fb_hop, &coef)?;
        for (row, &v) in col.samples().iter().enumerate() {
            m[(row, basis)] = v;
        }
    }
    // Symmetrize before eigendecomposition.
    let mt = m.transpose();
    let sym = (m + mt) * 0.5;
    let eig = sym.symmetric_eigen();
    let mut eigenvalues: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    eigenvalues.sort_by(|p, q| p.total_cmp(q));
    // The frame operator is positive semidefinite; tiny negative
    // eigenvalues are roundoff.
    for v in &mut eigenvalues {
        if *v < 0.0 && *v > -1e-10 {
            *v = 0.0;
        }
    }
    Ok(FrameBounds::from_spectrum(eigenvalues))
}

/// True iff κ ≤ 1 + tol (κ = ∞ is never tight).
pub fn is_tight(fb: &Filterbank, n: usize, tol: f64) -> Result<bool> {
    let bounds = frame_bounds_fft(fb, n)?;
    Ok(bounds.kappa <= 1.0 + tol)
}

/// Analytic subgradient of κ = B/A with respect to the trainable filter
/// entries, evaluated at the argmax bin k_B and argmin bin k_A only
/// (ties broken toward the lowest bin; the result is then a valid element
/// of the subdifferential):
///
///   ∂κ/∂θ = (∂B/∂θ·A − B·∂A/∂θ)/A²,
///   ∂S[k]/∂(Re w_j[t]) =  2·Re(ŵ_j[k]·e^{2πikt/N}),
///   ∂S[k]/∂(Im w_j[t]) =  2·Im(ŵ_j[k]·e^{2πikt/N}).
///
/// For hybrid banks the chain rule continues through the fixed filters via
/// the convolution theorem (∂ĥ_j = ψ̂_j ⊙ ∂ŵ_j) and the returned entries
/// are derivatives with respect to the *trainable* filter taps; the fixed
/// ψ_j contribute no gradient of their own.
///
/// Returned as one vector per channel, packing (∂/∂Re, ∂/∂Im) into the
/// real and imaginary components. Channels with `trainable_mask[j] =
/// false` get all-zero gradients.
pub fn kappa_gradient(
    fb: &Filterbank,
    n: usize,
    trainable_mask: &[bool],
) -> Result<Vec<Vec<Complex64>>> {
    if trainable_mask.len() != fb.n_channels() {
        return Err(Error::invalid(format!(
            "trainable mask has {} entries for {} channels",
            trainable_mask.len(),
            fb.n_channels()
        )));
    }
    // For hybrids, the analyzed filters are the composed ones while the
    // differentiated taps are the trainable parts.
    let (analyzed, tap_banks): (Vec<&[Complex64]>, Vec<&[Complex64]>) = match fb.hybrid_parents() {
        Some(parents) => fb
            .filters()
            .iter()
            .map(Vec::as_slice)
            .zip(parents.trainable.filters().iter().map(Vec::as_slice))
            .unzip(),
        None => fb
            .filters()
            .iter()
            .map(|w| (w.as_slice(), w.as_slice()))
            .unzip(),
    };
    let fixed_hats: Option<Vec<Vec<Complex64>>> = fb.hybrid_parents().map(|parents| {
        parents
            .fixed
            .filters()
            .iter()
            .map(|psi| fft::padded_dft(psi, n))
            .collect()
    });
    if let Some(w) = analyzed.iter().find(|w| w.len() > n) {
        return Err(Error::invalid(format!(
            "filter length {} exceeds transform length {n}",
            w.len()
        )));
    }
    let hats: Vec<Vec<Complex64>> = analyzed.iter().map(|w| fft::padded_dft(w, n)).collect();
    let mut s = vec![0.0f64; n];
    for hat in &hats {
        for (sk, h) in s.iter_mut().zip(hat) {
            *sk += h.norm_sqr();
        }
    }
    let bounds = FrameBounds::from_spectrum(s);
    if bounds.a == 0.0 {
        return Err(Error::domain(
            "gradient undefined: not a frame (lower bound A = 0)",
        ));
    }
    let (a, b) = (bounds.a, bounds.b);
    let (k_a, k_b) = (bounds.argmin_bin, bounds.argmax_bin);
    let mut out = Vec::with_capacity(tap_banks.len());
    for (j, taps) in tap_banks.iter().enumerate() {
        if !trainable_mask[j] {
            out.push(vec![Complex64::new(0.0, 0.0); taps.len()]);
            continue;
        }
        let mut grad = Vec::with_capacity(taps.len());
        for t in 0..taps.len() {
            // ∂S[k]: with u = ĥ_j[k]·conj(ψ̂_j[k])·e^{2πikt/N} (ψ̂ ≡ 1 for
            // plain banks), the pair (∂/∂Re, ∂/∂Im) is 2·(Re u, Im u).
            let u_at = |k: usize, hat_k: Complex64| -> Complex64 {
                let phase = 2.0 * std::f64::consts::PI * (k as f64) * (t as f64) / n as f64;
                let tw = Complex64::new(phase.cos(), phase.sin());
                match &fixed_hats {
                    Some(psi) => hat_k * psi[j][k].conj() * tw,
                    None => hat_k * tw,
                }
            };
            let ub = u_at(k_b, hats[j][k_b]);
            let ua = u_at(k_a, hats[j][k_a]);
            let d_re = (2.0 * ub.re * a - b * 2.0 * ua.re) / (a * a);
            let d_im = (2.0 * ub.im * a - b * 2.0 * ua.im) / (a * a);
            grad.push(Complex64::new(d_re, d_im));
        }
        out.push(grad);
    }
    Ok(out)
}

/// Reconstructs x̂ = Φᵀ·Φ·x/A and reports the relative error
/// ‖x̂ − x‖/‖x‖ (defined as 0 for x = 0). Perfect for tight banks at
/// hop 1.
pub fn reconstruct(fb: &Filterbank, x: &Signal) -> Result<(Signal, f64)> {
    let n = x.len();
    let bounds = frame_bounds_fft(fb, n)?;
    if bounds.a == 0.0 {
        return Err(Error::domain(
            "reconstruction undefined: not a frame (lower bound A = 0)",
        ));
    }
    let coef = analyze(fb, x)?;
    let back = synthesize(fb, &coef)?;
    let scale = 1.0 / bounds.a;
    let samples: Vec<f64> = back.samples().iter().map(|v| v * scale).collect();
    let xhat = Signal::new(samples, x.sample_rate())?;
    let ref_energy = x.energy();
    let err = if ref_energy == 0.0 {
        0.0
    } else {
        let diff: f64 = xhat
            .samples()
            .iter()
            .zip(x.samples())
            .map(|(p, q)| (p - q) * (p - q))
            .sum();
        (diff / ref_energy).sqrt()
    };
    Ok((xhat, err))
}

/// Convenience: analysis coefficients of a basis-free random test probe.
/// Exposed for examples and tests that need Φ applied without building a
/// Signal by hand.
pub fn analysis_energy(fb: &Filterbank, x: &Signal) -> Result<f64> {
    Ok(analyze(fb, x)?.energy())
}

/// Re-export of the coefficient container for doc examples.
pub type AnalysisCoefficients = Coefficients;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filterbank::{canonical_tight, compose_hybrid, make_random, make_stft};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c64(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn delta_bank() -> Filterbank {
        Filterbank::from_filters(vec![vec![c64(1.0, 0.0)]], 1).unwrap()
    }

    #[test]
    fn delta_filter_has_flat_unit_spectrum() {
        for n in [1usize, 4, 7, 64] {
            let bounds = frame_bounds_fft(&delta_bank(), n).unwrap();
            assert_eq!(bounds.a, 1.0);
            assert_eq!(bounds.b, 1.0);
            assert_eq!(bounds.kappa, 1.0);
        }
    }

    #[test]
    fn delta_pair_has_flat_spectrum_two() {
        let fb = Filterbank::from_filters(
            vec![vec![c64(1.0, 0.0)], vec![c64(0.0, 0.0), c64(1.0, 0.0)]],
            1,
        )
        .unwrap();
        let bounds = frame_bounds_fft(&fb, 8).unwrap();
        assert!((bounds.a - 2.0).abs() < 1e-12);
        assert!((bounds.b - 2.0).abs() < 1e-12);
    }

    #[test]
    fn boxcar_has_spectral_hole_at_nyquist() {
        // S[k] = 2 + 2cos(2πk/8) vanishes at k = 4.
        let fb = Filterbank::from_filters(vec![vec![c64(1.0, 0.0), c64(1.0, 0.0)]], 1).unwrap();
        let bounds = frame_bounds_fft(&fb, 8).unwrap();
        assert_eq!(bounds.argmin_bin, 4);
        assert!(bounds.a <= 1e-30, "S[4] = {}", bounds.a);
        if bounds.a == 0.0 {
            assert!(bounds.kappa.is_infinite());
        }
        assert!((bounds.b - 4.0).abs() < 1e-12);
    }

    #[test]
    fn ties_break_toward_lowest_bin() {
        let fb = delta_bank();
        let bounds = frame_bounds_fft(&fb, 16).unwrap();
        // Flat spectrum: every bin ties; both extrema must report bin 0.
        assert_eq!(bounds.argmin_bin, 0);
        assert_eq!(bounds.argmax_bin, 0);
    }

    #[test]
    fn exact_oracle_matches_fft_at_hop_one() {
        let fb = make_random(4, 8, 0.25, 1, 77).unwrap();
        let fft_bounds = frame_bounds_fft(&fb, 128).unwrap();
        let exact = frame_bounds_exact(&fb, 128, 1).unwrap();
        assert!((fft_bounds.a - exact.a).abs() <= 1e-9 * exact.b);
        assert!((fft_bounds.b - exact.b).abs() <= 1e-9 * exact.b);
    }

    #[test]
    fn decimated_delta_loses_odd_samples() {
        let bounds = frame_bounds_exact(&delta_bank(), 8, 2).unwrap();
        assert_eq!(bounds.a, 0.0);
        assert!(bounds.kappa.is_infinite());
        assert!((bounds.b - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exact_oracle_guards_large_n() {
        let err = frame_bounds_exact(&delta_bank(), 8192, 1).unwrap_err();
        assert!(err.to_string().contains("frame_bounds_fft"));
    }

    #[test]
    fn stft_desk_scale_decimated_condition_numbers() {
        // The conjugate-complete 64-bin bank at hop 32 has κ = 2 (the
        // squared-Hann 50%-overlap value); covering only the lower 32 bins
        // leaves the system badly unbalanced, κ = φ⁴ ≈ 6.854.
        let full = make_stft(64, 64, 32).unwrap();
        let bounds = frame_bounds_exact(&full, 256, 32).unwrap();
        assert!(
            (bounds.kappa - 2.0).abs() <= 1e-6,
            "full-spectrum kappa = {}",
            bounds.kappa
        );
        let half = make_stft(32, 64, 32).unwrap();
        let bounds = frame_bounds_exact(&half, 256, 32).unwrap();
        let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
        assert!(
            (bounds.kappa - phi.powi(4)).abs() <= 1e-6,
            "half-spectrum kappa = {}",
            bounds.kappa
        );
    }

    #[test]
    fn frame_inequality_over_random_signals() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let fb = make_random(4, 8, 0.25, 1, 13).unwrap();
        let n = 64;
        let bounds = frame_bounds_fft(&fb, n).unwrap();
        for _ in 0..100 {
            let x = Signal::new((0..n).map(|_| rng.gen::<f64>() - 0.5).collect(), 1).unwrap();
            let energy = analysis_energy(&fb, &x).unwrap();
            let xe = x.energy();
            assert!(energy >= bounds.a * xe - 1e-9 * bounds.b * xe);
            assert!(energy <= bounds.b * xe + 1e-9 * bounds.b * xe);
        }
    }

    #[test]
    fn kappa_is_scale_invariant() {
        let fb = make_random(3, 6, 0.5, 1, 3).unwrap();
        let kappa = frame_bounds_fft(&fb, 32).unwrap().kappa;
        for c in [2.0f64, 0.5, 4.0] {
            // Powers of two scale the spectrum exactly.
            let scaled: Vec<Vec<Complex64>> = fb
                .filters()
                .iter()
                .map(|w| w.iter().map(|v| v * c).collect())
                .collect();
            let sfb = Filterbank::from_filters(scaled, 1).unwrap();
            assert_eq!(frame_bounds_fft(&sfb, 32).unwrap().kappa, kappa);
        }
        let c = 0.7318;
        let scaled: Vec<Vec<Complex64>> = fb
            .filters()
            .iter()
            .map(|w| w.iter().map(|v| v * c).collect())
            .collect();
        let sfb = Filterbank::from_filters(scaled, 1).unwrap();
        let k2 = frame_bounds_fft(&sfb, 32).unwrap().kappa;
        assert!((k2 - kappa).abs() <= 1e-12 * kappa);
    }

    #[test]
    fn energy_identity_for_tight_banks() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let fb = canonical_tight(&make_random(4, 8, 0.25, 1, 41).unwrap(), 64).unwrap();
        let bounds = frame_bounds_fft(&fb, 64).unwrap();
        for _ in 0..20 {
            let x = Signal::new((0..64).map(|_| rng.gen::<f64>() - 0.5).collect(), 1).unwrap();
            let energy = analysis_energy(&fb, &x).unwrap();
            let want = bounds.a * x.energy();
            assert!((energy - want).abs() <= 1e-9 * want);
        }
    }

    #[test]
    fn is_tight_thresholds() {
        let tight = canonical_tight(&make_random(4, 8, 0.25, 1, 2).unwrap(), 32).unwrap();
        assert!(is_tight(&tight, 32, 1e-8).unwrap());
        let stft = make_stft(64, 64, 32).unwrap();
        // Undecimated spectral κ of the full Hann bank is 1 (painless
        // case), so check a deliberately unbalanced bank instead.
        assert!(is_tight(&stft, 256, 1e-3).unwrap());
        let lopsided = make_random(4, 8, 0.25, 1, 2).unwrap();
        assert!(!is_tight(&lopsided, 32, 1e-3).unwrap());
        assert!(is_tight(&delta_bank(), 16, 0.0).unwrap());
    }

    fn kappa_of(filters: &[Vec<Complex64>], n: usize) -> f64 {
        let fb = Filterbank::from_filters(filters.to_vec(), 1).unwrap();
        frame_bounds_fft(&fb, n).unwrap().kappa
    }

    #[test]
    fn gradient_matches_finite_differences_on_complex_banks() {
        // Spot check; the full 20-bank sweep runs in the acceptance suite.
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let (j, t, n, h) = (4usize, 8usize, 32usize, 1e-6);
        let mut checked = 0;
        while checked < 3 {
            let filters: Vec<Vec<Complex64>> = (0..j)
                .map(|_| {
                    (0..t)
                        .map(|_| c64(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
                        .collect()
                })
                .collect();
            let fb = Filterbank::from_filters(filters.clone(), 1).unwrap();
            let bounds = frame_bounds_fft(&fb, n).unwrap();
            let mut sorted = bounds.spectrum.clone();
            sorted.sort_by(|p, q| p.total_cmp(q));
            let ln = sorted.len();
            if sorted[1] - sorted[0] < 1e-6 * bounds.b
                || sorted[ln - 1] - sorted[ln - 2] < 1e-6 * bounds.b
            {
                continue; // degenerate (tied extrema): subgradient ambiguous
            }
            checked += 1;
            let grad = kappa_gradient(&fb, n, &vec![true; j]).unwrap();
            for jj in 0..j {
                for tt in 0..t {
                    for part in 0..2 {
                        let mut plus = filters.clone();
                        let mut minus = filters.clone();
                        if part == 0 {
                            plus[jj][tt] += h;
                            minus[jj][tt] -= h;
                        } else {
                            plus[jj][tt] += Complex64::new(0.0, h);
                            minus[jj][tt] -= Complex64::new(0.0, h);
                        }
                        let fd = (kappa_of(&plus, n) - kappa_of(&minus, n)) / (2.0 * h);
                        let a = if part == 0 {
                            grad[jj][tt].re
                        } else {
                            grad[jj][tt].im
                        };
                        let rel = (a - fd).abs() / a.abs().max(fd.abs());
                        assert!(
                            rel < 1e-5,
                            "coordinate ({jj},{tt},{}) rel err {rel}",
                            if part == 0 { "re" } else { "im" }
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn gradient_is_zero_at_exactly_flat_spectrum() {
        // argmin and argmax tie-break to the same bin, so ∂B = ∂A and the
        // subgradient vanishes identically.
        let grad = kappa_gradient(&delta_bank(), 16, &[true]).unwrap();
        assert!(grad[0].iter().all(|g| g.re == 0.0 && g.im == 0.0));
    }

    #[test]
    fn gradient_respects_trainable_mask_and_hybrid_taps() {
        let fixed = make_random(3, 6, 0.4, 1, 51).unwrap();
        let trainable = make_random(3, 4, 0.4, 1, 52).unwrap();
        let hybrid = compose_hybrid(&fixed, &trainable, Some(1)).unwrap();
        let grad = kappa_gradient(&hybrid, 32, &[true, false, true]).unwrap();
        // Gradients are with respect to the trainable taps (length 4).
        assert_eq!(grad.len(), 3);
        assert!(grad.iter().all(|g| g.len() == 4));
        assert!(grad[1].iter().all(|g| g.re == 0.0 && g.im == 0.0));
        assert!(grad[0].iter().any(|g| g.re != 0.0 || g.im != 0.0));
    }

    #[test]
    fn hybrid_gradient_matches_finite_differences() {
        let fixed = make_random(3, 6, 0.4, 1, 53).unwrap();
        let trainable0 = make_random(3, 4, 0.4, 1, 54).unwrap();
        let n = 32;
        let h = 1e-6;
        let hybrid = compose_hybrid(&fixed, &trainable0, Some(1)).unwrap();
        let grad = kappa_gradient(&hybrid, n, &[true; 3]).unwrap();
        let kappa_from_trainable = |taps: &[Vec<Complex64>]| -> f64 {
            let tb = Filterbank::from_filters(taps.to_vec(), 1).unwrap();
            let hy = compose_hybrid(&fixed, &tb, Some(1)).unwrap();
            frame_bounds_fft(&hy, n).unwrap().kappa
        };
        let base: Vec<Vec<Complex64>> = trainable0.filters().to_vec();
        for jj in 0..3 {
            for tt in 0..4 {
                let mut plus = base.clone();
                let mut minus = base.clone();
                plus[jj][tt] += h;
                minus[jj][tt] -= h;
                let fd = (kappa_from_trainable(&plus) - kappa_from_trainable(&minus)) / (2.0 * h);
                let a = grad[jj][tt].re;
                let rel = (a - fd).abs() / a.abs().max(fd.abs()).max(1e-12);
                assert!(rel < 1e-4, "hybrid coordinate ({jj},{tt}) rel err {rel}");
            }
        }
    }

    #[test]
    fn gradient_requires_a_frame() {
        // A delta-free bank with an exact spectral hole has no gradient.
        let fb = Filterbank::from_filters(vec![vec![c64(0.0, 0.0), c64(0.0, 0.0)]], 1).unwrap();
        assert!(kappa_gradient(&fb, 8, &[true]).is_err());
    }

    #[test]
    fn reconstruct_tight_bank_is_perfect() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let fb = canonical_tight(&make_random(4, 8, 0.25, 1, 21).unwrap(), 64).unwrap();
        let x = Signal::new((0..64).map(|_| rng.gen::<f64>() - 0.5).collect(), 1).unwrap();
        let (_, err) = reconstruct(&fb, &x).unwrap();
        assert!(err <= 1e-8, "reconstruction error {err}");
    }

    #[test]
    fn reconstruct_zero_signal_reports_zero_error() {
        let fb = canonical_tight(&make_random(2, 4, 0.5, 1, 22).unwrap(), 16).unwrap();
        let x = Signal::new(vec![0.0; 16], 1).unwrap();
        let (xhat, err) = reconstruct(&fb, &x).unwrap();
        assert_eq!(err, 0.0);
        assert!(xhat.samples().iter().all(|&v| v.abs() < 1e-14));
    }

    #[test]
    fn non_tight_reconstruction_error_is_frame_bounded() {
        // With the optimally scaled estimate (2/(A+B))·ΦᵀΦx the relative
        // error is at most (B−A)/(B+A).
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for seed in 0..5 {
            let fb = make_random(4, 8, 0.25, 1, 100 + seed).unwrap();
            let n = 64;
            let bounds = frame_bounds_fft(&fb, n).unwrap();
            let x = Signal::new((0..n).map(|_| rng.gen::<f64>() - 0.5).collect(), 1).unwrap();
            let coef = analyze(&fb, &x).unwrap();
            let back = synthesize(&fb, &coef).unwrap();
            let scale = 2.0 / (bounds.a + bounds.b);
            let diff: f64 = back
                .samples()
                .iter()
                .zip(x.samples())
                .map(|(p, q)| (scale * p - q) * (scale * p - q))
                .sum();
            let rel = (diff / x.energy()).sqrt();
            let bound = (bounds.b - bounds.a) / (bounds.b + bounds.a);
            assert!(
                rel <= bound + 1e-9,
                "seed {seed}: error {rel} exceeds frame bound {bound}"
            );
        }
    }
}
