//! Monte Carlo verification of the random-filter energy identities:
//! for i.i.d. N(0, σ²) filter taps, E[‖Φx‖²] = J·T·σ²·‖x‖² (plain random
//! banks), and for hybrids composed with a tight fixed bank Ψ,
//! E[‖Φ_Ψ x‖²] = A_Ψ·T·σ²·‖x‖² — tightness in expectation.
//!
//! Both estimators fix one random unit-norm probe x and average the
//! normalized analysis energy over freshly drawn filterbanks; the
//! expectation in the identities is over the random weights, not the
//! signal. Trials use per-trial derived seeds (`seed + trial_index`) so
//! results are reproducible regardless of evaluation order.

use crate::error::{Error, Result};
use crate::filterbank::{compose_hybrid, make_random, Filterbank};
use crate::frame::frame_bounds_fft;
use crate::signal::{analyze, Signal};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// κ tolerance on the fixed bank for the hybrid identity (the theorem's
/// hypothesis requires Ψ tight).
const HYBRID_TIGHTNESS_TOL: f64 = 1e-6;

/// Monte Carlo estimate of a tightness identity.
///
/// `mean_ratio` estimates E[‖Φx‖²]/(expected_constant·‖x‖²), which the
/// identity predicts to be 1; `stderr` is the standard error of that
/// mean. Consistency check: |mean_ratio − 1| ≤ 3·stderr.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TightnessEstimate {
    pub mean_ratio: f64,
    pub stderr: f64,
    pub trials: usize,
    /// The identity's predicted energy constant: J·T·σ² for plain random
    /// banks, A_Ψ·T·σ² for hybrids.
    pub expected_constant: f64,
}

fn mean_and_stderr(ratios: &[f64]) -> (f64, f64) {
    let n = ratios.len() as f64;
    let mean = ratios.iter().sum::<f64>() / n;
    let var = ratios.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Draws the fixed unit-norm probe signal for a verification run.
fn unit_probe(n: usize, seed: u64) -> Result<Signal> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    for v in &mut x {
        *v /= norm;
    }
    Signal::new(x, 1)
}

/// Verifies E[‖Φx‖²] = J·T·σ²·‖x‖² for plain random filterbanks at
/// hop 1 (the identity is undecimated).
///
/// Fixes one unit-norm x (drawn from `seed`), then draws `trials`
/// independent banks with per-trial seeds `seed + k` (k = 1..=trials)
/// and averages ‖Φx‖²/(J·T·σ²).
pub fn verify_random_tightness(
    j: usize,
    t: usize,
    sigma2: f64,
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<TightnessEstimate> {
    if trials < 100 {
        return Err(Error::invalid(format!(
            "Monte Carlo verification needs at least 100 trials, got {trials}"
        )));
    }
    if t > n {
        return Err(Error::invalid(format!(
            "filter length {t} exceeds signal length {n}"
        )));
    }
    let expected_constant = j as f64 * t as f64 * sigma2;
    if expected_constant <= 0.0 {
        return Err(Error::invalid(
            "J, T, and sigma2 must all be positive for the energy identity",
        ));
    }
    let x = unit_probe(n, seed)?;
    let x_energy = x.energy();
    let mut ratios = Vec::with_capacity(trials);
    for k in 1..=trials {
        let fb = make_random(j, t, sigma2, 1, seed.wrapping_add(k as u64))?;
        let energy = analyze(&fb, &x)?.energy();
        ratios.push(energy / (expected_constant * x_energy));
    }
    let (mean_ratio, stderr) = mean_and_stderr(&ratios);
    Ok(TightnessEstimate {
        mean_ratio,
        stderr,
        trials,
        expected_constant,
    })
}

/// Verifies the hybrid identity E[‖Φ_Ψ x‖²] = A_Ψ·T·σ²·‖x‖² for random
/// trainable parts composed with a tight fixed bank Ψ.
///
/// The fixed bank must be tight at length `n`, hop 1, within 1e-6 — that
/// is the theorem's hypothesis, and violating it is reported as an error
/// naming the measured κ. Composed filters longer than `n` are folded
/// mod n before analysis (exact under the circular convention).
pub fn verify_hybrid_tightness(
    fixed: &Filterbank,
    t: usize,
    sigma2: f64,
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<TightnessEstimate> {
    if trials < 100 {
        return Err(Error::invalid(format!(
            "Monte Carlo verification needs at least 100 trials, got {trials}"
        )));
    }
    if !(sigma2 > 0.0) || t == 0 {
        return Err(Error::invalid(
            "T and sigma2 must be positive for the energy identity",
        ));
    }
    let bounds = frame_bounds_fft(fixed, n)?;
    if !(bounds.kappa - 1.0 <= HYBRID_TIGHTNESS_TOL) {
        return Err(Error::domain(format!(
            "hybrid tightness requires a tight fixed bank: measured kappa = {:.6e} \
             at length {n} (tolerance 1 + 1e-6)",
            bounds.kappa
        )));
    }
    let a_psi = bounds.a;
    let expected_constant = a_psi * t as f64 * sigma2;
    let x = unit_probe(n, seed)?;
    let x_energy = x.energy();
    let j = fixed.n_channels();
    let mut ratios = Vec::with_capacity(trials);
    for k in 1..=trials {
        let trainable = make_random(j, t, sigma2, 1, seed.wrapping_add(k as u64))?;
        let hybrid = compose_hybrid(fixed, &trainable, Some(1))?;
        let folded = hybrid.fold_to_length(n)?;
        let energy = analyze(&folded, &x)?.energy();
        ratios.push(energy / (expected_constant * x_energy));
    }
    let (mean_ratio, stderr) = mean_and_stderr(&ratios);
    Ok(TightnessEstimate {
        mean_ratio,
        stderr,
        trials,
        expected_constant,
    })
}
