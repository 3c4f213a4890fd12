//! Train the small learnable front of a hybrid bank (fixed auditory part
//! composed with short trainable filters) against the mixed compressed
//! spectral loss with a condition-number penalty.
//!
//! Gradients for the data term go through central finite differences of
//! the full pipeline; the penalty term uses the analytic kappa gradient
//! chained through the fixed part.
//!
//! Run with: `cargo run --example hybrid_training`

use framebank::{
    compose_hybrid, fit_hybrid, make_auditory, AuditorySpec, Filterbank, GradMode, McsParams,
    Signal, TrainConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> framebank::Result<()> {
    let n = 128;
    let fixed = make_auditory(&AuditorySpec {
        channels: 5,
        sample_rate: 16_000,
        f_min: 0.0,
        f_max: 8_000.0,
        filter_length: 64,
        hop: 1,
    })?;
    // Start the trainable part as slightly perturbed delta filters, one
    // per fixed channel (the composed filter length 64 + 5 − 1 must stay
    // within the training signal length).
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let taps: Vec<Vec<num_complex::Complex64>> = (0..fixed.n_channels())
        .map(|_| {
            (0..5)
                .map(|t| {
                    let base = if t == 0 { 1.0 } else { 0.0 };
                    num_complex::Complex64::new(
                        base + 0.1 * (rng.gen::<f64>() - 0.5),
                        0.1 * (rng.gen::<f64>() - 0.5),
                    )
                })
                .collect()
        })
        .collect();
    let trainable = Filterbank::from_filters(taps, 1)?;
    let composed = compose_hybrid(&fixed, &trainable, Some(1))?;
    println!(
        "composed bank: {} channels × {} taps",
        composed.n_channels(),
        composed.max_filter_length()
    );

    // Training pairs: targets are clean tones, inputs are the same tones
    // with additive noise. Signals are length 2·N so the composed filters
    // fit the analysis transform.
    let pairs: Vec<(Signal, Signal)> = (0..4)
        .map(|i| {
            let f = 500.0 * (i + 1) as f64;
            let clean: Vec<f64> = (0..2 * n)
                .map(|t| (2.0 * std::f64::consts::PI * f * t as f64 / 16_000.0).sin())
                .collect();
            let noisy: Vec<f64> = clean
                .iter()
                .map(|c| c + 0.3 * (rng.gen::<f64>() - 0.5))
                .collect();
            Ok((Signal::new(noisy, 16_000)?, Signal::new(clean, 16_000)?))
        })
        .collect::<framebank::Result<_>>()?;

    let cfg = TrainConfig {
        learning_rate: 5e-3,
        steps: 40,
        grad_mode: GradMode::FiniteDifferenceFull,
        ..TrainConfig::default()
    };
    let report = fit_hybrid(&fixed, &trainable, &pairs, &McsParams::default(), &cfg)?;

    let first = report.trace.first().expect("trace has the initial state");
    let last = report.trace.last().expect("trace has the final state");
    println!(
        "loss {:.6} → {:.6} over {} steps",
        first.loss,
        last.loss,
        report.trace.len() - 1
    );
    println!("kappa {:.6} → {:.6}", first.kappa, last.kappa);
    println!();
    println!(
        "{:>6} {:>14} {:>14} {:>10}",
        "step", "loss", "mcs term", "kappa"
    );
    for e in report.trace.iter().step_by(10) {
        println!(
            "{:>6} {:>14.6} {:>14.6} {:>10.5}",
            e.step, e.loss, e.mcs_term, e.kappa
        );
    }
    Ok(())
}
