//! Monte Carlo check of the hybrid energy identity: composing random
//! filters with a *tight* fixed bank preserves tightness in expectation,
//! with constant A_psi·T·sigma^2.
//!
//! The identity genuinely requires the fixed bank to be tight — the same
//! estimator run on a loose fixed bank is rejected up front, because the
//! expectation then depends on how the probe's energy is distributed
//! across the fixed bank's spectrum.
//!
//! Run with: `cargo run --example hybrid_tightness_theorem`

use framebank::{make_auditory, make_stft, verify_hybrid_tightness, AuditorySpec};

fn main() -> framebank::Result<()> {
    let n = 256;
    let fixed = make_auditory(&AuditorySpec {
        channels: 5, // 2·5 − 2 = 8 filters
        sample_rate: 16_000,
        f_min: 0.0,
        f_max: 8_000.0,
        filter_length: n,
        hop: 1,
    })?;
    let (t, sigma2) = (8usize, 1.0 / 8.0);
    println!(
        "fixed bank: tight auditory, {} channels; random part: T = {t}, sigma^2 = {sigma2}",
        fixed.n_channels()
    );
    let est = verify_hybrid_tightness(&fixed, t, sigma2, n, 10_000, 11)?;
    println!(
        "expected constant A_psi·T·sigma^2 = {:.6}; mean ratio = {:.6} ± {:.6}",
        est.expected_constant, est.mean_ratio, est.stderr
    );
    println!(
        "deviation = {:.2} standard errors over {} trials",
        (est.mean_ratio - 1.0).abs() / est.stderr,
        est.trials
    );

    // A loose fixed bank is rejected with the measured condition number.
    let loose = make_stft(32, 64, 32)?.with_hop(1)?;
    match verify_hybrid_tightness(&loose, t, sigma2, n, 1_000, 11) {
        Err(e) => println!("loose fixed bank rejected as required: {e}"),
        Ok(_) => println!("unexpected: loose fixed bank accepted"),
    }
    Ok(())
}
