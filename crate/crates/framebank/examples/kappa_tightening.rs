//! Drive a random filterbank toward tightness by descending the
//! condition number with its analytic subgradient.
//!
//! Run with: `cargo run --example kappa_tightening`

use framebank::{tighten, GradMode, TrainConfig};

fn main() -> framebank::Result<()> {
    let fb = framebank::make_random(8, 16, 1.0 / 128.0, 1, 6)?;
    let cfg = TrainConfig {
        learning_rate: 1e-3,
        steps: 500,
        grad_mode: GradMode::AnalyticKappaOnly,
        ..TrainConfig::default()
    };
    let report = tighten(&fb, &[true; 8], 256, &cfg)?;

    println!(
        "kappa: {:.4} → {:.6}",
        report.initial_kappa(),
        report.final_kappa()
    );
    println!("converged (kappa within 1e-6 of 1): {}", report.converged);
    println!();
    println!("{:>6} {:>12} {:>12}", "step", "kappa", "grad norm");
    for e in report.trace.iter().step_by(100) {
        println!("{:>6} {:>12.6} {:>12.4e}", e.step, e.kappa, e.grad_norm);
    }
    let last = report.trace.last().expect("trace is never empty");
    if last.step % 100 != 0 {
        println!(
            "{:>6} {:>12.6} {:>12.4e}",
            last.step, last.kappa, last.grad_norm
        );
    }
    Ok(())
}
