//! Condition number of a Hann STFT bank as overlap and channel coverage
//! vary, comparing the spectral formula (which ignores decimation) with
//! the dense oracle that measures the decimated operator itself.
//!
//! Run with: `cargo run --example stft_condition_number`

use framebank::{frame_bounds_exact, frame_bounds_fft, make_stft};

fn fmt_kappa(k: f64) -> String {
    if k > 1e6 {
        format!("{k:.2e}")
    } else {
        format!("{k:.6}")
    }
}

fn main() -> framebank::Result<()> {
    let n = 256;
    println!("Hann STFT, window 64, transform length {n}");
    println!(
        "{:>6} {:>10} {:>14} {:>14}",
        "hop", "channels", "kappa spectral", "kappa decimated"
    );
    for &(channels, hop) in &[(64usize, 16usize), (64, 32), (64, 64), (32, 32)] {
        let fb = make_stft(channels, 64, hop)?;
        let spectral = frame_bounds_fft(&fb, n)?;
        let exact = frame_bounds_exact(&fb, n, hop)?;
        println!(
            "{hop:>6} {channels:>10} {:>14} {:>14}",
            fmt_kappa(spectral.kappa),
            fmt_kappa(exact.kappa)
        );
    }
    let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
    println!();
    println!("reading the table:");
    println!(" - the undecimated spectrum of a full 64-bin DFT bank is flat");
    println!("   (kappa spectral = 1); decimation is what costs conditioning.");
    println!(" - hop 32 (50% overlap): squared Hann windows overlap-add to");
    println!("   values between 1/2 and 1 of the peak, so the decimated");
    println!("   operator has kappa = 2 exactly.");
    println!(" - hop 64 (no overlap): the Hann window's endpoint zeros leave");
    println!("   samples unobserved, so A collapses and kappa blows up —");
    println!("   numerically no longer a frame.");
    println!(" - keeping only the 32 lower bins leaves negative frequencies");
    println!("   uncovered (spectral kappa explodes), yet decimation aliases");
    println!("   energy back and the measured operator lands at");
    println!("   phi^4 = {:.6}.", phi.powi(4));
    Ok(())
}
