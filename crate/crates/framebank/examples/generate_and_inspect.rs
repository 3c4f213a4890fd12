//! Build one filterbank of each kind, inspect its frame bounds, and
//! round-trip it through the JSON container format.
//!
//! Run with: `cargo run --example generate_and_inspect`

use framebank::{
    frame_bounds_fft, make_auditory, make_random, make_stft, AuditorySpec, Filterbank,
};

fn describe(name: &str, fb: &Filterbank, n: usize) -> framebank::Result<()> {
    let bounds = frame_bounds_fft(fb, n)?;
    println!(
        "{name:>8}: {} channels × {} taps, hop {} | A = {:.6}, B = {:.6}, kappa = {:.6}",
        fb.n_channels(),
        fb.max_filter_length(),
        fb.hop(),
        bounds.a,
        bounds.b,
        bounds.kappa
    );
    Ok(())
}

fn main() -> framebank::Result<()> {
    let n = 512;

    let stft = make_stft(64, 64, 32)?;
    describe("stft", &stft, n)?;

    let auditory = make_auditory(&AuditorySpec {
        channels: 12,
        sample_rate: 16_000,
        f_min: 0.0,
        f_max: 8_000.0,
        filter_length: n,
        hop: 1,
    })?;
    describe("auditory", &auditory, n)?;

    let random = make_random(6, 16, 1.0 / 96.0, 1, 42)?;
    describe("random", &random, n)?;

    // The container stores filters losslessly: load(save(fb)) is
    // bit-identical, so downstream measurements are reproducible.
    let dir = std::env::temp_dir().join("framebank_example");
    std::fs::create_dir_all(&dir).map_err(|e| framebank::Error::io("create temp dir", e))?;
    let path = dir.join("random_bank.json");
    framebank::filterbank::save(&random, &path)?;
    let reloaded = framebank::filterbank::load(&path)?;
    let identical = reloaded.filters() == random.filters() && reloaded.hop() == random.hop();
    println!(
        "container round trip at {}: bit-identical = {identical}",
        path.display()
    );
    std::fs::remove_file(&path).ok();
    Ok(())
}
