//! WAV file I/O: mono PCM 16-bit and IEEE float 32-bit, nothing else.
//!
//! Reading a stereo file is an error (no silent downmix), as is any
//! other encoding. Writing always produces IEEE float 32-bit, so
//! write∘read round trips are bit-exact for float32 sources; 16-bit PCM
//! maps to [−1, 1) by division by 32768 on read.

use crate::error::{Error, Result};
use crate::signal::Signal;
use std::path::Path;

fn from_hound(context: &str, err: hound::Error) -> Error {
    match err {
        hound::Error::IoError(io) => Error::io(context, io),
        other => Error::parse(format!("{context}: {other}")),
    }
}

/// Reads a mono WAV file into a [`Signal`].
pub fn wav_read(path: &Path) -> Result<Signal> {
    let context = format!("reading {}", path.display());
    let mut reader = hound::WavReader::open(path).map_err(|e| from_hound(&context, e))?;
    let spec = reader.spec();
    if spec.channels != 1 {
        return Err(Error::parse(format!(
            "{context}: unsupported channel count: {} (mono required, no silent downmix)",
            spec.channels
        )));
    }
    let samples: Vec<f64> = match (spec.sample_format, spec.bits_per_sample) {
        (hound::SampleFormat::Int, 16) => reader
            .samples::<i16>()
            .map(|s| s.map(|v| f64::from(v) / 32768.0))
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| from_hound(&context, e))?,
        (hound::SampleFormat::Float, 32) => reader
            .samples::<f32>()
            .map(|s| s.map(f64::from))
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| from_hound(&context, e))?,
        (format, bits) => {
            return Err(Error::parse(format!(
                "{context}: unsupported encoding: {bits}-bit {format:?} \
                 (PCM 16-bit or IEEE float 32-bit required)"
            )));
        }
    };
    if samples.is_empty() {
        return Err(Error::parse(format!("{context}: file contains no samples")));
    }
    Signal::new(samples, spec.sample_rate)
}

/// Writes a [`Signal`] as a mono IEEE float 32-bit WAV file.
pub fn wav_write(path: &Path, signal: &Signal) -> Result<()> {
    let context = format!("writing {}", path.display());
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate: signal.sample_rate(),
        bits_per_sample: 32,
        sample_format: hound::SampleFormat::Float,
    };
    let mut writer = hound::WavWriter::create(path, spec).map_err(|e| from_hound(&context, e))?;
    for &v in signal.samples() {
        writer
            .write_sample(v as f32)
            .map_err(|e| from_hound(&context, e))?;
    }
    writer.finalize().map_err(|e| from_hound(&context, e))
}
