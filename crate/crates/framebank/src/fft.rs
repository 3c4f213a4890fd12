//! Discrete Fourier transforms with the crate-wide scaling convention:
//! the forward transform is unnormalized (kernel e^{-2πikn/N}) and the
//! inverse carries the 1/N factor. All frame quantities in this crate are
//! stated in this convention; only consistency matters, since the
//! condition number κ is invariant under rescaling.

use crate::error::{Error, Result};
use num_complex::Complex64;
use rustfft::FftPlanner;
use std::cell::RefCell;

thread_local! {
    // Plans are memoized per thread so repeated transforms of the same
    // length (the common case in training loops) reuse twiddle tables.
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn transform_in_place(buf: &mut [Complex64], inverse: bool) {
    let fft = PLANNER.with(|p| {
        let mut planner = p.borrow_mut();
        if inverse {
            planner.plan_fft_inverse(buf.len())
        } else {
            planner.plan_fft_forward(buf.len())
        }
    });
    fft.process(buf);
}

/// Forward DFT, unnormalized: X[k] = Σ_n v[n]·e^{-2πikn/N}.
///
/// `Parseval` under this convention reads ‖dft(v)‖² = N·‖v‖².
pub fn dft(v: &[Complex64]) -> Result<Vec<Complex64>> {
    if v.is_empty() {
        return Err(Error::invalid("dft: input must have length >= 1"));
    }
    let mut buf = v.to_vec();
    transform_in_place(&mut buf, false);
    Ok(buf)
}

/// Inverse DFT with the 1/N factor: v[n] = (1/N)·Σ_k X[k]·e^{2πikn/N}.
pub fn idft(v: &[Complex64]) -> Result<Vec<Complex64>> {
    if v.is_empty() {
        return Err(Error::invalid("idft: input must have length >= 1"));
    }
    let mut buf = v.to_vec();
    transform_in_place(&mut buf, true);
    let scale = 1.0 / buf.len() as f64;
    for x in &mut buf {
        *x *= scale;
    }
    Ok(buf)
}

/// DFT of a filter zero-padded to length `n`: ŵ[k] = Σ_t w[t]·e^{-2πikt/n}.
///
/// This is the quantity the frame spectrum S[k] = Σ_j |ŵ_j[k]|² is built
/// from. Panics are avoided by contract: callers check `w.len() <= n`.
pub(crate) fn padded_dft(w: &[Complex64], n: usize) -> Vec<Complex64> {
    debug_assert!(w.len() <= n, "filter longer than transform length");
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    buf[..w.len()].copy_from_slice(w);
    transform_in_place(&mut buf, false);
    buf
}

/// Forward DFT of a real vector (zero imaginary parts).
pub(crate) fn dft_real(x: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = x.iter().map(|&r| Complex64::new(r, 0.0)).collect();
    transform_in_place(&mut buf, false);
    buf
}

/// Unnormalized inverse transform in place; callers apply 1/N themselves
/// when they can fold it into another constant.
pub(crate) fn inverse_in_place(buf: &mut [Complex64]) {
    transform_in_place(buf, true);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn dft_of_delta_is_all_ones() {
        let v = vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        let out = dft(&v).unwrap();
        for x in out {
            assert!((x - c(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn dft_of_constant_is_scaled_delta() {
        let v = vec![c(1.0, 0.0); 4];
        let out = dft(&v).unwrap();
        assert!((out[0] - c(4.0, 0.0)).norm() < 1e-12);
        for x in &out[1..] {
            assert!(x.norm() < 1e-12);
        }
    }

    #[test]
    fn parseval_unnormalized() {
        // ‖dft(v)‖² = N·‖v‖² for the unnormalized forward transform.
        let mut state = 0x2545f4914f6cdd1du64;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let v: Vec<Complex64> = (0..64).map(|_| c(next(), next())).collect();
        let out = dft(&v).unwrap();
        let lhs: f64 = out.iter().map(|x| x.norm_sqr()).sum();
        let rhs: f64 = 64.0 * v.iter().map(|x| x.norm_sqr()).sum::<f64>();
        assert!((lhs - rhs).abs() <= 1e-9 * rhs.abs());
    }

    #[test]
    fn idft_inverts_dft() {
        let v: Vec<Complex64> = (0..33)
            .map(|i| c((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
            .collect();
        let back = idft(&dft(&v).unwrap()).unwrap();
        let num: f64 = v
            .iter()
            .zip(&back)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        let den: f64 = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        assert!(num <= 1e-12 * den);
    }

    #[test]
    fn empty_input_is_rejected() {
        assert!(dft(&[]).is_err());
        assert!(idft(&[]).is_err());
    }
}
