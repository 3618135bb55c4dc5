//! Small 2-D FFT wrapper over rustfft, in double precision.
//!
//! Kernel estimation divides spectra pointwise, which is sensitive to
//! rounding; everything here therefore runs in `Complex<f64>`.

use ndarray::Array2;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

/// Forward 2-D DFT (no normalization).
pub(crate) fn fft2(input: &Array2<Complex<f64>>) -> Array2<Complex<f64>> {
    transform(input, rustfft::FftDirection::Forward)
}

/// Inverse 2-D DFT, normalized by `1 / (H * W)`.
pub(crate) fn ifft2(input: &Array2<Complex<f64>>) -> Array2<Complex<f64>> {
    let (h, w) = input.dim();
    let mut out = transform(input, rustfft::FftDirection::Inverse);
    let norm = 1.0 / (h * w) as f64;
    out.mapv_inplace(|v| v * norm);
    out
}

fn transform(
    input: &Array2<Complex<f64>>,
    direction: rustfft::FftDirection,
) -> Array2<Complex<f64>> {
    let (h, w) = input.dim();
    let mut planner = FftPlanner::<f64>::new();
    let row_fft = planner.plan_fft(w, direction);
    let col_fft = planner.plan_fft(h, direction);

    let mut out = input.clone();
    let mut row_buf = vec![Complex::default(); w];
    for i in 0..h {
        for j in 0..w {
            row_buf[j] = out[[i, j]];
        }
        row_fft.process(&mut row_buf);
        for j in 0..w {
            out[[i, j]] = row_buf[j];
        }
    }
    let mut col_buf = vec![Complex::default(); h];
    for j in 0..w {
        for i in 0..h {
            col_buf[i] = out[[i, j]];
        }
        col_fft.process(&mut col_buf);
        for i in 0..h {
            out[[i, j]] = col_buf[i];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn almost(a: Complex<f64>, b: Complex<f64>) -> bool {
        (a - b).norm() < 1e-9
    }

    #[test]
    fn impulse_transforms_to_all_ones() {
        let mut x = Array2::from_elem((4, 6), Complex::new(0.0, 0.0));
        x[[0, 0]] = Complex::new(1.0, 0.0);
        let y = fft2(&x);
        for v in y.iter() {
            assert!(almost(*v, Complex::new(1.0, 0.0)));
        }
    }

    #[test]
    fn round_trip_recovers_input() {
        let x = Array2::from_shape_fn((8, 8), |(i, j)| {
            Complex::new((i as f64 * 0.3).sin() + j as f64 * 0.1, 0.0)
        });
        let back = ifft2(&fft2(&x));
        for (a, b) in x.iter().zip(back.iter()) {
            assert!(almost(*a, *b), "{a} vs {b}");
        }
    }

    #[test]
    fn convolution_theorem_holds_for_circular_shift() {
        // Shifting by (1, 2) multiplies the spectrum by a phase ramp.
        let x = Array2::from_shape_fn((8, 8), |(i, j)| {
            Complex::new(((i * 13 + j * 7) % 11) as f64 / 11.0, 0.0)
        });
        let shifted = Array2::from_shape_fn((8, 8), |(i, j)| x[[(i + 7) % 8, (j + 6) % 8]]);
        let fx = fft2(&x);
        let fs = fft2(&shifted);
        for i in 0..8 {
            for j in 0..8 {
                let phase = -2.0 * std::f64::consts::PI * (i as f64 * 1.0 + j as f64 * 2.0) / 8.0;
                let expected = fx[[i, j]] * Complex::from_polar(1.0, phase);
                assert!(almost(fs[[i, j]], expected));
            }
        }
    }
}
