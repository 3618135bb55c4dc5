//! Separable corner-aligned resampling.
//!
//! A 1-D resampler precomputes, for every output sample, the source start
//! index and a short normalized tap vector. Output position `o` maps to
//! input coordinate `o * (n_in - 1) / (n_out - 1)`, so the first and last
//! samples of both grids coincide. When downscaling, the kernel support is
//! stretched by the step so the filter acts as an antialiasing low-pass.
//!
//! The same tap tables drive both the plain image path (here) and the
//! differentiable resampling node in the autodiff tape, which applies the
//! transpose for the backward pass.

use ndarray::{Array2, ArrayView2};

/// Interpolation kernel family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResampleMethod {
    /// Triangle kernel, radius 1.
    Bilinear,
    /// Keys cubic with a = -0.5, radius 2.
    Bicubic,
    /// Lanczos windowed sinc with a = 3, radius 3.
    Lanczos,
}

impl ResampleMethod {
    fn radius(self) -> f64 {
        match self {
            ResampleMethod::Bilinear => 1.0,
            ResampleMethod::Bicubic => 2.0,
            ResampleMethod::Lanczos => 3.0,
        }
    }

    fn eval(self, t: f64) -> f64 {
        let t = t.abs();
        match self {
            ResampleMethod::Bilinear => {
                if t < 1.0 {
                    1.0 - t
                } else {
                    0.0
                }
            }
            ResampleMethod::Bicubic => {
                // Keys (1981) cubic with a = -0.5.
                const A: f64 = -0.5;
                if t < 1.0 {
                    (A + 2.0) * t * t * t - (A + 3.0) * t * t + 1.0
                } else if t < 2.0 {
                    A * t * t * t - 5.0 * A * t * t + 8.0 * A * t - 4.0 * A
                } else {
                    0.0
                }
            }
            ResampleMethod::Lanczos => {
                const A: f64 = 3.0;
                if t < 1e-12 {
                    1.0
                } else if t < A {
                    let pt = std::f64::consts::PI * t;
                    A * (pt.sin() * (pt / A).sin()) / (pt * pt)
                } else {
                    0.0
                }
            }
        }
    }
}

/// Precomputed taps for one axis of a resampling operation.
#[derive(Debug, Clone)]
pub(crate) struct Resampler1d {
    pub(crate) n_in: usize,
    pub(crate) n_out: usize,
    /// `(start, weights)` per output sample; weights sum to 1.
    pub(crate) taps: Vec<(usize, Vec<f64>)>,
}

impl Resampler1d {
    pub(crate) fn new(n_in: usize, n_out: usize, method: ResampleMethod) -> Self {
        assert!(n_in >= 1 && n_out >= 1, "empty axis");
        let mut taps = Vec::with_capacity(n_out);
        for o in 0..n_out {
            let x = if n_out == 1 {
                (n_in as f64 - 1.0) / 2.0
            } else {
                o as f64 * (n_in as f64 - 1.0) / (n_out as f64 - 1.0)
            };
            // Stretch the kernel when the output grid is coarser.
            let step = if n_out > 1 {
                (n_in as f64 - 1.0) / (n_out as f64 - 1.0)
            } else {
                n_in as f64
            };
            let support_scale = step.max(1.0);
            let radius = method.radius() * support_scale;
            let lo = ((x - radius).ceil() as isize).max(0) as usize;
            let hi = ((x + radius).floor() as isize).min(n_in as isize - 1) as usize;
            let mut weights: Vec<f64> = (lo..=hi)
                .map(|i| method.eval((x - i as f64) / support_scale))
                .collect();
            let sum: f64 = weights.iter().sum();
            if sum.abs() < 1e-12 || weights.is_empty() {
                // Degenerate support (only possible for pathological sizes);
                // fall back to nearest neighbor.
                let nearest = x.round().clamp(0.0, n_in as f64 - 1.0) as usize;
                taps.push((nearest, vec![1.0]));
                continue;
            }
            for w in &mut weights {
                *w /= sum;
            }
            taps.push((lo, weights));
        }
        Resampler1d { n_in, n_out, taps }
    }

    /// Resamples along axis 0 (rows).
    pub(crate) fn apply_rows(&self, plane: &ArrayView2<f32>) -> Array2<f32> {
        let (h, w) = plane.dim();
        assert_eq!(h, self.n_in);
        let mut out = Array2::zeros((self.n_out, w));
        for (o, (start, weights)) in self.taps.iter().enumerate() {
            for j in 0..w {
                let mut acc = 0.0f32;
                for (k, &wt) in weights.iter().enumerate() {
                    acc += wt as f32 * plane[[start + k, j]];
                }
                out[[o, j]] = acc;
            }
        }
        out
    }

    /// Resamples along axis 1 (columns).
    pub(crate) fn apply_cols(&self, plane: &ArrayView2<f32>) -> Array2<f32> {
        let (h, w) = plane.dim();
        assert_eq!(w, self.n_in);
        let mut out = Array2::zeros((h, self.n_out));
        for i in 0..h {
            for (o, (start, weights)) in self.taps.iter().enumerate() {
                let mut acc = 0.0f32;
                for (k, &wt) in weights.iter().enumerate() {
                    acc += wt as f32 * plane[[i, start + k]];
                }
                out[[i, o]] = acc;
            }
        }
        out
    }
}
