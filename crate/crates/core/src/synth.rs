//! Procedural test scenes and split-focus pair generation.
//!
//! The fusion pipeline is dataset-free, so its tests need scenes with a
//! known ground truth. The generator here layers smooth shading, oriented
//! sinusoidal texture and sharp-edged shapes into an RGB image, then the
//! pair builders apply the two-layer optical model: a partially focused
//! photograph is the sharp scene where its focal region is, and a blurred
//! copy elsewhere, composited through a binary decision mask.

use ndarray::{Array2, Array3};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{DfpError, Result};
use crate::image_core::{blur_image, Image, Kernel, Plane};

/// Options for the procedural scene generator.
#[derive(Debug, Clone)]
pub struct SceneOptions {
    /// Amplitude of the oriented sinusoidal texture layer.
    pub texture_amplitude: f32,
    /// Wavelength range of the texture waves in pixels. Fine texture
    /// (single-digit wavelengths) is what defocus blur removes, so scenes
    /// meant to exercise focus measures should stay below ~10 px.
    pub texture_wavelengths: (f64, f64),
    /// Number of painted shapes.
    pub shapes: usize,
    /// Half-width of a vertical column band around the image center that
    /// shapes must not intersect. Texture and shading still cover it.
    /// Useful when a scene is split down the middle into two focal regions
    /// and features should not straddle the seam.
    pub center_guard: Option<usize>,
}

impl Default for SceneOptions {
    fn default() -> Self {
        SceneOptions {
            texture_amplitude: 0.1,
            texture_wavelengths: (4.0, 7.0),
            shapes: 12,
            center_guard: None,
        }
    }
}

/// Deterministic procedural RGB scene with values in `[0.02, 0.98]`.
pub fn test_scene(height: usize, width: usize, seed: u64) -> Result<Image> {
    scene(height, width, seed, &SceneOptions::default())
}

/// Scene generator with explicit options; see [`SceneOptions`].
pub fn scene(height: usize, width: usize, seed: u64, opts: &SceneOptions) -> Result<Image> {
    if height < 8 || width < 8 {
        return Err(DfpError::invalid(format!(
            "scene must be at least 8x8, got {height}x{width}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut data = Array3::<f32>::zeros((height, width, 3));

    // Smooth shading, one low-frequency wave per channel.
    for c in 0..3 {
        let fx: f64 = rng.random_range(0.4..1.4);
        let fy: f64 = rng.random_range(0.4..1.4);
        let phase: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        for i in 0..height {
            for j in 0..width {
                let arg = std::f64::consts::TAU
                    * (fx * j as f64 / width as f64 + fy * i as f64 / height as f64)
                    + phase;
                data[[i, j, c]] = 0.5 + 0.16 * arg.sin() as f32;
            }
        }
    }

    // Oriented mid-frequency texture shared across channels.
    let waves = 4;
    let mut texture = Array2::<f32>::zeros((height, width));
    let (wl_lo, wl_hi) = opts.texture_wavelengths;
    for _ in 0..waves {
        let theta: f64 = rng.random_range(0.0..std::f64::consts::PI);
        let wavelength: f64 = rng.random_range(wl_lo..wl_hi);
        let phase: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let (s, c) = theta.sin_cos();
        let amp = opts.texture_amplitude / waves as f32;
        for i in 0..height {
            for j in 0..width {
                let arg =
                    std::f64::consts::TAU * (c * j as f64 + s * i as f64) / wavelength + phase;
                texture[[i, j]] += amp * arg.sin() as f32;
            }
        }
    }
    for c in 0..3 {
        let gain: f32 = rng.random_range(0.7..1.0);
        for i in 0..height {
            for j in 0..width {
                data[[i, j, c]] += gain * texture[[i, j]];
            }
        }
    }

    // Sharp-edged shapes: rectangles and disks in solid colors.
    let n_shapes = opts.shapes;
    let min_dim = height.min(width) as f64;
    let guard = opts.center_guard.map(|g| {
        let mid = width / 2;
        (mid.saturating_sub(g), (mid + g).min(width))
    });
    let mut painted = 0usize;
    let mut attempts = 0usize;
    while painted < n_shapes && attempts < n_shapes * 50 {
        attempts += 1;
        let is_disk = rng.random_range(0.0..1.0) < 0.5;
        let size = rng.random_range(min_dim / 16.0..min_dim / 5.0);
        let ci = rng.random_range(0.0..height as f64);
        let cj = rng.random_range(0.0..width as f64);
        let half = size / 2.0;
        let j_lo = (cj - half).floor().max(0.0) as usize;
        let j_hi = ((cj + half).ceil() as usize).min(width);
        if let Some((g_lo, g_hi)) = guard {
            if j_lo < g_hi && j_hi > g_lo {
                continue; // shape would straddle the guarded seam
            }
        }
        let i_lo = (ci - half).floor().max(0.0) as usize;
        let i_hi = ((ci + half).ceil() as usize).min(height);
        let color: [f32; 3] = [
            rng.random_range(0.12..0.88),
            rng.random_range(0.12..0.88),
            rng.random_range(0.12..0.88),
        ];
        for i in i_lo..i_hi {
            for j in j_lo..j_hi {
                if is_disk {
                    let di = i as f64 - ci;
                    let dj = j as f64 - cj;
                    if di * di + dj * dj > half * half {
                        continue;
                    }
                }
                for c in 0..3 {
                    data[[i, j, c]] = color[c];
                }
            }
        }
        painted += 1;
    }

    data.mapv_inplace(|v| v.clamp(0.02, 0.98));
    Image::new(data)
}

/// Binary mask that is 1 on the left half of the image (columns `< w/2`).
pub fn left_half_mask(height: usize, width: usize) -> Plane {
    Array2::from_shape_fn((height, width), |(_, j)| if j < width / 2 { 1.0 } else { 0.0 })
}

/// `n` horizontal band masks of equal height covering the image.
pub fn band_masks(height: usize, width: usize, n: usize) -> Vec<Plane> {
    assert!(n >= 1 && n <= height);
    (0..n)
        .map(|b| {
            let lo = b * height / n;
            let hi = (b + 1) * height / n;
            Array2::from_shape_fn((height, width), |(i, _)| {
                if i >= lo && i < hi {
                    1.0
                } else {
                    0.0
                }
            })
        })
        .collect()
}

/// Builds a split-focus pair from a sharp scene and a binary mask.
///
/// Returns `(i_fore, i_back)`: the foreground-focused image is sharp where
/// `mask == 1` and defocused (blurred with `kernel`) elsewhere; the
/// background-focused image is its complement.
pub fn split_focus_pair(gt: &Image, mask: &Plane, kernel: &Kernel) -> Result<(Image, Image)> {
    if mask.dim() != (gt.height(), gt.width()) {
        return Err(DfpError::shape(format!(
            "mask {:?} does not match image {}x{}",
            mask.dim(),
            gt.height(),
            gt.width()
        )));
    }
    let blurred = blur_image(gt, kernel)?;
    let fore = composite(gt, &blurred, mask)?;
    let complement = mask.mapv(|v| 1.0 - v);
    let back = composite(gt, &blurred, &complement)?;
    Ok((fore, back))
}

/// Builds an `n`-plane refocus stack: plane `k` is sharp inside `masks[k]`
/// and blurred elsewhere.
pub fn refocus_stack(gt: &Image, masks: &[Plane], kernel: &Kernel) -> Result<Vec<Image>> {
    let blurred = blur_image(gt, kernel)?;
    masks.iter().map(|m| composite(gt, &blurred, m)).collect()
}

/// `sharp * m + blurred * (1 - m)` per channel.
fn composite(sharp: &Image, blurred: &Image, mask: &Plane) -> Result<Image> {
    let (h, w, c) = sharp.data().dim();
    let mut out = Array3::zeros((h, w, c));
    for i in 0..h {
        for j in 0..w {
            let m = mask[[i, j]];
            for ch in 0..c {
                out[[i, j, ch]] =
                    m * sharp.data()[[i, j, ch]] + (1.0 - m) * blurred.data()[[i, j, ch]];
            }
        }
    }
    Image::from_clamped(out)
}

/// Adds clamped i.i.d. Gaussian noise with the given standard deviation.
pub fn add_gaussian_noise(img: &Image, sigma: f64, seed: u64) -> Result<Image> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut data = img.data().clone();
    for v in data.iter_mut() {
        *v = (*v + (sigma * standard_normal(&mut rng)) as f32).clamp(0.0, 1.0);
    }
    Image::new(data)
}

/// Box-Muller standard normal draw (two uniforms per call, deterministic).
pub(crate) fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.random_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.random_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image_core::gaussian_kernel;

    #[test]
    fn scene_is_deterministic_per_seed() {
        let a = test_scene(32, 40, 7).unwrap();
        let b = test_scene(32, 40, 7).unwrap();
        assert_eq!(a.data(), b.data());
        let c = test_scene(32, 40, 8).unwrap();
        assert!(a.data() != c.data());
    }

    #[test]
    fn scene_has_contrast() {
        let img = test_scene(64, 64, 1).unwrap();
        let y = crate::image_core::to_luma(&img).unwrap();
        let min = y.iter().cloned().fold(f32::INFINITY, f32::min);
        let max = y.iter().cloned().fold(f32::NEG_INFINITY, f32::max);
        assert!(max - min > 0.3, "scene too flat: {min}..{max}");
    }

    #[test]
    fn guarded_scene_keeps_seam_columns_shape_free() {
        let guard = 6usize;
        let opts = SceneOptions {
            center_guard: Some(guard),
            ..SceneOptions::default()
        };
        let with = scene(64, 64, 3, &opts).unwrap();
        // Build the same scene without shapes: the guarded band must match,
        // proving no shape touched it.
        let no_shapes = scene(
            64,
            64,
            3,
            &SceneOptions {
                shapes: 0,
                ..opts.clone()
            },
        )
        .unwrap();
        // Shape painting consumes RNG draws, so the underlying layers are
        // identical only if the generator draws shading and texture before
        // any shape; compare the seam within a tolerance that shading
        // equality implies.
        let mid = 32usize;
        for i in 0..64 {
            for j in mid - 2..mid + 2 {
                for c in 0..3 {
                    let a = with.data()[[i, j, c]];
                    let b = no_shapes.data()[[i, j, c]];
                    assert!((a - b).abs() < 1e-6, "seam painted at ({i},{j},{c})");
                }
            }
        }
    }

    #[test]
    fn split_focus_pair_is_sharp_on_its_own_side() {
        let gt = test_scene(48, 48, 11).unwrap();
        let mask = left_half_mask(48, 48);
        let kernel = gaussian_kernel(9, 2.0).unwrap();
        let (fore, back) = split_focus_pair(&gt, &mask, &kernel).unwrap();
        // Left half of i_fore equals ground truth exactly.
        for i in 0..48 {
            for j in 0..24 {
                for c in 0..3 {
                    assert_eq!(fore.data()[[i, j, c]], gt.data()[[i, j, c]]);
                }
            }
        }
        // Right half of i_back equals ground truth exactly.
        for i in 0..48 {
            for j in 24..48 {
                for c in 0..3 {
                    assert_eq!(back.data()[[i, j, c]], gt.data()[[i, j, c]]);
                }
            }
        }
        // The blurred halves genuinely differ from the sharp scene.
        assert!(fore.mean_abs_diff(&gt).unwrap() > 1e-4);
        assert!(back.mean_abs_diff(&gt).unwrap() > 1e-4);
    }

    #[test]
    fn band_masks_partition_the_image() {
        let masks = band_masks(30, 9, 4);
        assert_eq!(masks.len(), 4);
        for i in 0..30 {
            for j in 0..9 {
                let total: f32 = masks.iter().map(|m| m[[i, j]]).sum();
                assert_eq!(total, 1.0, "bands must tile exactly once at ({i},{j})");
            }
        }
    }

    #[test]
    fn noise_has_requested_scale() {
        let img = Image::constant(64, 64, 3, 0.5).unwrap();
        let noisy = add_gaussian_noise(&img, 0.05, 99).unwrap();
        let mut sum = 0.0f64;
        let mut sum2 = 0.0f64;
        let n = noisy.data().len() as f64;
        for (a, b) in noisy.data().iter().zip(img.data().iter()) {
            let d = (a - b) as f64;
            sum += d;
            sum2 += d * d;
        }
        let mean = sum / n;
        let std = (sum2 / n - mean * mean).sqrt();
        assert!(mean.abs() < 0.01, "noise mean {mean}");
        assert!((std - 0.05).abs() < 0.01, "noise std {std}");
    }
}
