//! Focus decision maps by double reblurring.
//!
//! Given a foreground-focused and a background-focused photograph of the
//! same scene, the two are related (approximately, and only over the
//! foreground region) by a spread kernel: the background-focused image is
//! the foreground-focused one convolved with it. The kernel is recovered
//! in the frequency domain from the regularized spectral ratio, the
//! background-focused image is blurred with it once more, and the residual
//! sharpness of the result tells the two focal regions apart: where the
//! background-focused image was sharp, one extra blur still leaves detail,
//! whereas the foreground region has then been blurred twice and retains
//! almost none. Thresholding that sharpness map and cleaning it up with
//! morphological closing and a largest-region fill yields the decision
//! map; its complement marks the foreground, which is what
//! [`compute_decision_map`] returns.

use ndarray::Array2;
use rustfft::num_complex::Complex;

use crate::error::{DfpError, Result};
use crate::fft::{fft2, ifft2};
use crate::image_core::{
    convolve2d, gaussian_kernel, luma_of, Image, Kernel, Plane,
};

/// Parameters of the decision-map pipeline, `[k_g, k_d, k_e, t, f]`:
/// Gaussian size, dilation size, erosion size, sharpness threshold and the
/// largest-region-fill switch.
#[derive(Debug, Clone, PartialEq)]
pub struct ReblurParams {
    /// Size of the Gaussian used by the sharpness difference (odd, >= 3);
    /// its standard deviation is `gaussian_size / 3`.
    pub gaussian_size: usize,
    /// Dilation element size of the closing step (odd).
    pub dilate_size: usize,
    /// Erosion element size of the closing step (odd).
    pub erode_size: usize,
    /// Threshold applied to the normalized sharpness difference, in `[0, 1]`.
    pub threshold: f32,
    /// Whether to keep only the largest connected region and fill its
    /// interior holes.
    pub fill: bool,
}

impl Default for ReblurParams {
    fn default() -> Self {
        ReblurParams {
            gaussian_size: 5,
            dilate_size: 3,
            erode_size: 3,
            threshold: 0.01,
            fill: true,
        }
    }
}

impl ReblurParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("gaussian_size", self.gaussian_size),
            ("dilate_size", self.dilate_size),
            ("erode_size", self.erode_size),
        ] {
            if v % 2 == 0 || v == 0 {
                return Err(DfpError::invalid(format!("{name} must be odd, got {v}")));
            }
        }
        if self.gaussian_size < 3 {
            return Err(DfpError::invalid(format!(
                "gaussian_size must be >= 3, got {}",
                self.gaussian_size
            )));
        }
        if !self.threshold.is_finite() || !(0.0..=1.0).contains(&self.threshold) {
            return Err(DfpError::invalid(format!(
                "threshold must be in [0, 1], got {}",
                self.threshold
            )));
        }
        Ok(())
    }
}

/// Configuration of the spectral spread-kernel estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelEstConfig {
    /// Side length of the returned kernel (odd).
    pub support: usize,
    /// Relative Tikhonov regularizer of the spectral ratio; the effective
    /// floor is `epsilon` times the mean spectral power of the sharp image.
    pub epsilon: f64,
    /// Width of the frequency-domain low-pass applied to the ratio. The
    /// Gaussian low-pass has standard deviation `lowpass_sigma / (2 pi)`
    /// cycles per sample, i.e. it equals the frequency response of a
    /// spatial Gaussian with standard deviation `1 / lowpass_sigma` pixels;
    /// larger values pass more of the spectrum through.
    pub lowpass_sigma: f64,
}

impl Default for KernelEstConfig {
    fn default() -> Self {
        KernelEstConfig {
            support: 21,
            epsilon: 1e-3,
            lowpass_sigma: 2.0,
        }
    }
}

impl KernelEstConfig {
    pub fn validate(&self) -> Result<()> {
        if self.support % 2 == 0 || self.support == 0 {
            return Err(DfpError::invalid(format!(
                "kernel support must be odd, got {}",
                self.support
            )));
        }
        if !(self.epsilon > 0.0) || !self.epsilon.is_finite() {
            return Err(DfpError::invalid("epsilon must be positive".to_string()));
        }
        if !(self.lowpass_sigma > 0.0) || !self.lowpass_sigma.is_finite() {
            return Err(DfpError::invalid(
                "lowpass_sigma must be positive".to_string(),
            ));
        }
        Ok(())
    }
}

/// Binary H x W mask with values in `{0, 1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryMask {
    data: Array2<u8>,
}

impl BinaryMask {
    pub fn new(data: Array2<u8>) -> Result<Self> {
        if !data.iter().all(|&v| v <= 1) {
            return Err(DfpError::invalid("mask values must be 0 or 1"));
        }
        Ok(BinaryMask { data })
    }

    pub fn from_fn(h: usize, w: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        BinaryMask {
            data: Array2::from_shape_fn((h, w), |(i, j)| u8::from(f(i, j))),
        }
    }

    pub fn height(&self) -> usize {
        self.data.dim().0
    }

    pub fn width(&self) -> usize {
        self.data.dim().1
    }

    pub fn data(&self) -> &Array2<u8> {
        &self.data
    }

    pub fn count_ones(&self) -> usize {
        self.data.iter().filter(|&&v| v == 1).count()
    }

    pub fn all_zeros(&self) -> bool {
        self.count_ones() == 0
    }

    pub fn all_ones(&self) -> bool {
        self.count_ones() == self.data.len()
    }

    pub fn complement(&self) -> BinaryMask {
        BinaryMask {
            data: self.data.mapv(|v| 1 - v),
        }
    }

    /// Intersection over union of the 1-regions. Two empty masks count as
    /// identical (IoU 1).
    pub fn iou(&self, other: &BinaryMask) -> Result<f64> {
        if self.data.dim() != other.data.dim() {
            return Err(DfpError::shape(format!(
                "mask sizes differ: {:?} vs {:?}",
                self.data.dim(),
                other.data.dim()
            )));
        }
        let mut inter = 0usize;
        let mut union = 0usize;
        for (a, b) in self.data.iter().zip(other.data.iter()) {
            if *a == 1 && *b == 1 {
                inter += 1;
            }
            if *a == 1 || *b == 1 {
                union += 1;
            }
        }
        if union == 0 {
            return Ok(1.0);
        }
        Ok(inter as f64 / union as f64)
    }
}

/// Continuous decision map with values in `[0, 1]`; 1 marks pixels that the
/// foreground-focused input should supply.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionMap {
    data: Plane,
}

impl DecisionMap {
    pub fn new(data: Plane) -> Result<Self> {
        if !data
            .iter()
            .all(|v| v.is_finite() && (0.0..=1.0).contains(v))
        {
            return Err(DfpError::invalid(
                "decision map values must be finite and within [0, 1]",
            ));
        }
        Ok(DecisionMap { data })
    }

    pub fn from_mask(mask: &BinaryMask) -> DecisionMap {
        DecisionMap {
            data: mask.data().mapv(|v| v as f32),
        }
    }

    pub fn height(&self) -> usize {
        self.data.dim().0
    }

    pub fn width(&self) -> usize {
        self.data.dim().1
    }

    pub fn data(&self) -> &Plane {
        &self.data
    }

    pub fn is_binary(&self) -> bool {
        self.data.iter().all(|&v| v == 0.0 || v == 1.0)
    }

    /// Binarizes at a threshold (values strictly above become 1).
    pub fn binarize(&self, threshold: f32) -> BinaryMask {
        BinaryMask {
            data: self.data.mapv(|v| u8::from(v > threshold)),
        }
    }
}

/// Estimates the spread kernel relating two focus states of one scene.
///
/// Both planes are mean-subtracted and Tukey-windowed, transformed, and
/// divided as `H = I_b * conj(I_f) / (|I_f|^2 + eps)`; a Gaussian low-pass
/// tames the noisy high-frequency bins, the real part of the inverse
/// transform is cropped to `support` around the origin, negative taps are
/// clamped off and the result is normalized to unit sum.
///
/// # Errors
///
/// Degenerate (near-constant) inputs produce [`DfpError::DegenerateInput`];
/// mismatched shapes or a support exceeding the image produce the
/// corresponding argument errors.
pub fn estimate_spread_kernel(
    luma_fore: &Plane,
    luma_back: &Plane,
    cfg: &KernelEstConfig,
) -> Result<Kernel> {
    cfg.validate()?;
    let (h, w) = luma_fore.dim();
    if luma_back.dim() != (h, w) {
        return Err(DfpError::shape(format!(
            "luma planes differ: {:?} vs {:?}",
            luma_fore.dim(),
            luma_back.dim()
        )));
    }
    if cfg.support > h.min(w) {
        return Err(DfpError::invalid(format!(
            "kernel support {} exceeds image side {}",
            cfg.support,
            h.min(w)
        )));
    }
    if h < 16 || w < 16 {
        return Err(DfpError::invalid(format!(
            "kernel estimation needs at least 16x16 input, got {h}x{w}"
        )));
    }

    let windowed_f = windowed_zero_mean(luma_fore);
    let windowed_b = windowed_zero_mean(luma_back);

    let spec_f = fft2(&windowed_f);
    let spec_b = fft2(&windowed_b);

    let mean_power: f64 =
        spec_f.iter().map(|v| v.norm_sqr()).sum::<f64>() / (h * w) as f64;
    if mean_power < 1e-12 {
        return Err(DfpError::DegenerateInput(
            "foreground-focused plane has no contrast".into(),
        ));
    }
    let eps = cfg.epsilon * mean_power;

    // Frequency-domain Gaussian low-pass; see KernelEstConfig::lowpass_sigma.
    let sigma_f = cfg.lowpass_sigma / std::f64::consts::TAU;
    let mut ratio = Array2::from_elem((h, w), Complex::new(0.0, 0.0));
    for u in 0..h {
        for v in 0..w {
            let fu = signed_frequency(u, h);
            let fv = signed_frequency(v, w);
            let lowpass = (-(fu * fu + fv * fv) / (2.0 * sigma_f * sigma_f)).exp();
            let denom = spec_f[[u, v]].norm_sqr() + eps;
            ratio[[u, v]] = spec_b[[u, v]] * spec_f[[u, v]].conj() / denom * lowpass;
        }
    }

    let spatial = ifft2(&ratio);

    // The kernel sits at the origin of the circular output; gather the
    // support window across the wrap-around.
    let r = (cfg.support / 2) as isize;
    let mut taps = Array2::<f64>::zeros((cfg.support, cfg.support));
    for a in 0..cfg.support as isize {
        for b in 0..cfg.support as isize {
            let si = (a - r).rem_euclid(h as isize) as usize;
            let sj = (b - r).rem_euclid(w as isize) as usize;
            taps[[a as usize, b as usize]] = spatial[[si, sj]].re.max(0.0);
        }
    }
    let sum: f64 = taps.iter().sum();
    if sum < 1e-9 {
        return Err(DfpError::DegenerateInput(
            "estimated kernel has no positive mass".into(),
        ));
    }
    Kernel::new(taps.mapv(|v| (v / sum) as f32))
}

fn signed_frequency(index: usize, n: usize) -> f64 {
    let i = index as f64;
    let n = n as f64;
    if i <= n / 2.0 {
        i / n
    } else {
        (i - n) / n
    }
}

/// Subtracts the mean and applies a separable Tukey window (taper 0.25).
fn windowed_zero_mean(plane: &Plane) -> Array2<Complex<f64>> {
    let (h, w) = plane.dim();
    let mean: f64 = plane.iter().map(|&v| v as f64).sum::<f64>() / (h * w) as f64;
    let wh = tukey(h, 0.25);
    let ww = tukey(w, 0.25);
    Array2::from_shape_fn((h, w), |(i, j)| {
        Complex::new((plane[[i, j]] as f64 - mean) * wh[i] * ww[j], 0.0)
    })
}

fn tukey(n: usize, alpha: f64) -> Vec<f64> {
    if n == 1 {
        return vec![1.0];
    }
    let edge = alpha * (n as f64 - 1.0) / 2.0;
    (0..n)
        .map(|i| {
            let x = i as f64;
            let d = x.min(n as f64 - 1.0 - x);
            if d >= edge {
                1.0
            } else {
                0.5 * (1.0 + (std::f64::consts::PI * (d / edge - 1.0)).cos())
            }
        })
        .collect()
}

/// Convolves a luma plane with an estimated spread kernel (the "reblur").
pub fn reblur(luma: &Plane, kernel: &Kernel) -> Result<Plane> {
    convolve2d(&luma.view(), kernel)
}

/// Residual sharpness of a reblurred plane: the absolute difference to a
/// Gaussian-blurred copy (size `gaussian_size`, sigma `gaussian_size / 3`),
/// min-max normalized to `[0, 1]`.
pub fn sharpness_difference(reblurred: &Plane, gaussian_size: usize) -> Result<Plane> {
    if gaussian_size % 2 == 0 || gaussian_size < 3 {
        return Err(DfpError::invalid(format!(
            "gaussian_size must be odd and >= 3, got {gaussian_size}"
        )));
    }
    let g = gaussian_kernel(gaussian_size, gaussian_size as f64 / 3.0)?;
    let blurred = convolve2d(&reblurred.view(), &g)?;
    let mut s = Array2::zeros(reblurred.dim());
    for (out, (a, b)) in s.iter_mut().zip(reblurred.iter().zip(blurred.iter())) {
        *out = (a - b).abs();
    }
    let min = s.iter().cloned().fold(f32::INFINITY, f32::min);
    let max = s.iter().cloned().fold(f32::NEG_INFINITY, f32::max);
    if !(max - min > 1e-12) {
        return Err(DfpError::DegenerateInput(
            "sharpness difference is constant; cannot normalize".into(),
        ));
    }
    s.mapv_inplace(|v| (v - min) / (max - min));
    Ok(s)
}

/// Thresholds a normalized sharpness map: 1 where `s > t` (strictly).
pub fn segment_threshold(s: &Plane, t: f32) -> Result<BinaryMask> {
    if !t.is_finite() || !(0.0..=1.0).contains(&t) {
        return Err(DfpError::invalid(format!(
            "threshold must be in [0, 1], got {t}"
        )));
    }
    Ok(BinaryMask {
        data: s.mapv(|v| u8::from(v > t)),
    })
}

/// Morphological closing: dilation with a `dilate_size` square element
/// followed by erosion with an `erode_size` square element. The mask is
/// treated as lying on an infinite zero background.
pub fn morph_close(mask: &BinaryMask, dilate_size: usize, erode_size: usize) -> Result<BinaryMask> {
    for (name, v) in [("dilate_size", dilate_size), ("erode_size", erode_size)] {
        if v % 2 == 0 || v == 0 {
            return Err(DfpError::invalid(format!("{name} must be odd, got {v}")));
        }
    }
    let (h, w) = mask.data.dim();
    let rd = dilate_size / 2;
    let re = erode_size / 2;
    let pad = rd + re;

    // Embed in a zero border so the window operations match the behavior
    // on an infinite zero plane exactly.
    let mut field = Array2::<u8>::zeros((h + 2 * pad, w + 2 * pad));
    for i in 0..h {
        for j in 0..w {
            field[[i + pad, j + pad]] = mask.data[[i, j]];
        }
    }
    let dilated = window_apply(&field, rd, true);
    let eroded = window_apply(&dilated, re, false);
    let mut out = Array2::zeros((h, w));
    for i in 0..h {
        for j in 0..w {
            out[[i, j]] = eroded[[i + pad, j + pad]];
        }
    }
    Ok(BinaryMask { data: out })
}

/// Max (dilate) or min (erode) over a `(2r+1)`-square window; cells whose
/// window would leave the field keep their value only through the zero
/// border that the caller embedded.
fn window_apply(field: &Array2<u8>, r: usize, dilate: bool) -> Array2<u8> {
    let (h, w) = field.dim();
    let r = r as isize;
    let mut out = Array2::zeros((h, w));
    for i in 0..h as isize {
        for j in 0..w as isize {
            let mut acc: u8 = if dilate { 0 } else { 1 };
            'win: for a in -r..=r {
                for b in -r..=r {
                    let (y, x) = (i + a, j + b);
                    let v = if y < 0 || y >= h as isize || x < 0 || x >= w as isize {
                        0
                    } else {
                        field[[y as usize, x as usize]]
                    };
                    if dilate {
                        acc = acc.max(v);
                        if acc == 1 {
                            break 'win;
                        }
                    } else {
                        acc = acc.min(v);
                        if acc == 0 {
                            break 'win;
                        }
                    }
                }
            }
            out[[i as usize, j as usize]] = acc;
        }
    }
    out
}

/// Keeps only the largest 4-connected foreground component (ties resolved
/// by scan order) and, when `fill` is set, turns background components that
/// do not touch the image border into foreground.
pub fn largest_region_fill(mask: &BinaryMask, fill: bool) -> BinaryMask {
    let (h, w) = mask.data.dim();
    let labels = label_components(&mask.data, 1);
    let n_labels = labels.iter().filter_map(|&l| l).max().map_or(0, |m| m + 1);
    if n_labels == 0 {
        return mask.clone();
    }
    let mut sizes = vec![0usize; n_labels];
    for l in labels.iter().flatten() {
        sizes[*l] += 1;
    }
    let largest = sizes
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
        .map(|(i, _)| i)
        .unwrap();

    let mut out = Array2::<u8>::zeros((h, w));
    for i in 0..h {
        for j in 0..w {
            if labels[[i, j]] == Some(largest) {
                out[[i, j]] = 1;
            }
        }
    }

    if fill {
        let bg_labels = label_components(&out, 0);
        let n_bg = bg_labels
            .iter()
            .filter_map(|&l| l)
            .max()
            .map_or(0, |m| m + 1);
        let mut touches_border = vec![false; n_bg];
        for i in 0..h {
            for j in 0..w {
                if i == 0 || j == 0 || i == h - 1 || j == w - 1 {
                    if let Some(l) = bg_labels[[i, j]] {
                        touches_border[l] = true;
                    }
                }
            }
        }
        for i in 0..h {
            for j in 0..w {
                if let Some(l) = bg_labels[[i, j]] {
                    if !touches_border[l] {
                        out[[i, j]] = 1;
                    }
                }
            }
        }
    }
    BinaryMask { data: out }
}

/// 4-connected component labels of cells equal to `value`, in scan order.
fn label_components(data: &Array2<u8>, value: u8) -> Array2<Option<usize>> {
    let (h, w) = data.dim();
    let mut labels: Array2<Option<usize>> = Array2::from_elem((h, w), None);
    let mut next = 0usize;
    let mut stack = Vec::new();
    for i in 0..h {
        for j in 0..w {
            if data[[i, j]] != value || labels[[i, j]].is_some() {
                continue;
            }
            labels[[i, j]] = Some(next);
            stack.push((i, j));
            while let Some((y, x)) = stack.pop() {
                let mut visit = |ny: usize, nx: usize| {
                    if data[[ny, nx]] == value && labels[[ny, nx]].is_none() {
                        labels[[ny, nx]] = Some(next);
                        stack.push((ny, nx));
                    }
                };
                if y > 0 {
                    visit(y - 1, x);
                }
                if y + 1 < h {
                    visit(y + 1, x);
                }
                if x > 0 {
                    visit(y, x - 1);
                }
                if x + 1 < w {
                    visit(y, x + 1);
                }
            }
            next += 1;
        }
    }
    labels
}

/// Runs the full decision-map pipeline on a focus pair and returns the
/// foreground map (1 where the foreground-focused input is sharp).
///
/// If the pipeline collapses to an all-zero or all-one map, the inputs do
/// not support a split and an all-ones map is returned with a warning, so
/// fusion degrades to reproducing the foreground-focused input.
pub fn compute_decision_map(
    i_fore: &Image,
    i_back: &Image,
    params: &ReblurParams,
    est: &KernelEstConfig,
) -> Result<DecisionMap> {
    params.validate()?;
    if (i_fore.height(), i_fore.width()) != (i_back.height(), i_back.width()) {
        return Err(DfpError::shape(format!(
            "focus pair sizes differ: {}x{} vs {}x{}",
            i_fore.height(),
            i_fore.width(),
            i_back.height(),
            i_back.width()
        )));
    }
    let luma_f = luma_of(i_fore);
    let luma_b = luma_of(i_back);
    let kernel = estimate_spread_kernel(&luma_f, &luma_b, est)?;
    let reblurred = reblur(&luma_b, &kernel)?;
    let sharpness = sharpness_difference(&reblurred, params.gaussian_size)?;
    let thresholded = segment_threshold(&sharpness, params.threshold)?;
    let closed = morph_close(&thresholded, params.dilate_size, params.erode_size)?;
    let cleaned = largest_region_fill(&closed, params.fill);
    // The surviving region is where the background-focused image kept its
    // sharpness; the foreground map is its complement.
    let fore = cleaned.complement();
    if fore.all_zeros() || fore.all_ones() {
        log::warn!(
            "decision map degenerated to {}; falling back to all-ones foreground",
            if fore.all_zeros() { "all zeros" } else { "all ones" }
        );
        return DecisionMap::new(Array2::from_elem(
            (i_fore.height(), i_fore.width()),
            1.0f32,
        ));
    }
    Ok(DecisionMap::from_mask(&fore))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image_core::blur_image;
    use crate::synth::{left_half_mask, scene, split_focus_pair, test_scene, SceneOptions};
    use ndarray::arr2;

    #[test]
    fn estimates_gaussian_blur_between_focus_states() {
        let gt = test_scene(128, 128, 42).unwrap();
        let truth = gaussian_kernel(9, 2.0).unwrap();
        let blurred = blur_image(&gt, &truth).unwrap();
        let luma_sharp = crate::image_core::to_luma(&gt).unwrap();
        let luma_blur = crate::image_core::to_luma(&blurred).unwrap();
        let cfg = KernelEstConfig::default();
        let est = estimate_spread_kernel(&luma_sharp, &luma_blur, &cfg).unwrap();
        assert_eq!(est.size(), 21);
        assert!((est.tap_sum() - 1.0).abs() < 1e-6);
        let mut reference = Array2::<f32>::zeros((21, 21));
        for a in 0..9 {
            for b in 0..9 {
                reference[[a + 6, b + 6]] = truth.data()[[a, b]];
            }
        }
        let reference = Kernel::new(reference).unwrap();
        let rel = est.relative_l2(&reference).unwrap();
        assert!(rel <= 0.15, "relative L2 error {rel}");
    }

    #[test]
    fn identical_inputs_give_a_near_delta_kernel() {
        let gt = test_scene(64, 64, 5).unwrap();
        let luma = crate::image_core::to_luma(&gt).unwrap();
        let est =
            estimate_spread_kernel(&luma, &luma, &KernelEstConfig::default()).unwrap();
        let c = est.size() / 2;
        assert!(
            est.data()[[c, c]] > 0.5,
            "center tap {} should dominate",
            est.data()[[c, c]]
        );
    }

    #[test]
    fn flat_input_is_degenerate() {
        let flat = Array2::from_elem((64, 64), 0.5f32);
        let err = estimate_spread_kernel(&flat, &flat, &KernelEstConfig::default())
            .unwrap_err();
        assert!(matches!(err, DfpError::DegenerateInput(_)));
    }

    #[test]
    fn sharpness_difference_is_normalized_and_higher_on_sharp_side() {
        let gt = test_scene(64, 64, 9).unwrap();
        let luma = crate::image_core::to_luma(&gt).unwrap();
        let kernel = gaussian_kernel(9, 2.0).unwrap();
        let blurred = convolve2d(&luma.view(), &kernel).unwrap();
        // Left half sharp, right half blurred.
        let plane = Array2::from_shape_fn((64, 64), |(i, j)| {
            if j < 32 {
                luma[[i, j]]
            } else {
                blurred[[i, j]]
            }
        });
        let s = sharpness_difference(&plane, 5).unwrap();
        let min = s.iter().cloned().fold(f32::INFINITY, f32::min);
        let max = s.iter().cloned().fold(f32::NEG_INFINITY, f32::max);
        assert_eq!(min, 0.0);
        assert_eq!(max, 1.0);
        let mean_left: f32 = (0..64)
            .flat_map(|i| (4..28).map(move |j| (i, j)))
            .map(|(i, j)| s[[i, j]])
            .sum::<f32>()
            / (64.0 * 24.0);
        let mean_right: f32 = (0..64)
            .flat_map(|i| (36..60).map(move |j| (i, j)))
            .map(|(i, j)| s[[i, j]])
            .sum::<f32>()
            / (64.0 * 24.0);
        assert!(
            mean_left > 2.0 * mean_right,
            "sharp side {mean_left} vs blurred side {mean_right}"
        );
    }

    #[test]
    fn sharpness_difference_rejects_constant_planes() {
        let flat = Array2::from_elem((16, 16), 0.3f32);
        assert!(matches!(
            sharpness_difference(&flat, 5),
            Err(DfpError::DegenerateInput(_))
        ));
    }

    #[test]
    fn threshold_is_strict() {
        let s = arr2(&[[0.0f32, 0.5, 1.0]]);
        let d = segment_threshold(&s, 0.5).unwrap();
        assert_eq!(d.data()[[0, 0]], 0);
        assert_eq!(d.data()[[0, 1]], 0, "equal to threshold stays 0");
        assert_eq!(d.data()[[0, 2]], 1);
        assert!(segment_threshold(&s, 1.5).is_err());
    }

    #[test]
    fn closing_fills_an_interior_hole() {
        let mask = BinaryMask::from_fn(15, 15, |i, j| {
            let di = i as i32 - 7;
            let dj = j as i32 - 7;
            di * di + dj * dj <= 25 && !(i == 7 && j == 7)
        });
        assert_eq!(mask.data()[[7, 7]], 0);
        let closed = morph_close(&mask, 3, 3).unwrap();
        assert_eq!(closed.data()[[7, 7]], 1, "1-pixel hole must close");
    }

    #[test]
    fn closing_is_idempotent() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..20 {
            let mask = BinaryMask::from_fn(24, 24, |_, _| rng.random_range(0.0..1.0) < 0.4);
            let once = morph_close(&mask, 3, 3).unwrap();
            let twice = morph_close(&once, 3, 3).unwrap();
            assert_eq!(once, twice);
        }
    }

    #[test]
    fn dilation_grows_and_erosion_shrinks() {
        let mask = BinaryMask::from_fn(11, 11, |i, j| (4..7).contains(&i) && (4..7).contains(&j));
        let closed = morph_close(&mask, 5, 3).unwrap();
        assert!(closed.count_ones() > mask.count_ones());
        let opened_away = morph_close(&mask, 3, 5).unwrap();
        assert!(opened_away.count_ones() < mask.count_ones());
    }

    #[test]
    fn largest_region_keeps_the_bigger_component() {
        let mask = BinaryMask::from_fn(12, 12, |i, j| {
            (i < 2 && j < 5) || (i > 8 && j > 9) // 10 px vs 6 px
        });
        let kept = largest_region_fill(&mask, false);
        assert_eq!(kept.count_ones(), 10);
        assert_eq!(kept.data()[[0, 0]], 1);
        assert_eq!(kept.data()[[10, 11]], 0);
    }

    #[test]
    fn fill_closes_interior_background_but_not_border_background() {
        // A ring whose hole is interior; the outside touches the border.
        let mask = BinaryMask::from_fn(12, 12, |i, j| {
            (2..10).contains(&i) && (2..10).contains(&j) && !((4..8).contains(&i) && (4..8).contains(&j))
        });
        let filled = largest_region_fill(&mask, true);
        assert_eq!(filled.data()[[5, 5]], 1, "interior hole fills");
        assert_eq!(filled.data()[[0, 0]], 0, "border background survives");
        let unfilled = largest_region_fill(&mask, false);
        assert_eq!(unfilled.data()[[5, 5]], 0);
    }

    #[test]
    fn all_zero_mask_passes_through_fill() {
        let mask = BinaryMask::from_fn(8, 8, |_, _| false);
        let out = largest_region_fill(&mask, true);
        assert!(out.all_zeros());
    }

    #[test]
    fn split_pair_yields_foreground_map_on_the_left() {
        let opts = SceneOptions {
            center_guard: Some(5),
            ..SceneOptions::default()
        };
        let gt = scene(96, 96, 21, &opts).unwrap();
        let mask = left_half_mask(96, 96);
        let kernel = gaussian_kernel(13, 2.5).unwrap();
        let (fore, back) = split_focus_pair(&gt, &mask, &kernel).unwrap();
        let map = compute_decision_map(
            &fore,
            &back,
            &ReblurParams::default(),
            &KernelEstConfig { support: 15, ..KernelEstConfig::default() },
        )
        .unwrap();
        assert!(map.is_binary());
        let truth = BinaryMask::from_fn(96, 96, |_, j| j < 48);
        let iou = map.binarize(0.5).iou(&truth).unwrap();
        assert!(iou >= 0.8, "foreground IoU {iou}");
    }

    #[test]
    fn identical_pair_falls_back_to_all_ones() {
        let gt = test_scene(64, 64, 3).unwrap();
        let map = compute_decision_map(
            &gt,
            &gt,
            &ReblurParams::default(),
            &KernelEstConfig { support: 15, ..KernelEstConfig::default() },
        )
        .unwrap();
        assert!(map.data().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn decision_map_complement_partitions_the_frame() {
        let gt = test_scene(96, 96, 33).unwrap();
        let mask = left_half_mask(96, 96);
        let kernel = gaussian_kernel(13, 2.5).unwrap();
        let (fore, back) = split_focus_pair(&gt, &mask, &kernel).unwrap();
        let map = compute_decision_map(
            &fore,
            &back,
            &ReblurParams::default(),
            &KernelEstConfig { support: 15, ..KernelEstConfig::default() },
        )
        .unwrap();
        for &v in map.data().iter() {
            assert!(v == 0.0 || v == 1.0);
        }
    }
}
