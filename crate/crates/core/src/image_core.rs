//! Image containers and the pixel-level primitives everything else builds on.
//!
//! Images are height x width x channel `f32` arrays with values in `[0, 1]`,
//! single planes are bare 2-D arrays (signed values allowed: gradient and
//! sharpness maps live here too), and convolution kernels carry their own
//! small wrapper so blur kernels can assert normalization where it matters.
//!
//! Boundary handling is reflection without edge repetition everywhere
//! (`[c b a | a b c | c b a]` becomes `[b c | a b c | b a]`, i.e. the edge
//! sample itself is not duplicated), matching the padding used inside the
//! generator network so that hand computations transfer between modules.

use ndarray::{Array2, Array3, ArrayView2, Axis};

use crate::error::{DfpError, Result};
pub use crate::resample::ResampleMethod;

/// Single-channel real-valued map. May be signed (Laplacian responses,
/// sharpness differences); fusion inputs and outputs restrict to `[0, 1]`.
pub type Plane = Array2<f32>;

/// H x W x C image with `C` in `{1, 3}` and finite values in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    data: Array3<f32>,
}

impl Image {
    /// Wraps raw data, validating the channel count and value range.
    pub fn new(data: Array3<f32>) -> Result<Self> {
        let (h, w, c) = data.dim();
        if c != 1 && c != 3 {
            return Err(DfpError::invalid(format!(
                "image must have 1 or 3 channels, got {c}"
            )));
        }
        if h == 0 || w == 0 {
            return Err(DfpError::invalid("image must be non-empty"));
        }
        if !data.iter().all(|v| v.is_finite() && (0.0..=1.0).contains(v)) {
            return Err(DfpError::invalid(
                "image values must be finite and within [0, 1]",
            ));
        }
        Ok(Image { data })
    }

    /// Wraps raw data after clamping every value into `[0, 1]`.
    /// Non-finite values are rejected rather than clamped: they always
    /// indicate an upstream bug.
    pub fn from_clamped(mut data: Array3<f32>) -> Result<Self> {
        if !data.iter().all(|v| v.is_finite()) {
            return Err(DfpError::invalid("image values must be finite"));
        }
        data.mapv_inplace(|v| v.clamp(0.0, 1.0));
        Image::new(data)
    }

    /// Builds a constant image.
    pub fn constant(height: usize, width: usize, channels: usize, value: f32) -> Result<Self> {
        Image::new(Array3::from_elem((height, width, channels), value))
    }

    /// Stacks single-channel planes into an image (1 or 3 planes).
    pub fn from_planes(planes: &[Plane]) -> Result<Self> {
        if planes.is_empty() || (planes.len() != 1 && planes.len() != 3) {
            return Err(DfpError::invalid(format!(
                "expected 1 or 3 planes, got {}",
                planes.len()
            )));
        }
        let (h, w) = planes[0].dim();
        if planes.iter().any(|p| p.dim() != (h, w)) {
            return Err(DfpError::shape("planes differ in size"));
        }
        let mut data = Array3::zeros((h, w, planes.len()));
        for (c, p) in planes.iter().enumerate() {
            data.index_axis_mut(Axis(2), c).assign(p);
        }
        Image::from_clamped(data)
    }

    pub fn height(&self) -> usize {
        self.data.dim().0
    }

    pub fn width(&self) -> usize {
        self.data.dim().1
    }

    pub fn channels(&self) -> usize {
        self.data.dim().2
    }

    pub fn data(&self) -> &Array3<f32> {
        &self.data
    }

    /// Copies out channel `c` as a plane.
    pub fn plane(&self, c: usize) -> Plane {
        self.data.index_axis(Axis(2), c).to_owned()
    }

    /// Pixelwise mean absolute difference to another image of equal shape.
    pub fn mean_abs_diff(&self, other: &Image) -> Result<f64> {
        if self.data.dim() != other.data.dim() {
            return Err(DfpError::shape(format!(
                "mean_abs_diff: {:?} vs {:?}",
                self.data.dim(),
                other.data.dim()
            )));
        }
        let sum: f64 = self
            .data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| (a - b).abs() as f64)
            .sum();
        Ok(sum / self.data.len() as f64)
    }
}

/// Square convolution kernel with finite taps.
///
/// Blur kernels (Gaussian, estimated spread kernels) are normalized to unit
/// sum; derivative kernels such as the Laplacian sum to zero, so the wrapper
/// itself only enforces finiteness and odd square shape.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    data: Array2<f32>,
}

impl Kernel {
    pub fn new(data: Array2<f32>) -> Result<Self> {
        let (kh, kw) = data.dim();
        if kh != kw || kh % 2 == 0 {
            return Err(DfpError::invalid(format!(
                "kernel must be odd and square, got {kh}x{kw}"
            )));
        }
        if !data.iter().all(|v| v.is_finite()) {
            return Err(DfpError::invalid("kernel taps must be finite"));
        }
        Ok(Kernel { data })
    }

    pub fn size(&self) -> usize {
        self.data.dim().0
    }

    pub fn data(&self) -> &Array2<f32> {
        &self.data
    }

    /// Sum of all taps (computed in f64).
    pub fn tap_sum(&self) -> f64 {
        self.data.iter().map(|&v| v as f64).sum()
    }

    /// Relative L2 distance to another kernel of the same size,
    /// `|a - b|_2 / |b|_2`.
    pub fn relative_l2(&self, reference: &Kernel) -> Result<f64> {
        if self.size() != reference.size() {
            return Err(DfpError::shape(format!(
                "kernel sizes differ: {} vs {}",
                self.size(),
                reference.size()
            )));
        }
        let mut num = 0.0f64;
        let mut den = 0.0f64;
        for (a, b) in self.data.iter().zip(reference.data.iter()) {
            num += (*a as f64 - *b as f64).powi(2);
            den += (*b as f64).powi(2);
        }
        if den == 0.0 {
            return Err(DfpError::DegenerateInput(
                "reference kernel is all zeros".into(),
            ));
        }
        Ok((num / den).sqrt())
    }
}

/// Mirrors an index into `[0, n)` without repeating the edge sample.
pub(crate) fn reflect_index(mut i: isize, n: usize) -> usize {
    let n = n as isize;
    if n == 1 {
        return 0;
    }
    // Period of the reflected signal is 2n - 2.
    loop {
        if i < 0 {
            i = -i;
        } else if i >= n {
            i = 2 * n - 2 - i;
        } else {
            return i as usize;
        }
    }
}

/// Reflect-pads a plane by `(top, bottom, left, right)` samples.
pub fn reflect_pad(plane: &ArrayView2<f32>, pad: [usize; 4]) -> Result<Plane> {
    let (h, w) = plane.dim();
    let [top, bottom, left, right] = pad;
    let max_v = top.max(bottom);
    let max_h = left.max(right);
    if (max_v > 0 && max_v > h - 1) || (max_h > 0 && max_h > w - 1) {
        return Err(DfpError::invalid(format!(
            "reflect pad {pad:?} too large for {h}x{w} plane"
        )));
    }
    let mut out = Array2::zeros((h + top + bottom, w + left + right));
    for i in 0..h + top + bottom {
        let si = reflect_index(i as isize - top as isize, h);
        for j in 0..w + left + right {
            let sj = reflect_index(j as isize - left as isize, w);
            out[[i, j]] = plane[[si, sj]];
        }
    }
    Ok(out)
}

/// BT.601 luma plane of a 3-channel image:
/// `0.299 R + 0.587 G + 0.114 B`.
pub fn to_luma(img: &Image) -> Result<Plane> {
    if img.channels() != 3 {
        return Err(DfpError::invalid(format!(
            "to_luma expects 3 channels, got {}",
            img.channels()
        )));
    }
    let d = img.data();
    Ok(Array2::from_shape_fn((img.height(), img.width()), |(i, j)| {
        0.299 * d[[i, j, 0]] + 0.587 * d[[i, j, 1]] + 0.114 * d[[i, j, 2]]
    }))
}

/// Luma plane regardless of channel count: the channel itself for
/// single-channel images, BT.601 for RGB.
pub(crate) fn luma_of(img: &Image) -> Plane {
    if img.channels() == 1 {
        img.plane(0)
    } else {
        to_luma(img).expect("3-channel image")
    }
}

/// 2-D convolution (kernel flipped, i.e. true convolution) with reflected
/// boundary. Output has the same size as the input. Accumulates in f64.
pub fn convolve2d(plane: &ArrayView2<f32>, kernel: &Kernel) -> Result<Plane> {
    let (h, w) = plane.dim();
    let k = kernel.size();
    let r = k / 2;
    let padded = reflect_pad(plane, [r, r, r, r])?;
    let kd = kernel.data();
    let mut out = Array2::zeros((h, w));
    for i in 0..h {
        for j in 0..w {
            let mut acc = 0.0f64;
            for a in 0..k {
                for b in 0..k {
                    // out[i, j] = sum_k kernel[a, b] * plane[i - (a - r), j - (b - r)]
                    let v = padded[[i + (k - 1 - a), j + (k - 1 - b)]];
                    acc += kd[[a, b]] as f64 * v as f64;
                }
            }
            out[[i, j]] = acc as f32;
        }
    }
    Ok(out)
}

/// Normalized Gaussian kernel of odd size (sum of taps is 1 within 1e-6).
pub fn gaussian_kernel(size: usize, sigma: f64) -> Result<Kernel> {
    if size % 2 == 0 || size == 0 {
        return Err(DfpError::invalid(format!(
            "gaussian kernel size must be odd, got {size}"
        )));
    }
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(DfpError::invalid(format!(
            "gaussian sigma must be positive, got {sigma}"
        )));
    }
    let r = (size / 2) as isize;
    let mut taps = Array2::<f64>::zeros((size, size));
    for a in -r..=r {
        for b in -r..=r {
            let d2 = (a * a + b * b) as f64;
            taps[[(a + r) as usize, (b + r) as usize]] = (-d2 / (2.0 * sigma * sigma)).exp();
        }
    }
    let sum: f64 = taps.iter().sum();
    Kernel::new(taps.mapv(|v| (v / sum) as f32))
}

/// Laplacian response with the 4-neighbor kernel
/// `[[0,1,0],[1,-4,1],[0,1,0]]` and reflected boundary.
pub fn laplacian_map(plane: &ArrayView2<f32>) -> Result<Plane> {
    let kernel = Kernel::new(ndarray::arr2(&[
        [0.0, 1.0, 0.0],
        [1.0, -4.0, 1.0],
        [0.0, 1.0, 0.0],
    ]))?;
    convolve2d(plane, &kernel)
}

/// Gaussian-blurs every channel of an image with the given kernel.
pub fn blur_image(img: &Image, kernel: &Kernel) -> Result<Image> {
    let mut planes = Vec::with_capacity(img.channels());
    for c in 0..img.channels() {
        planes.push(convolve2d(&img.plane(c).view(), kernel)?);
    }
    Image::from_planes(&planes)
}

/// Resamples an image by a positive scale factor with the given method.
///
/// The output is `(round(scale * H), round(scale * W))`; both products must
/// be integral (within 1e-9) and at least 4 samples per axis. Sampling is
/// corner-aligned, and downscaling widens the kernel support so the result
/// is antialiased.
pub fn resample(img: &Image, scale: f64, method: ResampleMethod) -> Result<Image> {
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(DfpError::invalid(format!("scale must be positive, got {scale}")));
    }
    let out_h = scaled_len(img.height(), scale)?;
    let out_w = scaled_len(img.width(), scale)?;
    if scale == 1.0 {
        return Ok(img.clone());
    }
    let rows = crate::resample::Resampler1d::new(img.height(), out_h, method);
    let cols = crate::resample::Resampler1d::new(img.width(), out_w, method);
    let mut planes = Vec::with_capacity(img.channels());
    for c in 0..img.channels() {
        let p = img.plane(c);
        planes.push(cols.apply_cols(&rows.apply_rows(&p.view()).view()));
    }
    Image::from_planes(&planes)
}

fn scaled_len(n: usize, scale: f64) -> Result<usize> {
    let exact = n as f64 * scale;
    let rounded = exact.round();
    if (exact - rounded).abs() > 1e-9 {
        return Err(DfpError::invalid(format!(
            "scale {scale} does not take {n} samples to an integer size"
        )));
    }
    if rounded < 4.0 {
        return Err(DfpError::invalid(format!(
            "resampled size {rounded} is below the 4-sample minimum"
        )));
    }
    Ok(rounded as usize)
}
