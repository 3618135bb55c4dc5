//! PNG/JPEG loading and saving.
//!
//! Files decode to `f32` images in `[0, 1]` by dividing 8-bit samples by
//! 255. Grayscale files become single-channel images, everything else is
//! converted to RGB (an alpha channel, if present, is dropped). Saving
//! quantizes with round-half-up, so a load/save round trip of an 8-bit
//! image is lossless for PNG.

use std::path::Path;

use image::{DynamicImage, ImageBuffer, ImageReader, Luma, Rgb};
use ndarray::Array3;

use crate::error::{DfpError, Result};
use crate::image_core::Image;

/// Loads a PNG or JPEG file into an [`Image`].
pub fn load_image(path: &Path) -> Result<Image> {
    let reader = ImageReader::open(path).map_err(|e| {
        DfpError::invalid(format!("cannot open {}: {e}", path.display()))
    })?;
    let decoded = reader.decode()?;
    Ok(match decoded {
        DynamicImage::ImageLuma8(buf) => {
            let (w, h) = buf.dimensions();
            let data = Array3::from_shape_fn((h as usize, w as usize, 1), |(i, j, _)| {
                buf.get_pixel(j as u32, i as u32).0[0] as f32 / 255.0
            });
            Image::new(data)?
        }
        other => {
            let buf = other.to_rgb8();
            let (w, h) = buf.dimensions();
            let data = Array3::from_shape_fn((h as usize, w as usize, 3), |(i, j, c)| {
                buf.get_pixel(j as u32, i as u32).0[c] as f32 / 255.0
            });
            Image::new(data)?
        }
    })
}

/// Saves an [`Image`] as PNG or JPEG depending on the file extension.
pub fn save_image(img: &Image, path: &Path) -> Result<()> {
    let h = img.height() as u32;
    let w = img.width() as u32;
    match img.channels() {
        1 => {
            let buf = ImageBuffer::from_fn(w, h, |x, y| {
                Luma([quantize(img.data()[[y as usize, x as usize, 0]])])
            });
            buf.save(path)?;
        }
        3 => {
            let buf = ImageBuffer::from_fn(w, h, |x, y| {
                let px = |c: usize| quantize(img.data()[[y as usize, x as usize, c]]);
                Rgb([px(0), px(1), px(2)])
            });
            buf.save(path)?;
        }
        c => {
            return Err(DfpError::invalid(format!(
                "cannot encode {c}-channel image"
            )))
        }
    }
    Ok(())
}

/// Maps `[0, 1]` to an 8-bit sample with round-half-up.
pub fn quantize(v: f32) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}
