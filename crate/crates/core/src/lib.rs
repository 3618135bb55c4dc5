//! Dataset-free multi-focus image fusion with joint super-resolution.
//!
//! Two partially focused photographs of the same scene are merged into a
//! single all-in-focus image, optionally at 2x or 4x the input resolution,
//! by optimizing a randomly initialized convolutional generator against the
//! inputs themselves.  No training data is involved: the structure of the
//! network acts as the image prior, and a handcrafted focus decision map
//! steers which input supplies each region.
//!
//! The pipeline is split into small modules:
//!
//! * [`image_core`] - image containers, color conversion, resampling,
//!   convolution and gradient primitives shared by everything else.
//! * [`doublereblur`] - spread-kernel estimation and the reblur-based
//!   focus decision map.
//! * [`autodiff`] / [`optim`] - a compact reverse-mode tape and Adam,
//!   sized for the handful of operations the generator needs.
//! * [`skipnet`] - the encoder/decoder generator with skip connections.
//! * [`losses`] - content, joint-gradient and gradient-limit terms.
//! * [`decision_embedding`] - optional refinement of the decision map by
//!   a second, single-channel generator.
//! * [`trainer`] - the per-image optimization loop for pairs and stacks.
//! * [`metrics`] - reference-free sharpness/information metrics and their
//!   relative-error variants.
//! * [`synth`] - procedural scenes and split-focus pair generation used by
//!   the tests and handy for demos.

pub mod autodiff;
pub mod decision_embedding;
pub mod doublereblur;
pub mod error;
mod fft;
pub mod image_core;
pub mod io;
pub mod losses;
pub mod metrics;
pub mod optim;
mod resample;
pub mod skipnet;
pub mod synth;
pub mod trainer;

pub use error::{DfpError, Result};
