//! Deterministic augmentation engine for echocardiography segmentation
//! datasets, plus the statistics used to compare augmentation strategies
//! across training and test datasets.
//!
//! ```
//! use echoaug::{registry::PresetRegistry, rng::RngStream, transforms, GrayImage, Sample};
//!
//! let preset = PresetRegistry::builtin().lookup_names("Affine", "H").unwrap();
//! let sample = Sample::from_image(GrayImage::filled(32, 32, 0.5));
//! let mut rng = RngStream::derive(7, 0, 0);
//! let out = transforms::apply(&sample, preset, &mut rng).unwrap();
//! assert_eq!(out.dims(), (32, 32));
//! ```

pub mod analysis;
pub mod cli;
pub mod error;
pub mod fan_mask;
pub mod imgops;
pub mod io;
pub mod metrics;
pub mod model;
pub mod pipeline;
pub mod registry;
pub mod rng;
pub mod transforms;

pub use error::{EchoError, Result};
pub use model::*;
