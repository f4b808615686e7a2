//! Shared domain types: rasters, presets, pipeline specs, and result records.

mod preset;
mod raster;
mod results;

pub use preset::*;
pub use raster::{quantize_u8, BinaryMask, GrayImage, Sample};
pub use results::*;
