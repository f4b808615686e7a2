//! The 29 augmentation transforms and the dispatcher that applies a preset.
//!
//! A stage draws its gate first and its parameters second, all from the
//! stream it is given. A stage whose gate does not fire returns the input
//! unchanged.

pub mod echo;
pub mod geometric;
pub mod noise;
pub mod occlusion;
pub mod photometric;

use crate::error::{EchoError, Result};
use crate::model::{AugPreset, Interp, Params, Sample};
use crate::rng::RngStream;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ApplyOptions {
    /// Overrides the image interpolation of geometric transforms.
    /// Masks are always resampled with nearest neighbour.
    pub image_interp: Option<Interp>,
}

pub fn apply(sample: &Sample, preset: &AugPreset, rng: &mut RngStream) -> Result<Sample> {
    apply_with(sample, preset, rng, &ApplyOptions::default())
}

pub fn apply_with(sample: &Sample, preset: &AugPreset, rng: &mut RngStream, opts: &ApplyOptions) -> Result<Sample> {
    if preset.transform.requires_fan() && sample.fan_mask.is_none() {
        return Err(EchoError::FanMaskRequired {
            transform: preset.transform.name(),
        });
    }
    if !rng.gate(preset.probability) {
        return Ok(sample.clone());
    }
    apply_params(sample, &preset.params, rng, opts)
}

/// Applies the transform unconditionally (no gate draw).
pub fn apply_params(sample: &Sample, params: &Params, rng: &mut RngStream, opts: &ApplyOptions) -> Result<Sample> {
    use Params as P;
    let image_only = |img| Ok(sample.with_image(img));
    match params {
        P::HorizontalFlip(_) => Ok(geometric::horizontal_flip(sample)),
        P::Affine(p) => Ok(geometric::affine(sample, p, rng, opts)),
        P::ShiftScaleRotate(p) => Ok(geometric::shift_scale_rotate(sample, p, rng, opts)),
        P::Perspective(p) => Ok(geometric::perspective(sample, p, rng, opts)),
        P::ElasticTransform(p) => Ok(geometric::elastic_transform(sample, p, rng, opts)),
        P::GridDistortion(p) => Ok(geometric::grid_distortion(sample, p, rng, opts)),
        P::RandomResizedCrop(p) => Ok(geometric::random_resized_crop(sample, p, rng, opts)),
        P::CenterCrop(p) => geometric::center_crop(sample, p, opts),
        P::CropNonEmptyMaskIfExists(p) => geometric::crop_non_empty_mask(sample, p, rng, opts),

        P::RandomBrightnessContrast(p) => image_only(photometric::random_brightness_contrast(&sample.image, p, rng)),
        P::RandomGamma(p) => image_only(photometric::random_gamma(&sample.image, p, rng)),
        P::Clahe(p) => image_only(photometric::clahe(&sample.image, p.clip_limit, p.tile_grid)),
        P::ColorJitter(p) => image_only(photometric::color_jitter(&sample.image, p, rng)),
        P::Sharpen(p) => image_only(photometric::sharpen(&sample.image, p, rng)),
        P::UnsharpMask(p) => image_only(photometric::unsharp_mask(&sample.image, p, rng)),
        P::IntensityWindowing(p) => image_only(photometric::intensity_windowing(&sample.image, p, rng)),

        P::GaussNoise(p) => image_only(noise::gauss_noise(&sample.image, p, rng)),
        P::MultiplicativeNoise(p) => image_only(noise::multiplicative_noise(&sample.image, p, rng)),
        P::SaltAndPepper(p) => image_only(noise::salt_and_pepper(sample, p, rng)),
        P::GaussianBlur(p) => image_only(noise::gaussian_blur(&sample.image, p, rng)),
        P::MotionBlur(p) => image_only(noise::motion_blur(&sample.image, p, rng)),
        P::Downscale(p) => image_only(noise::downscale(&sample.image, p, rng)),
        P::ImageCompression(p) => image_only(noise::image_compression(&sample.image, p, rng)),
        P::SpeckleReduction(p) => image_only(noise::speckle_reduction(sample, p)?),

        P::CoarseDropout(p) => image_only(occlusion::coarse_dropout(&sample.image, p, rng)),
        P::RandomErasing(p) => image_only(occlusion::random_erasing(&sample.image, p, rng)),

        P::DepthAttenuation(p) => image_only(echo::depth_attenuation(sample, p, rng)?),
        P::GaussianShadow(p) => image_only(echo::gaussian_shadow(sample, p, rng)?),
        P::HazeArtifact(p) => image_only(echo::haze_artifact(sample, p, rng)?),
    }
}
