//! Compiled-in preset registry.
//!
//! Each entry carries the numeric parameters plus the parameter string it was
//! transcribed from. Values given on an 8-bit scale in the source strings are
//! converted to the normalized `[0, 1]` scale here, so transforms never see
//! 8-bit units.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{EchoError, Result};
use crate::model::*;

/// Haze amplitude used when a preset does not name one.
pub const DEFAULT_HAZE_AMPLITUDE: f64 = 0.3;

/// Albumentations' UnsharpMask default threshold, in 8-bit units.
const UNSHARP_DEFAULT_THRESHOLD_U8: f64 = 10.0;

/// Gate probability for presets whose source string omits one.
const DEFAULT_PROBABILITY: f64 = 0.5;

#[derive(Clone, Debug, PartialEq)]
pub struct PresetRegistry {
    presets: BTreeMap<PresetId, AugPreset>,
}

#[derive(Serialize, Deserialize)]
struct RegistryDocument {
    presets: Vec<AugPreset>,
}

impl PresetRegistry {
    /// Shared instance of the built-in registry.
    pub fn builtin() -> &'static PresetRegistry {
        static REGISTRY: OnceLock<PresetRegistry> = OnceLock::new();
        REGISTRY.get_or_init(load_preset_registry)
    }

    pub fn from_presets(presets: impl IntoIterator<Item = AugPreset>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for p in presets {
            p.validate()?;
            let id = p.id();
            if map.insert(id, p).is_some() {
                return Err(EchoError::validation(format!("duplicate preset {id}")));
            }
        }
        Ok(Self { presets: map })
    }

    pub fn get(&self, id: PresetId) -> Result<&AugPreset> {
        self.presets.get(&id).ok_or_else(|| EchoError::PresetNotFound {
            transform: id.transform.to_string(),
            setting: id.setting.to_string(),
        })
    }

    pub fn lookup(&self, transform: TransformKind, setting: Setting) -> Result<&AugPreset> {
        self.get(PresetId::new(transform, setting))
    }

    /// Resolves free-form names such as `("RandomHorizontalFlip", "L")`.
    pub fn lookup_names(&self, transform: &str, setting: &str) -> Result<&AugPreset> {
        let transform_kind: TransformKind = transform.parse()?;
        let setting_code: Setting = setting.parse().map_err(|_| EchoError::PresetNotFound {
            transform: transform_kind.to_string(),
            setting: setting.to_string(),
        })?;
        self.lookup(transform_kind, setting_code)
    }

    pub fn len(&self) -> usize {
        self.presets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.presets.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &AugPreset> {
        self.presets.values()
    }

    pub fn settings_for(&self, transform: TransformKind) -> Vec<Setting> {
        self.presets
            .keys()
            .filter(|id| id.transform == transform)
            .map(|id| id.setting)
            .collect()
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = RegistryDocument {
            presets: self.presets.values().cloned().collect(),
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: RegistryDocument = serde_json::from_str(text)?;
        Self::from_presets(doc.presets)
    }
}

fn entry(setting: Setting, probability: f64, params: Params, source: &str) -> AugPreset {
    AugPreset {
        source: source.to_string(),
        ..AugPreset::new(setting, probability, params)
    }
}

fn r(lo: f64, hi: f64) -> Range {
    Range(lo, hi)
}

fn affine(rot: f64, translate: f64, scale: (f64, f64)) -> Params {
    Params::Affine(AffineParams {
        rotate: Range::symmetric(rot),
        translate: Range::symmetric(translate),
        scale: r(scale.0, scale.1),
    })
}

fn clahe(clip_limit: f64, grid: u32) -> Params {
    Params::Clahe(ClaheParams { clip_limit, tile_grid: (grid, grid) })
}

fn jitter(v: f64) -> Params {
    Params::ColorJitter(ColorJitterParams { brightness: v, contrast: v })
}

fn elastic(alpha: f64, sigma: f64, alpha_affine: f64) -> Params {
    Params::ElasticTransform(ElasticParams { alpha, sigma, alpha_affine })
}

fn gauss_blur(lo: u32, hi: u32, sigma: Option<Range>) -> Params {
    Params::GaussianBlur(GaussianBlurParams { blur_limit: IntRange(lo, hi), sigma })
}

fn gauss_noise(lo_u8: f64, hi_u8: f64) -> Params {
    let scale = 255.0 * 255.0;
    Params::GaussNoise(GaussNoiseParams { variance: r(lo_u8 / scale, hi_u8 / scale) })
}

fn motion(lo: u32, hi: u32) -> Params {
    Params::MotionBlur(MotionBlurParams { blur_limit: IntRange(lo, hi) })
}

fn mult_noise(lo: f64, hi: f64) -> Params {
    Params::MultiplicativeNoise(MultiplicativeNoiseParams { multiplier: r(lo, hi) })
}

fn perspective(lo: f64, hi: f64) -> Params {
    Params::Perspective(PerspectiveParams { scale: r(lo, hi) })
}

fn brightness_contrast(brightness: Range, contrast: Range) -> Params {
    Params::RandomBrightnessContrast(BrightnessContrastParams { brightness, contrast })
}

fn gamma(lo: f64, hi: f64) -> Params {
    Params::RandomGamma(GammaParams { gamma: r(lo, hi) })
}

fn resized_crop(scale: (f64, f64), ratio: (f64, f64)) -> Params {
    Params::RandomResizedCrop(ResizedCropParams {
        scale: r(scale.0, scale.1),
        ratio: r(ratio.0, ratio.1),
    })
}

fn sharpen(alpha: (f64, f64), lightness: (f64, f64)) -> Params {
    Params::Sharpen(SharpenParams {
        alpha: r(alpha.0, alpha.1),
        lightness: r(lightness.0, lightness.1),
    })
}

fn ssr(shift: f64, scale: f64, rotate: f64) -> Params {
    Params::ShiftScaleRotate(ShiftScaleRotateParams {
        shift_limit: shift,
        scale_limit: scale,
        rotate_limit: rotate,
    })
}

fn crop(side: u32) -> CropParams {
    CropParams { height: side, width: side }
}

fn dropout(holes: (u32, u32), side: (f64, f64), fill: f64) -> Params {
    Params::CoarseDropout(CoarseDropoutParams {
        holes: IntRange(holes.0, holes.1),
        height: r(side.0, side.1),
        width: r(side.0, side.1),
        fill,
    })
}

fn downscale(lo: f64, hi: f64, interp: Interp) -> Params {
    Params::Downscale(DownscaleParams {
        scale: r(lo, hi),
        downscale: interp,
        upscale: interp,
    })
}

fn compression(lo: u32, hi: u32) -> Params {
    Params::ImageCompression(CompressionParams { quality: IntRange(lo, hi) })
}

fn windowing(center: (f64, f64), width: (f64, f64)) -> Params {
    Params::IntensityWindowing(WindowingParams {
        center: r(center.0, center.1),
        width: r(width.0, width.1),
    })
}

fn unsharp(blur: (u32, u32), sigma: Range, alpha: (f64, f64), threshold_u8: f64) -> Params {
    Params::UnsharpMask(UnsharpParams {
        blur_limit: IntRange(blur.0, blur.1),
        sigma,
        alpha: r(alpha.0, alpha.1),
        threshold: threshold_u8 / 255.0,
    })
}

fn grid(num_steps: u32, limit: Range, normalized: bool, interpolation: Interp, border: Border) -> Params {
    Params::GridDistortion(GridDistortionParams {
        num_steps,
        distort_limit: limit,
        normalized,
        interpolation,
        border,
    })
}

fn grid_default(num_steps: u32, limit: f64) -> Params {
    grid(num_steps, Range::symmetric(limit), false, Interp::Linear, Border::Reflect101)
}

fn erasing(scale: (f64, f64), ratio: (f64, f64), fill: EraseFill, inner: f64) -> Params {
    Params::RandomErasing(ErasingParams {
        scale: r(scale.0, scale.1),
        ratio: r(ratio.0, ratio.1),
        fill,
        inner_probability: inner,
    })
}

fn salt_pepper(amount: Range, ratio: Range, within_mask: bool) -> Params {
    Params::SaltAndPepper(SaltPepperParams { amount, ratio, within_mask })
}

fn attenuation(rate: Range, max_attenuation: f64) -> Params {
    Params::DepthAttenuation(DepthAttenuationParams { rate, max_attenuation })
}

fn shadow(strength: Range, sx: Range, sy: Range) -> Params {
    Params::GaussianShadow(ShadowParams { strength, sigma_x: sx, sigma_y: sy })
}

fn haze(radius: Range, sigma: Range) -> Params {
    Params::HazeArtifact(HazeParams { radius, sigma, amplitude: DEFAULT_HAZE_AMPLITUDE })
}

/// Builds the full registry of appendix presets.
pub fn load_preset_registry() -> PresetRegistry {
    use Setting::*;

    let flip = || Params::HorizontalFlip(FlipParams {});
    let auto_sigma = Range::fixed(0.0);
    let unsharp_t = UNSHARP_DEFAULT_THRESHOLD_U8;

    let presets = vec![
        // Geometric
        entry(L, 1.0, affine(15.0, 0.1, (0.7, 1.3)), "A.Affine(rotate=(-15, 15), translate_percent=(0.1, 0.1), scale=(0.7, 1.3), p=1.0)"),
        entry(H, 0.7, affine(30.0, 0.2, (0.6, 1.5)), "A.Affine(rotate=(-30, 30), translate_percent=(0.2, 0.2), scale=(0.6, 1.5), p=0.7)"),
        entry(C1, 0.85, affine(25.0, 0.15, (0.75, 1.35)), "A.Affine(rotate=(-25, 25), translate_percent=(0.15, 0.15), scale=(0.75, 1.35), p=0.85)"),
        entry(L, 1.0, Params::CenterCrop(crop(448)), "A.CenterCrop(448, 448, p=1.0)"),
        entry(H, 1.0, Params::CenterCrop(crop(384)), "A.CenterCrop(384, 384, p=1.0)"),
        entry(C1, 1.0, Params::CenterCrop(crop(480)), "A.CenterCrop(480, 480, p=1.0)"),
        entry(L, 1.0, Params::CropNonEmptyMaskIfExists(crop(448)), "A.CropNonEmptyMaskIfExists(height=448, width=448,p=1.0)"),
        entry(H, 1.0, Params::CropNonEmptyMaskIfExists(crop(384)), "H1: A.CropNonEmptyMaskIfExists(height=384, width=384, p=1.0)"),
        entry(C1, 0.7, Params::CropNonEmptyMaskIfExists(crop(480)), "A.CropNonEmptyMaskIfExists(height=480, width=480,p=0.7)"),
        entry(L, 0.15, elastic(5.0, 10.0, 2.0), "A.ElasticTransform(alpha=5.0, sigma=10.0, alpha_affine=2.0, p=0.15)"),
        entry(H, 0.25, elastic(30.0, 20.0, 10.0), "A.ElasticTransform( alpha=30.0, sigma=20.0, alpha_affine=10.0, p=0.25 )p=0.15)"),
        entry(C1, 0.15, elastic(7.5, 13.0, 2.0), "A.ElasticTransform( alpha=7.5, sigma=13.0, alpha_affine=2.0, p=0.15 )"),
        entry(L, 0.4, grid_default(5, 0.2), "A.GridDistortion(num_steps=5, distort_limit=0.2, p=0.4)"),
        entry(H, 0.6, grid_default(8, 0.35), "A.GridDistortion(num_steps=8, distort_limit=0.35, p=0.6)"),
        entry(C1, 0.35, grid_default(7, 0.25), "A.GridDistortion(num_steps=7, distort_limit=0.25,p=0.35)"),
        entry(C2, 0.55, grid_default(9, 0.38), "GridDistortion(num_steps=9, distort_limit=0.38, p=0.55)"),
        entry(
            C3,
            DEFAULT_PROBABILITY,
            grid(3, r(-0.4, 0.4), true, Interp::Area, Border::Replicate),
            "GridDistortion(num_steps=3, distort_limit=[-0.4, 0.4], interpolation=cv2.INTER_AREA, normalized=True, mask_interpolation=cv2.INTER_AREA, keypoint_remapping_method=\"mask\", border_mode=cv2.BORDER_REPLICATE, fill=0,  fill_mask=0)",
        ),
        entry(L, 0.5, flip(), "A.HorizontalFlip(p=0.5)"),
        entry(H, 0.75, flip(), "A.HorizontalFlip(p=0.75)"),
        entry(C1, 0.3, flip(), "A.HorizontalFlip(p=0.30)"),
        entry(L, 1.0, perspective(0.05, 0.1), "A.Perspective(scale=(0.05, 0.1), p=1.0)"),
        entry(H, 0.7, perspective(0.08, 0.20), "A.Perspective(scale=(0.08, 0.20), p=0.7)"),
        entry(C1, 0.6, perspective(0.07, 0.15), "A.Perspective(scale=(0.07, 0.15), p=0.6)"),
        entry(L, 1.0, resized_crop((0.9, 1.0), (0.95, 1.05)), "A.RandomResizedCrop(size=(512, 512), scale=(0.9, 1.0), ratio=(0.95, 1.05), p=1.0)"),
        entry(H, 0.7, resized_crop((0.6, 1.0), (0.8, 1.2)), "A.RandomResizedCrop(size=(512, 512), scale=(0.6, 1.0), ratio=(0.8, 1.2), p=0.7)"),
        entry(C1, 0.9, resized_crop((0.5, 0.9), (0.7, 1.3)), "A.RandomResizedCrop(size=(512, 512),scale=(0.50, 0.9),ratio=(0.7, 1.3),p=0.9)"),
        entry(L, 0.9, ssr(0.05, 0.10, 10.0), "A.ShiftScaleRotate( shift_limit=0.05, scale_limit=0.10, rotate_limit=10, border_mode=0,value=0, mask_value=0, p=0.9)"),
        entry(H, 0.7, ssr(0.15, 0.25, 30.0), "A.ShiftScaleRotate(shift_limit=0.15, scale_limit=0.25, rotate_limit=30, border_mode=0,value=0, mask_value=0, p=0.7)"),
        entry(C1, 0.6, ssr(0.25, 0.35, 35.0), "A.ShiftScaleRotate(shift_limit=0.25, scale_limit=0.35, rotate_limit=35, border_mode=0,value=0, mask_value=0, p=0.6)"),
        // Photometric
        entry(L, 0.2, clahe(2.0, 8), "A.CLAHE(clip_limit=2.0, tile_grid_size=(8, 8), p=0.2)"),
        entry(H, 0.4, clahe(4.0, 4), "A.CLAHE(clip_limit=4.0, tile_grid_size=(4, 4), p=0.4)"),
        entry(C1, 0.25, clahe(1.8, 8), "A.CLAHE(clip_limit=1.8, tile_grid_size=(8, 8), p=0.25)"),
        entry(L, 0.8, jitter(0.8), "ColorJitter(brightness=0.8, contrast=0.8, saturation=0.0, hue=0.0, p=0.8)"),
        entry(H, 0.8, jitter(1.0), "A.ColorJitter(brightness=1.0, contrast=1.0, saturation=0.0, hue=0.0, p=0.8))"),
        entry(C1, 0.35, jitter(1.5), "A.ColorJitter(brightness=1.5, contrast=1.5, saturation=0.0, hue=0.0, p=0.35)"),
        entry(C2, 0.5, jitter(0.2), "A.ColorJitter(brightness=0.2, contrast=0.2, saturation=0.0, hue=0.0, p=0.5)"),
        entry(L, 0.5, windowing((0.35, 0.65), (0.25, 0.55)), "IntensityWindowing( window_center=(0.35, 0.65),  window_width=(0.25,0.55),  p=0.5 )"),
        entry(H, 0.5, windowing((-0.20, 1.20), (0.08, 1.40)), "IntensityWindowing(window_center=(-0.20, 1.20),window_width=(0.08, 1.40),p=0.5)"),
        entry(C1, 0.15, windowing((0.48, 0.55), (0.38, 0.48)), "IntensityWindowing(window_center=(0.48,0.55), window_width=(0.38, 0.48),p=0.15)"),
        entry(L, 0.6, brightness_contrast(Range::symmetric(0.10), Range::symmetric(0.10)), "A.RandomBrightnessContrast(brightness_limit=0.10, contrast_limit=0.10, p=0.6)"),
        entry(H, 0.7, brightness_contrast(Range::symmetric(0.4), Range::symmetric(0.4)), "A.RandomBrightnessContrast(brightness_limit=0.4, contrast_limit=0.4, p=0.7)"),
        entry(
            C1,
            0.45,
            brightness_contrast(r(-0.25, 0.35), r(-0.08, 0.12)),
            "A.RandomBrightnessContrast(brightness_limit=(-0.25, 0.35), contrast_limit=(-0.08, 0.12),brightness_by_max=True, p=0.45)",
        ),
        entry(L, 0.4, gamma(80.0, 120.0), "A.RandomGamma(gamma_limit=(80, 120), p=0.4)"),
        entry(H, 0.5, gamma(40.0, 160.0), "A.RandomGamma(gamma_limit=(40, 160), p=0.5)"),
        entry(C1, 0.3, gamma(90.0, 110.0), "A.RandomGamma(gamma_limit=(90, 110), p=0.30)"),
        entry(L, 0.15, sharpen((0.05, 0.10), (1.0, 1.0)), "A.Sharpen(alpha=(0.05, 0.10), lightness=(1.0, 1.0), p=0.15)"),
        entry(H, 0.4, sharpen((0.15, 0.35), (0.8, 1.2)), "A.Sharpen(alpha=(0.15, 0.35), lightness=(0.8, 1.2), p=0.4)"),
        entry(C1, 0.25, sharpen((0.06, 0.12), (1.0, 1.0)), "A.Sharpen(alpha=(0.06, 0.12), lightness=(1.0, 1.0), p=0.25)"),
        entry(L, 0.2, unsharp((3, 5), auto_sigma, (0.10, 0.25), unsharp_t), "A.UnsharpMask(blur_limit=(3, 5), alpha=(0.10, 0.25),p=0.20)"),
        entry(H, 0.6, unsharp((5, 13), auto_sigma, (0.30, 0.70), unsharp_t), "A.UnsharpMask(blur_limit=(5, 13), alpha=(0.30, 0.70), p=0.60)"),
        entry(C1, 0.3, unsharp((3, 7), auto_sigma, (0.15, 0.40), unsharp_t), "A.UnsharpMask(blur_limit=(3,7), alpha=(0.15,0.40), p=0.30)"),
        entry(C2, 0.3, unsharp((3, 7), auto_sigma, (0.15, 0.40), unsharp_t), "A.UnsharpMask(blur_limit=(3,7), alpha=( 0.15,0.40), p=0.30)"),
        entry(
            CH,
            0.3,
            unsharp((11, 19), r(0.0, 10.0), (1.0, 1.0), 1.0),
            "A.UnsharpMask(blur_limit=(10,20), sigma_limit=10, alpha=(1,1), threshold=1, p=0.30)",
        ),
        // Noise and quality
        entry(L, 0.25, downscale(0.65, 0.85, Interp::Linear), "A.Downscale(scale_min=0.65, scale_max=0.85, interpolation=1, p=0.25)"),
        entry(H, 0.35, downscale(0.4, 0.8, Interp::Linear), "A.Downscale(scale_min=0.4, scale_max=0.8, interpolation=1, p=0.35)"),
        entry(C1, 0.45, downscale(0.5, 0.80, Interp::Linear), "A.Downscale(scale_min=0.5, scale_max=0.80, interpolation=1, p=0.45)"),
        entry(
            C2,
            DEFAULT_PROBABILITY,
            downscale(0.35, 0.6, Interp::Nearest),
            "A.Downscale(scale_range=[0.35, 0.6], interpolation_pair={\"upscale\":0,\"downscale\":0})",
        ),
        entry(L, 0.4, gauss_noise(5.0, 20.0), "A.GaussNoise(var_limit=(5.0, 20.0), p=0.4)"),
        entry(H, 0.5, gauss_noise(15.0, 50.0), "A.GaussNoise(var_limit=(15.0, 50.0), p=0.5)"),
        entry(C1, 0.35, gauss_noise(3.0, 15.0), "A.GaussNoise(var_limit=(3.0, 15.0), p=0.35, per_channel=False))"),
        entry(C2, 0.3, gauss_noise(0.001, 0.001), "A.GaussNoise(var_limit=(0.001, 0.001),  p=0.3)"),
        entry(L, 0.15, gauss_blur(3, 3, None), "A.GaussianBlur(blur_limit=(3, 3), p=0.15)"),
        entry(H, 0.35, gauss_blur(5, 9, None), "A.GaussianBlur(blur_limit=(5, 9), p=0.35)"),
        entry(C1, 0.15, gauss_blur(3, 5, Some(r(0.1, 0.6))), "A.GaussianBlur(blur_limit=(3, 5),sigma_limit=(0.1, 0.6), p=0.15)"),
        entry(L, 0.3, compression(40, 70), "A.ImageCompression(quality_lower=40, quality_upper=70,p=0.30)"),
        entry(H, 0.4, compression(10, 50), "A.ImageCompression(quality_lower=10, quality_upper=50, p=0.40)"),
        entry(C1, 0.35, compression(30, 80), "A.ImageCompression(quality_lower=30, quality_upper=80, p=0.35)"),
        entry(L, 0.2, motion(3, 3), "A.MotionBlur(blur_limit=3, p=0.2)"),
        entry(H, 0.4, motion(5, 10), "A.MotionBlur(blur_limit=(5, 10), p=0.4))"),
        entry(C1, 0.3, motion(3, 4), "A.MotionBlur(blur_limit=4, p=0.30)"),
        entry(L, 0.5, mult_noise(0.9, 1.1), "A.MultiplicativeNoise(multiplier=(0.9, 1.1), per_channel=False, p=0.5)"),
        entry(H, 0.6, mult_noise(0.8, 1.2), "A.MultiplicativeNoise(multiplier=(0.8, 1.2), per_channel=False, p=0.6)"),
        entry(C1, 0.7, mult_noise(0.70, 1.3), "A.MultiplicativeNoise(multiplier=(0.70, 1.3)), per_channel=False, p=0.7)"),
        entry(L, 0.25, salt_pepper(Range::fixed(0.003), Range::fixed(0.5), false), "_sp_noise_uint8(img, amount=0.003,ratio=0.5, p=0.25)"),
        entry(
            H,
            0.5,
            salt_pepper(r(0.008, 0.030), r(0.35, 0.65), false),
            "_sp_noise_uint8(img, amount=float(np.random.uniform(0.008, 0.030)), ratio=float(np.random.uniform(0.35, 0.65)), p=0.5)",
        ),
        entry(
            C1,
            0.2,
            salt_pepper(r(0.004, 0.012), r(0.45, 0.55), false),
            "_sp_noise_uint8(img, amount=float(np.random.uniform(0.004, 0.012)), ratio=float(np.random.uniform(0.45, 0.55)) , p=0.20)",
        ),
        entry(
            C2,
            0.2,
            salt_pepper(r(0.001, 0.004), r(0.48, 0.52), false),
            "_sp_noise_uint8(img, amount=float(np.random.uniform(0.001, 0.004)), ratio=float(np.random.uniform(0.48, 0.52)) , p=0.20)",
        ),
        entry(
            C3,
            1.0,
            salt_pepper(r(0.03, 0.06), r(0.48, 0.52), true),
            "SaltAndPepperOnMask(amount=(0.03, 0.06), ratio=(0.48, 0.52), p=1.0) {mask-based}",
        ),
        entry(
            C1,
            0.3,
            Params::SpeckleReduction(BilateralParams { sigma_spatial: 0.2, sigma_color: 0.2, window_size: 5 }),
            "SpeckleReduction(sigma_spatial=0.2, sigma_color=0.2, window_size=5, p=0.3)",
        ),
        // Occlusion
        entry(
            L,
            0.15,
            dropout((1, 2), (0.03, 0.08), 0.0),
            "A.CoarseDropout( max_holes=2, max_height=int(0.08*H),max_width=int(0.08*W), min_holes=1, min_height=int(0.03*H),min_width=int(0.03*W), fill_value=0, p=0.15 )",
        ),
        entry(
            H,
            0.25,
            dropout((2, 4), (0.05, 0.15), 0.0),
            "A.CoarseDropout(max_holes=4, max_height=int(0.15 * H), max_width=int(0.15 * W), min_holes=2, min_height=int(0.05 * H), min_width=int(0.05 * W), fill_value=0, p=0.25)",
        ),
        entry(
            C1,
            0.05,
            dropout((1, 1), (0.02, 0.04), 0.2),
            "A.CoarseDropout(max_holes=1, min_holes=1, min_height=int(0.02 * H), min_width=int(0.02 * W), max_height=int(0.04 * H), max_width=int(0.04 * W), fill_value=0.2, p=0.05)",
        ),
        entry(
            C2,
            0.15,
            dropout((1, 2), (0.03, 0.08), 0.0),
            "A.CLAHE(clip_limit=1.8, tile_grid_size=(8, 8), p=0.25) [caption misprint; parameters follow the L entry]",
        ),
        entry(
            L,
            0.25,
            erasing((0.02, 0.06), (0.6, 1.6), EraseFill::Constant(0.0), 1.0),
            "T.RandomErasing( p=1.0, scale=(0.02, 0.06), ratio=(0.6, 1.6), value=0.0, inplace=False, p=0.25)",
        ),
        entry(
            H,
            0.45,
            erasing((0.02, 0.06), (0.6, 1.6), EraseFill::Constant(0.0), 1.0),
            "T.RandomErasing( p=1.0, scale=(0.02, 0.06), ratio=(0.6, 1.6), value=0.0, inplace=False, p=0.45)",
        ),
        entry(
            C1,
            0.45,
            erasing((0.01, 0.07), (0.15, 4.5), EraseFill::Random, 0.30),
            "T.RandomErasing( p=0.30, scale=(0.01, 0.07), ratio=(0.15, 4.5), value=\"random\",inplace=False, p=0.45)",
        ),
        entry(
            C2,
            0.25,
            erasing((0.01, 0.08), (0.2, 3.0), EraseFill::Random, 0.35),
            "T.RandomErasing( p=0.35, scale=(0.01, 0.08), ratio=(0.2, 3.0), value=\"random\",inplace=False, p=0.25)",
        ),
        // Echo-specific
        entry(L, 0.3, attenuation(Range::fixed(1.0), 0.6), "DepthAttenuation(attenuation_rate=1.0,max_attenuation=0.6, p=0.3)"),
        entry(C1, 0.2, attenuation(r(0.25, 0.9), 0.08), "DepthAttenuation(attenuation_rate=(0.25, 0.9),max_attenuation=0.08, p=0.2)"),
        entry(C2, 0.3, attenuation(Range::fixed(1.0), 2.0), "DepthAttenuation(attenuation_rate=1,max_attenuation=2, p=0.3)"),
        entry(
            L,
            0.3,
            shadow(Range::fixed(0.2), Range::fixed(0.3), Range::fixed(0.3)),
            "GaussianShadow(strength=0.2, sigma_x=0.3,sigma_y=0.3, p=0.3)",
        ),
        entry(
            C1,
            0.1,
            shadow(r(0.12, 0.28), r(0.05, 0.12), r(0.05, 0.12)),
            "GaussianShadow(strength=(0.12, 0.28), sigma_x=(0.05, 0.12), sigma_y=(0.05, 0.12), p=0.1)",
        ),
        entry(L, 0.2, haze(Range::fixed(0.2), Range::fixed(0.2)), "HazeArtifact(radius=0.2, sigma=0.2,p=0.2)"),
        entry(C1, 0.15, haze(r(0.15, 0.45), r(0.03, 0.06)), "HazeArtifact(radius=(0.15, 0.45), sigma=(0.03, 0.06), p=0.15)"),
    ];

    PresetRegistry::from_presets(presets).expect("built-in registry is valid")
}
