use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{EchoError, Result};

/// The five transform families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TransformGroup {
    Photometric,
    NoiseQuality,
    Geometric,
    Occlusion,
    EchoSpecific,
}

macro_rules! transform_kinds {
    ($($variant:ident => $name:literal, $group:ident;)*) => {
        /// The 29 benchmarked augmentation transforms.
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
        pub enum TransformKind {
            $($variant,)*
        }

        impl TransformKind {
            pub const ALL: [TransformKind; 29] = [$(TransformKind::$variant,)*];

            pub fn name(self) -> &'static str {
                match self {
                    $(TransformKind::$variant => $name,)*
                }
            }

            pub fn group(self) -> TransformGroup {
                match self {
                    $(TransformKind::$variant => TransformGroup::$group,)*
                }
            }
        }
    };
}

transform_kinds! {
    Affine => "Affine", Geometric;
    CenterCrop => "CenterCrop", Geometric;
    CropNonEmptyMaskIfExists => "CropNonEmptyMaskIfExists", Geometric;
    ElasticTransform => "ElasticTransform", Geometric;
    GridDistortion => "GridDistortion", Geometric;
    HorizontalFlip => "HorizontalFlip", Geometric;
    Perspective => "Perspective", Geometric;
    RandomResizedCrop => "RandomResizedCrop", Geometric;
    ShiftScaleRotate => "ShiftScaleRotate", Geometric;
    Clahe => "CLAHE", Photometric;
    ColorJitter => "ColorJitter", Photometric;
    IntensityWindowing => "IntensityWindowing", Photometric;
    RandomBrightnessContrast => "RandomBrightnessContrast", Photometric;
    RandomGamma => "RandomGamma", Photometric;
    Sharpen => "Sharpen", Photometric;
    UnsharpMask => "UnsharpMask", Photometric;
    Downscale => "Downscale", NoiseQuality;
    GaussNoise => "GaussNoise", NoiseQuality;
    GaussianBlur => "GaussianBlur", NoiseQuality;
    ImageCompression => "ImageCompression", NoiseQuality;
    MotionBlur => "MotionBlur", NoiseQuality;
    MultiplicativeNoise => "MultiplicativeNoise", NoiseQuality;
    SaltAndPepper => "SaltAndPepper", NoiseQuality;
    SpeckleReduction => "SpeckleReduction", NoiseQuality;
    CoarseDropout => "CoarseDropout", Occlusion;
    RandomErasing => "RandomErasing", Occlusion;
    DepthAttenuation => "DepthAttenuation", EchoSpecific;
    GaussianShadow => "GaussianShadow", EchoSpecific;
    HazeArtifact => "HazeArtifact", EchoSpecific;
}

impl TransformKind {
    /// Geometric transforms move pixels and must co-transform the masks.
    pub fn is_geometric(self) -> bool {
        self.group() == TransformGroup::Geometric
    }

    /// Transforms that only make sense inside the ultrasound sector.
    pub fn requires_fan(self) -> bool {
        matches!(
            self,
            TransformKind::DepthAttenuation
                | TransformKind::GaussianShadow
                | TransformKind::HazeArtifact
                | TransformKind::SpeckleReduction
        )
    }
}

impl fmt::Display for TransformKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl PartialOrd for TransformKind {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Lexicographic by display name.
impl Ord for TransformKind {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.name().cmp(other.name())
    }
}

fn squash(s: &str) -> String {
    s.chars()
        .filter(|c| c.is_ascii_alphanumeric())
        .map(|c| c.to_ascii_lowercase())
        .collect()
}

impl FromStr for TransformKind {
    type Err = EchoError;

    /// Accepts canonical names plus the spellings used in published result tables
    /// (`RandomHorizontalFlip`, `saltandpepper`, ...). Case and punctuation are ignored.
    fn from_str(s: &str) -> Result<Self> {
        let key = squash(s);
        let alias = match key.as_str() {
            "randomhorizontalflip" | "hflip" | "flip" => Some(TransformKind::HorizontalFlip),
            "saltpepper" | "spnoise" | "saltandpepperonmask" => Some(TransformKind::SaltAndPepper),
            "cropnonemptymask" => Some(TransformKind::CropNonEmptyMaskIfExists),
            _ => None,
        };
        if let Some(kind) = alias {
            return Ok(kind);
        }
        TransformKind::ALL
            .iter()
            .copied()
            .find(|k| squash(k.name()) == key)
            .ok_or_else(|| EchoError::validation(format!("unknown transform '{s}'")))
    }
}

/// Preset code. Opaque label; ordering is lexicographic on the code string.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Setting {
    L,
    H,
    C1,
    C2,
    C3,
    CH,
}

impl Setting {
    pub const ALL: [Setting; 6] = [
        Setting::L,
        Setting::H,
        Setting::C1,
        Setting::C2,
        Setting::C3,
        Setting::CH,
    ];

    pub fn code(self) -> &'static str {
        match self {
            Setting::L => "L",
            Setting::H => "H",
            Setting::C1 => "C1",
            Setting::C2 => "C2",
            Setting::C3 => "C3",
            Setting::CH => "CH",
        }
    }
}

impl PartialOrd for Setting {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Setting {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.code().cmp(other.code())
    }
}

impl fmt::Display for Setting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Setting {
    type Err = EchoError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "L" => Ok(Setting::L),
            "H" | "H1" => Ok(Setting::H),
            "C1" => Ok(Setting::C1),
            "C2" => Ok(Setting::C2),
            "C3" => Ok(Setting::C3),
            "CH" | "HARSH" => Ok(Setting::CH),
            _ => Err(EchoError::validation(format!("unknown setting code '{s}'"))),
        }
    }
}

/// (transform, setting) pair identifying one registry entry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PresetId {
    pub transform: TransformKind,
    pub setting: Setting,
}

impl PresetId {
    pub fn new(transform: TransformKind, setting: Setting) -> Self {
        Self { transform, setting }
    }

    pub fn parse(transform: &str, setting: &str) -> Result<Self> {
        Ok(Self::new(transform.parse()?, setting.parse()?))
    }
}

impl fmt::Display for PresetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.transform, self.setting)
    }
}

/// Closed real interval `[lo, hi]`, serialized as a two-element array.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Range(pub f64, pub f64);

impl Range {
    pub fn fixed(v: f64) -> Self {
        Range(v, v)
    }

    pub fn symmetric(limit: f64) -> Self {
        Range(-limit.abs(), limit.abs())
    }

    pub fn lo(&self) -> f64 {
        self.0
    }

    pub fn hi(&self) -> f64 {
        self.1
    }

    pub fn is_valid(&self) -> bool {
        self.0.is_finite() && self.1.is_finite() && self.0 <= self.1
    }

    pub fn contains(&self, v: f64) -> bool {
        v >= self.0 && v <= self.1
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.0 + self.1)
    }
}

/// Inclusive integer interval (kernel sizes, hole counts, quality).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntRange(pub u32, pub u32);

impl IntRange {
    pub fn is_valid(&self) -> bool {
        self.0 <= self.1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Interp {
    Nearest,
    Linear,
    /// Requested by some presets for remapping; remaps sample it bilinearly.
    Area,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Border {
    Constant,
    Replicate,
    Reflect101,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum EraseFill {
    Constant(f64),
    Random,
}

#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct FlipParams {}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineParams {
    /// Degrees.
    pub rotate: Range,
    /// Fraction of the image side, per axis.
    pub translate: Range,
    pub scale: Range,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShiftScaleRotateParams {
    pub shift_limit: f64,
    pub scale_limit: f64,
    /// Degrees.
    pub rotate_limit: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerspectiveParams {
    /// Corner jitter standard deviation as a fraction of the side.
    pub scale: Range,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ElasticParams {
    pub alpha: f64,
    pub sigma: f64,
    /// Pixels of jitter applied to the affine control points.
    pub alpha_affine: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridDistortionParams {
    pub num_steps: u32,
    pub distort_limit: Range,
    pub normalized: bool,
    pub interpolation: Interp,
    pub border: Border,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResizedCropParams {
    pub scale: Range,
    pub ratio: Range,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CropParams {
    pub height: u32,
    pub width: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BrightnessContrastParams {
    pub brightness: Range,
    pub contrast: Range,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaParams {
    /// Percent; 100 is the identity.
    pub gamma: Range,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClaheParams {
    pub clip_limit: f64,
    /// (rows, columns)
    pub tile_grid: (u32, u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ColorJitterParams {
    pub brightness: f64,
    pub contrast: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SharpenParams {
    pub alpha: Range,
    pub lightness: Range,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnsharpParams {
    pub blur_limit: IntRange,
    /// A draw of 0 derives sigma from the kernel size.
    pub sigma: Range,
    pub alpha: Range,
    /// Normalized intensity units.
    pub threshold: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowingParams {
    pub center: Range,
    pub width: Range,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussNoiseParams {
    /// Noise variance in normalized units (8-bit variance / 255^2).
    pub variance: Range,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultiplicativeNoiseParams {
    pub multiplier: Range,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SaltPepperParams {
    pub amount: Range,
    pub ratio: Range,
    /// Restrict hits to LV-mask pixels.
    pub within_mask: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianBlurParams {
    pub blur_limit: IntRange,
    pub sigma: Option<Range>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MotionBlurParams {
    pub blur_limit: IntRange,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DownscaleParams {
    pub scale: Range,
    pub downscale: Interp,
    pub upscale: Interp,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompressionParams {
    pub quality: IntRange,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BilateralParams {
    /// Pixels.
    pub sigma_spatial: f64,
    /// Normalized intensity units.
    pub sigma_color: f64,
    pub window_size: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoarseDropoutParams {
    pub holes: IntRange,
    /// Fraction of image height; pixel bounds are `int(fraction * H)`.
    pub height: Range,
    pub width: Range,
    pub fill: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErasingParams {
    pub scale: Range,
    pub ratio: Range,
    pub fill: EraseFill,
    /// The eraser's own probability, drawn after the preset gate fires.
    pub inner_probability: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DepthAttenuationParams {
    pub rate: Range,
    /// Values above 1 are clipped to 1 when applied.
    pub max_attenuation: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShadowParams {
    pub strength: Range,
    /// Fraction of image width.
    pub sigma_x: Range,
    /// Fraction of image height.
    pub sigma_y: Range,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HazeParams {
    /// Normalized depth of the haze band.
    pub radius: Range,
    pub sigma: Range,
    pub amplitude: f64,
}

/// Transform-specific parameter record.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Params {
    Affine(AffineParams),
    CenterCrop(CropParams),
    CropNonEmptyMaskIfExists(CropParams),
    ElasticTransform(ElasticParams),
    GridDistortion(GridDistortionParams),
    HorizontalFlip(FlipParams),
    Perspective(PerspectiveParams),
    RandomResizedCrop(ResizedCropParams),
    ShiftScaleRotate(ShiftScaleRotateParams),
    Clahe(ClaheParams),
    ColorJitter(ColorJitterParams),
    IntensityWindowing(WindowingParams),
    RandomBrightnessContrast(BrightnessContrastParams),
    RandomGamma(GammaParams),
    Sharpen(SharpenParams),
    UnsharpMask(UnsharpParams),
    Downscale(DownscaleParams),
    GaussNoise(GaussNoiseParams),
    GaussianBlur(GaussianBlurParams),
    ImageCompression(CompressionParams),
    MotionBlur(MotionBlurParams),
    MultiplicativeNoise(MultiplicativeNoiseParams),
    SaltAndPepper(SaltPepperParams),
    SpeckleReduction(BilateralParams),
    CoarseDropout(CoarseDropoutParams),
    RandomErasing(ErasingParams),
    DepthAttenuation(DepthAttenuationParams),
    GaussianShadow(ShadowParams),
    HazeArtifact(HazeParams),
}

impl Params {
    pub fn kind(&self) -> TransformKind {
        use TransformKind as K;
        match self {
            Params::Affine(_) => K::Affine,
            Params::CenterCrop(_) => K::CenterCrop,
            Params::CropNonEmptyMaskIfExists(_) => K::CropNonEmptyMaskIfExists,
            Params::ElasticTransform(_) => K::ElasticTransform,
            Params::GridDistortion(_) => K::GridDistortion,
            Params::HorizontalFlip(_) => K::HorizontalFlip,
            Params::Perspective(_) => K::Perspective,
            Params::RandomResizedCrop(_) => K::RandomResizedCrop,
            Params::ShiftScaleRotate(_) => K::ShiftScaleRotate,
            Params::Clahe(_) => K::Clahe,
            Params::ColorJitter(_) => K::ColorJitter,
            Params::IntensityWindowing(_) => K::IntensityWindowing,
            Params::RandomBrightnessContrast(_) => K::RandomBrightnessContrast,
            Params::RandomGamma(_) => K::RandomGamma,
            Params::Sharpen(_) => K::Sharpen,
            Params::UnsharpMask(_) => K::UnsharpMask,
            Params::Downscale(_) => K::Downscale,
            Params::GaussNoise(_) => K::GaussNoise,
            Params::GaussianBlur(_) => K::GaussianBlur,
            Params::ImageCompression(_) => K::ImageCompression,
            Params::MotionBlur(_) => K::MotionBlur,
            Params::MultiplicativeNoise(_) => K::MultiplicativeNoise,
            Params::SaltAndPepper(_) => K::SaltAndPepper,
            Params::SpeckleReduction(_) => K::SpeckleReduction,
            Params::CoarseDropout(_) => K::CoarseDropout,
            Params::RandomErasing(_) => K::RandomErasing,
            Params::DepthAttenuation(_) => K::DepthAttenuation,
            Params::GaussianShadow(_) => K::GaussianShadow,
            Params::HazeArtifact(_) => K::HazeArtifact,
        }
    }

    /// Checks every range is ordered and every scalar is in its domain.
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(EchoError::validation(format!("{}: invalid {what}", self.kind())));
        let ranges: Vec<(&str, Range)> = match self {
            Params::Affine(p) => vec![("rotate", p.rotate), ("translate", p.translate), ("scale", p.scale)],
            Params::ShiftScaleRotate(p) => {
                if p.shift_limit < 0.0 || p.scale_limit < 0.0 || p.rotate_limit < 0.0 {
                    return bad("limit");
                }
                vec![]
            }
            Params::Perspective(p) => vec![("scale", p.scale)],
            Params::ElasticTransform(p) => {
                if p.alpha < 0.0 || p.sigma < 0.0 || p.alpha_affine < 0.0 {
                    return bad("alpha/sigma");
                }
                vec![]
            }
            Params::GridDistortion(p) => {
                if p.num_steps == 0 {
                    return bad("num_steps");
                }
                vec![("distort_limit", p.distort_limit)]
            }
            Params::RandomResizedCrop(p) => {
                if p.scale.lo() <= 0.0 || p.scale.hi() > 1.0 || p.ratio.lo() <= 0.0 {
                    return bad("scale/ratio");
                }
                vec![("scale", p.scale), ("ratio", p.ratio)]
            }
            Params::CenterCrop(p) | Params::CropNonEmptyMaskIfExists(p) => {
                if p.height == 0 || p.width == 0 {
                    return bad("crop size");
                }
                vec![]
            }
            Params::RandomBrightnessContrast(p) => vec![("brightness", p.brightness), ("contrast", p.contrast)],
            Params::RandomGamma(p) => {
                if p.gamma.lo() <= 0.0 {
                    return bad("gamma");
                }
                vec![("gamma", p.gamma)]
            }
            Params::Clahe(p) => {
                if p.clip_limit < 1.0 || p.tile_grid.0 == 0 || p.tile_grid.1 == 0 {
                    return bad("clip limit / tile grid");
                }
                vec![]
            }
            Params::ColorJitter(p) => {
                if p.brightness < 0.0 || p.contrast < 0.0 {
                    return bad("factor");
                }
                vec![]
            }
            Params::Sharpen(p) => vec![("alpha", p.alpha), ("lightness", p.lightness)],
            Params::UnsharpMask(p) => {
                if !p.blur_limit.is_valid() || p.threshold < 0.0 {
                    return bad("blur_limit/threshold");
                }
                vec![("sigma", p.sigma), ("alpha", p.alpha)]
            }
            Params::IntensityWindowing(p) => {
                if p.width.lo() <= 0.0 {
                    return bad("window width");
                }
                vec![("center", p.center), ("width", p.width)]
            }
            Params::GaussNoise(p) => {
                if p.variance.lo() < 0.0 {
                    return bad("variance");
                }
                vec![("variance", p.variance)]
            }
            Params::MultiplicativeNoise(p) => vec![("multiplier", p.multiplier)],
            Params::SaltAndPepper(p) => {
                if p.amount.lo() < 0.0 || p.amount.hi() > 1.0 || p.ratio.lo() < 0.0 || p.ratio.hi() > 1.0 {
                    return bad("amount/ratio");
                }
                vec![("amount", p.amount), ("ratio", p.ratio)]
            }
            Params::GaussianBlur(p) => {
                if !p.blur_limit.is_valid() {
                    return bad("blur_limit");
                }
                p.sigma.map(|s| vec![("sigma", s)]).unwrap_or_default()
            }
            Params::MotionBlur(p) => {
                if !p.blur_limit.is_valid() || p.blur_limit.1 == 0 {
                    return bad("blur_limit");
                }
                vec![]
            }
            Params::Downscale(p) => {
                if p.scale.lo() <= 0.0 || p.scale.hi() > 1.0 {
                    return bad("scale");
                }
                vec![("scale", p.scale)]
            }
            Params::ImageCompression(p) => {
                if !p.quality.is_valid() || p.quality.0 == 0 || p.quality.1 > 100 {
                    return bad("quality");
                }
                vec![]
            }
            Params::SpeckleReduction(p) => {
                if p.sigma_spatial <= 0.0 || p.sigma_color <= 0.0 || p.window_size == 0 {
                    return bad("bilateral parameters");
                }
                vec![]
            }
            Params::CoarseDropout(p) => {
                if !p.holes.is_valid() || !(0.0..=1.0).contains(&p.fill) {
                    return bad("holes/fill");
                }
                vec![("height", p.height), ("width", p.width)]
            }
            Params::RandomErasing(p) => {
                if !(0.0..=1.0).contains(&p.inner_probability) {
                    return bad("inner probability");
                }
                vec![("scale", p.scale), ("ratio", p.ratio)]
            }
            Params::DepthAttenuation(p) => {
                if p.max_attenuation < 0.0 || p.rate.lo() < 0.0 {
                    return bad("attenuation");
                }
                vec![("rate", p.rate)]
            }
            Params::GaussianShadow(p) => vec![("strength", p.strength), ("sigma_x", p.sigma_x), ("sigma_y", p.sigma_y)],
            Params::HazeArtifact(p) => vec![("radius", p.radius), ("sigma", p.sigma)],
            Params::HorizontalFlip(_) => vec![],
        };
        for (name, r) in ranges {
            if !r.is_valid() {
                return bad(name);
            }
        }
        Ok(())
    }
}

/// Named transform parameterization plus its application probability.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AugPreset {
    pub transform: TransformKind,
    pub setting: Setting,
    pub probability: f64,
    pub params: Params,
    /// Verbatim parameter string the preset was transcribed from.
    #[serde(default)]
    pub source: String,
}

impl AugPreset {
    pub fn new(setting: Setting, probability: f64, params: Params) -> Self {
        Self {
            transform: params.kind(),
            setting,
            probability,
            params,
            source: String::new(),
        }
    }

    pub fn id(&self) -> PresetId {
        PresetId::new(self.transform, self.setting)
    }

    pub fn with_probability(mut self, p: f64) -> Self {
        self.probability = p;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.params.kind() != self.transform {
            return Err(EchoError::validation(format!(
                "preset {} carries {} parameters",
                self.id(),
                self.params.kind()
            )));
        }
        if !(0.0..=1.0).contains(&self.probability) {
            return Err(EchoError::validation(format!(
                "preset {} probability {} outside [0, 1]",
                self.id(),
                self.probability
            )));
        }
        self.params.validate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transform_names_parse_with_aliases() {
        for kind in TransformKind::ALL {
            assert_eq!(kind.name().parse::<TransformKind>().unwrap(), kind);
        }
        assert_eq!("RandomHorizontalFlip".parse::<TransformKind>().unwrap(), TransformKind::HorizontalFlip);
        assert_eq!("saltandpepper".parse::<TransformKind>().unwrap(), TransformKind::SaltAndPepper);
        assert_eq!("salt-and-pepper".parse::<TransformKind>().unwrap(), TransformKind::SaltAndPepper);
        assert_eq!("clahe".parse::<TransformKind>().unwrap(), TransformKind::Clahe);
        assert!("VerticalFlip".parse::<TransformKind>().is_err());
    }

    #[test]
    fn setting_aliases() {
        assert_eq!("harsh".parse::<Setting>().unwrap(), Setting::CH);
        assert_eq!("H1".parse::<Setting>().unwrap(), Setting::H);
        assert!("Z".parse::<Setting>().is_err());
    }

    #[test]
    fn group_sizes() {
        let count = |g| TransformKind::ALL.iter().filter(|k| k.group() == g).count();
        assert_eq!(count(TransformGroup::Geometric), 9);
        assert_eq!(count(TransformGroup::Photometric), 7);
        assert_eq!(count(TransformGroup::NoiseQuality), 8);
        assert_eq!(count(TransformGroup::Occlusion), 2);
        assert_eq!(count(TransformGroup::EchoSpecific), 3);
    }

    #[test]
    fn preset_validation_catches_mismatch() {
        let mut p = AugPreset::new(Setting::L, 0.5, Params::HorizontalFlip(FlipParams {}));
        assert!(p.validate().is_ok());
        p.probability = 1.5;
        assert!(p.validate().is_err());
        p.probability = 0.5;
        p.transform = TransformKind::Affine;
        assert!(p.validate().is_err());
        let inverted = AugPreset::new(
            Setting::L,
            0.5,
            Params::RandomGamma(GammaParams { gamma: Range(120.0, 80.0) }),
        );
        assert!(inverted.validate().is_err());
    }
}
