use crate::error::{EchoError, Result};

/// Single-channel image with intensities normalized to `[0, 1]`, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<f64>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(EchoError::validation("image dimensions must be positive"));
        }
        if pixels.len() != width * height {
            return Err(EchoError::validation(format!(
                "pixel buffer has {} values, expected {}x{}",
                pixels.len(),
                width,
                height
            )));
        }
        if let Some(bad) = pixels.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(EchoError::validation(format!(
                "pixel value {bad} outside [0, 1]"
            )));
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    /// Builds an image from a buffer, clamping every value into `[0, 1]`.
    /// NaN becomes 0.
    pub fn from_clamped(width: usize, height: usize, mut pixels: Vec<f64>) -> Self {
        assert_eq!(pixels.len(), width * height, "pixel buffer length");
        for v in pixels.iter_mut() {
            *v = if v.is_nan() { 0.0 } else { v.clamp(0.0, 1.0) };
        }
        Self {
            width,
            height,
            pixels,
        }
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Self {
        Self::from_clamped(width, height, vec![value; width * height])
    }

    /// Maps 8-bit samples linearly onto `[0, 1]`.
    pub fn from_u8(width: usize, height: usize, data: &[u8]) -> Result<Self> {
        if data.len() != width * height {
            return Err(EchoError::validation(format!(
                "8-bit buffer has {} values, expected {}x{}",
                data.len(),
                width,
                height
            )));
        }
        Self::new(
            width,
            height,
            data.iter().map(|&v| f64::from(v) / 255.0).collect(),
        )
    }

    pub fn to_u8(&self) -> Vec<u8> {
        self.pixels.iter().map(|&v| quantize_u8(v)).collect()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.pixels[y * self.width + x]
    }

    pub fn into_pixels(self) -> Vec<f64> {
        self.pixels
    }

    /// Applies `f` to every pixel and clamps the result.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::from_clamped(
            self.width,
            self.height,
            self.pixels.iter().map(|&v| f(v)).collect(),
        )
    }
}

#[inline]
pub fn quantize_u8(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}

/// Binary raster over `{0, 1}`, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    values: Vec<u8>,
}

impl BinaryMask {
    pub fn new(width: usize, height: usize, values: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(EchoError::validation("mask dimensions must be positive"));
        }
        if values.len() != width * height {
            return Err(EchoError::validation(format!(
                "mask buffer has {} values, expected {}x{}",
                values.len(),
                width,
                height
            )));
        }
        if values.iter().any(|&v| v > 1) {
            return Err(EchoError::validation("mask values must be 0 or 1"));
        }
        Ok(Self {
            width,
            height,
            values,
        })
    }

    pub fn zeros(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            values: vec![0; width * height],
        }
    }

    pub fn ones(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            values: vec![1; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> bool) -> Self {
        let mut values = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                values.push(u8::from(f(x, y)));
            }
        }
        Self {
            width,
            height,
            values,
        }
    }

    /// Any nonzero byte counts as foreground (so `{0, 255}` PNG masks load directly).
    pub fn from_u8_nonzero(width: usize, height: usize, data: &[u8]) -> Result<Self> {
        Self::new(
            width,
            height,
            data.iter().map(|&v| u8::from(v != 0)).collect(),
        )
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn values(&self) -> &[u8] {
        &self.values
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.values[y * self.width + x] != 0
    }

    pub fn count(&self) -> usize {
        self.values.iter().filter(|&&v| v != 0).count()
    }

    pub fn is_empty(&self) -> bool {
        self.values.iter().all(|&v| v == 0)
    }

    pub fn to_u8_255(&self) -> Vec<u8> {
        self.values.iter().map(|&v| v * 255).collect()
    }
}

/// Image plus its supervision mask and, for echo-specific transforms, the fan sector.
#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub image: GrayImage,
    pub lv_mask: BinaryMask,
    pub fan_mask: Option<BinaryMask>,
}

impl Sample {
    pub fn new(image: GrayImage, lv_mask: BinaryMask, fan_mask: Option<BinaryMask>) -> Result<Self> {
        let dims = image.dims();
        if lv_mask.dims() != dims {
            return Err(EchoError::DimensionMismatch {
                left: dims,
                right: lv_mask.dims(),
            });
        }
        if let Some(fan) = &fan_mask {
            if fan.dims() != dims {
                return Err(EchoError::DimensionMismatch {
                    left: dims,
                    right: fan.dims(),
                });
            }
        }
        Ok(Self {
            image,
            lv_mask,
            fan_mask,
        })
    }

    /// Sample with an all-zero LV mask and no fan mask.
    pub fn from_image(image: GrayImage) -> Self {
        let (w, h) = image.dims();
        Self {
            image,
            lv_mask: BinaryMask::zeros(w, h),
            fan_mask: None,
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        self.image.dims()
    }

    pub fn with_image(&self, image: GrayImage) -> Self {
        debug_assert_eq!(image.dims(), self.dims());
        Self {
            image,
            lv_mask: self.lv_mask.clone(),
            fan_mask: self.fan_mask.clone(),
        }
    }
}
