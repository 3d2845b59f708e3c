//! Image and histogram types, classical histogram equalization and LUT
//! application.
//!
//! Histograms carry real-valued counts so that optimized (continuous)
//! histograms flow through the same normalize/cumulate/map chain as the raw
//! integer histogram of an image.

use crate::error::{Error, Result};

/// Number of gray levels of an 8-bit image.
pub const LEVELS: usize = 256;

/// An 8-bit grayscale image stored row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl GrayImage {
    /// Wraps a row-major pixel buffer. The buffer length must equal
    /// `width * height`.
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        if width.checked_mul(height) != Some(pixels.len()) {
            return Err(Error::PixelCount {
                width,
                height,
                actual: pixels.len(),
            });
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Self {
        Self {
            width,
            height,
            pixels: vec![value; width * height],
        }
    }

    /// Builds an image by evaluating `f(x, y)` at every pixel.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> u8) -> Self {
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        Self {
            width,
            height,
            pixels,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn into_pixels(self) -> Vec<u8> {
        self.pixels
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }

    pub fn same_dimensions(&self, other: &GrayImage) -> bool {
        self.width == other.width && self.height == other.height
    }
}

/// A 256-bin histogram with non-negative real counts.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    counts: [f64; LEVELS],
}

impl Histogram {
    /// Accepts any vector of 256 finite, non-negative counts.
    pub fn new(counts: &[f64]) -> Result<Self> {
        let counts: [f64; LEVELS] = counts.try_into().map_err(|_| Error::LengthMismatch {
            expected: LEVELS,
            actual: counts.len(),
        })?;
        if let Some((bin, &value)) = counts
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return Err(Error::InvalidBin { bin, value });
        }
        Ok(Self { counts })
    }

    /// Clamps negative entries to zero. Non-finite entries are rejected.
    pub fn from_clamped(counts: &[f64]) -> Result<Self> {
        let clamped: Vec<f64> = counts.iter().map(|&v| if v < 0.0 { 0.0 } else { v }).collect();
        Self::new(&clamped)
    }

    /// Every bin holds `total / 256`.
    pub fn uniform(total: f64) -> Self {
        Self {
            counts: [total / LEVELS as f64; LEVELS],
        }
    }

    pub fn counts(&self) -> &[f64; LEVELS] {
        &self.counts
    }

    pub fn total(&self) -> f64 {
        self.counts.iter().sum()
    }
}

/// A normalized histogram: non-negative entries summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct Pdf {
    probs: [f64; LEVELS],
}

impl Pdf {
    pub fn probs(&self) -> &[f64; LEVELS] {
        &self.probs
    }
}

/// A monotone 8-bit intensity mapping.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lut {
    map: [u8; LEVELS],
}

impl Lut {
    /// Rejects mappings that are not non-decreasing.
    pub fn new(map: [u8; LEVELS]) -> Result<Self> {
        if let Some(i) = map.windows(2).position(|w| w[1] < w[0]) {
            return Err(Error::InvalidParameter(format!(
                "LUT decreases between entries {} and {}",
                i,
                i + 1
            )));
        }
        Ok(Self { map })
    }

    pub fn identity() -> Self {
        let mut map = [0u8; LEVELS];
        for (i, m) in map.iter_mut().enumerate() {
            *m = i as u8;
        }
        Self { map }
    }

    pub fn map(&self) -> &[u8; LEVELS] {
        &self.map
    }
}

pub fn compute_histogram(image: &GrayImage) -> Result<Histogram> {
    if image.is_empty() {
        return Err(Error::EmptyImage);
    }
    let mut tally = [0u64; LEVELS];
    for &p in image.pixels() {
        tally[p as usize] += 1;
    }
    let mut counts = [0.0; LEVELS];
    for (c, &t) in counts.iter_mut().zip(&tally) {
        *c = t as f64;
    }
    Ok(Histogram { counts })
}

pub fn normalize(hist: &Histogram) -> Result<Pdf> {
    let total = hist.total();
    if total.is_nan() || total <= 0.0 {
        return Err(Error::EmptyHistogram);
    }
    let mut probs = [0.0; LEVELS];
    for (p, &c) in probs.iter_mut().zip(hist.counts()) {
        *p = c / total;
    }
    Ok(Pdf { probs })
}

/// Running sum of the PDF: `c[n] = p[0] + ... + p[n]`.
pub fn cumulative(pdf: &Pdf) -> [f64; LEVELS] {
    let mut cdf = [0.0; LEVELS];
    let mut acc = 0.0;
    for (c, &p) in cdf.iter_mut().zip(pdf.probs()) {
        acc += p;
        *c = acc;
    }
    cdf
}

/// Classical equalization mapping `T[n] = floor(255 * c[n] + 0.5)`, clamped
/// to the 8-bit range.
pub fn he_lut(pdf: &Pdf) -> Lut {
    let cdf = cumulative(pdf);
    let scale = (LEVELS - 1) as f64;
    let mut map = [0u8; LEVELS];
    for (m, &c) in map.iter_mut().zip(&cdf) {
        *m = (scale * c + 0.5).floor().clamp(0.0, scale) as u8;
    }
    Lut { map }
}

pub fn apply_lut(image: &GrayImage, lut: &Lut) -> GrayImage {
    GrayImage {
        width: image.width,
        height: image.height,
        pixels: image.pixels.iter().map(|&p| lut.map[p as usize]).collect(),
    }
}

/// Classical histogram equalization of an image.
pub fn equalize(image: &GrayImage) -> Result<GrayImage> {
    let pdf = normalize(&compute_histogram(image)?)?;
    Ok(apply_lut(image, &he_lut(&pdf)))
}
