//! Image quality measures: MSE, PSNR, Shannon entropy, mean intensity and
//! intensity variance.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::histogram::{compute_histogram, normalize, GrayImage, Pdf};

/// The measures reported for one enhanced image against its original.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSet {
    pub entropy_bits: f64,
    /// `+inf` when the images are identical; serialized as `"inf"`.
    #[serde(with = "crate::report::float_or_inf")]
    pub psnr_db: f64,
    pub mean_intensity: f64,
    pub variance: f64,
    pub mse: f64,
}

impl MetricSet {
    /// Metrics of `enhanced` with `original` as the PSNR reference.
    pub fn compute(original: &GrayImage, enhanced: &GrayImage) -> Result<Self> {
        let pdf = pdf_of(enhanced)?;
        let mse = mse(original, enhanced)?;
        Ok(Self {
            entropy_bits: entropy_of_pdf(&pdf),
            psnr_db: psnr_from_mse(mse),
            mean_intensity: mean_of_pdf(&pdf),
            variance: variance_of_pdf(&pdf),
            mse,
        })
    }
}

fn pdf_of(image: &GrayImage) -> Result<Pdf> {
    normalize(&compute_histogram(image)?)
}

fn check_dims(a: &GrayImage, b: &GrayImage) -> Result<()> {
    if !a.same_dimensions(b) {
        return Err(Error::DimensionMismatch(
            a.width(),
            a.height(),
            b.width(),
            b.height(),
        ));
    }
    Ok(())
}

pub fn mse(a: &GrayImage, b: &GrayImage) -> Result<f64> {
    check_dims(a, b)?;
    if a.is_empty() {
        return Err(Error::EmptyImage);
    }
    let sum: u64 = a
        .pixels()
        .iter()
        .zip(b.pixels())
        .map(|(&x, &y)| {
            let d = x as i64 - y as i64;
            (d * d) as u64
        })
        .sum();
    Ok(sum as f64 / a.len() as f64)
}

/// `20 log10(255 / sqrt(mse))`; infinite for `mse == 0`.
pub fn psnr_from_mse(mse: f64) -> f64 {
    if mse == 0.0 {
        f64::INFINITY
    } else {
        20.0 * (255.0 / mse.sqrt()).log10()
    }
}

pub fn psnr(a: &GrayImage, b: &GrayImage) -> Result<f64> {
    Ok(psnr_from_mse(mse(a, b)?))
}

fn entropy_of_pdf(pdf: &Pdf) -> f64 {
    let h: f64 = pdf
        .probs()
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum();
    // -0.0 for single-valued images
    h.max(0.0)
}

fn mean_of_pdf(pdf: &Pdf) -> f64 {
    pdf.probs()
        .iter()
        .enumerate()
        .map(|(z, &p)| z as f64 * p)
        .sum()
}

fn variance_of_pdf(pdf: &Pdf) -> f64 {
    let m = mean_of_pdf(pdf);
    pdf.probs()
        .iter()
        .enumerate()
        .map(|(z, &p)| (z as f64 - m).powi(2) * p)
        .sum()
}

/// Shannon entropy in bits of the intensity distribution.
pub fn entropy(image: &GrayImage) -> Result<f64> {
    Ok(entropy_of_pdf(&pdf_of(image)?))
}

pub fn mean_intensity(image: &GrayImage) -> Result<f64> {
    Ok(mean_of_pdf(&pdf_of(image)?))
}

/// Population variance of the intensities.
pub fn variance_intensity(image: &GrayImage) -> Result<f64> {
    Ok(variance_of_pdf(&pdf_of(image)?))
}
