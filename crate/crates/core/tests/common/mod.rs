#![allow(dead_code)]

use icso_enhance::GrayImage;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Normal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// 64x64 image whose intensities are normally distributed around a random
/// mid-gray with a small spread, like a faded scan.
pub fn low_contrast_image(seed: u64) -> GrayImage {
    let mut rng = rng(seed);
    let center = rng.random_range(90.0..160.0);
    let spread = rng.random_range(6.0..14.0);
    let dist = Normal::new(center, spread).unwrap();
    let pixels = (0..64 * 64)
        .map(|_| rng.sample::<f64, _>(dist).round().clamp(0.0, 255.0) as u8)
        .collect();
    GrayImage::new(64, 64, pixels).unwrap()
}

/// Uniformly random pixels within a random sub-range of gray levels.
pub fn random_image(rng: &mut ChaCha8Rng, width: usize, height: usize) -> GrayImage {
    let lo: u8 = rng.random_range(0..200);
    let hi: u8 = rng.random_range(lo..=255);
    let pixels = (0..width * height).map(|_| rng.random_range(lo..=hi)).collect();
    GrayImage::new(width, height, pixels).unwrap()
}

/// Prints one verdict line and returns whether the criterion held.
pub fn verdict(id: &str, description: &str, ok: bool, detail: impl std::fmt::Display) -> bool {
    let tag = if ok { "PASS" } else { "FAIL" };
    println!("[{tag}] {id}: {description} ({detail})");
    ok
}

pub fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid]
    } else {
        0.5 * (v[mid - 1] + v[mid])
    }
}
