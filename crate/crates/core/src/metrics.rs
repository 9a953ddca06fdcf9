//! MSE and PSNR between a cover and a stego image.

use std::fmt;

use crate::error::{Error, Result};
use crate::image_io::GrayImage;

/// Peak intensity for 8-bit images.
pub const C_MAX: f64 = 255.0;

/// Peak signal-to-noise ratio; identical images have no finite value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Psnr {
    Finite(f64),
    Infinite,
}

impl Psnr {
    pub fn from_mse(mse: f64) -> Self {
        if mse > 0.0 {
            Psnr::Finite(10.0 * (C_MAX * C_MAX / mse).log10())
        } else {
            Psnr::Infinite
        }
    }

    pub fn db(self) -> Option<f64> {
        match self {
            Psnr::Finite(v) => Some(v),
            Psnr::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Psnr::Infinite)
    }

    /// `f64::INFINITY` for the infinite marker; for ordering and averaging.
    pub fn as_f64(self) -> f64 {
        self.db().unwrap_or(f64::INFINITY)
    }
}

impl fmt::Display for Psnr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Psnr::Finite(v) => write!(f, "{v:.4} dB"),
            Psnr::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsnrReport {
    /// Exact sum of squared differences.
    pub squared_error_sum: u64,
    pub pixel_count: u64,
    pub mse: f64,
    pub psnr: Psnr,
    pub c_max: f64,
}

fn check_dims(a: &GrayImage, b: &GrayImage) -> Result<()> {
    if a.width() != b.width() || a.height() != b.height() {
        return Err(Error::DimensionMismatch(
            a.width(),
            a.height(),
            b.width(),
            b.height(),
        ));
    }
    Ok(())
}

fn squared_error_sum(a: &GrayImage, b: &GrayImage) -> u64 {
    a.pixels()
        .iter()
        .zip(b.pixels())
        .map(|(&x, &y)| {
            let d = u64::from(x.abs_diff(y));
            d * d
        })
        .sum()
}

pub fn mse(a: &GrayImage, b: &GrayImage) -> Result<f64> {
    Ok(psnr(a, b)?.mse)
}

pub fn psnr(a: &GrayImage, b: &GrayImage) -> Result<PsnrReport> {
    check_dims(a, b)?;
    let sum = squared_error_sum(a, b);
    let count = a.pixels().len() as u64;
    let mse = if count == 0 { 0.0 } else { sum as f64 / count as f64 };
    Ok(PsnrReport {
        squared_error_sum: sum,
        pixel_count: count,
        mse,
        psnr: Psnr::from_mse(mse),
        c_max: C_MAX,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn img(rows: &[[u8; 3]]) -> GrayImage {
        GrayImage::from_rows(rows).unwrap()
    }

    #[test]
    fn identical_images() {
        let a = img(&[[1, 2, 3], [4, 5, 6]]);
        let r = psnr(&a, &a).unwrap();
        assert_eq!(r.mse, 0.0);
        assert!(r.psnr.is_infinite());
        assert_eq!(r.psnr.to_string(), "inf");
    }

    #[test]
    fn worked_example_pair() {
        let cover = img(&[[30, 46, 31], [65, 75, 22], [35, 98, 59]]);
        let stego = img(&[[31, 46, 30], [65, 75, 23], [34, 98, 59]]);
        let r = psnr(&cover, &stego).unwrap();
        assert_eq!(r.squared_error_sum, 4);
        assert_eq!(r.mse, 4.0 / 9.0);
        let db = r.psnr.db().unwrap();
        assert!((db - 51.652_628_789_8).abs() < 1e-9, "{db}");
    }

    #[test]
    fn maximal_single_difference() {
        let a = GrayImage::new(1, 1, vec![0]).unwrap();
        let b = GrayImage::new(1, 1, vec![255]).unwrap();
        assert_eq!(mse(&a, &b).unwrap(), 65025.0);
        assert_eq!(psnr(&a, &b).unwrap().psnr, Psnr::Finite(0.0));
    }

    #[test]
    fn dimension_mismatch() {
        let a = GrayImage::new(2, 1, vec![0, 0]).unwrap();
        let b = GrayImage::new(1, 2, vec![0, 0]).unwrap();
        assert!(matches!(mse(&a, &b), Err(Error::DimensionMismatch(2, 1, 1, 2))));
    }

    #[test]
    fn symmetric_and_monotone() {
        let a = img(&[[10, 20, 30], [40, 50, 60]]);
        let mut b = a.clone();
        let mut last = 0.0;
        for i in 0..6 {
            b.pixels_mut()[i] ^= 0x5;
            let m = mse(&a, &b).unwrap();
            assert_eq!(m, mse(&b, &a).unwrap());
            assert!(m >= last);
            last = m;
        }
    }
}
