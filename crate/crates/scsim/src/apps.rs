//! Desk-scale use cases: 2D image rotation with angle-error measurement and
//! two-link forward kinematics with positioning error.
//!
//! Both consume sine/cosine through a [`SinCosProvider`], so the stochastic
//! circuits and the double-precision path differ only in the two scalars.

use std::io::Read;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuits::{self, builtin_spec, CircuitConfig, FunctionId, Variant};
use crate::error::{Error, Result};

/// Row-major 8-bit grayscale image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::invalid("image dimensions must be positive"));
        }
        Ok(GrayImage {
            width,
            height,
            pixels: vec![0; width * height],
        })
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, v: u8) {
        self.pixels[y * self.width + x] = v;
    }

    /// Checkerboard test pattern.
    pub fn checkerboard(size: usize, cell: usize) -> Result<Self> {
        let mut img = GrayImage::new(size, size)?;
        for y in 0..size {
            for x in 0..size {
                let on = ((x / cell) + (y / cell)) % 2 == 0;
                img.set(x, y, if on { 230 } else { 25 });
            }
        }
        Ok(img)
    }

    /// Three filled corner squares on a light field, the classic finder
    /// geometry used to read off an image's rotation.
    pub fn corner_markers(size: usize) -> Result<Self> {
        let mut img = GrayImage::new(size, size)?;
        img.pixels.fill(220);
        let side = size / 4;
        let mut fill = |x0: usize, y0: usize| {
            for y in y0..y0 + side {
                for x in x0..x0 + side {
                    let border = x == x0 || x == x0 + side - 1 || y == y0 || y == y0 + side - 1;
                    img.pixels[y * size + x] = if border { 0 } else { 40 };
                }
            }
        };
        fill(0, 0);
        fill(size - side, 0);
        fill(0, size - side);
        Ok(img)
    }

    /// Mean absolute pixel difference against another image.
    pub fn mean_abs_diff(&self, other: &GrayImage) -> Result<f64> {
        if self.width != other.width || self.height != other.height {
            return Err(Error::invalid("image size mismatch"));
        }
        let total: u64 = self
            .pixels
            .iter()
            .zip(&other.pixels)
            .map(|(a, b)| (*a as i64 - *b as i64).unsigned_abs())
            .sum();
        Ok(total as f64 / self.pixels.len() as f64)
    }

    /// Peak signal-to-noise ratio in dB against another image.
    pub fn psnr(&self, other: &GrayImage) -> Result<f64> {
        if self.width != other.width || self.height != other.height {
            return Err(Error::invalid("image size mismatch"));
        }
        let mse: f64 = self
            .pixels
            .iter()
            .zip(&other.pixels)
            .map(|(a, b)| {
                let d = *a as f64 - *b as f64;
                d * d
            })
            .sum::<f64>()
            / self.pixels.len() as f64;
        if mse == 0.0 {
            return Ok(f64::INFINITY);
        }
        Ok(10.0 * (255.0 * 255.0 / mse).log10())
    }
}

/// Read a binary PGM (P5, maxval 255) image.
pub fn read_pgm(path: &Path) -> Result<GrayImage> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| Error::io(path.display().to_string(), e))?;
    parse_pgm(&bytes)
}

pub fn parse_pgm(bytes: &[u8]) -> Result<GrayImage> {
    let mut pos = 0usize;
    let mut token = || -> Result<String> {
        // skip whitespace and '#' comment lines
        loop {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < bytes.len() && bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
                continue;
            }
            break;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(Error::invalid("truncated PGM header"));
        }
        Ok(String::from_utf8_lossy(&bytes[start..pos]).into_owned())
    };
    if token()? != "P5" {
        return Err(Error::invalid("not a binary PGM (P5) file"));
    }
    let width: usize = token()?.parse().map_err(|_| Error::invalid("bad width"))?;
    let height: usize = token()?.parse().map_err(|_| Error::invalid("bad height"))?;
    let maxval: usize = token()?.parse().map_err(|_| Error::invalid("bad maxval"))?;
    if maxval != 255 {
        return Err(Error::invalid("only maxval 255 is supported"));
    }
    pos += 1; // single whitespace after maxval
    let need = width * height;
    if bytes.len() < pos + need {
        return Err(Error::invalid("truncated PGM pixel data"));
    }
    Ok(GrayImage {
        width,
        height,
        pixels: bytes[pos..pos + need].to_vec(),
    })
}

pub fn write_pgm(img: &GrayImage, path: &Path) -> Result<()> {
    let mut out = format!("P5\n{} {}\n255\n", img.width, img.height).into_bytes();
    out.extend_from_slice(&img.pixels);
    std::fs::write(path, out).map_err(|e| Error::io(path.display().to_string(), e))
}

/// Sine/cosine supplier for the geometry paths: exact doubles, or decoded
/// outputs of the stochastic circuits.
#[derive(Debug, Clone)]
pub enum SinCosProvider {
    Exact,
    Stochastic {
        variant: Variant,
        n: usize,
        sin: Box<CircuitConfig>,
        cos: Box<CircuitConfig>,
    },
}

impl SinCosProvider {
    pub fn exact() -> Self {
        SinCosProvider::Exact
    }

    pub fn stochastic(variant: Variant, n: usize) -> Result<Self> {
        Ok(SinCosProvider::Stochastic {
            variant,
            n,
            sin: Box::new(builtin_spec(FunctionId::Sin, variant, n)?),
            cos: Box::new(builtin_spec(FunctionId::Cos, variant, n)?),
        })
    }

    /// (sin a, cos a) for an angle in [0, 1] rad.
    pub fn sin_cos(&self, alpha: f64) -> Result<(f64, f64)> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::Domain(format!(
                "angle {alpha} outside the supported [0, 1] rad interval"
            )));
        }
        match self {
            SinCosProvider::Exact => Ok((alpha.sin(), alpha.cos())),
            SinCosProvider::Stochastic { n, sin, cos, .. } => {
                let x = (alpha * *n as f64).round() as u64;
                Ok((
                    circuits::eval_estimate(sin, x)?,
                    circuits::eval_estimate(cos, x)?,
                ))
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            SinCosProvider::Exact => "exact".into(),
            SinCosProvider::Stochastic { variant, n, .. } => format!("{variant}@N={n}"),
        }
    }
}

/// Inverse-mapping rotation about the image centre with nearest-neighbour
/// sampling; pixels that map outside the source are left at 0. Bilinear
/// sampling is available for comparison runs, where the interpolation
/// smoothing would otherwise mix into the trig error.
pub fn rotate_image(img: &GrayImage, alpha: f64, provider: &SinCosProvider) -> Result<GrayImage> {
    rotate_image_sampled(img, alpha, provider, false)
}

pub fn rotate_image_sampled(
    img: &GrayImage,
    alpha: f64,
    provider: &SinCosProvider,
    bilinear: bool,
) -> Result<GrayImage> {
    let (s, c) = provider.sin_cos(alpha)?;
    rotate_image_with_sincos(img, s, c, bilinear)
}

/// Rotation with explicit (sin, cos): two providers returning the same pair
/// produce bit-identical images.
pub fn rotate_image_with_sincos(
    img: &GrayImage,
    s: f64,
    c: f64,
    bilinear: bool,
) -> Result<GrayImage> {
    let mut out = GrayImage::new(img.width, img.height)?;
    let cx = (img.width as f64 - 1.0) / 2.0;
    let cy = (img.height as f64 - 1.0) / 2.0;
    for y in 0..img.height {
        for x in 0..img.width {
            let dx = x as f64 - cx;
            let dy = y as f64 - cy;
            // inverse mapping: rotate the destination point backwards
            let sx = c * dx + s * dy + cx;
            let sy = -s * dx + c * dy + cy;
            let v = if bilinear {
                sample_bilinear(img, sx, sy)
            } else {
                sample_nearest(img, sx, sy)
            };
            out.set(x, y, v);
        }
    }
    Ok(out)
}

fn sample_nearest(img: &GrayImage, sx: f64, sy: f64) -> u8 {
    let xi = sx.round();
    let yi = sy.round();
    if xi < 0.0 || yi < 0.0 || xi >= img.width as f64 || yi >= img.height as f64 {
        0
    } else {
        img.get(xi as usize, yi as usize)
    }
}

fn sample_bilinear(img: &GrayImage, sx: f64, sy: f64) -> u8 {
    if sx < 0.0 || sy < 0.0 || sx > (img.width - 1) as f64 || sy > (img.height - 1) as f64 {
        return 0;
    }
    let x0 = sx.floor() as usize;
    let y0 = sy.floor() as usize;
    let x1 = (x0 + 1).min(img.width - 1);
    let y1 = (y0 + 1).min(img.height - 1);
    let fx = sx - x0 as f64;
    let fy = sy - y0 as f64;
    let top = img.get(x0, y0) as f64 * (1.0 - fx) + img.get(x1, y0) as f64 * fx;
    let bottom = img.get(x0, y1) as f64 * (1.0 - fx) + img.get(x1, y1) as f64 * fx;
    (top * (1.0 - fy) + bottom * fy).round() as u8
}

/// Absolute transformation-angle error in degrees: the angle recovered from
/// the provider's (sin, cos) pair versus the requested one.
pub fn angle_error(alpha: f64, provider: &SinCosProvider) -> Result<f64> {
    if !(0.0..=1.0).contains(&alpha) || alpha == 0.0 {
        return Err(Error::Domain(format!(
            "angle {alpha} outside the supported (0, 1] rad interval"
        )));
    }
    let (s, c) = provider.sin_cos(alpha)?;
    let recovered = s.atan2(c);
    Ok((alpha - recovered).abs() * 180.0 / std::f64::consts::PI)
}

/// One row of the rotation-angle report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AngleErrorRecord {
    pub alpha: f64,
    pub e_deg: f64,
}

/// Mean absolute angle error over the alpha grid {0.01, 0.02, ..., 1.00}.
pub fn angle_error_sweep(provider: &SinCosProvider) -> Result<(f64, Vec<AngleErrorRecord>)> {
    let records: Result<Vec<AngleErrorRecord>> = (1..=100)
        .map(|i| {
            let alpha = i as f64 / 100.0;
            Ok(AngleErrorRecord {
                alpha,
                e_deg: angle_error(alpha, provider)?,
            })
        })
        .collect();
    let records = records?;
    let mean = records.iter().map(|r| r.e_deg).sum::<f64>() / records.len() as f64;
    Ok((mean, records))
}

/// Planar two-link forward kinematics. The second joint angle is taken
/// relative, so the distal link sits at `alpha1 + alpha2`; both the joint
/// angle and the sum must stay inside the unipolar [0, 1] rad domain.
pub fn forward_kinematics(
    l1: f64,
    l2: f64,
    alpha1: f64,
    alpha2: f64,
    provider: &SinCosProvider,
) -> Result<(f64, f64)> {
    let total = alpha1 + alpha2;
    if !(0.0..=1.0).contains(&alpha1) || !(0.0..=1.0).contains(&total) {
        return Err(Error::Domain(format!(
            "joint angles ({alpha1}, {alpha2}) leave the supported domain"
        )));
    }
    let (s1, c1) = provider.sin_cos(alpha1)?;
    let (s2, c2) = provider.sin_cos(total)?;
    Ok((l1 * c1 + l2 * c2, l1 * s1 + l2 * s2))
}

/// One grid point of the positioning-error report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PerrRecord {
    pub alpha1: f64,
    pub alpha2: f64,
    pub x_ref: f64,
    pub y_ref: f64,
    pub x_sc: f64,
    pub y_sc: f64,
    pub perr: f64,
}

/// Mean Euclidean positioning error of a provider against the exact path
/// over the admissible (alpha1, alpha2) grid.
pub fn perr_sweep(
    l1: f64,
    l2: f64,
    grid_steps: usize,
    provider: &SinCosProvider,
) -> Result<(f64, Vec<PerrRecord>)> {
    assert!(grid_steps >= 1);
    let exact = SinCosProvider::exact();
    let cells: Vec<(usize, usize)> = (0..=grid_steps)
        .flat_map(|i| (0..=(grid_steps - i)).map(move |j| (i, j)))
        .collect();
    let records: Result<Vec<PerrRecord>> = cells
        .par_iter()
        .map(|&(i, j)| {
            let alpha1 = i as f64 / grid_steps as f64;
            let alpha2 = j as f64 / grid_steps as f64;
            let (x_ref, y_ref) = forward_kinematics(l1, l2, alpha1, alpha2, &exact)?;
            let (x_sc, y_sc) = forward_kinematics(l1, l2, alpha1, alpha2, provider)?;
            let perr = ((x_ref - x_sc).powi(2) + (y_ref - y_sc).powi(2)).sqrt();
            Ok(PerrRecord {
                alpha1,
                alpha2,
                x_ref,
                y_ref,
                x_sc,
                y_sc,
                perr,
            })
        })
        .collect();
    let records = records?;
    let mean = records.iter().map(|r| r.perr).sum::<f64>() / records.len() as f64;
    Ok((mean, records))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_rotation_is_identity() {
        let img = GrayImage::checkerboard(64, 8).unwrap();
        let out = rotate_image(&img, 0.0, &SinCosProvider::exact()).unwrap();
        assert_eq!(out, img);
    }

    #[test]
    fn rotate_forward_then_back_stays_close() {
        let img = GrayImage::checkerboard(128, 16).unwrap();
        let alpha = 0.4;
        let (s, c) = SinCosProvider::exact().sin_cos(alpha).unwrap();
        let fwd = rotate_image_with_sincos(&img, s, c, false).unwrap();
        // inverse transform: the matrix transpose, i.e. negated sine
        let back = rotate_image_with_sincos(&fwd, -s, c, false).unwrap();
        // compare away from the border, where out-of-frame zeros dominate
        let mut total = 0f64;
        let mut count = 0usize;
        let margin = 32;
        for y in margin..128 - margin {
            for x in margin..128 - margin {
                total += (back.get(x, y) as f64 - img.get(x, y) as f64).abs();
                count += 1;
            }
        }
        assert!(total / count as f64 <= 2.0, "round-trip loss too high");
    }

    #[test]
    fn out_of_frame_pixels_are_zero_filled() {
        let mut img = GrayImage::new(32, 32).unwrap();
        img.pixels.fill(200);
        let out = rotate_image(&img, 0.7, &SinCosProvider::exact()).unwrap();
        // every output pixel is either a sampled source value or exactly 0
        assert!(out.pixels.iter().all(|&p| p == 200 || p == 0));
        assert!(out.pixels.iter().any(|&p| p == 0));
    }

    #[test]
    fn identical_sincos_means_identical_images() {
        let img = GrayImage::corner_markers(64).unwrap();
        let (s, c) = (0.3f64.sin(), 0.3f64.cos());
        let a = rotate_image_with_sincos(&img, s, c, false).unwrap();
        let b = rotate_image_with_sincos(&img, s, c, false).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn exact_angle_error_is_zero() {
        // zero up to the atan2 round-trip, which is a few ulp in degrees
        let exact = SinCosProvider::exact();
        for i in 1..=100 {
            assert!(angle_error(i as f64 / 100.0, &exact).unwrap() < 1e-12);
        }
    }

    #[test]
    fn angle_error_rejects_out_of_domain() {
        let exact = SinCosProvider::exact();
        assert!(angle_error(0.0, &exact).is_err());
        assert!(angle_error(1.5, &exact).is_err());
    }

    #[test]
    fn forward_kinematics_reference_points() {
        let exact = SinCosProvider::exact();
        let (x, y) = forward_kinematics(0.6, 0.4, 0.0, 0.0, &exact).unwrap();
        assert_eq!((x, y), (1.0, 0.0));
        let (x, y) = forward_kinematics(0.5, 0.5, 0.5, 0.3, &exact).unwrap();
        let want_x = 0.5 * 0.5f64.cos() + 0.5 * 0.8f64.cos();
        let want_y = 0.5 * 0.5f64.sin() + 0.5 * 0.8f64.sin();
        assert!((x - want_x).abs() < 1e-15 && (y - want_y).abs() < 1e-15);
        assert!(forward_kinematics(0.5, 0.5, 0.8, 0.5, &exact).is_err());
    }

    #[test]
    fn perr_zero_for_exact_provider() {
        let (mean, records) = perr_sweep(0.5, 0.5, 8, &SinCosProvider::exact()).unwrap();
        assert_eq!(mean, 0.0);
        assert!(records.iter().all(|r| r.perr == 0.0));
    }

    #[test]
    fn perr_scales_linearly_with_link_lengths() {
        let provider = SinCosProvider::stochastic(Variant::TranscStar, 256).unwrap();
        let (m1, _) = perr_sweep(0.5, 0.5, 6, &provider).unwrap();
        let (m2, _) = perr_sweep(1.0, 1.0, 6, &provider).unwrap();
        assert!((m2 - 2.0 * m1).abs() < 1e-12);
    }

    #[test]
    fn pgm_round_trip() {
        let img = GrayImage::corner_markers(48).unwrap();
        let dir = std::env::temp_dir().join("scsim-pgm-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("markers.pgm");
        write_pgm(&img, &path).unwrap();
        let back = read_pgm(&path).unwrap();
        assert_eq!(img, back);
    }

    #[test]
    fn pgm_rejects_non_p5() {
        assert!(parse_pgm(b"P2\n2 2\n255\n0 0 0 0").is_err());
    }
}
