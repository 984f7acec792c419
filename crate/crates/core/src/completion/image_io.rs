use std::f64::consts::PI;
use std::fs::File;
use std::path::Path;

use image::{DynamicImage, GrayImage, ImageFormat, ImageReader};

use crate::dense::{gaussian_matrix, read_csv, DenseMatrix, RngSpec};
use crate::error::{Error, Result};

/// Reads a grayscale image as a matrix with entries in `[0, 1]`.
///
/// PGM files (`P2` or `P5`, any maxval up to 65535) are divided by their
/// full-scale value. Files ending in `.csv` are read as plain matrices and
/// used as given.
pub fn read_image_matrix(path: &Path) -> Result<DenseMatrix> {
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        return read_csv(File::open(path)?);
    }
    let img = ImageReader::open(path)?.with_guessed_format()?.decode()?;
    let (w, h) = (img.width() as usize, img.height() as usize);
    if w == 0 || h == 0 {
        return Err(Error::EmptyMatrix);
    }
    let data: Vec<f64> = match img {
        DynamicImage::ImageLuma8(buf) => buf.into_raw().into_iter().map(|p| p as f64 / 255.0).collect(),
        DynamicImage::ImageLuma16(buf) => buf.into_raw().into_iter().map(|p| p as f64 / 65535.0).collect(),
        other => other.to_luma16().into_raw().into_iter().map(|p| p as f64 / 65535.0).collect(),
    };
    DenseMatrix::from_vec(h, w, data)
}

/// Writes `m` (entries clamped to `[0, 1]`) as an 8-bit binary PGM.
pub fn write_pgm(m: &DenseMatrix, path: &Path) -> Result<()> {
    let bytes = m
        .as_slice()
        .iter()
        .map(|v| (v.clamp(0.0, 1.0) * 255.0).round() as u8)
        .collect();
    let img = GrayImage::from_raw(m.cols() as u32, m.rows() as u32, bytes)
        .ok_or_else(|| Error::InvalidParameter("image buffer size".into()))?;
    img.save_with_format(path, ImageFormat::Pnm)?;
    Ok(())
}

/// A deterministic landscape (sky, two mountain ridges, a shoreline and a
/// lake with reflections, light texture), quantized to 8 bits. Stands in
/// for a natural photograph when none is supplied.
pub fn synthetic_scene(n1: usize, n2: usize) -> DenseMatrix {
    let noise = gaussian_matrix(n1, n2, RngSpec::new(0x5ce9e, 0));
    let land = |u: f64, v: f64| -> f64 {
        let far = 0.30 + 0.07 * (2.0 * PI * 1.7 * u + 0.4).sin() + 0.03 * (2.0 * PI * 6.3 * u).sin();
        let near = 0.43 + 0.05 * (2.0 * PI * 1.1 * u + 2.0).sin() + 0.02 * (2.0 * PI * 9.0 * u + 1.0).sin();
        if v < far {
            0.82 - 0.30 * v + 0.04 * (2.0 * PI * (3.0 * u + 2.0 * v)).sin()
        } else if v < near {
            0.55 - 0.5 * (v - far) + 0.05 * (2.0 * PI * 14.0 * u).sin() * (v - far) * 8.0
        } else {
            let trees = if (u * 57.0).fract() < 0.45 { 0.08 } else { 0.0 };
            0.28 - 0.6 * (v - near) - trees
        }
    };
    let shore = 0.58;
    DenseMatrix::from_fn(n1, n2, |i, j| {
        let u = j as f64 / n2 as f64;
        let v = i as f64 / n1 as f64;
        let base = if v < shore {
            land(u, v)
        } else {
            let mirrored = 2.0 * shore - v;
            let ripple = 0.015 * (2.0 * PI * (60.0 * v + 3.0 * u)).sin();
            0.75 * land(u + ripple, mirrored.max(0.0)) + 0.05 + 0.1 * (v - shore)
        };
        let value = (base + 0.02 * noise.get(i, j)).clamp(0.0, 1.0);
        (value * 255.0).round() / 255.0
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn p2_and_p5_agree() {
        let dir = tempfile::tempdir().unwrap();
        let p2 = dir.path().join("a.pgm");
        let mut f = File::create(&p2).unwrap();
        write!(f, "P2\n# comment\n3 2\n255\n0 51 255\n102 204 17\n").unwrap();
        drop(f);
        let p5 = dir.path().join("b.pgm");
        let mut f = File::create(&p5).unwrap();
        f.write_all(b"P5\n3 2\n255\n").unwrap();
        f.write_all(&[0, 51, 255, 102, 204, 17]).unwrap();
        drop(f);
        let a = read_image_matrix(&p2).unwrap();
        let b = read_image_matrix(&p5).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.shape(), (2, 3));
        assert_eq!(a.get(0, 1), 0.2);
        assert_eq!(a.get(0, 2), 1.0);
    }

    #[test]
    fn pgm_round_trip_is_bitwise() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scene.pgm");
        let scene = synthetic_scene(24, 40);
        write_pgm(&scene, &path).unwrap();
        assert_eq!(read_image_matrix(&path).unwrap(), scene);
        assert!(scene.as_slice().iter().all(|&v| (0.0..=1.0).contains(&v)));
    }

    #[test]
    fn sixteen_bit_maxval() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("w.pgm");
        std::fs::write(&path, "P2\n2 1\n65535\n0 65535\n").unwrap();
        let m = read_image_matrix(&path).unwrap();
        assert_eq!(m.as_slice(), &[0.0, 1.0]);
    }

    #[test]
    fn unreadable_files_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.pgm");
        std::fs::write(&path, "P2\n2 2\n255\n1 2\n").unwrap();
        assert!(read_image_matrix(&path).is_err());
        assert!(read_image_matrix(&dir.path().join("missing.pgm")).is_err());
    }
}
