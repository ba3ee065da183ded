//! Binary portable graymap (P5) export of coefficient magnitudes.
//!
//! One column per frame and one row per channel. Rows run from the Nyquist
//! channel at the top down through DC to the highest negative frequency at the
//! bottom. Pixels are `20 log10(|c| / max|c|)` clipped to `[-80, 0]` dB and
//! mapped affinely onto `0..=255`.

use std::path::Path;

use crate::error::{Error, Result};
use crate::gabor::CoefficientGrid;

pub const FLOOR_DB: f64 = -80.0;

pub fn spectrogram_pgm(grid: &CoefficientGrid) -> Vec<u8> {
    let (m, n) = (grid.channels(), grid.frames());
    let mut out = format!("P5\n{n} {m}\n255\n").into_bytes();
    let peak = grid.data().iter().map(|c| c.norm()).fold(0.0, f64::max);
    out.reserve(m * n);
    for row in 0..m {
        let channel = (m / 2 + m - row) % m;
        for frame in 0..n {
            let pixel = if peak > 0.0 {
                let db = 20.0 * (grid.get(channel, frame).norm() / peak).log10();
                let db = db.clamp(FLOOR_DB, 0.0);
                ((db - FLOOR_DB) / -FLOOR_DB * 255.0).round() as u8
            } else {
                0
            };
            out.push(pixel);
        }
    }
    out
}

pub fn export_spectrogram(grid: &CoefficientGrid, path: &Path) -> Result<()> {
    std::fs::write(path, spectrogram_pgm(grid))?;
    Ok(())
}

/// Parsed P5 header: width, height, maxval and the byte offset of the raster.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PgmHeader {
    pub width: usize,
    pub height: usize,
    pub maxval: usize,
    pub data_offset: usize,
}

pub fn parse_pgm_header(bytes: &[u8]) -> Result<PgmHeader> {
    let bad = || Error::format("not a binary PGM (P5) image");
    let mut fields = Vec::with_capacity(4);
    let mut pos = 0;
    while fields.len() < 4 {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(bad());
        }
        fields.push(std::str::from_utf8(&bytes[start..pos]).map_err(|_| bad())?);
    }
    if fields[0] != "P5" {
        return Err(bad());
    }
    let num = |s: &str| s.parse::<usize>().map_err(|_| bad());
    Ok(PgmHeader {
        width: num(fields[1])?,
        height: num(fields[2])?,
        maxval: num(fields[3])?,
        data_offset: pos + 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn zero_grid_is_black() {
        let img = spectrogram_pgm(&CoefficientGrid::zeros(4, 3));
        let h = parse_pgm_header(&img).unwrap();
        assert!(img[h.data_offset..].iter().all(|p| *p == 0));
    }

    #[test]
    fn single_coefficient_is_single_white_pixel() {
        let mut g = CoefficientGrid::zeros(8, 5);
        g.set(1, 2, Complex64::new(0.0, -3.0));
        let img = spectrogram_pgm(&g);
        let h = parse_pgm_header(&img).unwrap();
        let raster = &img[h.data_offset..];
        assert_eq!(raster.len(), 40);
        assert_eq!(raster.iter().filter(|p| **p == 255).count(), 1);
        assert_eq!(raster.iter().filter(|p| **p == 0).count(), 39);
        // Channel 1 sits three rows above DC, which is row 4 for M = 8.
        assert_eq!(raster[3 * 5 + 2], 255);
    }

    #[test]
    fn header_recovers_shape() {
        let img = spectrogram_pgm(&CoefficientGrid::zeros(16, 7));
        let h = parse_pgm_header(&img).unwrap();
        assert_eq!((h.height, h.width, h.maxval), (16, 7, 255));
        assert_eq!(img.len() - h.data_offset, 16 * 7);
        assert!(parse_pgm_header(b"P6\n1 1\n255\n\0").is_err());
        assert!(parse_pgm_header(b"P5\n1").is_err());
    }

    #[test]
    fn db_mapping() {
        // -40 dB sits halfway between the floor and the peak.
        let g = CoefficientGrid::from_real(1, 3, &[1.0, 0.01, 1e-5]).unwrap();
        let img = spectrogram_pgm(&g);
        let h = parse_pgm_header(&img).unwrap();
        assert_eq!(&img[h.data_offset..], &[255, 128, 0]);
    }
}
