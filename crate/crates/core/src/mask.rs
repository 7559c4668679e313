//! Square binary silhouette masks.
//!
//! Masks are stored as packed 64-bit words, row-major, so intersection /
//! union counts (the hot path of template scoring) reduce to ANDs, ORs and
//! popcounts. On disk a mask is an 8-bit binary PGM (`P5`) whose pixels are
//! exactly 0 (background) or 255 (foreground).

use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::Roi;

pub const MIN_RESOLUTION: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SilhouetteMask {
    resolution: usize,
    words_per_row: usize,
    words: Vec<u64>,
}

impl SilhouetteMask {
    /// Empty (all background) mask. Panics below [`MIN_RESOLUTION`]; public
    /// entry points validate user-supplied resolutions before reaching this.
    pub fn new(resolution: usize) -> SilhouetteMask {
        assert!(
            resolution >= MIN_RESOLUTION,
            "mask resolution must be at least {MIN_RESOLUTION}, got {resolution}"
        );
        let words_per_row = resolution.div_ceil(64);
        SilhouetteMask {
            resolution,
            words_per_row,
            words: vec![0; words_per_row * resolution],
        }
    }

    pub fn check_resolution(resolution: usize) -> Result<()> {
        if resolution < MIN_RESOLUTION {
            Err(Error::MaskResolution(resolution))
        } else {
            Ok(())
        }
    }

    pub fn from_fn(resolution: usize, mut f: impl FnMut(usize, usize) -> bool) -> SilhouetteMask {
        let mut m = SilhouetteMask::new(resolution);
        for y in 0..resolution {
            for x in 0..resolution {
                if f(x, y) {
                    m.set(x, y, true);
                }
            }
        }
        m
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        debug_assert!(x < self.resolution && y < self.resolution);
        let w = self.words[y * self.words_per_row + x / 64];
        (w >> (x % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: bool) {
        debug_assert!(x < self.resolution && y < self.resolution);
        let idx = y * self.words_per_row + x / 64;
        let bit = 1u64 << (x % 64);
        if value {
            self.words[idx] |= bit;
        } else {
            self.words[idx] &= !bit;
        }
    }

    /// Number of foreground pixels.
    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Foreground anywhere on the outermost one-pixel frame.
    pub fn border_occupied(&self) -> bool {
        let n = self.resolution;
        for x in 0..n {
            if self.get(x, 0) || self.get(x, n - 1) {
                return true;
            }
        }
        for y in 0..n {
            if self.get(0, y) || self.get(n - 1, y) {
                return true;
            }
        }
        false
    }

    /// Intersection and union pixel counts in one pass.
    pub fn overlap_counts(&self, other: &SilhouetteMask) -> Result<(usize, usize)> {
        if self.resolution != other.resolution {
            return Err(Error::ResolutionMismatch {
                a: self.resolution,
                b: other.resolution,
            });
        }
        let mut inter = 0usize;
        let mut union = 0usize;
        for (a, b) in self.words.iter().zip(&other.words) {
            inter += (a & b).count_ones() as usize;
            union += (a | b).count_ones() as usize;
        }
        Ok((inter, union))
    }

    /// Flip a deterministic pseudo-random fraction of pixels (used to model
    /// noisy segmentation input).
    pub fn with_flipped_pixels<R: rand::Rng>(&self, fraction: f64, rng: &mut R) -> SilhouetteMask {
        let mut out = self.clone();
        for y in 0..self.resolution {
            for x in 0..self.resolution {
                if rng.gen::<f64>() < fraction {
                    let v = out.get(x, y);
                    out.set(x, y, !v);
                }
            }
        }
        out
    }

    // -- resampling ---------------------------------------------------------

    /// Resample the ROI of this mask onto an `out_resolution` square grid.
    ///
    /// The mask is treated as a bilinear field with pixel centers on the
    /// integer lattice and zero outside the mask; output pixels turn on when
    /// the interpolated coverage is at least 0.5. An identity ROI at equal
    /// resolution reproduces the mask exactly, and any all-foreground region
    /// stays all-foreground.
    pub fn crop_resize(&self, roi: &Roi, out_resolution: usize) -> Result<SilhouetteMask> {
        roi.validate()?;
        Self::check_resolution(out_resolution)?;
        let mut out = SilhouetteMask::new(out_resolution);
        let n = out_resolution as f64;
        for oy in 0..out_resolution {
            let sy = roi.by + (oy as f64 + 0.5) * roi.h / n - 0.5;
            for ox in 0..out_resolution {
                let sx = roi.bx + (ox as f64 + 0.5) * roi.w / n - 0.5;
                if self.sample_bilinear(sx, sy) >= 0.5 {
                    out.set(ox, oy, true);
                }
            }
        }
        Ok(out)
    }

    fn sample_bilinear(&self, x: f64, y: f64) -> f64 {
        let n = self.resolution as isize;
        let x0 = x.floor();
        let y0 = y.floor();
        let fx = x - x0;
        let fy = y - y0;
        let (x0, y0) = (x0 as isize, y0 as isize);
        let at = |ix: isize, iy: isize| -> f64 {
            if ix < 0 || iy < 0 || ix >= n || iy >= n {
                0.0
            } else if self.get(ix as usize, iy as usize) {
                1.0
            } else {
                0.0
            }
        };
        let top = at(x0, y0) * (1.0 - fx) + at(x0 + 1, y0) * fx;
        let bot = at(x0, y0 + 1) * (1.0 - fx) + at(x0 + 1, y0 + 1) * fx;
        top * (1.0 - fy) + bot * fy
    }

    // -- PGM I/O -------------------------------------------------------------

    pub fn write_pgm(&self, path: &Path) -> Result<()> {
        let file =
            std::fs::File::create(path).map_err(|e| Error::io_at(path.display().to_string(), e))?;
        let mut w = BufWriter::new(file);
        self.write_pgm_to(&mut w)
            .map_err(|e| Error::io_at(path.display().to_string(), e))
    }

    pub fn write_pgm_to<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        write!(w, "P5\n{} {}\n255\n", self.resolution, self.resolution)?;
        let mut row = vec![0u8; self.resolution];
        for y in 0..self.resolution {
            for (x, px) in row.iter_mut().enumerate() {
                *px = if self.get(x, y) { 255 } else { 0 };
            }
            w.write_all(&row)?;
        }
        w.flush()
    }

    pub fn read_pgm(path: &Path) -> Result<SilhouetteMask> {
        let file =
            std::fs::File::open(path).map_err(|e| Error::io_at(path.display().to_string(), e))?;
        Self::read_pgm_from(BufReader::new(file))
            .map_err(|e| Error::Pgm(format!("{}: {e}", path.display())))
    }

    pub fn read_pgm_from<R: BufRead>(mut r: R) -> std::result::Result<SilhouetteMask, String> {
        let magic = read_pgm_token(&mut r)?;
        if magic != "P5" {
            return Err(format!("expected magic 'P5', got '{magic}'"));
        }
        let width: usize = read_pgm_token(&mut r)?
            .parse()
            .map_err(|e| format!("bad width: {e}"))?;
        let height: usize = read_pgm_token(&mut r)?
            .parse()
            .map_err(|e| format!("bad height: {e}"))?;
        let maxval: usize = read_pgm_token(&mut r)?
            .parse()
            .map_err(|e| format!("bad maxval: {e}"))?;
        if width != height {
            return Err(format!("mask must be square, got {width}x{height}"));
        }
        if width < MIN_RESOLUTION {
            return Err(format!("mask resolution {width} below minimum {MIN_RESOLUTION}"));
        }
        if maxval != 255 {
            return Err(format!("expected maxval 255, got {maxval}"));
        }
        let mut data = vec![0u8; width * height];
        r.read_exact(&mut data)
            .map_err(|e| format!("truncated pixel data: {e}"))?;
        let mut m = SilhouetteMask::new(width);
        for (i, &b) in data.iter().enumerate() {
            match b {
                0 => {}
                255 => m.set(i % width, i / width, true),
                other => return Err(format!("pixel value {other} is not binary (0 or 255)")),
            }
        }
        Ok(m)
    }
}

/// Next whitespace-delimited header token, skipping `#` comments.
fn read_pgm_token<R: BufRead>(r: &mut R) -> std::result::Result<String, String> {
    let mut tok = String::new();
    let mut in_comment = false;
    loop {
        let mut byte = [0u8; 1];
        match r.read_exact(&mut byte) {
            Ok(()) => {}
            Err(e) => {
                return if tok.is_empty() {
                    Err(format!("unexpected end of header: {e}"))
                } else {
                    Ok(tok)
                }
            }
        }
        let c = byte[0];
        if in_comment {
            if c == b'\n' {
                in_comment = false;
            }
            continue;
        }
        match c {
            b'#' if tok.is_empty() => in_comment = true,
            b' ' | b'\t' | b'\r' | b'\n' => {
                if !tok.is_empty() {
                    return Ok(tok);
                }
            }
            other => tok.push(other as char),
        }
    }
}
