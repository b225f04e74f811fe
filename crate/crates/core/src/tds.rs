//! Time-Doppler spectra: one grayscale image per range cell.
//!
//! The echo is cut into `w = floor(N/l)` non-overlapping segments (tail
//! discarded), each segment is windowed and Fourier transformed, the
//! `l`-bin spectrum is rotated so zero Doppler sits at bin `l/2`, pooled
//! down to `h` bins by block averaging, and the `w` column spectra are
//! stacked side by side. The full image is then min-max normalized to
//! 8 bits.
//!
//! Row indexing: row 0 is the most negative Doppler frequency, row `h-1`
//! the most positive; a tone at `f0` lands in row
//! `floor(((f0/prf + 0.5) mod 1) * h)`. Exports write rows in exactly this
//! stored order.

use std::fmt;
use std::io;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::ingest::RangeCellSeries;

/// Magnitudes below this after `20*log10` are clamped (silence guard).
const DB_FLOOR: f64 = -120.0;

// ── Errors ──────────────────────────────────────────────────────────────────

#[derive(Debug)]
pub enum TdsError {
    /// Parameter combination violates the segment/height invariants.
    InvalidParams(String),
    /// Fewer samples than one segment.
    InputTooShort { needed: usize, got: usize },
    /// All spectra values identical; min-max normalization is undefined.
    DegenerateImage,
    Io(io::Error),
}

impl fmt::Display for TdsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::InvalidParams(msg) => write!(f, "invalid TDS parameters: {msg}"),
            Self::InputTooShort { needed, got } => {
                write!(f, "input too short: need at least {needed} samples, got {got}")
            }
            Self::DegenerateImage => write!(f, "degenerate image: constant spectra"),
            Self::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for TdsError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        if let Self::Io(e) = self {
            Some(e)
        } else {
            None
        }
    }
}

impl From<io::Error> for TdsError {
    fn from(e: io::Error) -> Self {
        Self::Io(e)
    }
}

pub type Result<T> = std::result::Result<T, TdsError>;

// ── Parameters ──────────────────────────────────────────────────────────────

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowKind {
    Hamming,
    Rectangular,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MagnitudeScale {
    Db,
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TdsParams {
    /// Segment length `l` in samples; must be a power of two.
    pub segment_length: usize,
    /// Doppler bins `h` of the final image; must divide `l`, at least 8.
    pub height: usize,
    pub window: WindowKind,
    pub magnitude_scale: MagnitudeScale,
    /// Rotate spectra so zero frequency is centered at row `h/2`.
    pub shift_zero_center: bool,
}

impl Default for TdsParams {
    fn default() -> Self {
        Self {
            segment_length: 512,
            height: 64,
            window: WindowKind::Hamming,
            magnitude_scale: MagnitudeScale::Db,
            shift_zero_center: true,
        }
    }
}

impl TdsParams {
    pub fn validate(&self) -> Result<()> {
        let l = self.segment_length;
        let h = self.height;
        if l == 0 || !l.is_power_of_two() {
            return Err(TdsError::InvalidParams(format!(
                "segment length {l} is not a power of two"
            )));
        }
        if h < 8 {
            return Err(TdsError::InvalidParams(format!("height {h} is below 8")));
        }
        if l % h != 0 {
            return Err(TdsError::InvalidParams(format!(
                "height {h} does not divide segment length {l}"
            )));
        }
        Ok(())
    }
}

// ── Image ───────────────────────────────────────────────────────────────────

/// `h x w` 8-bit time-Doppler spectra raster.
///
/// Row-major; `pixels[r * width + c]`. Row 0 is the most negative Doppler
/// bin (see module docs), column `c` covers input samples
/// `[c*l, (c+1)*l)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TdsImage {
    pub pixels: Vec<u8>,
    pub height: usize,
    pub width: usize,
    pub cell_index: usize,
    pub params: TdsParams,
}

impl TdsImage {
    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.pixels[row * self.width + col]
    }
}

// ── Construction ────────────────────────────────────────────────────────────

/// Per-segment pooled spectra before quantization, column-major by segment.
///
/// `values[col][row]` with the same row convention as [`TdsImage`]. Exposed
/// so properties of the raw spectra (locality, pooling energy) can be tested
/// without the global min-max coupling every column together.
#[derive(Debug, Clone)]
pub struct SpectraMatrix {
    pub values: Vec<Vec<f64>>,
    pub height: usize,
    pub width: usize,
}

/// Windowed FFT + shift + pooling for every segment. No normalization.
pub fn build_spectra(samples: &[Complex64], params: &TdsParams) -> Result<SpectraMatrix> {
    params.validate()?;
    let l = params.segment_length;
    let h = params.height;
    let n = samples.len();
    if n < l {
        return Err(TdsError::InputTooShort { needed: l, got: n });
    }
    let w = n / l;
    let block = l / h;

    let window = make_window(params.window, l);
    let fft = FftPlanner::new().plan_fft_forward(l);

    let mut columns = Vec::with_capacity(w);
    let mut buf = vec![Complex64::default(); l];
    for j in 0..w {
        let seg = &samples[j * l..(j + 1) * l];
        for (b, (s, win)) in buf.iter_mut().zip(seg.iter().zip(&window)) {
            *b = s * win;
        }
        fft.process(&mut buf);

        let scaled: Vec<f64> = buf
            .iter()
            .map(|c| {
                let mag = c.norm();
                match params.magnitude_scale {
                    MagnitudeScale::Linear => mag,
                    MagnitudeScale::Db => (20.0 * mag.log10()).max(DB_FLOOR),
                }
            })
            .collect();

        let mut column = Vec::with_capacity(h);
        for p in 0..h {
            let mut acc = 0.0;
            for i in 0..block {
                let bin = p * block + i;
                // shifted index: bin 0 of the column = -prf/2
                let src = if params.shift_zero_center {
                    (bin + l / 2) % l
                } else {
                    bin
                };
                acc += scaled[src];
            }
            column.push(acc / block as f64);
        }
        columns.push(column);
    }
    Ok(SpectraMatrix {
        values: columns,
        height: h,
        width: w,
    })
}

/// Full TDS construction: spectra, then global min-max quantization to u8.
pub fn build_tds(cell: &RangeCellSeries, params: &TdsParams) -> Result<TdsImage> {
    let spectra = build_spectra(&cell.samples, params)?;
    let (h, w) = (spectra.height, spectra.width);

    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for col in &spectra.values {
        for &v in col {
            min = min.min(v);
            max = max.max(v);
        }
    }
    if max == min {
        return Err(TdsError::DegenerateImage);
    }

    let span = max - min;
    let mut pixels = vec![0u8; h * w];
    for (c, col) in spectra.values.iter().enumerate() {
        for (r, &v) in col.iter().enumerate() {
            pixels[r * w + c] = (255.0 * (v - min) / span).round() as u8;
        }
    }
    Ok(TdsImage {
        pixels,
        height: h,
        width: w,
        cell_index: cell.cell_index,
        params: *params,
    })
}

fn make_window(kind: WindowKind, l: usize) -> Vec<f64> {
    match kind {
        WindowKind::Rectangular => vec![1.0; l],
        WindowKind::Hamming => {
            if l == 1 {
                return vec![1.0];
            }
            (0..l)
                .map(|i| {
                    0.54 - 0.46 * (2.0 * std::f64::consts::PI * i as f64 / (l - 1) as f64).cos()
                })
                .collect()
        }
    }
}

// ── Export ──────────────────────────────────────────────────────────────────

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImageFormat {
    Pgm,
    Png,
}

impl ImageFormat {
    /// Picks a format from a path extension (`.pgm` / `.png`).
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()? {
            "pgm" => Some(Self::Pgm),
            "png" => Some(Self::Png),
            _ => None,
        }
    }
}

/// Writes the image as binary PGM (P5, maxval 255) or grayscale PNG.
/// Rows go out in stored order.
pub fn export_image(img: &TdsImage, path: &Path, format: ImageFormat) -> Result<()> {
    match format {
        ImageFormat::Pgm => {
            let mut f = std::fs::File::create(path)?;
            write!(f, "P5\n{} {}\n255\n", img.width, img.height)?;
            f.write_all(&img.pixels)?;
        }
        ImageFormat::Png => {
            let buf = image::GrayImage::from_raw(
                img.width as u32,
                img.height as u32,
                img.pixels.clone(),
            )
            .expect("pixel buffer matches dimensions");
            buf.save_with_format(path, image::ImageFormat::Png)
                .map_err(|e| TdsError::Io(io::Error::other(e.to_string())))?;
        }
    }
    Ok(())
}

/// Doppler row a tone at `f0` (Hz, sampled at `prf`) maps to after shift and
/// pooling to `h` bins.
pub fn tone_row(f0: f64, prf: f64, h: usize) -> usize {
    let frac = (f0 / prf + 0.5).rem_euclid(1.0);
    ((frac * h as f64).floor() as usize).min(h - 1)
}
