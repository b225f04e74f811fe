//! Uniform local binary patterns over TDS images, 9-bin histograms, and the
//! target-to-clutter deviation ratio.
//!
//! Each interior pixel is compared against its 8 grid neighbours in a fixed
//! circular order (east first, counter-clockwise). A neighbour at or above
//! the center maps to 1, below to 0. Bit strings with at most two 0/1
//! transitions around the circle are "uniform" and coded by their count of
//! ones (0..=8); everything else is discarded. Code 0 is a spot (center above
//! all neighbours), code 8 a flat zone, codes 3-4 mark edges. The normalized
//! 9-bin code histogram is the feature vector for the detector.
//!
//! Only comparisons of intensities enter the code, so any strictly
//! increasing remap of the image leaves the histogram bit-identical.

use std::fmt;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::tds::TdsImage;

/// Histogram bins: uniform codes 0 through 8.
pub const NUM_BINS: usize = 9;

/// Neighbour offsets `(dr, dc)` in circular order, starting east and going
/// counter-clockwise. At radius 1 these are the 8-connected grid neighbours;
/// no interpolation is involved.
const NEIGHBOR_OFFSETS: [(isize, isize); 8] = [
    (0, 1),
    (1, 1),
    (1, 0),
    (1, -1),
    (0, -1),
    (-1, -1),
    (-1, 0),
    (-1, 1),
];

// ── Errors ──────────────────────────────────────────────────────────────────

#[derive(Debug)]
pub enum LbpError {
    /// Only `P = 8`, `R = 1`, uniform mapping is implemented.
    UnsupportedParams(String),
    /// Image smaller than 3x3 has no interior pixels.
    ImageTooSmall { height: usize, width: usize },
    /// Every interior pixel was non-uniform; the histogram is undefined.
    AllNonUniform,
    /// Fewer histograms than the statistic needs.
    TooFew { got: usize, need: usize },
}

impl fmt::Display for LbpError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::UnsupportedParams(msg) => write!(f, "unsupported LBP parameters: {msg}"),
            Self::ImageTooSmall { height, width } => {
                write!(f, "image {width}x{height} too small for 3x3 patches")
            }
            Self::AllNonUniform => write!(f, "all interior pixels are non-uniform"),
            Self::TooFew { got, need } => {
                write!(f, "need at least {need} histograms, got {got}")
            }
        }
    }
}

impl std::error::Error for LbpError {}

pub type Result<T> = std::result::Result<T, LbpError>;

// ── Parameters ──────────────────────────────────────────────────────────────

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LbpMapping {
    UniformRiu,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LbpParams {
    /// Circular neighbour count.
    pub neighbors: u8,
    /// Neighbour radius in pixels.
    pub radius: u8,
    pub mapping: LbpMapping,
}

impl Default for LbpParams {
    fn default() -> Self {
        Self {
            neighbors: 8,
            radius: 1,
            mapping: LbpMapping::UniformRiu,
        }
    }
}

impl LbpParams {
    pub fn validate(&self) -> Result<()> {
        if self.neighbors != 8 || self.radius != 1 {
            return Err(LbpError::UnsupportedParams(format!(
                "only P=8, R=1 is supported (got P={}, R={})",
                self.neighbors, self.radius
            )));
        }
        Ok(())
    }
}

// ── Codes ───────────────────────────────────────────────────────────────────

/// Outcome of coding one 3x3 patch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LbpCode {
    /// At most two 0/1 transitions; the value is the count of ones, 0..=8.
    Uniform(u8),
    NonUniform,
}

/// Codes a 3x3 patch, `patch[1][1]` being the center.
///
/// Works on any ordered intensity type; ties (neighbour equal to center)
/// count as 1.
pub fn lbp_code<T: PartialOrd>(patch: &[[T; 3]; 3]) -> LbpCode {
    let center = &patch[1][1];
    let mut bits = [false; 8];
    for (p, (dr, dc)) in NEIGHBOR_OFFSETS.iter().enumerate() {
        let neighbor = &patch[(1 + dr) as usize][(1 + dc) as usize];
        bits[p] = neighbor >= center;
    }
    classify_bits(&bits)
}

fn classify_bits(bits: &[bool; 8]) -> LbpCode {
    let mut transitions = 0;
    for p in 0..8 {
        if bits[p] != bits[(p + 1) % 8] {
            transitions += 1;
        }
    }
    if transitions <= 2 {
        LbpCode::Uniform(bits.iter().filter(|&&b| b).count() as u8)
    } else {
        LbpCode::NonUniform
    }
}

// ── Histogram ───────────────────────────────────────────────────────────────

/// Normalized distribution of uniform LBP codes for one image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LbpHistogram {
    /// Fraction of uniform interior pixels per code 0..=8; sums to 1.
    pub bins: [f64; NUM_BINS],
    /// Number of uniform interior pixels that contributed.
    pub pixel_count: usize,
    pub cell_index: usize,
}

impl LbpHistogram {
    pub fn as_vec(&self) -> Vec<f64> {
        self.bins.to_vec()
    }
}

/// Histogram of uniform codes over all interior pixels of a TDS image.
pub fn lbp_histogram(img: &TdsImage, params: &LbpParams) -> Result<LbpHistogram> {
    params.validate()?;
    lbp_histogram_grid(&img.pixels, img.height, img.width, img.cell_index)
}

/// Same as [`lbp_histogram`] for a raw row-major grid of any ordered
/// intensity type.
pub fn lbp_histogram_grid<T: PartialOrd + Copy>(
    data: &[T],
    height: usize,
    width: usize,
    cell_index: usize,
) -> Result<LbpHistogram> {
    assert_eq!(data.len(), height * width, "grid shape mismatch");
    if height < 3 || width < 3 {
        return Err(LbpError::ImageTooSmall { height, width });
    }
    let mut counts = [0u64; NUM_BINS];
    for r in 1..height - 1 {
        for c in 1..width - 1 {
            let center = data[r * width + c];
            let mut bits = [false; 8];
            for (p, (dr, dc)) in NEIGHBOR_OFFSETS.iter().enumerate() {
                let rr = (r as isize + dr) as usize;
                let cc = (c as isize + dc) as usize;
                bits[p] = data[rr * width + cc] >= center;
            }
            if let LbpCode::Uniform(code) = classify_bits(&bits) {
                counts[code as usize] += 1;
            }
        }
    }
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return Err(LbpError::AllNonUniform);
    }
    let mut bins = [0.0; NUM_BINS];
    for (b, &n) in bins.iter_mut().zip(&counts) {
        *b = n as f64 / total as f64;
    }
    Ok(LbpHistogram {
        bins,
        pixel_count: total as usize,
        cell_index,
    })
}

// ── Statistics ──────────────────────────────────────────────────────────────

/// Component-wise mean and population standard deviation over histograms.
pub fn mean_and_std(histograms: &[LbpHistogram]) -> Result<([f64; NUM_BINS], [f64; NUM_BINS])> {
    if histograms.len() < 2 {
        return Err(LbpError::TooFew {
            got: histograms.len(),
            need: 2,
        });
    }
    let n = histograms.len() as f64;
    let mut mean = [0.0; NUM_BINS];
    for h in histograms {
        for (m, b) in mean.iter_mut().zip(&h.bins) {
            *m += b;
        }
    }
    for m in &mut mean {
        *m /= n;
    }
    let mut var = [0.0; NUM_BINS];
    for h in histograms {
        for ((v, b), m) in var.iter_mut().zip(&h.bins).zip(&mean) {
            let d = b - m;
            *v += d * d;
        }
    }
    let mut std = [0.0; NUM_BINS];
    for (s, v) in std.iter_mut().zip(&var) {
        *s = (v / n).sqrt();
    }
    Ok((mean, std))
}

/// Target-to-clutter deviation ratio in dB.
///
/// With `sigma_t = |x0 - mean|` and `sigma_c` the clutter std, returns
/// `10*log10((sigma_t . sigma_t) / (sigma_c . sigma_c))`. A zero clutter
/// deviation yields the `+inf` sentinel, a zero target deviation `-inf`;
/// neither is an error.
pub fn tcr(outlier: &LbpHistogram, clutter: &[LbpHistogram]) -> Result<f64> {
    let (mean, std) = mean_and_std(clutter)?;
    let mut num = 0.0;
    let mut den = 0.0;
    for ((x, m), s) in outlier.bins.iter().zip(&mean).zip(&std) {
        let d = x - m;
        num += d * d;
        den += s * s;
    }
    if den == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (num / den).log10())
}

// ── CSV export ──────────────────────────────────────────────────────────────

/// Writes histograms as CSV: `cell,code0..code8,pixels`, with bin values in
/// 12-significant-digit scientific notation.
pub fn write_histograms_csv<W: Write>(out: &mut W, histograms: &[LbpHistogram]) -> io::Result<()> {
    writeln!(
        out,
        "cell,code0,code1,code2,code3,code4,code5,code6,code7,code8,pixels"
    )?;
    for h in histograms {
        write!(out, "{}", h.cell_index)?;
        for b in &h.bins {
            write!(out, ",{:.11e}", b)?;
        }
        writeln!(out, ",{}", h.pixel_count)?;
    }
    Ok(())
}
