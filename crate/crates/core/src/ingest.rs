//! Dataset manifest, raw I/Q binary loading, and cell validation.
//!
//! A dataset is a UTF-8 JSON manifest next to one binary samples file. The
//! binary holds every range cell concatenated in index order; each sample is
//! a little-endian `f32` in-phase value followed by the `f32` quadrature
//! value. Roles (primary / secondary / clutter-only) live in the manifest
//! only: nothing downstream reads them except the scoring step.

use std::fmt;
use std::io;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

// ── Errors ──────────────────────────────────────────────────────────────────

#[derive(Debug)]
pub enum IngestError {
    /// Malformed manifest JSON or invalid field combination.
    ManifestParse(String),
    /// Samples file length does not match the declared geometry.
    SizeMismatch { expected: u64, actual: u64 },
    /// NaN or infinity in the decoded samples.
    NonFiniteSample { cell_index: usize, offset: usize },
    /// Fewer than 3 usable cells after exclusion.
    TooFewCells { usable: usize },
    Io(io::Error),
}

impl fmt::Display for IngestError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::ManifestParse(msg) => write!(f, "manifest parse error: {msg}"),
            Self::SizeMismatch { expected, actual } => write!(
                f,
                "samples file size mismatch: manifest declares {expected} bytes, file has {actual}"
            ),
            Self::NonFiniteSample { cell_index, offset } => write!(
                f,
                "non-finite sample in cell {cell_index} at sample offset {offset}"
            ),
            Self::TooFewCells { usable } => write!(
                f,
                "only {usable} usable cells; at least 3 are required for detection"
            ),
            Self::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for IngestError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        if let Self::Io(e) = self {
            Some(e)
        } else {
            None
        }
    }
}

impl From<io::Error> for IngestError {
    fn from(e: io::Error) -> Self {
        Self::Io(e)
    }
}

pub type Result<T> = std::result::Result<T, IngestError>;

// ── Manifest ────────────────────────────────────────────────────────────────

/// Radar polarization of one dataset (one polarization per manifest).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Polarization {
    HH,
    HV,
    VH,
    VV,
}

impl fmt::Display for Polarization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::HH => "HH",
            Self::HV => "HV",
            Self::VH => "VH",
            Self::VV => "VV",
        };
        f.write_str(s)
    }
}

/// Collection campaign style. Controls nothing by itself; it names the cell
/// and sample-count geometry the dataset follows and groups corpus results.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CollectionYear {
    #[serde(rename = "Y1993-style")]
    Y1993Style,
    #[serde(rename = "Y1998-style")]
    Y1998Style,
    #[serde(rename = "custom")]
    Custom,
}

impl fmt::Display for CollectionYear {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::Y1993Style => "Y1993-style",
            Self::Y1998Style => "Y1998-style",
            Self::Custom => "custom",
        };
        f.write_str(s)
    }
}

/// On-disk sample encoding. Only one is defined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SampleEncoding {
    #[serde(rename = "float32-interleaved-IQ")]
    Float32InterleavedIq,
}

/// JSON manifest describing one multi-cell coherent dataset.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub dataset_id: String,
    pub collection_year: CollectionYear,
    pub num_cells: usize,
    pub samples_per_cell: usize,
    pub polarization: Polarization,
    /// Cell containing the target, when known.
    #[serde(default)]
    pub primary_cell: Option<usize>,
    /// Target-affected neighbour cells, excluded from training by default.
    #[serde(default)]
    pub secondary_cells: Vec<usize>,
    pub sample_encoding: SampleEncoding,
    /// Samples file, relative to the manifest's directory.
    pub samples_file: String,
    #[serde(default)]
    pub notes: String,
}

impl DatasetManifest {
    /// Field-level consistency checks beyond what JSON decoding enforces.
    pub fn validate(&self) -> Result<()> {
        if self.num_cells == 0 {
            return Err(IngestError::ManifestParse("num_cells must be positive".into()));
        }
        if self.samples_per_cell == 0 {
            return Err(IngestError::ManifestParse(
                "samples_per_cell must be positive".into(),
            ));
        }
        if let Some(p) = self.primary_cell {
            if p >= self.num_cells {
                return Err(IngestError::ManifestParse(format!(
                    "primary_cell {p} out of range (num_cells = {})",
                    self.num_cells
                )));
            }
            if self.secondary_cells.contains(&p) {
                return Err(IngestError::ManifestParse(format!(
                    "primary_cell {p} also listed in secondary_cells"
                )));
            }
        }
        let mut seen = std::collections::HashSet::new();
        for &s in &self.secondary_cells {
            if s >= self.num_cells {
                return Err(IngestError::ManifestParse(format!(
                    "secondary cell {s} out of range (num_cells = {})",
                    self.num_cells
                )));
            }
            if !seen.insert(s) {
                return Err(IngestError::ManifestParse(format!(
                    "secondary cell {s} listed twice"
                )));
            }
        }
        if self.samples_file.is_empty() {
            return Err(IngestError::ManifestParse("samples_file must be set".into()));
        }
        Ok(())
    }

    /// Role of a cell as declared by this manifest.
    pub fn role_of(&self, cell_index: usize) -> CellRole {
        if self.primary_cell == Some(cell_index) {
            CellRole::Primary
        } else if self.secondary_cells.contains(&cell_index) {
            CellRole::Secondary
        } else {
            CellRole::ClutterOnly
        }
    }

    /// Declared size of the samples binary in bytes (f32 I + f32 Q per sample).
    pub fn expected_file_len(&self) -> u64 {
        self.num_cells as u64 * self.samples_per_cell as u64 * 8
    }
}

// ── Cells ───────────────────────────────────────────────────────────────────

/// Role label of one range cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellRole {
    Primary,
    Secondary,
    ClutterOnly,
}

impl fmt::Display for CellRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::Primary => "primary",
            Self::Secondary => "secondary",
            Self::ClutterOnly => "clutter_only",
        };
        f.write_str(s)
    }
}

/// One range cell's coherent return sequence.
#[derive(Debug, Clone)]
pub struct RangeCellSeries {
    pub cell_index: usize,
    /// Complex returns: real part I, imaginary part Q, in ADC units.
    pub samples: Vec<Complex64>,
    pub role: CellRole,
}

// ── Load / write ────────────────────────────────────────────────────────────

/// Loads a dataset from its manifest path.
///
/// Cells come back ordered by `cell_index` with roles resolved from the
/// manifest. Fails on size mismatches and on any NaN/Inf sample.
pub fn load_dataset(manifest_path: &Path) -> Result<(DatasetManifest, Vec<RangeCellSeries>)> {
    let text = std::fs::read_to_string(manifest_path)?;
    let manifest: DatasetManifest =
        serde_json::from_str(&text).map_err(|e| IngestError::ManifestParse(e.to_string()))?;
    manifest.validate()?;

    let bin_path = samples_path(manifest_path, &manifest);
    let bytes = std::fs::read(&bin_path)?;
    let expected = manifest.expected_file_len();
    if bytes.len() as u64 != expected {
        return Err(IngestError::SizeMismatch {
            expected,
            actual: bytes.len() as u64,
        });
    }

    let n = manifest.samples_per_cell;
    let mut cells = Vec::with_capacity(manifest.num_cells);
    for cell_index in 0..manifest.num_cells {
        let base = cell_index * n * 8;
        let mut samples = Vec::with_capacity(n);
        for k in 0..n {
            let off = base + k * 8;
            let i = f32::from_le_bytes(bytes[off..off + 4].try_into().unwrap());
            let q = f32::from_le_bytes(bytes[off + 4..off + 8].try_into().unwrap());
            if !i.is_finite() || !q.is_finite() {
                return Err(IngestError::NonFiniteSample {
                    cell_index,
                    offset: k,
                });
            }
            samples.push(Complex64::new(i as f64, q as f64));
        }
        cells.push(RangeCellSeries {
            cell_index,
            samples,
            role: manifest.role_of(cell_index),
        });
    }
    Ok((manifest, cells))
}

/// Writes `manifest.json` plus the samples binary into `dir`.
///
/// The inverse of [`load_dataset`] up to f32 rounding of the samples.
/// Returns the manifest path.
pub fn write_dataset(
    manifest: &DatasetManifest,
    cells: &[RangeCellSeries],
    dir: &Path,
) -> Result<PathBuf> {
    manifest.validate()?;
    if cells.len() != manifest.num_cells {
        return Err(IngestError::ManifestParse(format!(
            "manifest declares {} cells but {} were provided",
            manifest.num_cells,
            cells.len()
        )));
    }
    std::fs::create_dir_all(dir)?;

    let mut bytes = Vec::with_capacity(manifest.expected_file_len() as usize);
    for cell in cells {
        if cell.samples.len() != manifest.samples_per_cell {
            return Err(IngestError::ManifestParse(format!(
                "cell {} has {} samples, manifest declares {}",
                cell.cell_index,
                cell.samples.len(),
                manifest.samples_per_cell
            )));
        }
        for s in &cell.samples {
            bytes.extend_from_slice(&(s.re as f32).to_le_bytes());
            bytes.extend_from_slice(&(s.im as f32).to_le_bytes());
        }
    }
    std::fs::write(dir.join(&manifest.samples_file), bytes)?;

    let manifest_path = dir.join("manifest.json");
    let json = serde_json::to_string_pretty(manifest)
        .map_err(|e| IngestError::ManifestParse(e.to_string()))?;
    std::fs::write(&manifest_path, json)?;
    Ok(manifest_path)
}

fn samples_path(manifest_path: &Path, manifest: &DatasetManifest) -> PathBuf {
    match manifest_path.parent() {
        Some(dir) => dir.join(&manifest.samples_file),
        None => PathBuf::from(&manifest.samples_file),
    }
}

// ── Validation for detection ────────────────────────────────────────────────

/// Cells admitted into training, plus the indices that were dropped.
#[derive(Debug, Clone)]
pub struct ValidatedCells {
    pub cells: Vec<RangeCellSeries>,
    pub dropped: Vec<usize>,
}

/// Drops secondary-role cells when `exclude_secondary` is set and checks the
/// remainder is large enough to train on. Order is preserved.
pub fn validate_for_detection(
    cells: Vec<RangeCellSeries>,
    exclude_secondary: bool,
) -> Result<ValidatedCells> {
    let mut kept = Vec::with_capacity(cells.len());
    let mut dropped = Vec::new();
    for cell in cells {
        if exclude_secondary && cell.role == CellRole::Secondary {
            dropped.push(cell.cell_index);
        } else {
            kept.push(cell);
        }
    }
    if kept.len() < 3 {
        return Err(IngestError::TooFewCells { usable: kept.len() });
    }
    Ok(ValidatedCells {
        cells: kept,
        dropped,
    })
}
