//! Small-floating-target detection in sea clutter from time-Doppler texture.
//!
//! A coherent surface radar staring at the sea returns one complex I/Q time
//! series per range cell. A floating object too slow and too small to show up
//! in amplitude or raw Doppler still disturbs the *texture* of the cell's
//! time-Doppler spectra (TDS) image: clutter energy stays confined in a
//! drifting low-frequency band, while the target sprays short-lived speckle
//! into the mid and high Doppler bins. This crate turns that visual cue into
//! a detector:
//!
//! 1. [`tds`] — segment the echo, window + FFT each segment, and stack the
//!    spectra into an `h x w` 8-bit image per cell.
//! 2. [`lbp`] — summarize each image as a 9-bin histogram of uniform local
//!    binary patterns, a monotonic-illumination-invariant texture feature.
//! 3. [`ocsvm`] — train a Gaussian-kernel one-class SVM (minimum enclosing
//!    ball in kernel space) on *all* cells at once, target included, and rank
//!    cells by their distance to the learned boundary.
//! 4. [`detect`] — the end-to-end pipeline plus corpus-level evaluation: the
//!    cell ranked farthest outside is the verdict.
//!
//! [`ingest`] defines the on-disk dataset format (JSON manifest + raw
//! float32 interleaved I/Q binary) and [`synth`] generates labeled synthetic
//! datasets with the same clutter-band/speckle phenomenology, so the whole
//! chain is testable without access to licensed radar recordings.
//!
//! The `doptex` binary (see [`cli`]) exposes all of it as subcommands.

pub mod cli;
pub mod detect;
pub mod ingest;
pub mod lbp;
pub mod ocsvm;
pub mod synth;
pub mod tds;

pub use detect::{detect_dataset, evaluate_corpus, CorpusResult, DetectParams, DetectionReport};
pub use ingest::{
    load_dataset, validate_for_detection, CellRole, DatasetManifest, Polarization,
    RangeCellSeries,
};
pub use lbp::{lbp_histogram, LbpHistogram, LbpParams};
pub use ocsvm::{train, BallModel, KernelSpec, QpSettings};
pub use synth::{generate, SynthConfig};
pub use tds::{build_tds, TdsImage, TdsParams};
