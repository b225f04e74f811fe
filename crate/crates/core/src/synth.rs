//! Seeded synthetic multi-cell I/Q datasets.
//!
//! Every cell is a sum of a few narrowband tones whose instantaneous
//! Doppler center drifts slowly inside `±clutter_band_halfwidth`, plus
//! circular complex white noise. The target cell additionally receives
//! short tone bursts (Poisson arrivals) drawn from a mid/high-frequency
//! band, which is what puts speckle outside the clutter band of its TDS
//! image. Cells use one RNG stream each, derived from the dataset seed, so
//! generation is deterministic and per-cell independent; burst noise draws
//! from its own stream, so a `target_speckle_rate` of zero leaves the
//! target cell statistically identical to the clutter-only cells.

use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::ingest::{
    CellRole, CollectionYear, DatasetManifest, Polarization, RangeCellSeries, SampleEncoding,
};

const NUM_CLUTTER_TONES: usize = 3;
const BURST_MIN_SECONDS: f64 = 0.05;
const BURST_MAX_SECONDS: f64 = 0.25;

// ── Errors ──────────────────────────────────────────────────────────────────

#[derive(Debug)]
pub struct InvalidConfig(pub String);

impl fmt::Display for InvalidConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid synth config: {}", self.0)
    }
}

impl std::error::Error for InvalidConfig {}

pub type Result<T> = std::result::Result<T, InvalidConfig>;

// ── Config ──────────────────────────────────────────────────────────────────

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SynthConfig {
    pub dataset_id: String,
    pub collection_year: CollectionYear,
    pub polarization: Polarization,
    pub num_cells: usize,
    pub samples_per_cell: usize,
    /// Pulse repetition frequency in pulses per second.
    pub prf: f64,
    /// Clutter energy stays within this many Hz of zero Doppler.
    pub clutter_band_halfwidth: f64,
    /// Period of the slow clutter-band drift, in seconds.
    pub clutter_drift_period: f64,
    pub target_cell: usize,
    /// Burst arrivals per second in the target cell; zero disables bursts.
    pub target_speckle_rate: f64,
    /// Burst tone |frequency| range in Hz; the sign is drawn at random.
    pub target_speckle_band: (f64, f64),
    /// Linear amplitude of the circular white noise.
    pub noise_floor: f64,
    pub rng_seed: u64,
}

impl SynthConfig {
    /// 11 cells of 2^17 samples, the long-dwell clifftop geometry.
    pub fn y1993_style(seed: u64) -> Self {
        Self {
            dataset_id: format!("synth-y1993-{seed:04}"),
            collection_year: CollectionYear::Y1993Style,
            polarization: Polarization::HH,
            num_cells: 11,
            samples_per_cell: 1 << 17,
            prf: 1000.0,
            clutter_band_halfwidth: 100.0,
            clutter_drift_period: 10.0,
            target_cell: 5,
            target_speckle_rate: 2.0,
            target_speckle_band: (150.0, 450.0),
            noise_floor: 10f64.powf(-30.0 / 20.0),
            rng_seed: seed,
        }
    }

    /// 28 cells of 60000 samples, the short-dwell lakeshore geometry.
    pub fn y1998_style(seed: u64) -> Self {
        Self {
            dataset_id: format!("synth-y1998-{seed:04}"),
            collection_year: CollectionYear::Y1998Style,
            num_cells: 28,
            samples_per_cell: 60_000,
            target_cell: 14,
            ..Self::y1993_style(seed)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_cells == 0 || self.samples_per_cell == 0 {
            return Err(InvalidConfig("cell and sample counts must be positive".into()));
        }
        if !(self.prf > 0.0) {
            return Err(InvalidConfig(format!("prf must be positive, got {}", self.prf)));
        }
        if !(self.clutter_band_halfwidth > 0.0 && self.clutter_band_halfwidth < self.prf / 2.0) {
            return Err(InvalidConfig(format!(
                "clutter_band_halfwidth must lie in (0, prf/2), got {}",
                self.clutter_band_halfwidth
            )));
        }
        if !(self.clutter_drift_period > 0.0) {
            return Err(InvalidConfig("clutter_drift_period must be positive".into()));
        }
        if self.target_cell >= self.num_cells {
            return Err(InvalidConfig(format!(
                "target_cell {} out of range (num_cells = {})",
                self.target_cell, self.num_cells
            )));
        }
        if self.target_speckle_rate < 0.0 {
            return Err(InvalidConfig("target_speckle_rate must be non-negative".into()));
        }
        let (lo, hi) = self.target_speckle_band;
        if !(0.0 <= lo && lo < hi && hi < self.prf / 2.0) {
            return Err(InvalidConfig(format!(
                "target_speckle_band ({lo}, {hi}) must satisfy 0 <= lo < hi < prf/2"
            )));
        }
        if !(self.noise_floor >= 0.0) {
            return Err(InvalidConfig("noise_floor must be non-negative".into()));
        }
        Ok(())
    }

    pub fn manifest(&self) -> DatasetManifest {
        DatasetManifest {
            dataset_id: self.dataset_id.clone(),
            collection_year: self.collection_year,
            num_cells: self.num_cells,
            samples_per_cell: self.samples_per_cell,
            polarization: self.polarization,
            primary_cell: Some(self.target_cell),
            secondary_cells: vec![],
            sample_encoding: SampleEncoding::Float32InterleavedIq,
            samples_file: "samples.iq".into(),
            notes: format!("synthetic dataset, seed {}", self.rng_seed),
        }
    }
}

// ── Generation ──────────────────────────────────────────────────────────────

/// Generates the full dataset. Bit-identical output for equal configs.
pub fn generate(config: &SynthConfig) -> Result<(DatasetManifest, Vec<RangeCellSeries>)> {
    config.validate()?;
    let manifest = config.manifest();
    let mut cells = Vec::with_capacity(config.num_cells);
    for cell_index in 0..config.num_cells {
        let mut samples = clutter_series(config, cell_index);
        if cell_index == config.target_cell && config.target_speckle_rate > 0.0 {
            add_bursts(config, &mut samples);
        }
        cells.push(RangeCellSeries {
            cell_index,
            samples,
            role: if cell_index == config.target_cell {
                CellRole::Primary
            } else {
                CellRole::ClutterOnly
            },
        });
    }
    Ok((manifest, cells))
}

/// Drifting-band clutter plus noise for one cell. Stream `cell_index + 1`
/// of the dataset seed (stream 0 is reserved for target bursts).
fn clutter_series(config: &SynthConfig, cell_index: usize) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    rng.set_stream(cell_index as u64 + 1);

    let hw = config.clutter_band_halfwidth;
    struct Tone {
        amp: f64,
        freq_dev: f64,
        drift_phase: f64,
        phase: f64,
    }
    let mut tones: Vec<Tone> = (0..NUM_CLUTTER_TONES)
        .map(|_| Tone {
            amp: rng.gen_range(0.6..1.0),
            freq_dev: hw * rng.gen_range(0.45..0.95),
            drift_phase: rng.gen_range(0.0..std::f64::consts::TAU),
            phase: rng.gen_range(0.0..std::f64::consts::TAU),
        })
        .collect();

    let drift_rate = std::f64::consts::TAU / config.clutter_drift_period;
    let noise_scale = config.noise_floor / 2f64.sqrt();
    let n = config.samples_per_cell;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let t = i as f64 / config.prf;
        let mut acc = Complex64::default();
        for tone in &mut tones {
            // instantaneous Doppler center, integrated into the phase
            let f = tone.freq_dev * (drift_rate * t + tone.drift_phase).sin();
            tone.phase += std::f64::consts::TAU * f / config.prf;
            acc += Complex64::from_polar(tone.amp, tone.phase);
        }
        let g_re: f64 = StandardNormal.sample(&mut rng);
        let g_im: f64 = StandardNormal.sample(&mut rng);
        acc += Complex64::new(noise_scale * g_re, noise_scale * g_im);
        out.push(acc);
    }
    out
}

/// Adds Poisson-arrival tone bursts to the target cell in place.
fn add_bursts(config: &SynthConfig, samples: &mut [Complex64]) {
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    rng.set_stream(0);

    let n = samples.len();
    let duration = n as f64 / config.prf;
    let lambda = config.target_speckle_rate * duration;
    let count = Poisson::new(lambda).map(|p| p.sample(&mut rng) as u64).unwrap_or(0);

    let (lo, hi) = config.target_speckle_band;
    for _ in 0..count {
        let t0 = rng.gen_range(0.0..duration);
        let len = rng.gen_range(BURST_MIN_SECONDS..BURST_MAX_SECONDS);
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let freq = sign * rng.gen_range(lo..hi);
        let amp = rng.gen_range(0.6..1.2);
        let phase = rng.gen_range(0.0..std::f64::consts::TAU);

        let start = (t0 * config.prf) as usize;
        let end = (((t0 + len) * config.prf) as usize).min(n);
        for (k, s) in samples[start..end].iter_mut().enumerate() {
            let ang = std::f64::consts::TAU * freq * k as f64 / config.prf + phase;
            *s += Complex64::from_polar(amp, ang);
        }
    }
}
