//! End-to-end detection and corpus evaluation.
//!
//! For one dataset: build a TDS image per usable cell, reduce each image to
//! its uniform-LBP histogram, train the ball-form one-class SVM on *all* of
//! them (the training set is deliberately impure: the target is in it), and
//! rank cells by margin. The first-ranked cell — farthest outside the
//! learned boundary — is the verdict. The report also carries the
//! target-to-clutter ratio of the verdict cell against the rest; a TCR
//! below `low_confidence_db` flags the verdict as unreliable.
//!
//! Corpus evaluation runs files in parallel and aggregates detection rates
//! per polarization, grouped by collection style, with per-file failures
//! recorded rather than fatal.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ingest::{
    self, CellRole, CollectionYear, DatasetManifest, IngestError, Polarization, RangeCellSeries,
};
use crate::lbp::{self, LbpHistogram, LbpParams};
use crate::ocsvm::{self, KernelSpec, QpSettings, SvmError};
use crate::tds::{self, MagnitudeScale, TdsParams, WindowKind};

/// Report schema version emitted in every JSON document.
pub const REPORT_SCHEMA: u32 = 1;

/// Datasets with at least this many samples per cell use 512-sample
/// segments by default; shorter ones fall back to 256.
pub const LONG_DWELL_SAMPLES: usize = 1 << 17;

// ── Errors ──────────────────────────────────────────────────────────────────

#[derive(Debug)]
pub enum DetectError {
    Ingest(IngestError),
    /// TDS or LBP failure, tagged with the offending cell.
    Cell { cell_index: usize, message: String },
    Svm(SvmError),
    Params(String),
    EmptyCorpus,
}

impl fmt::Display for DetectError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Ingest(e) => write!(f, "{e}"),
            Self::Cell { cell_index, message } => write!(f, "cell {cell_index}: {message}"),
            Self::Svm(e) => write!(f, "{e}"),
            Self::Params(msg) => write!(f, "invalid detection parameters: {msg}"),
            Self::EmptyCorpus => write!(f, "empty corpus: no manifests given"),
        }
    }
}

impl std::error::Error for DetectError {}

impl From<IngestError> for DetectError {
    fn from(e: IngestError) -> Self {
        Self::Ingest(e)
    }
}

impl From<SvmError> for DetectError {
    fn from(e: SvmError) -> Self {
        Self::Svm(e)
    }
}

pub type Result<T> = std::result::Result<T, DetectError>;

// ── Parameters ──────────────────────────────────────────────────────────────

/// Pipeline parameters as given (before per-dataset resolution).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DetectParams {
    /// Segment length; `None` picks 512 or 256 from the dataset's
    /// samples-per-cell (see [`LONG_DWELL_SAMPLES`]).
    pub segment_length: Option<usize>,
    pub height: usize,
    pub window: WindowKind,
    pub magnitude_scale: MagnitudeScale,
    pub shift_zero_center: bool,
    pub lbp: LbpParams,
    pub qp: QpSettings,
    /// Gaussian bandwidth; `None` resolves to `1/m` after cell validation.
    pub kernel_bandwidth: Option<f64>,
    pub exclude_secondary: bool,
    /// Verdicts with TCR below this many dB are flagged low-confidence.
    pub low_confidence_db: f64,
}

impl Default for DetectParams {
    fn default() -> Self {
        Self {
            segment_length: None,
            height: 64,
            window: WindowKind::Hamming,
            magnitude_scale: MagnitudeScale::Db,
            shift_zero_center: true,
            lbp: LbpParams::default(),
            qp: QpSettings::default(),
            kernel_bandwidth: None,
            exclude_secondary: true,
            low_confidence_db: 5.0,
        }
    }
}

impl DetectParams {
    pub fn tds_params(&self, samples_per_cell: usize) -> TdsParams {
        let segment_length = self.segment_length.unwrap_or(if samples_per_cell >= LONG_DWELL_SAMPLES {
            512
        } else {
            256
        });
        TdsParams {
            segment_length,
            height: self.height,
            window: self.window,
            magnitude_scale: self.magnitude_scale,
            shift_zero_center: self.shift_zero_center,
        }
    }
}

/// Fully resolved parameters, echoed into every report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResolvedParams {
    pub tds: TdsParams,
    pub lbp: LbpParams,
    pub nu: f64,
    pub kernel_bandwidth: f64,
    pub qp_tolerance: f64,
    pub qp_max_iters: usize,
    pub exclude_secondary: bool,
    pub low_confidence_db: f64,
}

// ── Report ──────────────────────────────────────────────────────────────────

/// One cell's outcome, in rank order (most outlying first).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CellOutcome {
    pub cell_index: usize,
    pub margin: f64,
    pub distance_sq: f64,
    pub role: CellRole,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DetectionReport {
    pub schema: u32,
    pub dataset_id: String,
    pub polarization: Polarization,
    pub verdict_cell: usize,
    /// Set when the manifest labels a primary cell.
    pub correct: Option<bool>,
    /// TCR of the verdict cell against all other trained cells, dB.
    #[serde(with = "db_scalar")]
    pub tcr_db: f64,
    /// TCR of the labeled primary cell, when a label exists.
    #[serde(
        serialize_with = "db_scalar::serialize_opt",
        deserialize_with = "db_scalar::deserialize_opt"
    )]
    pub label_tcr_db: Option<f64>,
    pub low_confidence: bool,
    /// Ranked outcomes of exactly the cells that entered training.
    pub per_cell: Vec<CellOutcome>,
    /// Cell indices excluded before training.
    pub dropped_cells: Vec<usize>,
    pub svm_converged: bool,
    pub params: ResolvedParams,
}

impl DetectionReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| DetectError::Params(format!("report JSON: {e}")))
    }
}

/// JSON-safe encoding for dB values that may be infinite: finite values are
/// numbers, the sentinels are the strings "inf" / "-inf".
mod db_scalar {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Str(String),
    }

    fn to_repr(v: f64) -> Repr {
        if v.is_finite() {
            Repr::Num(v)
        } else if v > 0.0 {
            Repr::Str("inf".into())
        } else {
            Repr::Str("-inf".into())
        }
    }

    fn from_repr<E: serde::de::Error>(r: Repr) -> Result<f64, E> {
        match r {
            Repr::Num(v) => Ok(v),
            Repr::Str(s) => match s.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                other => Err(E::custom(format!("bad dB value: {other}"))),
            },
        }
    }

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        to_repr(*v).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        from_repr(Repr::deserialize(d)?)
    }

    pub fn serialize_opt<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        v.map(to_repr).serialize(s)
    }

    pub fn deserialize_opt<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        Option::<Repr>::deserialize(d)?.map(from_repr).transpose()
    }
}

// ── Single-dataset detection ────────────────────────────────────────────────

/// Runs the four-step procedure on one dataset's cells.
pub fn detect_dataset(
    manifest: &DatasetManifest,
    cells: Vec<RangeCellSeries>,
    params: &DetectParams,
) -> Result<DetectionReport> {
    let tds_params = params.tds_params(manifest.samples_per_cell);
    tds_params
        .validate()
        .map_err(|e| DetectError::Params(e.to_string()))?;
    params
        .lbp
        .validate()
        .map_err(|e| DetectError::Params(e.to_string()))?;
    if manifest.samples_per_cell < 2 * tds_params.segment_length {
        return Err(DetectError::Params(format!(
            "samples_per_cell = {} is below twice the segment length {}",
            manifest.samples_per_cell, tds_params.segment_length
        )));
    }

    // Step 0: drop excluded cells
    let validated = ingest::validate_for_detection(cells, params.exclude_secondary)?;
    let usable = validated.cells;
    let m = usable.len();

    // Steps 1-2: TDS image and LBP histogram per cell, in parallel
    let histograms: Vec<LbpHistogram> = usable
        .par_iter()
        .map(|cell| {
            let img = tds::build_tds(cell, &tds_params).map_err(|e| cell_err(cell.cell_index, &e))?;
            lbp::lbp_histogram(&img, &params.lbp).map_err(|e| cell_err(cell.cell_index, &e))
        })
        .collect::<Result<Vec<_>>>()?;

    // Step 3: train on the impure set
    let bandwidth = params.kernel_bandwidth.unwrap_or(1.0 / m as f64);
    let kernel = KernelSpec::gaussian(bandwidth);
    let features: Vec<Vec<f64>> = histograms.iter().map(|h| h.as_vec()).collect();
    let model = ocsvm::train(features.clone(), &params.qp, &kernel)?;

    // Step 4: rank by margin; first = verdict
    let ranked = model.rank_by_margin(&features);
    let per_cell: Vec<CellOutcome> = ranked
        .iter()
        .map(|&(pos, margin)| CellOutcome {
            cell_index: usable[pos].cell_index,
            margin,
            distance_sq: model.distance_sq(&features[pos]),
            role: usable[pos].role,
        })
        .collect();
    let verdict_cell = per_cell[0].cell_index;
    let verdict_pos = ranked[0].0;

    let tcr_db = tcr_of(&histograms, verdict_pos)?;
    let label_tcr_db = match manifest.primary_cell {
        Some(primary) => match usable.iter().position(|c| c.cell_index == primary) {
            Some(pos) => Some(tcr_of(&histograms, pos)?),
            None => None,
        },
        None => None,
    };

    Ok(DetectionReport {
        schema: REPORT_SCHEMA,
        dataset_id: manifest.dataset_id.clone(),
        polarization: manifest.polarization,
        verdict_cell,
        correct: manifest.primary_cell.map(|p| p == verdict_cell),
        tcr_db,
        label_tcr_db,
        low_confidence: !(tcr_db >= params.low_confidence_db),
        per_cell,
        dropped_cells: validated.dropped,
        svm_converged: model.converged,
        params: ResolvedParams {
            tds: tds_params,
            lbp: params.lbp,
            nu: params.qp.nu,
            kernel_bandwidth: bandwidth,
            qp_tolerance: params.qp.tolerance,
            qp_max_iters: params.qp.max_iters,
            exclude_secondary: params.exclude_secondary,
            low_confidence_db: params.low_confidence_db,
        },
    })
}

fn cell_err(cell_index: usize, e: &dyn fmt::Display) -> DetectError {
    DetectError::Cell {
        cell_index,
        message: e.to_string(),
    }
}

/// TCR of histogram `pos` against all the others.
fn tcr_of(histograms: &[LbpHistogram], pos: usize) -> Result<f64> {
    let rest: Vec<LbpHistogram> = histograms
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != pos)
        .map(|(_, h)| h.clone())
        .collect();
    lbp::tcr(&histograms[pos], &rest).map_err(|e| DetectError::Cell {
        cell_index: histograms[pos].cell_index,
        message: e.to_string(),
    })
}

/// Convenience: load a dataset from its manifest and detect.
pub fn detect_file(manifest_path: &Path, params: &DetectParams) -> Result<DetectionReport> {
    let (manifest, cells) = ingest::load_dataset(manifest_path)?;
    detect_dataset(&manifest, cells, params)
}

// ── Corpus evaluation ───────────────────────────────────────────────────────

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FileOutcome {
    pub manifest_path: String,
    pub report: Option<DetectionReport>,
    pub error: Option<String>,
    /// Group/polarization recovered from the manifest when available, so
    /// failed files still land in the right rate bucket.
    pub collection_year: Option<CollectionYear>,
    pub polarization: Option<Polarization>,
    pub has_primary_label: bool,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RateEntry {
    pub files: usize,
    pub correct: usize,
    pub rate: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorpusResult {
    pub schema: u32,
    pub per_file: Vec<FileOutcome>,
    /// Overall detection rate per polarization, over files with a known
    /// primary cell.
    pub detection_rate_by_pol: BTreeMap<Polarization, f64>,
    /// Per collection-style group, then polarization.
    pub rates_by_group: BTreeMap<CollectionYear, BTreeMap<Polarization, RateEntry>>,
    pub total_by_pol: BTreeMap<Polarization, RateEntry>,
    pub failed_files: usize,
}

impl CorpusResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("corpus result serializes")
    }
}

/// Detects every manifest and aggregates rates. Per-file failures are
/// recorded (and counted as incorrect when the file had a primary label),
/// never fatal.
pub fn evaluate_corpus(manifests: &[PathBuf], params: &DetectParams) -> Result<CorpusResult> {
    if manifests.is_empty() {
        return Err(DetectError::EmptyCorpus);
    }

    let per_file: Vec<FileOutcome> = manifests
        .par_iter()
        .map(|path| {
            let loaded = ingest::load_dataset(path);
            match loaded {
                Err(e) => FileOutcome {
                    manifest_path: path.display().to_string(),
                    report: None,
                    error: Some(e.to_string()),
                    collection_year: None,
                    polarization: None,
                    has_primary_label: false,
                },
                Ok((manifest, cells)) => {
                    let year = manifest.collection_year;
                    let pol = manifest.polarization;
                    let has_primary = manifest.primary_cell.is_some();
                    match detect_dataset(&manifest, cells, params) {
                        Ok(report) => FileOutcome {
                            manifest_path: path.display().to_string(),
                            report: Some(report),
                            error: None,
                            collection_year: Some(year),
                            polarization: Some(pol),
                            has_primary_label: has_primary,
                        },
                        Err(e) => FileOutcome {
                            manifest_path: path.display().to_string(),
                            report: None,
                            error: Some(e.to_string()),
                            collection_year: Some(year),
                            polarization: Some(pol),
                            has_primary_label: has_primary,
                        },
                    }
                }
            }
        })
        .collect();

    let mut rates_by_group: BTreeMap<CollectionYear, BTreeMap<Polarization, RateEntry>> =
        BTreeMap::new();
    let mut total_by_pol: BTreeMap<Polarization, RateEntry> = BTreeMap::new();
    let mut failed_files = 0;

    for outcome in &per_file {
        if outcome.error.is_some() {
            failed_files += 1;
        }
        if !outcome.has_primary_label {
            continue; // correctness undefined without a label
        }
        let (Some(year), Some(pol)) = (outcome.collection_year, outcome.polarization) else {
            continue;
        };
        let correct = outcome
            .report
            .as_ref()
            .and_then(|r| r.correct)
            .unwrap_or(false);
        for entry in [
            rates_by_group.entry(year).or_default().entry(pol).or_insert(RateEntry {
                files: 0,
                correct: 0,
                rate: 0.0,
            }),
            total_by_pol.entry(pol).or_insert(RateEntry {
                files: 0,
                correct: 0,
                rate: 0.0,
            }),
        ] {
            entry.files += 1;
            if correct {
                entry.correct += 1;
            }
        }
    }
    for group in rates_by_group.values_mut() {
        for entry in group.values_mut() {
            entry.rate = entry.correct as f64 / entry.files as f64;
        }
    }
    for entry in total_by_pol.values_mut() {
        entry.rate = entry.correct as f64 / entry.files as f64;
    }
    let detection_rate_by_pol = total_by_pol.iter().map(|(p, e)| (*p, e.rate)).collect();

    Ok(CorpusResult {
        schema: REPORT_SCHEMA,
        per_file,
        detection_rate_by_pol,
        rates_by_group,
        total_by_pol,
        failed_files,
    })
}

/// Aligned text table: one row per group x polarization, then totals.
pub fn render_corpus_table(result: &CorpusResult) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<14} {:<4} {:>6} {:>8} {:>6}\n",
        "group", "pol", "files", "correct", "rate"
    ));
    for (year, by_pol) in &result.rates_by_group {
        for (pol, entry) in by_pol {
            out.push_str(&format!(
                "{:<14} {:<4} {:>6} {:>8} {:>6.2}\n",
                year.to_string(),
                pol.to_string(),
                entry.files,
                entry.correct,
                entry.rate
            ));
        }
    }
    for (pol, entry) in &result.total_by_pol {
        out.push_str(&format!(
            "{:<14} {:<4} {:>6} {:>8} {:>6.2}\n",
            "total",
            pol.to_string(),
            entry.files,
            entry.correct,
            entry.rate
        ));
    }
    if result.failed_files > 0 {
        out.push_str(&format!("{} file(s) failed\n", result.failed_files));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{self, SynthConfig};

    fn quick_config(seed: u64) -> SynthConfig {
        SynthConfig {
            num_cells: 8,
            samples_per_cell: 16384,
            target_cell: 3,
            dataset_id: format!("quick-{seed}"),
            collection_year: CollectionYear::Custom,
            ..SynthConfig::y1993_style(seed)
        }
    }

    fn quick_params() -> DetectParams {
        DetectParams {
            segment_length: Some(256),
            ..DetectParams::default()
        }
    }

    #[test]
    fn detects_synthetic_target() {
        let (manifest, cells) = synth::generate(&quick_config(1)).unwrap();
        let report = detect_dataset(&manifest, cells, &quick_params()).unwrap();
        assert_eq!(report.verdict_cell, 3);
        assert_eq!(report.correct, Some(true));
        assert_eq!(report.per_cell.len(), 8);
        assert_eq!(report.per_cell[0].role, CellRole::Primary);
        assert!(report.label_tcr_db.is_some());
        // verdict == label here, so the two TCRs agree
        assert_eq!(report.tcr_db, report.label_tcr_db.unwrap());
        assert!(report.svm_converged);
        // ranked ascending by margin
        for w in report.per_cell.windows(2) {
            assert!(w[0].margin <= w[1].margin);
        }
    }

    #[test]
    fn report_json_roundtrips() {
        let (manifest, cells) = synth::generate(&quick_config(2)).unwrap();
        let report = detect_dataset(&manifest, cells, &quick_params()).unwrap();
        let json = report.to_json();
        assert!(json.contains("\"schema\": 1"));
        let back = DetectionReport::from_json(&json).unwrap();
        assert_eq!(back.verdict_cell, report.verdict_cell);
        assert_eq!(back.tcr_db.to_bits(), report.tcr_db.to_bits());
        assert_eq!(back.to_json(), json);
    }

    #[test]
    fn verdict_invariant_under_cell_scaling() {
        let (manifest, cells) = synth::generate(&quick_config(3)).unwrap();
        let base = detect_dataset(&manifest, cells.clone(), &quick_params()).unwrap();

        let mut scaled = cells;
        for (i, cell) in scaled.iter_mut().enumerate() {
            let factor = 0.25 + i as f64; // positive, different per cell
            for s in &mut cell.samples {
                *s *= factor;
            }
        }
        let rescaled = detect_dataset(&manifest, scaled, &quick_params()).unwrap();
        assert_eq!(base.verdict_cell, rescaled.verdict_cell);
        let order_a: Vec<usize> = base.per_cell.iter().map(|c| c.cell_index).collect();
        let order_b: Vec<usize> = rescaled.per_cell.iter().map(|c| c.cell_index).collect();
        assert_eq!(order_a, order_b);
    }

    #[test]
    fn verdict_invariant_under_cell_permutation() {
        let (manifest, cells) = synth::generate(&quick_config(4)).unwrap();
        let base = detect_dataset(&manifest, cells.clone(), &quick_params()).unwrap();

        // feed cells in a different order; indices stay attached
        let perm = [5usize, 0, 7, 3, 1, 6, 2, 4];
        let shuffled: Vec<_> = perm.iter().map(|&i| cells[i].clone()).collect();
        let permuted = detect_dataset(&manifest, shuffled, &quick_params()).unwrap();
        assert_eq!(base.verdict_cell, permuted.verdict_cell);
    }

    #[test]
    fn pipeline_is_deterministic() {
        let (manifest, cells) = synth::generate(&quick_config(5)).unwrap();
        let a = detect_dataset(&manifest, cells.clone(), &quick_params()).unwrap();
        let b = detect_dataset(&manifest, cells, &quick_params()).unwrap();
        assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn secondary_cells_are_dropped() {
        let (mut manifest, cells) = synth::generate(&quick_config(6)).unwrap();
        manifest.secondary_cells = vec![2, 4];
        let cells: Vec<RangeCellSeries> = cells
            .into_iter()
            .map(|mut c| {
                c.role = manifest.role_of(c.cell_index);
                c
            })
            .collect();
        let report = detect_dataset(&manifest, cells, &quick_params()).unwrap();
        assert_eq!(report.dropped_cells, vec![2, 4]);
        assert_eq!(report.per_cell.len(), 6);
        assert!(report.per_cell.iter().all(|c| c.cell_index != 2 && c.cell_index != 4));
    }

    #[test]
    fn nu_too_small_propagates() {
        let (manifest, cells) = synth::generate(&quick_config(7)).unwrap();
        let mut params = quick_params();
        params.qp.nu = 0.2; // m = 8 needs nu > 0.25
        match detect_dataset(&manifest, cells, &params) {
            Err(DetectError::Svm(SvmError::NuTooSmall { .. })) => {}
            other => panic!("expected NuTooSmall, got {other:?}"),
        }
    }

    #[test]
    fn short_dataset_rejected_against_segment_length() {
        let (manifest, cells) = synth::generate(&quick_config(8)).unwrap();
        let mut params = quick_params();
        params.segment_length = Some(16384); // w would be 1
        assert!(matches!(
            detect_dataset(&manifest, cells, &params),
            Err(DetectError::Params(_))
        ));
    }

    #[test]
    fn segment_length_auto_rule() {
        let p = DetectParams::default();
        assert_eq!(p.tds_params(1 << 17).segment_length, 512);
        assert_eq!(p.tds_params(60_000).segment_length, 256);
        assert_eq!(p.tds_params((1 << 17) - 1).segment_length, 256);
    }

    #[test]
    fn corpus_smoke_and_rates() {
        let dir = tempfile::tempdir().unwrap();
        let mut paths = Vec::new();
        for seed in 1..=3u64 {
            let (manifest, cells) = synth::generate(&quick_config(seed)).unwrap();
            let sub = dir.path().join(format!("d{seed}"));
            let path = ingest::write_dataset(&manifest, &cells, &sub).unwrap();
            paths.push(path);
        }
        let result = evaluate_corpus(&paths, &quick_params()).unwrap();
        assert_eq!(result.per_file.len(), 3);
        assert_eq!(result.failed_files, 0);
        let hh = result.detection_rate_by_pol.get(&Polarization::HH).unwrap();
        assert!(*hh >= 2.0 / 3.0, "rate {hh}");
        let table = render_corpus_table(&result);
        assert!(table.contains("total"));
        assert!(table.contains("HH"));
    }

    #[test]
    fn corpus_records_failures_without_aborting() {
        let dir = tempfile::tempdir().unwrap();
        let (manifest, cells) = synth::generate(&quick_config(1)).unwrap();
        let good = ingest::write_dataset(&manifest, &cells, &dir.path().join("good")).unwrap();
        let bad = dir.path().join("missing.json");
        let result = evaluate_corpus(&[bad, good], &quick_params()).unwrap();
        assert_eq!(result.failed_files, 1);
        assert_eq!(result.per_file.len(), 2);
        assert!(result.per_file[0].error.is_some());
        assert!(result.per_file[1].report.is_some());
    }

    #[test]
    fn empty_corpus_is_an_error() {
        assert!(matches!(
            evaluate_corpus(&[], &quick_params()),
            Err(DetectError::EmptyCorpus)
        ));
    }

    #[test]
    fn infinite_tcr_survives_json() {
        let (manifest, cells) = synth::generate(&quick_config(9)).unwrap();
        let mut report = detect_dataset(&manifest, cells, &quick_params()).unwrap();
        report.tcr_db = f64::INFINITY;
        report.label_tcr_db = Some(f64::NEG_INFINITY);
        let json = report.to_json();
        let back = DetectionReport::from_json(&json).unwrap();
        assert_eq!(back.tcr_db, f64::INFINITY);
        assert_eq!(back.label_tcr_db, Some(f64::NEG_INFINITY));
    }
}
