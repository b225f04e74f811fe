//! Command-line surface: `gen`, `tds`, `features`, `detect`, `eval`,
//! `export-image`.
//!
//! Exit codes: 0 success, 2 per-file failures during `eval`, 64 usage
//! errors (including parameter preconditions like the `nu > 2/m` rule),
//! 65 data errors, 70 internal errors.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::detect::{self, DetectError, DetectParams};
use crate::ingest::{self, IngestError, Polarization};
use crate::lbp;
use crate::ocsvm::SvmError;
use crate::synth::{self, SynthConfig};
use crate::tds::{self, ImageFormat, MagnitudeScale, WindowKind};

pub const EXIT_OK: i32 = 0;
pub const EXIT_EVAL_PARTIAL: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DATA: i32 = 65;
pub const EXIT_INTERNAL: i32 = 70;

#[derive(Parser)]
#[command(
    name = "doptex",
    version,
    about = "Small-floating-target detection in sea clutter from time-Doppler texture",
    max_term_width = 100
)]
struct Cli {
    /// Worker threads for parallel stages (default: available cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a labeled synthetic dataset (manifest + I/Q binary).
    Gen(GenArgs),
    /// Render time-Doppler spectra images for a dataset's cells.
    Tds(TdsArgs),
    /// Emit per-cell LBP histograms as CSV.
    Features(FeaturesArgs),
    /// Detect the target cell in one dataset.
    Detect(DetectArgs),
    /// Evaluate detection rate over a corpus of manifests.
    Eval(EvalArgs),
    /// Export one cell's TDS image to a PGM or PNG file.
    ExportImage(ExportImageArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum WindowArg {
    Hamming,
    Rectangular,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScaleArg {
    Db,
    Linear,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Pgm,
    Png,
}

#[derive(Clone, Copy, ValueEnum)]
enum StyleArg {
    Y1993,
    Y1998,
}

#[derive(Clone, Copy, ValueEnum)]
enum PolArg {
    Hh,
    Hv,
    Vh,
    Vv,
}

impl From<PolArg> for Polarization {
    fn from(p: PolArg) -> Self {
        match p {
            PolArg::Hh => Polarization::HH,
            PolArg::Hv => Polarization::HV,
            PolArg::Vh => Polarization::VH,
            PolArg::Vv => Polarization::VV,
        }
    }
}

/// Spectra construction flags shared by every image-consuming subcommand.
#[derive(Args)]
struct TdsFlags {
    /// Segment length l (power of two). Default: 512, or 256 for datasets
    /// with fewer than 131072 samples per cell.
    #[arg(long)]
    segment_length: Option<usize>,
    /// Doppler bins h of the image; must divide l.
    #[arg(long, default_value_t = 64)]
    height: usize,
    #[arg(long, value_enum, default_value = "hamming")]
    window: WindowArg,
    #[arg(long, value_enum, default_value = "db")]
    scale: ScaleArg,
}

impl TdsFlags {
    fn apply(&self, params: &mut DetectParams) {
        params.segment_length = self.segment_length;
        params.height = self.height;
        params.window = match self.window {
            WindowArg::Hamming => WindowKind::Hamming,
            WindowArg::Rectangular => WindowKind::Rectangular,
        };
        params.magnitude_scale = match self.scale {
            ScaleArg::Db => MagnitudeScale::Db,
            ScaleArg::Linear => MagnitudeScale::Linear,
        };
    }
}

/// Classifier flags shared by `detect` and `eval`.
#[derive(Args)]
struct SvmFlags {
    /// Outlier-fraction parameter; must exceed 2/m for m trained cells.
    #[arg(long, default_value_t = 0.4)]
    nu: f64,
    /// Gaussian kernel bandwidth, or "auto" for 1/m.
    #[arg(long, default_value = "auto")]
    bandwidth: String,
    /// Drop secondary-role cells before training.
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    exclude_secondary: bool,
}

impl SvmFlags {
    fn apply(&self, params: &mut DetectParams) -> Result<(), String> {
        params.qp.nu = self.nu;
        params.exclude_secondary = self.exclude_secondary;
        params.kernel_bandwidth = match self.bandwidth.as_str() {
            "auto" => None,
            value => match value.parse::<f64>() {
                Ok(v) if v > 0.0 && v.is_finite() => Some(v),
                _ => {
                    return Err(format!(
                        "--bandwidth must be \"auto\" or a positive number, got {value:?}"
                    ))
                }
            },
        };
        Ok(())
    }
}

#[derive(Args)]
struct GenArgs {
    /// RNG seed; mandatory so every dataset is reproducible.
    #[arg(long)]
    seed: u64,
    /// Output directory for manifest.json and samples.iq.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "y1993")]
    style: StyleArg,
    #[arg(long)]
    num_cells: Option<usize>,
    #[arg(long)]
    samples_per_cell: Option<usize>,
    #[arg(long)]
    target_cell: Option<usize>,
    #[arg(long)]
    prf: Option<f64>,
    #[arg(long)]
    clutter_halfwidth: Option<f64>,
    #[arg(long)]
    drift_period: Option<f64>,
    /// Target burst arrivals per second; 0 generates a target-free primary.
    #[arg(long)]
    speckle_rate: Option<f64>,
    #[arg(long)]
    speckle_band_lo: Option<f64>,
    #[arg(long)]
    speckle_band_hi: Option<f64>,
    /// Noise floor in dB relative to unit tone amplitude.
    #[arg(long)]
    noise_floor_db: Option<f64>,
    #[arg(long, value_enum)]
    polarization: Option<PolArg>,
    #[arg(long)]
    dataset_id: Option<String>,
}

#[derive(Args)]
struct TdsArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// Output directory; images are written as cell_<index>.<ext>.
    #[arg(long)]
    out: PathBuf,
    /// Render only this cell.
    #[arg(long)]
    cell: Option<usize>,
    #[arg(long, value_enum, default_value = "pgm")]
    format: FormatArg,
    #[command(flatten)]
    tds: TdsFlags,
}

#[derive(Args)]
struct FeaturesArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// CSV output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    tds: TdsFlags,
}

#[derive(Args)]
struct DetectArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// Emit the machine-readable JSON report instead of the table.
    #[arg(long)]
    json: bool,
    #[command(flatten)]
    tds: TdsFlags,
    #[command(flatten)]
    svm: SvmFlags,
}

#[derive(Args)]
struct EvalArgs {
    /// Manifest paths of the corpus.
    #[arg(required = true)]
    manifests: Vec<PathBuf>,
    #[arg(long)]
    json: bool,
    #[command(flatten)]
    tds: TdsFlags,
    #[command(flatten)]
    svm: SvmFlags,
}

#[derive(Args)]
struct ExportImageArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    cell: usize,
    /// Output file; format follows the extension (.pgm or .png).
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    tds: TdsFlags,
}

// ── Dispatch ────────────────────────────────────────────────────────────────

/// Parses `argv` and runs; returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return code;
        }
    };

    let body = || match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Tds(args) => cmd_tds(args),
        Command::Features(args) => cmd_features(args),
        Command::Detect(args) => cmd_detect(args),
        Command::Eval(args) => cmd_eval(args),
        Command::ExportImage(args) => cmd_export_image(args),
    };

    let outcome = match cli.threads {
        Some(n) if n > 0 => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(body),
            Err(e) => {
                eprintln!("doptex: failed to build thread pool: {e}");
                return EXIT_INTERNAL;
            }
        },
        Some(_) => {
            eprintln!("doptex: --threads must be positive");
            return EXIT_USAGE;
        }
        None => body(),
    };

    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("doptex: {e}");
            exit_code_for(&e)
        }
    }
}

/// Classifies an error: violated preconditions and parameter rules are
/// usage errors, everything touching the data is a data error.
fn exit_code_for(e: &DetectError) -> i32 {
    match e {
        DetectError::Svm(SvmError::NuTooSmall { .. }) => EXIT_USAGE,
        DetectError::Svm(_) => EXIT_DATA,
        DetectError::Params(_) => EXIT_USAGE,
        DetectError::EmptyCorpus => EXIT_USAGE,
        DetectError::Ingest(_) | DetectError::Cell { .. } => EXIT_DATA,
    }
}

fn data_err(e: impl std::fmt::Display) -> DetectError {
    DetectError::Ingest(IngestError::ManifestParse(e.to_string()))
}

type CmdResult = Result<i32, DetectError>;

fn cmd_gen(args: GenArgs) -> CmdResult {
    let mut config = match args.style {
        StyleArg::Y1993 => SynthConfig::y1993_style(args.seed),
        StyleArg::Y1998 => SynthConfig::y1998_style(args.seed),
    };
    if let Some(v) = args.num_cells {
        config.num_cells = v;
    }
    if let Some(v) = args.samples_per_cell {
        config.samples_per_cell = v;
    }
    if let Some(v) = args.target_cell {
        config.target_cell = v;
    }
    if let Some(v) = args.prf {
        config.prf = v;
    }
    if let Some(v) = args.clutter_halfwidth {
        config.clutter_band_halfwidth = v;
    }
    if let Some(v) = args.drift_period {
        config.clutter_drift_period = v;
    }
    if let Some(v) = args.speckle_rate {
        config.target_speckle_rate = v;
    }
    if let Some(v) = args.speckle_band_lo {
        config.target_speckle_band.0 = v;
    }
    if let Some(v) = args.speckle_band_hi {
        config.target_speckle_band.1 = v;
    }
    if let Some(v) = args.noise_floor_db {
        config.noise_floor = 10f64.powf(v / 20.0);
    }
    if let Some(p) = args.polarization {
        config.polarization = p.into();
    }
    if let Some(id) = args.dataset_id {
        config.dataset_id = id;
    }

    let (manifest, cells) =
        synth::generate(&config).map_err(|e| DetectError::Params(e.to_string()))?;
    let path = ingest::write_dataset(&manifest, &cells, &args.out)?;
    println!(
        "wrote {} ({} cells x {} samples, primary cell {})",
        path.display(),
        manifest.num_cells,
        manifest.samples_per_cell,
        manifest.primary_cell.expect("synth sets primary")
    );
    Ok(EXIT_OK)
}

fn cmd_tds(args: TdsArgs) -> CmdResult {
    let mut params = DetectParams::default();
    args.tds.apply(&mut params);
    let (manifest, cells) = ingest::load_dataset(&args.manifest)?;
    let tds_params = params.tds_params(manifest.samples_per_cell);
    tds_params.validate().map_err(|e| DetectError::Params(e.to_string()))?;

    let (format, ext) = match args.format {
        FormatArg::Pgm => (ImageFormat::Pgm, "pgm"),
        FormatArg::Png => (ImageFormat::Png, "png"),
    };
    std::fs::create_dir_all(&args.out).map_err(|e| DetectError::Ingest(e.into()))?;

    let selected: Vec<_> = match args.cell {
        Some(i) => {
            let cell = cells
                .into_iter()
                .find(|c| c.cell_index == i)
                .ok_or_else(|| data_err(format!("cell {i} not in dataset")))?;
            vec![cell]
        }
        None => cells,
    };
    for cell in &selected {
        let img = tds::build_tds(cell, &tds_params)
            .map_err(|e| DetectError::Cell { cell_index: cell.cell_index, message: e.to_string() })?;
        let path = args.out.join(format!("cell_{:02}.{ext}", cell.cell_index));
        tds::export_image(&img, &path, format)
            .map_err(|e| DetectError::Cell { cell_index: cell.cell_index, message: e.to_string() })?;
        println!("wrote {}", path.display());
    }
    Ok(EXIT_OK)
}

fn cmd_features(args: FeaturesArgs) -> CmdResult {
    let mut params = DetectParams::default();
    args.tds.apply(&mut params);
    let (manifest, cells) = ingest::load_dataset(&args.manifest)?;
    let tds_params = params.tds_params(manifest.samples_per_cell);
    tds_params.validate().map_err(|e| DetectError::Params(e.to_string()))?;

    let mut histograms = Vec::with_capacity(cells.len());
    for cell in &cells {
        let img = tds::build_tds(cell, &tds_params)
            .map_err(|e| DetectError::Cell { cell_index: cell.cell_index, message: e.to_string() })?;
        let hist = lbp::lbp_histogram(&img, &params.lbp)
            .map_err(|e| DetectError::Cell { cell_index: cell.cell_index, message: e.to_string() })?;
        histograms.push(hist);
    }

    match args.out {
        Some(path) => {
            let mut file = std::fs::File::create(&path).map_err(|e| DetectError::Ingest(e.into()))?;
            lbp::write_histograms_csv(&mut file, &histograms)
                .map_err(|e| DetectError::Ingest(e.into()))?;
            println!("wrote {}", path.display());
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            lbp::write_histograms_csv(&mut stdout, &histograms)
                .map_err(|e| DetectError::Ingest(e.into()))?;
        }
    }
    Ok(EXIT_OK)
}

fn cmd_detect(args: DetectArgs) -> CmdResult {
    let mut params = DetectParams::default();
    args.tds.apply(&mut params);
    args.svm.apply(&mut params).map_err(DetectError::Params)?;

    let report = detect::detect_file(&args.manifest, &params)?;
    if args.json {
        println!("{}", report.to_json());
    } else {
        print_report(&report);
    }
    Ok(EXIT_OK)
}

fn print_report(report: &detect::DetectionReport) {
    println!("dataset    : {} ({})", report.dataset_id, report.polarization);
    println!(
        "cells      : {} trained, {} excluded",
        report.per_cell.len(),
        report.dropped_cells.len()
    );
    let label = match report.correct {
        Some(true) => "  [correct]",
        Some(false) => "  [WRONG]",
        None => "  [unlabeled]",
    };
    println!("verdict    : cell {}{label}", report.verdict_cell);
    match report.label_tcr_db {
        Some(l) => println!("tcr        : {:.2} dB (verdict)  {:.2} dB (label)", report.tcr_db, l),
        None => println!("tcr        : {:.2} dB (verdict)", report.tcr_db),
    }
    println!(
        "confidence : {}",
        if report.low_confidence {
            "LOW_CONFIDENCE (TCR below threshold)"
        } else {
            "ok"
        }
    );
    println!("{:>4} {:>5} {:>13} {:>13}  role", "rank", "cell", "margin", "distance^2");
    for (rank, c) in report.per_cell.iter().enumerate() {
        println!(
            "{:>4} {:>5} {:>13.6e} {:>13.6e}  {}",
            rank + 1,
            c.cell_index,
            c.margin,
            c.distance_sq,
            c.role
        );
    }
}

fn cmd_eval(args: EvalArgs) -> CmdResult {
    let mut params = DetectParams::default();
    args.tds.apply(&mut params);
    args.svm.apply(&mut params).map_err(DetectError::Params)?;

    let result = detect::evaluate_corpus(&args.manifests, &params)?;
    if args.json {
        println!("{}", result.to_json());
    } else {
        print!("{}", detect::render_corpus_table(&result));
    }
    Ok(if result.failed_files > 0 {
        EXIT_EVAL_PARTIAL
    } else {
        EXIT_OK
    })
}

fn cmd_export_image(args: ExportImageArgs) -> CmdResult {
    let mut params = DetectParams::default();
    args.tds.apply(&mut params);
    let format = ImageFormat::from_path(&args.out).ok_or_else(|| {
        DetectError::Params(format!(
            "cannot infer image format from {:?}: use a .pgm or .png extension",
            args.out
        ))
    })?;

    let (manifest, cells) = ingest::load_dataset(&args.manifest)?;
    let tds_params = params.tds_params(manifest.samples_per_cell);
    tds_params.validate().map_err(|e| DetectError::Params(e.to_string()))?;
    let cell = cells
        .into_iter()
        .find(|c| c.cell_index == args.cell)
        .ok_or_else(|| data_err(format!("cell {} not in dataset", args.cell)))?;
    let img = tds::build_tds(&cell, &tds_params)
        .map_err(|e| DetectError::Cell { cell_index: args.cell, message: e.to_string() })?;
    tds::export_image(&img, &args.out, format)
        .map_err(|e| DetectError::Cell { cell_index: args.cell, message: e.to_string() })?;
    println!("wrote {}", args.out.display());
    Ok(EXIT_OK)
}
