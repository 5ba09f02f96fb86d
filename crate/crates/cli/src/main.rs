//! `cospli`: file-to-file pipeline stages for coincidence spectral imaging.

mod output;

use std::fs::File;
use std::io::{BufReader, BufWriter, IsTerminal, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cospli::correlate::{subtract_noise, Finalized};
use cospli::detect::{calibrate_regions, AccumulatedImage};
use cospli::io::{
    axes_sidecar, encode_ppm, sidecar_path, upscale_factor, FrameStreamHeader, FrameStreamReader,
    FrameStreamWriter, MatrixFile, RunConfig, SpectrumKind,
};
use cospli::pipeline::{accumulate_frames, correlate_frames};
use cospli::restore::{compare, fourier_filter};
use cospli::sim::simulate_stream;
use cospli::spectrum::{separable_joint, SpectralMarginal};
use cospli::{Calibration, Error, GateMode, Matrix, Result};

use output::{companion, Staged};

#[derive(Parser)]
#[command(name = "cospli", version, about = "Spectral correlation imaging of photon pairs")]
struct Cli {
    /// Run configuration (TOML). Built-in defaults when omitted.
    #[arg(long, short, global = true)]
    config: Option<PathBuf>,
    /// Suppress progress output on stderr.
    #[arg(long, short, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the effective configuration as TOML.
    Defaults,
    /// Evaluate a model joint spectrum.
    Model(ModelArgs),
    /// Generate a simulated frame stream.
    Simulate(SimulateArgs),
    /// Accumulate a stream and write a calibration.
    Calibrate(CalibrateArgs),
    /// Count coincidences in a stream.
    Correlate(CorrelateArgs),
    /// Fourier-filter a matrix.
    Restore(RestoreArgs),
    /// Compare two matrices.
    Compare(CompareArgs),
    /// Render a matrix as a PPM heatmap.
    Render(RenderArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Dependent,
    Independent,
    Filtered,
}

impl From<Kind> for SpectrumKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Dependent => SpectrumKind::Dependent,
            Kind::Independent => SpectrumKind::Independent,
            Kind::Filtered => SpectrumKind::Filtered,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    /// Short gate, one pump pulse per frame.
    Dependent,
    /// Long gate spanning many pulses.
    Independent,
}

#[derive(Clone, Copy, ValueEnum)]
enum Regions {
    Config,
    Auto,
}

#[derive(Clone, Copy, ValueEnum)]
enum NoiseModel {
    /// Outer product of the measured marginals.
    Product,
    /// Flat background.
    Uniform,
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long, value_enum, default_value = "dependent")]
    spectrum: Kind,
    /// Bin onto this calibration's segments instead of the configured one.
    #[arg(long)]
    calibration: Option<PathBuf>,
    /// Keep the per-pixel grid instead of binning to segments.
    #[arg(long, conflicts_with = "calibration")]
    pixels: bool,
    /// Output matrix; a CSV mirror is written beside it.
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, short = 'n')]
    frames: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Gate mode; the configured one when omitted.
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    #[arg(long, value_enum, default_value = "dependent")]
    spectrum: Kind,
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Args)]
struct CalibrateArgs {
    #[arg(long, short)]
    input: PathBuf,
    /// Where the two regions come from.
    #[arg(long, value_enum, default_value = "config")]
    regions: Regions,
    /// Calibration file to write.
    #[arg(long, short)]
    out: PathBuf,
    /// Mean accumulated image (matrix container).
    #[arg(long)]
    image: Option<PathBuf>,
}

#[derive(Args)]
struct CorrelateArgs {
    #[arg(long, short)]
    input: PathBuf,
    #[arg(long)]
    calibration: Option<PathBuf>,
    /// Raw normalized coincidence matrix; a CSV mirror is written beside it.
    #[arg(long, short)]
    out: PathBuf,
    /// Marginal distributions and single counts (CSV).
    #[arg(long)]
    marginals: Option<PathBuf>,
    /// Rate report file; the report is always printed to stdout.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Subtract an estimated accidental background.
    #[arg(long, value_enum)]
    subtract_noise: Option<NoiseModel>,
    /// Output for the background-subtracted matrix.
    #[arg(long, requires = "subtract_noise")]
    subtracted: Option<PathBuf>,
}

#[derive(Args)]
struct RestoreArgs {
    #[arg(long, short)]
    input: PathBuf,
    #[arg(long, short)]
    out: PathBuf,
    /// Passband radius in frequency bins.
    #[arg(long)]
    dc_radius: Option<f64>,
    /// Raised-cosine taper width in bins.
    #[arg(long)]
    taper: Option<f64>,
    /// Keep the zero-frequency row and column.
    #[arg(long)]
    keep_axis_lines: bool,
    /// Block-upsample by this factor before filtering.
    #[arg(long, default_value_t = 1)]
    upsample: usize,
}

#[derive(Args)]
struct CompareArgs {
    a: PathBuf,
    b: PathBuf,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct RenderArgs {
    #[arg(long, short)]
    input: PathBuf,
    /// Image path; axis labels go to a sidecar text file.
    #[arg(long, short)]
    out: PathBuf,
}

struct Progress {
    enabled: bool,
    label: &'static str,
}

impl Progress {
    fn new(quiet: bool, label: &'static str) -> Self {
        Self { enabled: !quiet && std::io::stderr().is_terminal(), label }
    }

    fn update(&self, n: u64) {
        if self.enabled {
            eprint!("\r{}: {n} frames", self.label);
        }
    }

    fn done(&self) {
        if self.enabled {
            eprintln!();
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = e.to_string().replace('\n', " ");
            eprintln!("error[{}]: {msg}", e.category());
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let cfg = match &cli.config {
        Some(p) => RunConfig::from_file(p)?,
        None => RunConfig::default(),
    };
    match cli.command {
        Command::Defaults => {
            print!("{}", cfg.to_toml());
            Ok(())
        }
        Command::Model(a) => model(&cfg, a),
        Command::Simulate(a) => simulate(cfg, a, cli.quiet),
        Command::Calibrate(a) => calibrate(&cfg, a, cli.quiet),
        Command::Correlate(a) => correlate(&cfg, a, cli.quiet),
        Command::Restore(a) => restore(&cfg, a),
        Command::Compare(a) => compare_cmd(a),
        Command::Render(a) => render(a),
    }
}

fn stage_matrix(staged: &mut Staged, m: &MatrixFile, path: &Path) -> Result<()> {
    staged.write(path, &m.encode())?;
    staged.write(&companion(path, "csv"), m.to_csv().as_bytes())
}

fn read_matrix(path: &Path) -> Result<MatrixFile> {
    MatrixFile::read(path)
}

fn model(cfg: &RunConfig, a: ModelArgs) -> Result<()> {
    let pixel = cfg.spectrum(a.spectrum.into())?;
    let out = if a.pixels {
        pixel
    } else {
        let cal = match &a.calibration {
            Some(p) => Calibration::read(p)?,
            None => cfg.calibration()?,
        };
        cal.bin_spectrum(&pixel)?
    };
    let mut staged = Staged::new();
    stage_matrix(&mut staged, &MatrixFile::from_spectrum(&out), &a.out)?;
    staged.commit()
}

fn simulate(mut cfg: RunConfig, a: SimulateArgs, quiet: bool) -> Result<()> {
    if a.frames == 0 {
        return Err(Error::InvalidParameter("--frames must be at least 1".into()));
    }
    if let Some(m) = a.mode {
        cfg.camera.gate_mode = match m {
            Mode::Dependent => GateMode::TimeDependent,
            Mode::Independent => GateMode::TimeIndependent,
        };
    }
    let sim = cfg.simulator(a.spectrum.into())?;
    let header = FrameStreamHeader::new(cfg.camera.width, cfg.camera.height, a.frames, cfg.camera.gate_mode, a.seed);
    let progress = Progress::new(quiet, "simulate");
    let mut staged = Staged::new();
    let file = staged.create(&a.out)?;
    let mut writer = FrameStreamWriter::new(BufWriter::new(file.as_file_mut()), header)?;
    simulate_stream(&sim, a.frames, a.seed, &mut writer, |n| progress.update(n))?;
    writer.finish()?.flush()?;
    progress.done();
    staged.commit()
}

fn open_stream(path: &Path) -> Result<FrameStreamReader<BufReader<File>>> {
    FrameStreamReader::new(BufReader::new(File::open(path)?))
}

fn calibrate(cfg: &RunConfig, a: CalibrateArgs, quiet: bool) -> Result<()> {
    let reader = open_stream(&a.input)?;
    let (w, h) = (reader.header().width as usize, reader.header().height as usize);
    let progress = Progress::new(quiet, "accumulate");
    let acc = accumulate_frames(reader, |n| progress.update(n))?;
    progress.done();
    let cal = match a.regions {
        Regions::Config => {
            let cal = cfg.calibration()?;
            if (cal.sensor_width, cal.sensor_height) != (w, h) {
                return Err(Error::ShapeMismatch {
                    expected: (cal.sensor_height, cal.sensor_width),
                    found: (h, w),
                });
            }
            cal
        }
        Regions::Auto => {
            let regions = calibrate_regions(&acc, cfg.map.signal.axis)?;
            Calibration::from_regions(&cfg.map, regions, cfg.segmentation.width_px, w, h)?
        }
    };
    let mut staged = Staged::new();
    staged.write(&a.out, cal.to_toml().as_bytes())?;
    if let Some(p) = &a.image {
        stage_matrix(&mut staged, &image_matrix(&acc)?, p)?;
    }
    staged.commit()
}

fn image_matrix(acc: &AccumulatedImage) -> Result<MatrixFile> {
    let rows = (0..acc.height).map(|y| y as f64).collect();
    let cols = (0..acc.width).map(|x| x as f64).collect();
    MatrixFile::new(rows, cols, acc.mean())
}

fn correlate(cfg: &RunConfig, a: CorrelateArgs, quiet: bool) -> Result<()> {
    let cal = match &a.calibration {
        Some(p) => Calibration::read(p)?,
        None => {
            return Err(Error::CalibrationMissing {
                path: "<none>".into(),
                reason: "correlate needs --calibration (produce one with `cospli calibrate`)".into(),
            })
        }
    };
    let reader = open_stream(&a.input)?;
    let progress = Progress::new(quiet, "correlate");
    let acc = correlate_frames(reader, &cal, &cfg.detection, |n| progress.update(n))?;
    progress.done();
    let report = acc.report();
    let fin = acc.finalize(&cal.grid()?)?;

    let mut staged = Staged::new();
    stage_matrix(&mut staged, &MatrixFile::from_spectrum(&fin.matrix.spectrum), &a.out)?;
    if let Some(p) = &a.marginals {
        staged.write(p, marginals_csv(&fin, acc.signal_hits(), acc.idler_hits()).as_bytes())?;
    }
    let mut text = report.to_text();
    if let Some(model) = a.subtract_noise {
        let raw = &fin.matrix.spectrum;
        let noise = match model {
            NoiseModel::Product => separable_joint(&fin.signal, &fin.idler)?,
            NoiseModel::Uniform => separable_joint(
                &SpectralMarginal::uniform(raw.grid().signal_nm().to_vec())?,
                &SpectralMarginal::uniform(raw.grid().idler_nm().to_vec())?,
            )?,
        };
        let (clean, lambda) = subtract_noise(raw, &noise, cfg.noise.noise_scale())?;
        text.push_str(&format!("noise_scale={lambda:.6e}\n"));
        let target = a.subtracted.clone().unwrap_or_else(|| companion(&a.out, "sub.cosm"));
        stage_matrix(&mut staged, &MatrixFile::from_spectrum(&clean), &target)?;
    }
    if let Some(p) = &a.report {
        staged.write(p, text.as_bytes())?;
    }
    staged.commit()?;
    print!("{text}");
    Ok(())
}

fn marginals_csv(fin: &Finalized, signal_hits: &[u64], idler_hits: &[u64]) -> String {
    let mut s = String::from("region,segment,wavelength_nm,probability,hits\n");
    for (name, m, hits) in [("signal", &fin.signal, signal_hits), ("idler", &fin.idler, idler_hits)] {
        for (k, ((nm, p), h)) in m.axis_nm().iter().zip(m.probabilities()).zip(hits).enumerate() {
            s.push_str(&format!("{name},{k},{nm},{p},{h}\n"));
        }
    }
    s
}

/// Axis of `k`-fold subcells of each segment centered on the original samples.
fn upsample_axis(axis: &[f64], k: usize) -> Vec<f64> {
    let pitch = |i: usize| match axis.len() {
        0 | 1 => 1.0,
        n => axis[(i + 1).min(n - 1)] - axis[i.min(n - 2)],
    };
    axis.iter()
        .enumerate()
        .flat_map(|(i, &c)| {
            let p = pitch(i);
            (0..k).map(move |j| c + ((j as f64 + 0.5) / k as f64 - 0.5) * p)
        })
        .collect()
}

fn restore(cfg: &RunConfig, a: RestoreArgs) -> Result<()> {
    if a.upsample == 0 {
        return Err(Error::InvalidParameter("--upsample must be at least 1".into()));
    }
    let mut mask = cfg.restore;
    if a.dc_radius.is_some() {
        mask.dc_radius = a.dc_radius;
    }
    if let Some(t) = a.taper {
        mask.taper = t;
    }
    if a.keep_axis_lines {
        mask.suppress_axis_lines = false;
    }
    mask.validate()?;
    let input = read_matrix(&a.input)?;
    let values = input.values.upsample(a.upsample);
    let filtered = fourier_filter(&values, &mask)?;
    let out = MatrixFile::new(
        upsample_axis(&input.row_axis, a.upsample),
        upsample_axis(&input.col_axis, a.upsample),
        filtered,
    )?;
    let mut staged = Staged::new();
    stage_matrix(&mut staged, &out, &a.out)?;
    staged.commit()
}

fn compare_cmd(a: CompareArgs) -> Result<()> {
    let (x, y) = (read_matrix(&a.a)?, read_matrix(&a.b)?);
    let text = compare(&x.values, &y.values)?.to_text();
    if let Some(p) = &a.report {
        let mut staged = Staged::new();
        staged.write(p, text.as_bytes())?;
        staged.commit()?;
    }
    print!("{text}");
    Ok(())
}

fn render(a: RenderArgs) -> Result<()> {
    let m = read_matrix(&a.input)?;
    let v: &Matrix = &m.values;
    let scale = upscale_factor(v.rows(), v.cols());
    let max = v.as_slice().iter().copied().fold(0.0, f64::max);
    let mut staged = Staged::new();
    staged.write(&a.out, &encode_ppm(v, scale))?;
    staged.write(&sidecar_path(&a.out), axes_sidecar(&m.row_axis, &m.col_axis, scale, max).as_bytes())?;
    staged.commit()
}
