use std::fs;
use std::path::{Path, PathBuf};

use cavitrack_core::reconstruct::DEFAULT_DEGENERACY_THRESHOLD;
use cavitrack_core::thermometry::curve_minimum;
use cavitrack_core::transmission::coupling_detuning_scan;
use cavitrack_core::{
    degeneracy_scan, detuning_scan, estimate_temperature, expected_trace, fit_transit, lab_to_mode,
    position_scan, relative_amplitude, sample_counts, sample_ensemble, v_shape_curve,
    DetectorConfig, EnsembleRecord, LabPoint, Symmetry, SystemConfig, Trajectory, TransitTrace,
};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::io::{self, FitRecord, TemperatureRecord};
use crate::svg;

#[derive(Debug, Parser)]
#[command(
    name = "cavitrack",
    version,
    about = "Single-atom transits through a tilted cavity mode"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

/// Options shared by every command. Flags override the config file, which
/// overrides the built-in defaults.
#[derive(Debug, Args)]
pub struct Common {
    /// Flat `key = value` config file.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file; stdout when omitted (a directory for batch `fit`).
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Write the effective configuration to PATH before running.
    #[arg(long, global = true, value_name = "PATH")]
    pub dump_config: Option<PathBuf>,
    /// Set any config key, e.g. `--set window_end_us=400`. Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    /// Coupling constant of the TEM00 mode, MHz.
    #[arg(long, global = true)]
    pub g0: Option<f64>,
    /// Cavity field decay rate, MHz.
    #[arg(long, global = true)]
    pub kappa: Option<f64>,
    /// Atomic dipole decay rate, MHz.
    #[arg(long, global = true)]
    pub gamma: Option<f64>,
    /// Probe-atom detuning, MHz.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub delta_pa: Option<f64>,
    /// Cavity-atom detuning, MHz.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub delta_ca: Option<f64>,
    /// Transverse mode as `m,n`.
    #[arg(long, global = true, value_name = "M,N")]
    pub mode: Option<String>,
    /// Mode tilt in the lab plane, degrees.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub tilt: Option<f64>,
    /// Mode waist, μm.
    #[arg(long, global = true)]
    pub w0: Option<f64>,
    /// Detected count rate at unit transmission, counts/s.
    #[arg(long, global = true)]
    pub flux0: Option<f64>,
    /// Detector bin width, μs.
    #[arg(long, global = true)]
    pub bin_width: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample the relative mode amplitude on a lab-frame grid (CSV + SVG heatmap).
    ModeImage(ModeImageArgs),
    /// Transmission versus position or probe detuning.
    Scan(ScanArgs),
    /// Simulate one binned transit trace.
    Transit(TransitArgs),
    /// Maximum-likelihood fit of a counted trace, or of every trace in a directory.
    Fit(FitArgs),
    /// Compare a trajectory with its symmetry images.
    Degeneracy(DegeneracyArgs),
    /// Draw a thermal ensemble of arrivals at the mode.
    Ensemble(EnsembleArgs),
    /// Temperature from an ensemble CSV or a directory of fit results.
    Thermometry(ThermometryArgs),
}

#[derive(Debug, Args)]
pub struct ModeImageArgs {
    /// Half-width of the square grid, μm (default 3·w0).
    #[arg(long)]
    pub extent: Option<f64>,
    /// Grid points per axis.
    #[arg(long, default_value_t = 121)]
    pub n: usize,
    /// Heatmap output; defaults to the CSV path with an `.svg` extension.
    #[arg(long, value_name = "PATH")]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Axis {
    Position,
    Freq,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[arg(long, value_enum, default_value_t = Axis::Position)]
    pub axis: Axis,
    /// Scan start (μm or MHz); default −60 μm or −40 MHz.
    #[arg(long, allow_negative_numbers = true)]
    pub from: Option<f64>,
    /// Scan end (μm or MHz); default 60 μm or 40 MHz.
    #[arg(long, allow_negative_numbers = true)]
    pub to: Option<f64>,
    #[arg(long, default_value_t = 1201)]
    pub samples: usize,
    /// Vertical lab position for a frequency scan, μm.
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
    pub x: f64,
    /// Horizontal lab offset, μm.
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
    pub y: f64,
    /// Axial position from an antinode, nm.
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
    pub z: f64,
    /// Fixed effective coupling for a frequency scan, MHz, instead of a position.
    #[arg(long, conflicts_with_all = ["x", "y", "z"])]
    pub g: Option<f64>,
    /// Also draw the scan as an SVG line plot.
    #[arg(long, value_name = "PATH")]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TrajectoryArgs {
    /// Horizontal offset, μm.
    #[arg(long, allow_negative_numbers = true)]
    pub y: f64,
    /// Speed at the mode, m/s.
    #[arg(long)]
    pub v: f64,
    /// Crossing time, s.
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
    pub t_c: f64,
    /// Axial position from an antinode, nm.
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
    pub z: f64,
}

impl TrajectoryArgs {
    fn trajectory(&self) -> Trajectory {
        Trajectory {
            z_pos: self.z,
            ..Trajectory::new(self.y, self.v, self.t_c)
        }
    }
}

#[derive(Debug, Args)]
pub struct TransitArgs {
    #[command(flatten)]
    pub trajectory: TrajectoryArgs,
    /// Write the expected transmission only, with an empty counts column.
    #[arg(long)]
    pub no_counts: bool,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Trace CSV, or a directory of them.
    pub input: PathBuf,
    /// Take flux0 from the mean counts of the first and last five bins
    /// instead of the configuration.
    #[arg(long)]
    pub estimate_flux: bool,
}

#[derive(Debug, Args)]
pub struct DegeneracyArgs {
    #[command(flatten)]
    pub trajectory: TrajectoryArgs,
    /// Comma-separated subset of y-mirror, z-antinode-shift, z-mirror.
    #[arg(long, value_delimiter = ',')]
    pub transforms: Vec<String>,
    #[arg(long, default_value_t = DEFAULT_DEGENERACY_THRESHOLD)]
    pub threshold: f64,
}

#[derive(Debug, Args)]
pub struct EnsembleArgs {
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    /// MOT temperature, μK.
    #[arg(long, default_value_t = 186.0)]
    pub temperature_uk: f64,
}

#[derive(Debug, Args)]
pub struct ThermometryArgs {
    /// Ensemble CSV, or a directory of fit-result JSON files.
    pub input: PathBuf,
    /// `file,t_arr_ms` arrival times for a fit-result directory. Defaults to
    /// `arrivals.csv` inside it; without one each fit's `t_c_s` is used.
    #[arg(long, value_name = "PATH")]
    pub arrivals: Option<PathBuf>,
    /// Also write the binned V-curve `t_arr_ms,v_mean_mps`.
    #[arg(long, value_name = "PATH")]
    pub curve: Option<PathBuf>,
    #[arg(long, default_value_t = 40)]
    pub bins: usize,
}

impl Common {
    /// Defaults, then the config file, then `--set`, then typed flags.
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
                RunConfig::parse(&text)
                    .map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))?
            }
            None => RunConfig::default(),
        };
        for kv in &self.set {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| CliError::invalid(format!("--set expects KEY=VALUE, got `{kv}`")))?;
            cfg.set(k.trim(), v.trim())?;
        }
        let numbers = [
            (self.g0, &mut cfg.g0),
            (self.kappa, &mut cfg.kappa),
            (self.gamma, &mut cfg.gamma),
            (self.delta_pa, &mut cfg.delta_pa),
            (self.delta_ca, &mut cfg.delta_ca),
            (self.tilt, &mut cfg.tilt_deg),
            (self.w0, &mut cfg.w0_um),
            (self.flux0, &mut cfg.flux0),
            (self.bin_width, &mut cfg.bin_width_us),
        ];
        for (flag, slot) in numbers {
            if let Some(v) = flag {
                *slot = v;
            }
        }
        if let Some(mode) = &self.mode {
            cfg.set("mode", mode)?;
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(out) = &self.out {
            cfg.out = Some(out.clone());
        }
        Ok(cfg)
    }
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = cli.common.resolve()?;
    if let Some(path) = &cli.common.dump_config {
        fs::write(path, cfg.dump()).map_err(|e| CliError::io(path, e))?;
    }
    let system = cfg.system()?;
    if !system.rates.is_strong_coupling() {
        eprintln!(
            "warning: g0 = {} MHz is not above both kappa = {} and gamma = {}; the system is not strongly coupled",
            system.rates.g0, system.rates.kappa, system.rates.gamma
        );
    }
    let out = cfg.out.as_deref();
    match &cli.command {
        Command::ModeImage(a) => mode_image(&system, a, out),
        Command::Scan(a) => scan(&system, a, out),
        Command::Transit(a) => transit(&system, &cfg, a, out),
        Command::Fit(a) => fit(&system, &cfg, a, out),
        Command::Degeneracy(a) => degeneracy(&system, &cfg, a, out),
        Command::Ensemble(a) => ensemble(&cfg, a, out),
        Command::Thermometry(a) => thermometry(&cfg, a, out),
    }
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn mode_image(cfg: &SystemConfig, a: &ModeImageArgs, out: Option<&Path>) -> Result<(), CliError> {
    if a.n < 2 {
        return Err(CliError::invalid("--n must be at least 2"));
    }
    let extent = a.extent.unwrap_or(3.0 * cfg.geometry.w0);
    if !(extent > 0.0 && extent.is_finite()) {
        return Err(CliError::invalid("--extent must be positive"));
    }
    let theta = cfg.geometry.tilt_rad();
    let coord = |i: usize| -extent + 2.0 * extent * i as f64 / (a.n - 1) as f64;
    let mut rows = Vec::with_capacity(a.n * a.n);
    let mut intensity = Vec::with_capacity(a.n * a.n);
    for j in 0..a.n {
        let y = coord(j);
        for i in 0..a.n {
            let x = coord(i);
            let amp = relative_amplitude(
                cfg.mode,
                &cfg.geometry,
                lab_to_mode(LabPoint::new(x, y, 0.0), theta),
            );
            intensity.push(amp * amp);
            rows.push(vec![
                io::sci(x),
                io::sci(y),
                io::sci(amp),
                io::sci(amp * amp),
            ]);
        }
    }
    io::write_csv(out, &["x_um", "y_um", "amplitude", "intensity"], rows)?;
    let svg_path = a
        .svg
        .clone()
        .or_else(|| out.map(|p| p.with_extension("svg")));
    if let Some(path) = svg_path {
        let grid = svg::Grid {
            nx: a.n,
            ny: a.n,
            x_range: (-extent, extent),
            y_range: (-extent, extent),
            values: &intensity,
        };
        let title = format!(
            "TEM{}{} intensity, tilt {}°",
            cfg.mode.m, cfg.mode.n, cfg.geometry.tilt_deg
        );
        write_text(&path, &svg::heatmap(&grid, &title, "x (μm)", "y (μm)"))?;
    }
    Ok(())
}

fn scan(cfg: &SystemConfig, a: &ScanArgs, out: Option<&Path>) -> Result<(), CliError> {
    let (points, header, x_label) = match a.axis {
        Axis::Position => {
            if a.g.is_some() {
                return Err(CliError::invalid("--g applies to frequency scans only"));
            }
            let range = (a.from.unwrap_or(-60.0), a.to.unwrap_or(60.0));
            let pts = position_scan(cfg, a.y, range, a.samples)?;
            (pts, ["x_um", "T"], "x (μm)")
        }
        Axis::Freq => {
            let range = (a.from.unwrap_or(-40.0), a.to.unwrap_or(40.0));
            let pts = match a.g {
                Some(g) => coupling_detuning_scan(cfg, g, range, a.samples)?,
                None => detuning_scan(cfg, LabPoint::new(a.x, a.y, a.z), range, a.samples)?,
            };
            (pts, ["delta_pa_mhz", "T"], "Δpa (MHz)")
        }
    };
    let rows = points.iter().map(|&(x, t)| vec![io::sci(x), io::sci(t)]);
    io::write_csv(out, &header, rows)?;
    if let Some(path) = &a.svg {
        write_text(path, &svg::line_plot(&points, "Transmission", x_label, "T"))?;
    }
    Ok(())
}

fn transit(
    system: &SystemConfig,
    cfg: &RunConfig,
    a: &TransitArgs,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let det = cfg.detector()?;
    let trace = expected_trace(system, &a.trajectory.trajectory(), &det)?;
    let trace = if a.no_counts {
        trace
    } else {
        sample_counts(&trace, &det, cfg.seed)?
    };
    io::write_trace(out, &trace)
}

/// flux0 from the mean counts in the outermost bins, where the atom is far
/// from the mode.
fn edge_flux(trace: &TransitTrace, det: &DetectorConfig) -> Result<f64, CliError> {
    let edge = 5.min(trace.len() / 2);
    let n = trace.len();
    let counts: u64 = trace.counts[..edge]
        .iter()
        .chain(&trace.counts[n - edge..])
        .sum();
    let rate = counts as f64 / (2 * edge) as f64 / det.bin_seconds() - det.background;
    if !(rate > 0.0) {
        return Err(CliError::invalid(
            "no counts at the trace edges to estimate flux0",
        ));
    }
    Ok(rate)
}

/// Fits one trace file. Its bin spacing must match the configured bin width.
fn fit_file(
    system: &SystemConfig,
    det: &DetectorConfig,
    path: &Path,
    estimate_flux: bool,
) -> Result<FitRecord, CliError> {
    let trace = io::read_trace(path)?;
    if !trace.has_counts() {
        return Err(CliError::format(path, "the counts column is empty"));
    }
    let det = DetectorConfig {
        flux0: if estimate_flux {
            edge_flux(&trace, det)?
        } else {
            det.flux0
        },
        ..*det
    };
    let width = det.bin_seconds();
    if trace.len() >= 2 {
        let step = trace.t[1] - trace.t[0];
        if (step - width).abs() > 1e-6 * width {
            return Err(CliError::format(
                path,
                format!("bin spacing {step:e} s does not match bin_width_us"),
            ));
        }
    }
    let fit =
        fit_transit(system, &det, &trace).map_err(|e| CliError::format(path, e.to_string()))?;
    Ok(FitRecord::from(&fit))
}

fn fit(
    system: &SystemConfig,
    cfg: &RunConfig,
    a: &FitArgs,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let det = cfg.detector()?;
    if !a.input.is_dir() {
        let record = fit_file(system, &det, &a.input, a.estimate_flux)?;
        io::write_json(out, &record)?;
        if !record.converged {
            return Err(CliError::NotConverged(a.input.display().to_string()));
        }
        return Ok(());
    }
    let dir = out.ok_or_else(|| CliError::invalid("fitting a directory needs --out DIR"))?;
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut failed = Vec::new();
    for path in io::list_files(&a.input, "csv")? {
        let record = fit_file(system, &det, &path, a.estimate_flux)?;
        let stem = path.file_stem().unwrap_or_default();
        let target = dir.join(stem).with_extension("json");
        io::write_json(Some(&target), &record)?;
        if !record.converged {
            failed.push(path.display().to_string());
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::NotConverged(failed.join(", ")))
    }
}

fn degeneracy(
    system: &SystemConfig,
    cfg: &RunConfig,
    a: &DegeneracyArgs,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let det = cfg.detector()?;
    let transforms = if a.transforms.is_empty() {
        Symmetry::ALL.to_vec()
    } else {
        a.transforms
            .iter()
            .map(|t| t.trim().parse::<Symmetry>())
            .collect::<Result<Vec<_>, _>>()?
    };
    let reports = degeneracy_scan(
        system,
        &det,
        &a.trajectory.trajectory(),
        &transforms,
        a.threshold,
    )?;
    let rows = reports.iter().map(|r| {
        vec![
            r.transform.label().to_string(),
            io::sci(r.sup_diff),
            r.degenerate.to_string(),
        ]
    });
    io::write_csv(out, &["transform", "sup_diff", "degenerate"], rows)
}

fn ensemble(cfg: &RunConfig, a: &EnsembleArgs, out: Option<&Path>) -> Result<(), CliError> {
    let fc = cfg.fall()?;
    let records = sample_ensemble(
        &fc,
        a.temperature_uk * 1e-6,
        cfg.atom_mass_kg,
        a.n,
        cfg.seed,
    )?;
    io::write_ensemble(out, &records)
}

fn fitted_records(
    dir: &Path,
    arrivals: Option<&Path>,
    gravity: f64,
) -> Result<Vec<EnsembleRecord>, CliError> {
    let default_arrivals = dir.join("arrivals.csv");
    let arrivals = match arrivals {
        Some(p) => Some(io::read_arrivals(p)?),
        None if default_arrivals.is_file() => Some(io::read_arrivals(&default_arrivals)?),
        None => None,
    };
    io::list_files(dir, "json")?
        .iter()
        .map(|path| {
            let fit = io::read_fit(path)?;
            let name = path.file_name().unwrap_or_default().to_string_lossy();
            let t_arr = match &arrivals {
                Some(map) => *map
                    .get(name.as_ref())
                    .ok_or_else(|| CliError::invalid(format!("no arrival time for {name}")))?,
                None => fit.t_c_s * 1e3,
            };
            Ok(EnsembleRecord {
                v0: fit.v_mps - gravity * t_arr * 1e-3,
                t_arr,
                v_arr: fit.v_mps,
            })
        })
        .collect()
}

fn thermometry(cfg: &RunConfig, a: &ThermometryArgs, out: Option<&Path>) -> Result<(), CliError> {
    let fc = cfg.fall()?;
    let records = if a.input.is_dir() {
        fitted_records(&a.input, a.arrivals.as_deref(), fc.gravity)?
    } else {
        if a.arrivals.is_some() {
            return Err(CliError::invalid(
                "--arrivals applies to a directory of fit results",
            ));
        }
        io::read_ensemble(&a.input)?
    };
    let est = estimate_temperature(&records, &fc, cfg.atom_mass_kg)?;
    if let Some(path) = &a.curve {
        let curve = v_shape_curve(&records, a.bins)?;
        if let Some((t, v)) = curve_minimum(&curve) {
            eprintln!("V-curve minimum: {v:.5} m/s at {t:.3} ms");
        }
        let rows = curve.iter().map(|&(t, v)| vec![io::sci(t), io::sci(v)]);
        io::write_csv(Some(path), &["t_arr_ms", "v_mean_mps"], rows)?;
    }
    io::write_json(out, &TemperatureRecord::from(&est))
}
