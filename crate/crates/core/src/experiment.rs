//! Experiment configuration, initial data and on-disk outputs.
//!
//! A run directory holds exactly one `manifest.jsonl` (config echo first,
//! then one line per sample and a closing termination line) next to the CSV
//! products. Everything is written with shortest round-trip float formatting
//! and no timestamps, so identical configs give identical bytes.

use std::fmt;
use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::diagnostics::{build_decay_report, report_rows, torus_window, DecayReport, ReportKind};
use crate::integrator::{run_simulation_with, EnergySample, MonitorConfig, RunRecord, Scheme, SchemeConfig};
use crate::kernel::{write_norm_rows, NormRow, NormSeries};
use crate::spectral::{random_band_state, to_physical, LpExponent, PhysicalState, WavenumberLattice};
use crate::{Error, Result, ViscosityParams};

pub const MANIFEST_FILE: &str = "manifest.jsonl";
pub const NORMS_FILE: &str = "norms.csv";
pub const DECAY_FILE: &str = "decay_report.csv";
pub const FINAL_STATE_FILE: &str = "final_state.csv";

/// Default admissible `|α − 1|`.
pub const DEFAULT_DELTA: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSection {
    pub mu: f64,
    pub lambda_bulk: f64,
    pub alpha: f64,
    pub gamma: f64,
    /// smallness budget for `|α − 1|` (reported, not enforced)
    #[serde(default = "default_delta")]
    pub delta: f64,
}

fn default_delta() -> f64 {
    DEFAULT_DELTA
}

impl ParamsSection {
    pub fn viscosity(&self) -> Result<ViscosityParams> {
        ViscosityParams::new(self.mu, self.lambda_bulk, self.alpha, self.gamma)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub n: usize,
    pub box_length: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSection {
    #[serde(default = "default_scheme")]
    pub scheme: Scheme,
    pub dt: f64,
    pub t_end: f64,
    pub cadence: usize,
    #[serde(default)]
    pub linear_only: bool,
}

fn default_scheme() -> Scheme {
    Scheme::Etdrk2
}

impl TimeSection {
    pub fn scheme_config(&self) -> SchemeConfig {
        SchemeConfig {
            scheme: self.scheme,
            dt: self.dt,
            t_end: self.t_end,
            cadence: self.cadence,
            linear_only: self.linear_only,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitKind {
    GaussianBump,
    HfPacket,
    RandomBand,
}

impl fmt::Display for InitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InitKind::GaussianBump => "gaussian_bump",
            InitKind::HfPacket => "hf_packet",
            InitKind::RandomBand => "random_band",
        })
    }
}

impl FromStr for InitKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian_bump" => Ok(InitKind::GaussianBump),
            "hf_packet" => Ok(InitKind::HfPacket),
            "random_band" => Ok(InitKind::RandomBand),
            other => Err(Error::config(format!("unknown initial-data kind `{other}`"))),
        }
    }
}

/// Initial data.
///
/// * `gaussian_bump`: `amplitude` is ε, `width_or_wavenumber` is σ.
/// * `hf_packet`: `width_or_wavenumber` is K; the density is
///   `amplitude·K⁻²·sin(K x₁)` under a Gaussian envelope of width `L/8`.
/// * `random_band`: `amplitude` is the target `‖V₀‖_{L²}`, `band` the
///   wavenumber shell (defaults to `[2, 4]` fundamentals).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitSection {
    pub kind: InitKind,
    pub amplitude: f64,
    #[serde(default)]
    pub width_or_wavenumber: Option<f64>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub band: Option<[f64; 2]>,
    #[serde(default)]
    pub center: Option<[f64; 3]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Norms,
    DecayReport,
    FinalState,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default)]
    pub directory: Option<PathBuf>,
    #[serde(default = "default_formats")]
    pub formats: Vec<OutputFormat>,
}

fn default_formats() -> Vec<OutputFormat> {
    vec![OutputFormat::Norms, OutputFormat::DecayReport, OutputFormat::FinalState]
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection { directory: None, formats: default_formats() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub params: ParamsSection,
    pub grid: GridSection,
    pub time: TimeSection,
    pub init: InitSection,
    #[serde(default)]
    pub monitors: MonitorConfig,
    #[serde(default)]
    pub output: OutputSection,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_toml_str(&fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        self.params.viscosity()?;
        if !(self.params.delta > 0.0) {
            return Err(Error::config("params.delta must be positive"));
        }
        self.lattice()?;
        self.time.scheme_config().validate()?;
        self.monitors.validate()?;
        let init = &self.init;
        if !(init.amplitude > 0.0 && init.amplitude.is_finite()) {
            return Err(Error::config(format!("init.amplitude must be positive, got {}", init.amplitude)));
        }
        match init.kind {
            InitKind::GaussianBump | InitKind::HfPacket => {
                if !init.width_or_wavenumber.is_some_and(|w| w > 0.0 && w.is_finite()) {
                    return Err(Error::config(format!("{} needs a positive init.width_or_wavenumber", init.kind)));
                }
            }
            InitKind::RandomBand => {
                if init.seed.is_none() {
                    return Err(Error::config("random_band needs init.seed"));
                }
                if let Some([lo, hi]) = init.band {
                    if !(lo >= 0.0 && hi > lo) {
                        return Err(Error::config(format!("init.band [{lo}, {hi}] is empty")));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn lattice(&self) -> Result<WavenumberLattice> {
        WavenumberLattice::new(self.grid.n, self.grid.box_length)
    }

    /// `|α − 1|`
    pub fn alpha_deviation(&self) -> f64 {
        (self.params.alpha - 1.0).abs()
    }

    pub fn report_kind(&self) -> ReportKind {
        if self.time.linear_only {
            ReportKind::Linear
        } else {
            ReportKind::Nonlinear
        }
    }

    /// Fit window of the decay report.
    pub fn window(&self) -> Result<(f64, f64)> {
        let (lo, hi) = torus_window(self.grid.box_length, self.params.viscosity()?.nu());
        Ok((lo, hi.min(self.time.t_end)))
    }
}

fn periodized_gaussian(lattice: &WavenumberLattice, center: [f64; 3], width: f64) -> Vec<[f64; 4]> {
    // each entry: (e, (x−c)·e) with e the summed image Gaussian
    let l = lattice.box_length();
    (0..lattice.len())
        .map(|idx| {
            let x = lattice.point(idx);
            let mut acc = [0.0; 4];
            for a in -1..=1 {
                for b in -1..=1 {
                    for c in -1..=1 {
                        let d = [
                            x[0] - center[0] + a as f64 * l,
                            x[1] - center[1] + b as f64 * l,
                            x[2] - center[2] + c as f64 * l,
                        ];
                        let e = (-(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]) / (width * width)).exp();
                        acc[0] += e;
                        for i in 0..3 {
                            acc[i + 1] += d[i] * e;
                        }
                    }
                }
            }
            acc
        })
        .collect()
}

/// Builds the initial state described by `init`.
pub fn generate_initial(init: &InitSection, lattice: &WavenumberLattice) -> Result<PhysicalState> {
    let l = lattice.box_length();
    let center = init.center.unwrap_or([0.5 * l; 3]);
    let eps = init.amplitude;
    let state = match init.kind {
        InitKind::GaussianBump => {
            let sigma = init.width_or_wavenumber.ok_or_else(|| Error::config("gaussian_bump needs a width"))?;
            let g = periodized_gaussian(lattice, center, sigma);
            PhysicalState {
                rho: g.iter().map(|v| eps * v[0]).collect(),
                velocity: [1, 2, 3].map(|i| g.iter().map(|v| eps * v[i] / sigma).collect()),
            }
        }
        InitKind::HfPacket => {
            let k = init.width_or_wavenumber.ok_or_else(|| Error::config("hf_packet needs a wavenumber"))?;
            let resolvable = lattice.n() as f64 / 3.0 * lattice.fundamental();
            if k > resolvable {
                return Err(Error::config(format!("wavenumber K = {k} exceeds the resolvable {resolvable}")));
            }
            let g = periodized_gaussian(lattice, center, l / 8.0);
            let rho =
                (0..lattice.len()).map(|idx| eps * (k * lattice.point(idx)[0]).sin() * g[idx][0] / (k * k)).collect();
            PhysicalState {
                rho,
                velocity: [vec![0.0; lattice.len()], vec![0.0; lattice.len()], vec![0.0; lattice.len()]],
            }
        }
        InitKind::RandomBand => {
            let seed = init.seed.ok_or_else(|| Error::config("random_band needs a seed"))?;
            let k0 = lattice.fundamental();
            random_band_state(lattice, init.band.unwrap_or([2.0 * k0, 4.0 * k0]), eps, seed)?
        }
    };
    let min = state.min_density();
    if !(min > crate::nonlinear::VACUUM_FLOOR) {
        return Err(Error::config(format!("initial data reaches vacuum: min(1+ϱ) = {min}")));
    }
    Ok(state)
}

/// First line of every manifest.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestHeader {
    pub command: String,
    pub version: String,
    pub config: ExperimentConfig,
    pub seeds: Vec<u64>,
    pub alpha_deviation: f64,
    pub within_delta: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "snake_case")]
pub enum ManifestLine {
    Header(Box<ManifestHeader>),
    Sample {
        bundle: crate::diagnostics::NormBundle,
        apriori: crate::diagnostics::AprioriStatus,
    },
    Energy(EnergySample),
    Termination {
        termination: crate::integrator::Termination,
        steps_taken: usize,
        t_final: f64,
        mass_initial: f64,
        mass_final: f64,
        max_abs_residual: f64,
    },
}

impl ManifestHeader {
    pub fn new(command: &str, config: &ExperimentConfig) -> Self {
        let dev = config.alpha_deviation();
        ManifestHeader {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config: config.clone(),
            seeds: config.init.seed.into_iter().collect(),
            alpha_deviation: dev,
            within_delta: dev <= config.params.delta,
        }
    }
}

fn write_json_line<W: Write, T: Serialize>(w: &mut W, value: &T) -> Result<()> {
    serde_json::to_writer(&mut *w, value)?;
    writeln!(w)?;
    Ok(())
}

/// Creates `dir` and writes the manifest header, refusing to overwrite an
/// existing manifest.
pub fn start_manifest(dir: &Path, header: &ManifestHeader) -> Result<()> {
    fs::create_dir_all(dir)?;
    let path = dir.join(MANIFEST_FILE);
    if path.exists() {
        return Err(Error::config(format!("{} already exists", path.display())));
    }
    let mut w = BufWriter::new(File::create(path)?);
    write_json_line(&mut w, &ManifestLine::Header(Box::new(header.clone())))?;
    w.flush()?;
    Ok(())
}

fn append_manifest(dir: &Path, record: &RunRecord) -> Result<()> {
    let file = fs::OpenOptions::new().append(true).open(dir.join(MANIFEST_FILE))?;
    let mut w = BufWriter::new(file);
    for (bundle, apriori) in record.samples.iter().zip(&record.apriori) {
        write_json_line(&mut w, &ManifestLine::Sample { bundle: bundle.clone(), apriori: *apriori })?;
    }
    for e in &record.energy {
        write_json_line(&mut w, &ManifestLine::Energy(*e))?;
    }
    write_json_line(
        &mut w,
        &ManifestLine::Termination {
            termination: record.termination.clone(),
            steps_taken: record.steps_taken,
            t_final: record.t_final,
            mass_initial: record.mass_initial,
            mass_final: record.mass_final,
            max_abs_residual: record.max_abs_residual(),
        },
    )?;
    w.flush()?;
    Ok(())
}

pub const BOX_PIPELINE: &str = "box_run";

fn norm_rows(record: &RunRecord) -> Vec<NormRow> {
    let mut rows = Vec::new();
    for b in record.samples.iter().filter(|b| b.t > 0.0) {
        for (label, _, _, value) in b.series_entries() {
            rows.push(NormRow {
                label,
                t: b.t,
                value,
                pipeline: BOX_PIPELINE.to_string(),
                truncation_quality: b.resolved_fraction,
            });
        }
    }
    rows
}

/// Reads `norms.csv` back into series (labels in first-seen order).
pub fn read_norm_series(path: &Path) -> Result<Vec<NormSeries>> {
    let reader = BufReader::new(File::open(path)?);
    let mut series: Vec<NormSeries> = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if i == 0 {
            if line != crate::kernel::NORM_HEADER {
                return Err(Error::config(format!("{}: unexpected header `{line}`", path.display())));
            }
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 5 {
            return Err(Error::config(format!("{}:{}: expected 5 columns", path.display(), i + 1)));
        }
        let parse = |s: &str| -> Result<f64> {
            s.parse().map_err(|_| Error::config(format!("{}:{}: bad number `{s}`", path.display(), i + 1)))
        };
        let (label, t, value) = (cols[0], parse(cols[1])?, parse(cols[2])?);
        let pos = match series.iter().position(|s| s.label == label) {
            Some(p) => p,
            None => {
                let (p, k) = parse_label(label)?;
                series.push(NormSeries::empty(label, p, k));
                series.len() - 1
            }
        };
        series[pos].push(t, value)?;
    }
    Ok(series)
}

/// Inverse of [`crate::diagnostics::norm_label`].
fn parse_label(label: &str) -> Result<(LpExponent, usize)> {
    let bad = || Error::config(format!("unrecognised norm label `{label}`"));
    let rest = label.strip_prefix('D').ok_or_else(bad)?;
    let (k, p) = rest.split_once("V_L").ok_or_else(bad)?;
    Ok((p.parse().map_err(|_| bad())?, k.parse().map_err(|_| bad())?))
}

fn write_final_state<W: Write>(mut w: W, state: &PhysicalState, lattice: &WavenumberLattice) -> Result<()> {
    writeln!(w, "i,j,k,rho,u1,u2,u3")?;
    for idx in 0..lattice.len() {
        let [i, j, k] = lattice.unflatten(idx);
        writeln!(
            w,
            "{i},{j},{k},{},{},{},{}",
            state.rho[idx], state.velocity[0][idx], state.velocity[1][idx], state.velocity[2][idx]
        )?;
    }
    Ok(())
}

/// Files written by a run.
#[derive(Debug, Clone, Default)]
pub struct RunOutputs {
    pub manifest: PathBuf,
    pub norms: Option<PathBuf>,
    pub decay_report: Option<PathBuf>,
    pub final_state: Option<PathBuf>,
    /// why no decay report was written, if it was requested but could not be fitted
    pub report_error: Option<String>,
}

/// Decay report rows for a config.
pub fn decay_report_for(config: &ExperimentConfig, series: &[NormSeries]) -> Result<DecayReport> {
    build_decay_report(series, &report_rows(config.report_kind(), config.window()?))
}

/// Runs a configured experiment; with an output directory the manifest header
/// is written before stepping and the products after.
pub fn run_experiment<F: FnMut(usize, f64)>(
    config: &ExperimentConfig,
    command: &str,
    progress: F,
) -> Result<(RunRecord, Option<RunOutputs>, Option<DecayReport>)> {
    config.validate()?;
    let lattice = config.lattice()?;
    let params = config.params.viscosity()?;
    let dir = config.output.directory.clone();
    if let Some(d) = &dir {
        start_manifest(d, &ManifestHeader::new(command, config))?;
    }
    let initial = generate_initial(&config.init, &lattice)?;
    let record =
        run_simulation_with(&initial, &config.time.scheme_config(), &params, &lattice, &config.monitors, progress)?;

    let formats = &config.output.formats;
    let (report, report_error) = if formats.contains(&OutputFormat::DecayReport) && record.termination.is_completed() {
        match decay_report_for(config, &record.series()) {
            Ok(r) => (Some(r), None),
            Err(e) => (None, Some(e.to_string())),
        }
    } else {
        (None, None)
    };
    let Some(dir) = dir else {
        return Ok((record, None, report));
    };

    append_manifest(&dir, &record)?;
    let mut out = RunOutputs { manifest: dir.join(MANIFEST_FILE), report_error, ..Default::default() };
    if formats.contains(&OutputFormat::Norms) {
        let path = dir.join(NORMS_FILE);
        let mut w = BufWriter::new(File::create(&path)?);
        write_norm_rows(&mut w, &norm_rows(&record))?;
        w.flush()?;
        out.norms = Some(path);
    }
    if let Some(rep) = &report {
        let path = dir.join(DECAY_FILE);
        let mut w = BufWriter::new(File::create(&path)?);
        rep.write_csv(&mut w)?;
        w.flush()?;
        out.decay_report = Some(path);
    }
    if formats.contains(&OutputFormat::FinalState) {
        if let Some(spec) = &record.final_state {
            let path = dir.join(FINAL_STATE_FILE);
            let mut w = BufWriter::new(File::create(&path)?);
            write_final_state(&mut w, &to_physical(spec, &lattice)?, &lattice)?;
            w.flush()?;
            out.final_state = Some(path);
        }
    }
    Ok((record, Some(out), report))
}

/// Reads the manifest header of a run directory.
pub fn read_manifest_header(dir: &Path) -> Result<ManifestHeader> {
    let path = dir.join(MANIFEST_FILE);
    if !path.is_file() {
        return Err(Error::config(format!("{} has no {MANIFEST_FILE}; not a run directory", dir.display())));
    }
    let mut first = String::new();
    BufReader::new(File::open(&path)?).read_line(&mut first)?;
    match serde_json::from_str::<ManifestLine>(&first)? {
        ManifestLine::Header(h) => Ok(*h),
        _ => Err(Error::config(format!("{}: first line is not a manifest header", path.display()))),
    }
}

/// Rebuilds the decay report of a finished run directory.
pub fn decay_report_from_dir(dir: &Path) -> Result<DecayReport> {
    let header = read_manifest_header(dir)?;
    let series = read_norm_series(&dir.join(NORMS_FILE))?;
    decay_report_for(&header.config, &series)
}
