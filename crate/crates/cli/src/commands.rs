use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use anyhow::Context;
use clap::Args;
use serde_json::json;

use greenprop::diagnostics::theory_rate;
use greenprop::experiment::{decay_report_from_dir, run_experiment, ExperimentConfig, DECAY_FILE};
use greenprop::green::{expm_oracle, sampling_plan, symbol, symbol_check as run_symbol_check};
use greenprop::kernel::{
    box_lattice_for, fit_decay_bounded, kernel_on_box, operator_amplification, symbol_norm_radial, symbol_sup_radial,
    write_norm_rows, DecayFit, FitBound, NormRow, NormSeries, RadialMode, RadialOptions,
};
use greenprop::{DecayModel, LpExponent, Part, ViscosityParams, WavenumberLattice};

use crate::{manifest, Outcome};

/// Parameters of the linearization; the default has `ν = 2`.
#[derive(Debug, Clone, Args)]
pub struct ParamArgs {
    #[arg(long, default_value_t = 1.0)]
    pub mu: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub lambda_bulk: f64,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.4)]
    pub gamma: f64,
}

impl ParamArgs {
    fn build(&self) -> greenprop::Result<ViscosityParams> {
        ViscosityParams::new(self.mu, self.lambda_bulk, self.alpha, self.gamma)
    }

    fn to_json(&self) -> serde_json::Value {
        json!({ "mu": self.mu, "lambda_bulk": self.lambda_bulk, "alpha": self.alpha, "gamma": self.gamma })
    }
}

#[derive(Debug, Args)]
pub struct LatticeInfoArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub box_length: f64,
    #[command(flatten)]
    pub params: ParamArgs,
}

pub fn lattice_info(a: LatticeInfoArgs) -> anyhow::Result<Outcome> {
    let lat = WavenumberLattice::new(a.n, a.box_length)?;
    let params = a.params.build()?;
    let kept = lat.dealias_mask().iter().filter(|&&m| m).count();
    // largest t with L ≥ 20·√(νt), and whether n·π/L ≥ 4 holds at all
    let t_box = (a.box_length / 20.0).powi(2) / params.nu();
    let info = json!({
        "n": lat.n(),
        "box_length": lat.box_length(),
        "points": lat.len(),
        "spacing": lat.spacing(),
        "fundamental": lat.fundamental(),
        "nyquist": lat.nyquist(),
        "dealiased_modes": kept,
        "confluent_radius": params.confluent_radius(),
        "box_kernel_max_t": t_box,
        "box_kernel_frequency_ok": lat.n() as f64 * std::f64::consts::PI / lat.box_length() >= 4.0,
    });
    println!("{}", serde_json::to_string_pretty(&info)?);
    Ok(Outcome::Done)
}

/// Tolerance of the oracle comparison.
const ORACLE_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Args)]
pub struct SymbolCheckArgs {
    /// generic samples (t ∈ [0,5], |ξ| ∈ [0,10], random parameters)
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    /// extra samples within 1e−4 of the double-root radius
    #[arg(long, default_value_t = 50)]
    pub confluent: usize,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

pub fn symbol_check(a: SymbolCheckArgs) -> anyhow::Result<Outcome> {
    let args = json!({ "samples": a.samples, "confluent": a.confluent, "seed": a.seed });
    if let Some(dir) = &a.output {
        manifest::write(dir, "symbol-check", args, &[a.seed])?;
    }
    let report = run_symbol_check(&sampling_plan(a.samples, a.confluent, a.seed))?;
    let pass = report.oracle_error <= ORACLE_TOLERANCE;
    let line = json!({ "record": "symbol_check", "report": report, "tolerance": ORACLE_TOLERANCE, "pass": pass });
    if let Some(dir) = &a.output {
        manifest::append(dir, &line)?;
    }
    println!("{}", serde_json::to_string_pretty(&line)?);
    Ok(if pass { Outcome::Pass } else { Outcome::Fail })
}

#[derive(Debug, Args)]
pub struct Lemma22Args {
    /// Full, L, HR or HS
    #[arg(long, default_value = "L")]
    pub part: Part,
    /// 1, 4/3, 2, 4 or inf
    #[arg(long, default_value = "2")]
    pub p: LpExponent,
    #[arg(long, default_value_t = 0)]
    pub k: usize,
    #[arg(long)]
    pub tmin: Option<f64>,
    #[arg(long)]
    pub tmax: Option<f64>,
    /// number of equally spaced times
    #[arg(long)]
    pub samples: Option<usize>,
    /// random fields for the HS operator check
    #[arg(long, default_value_t = 20)]
    pub fields: usize,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// How a `(part, p)` request is measured.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Pipeline {
    Radial(RadialMode),
    RadialSup,
    Box,
    Operator,
}

fn pipeline_for(part: Part, p: LpExponent) -> greenprop::Result<Pipeline> {
    use LpExponent::*;
    Ok(match (part, p) {
        (Part::HighSingular, Two) => Pipeline::Operator,
        (Part::HighSingular, _) => {
            return Err(greenprop::Error::config("the HS part is checked as an L² operator only (--p 2)"))
        }
        (Part::HighRegular, Two) => Pipeline::Radial(RadialMode::L2Kernel),
        (Part::HighRegular, Infinity) => Pipeline::RadialSup,
        (Part::HighRegular, _) => return Err(greenprop::Error::config("the HR part is checked for p = 2 or p = inf")),
        (_, Two) => Pipeline::Radial(RadialMode::L2Kernel),
        (_, Infinity) => Pipeline::Radial(RadialMode::L1Symbol),
        _ => Pipeline::Box,
    })
}

fn times(lo: f64, hi: f64, count: usize) -> anyhow::Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo) || count < 2 {
        anyhow::bail!(greenprop::Error::config(format!(
            "need 0 < tmin < tmax and at least 2 samples, got [{lo}, {hi}] × {count}"
        )));
    }
    Ok((0..count).map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64).collect())
}

/// Band of wavenumbers where the HS cutoffs are both inactive.
fn singular_band(params: &ViscosityParams) -> [f64; 2] {
    let lo = 3.0f64.max(6.0 / params.nu());
    [lo, lo + 4.0]
}

pub fn lemma22(a: Lemma22Args) -> anyhow::Result<Outcome> {
    let params = a.params.build()?;
    if a.k > 2 {
        anyhow::bail!(greenprop::Error::UnsupportedOrder(a.k));
    }
    let pipeline = pipeline_for(a.part, a.p)?;
    let (dlo, dhi, dn) = match pipeline {
        Pipeline::Radial(_) if !matches!(a.part, Part::HighRegular) => (5.0, 500.0, 100),
        Pipeline::Box => (5.0, 20.0, 16),
        _ => (0.5, 20.0, 40),
    };
    let window = (a.tmin.unwrap_or(dlo), a.tmax.unwrap_or(dhi));
    let ts = times(window.0, window.1, a.samples.unwrap_or(dn))?;
    let label = format!("{}_D{}_L{}", a.part.short_name(), a.k, a.p);
    let args = json!({
        "part": a.part.short_name(), "p": a.p.to_string(), "k": a.k,
        "tmin": window.0, "tmax": window.1, "samples": ts.len(),
        "fields": a.fields, "seed": a.seed, "params": a.params.to_json(),
    });
    let seeds: Vec<u64> = if pipeline == Pipeline::Operator { vec![a.seed] } else { vec![] };
    if let Some(dir) = &a.output {
        manifest::write(dir, "lemma22", args, &seeds)?;
    }

    let opts = RadialOptions::default();
    let mut rows = Vec::new();
    let mut series = Vec::new();
    match pipeline {
        Pipeline::Radial(mode) => {
            let mut s = NormSeries::empty(label.clone(), a.p, a.k);
            for &t in &ts {
                let v = symbol_norm_radial(t, a.part, a.k, mode, &params, &opts)?;
                s.push(t, v.value)?;
                rows.push(NormRow {
                    label: label.clone(),
                    t,
                    value: v.value,
                    pipeline: mode.to_string(),
                    truncation_quality: 1.0,
                });
            }
            series.push(s);
        }
        Pipeline::RadialSup => {
            let mut s = NormSeries::empty(label.clone(), a.p, a.k);
            for &t in &ts {
                let v = symbol_sup_radial(t, a.part, a.k, &params, opts.frequency_cap)?;
                s.push(t, v)?;
                rows.push(NormRow {
                    label: label.clone(),
                    t,
                    value: v,
                    pipeline: "sup_symbol".into(),
                    truncation_quality: 1.0,
                });
            }
            series.push(s);
        }
        Pipeline::Box => {
            let lattice = box_lattice_for(window.1, &params)?;
            eprintln!("box lattice n = {}, L = {}", lattice.n(), lattice.box_length());
            let mut s = NormSeries::empty(label.clone(), a.p, a.k);
            for &t in &ts {
                let kern = kernel_on_box(t, a.part, a.k, &lattice, &params)?;
                let v = kern.norm(a.p).context("box kernel is missing the requested exponent")?;
                s.push(t, v)?;
                rows.push(NormRow {
                    label: label.clone(),
                    t,
                    value: v,
                    pipeline: "box".into(),
                    truncation_quality: kern.truncation_quality,
                });
            }
            series.push(s);
        }
        Pipeline::Operator => {
            let band = singular_band(&params);
            let n = 32;
            let lattice = WavenumberLattice::new(n, std::f64::consts::PI * n as f64 / (1.25 * band[1]))?;
            for s in operator_amplification(a.part, &ts, &params, &lattice, band, a.fields, a.seed)? {
                for (&t, &v) in s.times.iter().zip(&s.values) {
                    rows.push(NormRow {
                        label: s.label.clone(),
                        t,
                        value: v,
                        pipeline: "operator".into(),
                        truncation_quality: 1.0,
                    });
                }
                series.push(s);
            }
        }
    }

    let fits: Vec<DecayFit> = series
        .iter()
        .map(|s| match (pipeline, a.part) {
            (Pipeline::Operator, _) => {
                let c = 1.0 / params.nu();
                fit_decay_bounded(s, DecayModel::Exponential, window, c, 0.2 * c, FitBound::TwoSided)
            }
            (_, Part::HighRegular) => {
                fit_decay_bounded(s, DecayModel::Exponential, window, 0.0, 0.0, FitBound::Positive)
            }
            (Pipeline::Box, _) => {
                fit_decay_bounded(s, DecayModel::Algebraic, window, theory_rate(a.p, a.k), 0.15, FitBound::TwoSided)
            }
            _ => fit_decay_bounded(s, DecayModel::Algebraic, window, theory_rate(a.p, a.k), 0.1, FitBound::TwoSided),
        })
        .collect::<greenprop::Result<_>>()?;
    let truncation_ok = rows.iter().all(|r| r.truncation_quality >= greenprop::kernel::MIN_TRUNCATION_QUALITY);
    let pass = truncation_ok && fits.iter().all(|f| f.pass);

    if let Some(dir) = &a.output {
        let mut w = BufWriter::new(File::create(dir.join(greenprop::experiment::NORMS_FILE))?);
        write_norm_rows(&mut w, &rows)?;
        w.flush()?;
        for f in &fits {
            manifest::append(dir, &json!({ "record": "fit", "fit": f }))?;
        }
    }
    println!("quantity,model,window_lo,window_hi,fitted,theory,tolerance,r2,pass");
    for (s, f) in series.iter().zip(&fits) {
        println!(
            "{},{},{},{},{},{},{},{},{}",
            s.label, f.model, f.window.0, f.window.1, f.fitted_rate, f.theory_rate, f.tolerance, f.r_squared, f.pass
        );
        if let Some(d) = f.diagnostic() {
            eprintln!("{}: {d}", s.label);
        }
    }
    if !truncation_ok {
        eprintln!("truncation quality below {} at some time", greenprop::kernel::MIN_TRUNCATION_QUALITY);
    }
    Ok(if pass { Outcome::Pass } else { Outcome::Fail })
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// TOML experiment configuration
    #[arg(long)]
    pub config: PathBuf,
    /// output directory (overrides `output.directory`)
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// suppress progress lines
    #[arg(long)]
    pub quiet: bool,
}

pub fn simulate(a: SimulateArgs) -> anyhow::Result<Outcome> {
    let mut cfg = ExperimentConfig::from_path(&a.config).with_context(|| format!("reading {}", a.config.display()))?;
    if let Some(dir) = a.output {
        cfg.output.directory = Some(dir);
    }
    let quiet = a.quiet;
    let (record, outputs, report) = run_experiment(&cfg, "simulate", |n, t| {
        if !quiet {
            eprintln!("step {n:>7}  t = {t:.3}");
        }
    })?;
    println!("termination: {}", record.termination.label());
    println!("steps: {}  t_final: {}", record.steps_taken, record.t_final);
    println!("mass drift: {:e}", record.mass_drift());
    println!("max |energy residual|: {:e}", record.max_abs_residual());
    if let Some(out) = &outputs {
        println!("manifest: {}", out.manifest.display());
        if let Some(e) = &out.report_error {
            eprintln!("decay report not written: {e}");
        }
    }
    if let Some(rep) = &report {
        rep.write_csv(std::io::stdout().lock())?;
    }
    let pass = record.termination.is_completed() && report.as_ref().is_none_or(|r| r.all_pass());
    Ok(if pass { Outcome::Pass } else { Outcome::Fail })
}

#[derive(Debug, Args)]
pub struct DecayReportArgs {
    /// run directory written by `simulate`
    #[arg(long)]
    pub input: PathBuf,
    /// where to write the CSV (default: `<input>/decay_report.csv`)
    #[arg(long)]
    pub output: Option<PathBuf>,
}

pub fn decay_report(a: DecayReportArgs) -> anyhow::Result<Outcome> {
    let report = decay_report_from_dir(&a.input)?;
    let path = a.output.unwrap_or_else(|| a.input.join(DECAY_FILE));
    let mut w = BufWriter::new(File::create(&path)?);
    report.write_csv(&mut w)?;
    w.flush()?;
    report.write_csv(std::io::stdout().lock())?;
    for r in &report.rows {
        if let Some(d) = &r.diagnostic {
            eprintln!("{}: {d}", r.quantity);
        }
    }
    Ok(if report.all_pass() { Outcome::Pass } else { Outcome::Fail })
}

#[derive(Debug, Args)]
pub struct OracleCompareArgs {
    #[arg(long)]
    pub t: f64,
    /// wave vector as `x,y,z`
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub xi: Vec<f64>,
    #[command(flatten)]
    pub params: ParamArgs,
}

pub fn oracle_compare(a: OracleCompareArgs) -> anyhow::Result<Outcome> {
    let params = a.params.build()?;
    let xi: [f64; 3] =
        a.xi.as_slice()
            .try_into()
            .map_err(|_| greenprop::Error::config(format!("--xi needs exactly 3 components, got {}", a.xi.len())))?;
    let closed = symbol(a.t, xi, &params)?.entries;
    let oracle = expm_oracle(a.t, xi, &params)?;
    let err = (closed - oracle).iter().map(|z| z.norm()).fold(0.0, f64::max);
    let fmt = |m: &[greenprop::C64]| -> Vec<Vec<[f64; 2]>> {
        (0..4).map(|i| (0..4).map(|j| [m[i + 4 * j].re, m[i + 4 * j].im]).collect()).collect()
    };
    let out = json!({
        "t": a.t,
        "xi": xi,
        "params": a.params.to_json(),
        "symbol": fmt(closed.as_slice()),
        "oracle": fmt(oracle.as_slice()),
        "max_entry_error": err,
        "tolerance": ORACLE_TOLERANCE,
        "pass": err <= ORACLE_TOLERANCE,
    });
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(if err <= ORACLE_TOLERANCE { Outcome::Pass } else { Outcome::Fail })
}
