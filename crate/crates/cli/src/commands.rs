use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use primordia_core::growth::identity_suite;
use primordia_core::io::{parse_config, parse_config_str, ConfigFile};
use primordia_core::sim::{run_simulation, SimConfig};
use primordia_core::stability::{dispersion, log_k2_grid, pattern_space, AxisSpec, CellFlags, DispersionOptions, Mode};
use primordia_core::{Error, ParameterSet, SteadyState};

use crate::manifest::RunManifest;

#[derive(Debug, Parser)]
#[command(name = "primordia", version, about = "Poroelastic chemotaxis model of feather-primordia patterning")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Homogeneous steady state and linearisation coefficients as one CSV row.
    Steady(Common),
    /// Growth rates over a range of squared wavenumbers.
    Dispersion(DispersionArgs),
    /// Patterning conditions over a 2D parameter grid.
    Patternspace(PatternArgs),
    /// Time-domain simulation on a rectangular grid.
    Simulate(SimulateArgs),
    /// Randomised identity checks of the growth kinematics.
    GrowthCheck(GrowthArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    /// key = value file overriding the default parameters.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Directory for the CSV and manifest; prints CSV to stdout otherwise.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Args)]
pub struct DispersionArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 50.0)]
    pub k2_max: f64,
    /// Lower end of the window; must be positive with log spacing.
    #[arg(long, default_value_t = 1e-3)]
    pub k2_min: f64,
    #[arg(long, default_value_t = 500)]
    pub points: usize,
    #[arg(long, value_enum, default_value_t = Spacing::Log)]
    pub spacing: Spacing,
    /// Also report the roots of the transverse inertial factor.
    #[arg(long)]
    pub include_inertial_factor: bool,
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Uncoupled,
    Coupled,
}

#[derive(Debug, Args)]
pub struct PatternArgs {
    #[command(flatten)]
    pub common: Common,
    /// name:min:max:count
    #[arg(long)]
    pub axis1: String,
    /// name:min:max:count
    #[arg(long)]
    pub axis2: String,
    #[arg(long, value_enum, default_value_t = ModeArg::Uncoupled)]
    pub mode: ModeArg,
    #[arg(long, default_value_t = primordia_core::stability::DEFAULT_K2_MAX)]
    pub k2_max: f64,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct GrowthArgs {
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

/// Bad command-line input that clap cannot catch.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

/// A check or solve that ran but failed numerically.
#[derive(Debug)]
struct Numerical(String);

impl std::fmt::Display for Numerical {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Numerical {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow!(Usage(msg.into()))
}

/// 1 for bad input, 2 for numerical failure.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<Error>() {
            return if e.is_validation() { 1 } else { 2 };
        }
        if cause.downcast_ref::<Numerical>().is_some() {
            return 2;
        }
        if cause.downcast_ref::<Usage>().is_some() {
            return 1;
        }
    }
    1
}

/// Runs the command on a rayon pool capped by `PRIMORDIA_THREADS`.
pub fn run_with_threads(cli: Cli) -> Result<()> {
    match std::env::var("PRIMORDIA_THREADS") {
        Ok(v) => {
            let n: usize = v
                .trim()
                .parse()
                .ok()
                .filter(|&n| n > 0)
                .ok_or_else(|| usage(format!("PRIMORDIA_THREADS must be a positive integer, got '{v}'")))?;
            let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build()?;
            pool.install(|| run(cli))
        }
        Err(_) => run(cli),
    }
}

pub fn run(cli: Cli) -> Result<()> {
    let start = Instant::now();
    match cli.command {
        Command::Steady(c) => steady(&c, start),
        Command::Dispersion(a) => dispersion_cmd(&a, start),
        Command::Patternspace(a) => patternspace(&a, start),
        Command::Simulate(a) => simulate(&a, start),
        Command::GrowthCheck(a) => growth_check(&a, start),
    }
}

/// The parsed config and its raw bytes (empty without a file).
fn load(path: Option<&Path>) -> Result<(ConfigFile, Vec<u8>)> {
    match path {
        Some(p) => {
            let bytes = std::fs::read(p).map_err(|e| Error::Io { path: p.to_path_buf(), source: e })?;
            Ok((parse_config(p)?, bytes))
        }
        None => Ok((parse_config_str("", Path::new("<defaults>"))?, Vec::new())),
    }
}

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

fn emit(out: Option<&Path>, file: &str, csv: &str, mut manifest: RunManifest, start: Instant) -> Result<()> {
    match out {
        Some(dir) => {
            std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            let path = dir.join(file);
            std::fs::write(&path, csv).with_context(|| format!("writing {}", path.display()))?;
            manifest.wall_clock_seconds = start.elapsed().as_secs_f64();
            manifest.write(dir)
        }
        None => {
            print!("{csv}");
            Ok(())
        }
    }
}

fn steady(c: &Common, start: Instant) -> Result<()> {
    let (cfg, bytes) = load(c.config.as_deref())?;
    let p = cfg.parameters()?;
    let s = SteadyState::new(&p)?;
    let mut csv = String::from("m0,e0,f0,b0,k_on,k_off,A_m,A_e,A_b,H3,sigma_act_lin\n");
    let row = [s.m0, s.e0, s.f0, s.b0, s.k_on, s.k_off, s.a_m, s.a_e, s.a_b, s.h3, s.sigma_act_lin];
    csv.push_str(&row.map(fmt).join(","));
    csv.push('\n');
    emit(c.out.as_deref(), "steady.csv", &csv, RunManifest::new("steady", &p, &bytes, None), start)
}

fn k2_grid(a: &DispersionArgs) -> Result<Vec<f64>> {
    if a.points == 0 {
        return Err(usage("--points must be at least 1"));
    }
    if !(a.k2_min >= 0.0 && a.k2_max >= a.k2_min && a.k2_max.is_finite()) {
        return Err(usage("need 0 <= --k2-min <= --k2-max"));
    }
    Ok(match a.spacing {
        Spacing::Log => {
            if a.k2_min <= 0.0 {
                return Err(usage("log spacing needs --k2-min > 0"));
            }
            log_k2_grid(a.k2_min, a.k2_max, a.points)
        }
        Spacing::Linear if a.points == 1 => vec![a.k2_max],
        Spacing::Linear => {
            let step = (a.k2_max - a.k2_min) / (a.points - 1) as f64;
            (0..a.points).map(|i| a.k2_min + i as f64 * step).collect()
        }
    })
}

fn dispersion_cmd(a: &DispersionArgs, start: Instant) -> Result<()> {
    let (cfg, bytes) = load(a.common.config.as_deref())?;
    let p = cfg.parameters()?;
    let s = SteadyState::new(&p)?;
    let grid = k2_grid(a)?;
    let opts = DispersionOptions { include_inertial_factor: a.include_inertial_factor, dim: a.dim };
    let pts = dispersion(&p, &s, &grid, opts)?;
    let nroots = pts.iter().map(|q| q.roots.len()).max().unwrap_or(0);
    let mut csv = String::from("k2,max_re,argmax_re,argmax_im,residual");
    for i in 0..nroots {
        write!(csv, ",root{i}_re,root{i}_im")?;
    }
    csv.push('\n');
    for q in &pts {
        let mut cols = vec![fmt(q.k2), fmt(q.max_re), fmt(q.argmax_root.re), fmt(q.argmax_root.im), fmt(q.residual)];
        for i in 0..nroots {
            match q.roots.get(i) {
                Some(z) => cols.extend([fmt(z.re), fmt(z.im)]),
                None => cols.extend([String::new(), String::new()]),
            }
        }
        csv.push_str(&cols.join(","));
        csv.push('\n');
    }
    emit(a.common.out.as_deref(), "dispersion.csv", &csv, RunManifest::new("dispersion", &p, &bytes, None), start)
}

fn parse_axis(spec: &str) -> Result<AxisSpec> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 4 {
        return Err(usage(format!("axis '{spec}' is not name:min:max:count")));
    }
    let num = |s: &str| s.parse::<f64>().map_err(|_| usage(format!("bad number '{s}' in axis '{spec}'")));
    let count = parts[3].parse::<usize>().map_err(|_| usage(format!("bad count '{}' in axis '{spec}'", parts[3])))?;
    Ok(AxisSpec::new(parts[0], num(parts[1])?, num(parts[2])?, count))
}

fn patternspace(a: &PatternArgs, start: Instant) -> Result<()> {
    let (cfg, bytes) = load(a.common.config.as_deref())?;
    let p = cfg.parameters()?;
    let (ax1, ax2) = (parse_axis(&a.axis1)?, parse_axis(&a.axis2)?);
    let mode = match a.mode {
        ModeArg::Uncoupled => Mode::Uncoupled,
        ModeArg::Coupled => Mode::Coupled,
    };
    let grid = pattern_space(&p, &ax1, &ax2, mode, a.k2_max)?;
    let mut csv = format!("{},{}", ax1.name, ax2.name);
    for name in CellFlags::NAMES {
        write!(csv, ",{name}")?;
    }
    csv.push('\n');
    for i1 in 0..ax1.count {
        for i2 in 0..ax2.count {
            let mut cols = vec![fmt(ax1.value(i1)), fmt(ax2.value(i2))];
            for flag in grid.cell(i1, i2).as_array() {
                cols.push(match flag {
                    Some(true) => "1".into(),
                    Some(false) => "0".into(),
                    None => String::new(),
                });
            }
            csv.push_str(&cols.join(","));
            csv.push('\n');
        }
    }
    emit(a.common.out.as_deref(), "patternspace.csv", &csv, RunManifest::new("patternspace", &p, &bytes, None), start)
}

fn simulate(a: &SimulateArgs, start: Instant) -> Result<()> {
    let (cfg, bytes) = load(a.config.as_deref())?;
    let sim: SimConfig = cfg.sim_config()?;
    let mut manifest = RunManifest::new("simulate", &sim.params, &bytes, Some(sim.seed));
    std::fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    let result = run_simulation(&sim, Some(&a.out));
    manifest.wall_clock_seconds = start.elapsed().as_secs_f64();
    manifest.write(&a.out)?;
    let run = result?;
    for w in &run.warnings {
        eprintln!("warning: {w}");
    }
    if run.warning_count > run.warnings.len() {
        eprintln!("warning: {} further warnings suppressed", run.warning_count - run.warnings.len());
    }
    eprintln!("{} steps, {} files in {}", run.steps, run.files.len(), a.out.display());
    Ok(())
}

fn growth_check(a: &GrowthArgs, start: Instant) -> Result<()> {
    if a.samples == 0 {
        bail!(usage("--samples must be at least 1"));
    }
    let checks = identity_suite(a.samples, a.seed);
    let mut csv = String::from("check,samples,worst,tolerance,passed\n");
    for c in &checks {
        writeln!(csv, "{},{},{},{},{}", c.name, c.samples, fmt(c.worst), fmt(c.tolerance), c.passed)?;
    }
    let manifest = RunManifest::new("growth-check", &ParameterSet::default(), b"", Some(a.seed));
    emit(a.out.as_deref(), "growth_check.csv", &csv, manifest, start)?;
    let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
    if !failed.is_empty() {
        return Err(anyhow!(Numerical(format!("identity checks failed: {}", failed.join(", ")))));
    }
    Ok(())
}
