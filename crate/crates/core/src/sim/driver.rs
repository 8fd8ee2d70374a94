use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use super::{Chemotaxis, Diagnostics, FieldState, Grid2D, Mechanics, PrimingMode, SimConfig};
use crate::error::{Error, Result};
use crate::io::write_snapshot;
use crate::model::{epithelium_equilibrium, hill, priming_wave};
use crate::rng::NoiseStream;

/// Initial data at rest: noisy m, and e, f, b from the homogeneous
/// formulas with the local priming level at t = 0.
pub fn init_state(cfg: &SimConfig) -> Result<FieldState> {
    cfg.validate()?;
    let p = &cfg.params;
    let g = &cfg.grid;
    let b0 = hill(p.m0, p.k3, p.p3)? * p.m0 / p.delta_b;
    let mut s = FieldState::uniform(g, p.m0, 0.0, 0.0, b0);
    let mut rng = NoiseStream::new(cfg.seed);
    for j in 0..g.nodes_y() {
        let w = match cfg.priming {
            PrimingMode::Saturated => p.omega1,
            PrimingMode::Wave => priming_wave(g.y(j), 0.0, p)?,
        };
        let e = epithelium_equilibrium(p.m0, b0, w, p)?;
        for i in 0..g.nodes_x() {
            let k = g.idx(i, j);
            s.e[k] = e;
            s.f[k] = e / p.delta_f;
        }
    }
    if cfg.noise_amplitude > 0.0 {
        for m in s.m.iter_mut() {
            *m = (*m + cfg.noise_amplitude * rng.symmetric()).max(0.0);
        }
    }
    Ok(s)
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct StepReport {
    pub outer_iterations: usize,
    /// Relative max-norm change of m between the last two outer passes.
    pub fp_change: f64,
    pub clipped: usize,
    pub cfl: f64,
    pub cg_iterations: usize,
    pub mech_residual: f64,
    pub warnings: Vec<String>,
}

pub struct Simulator {
    cfg: SimConfig,
    mech: Option<Mechanics>,
    chem: Chemotaxis,
    state: FieldState,
    step_index: usize,
}

impl Simulator {
    pub fn new(cfg: &SimConfig) -> Result<Self> {
        let state = init_state(cfg)?;
        Self::from_state(cfg, state)
    }

    /// Start from a caller-supplied state (at time `state.t`).
    pub fn from_state(cfg: &SimConfig, state: FieldState) -> Result<Self> {
        cfg.validate()?;
        if state.m.len() != cfg.grid.len() {
            return Err(Error::Domain("state does not match the grid".into()));
        }
        let mech = if cfg.mechanics_active() { Some(Mechanics::new(cfg)?) } else { None };
        let chem = Chemotaxis::new(&cfg.grid, &cfg.params, cfg.priming, cfg.dt, cfg.cg_tol);
        let step_index = (state.t / cfg.dt).round() as usize;
        Ok(Self { cfg: cfg.clone(), mech, chem, state, step_index })
    }

    pub fn state(&self) -> &FieldState {
        &self.state
    }

    pub fn config(&self) -> &SimConfig {
        &self.cfg
    }

    pub fn grid(&self) -> &Grid2D {
        &self.cfg.grid
    }

    pub fn mechanics(&self) -> Option<&Mechanics> {
        self.mech.as_ref()
    }

    /// One coupled step with the outer fixed-point loop.
    pub fn step(&mut self) -> Result<StepReport> {
        let cfg = &self.cfg;
        let n = cfg.grid.len();
        let t_new = (self.step_index + 1) as f64 * cfg.dt;
        let mut rep = StepReport::default();
        let zeros = vec![0.0; n];
        let mut next = self.state.clone();
        next.t = t_new;
        match &self.mech {
            None => {
                let cu = self.chem.step(&self.state, &zeros, &zeros, None)?;
                rep.outer_iterations = 1;
                absorb_chem(&mut next, cu, &mut rep);
            }
            Some(mech) => {
                // the active stress only sees m when tau != 0
                let coupled = cfg.params.tau != 0.0;
                let mut m_iter = self.state.m.clone();
                for k in 1..=cfg.fp_max_iters {
                    let mu = mech.step(&self.state, &m_iter, t_new)?;
                    let cu = self.chem.step(&self.state, &mu.vx, &mu.vy, Some(&mu.div))?;
                    rep.outer_iterations = k;
                    rep.mech_residual = mu.residual;
                    rep.fp_change = if k > 1 { relative_change(&cu.m, &m_iter) } else { 0.0 };
                    m_iter.clone_from(&cu.m);
                    next.ux = mu.ux;
                    next.uy = mu.uy;
                    next.vx = mu.vx;
                    next.vy = mu.vy;
                    next.ax = mu.ax;
                    next.ay = mu.ay;
                    next.p = mu.p;
                    rep.cg_iterations = 0;
                    absorb_chem(&mut next, cu, &mut rep);
                    if !coupled || (k > 1 && rep.fp_change <= cfg.fp_tol) {
                        break;
                    }
                    if k == cfg.fp_max_iters {
                        rep.warnings.push(format!(
                            "t = {t_new}: outer iteration stopped after {k} passes with change {:e}",
                            rep.fp_change
                        ));
                    }
                }
            }
        }
        if rep.cfl > 0.5 {
            rep.warnings.push(format!("t = {t_new}: chemotactic CFL number {:.3} exceeds 0.5", rep.cfl));
        }
        if rep.clipped as f64 > cfg.clip_limit * n as f64 {
            return Err(Error::SimulationAborted {
                t: t_new,
                reason: format!("{} of {n} nodes clipped at zero", rep.clipped),
            });
        }
        if let Some(bad) = next.m.iter().chain(&next.f).chain(&next.ux).find(|v| !v.is_finite()) {
            return Err(Error::SimulationAborted { t: t_new, reason: format!("non-finite value {bad}") });
        }
        self.state = next;
        self.step_index += 1;
        Ok(rep)
    }
}

fn absorb_chem(next: &mut FieldState, cu: super::ChemUpdate, rep: &mut StepReport) {
    next.m = cu.m;
    next.e = cu.e;
    next.f = cu.f;
    next.b = cu.b;
    rep.clipped = cu.clipped;
    rep.cfl = cu.cfl;
    rep.cg_iterations += cu.cg_iterations;
}

fn relative_change(new: &[f64], old: &[f64]) -> f64 {
    let diff = new.iter().zip(old).fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
    let scale = new.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    if scale > 0.0 {
        diff / scale
    } else {
        diff
    }
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub steps: usize,
    pub final_state: FieldState,
    /// Initial row followed by one row per step.
    pub diagnostics: Vec<Diagnostics>,
    pub warnings: Vec<String>,
    /// Total number of warnings, including those not kept in `warnings`.
    pub warning_count: usize,
    pub files: Vec<PathBuf>,
}

const KEPT_WARNINGS: usize = 20;

/// Advance to `cfg.t_final`. With an output directory, writes
/// `diagnostics.csv` (flushed every step) and snapshots named
/// `<field>_<step>.txt`; files written before an abort are kept.
pub fn run_simulation(cfg: &SimConfig, out_dir: Option<&Path>) -> Result<RunSummary> {
    let mut sim = Simulator::new(cfg)?;
    let mut files = Vec::new();
    let mut csv = match out_dir {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|e| Error::Io { path: dir.to_path_buf(), source: e })?;
            let path = dir.join("diagnostics.csv");
            let f = File::create(&path).map_err(|e| Error::Io { path: path.clone(), source: e })?;
            files.push(path.clone());
            Some((BufWriter::new(f), path))
        }
        None => None,
    };
    let emit_row = |csv: &mut Option<(BufWriter<File>, PathBuf)>, line: &str| -> Result<()> {
        if let Some((w, path)) = csv {
            writeln!(w, "{line}").and_then(|_| w.flush()).map_err(|e| Error::Io { path: path.clone(), source: e })?;
        }
        Ok(())
    };
    let snapshot = |sim: &Simulator, step: usize, files: &mut Vec<PathBuf>| -> Result<()> {
        if let Some(dir) = out_dir {
            for field in &cfg.snapshot_fields {
                let path = dir.join(format!("{field}_{step:06}.txt"));
                write_snapshot(&path, sim.grid(), sim.state(), field)?;
                files.push(path);
            }
        }
        Ok(())
    };

    emit_row(&mut csv, &Diagnostics::csv_header())?;
    let d0 = Diagnostics::of(sim.grid(), sim.state());
    emit_row(&mut csv, &d0.csv_row())?;
    let mut diagnostics = vec![d0];
    snapshot(&sim, 0, &mut files)?;
    let (mut warnings, mut warning_count) = (Vec::new(), 0);
    let steps = cfg.steps();
    for step in 1..=steps {
        let rep = sim.step()?;
        warning_count += rep.warnings.len();
        for w in rep.warnings {
            if warnings.len() < KEPT_WARNINGS {
                warnings.push(w);
            }
        }
        let mut d = Diagnostics::of(sim.grid(), sim.state());
        d.outer_iterations = rep.outer_iterations;
        d.clipped = rep.clipped;
        d.fp_change = rep.fp_change;
        emit_row(&mut csv, &d.csv_row())?;
        diagnostics.push(d);
        let due = cfg.output_every > 0 && step % cfg.output_every == 0;
        if due || step == steps {
            snapshot(&sim, step, &mut files)?;
        }
    }
    Ok(RunSummary { steps, final_state: sim.state().clone(), diagnostics, warnings, warning_count, files })
}
