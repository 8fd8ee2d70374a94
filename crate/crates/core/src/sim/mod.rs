//! Structured-grid simulator of the coupled poroelasticity and
//! chemotaxis system on a rectangle.
//!
//! Chemical fields live on grid nodes with node-centred finite volumes;
//! displacement and pressure use bilinear elements on the same nodes. Each
//! time step alternates a monolithic poroelastic solve with an IMEX
//! chemotaxis step inside an outer fixed-point loop.

mod banded;
mod chem;
pub mod diagnostics;
mod driver;
mod grid;
mod mech;

pub use chem::{ChemUpdate, Chemotaxis};
pub use diagnostics::Diagnostics;
pub use driver::{init_state, run_simulation, RunSummary, Simulator, StepReport};
pub use grid::{FieldState, Grid2D};
pub use mech::{MechUpdate, Mechanics};

use crate::error::{domain, Result};
use crate::ParameterSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Edge {
    Bottom,
    Top,
    Left,
    Right,
}

impl Edge {
    pub const ALL: [Edge; 4] = [Edge::Bottom, Edge::Top, Edge::Left, Edge::Right];

    pub fn name(self) -> &'static str {
        match self {
            Edge::Bottom => "bottom",
            Edge::Top => "top",
            Edge::Left => "left",
            Edge::Right => "right",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "bottom" => Ok(Edge::Bottom),
            "top" => Ok(Edge::Top),
            "left" => Ok(Edge::Left),
            "right" => Ok(Edge::Right),
            other => domain(format!("unknown edge '{other}' (expected bottom, top, left or right)")),
        }
    }
}

/// Subset of the four boundary edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EdgeSet([bool; 4]);

impl EdgeSet {
    pub fn new(edges: &[Edge]) -> Self {
        let mut s = Self::default();
        for &e in edges {
            s.0[e as usize] = true;
        }
        s
    }

    pub fn contains(&self, e: Edge) -> bool {
        self.0[e as usize]
    }

    pub fn is_empty(&self) -> bool {
        !self.0.iter().any(|&b| b)
    }

    pub fn edges(&self) -> Vec<Edge> {
        Edge::ALL.into_iter().filter(|&e| self.contains(e)).collect()
    }
}

/// Pressure condition on the non-clamped part of the boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PressureBc {
    /// p = 0.
    Dirichlet,
    /// Zero fluid flux.
    ZeroFlux,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrimingMode {
    /// Travelling priming wave w(x2, t).
    Wave,
    /// w fixed at omega1 everywhere.
    Saturated,
}

/// Normal traction (0, s0 sin(pi t / t_hat)) on one edge.
#[derive(Debug, Clone, PartialEq)]
pub struct TractionLoad {
    pub s0: f64,
    pub t_hat: f64,
    pub edge: Edge,
}

impl TractionLoad {
    pub fn value(&self, t: f64) -> f64 {
        if self.s0 == 0.0 {
            0.0
        } else {
            self.s0 * (std::f64::consts::PI * t / self.t_hat).sin()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub params: ParameterSet,
    pub grid: Grid2D,
    pub dt: f64,
    pub t_final: f64,
    /// Half-width of the uniform noise added to m at t = 0.
    pub noise_amplitude: f64,
    pub seed: u64,
    /// Steps between snapshots; 0 writes only the final state.
    pub output_every: usize,
    pub snapshot_fields: Vec<String>,
    pub fp_tol: f64,
    pub fp_max_iters: usize,
    /// Edges with clamped displacement and zero fluid flux.
    pub clamped: EdgeSet,
    pub traction: TractionLoad,
    pub sigma_pressure: PressureBc,
    pub priming: PrimingMode,
    pub newmark_beta: f64,
    pub newmark_gamma: f64,
    pub cg_tol: f64,
    /// Largest fraction of nodes that may be clipped in one step.
    pub clip_limit: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            params: ParameterSet::default(),
            grid: Grid2D::new(20.0, 20.0, 128, 128).expect("valid default grid"),
            dt: 0.2,
            t_final: 520.0,
            noise_amplitude: 0.01,
            seed: 1,
            output_every: 200,
            snapshot_fields: vec!["m".into()],
            fp_tol: 1e-6,
            fp_max_iters: 5,
            clamped: EdgeSet::new(&[Edge::Bottom]),
            traction: TractionLoad { s0: 0.0, t_hat: 320.0, edge: Edge::Top },
            sigma_pressure: PressureBc::Dirichlet,
            priming: PrimingMode::Wave,
            newmark_beta: 0.25,
            newmark_gamma: 0.5,
            cg_tol: 1e-9,
            clip_limit: 1e-3,
        }
    }
}

impl SimConfig {
    /// Square (0, 20)^2 with m0 = 0.75, D_m = 0.03, xi_f = 0.001 and the
    /// solid motion suppressed (tau = 0, no traction).
    pub fn suppressed_motion(n: usize) -> Result<Self> {
        let mut cfg = Self { grid: Grid2D::new(20.0, 20.0, n, n)?, ..Self::default() };
        cfg.params.m0 = 0.75;
        cfg.params.d_m = 0.03;
        cfg.params.tau = 0.0;
        cfg.params.xi_f = 0.001;
        Ok(cfg)
    }

    /// As [`SimConfig::suppressed_motion`] with tau = 0.001 and a periodic
    /// traction of magnitude 1500 and t_hat = 320 on the top edge.
    pub fn periodic_traction(n: usize) -> Result<Self> {
        let mut cfg = Self::suppressed_motion(n)?;
        cfg.params.tau = 0.001;
        cfg.traction = TractionLoad { s0: 1500.0, t_hat: 320.0, edge: Edge::Top };
        Ok(cfg)
    }

    /// Whether the solid can move at all. Without active stress and
    /// traction the displacement stays identically zero.
    pub fn mechanics_active(&self) -> bool {
        self.params.tau != 0.0 || self.traction.s0 != 0.0
    }

    pub fn steps(&self) -> usize {
        (self.t_final / self.dt - 1e-9).ceil().max(0.0) as usize
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return domain(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return domain(format!("t_final must be nonnegative, got {}", self.t_final));
        }
        if !(self.noise_amplitude >= 0.0) {
            return domain("noise amplitude must be nonnegative");
        }
        if !(self.fp_tol > 0.0) {
            return domain(format!("fixed-point tolerance must be positive, got {}", self.fp_tol));
        }
        if self.fp_max_iters == 0 {
            return domain("fixed-point iteration cap must be at least 1");
        }
        if !(self.cg_tol > 0.0) {
            return domain("linear solver tolerance must be positive");
        }
        if !(self.traction.t_hat > 0.0) {
            return domain(format!("traction period t_hat must be positive, got {}", self.traction.t_hat));
        }
        if !(self.newmark_beta > 0.0 && self.newmark_gamma >= 0.5) {
            return domain("Newmark parameters need beta > 0 and gamma >= 1/2");
        }
        if !(0.0..=1.0).contains(&self.clip_limit) {
            return domain("clip limit is a fraction in [0, 1]");
        }
        if self.mechanics_active() {
            if self.clamped.is_empty() {
                return domain("at least one edge must be clamped when the solid can move");
            }
            if self.clamped.contains(self.traction.edge) && self.traction.s0 != 0.0 {
                return domain(format!("traction edge '{}' is clamped", self.traction.edge.name()));
            }
        }
        for f in &self.snapshot_fields {
            if !FieldState::FIELD_NAMES.contains(&f.as_str()) {
                return domain(format!("unknown snapshot field '{f}'"));
            }
        }
        Ok(())
    }
}
