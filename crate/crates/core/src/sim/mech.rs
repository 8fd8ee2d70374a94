//! Poroelastic block: bilinear (Q1) elements for displacement and pressure
//! on the simulation grid, lumped mass, Newmark time stepping for momentum
//! and backward Euler for the storage equation.
//!
//! Unknowns are interleaved per node as (ux, uy, p). The monolithic matrix
//!
//! ```text
//! [ rho M/(beta dt^2) + K        -G              ]
//! [ -G^T                 -(C0 Mp + dt k Kp)/a_BW ]
//! ```
//!
//! is symmetric quasi-definite and is factored once per run.

use super::banded::{BandLdl, BandMatrix};
use super::{Edge, Grid2D, PressureBc, SimConfig};
use crate::error::{Error, Result};
use crate::model::active_stress;
use crate::ParameterSet;

const GAUSS: [f64; 2] = [-0.577_350_269_189_625_8, 0.577_350_269_189_625_8];
/// Local node offsets (di, dj), counter-clockwise from the lower-left corner.
const CORNERS: [(usize, usize); 4] = [(0, 0), (1, 0), (1, 1), (0, 1)];

/// Element matrices of a uniform hx x hy rectangle.
#[derive(Debug, Clone)]
struct ElementMatrices {
    /// Plane-strain stiffness, local dofs (ux0, uy0, ux1, ...).
    k: [[f64; 8]; 8],
    /// g[2a + c][b] = int N_b d_c N_a.
    g: [[f64; 4]; 8],
    /// Pressure Laplacian int grad N_a . grad N_b.
    kp: [[f64; 4]; 4],
}

impl ElementMatrices {
    fn new(hx: f64, hy: f64, mu: f64, lambda: f64) -> Self {
        let mut k = [[0.0; 8]; 8];
        let mut g = [[0.0; 4]; 8];
        let mut kp = [[0.0; 4]; 4];
        let sx = [-1.0, 1.0, 1.0, -1.0];
        let sy = [-1.0, -1.0, 1.0, 1.0];
        let wdet = hx * hy / 4.0;
        for &xi in &GAUSS {
            for &et in &GAUSS {
                let n: Vec<f64> = (0..4).map(|a| 0.25 * (1.0 + sx[a] * xi) * (1.0 + sy[a] * et)).collect();
                let dx: Vec<f64> = (0..4).map(|a| 0.25 * sx[a] * (1.0 + sy[a] * et) * 2.0 / hx).collect();
                let dy: Vec<f64> = (0..4).map(|a| 0.25 * sy[a] * (1.0 + sx[a] * xi) * 2.0 / hy).collect();
                for a in 0..4 {
                    for b in 0..4 {
                        k[2 * a][2 * b] += wdet * ((lambda + 2.0 * mu) * dx[a] * dx[b] + mu * dy[a] * dy[b]);
                        k[2 * a][2 * b + 1] += wdet * (lambda * dx[a] * dy[b] + mu * dy[a] * dx[b]);
                        k[2 * a + 1][2 * b] += wdet * (lambda * dy[a] * dx[b] + mu * dx[a] * dy[b]);
                        k[2 * a + 1][2 * b + 1] += wdet * ((lambda + 2.0 * mu) * dy[a] * dy[b] + mu * dx[a] * dx[b]);
                        g[2 * a][b] += wdet * n[b] * dx[a];
                        g[2 * a + 1][b] += wdet * n[b] * dy[a];
                        kp[a][b] += wdet * (dx[a] * dx[b] + dy[a] * dy[b]);
                    }
                }
            }
        }
        Self { k, g, kp }
    }
}

/// Result of one poroelastic step.
#[derive(Debug, Clone, PartialEq)]
pub struct MechUpdate {
    pub ux: Vec<f64>,
    pub uy: Vec<f64>,
    pub vx: Vec<f64>,
    pub vy: Vec<f64>,
    pub ax: Vec<f64>,
    pub ay: Vec<f64>,
    pub p: Vec<f64>,
    /// Nodal divergence (G^T u)_i / V_i.
    pub div: Vec<f64>,
    /// Relative residual of the linear solve.
    pub residual: f64,
}

pub struct Mechanics {
    grid: Grid2D,
    elem: ElementMatrices,
    params: ParameterSet,
    vol: Vec<f64>,
    fixed_u: Vec<bool>,
    fixed_p: Vec<bool>,
    beta: f64,
    gamma: f64,
    dt: f64,
    s_ref: f64,
    traction_nodes: Vec<(usize, f64)>,
    traction: super::TractionLoad,
    ldl: BandLdl,
}

fn on_edge(grid: &Grid2D, i: usize, j: usize, e: Edge) -> bool {
    match e {
        Edge::Bottom => j == 0,
        Edge::Top => j == grid.ny,
        Edge::Left => i == 0,
        Edge::Right => i == grid.nx,
    }
}

impl Mechanics {
    pub fn new(cfg: &SimConfig) -> Result<Self> {
        let grid = cfg.grid.clone();
        let p = cfg.params.clone();
        let (mu, lambda) = p.lame();
        let elem = ElementMatrices::new(grid.hx, grid.hy, mu, lambda);
        let vol = grid.volumes();
        let n = grid.len();
        let mut fixed_u = vec![false; n];
        let mut fixed_p = vec![false; n];
        for j in 0..grid.nodes_y() {
            for i in 0..grid.nodes_x() {
                let node = grid.idx(i, j);
                let clamped = Edge::ALL.iter().any(|&e| cfg.clamped.contains(e) && on_edge(&grid, i, j, e));
                let sigma = Edge::ALL.iter().any(|&e| !cfg.clamped.contains(e) && on_edge(&grid, i, j, e));
                fixed_u[node] = clamped;
                fixed_p[node] = (sigma && cfg.sigma_pressure == PressureBc::Dirichlet) || p.alpha_bw == 0.0;
            }
        }
        let mut traction_nodes = Vec::new();
        let edge = cfg.traction.edge;
        for j in 0..grid.nodes_y() {
            for i in 0..grid.nodes_x() {
                if on_edge(&grid, i, j, edge) {
                    let w = match edge {
                        Edge::Bottom | Edge::Top => grid.wx(i),
                        Edge::Left | Edge::Right => grid.wy(j),
                    };
                    traction_nodes.push((grid.idx(i, j), w));
                }
            }
        }
        let mut mech = Self {
            s_ref: active_stress(p.m0, &p),
            grid,
            elem,
            params: p,
            vol,
            fixed_u,
            fixed_p,
            beta: cfg.newmark_beta,
            gamma: cfg.newmark_gamma,
            dt: cfg.dt,
            traction_nodes,
            traction: cfg.traction.clone(),
            ldl: BandLdl::empty(),
        };
        let ldl = mech.assemble().factor()?;
        // quasi-definite: exactly one negative pivot per free pressure dof
        let free_p = mech.fixed_p.iter().filter(|&&f| !f).count();
        if ldl.negative_pivots() != free_p {
            return Err(Error::Solver(format!(
                "poroelastic matrix has {} negative pivots, expected {free_p}",
                ldl.negative_pivots()
            )));
        }
        mech.ldl = ldl;
        Ok(mech)
    }

    fn bandwidth(&self) -> usize {
        3 * (self.grid.nodes_x() + 1) + 2
    }

    fn element_nodes(&self, ei: usize, ej: usize) -> [usize; 4] {
        CORNERS.map(|(di, dj)| self.grid.idx(ei + di, ej + dj))
    }

    fn is_fixed(&self, dof: usize) -> bool {
        let node = dof / 3;
        if dof % 3 == 2 {
            self.fixed_p[node]
        } else {
            self.fixed_u[node]
        }
    }

    fn assemble(&self) -> BandMatrix {
        let n = self.grid.len();
        let mut a = BandMatrix::zeros(3 * n, self.bandwidth());
        let pr = &self.params;
        let mass_coef = pr.rho / (self.beta * self.dt * self.dt);
        let kt = pr.kappa_over_eta();
        let abw = if pr.alpha_bw > 0.0 { pr.alpha_bw } else { 1.0 };
        for ej in 0..self.grid.ny {
            for ei in 0..self.grid.nx {
                let nodes = self.element_nodes(ei, ej);
                for la in 0..4 {
                    for lb in 0..4 {
                        for c in 0..2 {
                            for d in 0..2 {
                                let (r, s) = (3 * nodes[la] + c, 3 * nodes[lb] + d);
                                if r >= s {
                                    a.add(r, s, self.elem.k[2 * la + c][2 * lb + d]);
                                }
                            }
                            // -G block, stored once in the lower triangle
                            let (r, s) = (3 * nodes[la] + c, 3 * nodes[lb] + 2);
                            a.add(r, s, -self.elem.g[2 * la + c][lb]);
                        }
                        let (r, s) = (3 * nodes[la] + 2, 3 * nodes[lb] + 2);
                        if r >= s {
                            a.add(r, s, -self.dt * kt * self.elem.kp[la][lb] / abw);
                        }
                    }
                }
            }
        }
        for node in 0..n {
            a.add(3 * node, 3 * node, mass_coef * self.vol[node]);
            a.add(3 * node + 1, 3 * node + 1, mass_coef * self.vol[node]);
            a.add(3 * node + 2, 3 * node + 2, -pr.c0 * self.vol[node] / abw);
        }
        for dof in 0..3 * n {
            if self.is_fixed(dof) {
                a.constrain(dof);
            }
        }
        a
    }

    /// Matrix-free product with the constrained system matrix.
    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.grid.len();
        let pr = &self.params;
        let mass_coef = pr.rho / (self.beta * self.dt * self.dt);
        let kt = pr.kappa_over_eta();
        let abw = if pr.alpha_bw > 0.0 { pr.alpha_bw } else { 1.0 };
        let xs: Vec<f64> = (0..3 * n).map(|d| if self.is_fixed(d) { 0.0 } else { x[d] }).collect();
        let mut y = vec![0.0; 3 * n];
        for ej in 0..self.grid.ny {
            for ei in 0..self.grid.nx {
                let nodes = self.element_nodes(ei, ej);
                for la in 0..4 {
                    for lb in 0..4 {
                        for c in 0..2 {
                            let r = 3 * nodes[la] + c;
                            for d in 0..2 {
                                y[r] += self.elem.k[2 * la + c][2 * lb + d] * xs[3 * nodes[lb] + d];
                            }
                            let gv = self.elem.g[2 * la + c][lb];
                            y[r] -= gv * xs[3 * nodes[lb] + 2];
                            y[3 * nodes[lb] + 2] -= gv * xs[r];
                        }
                        y[3 * nodes[la] + 2] -= self.dt * kt * self.elem.kp[la][lb] * xs[3 * nodes[lb] + 2] / abw;
                    }
                }
            }
        }
        for node in 0..n {
            y[3 * node] += mass_coef * self.vol[node] * xs[3 * node];
            y[3 * node + 1] += mass_coef * self.vol[node] * xs[3 * node + 1];
            y[3 * node + 2] -= pr.c0 * self.vol[node] * xs[3 * node + 2] / abw;
        }
        for d in 0..3 * n {
            if self.is_fixed(d) {
                y[d] = x[d];
            }
        }
        y
    }

    /// Adds -G s to the force vector (stride-3 layout), with
    /// s = s_act(m) - s_act(m0) per node.
    fn add_active_force(&self, m: &[f64], rhs: &mut [f64]) {
        let s: Vec<f64> = m.iter().map(|&mi| active_stress(mi, &self.params) - self.s_ref).collect();
        for ej in 0..self.grid.ny {
            for ei in 0..self.grid.nx {
                let nodes = self.element_nodes(ei, ej);
                for la in 0..4 {
                    for c in 0..2 {
                        let mut acc = 0.0;
                        for lb in 0..4 {
                            acc += self.elem.g[2 * la + c][lb] * s[nodes[lb]];
                        }
                        rhs[3 * nodes[la] + c] -= acc;
                    }
                }
            }
        }
    }

    /// (G^T u)_i / V_i.
    pub fn divergence(&self, ux: &[f64], uy: &[f64]) -> Vec<f64> {
        let mut d = vec![0.0; self.grid.len()];
        for ej in 0..self.grid.ny {
            for ei in 0..self.grid.nx {
                let nodes = self.element_nodes(ei, ej);
                for la in 0..4 {
                    for lb in 0..4 {
                        d[nodes[lb]] += self.elem.g[2 * la][lb] * ux[nodes[la]] + self.elem.g[2 * la + 1][lb] * uy[nodes[la]];
                    }
                }
            }
        }
        for (di, v) in d.iter_mut().zip(&self.vol) {
            *di /= v;
        }
        d
    }

    /// Advance (u, v, a, p) from `state` to `t_new` with active stress
    /// evaluated at `m`.
    pub fn step(&self, state: &super::FieldState, m: &[f64], t_new: f64) -> Result<MechUpdate> {
        let n = self.grid.len();
        let (dt, beta, gamma) = (self.dt, self.beta, self.gamma);
        let pr = &self.params;
        let mass_coef = pr.rho / (beta * dt * dt);
        let abw = if pr.alpha_bw > 0.0 { pr.alpha_bw } else { 1.0 };
        let pred = |u: &[f64], v: &[f64], a: &[f64]| -> Vec<f64> {
            (0..n).map(|i| u[i] + dt * v[i] + dt * dt * (0.5 - beta) * a[i]).collect()
        };
        let px = pred(&state.ux, &state.vx, &state.ax);
        let py = pred(&state.uy, &state.vy, &state.ay);
        let mut rhs = vec![0.0; 3 * n];
        for i in 0..n {
            rhs[3 * i] = mass_coef * self.vol[i] * px[i];
            rhs[3 * i + 1] = mass_coef * self.vol[i] * py[i];
            rhs[3 * i + 2] = -pr.c0 * self.vol[i] * state.p[i] / abw;
        }
        // -G^T u^n in the storage rows
        let div_old = self.divergence(&state.ux, &state.uy);
        for i in 0..n {
            rhs[3 * i + 2] -= div_old[i] * self.vol[i];
        }
        self.add_active_force(m, &mut rhs);
        let tv = self.traction.value(t_new);
        for &(node, w) in &self.traction_nodes {
            rhs[3 * node + 1] += tv * w;
        }
        for d in 0..3 * n {
            if self.is_fixed(d) {
                rhs[d] = 0.0;
            }
        }
        let mut x = self.ldl.solve(&rhs);
        let rhs_norm = rhs.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let residual_of = |x: &[f64]| -> (Vec<f64>, f64) {
            let ax = self.apply(x);
            let r: Vec<f64> = rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
            let rn = r.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            (r, if rhs_norm > 0.0 { rn / rhs_norm } else { rn })
        };
        let (r, mut rel) = residual_of(&x);
        if rel > 1e-10 {
            let dx = self.ldl.solve(&r);
            for (xi, di) in x.iter_mut().zip(&dx) {
                *xi += di;
            }
            rel = residual_of(&x).1;
        }
        if !(rel <= 1e-8) {
            return Err(Error::Solver(format!("poroelastic solve residual {rel:e} at t = {t_new}")));
        }
        let mut out = MechUpdate {
            ux: vec![0.0; n],
            uy: vec![0.0; n],
            vx: vec![0.0; n],
            vy: vec![0.0; n],
            ax: vec![0.0; n],
            ay: vec![0.0; n],
            p: vec![0.0; n],
            div: Vec::new(),
            residual: rel,
        };
        for i in 0..n {
            out.p[i] = x[3 * i + 2];
            if self.fixed_u[i] {
                continue;
            }
            out.ux[i] = x[3 * i];
            out.uy[i] = x[3 * i + 1];
            out.ax[i] = (out.ux[i] - px[i]) / (beta * dt * dt);
            out.ay[i] = (out.uy[i] - py[i]) / (beta * dt * dt);
            out.vx[i] = state.vx[i] + dt * ((1.0 - gamma) * state.ax[i] + gamma * out.ax[i]);
            out.vy[i] = state.vy[i] + dt * ((1.0 - gamma) * state.ay[i] + gamma * out.ay[i]);
        }
        out.div = self.divergence(&out.ux, &out.uy);
        Ok(out)
    }

    /// Static equilibrium K u = -G (s_act(m) - s_act(m0)) with zero pressure,
    /// solved directly.
    pub fn solve_static(&self, m: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        let n = self.grid.len();
        let mut k = BandMatrix::zeros(2 * n, 2 * (self.grid.nodes_x() + 1) + 1);
        for ej in 0..self.grid.ny {
            for ei in 0..self.grid.nx {
                let nodes = self.element_nodes(ei, ej);
                for la in 0..4 {
                    for lb in 0..4 {
                        for c in 0..2 {
                            for d in 0..2 {
                                let (r, s) = (2 * nodes[la] + c, 2 * nodes[lb] + d);
                                if r >= s {
                                    k.add(r, s, self.elem.k[2 * la + c][2 * lb + d]);
                                }
                            }
                        }
                    }
                }
            }
        }
        let mut f3 = vec![0.0; 3 * n];
        self.add_active_force(m, &mut f3);
        let mut f = vec![0.0; 2 * n];
        for i in 0..n {
            if self.fixed_u[i] {
                k.constrain(2 * i);
                k.constrain(2 * i + 1);
            } else {
                f[2 * i] = f3[3 * i];
                f[2 * i + 1] = f3[3 * i + 1];
            }
        }
        let x = k.factor()?.solve(&f);
        Ok(((0..n).map(|i| x[2 * i]).collect(), (0..n).map(|i| x[2 * i + 1]).collect()))
    }

    /// max |K u + G s| over free dofs divided by max |G s|.
    pub fn static_residual(&self, ux: &[f64], uy: &[f64], m: &[f64]) -> f64 {
        let n = self.grid.len();
        let mut x = vec![0.0; 3 * n];
        for i in 0..n {
            x[3 * i] = ux[i];
            x[3 * i + 1] = uy[i];
        }
        let mut ku = vec![0.0; 3 * n];
        for ej in 0..self.grid.ny {
            for ei in 0..self.grid.nx {
                let nodes = self.element_nodes(ei, ej);
                for la in 0..4 {
                    for lb in 0..4 {
                        for c in 0..2 {
                            for d in 0..2 {
                                ku[3 * nodes[la] + c] += self.elem.k[2 * la + c][2 * lb + d] * x[3 * nodes[lb] + d];
                            }
                        }
                    }
                }
            }
        }
        let mut f = vec![0.0; 3 * n];
        self.add_active_force(m, &mut f);
        let (mut r, mut s) = (0.0f64, 0.0f64);
        for i in 0..n {
            if self.fixed_u[i] {
                continue;
            }
            for c in 0..2 {
                r = r.max((ku[3 * i + c] - f[3 * i + c]).abs());
                s = s.max(f[3 * i + c].abs());
            }
        }
        r / s.max(1e-300)
    }
}
