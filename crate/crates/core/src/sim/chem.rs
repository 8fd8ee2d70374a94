//! Chemotaxis block on the node-centred finite-volume grid.
//!
//! Diffusion and linear decay are implicit (backward Euler); chemotactic
//! flux, advection by the solid velocity and reaction sources use the
//! previous step. The epithelium equation is integrated exactly with its
//! rates frozen at the previous step.

use super::{FieldState, Grid2D, PrimingMode};
use crate::error::{Error, Result};
use crate::model::{epithelium_equilibrium, hill, priming_wave};
use crate::ParameterSet;

/// One face of the dual mesh: nodes a < b and transmissibility T so that
/// the flux a -> b of -D grad phi is D T (phi_a - phi_b).
#[derive(Debug, Clone, Copy)]
struct Face {
    a: usize,
    b: usize,
    t: f64,
    h: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChemUpdate {
    pub m: Vec<f64>,
    pub e: Vec<f64>,
    pub f: Vec<f64>,
    pub b: Vec<f64>,
    /// Nodes where m or b went negative and were reset to 0.
    pub clipped: usize,
    pub cg_iterations: usize,
    /// dt * max chemotactic speed / h.
    pub cfl: f64,
}

pub struct Chemotaxis {
    grid: Grid2D,
    vol: Vec<f64>,
    faces: Vec<Face>,
    params: ParameterSet,
    priming: PrimingMode,
    dt: f64,
    cg_tol: f64,
}

impl Chemotaxis {
    pub fn new(grid: &Grid2D, params: &ParameterSet, priming: PrimingMode, dt: f64, cg_tol: f64) -> Self {
        let nxn = grid.nodes_x();
        let mut faces = Vec::with_capacity(2 * grid.len());
        for j in 0..grid.nodes_y() {
            for i in 0..grid.nx {
                let a = grid.idx(i, j);
                faces.push(Face { a, b: a + 1, t: grid.wy(j) / grid.hx, h: grid.hx });
            }
        }
        for j in 0..grid.ny {
            for i in 0..grid.nodes_x() {
                let a = grid.idx(i, j);
                faces.push(Face { a, b: a + nxn, t: grid.wx(i) / grid.hy, h: grid.hy });
            }
        }
        Self {
            grid: grid.clone(),
            vol: grid.volumes(),
            faces,
            params: params.clone(),
            priming,
            dt,
            cg_tol,
        }
    }

    pub fn priming_at(&self, j: usize, t: f64) -> Result<f64> {
        match self.priming {
            PrimingMode::Saturated => Ok(self.params.omega1),
            PrimingMode::Wave => priming_wave(self.grid.y(j), t, &self.params),
        }
    }

    /// y = diag .* x + d L x, with L the zero-flux graph Laplacian.
    fn apply(&self, diag: &[f64], d: f64, x: &[f64], y: &mut [f64]) {
        for ((yi, di), xi) in y.iter_mut().zip(diag).zip(x) {
            *yi = di * xi;
        }
        for fc in &self.faces {
            let q = d * fc.t * (x[fc.a] - x[fc.b]);
            y[fc.a] += q;
            y[fc.b] -= q;
        }
    }

    /// Jacobi-preconditioned conjugate gradients for (diag + d L) x = rhs,
    /// starting from `x`. Returns the iteration count.
    fn solve(&self, diag: &[f64], d: f64, rhs: &[f64], x: &mut [f64], what: &str) -> Result<usize> {
        let n = x.len();
        let mut precond = diag.to_vec();
        for fc in &self.faces {
            precond[fc.a] += d * fc.t;
            precond[fc.b] += d * fc.t;
        }
        let mut ax = vec![0.0; n];
        self.apply(diag, d, x, &mut ax);
        let mut r: Vec<f64> = rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
        // Relative to the initial residual, i.e. to the size of the update:
        // the right side is dominated by the old state and a tolerance
        // relative to it would swallow small perturbations whole. The floor
        // sits at rounding level of the right side.
        let r0 = norm(&r);
        if r0 == 0.0 {
            return Ok(0);
        }
        let target = (self.cg_tol * r0).max(1e-15 * norm(rhs));
        if r0 <= target {
            return Ok(0);
        }
        let mut z: Vec<f64> = r.iter().zip(&precond).map(|(ri, pi)| ri / pi).collect();
        let mut p = z.clone();
        let mut rz = dot(&r, &z);
        let mut ap = vec![0.0; n];
        for it in 1..=10 * n {
            self.apply(diag, d, &p, &mut ap);
            let alpha = rz / dot(&p, &ap);
            for i in 0..n {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            let rn = norm(&r);
            if rn <= target {
                return Ok(it);
            }
            if !rn.is_finite() {
                break;
            }
            for i in 0..n {
                z[i] = r[i] / precond[i];
            }
            let rz_new = dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            for i in 0..n {
                p[i] = z[i] + beta * p[i];
            }
        }
        Err(Error::Solver(format!("{what} diffusion solve did not reach relative residual {:e}", self.cg_tol)))
    }

    /// Upwinded v . grad(phi) at every node, zero-gradient where the
    /// upwind neighbour is missing.
    fn advection(&self, phi: &[f64], vx: &[f64], vy: &[f64]) -> Vec<f64> {
        let g = &self.grid;
        let nxn = g.nodes_x();
        let mut out = vec![0.0; g.len()];
        for j in 0..g.nodes_y() {
            for i in 0..nxn {
                let k = g.idx(i, j);
                let gx = if vx[k] > 0.0 {
                    if i > 0 { (phi[k] - phi[k - 1]) / g.hx } else { 0.0 }
                } else if i < g.nx {
                    (phi[k + 1] - phi[k]) / g.hx
                } else {
                    0.0
                };
                let gy = if vy[k] > 0.0 {
                    if j > 0 { (phi[k] - phi[k - nxn]) / g.hy } else { 0.0 }
                } else if j < g.ny {
                    (phi[k + nxn] - phi[k]) / g.hy
                } else {
                    0.0
                };
                out[k] = vx[k] * gx + vy[k] * gy;
            }
        }
        out
    }

    /// Advance (m, e, f, b) from `state` (time t_n) by one step, using the
    /// solid velocity `(vx, vy)` and nodal dilation `div` at t_{n+1}.
    pub fn step(&self, state: &FieldState, vx: &[f64], vy: &[f64], div: Option<&[f64]>) -> Result<ChemUpdate> {
        let p = &self.params;
        let g = &self.grid;
        let n = g.len();
        let dt = self.dt;
        let moving = vx.iter().chain(vy).any(|&v| v != 0.0);
        let adv = |phi: &[f64]| if moving { self.advection(phi, vx, vy) } else { vec![0.0; n] };

        // m: chemotactic flux a -> b is alpha g(m_up) T (f_b - f_a)
        let mut rhs_m: Vec<f64> = (0..n).map(|i| self.vol[i] * state.m[i] / dt).collect();
        let mut cfl = 0.0f64;
        if p.alpha != 0.0 {
            for fc in &self.faces {
                let df = state.f[fc.b] - state.f[fc.a];
                let up = if df > 0.0 { fc.a } else { fc.b };
                let mu = state.m[up];
                let sat = (-p.gamma_exp * mu).exp();
                let flux = p.alpha * mu * sat * fc.t * df;
                rhs_m[fc.a] -= flux;
                rhs_m[fc.b] += flux;
                cfl = cfl.max(dt * p.alpha * sat * df.abs() / (fc.h * fc.h));
            }
        }
        let adv_m = adv(&state.m);
        for i in 0..n {
            rhs_m[i] -= self.vol[i] * adv_m[i];
        }
        let diag_m: Vec<f64> = self.vol.iter().map(|v| v / dt).collect();
        let mut m = state.m.clone();
        let mut iters = self.solve(&diag_m, p.d_m, &rhs_m, &mut m, "m")?;

        // f: source e^n, sink xi_f div u
        let adv_f = adv(&state.f);
        let rhs_f: Vec<f64> = (0..n)
            .map(|i| {
                let dil = div.map_or(0.0, |d| d[i]);
                self.vol[i] * (state.f[i] / dt + state.e[i] - p.xi_f * dil - adv_f[i])
            })
            .collect();
        let diag_f: Vec<f64> = self.vol.iter().map(|v| v * (1.0 / dt + p.delta_f)).collect();
        let mut f = state.f.clone();
        iters += self.solve(&diag_f, p.d_f, &rhs_f, &mut f, "f")?;

        // b: source h3(m^n) m^n, unit diffusivity
        let adv_b = adv(&state.b);
        let mut rhs_b = vec![0.0; n];
        for i in 0..n {
            let src = hill(state.m[i], p.k3, p.p3)? * state.m[i];
            rhs_b[i] = self.vol[i] * (state.b[i] / dt + src - adv_b[i]);
        }
        let diag_b: Vec<f64> = self.vol.iter().map(|v| v * (1.0 / dt + p.delta_b)).collect();
        let mut b = state.b.clone();
        iters += self.solve(&diag_b, 1.0, &rhs_b, &mut b, "b")?;

        // e: exact relaxation towards k_on / (k_on + k_off) at frozen rates
        let mut e = state.e.clone();
        for j in 0..g.nodes_y() {
            let w = self.priming_at(j, state.t)?;
            for i in 0..g.nodes_x() {
                let k = g.idx(i, j);
                let (mk, bk) = (state.m[k], state.b[k]);
                let total = rate_sum(mk, bk, w, p)?;
                if total > 0.0 {
                    let target = epithelium_equilibrium(mk, bk, w, p)?;
                    e[k] = target + (state.e[k] - target) * (-total * dt).exp();
                }
            }
        }

        let mut clipped = 0;
        for i in 0..n {
            if m[i] < 0.0 || b[i] < 0.0 {
                clipped += 1;
                m[i] = m[i].max(0.0);
                b[i] = b[i].max(0.0);
            }
        }
        if let Some(bad) = e.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::Solver(format!("epithelium state left [0, 1]: {bad}")));
        }
        Ok(ChemUpdate { m, e, f, b, clipped, cg_iterations: iters, cfl })
    }
}

fn rate_sum(m: f64, b: f64, w: f64, p: &ParameterSet) -> Result<f64> {
    let h1 = hill(m, p.k1, p.p1)?;
    let h2 = hill(m, p.k2, p.p2)?;
    Ok(p.kappa1 * w * h1 + p.kappa2 * h2 + (1.0 - h1) * (p.kappa3 + p.kappa4 * b))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(nx: usize) -> (Grid2D, Chemotaxis) {
        let g = Grid2D::new(10.0, 8.0, nx, nx).unwrap();
        let c = Chemotaxis::new(&g, &ParameterSet::default(), PrimingMode::Saturated, 0.1, 1e-12);
        (g, c)
    }

    #[test]
    fn laplacian_annihilates_constants_and_is_symmetric() {
        let (g, c) = setup(8);
        let n = g.len();
        let zero = vec![0.0; n];
        let mut y = vec![0.0; n];
        c.apply(&zero, 1.0, &vec![3.0; n], &mut y);
        assert!(y.iter().all(|v| v.abs() < 1e-12));
        let x1: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
        let x2: Vec<f64> = (0..n).map(|i| (i as f64 * 0.11).cos()).collect();
        let (mut y1, mut y2) = (vec![0.0; n], vec![0.0; n]);
        c.apply(&zero, 1.0, &x1, &mut y1);
        c.apply(&zero, 1.0, &x2, &mut y2);
        assert!((dot(&x2, &y1) - dot(&x1, &y2)).abs() < 1e-10);
    }

    #[test]
    fn laplacian_matches_second_derivative_in_interior() {
        let (g, c) = setup(16);
        let n = g.len();
        let k = std::f64::consts::PI / g.lx;
        let x: Vec<f64> = (0..n).map(|i| (k * g.x(i % g.nodes_x())).cos()).collect();
        let mut y = vec![0.0; n];
        c.apply(&vec![0.0; n], 1.0, &x, &mut y);
        let vol = g.volumes();
        let lam = (2.0 - 2.0 * (k * g.hx).cos()) / (g.hx * g.hx);
        for idx in 0..n {
            assert!((y[idx] / vol[idx] - lam * x[idx]).abs() < 1e-10);
        }
    }

    #[test]
    fn cg_solves_shifted_system() {
        let (g, c) = setup(12);
        let n = g.len();
        let diag: Vec<f64> = g.volumes().iter().map(|v| v * 2.0).collect();
        let truth: Vec<f64> = (0..n).map(|i| (i as f64).sqrt()).collect();
        let mut rhs = vec![0.0; n];
        c.apply(&diag, 0.7, &truth, &mut rhs);
        let mut x = vec![0.0; n];
        let it = c.solve(&diag, 0.7, &rhs, &mut x, "test").unwrap();
        assert!(it > 0);
        for (a, b) in x.iter().zip(&truth) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn upwind_advection_of_linear_profile() {
        let (g, c) = setup(8);
        let n = g.len();
        let phi: Vec<f64> = (0..n).map(|k| 2.0 * g.x(k % g.nodes_x()) - g.y(k / g.nodes_x())).collect();
        let out = c.advection(&phi, &vec![0.5; n], &vec![-1.0; n]);
        for j in 0..g.ny {
            for i in 1..=g.nx {
                assert!((out[g.idx(i, j)] - (0.5 * 2.0 + 1.0)).abs() < 1e-12);
            }
        }
    }
}
