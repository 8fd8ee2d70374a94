use crate::error::{domain, Result};

/// Uniform rectangular grid on (0, lx) x (0, ly) with (nx+1) x (ny+1)
/// nodes. Node (i, j) sits at (i hx, j hy) and has row-major index
/// `j (nx+1) + i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid2D {
    pub lx: f64,
    pub ly: f64,
    pub nx: usize,
    pub ny: usize,
    pub hx: f64,
    pub hy: f64,
}

impl Grid2D {
    pub fn new(lx: f64, ly: f64, nx: usize, ny: usize) -> Result<Self> {
        if nx < 8 || ny < 8 {
            return domain(format!("grid needs at least 8 cells per direction, got {nx} x {ny}"));
        }
        if !(lx > 0.0 && ly > 0.0 && lx.is_finite() && ly.is_finite()) {
            return domain("domain lengths must be positive");
        }
        Ok(Self { lx, ly, nx, ny, hx: lx / nx as f64, hy: ly / ny as f64 })
    }

    pub fn nodes_x(&self) -> usize {
        self.nx + 1
    }

    pub fn nodes_y(&self) -> usize {
        self.ny + 1
    }

    pub fn len(&self) -> usize {
        self.nodes_x() * self.nodes_y()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.nodes_x() + i
    }

    pub fn x(&self, i: usize) -> f64 {
        if i == self.nx {
            self.lx
        } else {
            i as f64 * self.hx
        }
    }

    pub fn y(&self, j: usize) -> f64 {
        if j == self.ny {
            self.ly
        } else {
            j as f64 * self.hy
        }
    }

    /// Width of the dual cell around column i.
    pub fn wx(&self, i: usize) -> f64 {
        if i == 0 || i == self.nx {
            0.5 * self.hx
        } else {
            self.hx
        }
    }

    pub fn wy(&self, j: usize) -> f64 {
        if j == 0 || j == self.ny {
            0.5 * self.hy
        } else {
            self.hy
        }
    }

    /// Trapezoidal quadrature weights, which are also the dual cell areas.
    pub fn volumes(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.len());
        for j in 0..self.nodes_y() {
            for i in 0..self.nodes_x() {
                v.push(self.wx(i) * self.wy(j));
            }
        }
        v
    }
}

/// Nodal fields at time t.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub t: f64,
    pub ux: Vec<f64>,
    pub uy: Vec<f64>,
    pub vx: Vec<f64>,
    pub vy: Vec<f64>,
    pub ax: Vec<f64>,
    pub ay: Vec<f64>,
    pub p: Vec<f64>,
    pub m: Vec<f64>,
    pub e: Vec<f64>,
    pub f: Vec<f64>,
    pub b: Vec<f64>,
}

impl FieldState {
    /// Everything at rest with the given uniform chemical values.
    pub fn uniform(grid: &Grid2D, m: f64, e: f64, f: f64, b: f64) -> Self {
        let n = grid.len();
        let z = vec![0.0; n];
        Self {
            t: 0.0,
            ux: z.clone(),
            uy: z.clone(),
            vx: z.clone(),
            vy: z.clone(),
            ax: z.clone(),
            ay: z.clone(),
            p: z,
            m: vec![m; n],
            e: vec![e; n],
            f: vec![f; n],
            b: vec![b; n],
        }
    }

    /// Named field, for output.
    pub fn field(&self, name: &str) -> Option<&[f64]> {
        Some(match name {
            "ux" => &self.ux,
            "uy" => &self.uy,
            "vx" => &self.vx,
            "vy" => &self.vy,
            "ax" => &self.ax,
            "ay" => &self.ay,
            "p" => &self.p,
            "m" => &self.m,
            "e" => &self.e,
            "f" => &self.f,
            "b" => &self.b,
            _ => return None,
        })
    }

    pub const FIELD_NAMES: [&'static str; 11] = ["ux", "uy", "vx", "vy", "ax", "ay", "p", "m", "e", "f", "b"];
}
