use super::{FieldState, Grid2D};

/// Fields whose extrema are reported each step.
pub const EXTREMA_FIELDS: [&str; 7] = ["m", "e", "f", "b", "p", "ux", "uy"];

/// Trapezoidal integral of a nodal field.
pub fn integral(grid: &Grid2D, field: &[f64]) -> f64 {
    let mut total = 0.0;
    for j in 0..grid.nodes_y() {
        let mut row = 0.0;
        for i in 0..grid.nodes_x() {
            row += grid.wx(i) * field[grid.idx(i, j)];
        }
        total += grid.wy(j) * row;
    }
    total
}

pub fn mean(grid: &Grid2D, field: &[f64]) -> f64 {
    integral(grid, field) / (grid.lx * grid.ly)
}

/// Area-weighted variance about the weighted mean.
pub fn variance(grid: &Grid2D, field: &[f64]) -> f64 {
    let mu = mean(grid, field);
    let sq: Vec<f64> = field.iter().map(|v| (v - mu) * (v - mu)).collect();
    mean(grid, &sq)
}

pub fn extrema(field: &[f64]) -> (f64, f64) {
    field.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    pub t: f64,
    pub mass_m: f64,
    pub var_m: f64,
    /// (min, max) in the order of [`EXTREMA_FIELDS`].
    pub extrema: Vec<(f64, f64)>,
    pub outer_iterations: usize,
    pub clipped: usize,
    pub fp_change: f64,
}

impl Diagnostics {
    pub fn of(grid: &Grid2D, state: &FieldState) -> Self {
        Self {
            t: state.t,
            mass_m: integral(grid, &state.m),
            var_m: variance(grid, &state.m),
            extrema: EXTREMA_FIELDS.iter().map(|f| extrema(state.field(f).unwrap_or(&[]))).collect(),
            outer_iterations: 0,
            clipped: 0,
            fp_change: 0.0,
        }
    }

    pub fn csv_header() -> String {
        let mut cols = vec!["t".to_string(), "int_m".into(), "var_m".into()];
        for f in EXTREMA_FIELDS {
            cols.push(format!("min_{f}"));
            cols.push(format!("max_{f}"));
        }
        cols.extend(["outer_iterations".into(), "clipped".into(), "fp_change".into()]);
        cols.join(",")
    }

    pub fn csv_row(&self) -> String {
        let mut cols = vec![fmt(self.t), fmt(self.mass_m), fmt(self.var_m)];
        for &(lo, hi) in &self.extrema {
            cols.push(fmt(lo));
            cols.push(fmt(hi));
        }
        cols.push(self.outer_iterations.to_string());
        cols.push(self.clipped.to_string());
        cols.push(fmt(self.fp_change));
        cols.join(",")
    }
}

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}
