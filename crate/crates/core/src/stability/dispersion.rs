use num_complex::Complex64;

use super::CharPoly;
use crate::error::{domain, Result};
use crate::model::{ParameterSet, SteadyState};
use crate::roots::{self, poly_roots};

#[derive(Debug, Clone, Copy)]
pub struct DispersionOptions {
    /// Also report the roots of the transverse factor B^(d-1).
    pub include_inertial_factor: bool,
    pub dim: usize,
}

impl Default for DispersionOptions {
    fn default() -> Self {
        Self { include_inertial_factor: false, dim: 2 }
    }
}

#[derive(Debug, Clone)]
pub struct DispersionPoint {
    pub k2: f64,
    /// Sorted by (Re, Im).
    pub roots: Vec<Complex64>,
    pub max_re: f64,
    pub argmax_root: Complex64,
    /// max |P(z)| / (max|full| max(1,|z|)^7) over the roots of P.
    pub residual: f64,
}

/// `n` log-spaced points from `k2_min` to `k2_max` inclusive.
pub fn log_k2_grid(k2_min: f64, k2_max: f64, n: usize) -> Vec<f64> {
    assert!(k2_min > 0.0 && k2_max >= k2_min && n >= 1);
    if n == 1 {
        return vec![k2_max];
    }
    let (a, b) = (k2_min.ln(), k2_max.ln());
    (0..n)
        .map(|i| {
            if i == n - 1 {
                k2_max
            } else {
                (a + (b - a) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

fn argmax(roots: &[Complex64]) -> Complex64 {
    let mut best = roots[0];
    for &z in &roots[1..] {
        let better = z.re > best.re
            || (z.re == best.re && (z.im > best.im || (z.im == best.im && z.re > best.re)));
        if better {
            best = z;
        }
    }
    best
}

/// Growth rates of plane waves over a grid of squared wavenumbers.
pub fn dispersion(
    p: &ParameterSet,
    s: &SteadyState,
    k2_grid: &[f64],
    opts: DispersionOptions,
) -> Result<Vec<DispersionPoint>> {
    if k2_grid.is_empty() {
        return domain("k^2 grid is empty");
    }
    if k2_grid.iter().any(|k| !(*k >= 0.0) || !k.is_finite()) {
        return domain("k^2 grid values must be finite and non-negative");
    }
    if k2_grid.windows(2).any(|w| w[1] < w[0]) {
        return domain("k^2 grid must be ascending");
    }
    if opts.dim != 2 && opts.dim != 3 {
        return domain(format!("dimension must be 2 or 3, got {}", opts.dim));
    }
    let mut out = Vec::with_capacity(k2_grid.len());
    for &k2 in k2_grid {
        let cp = CharPoly::new(p, s, k2);
        let coeffs = cp.full_complex();
        let mut rts = poly_roots(&coeffs)?;
        let scale = cp.full.iter().map(|x| x.abs()).fold(0.0, f64::max);
        let residual = rts
            .iter()
            .map(|z| roots::eval(&coeffs, *z).norm() / (scale * z.norm().max(1.0).powi(7)))
            .fold(0.0, f64::max);
        if opts.include_inertial_factor {
            let w = (p.mu() * k2 / p.rho).sqrt();
            for _ in 0..opts.dim - 1 {
                rts.push(Complex64::new(0.0, w));
                rts.push(Complex64::new(0.0, -w));
            }
            rts.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        }
        let best = argmax(&rts);
        out.push(DispersionPoint { k2, max_re: best.re, argmax_root: best, roots: rts, residual });
    }
    Ok(out)
}
