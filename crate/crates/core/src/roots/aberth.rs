use num_complex::Complex64;

use super::{eval_with_derivative, sort_roots, trim};
use crate::error::{Error, Result};

/// Roots by the Aberth-Ehrlich simultaneous iteration, sorted by (Re, Im).
pub fn aberth_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let c = trim(coeffs)?;
    let n = c.len() - 1;
    if n == 0 {
        return Ok(Vec::new());
    }
    // initial guesses on a circle whose radius is the geometric mean of the
    // root moduli, rotated off the real axis
    let radius = (c[0].norm() / c[n].norm()).powf(1.0 / n as f64);
    let radius = if radius > 0.0 && radius.is_finite() { radius } else { 1.0 };
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(radius, 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4))
        .collect();
    let abs_c: Vec<f64> = c.iter().map(|x| x.norm()).collect();
    let mut done = vec![false; n];
    let max_iter = 500;
    for _ in 0..max_iter {
        for k in 0..n {
            if done[k] {
                continue;
            }
            let (p, dp) = eval_with_derivative(c, z[k]);
            // stop once the residual is at the rounding level of the evaluation
            let bound = abs_c.iter().rev().fold(0.0, |acc, &a| acc * z[k].norm() + a);
            if p.norm() <= 8.0 * f64::EPSILON * bound {
                done[k] = true;
                continue;
            }
            let ratio = p / dp;
            let mut sum = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != k {
                    sum += 1.0 / (z[k] - z[j]);
                }
            }
            let step = ratio / (1.0 - ratio * sum);
            if step.re.is_finite() && step.im.is_finite() {
                z[k] -= step;
                if step.norm() <= f64::EPSILON * z[k].norm() {
                    done[k] = true;
                }
            }
        }
        if done.iter().all(|&d| d) {
            sort_roots(&mut z);
            return Ok(z);
        }
    }
    Err(Error::RootsNotConverged { iterations: max_iter })
}
