use num_complex::Complex64;

use super::{assemble_system_matrix, WaveProbe};
use crate::error::{domain, Result};
use crate::model::{ParameterSet, SteadyState};

#[derive(Debug, Clone)]
pub struct PlaneWaveResidual {
    /// max over rows of |r_fd - (M w0)| / sum_j |M_ij| |w0_j|.
    pub relative: f64,
    /// Linearised PDE operator applied to the sampled plane wave, divided
    /// by the plane wave.
    pub fd_residual: Vec<Complex64>,
    pub matrix_product: Vec<Complex64>,
    /// sum_j |M_ij| |w0_j| per row.
    pub row_scale: Vec<f64>,
}

/// Apply the linearised 2D PDE system to `w0 exp(i k.x)` using fourth-order
/// centred differences with spacing `h`, and compare with `M(k, phi) w0`.
///
/// The field amplitudes are ordered (u1, u2, p, m, e, f, b).
pub fn planewave_residual_oracle(
    p: &ParameterSet,
    s: &SteadyState,
    k_vec: [f64; 2],
    phi: Complex64,
    w0: &[Complex64; 7],
    h: f64,
) -> Result<PlaneWaveResidual> {
    if !(h > 0.0) {
        return domain("grid spacing must be positive");
    }
    let probe = WaveProbe::new(&k_vec)?;
    let mat = assemble_system_matrix(p, s, &probe, phi);
    let g = |a: i32, b: i32| Complex64::new(0.0, k_vec[0] * a as f64 * h + k_vec[1] * b as f64 * h).exp();
    let d1 = |f: &dyn Fn(i32) -> Complex64| (-f(2) + f(1) * 8.0 - f(-1) * 8.0 + f(-2)) / (12.0 * h);
    let d2 = |f: &dyn Fn(i32) -> Complex64| {
        (-f(2) + f(1) * 16.0 - f(0) * 30.0 + f(-1) * 16.0 - f(-2)) / (12.0 * h * h)
    };
    let gx = d1(&|a| g(a, 0));
    let gy = d1(&|b| g(0, b));
    let gxx = d2(&|a| g(a, 0));
    let gyy = d2(&|b| g(0, b));
    let gxy = d1(&|b| d1(&|a| g(a, b)));
    let lap = gxx + gyy;

    let (mu, lambda) = p.lame();
    let kt = p.kappa_over_eta();
    let [u1, u2, pr, m, e, f, b] = *w0;
    let div = u1 * gx + u2 * gy;
    let rho_phi2 = phi * phi * p.rho;
    let r = vec![
        rho_phi2 * u1 - (u1 * gxx + u2 * gxy) * (lambda + mu) - u1 * lap * mu + pr * gx
            - m * gx * s.sigma_act_lin,
        rho_phi2 * u2 - (u1 * gxy + u2 * gyy) * (lambda + mu) - u2 * lap * mu + pr * gy
            - m * gy * s.sigma_act_lin,
        phi * (pr * p.c0 + div * p.alpha_bw) - pr * lap * kt,
        phi * m - m * lap * p.d_m + f * lap * s.chi,
        phi * e - m * s.a_m + e * s.a_e + b * s.a_b,
        phi * f - f * lap * p.d_f - e + f * p.delta_f + div * p.xi_f,
        phi * b - b * lap - m * s.h3 + b * p.delta_b,
    ];
    let w = nalgebra::DVector::from_column_slice(w0);
    let mw = &mat * &w;
    let mut relative = 0.0f64;
    let mut row_scale = Vec::with_capacity(7);
    for i in 0..7 {
        let scale: f64 = (0..7).map(|j| mat[(i, j)].norm() * w0[j].norm()).sum();
        row_scale.push(scale);
        if scale > 0.0 {
            relative = relative.max((r[i] - mw[i]).norm() / scale);
        }
    }
    Ok(PlaneWaveResidual { relative, fd_residual: r, matrix_product: mw.iter().copied().collect(), row_scale })
}
