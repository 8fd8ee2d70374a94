use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{domain, Result};
use crate::model::{ParameterSet, SteadyState};

/// Wave vector of a plane-wave perturbation.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveProbe {
    pub k_vec: Vec<f64>,
    pub k2: f64,
    pub d: usize,
}

impl WaveProbe {
    pub fn new(k_vec: &[f64]) -> Result<Self> {
        let d = k_vec.len();
        if d != 2 && d != 3 {
            return domain(format!("wave vector must have 2 or 3 components, got {d}"));
        }
        if k_vec.iter().any(|k| !k.is_finite()) {
            return domain("wave vector must be finite");
        }
        Ok(Self { k_vec: k_vec.to_vec(), k2: k_vec.iter().map(|k| k * k).sum(), d })
    }
}

/// The (d+5) x (d+5) matrix of the linearised system acting on the
/// amplitudes (u_1..u_d, p, m, e, f, b).
pub fn assemble_system_matrix(
    p: &ParameterSet,
    s: &SteadyState,
    w: &WaveProbe,
    phi: Complex64,
) -> DMatrix<Complex64> {
    let d = w.d;
    let k = &w.k_vec;
    let k2 = w.k2;
    let (mu, lambda) = p.lame();
    let i = Complex64::i();
    let re = |x: f64| Complex64::new(x, 0.0);
    let mut m = DMatrix::from_element(d + 5, d + 5, re(0.0));
    let (cp, cm, ce, cf, cb) = (d, d + 1, d + 2, d + 3, d + 4);
    let inertial = phi * phi * p.rho + mu * k2;
    for r in 0..d {
        for c in 0..d {
            m[(r, c)] = re((mu + lambda) * k[r] * k[c]);
        }
        m[(r, r)] += inertial;
        m[(r, cp)] = i * k[r];
        m[(r, cm)] = -i * s.sigma_act_lin * k[r];
    }
    for c in 0..d {
        m[(cp, c)] = i * p.alpha_bw * phi * k[c];
        m[(cf, c)] = i * p.xi_f * k[c];
    }
    m[(cp, cp)] = phi * p.c0 + p.kappa_over_eta() * k2;
    m[(cm, cm)] = phi + p.d_m * k2;
    m[(cm, cf)] = re(-s.chi * k2);
    m[(ce, cm)] = re(-s.a_m);
    m[(ce, ce)] = phi + s.a_e;
    m[(ce, cb)] = re(s.a_b);
    m[(cf, ce)] = re(-1.0);
    m[(cf, cf)] = phi + p.d_f * k2 + p.delta_f;
    m[(cb, cm)] = re(-s.h3);
    m[(cb, cb)] = phi + k2 + p.delta_b;
    m
}
