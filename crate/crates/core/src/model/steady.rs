use crate::error::{Error, Result};

use super::functions::{active_stress_slope, hill, hill_derivative};
use super::ParameterSet;

/// Homogeneous rest state together with the coefficients of the
/// linearised reaction terms.
#[derive(Debug, Clone, PartialEq)]
pub struct SteadyState {
    pub m0: f64,
    pub e0: f64,
    pub f0: f64,
    pub b0: f64,
    pub k_on: f64,
    pub k_off: f64,
    pub a_m: f64,
    pub a_e: f64,
    pub a_b: f64,
    /// d/dm of h3(m) m at m0.
    pub h3: f64,
    pub sigma_act_lin: f64,
    /// Linear chemotactic coefficient alpha m0 exp(-gamma m0).
    pub chi: f64,
}

/// Activation and inactivation rates (k_on, k_off) of the epithelium at
/// local density m, BMP level b and priming level w.
fn rates(m: f64, b: f64, w: f64, p: &ParameterSet) -> Result<(f64, f64)> {
    let h1 = hill(m, p.k1, p.p1)?;
    let h2 = hill(m, p.k2, p.p2)?;
    let k_on = p.kappa1 * w * h1 + p.kappa2 * h2;
    let k_off = (1.0 - h1) * (p.kappa3 + p.kappa4 * b);
    Ok((k_on, k_off))
}

/// Zero of the epithelium reaction k_on (1 - e) - k_off e at fixed (m, b, w).
pub fn epithelium_equilibrium(m: f64, b: f64, w: f64, p: &ParameterSet) -> Result<f64> {
    let (k_on, k_off) = rates(m, b, w, p)?;
    if k_on + k_off == 0.0 {
        return Err(Error::DegenerateEpithelium);
    }
    Ok(k_on / (k_on + k_off))
}

impl SteadyState {
    /// Steady state with the priming wave saturated at omega1.
    pub fn new(p: &ParameterSet) -> Result<Self> {
        Self::build(p, None)
    }

    /// Steady state for the degenerate case where both epithelium rates
    /// vanish; `e0` selects the scenario (0 for zero activation, 1 for
    /// zero inactivation).
    pub fn with_epithelium(p: &ParameterSet, e0: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&e0) {
            return Err(Error::Domain(format!("e0 must lie in [0, 1], got {e0}")));
        }
        Self::build(p, Some(e0))
    }

    fn build(p: &ParameterSet, e0_override: Option<f64>) -> Result<Self> {
        p.validate()?;
        let m0 = p.m0;
        let h3v = hill(m0, p.k3, p.p3)?;
        let b0 = h3v * m0 / p.delta_b;
        let (k_on, k_off) = rates(m0, b0, p.omega1, p)?;
        let a_e = k_on + k_off;
        let e0 = match e0_override {
            Some(e) => e,
            None if a_e == 0.0 => return Err(Error::DegenerateEpithelium),
            None => k_on / a_e,
        };
        let h1 = hill(m0, p.k1, p.p1)?;
        let dh1 = hill_derivative(m0, p.k1, p.p1)?;
        let dh2 = hill_derivative(m0, p.k2, p.p2)?;
        let dh3 = hill_derivative(m0, p.k3, p.p3)?;
        let dk_on = p.kappa1 * p.omega1 * dh1 + p.kappa2 * dh2;
        let dk_off = -dh1 * (p.kappa3 + p.kappa4 * b0);
        Ok(Self {
            m0,
            e0,
            f0: e0 / p.delta_f,
            b0,
            k_on,
            k_off,
            a_m: dk_on * (1.0 - e0) - dk_off * e0,
            a_e,
            a_b: (1.0 - h1) * p.kappa4 * e0,
            h3: h3v + dh3 * m0,
            sigma_act_lin: active_stress_slope(m0, p),
            chi: p.chemotactic_coefficient(),
        })
    }
}
