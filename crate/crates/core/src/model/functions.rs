use crate::error::{domain, Result};

use super::ParameterSet;

fn check_hill(m: f64, k: f64, p: f64) -> Result<()> {
    if !(m >= 0.0) {
        return domain(format!("hill: m must be >= 0, got {m}"));
    }
    if !(k > 0.0) {
        return domain(format!("hill: K must be > 0, got {k}"));
    }
    if !(p > 0.0) {
        return domain(format!("hill: P must be > 0, got {p}"));
    }
    Ok(())
}

/// Hill function m^P / (K^P + m^P).
pub fn hill(m: f64, k: f64, p: f64) -> Result<f64> {
    check_hill(m, k, p)?;
    if m == 0.0 {
        return Ok(0.0);
    }
    // written in terms of K/m so large m does not overflow
    Ok(1.0 / (1.0 + (k / m).powf(p)))
}

/// Derivative of [`hill`] with respect to m: P K^P m^(P-1) / (K^P + m^P)^2.
pub fn hill_derivative(m: f64, k: f64, p: f64) -> Result<f64> {
    check_hill(m, k, p)?;
    if m == 0.0 {
        return Ok(if p > 1.0 {
            0.0
        } else if p == 1.0 {
            1.0 / k
        } else {
            f64::INFINITY
        });
    }
    let r = (k / m).powf(p);
    Ok(p * r / (m * (1.0 + r) * (1.0 + r)))
}

/// Priming wave w(x2, t) = omega1/2 (1 + tanh(omega2 (t - x2/omega3))).
pub fn priming_wave(x2: f64, t: f64, p: &ParameterSet) -> Result<f64> {
    if p.omega3 == 0.0 {
        return domain("priming wave speed omega3 must be nonzero");
    }
    Ok(0.5 * p.omega1 * (1.0 + (p.omega2 * (t - x2 / p.omega3)).tanh()))
}

/// Lame moduli (mu, lambda) from Young modulus and Poisson ratio.
pub fn lame_from_e_nu(e: f64, nu: f64) -> Result<(f64, f64)> {
    if !(e > 0.0) {
        return domain(format!("Young modulus must be positive, got {e}"));
    }
    if !(0.0..0.5).contains(&nu) {
        return domain(format!("Poisson ratio must lie in [0, 0.5), got {nu}"));
    }
    let mu = e / (2.0 * (1.0 + nu));
    let lambda = e * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
    Ok((mu, lambda))
}

/// Isotropic active stress (lambda + 2mu/3) tau m / (1 + zeta m^2).
pub fn active_stress(m: f64, p: &ParameterSet) -> f64 {
    let (mu, lambda) = p.lame();
    (lambda + 2.0 * mu / 3.0) * p.tau * m / (1.0 + p.zeta * m * m)
}

/// d/dm of [`active_stress`].
pub fn active_stress_slope(m: f64, p: &ParameterSet) -> f64 {
    let (mu, lambda) = p.lame();
    let q = 1.0 + p.zeta * m * m;
    (lambda + 2.0 * mu / 3.0) * p.tau * (1.0 - p.zeta * m * m) / (q * q)
}
