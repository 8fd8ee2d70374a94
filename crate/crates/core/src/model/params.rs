use crate::error::{domain, Error, Result};

use super::functions::lame_from_e_nu;

/// Dimensionless model constants. Defaults are the reference values used
/// throughout the linear stability analysis.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterSet {
    /// Base mesenchymal density.
    pub m0: f64,
    pub d_m: f64,
    pub d_f: f64,
    /// Chemotactic sensitivity.
    pub alpha: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    pub kappa3: f64,
    pub kappa4: f64,
    /// Hill half-saturation constants.
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    /// Hill exponents.
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
    pub delta_f: f64,
    pub delta_b: f64,
    /// Priming wave amplitude, steepness and speed.
    pub omega1: f64,
    pub omega2: f64,
    pub omega3: f64,
    /// Young modulus.
    pub young: f64,
    pub nu: f64,
    /// Storage coefficient.
    pub c0: f64,
    /// Permeability.
    pub kappa: f64,
    /// Biot-Willis coefficient.
    pub alpha_bw: f64,
    /// Active stress magnitude (either sign).
    pub tau: f64,
    pub eta: f64,
    /// Mechano-chemical feedback of dilation on the FGF equation.
    pub xi_f: f64,
    pub rho: f64,
    /// Active stress saturation.
    pub zeta: f64,
    /// Coefficient in the chemotactic saturation exp(-gamma m).
    pub gamma_exp: f64,
}

impl Default for ParameterSet {
    fn default() -> Self {
        Self {
            m0: 2.0,
            d_m: 0.01,
            d_f: 0.1,
            alpha: 4.0,
            kappa1: 0.05,
            kappa2: 0.025,
            kappa3: 1.0,
            kappa4: 1.0,
            k1: 1.0,
            k2: 2.0,
            k3: 5.0,
            p1: 2.0,
            p2: 2.0,
            p3: 2.0,
            delta_f: 1.0,
            delta_b: 1.0,
            omega1: 1.0,
            omega2: 5.0,
            omega3: 0.04,
            young: 3.0e4,
            nu: 0.4,
            c0: 1.0e-3,
            kappa: 1.0e-4,
            alpha_bw: 0.1,
            tau: 60.0,
            eta: 0.1,
            xi_f: 0.15,
            rho: 1.0,
            zeta: 1.0,
            gamma_exp: 1.0,
        }
    }
}

/// Names accepted by [`ParameterSet::get`] and [`ParameterSet::set`], in
/// the order used when echoing a resolved set.
pub const PARAMETER_NAMES: [&str; 30] = [
    "m0", "D_m", "D_f", "alpha", "kappa1", "kappa2", "kappa3", "kappa4", "K1", "K2", "K3", "P1",
    "P2", "P3", "delta_F", "delta_B", "omega1", "omega2", "omega3", "E", "nu", "C0", "kappa",
    "alpha_BW", "tau", "eta", "xi_f", "rho", "zeta", "gamma_exp",
];

impl ParameterSet {
    fn slot(&mut self, name: &str) -> Option<&mut f64> {
        Some(match name {
            "m0" => &mut self.m0,
            "D_m" => &mut self.d_m,
            "D_f" => &mut self.d_f,
            "alpha" => &mut self.alpha,
            "kappa1" => &mut self.kappa1,
            "kappa2" => &mut self.kappa2,
            "kappa3" => &mut self.kappa3,
            "kappa4" => &mut self.kappa4,
            "K1" => &mut self.k1,
            "K2" => &mut self.k2,
            "K3" => &mut self.k3,
            "P1" => &mut self.p1,
            "P2" => &mut self.p2,
            "P3" => &mut self.p3,
            "delta_F" => &mut self.delta_f,
            "delta_B" => &mut self.delta_b,
            "omega1" => &mut self.omega1,
            "omega2" => &mut self.omega2,
            "omega3" => &mut self.omega3,
            "E" => &mut self.young,
            "nu" => &mut self.nu,
            "C0" => &mut self.c0,
            "kappa" => &mut self.kappa,
            "alpha_BW" => &mut self.alpha_bw,
            "tau" => &mut self.tau,
            "eta" => &mut self.eta,
            "xi_f" => &mut self.xi_f,
            "rho" => &mut self.rho,
            "zeta" => &mut self.zeta,
            "gamma_exp" => &mut self.gamma_exp,
            _ => return None,
        })
    }

    /// Value of the named parameter.
    pub fn get(&self, name: &str) -> Result<f64> {
        let mut copy = self.clone();
        copy.slot(name)
            .map(|v| *v)
            .ok_or_else(|| Error::UnknownParameter(name.to_string()))
    }

    /// Overwrite the named parameter. No validation is done here; call
    /// [`ParameterSet::validate`] once all overrides are applied.
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        let slot = self
            .slot(name)
            .ok_or_else(|| Error::UnknownParameter(name.to_string()))?;
        *slot = value;
        Ok(())
    }

    /// All parameters as (name, value) pairs.
    pub fn entries(&self) -> Vec<(&'static str, f64)> {
        PARAMETER_NAMES
            .iter()
            .map(|&n| (n, self.get(n).expect("listed name")))
            .collect()
    }

    /// Lame moduli (mu, lambda) derived from E and nu.
    pub fn lame(&self) -> (f64, f64) {
        lame_from_e_nu(self.young, self.nu).unwrap_or((f64::NAN, f64::NAN))
    }

    pub fn mu(&self) -> f64 {
        self.lame().0
    }

    pub fn lambda(&self) -> f64 {
        self.lame().1
    }

    /// Hydraulic conductivity kappa / eta.
    pub fn kappa_over_eta(&self) -> f64 {
        self.kappa / self.eta
    }

    /// Linear chemotactic coefficient alpha m0 exp(-gamma m0).
    pub fn chemotactic_coefficient(&self) -> f64 {
        self.alpha * self.m0 * (-self.gamma_exp * self.m0).exp()
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in self.entries() {
            if !v.is_finite() {
                return domain(format!("{name} must be finite, got {v}"));
            }
        }
        let positive = [
            ("D_m", self.d_m),
            ("D_f", self.d_f),
            ("K1", self.k1),
            ("K2", self.k2),
            ("K3", self.k3),
            ("P1", self.p1),
            ("P2", self.p2),
            ("P3", self.p3),
            ("delta_F", self.delta_f),
            ("delta_B", self.delta_b),
            ("eta", self.eta),
            ("rho", self.rho),
            ("E", self.young),
        ];
        for (name, v) in positive {
            if v <= 0.0 {
                return domain(format!("{name} must be positive, got {v}"));
            }
        }
        let nonneg = [
            ("m0", self.m0),
            ("alpha", self.alpha),
            ("C0", self.c0),
            ("kappa", self.kappa),
            ("alpha_BW", self.alpha_bw),
            ("kappa1", self.kappa1),
            ("kappa2", self.kappa2),
            ("kappa3", self.kappa3),
            ("kappa4", self.kappa4),
            ("omega1", self.omega1),
            ("omega2", self.omega2),
            ("omega3", self.omega3),
            ("zeta", self.zeta),
            ("xi_f", self.xi_f),
            ("gamma_exp", self.gamma_exp),
        ];
        for (name, v) in nonneg {
            if v < 0.0 {
                return domain(format!("{name} must be non-negative, got {v}"));
            }
        }
        if !(self.nu > 0.0 && self.nu < 0.5) {
            return domain(format!("nu must lie in (0, 0.5), got {}", self.nu));
        }
        Ok(())
    }
}
