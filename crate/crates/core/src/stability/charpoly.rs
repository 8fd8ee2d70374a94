use num_complex::Complex64;

use crate::model::{ParameterSet, SteadyState};
use crate::roots;

/// Coefficients of the characteristic polynomial at fixed k^2, all in
/// ascending powers of phi.
///
/// `P2 = sum a_i phi^i` is the chemotaxis factor, `P3 = sum c_i phi^i` the
/// longitudinal poroelastic factor and `P1 = coupling_const * sum bhat_i phi^i`
/// the mechano-chemical coupling.
#[derive(Debug, Clone, PartialEq)]
pub struct CharPoly {
    pub k2: f64,
    pub a: [f64; 5],
    pub b: [f64; 4],
    pub bhat: [f64; 4],
    pub c: [f64; 4],
    pub full: [f64; 8],
    /// -xi_f sigma_act_lin chi k^4.
    pub coupling_const: f64,
}

impl CharPoly {
    pub fn new(p: &ParameterSet, s: &SteadyState, k2: f64) -> Self {
        let x = k2;
        let (dm, df) = (p.d_m, p.d_f);
        let (dlf, dlb) = (p.delta_f, p.delta_b);
        let (ae, am, ab, h3, chi) = (s.a_e, s.a_m, s.a_b, s.h3, s.chi);
        let (mu, lambda) = p.lame();
        let kt = p.kappa_over_eta();

        let a0 = ae * df * dm * x * x * x
            + (ae * df * dm * dlb + ae * dm * dlf - am * chi) * x * x
            + (ab * h3 * chi + ae * dm * dlb * dlf - am * chi * dlb) * x;
        let a1 = df * dm * x * x * x
            + (ae * df * dm + ae * df + ae * dm + df * dm * dlb + dm * dlf) * x * x
            + (ae * df * dlb + ae * dm * dlb + ae * dm * dlf + ae * dlf - am * chi + dm * dlb * dlf) * x
            + ae * dlb * dlf;
        let a2 = (df * dm + df + dm) * x * x
            + (ae * df + ae * dm + ae + df * dlb + dm * dlb + dm * dlf + dlf) * x
            + ae * dlb
            + ae * dlf
            + dlb * dlf;
        let a3 = (df + dm + 1.0) * x + ae + dlb + dlf;
        let a = [a0, a1, a2, a3, 1.0];

        let c = [
            kt * (2.0 * mu + lambda) * x * x,
            (p.c0 * (2.0 * mu + lambda) + p.alpha_bw) * x,
            p.rho * kt * x,
            p.rho * p.c0,
        ];

        let bhat = [
            kt * ae * x * (x + dlb),
            kt * x * x + ((p.c0 + kt) * ae + kt * dlb) * x + p.c0 * ae * dlb,
            (p.c0 + kt) * x + p.c0 * (ae + dlb),
            p.c0,
        ];
        let coupling_const = -p.xi_f * s.sigma_act_lin * chi * x * x;
        let b = bhat.map(|v| coupling_const * v);

        let mut full = [0.0; 8];
        for (i, ai) in a.iter().enumerate() {
            for (j, cj) in c.iter().enumerate() {
                full[i + j] += ai * cj;
            }
        }
        for (i, bi) in b.iter().enumerate() {
            full[i] += bi;
        }
        Self { k2, a, b, bhat, c, full, coupling_const }
    }

    pub fn full_complex(&self) -> Vec<Complex64> {
        self.full.iter().map(|&x| Complex64::new(x, 0.0)).collect()
    }

    /// P(phi; k^2).
    pub fn eval(&self, phi: Complex64) -> Complex64 {
        roots::eval(&self.full_complex(), phi)
    }

    /// sum |full_i| |phi|^i, the natural scale of [`CharPoly::eval`].
    pub fn eval_scale(&self, phi: Complex64) -> f64 {
        let r = phi.norm();
        self.full.iter().rev().fold(0.0, |acc, c| acc * r + c.abs())
    }

    /// Transverse elastic factor rho phi^2 + mu k^2.
    pub fn inertial_factor(p: &ParameterSet, k2: f64, phi: Complex64) -> Complex64 {
        phi * phi * p.rho + p.mu() * k2
    }
}
