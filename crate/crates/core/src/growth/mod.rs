//! Finite-strain growth kinematics.
//!
//! Tensors are 3x3. Two-dimensional states are embedded with a unit
//! out-of-plane entry, so `dim` only matters for the growth law and for the
//! dilation measure `tr C - d`.

mod suite;

use nalgebra::{Matrix3, Vector3};

use crate::error::{domain, Result};

pub use suite::{identity_suite, random_deformation, random_rotation, IdentityCheck};

const ORTHO_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthFactors {
    pub gamma: [f64; 3],
    /// Orthonormal growth directions k1, k2, k3.
    pub dirs: [Vector3<f64>; 3],
    pub delta: [f64; 3],
    pub dim: usize,
}

impl GrowthFactors {
    pub fn new(gamma: [f64; 3], dirs: [Vector3<f64>; 3], delta: [f64; 3], dim: usize) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return domain(format!("dimension must be 2 or 3, got {dim}"));
        }
        if gamma.iter().any(|g| !(*g >= 0.0)) {
            return domain("growth factors must be non-negative");
        }
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                if (dirs[i].dot(&dirs[j]) - want).abs() > ORTHO_TOL {
                    return domain("growth directions must be orthonormal");
                }
            }
        }
        if dim == 2 && (dirs[0].z.abs() > ORTHO_TOL || dirs[1].z.abs() > ORTHO_TOL) {
            return domain("in 2D the first two growth directions must lie in the plane");
        }
        Ok(Self { gamma, dirs, delta, dim })
    }

    /// Directions along the coordinate axes.
    pub fn axis_aligned(gamma: [f64; 3], delta: [f64; 3], dim: usize) -> Result<Self> {
        Self::new(gamma, [Vector3::x(), Vector3::y(), Vector3::z()], delta, dim)
    }
}

/// F_g = I + sqrt(g1) k1 k1 + sqrt(g2) k2 k2 + g3 k3 k3; the last term is
/// dropped in 2D.
pub fn growth_tensor(g: &GrowthFactors) -> Matrix3<f64> {
    let [k1, k2, k3] = &g.dirs;
    let mut fg = Matrix3::identity() + g.gamma[0].sqrt() * k1 * k1.transpose() + g.gamma[1].sqrt() * k2 * k2.transpose();
    if g.dim == 3 {
        fg += g.gamma[2] * k3 * k3.transpose();
    }
    fg
}

/// Growth factors at time t for local density m.
///
/// 3D: g1 = g2 = delta1 t, g3 = delta2 t + delta3 m/(1+m^2).
/// 2D: g1 = g2 = delta2 t + delta3 m/(1+m^2).
pub fn gamma_evolution(t: f64, m: f64, g: &GrowthFactors) -> Result<GrowthFactors> {
    if !(t >= 0.0) || !(m >= 0.0) {
        return domain(format!("gamma_evolution needs t >= 0 and m >= 0, got t = {t}, m = {m}"));
    }
    let [d1, d2, d3] = g.delta;
    let sat = d3 * m / (1.0 + m * m);
    let gamma = if g.dim == 3 {
        [d1 * t, d1 * t, d2 * t + sat]
    } else {
        let v = d2 * t + sat;
        [v, v, 0.0]
    };
    Ok(GrowthFactors { gamma, ..g.clone() })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeformationState {
    pub f: Matrix3<f64>,
    pub fg: Matrix3<f64>,
    pub fe: Matrix3<f64>,
    pub j: f64,
    pub jg: f64,
    pub je: f64,
    /// Right Cauchy-Green tensor F^T F.
    pub c: Matrix3<f64>,
    /// Elastic left Cauchy-Green tensor F_e F_e^T.
    pub be: Matrix3<f64>,
}

/// Split F = F_e F_g.
pub fn elastic_decomposition(f: &Matrix3<f64>, fg: &Matrix3<f64>) -> Result<DeformationState> {
    let j = f.determinant();
    if !(j > 0.0) {
        return domain(format!("det F must be positive, got {j}"));
    }
    let jg = fg.determinant();
    if !(jg > 0.0) {
        return domain(format!("growth tensor is singular or inverted, det = {jg}"));
    }
    let fg_inv = fg.try_inverse().ok_or_else(|| crate::Error::Domain("growth tensor is singular".into()))?;
    let fe = f * fg_inv;
    Ok(DeformationState {
        f: *f,
        fg: *fg,
        fe,
        j,
        jg,
        je: fe.determinant(),
        c: f.transpose() * f,
        be: fe * fe.transpose(),
    })
}

fn inv_transpose(f: &Matrix3<f64>) -> Result<Matrix3<f64>> {
    if !(f.determinant() > 0.0) {
        return domain("deformation gradient is singular or inverted");
    }
    f.try_inverse()
        .map(|m| m.transpose())
        .ok_or_else(|| crate::Error::Domain("deformation gradient is singular".into()))
}

/// First Piola stress J (mu B_e - psi I) F^-T.
pub fn neo_hookean_stress(state: &DeformationState, mu: f64, psi: f64) -> Result<Matrix3<f64>> {
    let fit = inv_transpose(&state.f)?;
    Ok(state.j * (mu * state.be - psi * Matrix3::identity()) * fit)
}

/// J_g [ mu/2 (tr C_e - 3) - psi (J_e - 1) ], the energy per reference
/// volume whose F-derivative equals [`neo_hookean_stress`] on J_e = 1.
pub fn incompressible_energy(f: &Matrix3<f64>, fg: &Matrix3<f64>, mu: f64, psi: f64) -> Result<f64> {
    let s = elastic_decomposition(f, fg)?;
    let ce = s.fe.transpose() * s.fe;
    Ok(s.jg * (0.5 * mu * (ce.trace() - 3.0) - psi * (s.je - 1.0)))
}

/// Trivial reference-state match: psi = mu makes P_e vanish at F_e = I.
pub fn psi_for_incompressibility(_f: &Matrix3<f64>, _fg: &Matrix3<f64>, mu: f64) -> f64 {
    mu
}

/// Fluid stress -alpha_BW J p F^-T.
pub fn fluid_stress(f: &Matrix3<f64>, p: f64, alpha_bw: f64) -> Result<Matrix3<f64>> {
    Ok(-alpha_bw * f.determinant() * p * inv_transpose(f)?)
}

/// Relative fluid velocity -F (kappa/(eta phi_f)) C^-1 Grad p.
pub fn darcy_pullback(
    f: &Matrix3<f64>,
    kappa_over_eta: f64,
    phi_f: f64,
    grad_p: &Vector3<f64>,
) -> Result<Vector3<f64>> {
    if !(phi_f > 0.0) {
        return domain(format!("fluid fraction must be positive, got {phi_f}"));
    }
    let c_inv = (f.transpose() * f)
        .try_inverse()
        .ok_or_else(|| crate::Error::Domain("deformation gradient is singular".into()))?;
    Ok(-(kappa_over_eta / phi_f) * f * c_inv * grad_p)
}

/// d gamma3 / dm = delta3 (1 - m^2)/(1 + m^2)^2.
pub fn dgamma3_dm(m: f64, delta3: f64) -> f64 {
    let q = 1.0 + m * m;
    delta3 * (1.0 - m * m) / (q * q)
}

/// Fluid mass source l0 (2 delta1 + delta2 + delta3 dgamma3/dm dm/dt).
pub fn mass_source_fluid(g: &GrowthFactors, dm_dt: f64, ell0: f64, m: f64) -> f64 {
    let [d1, d2, d3] = g.delta;
    ell0 * (2.0 * d1 + d2 + d3 * dgamma3_dm(m, d3) * dm_dt)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseFractions {
    pub phi_s: f64,
    pub phi_f: f64,
}

impl PhaseFractions {
    pub fn from_solid(phi_s: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&phi_s) {
            return domain(format!("solid fraction must lie in [0, 1], got {phi_s}"));
        }
        Ok(Self { phi_s, phi_f: 1.0 - phi_s })
    }
}

/// Net proliferation rate alpha0 phi_s (1 - phi_s)(m - m0).
pub fn solid_mass_growth_rate(phi: PhaseFractions, m: f64, m0: f64, alpha0: f64) -> f64 {
    alpha0 * phi.phi_s * (1.0 - phi.phi_s) * (m - m0)
}

/// sum gdot_i / g_i - r_s / phi_s.
pub fn growth_rate_constraint_residual(gamma: &[f64], gamma_dot: &[f64], r_s: f64, phi_s: f64) -> Result<f64> {
    if gamma.len() != gamma_dot.len() {
        return domain("gamma and gamma_dot lengths differ");
    }
    if gamma.iter().any(|g| !(*g > 0.0)) {
        return domain("growth factors must be positive");
    }
    if !(phi_s > 0.0) {
        return domain("solid fraction must be positive");
    }
    Ok(gamma.iter().zip(gamma_dot).map(|(g, gd)| gd / g).sum::<f64>() - r_s / phi_s)
}

/// Lagrangian diffusion tensor J D C^-1.
pub fn chemotaxis_pullback_tensor(f: &Matrix3<f64>, d: f64) -> Result<Matrix3<f64>> {
    let j = f.determinant();
    if !(j > 0.0) {
        return domain("deformation gradient is singular or inverted");
    }
    let c_inv = (f.transpose() * f)
        .try_inverse()
        .ok_or_else(|| crate::Error::Domain("deformation gradient is singular".into()))?;
    Ok(j * d * c_inv)
}

/// tr C - d, with the trace taken over the in-plane block in 2D.
pub fn dilation_measure(f: &Matrix3<f64>, dim: usize) -> f64 {
    let c = f.transpose() * f;
    if dim == 2 {
        c[(0, 0)] + c[(1, 1)] - 2.0
    } else {
        c.trace() - 3.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &Matrix3<f64>, b: &Matrix3<f64>, tol: f64) -> bool {
        (a - b).abs().max() <= tol
    }

    #[test]
    fn zero_growth_is_identity() {
        let g = GrowthFactors::axis_aligned([0.0; 3], [0.1; 3], 3).unwrap();
        assert_eq!(growth_tensor(&g), Matrix3::identity());
    }

    #[test]
    fn axis_aligned_determinant() {
        let g = GrowthFactors::axis_aligned([0.25, 0.49, 0.3], [0.0; 3], 3).unwrap();
        assert!((growth_tensor(&g).determinant() - 1.5 * 1.7 * 1.3).abs() < 1e-14);
        let g2 = GrowthFactors::axis_aligned([0.25, 0.49, 0.3], [0.0; 3], 2).unwrap();
        let fg = growth_tensor(&g2);
        assert_eq!(fg[(2, 2)], 1.0);
        assert!((fg.determinant() - 1.5 * 1.7).abs() < 1e-14);
    }

    #[test]
    fn direction_validation() {
        let bad = [Vector3::x(), Vector3::x(), Vector3::z()];
        assert!(GrowthFactors::new([0.0; 3], bad, [0.0; 3], 3).is_err());
        assert!(GrowthFactors::axis_aligned([-0.1, 0.0, 0.0], [0.0; 3], 3).is_err());
        let tilted = [Vector3::new(0.0, 0.6, 0.8), Vector3::x(), Vector3::new(0.0, 0.8, -0.6)];
        assert!(GrowthFactors::new([0.0; 3], tilted, [0.0; 3], 2).is_err());
        assert!(GrowthFactors::new([0.0; 3], tilted, [0.0; 3], 3).is_ok());
    }

    #[test]
    fn gamma_evolution_examples() {
        let g = GrowthFactors::axis_aligned([0.0; 3], [0.2, 0.15, 0.045], 2).unwrap();
        let e = gamma_evolution(1.0, 1.0, &g).unwrap();
        assert!((e.gamma[0] - 0.1725).abs() < 1e-15 && e.gamma[0] == e.gamma[1]);
        let g3 = GrowthFactors { dim: 3, ..g.clone() };
        assert_eq!(gamma_evolution(0.0, 0.0, &g3).unwrap().gamma, [0.0; 3]);
        let far = gamma_evolution(2.0, 1e9, &g3).unwrap();
        assert!((far.gamma[2] - 0.3).abs() < 1e-9);
        assert_eq!(far.gamma[0], 0.4);
        assert!(gamma_evolution(-1.0, 0.0, &g3).is_err());
    }

    #[test]
    fn decomposition_trivial_cases() {
        let f = Matrix3::new(1.2, 0.1, 0.0, -0.05, 0.9, 0.2, 0.0, 0.1, 1.1);
        let s = elastic_decomposition(&f, &Matrix3::identity()).unwrap();
        assert!(close(&s.fe, &f, 1e-15));
        let s = elastic_decomposition(&f, &f).unwrap();
        assert!(close(&s.fe, &Matrix3::identity(), 1e-14));
        assert!((s.je - 1.0).abs() < 1e-14);
        assert!(elastic_decomposition(&f, &Matrix3::zeros()).is_err());
        assert!(elastic_decomposition(&-f, &Matrix3::identity()).is_err());
    }

    #[test]
    fn stress_free_reference() {
        let s = elastic_decomposition(&Matrix3::identity(), &Matrix3::identity()).unwrap();
        let mu = 3.0;
        let psi = psi_for_incompressibility(&s.f, &s.fg, mu);
        assert_eq!(neo_hookean_stress(&s, mu, psi).unwrap(), Matrix3::zeros());
    }

    #[test]
    fn uniaxial_stretch_stress() {
        let st = 1.3;
        let f = Matrix3::from_diagonal(&Vector3::new(st, 1.0, 1.0));
        let s = elastic_decomposition(&f, &Matrix3::identity()).unwrap();
        let (mu, psi) = (2.0, 0.7);
        let p = neo_hookean_stress(&s, mu, psi).unwrap();
        // J (mu diag(s^2,1,1) - psi I) diag(1/s,1,1)
        let want = Matrix3::from_diagonal(&Vector3::new(st * (mu * st * st - psi) / st, st * (mu - psi), st * (mu - psi)));
        assert!(close(&p, &want, 1e-14));
    }

    #[test]
    fn fluid_stress_cases() {
        let f = Matrix3::new(1.2, 0.1, 0.0, -0.05, 0.9, 0.2, 0.0, 0.1, 1.1);
        assert_eq!(fluid_stress(&f, 0.0, 0.1).unwrap(), Matrix3::zeros());
        assert!(close(&fluid_stress(&Matrix3::identity(), 2.0, 0.1).unwrap(), &(-0.2 * Matrix3::identity()), 1e-16));
        let pf = fluid_stress(&f, 2.0, 0.1).unwrap();
        assert!(((pf * f.transpose()).trace() / f.determinant() + 3.0 * 0.1 * 2.0).abs() < 1e-14);
    }

    #[test]
    fn darcy_cases() {
        let g = Vector3::new(0.3, -1.0, 0.2);
        let e = darcy_pullback(&Matrix3::identity(), 0.5, 0.25, &g).unwrap();
        assert!((e - (-2.0 * g)).norm() < 1e-15);
        assert_eq!(darcy_pullback(&Matrix3::identity(), 0.5, 0.25, &Vector3::zeros()).unwrap(), Vector3::zeros());
        assert!(darcy_pullback(&Matrix3::identity(), 0.5, 0.0, &g).is_err());
    }

    #[test]
    fn mass_source_cases() {
        let g = GrowthFactors::axis_aligned([0.0; 3], [0.1, 0.15, 0.045], 3).unwrap();
        assert_eq!(mass_source_fluid(&g, 0.3, 0.0, 1.2), 0.0);
        assert!((mass_source_fluid(&g, 0.0, 2.0, 1.2) - 2.0 * 0.35).abs() < 1e-15);
        // the chain-rule factor is d gamma3 / dm
        let m = |t: f64| 0.8 + 0.3 * (1.7 * t).sin();
        let gamma3 = |t: f64| gamma_evolution(t, m(t), &g).unwrap().gamma[2] - 0.15 * t;
        let (t, h) = (0.4, 1e-5);
        let fd = (gamma3(t + h) - gamma3(t - h)) / (2.0 * h);
        let dm = 0.3 * 1.7 * (1.7 * t).cos();
        assert!((fd - dgamma3_dm(m(t), 0.045) * dm).abs() < 1e-6);
    }

    #[test]
    fn proliferation_rate() {
        let half = PhaseFractions::from_solid(0.5).unwrap();
        assert_eq!(solid_mass_growth_rate(half, 3.0, 1.0, 1.0), 0.5);
        assert_eq!(solid_mass_growth_rate(half, 1.0, 1.0, 3.0), 0.0);
        for ps in [0.0, 1.0] {
            assert_eq!(solid_mass_growth_rate(PhaseFractions::from_solid(ps).unwrap(), 3.0, 1.0, 1.0), 0.0);
        }
        assert!(solid_mass_growth_rate(half, 0.5, 1.0, 1.0) < 0.0);
        assert!(PhaseFractions::from_solid(1.2).is_err());
    }

    #[test]
    fn constraint_residual_cases() {
        assert_eq!(growth_rate_constraint_residual(&[0.3, 0.5], &[0.0, 0.0], 0.0, 0.4).unwrap(), 0.0);
        let c = [0.2f64, -0.1, 0.35];
        let t = 1.3f64;
        let g: Vec<f64> = c.iter().map(|ci| (ci * t).exp()).collect();
        let gd: Vec<f64> = c.iter().map(|ci| ci * (ci * t).exp()).collect();
        let r = growth_rate_constraint_residual(&g, &gd, 0.1, 0.5).unwrap();
        assert!((r - (0.45 - 0.2)).abs() < 1e-14);
        assert!(growth_rate_constraint_residual(&[0.0, 1.0], &[1.0, 1.0], 0.0, 0.5).is_err());
    }

    #[test]
    fn constraint_residual_with_evolution_rates() {
        // 3D law at constant m: gdot = (d1, d1, d2) by differencing gamma(t)
        let g = GrowthFactors::axis_aligned([0.0; 3], [0.1, 0.15, 0.045], 3).unwrap();
        let (t, m, h) = (2.0, 0.7, 1e-6);
        let at = |t| gamma_evolution(t, m, &g).unwrap().gamma;
        let (gp, gm, g0) = (at(t + h), at(t - h), at(t));
        let gd: Vec<f64> = (0..3).map(|i| (gp[i] - gm[i]) / (2.0 * h)).collect();
        let r = growth_rate_constraint_residual(&g0, &gd, 0.05, 0.5).unwrap();
        let want = 0.1 / g0[0] + 0.1 / g0[1] + 0.15 / g0[2] - 0.1;
        assert!((r - want).abs() < 1e-8);
    }

    #[test]
    fn pullback_cases() {
        assert!(close(&chemotaxis_pullback_tensor(&Matrix3::identity(), 0.3).unwrap(), &(0.3 * Matrix3::identity()), 1e-16));
        let s = 1.4;
        let t = chemotaxis_pullback_tensor(&(s * Matrix3::identity()), 0.3).unwrap();
        assert!(close(&t, &(s * 0.3 * Matrix3::identity()), 1e-14));
        assert!(chemotaxis_pullback_tensor(&Matrix3::zeros(), 0.3).is_err());
    }

    #[test]
    fn dilation_measure_cases() {
        assert_eq!(dilation_measure(&Matrix3::identity(), 3), 0.0);
        assert_eq!(dilation_measure(&Matrix3::identity(), 2), 0.0);
        let f = Matrix3::new(1.1, 0.0, 0.0, 0.0, 1.2, 0.0, 0.0, 0.0, 1.0);
        assert!((dilation_measure(&f, 2) - (1.21 + 1.44 - 2.0)).abs() < 1e-15);
    }
}
