//! Routh-Hurwitz and discriminant conditions for diffusion-driven
//! instability, critical wavenumbers and critical parameters.
//!
//! Writing `x = k^2`, the constant coefficient of the chemotaxis factor is
//! `a0(x) = x (A3 x^2 + A2 x + A1)` and the constant coefficient of the full
//! polynomial is `d0(x) = a0 c0 + b0 = kappa~ x^3 (T2 x^2 + T1 x + T0)`.
//! A real root crosses zero exactly when `a0` (uncoupled) or `d0` (coupled)
//! becomes negative for some `x > 0`.


use crate::error::{Error, Result};
use crate::model::{ParameterSet, SteadyState};
use crate::roots::poly_roots_real;

/// Upper end of the k^2 window used for numerical minimisation.
pub const DEFAULT_K2_MAX: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Uncoupled,
    Coupled,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RouthHurwitz {
    pub stable: bool,
    pub margin: f64,
}

/// Stability of alpha3 z^3 + alpha2 z^2 + alpha1 z + alpha0.
pub fn routh_hurwitz_cubic(alpha3: f64, alpha2: f64, alpha1: f64, alpha0: f64) -> RouthHurwitz {
    if !(alpha3 > 0.0) {
        return RouthHurwitz { stable: false, margin: alpha3 };
    }
    let margin = [alpha2, alpha1, alpha0, alpha2 * alpha1 - alpha3 * alpha0]
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    RouthHurwitz { stable: margin > 0.0, margin }
}

/// Cubic factor (phi + A_e)(phi + delta_F)(phi + delta_B) governing
/// spatially homogeneous perturbations, as [alpha3, alpha2, alpha1, alpha0].
pub fn homogeneous_cubic(p: &ParameterSet, s: &SteadyState) -> [f64; 4] {
    let (a, f, b) = (s.a_e, p.delta_f, p.delta_b);
    [1.0, a + f + b, a * f + a * b + f * b, a * f * b]
}

/// Quadratic q(x) = q0 + q1 x + q2 x^2 in x = k^2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedQuadratic {
    pub q0: f64,
    pub q1: f64,
    pub q2: f64,
}

impl ReducedQuadratic {
    pub fn eval(&self, x: f64) -> f64 {
        self.q0 + x * (self.q1 + x * self.q2)
    }

    /// Can q be negative for some x > 0 (no upper bound on x)?
    pub fn admits_negative(&self) -> bool {
        self.q0 < 0.0 || (self.q1 < 0.0 && self.q1 * self.q1 - 4.0 * self.q2 * self.q0 > 0.0)
    }

    fn vertex(&self) -> Option<f64> {
        (self.q2 > 0.0).then(|| -self.q1 / (2.0 * self.q2))
    }
}

/// a0(x) / x for the uncoupled system.
fn uncoupled_reduced(p: &ParameterSet, s: &SteadyState) -> ReducedQuadratic {
    let (dm, df, dlf, dlb) = (p.d_m, p.d_f, p.delta_f, p.delta_b);
    let (ae, am, ab, h3, chi) = (s.a_e, s.a_m, s.a_b, s.h3, s.chi);
    ReducedQuadratic {
        q0: ab * h3 * chi + ae * dm * dlb * dlf - am * chi * dlb,
        q1: ae * df * dm * dlb + ae * dm * dlf - am * chi,
        q2: ae * df * dm,
    }
}

/// (T0, T1, T2) with d0 = kappa~ x^3 (T2 x^2 + T1 x + T0).
fn coupled_reduced(p: &ParameterSet, s: &SteadyState) -> ReducedQuadratic {
    let a = uncoupled_reduced(p, s);
    let stiff = 2.0 * p.mu() + p.lambda();
    let g = p.xi_f * s.sigma_act_lin * s.chi * s.a_e;
    ReducedQuadratic { q0: stiff * a.q0 - p.delta_b * g, q1: stiff * a.q1 - g, q2: stiff * a.q2 }
}

/// Positive real roots of the polynomial with ascending `coeffs`, keeping
/// only those where the polynomial is negligible relative to its terms.
fn positive_real_roots(coeffs: &[f64]) -> Result<Vec<f64>> {
    let roots = match poly_roots_real(coeffs) {
        Ok(r) => r,
        Err(Error::DegeneratePolynomial) => return Ok(Vec::new()),
        Err(e) => return Err(e),
    };
    let mut out: Vec<f64> = roots
        .into_iter()
        .filter(|z| z.re > 0.0 && z.im.abs() <= 1e-8 * z.norm().max(1.0))
        .map(|z| z.re)
        .filter(|&x| {
            let (mut v, mut scale, mut xp) = (0.0, 0.0, 1.0);
            for &c in coeffs {
                v += c * xp;
                scale += (c * xp).abs();
                xp *= x;
            }
            v.abs() <= 1e-8 * scale
        })
        .collect();
    out.sort_by(f64::total_cmp);
    out.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs());
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct UncoupledConditions {
    /// Coefficient of x^2 in a0; patterning needs it negative (or uc2 < 0).
    pub uc1: f64,
    /// Coefficient of x in a0.
    pub uc2: f64,
    /// 4 uc1^2 - 12 A3 uc2; must be positive.
    pub uc3: f64,
    pub uc1_holds: bool,
    pub uc2_holds: bool,
    pub uc3_holds: bool,
    /// Minimum of a0 over the critical wavenumbers in (0, k2_max] and k2_max.
    pub min_a0: f64,
    pub argmin_k2: f64,
    pub patterning: bool,
}

fn a0_at(q: &ReducedQuadratic, x: f64) -> f64 {
    x * q.eval(x)
}

pub fn uncoupled_conditions(p: &ParameterSet, s: &SteadyState, k2_max: f64) -> Result<UncoupledConditions> {
    let q = uncoupled_reduced(p, s);
    let uc3 = 4.0 * q.q1 * q.q1 - 12.0 * q.q2 * q.q0;
    let mut best = (a0_at(&q, k2_max), k2_max);
    for x in critical_wavenumber(p, s, Mode::Uncoupled)? {
        if x <= k2_max {
            let v = a0_at(&q, x);
            if v < best.0 {
                best = (v, x);
            }
        }
    }
    let (uc1_holds, uc2_holds, uc3_holds) = (q.q1 < 0.0, q.q0 < 0.0, uc3 > 0.0);
    Ok(UncoupledConditions {
        uc1: q.q1,
        uc2: q.q0,
        uc3,
        uc1_holds,
        uc2_holds,
        uc3_holds,
        min_a0: best.0,
        argmin_k2: best.1,
        patterning: (uc1_holds || uc2_holds) && uc3_holds && best.0 < 0.0,
    })
}

/// Coefficients of d0'(x) / (kappa~ x) = theta4 x^3 + theta3 x^2 + theta2 x + theta1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaCoeffs {
    pub theta1: f64,
    pub theta2: f64,
    pub theta3: f64,
    pub theta4: f64,
}

impl ThetaCoeffs {
    /// d0'(x) for the given kappa~ = kappa/eta.
    pub fn d0_derivative(&self, kappa_over_eta: f64, x: f64) -> f64 {
        kappa_over_eta * x * (self.theta1 + x * (self.theta2 + x * (self.theta3 + x * self.theta4)))
    }
}

pub fn coupled_theta(p: &ParameterSet, s: &SteadyState) -> ThetaCoeffs {
    let t = coupled_reduced(p, s);
    // d0 / kappa~ = T2 x^5 + T1 x^4 + T0 x^3 has no x^2 term, so theta1 = 0
    ThetaCoeffs { theta1: 0.0, theta2: 3.0 * t.q0, theta3: 4.0 * t.q1, theta4: 5.0 * t.q2 }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoupledConditions {
    pub theta: ThetaCoeffs,
    pub c1_holds: bool,
    pub c2: f64,
    pub c2_holds: bool,
    pub c3: f64,
    pub c3_holds: bool,
    /// Discriminant of theta4 x^4 + theta3 x^3 + theta2 x^2 + theta1 x.
    pub disc: f64,
    pub disc_holds: bool,
    /// d0 / (kappa~ x^3) as a quadratic in x.
    pub reduced: ReducedQuadratic,
    /// Minimum of d0 over the critical wavenumbers in (0, k2_max] and k2_max.
    pub min_d0: f64,
    pub argmin_k2: f64,
    pub patterning: bool,
}

fn cubic_discriminant(a: f64, b: f64, c: f64, d: f64) -> f64 {
    18.0 * a * b * c * d - 4.0 * b * b * b * d + b * b * c * c - 4.0 * a * c * c * c - 27.0 * a * a * d * d
}

pub fn coupled_conditions(p: &ParameterSet, s: &SteadyState, k2_max: f64) -> Result<CoupledConditions> {
    let th = coupled_theta(p, s);
    let (t1, t2, t3, t4) = (th.theta1, th.theta2, th.theta3, th.theta4);
    let c2 = t2 * t3 - t1 * t4;
    let c3 = t1 * t2 * t3 - t1 * t1 * t4;
    // x (theta4 x^3 + ...): the extra root at 0 multiplies the cubic
    // discriminant by the square of the cubic's value at 0
    let disc = t1 * t1 * cubic_discriminant(t4, t3, t2, t1);
    let reduced = coupled_reduced(p, s);
    let kt = p.kappa_over_eta();
    let d0 = |x: f64| kt * x * x * x * reduced.eval(x);
    let mut best = (d0(k2_max), k2_max);
    for x in critical_wavenumber(p, s, Mode::Coupled)? {
        if x <= k2_max && d0(x) < best.0 {
            best = (d0(x), x);
        }
    }
    Ok(CoupledConditions {
        theta: th,
        c1_holds: t1 > 0.0 && t2 > 0.0 && t3 > 0.0,
        c2,
        c2_holds: c2 > 0.0,
        c3,
        c3_holds: c3 > 0.0,
        disc,
        disc_holds: disc > 0.0,
        reduced,
        min_d0: best.0,
        argmin_k2: best.1,
        patterning: reduced.admits_negative() && best.0 < 0.0,
    })
}

/// Positive real stationary points of a0 (uncoupled) or d0 (coupled) in k^2.
pub fn critical_wavenumber(p: &ParameterSet, s: &SteadyState, mode: Mode) -> Result<Vec<f64>> {
    match mode {
        Mode::Uncoupled => {
            let q = uncoupled_reduced(p, s);
            positive_real_roots(&[q.q0, 2.0 * q.q1, 3.0 * q.q2])
        }
        Mode::Coupled => critical_wavenumber_from_theta(&coupled_theta(p, s)),
    }
}

/// Positive real roots of theta4 x^3 + theta3 x^2 + theta2 x + theta1.
pub fn critical_wavenumber_from_theta(th: &ThetaCoeffs) -> Result<Vec<f64>> {
    positive_real_roots(&[th.theta1, th.theta2, th.theta3, th.theta4])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalParameter {
    pub value: f64,
    /// Target minimum at `value`.
    pub g: f64,
    pub iterations: usize,
}

fn reduced_for(p: &ParameterSet, s: &SteadyState, mode: Mode) -> ReducedQuadratic {
    match mode {
        Mode::Uncoupled => uncoupled_reduced(p, s),
        Mode::Coupled => {
            let t = coupled_reduced(p, s);
            let stiff = 2.0 * p.mu() + p.lambda();
            ReducedQuadratic { q0: t.q0 / stiff, q1: t.q1 / stiff, q2: t.q2 / stiff }
        }
    }
}

/// min over x in [0, k2_max] of a0/x (uncoupled) or d0/(kappa~ (2mu+lambda) x^3)
/// (coupled). Negative exactly when the target dips below zero in the window.
pub fn critical_target(p: &ParameterSet, mode: Mode, k2_max: f64) -> Result<f64> {
    let s = SteadyState::new(p)?;
    let q = reduced_for(p, &s, mode);
    let mut cands = vec![0.0, k2_max];
    if let Some(v) = q.vertex() {
        cands.push(v);
    }
    cands.extend(critical_wavenumber(p, &s, mode)?);
    Ok(cands
        .into_iter()
        .filter(|x| (0.0..=k2_max).contains(x))
        .map(|x| q.eval(x))
        .fold(f64::INFINITY, f64::min))
}

/// Value of `param` in `bracket` where patterning switches on or off.
pub fn critical_parameter(
    p: &ParameterSet,
    param: &str,
    bracket: [f64; 2],
    mode: Mode,
    k2_max: f64,
) -> Result<CriticalParameter> {
    let g = |theta: f64| -> Result<f64> {
        let mut q = p.clone();
        q.set(param, theta)?;
        critical_target(&q, mode, k2_max)
    };
    let [mut lo, mut hi] = bracket;
    let (mut g_lo, g_hi) = (g(lo)?, g(hi)?);
    if g_lo == 0.0 {
        return Ok(CriticalParameter { value: lo, g: 0.0, iterations: 0 });
    }
    if g_hi == 0.0 {
        return Ok(CriticalParameter { value: hi, g: 0.0, iterations: 0 });
    }
    if !(g_lo * g_hi < 0.0) {
        return Err(Error::NoSignChange { lo, hi, g_lo, g_hi });
    }
    let mut best = if g_lo.abs() < g_hi.abs() { (lo, g_lo) } else { (hi, g_hi) };
    let mut iterations = 0;
    while iterations < 200 {
        iterations += 1;
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let gm = g(mid)?;
        if gm.abs() < best.1.abs() {
            best = (mid, gm);
        }
        if gm == 0.0 {
            break;
        }
        if (gm < 0.0) == (g_lo < 0.0) {
            lo = mid;
            g_lo = gm;
        } else {
            hi = mid;
        }
    }
    Ok(CriticalParameter { value: best.0, g: best.1, iterations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::roots::poly_roots_real;
    use crate::stability::CharPoly;

    fn with(f: impl FnOnce(&mut ParameterSet)) -> (ParameterSet, SteadyState) {
        let mut p = ParameterSet::default();
        f(&mut p);
        let s = SteadyState::new(&p).unwrap();
        (p, s)
    }

    fn dense_min(f: impl Fn(f64) -> f64) -> f64 {
        (1..=20_000).map(|i| f(50.0 * i as f64 / 20_000.0)).fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn routh_hurwitz_examples() {
        assert_eq!(routh_hurwitz_cubic(1.0, 1.0, 1.0, 2.0), RouthHurwitz { stable: false, margin: -1.0 });
        let rh = routh_hurwitz_cubic(1.0, 6.0, 11.0, 6.0);
        assert!(rh.stable && rh.margin == 6.0);
        let r = poly_roots_real(&[6.0, 11.0, 6.0, 1.0]).unwrap();
        assert!(r.iter().all(|z| z.re < 0.0));
    }

    #[test]
    fn homogeneous_cubic_is_stable() {
        let (p, s) = with(|_| {});
        let [a3, a2, a1, a0] = homogeneous_cubic(&p, &s);
        assert!(routh_hurwitz_cubic(a3, a2, a1, a0).stable);
    }

    #[test]
    fn reduced_quadratic_matches_charpoly() {
        let (p, s) = with(|p| p.delta_b = 1.7);
        let q = uncoupled_reduced(&p, &s);
        let t = coupled_reduced(&p, &s);
        for x in [0.1, 1.0, 7.5] {
            let cp = CharPoly::new(&p, &s, x);
            assert!((cp.a[0] - x * q.eval(x)).abs() < 1e-13 * (1.0 + cp.a[0].abs()));
            let d0 = cp.full[0];
            let want = p.kappa_over_eta() * x.powi(3) * t.eval(x);
            assert!((d0 - want).abs() <= 1e-12 * d0.abs().max(1e-12), "{d0} {want}");
        }
    }

    #[test]
    fn no_chemotaxis_conditions_fail() {
        let (p, s) = with(|p| p.alpha = 0.0);
        let u = uncoupled_conditions(&p, &s, DEFAULT_K2_MAX).unwrap();
        assert!(u.uc1 > 0.0 && u.uc2 > 0.0);
        assert!(!u.patterning);
    }

    #[test]
    fn reference_point_patterns_when_uncoupled() {
        let (p, s) = with(|_| {});
        let u = uncoupled_conditions(&p, &s, DEFAULT_K2_MAX).unwrap();
        assert!(u.patterning);
        let q = uncoupled_reduced(&p, &s);
        let dense = dense_min(|x| x * q.eval(x));
        assert!((dense - u.min_a0).abs() <= 1e-6 * dense.abs());
    }

    #[test]
    fn theta_without_feedback_reduces_to_uncoupled() {
        let (p, s) = with(|p| p.xi_f = 0.0);
        let th = coupled_theta(&p, &s);
        let q = uncoupled_reduced(&p, &s);
        let stiff = 2.0 * p.mu() + p.lambda();
        assert_eq!(th.theta1, 0.0);
        assert!((th.theta2 - 3.0 * stiff * q.q0).abs() <= 1e-12 * th.theta2.abs());
        assert!((th.theta3 - 4.0 * stiff * q.q1).abs() <= 1e-12 * th.theta3.abs());
        assert!(th.theta4 > 0.0);
    }

    #[test]
    fn theta_matches_difference_quotient_of_d0() {
        for m0 in [0.4, 0.9, 2.0, 3.5] {
            let (p, s) = with(|p| p.m0 = m0);
            let th = coupled_theta(&p, &s);
            let d0 = |x: f64| CharPoly::new(&p, &s, x).full[0];
            for x in [0.3, 2.0, 9.0] {
                let h = 1e-4 * x;
                let fd = (d0(x + h) - d0(x - h)) / (2.0 * h);
                let an = th.d0_derivative(p.kappa_over_eta(), x);
                let scale = fd.abs().max(1e-6 * p.kappa_over_eta() * x.powi(4) * th.theta4);
                assert!((fd - an).abs() <= 1e-6 * scale, "m0 {m0} x {x}: {fd} vs {an}");
            }
        }
    }

    #[test]
    fn theta_without_active_stress_matches_uncoupled_flag() {
        for m0 in [0.15, 0.5, 2.0, 4.0, 4.9] {
            let (p, s) = with(|p| {
                p.tau = 0.0;
                p.m0 = m0;
            });
            let u = uncoupled_conditions(&p, &s, DEFAULT_K2_MAX).unwrap();
            let c = coupled_conditions(&p, &s, DEFAULT_K2_MAX).unwrap();
            assert_eq!(u.patterning, c.patterning, "m0 = {m0}");
        }
    }

    #[test]
    fn trivial_theta_has_no_critical_wavenumber() {
        let th = ThetaCoeffs { theta1: 0.0, theta2: 0.0, theta3: 0.0, theta4: 2.0 };
        assert!(critical_wavenumber_from_theta(&th).unwrap().is_empty());
    }

    #[test]
    fn critical_wavenumbers_are_stationary() {
        let (p, s) = with(|p| p.m0 = 0.5);
        for mode in [Mode::Uncoupled, Mode::Coupled] {
            let ks = critical_wavenumber(&p, &s, mode).unwrap();
            assert!(!ks.is_empty());
            for x in ks {
                let h = 1e-6 * x;
                let d0 = |x: f64| match mode {
                    Mode::Uncoupled => CharPoly::new(&p, &s, x).a[0],
                    Mode::Coupled => CharPoly::new(&p, &s, x).full[0],
                };
                let scale = d0(x).abs().max(1e-300);
                assert!(((d0(x + h) - d0(x - h)) / (2.0 * h) * x).abs() <= 1e-5 * scale);
            }
        }
    }

    #[test]
    fn coupled_and_uncoupled_critical_wavenumbers_differ() {
        let (p, s) = with(|p| p.m0 = 0.5);
        let u = critical_wavenumber(&p, &s, Mode::Uncoupled).unwrap();
        let c = critical_wavenumber(&p, &s, Mode::Coupled).unwrap();
        assert!((u[0] - c[0]).abs() > 1e-6);
    }

    #[test]
    fn critical_density_is_where_a0_touches_zero() {
        // the upper boundary is where a0 touches zero at an interior k^2
        let p = ParameterSet::default();
        let lo = critical_parameter(&p, "m0", [4.0, 5.0], Mode::Uncoupled, DEFAULT_K2_MAX).unwrap();
        assert!(lo.g.abs() <= 1e-8);
        let mut q = p.clone();
        q.m0 = lo.value;
        let s = SteadyState::new(&q).unwrap();
        let ks = critical_wavenumber(&q, &s, Mode::Uncoupled).unwrap();
        let a0 = CharPoly::new(&q, &s, *ks.last().unwrap()).a[0];
        assert!(a0.abs() <= 1e-6);
        let wide = critical_parameter(&p, "m0", [3.0, 7.0], Mode::Uncoupled, DEFAULT_K2_MAX).unwrap();
        assert!((wide.value - lo.value).abs() <= 1e-6);
    }

    #[test]
    fn flag_flip_brackets_critical_density() {
        let p = ParameterSet::default();
        let c = critical_parameter(&p, "m0", [0.05, 1.0], Mode::Uncoupled, DEFAULT_K2_MAX).unwrap();
        let flag = |m0: f64| {
            let (q, s) = with(|q| q.m0 = m0);
            uncoupled_conditions(&q, &s, DEFAULT_K2_MAX).unwrap().patterning
        };
        assert!(!flag(c.value - 1e-3));
        assert!(flag(c.value + 1e-3));
    }

    #[test]
    fn no_sign_change_reports_values() {
        let p = ParameterSet::default();
        match critical_parameter(&p, "m0", [1.5, 2.5], Mode::Uncoupled, DEFAULT_K2_MAX) {
            Err(Error::NoSignChange { g_lo, g_hi, .. }) => assert!(g_lo < 0.0 && g_hi < 0.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn coupling_lowers_critical_alpha_below_unit_density() {
        // with m0 < 1/sqrt(zeta) the active stress slope is positive and the
        // feedback is destabilising
        let mut p = ParameterSet::default();
        p.m0 = 0.5;
        let u = critical_parameter(&p, "alpha", [0.0, 40.0], Mode::Uncoupled, DEFAULT_K2_MAX).unwrap();
        let c = critical_parameter(&p, "alpha", [0.0, 40.0], Mode::Coupled, DEFAULT_K2_MAX).unwrap();
        assert!(c.value < u.value - 1e-6, "coupled {} uncoupled {}", c.value, u.value);
    }

    #[test]
    fn coupled_flag_agrees_with_dense_scan() {
        let mut rng = crate::rng::NoiseStream::new(11);
        for _ in 0..100 {
            let mut p = ParameterSet::default();
            p.m0 = 0.1 + 4.9 * rng.unit();
            p.alpha = 12.0 * rng.unit();
            p.xi_f = 0.5 * rng.unit();
            p.tau = 120.0 * rng.symmetric();
            p.d_m = 0.005 + 0.05 * rng.unit();
            let s = SteadyState::new(&p).unwrap();
            let c = coupled_conditions(&p, &s, DEFAULT_K2_MAX).unwrap();
            let dense = dense_min(|x| CharPoly::new(&p, &s, x).full[0]);
            let tol = 1e-9 * dense.abs().max(c.min_d0.abs());
            assert!(c.min_d0.min(0.0) <= dense + tol, "{} > {}", c.min_d0, dense);
            if dense < -tol {
                assert!(c.patterning, "{p:?}");
            } else if c.patterning {
                // a dip narrower than the scan spacing
                assert!(c.argmin_k2 < 50.0);
            }
        }
    }
}
