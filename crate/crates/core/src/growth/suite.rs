//! Randomised identity checks over the growth algebra, shared by the
//! `growth-check` command and the test suite.

use nalgebra::{Matrix3, Quaternion, SymmetricEigen, UnitQuaternion, Vector3};

use super::*;
use crate::rng::NoiseStream;

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub samples: usize,
    /// Largest observed error in the check's own measure.
    pub worst: f64,
    pub tolerance: f64,
    pub passed: bool,
}

pub fn random_rotation(rng: &mut NoiseStream) -> Matrix3<f64> {
    loop {
        let q = Quaternion::new(rng.symmetric(), rng.symmetric(), rng.symmetric(), rng.symmetric());
        let n = q.norm();
        if (0.1..=1.0).contains(&n) {
            return UnitQuaternion::from_quaternion(q).to_rotation_matrix().into_inner();
        }
    }
}

/// R1 diag(s) R2 with singular values in [0.5, 2] (condition number <= 4).
pub fn random_deformation(rng: &mut NoiseStream) -> Matrix3<f64> {
    let s = Vector3::from_fn(|_, _| 0.5 * 4f64.powf(rng.unit()));
    random_rotation(rng) * Matrix3::from_diagonal(&s) * random_rotation(rng)
}

fn random_growth(rng: &mut NoiseStream) -> GrowthFactors {
    let r = random_rotation(rng);
    let dirs = [r.column(0).into_owned(), r.column(1).into_owned(), r.column(2).into_owned()];
    let gamma = [rng.unit(), rng.unit(), rng.unit()];
    GrowthFactors::new(gamma, dirs, [0.0; 3], 3).expect("rotation columns are orthonormal")
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

fn mat_rel(a: &Matrix3<f64>, b: &Matrix3<f64>) -> f64 {
    (a - b).abs().max() / a.abs().max().max(b.abs().max()).max(1e-300)
}

struct Tally {
    name: &'static str,
    tolerance: f64,
    worst: f64,
    samples: usize,
    failed: bool,
}

impl Tally {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Self { name, tolerance, worst: 0.0, samples: 0, failed: false }
    }

    fn record(&mut self, err: f64) {
        self.samples += 1;
        if !(err <= self.tolerance) {
            self.failed = true;
        }
        if err > self.worst || err.is_nan() {
            self.worst = err;
        }
    }

    fn finish(self) -> IdentityCheck {
        IdentityCheck {
            name: self.name,
            samples: self.samples,
            worst: self.worst,
            tolerance: self.tolerance,
            passed: !self.failed,
        }
    }
}

/// Finite-difference derivative of [`incompressible_energy`] in F.
fn energy_gradient(f: &Matrix3<f64>, fg: &Matrix3<f64>, mu: f64, psi: f64) -> Matrix3<f64> {
    let h = 1e-5;
    Matrix3::from_fn(|i, j| {
        let mut fp = *f;
        let mut fm = *f;
        fp[(i, j)] += h;
        fm[(i, j)] -= h;
        let wp = incompressible_energy(&fp, fg, mu, psi).expect("small perturbation of a valid state");
        let wm = incompressible_energy(&fm, fg, mu, psi).expect("small perturbation of a valid state");
        (wp - wm) / (2.0 * h)
    })
}

/// Run every identity on `samples` random states drawn from `seed`.
pub fn identity_suite(samples: usize, seed: u64) -> Vec<IdentityCheck> {
    let mut rng = NoiseStream::new(seed);
    let mut det_split = Tally::new("J = J_e J_g", 1e-10);
    let mut product = Tally::new("F = F_e F_g", 1e-12);
    let mut frame = Tally::new("det F_g frame invariance", 1e-12);
    let mut spd = Tally::new("J D C^-1 symmetric positive definite", 1e-12);
    let mut energy = Tally::new("P_e = dW/dF on J_e = 1", 1e-6);
    let mut incompressible = Tally::new("J_e = 1 implies J = J_g", 1e-10);
    let mut fluid = Tally::new("tr(P_f F^T)/J = -3 alpha_BW p", 1e-10);
    let mut darcy = Tally::new("Darcy pullback objectivity", 1e-12);
    let mut lin = Tally::new("tr C - d = 2 div u + O(|grad u|^2)", 1e-7);
    let mut rest = Tally::new("tr C - d = 0 at F = I", 0.0);

    for n in 0..samples {
        let f = random_deformation(&mut rng);
        let g = random_growth(&mut rng);
        let fg = growth_tensor(&g);

        let st = elastic_decomposition(&f, &fg).expect("random F has positive determinant");
        det_split.record(rel(st.j, st.je * st.jg));
        product.record(mat_rel(&f, &(st.fe * st.fg)));

        let closed = (1.0 + g.gamma[0].sqrt()) * (1.0 + g.gamma[1].sqrt()) * (1.0 + g.gamma[2]);
        frame.record(rel(fg.determinant(), closed));

        let d = 0.05 + rng.unit();
        let t = chemotaxis_pullback_tensor(&f, d).expect("nonsingular F");
        let asym = mat_rel(&t, &t.transpose());
        let min_eig = SymmetricEigen::new(0.5 * (t + t.transpose())).eigenvalues.min();
        spd.record(if min_eig > 0.0 { asym } else { f64::INFINITY });

        // elastic part with unit determinant
        let fe = random_deformation(&mut rng);
        let fe = fe / fe.determinant().cbrt();
        let fi = fe * fg;
        let mu = 0.5 + rng.unit();
        let psi = 2.0 * mu * rng.unit();
        let si = elastic_decomposition(&fi, &fg).expect("product of valid tensors");
        incompressible.record(rel(si.j, si.jg));
        let pe = neo_hookean_stress(&si, mu, psi).expect("valid state");
        energy.record(mat_rel(&pe, &energy_gradient(&fi, &fg, mu, psi)));

        let (p, abw) = (rng.symmetric(), rng.unit());
        let pf = fluid_stress(&f, p, abw).expect("nonsingular F");
        fluid.record((pf * f.transpose()).trace() / st.j + 3.0 * abw * p);

        let r = random_rotation(&mut rng);
        let grad = Vector3::new(rng.symmetric(), rng.symmetric(), rng.symmetric());
        let (kt, phi_f) = (0.01 + rng.unit(), 0.05 + 0.9 * rng.unit());
        let lag = darcy_pullback(&r, kt, phi_f, &grad).expect("valid inputs");
        let eul = darcy_pullback(&Matrix3::identity(), kt, phi_f, &grad).expect("valid inputs");
        darcy.record((lag - r * eul).norm() / eul.norm().max(1e-300));

        let dim = 2 + n % 2;
        let mut grad_u = Matrix3::from_fn(|_, _| rng.symmetric());
        if dim == 2 {
            for k in 0..3 {
                grad_u[(2, k)] = 0.0;
                grad_u[(k, 2)] = 0.0;
            }
        }
        let grad_u = grad_u * (1e-4 / grad_u.norm());
        let div_u = grad_u.trace();
        lin.record((dilation_measure(&(Matrix3::identity() + grad_u), dim) - 2.0 * div_u).abs());
        rest.record(dilation_measure(&Matrix3::identity(), dim).abs());
    }
    [det_split, product, frame, spd, energy, incompressible, fluid, darcy, lin, rest]
        .into_iter()
        .map(Tally::finish)
        .collect()
}
