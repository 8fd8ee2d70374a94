//! Polynomial roots.
//!
//! Coefficients are always stored in ascending order, `c[0] + c[1] z + ...`.
//! The primary solver computes eigenvalues of the balanced companion matrix
//! by shifted complex QR and polishes them with Newton steps on the original
//! polynomial. [`aberth_roots`] is an independent simultaneous iteration used
//! for cross-checking.

mod aberth;
mod companion;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub use aberth::aberth_roots;
pub use companion::hessenberg_eigenvalues;

/// Relative size below which leading coefficients are dropped.
pub const TRIM_TOL: f64 = 1e-14;

/// Horner evaluation of p and p' at z.
pub fn eval_with_derivative(c: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &ci in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + ci;
    }
    (p, dp)
}

pub fn eval(c: &[Complex64], z: Complex64) -> Complex64 {
    c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &ci| acc * z + ci)
}

pub fn eval_real(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ci| acc * x + ci)
}

/// Drop negligible leading coefficients. Errors when nothing is left.
pub fn trim(c: &[Complex64]) -> Result<&[Complex64]> {
    let scale = c.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 || !scale.is_finite() {
        return Err(Error::DegeneratePolynomial);
    }
    let mut n = c.len();
    while n > 0 && c[n - 1].norm() <= TRIM_TOL * scale {
        n -= 1;
    }
    Ok(&c[..n])
}

fn sort_roots(r: &mut [Complex64]) {
    r.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

/// Newton polishing that only accepts steps reducing |p|.
fn polish(c: &[Complex64], z: Complex64) -> Complex64 {
    let mut z = z;
    let (mut pz, _) = eval_with_derivative(c, z);
    for _ in 0..4 {
        let (p, dp) = eval_with_derivative(c, z);
        if dp.norm() == 0.0 || p.norm() == 0.0 {
            break;
        }
        let cand = z - p / dp;
        let pc = eval(c, cand);
        if pc.norm() < pz.norm() {
            z = cand;
            pz = pc;
        } else {
            break;
        }
    }
    z
}

/// All roots of the polynomial with ascending coefficients `coeffs`,
/// sorted by (Re, Im).
///
/// Exact zero trailing coefficients produce exact zero roots.
pub fn poly_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let c = trim(coeffs)?;
    let n = c.len() - 1;
    let zeros = c.iter().take_while(|z| z.norm() == 0.0).count();
    let mut roots = vec![Complex64::new(0.0, 0.0); zeros];
    let rest = &c[zeros..];
    let m = rest.len() - 1;
    if m > 0 {
        let lead = rest[m];
        // companion matrix in upper Hessenberg form, first row -a_{m-1..0}/a_m
        let mut h = vec![Complex64::new(0.0, 0.0); m * m];
        for j in 0..m {
            h[j] = -rest[m - 1 - j] / lead;
        }
        for i in 1..m {
            h[i * m + i - 1] = Complex64::new(1.0, 0.0);
        }
        let eig = hessenberg_eigenvalues(&mut h, m)?;
        roots.extend(eig.into_iter().map(|z| polish(rest, z)));
    }
    debug_assert_eq!(roots.len(), n);
    sort_roots(&mut roots);
    Ok(roots)
}

/// [`poly_roots`] for real coefficients.
pub fn poly_roots_real(coeffs: &[f64]) -> Result<Vec<Complex64>> {
    let c: Vec<Complex64> = coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    poly_roots(&c)
}

/// Expand prod (z - r_i) into ascending coefficients.
pub fn from_roots(roots: &[Complex64]) -> Vec<Complex64> {
    let mut c = vec![Complex64::new(1.0, 0.0)];
    for &r in roots {
        let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
        for (i, &ci) in c.iter().enumerate() {
            next[i + 1] += ci;
            next[i] -= ci * r;
        }
        c = next;
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn unit_circle_pair() {
        let r = poly_roots_real(&[1.0, 0.0, 1.0]).unwrap();
        assert!((r[0] - c(0.0, -1.0)).norm() < 1e-14);
        assert!((r[1] - c(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn factored_cubic() {
        let r = poly_roots_real(&[-6.0, 11.0, -6.0, 1.0]).unwrap();
        for (z, want) in r.iter().zip([1.0, 2.0, 3.0]) {
            assert!((z - c(want, 0.0)).norm() < 1e-12, "{z}");
        }
    }

    #[test]
    fn trailing_zeros_give_exact_zero_roots() {
        let r = poly_roots_real(&[0.0, 0.0, 2.0, 1.0]).unwrap();
        assert_eq!(r.iter().filter(|z| z.norm() == 0.0).count(), 2);
        assert!((r[0] - c(-2.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn negligible_leading_coefficients_are_trimmed() {
        let r = poly_roots_real(&[-2.0, 1.0, 1e-17]).unwrap();
        assert_eq!(r.len(), 1);
        assert!((r[0] - c(2.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn all_zero_is_degenerate() {
        assert!(matches!(poly_roots_real(&[0.0, 0.0]), Err(Error::DegeneratePolynomial)));
        assert!(matches!(poly_roots_real(&[]), Err(Error::DegeneratePolynomial)));
    }

    #[test]
    fn constant_has_no_roots() {
        assert!(poly_roots_real(&[3.0]).unwrap().is_empty());
    }

    #[test]
    fn wide_dynamic_range_coefficients() {
        // roots spread over ten decades, the kind of spread produced by the
        // characteristic polynomial (elastic moduli vs. storage coefficients)
        let want = [c(-1e-4, 0.0), c(-0.3, 0.0), c(-2.0, 5.0), c(-2.0, -5.0), c(-3e5, 0.0)];
        let coeffs = from_roots(&want);
        let r = poly_roots(&coeffs).unwrap();
        let scale = coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for z in &r {
            let res = eval(&coeffs, *z).norm();
            assert!(res <= 1e-8 * scale * z.norm().max(1.0).powi(5), "{z} {res}");
        }
        for w in &want {
            assert!(r.iter().any(|z| (z - w).norm() <= 1e-8 * w.norm()), "{w} not found in {r:?}");
        }
    }

    #[test]
    fn repeated_roots_are_close() {
        let want = [c(1.0, 0.0), c(1.0, 0.0), c(-0.5, 0.0)];
        let r = poly_roots(&from_roots(&want)).unwrap();
        assert!((r[1] - c(1.0, 0.0)).norm() < 1e-6);
        assert!((r[2] - c(1.0, 0.0)).norm() < 1e-6);
    }
}
