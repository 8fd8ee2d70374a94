use num_complex::Complex64;

use crate::error::{Error, Result};

const RADIX: f64 = 2.0;

fn abs1(z: Complex64) -> f64 {
    z.re.abs() + z.im.abs()
}

/// Diagonal similarity scaling by powers of two so that row and column
/// norms are comparable. Keeps Hessenberg structure.
fn balance(h: &mut [Complex64], n: usize) {
    let sqrdx = RADIX * RADIX;
    loop {
        let mut done = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += abs1(h[j * n + i]);
                    r += abs1(h[i * n + j]);
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= sqrdx;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= sqrdx;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                let gi = 1.0 / f;
                for j in 0..n {
                    h[i * n + j] *= gi;
                    h[j * n + i] *= f;
                }
            }
        }
        if done {
            break;
        }
    }
}

fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let m = (a + d) * 0.5;
    let (l1, l2) = (m + disc, m - disc);
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Eigenvalues of the row-major upper Hessenberg matrix `h` (n x n), which
/// is overwritten. Balancing is applied first.
pub fn hessenberg_eigenvalues(h: &mut [Complex64], n: usize) -> Result<Vec<Complex64>> {
    assert_eq!(h.len(), n * n);
    balance(h, n);
    let at = |i: usize, j: usize| i * n + j;
    let mut eig = vec![Complex64::new(0.0, 0.0); n];
    if n == 0 {
        return Ok(eig);
    }
    let norm = h.iter().map(|z| abs1(*z)).fold(0.0, f64::max);
    let max_iter = 60 * n;
    let mut total = 0usize;
    let mut iter = 0usize;
    let mut hi = n - 1;
    let mut rot: Vec<(f64, Complex64)> = Vec::with_capacity(n);
    while hi > 0 {
        let mut l = hi;
        while l > 0 {
            let s = abs1(h[at(l - 1, l - 1)]) + abs1(h[at(l, l)]);
            let s = if s == 0.0 { norm } else { s };
            if abs1(h[at(l, l - 1)]) <= f64::EPSILON * s {
                h[at(l, l - 1)] = Complex64::new(0.0, 0.0);
                break;
            }
            l -= 1;
        }
        if l == hi {
            eig[hi] = h[at(hi, hi)];
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > max_iter {
            return Err(Error::RootsNotConverged { iterations: total });
        }
        let mu = if iter % 10 == 0 {
            // exceptional shift to break cycles
            h[at(hi, hi)] + Complex64::new(0.75 * abs1(h[at(hi, hi - 1)]), 0.0)
        } else {
            wilkinson_shift(h[at(hi - 1, hi - 1)], h[at(hi - 1, hi)], h[at(hi, hi - 1)], h[at(hi, hi)])
        };
        for k in l..=hi {
            h[at(k, k)] -= mu;
        }
        rot.clear();
        for k in l..hi {
            let x = h[at(k, k)];
            let y = h[at(k + 1, k)];
            let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
            let (c, s) = if r == 0.0 {
                (1.0, Complex64::new(0.0, 0.0))
            } else if x.norm() == 0.0 {
                (0.0, Complex64::new(1.0, 0.0))
            } else {
                let ax = x.norm();
                (ax / r, (x / ax) * y.conj() / r)
            };
            for j in k..=hi {
                let a = h[at(k, j)];
                let b = h[at(k + 1, j)];
                h[at(k, j)] = a * c + s * b;
                h[at(k + 1, j)] = -s.conj() * a + b * c;
            }
            rot.push((c, s));
        }
        for (idx, &(c, s)) in rot.iter().enumerate() {
            let k = l + idx;
            let top = (k + 2).min(hi);
            for i in l..=top {
                let a = h[at(i, k)];
                let b = h[at(i, k + 1)];
                h[at(i, k)] = a * c + b * s.conj();
                h[at(i, k + 1)] = -a * s + b * c;
            }
        }
        for k in l..=hi {
            h[at(k, k)] += mu;
        }
    }
    eig[0] = h[at(0, 0)];
    Ok(eig)
}
