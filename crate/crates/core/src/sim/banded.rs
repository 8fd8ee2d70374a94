//! Symmetric banded matrices with an LDL^T factorisation without pivoting,
//! suitable for symmetric quasi-definite systems.

use crate::error::{Error, Result};

/// Lower band of a symmetric n x n matrix with half bandwidth `bw`.
/// Row i stores columns i-bw ..= i contiguously.
#[derive(Debug, Clone)]
pub struct BandMatrix {
    n: usize,
    bw: usize,
    data: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, bw: usize) -> Self {
        Self { n, bw, data: vec![0.0; n * (bw + 1)] }
    }

    fn pos(&self, i: usize, j: usize) -> usize {
        debug_assert!(j <= i && i - j <= self.bw);
        i * (self.bw + 1) + self.bw - (i - j)
    }

    /// Add v to entry (i, j) (and implicitly (j, i)).
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        assert!(i - j <= self.bw, "entry ({i}, {j}) outside band {}", self.bw);
        let p = self.pos(i, j);
        self.data[p] += v;
    }

    #[cfg(test)]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        if i - j > self.bw {
            0.0
        } else {
            self.data[self.pos(i, j)]
        }
    }

    /// Replace row and column i by the identity.
    pub fn constrain(&mut self, i: usize) {
        let lo = i.saturating_sub(self.bw);
        for j in lo..i {
            let p = self.pos(i, j);
            self.data[p] = 0.0;
        }
        for r in i + 1..(i + self.bw + 1).min(self.n) {
            let p = self.pos(r, i);
            self.data[p] = 0.0;
        }
        let p = self.pos(i, i);
        self.data[p] = 1.0;
    }

    /// y = A x.
    #[cfg(test)]
    pub fn mul(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for i in 0..self.n {
            let lo = i.saturating_sub(self.bw);
            for j in lo..i {
                let a = self.data[self.pos(i, j)];
                y[i] += a * x[j];
                y[j] += a * x[i];
            }
            y[i] += self.data[self.pos(i, i)] * x[i];
        }
        y
    }

    /// In-place LDL^T factorisation.
    pub fn factor(mut self) -> Result<BandLdl> {
        let (n, bw) = (self.n, self.bw);
        let w = bw + 1;
        let mut d = vec![0.0; n];
        let mut scaled = vec![0.0; w];
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            let row = i * w;
            // scaled[k] = L[i][j] D[j] for the columns already finished
            for j in lo..i {
                let rj = j * w;
                let lo_j = j.saturating_sub(bw).max(lo);
                let a = &scaled[lo_j - lo..j - lo];
                let b = &self.data[rj + bw - (j - lo_j)..rj + bw];
                let s = self.data[row + bw - (i - j)] - dot(a, b);
                scaled[j - lo] = s;
                self.data[row + bw - (i - j)] = s / d[j];
            }
            let mut diag = self.data[row + bw];
            for j in lo..i {
                diag -= scaled[j - lo] * self.data[row + bw - (i - j)];
            }
            if diag == 0.0 || !diag.is_finite() {
                return Err(Error::Solver(format!("zero or non-finite pivot at row {i}")));
            }
            d[i] = diag;
            self.data[row + bw] = 1.0;
        }
        Ok(BandLdl { n, bw, l: self.data, d })
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    // four accumulators so the loop vectorises
    let mut acc = [0.0; 4];
    let chunks = a.len() / 4;
    for c in 0..chunks {
        for l in 0..4 {
            acc[l] += a[4 * c + l] * b[4 * c + l];
        }
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for k in 4 * chunks..a.len() {
        s += a[k] * b[k];
    }
    s
}

#[derive(Debug, Clone)]
pub struct BandLdl {
    n: usize,
    bw: usize,
    l: Vec<f64>,
    d: Vec<f64>,
}

impl BandLdl {
    /// Factor of the 0 x 0 matrix, a stand-in before assembly.
    pub fn empty() -> Self {
        Self { n: 0, bw: 0, l: Vec::new(), d: Vec::new() }
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let (n, bw) = (self.n, self.bw);
        let w = bw + 1;
        let mut x = rhs.to_vec();
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            let row = i * w + bw - i;
            x[i] -= dot(&self.l[row + lo..row + i], &x[lo..i]);
        }
        for i in 0..n {
            x[i] /= self.d[i];
        }
        for i in (0..n).rev() {
            let lo = i.saturating_sub(bw);
            let row = i * w + bw - i;
            let xi = x[i];
            for j in lo..i {
                x[j] -= self.l[row + j] * xi;
            }
        }
        x
    }

    /// Number of negative pivots (the inertia of a quasi-definite matrix).
    pub fn negative_pivots(&self) -> usize {
        self.d.iter().filter(|&&v| v < 0.0).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};

    fn quasi_definite(n: usize, bw: usize, seed: u64) -> (BandMatrix, DMatrix<f64>) {
        let mut rng = crate::rng::NoiseStream::new(seed);
        let mut b = BandMatrix::zeros(n, bw);
        let mut dense = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i.saturating_sub(bw)..i {
                let v = rng.symmetric();
                b.add(i, j, v);
                dense[(i, j)] = v;
                dense[(j, i)] = v;
            }
            // alternate positive and negative diagonal blocks
            let v = if i % 3 == 2 { -(4.0 + rng.unit()) * bw as f64 } else { (4.0 + rng.unit()) * bw as f64 };
            b.add(i, i, v);
            dense[(i, i)] = v;
        }
        (b, dense)
    }

    #[test]
    fn solve_matches_dense() {
        let (b, dense) = quasi_definite(40, 5, 1);
        let rhs: Vec<f64> = (0..40).map(|i| (i as f64).sin()).collect();
        let want = dense.clone().lu().solve(&DVector::from_vec(rhs.clone())).unwrap();
        let ax = b.mul(want.as_slice());
        for i in 0..40 {
            assert!((ax[i] - rhs[i]).abs() < 1e-12);
        }
        let ldl = b.factor().unwrap();
        let x = ldl.solve(&rhs);
        for i in 0..40 {
            assert!((x[i] - want[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn constrained_rows_decouple() {
        let (mut b, _) = quasi_definite(20, 4, 2);
        b.constrain(7);
        assert_eq!(b.get(7, 5), 0.0);
        assert_eq!(b.get(9, 7), 0.0);
        assert_eq!(b.get(7, 7), 1.0);
        let mut rhs = vec![1.0; 20];
        rhs[7] = 0.0;
        let x = b.clone().factor().unwrap().solve(&rhs);
        assert_eq!(x[7], 0.0);
        let ax = b.mul(&x);
        for i in 0..20 {
            assert!((ax[i] - rhs[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_pivot_is_reported() {
        let b = BandMatrix::zeros(3, 1);
        assert!(b.factor().is_err());
    }
}
