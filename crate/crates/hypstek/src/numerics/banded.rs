//! Symmetric positive-definite banded matrices with Cholesky factorization.

use crate::error::{Error, Result};

/// Lower-banded symmetric matrix: entry (i, j) with 0 <= i - j <= bw is
/// stored at `data[j * (bw + 1) + (i - j)]`.
#[derive(Debug, Clone)]
pub struct BandedSpd {
    pub n: usize,
    pub bw: usize,
    data: Vec<f64>,
}

impl BandedSpd {
    pub fn zeros(n: usize, bw: usize) -> Self {
        Self {
            n,
            bw,
            data: vec![0.0; n * (bw + 1)],
        }
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        // symmetric: only the lower triangle is stored
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        debug_assert!(r - c <= self.bw, "entry outside band: ({i},{j})");
        self.data[c * (self.bw + 1) + (r - c)] += v;
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        if r - c > self.bw {
            return 0.0;
        }
        self.data[c * (self.bw + 1) + (r - c)]
    }

    /// In-place Cholesky A = L L^T (band layout preserved).
    pub fn cholesky(mut self) -> Result<BandedCholesky> {
        let (n, bw) = (self.n, self.bw);
        for j in 0..n {
            let start = j.saturating_sub(bw);
            for k in start..j {
                // A[j][j] -= L[j][k]^2
                let ljk = self.data[k * (bw + 1) + (j - k)];
                self.data[j * (bw + 1)] -= ljk * ljk;
            }
            let diag = self.data[j * (bw + 1)];
            if diag <= 0.0 || !diag.is_finite() {
                return Err(Error::LinearAlgebra(format!(
                    "banded Cholesky: non-positive pivot {diag:.3e} at row {j}"
                )));
            }
            let ljj = diag.sqrt();
            self.data[j * (bw + 1)] = ljj;
            let imax = (j + bw).min(n - 1);
            for i in (j + 1)..=imax {
                let mut s = self.data[j * (bw + 1) + (i - j)];
                let kstart = i.saturating_sub(bw).max(start);
                for k in kstart..j {
                    s -= self.data[k * (bw + 1) + (i - k)] * self.data[k * (bw + 1) + (j - k)];
                }
                self.data[j * (bw + 1) + (i - j)] = s / ljj;
            }
        }
        Ok(BandedCholesky {
            n,
            bw,
            data: self.data,
        })
    }
}

/// Cholesky factor of a banded SPD matrix.
#[derive(Debug, Clone)]
pub struct BandedCholesky {
    n: usize,
    bw: usize,
    data: Vec<f64>,
}

impl BandedCholesky {
    /// Solve A x = b in place.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let (n, bw) = (self.n, self.bw);
        assert_eq!(b.len(), n);
        // forward: L y = b
        for j in 0..n {
            let yj = b[j] / self.data[j * (bw + 1)];
            b[j] = yj;
            let imax = (j + bw).min(n - 1);
            for i in (j + 1)..=imax {
                b[i] -= self.data[j * (bw + 1) + (i - j)] * yj;
            }
        }
        // backward: L^T x = y
        for j in (0..n).rev() {
            let imax = (j + bw).min(n - 1);
            let mut s = b[j];
            for i in (j + 1)..=imax {
                s -= self.data[j * (bw + 1) + (i - j)] * b[i];
            }
            b[j] = s / self.data[j * (bw + 1)];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn random_spd_banded(n: usize, bw: usize, seed: u64) -> (BandedSpd, DMatrix<f64>) {
        // simple LCG so the test has no RNG dependency
        let mut state = seed;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let mut band = BandedSpd::zeros(n, bw);
        let mut dense = DMatrix::zeros(n, n);
        for j in 0..n {
            for i in j..(j + bw + 1).min(n) {
                let v = if i == j {
                    2.0 * bw as f64 + 1.0 + next()
                } else {
                    next()
                };
                band.add(i, j, v);
                dense[(i, j)] += v;
                if i != j {
                    dense[(j, i)] += v;
                }
            }
        }
        (band, dense)
    }

    #[test]
    fn solve_matches_dense_cholesky() {
        for (n, bw, seed) in [(30usize, 4usize, 1u64), (80, 11, 2), (50, 49, 3)] {
            let (band, dense) = random_spd_banded(n, bw, seed);
            let chol = band.cholesky().unwrap();
            let b: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
            let mut x = b.clone();
            chol.solve_in_place(&mut x);
            let xd = dense
                .clone()
                .cholesky()
                .unwrap()
                .solve(&nalgebra::DVector::from_column_slice(&b));
            for i in 0..n {
                assert!((x[i] - xd[i]).abs() < 1e-10, "mismatch at {i}");
            }
        }
    }

    #[test]
    fn rejects_indefinite() {
        let mut band = BandedSpd::zeros(3, 1);
        band.add(0, 0, 1.0);
        band.add(1, 1, -1.0);
        band.add(2, 2, 1.0);
        assert!(band.cholesky().is_err());
    }
}
