//! Cosine-series collocation on the uniform grid theta_j = j*pi/N.
//!
//! Functions on [0, pi] with vanishing odd derivatives at both endpoints
//! (even 2*pi-periodic extensions) are represented as
//! f(theta) = sum_k c_k cos(k*theta). The grid is the image of the
//! Chebyshev–Lobatto points under x = cos(theta), so the representation is
//! spectrally accurate for smooth axisymmetric data and enforces
//! f'(0) = f'(pi) = 0 identically.

use std::f64::consts::PI;

/// Shared collocation grid with differentiation matrices.
#[derive(Debug)]
pub struct CosineGrid {
    /// number of intervals; the grid has n + 1 nodes
    pub n: usize,
    pub nodes: Vec<f64>,
    /// analysis matrix: node values -> cosine coefficients
    analysis: nalgebra::DMatrix<f64>,
    /// synthesis matrix: coefficients -> node values
    synthesis: nalgebra::DMatrix<f64>,
    /// first derivative at the nodes
    pub d1: nalgebra::DMatrix<f64>,
    /// second derivative at the nodes
    pub d2: nalgebra::DMatrix<f64>,
}

impl CosineGrid {
    pub fn new(n: usize) -> Self {
        assert!(n >= 4, "grid too coarse");
        let m = n + 1;
        let nodes: Vec<f64> = (0..m).map(|j| PI * j as f64 / n as f64).collect();
        // DCT-I analysis producing coefficients of sum c_k cos(k theta)
        let mut analysis = nalgebra::DMatrix::zeros(m, m);
        for k in 0..m {
            let ck = if k == 0 || k == n { 1.0 } else { 2.0 };
            for j in 0..m {
                let cj = if j == 0 || j == n { 0.5 } else { 1.0 };
                analysis[(k, j)] = ck * cj / n as f64 * (k as f64 * nodes[j]).cos();
            }
        }
        let mut synthesis = nalgebra::DMatrix::zeros(m, m);
        let mut synth1 = nalgebra::DMatrix::zeros(m, m);
        let mut synth2 = nalgebra::DMatrix::zeros(m, m);
        for j in 0..m {
            for k in 0..m {
                let kf = k as f64;
                synthesis[(j, k)] = (kf * nodes[j]).cos();
                synth1[(j, k)] = -kf * (kf * nodes[j]).sin();
                synth2[(j, k)] = -kf * kf * (kf * nodes[j]).cos();
            }
        }
        let d1 = &synth1 * &analysis;
        let d2 = &synth2 * &analysis;
        Self {
            n,
            nodes,
            analysis,
            synthesis,
            d1,
            d2,
        }
    }

    pub fn coefficients(&self, values: &nalgebra::DVector<f64>) -> nalgebra::DVector<f64> {
        &self.analysis * values
    }

    pub fn values(&self, coeffs: &nalgebra::DVector<f64>) -> nalgebra::DVector<f64> {
        &self.synthesis * coeffs
    }
}

/// Evaluate sum c_k cos(k theta) and its first two derivatives.
pub fn eval_series(coeffs: &[f64], theta: f64) -> (f64, f64, f64) {
    let mut v = 0.0;
    let mut d1 = 0.0;
    let mut d2 = 0.0;
    for (k, &c) in coeffs.iter().enumerate() {
        let kf = k as f64;
        let (s, co) = (kf * theta).sin_cos();
        v += c * co;
        d1 -= c * kf * s;
        d2 -= c * kf * kf * co;
    }
    (v, d1, d2)
}

/// Zero the top `fraction` of the spectrum (de-aliasing filter).
pub fn low_pass(coeffs: &mut nalgebra::DVector<f64>, fraction: f64) {
    let m = coeffs.len();
    let keep = ((m as f64) * (1.0 - fraction)).floor() as usize;
    for k in keep..m {
        coeffs[k] = 0.0;
    }
}
