//! Monotone piecewise-cubic Hermite interpolation (Fritsch–Carlson slopes).

/// Monotone cubic interpolant over a strictly increasing grid.
#[derive(Debug, Clone)]
pub struct Pchip {
    x: Vec<f64>,
    y: Vec<f64>,
    /// node derivatives
    d: Vec<f64>,
}

impl Pchip {
    /// Build from data points; `x` must be strictly increasing with len >= 2.
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Self {
        assert_eq!(x.len(), y.len());
        let n = x.len();
        assert!(n >= 2);
        assert!(x.windows(2).all(|w| w[1] > w[0]), "grid must increase");
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
        let mut d = vec![0.0; n];
        if n == 2 {
            d[0] = delta[0];
            d[1] = delta[0];
        } else {
            for i in 1..n - 1 {
                if delta[i - 1] * delta[i] <= 0.0 {
                    d[i] = 0.0;
                } else {
                    // weighted harmonic mean of the adjacent secants
                    let w1 = 2.0 * h[i] + h[i - 1];
                    let w2 = h[i] + 2.0 * h[i - 1];
                    d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
                }
            }
            d[0] = edge_slope(h[0], h[1], delta[0], delta[1]);
            d[n - 1] = edge_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
        }
        Self { x, y, d }
    }

    fn locate(&self, t: f64) -> usize {
        let n = self.x.len();
        match self.x.partition_point(|&v| v <= t) {
            0 => 0,
            k if k >= n => n - 2,
            k => k - 1,
        }
    }

    /// Interpolated value; extrapolates with the boundary cubic outside the grid.
    pub fn eval(&self, t: f64) -> f64 {
        let i = self.locate(t);
        let h = self.x[i + 1] - self.x[i];
        let s = (t - self.x[i]) / h;
        let (h00, h10, h01, h11) = hermite_basis(s);
        self.y[i] * h00 + h * self.d[i] * h10 + self.y[i + 1] * h01 + h * self.d[i + 1] * h11
    }

    /// Derivative of the interpolant.
    pub fn deriv(&self, t: f64) -> f64 {
        let i = self.locate(t);
        let h = self.x[i + 1] - self.x[i];
        let s = (t - self.x[i]) / h;
        let d00 = (6.0 * s * s - 6.0 * s) / h;
        let d10 = 3.0 * s * s - 4.0 * s + 1.0;
        let d01 = -d00;
        let d11 = 3.0 * s * s - 2.0 * s;
        self.y[i] * d00 + self.d[i] * d10 + self.y[i + 1] * d01 + self.d[i + 1] * d11
    }

    pub fn x_min(&self) -> f64 {
        self.x[0]
    }

    pub fn x_max(&self) -> f64 {
        *self.x.last().unwrap()
    }
}

/// Non-centered three-point slope estimate, clamped for monotonicity.
fn edge_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if d * d0 <= 0.0 {
        0.0
    } else if d0 * d1 <= 0.0 && d.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        d
    }
}

fn hermite_basis(s: f64) -> (f64, f64, f64, f64) {
    let s2 = s * s;
    let s3 = s2 * s;
    (
        2.0 * s3 - 3.0 * s2 + 1.0,
        s3 - 2.0 * s2 + s,
        -2.0 * s3 + 3.0 * s2,
        s3 - s2,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn interpolates_nodes_exactly() {
        let x: Vec<f64> = (0..20).map(|i| 0.3 * i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| (v * 0.7).tanh()).collect();
        let p = Pchip::new(x.clone(), y.clone());
        for (xi, yi) in x.iter().zip(&y) {
            assert_abs_diff_eq!(p.eval(*xi), *yi, epsilon = 1e-14);
        }
    }

    #[test]
    fn preserves_monotonicity() {
        let x = vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0];
        let y = vec![0.0, 0.1, 0.11, 2.0, 2.01, 3.0];
        let p = Pchip::new(x, y);
        let mut prev = f64::NEG_INFINITY;
        for i in 0..=500 {
            let v = p.eval(5.0 * i as f64 / 500.0);
            assert!(v >= prev - 1e-12, "not monotone at sample {i}");
            prev = v;
        }
    }

    #[test]
    fn accuracy_on_smooth_data() {
        let n = 200;
        let x: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| (1.0 + v).ln()).collect();
        let p = Pchip::new(x, y);
        let mut max_err: f64 = 0.0;
        for i in 0..=1000 {
            let t = i as f64 / 1000.0;
            max_err = max_err.max((p.eval(t) - (1.0 + t).ln()).abs());
        }
        // third-order local accuracy: h^3 with h = 5e-3
        assert!(max_err < 5e-8, "max_err = {max_err:.3e}");
    }
}
