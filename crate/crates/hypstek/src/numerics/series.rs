//! Truncated power-series arithmetic for small-argument expansions.

/// Power series sum_k c[k] x^k truncated at a fixed degree.
#[derive(Debug, Clone)]
pub struct Series {
    pub c: Vec<f64>,
}

impl Series {
    pub fn zero(len: usize) -> Self {
        Self { c: vec![0.0; len] }
    }

    /// Taylor coefficients of sinh(x) up to degree `len - 1`.
    pub fn sinh(len: usize) -> Self {
        let mut c = vec![0.0; len];
        let mut fact = 1.0;
        for k in 1..len {
            fact *= k as f64;
            if k % 2 == 1 {
                c[k] = 1.0 / fact;
            }
        }
        Self { c }
    }

    /// Taylor coefficients of cosh(x) up to degree `len - 1`.
    pub fn cosh(len: usize) -> Self {
        let mut c = vec![0.0; len];
        c[0] = 1.0;
        let mut fact = 1.0;
        for k in 1..len {
            fact *= k as f64;
            if k % 2 == 0 {
                c[k] = 1.0 / fact;
            }
        }
        Self { c }
    }

    pub fn mul(&self, other: &Series) -> Series {
        let len = self.c.len();
        let mut out = vec![0.0; len];
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (j, &b) in other.c.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                out[i + j] += a * b;
            }
        }
        Series { c: out }
    }

    pub fn powi(&self, mut p: usize) -> Series {
        let mut out = Series::zero(self.c.len());
        out.c[0] = 1.0;
        let mut base = self.clone();
        while p > 0 {
            if p & 1 == 1 {
                out = out.mul(&base);
            }
            base = base.mul(&base);
            p >>= 1;
        }
        out
    }

    /// Antiderivative with zero constant term.
    pub fn integrate(&self) -> Series {
        let len = self.c.len();
        let mut out = vec![0.0; len];
        for k in 0..len - 1 {
            out[k + 1] = self.c[k] / (k + 1) as f64;
        }
        Series { c: out }
    }

    pub fn differentiate(&self) -> Series {
        let len = self.c.len();
        let mut out = vec![0.0; len];
        for k in 1..len {
            out[k - 1] = self.c[k] * k as f64;
        }
        Series { c: out }
    }

    /// Quotient of two series whose leading exponents are `self_shift` and
    /// `other_shift`: computes x^(self_shift - other_shift) * (a / b) where
    /// a = self / x^self_shift and b = other / x^other_shift.
    ///
    /// Requires other.c[other_shift] != 0 and self_shift >= other_shift.
    pub fn div_shifted(&self, self_shift: usize, other: &Series, other_shift: usize) -> Series {
        assert!(self_shift >= other_shift);
        let len = self.c.len();
        let a: Vec<f64> = self.c[self_shift..].to_vec();
        let b: Vec<f64> = other.c[other_shift..].to_vec();
        assert!(b[0] != 0.0);
        let mut q = vec![0.0; a.len()];
        for k in 0..a.len() {
            let mut s = a[k];
            for j in 0..k {
                if k - j < b.len() {
                    s -= q[j] * b[k - j];
                }
            }
            q[k] = s / b[0];
        }
        let lead = self_shift - other_shift;
        let mut out = vec![0.0; len];
        for (k, &v) in q.iter().enumerate() {
            if lead + k < len {
                out[lead + k] = v;
            }
        }
        Series { c: out }
    }

    /// Horner evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for &ck in self.c.iter().rev() {
            acc = acc * x + ck;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn sinh_series_matches_libm() {
        let s = Series::sinh(40);
        for &x in &[0.1, 0.5, 0.9] {
            assert_abs_diff_eq!(s.eval(x), x.sinh(), epsilon = 1e-15);
        }
    }

    #[test]
    fn cube_and_integral() {
        let s = Series::sinh(48).powi(3);
        let i = s.integrate();
        // int_0^r sinh^3 = (cosh^3)/3 - cosh + 2/3
        let r: f64 = 0.8;
        let exact = r.cosh().powi(3) / 3.0 - r.cosh() + 2.0 / 3.0;
        assert_abs_diff_eq!(i.eval(r), exact, epsilon = 1e-15);
    }

    #[test]
    fn shifted_division() {
        // (x^2 + x^3) / (x + x^2) = x, i.e. shift 2 over shift 1
        let a = Series {
            c: vec![0.0, 0.0, 1.0, 1.0, 0.0, 0.0],
        };
        let b = Series {
            c: vec![0.0, 1.0, 1.0, 0.0, 0.0, 0.0],
        };
        let q = a.div_shifted(2, &b, 1);
        assert_abs_diff_eq!(q.c[1], 1.0, epsilon = 1e-15);
        for k in [0usize, 2, 3, 4] {
            assert_abs_diff_eq!(q.c[k], 0.0, epsilon = 1e-15);
        }
    }
}
