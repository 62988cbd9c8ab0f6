//! Warped-product primitives for hyperbolic space.
//!
//! H^n is modeled in geodesic polar coordinates as the warped product
//! dr^2 + lambda(r)^2 g_{S^{n-1}} with lambda(r) = sinh(r). This module
//! carries the dimension constants and the geodesic-ball volume/area
//! functions together with their inverses.

use crate::error::{Error, Result};
use crate::numerics::roots;

/// Warping function lambda(r) = sinh(r).
pub fn lambda(r: f64) -> Result<f64> {
    check_radius(r)?;
    Ok(r.sinh())
}

/// lambda'(r) = cosh(r).
pub fn lambda_prime(r: f64) -> Result<f64> {
    check_radius(r)?;
    Ok(r.cosh())
}

pub(crate) fn check_radius(r: f64) -> Result<()> {
    if r < 0.0 || !r.is_finite() {
        return Err(Error::NegativeRadius(r));
    }
    Ok(())
}

/// ln sinh(r), stable for large r where sinh overflows.
pub fn ln_sinh(r: f64) -> f64 {
    if r > 20.0 {
        r - std::f64::consts::LN_2 + (-(2.0 * r)).exp().ln_1p()
    } else {
        r.sinh().ln()
    }
}

/// Ambient dimension with its derived unit-sphere area constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dimension {
    n: usize,
    /// area of the unit (n-1)-sphere
    omega: f64,
    /// area of the unit (n-2)-sphere, used by the axisymmetric reduction
    omega_meridian: f64,
}

impl Dimension {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::DimensionTooSmall(n));
        }
        Ok(Self {
            n,
            omega: unit_sphere_area(n - 1),
            omega_meridian: unit_sphere_area(n - 2),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nf(&self) -> f64 {
        self.n as f64
    }

    /// omega_{n-1}, the area of the unit (n-1)-sphere.
    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// omega_{n-2}, the measure of the symmetry-sphere factor.
    pub fn omega_meridian(&self) -> f64 {
        self.omega_meridian
    }

    /// |B(r)| = omega_{n-1} * int_0^r sinh^{n-1}(t) dt.
    ///
    /// Closed-form antiderivative (series for small r, exponential sum
    /// otherwise); agreement with adaptive quadrature is pinned by tests.
    pub fn ball_volume(&self, r: f64) -> Result<f64> {
        check_radius(r)?;
        Ok(self.omega * sinh_power_integral(self.n - 1, r))
    }

    /// |S(r)| = omega_{n-1} * sinh^{n-1}(r).
    pub fn sphere_area(&self, r: f64) -> Result<f64> {
        check_radius(r)?;
        Ok(self.ln_sphere_area(r).exp())
    }

    /// ln |S(r)|, stable when sinh^{n-1} overflows.
    pub fn ln_sphere_area(&self, r: f64) -> f64 {
        if r == 0.0 {
            return f64::NEG_INFINITY;
        }
        self.omega.ln() + (self.n - 1) as f64 * ln_sinh(r)
    }

    /// Inverse of `ball_volume` by bracketed Newton iteration.
    pub fn radius_from_volume(&self, v: f64) -> Result<f64> {
        if v <= 0.0 || !v.is_finite() {
            return Err(Error::NonPositive {
                what: "volume",
                value: v,
            });
        }
        let (mut lo, mut hi) = (0.0, 1.0);
        while self.ball_volume(hi)? < v {
            lo = hi;
            hi *= 2.0;
            if hi > 1e4 {
                return Err(Error::RootBracket {
                    a: lo,
                    b: hi,
                    reason: "volume too large to bracket".into(),
                });
            }
        }
        roots::newton_bisect(
            |r| self.ball_volume(r).unwrap_or(f64::INFINITY) - v,
            |r| self.sphere_area(r).unwrap_or(f64::INFINITY),
            lo,
            hi,
            1e-14,
        )
    }

    /// Inverse of `sphere_area`; closed form via arcsinh.
    pub fn radius_from_area(&self, a: f64) -> Result<f64> {
        if a <= 0.0 || !a.is_finite() {
            return Err(Error::NonPositive {
                what: "area",
                value: a,
            });
        }
        // sinh r = (A / omega)^{1/(n-1)}, computed in logs for large A
        let ln_sinh_r = (a.ln() - self.omega.ln()) / (self.n - 1) as f64;
        let s = ln_sinh_r.exp();
        if s.is_finite() {
            Ok(s.asinh())
        } else {
            // asinh(x) ~ ln(2x) for huge x
            Ok(ln_sinh_r + std::f64::consts::LN_2)
        }
    }

    /// Geodesic ball of the given radius with its derived quantities.
    pub fn ball(&self, r: f64) -> Result<BallGeometry> {
        Ok(BallGeometry {
            radius: r,
            volume: self.ball_volume(r)?,
            area: self.sphere_area(r)?,
        })
    }
}

/// Radius, volume and boundary area of one geodesic ball.
#[derive(Debug, Clone, Copy)]
pub struct BallGeometry {
    pub radius: f64,
    pub volume: f64,
    pub area: f64,
}

/// Area of the unit k-sphere S^k (omega_0 = 2, omega_1 = 2 pi, ...),
/// by the recursion omega_k = 2 pi / (k - 1) * omega_{k-2}.
pub fn unit_sphere_area(k: usize) -> f64 {
    use std::f64::consts::PI;
    match k {
        0 => 2.0,
        1 => 2.0 * PI,
        _ => 2.0 * PI / (k as f64 - 1.0) * unit_sphere_area(k - 2),
    }
}

/// int_0^r sinh^m(t) dt via the exact antiderivative.
///
/// For r <= 0.8 the truncated Taylor series of sinh^m is integrated term by
/// term (the exponential sum below cancels catastrophically near 0); for
/// larger r the binomial expansion of ((e^t - e^{-t})/2)^m is integrated
/// exactly.
pub fn sinh_power_integral(m: usize, r: f64) -> f64 {
    if r == 0.0 {
        return 0.0;
    }
    if m == 0 {
        return r;
    }
    if r <= 0.8 {
        return sinh_power_integral_series(m, r);
    }
    let mut sum = 0.0;
    let mut binom = 1.0; // C(m, j)
    for j in 0..=m {
        let e = m as f64 - 2.0 * j as f64;
        let term = if e == 0.0 {
            r
        } else {
            ((e * r).exp() - 1.0) / e
        };
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * binom * term;
        binom *= (m - j) as f64 / (j + 1) as f64;
    }
    sum / 2f64.powi(m as i32)
}

fn sinh_power_integral_series(m: usize, r: f64) -> f64 {
    use crate::numerics::series::Series;
    Series::sinh(m + 44).powi(m).integrate().eval(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::quad;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    /// Independent oracle: adaptive quadrature of the defining integral.
    fn ball_volume_quad(dim: &Dimension, r: f64) -> f64 {
        let m = (dim.n() - 1) as i32;
        dim.omega()
            * quad::integrate(|t| t.sinh().powi(m), 0.0, r, 1e-13, 1e-13).unwrap()
    }

    #[test]
    fn lambda_basics() {
        assert_eq!(lambda(0.0).unwrap(), 0.0);
        assert_eq!(lambda_prime(0.0).unwrap(), 1.0);
        // high-precision exponential evaluation as oracle
        assert_relative_eq!(
            lambda(1.0).unwrap(),
            1.1752011936438014568823818505956,
            epsilon = 1e-15
        );
        assert!(lambda(-0.5).is_err());
        assert!(lambda_prime(-1e-9).is_err());
    }

    #[test]
    fn sphere_constants() {
        let d2 = Dimension::new(2).unwrap();
        let d3 = Dimension::new(3).unwrap();
        let d4 = Dimension::new(4).unwrap();
        assert_relative_eq!(d2.omega(), 2.0 * PI, epsilon = 1e-15);
        assert_relative_eq!(d3.omega(), 4.0 * PI, epsilon = 1e-15);
        assert_relative_eq!(d4.omega(), 2.0 * PI * PI, epsilon = 1e-15);
        // recursion for higher k
        assert_relative_eq!(
            Dimension::new(6).unwrap().omega(),
            2.0 * PI / 4.0 * d4.omega(),
            epsilon = 1e-14
        );
        assert!(Dimension::new(1).is_err());
    }

    #[test]
    fn ball_volume_closed_form_n3() {
        // omega_2 int_0^r sinh^2 = pi (sinh 2r - 2r)
        let d = Dimension::new(3).unwrap();
        for &r in &[0.1f64, 0.5, 1.0, 2.0, 5.0] {
            let exact = PI * ((2.0 * r).sinh() - 2.0 * r);
            assert_relative_eq!(d.ball_volume(r).unwrap(), exact, epsilon = 1e-13);
        }
        assert_eq!(d.ball_volume(0.0).unwrap(), 0.0);
    }

    #[test]
    fn ball_volume_matches_quadrature_oracle() {
        for n in 2..=8 {
            let d = Dimension::new(n).unwrap();
            for &r in &[0.01, 0.3, 0.79, 0.81, 1.0, 3.0, 10.0, 25.0] {
                let closed = d.ball_volume(r).unwrap();
                let oracle = ball_volume_quad(&d, r);
                assert_relative_eq!(closed, oracle, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn sphere_area_values() {
        let d4 = Dimension::new(4).unwrap();
        assert_eq!(d4.sphere_area(0.0).unwrap(), 0.0);
        assert_relative_eq!(
            d4.sphere_area(1.0).unwrap(),
            2.0 * PI * PI * 1.0f64.sinh().powi(3),
            epsilon = 1e-14
        );
    }

    #[test]
    fn area_is_volume_derivative() {
        // finite-difference oracle on a log-spaced grid
        for n in [3usize, 5, 8] {
            let d = Dimension::new(n).unwrap();
            for i in 0..20 {
                let r = 0.05 * 10f64.powf(2.0 * i as f64 / 19.0); // 0.05 .. 5
                let h = 1e-6 * r.max(0.1);
                let fd = (d.ball_volume(r + h).unwrap() - d.ball_volume(r - h).unwrap())
                    / (2.0 * h);
                assert_relative_eq!(fd, d.sphere_area(r).unwrap(), max_relative = 1e-8);
            }
        }
        let d5 = Dimension::new(5).unwrap();
        let h = 1e-6;
        let fd =
            (d5.ball_volume(0.7 + h).unwrap() - d5.ball_volume(0.7 - h).unwrap()) / (2.0 * h);
        assert_relative_eq!(fd, d5.sphere_area(0.7).unwrap(), max_relative = 1e-8);
    }

    #[test]
    fn inverse_roundtrips() {
        for n in 2..=8 {
            let d = Dimension::new(n).unwrap();
            for &r in &[0.1, 1.0, 5.0] {
                let ra = d.radius_from_area(d.sphere_area(r).unwrap()).unwrap();
                assert_relative_eq!(ra, r, epsilon = 1e-10);
                let rv = d.radius_from_volume(d.ball_volume(r).unwrap()).unwrap();
                assert_relative_eq!(rv, r, epsilon = 1e-10);
            }
        }
        // n = 3 closed form: |B(1)| = pi (sinh 2 - 2)
        let d3 = Dimension::new(3).unwrap();
        let v = PI * (2.0f64.sinh() - 2.0);
        assert_relative_eq!(d3.radius_from_volume(v).unwrap(), 1.0, epsilon = 1e-12);
        assert!(d3.radius_from_volume(0.0).is_err());
        assert!(d3.radius_from_area(-1.0).is_err());
    }

    #[test]
    fn radius_from_volume_is_monotone() {
        let d = Dimension::new(4).unwrap();
        let mut prev = 0.0;
        for i in 1..60 {
            let v = 1e-3 * 1.5f64.powi(i);
            let r = d.radius_from_volume(v).unwrap();
            assert!(r > prev);
            prev = r;
        }
    }

    #[test]
    fn large_radius_stays_finite() {
        let d8 = Dimension::new(8).unwrap();
        let a = d8.sphere_area(50.0).unwrap();
        assert!(a.is_finite() && a > 1e100);
        assert_relative_eq!(d8.radius_from_area(a).unwrap(), 50.0, epsilon = 1e-10);
        let v = d8.ball_volume(50.0).unwrap();
        assert!(v.is_finite());
        assert_relative_eq!(d8.radius_from_volume(v).unwrap(), 50.0, epsilon = 1e-10);
        // ln form keeps working past the overflow point of sinh^{n-1}
        assert!(d8.ln_sphere_area(120.0).is_finite());
    }
}
