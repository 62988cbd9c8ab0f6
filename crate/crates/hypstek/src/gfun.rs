//! The volume–area ratio function g(r) = |B(r)|/|S(r)| of geodesic balls,
//! its derivatives, monotone combinations, the first Steklov eigenvalue of
//! balls sigma_1(B(r)) = g'(r)/g(r), and the auxiliary function h defined by
//! h(int_{B(t)} lambda' g / lambda dv) = 1/|S(t)|.
//!
//! Evaluation strategy: below r = 0.8 everything comes from machine-precision
//! truncated Taylor series (the defining integral and the derivative formula
//! g' = 1 - (n-1) lambda' g / lambda both cancel catastrophically near 0);
//! above it, from exact exponential-sum antiderivatives arranged so that no
//! difference of nearly equal large terms appears, which keeps lambda^2 g'
//! accurate out to r = 40 and beyond where g' itself underflows.

use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::hyperbolic::{check_radius, sinh_power_integral, Dimension};
use crate::numerics::pchip::Pchip;
use crate::numerics::quad;
use crate::numerics::roots;
use crate::numerics::series::Series;

/// Branch point between the series and exponential-sum evaluations.
const SERIES_SPLIT: f64 = 0.8;
/// Truncation degree of the small-r series.
const SERIES_TERMS: usize = 56;

/// Evaluator for g and its derived quantities in a fixed dimension.
#[derive(Debug)]
pub struct GFunction {
    dim: Dimension,
    g_series: Series,
    gp_series: Series,
    gpp_series: Series,
    g_over_lambda_series: Series,
    lambda2_gp_series: Series,
    b_series: Series,
    c_series: Series,
    htable: OnceLock<Arc<HTable>>,
}

impl GFunction {
    pub fn new(dim: Dimension) -> Self {
        let m = dim.n() - 1;
        let sinh = Series::sinh(SERIES_TERMS);
        let cosh = Series::cosh(SERIES_TERMS);
        let pow = sinh.powi(m);
        let int = pow.integrate();
        let g_series = int.div_shifted(m + 1, &pow, m);
        let gp_series = g_series.differentiate();
        let gpp_series = gp_series.differentiate();
        let g_over_lambda_series = g_series.div_shifted(1, &sinh, 1);
        let lambda2_gp_series = sinh.mul(&sinh).mul(&gp_series);
        let b_series = sinh.mul(&cosh).mul(&gp_series).div_shifted(1, &g_series, 1);
        let c_series = lambda2_gp_series.div_shifted(2, &g_series, 1);
        Self {
            dim,
            g_series,
            gp_series,
            gpp_series,
            g_over_lambda_series,
            lambda2_gp_series,
            b_series,
            c_series,
            htable: OnceLock::new(),
        }
    }

    pub fn dim(&self) -> Dimension {
        self.dim
    }

    /// g(r) = sinh^{1-n}(r) * int_0^r sinh^{n-1}.
    pub fn g(&self, r: f64) -> Result<f64> {
        check_radius(r)?;
        if r == 0.0 {
            return Ok(0.0);
        }
        if r <= SERIES_SPLIT {
            return Ok(self.g_series.eval(r));
        }
        let m = self.dim.n() - 1;
        if (m as f64) * r <= 600.0 {
            Ok(sinh_power_integral(m, r) / r.sinh().powi(m as i32))
        } else {
            // ratio of two overflowing quantities; integrate the bounded form
            // [sinh(r-u)/sinh r]^{n-1} = e^{-mu} ((1-e^{-2(r-u)})/(1-e^{-2r}))^m
            let mf = m as f64;
            let denom = (-2.0 * r).exp_m1(); // -(1 - e^{-2r})
            let upper = r.min(800.0 / mf);
            quad::integrate(
                |u| {
                    let frac = (-2.0 * (r - u)).exp_m1() / denom;
                    (-mf * u).exp() * frac.powi(m as i32)
                },
                0.0,
                upper,
                1e-15,
                1e-13,
            )
        }
    }

    /// g'(r) = 1 - (n-1) lambda' g / lambda, with the limit 1/n at r = 0.
    pub fn g_prime(&self, r: f64) -> Result<f64> {
        check_radius(r)?;
        if r == 0.0 {
            return Ok(1.0 / self.dim.nf());
        }
        if r <= SERIES_SPLIT {
            return Ok(self.gp_series.eval(r));
        }
        Ok(self.lambda2_g_prime(r)? / (r.sinh() * r.sinh()))
    }

    /// g''(r) = (n-1)(g/lambda^2 - g' lambda'/lambda), limit 0 at r = 0.
    pub fn g_second(&self, r: f64) -> Result<f64> {
        check_radius(r)?;
        if r == 0.0 {
            return Ok(0.0);
        }
        if r <= SERIES_SPLIT {
            return Ok(self.gpp_series.eval(r));
        }
        let l = r.sinh();
        Ok((self.dim.nf() - 1.0) * (self.g_over_lambda(r)? - r.cosh() * self.g_prime(r)?) / l)
    }

    /// g(r)/lambda(r), with the limit 1/n at r = 0.
    pub fn g_over_lambda(&self, r: f64) -> Result<f64> {
        check_radius(r)?;
        if r == 0.0 {
            return Ok(1.0 / self.dim.nf());
        }
        if r <= SERIES_SPLIT {
            return Ok(self.g_over_lambda_series.eval(r));
        }
        Ok(self.g(r)? / r.sinh())
    }

    /// lambda^2(r) g'(r), evaluated without forming the difference of the
    /// nearly equal terms in 1 - (n-1) lambda' g / lambda.
    ///
    /// For n >= 3 the reduction of the defining integral by one power gives
    /// lambda^2 g' = (n-2) cosh(r) I_{n-3}(r) / sinh^{n-2}(r) - 1 with
    /// I_k(r) = int_0^r sinh^k, whose leading terms no longer cancel.
    pub fn lambda2_g_prime(&self, r: f64) -> Result<f64> {
        check_radius(r)?;
        if r == 0.0 {
            return Ok(0.0);
        }
        if r <= SERIES_SPLIT {
            return Ok(self.lambda2_gp_series.eval(r));
        }
        let n = self.dim.n();
        match n {
            2 => Ok(r.cosh() - 1.0),
            3 => Ok(r * r.cosh() / r.sinh() - 1.0),
            _ => {
                let nf = n as f64;
                if (nf - 3.0) * r > 600.0 {
                    // asymptotic limit, correction O(e^{-2r})
                    return Ok(1.0 / (nf - 3.0));
                }
                let m = n - 1;
                let x = (m as f64 - 1.0) * r.cosh() * sinh_power_integral(m - 2, r)
                    / r.sinh().powi(m as i32 - 1);
                Ok(x - 1.0)
            }
        }
    }

    /// sigma_1(B(r)) = g'(r)/g(r), the first non-zero Steklov eigenvalue of
    /// the geodesic ball of radius r.
    pub fn sigma1_ball(&self, r: f64) -> Result<f64> {
        if r <= 0.0 {
            return Err(Error::NonPositive {
                what: "ball radius",
                value: r,
            });
        }
        if r <= SERIES_SPLIT {
            return Ok(self.gp_series.eval(r) / self.g_series.eval(r));
        }
        Ok(self.lambda2_g_prime(r)? / (r.sinh() * r.sinh() * self.g(r)?))
    }

    /// a(r) = lambda' g / lambda = (1 - g')/(n-1), increasing from 1/n to 1/(n-1).
    pub fn a_ratio(&self, r: f64) -> Result<f64> {
        Ok((1.0 - self.g_prime(r)?) / (self.dim.nf() - 1.0))
    }

    /// b(r) = lambda lambda' g' / g, increasing from 1; bounded by (n-1)/(n-3)
    /// when n >= 4.
    pub fn b_ratio(&self, r: f64) -> Result<f64> {
        check_radius(r)?;
        if r == 0.0 {
            return Ok(1.0);
        }
        if r <= SERIES_SPLIT {
            return Ok(self.b_series.eval(r));
        }
        Ok(r.cosh() / r.sinh() * self.lambda2_g_prime(r)? / self.g(r)?)
    }

    /// c(r) = lambda^2 g' / g, increasing from 0.
    pub fn c_ratio(&self, r: f64) -> Result<f64> {
        check_radius(r)?;
        if r == 0.0 {
            return Ok(0.0);
        }
        if r <= SERIES_SPLIT {
            return Ok(self.c_series.eval(r));
        }
        Ok(self.lambda2_g_prime(r)? / self.g(r)?)
    }

    /// All three monotone ratios at once.
    pub fn monotone_ratios(&self, r: f64) -> Result<MonotoneRatios> {
        Ok(MonotoneRatios {
            a: self.a_ratio(r)?,
            b: self.b_ratio(r)?,
            c: self.c_ratio(r)?,
        })
    }

    /// The dimension-dependent decreasing combination used by the
    /// transplantation step of the eigenvalue comparison:
    /// n = 4:   (g')^2 + 3 g^2/lambda^2 + lambda' g / lambda,
    /// n >= 5:  (g')^2 + (n-1) g^2/lambda^2 + (2(n-1)/n) lambda' g / lambda.
    /// For n = 3 the same n >= 5 form is returned; it is decreasing only up
    /// to twice the threshold radius of `n3_threshold`.
    pub fn decreasing_integrand(&self, r: f64) -> Result<f64> {
        let nf = self.dim.nf();
        let gp = self.g_prime(r)?;
        let gol = self.g_over_lambda(r)?;
        let a = self.a_ratio(r)?;
        let coeff = if self.dim.n() == 4 {
            1.0
        } else {
            2.0 * (nf - 1.0) / nf
        };
        Ok(gp * gp + (nf - 1.0) * gol * gol + coeff * a)
    }

    /// (g')^2 + (n-1) g^2 / lambda^2, the divergence of g g' d/dr and the
    /// numerator of the Rayleigh quotient of the coordinate test functions.
    pub fn energy_integrand(&self, r: f64) -> Result<f64> {
        let gp = self.g_prime(r)?;
        let gol = self.g_over_lambda(r)?;
        Ok(gp * gp + (self.dim.nf() - 1.0) * gol * gol)
    }

    /// Exact limit values of the g-calculus, usable as test oracles.
    pub fn limits(&self) -> Limits {
        let n = self.dim.nf();
        Limits {
            g_over_lambda_at_zero: 1.0 / n,
            g_at_infinity: 1.0 / (n - 1.0),
            g_prime_at_zero: 1.0 / n,
            g_prime_at_infinity: 0.0,
            lambda2_g_prime_at_infinity: if self.dim.n() >= 4 {
                Some(1.0 / (n - 3.0))
            } else {
                None
            },
        }
    }

    /// Shared h-table over the default range, built on first use.
    pub fn h_table(&self) -> Arc<HTable> {
        self.htable
            .get_or_init(|| Arc::new(HTable::build(self.dim, HTable::DEFAULT_T_MAX)))
            .clone()
    }

    /// h evaluated through the default table.
    pub fn h(&self, s: f64) -> Result<f64> {
        self.h_table().h(s)
    }

    /// h'(s)/h(s) = -(n-1)/|B(t(s))| through the default table.
    pub fn h_log_derivative(&self, s: f64) -> Result<f64> {
        self.h_table().h_log_derivative(s)
    }
}

/// The ratios a = lambda' g / lambda, b = lambda lambda' g'/g, c = lambda^2 g'/g.
#[derive(Debug, Clone, Copy)]
pub struct MonotoneRatios {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

/// Limit values of g and its combinations at r = 0 and r = infinity.
#[derive(Debug, Clone, Copy)]
pub struct Limits {
    pub g_over_lambda_at_zero: f64,
    pub g_at_infinity: f64,
    pub g_prime_at_zero: f64,
    pub g_prime_at_infinity: f64,
    lambda2_g_prime_at_infinity: Option<f64>,
}

impl Limits {
    /// lim lambda^2 g' = 1/(n-3); only defined for n >= 4.
    pub fn lambda2_g_prime_at_infinity(&self) -> Result<f64> {
        self.lambda2_g_prime_at_infinity.ok_or(Error::DimensionMismatch {
            context: "lambda^2 g' limit",
            required: "n >= 4",
            n: 0,
        })
    }
}

/// Radius threshold of the 3-dimensional eigenvalue comparison: the unique
/// R0 with lambda lambda' g' / g = 5/2 at r = 2 R0. Monotonicity of b and
/// its limits 1 and +infinity pin uniqueness.
pub fn n3_threshold(gf: &GFunction) -> Result<f64> {
    if gf.dim().n() != 3 {
        return Err(Error::DimensionMismatch {
            context: "threshold radius",
            required: "n = 3",
            n: gf.dim().n(),
        });
    }
    let target = 2.5;
    let f = |r: f64| gf.b_ratio(r).unwrap() - target;
    let mut hi = 1.0;
    while f(hi) < 0.0 {
        hi *= 2.0;
    }
    let r = roots::brent(f, 1e-6, hi, 1e-15, 200)?;
    Ok(0.5 * r)
}

/// Tabulated auxiliary function h with h(s(t)) = 1/|S(t)| for
/// s(t) = int_{B(t)} lambda' g / lambda dv.
///
/// 4096 log-spaced t values per unit of the default range; h is monotone
/// cubic interpolation of (ln s, ln h), while h'/h is evaluated through the
/// defining relation at t(s) (Newton-refined against the exact s(t)), so no
/// interpolation error is amplified by differencing.
#[derive(Debug)]
pub struct HTable {
    dim: Dimension,
    t: Vec<f64>,
    s: Vec<f64>,
    #[allow(dead_code)]
    ln_s: Vec<f64>,
    ln_h: Vec<f64>,
    interp_h: Pchip,
    interp_t: Pchip,
    gf: GFunction,
}

impl HTable {
    pub const DEFAULT_T_MIN: f64 = 1e-4;
    pub const DEFAULT_T_MAX: f64 = 60.0;
    const POINTS_PER_DECADE: f64 = 4096.0 / 5.778; // 4096 points over [1e-4, 60]

    pub fn build(dim: Dimension, t_max: f64) -> Self {
        let gf = GFunction::new(dim);
        let t_min = Self::DEFAULT_T_MIN;
        let decades = (t_max / t_min).log10();
        let points = ((decades * Self::POINTS_PER_DECADE).ceil() as usize).max(16);
        let ratio = (t_max / t_min).powf(1.0 / (points as f64 - 1.0));
        let mut t = Vec::with_capacity(points);
        let mut cur = t_min;
        for i in 0..points {
            t.push(cur);
            cur *= ratio;
            if i == points - 2 {
                cur = t_max;
            }
        }
        let omega = dim.omega();
        let m = (dim.n() - 1) as i32;
        let integrand = |u: f64| gf.a_ratio(u).unwrap() * u.sinh().powi(m);
        let mut s = Vec::with_capacity(points);
        let mut acc =
            quad::integrate(integrand, 0.0, t[0], 1e-300, 1e-14).expect("s(t) quadrature");
        s.push(omega * acc);
        for i in 1..points {
            let (seg, _) = quad::gk15(&mut { integrand }, t[i - 1], t[i]);
            acc += seg;
            s.push(omega * acc);
        }
        let ln_s: Vec<f64> = s.iter().map(|v| v.ln()).collect();
        let ln_h: Vec<f64> = t.iter().map(|&ti| -dim.ln_sphere_area(ti)).collect();
        let ln_t: Vec<f64> = t.iter().map(|v| v.ln()).collect();
        let interp_h = Pchip::new(ln_s.clone(), ln_h.clone());
        let interp_t = Pchip::new(ln_s.clone(), ln_t);
        Self {
            dim,
            t,
            s,
            ln_s,
            ln_h,
            interp_h,
            interp_t,
            gf,
        }
    }

    pub fn dim(&self) -> Dimension {
        self.dim
    }

    pub fn s_min(&self) -> f64 {
        self.s[0]
    }

    pub fn s_max(&self) -> f64 {
        *self.s.last().unwrap()
    }

    pub fn t_max(&self) -> f64 {
        *self.t.last().unwrap()
    }

    fn check_range(&self, s: f64) -> Result<()> {
        if !(s >= self.s_min() && s <= self.s_max()) {
            return Err(Error::TableRange {
                s,
                lo: self.s_min(),
                hi: self.s_max(),
            });
        }
        Ok(())
    }

    /// h(s) by monotone cubic interpolation in log-log coordinates.
    pub fn h(&self, s: f64) -> Result<f64> {
        self.check_range(s)?;
        Ok(self.interp_h.eval(s.ln()).exp())
    }

    /// s(t) = int_{B(t)} lambda' g / lambda dv, exact up to quadrature.
    pub fn s_of_t(&self, t: f64) -> Result<f64> {
        check_radius(t)?;
        let m = (self.dim.n() - 1) as i32;
        let integrand = |u: f64| self.gf.a_ratio(u).unwrap() * u.sinh().powi(m);
        if t <= self.t[0] {
            return Ok(self.dim.omega()
                * quad::integrate(integrand, 0.0, t, 1e-300, 1e-14)?);
        }
        if t > self.t_max() {
            return Err(Error::TableRange {
                s: t,
                lo: self.t[0],
                hi: self.t_max(),
            });
        }
        let i = self.t.partition_point(|&v| v <= t) - 1;
        let (seg, _) = quad::gk15(&mut { integrand }, self.t[i], t);
        Ok(self.s[i] + self.dim.omega() * seg)
    }

    /// Inverse of s(t): interpolated seed refined by Newton against the
    /// exact s(t).
    pub fn t_of_s(&self, s: f64) -> Result<f64> {
        self.check_range(s)?;
        let mut t = self.interp_t.eval(s.ln()).exp();
        let m = (self.dim.n() - 1) as i32;
        for _ in 0..4 {
            let f = self.s_of_t(t)? - s;
            let df = self.dim.omega() * self.gf.a_ratio(t)? * t.sinh().powi(m);
            let step = f / df;
            t = (t - step).clamp(self.t[0], self.t_max());
            if step.abs() < 1e-14 * t {
                break;
            }
        }
        Ok(t)
    }

    /// h'(s)/h(s) = -(n-1)/|B(t(s))|, from the defining relation.
    pub fn h_log_derivative(&self, s: f64) -> Result<f64> {
        let t = self.t_of_s(s)?;
        Ok(-(self.dim.nf() - 1.0) / self.dim.ball_volume(t)?)
    }

    /// Grid of (s, ln h) pairs, for convexity diagnostics.
    pub fn grid(&self) -> (&[f64], &[f64]) {
        (&self.s, &self.ln_h)
    }

    /// A copy of the table covering a larger t range.
    pub fn extended(&self, new_t_max: f64) -> Self {
        Self::build(self.dim, new_t_max.max(self.t_max() * 1.5))
    }
}
