//! Axisymmetric star-shaped domains as radial graphs rho(theta) over the
//! polar angle.
//!
//! A profile samples rho on the uniform grid theta_j = j pi / N and carries a
//! cosine-series representation, which enforces the pole smoothness
//! conditions rho'(0) = rho'(pi) = 0 identically and gives spectrally
//! accurate derivatives for the curvature formulas. All boundary and bulk
//! integrals are tensor Gauss rules on the mapped meridian strip
//! (s, theta) in [0,1] x [0,pi] with r = s rho(theta).

use std::f64::consts::PI;
use std::io::{BufRead, Write};
use std::path::Path;
use std::sync::Arc;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::hyperbolic::Dimension;
use crate::numerics::cosine::{eval_series, CosineGrid};
use crate::numerics::quad;
use crate::numerics::roots;

/// Constructive description of a profile.
#[derive(Debug, Clone, PartialEq)]
pub enum ShapeSpec {
    /// Geodesic sphere of the given radius centered at the origin.
    Sphere { radius: f64 },
    /// rho(theta) = r0 (1 + sum_k eps_k P_k(cos theta)) with Legendre modes.
    PerturbedSphere {
        radius: f64,
        modes: Vec<(usize, f64)>,
    },
    /// Geodesic sphere centered at signed distance `offset` along the axis.
    TranslatedSphere { radius: f64, offset: f64 },
    /// Explicit node values on the uniform theta grid.
    Nodes { values: Vec<f64> },
}

impl ShapeSpec {
    pub fn describe(&self) -> String {
        match self {
            ShapeSpec::Sphere { radius } => format!("sphere r0={radius}"),
            ShapeSpec::PerturbedSphere { radius, modes } => {
                let m: Vec<String> =
                    modes.iter().map(|(k, e)| format!("{k}:{e}")).collect();
                format!("perturbed-sphere r0={radius} modes={}", m.join(","))
            }
            ShapeSpec::TranslatedSphere { radius, offset } => {
                format!("translated-sphere r0={radius} offset={offset}")
            }
            ShapeSpec::Nodes { values } => format!("nodes count={}", values.len()),
        }
    }
}

/// Sampled axisymmetric radial graph over [0, pi].
#[derive(Debug, Clone)]
pub struct RadialProfile {
    dim: Dimension,
    grid: Arc<CosineGrid>,
    rho: DVector<f64>,
    coeffs: DVector<f64>,
    shape: String,
}

/// Build a validated profile with `n_nodes` grid intervals.
pub fn make_profile(dim: Dimension, shape: &ShapeSpec, n_nodes: usize) -> Result<RadialProfile> {
    let grid = Arc::new(CosineGrid::new(n_nodes));
    make_profile_on(dim, shape, grid)
}

/// As `make_profile`, reusing an existing collocation grid.
pub fn make_profile_on(
    dim: Dimension,
    shape: &ShapeSpec,
    grid: Arc<CosineGrid>,
) -> Result<RadialProfile> {
    let values: Vec<f64> = match shape {
        ShapeSpec::Sphere { radius } => {
            if *radius <= 0.0 {
                return Err(Error::NonPositive {
                    what: "sphere radius",
                    value: *radius,
                });
            }
            vec![*radius; grid.n + 1]
        }
        ShapeSpec::PerturbedSphere { radius, modes } => {
            if *radius <= 0.0 {
                return Err(Error::NonPositive {
                    what: "sphere radius",
                    value: *radius,
                });
            }
            grid.nodes
                .iter()
                .map(|&t| {
                    let mut f = 1.0;
                    for &(k, eps) in modes {
                        f += eps * quad::legendre(k, t.cos());
                    }
                    radius * f
                })
                .collect()
        }
        ShapeSpec::TranslatedSphere { radius, offset } => {
            if *radius <= 0.0 {
                return Err(Error::NonPositive {
                    what: "sphere radius",
                    value: *radius,
                });
            }
            if offset.abs() >= *radius {
                return Err(Error::InvalidProfile(format!(
                    "translated sphere: origin outside the ball (|{offset}| >= {radius})"
                )));
            }
            // solve cosh(d) cosh(rho) - sinh(d) cos(theta) sinh(rho) = cosh(r0)
            grid.nodes
                .iter()
                .map(|&t| {
                    let a = offset.cosh();
                    let b = offset.sinh() * t.cos();
                    let c = radius.cosh();
                    let q = (a * a - b * b).sqrt();
                    let phi = (b / a).atanh();
                    phi + (c / q).acosh()
                })
                .collect()
        }
        ShapeSpec::Nodes { values } => {
            if values.len() != grid.n + 1 {
                return Err(Error::InvalidProfile(format!(
                    "need {} node values, got {}",
                    grid.n + 1,
                    values.len()
                )));
            }
            values.clone()
        }
    };
    let profile = RadialProfile::from_values(dim, grid, values, shape.describe())?;
    profile.validate()?;
    Ok(profile)
}

impl RadialProfile {
    pub(crate) fn from_values(
        dim: Dimension,
        grid: Arc<CosineGrid>,
        values: Vec<f64>,
        shape: String,
    ) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidProfile("non-finite node value".into()));
        }
        let rho = DVector::from_vec(values);
        let coeffs = grid.coefficients(&rho);
        Ok(Self {
            dim,
            grid,
            rho,
            coeffs,
            shape,
        })
    }

    /// Positivity on a dense sample plus spectral-resolution sanity.
    pub(crate) fn validate(&self) -> Result<()> {
        let n = self.grid.n;
        for i in 0..=(8 * n) {
            let t = PI * i as f64 / (8 * n) as f64;
            let (r, _, _) = self.eval(t);
            if r <= 0.0 {
                return Err(Error::InvalidProfile(format!(
                    "rho(theta) = {r:.6e} <= 0 at theta = {t:.6}"
                )));
            }
        }
        // the top of the spectrum must have decayed, otherwise derivatives
        // (and the pole conditions they encode) are meaningless
        let max_c = self.coeffs.iter().fold(0.0f64, |m, &c| m.max(c.abs()));
        let tail: f64 = self
            .coeffs
            .iter()
            .skip(n.saturating_sub(2))
            .fold(0.0f64, |m, &c| m.max(c.abs()));
        if tail > 0.05 * max_c {
            return Err(Error::InvalidProfile(format!(
                "unresolved profile: trailing coefficient {tail:.3e} vs max {max_c:.3e}"
            )));
        }
        Ok(())
    }

    pub fn dim(&self) -> Dimension {
        self.dim
    }

    pub fn grid(&self) -> &Arc<CosineGrid> {
        &self.grid
    }

    pub fn n_nodes(&self) -> usize {
        self.grid.n
    }

    pub fn shape_desc(&self) -> &str {
        &self.shape
    }

    pub fn node_values(&self) -> &DVector<f64> {
        &self.rho
    }

    /// (rho, rho', rho'') at an arbitrary angle.
    pub fn eval(&self, theta: f64) -> (f64, f64, f64) {
        eval_series(self.coeffs.as_slice(), theta)
    }

    pub fn min_rho(&self) -> f64 {
        (0..=4 * self.grid.n)
            .map(|i| self.eval(PI * i as f64 / (4 * self.grid.n) as f64).0)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_rho(&self) -> f64 {
        (0..=4 * self.grid.n)
            .map(|i| self.eval(PI * i as f64 / (4 * self.grid.n) as f64).0)
            .fold(0.0, f64::max)
    }

    /// Support function <d/dr, nu> = lambda / sqrt(rho'^2 + lambda^2) in (0, 1].
    pub fn support(&self, theta: f64) -> f64 {
        let (r, rp, _) = self.eval(theta);
        let l = r.sinh();
        l / (rp * rp + l * l).sqrt()
    }

    /// Principal curvatures (meridian, rotational) of the boundary graph
    /// with respect to the outward normal.
    pub fn principal_curvatures(&self, theta: f64) -> (f64, f64) {
        let (r, rp, rpp) = self.eval(theta);
        principal_curvatures_raw(theta, r, rp, rpp)
    }

    /// Mean curvature H = kappa_m + (n-2) kappa_rot.
    pub fn mean_curvature(&self, theta: f64) -> f64 {
        let (km, kr) = self.principal_curvatures(theta);
        km + (self.dim.nf() - 2.0) * kr
    }

    /// Construct the profile about a shifted axis point; used by `recenter`.
    fn resampled_about(&self, d: f64) -> Result<RadialProfile> {
        let n = self.grid.n;
        let mut values = Vec::with_capacity(n + 1);
        for j in 0..=n {
            let target = PI * j as f64 / n as f64;
            let rho_j = if j == 0 {
                self.eval(0.0).0 - d
            } else if j == n {
                self.eval(PI).0 + d
            } else {
                // invert the monotone angle map theta -> theta~
                let f = |t: f64| {
                    let (_, tt) = boost_polar(self.eval(t).0, t, d);
                    tt - target
                };
                let t = roots::brent(f, 0.0, PI, 1e-15, 200).map_err(|_| {
                    Error::InvalidProfile(
                        "recentered boundary is not a radial graph".into(),
                    )
                })?;
                boost_polar(self.eval(t).0, t, d).0
            };
            if rho_j <= 0.0 {
                return Err(Error::InvalidProfile(
                    "recentering moved the origin outside the domain".into(),
                ));
            }
            values.push(rho_j);
        }
        let p = RadialProfile::from_values(
            self.dim,
            self.grid.clone(),
            values,
            format!("{} [shifted {d:.6e}]", self.shape),
        )?;
        p.validate()?;
        Ok(p)
    }
}

fn principal_curvatures_raw(theta: f64, r: f64, rp: f64, rpp: f64) -> (f64, f64) {
    let l = r.sinh();
    let lp = r.cosh();
    let w2 = rp * rp + l * l;
    let w = w2.sqrt();
    let km = (l * l * lp + 2.0 * rp * rp * lp - l * rpp) / (w2 * w);
    // rho' cot(theta) has the removable limit rho''(pole)
    let rp_cot = if theta.sin().abs() < 1e-8 {
        rpp
    } else {
        rp * theta.cos() / theta.sin()
    };
    let kr = (l * lp - rp_cot) / (l * w);
    (km, kr)
}

/// Geodesic distance from the axis point at signed distance `d` to the
/// point with polar coordinates (r, theta) about the origin.
pub fn distance_from_axis_point(d: f64, r: f64, theta: f64) -> f64 {
    let c = d.cosh() * r.cosh() - d.sinh() * r.sinh() * theta.cos();
    c.max(1.0).acosh()
}

/// Polar coordinates of (r, theta) about the axis point at distance `d`
/// (hyperboloid-model boost along the symmetry axis).
pub fn boost_polar(r: f64, theta: f64, d: f64) -> (f64, f64) {
    let t = r.cosh();
    let x1 = r.sinh() * theta.cos();
    let xp = r.sinh() * theta.sin();
    let t_new = d.cosh() * t - d.sinh() * x1;
    let x1_new = -d.sinh() * t + d.cosh() * x1;
    let r_new = t_new.max(1.0).acosh();
    let theta_new = xp.atan2(x1_new);
    (r_new, theta_new)
}

/// One node of the boundary quadrature rule.
#[derive(Debug, Clone, Copy)]
pub struct BoundaryNode {
    pub theta: f64,
    pub rho: f64,
    pub rho_prime: f64,
    pub support: f64,
    pub mean_curvature: f64,
    /// full area-element weight, including omega_{n-2} and sin^{n-2}
    pub weight: f64,
}

/// Cached geometric quantities of one domain.
#[derive(Debug, Clone)]
pub struct DomainGeometry {
    dim: Dimension,
    pub boundary_area: f64,
    pub volume: f64,
    /// R with |B(R)| = |Omega|
    pub volume_radius: f64,
    /// R* with |S(R*)| = |Sigma|
    pub area_radius: f64,
    pub min_mean_curvature: f64,
    pub min_support: f64,
    /// max |kappa_i - 1| over both principal curvatures
    pub max_kappa_deviation: f64,
    boundary: Vec<BoundaryNode>,
    /// (r, weight) pairs of the tensor bulk rule
    bulk: Vec<(f64, f64)>,
}

impl DomainGeometry {
    /// Build with the default quadrature resolution.
    pub fn new(profile: &RadialProfile) -> Result<Self> {
        Self::with_resolution(profile, 0)
    }

    /// `n_theta` boundary quadrature points (0 picks a default tied to the
    /// profile resolution).
    pub fn with_resolution(profile: &RadialProfile, n_theta: usize) -> Result<Self> {
        let dim = profile.dim();
        let nf = dim.nf();
        let n_theta = if n_theta == 0 {
            (4 * profile.n_nodes()).max(192)
        } else {
            n_theta
        };
        let panels = n_theta.div_ceil(16);
        let mut boundary = Vec::with_capacity(panels * 16);
        let exp_sin = dim.n() as i32 - 2;
        let exp_lam = dim.n() as i32 - 2;
        let om = dim.omega_meridian();
        let mut area = 0.0;
        let mut min_h = f64::INFINITY;
        let mut min_support = f64::INFINITY;
        let mut max_dev = 0.0f64;
        for p in 0..panels {
            let a = PI * p as f64 / panels as f64;
            let b = PI * (p + 1) as f64 / panels as f64;
            let (ts, ws) = quad::gauss_legendre_on(16, a, b);
            for (&t, &wt) in ts.iter().zip(&ws) {
                let (r, rp, rpp) = profile.eval(t);
                let l = r.sinh();
                let w = (rp * rp + l * l).sqrt();
                let (km, kr) = principal_curvatures_raw(t, r, rp, rpp);
                let h = km + (nf - 2.0) * kr;
                let support = l / w;
                let weight = om * w * l.powi(exp_lam) * t.sin().powi(exp_sin) * wt;
                area += weight;
                min_h = min_h.min(h);
                min_support = min_support.min(support);
                max_dev = max_dev.max((km - 1.0).abs()).max((kr - 1.0).abs());
                boundary.push(BoundaryNode {
                    theta: t,
                    rho: r,
                    rho_prime: rp,
                    support,
                    mean_curvature: h,
                    weight,
                });
            }
        }
        // bulk rule: r = s rho(theta), Jacobian rho(theta)
        let (ss, wss) = quad::gauss_legendre_on(48, 0.0, 1.0);
        let mut bulk = Vec::with_capacity(boundary.len() * ss.len());
        let mut volume = 0.0;
        for p in 0..panels {
            let a = PI * p as f64 / panels as f64;
            let b = PI * (p + 1) as f64 / panels as f64;
            let (ts, ws) = quad::gauss_legendre_on(16, a, b);
            for (&t, &wt) in ts.iter().zip(&ws) {
                let (rho, _, _) = profile.eval(t);
                let ang = om * t.sin().powi(exp_sin) * rho * wt;
                for (&s, &wsv) in ss.iter().zip(&wss) {
                    let r = s * rho;
                    let w = ang * wsv * r.sinh().powi(dim.n() as i32 - 1);
                    volume += w;
                    bulk.push((r, w));
                }
            }
        }
        let volume_radius = dim.radius_from_volume(volume)?;
        let area_radius = dim.radius_from_area(area)?;
        Ok(Self {
            dim,
            boundary_area: area,
            volume,
            volume_radius,
            area_radius,
            min_mean_curvature: min_h,
            min_support,
            max_kappa_deviation: max_dev,
            boundary,
            bulk,
        })
    }

    pub fn dim(&self) -> Dimension {
        self.dim
    }

    /// Errors unless H > 0 (with margin) at every boundary node.
    pub fn require_mean_convex(&self) -> Result<()> {
        if self.min_mean_curvature <= 1e-8 {
            return Err(Error::NotMeanConvex {
                min_h: self.min_mean_curvature,
            });
        }
        Ok(())
    }

    /// int_Omega f(r) dv for a radial integrand.
    pub fn bulk_integral<F: Fn(f64) -> f64>(&self, f: F) -> Result<f64> {
        let mut acc = 0.0;
        for &(r, w) in &self.bulk {
            let v = f(r);
            if !v.is_finite() {
                return Err(Error::Quadrature {
                    at: r,
                    reason: "non-finite bulk integrand".into(),
                });
            }
            acc += w * v;
        }
        Ok(acc)
    }

    /// int_Sigma phi dmu over the boundary.
    pub fn boundary_integral<F: Fn(&BoundaryNode) -> f64>(&self, phi: F) -> Result<f64> {
        let mut acc = 0.0;
        for node in &self.boundary {
            let v = phi(node);
            if !v.is_finite() {
                return Err(Error::Quadrature {
                    at: node.theta,
                    reason: "non-finite boundary integrand".into(),
                });
            }
            acc += node.weight * v;
        }
        Ok(acc)
    }

    pub fn boundary_nodes(&self) -> &[BoundaryNode] {
        &self.boundary
    }

    /// Largest radius appearing in the bulk rule.
    pub fn max_radius(&self) -> f64 {
        self.bulk.iter().map(|&(r, _)| r).fold(0.0, f64::max)
    }
}

/// Weighted axial moment of the boundary about the axis point `d`:
/// int_Sigma G(r~) x_axis dmu in normal coordinates centered there.
pub fn axial_moment<F: Fn(f64) -> f64>(
    geometry: &DomainGeometry,
    g_weight: &F,
    d: f64,
) -> Result<f64> {
    geometry.boundary_integral(|node| {
        let (rt, tt) = boost_polar(node.rho, node.theta, d);
        g_weight(rt) * rt * tt.cos()
    })
}

/// Shift the origin to the weighted center of mass of the boundary
/// (the axis point where the axial moment of G vanishes) and re-sample the
/// profile about it. Returns the new profile and the signed shift.
pub fn recenter<F: Fn(f64) -> f64>(
    profile: &RadialProfile,
    g_weight: F,
) -> Result<(RadialProfile, f64)> {
    let geometry = DomainGeometry::new(profile)?;
    let front = profile.eval(0.0).0;
    let back = profile.eval(PI).0;
    let lo = -back + 1e-12;
    let hi = front - 1e-12;
    let m_lo = axial_moment(&geometry, &g_weight, lo)?;
    let m_hi = axial_moment(&geometry, &g_weight, hi)?;
    if m_lo.signum() == m_hi.signum() {
        return Err(Error::RootBracket {
            a: lo,
            b: hi,
            reason: "axial moment does not change sign over the domain".into(),
        });
    }
    let d = roots::brent(
        |x| axial_moment(&geometry, &g_weight, x).unwrap_or(f64::NAN),
        lo,
        hi,
        1e-14,
        200,
    )?;
    let shifted = profile.resampled_about(d)?;
    Ok((shifted, d))
}

/// Declared monotonicity of a transplantation integrand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Monotonicity {
    Increasing,
    Decreasing,
}

/// Outcome of one mass-transplantation comparison.
#[derive(Debug, Clone, Copy)]
pub struct TransplantReport {
    /// int_Omega f dv
    pub domain_integral: f64,
    /// int_{B(R)} f dv over the equal-volume centered ball
    pub ball_integral: f64,
    /// signed so that the claimed inequality passes iff slack >= 0
    pub slack: f64,
    pub direction: Monotonicity,
}

/// Compare int_Omega f dv against the equal-volume centered ball.
///
/// Decreasing f: the ball dominates; increasing f: the domain dominates.
/// The declared monotonicity is verified on a sample grid first.
pub fn mass_transplant_check<F: Fn(f64) -> f64>(
    geometry: &DomainGeometry,
    f: F,
    direction: Monotonicity,
) -> Result<TransplantReport> {
    let r_hi = geometry.volume_radius.max(geometry.max_radius());
    let samples = 400;
    let mut prev = f(1e-12);
    let scale = prev.abs().max(1e-30);
    for i in 1..=samples {
        let r = r_hi * i as f64 / samples as f64;
        let v = f(r);
        let ok = match direction {
            Monotonicity::Increasing => v >= prev - 1e-11 * scale.max(v.abs()),
            Monotonicity::Decreasing => v <= prev + 1e-11 * scale.max(v.abs()),
        };
        if !ok {
            return Err(Error::InvalidProfile(format!(
                "integrand is not {direction:?} near r = {r:.6}"
            )));
        }
        prev = v;
    }
    let dim = geometry.dim;
    let domain_integral = geometry.bulk_integral(&f)?;
    let m = dim.n() as i32 - 1;
    let ball_integral = dim.omega()
        * quad::integrate(
            |r| f(r) * r.sinh().powi(m),
            0.0,
            geometry.volume_radius,
            1e-13,
            1e-12,
        )?;
    let slack = match direction {
        Monotonicity::Increasing => domain_integral - ball_integral,
        Monotonicity::Decreasing => ball_integral - domain_integral,
    };
    Ok(TransplantReport {
        domain_integral,
        ball_integral,
        slack,
        direction,
    })
}

/// Circumscribed radius: the smallest geodesic ball centered on the symmetry
/// axis containing the boundary. Returns (radius, axial center).
pub fn circumscribed_radius(profile: &RadialProfile) -> (f64, f64) {
    let n_samples = 8 * profile.n_nodes();
    let samples: Vec<(f64, f64)> = (0..=n_samples)
        .map(|i| {
            let t = PI * i as f64 / n_samples as f64;
            (profile.eval(t).0, t)
        })
        .collect();
    let farthest = |d: f64| {
        samples
            .iter()
            .map(|&(r, t)| distance_from_axis_point(d, r, t))
            .fold(0.0, f64::max)
    };
    // the farthest distance is convex in d: golden-section search
    let (mut a, mut b) = (-profile.eval(PI).0, profile.eval(0.0).0);
    let phi = 0.5 * (5.0f64.sqrt() - 1.0);
    let mut x1 = b - phi * (b - a);
    let mut x2 = a + phi * (b - a);
    let mut f1 = farthest(x1);
    let mut f2 = farthest(x2);
    for _ in 0..200 {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = farthest(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = farthest(x2);
        }
        if (b - a).abs() < 1e-12 {
            break;
        }
    }
    let d = 0.5 * (a + b);
    (farthest(d), d)
}

/// Write a profile in the structured text format (key-value header followed
/// by the theta/rho node table).
pub fn write_profile<W: Write>(w: &mut W, profile: &RadialProfile) -> Result<()> {
    writeln!(w, "# axisymmetric radial profile")?;
    writeln!(w, "n = {}", profile.dim().n())?;
    writeln!(w, "nodes = {}", profile.n_nodes())?;
    writeln!(w, "shape = {}", profile.shape_desc())?;
    writeln!(w, "theta rho")?;
    for (j, &t) in profile.grid.nodes.iter().enumerate() {
        writeln!(w, "{:.17e} {:.17e}", t, profile.rho[j])?;
    }
    Ok(())
}

pub fn save_profile(path: &Path, profile: &RadialProfile) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_profile(&mut f, profile)
}

/// Parse the profile text format.
pub fn read_profile<R: BufRead>(r: R) -> Result<RadialProfile> {
    let mut n_dim: Option<usize> = None;
    let mut n_nodes: Option<usize> = None;
    let mut shape = String::new();
    let mut values: Vec<f64> = Vec::new();
    let mut in_table = false;
    for line in r.lines() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if in_table {
            let mut it = line.split_whitespace();
            let _theta: f64 = it
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::ProfileParse(format!("bad table row: {line}")))?;
            let rho: f64 = it
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::ProfileParse(format!("bad table row: {line}")))?;
            values.push(rho);
        } else if line == "theta rho" {
            in_table = true;
        } else if let Some((key, val)) = line.split_once('=') {
            match key.trim() {
                "n" => {
                    n_dim = Some(val.trim().parse().map_err(|_| {
                        Error::ProfileParse(format!("bad dimension: {val}"))
                    })?)
                }
                "nodes" => {
                    n_nodes = Some(val.trim().parse().map_err(|_| {
                        Error::ProfileParse(format!("bad node count: {val}"))
                    })?)
                }
                "shape" => shape = val.trim().to_string(),
                other => {
                    return Err(Error::ProfileParse(format!("unknown key: {other}")))
                }
            }
        } else {
            return Err(Error::ProfileParse(format!("unexpected line: {line}")));
        }
    }
    let n_dim = n_dim.ok_or_else(|| Error::ProfileParse("missing n".into()))?;
    let n_nodes = n_nodes.ok_or_else(|| Error::ProfileParse("missing nodes".into()))?;
    if values.len() != n_nodes + 1 {
        return Err(Error::ProfileParse(format!(
            "expected {} rows, got {}",
            n_nodes + 1,
            values.len()
        )));
    }
    let dim = Dimension::new(n_dim)?;
    let grid = Arc::new(CosineGrid::new(n_nodes));
    let mut p = RadialProfile::from_values(dim, grid, values, shape)?;
    if p.shape.is_empty() {
        p.shape = "nodes".into();
    }
    p.validate()?;
    Ok(p)
}

pub fn load_profile(path: &Path) -> Result<RadialProfile> {
    let f = std::io::BufReader::new(std::fs::File::open(path)?);
    read_profile(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gfun::GFunction;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn dim(n: usize) -> Dimension {
        Dimension::new(n).unwrap()
    }

    fn sphere(n: usize, r0: f64) -> RadialProfile {
        make_profile(dim(n), &ShapeSpec::Sphere { radius: r0 }, 48).unwrap()
    }

    fn bumpy(n: usize) -> RadialProfile {
        make_profile(
            dim(n),
            &ShapeSpec::PerturbedSphere {
                radius: 1.0,
                modes: vec![(2, 0.2)],
            },
            48,
        )
        .unwrap()
    }

    #[test]
    fn sphere_profile_is_flat() {
        let p = sphere(4, 1.0);
        for i in 0..=10 {
            let t = PI * i as f64 / 10.0;
            let (r, rp, _) = p.eval(t);
            assert_abs_diff_eq!(r, 1.0, epsilon = 1e-13);
            assert_abs_diff_eq!(rp, 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!(p.support(t), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn invalid_profiles_are_rejected() {
        // perturbation large enough to push rho negative (min P2 = -1/2)
        let r = make_profile(
            dim(4),
            &ShapeSpec::PerturbedSphere {
                radius: 1.0,
                modes: vec![(2, 2.5)],
            },
            48,
        );
        assert!(r.is_err());
        // node data oscillating at the grid scale is not resolved
        let noisy: Vec<f64> = (0..49)
            .map(|i| 1.0 + 0.2 * if i % 2 == 0 { 1.0 } else { -1.0 })
            .collect();
        assert!(make_profile(dim(4), &ShapeSpec::Nodes { values: noisy }, 48).is_err());
        assert!(make_profile(
            dim(4),
            &ShapeSpec::TranslatedSphere {
                radius: 1.0,
                offset: 1.2
            },
            48
        )
        .is_err());
    }

    #[test]
    fn perturbed_profile_valid() {
        let p = bumpy(4);
        assert!(p.min_rho() > 0.0);
        // P2(cos 0) = 1
        assert_relative_eq!(p.eval(0.0).0, 1.2, epsilon = 1e-12);
    }

    #[test]
    fn sphere_geometry_matches_closed_forms() {
        for n in [2usize, 3, 4, 6] {
            let d = dim(n);
            for &r0 in &[0.5f64, 1.0, 2.0] {
                let p = make_profile(d, &ShapeSpec::Sphere { radius: r0 }, 64).unwrap();
                let geo = DomainGeometry::new(&p).unwrap();
                assert_relative_eq!(
                    geo.boundary_area,
                    d.sphere_area(r0).unwrap(),
                    max_relative = 1e-10
                );
                assert_relative_eq!(
                    geo.volume,
                    d.ball_volume(r0).unwrap(),
                    max_relative = 1e-10
                );
                assert_relative_eq!(geo.volume_radius, r0, epsilon = 1e-10);
                assert_relative_eq!(geo.area_radius, r0, epsilon = 1e-10);
                // H = (n-1) coth(r0) at every node
                let h_exact = (d.nf() - 1.0) * r0.cosh() / r0.sinh();
                for node in geo.boundary_nodes().iter().step_by(7) {
                    assert_relative_eq!(node.mean_curvature, h_exact, max_relative = 1e-10);
                }
            }
        }
    }

    #[test]
    fn translated_sphere_is_isometric_image() {
        // translations are isometries: same area, volume, curvature
        let d = dim(4);
        let r0 = 1.0;
        let p = make_profile(
            d,
            &ShapeSpec::TranslatedSphere {
                radius: r0,
                offset: 0.4,
            },
            64,
        )
        .unwrap();
        let geo = DomainGeometry::new(&p).unwrap();
        assert_relative_eq!(
            geo.boundary_area,
            d.sphere_area(r0).unwrap(),
            max_relative = 1e-9
        );
        assert_relative_eq!(geo.volume, d.ball_volume(r0).unwrap(), max_relative = 1e-9);
        assert_relative_eq!(geo.volume_radius, r0, epsilon = 1e-9);
        let h_exact = 3.0 * r0.cosh() / r0.sinh();
        for node in geo.boundary_nodes().iter().step_by(11) {
            assert_relative_eq!(node.mean_curvature, h_exact, max_relative = 1e-8);
        }
    }

    /// Independent curvature oracle: H = div(nu) with nu the unit normal of
    /// the level set r - rho(theta), by central differences of the flux
    /// components of the divergence in the warped metric.
    fn mean_curvature_fd(p: &RadialProfile, theta: f64) -> f64 {
        let n = p.dim().n() as i32;
        let dens = |r: f64, t: f64| r.sinh().powi(n - 1) * t.sin().powi(n - 2);
        let nu_r = |r: f64, t: f64| {
            let rp = p.eval(t).1;
            r.sinh() / (rp * rp + r.sinh() * r.sinh()).sqrt()
        };
        let nu_t = |r: f64, t: f64| {
            let rp = p.eval(t).1;
            -rp / (r.sinh() * (rp * rp + r.sinh() * r.sinh()).sqrt())
        };
        let r0 = p.eval(theta).0;
        let h = 1e-5;
        let fr = |r: f64| dens(r, theta) * nu_r(r, theta);
        let ft = |t: f64| dens(r0, t) * nu_t(r0, t);
        ((fr(r0 + h) - fr(r0 - h)) / (2.0 * h) + (ft(theta + h) - ft(theta - h)) / (2.0 * h))
            / dens(r0, theta)
    }

    #[test]
    fn mean_curvature_matches_divergence_oracle() {
        for n in [3usize, 4, 5] {
            let p = make_profile(
                dim(n),
                &ShapeSpec::PerturbedSphere {
                    radius: 1.1,
                    modes: vec![(2, 0.12), (3, -0.05)],
                },
                64,
            )
            .unwrap();
            for &t in &[0.4, 1.0, 1.9, 2.8] {
                assert_relative_eq!(
                    p.mean_curvature(t),
                    mean_curvature_fd(&p, t),
                    max_relative = 1e-6
                );
            }
            // sphere case to tighter tolerance
            let s = sphere(n, 0.8);
            assert_relative_eq!(
                s.mean_curvature(1.3),
                mean_curvature_fd(&s, 1.3),
                max_relative = 1e-8
            );
        }
    }

    #[test]
    fn bulk_integral_consistency() {
        let p = bumpy(4);
        let geo = DomainGeometry::new(&p).unwrap();
        assert_relative_eq!(
            geo.bulk_integral(|_| 1.0).unwrap(),
            geo.volume,
            max_relative = 1e-13
        );
        assert!(geo
            .bulk_integral(|r| if r > 0.5 { f64::NAN } else { 0.0 })
            .is_err());
    }

    #[test]
    fn isoperimetric_deficit() {
        // |Sigma| >= |S(R)| with equality only for centered spheres
        let s = sphere(4, 1.0);
        let geo_s = DomainGeometry::new(&s).unwrap();
        let d = dim(4);
        assert_relative_eq!(
            geo_s.boundary_area,
            d.sphere_area(geo_s.volume_radius).unwrap(),
            max_relative = 1e-9
        );
        let p = bumpy(4);
        let geo = DomainGeometry::new(&p).unwrap();
        assert!(geo.boundary_area > d.sphere_area(geo.volume_radius).unwrap() + 1e-6);
        assert!(geo.area_radius > geo.volume_radius);
    }

    #[test]
    fn support_bounds_and_flux_identity() {
        let gf = GFunction::new(dim(4));
        let p = bumpy(4);
        let geo = DomainGeometry::new(&p).unwrap();
        for node in geo.boundary_nodes() {
            assert!(node.support > 0.0 && node.support <= 1.0 + 1e-14);
        }
        // divergence theorem for div(g dr) = 1:
        // int_Sigma g <dr, nu> dmu = |Omega|
        let flux = geo
            .boundary_integral(|b| gf.g(b.rho).unwrap() * b.support)
            .unwrap();
        assert_relative_eq!(flux, geo.volume, max_relative = 1e-7);
        // int_Sigma g dmu >= |Omega|
        let int_g = geo.boundary_integral(|b| gf.g(b.rho).unwrap()).unwrap();
        assert!(int_g >= geo.volume - 1e-10);
        // int_Sigma g^2 dmu >= g(R) |B(R)|
        let int_g2 = geo
            .boundary_integral(|b| gf.g(b.rho).unwrap().powi(2))
            .unwrap();
        let r = geo.volume_radius;
        assert!(int_g2 >= gf.g(r).unwrap() * dim(4).ball_volume(r).unwrap() - 1e-10);
    }

    #[test]
    fn recenter_sphere_is_identity() {
        let p = sphere(4, 1.0);
        let gf = GFunction::new(dim(4));
        let (q, d) = recenter(&p, |r| gf.g(r).unwrap()).unwrap();
        assert_abs_diff_eq!(d, 0.0, epsilon = 1e-10);
        for j in 0..q.n_nodes() {
            assert_abs_diff_eq!(q.node_values()[j], 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn recenter_translated_sphere_recovers_center() {
        let d4 = dim(4);
        let gf = GFunction::new(d4);
        let p = make_profile(
            d4,
            &ShapeSpec::TranslatedSphere {
                radius: 1.0,
                offset: 0.35,
            },
            64,
        )
        .unwrap();
        let (q, d) = recenter(&p, |r| gf.g(r).unwrap()).unwrap();
        assert_abs_diff_eq!(d, 0.35, epsilon = 1e-8);
        // recentered profile is the round sphere again
        for j in 0..=q.n_nodes() {
            assert_abs_diff_eq!(q.node_values()[j], 1.0, epsilon = 1e-8);
        }
        // axial moment vanishes at the new origin
        let geo = DomainGeometry::new(&q).unwrap();
        let m = axial_moment(&geo, &|r| gf.g(r).unwrap(), 0.0).unwrap();
        assert_abs_diff_eq!(m, 0.0, epsilon = 1e-8);
    }

    #[test]
    fn recenter_perturbed_sphere_zeroes_moment() {
        let d4 = dim(4);
        let gf = GFunction::new(d4);
        let p = make_profile(
            d4,
            &ShapeSpec::PerturbedSphere {
                radius: 1.0,
                modes: vec![(2, 0.1), (3, 0.08)],
            },
            64,
        )
        .unwrap();
        let (q, _) = recenter(&p, |r| gf.g(r).unwrap()).unwrap();
        let geo = DomainGeometry::new(&q).unwrap();
        let m = axial_moment(&geo, &|r| gf.g(r).unwrap(), 0.0).unwrap();
        assert_abs_diff_eq!(m, 0.0, epsilon = 1e-8);
    }

    #[test]
    fn transplant_directions() {
        let gf = GFunction::new(dim(4));
        let p = bumpy(4);
        let geo = DomainGeometry::new(&p).unwrap();
        // constant: equality both ways
        let rep = mass_transplant_check(&geo, |_| 2.5, Monotonicity::Increasing).unwrap();
        assert_abs_diff_eq!(rep.slack, 0.0, epsilon = 1e-9 * rep.ball_integral.abs());
        // increasing: domain integral dominates
        let rep =
            mass_transplant_check(&geo, |r| gf.a_ratio(r).unwrap(), Monotonicity::Increasing)
                .unwrap();
        assert!(rep.slack > 1e-9);
        // decreasing: ball dominates, strictly on a non-ball domain
        let rep = mass_transplant_check(
            &geo,
            |r| gf.decreasing_integrand(r).unwrap(),
            Monotonicity::Decreasing,
        )
        .unwrap();
        assert!(rep.slack > 1e-9);
        // wrong declaration is rejected
        assert!(mass_transplant_check(
            &geo,
            |r| gf.a_ratio(r).unwrap(),
            Monotonicity::Decreasing
        )
        .is_err());
        // on a centered ball everything is equality
        let geo_b = DomainGeometry::new(&sphere(4, 1.0)).unwrap();
        let rep = mass_transplant_check(
            &geo_b,
            |r| gf.a_ratio(r).unwrap(),
            Monotonicity::Increasing,
        )
        .unwrap();
        assert_abs_diff_eq!(rep.slack, 0.0, epsilon = 1e-9 * rep.ball_integral.abs());
    }

    #[test]
    fn circumscribed_radius_of_spheres() {
        let p = sphere(3, 0.7);
        let (rc, c) = circumscribed_radius(&p);
        assert_relative_eq!(rc, 0.7, epsilon = 1e-9);
        assert_abs_diff_eq!(c, 0.0, epsilon = 1e-8);
        let q = make_profile(
            dim(3),
            &ShapeSpec::TranslatedSphere {
                radius: 0.7,
                offset: 0.3,
            },
            64,
        )
        .unwrap();
        let (rc, c) = circumscribed_radius(&q);
        assert_relative_eq!(rc, 0.7, epsilon = 1e-8);
        assert_relative_eq!(c, 0.3, epsilon = 1e-6);
    }

    #[test]
    fn profile_file_roundtrip() {
        let p = bumpy(5);
        let mut buf = Vec::new();
        write_profile(&mut buf, &p).unwrap();
        let q = read_profile(std::io::Cursor::new(&buf)).unwrap();
        assert_eq!(q.dim().n(), 5);
        assert_eq!(q.n_nodes(), p.n_nodes());
        for j in 0..=p.n_nodes() {
            assert_eq!(
                p.node_values()[j],
                q.node_values()[j],
                "row {j} not bit-exact"
            );
        }
        assert!(read_profile(std::io::Cursor::new(b"nonsense\n".as_slice())).is_err());
    }
}
