//! The verification suites: every row pins one identity, limit,
//! monotonicity, transplantation bound or eigenvalue comparison.
//!
//! All comparison rows are normalized to dimensionless form (ratios of
//! positive quantities, or violations relative to the local scale), so each
//! suite's tolerance is scale-free across the shape family.

use rand::Rng;

use crate::domain::{
    circumscribed_radius, make_profile, mass_transplant_check, recenter, DomainGeometry,
    Monotonicity, RadialProfile, ShapeSpec,
};
use crate::error::{Error, Result};
use crate::flow::{imcf_inequality, FlowConfig, FlowIntegrator};
use crate::gfun::{n3_threshold, GFunction, HTable};
use crate::harness::{case_rng, random_profile, random_profile_n3, Tolerances, VerifyConfig};
use crate::hyperbolic::Dimension;
use crate::steklov::{self, SolverConfig, SteklovSpectrum};

use super::report::CheckRow;

/// 2000-point log grid on [1e-3, 30].
fn log_grid(points: usize, lo: f64, hi: f64) -> Vec<f64> {
    let ratio = (hi / lo).powf(1.0 / (points as f64 - 1.0));
    let mut r = lo;
    (0..points)
        .map(|_| {
            let v = r;
            r *= ratio;
            v
        })
        .collect()
}

/// Largest relative drop along a sequence that should be non-decreasing.
fn max_decrease(values: &[f64]) -> f64 {
    values
        .windows(2)
        .map(|w| (w[0] - w[1]) / w[0].abs().max(1e-300))
        .fold(0.0, f64::max)
}

/// Largest relative rise along a sequence that should be non-increasing.
fn max_increase(values: &[f64]) -> f64 {
    values
        .windows(2)
        .map(|w| (w[1] - w[0]) / w[0].abs().max(1e-300))
        .fold(0.0, f64::max)
}

// ---------------------------------------------------------------------------
// g-calculus suite
// ---------------------------------------------------------------------------

/// Identities, limits and monotone combinations of the g-calculus for
/// n = 2..8, plus the h-function rows and the n = 3 threshold radius.
pub fn gfun_suite(tol: &Tolerances) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    for n in 2..=8 {
        let dim = Dimension::new(n)?;
        let gf = GFunction::new(dim);
        let id = format!("n{n}");
        let nf = n as f64;
        let grid = log_grid(2000, 1e-3, 30.0);

        // derivative identities by central differences
        let mut worst_flux = 0.0f64;
        let mut worst_deri = 0.0f64;
        for &r in &grid {
            let h = 1e-6 * r.max(0.01);
            let f = |x: f64| x.sinh().powi(n as i32 - 1) * gf.g(x).unwrap();
            let fd_flux = (f(r + h) - f(r - h)) / (2.0 * h);
            let lam = r.sinh().powi(n as i32 - 1);
            worst_flux = worst_flux.max((fd_flux - lam).abs() / lam);
            let fd_g = (gf.g(r + h)? - gf.g(r - h)?) / (2.0 * h);
            let direct = 1.0 - (nf - 1.0) * r.cosh() / r.sinh() * gf.g(r)?;
            worst_deri = worst_deri.max((fd_g - direct).abs());
        }
        rows.push(CheckRow::violation(
            &id,
            "flux-derivative identity",
            "(lambda^{n-1} g)' = lambda^{n-1}",
            worst_flux,
            tol.analytic,
        ));
        rows.push(CheckRow::violation(
            &id,
            "first-derivative identity",
            "g' = 1 - (n-1) lambda' g / lambda",
            worst_deri,
            tol.analytic,
        ));

        // limit values at r = 1e-5 and r = 40
        let lim = gf.limits();
        let limit_tol = 1e-6;
        rows.push(CheckRow::equality(
            &id,
            "g/lambda at 0",
            "lim g/lambda = 1/n",
            gf.g_over_lambda(1e-5)?,
            lim.g_over_lambda_at_zero,
            1.0,
            limit_tol,
        ));
        rows.push(CheckRow::equality(
            &id,
            "g at infinity",
            "lim g = 1/(n-1)",
            gf.g(40.0)?,
            lim.g_at_infinity,
            1.0,
            limit_tol,
        ));
        rows.push(CheckRow::equality(
            &id,
            "g' at 0",
            "lim g' = 1/n",
            gf.g_prime(1e-5)?,
            lim.g_prime_at_zero,
            1.0,
            limit_tol,
        ));
        rows.push(CheckRow::equality(
            &id,
            "g' at infinity",
            "lim g' = 0",
            gf.g_prime(40.0)?,
            0.0,
            1.0,
            limit_tol,
        ));
        if n >= 4 {
            rows.push(CheckRow::equality(
                &id,
                "lambda^2 g' at infinity",
                "lim lambda^2 g' = 1/(n-3)",
                gf.lambda2_g_prime(40.0)?,
                lim.lambda2_g_prime_at_infinity()?,
                1.0,
                limit_tol,
            ));
        }

        // monotone combinations on the grid
        let gp: Vec<f64> = grid.iter().map(|&r| gf.g_prime(r).unwrap()).collect();
        let gvals: Vec<f64> = grid.iter().map(|&r| gf.g(r).unwrap()).collect();
        rows.push(CheckRow::violation(
            &id,
            "g increasing",
            "g' >= 0",
            gp.iter().fold(0.0f64, |m, &v| m.max(-v)),
            tol.quadrature,
        ));
        rows.push(CheckRow::violation(
            &id,
            "g concave",
            "g'' <= 0",
            grid.iter()
                .map(|&r| gf.g_second(r).unwrap())
                .fold(0.0f64, f64::max),
            tol.quadrature,
        ));
        rows.push(CheckRow::violation(
            &id,
            "g bounded derivative",
            "g' <= 1",
            gp.iter().fold(0.0f64, |m, &v| m.max(v - 1.0)),
            1e-10,
        ));
        let a: Vec<f64> = grid.iter().map(|&r| gf.a_ratio(r).unwrap()).collect();
        let b: Vec<f64> = grid.iter().map(|&r| gf.b_ratio(r).unwrap()).collect();
        let c: Vec<f64> = grid.iter().map(|&r| gf.c_ratio(r).unwrap()).collect();
        rows.push(CheckRow::violation(
            &id,
            "ratio a monotone",
            "lambda' g / lambda increasing",
            max_decrease(&a),
            1e-10,
        ));
        let a_bound = a
            .iter()
            .map(|&v| (1.0 / nf - v).max(v - 1.0 / (nf - 1.0)))
            .fold(0.0f64, f64::max);
        rows.push(CheckRow::violation(
            &id,
            "ratio a bounds",
            "1/n <= lambda' g / lambda <= 1/(n-1)",
            a_bound,
            1e-10,
        ));
        rows.push(CheckRow::violation(
            &id,
            "ratio b monotone",
            "lambda lambda' g'/g increasing",
            max_decrease(&b),
            1e-10,
        ));
        if n >= 4 {
            let b_bound = b
                .iter()
                .map(|&v| v - (nf - 1.0) / (nf - 3.0))
                .fold(0.0f64, f64::max);
            rows.push(CheckRow::violation(
                &id,
                "ratio b bound",
                "lambda lambda' g'/g <= (n-1)/(n-3)",
                b_bound,
                1e-10,
            ));
        }
        rows.push(CheckRow::violation(
            &id,
            "ratio c monotone",
            "lambda^2 g'/g increasing",
            max_decrease(&c),
            1e-10,
        ));
        let g1gp: Vec<f64> = gvals
            .iter()
            .zip(&gp)
            .map(|(&g, &d)| g * (1.0 + d))
            .collect();
        rows.push(CheckRow::violation(
            &id,
            "g(1+g') monotone",
            "div(g^2 d/dr) integrand increasing",
            max_decrease(&g1gp),
            1e-10,
        ));
        if n >= 4 {
            let f: Vec<f64> = grid
                .iter()
                .map(|&r| gf.decreasing_integrand(r).unwrap())
                .collect();
            rows.push(CheckRow::violation(
                &id,
                "energy combination decreasing",
                "(g')^2 + (n-1)g^2/l^2 + c_n l'g/l decreasing",
                max_increase(&f),
                1e-10,
            ));
        }
        // scaling coherence of the ball eigenvalue
        let s1: Vec<f64> = grid
            .iter()
            .map(|&r| dim.ln_sphere_area(r).exp() * gf.sigma1_ball(r).unwrap())
            .collect();
        let s2: Vec<f64> = grid
            .iter()
            .map(|&r| {
                (dim.ln_sphere_area(r) * 2.0 / (nf - 1.0)).exp() * gf.sigma1_ball(r).unwrap()
            })
            .collect();
        rows.push(CheckRow::violation(
            &id,
            "area-scaled eigenvalue monotone",
            "|S(r)| sigma_1(B(r)) increasing",
            max_decrease(&s1),
            1e-10,
        ));
        rows.push(CheckRow::violation(
            &id,
            "normalized-scaled eigenvalue monotone",
            "|S(r)|^{2/(n-1)} sigma_1(B(r)) increasing",
            max_decrease(&s2),
            1e-10,
        ));
    }

    // h-function rows
    for n in [3usize, 4, 5, 8] {
        let dim = Dimension::new(n)?;
        let id = format!("n{n}");
        let table = HTable::build(dim, 25.0);
        let (s, ln_h) = table.grid();
        let mut worst_convex = 0.0f64;
        let mut prev_slope = f64::NEG_INFINITY;
        let mut worst_increase = 0.0f64;
        for i in 1..s.len() {
            let slope = (ln_h[i] - ln_h[i - 1]) / (s[i] - s[i - 1]);
            if prev_slope > f64::NEG_INFINITY {
                worst_convex = worst_convex.max(prev_slope - slope);
            }
            worst_increase = worst_increase.max(ln_h[i] - ln_h[i - 1]);
            prev_slope = slope;
        }
        rows.push(CheckRow::violation(
            &id,
            "h decreasing",
            "h' < 0",
            worst_increase,
            1e-12,
        ));
        rows.push(CheckRow::violation(
            &id,
            "h log-convex",
            "slopes of ln h vs s non-decreasing",
            worst_convex,
            1e-10,
        ));
        let mut worst_rel = 0.0f64;
        for i in 0..100 {
            let t = 0.01 * 10f64.powf(3.2 * i as f64 / 99.0); // 0.01 .. ~16
            let s_t = table.s_of_t(t)?;
            let expected = -(dim.nf() - 1.0) / dim.ball_volume(t)?;
            let got = table.h_log_derivative(s_t)?;
            worst_rel = worst_rel.max((got - expected).abs() / expected.abs());
        }
        rows.push(CheckRow::violation(
            &id,
            "h log-derivative relation",
            "h'/h = -(n-1)/|B(t)|",
            worst_rel,
            1e-6,
        ));
    }

    // n = 3 threshold radius
    let gf3 = GFunction::new(Dimension::new(3)?);
    let r0 = n3_threshold(&gf3)?;
    rows.push(CheckRow::equality(
        "n3",
        "threshold radius equation",
        "lambda lambda' g'/g = 5/2 at 2 R0",
        gf3.b_ratio(2.0 * r0)?,
        2.5,
        2.5,
        1e-10,
    ));
    let below = log_grid(200, 1e-3, 2.0 * r0 * 0.999)
        .iter()
        .map(|&r| gf3.b_ratio(r).unwrap() - 2.5)
        .fold(f64::NEG_INFINITY, f64::max);
    rows.push(CheckRow::violation(
        "n3",
        "threshold is first crossing",
        "b < 5/2 below 2 R0",
        below.max(0.0),
        1e-12,
    ));
    Ok(rows)
}

// ---------------------------------------------------------------------------
// divergence identities
// ---------------------------------------------------------------------------

/// Pointwise flux identities at random interior points plus the integrated
/// divergence-theorem forms on seeded domains.
pub fn divergence_suite(config: &VerifyConfig) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    let tol = &config.tolerances;
    for k in 0..config.divergence_domains {
        let n = config.dims[k % config.dims.len()];
        let dim = Dimension::new(n)?;
        let gf = GFunction::new(dim);
        let mut rng = case_rng(config.seed, 0x0d00 + k as u64);
        let (profile, _) = random_profile(dim, &mut rng, config.profile_nodes)?;
        let geo = DomainGeometry::new(&profile)?;
        let id = format!("n{n}-div{k:02}");

        let mut worst1 = 0.0f64;
        let mut worst2 = 0.0f64;
        for _ in 0..100 {
            // random interior point of the meridian strip
            let theta = rng.gen_range(0.0..std::f64::consts::PI);
            let s: f64 = rng.gen_range(0.05..0.999);
            let r = s * profile.eval(theta).0;
            let h = 1e-6 * r.max(0.01);
            let m = n as i32 - 1;
            let lam_pow = |x: f64| x.sinh().powi(m);
            // div(g dr) = 1
            let f1 = |x: f64| lam_pow(x) * gf.g(x).unwrap();
            let fd1 = (f1(r + h) - f1(r - h)) / (2.0 * h);
            worst1 = worst1.max((fd1 / lam_pow(r) - 1.0).abs());
            // div(g^2 dr) = g (1 + g')
            let f2 = |x: f64| lam_pow(x) * gf.g(x).unwrap().powi(2);
            let fd2 = (f2(r + h) - f2(r - h)) / (2.0 * h);
            let expected = gf.g(r)? * (1.0 + gf.g_prime(r)?);
            worst2 = worst2.max((fd2 / lam_pow(r) - expected).abs() / expected.abs());
        }
        rows.push(CheckRow::violation(
            &id,
            "pointwise divergence of g field",
            "div(g d/dr) = 1",
            worst1,
            1e-6,
        ));
        rows.push(CheckRow::violation(
            &id,
            "pointwise divergence of g^2 field",
            "div(g^2 d/dr) = g(1+g')",
            worst2,
            1e-6,
        ));

        // integrated forms
        let flux = geo.boundary_integral(|b| gf.g(b.rho).unwrap() * b.support)?;
        rows.push(CheckRow::equality(
            &id,
            "flux of g field",
            "int g <dr,nu> dmu = |Omega|",
            flux,
            geo.volume,
            geo.volume,
            tol.quadrature,
        ));
        let int_g = geo.boundary_integral(|b| gf.g(b.rho).unwrap())?;
        rows.push(CheckRow::lower_bound(
            &id,
            "boundary g bound",
            "int g dmu >= |Omega|",
            int_g,
            geo.volume,
            tol.quadrature,
        ));
        let int_g2 = geo.boundary_integral(|b| gf.g(b.rho).unwrap().powi(2))?;
        let r_vol = geo.volume_radius;
        rows.push(CheckRow::lower_bound(
            &id,
            "boundary g^2 bound",
            "int g^2 dmu >= g(R)|B(R)|",
            int_g2,
            gf.g(r_vol)? * dim.ball_volume(r_vol)?,
            tol.quadrature,
        ));
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// mass transplantation
// ---------------------------------------------------------------------------

/// Equality on balls and strict inequality on non-ball domains for a
/// constant, an increasing and a decreasing radial integrand.
pub fn transplant_suite(config: &VerifyConfig) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    let strict = 1e-9;
    for (di, &n) in config.dims.iter().enumerate() {
        let dim = Dimension::new(n)?;
        let gf = GFunction::new(dim);
        // exact equality on a centered ball
        let ball = make_profile(dim, &ShapeSpec::Sphere { radius: 1.0 }, config.profile_nodes)?;
        let geo = DomainGeometry::new(&ball)?;
        for (name, anchor, f, dir) in integrands(&gf) {
            let rep = mass_transplant_check(&geo, f.as_ref(), dir)?;
            rows.push(CheckRow::equality(
                format!("n{n}-ball"),
                format!("transplant equality: {name}"),
                anchor,
                rep.domain_integral,
                rep.ball_integral,
                rep.ball_integral,
                strict,
            ));
        }
        // strictness on seeded non-ball domains
        for k in 0..config.transplant_cases {
            let mut rng = case_rng(config.seed, 0x7a00 + (di * 100 + k) as u64);
            let (profile, _) = random_profile(dim, &mut rng, config.profile_nodes)?;
            let geo = DomainGeometry::new(&profile)?;
            let id = format!("n{n}-tr{k:02}");
            for (name, anchor, f, dir) in integrands(&gf) {
                let rep = mass_transplant_check(&geo, f.as_ref(), dir)?;
                let norm = rep.slack / rep.ball_integral.abs();
                if name == "constant" {
                    rows.push(CheckRow::equality(
                        &id,
                        "transplant equality: constant",
                        anchor,
                        rep.domain_integral,
                        rep.ball_integral,
                        rep.ball_integral,
                        strict,
                    ));
                } else {
                    // strict inequality on non-ball domains
                    rows.push(CheckRow::violation(
                        &id,
                        format!("transplant strict: {name}"),
                        anchor,
                        strict - norm,
                        0.0,
                    ));
                }
            }
        }
    }
    Ok(rows)
}

type Integrand<'a> = Box<dyn Fn(f64) -> f64 + 'a>;

fn integrands(gf: &GFunction) -> Vec<(&'static str, &'static str, Integrand<'_>, Monotonicity)> {
    vec![
        (
            "constant",
            "equal volumes",
            Box::new(|_| 1.0) as Integrand,
            Monotonicity::Increasing,
        ),
        (
            "a-ratio",
            "int l'g/l over domain >= ball",
            Box::new(move |r| gf.a_ratio(r).unwrap()),
            Monotonicity::Increasing,
        ),
        (
            "energy combination",
            "int decreasing combination over domain <= ball",
            Box::new(move |r| gf.decreasing_integrand(r).unwrap()),
            Monotonicity::Decreasing,
        ),
    ]
}

// ---------------------------------------------------------------------------
// eigenvalue comparisons
// ---------------------------------------------------------------------------

/// Shared per-case state for the eigenvalue checks.
pub struct CaseContext {
    pub id: String,
    pub dim: Dimension,
    pub gf: GFunction,
    /// recentered with weight g
    pub profile: RadialProfile,
    pub geometry: DomainGeometry,
    pub spectrum: SteklovSpectrum,
    pub htable: std::sync::Arc<HTable>,
    pub fem: SolverConfig,
    pub tol: Tolerances,
}

impl CaseContext {
    /// Recenter, solve sectors {0, 1}, and cache the shared quantities.
    pub fn prepare(
        id: String,
        profile: &RadialProfile,
        fem: SolverConfig,
        tol: Tolerances,
        eigen_count: usize,
    ) -> Result<Self> {
        let dim = profile.dim();
        let gf = GFunction::new(dim);
        let (recentered, _) = recenter(profile, |r| gf.g(r).unwrap())?;
        let geometry = DomainGeometry::new(&recentered)?;
        geometry.require_mean_convex()?;
        let spectrum = steklov::solve(&recentered, &[0, 1], eigen_count, &fem)?;
        let htable = gf.h_table();
        Ok(Self {
            id,
            dim,
            gf,
            profile: recentered,
            geometry,
            spectrum,
            htable,
            fem,
            tol,
        })
    }

    fn sigma1(&self) -> f64 {
        self.spectrum.sigma1()
    }

    /// sigma_1 of the equal-boundary-area ball.
    fn sigma1_equal_area_ball(&self) -> Result<f64> {
        let r_star = self.dim.radius_from_area(self.geometry.boundary_area)?;
        self.gf.sigma1_ball(r_star)
    }
}

/// sigma_1(Omega) <= sigma_1 of the equal-area ball.
pub fn weinstock_check(ctx: &CaseContext, cross_check_l2: bool) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    rows.push(CheckRow::upper_bound(
        &ctx.id,
        "eigenvalue vs equal-area ball",
        "sigma_1(Omega) <= sigma_1(Omega*)",
        ctx.sigma1(),
        ctx.sigma1_equal_area_ball()?,
        ctx.tol.fem_relative,
    ));
    if cross_check_l2 {
        let l2 = steklov::solve(&ctx.profile, &[2], 1, &ctx.fem)?;
        rows.push(CheckRow::upper_bound(
            &ctx.id,
            "sector truncation cross-check",
            "min sector-2 eigenvalue above sigma_1",
            ctx.sigma1(),
            l2.sigma1(),
            ctx.tol.fem_relative,
        ));
    }
    Ok(rows)
}

/// The intermediate inequalities behind the eigenvalue comparison, one row
/// per displayed estimate; quadrature rows and FEM rows carry their own
/// tolerances.
pub fn lemma_chain_check(ctx: &CaseContext) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    let gf = &ctx.gf;
    let geo = &ctx.geometry;
    let dim = ctx.dim;
    let n = dim.n();
    let nf = dim.nf();
    let id = &ctx.id;
    let tol_q = ctx.tol.quadrature.max(1e-6);
    let tol_fem = ctx.tol.fem_relative;

    let r_vol = geo.volume_radius;
    let ball_r = dim.ball(r_vol)?;
    let gp_r = gf.g_prime(r_vol)?;
    let g_r = gf.g(r_vol)?;
    let sigma_ball = gf.sigma1_ball(r_vol)?;
    let sigma = ctx.sigma1();

    // energy integrand differs between the n = 4 and n >= 5 paths
    let energy = geo.bulk_integral(|r| {
        let gp = gf.g_prime(r).unwrap();
        let gol = gf.g_over_lambda(r).unwrap();
        if n == 4 {
            gp * gp + 3.0 * gol * gol
        } else {
            gp * gp + (nf - 1.0) * gol * gol
        }
    })?;
    let int_a = geo.bulk_integral(|r| gf.a_ratio(r).unwrap())?;
    let int_a_ball = dim.omega()
        * crate::numerics::quad::integrate(
            |r| gf.a_ratio(r).unwrap() * r.sinh().powi(n as i32 - 1),
            0.0,
            r_vol,
            1e-13,
            1e-12,
        )?;
    let int_g2 = geo.boundary_integral(|b| gf.g(b.rho).unwrap().powi(2))?;
    let h_val = ctx.htable.h(int_a)?;

    // transplantation of the decreasing combination, rearranged:
    // c_n (int_a - int_a_ball) <= g'(R)|B(R)| - energy
    let coeff = if n == 4 { 1.0 } else { 2.0 * (nf - 1.0) / nf };
    rows.push(CheckRow::upper_bound(
        id,
        "transplanted energy bound",
        "c_n (int_Omega - int_B) l'g/l <= g'(R)|B(R)| - int_Omega energy",
        coeff * (int_a - int_a_ball) + energy,
        gp_r * ball_r.volume,
        tol_q,
    ));

    // h-curvature estimate
    if n == 4 {
        rows.push(CheckRow::lower_bound(
            id,
            "h power estimate",
            "h(int l'g/l)^{4/3} >= energy/(g'(R)|B(R)||S(R)|^{4/3})",
            h_val.powf(4.0 / 3.0),
            energy / (gp_r * ball_r.volume * ball_r.area.powf(4.0 / 3.0)),
            tol_q,
        ));
    } else {
        rows.push(CheckRow::lower_bound(
            id,
            "h power estimate",
            "h(int l'g/l)^2 >= energy/(g'(R)|B(R)||S(R)|^2)",
            h_val * h_val,
            energy / (gp_r * ball_r.volume * ball_r.area * ball_r.area),
            tol_q,
        ));
    }

    // boundary g^2 lower bounds feeding the chain
    rows.push(CheckRow::lower_bound(
        id,
        "boundary g^2 vs ball",
        "int g^2 dmu >= g(R)|B(R)|",
        int_g2,
        g_r * ball_r.volume,
        tol_q,
    ));
    let flow_bound = imcf_inequality(geo, gf, &ctx.htable)?;
    rows.push(CheckRow::lower_bound(
        id,
        "boundary g^2 vs flow bound",
        "int g^2 dmu >= |Sigma||Omega|^2 h(int l'g/l)^2",
        flow_bound.lhs,
        flow_bound.rhs,
        tol_q,
    ));

    // eigenvalue rows (FEM tolerance)
    let tf_bound = steklov::test_function_bound(geo, gf)?;
    rows.push(CheckRow::upper_bound(
        id,
        "test-function bound",
        "sigma_1 int g^2 <= int (g')^2+(n-1)g^2/l^2",
        sigma,
        tf_bound,
        tol_fem,
    ));
    if n == 4 {
        rows.push(CheckRow::upper_bound(
            id,
            "flow bound on scaled eigenvalue",
            "|Sigma|^{2/3} sigma_1 <= energy/(g(R)^{1/3}|B(R)|^{5/3}h^{4/3})",
            geo.boundary_area.powf(2.0 / 3.0) * sigma,
            energy / (g_r.powf(1.0 / 3.0) * ball_r.volume.powf(5.0 / 3.0) * h_val.powf(4.0 / 3.0)),
            tol_fem,
        ));
        rows.push(CheckRow::upper_bound(
            id,
            "scaled comparison with equal-volume ball",
            "|Sigma|^{2/3} sigma_1(Omega) <= |S(R)|^{2/3} sigma_1(B(R))",
            geo.boundary_area.powf(2.0 / 3.0) * sigma,
            ball_r.area.powf(2.0 / 3.0) * sigma_ball,
            tol_fem,
        ));
    } else {
        rows.push(CheckRow::upper_bound(
            id,
            "flow bound on scaled eigenvalue",
            "|Sigma| sigma_1 <= energy/(|Omega|^2 h^2)",
            geo.boundary_area * sigma,
            energy / (geo.volume * geo.volume * h_val * h_val),
            tol_fem,
        ));
        rows.push(CheckRow::upper_bound(
            id,
            "scaled comparison with equal-volume ball",
            "|Sigma| sigma_1(Omega) <= |S(R)| sigma_1(B(R))",
            geo.boundary_area * sigma,
            ball_r.area * sigma_ball,
            tol_fem,
        ));
    }
    Ok(rows)
}

/// Harmonic-mean comparison through the first n-1 eigenvalues.
pub fn corollary_check(ctx: &CaseContext) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    let n = ctx.dim.n();
    let nf = ctx.dim.nf();
    let recip = ctx.spectrum.reciprocal_sum(n - 1)?;
    let sigma_star = ctx.sigma1_equal_area_ball()?;
    rows.push(CheckRow::lower_bound(
        &ctx.id,
        "reciprocal eigenvalue sum",
        "sum 1/sigma_i(Omega) >= (n-1)/sigma_1(Omega*)",
        recip,
        (nf - 1.0) / sigma_star,
        ctx.tol.fem_relative,
    ));
    // the variational mean bound behind it
    let energy = ctx
        .geometry
        .bulk_integral(|r| ctx.gf.energy_integrand(r).unwrap())?;
    let int_g2 = ctx
        .geometry
        .boundary_integral(|b| ctx.gf.g(b.rho).unwrap().powi(2))?;
    rows.push(CheckRow::upper_bound(
        &ctx.id,
        "mean test-function bound",
        "int g^2 <= (1/(n-1)) sum 1/sigma_i int energy",
        int_g2,
        recip / (nf - 1.0) * energy,
        ctx.tol.fem_relative,
    ));
    Ok(rows)
}

/// Random-family driver for the three eigenvalue checks.
pub fn eigenvalue_suite(config: &VerifyConfig) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    let fem = config.fem();
    for &n in &config.dims {
        let dim = Dimension::new(n)?;
        // ball case: the ratio must be 1 within the FEM budget
        let ball = make_profile(dim, &ShapeSpec::Sphere { radius: 1.0 }, config.profile_nodes)?;
        let ctx = CaseContext::prepare(
            format!("n{n}-ball"),
            &ball,
            fem,
            config.tolerances,
            3,
        )?;
        rows.push(CheckRow::equality(
            &ctx.id,
            "ball eigenvalue ratio",
            "sigma_1(B)/sigma_1(B*) = 1",
            ctx.sigma1(),
            ctx.sigma1_equal_area_ball()?,
            ctx.sigma1_equal_area_ball()?,
            config.tolerances.fem_relative,
        ));
        if config.checks.lemma_chain {
            rows.extend(lemma_chain_check(&ctx)?);
        }
        if config.checks.corollary {
            rows.extend(corollary_check(&ctx)?);
        }
        // seeded family
        for k in 0..config.weinstock_cases {
            let mut rng = case_rng(config.seed, 0x5100 + (n * 1000 + k) as u64);
            let (profile, _) = random_profile(dim, &mut rng, config.profile_nodes)?;
            let id = format!("n{n}-w{k:02}");
            let ctx = match CaseContext::prepare(id.clone(), &profile, fem, config.tolerances, 3)
            {
                Ok(ctx) => ctx,
                Err(e) => {
                    rows.push(CheckRow::violation(
                        &id,
                        "case preparation",
                        format!("internal: {e}"),
                        1.0,
                        0.0,
                    ));
                    continue;
                }
            };
            if config.checks.weinstock {
                rows.extend(weinstock_check(&ctx, k % 10 == 0)?);
            }
            if config.checks.lemma_chain {
                rows.extend(lemma_chain_check(&ctx)?);
            }
            if config.checks.corollary && k < config.corollary_cases {
                rows.extend(corollary_check(&ctx)?);
            }
        }
    }
    Ok(rows)
}

/// The 3-dimensional comparison under the circumscribed-radius gate.
pub fn n3_suite(config: &VerifyConfig) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    let dim = Dimension::new(3)?;
    let gf = GFunction::new(dim);
    let r0 = n3_threshold(&gf)?;
    let fem = config.fem();
    for k in 0..config.n3_cases {
        let mut rng = case_rng(config.seed, 0x3000 + k as u64);
        let (profile, _) = random_profile_n3(&mut rng, config.profile_nodes, r0)?;
        let id = format!("n3-g{k:02}");
        let (rc, _) = circumscribed_radius(&profile);
        rows.push(CheckRow::upper_bound(
            &id,
            "circumscribed radius gate",
            "circumradius <= R0",
            rc,
            r0,
            0.0,
        ));
        let ctx = CaseContext::prepare(id.clone(), &profile, fem, config.tolerances, 1)?;
        rows.extend(weinstock_check(&ctx, k % 10 == 0)?);
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// flow suite
// ---------------------------------------------------------------------------

/// High-precision radius ODE oracle for the spherical flow:
/// r' = lambda / ((n-1) lambda').
pub fn sphere_flow_radius(n: usize, r0: f64, t_end: f64) -> f64 {
    let nf = n as f64;
    let f = |r: f64| r.sinh() / ((nf - 1.0) * r.cosh());
    let dt = 1e-5;
    let steps = (t_end / dt).round() as usize;
    let mut r = r0;
    for _ in 0..steps {
        let k1 = f(r);
        let k2 = f(r + 0.5 * dt * k1);
        let k3 = f(r + 0.5 * dt * k2);
        let k4 = f(r + dt * k3);
        r += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    r
}

/// Sphere consistency, exponential area law, and the monotone quantity on a
/// seeded family of perturbed spheres.
pub fn flow_suite(config: &VerifyConfig) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    let tol = &config.tolerances;

    // sphere flow vs the radius ODE over t in [0, 2]
    {
        let dim = Dimension::new(4)?;
        let p = make_profile(dim, &ShapeSpec::Sphere { radius: 1.0 }, config.profile_nodes)?;
        let mut integ = FlowIntegrator::new(
            dim,
            FlowConfig {
                t_end: 2.0,
                ..FlowConfig::default()
            },
        );
        let trace = integ.run(p)?;
        let mut sup_err = 0.0f64;
        let mut area_err = 0.0f64;
        let mut a_dev = 0.0f64;
        let a0 = trace.samples[0].area;
        for s in &trace.samples {
            let r_ode = sphere_flow_radius(4, 1.0, s.t);
            sup_err = sup_err.max((dim.radius_from_volume(s.volume)? - r_ode).abs());
            area_err = area_err.max((s.area / (a0 * s.t.exp()) - 1.0).abs());
            a_dev = a_dev.max((s.a_quantity - 1.0).abs());
        }
        rows.push(CheckRow::violation(
            "n4-sphere",
            "flow matches radius ODE",
            "spherical IMCF reduces to r' = l/((n-1)l')",
            sup_err,
            1e-6,
        ));
        rows.push(CheckRow::violation(
            "n4-sphere",
            "exponential area law",
            "|Sigma_t| = |Sigma_0| e^t",
            area_err,
            1e-5,
        ));
        rows.push(CheckRow::violation(
            "n4-sphere",
            "monotone quantity constant on spheres",
            "A(t) = 1 on centered spheres",
            a_dev,
            1e-8,
        ));
    }

    // perturbed spheres: A(t) decreasing to >= 1, curvature pinching
    for &n in config.dims.iter().filter(|&&n| n >= 3) {
        let dim = Dimension::new(n)?;
        for k in 0..config.flow_cases {
            let mut rng = case_rng(config.seed, 0xf100 + (n * 100 + k) as u64);
            // flows need moderate shapes: reuse the family but damp the modes
            let (profile, _) = random_flow_profile(dim, &mut rng, config.profile_nodes)?;
            let id = format!("n{n}-f{k:02}");
            let mut integ = FlowIntegrator::new(dim, FlowConfig::default());
            let trace = integ.run(profile)?;
            rows.push(CheckRow::violation(
                &id,
                "monotone quantity non-increasing",
                "A'(t) <= 0",
                trace.max_a_increase_per_step().max(0.0),
                tol.flow_step,
            ));
            let last = trace.final_sample();
            rows.push(CheckRow::lower_bound(
                &id,
                "limit of the monotone quantity",
                "A(t) >= 1 along the flow",
                last.a_quantity,
                1.0,
                1e-3,
            ));
            rows.push(CheckRow::violation(
                &id,
                "area law at final time",
                "|Sigma_t| = |Sigma_0| e^t",
                (last.area / (trace.samples[0].area * last.t.exp()) - 1.0).abs(),
                1e-4,
            ));
            rows.push(CheckRow::violation(
                &id,
                "curvature pinching",
                "max |kappa_i - 1| decays",
                (last.max_kappa_deviation - trace.samples[0].max_kappa_deviation).max(0.0),
                0.0,
            ));
            rows.push(CheckRow::violation(
                &id,
                "support improves",
                "min <dr,nu> increases along the flow",
                (trace.samples[0].min_support - last.min_support).max(0.0),
                0.0,
            ));
        }
    }
    Ok(rows)
}

/// Flow initial data: same family as `random_profile` with gentler modes,
/// so explicit stepping stays comfortably inside its stability region.
pub fn random_flow_profile(
    dim: Dimension,
    rng: &mut rand_chacha::ChaCha8Rng,
    nodes: usize,
) -> Result<(RadialProfile, ShapeSpec)> {
    for _ in 0..200 {
        let r0 = rng.gen_range(0.5..1.8);
        let modes: Vec<(usize, f64)> = (2..=4)
            .map(|k| (k, rng.gen_range(-0.1..0.1)))
            .collect();
        let shape = ShapeSpec::PerturbedSphere { radius: r0, modes };
        let Ok(profile) = make_profile(dim, &shape, nodes) else {
            continue;
        };
        let Ok(geometry) = DomainGeometry::new(&profile) else {
            continue;
        };
        if geometry.require_mean_convex().is_ok() {
            return Ok((profile, shape));
        }
    }
    Err(Error::ShapeSpec(
        "rejection sampling failed for flow initial data".into(),
    ))
}
