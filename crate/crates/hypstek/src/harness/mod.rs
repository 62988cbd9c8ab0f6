//! Configuration-driven verification harness: seeded shape families, the
//! inequality suites, and report emission.

pub mod checks;
pub mod report;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::domain::{make_profile, DomainGeometry, RadialProfile, ShapeSpec};
use crate::error::{Error, Result};
use crate::hyperbolic::Dimension;

pub use report::{CheckRow, Report};

/// Verification tolerances, aligned with the error budgets of the methods
/// involved: analytic identities, pure quadrature, FEM-involved comparisons
/// (relative), and the per-step allowance of the flow monotonicity.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub analytic: f64,
    pub quadrature: f64,
    pub fem_relative: f64,
    pub flow_step: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            analytic: 1e-8,
            quadrature: 1e-7,
            fem_relative: 1e-3,
            flow_step: 1e-7,
        }
    }
}

/// Which checks a verification run performs.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CheckSet {
    pub gfun: bool,
    pub weinstock: bool,
    pub lemma_chain: bool,
    pub corollary: bool,
    pub flow: bool,
    pub transplant: bool,
    pub divergence: bool,
    pub n3_gate: bool,
}

impl Default for CheckSet {
    fn default() -> Self {
        Self {
            gfun: true,
            weinstock: true,
            lemma_chain: true,
            corollary: true,
            flow: true,
            transplant: true,
            divergence: true,
            n3_gate: true,
        }
    }
}

/// Suite sizes and discretization knobs.
#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    pub seed: u64,
    /// dimensions for the FEM-based suites
    pub dims: Vec<usize>,
    pub weinstock_cases: usize,
    pub corollary_cases: usize,
    pub flow_cases: usize,
    pub transplant_cases: usize,
    pub divergence_domains: usize,
    pub n3_cases: usize,
    pub profile_nodes: usize,
    pub fem_mesh: usize,
    pub fem_order: usize,
    pub checks: CheckSet,
    pub tolerances: Tolerances,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            dims: vec![4, 5],
            weinstock_cases: 50,
            corollary_cases: 20,
            flow_cases: 10,
            transplant_cases: 10,
            divergence_domains: 10,
            n3_cases: 20,
            profile_nodes: 48,
            fem_mesh: 48,
            fem_order: 4,
            checks: CheckSet::default(),
            tolerances: Tolerances::default(),
        }
    }
}

impl VerifyConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    /// A reduced configuration for quick smoke runs.
    pub fn quick() -> Self {
        Self {
            weinstock_cases: 3,
            corollary_cases: 2,
            flow_cases: 2,
            transplant_cases: 3,
            divergence_domains: 3,
            n3_cases: 3,
            fem_mesh: 24,
            ..Self::default()
        }
    }

    pub fn fem(&self) -> crate::steklov::SolverConfig {
        crate::steklov::SolverConfig {
            mesh_n: self.fem_mesh,
            order: self.fem_order,
            ..crate::steklov::SolverConfig::default()
        }
    }
}

/// One labeled verification case.
#[derive(Debug, Clone)]
pub struct VerificationCase {
    pub id: String,
    pub dim: Dimension,
    pub shape: ShapeSpec,
}

/// Deterministic per-case RNG: the base seed and the case index pick a
/// ChaCha stream, so each case is reproducible in isolation.
pub fn case_rng(seed: u64, case_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(case_index);
    rng
}

/// Random mean-convex star-shaped profile:
/// rho = r0 (1 + sum_{k=2}^{5} eps_k P_k(cos theta)), r0 in [0.3, 3],
/// |eps_k| <= 0.15, rejection-sampled until valid and mean-convex.
pub fn random_profile(
    dim: Dimension,
    rng: &mut ChaCha8Rng,
    nodes: usize,
) -> Result<(RadialProfile, ShapeSpec)> {
    for _ in 0..200 {
        let r0 = rng.gen_range(0.3..3.0);
        let modes: Vec<(usize, f64)> = (2..=5)
            .map(|k| (k, rng.gen_range(-0.15..0.15)))
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
        "rejection sampling failed to produce a mean-convex profile".into(),
    ))
}

/// Random profile gated by the 3-dimensional circumscribed-radius threshold.
pub fn random_profile_n3(
    rng: &mut ChaCha8Rng,
    nodes: usize,
    r0_threshold: f64,
) -> Result<(RadialProfile, ShapeSpec)> {
    let dim = Dimension::new(3)?;
    for _ in 0..500 {
        let r0 = rng.gen_range(0.15..0.55 * r0_threshold);
        let modes: Vec<(usize, f64)> = (2..=5)
            .map(|k| (k, rng.gen_range(-0.08..0.08)))
            .collect();
        let shape = ShapeSpec::PerturbedSphere { radius: r0, modes };
        let Ok(profile) = make_profile(dim, &shape, nodes) else {
            continue;
        };
        let Ok(geometry) = DomainGeometry::new(&profile) else {
            continue;
        };
        if geometry.require_mean_convex().is_err() {
            continue;
        }
        let (rc, _) = crate::domain::circumscribed_radius(&profile);
        if rc <= r0_threshold {
            return Ok((profile, shape));
        }
    }
    Err(Error::ShapeSpec(
        "rejection sampling failed to produce a gated n=3 profile".into(),
    ))
}

/// Run every enabled suite and merge the reports.
pub fn verify(config: &VerifyConfig) -> Result<Report> {
    let mut report = Report::new("verify", config.seed);
    if config.checks.gfun {
        report.extend(checks::gfun_suite(&config.tolerances)?);
    }
    if config.checks.divergence {
        report.extend(checks::divergence_suite(config)?);
    }
    if config.checks.transplant {
        report.extend(checks::transplant_suite(config)?);
    }
    if config.checks.weinstock || config.checks.lemma_chain || config.checks.corollary {
        report.extend(checks::eigenvalue_suite(config)?);
    }
    if config.checks.n3_gate {
        report.extend(checks::n3_suite(config)?);
    }
    if config.checks.flow {
        report.extend(checks::flow_suite(config)?);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_roundtrip() {
        let text = r#"
seed = 7
dims = [4]
weinstock_cases = 2

[checks]
flow = false

[tolerances]
fem_relative = 2e-3
"#;
        let cfg = VerifyConfig::from_toml(text).unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.dims, vec![4]);
        assert_eq!(cfg.weinstock_cases, 2);
        assert!(!cfg.checks.flow);
        assert!(cfg.checks.gfun);
        assert_eq!(cfg.tolerances.fem_relative, 2e-3);
        // defaults untouched
        assert_eq!(cfg.corollary_cases, 20);
        assert!(VerifyConfig::from_toml("nonsense = 3").is_err());
    }

    #[test]
    fn seeded_family_is_deterministic() {
        let dim = Dimension::new(4).unwrap();
        let (p1, s1) = random_profile(dim, &mut case_rng(9, 3), 48).unwrap();
        let (p2, s2) = random_profile(dim, &mut case_rng(9, 3), 48).unwrap();
        assert_eq!(s1, s2);
        assert_eq!(p1.node_values(), p2.node_values());
        let (_, s3) = random_profile(dim, &mut case_rng(9, 4), 48).unwrap();
        assert_ne!(s1, s3);
    }

    #[test]
    fn family_profiles_are_mean_convex() {
        let dim = Dimension::new(5).unwrap();
        for i in 0..5 {
            let (p, _) = random_profile(dim, &mut case_rng(1, i), 48).unwrap();
            let g = DomainGeometry::new(&p).unwrap();
            assert!(g.min_mean_curvature > 1e-8);
        }
    }
}
