//! A numerical toolkit for Steklov eigenvalues of star-shaped domains in
//! hyperbolic space.
//!
//! The crate provides, for the warped-product model of H^n:
//!
//! - [`hyperbolic`]: geodesic-ball volume/area functions and their inverses;
//! - [`gfun`]: the volume–area ratio g(r), its derivatives and monotone
//!   combinations, the ball Steklov eigenvalue g'/g, and the auxiliary
//!   function h;
//! - [`domain`]: axisymmetric star-shaped domains as radial graphs, with
//!   quadrature, curvature, recentering and mass-transplantation checks;
//! - [`steklov`]: a sector-decomposed weighted finite-element Steklov
//!   eigensolver with a Dirichlet-to-Neumann Schur-complement reduction;
//! - [`flow`]: an inverse-mean-curvature-flow integrator tracking the
//!   monotone quantity A(t);
//! - [`harness`]: seeded shape families, inequality verification suites and
//!   CSV/JSON reporting.
//!
//! Each major capability has a runnable demo under `examples/`; the `hypstek`
//! binary exposes the verification suites on the command line.

pub mod domain;
pub mod error;
pub mod flow;
pub mod gfun;
pub mod harness;
pub mod hyperbolic;
pub mod numerics;
pub mod steklov;

pub use error::{Error, Result};
