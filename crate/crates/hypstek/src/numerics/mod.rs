//! Shared numerical kernels: quadrature, root finding, interpolation,
//! banded linear algebra and cosine-series collocation.

pub mod banded;
pub mod cosine;
pub mod pchip;
pub mod quad;
pub mod roots;

pub mod series;
