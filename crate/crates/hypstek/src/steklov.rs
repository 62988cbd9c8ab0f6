//! Steklov eigenvalues of axisymmetric star-shaped domains.
//!
//! Eigenfunctions split by spherical-harmonic degree l on the symmetry
//! sphere factor S^{n-2}; each sector reduces to a weighted elliptic problem
//! on the meridian strip (s, theta) in [0,1] x [0,pi] with r = s rho(theta):
//!
//!   stiffness:  int (u_r^2 + u_theta^2/lambda^2
//!                    + l(l+n-3) u^2/(lambda^2 sin^2 theta))
//!               lambda^{n-1} sin^{n-2}(theta) rho ds dtheta,
//!   mass:       boundary integral of u^2 at s = 1.
//!
//! Discretization: continuous nodal elements on a tensor mesh with Gauss
//! quadrature for the metric weights (the degenerate lines s = 0 and
//! sin theta = 0 are never sampled; the center line is collapsed to a single
//! degree of freedom in sector 0 and eliminated in sectors l >= 1, as are
//! the pole lines). The generalized problem with boundary-only mass is
//! reduced to the boundary through a Schur complement of the stiffness
//! matrix (a discrete Dirichlet-to-Neumann map); the small dense boundary
//! pencil is solved by a symmetric eigensolver after a Cholesky congruence,
//! with constants deflated in sector 0.

use std::io::Write;

use nalgebra::{DMatrix, DVector};

use crate::domain::{DomainGeometry, RadialProfile};
use crate::error::{Error, Result};
use crate::gfun::GFunction;
use crate::numerics::banded::BandedSpd;
use crate::numerics::quad;

/// Finite-element discretization parameters.
#[derive(Debug, Clone, Copy)]
pub struct SolverConfig {
    /// nominal 1-D resolution; the mesh has `mesh_n / order` elements per
    /// direction
    pub mesh_n: usize,
    /// polynomial order of the nodal elements
    pub order: usize,
    /// Gauss points per direction per element
    pub quad_points: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            mesh_n: 48,
            order: 4,
            quad_points: 7,
        }
    }
}

impl SolverConfig {
    pub fn with_mesh(mesh_n: usize) -> Self {
        Self {
            mesh_n,
            ..Self::default()
        }
    }

    fn elements(&self) -> usize {
        self.mesh_n.div_ceil(self.order)
    }
}

/// Eigenvalues and boundary traces of one angular sector.
#[derive(Debug, Clone)]
pub struct SectorSpectrum {
    pub sector: usize,
    /// l(l + n - 3), the angular eigenvalue on S^{n-2}
    pub angular_eigenvalue: f64,
    /// multiplicity of each eigenvalue in the full spectrum
    pub multiplicity: usize,
    /// ascending eigenvalues
    pub eigenvalues: Vec<f64>,
    /// theta coordinates of the boundary nodes
    pub boundary_thetas: Vec<f64>,
    /// boundary-mass-orthonormal eigenfunction traces, one column per
    /// eigenvalue (pole nodes carry zeros in sectors l >= 1)
    pub traces: DMatrix<f64>,
}

/// Sector-labeled Steklov spectrum of one domain.
#[derive(Debug, Clone)]
pub struct SteklovSpectrum {
    n: usize,
    pub sectors: Vec<SectorSpectrum>,
}

/// One entry of the combined eigenvalue list.
#[derive(Debug, Clone, Copy)]
pub struct CombinedEigenvalue {
    pub value: f64,
    pub sector: usize,
    pub multiplicity: usize,
}

impl SteklovSpectrum {
    pub fn dimension(&self) -> usize {
        self.n
    }

    /// All eigenvalues across sectors, ascending, with multiplicities.
    pub fn combined(&self) -> Vec<CombinedEigenvalue> {
        let mut all: Vec<CombinedEigenvalue> = self
            .sectors
            .iter()
            .flat_map(|s| {
                s.eigenvalues.iter().map(|&v| CombinedEigenvalue {
                    value: v,
                    sector: s.sector,
                    multiplicity: s.multiplicity,
                })
            })
            .collect();
        all.sort_by(|a, b| a.value.partial_cmp(&b.value).unwrap());
        all
    }

    /// Smallest eigenvalue over the computed sectors.
    pub fn sigma1(&self) -> f64 {
        self.combined().first().map(|c| c.value).unwrap_or(f64::NAN)
    }

    /// sum_{i=1}^{k} 1/sigma_i counting multiplicities.
    pub fn reciprocal_sum(&self, k: usize) -> Result<f64> {
        let mut left = k;
        let mut acc = 0.0;
        for c in self.combined() {
            let take = left.min(c.multiplicity);
            acc += take as f64 / c.value;
            left -= take;
            if left == 0 {
                return Ok(acc);
            }
        }
        Err(Error::SpectrumTooShort {
            needed: k,
            have: k - left,
        })
    }

    /// CSV rows (sector, index, eigenvalue, multiplicity).
    pub fn write_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "sector,index,eigenvalue,multiplicity")?;
        for s in &self.sectors {
            for (i, v) in s.eigenvalues.iter().enumerate() {
                writeln!(w, "{},{},{:.12e},{}", s.sector, i, v, s.multiplicity)?;
            }
        }
        Ok(())
    }
}

/// Multiplicity of degree-l spherical harmonics on S^{n-2}:
/// (2l + m - 1) (l + m - 2)! / (l! (m - 1)!) for m = n - 2 >= 2, with the
/// degenerate factors S^0 and S^1 handled separately.
pub fn angular_multiplicity(n: usize, l: usize) -> usize {
    let m = n - 2;
    match (m, l) {
        (_, 0) => 1,
        (0, 1) => 1,
        (0, _) => 0,
        (1, _) => 2,
        _ => (2 * l + m - 1) * binomial(l + m - 2, m - 2) / (m - 1),
    }
}

fn binomial(n: usize, k: usize) -> usize {
    let k = k.min(n - k);
    let mut acc: usize = 1;
    for j in 1..=k {
        acc = acc * (n - k + j) / j;
    }
    acc
}

/// sigma_1 of the geodesic ball, exact: g'(r)/g(r).
pub fn sigma1_exact_ball(gf: &GFunction, r: f64) -> Result<f64> {
    gf.sigma1_ball(r)
}

/// The coordinate-test-function upper bound
/// int_Omega ((g')^2 + (n-1) g^2/lambda^2) dv / int_Sigma g^2 dmu,
/// sharp on centered balls; requires a profile recentered with weight g.
pub fn test_function_bound(geometry: &DomainGeometry, gf: &GFunction) -> Result<f64> {
    let num = geometry.bulk_integral(|r| gf.energy_integrand(r).unwrap())?;
    let den = geometry.boundary_integral(|b| {
        let g = gf.g(b.rho).unwrap();
        g * g
    })?;
    Ok(num / den)
}

/// Solve the requested sectors.
pub fn solve(
    profile: &RadialProfile,
    sectors: &[usize],
    count_per_sector: usize,
    config: &SolverConfig,
) -> Result<SteklovSpectrum> {
    let n = profile.dim().n();
    let mut out = Vec::with_capacity(sectors.len());
    for &l in sectors {
        if n == 2 && l > 1 {
            return Err(Error::DimensionMismatch {
                context: "angular sector l >= 2",
                required: "n >= 3",
                n,
            });
        }
        out.push(solve_sector(profile, l, count_per_sector, config)?);
    }
    Ok(SteklovSpectrum { n, sectors: out })
}

/// First non-zero eigenvalue from sectors {0, 1} (higher sectors dominate;
/// the harness cross-checks l = 2 periodically).
pub fn sigma1_fem(profile: &RadialProfile, config: &SolverConfig) -> Result<f64> {
    Ok(solve(profile, &[0, 1], 1, config)?.sigma1())
}

// ---------------------------------------------------------------------------
// discretization internals
// ---------------------------------------------------------------------------

/// 1-D nodal reference element: Gauss–Lobatto nodes, basis values and
/// derivatives at the Gauss quadrature points.
struct Reference1d {
    p: usize,
    qp: Vec<f64>,
    qw: Vec<f64>,
    /// val[q][i] = L_i(qp[q])
    val: Vec<Vec<f64>>,
    /// der[q][i] = L_i'(qp[q])
    der: Vec<Vec<f64>>,
    nodes: Vec<f64>,
}

impl Reference1d {
    fn new(p: usize, q: usize) -> Self {
        let nodes = quad::gauss_lobatto_nodes(p + 1);
        let (qp, qw) = quad::gauss_legendre(q);
        let mut val = vec![vec![0.0; p + 1]; q];
        let mut der = vec![vec![0.0; p + 1]; q];
        for (iq, &x) in qp.iter().enumerate() {
            for i in 0..=p {
                val[iq][i] = lagrange_value(&nodes, i, x);
                der[iq][i] = lagrange_derivative(&nodes, i, x);
            }
        }
        Self {
            p,
            qp,
            qw,
            val,
            der,
            nodes,
        }
    }
}

fn lagrange_value(nodes: &[f64], i: usize, x: f64) -> f64 {
    let mut v = 1.0;
    for (j, &xj) in nodes.iter().enumerate() {
        if j != i {
            v *= (x - xj) / (nodes[i] - xj);
        }
    }
    v
}

/// Derivative by the sum-of-products form, stable when x hits another node.
fn lagrange_derivative(nodes: &[f64], i: usize, x: f64) -> f64 {
    let mut acc = 0.0;
    for (k, &xk) in nodes.iter().enumerate() {
        if k == i {
            continue;
        }
        let mut term = 1.0 / (nodes[i] - xk);
        for (j, &xj) in nodes.iter().enumerate() {
            if j != i && j != k {
                term *= (x - xj) / (nodes[i] - xj);
            }
        }
        acc += term;
    }
    acc
}

/// Global degree-of-freedom layout for one sector class, ordered so that the
/// boundary nodes (s = 1) occupy the trailing block.
struct DofMap {
    n_s: usize,
    n_t: usize,
    collapse_center: bool,
    n_dof: usize,
    n_boundary: usize,
}

impl DofMap {
    fn new(n_s: usize, n_t: usize, l: usize) -> Self {
        if l == 0 {
            Self {
                n_s,
                n_t,
                collapse_center: true,
                n_dof: 1 + (n_s - 1) * n_t,
                n_boundary: n_t,
            }
        } else {
            Self {
                n_s,
                n_t,
                collapse_center: false,
                n_dof: (n_s - 1) * (n_t - 2),
                n_boundary: n_t - 2,
            }
        }
    }

    /// Global dof of grid node (i_s, i_t); None if eliminated.
    fn dof(&self, i_s: usize, i_t: usize) -> Option<usize> {
        if self.collapse_center {
            if i_s == 0 {
                Some(0)
            } else {
                Some(1 + (i_s - 1) * self.n_t + i_t)
            }
        } else if i_s == 0 || i_t == 0 || i_t == self.n_t - 1 {
            None
        } else {
            Some((i_s - 1) * (self.n_t - 2) + (i_t - 1))
        }
    }

    fn n_interior(&self) -> usize {
        self.n_dof - self.n_boundary
    }

    fn bandwidth(&self, p: usize) -> usize {
        let stride = if self.collapse_center {
            self.n_t
        } else {
            self.n_t - 2
        };
        p * stride + p
    }
}

fn solve_sector(
    profile: &RadialProfile,
    l: usize,
    count: usize,
    config: &SolverConfig,
) -> Result<SectorSpectrum> {
    let dim = profile.dim();
    let n = dim.n();
    let p = config.order;
    let ne = config.elements();
    let q = config.quad_points;
    let reference = Reference1d::new(p, q);
    let n_s = p * ne + 1;
    let n_t = p * ne + 1;
    let map = DofMap::new(n_s, n_t, l);
    let angular = l as f64 * (l as f64 + n as f64 - 3.0);
    let om = dim.omega_meridian();

    let bw = map.bandwidth(p).min(map.n_dof - 1);
    let mut stiffness = BandedSpd::zeros(map.n_dof, bw);

    let ds = 1.0 / ne as f64;
    let dt = std::f64::consts::PI / ne as f64;
    let nloc = (p + 1) * (p + 1);
    let mut local = vec![0.0; nloc * nloc];
    let mut basis = vec![(0.0, 0.0, 0.0); nloc];

    for es in 0..ne {
        let s0 = es as f64 * ds;
        for et in 0..ne {
            let t0 = et as f64 * dt;
            local.iter_mut().for_each(|v| *v = 0.0);
            for qa in 0..q {
                let s = s0 + 0.5 * ds * (1.0 + reference.qp[qa]);
                for qb in 0..q {
                    let theta = t0 + 0.5 * dt * (1.0 + reference.qp[qb]);
                    let (rho, rho_p, _) = profile.eval(theta);
                    let r = s * rho;
                    let lam = r.sinh();
                    let sin_t = theta.sin();
                    let weight = om
                        * lam.powi(n as i32 - 1)
                        * sin_t.powi(n as i32 - 2)
                        * rho
                        * (0.5 * ds * reference.qw[qa])
                        * (0.5 * dt * reference.qw[qb]);
                    // u_r = u_s / rho; the theta-derivative at fixed r picks
                    // up the moving-boundary term -(s rho'/rho) u_s
                    let alpha = 1.0 / rho;
                    let beta = -s * rho_p / rho;
                    let inv_l2 = 1.0 / (lam * lam);
                    let m11 = alpha * alpha + beta * beta * inv_l2;
                    let m12 = beta * inv_l2;
                    let m22 = inv_l2;
                    let m33 = if l == 0 {
                        0.0
                    } else {
                        angular * inv_l2 / (sin_t * sin_t)
                    };
                    for i in 0..=p {
                        for j in 0..=p {
                            let u = reference.val[qa][i] * reference.val[qb][j];
                            let us = reference.der[qa][i] * reference.val[qb][j] * 2.0 / ds;
                            let ut = reference.val[qa][i] * reference.der[qb][j] * 2.0 / dt;
                            basis[i * (p + 1) + j] = (u, us, ut);
                        }
                    }
                    for a in 0..nloc {
                        let (ua, usa, uta) = basis[a];
                        let row_s = weight * (m11 * usa + m12 * uta);
                        let row_t = weight * (m12 * usa + m22 * uta);
                        let row_u = weight * m33 * ua;
                        for b in a..nloc {
                            let (ub, usb, utb) = basis[b];
                            local[a * nloc + b] += row_s * usb + row_t * utb + row_u * ub;
                        }
                    }
                }
            }
            // scatter the upper local triangle into the banded global matrix
            for a in 0..nloc {
                let ga = map.dof(es * p + a / (p + 1), et * p + a % (p + 1));
                let Some(ga) = ga else { continue };
                for b in a..nloc {
                    let gb = map.dof(es * p + b / (p + 1), et * p + b % (p + 1));
                    let Some(gb) = gb else { continue };
                    let v = local[a * nloc + b];
                    if ga == gb && a != b {
                        // both local nodes collapsed onto the center dof
                        stiffness.add(ga, gb, 2.0 * v);
                    } else {
                        stiffness.add(ga, gb, v);
                    }
                }
            }
        }
    }

    // boundary mass on s = 1: 1-D assembly over the theta elements
    let e_exp = n as i32 - 2;
    let n_g = map.n_boundary;
    let mut mass = DMatrix::zeros(n_g, n_g);
    for et in 0..ne {
        let t0 = et as f64 * dt;
        for qb in 0..q {
            let theta = t0 + 0.5 * dt * (1.0 + reference.qp[qb]);
            let (rho, rho_p, _) = profile.eval(theta);
            let lam = rho.sinh();
            let weight = om
                * (rho_p * rho_p + lam * lam).sqrt()
                * lam.powi(e_exp)
                * theta.sin().powi(e_exp)
                * (0.5 * dt * reference.qw[qb]);
            for j in 0..=p {
                let Some(gj) = boundary_dof(&map, et * p + j) else {
                    continue;
                };
                for k in j..=p {
                    let Some(gk) = boundary_dof(&map, et * p + k) else {
                        continue;
                    };
                    let v = weight * reference.val[qb][j] * reference.val[qb][k];
                    mass[(gj, gk)] += v;
                    if gj != gk {
                        mass[(gk, gj)] += v;
                    }
                }
            }
        }
    }

    // Schur complement onto the boundary: S = A_GG - A_GI A_II^{-1} A_IG
    let n_i = map.n_interior();
    let mut a_ii = BandedSpd::zeros(n_i, bw.min(n_i.saturating_sub(1)));
    let mut a_ig = DMatrix::zeros(n_i, n_g);
    let mut a_gg = DMatrix::zeros(n_g, n_g);
    for j in 0..map.n_dof {
        for i in j..(j + bw + 1).min(map.n_dof) {
            let v = stiffness.get(i, j);
            if v == 0.0 {
                continue;
            }
            match (i.checked_sub(n_i), j.checked_sub(n_i)) {
                (None, None) => a_ii.add(i, j, v),
                (Some(ig), None) => a_ig[(j, ig)] += v,
                (Some(ig), Some(jg)) => {
                    a_gg[(ig, jg)] += v;
                    if ig != jg {
                        a_gg[(jg, ig)] += v;
                    }
                }
                (None, Some(_)) => unreachable!("lower-triangle iteration"),
            }
        }
    }
    let chol = a_ii.cholesky().map_err(|e| {
        Error::Eigensolver(format!("interior stiffness block not SPD (sector {l}): {e}"))
    })?;
    let mut x = a_ig.clone();
    let mut buf = vec![0.0; n_i];
    for mut col in x.column_iter_mut() {
        buf.copy_from_slice(col.as_slice());
        chol.solve_in_place(&mut buf);
        col.copy_from_slice(&buf);
    }
    let mut schur = a_gg - a_ig.transpose() * x;
    symmetrize(&mut schur);

    // congruence with the boundary mass: B = L^{-1} S L^{-T}
    let chol_m = nalgebra::Cholesky::new(mass)
        .ok_or_else(|| Error::Eigensolver("boundary mass not SPD".into()))?;
    let lower = chol_m.l();
    let upper = lower.transpose();
    let tmp = lower
        .solve_lower_triangular(&schur)
        .ok_or_else(|| Error::Eigensolver("singular boundary mass factor".into()))?;
    let mut b = lower
        .solve_lower_triangular(&tmp.transpose())
        .ok_or_else(|| Error::Eigensolver("singular boundary mass factor".into()))?;
    symmetrize(&mut b);

    let (eigenvalues, boundary_vectors) = if l == 0 {
        // deflate the constant: its reduced image is z = L^T 1
        let z = &upper * DVector::from_element(n_g, 1.0);
        let h = householder_to_e1(&z);
        let c = &h * b * &h;
        let sub = c.view((1, 1), (n_g - 1, n_g - 1)).into_owned();
        let eig = nalgebra::SymmetricEigen::new(sub);
        let order = sorted_indices(&eig.eigenvalues);
        let take = count.min(n_g - 1);
        let mut vals = Vec::with_capacity(take);
        let mut vecs = DMatrix::zeros(n_g, take);
        for (k, &idx) in order.iter().take(take).enumerate() {
            vals.push(eig.eigenvalues[idx]);
            let mut y = DVector::zeros(n_g);
            y.rows_mut(1, n_g - 1).copy_from(&eig.eigenvectors.column(idx));
            let y = &h * y;
            let u = upper
                .solve_upper_triangular(&y)
                .ok_or_else(|| Error::Eigensolver("back substitution failed".into()))?;
            vecs.set_column(k, &u);
        }
        (vals, vecs)
    } else {
        let eig = nalgebra::SymmetricEigen::new(b);
        let order = sorted_indices(&eig.eigenvalues);
        let take = count.min(n_g);
        let mut vals = Vec::with_capacity(take);
        let mut vecs = DMatrix::zeros(n_g, take);
        for (k, &idx) in order.iter().take(take).enumerate() {
            vals.push(eig.eigenvalues[idx]);
            let y = eig.eigenvectors.column(idx).into_owned();
            let u = upper
                .solve_upper_triangular(&y)
                .ok_or_else(|| Error::Eigensolver("back substitution failed".into()))?;
            vecs.set_column(k, &u);
        }
        (vals, vecs)
    };

    if let Some(&v) = eigenvalues.first() {
        if v < -1e-8 {
            return Err(Error::Eigensolver(format!(
                "negative Steklov eigenvalue {v:.3e} in sector {l}"
            )));
        }
    }

    // expand traces to the full boundary node set (zeros at eliminated poles)
    let thetas: Vec<f64> = (0..n_t)
        .map(|i| boundary_theta(&reference, ne, dt, i))
        .collect();
    let mut traces = DMatrix::zeros(n_t, eigenvalues.len());
    for k in 0..eigenvalues.len() {
        for i_t in 0..n_t {
            if let Some(g) = boundary_dof(&map, i_t) {
                traces[(i_t, k)] = boundary_vectors[(g, k)];
            }
        }
    }

    Ok(SectorSpectrum {
        sector: l,
        angular_eigenvalue: angular,
        multiplicity: angular_multiplicity(n, l),
        eigenvalues,
        boundary_thetas: thetas,
        traces,
    })
}

fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in 0..i {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}

fn sorted_indices(vals: &DVector<f64>) -> Vec<usize> {
    let mut order: Vec<usize> = (0..vals.len()).collect();
    order.sort_by(|&a, &b| vals[a].partial_cmp(&vals[b]).unwrap());
    order
}

/// Boundary dof index (within the boundary block) of theta-node `i_t`.
fn boundary_dof(map: &DofMap, i_t: usize) -> Option<usize> {
    map.dof(map.n_s - 1, i_t).map(|g| g - map.n_interior())
}

fn boundary_theta(reference: &Reference1d, ne: usize, dt: f64, i_t: usize) -> f64 {
    let p = reference.p;
    let e = (i_t / p).min(ne - 1);
    let k = i_t - e * p;
    e as f64 * dt + 0.5 * dt * (1.0 + reference.nodes[k])
}

/// Symmetric orthogonal H with H z proportional to e_1.
fn householder_to_e1(z: &DVector<f64>) -> DMatrix<f64> {
    let n = z.len();
    let mut v = z.clone();
    v[0] += z[0].signum() * z.norm();
    let vn2 = v.norm_squared();
    let mut h = DMatrix::identity(n, n);
    if vn2 > 0.0 {
        h -= (&v * v.transpose()) * (2.0 / vn2);
    }
    h
}

/// Spectrum CSV convenience wrapper.
pub fn save_spectrum_csv(path: &std::path::Path, spectrum: &SteklovSpectrum) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    spectrum.write_csv(&mut f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{make_profile, recenter, ShapeSpec};
    use crate::hyperbolic::Dimension;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn ball_profile(n: usize, r0: f64) -> RadialProfile {
        make_profile(
            Dimension::new(n).unwrap(),
            &ShapeSpec::Sphere { radius: r0 },
            48,
        )
        .unwrap()
    }

    /// Piecewise-Lagrange evaluation of a trace column at an arbitrary angle.
    fn trace_value(s: &SectorSpectrum, order: usize, theta: f64, col: usize) -> f64 {
        let thetas = &s.boundary_thetas;
        let ne = (thetas.len() - 1) / order;
        let dt = std::f64::consts::PI / ne as f64;
        let el = ((theta / dt) as usize).min(ne - 1);
        let mut acc = 0.0;
        for i in 0..=order {
            let gi = el * order + i;
            let mut l = 1.0;
            for j in 0..=order {
                if j != i {
                    let xj = thetas[el * order + j];
                    l *= (theta - xj) / (thetas[gi] - xj);
                }
            }
            acc += l * s.traces[(gi, col)];
        }
        acc
    }

    /// int_Sigma u_a u_b dmu by independent dense quadrature of the traces.
    fn boundary_product(
        p: &RadialProfile,
        s: &SectorSpectrum,
        order: usize,
        a: Option<usize>,
        b: Option<usize>,
    ) -> f64 {
        let dim = p.dim();
        let om = dim.omega_meridian();
        let e = dim.n() as i32 - 2;
        // integrate element by element: the traces are only piecewise smooth
        let ne = (s.boundary_thetas.len() - 1) / order;
        let dt = std::f64::consts::PI / ne as f64;
        let mut acc = 0.0;
        for el in 0..ne {
            let (ts, ws) = quad::gauss_legendre_on(24, el as f64 * dt, (el + 1) as f64 * dt);
            for (&t, &w) in ts.iter().zip(&ws) {
                let (rho, rho_p, _) = p.eval(t);
                let lam = rho.sinh();
                let dmu =
                    om * (rho_p * rho_p + lam * lam).sqrt() * lam.powi(e) * t.sin().powi(e);
                let ua = a.map_or(1.0, |c| trace_value(s, order, t, c));
                let ub = b.map_or(1.0, |c| trace_value(s, order, t, c));
                acc += w * dmu * ua * ub;
            }
        }
        acc
    }

    #[test]
    fn multiplicities() {
        assert_eq!(angular_multiplicity(4, 0), 1);
        assert_eq!(angular_multiplicity(4, 1), 3);
        assert_eq!(angular_multiplicity(4, 2), 5);
        assert_eq!(angular_multiplicity(5, 1), 4);
        assert_eq!(angular_multiplicity(5, 2), 9);
        assert_eq!(angular_multiplicity(3, 1), 2);
        assert_eq!(angular_multiplicity(3, 5), 2);
        assert_eq!(angular_multiplicity(2, 1), 1);
        assert_eq!(angular_multiplicity(2, 2), 0);
        assert_eq!(angular_multiplicity(6, 1), 5);
    }

    #[test]
    fn ball_sigma1_both_sectors() {
        let gf = GFunction::new(Dimension::new(4).unwrap());
        let exact = gf.sigma1_ball(1.0).unwrap();
        let p = ball_profile(4, 1.0);
        let spec = solve(&p, &[0, 1], 2, &SolverConfig::default()).unwrap();
        for s in &spec.sectors {
            assert_relative_eq!(s.eigenvalues[0], exact, max_relative = 1e-3);
            assert!(s.eigenvalues.iter().all(|&v| v > 0.0));
        }
        // combined multiplicity of sigma_1 is n = 1 + (n - 1)
        let total: usize = spec
            .combined()
            .iter()
            .filter(|c| (c.value - exact).abs() < 1e-3 * exact)
            .map(|c| c.multiplicity)
            .sum();
        assert_eq!(total, 4);
    }

    #[test]
    fn ball_convergence_is_monotone() {
        let gf = GFunction::new(Dimension::new(4).unwrap());
        let exact = gf.sigma1_ball(1.0).unwrap();
        let p = ball_profile(4, 1.0);
        let mut errors = Vec::new();
        for mesh in [16usize, 24, 32, 48] {
            let sig = sigma1_fem(&p, &SolverConfig::with_mesh(mesh)).unwrap();
            errors.push((sig - exact).abs() / exact);
        }
        for w in errors.windows(2) {
            assert!(w[1] <= w[0], "error not decreasing: {errors:?}");
        }
        assert!(errors[errors.len() - 1] < 1e-3, "final error {errors:?}");
    }

    #[test]
    fn traces_are_mass_orthonormal() {
        let p = ball_profile(4, 1.0);
        let cfg = SolverConfig::default();
        let spec = solve(&p, &[0, 1], 3, &cfg).unwrap();
        for s in &spec.sectors {
            let k = s.eigenvalues.len();
            for a in 0..k {
                for b in a..k {
                    let dot = boundary_product(&p, s, cfg.order, Some(a), Some(b));
                    let expected = if a == b { 1.0 } else { 0.0 };
                    assert_abs_diff_eq!(dot, expected, epsilon = 1e-8);
                }
            }
        }
    }

    #[test]
    fn sector0_solutions_orthogonal_to_constants() {
        let p = ball_profile(4, 1.0);
        let cfg = SolverConfig::default();
        let spec = solve(&p, &[0], 3, &cfg).unwrap();
        let s = &spec.sectors[0];
        for col in 0..s.eigenvalues.len() {
            let int_u = boundary_product(&p, s, cfg.order, Some(col), None);
            assert_abs_diff_eq!(int_u, 0.0, epsilon = 1e-8);
        }
    }

    #[test]
    fn perturbed_sphere_eigenvalues() {
        let d = Dimension::new(4).unwrap();
        let gf = GFunction::new(d);
        let p = make_profile(
            d,
            &ShapeSpec::PerturbedSphere {
                radius: 1.0,
                modes: vec![(2, 0.12), (3, 0.05)],
            },
            48,
        )
        .unwrap();
        let spec = solve(&p, &[0, 1, 2], 2, &SolverConfig::default()).unwrap();
        for s in &spec.sectors {
            assert!(s.eigenvalues.iter().all(|&v| v > 0.0));
        }
        // the eigenvalue comparison with the equal-area ball
        let geo = crate::domain::DomainGeometry::new(&p).unwrap();
        let r_star = d.radius_from_area(geo.boundary_area).unwrap();
        assert!(spec.sigma1() <= gf.sigma1_ball(r_star).unwrap() * (1.0 + 1e-3));
        // higher sectors stay above sigma_1
        let l2_min = spec.sectors[2].eigenvalues[0];
        assert!(l2_min > spec.sigma1());
    }

    #[test]
    fn test_function_bound_is_upper_bound() {
        let d = Dimension::new(4).unwrap();
        let gf = GFunction::new(d);
        // centered ball: equality with sigma_1
        let b = ball_profile(4, 1.0);
        let geo = crate::domain::DomainGeometry::new(&b).unwrap();
        let bound = test_function_bound(&geo, &gf).unwrap();
        assert_relative_eq!(bound, gf.sigma1_ball(1.0).unwrap(), max_relative = 1e-9);
        // perturbed sphere, recentered: bound dominates the FEM value
        let p = make_profile(
            d,
            &ShapeSpec::PerturbedSphere {
                radius: 1.0,
                modes: vec![(2, 0.1), (4, -0.04)],
            },
            48,
        )
        .unwrap();
        let (pc, _) = recenter(&p, |r| gf.g(r).unwrap()).unwrap();
        let geo = crate::domain::DomainGeometry::new(&pc).unwrap();
        let bound = test_function_bound(&geo, &gf).unwrap();
        let sigma = sigma1_fem(&pc, &SolverConfig::default()).unwrap();
        assert!(sigma <= bound + 1e-6, "sigma {sigma} vs bound {bound}");
    }

    #[test]
    fn reciprocal_sum_counts_multiplicities() {
        let p = ball_profile(5, 1.0);
        let spec = solve(&p, &[0, 1], 1, &SolverConfig::with_mesh(24)).unwrap();
        // 1 + 4 eigenvalues available: n - 1 = 4 works, 20 does not
        assert!(spec.reciprocal_sum(4).is_ok());
        assert!(spec.reciprocal_sum(20).is_err());
        let gf = GFunction::new(Dimension::new(5).unwrap());
        assert_relative_eq!(
            spec.reciprocal_sum(4).unwrap(),
            4.0 / gf.sigma1_ball(1.0).unwrap(),
            max_relative = 2e-3
        );
    }

    #[test]
    fn sector2_rejected_in_dimension_two() {
        let p = ball_profile(2, 1.0);
        assert!(solve(&p, &[0, 1], 1, &SolverConfig::with_mesh(16)).is_ok());
        assert!(solve(&p, &[2], 1, &SolverConfig::with_mesh(16)).is_err());
    }

    #[test]
    fn spectrum_csv_format() {
        let p = ball_profile(4, 0.8);
        let spec = solve(&p, &[0, 1], 2, &SolverConfig::with_mesh(16)).unwrap();
        let mut buf = Vec::new();
        spec.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("sector,index,eigenvalue,multiplicity\n"));
        assert_eq!(text.lines().count(), 1 + 4);
    }
}
