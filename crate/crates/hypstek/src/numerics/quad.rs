//! Quadrature rules: adaptive Gauss–Kronrod and fixed Gauss–Legendre.

use crate::error::{Error, Result};

/// 15-point Kronrod abscissae on [-1, 1] (positive half, descending).
const XGK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.0,
];

/// Kronrod weights matching `XGK`.
const WGK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];

/// 7-point Gauss weights for the embedded rule (nodes XGK[1], XGK[3], ...).
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

/// One Gauss–Kronrod 7-15 panel. Returns (kronrod, |kronrod - gauss|).
pub fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut res_k = WGK[7] * fc;
    let mut res_g = WG[3] * fc;
    for i in 0..7 {
        let x = h * XGK[i];
        let f1 = f(c - x);
        let f2 = f(c + x);
        res_k += WGK[i] * (f1 + f2);
        if i % 2 == 1 {
            res_g += WG[i / 2] * (f1 + f2);
        }
    }
    (res_k * h, (res_k - res_g).abs() * h.abs())
}

/// Adaptive Gauss–Kronrod integration of `f` over [a, b].
///
/// Bisection until the summed error estimate satisfies
/// `err <= abs_tol + rel_tol * |integral|`. Depth is capped; exceeding it
/// reports a quadrature failure with the offending subinterval.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    fn rec<F: FnMut(f64) -> f64>(
        f: &mut F,
        a: f64,
        b: f64,
        tol: f64,
        rel_tol: f64,
        depth: u32,
    ) -> Result<f64> {
        let (val, err) = gk15(f, a, b);
        if err <= tol.max(rel_tol * val.abs()) || err < 1e-300 {
            if !val.is_finite() {
                return Err(Error::Quadrature {
                    at: 0.5 * (a + b),
                    reason: "non-finite integrand".into(),
                });
            }
            return Ok(val);
        }
        if depth == 0 {
            return Err(Error::Quadrature {
                at: 0.5 * (a + b),
                reason: format!("max refinement depth reached (err {err:.3e})"),
            });
        }
        let c = 0.5 * (a + b);
        let left = rec(f, a, c, 0.5 * tol, rel_tol, depth - 1)?;
        let right = rec(f, c, b, 0.5 * tol, rel_tol, depth - 1)?;
        Ok(left + right)
    }
    rec(&mut f, a, b, abs_tol, rel_tol, 48)
}

/// Gauss–Legendre nodes and weights on [-1, 1].
///
/// Newton iteration on the Legendre recurrence; accurate to machine
/// precision for the orders used here (n <= a few hundred).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi-style initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_pair(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Gauss–Legendre rule mapped to [a, b].
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    (
        x.iter().map(|&t| mid + half * t).collect(),
        w.iter().map(|&t| t * half).collect(),
    )
}

/// (P_n(x), P_n'(x)) by the three-term recurrence.
pub fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Legendre polynomial P_n(x).
pub fn legendre(n: usize, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    if x == 1.0 || x == -1.0 {
        // endpoint values avoid the 0/0 in the derivative formula upstream
        return if x > 0.0 { 1.0 } else { (-1.0f64).powi(n as i32) };
    }
    legendre_pair(n, x).0
}

/// Gauss–Lobatto–Legendre nodes on [-1, 1]: endpoints plus roots of P'_{n-1}.
pub fn gauss_lobatto_nodes(n: usize) -> Vec<f64> {
    assert!(n >= 2);
    let p = n - 1;
    let mut nodes = vec![0.0; n];
    nodes[0] = -1.0;
    nodes[n - 1] = 1.0;
    for i in 1..p {
        // roots of P'_p interlace Chebyshev–Lobatto points
        let mut x = (std::f64::consts::PI * i as f64 / p as f64).cos();
        for _ in 0..100 {
            let (pp, dp) = legendre_pair(p, x);
            // f = P'_p, f' = P''_p from the ODE (1-x^2)P'' = 2xP' - p(p+1)P
            let f = dp;
            let fd = (2.0 * x * dp - (p * (p + 1)) as f64 * pp) / (1.0 - x * x);
            let dx = f / fd;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[n - 1 - i] = x;
    }
    nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    nodes
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn gk_exact_on_polynomials() {
        // K15 integrates degree <= 22 exactly
        let (v, _) = gk15(&mut |x: f64| x.powi(8), -1.0, 1.0);
        assert_abs_diff_eq!(v, 2.0 / 9.0, epsilon = 1e-15);
    }

    #[test]
    fn adaptive_matches_known_integrals() {
        let v = integrate(|x| x.sin(), 0.0, std::f64::consts::PI, 1e-13, 1e-13).unwrap();
        assert_abs_diff_eq!(v, 2.0, epsilon = 1e-12);
        let v = integrate(|x| (-x * x).exp(), -8.0, 8.0, 1e-13, 1e-13).unwrap();
        assert_abs_diff_eq!(v, std::f64::consts::PI.sqrt(), epsilon = 1e-12);
        // peaked integrand needs refinement
        let v = integrate(|x| 1.0 / (1e-4 + x * x), -1.0, 1.0, 1e-12, 1e-12).unwrap();
        let exact = 2.0 / 1e-2 * (1.0f64 / 1e-2).atan();
        assert_abs_diff_eq!(v / exact, 1.0, epsilon = 1e-11);
    }

    #[test]
    fn gauss_legendre_five_point() {
        let (x, w) = gauss_legendre(5);
        assert_abs_diff_eq!(x[2], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(x[4], 0.906179845938664, epsilon = 1e-14);
        assert_abs_diff_eq!(w[2], 0.568888888888889, epsilon = 1e-14);
        assert_abs_diff_eq!(w[4], 0.236926885056189, epsilon = 1e-14);
        // exact for degree 9
        let s: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(8)).sum();
        assert_abs_diff_eq!(s, 2.0 / 9.0, epsilon = 1e-14);
    }

    #[test]
    fn lobatto_nodes_order_four() {
        let n = gauss_lobatto_nodes(5);
        let r = (3.0f64 / 7.0).sqrt();
        for (a, b) in n.iter().zip([-1.0, -r, 0.0, r, 1.0]) {
            assert_abs_diff_eq!(a, &b, epsilon = 1e-14);
        }
    }

    #[test]
    fn legendre_values() {
        assert_abs_diff_eq!(legendre(2, 0.5), 0.5 * (3.0 * 0.25 - 1.0), epsilon = 1e-15);
        assert_abs_diff_eq!(legendre(5, 1.0), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(legendre(3, -1.0), -1.0, epsilon = 1e-15);
    }
}
