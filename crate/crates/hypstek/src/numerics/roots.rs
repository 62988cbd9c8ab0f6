//! Bracketed scalar root finding.

use crate::error::{Error, Result};

/// Brent's method on [a, b]. `fa`, `fb` must have opposite signs.
pub fn brent<F: FnMut(f64) -> f64>(
    mut f: F,
    mut a: f64,
    mut b: f64,
    tol: f64,
    max_iter: usize,
) -> Result<f64> {
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::RootBracket {
            a,
            b,
            reason: "no sign change".into(),
        });
    }
    if fa.abs() < fb.abs() {
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut fa, &mut fb);
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut mflag = true;
    for _ in 0..max_iter {
        let mut s = if fa != fc && fb != fc {
            // inverse quadratic interpolation
            a * fb * fc / ((fa - fb) * (fa - fc))
                + b * fa * fc / ((fb - fa) * (fb - fc))
                + c * fa * fb / ((fc - fa) * (fc - fb))
        } else {
            b - fb * (b - a) / (fb - fa)
        };
        let lo = (3.0 * a + b) / 4.0;
        let cond = !((lo.min(b) < s && s < lo.max(b))
            && (!mflag || (s - b).abs() < 0.5 * (b - c).abs())
            && (mflag || (s - b).abs() < 0.5 * (c - d).abs()));
        if cond {
            s = 0.5 * (a + b);
            mflag = true;
        } else {
            mflag = false;
        }
        let fs = f(s);
        d = c;
        c = b;
        fc = fb;
        if fa.signum() != fs.signum() {
            b = s;
            fb = fs;
        } else {
            a = s;
            fa = fs;
        }
        if fa.abs() < fb.abs() {
            std::mem::swap(&mut a, &mut b);
            std::mem::swap(&mut fa, &mut fb);
        }
        if fb == 0.0 || (b - a).abs() < tol * (1.0 + b.abs()) {
            return Ok(b);
        }
    }
    Ok(b)
}

/// Bisection refined by Newton steps, for smooth strictly monotone functions.
///
/// Newton is taken whenever the iterate stays inside the current bracket;
/// otherwise the step falls back to bisection, so convergence is guaranteed.
pub fn newton_bisect<F, G>(
    mut f: F,
    mut df: G,
    mut a: f64,
    mut b: f64,
    tol: f64,
) -> Result<f64>
where
    F: FnMut(f64) -> f64,
    G: FnMut(f64) -> f64,
{
    let fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::RootBracket {
            a,
            b,
            reason: "no sign change".into(),
        });
    }
    let increasing = fb > 0.0;
    let mut x = 0.5 * (a + b);
    for _ in 0..200 {
        let fx = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if (fx > 0.0) == increasing {
            b = x;
        } else {
            a = x;
        }
        let d = df(x);
        let newton = x - fx / d;
        x = if d != 0.0 && newton > a && newton < b {
            newton
        } else {
            0.5 * (a + b)
        };
        if (b - a).abs() < tol * (1.0 + x.abs()) {
            return Ok(x);
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn brent_finds_cubic_root() {
        let r = brent(|x| x * x * x - 2.0, 0.0, 2.0, 1e-15, 100).unwrap();
        assert_abs_diff_eq!(r, 2.0f64.powf(1.0 / 3.0), epsilon = 1e-13);
    }

    #[test]
    fn brent_rejects_bad_bracket() {
        assert!(brent(|x| x * x + 1.0, -1.0, 1.0, 1e-12, 100).is_err());
    }

    #[test]
    fn newton_bisect_matches_brent() {
        let f = |x: f64| x.sinh() - 3.0;
        let r1 = brent(f, 0.0, 5.0, 1e-15, 200).unwrap();
        let r2 = newton_bisect(f, |x: f64| x.cosh(), 0.0, 5.0, 1e-15).unwrap();
        assert_abs_diff_eq!(r1, r2, epsilon = 1e-12);
        assert_abs_diff_eq!(r2, 3.0f64.asinh(), epsilon = 1e-13);
    }
}
