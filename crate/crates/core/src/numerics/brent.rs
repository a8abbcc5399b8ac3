//! Bracketing scalar root finder (Brent's method).

use crate::error::{Error, Result};

/// Outcome of a successful root search.
#[derive(Debug, Clone, Copy)]
pub struct RootResult {
    pub root: f64,
    pub residual: f64,
    pub iterations: usize,
    /// Final enclosing bracket.
    pub bracket: (f64, f64),
}

/// Options for [`brent_root`]. `width_tol` is absolute on the bracket width,
/// `residual_tol` is absolute on |f(root)|.
#[derive(Debug, Clone, Copy)]
pub struct RootOptions {
    pub width_tol: f64,
    pub residual_tol: f64,
    pub max_iterations: usize,
}

impl Default for RootOptions {
    fn default() -> Self {
        Self {
            width_tol: 1e-10,
            residual_tol: 1e-9,
            max_iterations: 200,
        }
    }
}

/// Finds a root of `f` inside `[a, b]` by Brent's method: inverse quadratic
/// interpolation where it helps, secant otherwise, bisection as fallback.
/// Requires `f(a)` and `f(b)` to differ in sign (or one of them to be zero).
pub fn brent_root(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    opts: RootOptions,
) -> Result<RootResult> {
    let (mut a, mut b) = (a, b);
    let mut fa = f(a);
    let mut fb = f(b);

    if fa == 0.0 {
        return Ok(RootResult {
            root: a,
            residual: 0.0,
            iterations: 0,
            bracket: (a, a),
        });
    }
    if fb == 0.0 {
        return Ok(RootResult {
            root: b,
            residual: 0.0,
            iterations: 0,
            bracket: (b, b),
        });
    }
    if fa.signum() == fb.signum() {
        return Err(Error::BracketFailure {
            expansions: 0,
            lo: a,
            hi: b,
            f_lo: fa,
            f_hi: fb,
        });
    }

    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;

    for iteration in 1..=opts.max_iterations {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }

        let eps_tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * opts.width_tol;
        let xm = 0.5 * (c - b);

        if (xm.abs() <= eps_tol && fb.abs() <= opts.residual_tol) || fb == 0.0 {
            let (lo, hi) = if b < c { (b, c) } else { (c, b) };
            return Ok(RootResult {
                root: b,
                residual: fb,
                iterations: iteration,
                bracket: (lo, hi),
            });
        }

        if e.abs() >= eps_tol && fa.abs() > fb.abs() {
            // Interpolation step: secant for two points, inverse quadratic for three.
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (eps_tol * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }

        a = b;
        fa = fb;
        b += if d.abs() > eps_tol {
            d
        } else {
            eps_tol.copysign(xm)
        };
        fb = f(b);
    }

    Err(Error::RootIterations {
        max_iterations: opts.max_iterations,
        residual: fb,
    })
}

/// Expands `[lo, hi]` upward (doubling the width each time, keeping `lo`
/// fixed) until `f` changes sign across the bracket, up to `max_expansions`.
pub fn expand_bracket_up(
    f: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    max_expansions: usize,
) -> Result<(f64, f64)> {
    let f_lo = f(lo);
    let mut hi = hi;
    let mut f_hi = f(hi);
    let mut expansions = 0;
    while f_lo.signum() == f_hi.signum() && f_lo != 0.0 && f_hi != 0.0 {
        if expansions >= max_expansions {
            return Err(Error::BracketFailure {
                expansions,
                lo,
                hi,
                f_lo,
                f_hi,
            });
        }
        hi = lo + 2.0 * (hi - lo);
        f_hi = f(hi);
        expansions += 1;
    }
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_simple_root() {
        let r = brent_root(|x| x * x - 2.0, 0.0, 2.0, RootOptions::default()).unwrap();
        assert!((r.root - 2f64.sqrt()).abs() < 1e-10);
        assert!(r.residual.abs() <= 1e-9);
    }

    #[test]
    fn exact_endpoint_root() {
        let r = brent_root(|x| x, 0.0, 1.0, RootOptions::default()).unwrap();
        assert_eq!(r.root, 0.0);
        assert_eq!(r.iterations, 0);
    }

    #[test]
    fn rejects_unbracketed() {
        let err = brent_root(|x| x * x + 1.0, -1.0, 1.0, RootOptions::default()).unwrap_err();
        assert!(matches!(err, Error::BracketFailure { .. }));
    }

    #[test]
    fn transcendental_root() {
        let r = brent_root(|x| x.exp() - 3.0, 0.0, 2.0, RootOptions::default()).unwrap();
        assert!((r.root - 3f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn expansion_reaches_sign_change() {
        let (lo, hi) = expand_bracket_up(|x| x - 100.0, 0.0, 1.0, 60).unwrap();
        assert!(lo == 0.0 && hi >= 100.0);
        let err = expand_bracket_up(|_| 1.0, 0.0, 1.0, 10).unwrap_err();
        assert!(matches!(err, Error::BracketFailure { expansions: 10, .. }));
    }
}
