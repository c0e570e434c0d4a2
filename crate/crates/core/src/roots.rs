//! Bracketed scalar root finding: Newton steps guarded by bisection.

use crate::{Error, Result};

const MAX_ITER: usize = 200;

/// Find a root of `f` in `[lo, hi]` given a sign change.
///
/// `f` returns `(value, derivative)`. Newton steps are taken when they stay
/// inside the current bracket and shrink the residual fast enough; otherwise
/// the bracket is bisected. Endpoint values may be infinite (used where the
/// function blows up at the boundary). Stops when the bracket width falls
/// below `rtol · max(|x|, tiny)` or the value is exactly zero.
pub fn newton_bisect<F>(mut f: F, lo: f64, hi: f64, rtol: f64) -> Result<f64>
where
    F: FnMut(f64) -> (f64, f64),
{
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let fa = f(a).0;
    let fb = f(b).0;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.is_nan() || fb.is_nan() || fa.signum() == fb.signum() {
        return Err(Error::Domain("root bracket without sign change"));
    }
    // Orient so that f(a) < 0 < f(b).
    let flip = fa > 0.0;
    let tiny = f64::MIN_POSITIVE * 1e6;
    let mut x = 0.5 * (a + b);
    let mut dx_old = b - a;
    let (mut fx, mut dfx) = f(x);
    for _ in 0..MAX_ITER {
        if fx == 0.0 {
            return Ok(x);
        }
        let neg = (fx < 0.0) != flip;
        if neg {
            a = x;
        } else {
            b = x;
        }
        let width = b - a;
        if width <= rtol * x.abs().max(tiny) {
            return Ok(x);
        }
        let newton = x - fx / dfx;
        let use_newton = dfx.is_finite()
            && dfx != 0.0
            && newton > a
            && newton < b
            && (fx / dfx).abs() < 0.5 * dx_old.abs();
        let next = if use_newton { newton } else { 0.5 * (a + b) };
        dx_old = next - x;
        if next == x || dx_old.abs() <= 0.25 * rtol * x.abs().max(tiny) {
            // Converged Newton step: polish once and stop.
            return Ok(next);
        }
        x = next;
        let e = f(x);
        fx = e.0;
        dfx = e.1;
    }
    Err(Error::NoConvergence {
        method: "newton-bisection",
        iterations: MAX_ITER,
    })
}

/// Plain bisection on a sign change, to absolute width `atol`.
pub fn bisect<F>(mut f: F, lo: f64, hi: f64, atol: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = (lo, hi);
    let fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.is_nan() || fb.is_nan() || fa.signum() == fb.signum() {
        return Err(Error::Domain("root bracket without sign change"));
    }
    let sa = fa.signum();
    for _ in 0..MAX_ITER {
        let m = 0.5 * (a + b);
        if (b - a).abs() <= atol || m == a || m == b {
            return Ok(m);
        }
        let fm = f(m);
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == sa {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_sqrt_two() {
        let r = newton_bisect(|x| (x * x - 2.0, 2.0 * x), 0.0, 2.0, 1e-14).unwrap();
        assert!((r - core::f64::consts::SQRT_2).abs() < 1e-14);
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert!((r - core::f64::consts::SQRT_2).abs() < 1e-13);
    }

    #[test]
    fn tolerates_infinite_endpoint_and_derivative() {
        // sqrt(x) - 0.3 has an infinite derivative at 0.
        let r = newton_bisect(
            |x: f64| (libm::sqrt(x) - 0.3, 0.5 / libm::sqrt(x)),
            0.0,
            1.0,
            1e-14,
        )
        .unwrap();
        assert!((r - 0.09).abs() < 1e-14);
        let r = newton_bisect(
            |x: f64| {
                (
                    if x == 0.0 {
                        f64::INFINITY
                    } else {
                        1.0 / x - 4.0
                    },
                    -1.0 / (x * x),
                )
            },
            0.0,
            1.0,
            1e-14,
        )
        .unwrap();
        assert!((r - 0.25).abs() < 1e-14);
    }

    #[test]
    fn rejects_missing_sign_change() {
        assert!(newton_bisect(|x| (x * x + 1.0, 2.0 * x), -1.0, 1.0, 1e-12).is_err());
        assert!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-12).is_err());
    }
}
