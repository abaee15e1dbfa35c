//! Scalar solvers used by the bound and verification code: bisection,
//! golden-section search and plain fixed-point iteration.

use crate::error::{Error, Result};

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Bisection on a sign-changing bracket. Stops once the bracket is narrower
/// than `xtol` or `f` evaluates to exactly zero.
pub fn bisect<F>(f: F, lo: f64, hi: f64, xtol: f64, context: &'static str) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let (mut a, mut b) = (lo, hi);
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if !(fa.is_finite() && fb.is_finite()) || fa.signum() == fb.signum() {
        return Err(Error::Bracket {
            context,
            lo,
            hi,
            f_lo: fa,
            f_hi: fb,
        });
    }
    // 200 halvings exhaust any f64 bracket.
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if (b - a) <= xtol || mid <= a || mid >= b {
            return Ok(mid);
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// Golden-section minimisation on `[lo, hi]`. Returns the best point seen
/// and its value; converges to a local minimum when `f` is unimodal there.
pub fn golden_section_min<F>(f: F, lo: f64, hi: f64, xtol: f64) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let (mut best_x, mut best_f) = if fc <= fd { (c, fc) } else { (d, fd) };

    while (b - a) > xtol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            if c <= a || c >= d {
                break;
            }
            fc = f(c);
            if fc < best_f {
                best_x = c;
                best_f = fc;
            }
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            if d >= b || d <= c {
                break;
            }
            fd = f(d);
            if fd < best_f {
                best_x = d;
                best_f = fd;
            }
        }
    }
    (best_x, best_f)
}

/// Iterates `x <- g(x)` from `x0` until successive iterates differ by less
/// than `rtol` relative to the current iterate.
pub fn fixed_point<G>(g: G, x0: f64, rtol: f64, max_iter: usize, context: &'static str) -> Result<f64>
where
    G: Fn(f64) -> f64,
{
    let mut x = x0;
    let mut step = f64::INFINITY;
    for _ in 0..max_iter {
        let next = g(x);
        step = (next - x).abs();
        if step <= rtol * next.abs().max(f64::MIN_POSITIVE) {
            return Ok(next);
        }
        x = next;
    }
    Err(Error::NoConvergence {
        context,
        iterations: max_iter,
        last_step: step,
    })
}
