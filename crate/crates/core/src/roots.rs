//! Bracketed scalar root finding.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Root of `f` in `[lo, hi]`, which must bracket a sign change.
///
/// Bisection down to `tol`, then two Newton steps on `df` that are kept only
/// if they stay inside the final bracket and shrink `|f|`.
pub fn find_root<T, F, D>(f: F, df: D, lo: T, hi: T, tol: T) -> Result<T>
where
    T: Real,
    F: Fn(T) -> T,
    D: Fn(T) -> T,
{
    let (mut a, mut b) = (lo, hi);
    let (mut fa, fb) = (f(a), f(b));
    if fa == T::zero() {
        return Ok(a);
    }
    if fb == T::zero() {
        return Ok(b);
    }
    if !(fa * fb < T::zero()) {
        return Err(Error::Bracket {
            lo: lo.to_f64_lossy(),
            hi: hi.to_f64_lossy(),
            f_lo: fa.to_f64_lossy(),
            f_hi: fb.to_f64_lossy(),
        });
    }
    for _ in 0..400 {
        if b - a <= tol {
            break;
        }
        let m = a + (b - a) * T::lit(0.5);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == T::zero() {
            return Ok(m);
        }
        if (fm < T::zero()) == (fa < T::zero()) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    let mut x = a + (b - a) * T::lit(0.5);
    let mut fx = f(x);
    for _ in 0..2 {
        let d = df(x);
        if d == T::zero() || !d.is_finite() {
            break;
        }
        let cand = x - fx / d;
        if cand < a || cand > b {
            break;
        }
        let fc = f(cand);
        if fc.abs() >= fx.abs() {
            break;
        }
        x = cand;
        fx = fc;
    }
    Ok(x)
}
