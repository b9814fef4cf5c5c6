//! Bracketed bisection with Newton refinement.
//!
//! All scalar equations in the crate are monotone in the unknown on the
//! bracket (convexity in the momentum), so bisection always makes progress
//! and Newton only accelerates it.

use crate::error::{Error, Result};

pub const ROOT_TOL: f64 = 1e-12;
pub const ROOT_MAX_ITER: usize = 200;
/// Largest momentum the bracket expansion will reach before giving up.
pub const MOMENTUM_CAP: f64 = 1e8;

/// Solves `f(x) = 0` on `[lo, hi]` where `f(lo)` and `f(hi)` have opposite signs.
/// `f` returns the residual and its derivative.
pub fn newton_bisect<F>(mut f: F, mut lo: f64, mut hi: f64) -> Result<f64>
where
    F: FnMut(f64) -> (f64, f64),
{
    let (flo, _) = f(lo);
    if flo == 0.0 {
        return Ok(lo);
    }
    let (fhi, _) = f(hi);
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::RootNotBracketed {
            target: 0.0,
            cap: hi.abs().max(lo.abs()),
        });
    }
    // orient so that f(lo) < 0 < f(hi)
    if flo > 0.0 {
        std::mem::swap(&mut lo, &mut hi);
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..ROOT_MAX_ITER {
        let (fx, dfx) = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - fx / dfx;
        let (a, b) = if lo < hi { (lo, hi) } else { (hi, lo) };
        let next = if dfx.is_finite() && dfx != 0.0 && newton > a && newton < b {
            newton
        } else {
            0.5 * (lo + hi)
        };
        let step = (next - x).abs();
        x = next;
        if step < ROOT_TOL || (b - a) < ROOT_TOL {
            return Ok(x);
        }
    }
    Ok(x)
}

/// Solves `f(x) = target` for a function increasing in `x`, expanding a
/// bracket from `start` in both directions. The bracket may not leave
/// `[start - MOMENTUM_CAP, start + MOMENTUM_CAP]`.
pub fn solve_increasing<F>(mut f: F, target: f64, start: f64) -> Result<f64>
where
    F: FnMut(f64) -> (f64, f64),
{
    let (f0, _) = f(start);
    let r0 = f0 - target;
    if r0 == 0.0 {
        return Ok(start);
    }
    let dir = if r0 < 0.0 { 1.0 } else { -1.0 };
    let mut step = 1.0;
    let mut near = start;
    loop {
        let far = start + dir * step;
        let (ff, _) = f(far);
        if (ff - target).signum() != r0.signum() {
            return newton_bisect(|x| {
                let (v, d) = f(x);
                (v - target, d)
            }, near, far);
        }
        near = far;
        step *= 2.0;
        if step > MOMENTUM_CAP {
            return Err(Error::RootNotBracketed {
                target,
                cap: MOMENTUM_CAP,
            });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cube_root_of_two() {
        let r = newton_bisect(|x| (x * x * x - 2.0, 3.0 * x * x), 0.0, 2.0).unwrap();
        assert!((r - 2f64.cbrt()).abs() < 1e-12);
    }

    #[test]
    fn expanding_bracket_finds_far_root() {
        let r = solve_increasing(|x| (x, 1.0), 1234.5, 0.0).unwrap();
        assert!((r - 1234.5).abs() < 1e-9);
        let r = solve_increasing(|x| (x.sinh(), x.cosh()), -3.0, 0.0).unwrap();
        assert!((r.sinh() + 3.0).abs() < 1e-10);
    }

    #[test]
    fn bounded_function_is_not_bracketed() {
        let err = solve_increasing(|x| (x.atan(), 1.0 / (1.0 + x * x)), 2.0, 0.0).unwrap_err();
        assert!(matches!(err, Error::RootNotBracketed { .. }));
    }
}
