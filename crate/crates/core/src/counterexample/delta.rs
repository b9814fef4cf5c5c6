//! Inversion of the flow on the set of starting points
//! `D = ([0, inf) x {2}) u ({0} x (0, 2])` and the closed-form entropy
//! solution built from it.
//!
//! `D` is parameterised by one scalar: `lambda <= 0` stands for `(0, 2 + lambda)`,
//! `lambda > 0` for `(lambda, 2)`. The position reached at time `t` is
//! increasing in `lambda` over the admissible starting points, those whose
//! orbit stays in `x > 0` on `(0, t)`. A bounded orbit from `(0, p0)` comes
//! back to `0` after half a period, so it is admissible exactly when
//! `period(p0) >= 2 t`.

use super::period::period_inverse;
use super::{model, PERIOD_LIMIT, SHOCK_ONSET};
use crate::error::{Error, Result};
use crate::flow::{flow_end, flow_end_with_tangent, FlowSettings};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaSettings {
    pub flow: FlowSettings,
    /// Target residual `|q(t) - x|`.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for DeltaSettings {
    fn default() -> Self {
        Self {
            flow: FlowSettings::with_dt(1e-3),
            tol: 1e-10,
            max_iter: 100,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaResult {
    pub q0: f64,
    pub p0: f64,
    pub lambda: f64,
    /// Momentum at time `t`, the value of the solution at `(t, x)`.
    pub p_t: f64,
    pub residual: f64,
    pub iterations: usize,
}

fn start_of(lambda: f64) -> (f64, f64) {
    if lambda <= 0.0 {
        (0.0, 2.0 + lambda)
    } else {
        (lambda, 2.0)
    }
}

/// Smallest admissible `lambda` at time `t`.
fn lambda_floor(t: f64) -> Result<f64> {
    if 2.0 * t > PERIOD_LIMIT {
        Ok(period_inverse(2.0 * t)? - 2.0)
    } else {
        Ok(-2.0)
    }
}

fn solve(t: f64, x: f64, guess: Option<f64>, floor: f64, settings: &DeltaSettings) -> Result<DeltaResult> {
    let h = model();
    // f(floor) = -x < 0 (the orbit sits at 0 at time t) and f(x + 1) > 0
    // (rays from (q0, 2) move right), so the bracket needs no evaluation
    let (mut lo, mut hi) = (floor, x + 1.0);
    let mut lambda = guess.unwrap_or(x - 2.0 * t).clamp(lo, hi);
    if lambda <= lo || lambda >= hi {
        lambda = 0.5 * (lo + hi);
    }
    let mut best: Option<DeltaResult> = None;
    for it in 1..=settings.max_iter {
        let (q0, p0) = start_of(lambda);
        let (end, m) = flow_end_with_tangent(&h, t, q0, p0, &settings.flow)?;
        let f = end.q - x;
        let df = if lambda <= 0.0 { m[0][1] } else { m[0][0] };
        let current = DeltaResult {
            q0,
            p0,
            lambda,
            p_t: end.p,
            residual: f.abs(),
            iterations: it,
        };
        if best.is_none_or(|b| current.residual < b.residual) {
            best = Some(current);
        }
        if f.abs() <= settings.tol {
            return Ok(current);
        }
        if f < 0.0 {
            lo = lambda;
        } else {
            hi = lambda;
        }
        if hi - lo <= 1e-15 * (1.0 + hi.abs()) {
            break;
        }
        let newton = lambda - f / df;
        lambda = if df > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    let best = best.unwrap();
    if best.residual <= 1e3 * settings.tol {
        Ok(best)
    } else {
        Err(Error::ShootFailed {
            residual: best.residual,
            iterations: settings.max_iter,
            lo,
            hi,
        })
    }
}

fn check_query(t: f64, x: f64) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::invalid(format!("time must be positive, got {t}")));
    }
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::invalid(format!("position must be positive, got {x}")));
    }
    Ok(())
}

/// The admissible starting point in `D` whose orbit is at `x` at time `t`.
pub fn delta(t: f64, x: f64, settings: &DeltaSettings) -> Result<DeltaResult> {
    check_query(t, x)?;
    solve(t, x, None, lambda_floor(t)?, settings)
}

/// Value of the entropy solution at `(t, x)`, `x != 0`.
pub fn exact_solution(t: f64, x: f64, settings: &DeltaSettings) -> Result<f64> {
    if x < 0.0 {
        return Ok(-exact_solution(t, -x, settings)?);
    }
    check_query(t, x)?;
    Ok(delta(t, x, settings)?.p_t)
}

/// The entropy solution at many points. Points are processed in order of
/// `|x|` with warm starts; `x = 0` is rejected.
pub fn exact_profile(t: f64, xs: &[f64], settings: &DeltaSettings) -> Result<Vec<f64>> {
    if xs.iter().any(|&x| x == 0.0) {
        return Err(Error::invalid("the solution is discontinuous at x = 0; sample off the axis"));
    }
    let floor = lambda_floor(t)?;
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].abs().total_cmp(&xs[b].abs()));
    let mut out = vec![0.0; xs.len()];
    let mut guess = None;
    for i in order {
        let x = xs[i].abs();
        check_query(t, x)?;
        let r = solve(t, x, guess, floor, settings)?;
        guess = Some(r.lambda);
        out[i] = if xs[i] < 0.0 { -r.p_t } else { r.p_t };
    }
    Ok(out)
}

/// Position at time `t` of the orbit from `(0, 2)`: the edge between the
/// fan of orbits from the origin and the translated rays from `(q0, 2)`.
pub fn q_sharp(t: f64, settings: &FlowSettings) -> Result<f64> {
    Ok(flow_end(&model(), t, 0.0, 2.0, settings)?.q)
}

/// Size `u(t, 0-) - u(t, 0+) = 2 p*` of the stationary shock, where
/// `period(p*) = 2 t`.
pub fn shock_trace(t: f64) -> Result<f64> {
    if !(t > SHOCK_ONSET) {
        return Err(Error::NoShockYet(t));
    }
    Ok(2.0 * period_inverse(2.0 * t)?)
}
