//! Period of the bounded orbits through `x = 0`.
//!
//! With `r = g^{-1}(p0^2 / 2)` the period is
//! `2 sqrt 2 int_0^1 r / sqrt(g(r) - g(theta r)) d theta`. Substituting
//! `theta = 1 - s^2`, `y = theta r`, `A = 1 - y^2`, `B = 1 - r^2` gives
//! `g(r) - g(y) = s^2 r (r + y)(A + B)(A^2 + B^2)`, so the integrand becomes
//! `2 sqrt r / sqrt((r + y)(A + B)(A^2 + B^2))`, smooth on `[0, 1]`.

use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::GaussLegendre;

use super::{model, ESCAPE_MOMENTUM, PERIOD_LIMIT};
use crate::error::{Error, Result};
use crate::flow::{FlowSettings, PhaseState};
use crate::hamiltonian::Hamiltonian;

const NODES: usize = 2048;

fn rule(n: usize) -> &'static GaussLegendre {
    static FINE: OnceLock<GaussLegendre> = OnceLock::new();
    static COARSE: OnceLock<GaussLegendre> = OnceLock::new();
    let cell = if n == NODES { &FINE } else { &COARSE };
    cell.get_or_init(|| GaussLegendre::new(NonZeroUsize::new(n).unwrap()))
}

fn check(p0: f64) -> Result<()> {
    if p0 > 0.0 && p0 < ESCAPE_MOMENTUM {
        Ok(())
    } else {
        Err(Error::OutOfRange(p0))
    }
}

/// Turning point `g^{-1}(p0^2 / 2)`, computed without cancellation.
fn turning_point(p0: f64) -> f64 {
    (-(0.25 * (-0.5 * p0 * p0).ln_1p()).exp_m1()).sqrt()
}

fn integrate(p0: f64, nodes: usize) -> f64 {
    let r = turning_point(p0);
    let b = 1.0 - r * r;
    let sr = r.sqrt();
    let integral = rule(nodes).integrate(0.0, 1.0, |s| {
        let y = (1.0 - s * s) * r;
        let a = 1.0 - y * y;
        2.0 * sr / ((r + y) * (a + b) * (a * a + b * b)).sqrt()
    });
    2.0 * std::f64::consts::SQRT_2 * integral
}

/// Period and an error estimate (difference to the rule with half the nodes).
pub fn period_estimate(p0: f64) -> Result<(f64, f64)> {
    check(p0)?;
    let fine = integrate(p0, NODES);
    let coarse = integrate(p0, NODES / 2);
    Ok((fine, (fine - coarse).abs()))
}

/// Smallest period of the orbit starting at `(0, p0)`, `0 < p0 < sqrt 2`.
pub fn period(p0: f64) -> Result<f64> {
    check(p0)?;
    Ok(integrate(p0, NODES))
}

/// Twice the time of the first return of `q` to `0` along the orbit from
/// `(0, p0)`, found by RK4 stepping and a Newton refinement of the last step.
pub fn period_by_return(p0: f64, settings: &FlowSettings) -> Result<f64> {
    check(p0)?;
    let h = model();
    let step = settings.dt;
    let rk4 = |s: PhaseState, dt: f64| -> PhaseState {
        let f = |q: f64, p: f64| {
            let e = h.eval(q, p);
            (e.dp, -e.dx)
        };
        let (k1q, k1p) = f(s.q, s.p);
        let (k2q, k2p) = f(s.q + 0.5 * dt * k1q, s.p + 0.5 * dt * k1p);
        let (k3q, k3p) = f(s.q + 0.5 * dt * k2q, s.p + 0.5 * dt * k2p);
        let (k4q, k4p) = f(s.q + dt * k3q, s.p + dt * k3p);
        PhaseState {
            q: s.q + dt / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q),
            p: s.p + dt / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p),
            t: s.t + dt,
        }
    };
    let mut s = PhaseState { q: 0.0, p: p0, t: 0.0 };
    // orbits with p0 < sqrt 2 return within a bounded time; the cap only
    // guards against a p0 so close to sqrt 2 that the return is not resolved
    let max_steps = (1e4 / step) as usize;
    for _ in 0..max_steps {
        let next = rk4(s, step);
        if next.q <= 0.0 && s.q > 0.0 {
            let mut dt = step * s.q / (s.q - next.q);
            for _ in 0..20 {
                let trial = rk4(s, dt);
                let correction = trial.q / trial.p;
                dt -= correction;
                if correction.abs() < 1e-15 {
                    break;
                }
            }
            return Ok(2.0 * (s.t + dt));
        }
        s = next;
    }
    Err(Error::invalid(format!("orbit from p0 = {p0} did not return within the time cap")))
}

/// Solves `period(p) = target` for `p` in `(0, sqrt 2)`.
pub fn period_inverse(target: f64) -> Result<f64> {
    if !(target > PERIOD_LIMIT) {
        return Err(Error::invalid(format!(
            "every period exceeds {PERIOD_LIMIT}, got target {target}"
        )));
    }
    let mut lo = 0.0;
    let mut hi = ESCAPE_MOMENTUM;
    // period is continuous and increasing; near sqrt 2 it diverges
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if integrate(mid, NODES) < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Tabulated period function.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodTable {
    pub p_values: Vec<f64>,
    pub periods: Vec<f64>,
    pub quadrature_error: Vec<f64>,
}

impl PeriodTable {
    /// `n` evenly spaced momenta in `[p_min, p_max]`.
    pub fn new(p_min: f64, p_max: f64, n: usize) -> Result<Self> {
        if n < 2 || !(p_max > p_min) {
            return Err(Error::invalid("period table needs n >= 2 and p_max > p_min"));
        }
        let p_values: Vec<f64> = (0..n).map(|k| p_min + (p_max - p_min) * k as f64 / (n - 1) as f64).collect();
        let mut periods = Vec::with_capacity(n);
        let mut quadrature_error = Vec::with_capacity(n);
        for &p in &p_values {
            let (t, e) = period_estimate(p)?;
            periods.push(t);
            quadrature_error.push(e);
        }
        Ok(Self {
            p_values,
            periods,
            quadrature_error,
        })
    }

    pub fn is_strictly_increasing(&self) -> bool {
        self.periods.windows(2).all(|w| w[1] > w[0])
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.p_values
            .iter()
            .zip(&self.periods)
            .zip(&self.quadrature_error)
            .map(|((&p, &t), &e)| vec![p, t, e])
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_amplitude_limit() {
        let t = period(0.01).unwrap();
        assert!((t - PERIOD_LIMIT).abs() < 1e-2);
        assert!(t > PERIOD_LIMIT);
    }

    #[test]
    fn turning_point_solves_energy_equation() {
        for &p in &[1e-4, 0.01, 0.5, 1.0, 1.41] {
            let r = turning_point(p);
            assert!((super::super::quartic_g(r) - 0.5 * p * p).abs() < 1e-15 + 1e-13 * p * p);
        }
    }

    #[test]
    fn quadrature_agrees_with_first_return() {
        let s = FlowSettings::default();
        for &p in &[0.2, 0.5, 1.0, 1.3] {
            let (t, err) = period_estimate(p).unwrap();
            let r = period_by_return(p, &s).unwrap();
            assert!((t - r).abs() < 1e-8, "p0={p}: {t} vs {r}");
            assert!(err < 1e-10);
        }
    }

    #[test]
    fn diverges_near_escape() {
        assert!(period(1.4).unwrap() > 10.0 - 5.0);
        assert!(period(1.4142).unwrap() > period(1.4).unwrap());
        assert!(period(1.41421).unwrap() > 10.0);
    }

    #[test]
    fn out_of_range() {
        assert!(matches!(period(0.0), Err(Error::OutOfRange(_))));
        assert!(matches!(period(1.5), Err(Error::OutOfRange(_))));
        assert!(matches!(period(-0.1), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn inverse_round_trip() {
        for &p in &[0.1, 0.8, 1.2] {
            let t = period(p).unwrap();
            assert!((period_inverse(t).unwrap() - p).abs() < 1e-10);
        }
        assert!(period_inverse(2.0).is_err());
    }

    #[test]
    fn table_is_increasing() {
        let table = PeriodTable::new(0.05, 1.40, 50).unwrap();
        assert!(table.is_strictly_increasing());
        assert!(table.periods.iter().all(|&t| t > PERIOD_LIMIT));
    }
}
