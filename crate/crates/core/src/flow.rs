//! Fixed-step RK4 integration of the Hamiltonian system
//! `q' = dH/dp`, `p' = -dH/dx`, with monitoring of the energy `H(q, p)`.
//!
//! Negative times are handled by integrating the reversed field
//! `(-dH/dp, dH/dx)` with a positive step.

use std::io::Write;

use crate::error::{Error, Result};
use crate::hamiltonian::Hamiltonian;

pub const DEFAULT_DT: f64 = 1e-4;
pub const DEFAULT_ENERGY_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseState {
    pub q: f64,
    pub p: f64,
    pub t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowSettings {
    /// Upper bound on the step; the actual step divides the horizon evenly.
    pub dt: f64,
    /// Allowed energy drift, relative to `max(1, |H(q0, p0)|)`.
    pub energy_tol: f64,
}

impl Default for FlowSettings {
    fn default() -> Self {
        Self {
            dt: DEFAULT_DT,
            energy_tol: DEFAULT_ENERGY_TOL,
        }
    }
}

impl FlowSettings {
    pub fn with_dt(dt: f64) -> Self {
        Self {
            dt,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::invalid(format!("time step must be positive, got {}", self.dt)));
        }
        if !(self.energy_tol > 0.0) {
            return Err(Error::invalid("energy tolerance must be positive"));
        }
        Ok(())
    }

    /// Number of steps and step length covering `|t|`.
    pub fn steps_for(&self, t: f64) -> (usize, f64) {
        let span = t.abs();
        if span == 0.0 {
            return (0, 0.0);
        }
        let n = (span / self.dt).ceil().max(1.0) as usize;
        (n, span / n as f64)
    }
}

/// An integrated orbit. Samples are stored in increasing time order, so for
/// a backward flow the initial state is the last sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<PhaseState>,
    pub energy_drift: f64,
    pub step: f64,
    backward: bool,
}

impl Trajectory {
    /// State at time 0.
    pub fn initial(&self) -> PhaseState {
        if self.backward {
            *self.samples.last().unwrap()
        } else {
            self.samples[0]
        }
    }

    /// State at the target time.
    pub fn terminal(&self) -> PhaseState {
        if self.backward {
            self.samples[0]
        } else {
            *self.samples.last().unwrap()
        }
    }

    pub fn is_backward(&self) -> bool {
        self.backward
    }

    pub fn duration(&self) -> f64 {
        self.samples.last().unwrap().t - self.samples[0].t
    }

    /// Shifts all time stamps by `offset`.
    pub fn shift_time(&mut self, offset: f64) {
        for s in &mut self.samples {
            s.t += offset;
        }
    }

    pub fn write_csv<H: Hamiltonian, W: Write>(&self, h: &H, out: W) -> csv::Result<()> {
        crate::io::write_numeric(
            out,
            &["t", "q", "p", "H"],
            self.samples.iter().map(|s| vec![s.t, s.q, s.p, h.value(s.q, s.p)]),
        )
    }
}

#[inline]
fn field<H: Hamiltonian + ?Sized>(h: &H, q: f64, p: f64, sign: f64) -> (f64, f64) {
    let e = h.eval(q, p);
    (sign * e.dp, -sign * e.dx)
}

#[inline]
fn rk4<H: Hamiltonian + ?Sized>(h: &H, q: f64, p: f64, step: f64, sign: f64) -> (f64, f64) {
    let (k1q, k1p) = field(h, q, p, sign);
    let (k2q, k2p) = field(h, q + 0.5 * step * k1q, p + 0.5 * step * k1p, sign);
    let (k3q, k3p) = field(h, q + 0.5 * step * k2q, p + 0.5 * step * k2p, sign);
    let (k4q, k4p) = field(h, q + step * k3q, p + step * k3p, sign);
    (
        q + step / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q),
        p + step / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p),
    )
}

fn check_start(q0: f64, p0: f64, t: f64) -> Result<()> {
    if !(q0.is_finite() && p0.is_finite() && t.is_finite()) {
        return Err(Error::invalid("flow start and time must be finite"));
    }
    Ok(())
}

/// Core loop: calls `visit` on every state including the first, returns the
/// final state and the observed drift.
fn integrate<H, F>(h: &H, t: f64, q0: f64, p0: f64, settings: &FlowSettings, mut visit: F) -> Result<(PhaseState, f64)>
where
    H: Hamiltonian + ?Sized,
    F: FnMut(PhaseState),
{
    settings.validate()?;
    check_start(q0, p0, t)?;
    let (n, step) = settings.steps_for(t);
    let sign = if t < 0.0 { -1.0 } else { 1.0 };
    let e0 = h.value(q0, p0);
    let tolerance = settings.energy_tol * e0.abs().max(1.0);
    let mut drift: f64 = 0.0;
    let (mut q, mut p) = (q0, p0);
    visit(PhaseState { q, p, t: 0.0 });
    for k in 1..=n {
        (q, p) = rk4(h, q, p, step, sign);
        let time = if k == n { t } else { sign * k as f64 * step };
        drift = drift.max((h.value(q, p) - e0).abs());
        if !(drift <= tolerance) {
            return Err(Error::EnergyDriftExceeded { drift, tolerance });
        }
        visit(PhaseState { q, p, t: time });
    }
    Ok((PhaseState { q, p, t }, drift))
}

/// Integrates from `(q0, p0)` at time 0 to time `t` and keeps every step.
pub fn flow<H: Hamiltonian + ?Sized>(h: &H, t: f64, q0: f64, p0: f64, settings: &FlowSettings) -> Result<Trajectory> {
    let mut samples = Vec::with_capacity(settings.steps_for(t).0 + 1);
    let (_, drift) = integrate(h, t, q0, p0, settings, |s| samples.push(s))?;
    let (_, step) = settings.steps_for(t);
    let backward = t < 0.0;
    if backward {
        samples.reverse();
    }
    Ok(Trajectory {
        samples,
        energy_drift: drift,
        step,
        backward,
    })
}

/// The flow map: final state only, no storage.
pub fn flow_end<H: Hamiltonian + ?Sized>(h: &H, t: f64, q0: f64, p0: f64, settings: &FlowSettings) -> Result<PhaseState> {
    Ok(integrate(h, t, q0, p0, settings, |_| {})?.0)
}

/// Like [`flow_end`] but also accumulates the action `int_0^t L ds`, using
/// `L = p dH/dp - H` along the orbit as a third RK4 component. For negative
/// `t` the integral runs over `[t, 0]`.
pub fn flow_end_with_action<H: Hamiltonian + ?Sized>(
    h: &H,
    t: f64,
    q0: f64,
    p0: f64,
    settings: &FlowSettings,
) -> Result<(PhaseState, f64)> {
    settings.validate()?;
    check_start(q0, p0, t)?;
    let (n, step) = settings.steps_for(t);
    let sign = if t < 0.0 { -1.0 } else { 1.0 };
    let lag = |q: f64, p: f64| {
        let e = h.eval(q, p);
        p * e.dp - e.value
    };
    let e0 = h.value(q0, p0);
    let tolerance = settings.energy_tol * e0.abs().max(1.0);
    let (mut q, mut p, mut j) = (q0, p0, 0.0);
    let mut drift: f64 = 0.0;
    for _ in 0..n {
        let (k1q, k1p) = field(h, q, p, sign);
        let l1 = lag(q, p);
        let (q2, p2) = (q + 0.5 * step * k1q, p + 0.5 * step * k1p);
        let (k2q, k2p) = field(h, q2, p2, sign);
        let l2 = lag(q2, p2);
        let (q3, p3) = (q + 0.5 * step * k2q, p + 0.5 * step * k2p);
        let (k3q, k3p) = field(h, q3, p3, sign);
        let l3 = lag(q3, p3);
        let (q4, p4) = (q + step * k3q, p + step * k3p);
        let (k4q, k4p) = field(h, q4, p4, sign);
        let l4 = lag(q4, p4);
        q += step / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
        p += step / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
        j += step / 6.0 * (l1 + 2.0 * l2 + 2.0 * l3 + l4);
        drift = drift.max((h.value(q, p) - e0).abs());
        if !(drift <= tolerance) {
            return Err(Error::EnergyDriftExceeded { drift, tolerance });
        }
    }
    Ok((PhaseState { q, p, t }, j))
}

/// `d(q(t), p(t)) / d(q0, p0)` by central differences with step
/// `1e-6 (1 + |q0| + |p0|)`. Rows are `(q, p)`, columns `(q0, p0)`.
pub fn flow_jacobian<H: Hamiltonian + ?Sized>(
    h: &H,
    t: f64,
    q0: f64,
    p0: f64,
    settings: &FlowSettings,
) -> Result<[[f64; 2]; 2]> {
    let eps = 1e-6 * (1.0 + q0.abs() + p0.abs());
    let qp = flow_end(h, t, q0 + eps, p0, settings)?;
    let qm = flow_end(h, t, q0 - eps, p0, settings)?;
    let pp = flow_end(h, t, q0, p0 + eps, settings)?;
    let pm = flow_end(h, t, q0, p0 - eps, settings)?;
    let d = 2.0 * eps;
    Ok([
        [(qp.q - qm.q) / d, (pp.q - pm.q) / d],
        [(qp.p - qm.p) / d, (pp.p - pm.p) / d],
    ])
}

/// Final state together with the exact derivative of the discrete flow map,
/// obtained by integrating the variational equations alongside the orbit.
pub fn flow_end_with_tangent<H: Hamiltonian + ?Sized>(
    h: &H,
    t: f64,
    q0: f64,
    p0: f64,
    settings: &FlowSettings,
) -> Result<(PhaseState, [[f64; 2]; 2])> {
    settings.validate()?;
    check_start(q0, p0, t)?;
    let (n, step) = settings.steps_for(t);
    let sign = if t < 0.0 { -1.0 } else { 1.0 };
    // state: q, p, then the 2x2 tangent matrix row-major
    let rhs = |y: &[f64; 6]| -> [f64; 6] {
        let e = h.eval(y[0], y[1]);
        let hs = h.hessian(y[0], y[1]);
        let a = [[sign * hs.xp, sign * hs.pp], [-sign * hs.xx, -sign * hs.xp]];
        [
            sign * e.dp,
            -sign * e.dx,
            a[0][0] * y[2] + a[0][1] * y[4],
            a[0][0] * y[3] + a[0][1] * y[5],
            a[1][0] * y[2] + a[1][1] * y[4],
            a[1][0] * y[3] + a[1][1] * y[5],
        ]
    };
    let axpy = |y: &[f64; 6], k: &[f64; 6], s: f64| -> [f64; 6] { std::array::from_fn(|i| y[i] + s * k[i]) };
    let e0 = h.value(q0, p0);
    let tolerance = settings.energy_tol * e0.abs().max(1.0);
    let mut y = [q0, p0, 1.0, 0.0, 0.0, 1.0];
    for _ in 0..n {
        let k1 = rhs(&y);
        let k2 = rhs(&axpy(&y, &k1, 0.5 * step));
        let k3 = rhs(&axpy(&y, &k2, 0.5 * step));
        let k4 = rhs(&axpy(&y, &k3, step));
        for i in 0..6 {
            y[i] += step / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        let drift = (h.value(y[0], y[1]) - e0).abs();
        if !(drift <= tolerance) {
            return Err(Error::EnergyDriftExceeded { drift, tolerance });
        }
    }
    Ok((PhaseState { q: y[0], p: y[1], t }, [[y[2], y[3]], [y[4], y[5]]]))
}
