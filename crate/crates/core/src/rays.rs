//! Hamiltonian rays, their action, two-point shooting, backward
//! characteristics, the foot map `pi_w` and sampling of the graph of
//! optimal ray endpoints.

use std::io::Write;

use crate::error::{Error, Result};
use crate::flow::{flow, flow_end, flow_end_with_action, flow_end_with_tangent, FlowSettings, Trajectory};
use crate::grid::{GridProfile, Layout};
use crate::hamiltonian::{Hamiltonian, StructuralBounds};

pub const SHOOT_TOL: f64 = 1e-8;
const SHOOT_MAX_ITER: usize = 200;

/// A solution of the Hamiltonian system on `[0, T]` with its action.
#[derive(Debug, Clone)]
pub struct Ray {
    pub trajectory: Trajectory,
    pub action: f64,
}

impl Ray {
    pub fn start(&self) -> (f64, f64) {
        let s = self.trajectory.samples[0];
        (s.q, s.p)
    }

    pub fn end(&self) -> (f64, f64) {
        let s = self.trajectory.samples.last().unwrap();
        (s.q, s.p)
    }
}

/// Composite Simpson rule on equally spaced samples, with a 3/8 panel at
/// the end when the number of intervals is odd.
pub fn simpson(values: &[f64], step: f64) -> f64 {
    let n = values.len().saturating_sub(1);
    match n {
        0 => 0.0,
        1 => 0.5 * step * (values[0] + values[1]),
        2 => step / 3.0 * (values[0] + 4.0 * values[1] + values[2]),
        _ => {
            let (even, tail) = if n % 2 == 0 { (n, None) } else { (n - 3, Some(n - 3)) };
            let mut sum = 0.0;
            for k in (0..even).step_by(2) {
                sum += values[k] + 4.0 * values[k + 1] + values[k + 2];
            }
            sum *= step / 3.0;
            if let Some(k) = tail {
                sum += 3.0 * step / 8.0 * (values[k] + 3.0 * values[k + 1] + 3.0 * values[k + 2] + values[k + 3]);
            }
            sum
        }
    }
}

/// The action `int L(q, q') ds` along a stored orbit by two quadratures:
/// the Lagrangian form with `q' = dH/dp`, and the Hamiltonian form
/// `[p q] + int (q dH/dx - H) ds`, obtained from `int p dq` by parts.
pub fn action_forms<H: Hamiltonian + ?Sized>(h: &H, tr: &Trajectory) -> Result<(f64, f64)> {
    let step = if tr.samples.len() > 1 {
        tr.samples[1].t - tr.samples[0].t
    } else {
        0.0
    };
    let mut lag = Vec::with_capacity(tr.samples.len());
    let mut ham = Vec::with_capacity(tr.samples.len());
    for s in &tr.samples {
        let e = h.eval(s.q, s.p);
        lag.push(h.legendre(s.q, e.dp)?);
        ham.push(s.q * e.dx - e.value);
    }
    let first = tr.samples[0];
    let last = tr.samples.last().unwrap();
    let l_form = simpson(&lag, step);
    let h_form = last.p * last.q - first.p * first.q + simpson(&ham, step);
    Ok((l_form, h_form))
}

/// Action of a stored orbit (Lagrangian form).
pub fn action<H: Hamiltonian + ?Sized>(h: &H, tr: &Trajectory) -> Result<f64> {
    Ok(action_forms(h, tr)?.0)
}

fn make_ray<H: Hamiltonian + ?Sized>(h: &H, trajectory: Trajectory) -> Result<Ray> {
    let action = action(h, &trajectory)?;
    Ok(Ray { trajectory, action })
}

/// Two-point shooting with cached structural bounds.
pub struct Shooter<'a, H: Hamiltonian + ?Sized> {
    h: &'a H,
    bounds: StructuralBounds,
    pub settings: FlowSettings,
}

impl<'a, H: Hamiltonian + ?Sized> Shooter<'a, H> {
    pub fn new(h: &'a H, settings: FlowSettings) -> Result<Self> {
        Ok(Self {
            h,
            bounds: StructuralBounds::new(h)?,
            settings,
        })
    }

    pub fn bounds(&self) -> &StructuralBounds {
        &self.bounds
    }

    /// Momentum bracket at `x_o` for rays whose mean speed over `[0, T]`
    /// may be anywhere in `[lo_speed, hi_speed]`: on a level `c` with
    /// `v(c) <= lo_speed` and `V(c) >= hi_speed`, rays from the upper
    /// branch stay faster than `V(c)` and rays from the lower branch slower
    /// than `v(c)`.
    pub fn momentum_bracket(&self, x_o: f64, lo_speed: f64, hi_speed: f64) -> Result<(f64, f64)> {
        let mut c = self.bounds.critical_level + 1.0;
        for _ in 0..200 {
            let (v, big_v) = self.bounds.speed_bounds(self.h, c)?;
            if v <= lo_speed && big_v >= hi_speed {
                return self.bounds.level_momenta(self.h, x_o, c);
            }
            c = self.bounds.critical_level + 2.0 * (c - self.bounds.critical_level);
        }
        Err(Error::invalid("no energy level brackets the requested speeds"))
    }

    /// A ray with `q(0) = x_o` and `|q(T) - x_t| <= 1e-8`.
    pub fn shoot(&self, horizon: f64, x_o: f64, x_t: f64) -> Result<Ray> {
        let p = self.shoot_momentum(horizon, x_o, x_t)?;
        make_ray(self.h, flow(self.h, horizon, x_o, p, &self.settings)?)
    }

    /// Initial momentum of a ray from `x_o` to `x_t` in time `T`.
    pub fn shoot_momentum(&self, horizon: f64, x_o: f64, x_t: f64) -> Result<f64> {
        if !(horizon > 0.0) {
            return Err(Error::invalid(format!("horizon must be positive, got {horizon}")));
        }
        let speed = (x_t - x_o) / horizon;
        let (mut lo, mut hi) = self.momentum_bracket(x_o, speed, speed)?;
        let residual = |p: f64| -> Result<(f64, f64)> {
            let (end, m) = flow_end_with_tangent(self.h, horizon, x_o, p, &self.settings)?;
            Ok((end.q - x_t, m[0][1]))
        };
        let (f_lo, _) = residual(lo)?;
        let (f_hi, _) = residual(hi)?;
        if f_lo.abs() <= SHOOT_TOL {
            return Ok(lo);
        }
        if f_hi.abs() <= SHOOT_TOL {
            return Ok(hi);
        }
        if f_lo > 0.0 || f_hi < 0.0 {
            return Err(Error::ShootFailed {
                residual: f_lo.abs().min(f_hi.abs()),
                iterations: 0,
                lo,
                hi,
            });
        }
        let mut p = 0.5 * (lo + hi);
        let mut last = f64::INFINITY;
        for _ in 0..SHOOT_MAX_ITER {
            let (f, df) = residual(p)?;
            last = f.abs();
            if last <= SHOOT_TOL {
                return Ok(p);
            }
            if f < 0.0 {
                lo = p;
            } else {
                hi = p;
            }
            let newton = p - f / df;
            p = if df.is_finite() && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            if hi - lo < 1e-15 * (1.0 + p.abs()) {
                break;
            }
        }
        Err(Error::ShootFailed {
            residual: last,
            iterations: SHOOT_MAX_ITER,
            lo,
            hi,
        })
    }
}

/// One-shot version of [`Shooter::shoot`].
pub fn shoot<H: Hamiltonian + ?Sized>(h: &H, horizon: f64, x_o: f64, x_t: f64, settings: &FlowSettings) -> Result<Ray> {
    Shooter::new(h, *settings)?.shoot(horizon, x_o, x_t)
}

/// The ray ending at `(x, p_t)` at time `T`, sampled on `[0, T]`.
pub fn backward_characteristic<H: Hamiltonian + ?Sized>(
    h: &H,
    horizon: f64,
    x: f64,
    p_t: f64,
    settings: &FlowSettings,
) -> Result<Ray> {
    if !(horizon > 0.0) {
        return Err(Error::invalid(format!("horizon must be positive, got {horizon}")));
    }
    let mut tr = flow(h, -horizon, x, p_t, settings)?;
    tr.shift_time(horizon);
    make_ray(h, tr)
}

/// Which one-sided trace of the terminal profile starts the characteristic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Trace {
    /// `w(x-)`: the minimal backward characteristic.
    #[default]
    Left,
    /// `w(x+)`: the maximal backward characteristic.
    Right,
}

/// `pi_w` at the nodes of the grid of the cell profile `w`: the foot at
/// time 0 of the backward characteristic from `(T, x)` with `p(T) = w(x-)`.
pub fn pi_map<H: Hamiltonian + ?Sized>(h: &H, horizon: f64, w: &GridProfile, settings: &FlowSettings) -> Result<GridProfile> {
    pi_map_with(h, horizon, w, Trace::Left, settings)
}

pub fn pi_map_with<H: Hamiltonian + ?Sized>(
    h: &H,
    horizon: f64,
    w: &GridProfile,
    trace: Trace,
    settings: &FlowSettings,
) -> Result<GridProfile> {
    if w.layout() != Layout::Cells {
        return Err(Error::GridMismatch("pi_w needs a cell profile (use the derivative of W)".into()));
    }
    if !(horizon > 0.0) {
        return Err(Error::invalid(format!("horizon must be positive, got {horizon}")));
    }
    feet(h, horizon, w.x_min(), w.x_max(), w.cell_count(), settings, |j, _| match trace {
        Trace::Left => w.left_trace(j),
        Trace::Right => w.right_trace(j),
    })
}

/// `pi_w` on the nodes of an `n`-cell grid for a profile known pointwise:
/// `trace(x)` is the terminal momentum `w(x-)`.
pub fn pi_map_from_trace<H: Hamiltonian + ?Sized>(
    h: &H,
    horizon: f64,
    x_min: f64,
    x_max: f64,
    n: usize,
    trace: impl Fn(f64) -> f64,
    settings: &FlowSettings,
) -> Result<GridProfile> {
    if !(horizon > 0.0) {
        return Err(Error::invalid(format!("horizon must be positive, got {horizon}")));
    }
    if n == 0 || !(x_max > x_min) {
        return Err(Error::invalid("pi_w needs a nonempty grid"));
    }
    feet(h, horizon, x_min, x_max, n, settings, |_, x| trace(x))
}

fn feet<H: Hamiltonian + ?Sized>(
    h: &H,
    horizon: f64,
    x_min: f64,
    x_max: f64,
    n: usize,
    settings: &FlowSettings,
    trace: impl Fn(usize, f64) -> f64,
) -> Result<GridProfile> {
    let dx = (x_max - x_min) / n as f64;
    let feet = (0..=n)
        .map(|j| {
            let x = x_min + j as f64 * dx;
            Ok(flow_end(h, -horizon, x, trace(j, x), settings)?.q)
        })
        .collect::<Result<Vec<_>>>()?;
    GridProfile::nodes(x_min, x_max, feet)
}

/// Largest decrease between neighbouring samples (0 for a nondecreasing profile).
pub fn monotonicity_defect(profile: &GridProfile) -> f64 {
    profile
        .values()
        .windows(2)
        .fold(0.0, |m, w| m.max(w[0] - w[1]))
}

/// Terminal profile evaluated with linear extension beyond the grid, the
/// extension implied by outflow boundaries of the Hamilton-Jacobi solver.
pub fn terminal_value(w: &GridProfile, x: f64) -> f64 {
    let v = w.values();
    let n = v.len();
    let first = w.position(0);
    let last = w.position(n - 1);
    if x < first {
        v[0] - (first - x) * (v[1] - v[0]) / w.dx()
    } else if x > last {
        v[n - 1] + (x - last) * (v[n - 1] - v[n - 2]) / w.dx()
    } else {
        w.interpolate(x)
    }
}

/// Settings for brute-force scans over initial momenta.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanSettings {
    pub flow: FlowSettings,
    /// Number of momenta per starting point.
    pub p_samples: usize,
    /// Half-width of the speed range scanned, in units of the ray speed
    /// bound; values above 1 leave a margin.
    pub speed_margin: f64,
    /// Pairs within `rel_tol (1 + |U*(x_o)|)` of the best value are kept.
    pub rel_tol: f64,
    /// Every `stride`-th node of the output grid becomes a row.
    pub stride: usize,
}

impl Default for ScanSettings {
    fn default() -> Self {
        Self {
            flow: FlowSettings::with_dt(1e-3),
            p_samples: 2001,
            speed_margin: 1.25,
            rel_tol: 1e-4,
            stride: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphPair {
    pub x_o: f64,
    pub x_t: f64,
    pub p_o: f64,
    pub action: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphRow {
    pub x_o: f64,
    /// Best value `W(x_T) - action` over the scanned rays.
    pub best: f64,
    pub u_star: f64,
    /// Smallest and largest endpoint among the kept pairs.
    pub x_t_min: f64,
    pub x_t_max: f64,
    pub kept: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraphDiagnostics {
    /// Largest decrease of the lower and upper endpoint envelopes along `x_o`.
    pub monotone_defect: f64,
    /// Endpoint spacing of the momentum scan; defects below it are resolution effects.
    pub resolution: f64,
    /// `max |x_o - x_T| / T` over kept pairs.
    pub max_mean_speed: f64,
    /// `max |best - U*|` over rows.
    pub max_gap_to_u_star: f64,
    /// Rows whose kept endpoints span more than a few scan steps: a single
    /// starting point feeding an interval of endpoints.
    pub fan_rows: Vec<usize>,
    pub empty_rows: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraphSample {
    pub pairs: Vec<GraphPair>,
    pub rows: Vec<GraphRow>,
    pub diagnostics: GraphDiagnostics,
}

impl GraphSample {
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        crate::io::write_numeric(
            out,
            &["x_o", "x_T", "p_o", "action"],
            self.pairs.iter().map(|p| vec![p.x_o, p.x_t, p.p_o, p.action]),
        )
    }
}

struct ScanPoint {
    p: f64,
    x_t: f64,
    action: f64,
    value: f64,
}

fn scan_row<H: Hamiltonian + ?Sized>(
    h: &H,
    shooter: &Shooter<'_, H>,
    horizon: f64,
    w: &GridProfile,
    x_o: f64,
    speed: f64,
    settings: &ScanSettings,
) -> Result<Vec<ScanPoint>> {
    let (lo, hi) = shooter.momentum_bracket(x_o, -speed, speed)?;
    let n = settings.p_samples.max(2);
    (0..n)
        .map(|k| {
            let p = lo + (hi - lo) * k as f64 / (n - 1) as f64;
            let (end, action) = flow_end_with_action(h, horizon, x_o, p, &settings.flow)?;
            Ok(ScanPoint {
                p,
                x_t: end.q,
                action,
                value: terminal_value(w, end.q) - action,
            })
        })
        .collect()
}

/// Mean ray speed to scan: the ray speed bound for the slope of `W`, with margin.
fn scan_speed<H: Hamiltonian + ?Sized>(h: &H, w: &GridProfile, settings: &ScanSettings) -> Result<f64> {
    let bound = crate::hamiltonian::ray_speed_bound(h, w)?;
    Ok(settings.speed_margin * bound.value.max(1e-3))
}

/// Samples the graph of optimal ray endpoints for terminal profile `W`
/// (node values) by scanning a grid of initial momenta at each node of
/// `u_star`.
pub fn sample_graph<H: Hamiltonian + ?Sized>(
    h: &H,
    horizon: f64,
    w: &GridProfile,
    u_star: &GridProfile,
    settings: &ScanSettings,
) -> Result<GraphSample> {
    if w.layout() != Layout::Nodes || u_star.layout() != Layout::Nodes {
        return Err(Error::GridMismatch("sample_graph expects node profiles".into()));
    }
    let shooter = Shooter::new(h, settings.flow)?;
    let speed = scan_speed(h, w, settings)?;
    let mut pairs = Vec::new();
    let mut rows = Vec::new();
    let mut empty_rows = Vec::new();
    let mut resolution: f64 = 0.0;
    for j in (0..u_star.len()).step_by(settings.stride.max(1)) {
        let x_o = u_star.position(j);
        let scan = scan_row(h, &shooter, horizon, w, x_o, speed, settings)?;
        let best = scan.iter().map(|s| s.value).fold(f64::NEG_INFINITY, f64::max);
        let us = u_star.values()[j];
        let tol = settings.rel_tol * (1.0 + us.abs());
        let kept: Vec<&ScanPoint> = scan.iter().filter(|s| s.value >= best - tol).collect();
        if let Some(k) = scan.iter().position(|s| s.value == best) {
            let lo = scan[k.saturating_sub(1)].x_t;
            let hi = scan[(k + 1).min(scan.len() - 1)].x_t;
            resolution = resolution.max(0.5 * (hi - lo).abs());
        }
        if kept.is_empty() || !best.is_finite() {
            empty_rows.push(rows.len());
        }
        let x_t_min = kept.iter().map(|s| s.x_t).fold(f64::INFINITY, f64::min);
        let x_t_max = kept.iter().map(|s| s.x_t).fold(f64::NEG_INFINITY, f64::max);
        for s in &kept {
            pairs.push(GraphPair {
                x_o,
                x_t: s.x_t,
                p_o: s.p,
                action: s.action,
            });
        }
        rows.push(GraphRow {
            x_o,
            best,
            u_star: us,
            x_t_min,
            x_t_max,
            kept: kept.len(),
        });
    }
    let monotone_defect = rows.windows(2).fold(0.0f64, |m, r| {
        m.max(r[0].x_t_min - r[1].x_t_min).max(r[0].x_t_max - r[1].x_t_max)
    });
    let fan_rows = rows
        .iter()
        .enumerate()
        .filter(|(_, r)| r.x_t_max - r.x_t_min > 10.0 * resolution.max(1e-12))
        .map(|(i, _)| i)
        .collect();
    let diagnostics = GraphDiagnostics {
        monotone_defect,
        resolution,
        max_mean_speed: pairs.iter().map(|p| (p.x_o - p.x_t).abs() / horizon).fold(0.0, f64::max),
        max_gap_to_u_star: rows.iter().map(|r| (r.best - r.u_star).abs()).fold(0.0, f64::max),
        fan_rows,
        empty_rows,
    };
    Ok(GraphSample {
        pairs,
        rows,
        diagnostics,
    })
}

/// The minimal inverse design by direct enumeration: at each node of the
/// grid of `w`, the best `W(q(T)) - action` over a grid of initial momenta.
pub fn u_star_by_rays<H: Hamiltonian + ?Sized>(
    h: &H,
    horizon: f64,
    w: &GridProfile,
    settings: &ScanSettings,
) -> Result<GridProfile> {
    if w.layout() != Layout::Nodes {
        return Err(Error::GridMismatch("terminal profile W must be node values".into()));
    }
    let shooter = Shooter::new(h, settings.flow)?;
    let speed = scan_speed(h, w, settings)?;
    let values = (0..w.len())
        .map(|j| {
            let scan = scan_row(h, &shooter, horizon, w, w.position(j), speed, settings)?;
            Ok(scan.iter().map(|s| s.value).fold(f64::NEG_INFINITY, f64::max))
        })
        .collect::<Result<Vec<_>>>()?;
    w.with_values(values)
}

pub fn write_pi_csv<W: Write>(pi: &GridProfile, out: W) -> csv::Result<()> {
    crate::io::write_numeric(
        out,
        &["x", "pi"],
        pi.positions().into_iter().zip(pi.values()).map(|(x, &v)| vec![x, v]),
    )
}
