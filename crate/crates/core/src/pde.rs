//! Finite volume solver for `u_t + (H(x, u))_x = 0` and the matching node
//! scheme for `U_t + H(x, U_x) = 0`.
//!
//! Both use the Godunov rule for a convex flux frozen at the interface
//! `x_{j}` between cells `j - 1` and `j`:
//! `min` of `H(x_j, .)` over `[a, b]` when `a <= b`, `max(H(a), H(b))`
//! otherwise. The conservation law scheme applies it to neighbouring cell
//! values, the Hamilton-Jacobi scheme to the one-sided slopes at a node,
//! which are the same numbers. With equal time steps, the discrete
//! derivative of the HJ solution therefore equals the CL solution.

use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::{derivative, GridProfile, Layout};
use crate::hamiltonian::{coercivity_lower_bound, Hamiltonian, Reversed};
use crate::io::{write_profile, write_table_file, Cell};

pub const DEFAULT_CFL: f64 = 0.45;
/// Blow-up is declared when `max |u|` exceeds this multiple of the a priori bound.
const BLOWUP_FACTOR: f64 = 10.0;
const SHOCK_FLOOR: f64 = 0.1;
const SHOCK_SLOPE_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HjScheme {
    LaxFriedrichs,
    #[default]
    Godunov,
    /// Second-order ENO slopes with the Godunov Hamiltonian and Heun
    /// time stepping. Not monotone; sharper on rarefaction corners.
    Eno2,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverSettings {
    pub cfl: f64,
    pub hj_scheme: HjScheme,
    /// Times in `(0, T]` at which profiles are stored, besides `0` and `T`.
    pub output_times: Vec<f64>,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            cfl: DEFAULT_CFL,
            hj_scheme: HjScheme::Godunov,
            output_times: Vec::new(),
        }
    }
}

impl SolverSettings {
    pub fn with_cfl(cfl: f64) -> Self {
        Self {
            cfl,
            ..Self::default()
        }
    }

    /// Stores `count` evenly spaced profiles after the initial one; the
    /// last is the profile at `horizon`, which is always stored.
    pub fn evenly_stored(mut self, horizon: f64, count: usize) -> Self {
        self.output_times = (1..count).map(|k| horizon * k as f64 / count as f64).collect();
        self
    }

    fn validate(&self, horizon: f64) -> Result<()> {
        if !(self.cfl > 0.0 && self.cfl < 1.0) {
            return Err(Error::invalid(format!("cfl must lie in (0, 1), got {}", self.cfl)));
        }
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::invalid(format!("time horizon must be positive, got {horizon}")));
        }
        Ok(())
    }

    fn stops(&self, horizon: f64) -> Vec<f64> {
        let mut stops: Vec<f64> = self
            .output_times
            .iter()
            .copied()
            .filter(|t| *t > 0.0 && *t < horizon * (1.0 - 1e-12))
            .collect();
        stops.push(horizon);
        stops.sort_by(f64::total_cmp);
        stops.dedup();
        stops
    }
}

/// Stored time slices of a solution.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeField {
    pub times: Vec<f64>,
    pub profiles: Vec<GridProfile>,
    /// For each stored time, the indices `i` of cells followed by a
    /// downward jump `u_i - u_{i+1}` above the threshold.
    pub shock_cells: Vec<Vec<usize>>,
    pub shock_threshold: f64,
    /// First time step at which any shock was flagged.
    pub first_shock_time: Option<f64>,
    pub steps: usize,
}

impl SpaceTimeField {
    pub fn last(&self) -> &GridProfile {
        self.profiles.last().unwrap()
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().unwrap()
    }

    /// Positions of the flagged jumps (the interface between cell `i` and `i + 1`).
    pub fn shock_positions(&self, k: usize) -> Vec<f64> {
        let p = &self.profiles[k];
        let dx = p.dx();
        self.shock_cells[k]
            .iter()
            .map(|&i| p.x_min() + (i + 1) as f64 * dx)
            .collect()
    }

    /// Writes one `x,<name>` file per stored time and an index
    /// `t,filename,shock_positions` (positions separated by `;`).
    pub fn write_dir(&self, dir: &Path, value_name: &str) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::Io {
            path: dir.display().to_string(),
            source: e,
        })?;
        let mut rows = Vec::with_capacity(self.times.len());
        for (k, (t, profile)) in self.times.iter().zip(&self.profiles).enumerate() {
            let name = format!("{value_name}_{k:04}.csv");
            write_profile(&dir.join(&name), profile, value_name)?;
            let shocks = self
                .shock_positions(k)
                .iter()
                .map(|x| crate::io::format_number(*x))
                .collect::<Vec<_>>()
                .join(";");
            rows.push(vec![Cell::Num(*t), Cell::Text(name), Cell::Text(shocks)]);
        }
        write_table_file(&dir.join("index.csv"), &["t", "filename", "shock_positions"], rows)
    }
}

/// Robust slope scale of the initial data: the 90th percentile of the
/// neighbour difference quotients.
pub fn slope_estimate(values: &[f64], dx: f64) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let mut slopes: Vec<f64> = values.windows(2).map(|w| (w[1] - w[0]).abs() / dx).collect();
    slopes.sort_by(f64::total_cmp);
    let k = ((slopes.len() - 1) as f64 * 0.9).round() as usize;
    slopes[k]
}

pub fn shock_threshold(dx: f64, lip_estimate: f64) -> f64 {
    (SHOCK_SLOPE_FACTOR * dx * lip_estimate).max(SHOCK_FLOOR)
}

fn shocks_in(values: &[f64], threshold: f64) -> Vec<usize> {
    values
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[0] - w[1] > threshold)
        .map(|(i, _)| i)
        .collect()
}

/// Smallest `r` with `H(x, +-r) > level` for all sampled `x`: every
/// momentum on or below the level set lies in `[-r, r]`.
pub fn level_radius<H: Hamiltonian + ?Sized>(h: &H, level: f64) -> f64 {
    let above = |r: f64| coercivity_lower_bound(h, r) > level;
    let mut hi = 1.0;
    while !above(hi) {
        hi *= 2.0;
        if hi > 1e12 {
            return f64::INFINITY;
        }
    }
    let mut lo = 0.0;
    for _ in 0..50 {
        let mid = 0.5 * (lo + hi);
        if above(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

#[inline]
fn godunov<H: Hamiltonian + ?Sized>(h: &H, x: f64, critical: f64, a: f64, b: f64) -> f64 {
    if a <= b {
        h.value(x, critical.clamp(a, b))
    } else {
        h.value(x, a).max(h.value(x, b))
    }
}

#[inline]
fn lax_friedrichs<H: Hamiltonian + ?Sized>(h: &H, x: f64, a: f64, b: f64) -> f64 {
    let alpha = h.speed(x, a).abs().max(h.speed(x, b).abs());
    h.value(x, 0.5 * (a + b)) - 0.5 * alpha * (b - a)
}

/// Shared stepping state. `cells` holds the conservation law unknowns,
/// equivalently the slopes of the HJ nodes. Interface `j` sits at
/// `x_min + j dx` between cells `j - 1` and `j`; the end interfaces see a
/// copy of the boundary cell on their outer side.
struct Stepper<'a, H: Hamiltonian + ?Sized> {
    h: &'a H,
    xs: Vec<f64>,
    critical: Vec<f64>,
    dx: f64,
    cfl: f64,
    bound: f64,
}

impl<'a, H: Hamiltonian + ?Sized> Stepper<'a, H> {
    fn new(h: &'a H, grid: &GridProfile, cells: &[f64], cfl: f64) -> Result<Self> {
        let n = cells.len();
        let dx = grid.dx();
        let xs: Vec<f64> = (0..=n).map(|j| grid.x_min() + j as f64 * dx).collect();
        let critical = xs
            .iter()
            .map(|&x| h.critical_momentum(x))
            .collect::<Result<Vec<_>>>()?;
        let level = cells
            .iter()
            .enumerate()
            .map(|(i, &u)| h.value(grid.x_min() + (i as f64 + 0.5) * dx, u).abs())
            .fold(0.0, f64::max);
        let max0 = cells.iter().fold(0.0f64, |m, u| m.max(u.abs()));
        let bound = level_radius(h, level).max(max0).max(1.0);
        Ok(Self {
            h,
            xs,
            critical,
            dx,
            cfl,
            bound,
        })
    }

    fn side_values(cells: &[f64], j: usize) -> (f64, f64) {
        let n = cells.len();
        let a = cells[j.saturating_sub(1)];
        let b = cells[j.min(n - 1)];
        (a, b)
    }

    fn stable_dt(&self, cells: &[f64]) -> f64 {
        let mut speed: f64 = 0.0;
        for j in 0..self.xs.len() {
            let (a, b) = Self::side_values(cells, j);
            speed = speed
                .max(self.h.speed(self.xs[j], a).abs())
                .max(self.h.speed(self.xs[j], b).abs());
        }
        self.cfl * self.dx / speed.max(1e-12)
    }

    fn check(&self, cells: &[f64], time: f64) -> Result<()> {
        let max_abs = cells.iter().fold(0.0f64, |m, u| m.max(u.abs()));
        if !(max_abs <= BLOWUP_FACTOR * self.bound) {
            return Err(Error::UnstableBlowup {
                time,
                max_abs,
                bound: BLOWUP_FACTOR * self.bound,
            });
        }
        Ok(())
    }

    fn numerical_hamiltonian(&self, cells: &[f64], j: usize, scheme: HjScheme) -> f64 {
        let (a, b) = match scheme {
            HjScheme::Eno2 => Self::eno_values(cells, j),
            _ => Self::side_values(cells, j),
        };
        match scheme {
            HjScheme::Godunov | HjScheme::Eno2 => godunov(self.h, self.xs[j], self.critical[j], a, b),
            HjScheme::LaxFriedrichs => lax_friedrichs(self.h, self.xs[j], a, b),
        }
    }

    /// One-sided slopes at node `j` corrected by the smoother of the two
    /// neighbouring second differences.
    fn eno_values(cells: &[f64], j: usize) -> (f64, f64) {
        let n = cells.len() as isize;
        let c = |k: isize| cells[k.clamp(0, n - 1) as usize];
        let j = j as isize;
        let smaller = |x: f64, y: f64| if x.abs() <= y.abs() { x } else { y };
        let left = c(j - 1) + 0.5 * smaller(c(j - 1) - c(j - 2), c(j) - c(j - 1));
        let right = c(j) - 0.5 * smaller(c(j) - c(j - 1), c(j + 1) - c(j));
        (left, right)
    }
}

/// Solves the conservation law from cell averages `u0` up to time `horizon`.
/// Boundaries are outflow (constant extrapolation).
pub fn evolve_cl<H: Hamiltonian + ?Sized>(
    h: &H,
    u0: &GridProfile,
    horizon: f64,
    settings: &SolverSettings,
) -> Result<SpaceTimeField> {
    settings.validate(horizon)?;
    if u0.layout() != Layout::Cells {
        return Err(Error::GridMismatch("conservation law data must be cell averages".into()));
    }
    let mut u = u0.values().to_vec();
    let stepper = Stepper::new(h, u0, &u, settings.cfl)?;
    let threshold = shock_threshold(u0.dx(), slope_estimate(&u, u0.dx()));
    let mut field = SpaceTimeField {
        times: vec![0.0],
        profiles: vec![u0.clone()],
        shock_cells: vec![shocks_in(&u, threshold)],
        shock_threshold: threshold,
        first_shock_time: None,
        steps: 0,
    };
    if !field.shock_cells[0].is_empty() {
        field.first_shock_time = Some(0.0);
    }
    let mut flux = vec![0.0; u.len() + 1];
    let mut t = 0.0;
    let ratio_base = 1.0 / u0.dx();
    for stop in settings.stops(horizon) {
        while t < stop {
            let mut dt = stepper.stable_dt(&u);
            if t + dt >= stop * (1.0 - 1e-14) {
                dt = stop - t;
            }
            for (j, f) in flux.iter_mut().enumerate() {
                *f = stepper.numerical_hamiltonian(&u, j, HjScheme::Godunov);
            }
            for (i, ui) in u.iter_mut().enumerate() {
                *ui -= dt * ratio_base * (flux[i + 1] - flux[i]);
            }
            t = if dt == stop - t { stop } else { t + dt };
            field.steps += 1;
            stepper.check(&u, t)?;
            if field.first_shock_time.is_none() && u.windows(2).any(|w| w[0] - w[1] > threshold) {
                field.first_shock_time = Some(t);
            }
        }
        field.times.push(stop);
        field.shock_cells.push(shocks_in(&u, threshold));
        field.profiles.push(u0.with_values(u.clone())?);
    }
    Ok(field)
}

/// Solves the Hamilton-Jacobi equation from node values `u0`. Stored
/// profiles are node values; shocks are flagged on the slopes.
pub fn evolve_hj<H: Hamiltonian + ?Sized>(
    h: &H,
    u0: &GridProfile,
    horizon: f64,
    settings: &SolverSettings,
) -> Result<SpaceTimeField> {
    settings.validate(horizon)?;
    if u0.layout() != Layout::Nodes {
        return Err(Error::GridMismatch("Hamilton-Jacobi data must be node values".into()));
    }
    let mut big_u = u0.values().to_vec();
    let mut slopes = derivative(u0).into_values();
    let cells = derivative(u0);
    let stepper = Stepper::new(h, &cells, &slopes, settings.cfl)?;
    let dx = u0.dx();
    let threshold = shock_threshold(dx, slope_estimate(&slopes, dx));
    let mut field = SpaceTimeField {
        times: vec![0.0],
        profiles: vec![u0.clone()],
        shock_cells: vec![shocks_in(&slopes, threshold)],
        shock_threshold: threshold,
        first_shock_time: None,
        steps: 0,
    };
    if !field.shock_cells[0].is_empty() {
        field.first_shock_time = Some(0.0);
    }
    let mut ham = vec![0.0; big_u.len()];
    let mut t = 0.0;
    for stop in settings.stops(horizon) {
        while t < stop {
            let mut dt = stepper.stable_dt(&slopes);
            if t + dt >= stop * (1.0 - 1e-14) {
                dt = stop - t;
            }
            let rate = |slopes: &[f64], ham: &mut [f64]| {
                for (j, v) in ham.iter_mut().enumerate() {
                    *v = stepper.numerical_hamiltonian(slopes, j, settings.hj_scheme);
                }
            };
            let update_slopes = |slopes: &mut [f64], u: &[f64]| {
                for (s, w) in slopes.iter_mut().zip(u.windows(2)) {
                    *s = (w[1] - w[0]) / dx;
                }
            };
            rate(&slopes, &mut ham);
            if settings.hj_scheme == HjScheme::Eno2 {
                let stage: Vec<f64> = big_u.iter().zip(&ham).map(|(u, h)| u - dt * h).collect();
                update_slopes(&mut slopes, &stage);
                rate(&slopes, &mut ham);
                for ((uj, sj), hj) in big_u.iter_mut().zip(&stage).zip(&ham) {
                    *uj = 0.5 * (*uj + *sj - dt * hj);
                }
            } else {
                for (uj, hj) in big_u.iter_mut().zip(&ham) {
                    *uj -= dt * hj;
                }
            }
            update_slopes(&mut slopes, &big_u);
            t = if dt == stop - t { stop } else { t + dt };
            field.steps += 1;
            stepper.check(&slopes, t)?;
            if field.first_shock_time.is_none() && slopes.windows(2).any(|w| w[0] - w[1] > threshold) {
                field.first_shock_time = Some(t);
            }
        }
        field.times.push(stop);
        field.shock_cells.push(shocks_in(&slopes, threshold));
        field.profiles.push(u0.with_values(big_u.clone())?);
    }
    Ok(field)
}

/// Candidate minimal initial datum: `-U^r(T)` where `U^r` solves the HJ
/// equation for `H(x, -p)` from `-W`.
pub fn evolve_hj_reversed<H: Hamiltonian + ?Sized>(
    h: &H,
    w: &GridProfile,
    horizon: f64,
    settings: &SolverSettings,
) -> Result<GridProfile> {
    let reversed = Reversed(h);
    let start = w.map(|_, v| -v);
    let field = evolve_hj(&reversed, &start, horizon, &SolverSettings {
        output_times: Vec::new(),
        ..settings.clone()
    })?;
    Ok(field.last().map(|_, v| -v))
}
