//! Uniformly sampled 1-D profiles.
//!
//! A conservation-law profile stores `n` cell averages at the cell centres
//! `x_min + (i + 1/2) dx`. A Hamilton-Jacobi profile stores `n + 1` node
//! values at the cell edges `x_min + j dx`. With this pairing the discrete
//! derivative of a node profile is exactly a cell profile and the two
//! solvers exchange data without interpolation.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    Cells,
    Nodes,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridProfile {
    x_min: f64,
    x_max: f64,
    layout: Layout,
    values: Vec<f64>,
}

impl GridProfile {
    fn checked(x_min: f64, x_max: f64, layout: Layout, values: Vec<f64>) -> Result<Self> {
        let min_len = match layout {
            Layout::Cells => 1,
            Layout::Nodes => 2,
        };
        if !(x_min.is_finite() && x_max.is_finite() && x_max > x_min) {
            return Err(Error::invalid(format!("bad grid window [{x_min}, {x_max}]")));
        }
        if values.len() < min_len {
            return Err(Error::invalid("grid profile needs at least one cell"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("grid profile values must be finite"));
        }
        Ok(Self {
            x_min,
            x_max,
            layout,
            values,
        })
    }

    pub fn cells(x_min: f64, x_max: f64, values: Vec<f64>) -> Result<Self> {
        Self::checked(x_min, x_max, Layout::Cells, values)
    }

    pub fn nodes(x_min: f64, x_max: f64, values: Vec<f64>) -> Result<Self> {
        Self::checked(x_min, x_max, Layout::Nodes, values)
    }

    /// Samples `f` at the centres of `n` cells.
    pub fn cells_from_fn(x_min: f64, x_max: f64, n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let dx = (x_max - x_min) / n as f64;
        let values = (0..n).map(|i| f(x_min + (i as f64 + 0.5) * dx)).collect();
        Self::cells(x_min, x_max, values)
    }

    /// Samples `f` at the `n + 1` nodes of `n` cells.
    pub fn nodes_from_fn(x_min: f64, x_max: f64, n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let dx = (x_max - x_min) / n as f64;
        let values = (0..=n).map(|j| f(x_min + j as f64 * dx)).collect();
        Self::nodes(x_min, x_max, values)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Number of cells of the underlying grid.
    pub fn cell_count(&self) -> usize {
        match self.layout {
            Layout::Cells => self.values.len(),
            Layout::Nodes => self.values.len() - 1,
        }
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.cell_count() as f64
    }

    pub fn position(&self, i: usize) -> f64 {
        let offset = match self.layout {
            Layout::Cells => 0.5,
            Layout::Nodes => 0.0,
        };
        self.x_min + (i as f64 + offset) * self.dx()
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.values.len()).map(|i| self.position(i)).collect()
    }

    /// Same grid and layout with new values.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        if values.len() != self.values.len() {
            return Err(Error::GridMismatch(format!(
                "expected {} values, got {}",
                self.values.len(),
                values.len()
            )));
        }
        Self::checked(self.x_min, self.x_max, self.layout, values)
    }

    pub fn map(&self, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, &v)| f(self.position(i), v))
            .collect();
        Self {
            values,
            ..self.clone()
        }
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        self.layout == other.layout
            && self.values.len() == other.values.len()
            && (self.x_min - other.x_min).abs() <= 1e-12 * (1.0 + self.x_min.abs())
            && (self.x_max - other.x_max).abs() <= 1e-12 * (1.0 + self.x_max.abs())
    }

    fn require_same_grid(&self, other: &Self) -> Result<()> {
        if self.same_grid(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch("profiles live on different grids".into()))
        }
    }

    /// Piecewise linear interpolation through the sample points, constant
    /// beyond the first and last sample.
    pub fn interpolate(&self, x: f64) -> f64 {
        let n = self.values.len();
        if n == 1 {
            return self.values[0];
        }
        let first = self.position(0);
        let s = (x - first) / self.dx();
        if s <= 0.0 {
            return self.values[0];
        }
        let i = s.floor() as usize;
        if i >= n - 1 {
            return self.values[n - 1];
        }
        let frac = s - i as f64;
        self.values[i] * (1.0 - frac) + self.values[i + 1] * frac
    }

    /// Largest difference quotient between neighbouring samples.
    pub fn lipschitz(&self) -> f64 {
        let dx = self.dx();
        self.values
            .windows(2)
            .map(|w| (w[1] - w[0]).abs() / dx)
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn sup_distance(&self, other: &Self) -> Result<f64> {
        self.require_same_grid(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }

    /// Sum of `|a - b| dx` over the samples whose position lies in `[a, b]`.
    /// For node profiles the end samples carry half weight (trapezoid rule).
    pub fn l1_distance_on(&self, other: &Self, a: f64, b: f64) -> Result<f64> {
        self.require_same_grid(other)?;
        let dx = self.dx();
        let last = self.values.len() - 1;
        let mut sum = 0.0;
        for (i, (u, v)) in self.values.iter().zip(&other.values).enumerate() {
            let x = self.position(i);
            if x < a - 1e-12 || x > b + 1e-12 {
                continue;
            }
            let weight = match self.layout {
                Layout::Nodes if i == 0 || i == last => 0.5,
                _ => 1.0,
            };
            sum += weight * (u - v).abs() * dx;
        }
        Ok(sum)
    }

    pub fn l1_distance(&self, other: &Self) -> Result<f64> {
        self.l1_distance_on(other, self.x_min, self.x_max)
    }

    /// Value of cell `i` with constant extension beyond the ends.
    fn cell(&self, i: isize) -> f64 {
        let n = self.values.len() as isize;
        self.values[i.clamp(0, n - 1) as usize]
    }

    /// Left trace at node `j` of a cell profile: the linear reconstruction
    /// of cell `j - 1` evaluated at its right edge, with minmod-limited
    /// slope. Reduces to the value of cell `j - 1` next to a jump.
    pub fn left_trace(&self, j: usize) -> f64 {
        let j = j as isize;
        let centre = self.cell(j - 1);
        let slope = minmod(centre - self.cell(j - 2), self.cell(j) - centre);
        centre + 0.5 * slope
    }

    /// Right trace at node `j` of a cell profile, mirror of [`left_trace`](Self::left_trace).
    pub fn right_trace(&self, j: usize) -> f64 {
        let j = j as isize;
        let centre = self.cell(j);
        let slope = minmod(centre - self.cell(j - 1), self.cell(j + 1) - centre);
        centre - 0.5 * slope
    }
}

fn minmod(a: f64, b: f64) -> f64 {
    if a * b <= 0.0 {
        0.0
    } else if a.abs() < b.abs() {
        a
    } else {
        b
    }
}

/// Discrete derivative.
///
/// Node profiles map to cell profiles through the one-sided edge slopes
/// `(U[j+1] - U[j]) / dx`, the exact inverse of [`primitive`]. Cell profiles
/// map to cell profiles through centred differences, one-sided at the ends.
pub fn derivative(profile: &GridProfile) -> GridProfile {
    let dx = profile.dx();
    let v = &profile.values;
    match profile.layout {
        Layout::Nodes => GridProfile {
            x_min: profile.x_min,
            x_max: profile.x_max,
            layout: Layout::Cells,
            values: v.windows(2).map(|w| (w[1] - w[0]) / dx).collect(),
        },
        Layout::Cells => {
            let n = v.len();
            let values = (0..n)
                .map(|i| {
                    if n == 1 {
                        0.0
                    } else if i == 0 {
                        (v[1] - v[0]) / dx
                    } else if i == n - 1 {
                        (v[n - 1] - v[n - 2]) / dx
                    } else {
                        (v[i + 1] - v[i - 1]) / (2.0 * dx)
                    }
                })
                .collect();
            GridProfile {
                values,
                ..profile.clone()
            }
        }
    }
}

/// Cumulative integral of a cell profile, equal to `anchor` at `x_min`.
/// Each cell contributes its value times `dx` (midpoint rule), so the
/// result is exact for piecewise constant data. Node profiles are first
/// averaged onto cells.
pub fn primitive(profile: &GridProfile, anchor: f64) -> GridProfile {
    let dx = profile.dx();
    let cell_values: Vec<f64> = match profile.layout {
        Layout::Cells => profile.values.clone(),
        Layout::Nodes => profile.values.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect(),
    };
    let mut values = Vec::with_capacity(cell_values.len() + 1);
    let mut acc = anchor;
    values.push(acc);
    for u in cell_values {
        acc += u * dx;
        values.push(acc);
    }
    GridProfile {
        x_min: profile.x_min,
        x_max: profile.x_max,
        layout: Layout::Nodes,
        values,
    }
}
