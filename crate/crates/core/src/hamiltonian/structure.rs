//! Structural functions of a Hamiltonian: the critical momentum `ǔ`, the
//! critical level `K`, the level momenta `m < ǔ < M`, the speed bounds
//! `v(c)`, `V(c)` and the ray speed bound `C_{H,W}`.
//!
//! Suprema and infima over `x` are taken on 4096 points of `[-X, X]` plus
//! the exterior point `X + 1`, which is enough because `H` does not depend
//! on `x` outside `[-X, X]`.

use super::Hamiltonian;
use crate::error::{Error, Result};
use crate::grid::GridProfile;
use crate::roots;

pub const X_SAMPLES: usize = 4096;
const MOMENTUM_SAMPLES: usize = 129;
const SPEED_BOUND_CAP: f64 = 1e6;

fn x_samples(radius: f64) -> Vec<f64> {
    let mut xs: Vec<f64> = (0..X_SAMPLES)
        .map(|i| -radius + 2.0 * radius * i as f64 / (X_SAMPLES - 1) as f64)
        .collect();
    xs.push(radius + 1.0);
    xs
}

fn linspace(a: f64, b: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| a + (b - a) * i as f64 / (n - 1) as f64)
}

pub fn critical_momentum<H: Hamiltonian + ?Sized>(h: &H, x: f64) -> Result<f64> {
    h.critical_momentum(x)
}

/// Critical level `K = max_x H(x, ǔ(x))`.
pub fn critical_level<H: Hamiltonian>(h: &H) -> Result<f64> {
    Ok(StructuralBounds::new(h)?.critical_level)
}

/// Momenta `m(x, c) < ǔ(x) < M(x, c)` on the level set `H(x, .) = c`.
pub fn level_momenta<H: Hamiltonian>(h: &H, x: f64, c: f64) -> Result<(f64, f64)> {
    StructuralBounds::new(h)?.level_momenta(h, x, c)
}

/// `(v(c), V(c))`: the largest speed on the lower branch and the smallest
/// speed on the upper branch of the level set `H = c`.
pub fn speed_bounds<H: Hamiltonian>(h: &H, c: f64) -> Result<(f64, f64)> {
    StructuralBounds::new(h)?.speed_bounds(h, c)
}

/// Sampled critical momentum and the levels derived from it.
#[derive(Debug, Clone)]
pub struct StructuralBounds {
    xs: Vec<f64>,
    u_check: Vec<f64>,
    pub u_lower: f64,
    pub u_upper: f64,
    pub critical_level: f64,
    /// A sample point where `H(x, ǔ(x))` attains `K`.
    pub critical_point: f64,
}

impl StructuralBounds {
    pub fn new<H: Hamiltonian + ?Sized>(h: &H) -> Result<Self> {
        let xs = x_samples(h.radius());
        let u_check = xs
            .iter()
            .map(|&x| h.critical_momentum(x))
            .collect::<Result<Vec<_>>>()?;
        let mut critical_level = f64::NEG_INFINITY;
        let mut critical_point = 0.0;
        for (&x, &u) in xs.iter().zip(&u_check) {
            let level = h.value(x, u);
            if level > critical_level {
                critical_level = level;
                critical_point = x;
            }
        }
        let u_lower = u_check.iter().copied().fold(f64::INFINITY, f64::min);
        let u_upper = u_check.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok(Self {
            xs,
            u_check,
            u_lower,
            u_upper,
            critical_level,
            critical_point,
        })
    }

    pub fn samples(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.xs.iter().copied().zip(self.u_check.iter().copied())
    }

    fn check_level(&self, c: f64) -> Result<()> {
        if c > self.critical_level {
            Ok(())
        } else {
            Err(Error::LevelBelowCritical {
                level: c,
                critical: self.critical_level,
            })
        }
    }

    pub fn level_momenta<H: Hamiltonian + ?Sized>(&self, h: &H, x: f64, c: f64) -> Result<(f64, f64)> {
        self.check_level(c)?;
        Ok(level_momenta_unchecked(h, x, c)?)
    }

    pub fn speed_bounds<H: Hamiltonian + ?Sized>(&self, h: &H, c: f64) -> Result<(f64, f64)> {
        self.check_level(c)?;
        let mut lower = f64::NEG_INFINITY;
        let mut upper = f64::INFINITY;
        for &x in &self.xs {
            let (m, big_m) = level_momenta_unchecked(h, x, c)?;
            lower = lower.max(h.speed(x, m));
            upper = upper.min(h.speed(x, big_m));
        }
        Ok((lower, upper))
    }
}

fn level_momenta_unchecked<H: Hamiltonian + ?Sized>(h: &H, x: f64, c: f64) -> Result<(f64, f64)> {
    let u = h.critical_momentum(x)?;
    let upper = roots::solve_increasing(
        |p| {
            let e = h.eval(x, p);
            (e.value, e.dp)
        },
        c,
        u,
    )?;
    let lower = -roots::solve_increasing(
        |q| {
            let e = h.eval(x, -q);
            (e.value, -e.dp)
        },
        c,
        -u,
    )?;
    Ok((lower, upper))
}

/// Numerical coercivity bound `phi(r) = min_{x, +-} H(x, +-r)`.
pub fn coercivity_lower_bound<H: Hamiltonian + ?Sized>(h: &H, r: f64) -> f64 {
    x_samples(h.radius())
        .into_iter()
        .map(|x| h.value(x, r).min(h.value(x, -r)))
        .fold(f64::INFINITY, f64::min)
}

/// Result of the search for the ray speed bound `C_{H,W}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RaySpeedBound {
    /// Smallest sampled `r` with `phi(r) / (1 + r)` above `threshold`.
    pub value: f64,
    /// `sup |H(q, p)|` over `|p| <= |W'|` plus `sup |L(q, v)|` over `|v| <= 1`.
    pub threshold: f64,
    /// The search hit the cap; `value` is then the cap, not a bound.
    pub capped: bool,
}

/// Ray speed bound for a terminal profile `W` given on grid nodes.
pub fn ray_speed_bound<H: Hamiltonian + ?Sized>(h: &H, w: &GridProfile) -> Result<RaySpeedBound> {
    ray_speed_bound_for_slope(h, w.lipschitz())
}

/// Ray speed bound for a terminal profile with Lipschitz constant `slope`.
/// `phi` is estimated by [`coercivity_lower_bound`]; this is a numerical
/// stand-in for the growth function, not a certified bound.
pub fn ray_speed_bound_for_slope<H: Hamiltonian + ?Sized>(h: &H, slope: f64) -> Result<RaySpeedBound> {
    let xs = x_samples(h.radius());
    let mut sup_h: f64 = 0.0;
    let mut sup_l: f64 = 0.0;
    for &x in &xs {
        let u = h.critical_momentum(x)?;
        let ps = linspace(-slope, slope, MOMENTUM_SAMPLES).chain(std::iter::once(u.clamp(-slope, slope)));
        for p in ps {
            sup_h = sup_h.max(h.value(x, p).abs());
        }
        let v0 = h.speed(x, 0.0).clamp(-1.0, 1.0);
        for v in linspace(-1.0, 1.0, MOMENTUM_SAMPLES).chain(std::iter::once(v0)) {
            sup_l = sup_l.max(h.legendre(x, v)?.abs());
        }
    }
    let threshold = sup_h + sup_l;
    let holds = |r: f64| coercivity_lower_bound(h, r) / (1.0 + r) > threshold;

    // doubling search for a point where the inequality holds and keeps
    // holding on the next two doublings, then bisection down to the edge
    let mut hi = 0.125;
    while !(holds(hi) && holds(2.0 * hi) && holds(4.0 * hi)) {
        hi *= 2.0;
        if hi > SPEED_BOUND_CAP {
            return Ok(RaySpeedBound {
                value: SPEED_BOUND_CAP,
                threshold,
                capped: true,
            });
        }
    }
    if holds(0.0) {
        return Ok(RaySpeedBound {
            value: 0.0,
            threshold,
            capped: false,
        });
    }
    let mut lo = 0.0;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if holds(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(RaySpeedBound {
        value: hi,
        threshold,
        capped: false,
    })
}

/// Upper bound on the Lipschitz constant of the minimal inverse design:
/// `T (sup_{|v| <= C, x} |dL/dx (x, v)| + |W'|)`, with `dL/dx = -dH/dx` at the
/// momentum dual to `v`.
pub fn u_star_lipschitz_bound<H: Hamiltonian + ?Sized>(
    h: &H,
    horizon: f64,
    slope: f64,
    speed_bound: f64,
) -> Result<f64> {
    let mut sup: f64 = 0.0;
    for x in x_samples(h.radius()) {
        for v in linspace(-speed_bound, speed_bound, MOMENTUM_SAMPLES) {
            let p = h.momentum_for_speed(x, v)?;
            sup = sup.max(h.eval(x, p).dx.abs());
        }
    }
    Ok(horizon * (sup + slope))
}
