//! Hamiltonians `H(x, p)` that are smooth, strictly convex and coercive in
//! `p`, and independent of `x` outside a compact interval `[-X, X]`.

mod model;
mod structure;

pub use model::{ConvexFlux, HamiltonianModel, ModelKind, ModelSpec, Potential, PotentialSpec, Traffic};
pub use structure::{
    coercivity_lower_bound, critical_level, critical_momentum, level_momenta, ray_speed_bound,
    speed_bounds, u_star_lipschitz_bound, RaySpeedBound, StructuralBounds, X_SAMPLES,
};

use crate::error::Result;
use crate::roots;

/// Value and first partial derivatives of `H` at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Partials {
    pub value: f64,
    pub dx: f64,
    pub dp: f64,
}

/// Second partial derivatives of `H`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hessian {
    pub xx: f64,
    pub xp: f64,
    pub pp: f64,
}

/// A Hamiltonian satisfying smoothness, compact nonhomogeneity and strict
/// convexity in the momentum.
pub trait Hamiltonian {
    fn eval(&self, x: f64, p: f64) -> Partials;

    fn hessian(&self, x: f64, p: f64) -> Hessian;

    /// Radius `X` such that `dH/dx = 0` for `|x| >= X`.
    fn radius(&self) -> f64;

    fn value(&self, x: f64, p: f64) -> f64 {
        self.eval(x, p).value
    }

    fn speed(&self, x: f64, p: f64) -> f64 {
        self.eval(x, p).dp
    }

    /// Momentum `p` with `dH/dp(x, p) = v`.
    fn momentum_for_speed(&self, x: f64, v: f64) -> Result<f64> {
        roots::solve_increasing(
            |p| {
                let e = self.eval(x, p);
                (e.dp, self.hessian(x, p).pp)
            },
            v,
            0.0,
        )
    }

    /// Legendre transform `L(x, v) = sup_p (p v - H(x, p))`.
    fn legendre(&self, x: f64, v: f64) -> Result<f64> {
        let p = self.momentum_for_speed(x, v)?;
        Ok(p * v - self.value(x, p))
    }

    /// Critical momentum: the minimiser of `H(x, .)`.
    fn critical_momentum(&self, x: f64) -> Result<f64> {
        self.momentum_for_speed(x, 0.0)
    }
}

impl<H: Hamiltonian + ?Sized> Hamiltonian for &H {
    fn eval(&self, x: f64, p: f64) -> Partials {
        (**self).eval(x, p)
    }
    fn hessian(&self, x: f64, p: f64) -> Hessian {
        (**self).hessian(x, p)
    }
    fn radius(&self) -> f64 {
        (**self).radius()
    }
    fn momentum_for_speed(&self, x: f64, v: f64) -> Result<f64> {
        (**self).momentum_for_speed(x, v)
    }
    fn legendre(&self, x: f64, v: f64) -> Result<f64> {
        (**self).legendre(x, v)
    }
    fn critical_momentum(&self, x: f64) -> Result<f64> {
        (**self).critical_momentum(x)
    }
}

/// The reflected Hamiltonian `H(x, -p)` used for the time-reversed
/// Hamilton-Jacobi solve.
#[derive(Debug, Clone, Copy)]
pub struct Reversed<H>(pub H);

impl<H: Hamiltonian> Hamiltonian for Reversed<H> {
    fn eval(&self, x: f64, p: f64) -> Partials {
        let e = self.0.eval(x, -p);
        Partials {
            value: e.value,
            dx: e.dx,
            dp: -e.dp,
        }
    }

    fn hessian(&self, x: f64, p: f64) -> Hessian {
        let h = self.0.hessian(x, -p);
        Hessian {
            xx: h.xx,
            xp: -h.xp,
            pp: h.pp,
        }
    }

    fn radius(&self) -> f64 {
        self.0.radius()
    }

    fn momentum_for_speed(&self, x: f64, v: f64) -> Result<f64> {
        Ok(-self.0.momentum_for_speed(x, -v)?)
    }

    fn legendre(&self, x: f64, v: f64) -> Result<f64> {
        self.0.legendre(x, -v)
    }

    fn critical_momentum(&self, x: f64) -> Result<f64> {
        Ok(-self.0.critical_momentum(x)?)
    }
}
