use serde::{Deserialize, Serialize};

use super::{Hamiltonian, Hessian, Partials};
use crate::error::{Error, Result};

/// Potential `g` of a Hamiltonian `p^2/2 + g(x)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Potential {
    /// `1 - (1 - x^2)^4` on `[-1, 1]`, equal to 1 elsewhere.
    QuarticWell,
    /// Polynomial with coefficients in increasing degree, used on `[-X, X]`
    /// and continued by its boundary values outside.
    Polynomial(Vec<f64>),
}

/// `x`-independent strictly convex fluxes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConvexFlux {
    /// `p^2 / 2`
    Burgers,
    /// `cosh(p) - 1`, which has no elementary closed-form dual in the
    /// solver paths and exercises the numerical Legendre transform.
    Cosh,
}

/// Parameters of the traffic flux `V(x) u (1 - u / R(x))` with
/// `V = v0 + dv * b(x / X)` and `R = r0 + dr * b(x / X)`, where
/// `b(s) = (1 - s^2)^4` on `[-1, 1]` and vanishes elsewhere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Traffic {
    pub v0: f64,
    pub dv: f64,
    pub r0: f64,
    pub dr: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelKind {
    QuadraticPotential(Potential),
    HomogeneousConvex(ConvexFlux),
    /// The concave traffic flux, stored after the reflection `x -> -x`,
    /// `H -> -H`: the stored model is `H~(x, p) = -H(-x, p)`. A solution
    /// `u~(t, x)` of the stored convex problem gives back the traffic
    /// density as `u(t, x) = u~(t, -x)`.
    TransformedTraffic(Traffic),
}

/// An immutable Hamiltonian together with its nonhomogeneity radius `X`.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianModel {
    kind: ModelKind,
    radius: f64,
}

impl HamiltonianModel {
    pub fn new(kind: ModelKind, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidModel(format!("radius X must be positive, got {radius}")));
        }
        match &kind {
            ModelKind::QuadraticPotential(Potential::QuarticWell) if radius < 1.0 => {
                return Err(Error::InvalidModel(
                    "the quartic well is x-dependent on [-1, 1]; X must be at least 1".into(),
                ));
            }
            ModelKind::QuadraticPotential(Potential::Polynomial(c)) => {
                if c.is_empty() || c.iter().any(|v| !v.is_finite()) {
                    return Err(Error::InvalidModel("polynomial potential needs finite coefficients".into()));
                }
                let slope = |x: f64| poly_eval(c, x).1;
                let scale = 1.0 + c.iter().map(|v| v.abs()).sum::<f64>() * radius.max(1.0).powi(c.len() as i32);
                if slope(radius).abs() > 1e-9 * scale || slope(-radius).abs() > 1e-9 * scale {
                    return Err(Error::InvalidModel(
                        "polynomial potential must be flat (g' = 0) at x = +-X".into(),
                    ));
                }
            }
            ModelKind::TransformedTraffic(t) => {
                let ok = t.v0 > 0.0 && t.r0 > 0.0 && t.v0 + t.dv > 0.0 && t.r0 + t.dr > 0.0;
                if !ok {
                    return Err(Error::InvalidModel("traffic V and R must stay positive".into()));
                }
            }
            _ => {}
        }
        Ok(Self { kind, radius })
    }

    /// `p^2/2 + g(x)` with the quartic well potential, `X = 1`.
    pub fn quartic_well() -> Self {
        Self {
            kind: ModelKind::QuadraticPotential(Potential::QuarticWell),
            radius: 1.0,
        }
    }

    /// `p^2/2`.
    pub fn burgers() -> Self {
        Self {
            kind: ModelKind::HomogeneousConvex(ConvexFlux::Burgers),
            radius: 1.0,
        }
    }

    pub fn kind(&self) -> &ModelKind {
        &self.kind
    }

    /// `g(x)`, `g'(x)`, `g''(x)` for potential models.
    fn potential(&self, x: f64) -> (f64, f64, f64) {
        match &self.kind {
            ModelKind::QuadraticPotential(Potential::QuarticWell) => quartic(x),
            ModelKind::QuadraticPotential(Potential::Polynomial(c)) => {
                let xc = x.clamp(-self.radius, self.radius);
                let (g, g1, g2) = poly_eval(c, xc);
                if x.abs() >= self.radius {
                    (g, 0.0, 0.0)
                } else {
                    (g, g1, g2)
                }
            }
            _ => (0.0, 0.0, 0.0),
        }
    }

    /// Traffic coefficients of the stored model `a(s) p^2 - b(s) p`, `s = -x`,
    /// with their first two derivatives in `s`.
    fn traffic_coeffs(&self, t: &Traffic, x: f64) -> ([f64; 3], [f64; 3]) {
        let s = -x;
        let (b0, b1, b2) = bump(s, self.radius);
        let v = [t.v0 + t.dv * b0, t.dv * b1, t.dv * b2];
        let r = [t.r0 + t.dr * b0, t.dr * b1, t.dr * b2];
        let a0 = v[0] / r[0];
        let a1 = v[1] / r[0] - v[0] * r[1] / (r[0] * r[0]);
        let a2 = v[2] / r[0] - 2.0 * v[1] * r[1] / (r[0] * r[0]) - v[0] * r[2] / (r[0] * r[0])
            + 2.0 * v[0] * r[1] * r[1] / (r[0] * r[0] * r[0]);
        ([a0, a1, a2], v)
    }

    /// Evaluates the original (concave) traffic flux `V(x) u (1 - u/R(x))`.
    pub fn traffic_flux(&self, x: f64, u: f64) -> Option<f64> {
        match &self.kind {
            ModelKind::TransformedTraffic(_) => Some(-self.value(-x, u)),
            _ => None,
        }
    }
}

fn quartic(x: f64) -> (f64, f64, f64) {
    if x.abs() >= 1.0 {
        return (1.0, 0.0, 0.0);
    }
    let w = 1.0 - x * x;
    let w2 = w * w;
    (
        1.0 - w2 * w2,
        8.0 * x * w2 * w,
        8.0 * w2 * (1.0 - 7.0 * x * x),
    )
}

fn bump(s: f64, radius: f64) -> (f64, f64, f64) {
    let u = s / radius;
    if u.abs() >= 1.0 {
        return (0.0, 0.0, 0.0);
    }
    let w = 1.0 - u * u;
    let w2 = w * w;
    (
        w2 * w2,
        -8.0 * u * w2 * w / radius,
        -8.0 * w2 * (1.0 - 7.0 * u * u) / (radius * radius),
    )
}

/// Value, first and second derivative of a polynomial (Horner).
fn poly_eval(c: &[f64], x: f64) -> (f64, f64, f64) {
    let mut v = 0.0;
    let mut d1 = 0.0;
    let mut d2 = 0.0;
    for &a in c.iter().rev() {
        d2 = d2 * x + 2.0 * d1;
        d1 = d1 * x + v;
        v = v * x + a;
    }
    (v, d1, d2)
}

impl Hamiltonian for HamiltonianModel {
    fn eval(&self, x: f64, p: f64) -> Partials {
        match &self.kind {
            ModelKind::QuadraticPotential(_) => {
                let (g, g1, _) = self.potential(x);
                Partials {
                    value: 0.5 * p * p + g,
                    dx: g1,
                    dp: p,
                }
            }
            ModelKind::HomogeneousConvex(ConvexFlux::Burgers) => Partials {
                value: 0.5 * p * p,
                dx: 0.0,
                dp: p,
            },
            ModelKind::HomogeneousConvex(ConvexFlux::Cosh) => Partials {
                value: p.cosh() - 1.0,
                dx: 0.0,
                dp: p.sinh(),
            },
            ModelKind::TransformedTraffic(t) => {
                let (a, b) = self.traffic_coeffs(t, x);
                Partials {
                    value: a[0] * p * p - b[0] * p,
                    dx: -(a[1] * p * p - b[1] * p),
                    dp: 2.0 * a[0] * p - b[0],
                }
            }
        }
    }

    fn hessian(&self, x: f64, p: f64) -> Hessian {
        match &self.kind {
            ModelKind::QuadraticPotential(_) => Hessian {
                xx: self.potential(x).2,
                xp: 0.0,
                pp: 1.0,
            },
            ModelKind::HomogeneousConvex(ConvexFlux::Burgers) => Hessian {
                xx: 0.0,
                xp: 0.0,
                pp: 1.0,
            },
            ModelKind::HomogeneousConvex(ConvexFlux::Cosh) => Hessian {
                xx: 0.0,
                xp: 0.0,
                pp: p.cosh(),
            },
            ModelKind::TransformedTraffic(t) => {
                let (a, b) = self.traffic_coeffs(t, x);
                Hessian {
                    xx: a[2] * p * p - b[2] * p,
                    xp: -(2.0 * a[1] * p - b[1]),
                    pp: 2.0 * a[0],
                }
            }
        }
    }

    fn radius(&self) -> f64 {
        self.radius
    }

    fn momentum_for_speed(&self, x: f64, v: f64) -> Result<f64> {
        match &self.kind {
            ModelKind::QuadraticPotential(_) | ModelKind::HomogeneousConvex(ConvexFlux::Burgers) => Ok(v),
            ModelKind::TransformedTraffic(t) => {
                let (a, b) = self.traffic_coeffs(t, x);
                Ok((v + b[0]) / (2.0 * a[0]))
            }
            ModelKind::HomogeneousConvex(ConvexFlux::Cosh) => Ok(v.asinh()),
        }
    }

    fn legendre(&self, x: f64, v: f64) -> Result<f64> {
        match &self.kind {
            ModelKind::QuadraticPotential(_) => Ok(0.5 * v * v - self.potential(x).0),
            ModelKind::HomogeneousConvex(ConvexFlux::Burgers) => Ok(0.5 * v * v),
            _ => {
                let p = self.momentum_for_speed(x, v)?;
                Ok(p * v - self.value(x, p))
            }
        }
    }
}

/// Potential entry of the JSON model description: either a built-in name or
/// `{"polynomial": [c0, c1, ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PotentialSpec {
    Named(String),
    Polynomial { polynomial: Vec<f64> },
}

/// JSON model description, e.g.
/// `{"kind": "quadratic_potential", "potential": "quartic_well", "X": 1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelSpec {
    QuadraticPotential {
        potential: PotentialSpec,
        #[serde(rename = "X")]
        radius: f64,
    },
    HomogeneousConvex {
        flux: ConvexFlux,
        #[serde(rename = "X", default = "unit")]
        radius: f64,
    },
    TransformedTraffic {
        #[serde(flatten)]
        params: Traffic,
        #[serde(rename = "X")]
        radius: f64,
    },
}

fn unit() -> f64 {
    1.0
}

impl ModelSpec {
    pub fn build(&self) -> Result<HamiltonianModel> {
        match self {
            ModelSpec::QuadraticPotential { potential, radius } => {
                let pot = match potential {
                    PotentialSpec::Named(name) if name == "quartic_well" => Potential::QuarticWell,
                    PotentialSpec::Named(name) => {
                        return Err(Error::InvalidModel(format!("unknown potential '{name}'")))
                    }
                    PotentialSpec::Polynomial { polynomial } => Potential::Polynomial(polynomial.clone()),
                };
                HamiltonianModel::new(ModelKind::QuadraticPotential(pot), *radius)
            }
            ModelSpec::HomogeneousConvex { flux, radius } => {
                HamiltonianModel::new(ModelKind::HomogeneousConvex(*flux), *radius)
            }
            ModelSpec::TransformedTraffic { params, radius } => {
                HamiltonianModel::new(ModelKind::TransformedTraffic(*params), *radius)
            }
        }
    }
}

impl Default for ModelSpec {
    fn default() -> Self {
        ModelSpec::QuadraticPotential {
            potential: PotentialSpec::Named("quartic_well".into()),
            radius: 1.0,
        }
    }
}
