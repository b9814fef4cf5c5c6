//! Inverse design: the minimal initial datum `U0*` reaching a terminal
//! profile `W`, the reachability test, the closure of the range of `pi_w`
//! and membership of a given datum in the set of all data reaching `W`.
//!
//! Every verdict is a statement at grid resolution with the tolerances
//! carried in the result.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::flow::FlowSettings;
use crate::grid::{derivative, primitive, GridProfile, Layout};
use crate::hamiltonian::{ray_speed_bound, u_star_lipschitz_bound, Hamiltonian};
use crate::pde::{evolve_hj, evolve_hj_reversed, SolverSettings};
use crate::rays::{monotonicity_defect, pi_map};

#[derive(Debug, Clone, PartialEq)]
pub struct InverseSettings {
    pub solver: SolverSettings,
    /// Integrator used for the backward characteristics of `pi_w`.
    pub pi_flow: FlowSettings,
    /// Overrides `20 dx Lip(W) + 1e-3`.
    pub tol_reach: Option<f64>,
    /// Overrides `10 dx (1 + Lip(U0*))`.
    pub tol_point: Option<f64>,
    /// Neighbouring feet closer than this many cells belong to one interval.
    pub gap_cells: f64,
}

impl Default for InverseSettings {
    fn default() -> Self {
        Self {
            solver: SolverSettings::default(),
            pi_flow: FlowSettings::with_dt(1e-3),
            tol_reach: None,
            tol_point: None,
            gap_cells: 2.0,
        }
    }
}

impl InverseSettings {
    pub fn reach_tolerance(&self, w: &GridProfile) -> f64 {
        self.tol_reach.unwrap_or(20.0 * w.dx() * w.lipschitz() + 1e-3)
    }

    pub fn point_tolerance(&self, u_star: &GridProfile) -> f64 {
        self.tol_point.unwrap_or(10.0 * u_star.dx() * (1.0 + u_star.lipschitz()))
    }
}

fn check_nodes(w: &GridProfile, what: &str) -> Result<()> {
    if w.layout() != Layout::Nodes {
        return Err(Error::GridMismatch(format!("{what} must be node values of a Hamilton-Jacobi profile")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct UStar {
    pub profile: GridProfile,
    /// Largest difference quotient of the computed profile.
    pub lipschitz: f64,
    /// A priori bound `T (sup |dL/dx| + Lip(W))` over speeds up to the ray speed bound.
    pub lipschitz_bound: f64,
}

/// The minimal inverse design, by the time-reversed Hamilton-Jacobi solve.
pub fn compute_u_star<H: Hamiltonian + ?Sized>(
    h: &H,
    horizon: f64,
    w: &GridProfile,
    settings: &InverseSettings,
) -> Result<UStar> {
    check_nodes(w, "W")?;
    let profile = evolve_hj_reversed(h, w, horizon, &settings.solver)?;
    let slope = w.lipschitz();
    let speed = ray_speed_bound(h, w)?;
    let lipschitz_bound = u_star_lipschitz_bound(h, horizon, slope, speed.value)?;
    Ok(UStar {
        lipschitz: profile.lipschitz(),
        profile,
        lipschitz_bound,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Reachability {
    pub reachable: bool,
    /// `sup |S_T U0* - W|` on the grid.
    pub residual: f64,
    pub tolerance: f64,
}

fn forward_residual<H: Hamiltonian + ?Sized>(
    h: &H,
    horizon: f64,
    w: &GridProfile,
    u0: &GridProfile,
    settings: &InverseSettings,
) -> Result<f64> {
    let forward = evolve_hj(h, u0, horizon, &SolverSettings {
        output_times: Vec::new(),
        ..settings.solver.clone()
    })?;
    forward.last().sup_distance(w)
}

/// `W` is reachable when the forward solve from `U0*` returns to it.
pub fn is_reachable<H: Hamiltonian + ?Sized>(
    h: &H,
    horizon: f64,
    w: &GridProfile,
    settings: &InverseSettings,
) -> Result<Reachability> {
    let u_star = compute_u_star(h, horizon, w, settings)?;
    reachability_of(h, horizon, w, &u_star.profile, settings)
}

fn reachability_of<H: Hamiltonian + ?Sized>(
    h: &H,
    horizon: f64,
    w: &GridProfile,
    u_star: &GridProfile,
    settings: &InverseSettings,
) -> Result<Reachability> {
    let residual = forward_residual(h, horizon, w, u_star, settings)?;
    let tolerance = settings.reach_tolerance(w);
    Ok(Reachability {
        reachable: residual <= tolerance,
        residual,
        tolerance,
    })
}

/// Sampled `pi_w` and the intervals approximating the closure of its range.
#[derive(Debug, Clone, PartialEq)]
pub struct PiClosure {
    pub pi: GridProfile,
    pub intervals: Vec<(f64, f64)>,
    /// Largest decrease of `pi` between neighbouring nodes.
    pub monotone_defect: f64,
    pub merge_gap: f64,
}

impl PiClosure {
    /// Smallest and largest foot inside the window.
    pub fn covered(&self) -> Option<(f64, f64)> {
        Some((self.intervals.first()?.0, self.intervals.last()?.1))
    }

    /// Open gaps between consecutive intervals: the free regions of the cone.
    pub fn gaps(&self) -> Vec<(f64, f64)> {
        self.intervals.windows(2).map(|w| (w[0].1, w[1].0)).collect()
    }

    pub fn largest_gap(&self) -> f64 {
        self.gaps().iter().map(|g| g.1 - g.0).fold(0.0, f64::max)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|&(a, b)| x >= a - 1e-12 && x <= b + 1e-12)
    }
}

/// Sorts the sampled feet and merges neighbours closer than `gap`.
pub fn merge_intervals(values: &[f64], gap: f64, window: (f64, f64)) -> Vec<(f64, f64)> {
    let mut v: Vec<f64> = values
        .iter()
        .copied()
        .filter(|x| *x >= window.0 && *x <= window.1)
        .collect();
    v.sort_by(f64::total_cmp);
    let mut out: Vec<(f64, f64)> = Vec::new();
    for x in v {
        match out.last_mut() {
            Some(last) if x - last.1 <= gap => last.1 = x,
            _ => out.push((x, x)),
        }
    }
    out
}

/// `pi_w` for `w = W'` and the merged closure of its range.
pub fn pi_closure<H: Hamiltonian + ?Sized>(
    h: &H,
    horizon: f64,
    w: &GridProfile,
    settings: &InverseSettings,
) -> Result<PiClosure> {
    check_nodes(w, "W")?;
    let pi = pi_map(h, horizon, &derivative(w), &settings.pi_flow)?;
    let merge_gap = settings.gap_cells * w.dx();
    let intervals = merge_intervals(pi.values(), merge_gap, (w.x_min(), w.x_max()));
    Ok(PiClosure {
        monotone_defect: monotonicity_defect(&pi),
        pi,
        intervals,
        merge_gap,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Membership {
    /// Condition (i): `U0 >= U0* - tol` everywhere.
    pub cond_i_ok: bool,
    /// Condition (ii): `|U0 - U0*| <= tol` on the closure of the range of `pi_w`.
    pub cond_ii_ok: bool,
    pub max_violation_i: f64,
    pub max_violation_ii: f64,
    pub forward_residual: f64,
    pub forward_ok: bool,
    pub tolerance: f64,
    /// Both conditions and the forward check hold.
    pub member: bool,
}

/// Everything computed for one terminal profile.
#[derive(Debug, Clone)]
pub struct InverseDesign {
    pub horizon: f64,
    pub u_star: UStar,
    pub reach: Reachability,
    pub closure: PiClosure,
}

impl InverseDesign {
    pub fn new<H: Hamiltonian + ?Sized>(h: &H, horizon: f64, w: &GridProfile, settings: &InverseSettings) -> Result<Self> {
        let u_star = compute_u_star(h, horizon, w, settings)?;
        let reach = reachability_of(h, horizon, w, &u_star.profile, settings)?;
        let closure = pi_closure(h, horizon, w, settings)?;
        Ok(Self {
            horizon,
            u_star,
            reach,
            closure,
        })
    }

    /// Membership of `u0` (node values on the grid of `W`).
    pub fn membership<H: Hamiltonian + ?Sized>(
        &self,
        h: &H,
        w: &GridProfile,
        u0: &GridProfile,
        settings: &InverseSettings,
    ) -> Result<Membership> {
        if !self.reach.reachable {
            return Err(Error::NotReachable {
                residual: self.reach.residual,
                tolerance: self.reach.tolerance,
            });
        }
        check_nodes(u0, "U0")?;
        if !u0.same_grid(&self.u_star.profile) {
            return Err(Error::GridMismatch("U0 must live on the grid of W".into()));
        }
        let star = &self.u_star.profile;
        let tolerance = settings.point_tolerance(star);
        let mut max_violation_i: f64 = 0.0;
        let mut max_violation_ii: f64 = 0.0;
        for (i, (a, b)) in u0.values().iter().zip(star.values()).enumerate() {
            max_violation_i = max_violation_i.max(b - a);
            if self.closure.contains(star.position(i)) {
                max_violation_ii = max_violation_ii.max((a - b).abs());
            }
        }
        let forward_residual = forward_residual(h, self.horizon, w, u0, settings)?;
        let forward_ok = forward_residual <= self.reach.tolerance;
        let cond_i_ok = max_violation_i <= tolerance;
        let cond_ii_ok = max_violation_ii <= tolerance;
        Ok(Membership {
            cond_i_ok,
            cond_ii_ok,
            max_violation_i,
            max_violation_ii,
            forward_residual,
            forward_ok,
            tolerance,
            member: cond_i_ok && cond_ii_ok && forward_ok,
        })
    }

    pub fn report(&self, membership: Option<Membership>) -> InverseDesignReport {
        InverseDesignReport {
            horizon: self.horizon,
            reachable: self.reach.reachable,
            residual: self.reach.residual,
            tol_reach: self.reach.tolerance,
            u_star_lipschitz: self.u_star.lipschitz,
            u_star_lipschitz_bound: self.u_star.lipschitz_bound,
            pi_intervals: self.closure.intervals.iter().map(|&(a, b)| [a, b]).collect(),
            pi_monotone_defect: self.closure.monotone_defect,
            membership,
        }
    }
}

/// Membership of `u0` in the set of data reaching `W` at time `T`.
pub fn membership<H: Hamiltonian + ?Sized>(
    h: &H,
    horizon: f64,
    w: &GridProfile,
    u0: &GridProfile,
    settings: &InverseSettings,
) -> Result<Membership> {
    InverseDesign::new(h, horizon, w, settings)?.membership(h, w, u0, settings)
}

/// Conservation-law version: `w` and `u0` are cell profiles. Both are
/// lifted to primitives, `u0` anchored so that it agrees with `U0*` at
/// the left end of the window.
pub fn cl_membership<H: Hamiltonian + ?Sized>(
    h: &H,
    horizon: f64,
    w: &GridProfile,
    u0: &GridProfile,
    settings: &InverseSettings,
) -> Result<Membership> {
    if w.layout() != Layout::Cells || u0.layout() != Layout::Cells {
        return Err(Error::GridMismatch("conservation law profiles must be cell averages".into()));
    }
    let big_w = primitive(w, 0.0);
    let design = InverseDesign::new(h, horizon, &big_w, settings)?;
    let big_u0 = primitive(u0, design.u_star.profile.values()[0]);
    design.membership(h, &big_w, &big_u0, settings)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InverseDesignReport {
    pub horizon: f64,
    pub reachable: bool,
    pub residual: f64,
    pub tol_reach: f64,
    pub u_star_lipschitz: f64,
    pub u_star_lipschitz_bound: f64,
    pub pi_intervals: Vec<[f64; 2]>,
    pub pi_monotone_defect: f64,
    pub membership: Option<Membership>,
}

impl InverseDesignReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::HamiltonianModel;

    fn burgers() -> HamiltonianModel {
        HamiltonianModel::burgers()
    }

    /// Smooth bump of height `a` on `[c - r, c + r]`.
    fn bump(a: f64, c: f64, r: f64) -> impl Fn(f64) -> f64 {
        move |x| {
            let s = (x - c) / r;
            if s.abs() < 1.0 {
                a * (1.0 - s * s).powi(3)
            } else {
                0.0
            }
        }
    }

    #[test]
    fn merging() {
        let iv = merge_intervals(&[0.0, 0.1, 0.2, 1.0, 1.05, 5.0], 0.15, (-1.0, 2.0));
        assert_eq!(iv, vec![(0.0, 0.2), (1.0, 1.05)]);
    }

    #[test]
    fn manufactured_profile_is_reachable() {
        let h = burgers();
        let u0 = GridProfile::nodes_from_fn(-3.0, 3.0, 600, |x| 0.4 * (-x * x).exp()).unwrap();
        let w = evolve_hj(&h, &u0, 1.0, &SolverSettings::default()).unwrap();
        let r = is_reachable(&h, 1.0, w.last(), &InverseSettings::default()).unwrap();
        assert!(r.reachable, "{r:?}");
    }

    #[test]
    fn upward_kink_is_not_reachable() {
        let h = burgers();
        let w = GridProfile::nodes_from_fn(-3.0, 3.0, 1200, f64::abs).unwrap();
        let r = is_reachable(&h, 1.0, &w, &InverseSettings::default()).unwrap();
        assert!(!r.reachable);
        assert!((r.residual - 0.5).abs() < 0.05, "{r:?}");
        let err = membership(&h, 1.0, &w, &w, &InverseSettings::default()).unwrap_err();
        assert!(matches!(err, Error::NotReachable { .. }));
    }

    #[test]
    fn stationary_shock_leaves_a_free_gap() {
        let h = burgers();
        let t = 1.0;
        let w = GridProfile::nodes_from_fn(-3.0, 3.0, 600, |x| -x.abs()).unwrap();
        let s = InverseSettings::default();
        let design = InverseDesign::new(&h, t, &w, &s).unwrap();
        assert!(design.reach.reachable);
        let gaps = design.closure.gaps();
        assert!(gaps.iter().any(|&(a, b)| a <= -0.9 * t && b >= 0.9 * t), "{gaps:?}");
        // the vertex is a member, so is the vertex plus a bump inside the gap
        let star = design.u_star.profile.clone();
        let m = design.membership(&h, &w, &star, &s).unwrap();
        assert!(m.member, "{m:?}");
        let bumped = star.map(|x, v| v + bump(0.2, 0.0, 0.6)(x));
        let m = design.membership(&h, &w, &bumped, &s).unwrap();
        assert!(m.member, "{m:?}");
        // a bump that reaches outside the gap is rejected
        let outside = star.map(|x, v| v + bump(0.5, 1.8, 0.5)(x));
        let m = design.membership(&h, &w, &outside, &s).unwrap();
        assert!(!m.member && !m.cond_ii_ok, "{m:?}");
        let large = star.map(|x, v| v + bump(2.0, 1.8, 0.8)(x));
        let m = design.membership(&h, &w, &large, &s).unwrap();
        assert!(!m.cond_ii_ok && !m.forward_ok, "{m:?}");
        // below the vertex violates (i)
        let lower = star.map(|x, v| v - bump(0.3, 0.0, 0.5)(x));
        let m = design.membership(&h, &w, &lower, &s).unwrap();
        assert!(!m.cond_i_ok);
    }

    #[test]
    fn u_star_of_a_kink_fills_the_gap_with_the_ray_optimum() {
        let h = burgers();
        let t = 1.0;
        let w = GridProfile::nodes_from_fn(-3.0, 3.0, 600, |x| -x.abs()).unwrap();
        let u = compute_u_star(&h, t, &w, &InverseSettings::default()).unwrap();
        for (x, v) in u.profile.positions().into_iter().zip(u.profile.values()) {
            let exact = if x.abs() >= t { -x.abs() + t / 2.0 } else { -x * x / (2.0 * t) };
            assert!((v - exact).abs() < 0.02, "x={x}: {v} vs {exact}");
        }
        assert!(u.lipschitz <= u.lipschitz_bound + 1e-9);
    }

    #[test]
    fn cl_membership_of_the_vertex_and_convex_combinations() {
        let h = burgers();
        let t = 1.0;
        let w = GridProfile::cells_from_fn(-3.0, 3.0, 600, |x| -x.signum()).unwrap();
        let s = InverseSettings::default();
        let design = InverseDesign::new(&h, t, &primitive(&w, 0.0), &s).unwrap();
        let u_star = derivative(&design.u_star.profile);
        assert!(cl_membership(&h, t, &w, &u_star, &s).unwrap().member);
        let a = derivative(&design.u_star.profile.map(|x, v| v + bump(0.2, -0.3, 0.4)(x)));
        let b = derivative(&design.u_star.profile.map(|x, v| v + bump(0.1, 0.4, 0.3)(x)));
        assert!(cl_membership(&h, t, &w, &a, &s).unwrap().member);
        assert!(cl_membership(&h, t, &w, &b, &s).unwrap().member);
        let mix = a.with_values(a.values().iter().zip(b.values()).map(|(p, q)| 0.5 * (p + q)).collect()).unwrap();
        assert!(cl_membership(&h, t, &w, &mix, &s).unwrap().member);
    }

    #[test]
    fn vertex_is_idempotent() {
        let h = HamiltonianModel::quartic_well();
        let t = 0.6;
        let u0 = GridProfile::nodes_from_fn(-4.0, 4.0, 800, |x| 0.5 * x.sin() + 0.2 * x).unwrap();
        let s = InverseSettings::default();
        let w = evolve_hj(&h, &u0, t, &s.solver).unwrap();
        let star = compute_u_star(&h, t, w.last(), &s).unwrap().profile;
        let w2 = evolve_hj(&h, &star, t, &s.solver).unwrap();
        let star2 = compute_u_star(&h, t, w2.last(), &s).unwrap().profile;
        let tol = s.point_tolerance(&star);
        assert!(star.sup_distance(&star2).unwrap() <= 2.0 * tol);
    }

    #[test]
    fn report_serialises() {
        let h = burgers();
        let w = GridProfile::nodes_from_fn(-2.0, 2.0, 200, |x| -x.abs()).unwrap();
        let s = InverseSettings::default();
        let d = InverseDesign::new(&h, 1.0, &w, &s).unwrap();
        let m = d.membership(&h, &w, &d.u_star.profile, &s).unwrap();
        let json = d.report(Some(m)).to_json();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["reachable"], true);
        assert!(v["pi_intervals"].as_array().unwrap().len() >= 2);
        assert!(v["membership"]["cond_i_ok"].as_bool().unwrap());
        assert!(v["membership"]["forward_residual"].is_number());
    }
}
