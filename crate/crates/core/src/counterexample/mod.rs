//! The quartic-well counterexample: `H(x, p) = p^2 / 2 + g(x)` with
//! `g(x) = 1 - (1 - x^2)^4` on `[-1, 1]` and `g = 1` outside, and the odd
//! step datum `u0 = -2` for `x < 0`, `2` for `x > 0`.
//!
//! A stationary shock appears at `x = 0` at time `pi / (2 sqrt 2)` and grows
//! afterwards, while every profile reached from `u0` still has a unique
//! preimage.

mod delta;
mod period;
mod sturm;

pub use delta::{delta, exact_profile, exact_solution, q_sharp, shock_trace, DeltaResult, DeltaSettings};
pub use period::{period, period_by_return, period_estimate, period_inverse, PeriodTable};
pub use sturm::{chicone_certificate, chicone_polynomial, rational, Poly, SturmChain};

use crate::error::Result;
use crate::flow::{flow, FlowSettings};
use crate::grid::GridProfile;
use crate::hamiltonian::{Hamiltonian, HamiltonianModel};

/// `pi / (2 sqrt 2)`: the time at which the shock appears.
pub const SHOCK_ONSET: f64 = std::f64::consts::PI / (2.0 * std::f64::consts::SQRT_2);
/// `pi / sqrt 2`: the small-amplitude limit of the period.
pub const PERIOD_LIMIT: f64 = std::f64::consts::PI / std::f64::consts::SQRT_2;
/// Largest momentum of a bounded orbit through `x = 0`.
pub const ESCAPE_MOMENTUM: f64 = std::f64::consts::SQRT_2;

pub fn model() -> HamiltonianModel {
    HamiltonianModel::quartic_well()
}

pub fn quartic_g(x: f64) -> f64 {
    model().value(x, 0.0)
}

pub fn quartic_g_prime(x: f64) -> f64 {
    model().eval(x, 0.0).dx
}

pub fn datum_u0(x: f64) -> f64 {
    if x < 0.0 {
        -2.0
    } else {
        2.0
    }
}

/// The datum on `n` cells of `[x_min, x_max]`. A cell centred on the axis
/// gets its average, 0.
pub fn datum_profile(x_min: f64, x_max: f64, n: usize) -> Result<GridProfile> {
    GridProfile::cells_from_fn(x_min, x_max, n, |x| if x == 0.0 { 0.0 } else { datum_u0(x) })
}

/// One orbit of a phase portrait.
#[derive(Debug, Clone)]
pub struct Orbit {
    pub q0: f64,
    pub p0: f64,
    pub points: Vec<(f64, f64, f64)>,
}

/// Orbits of the well from the given starting points over `[0, t_max]`,
/// keeping every `stride`-th step.
pub fn phase_portrait(starts: &[(f64, f64)], t_max: f64, settings: &FlowSettings, stride: usize) -> Result<Vec<Orbit>> {
    let h = model();
    let stride = stride.max(1);
    starts
        .iter()
        .map(|&(q0, p0)| {
            let tr = flow(&h, t_max, q0, p0, settings)?;
            let points = tr
                .samples
                .iter()
                .enumerate()
                .filter(|(k, _)| k % stride == 0 || *k + 1 == tr.samples.len())
                .map(|(_, s)| (s.t, s.q, s.p))
                .collect();
            Ok(Orbit { q0, p0, points })
        })
        .collect()
}

/// Rows `orbit,q0,p0,t,q,p,H` for CSV export.
pub fn portrait_rows(orbits: &[Orbit]) -> Vec<Vec<f64>> {
    let h = model();
    let mut rows = Vec::new();
    for (k, o) in orbits.iter().enumerate() {
        for &(t, q, p) in &o.points {
            rows.push(vec![k as f64, o.q0, o.p0, t, q, p, h.value(q, p)]);
        }
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::flow_end;

    #[test]
    fn potential_values() {
        assert_eq!(quartic_g(0.0), 0.0);
        assert_eq!(quartic_g(1.0), 1.0);
        assert_eq!(quartic_g(-3.0), 1.0);
        assert!((quartic_g(std::f64::consts::FRAC_1_SQRT_2) - 15.0 / 16.0).abs() < 1e-15);
        for k in 0..1000 {
            let x = -2.0 + 4.0 * k as f64 / 999.0;
            assert_eq!(quartic_g(x), quartic_g(-x));
        }
    }

    #[test]
    fn slope_of_potential_is_at_most_two() {
        let n = 100_000;
        let max = (0..=n)
            .map(|k| quartic_g_prime(-1.0 + 2.0 * k as f64 / n as f64).abs())
            .fold(0.0, f64::max);
        assert!(max <= 2.0 + 1e-9);
        assert!(max > 1.9);
    }

    #[test]
    fn datum_is_odd_step() {
        assert_eq!(datum_u0(-0.5), -2.0);
        assert_eq!(datum_u0(0.5), 2.0);
        let p = datum_profile(-3.0, 3.0, 6).unwrap();
        assert_eq!(p.values(), &[-2.0, -2.0, -2.0, 2.0, 2.0, 2.0]);
    }

    #[test]
    fn orbit_taxonomy() {
        let h = model();
        let s = FlowSettings::with_dt(1e-3);
        // escaping orbit
        let tr = flow(&h, 20.0, 0.0, 1.6, &s).unwrap();
        assert!(tr.samples.windows(2).all(|w| w[1].q > w[0].q));
        assert!(tr.terminal().q > 10.0);
        // separatrix: increasing, concave, creeping towards 1
        let tr = flow(&h, 50.0, 0.0, ESCAPE_MOMENTUM, &s).unwrap();
        assert!(tr.samples.windows(2).all(|w| w[1].q >= w[0].q));
        assert!(tr.samples.iter().all(|p| p.q < 1.0));
        assert!(tr.samples.windows(3).step_by(97).all(|w| w[2].q - 2.0 * w[1].q + w[0].q <= 1e-12));
        assert!((tr.terminal().q - 1.0).abs() <= 0.05);
        // bounded orbits stay inside the well
        let tr = flow(&h, 20.0, 0.0, 1.0, &s).unwrap();
        assert!(tr.samples.iter().all(|p| p.q.abs() < 1.0));
    }

    #[test]
    fn period_symmetries() {
        let h = model();
        let s = FlowSettings::default();
        for &p0 in &[0.3, 0.9, 1.3] {
            let big_t = period(p0).unwrap();
            for k in 1..8 {
                let t = big_t * k as f64 / 16.0;
                let a = flow_end(&h, t, 0.0, p0, &s).unwrap().q;
                let b = flow_end(&h, big_t / 2.0 - t, 0.0, p0, &s).unwrap().q;
                let c = flow_end(&h, big_t - t, 0.0, p0, &s).unwrap().q;
                assert!((a - b).abs() < 1e-6, "p0={p0} t={t}");
                assert!((a + c).abs() < 1e-6, "p0={p0} t={t}");
            }
        }
    }

    #[test]
    fn ordering_of_orbits_from_the_origin() {
        let h = model();
        let s = FlowSettings::with_dt(1e-3);
        let ps = [0.2, 0.6, 1.0, 1.3, 1.45, 1.9];
        for w in ps.windows(2) {
            let half = if w[0] < ESCAPE_MOMENTUM { period(w[0]).unwrap() / 2.0 } else { 3.0 };
            for k in 1..=20 {
                let t = half * k as f64 / 20.0;
                let a = flow_end(&h, t, 0.0, w[0], &s).unwrap().q;
                let b = flow_end(&h, t, 0.0, w[1], &s).unwrap().q;
                assert!(a < b, "{w:?} t={t}");
            }
        }
    }

    #[test]
    fn portrait_export_rows() {
        let orbits = phase_portrait(&[(0.0, 0.5), (0.5, 2.0)], 1.0, &FlowSettings::with_dt(1e-2), 10).unwrap();
        let rows = portrait_rows(&orbits);
        assert_eq!(rows.len(), 2 * 11);
        assert!(rows.iter().all(|r| r.len() == 7));
    }
}
