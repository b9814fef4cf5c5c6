//! Property tests of structural invariants across modules.

use invdesign::flow::{flow_end, FlowSettings};
use invdesign::grid::GridProfile;
use invdesign::hamiltonian::{ConvexFlux, Hamiltonian, HamiltonianModel, ModelKind, Traffic};
use invdesign::inverse::{InverseDesign, InverseSettings};
use invdesign::io::{read_profile, write_profile};
use invdesign::pde::{evolve_hj, HjScheme, SolverSettings};
use invdesign::rays::{monotonicity_defect, pi_map_from_trace, sample_graph, ScanSettings};
use invdesign::Layout;
use proptest::prelude::*;

fn models() -> Vec<HamiltonianModel> {
    vec![
        HamiltonianModel::quartic_well(),
        HamiltonianModel::burgers(),
        HamiltonianModel::new(ModelKind::HomogeneousConvex(ConvexFlux::Cosh), 1.0).unwrap(),
        HamiltonianModel::new(
            ModelKind::TransformedTraffic(Traffic {
                v0: 1.0,
                dv: 0.5,
                r0: 2.0,
                dr: -0.8,
            }),
            1.5,
        )
        .unwrap(),
    ]
}

/// Maximum of a concave function on `[lo, hi]` by golden-section search.
fn concave_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..200 {
        let a = hi - r * (hi - lo);
        let b = lo + r * (hi - lo);
        if f(a) < f(b) {
            lo = a;
        } else {
            hi = b;
        }
    }
    f(0.5 * (lo + hi))
}

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

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn convex_in_momentum(x in -3.0f64..3.0, p in -4.0f64..4.0, dp in 1e-3f64..1.0) {
        for h in models() {
            prop_assert!(h.speed(x, p) < h.speed(x, p + dp));
        }
    }

    #[test]
    fn flat_outside_the_radius(x in 1.0f64..10.0, sign in prop::bool::ANY, p in -4.0f64..4.0) {
        for h in models() {
            let x = if sign { x * h.radius() } else { -x * h.radius() };
            prop_assert_eq!(h.eval(x, p).dx, 0.0);
        }
    }

    #[test]
    fn legendre_duality(x in -2.0f64..2.0, v in -3.0f64..3.0) {
        for h in models() {
            let sup = concave_max(|p| p * v - h.value(x, p), -60.0, 60.0);
            let l = h.legendre(x, v).unwrap();
            prop_assert!((sup - l).abs() <= 1e-8 * (1.0 + l.abs()), "x={} v={} {} {}", x, v, sup, l);
            let back = concave_max(|w| {
                let p = h.momentum_for_speed(x, v).unwrap();
                p * w - h.legendre(x, w).unwrap()
            }, -40.0, 40.0);
            let p = h.momentum_for_speed(x, v).unwrap();
            prop_assert!((back - h.value(x, p)).abs() <= 1e-6 * (1.0 + back.abs()));
        }
    }

    #[test]
    fn flow_reversal(q0 in -2.0f64..2.0, p0 in -2.0f64..2.0, t in 0.1f64..3.0) {
        let s = FlowSettings::default();
        for h in models() {
            let z = flow_end(&h, t, q0, p0, &s).unwrap();
            let back = flow_end(&h, -t, z.q, z.p, &s).unwrap();
            prop_assert!((back.q - q0).abs() < 1e-7 && (back.p - p0).abs() < 1e-7);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn pi_of_smooth_burgers_solutions_is_monotone(a in 0.1f64..0.8, k in 0.5f64..2.0, t in 0.1f64..0.5) {
        // characteristics of u0 = a sin(k x) exp(-x^2) do not cross before t
        let u0 = move |x: f64| a * (k * x).sin() * (-x * x).exp();
        let h = HamiltonianModel::burgers();
        let trace = |x: f64| {
            let (mut lo, mut hi) = (x - 5.0, x + 5.0);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid + t * u0(mid) < x { lo = mid } else { hi = mid }
            }
            u0(0.5 * (lo + hi))
        };
        let pi = pi_map_from_trace(&h, t, -3.0, 3.0, 300, trace, &FlowSettings::with_dt(1e-2)).unwrap();
        prop_assert!(monotonicity_defect(&pi) <= 1e-9);
    }

    #[test]
    fn graph_is_monotone_and_bounded(a in 0.05f64..0.4) {
        let h = HamiltonianModel::burgers();
        let t = 0.5;
        let w = GridProfile::nodes_from_fn(-1.5, 1.5, 60, |x| a * (-2.0 * x * x).exp()).unwrap();
        let design = InverseDesign::new(&h, t, &w, &InverseSettings::default()).unwrap();
        let scan = ScanSettings { flow: FlowSettings::with_dt(0.05), p_samples: 401, ..ScanSettings::default() };
        let g = sample_graph(&h, t, &w, &design.u_star.profile, &scan).unwrap();
        let bound = invdesign::hamiltonian::ray_speed_bound(&h, &w).unwrap().value;
        let mut pairs = g.pairs.clone();
        pairs.sort_by(|p, q| p.x_o.total_cmp(&q.x_o).then(p.x_t.total_cmp(&q.x_t)));
        for w2 in pairs.windows(2) {
            prop_assert!(w2[1].x_t >= w2[0].x_t - 1e-9);
        }
        for p in &pairs {
            prop_assert!((p.x_o - p.x_t).abs() <= t * bound);
        }
    }

    #[test]
    fn bumps_in_the_free_gap_form_a_cone(a in 0.0f64..0.3, b in 0.0f64..0.3) {
        let h = HamiltonianModel::burgers();
        let t = 1.0;
        let w = GridProfile::nodes_from_fn(-3.0, 3.0, 300, |x| -x.abs()).unwrap();
        let s = InverseSettings::default();
        let design = InverseDesign::new(&h, t, &w, &s).unwrap();
        let vertex = design.membership(&h, &w, &design.u_star.profile, &s).unwrap();
        prop_assert!(vertex.member);
        let (b1, b2) = (bump(1.0, -0.3, 0.5), bump(1.0, 0.4, 0.4));
        let u0 = design.u_star.profile.map(|x, v| v + a * b1(x) + b * b2(x));
        let m = design.membership(&h, &w, &u0, &s).unwrap();
        prop_assert!(m.member, "{:?}", m);
    }

    #[test]
    fn eno_stays_within_the_maximum_principle(c in -1.0f64..1.0, a in 0.1f64..1.0) {
        let h = HamiltonianModel::quartic_well();
        let u0 = GridProfile::nodes_from_fn(-2.0, 2.0, 200, |x| c * x + a * (3.0 * x).cos()).unwrap();
        let settings = SolverSettings { hj_scheme: HjScheme::Eno2, ..SolverSettings::default() };
        let t = 0.5;
        let out = evolve_hj(&h, &u0, t, &settings).unwrap();
        let slope = u0.lipschitz();
        let m = (0..=200)
            .flat_map(|i| {
                let x = -2.0 + 0.02 * i as f64;
                (0..=20).map(move |k| (x, -slope + 0.1 * k as f64 * slope))
            })
            .map(|(x, p)| h.value(x, p).abs())
            .fold(0.0, f64::max);
        let (lo, hi) = u0.values().iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, u), &v| (l.min(v), u.max(v)));
        for &v in out.last().values() {
            prop_assert!(v >= lo - t * m - 1e-9 && v <= hi + t * m + 1e-9);
        }
    }

    #[test]
    fn profile_files_round_trip(values in prop::collection::vec(-1e6f64..1e6, 17..40)) {
        let n = values.len() - 1;
        let p = GridProfile::nodes(-1.0, 2.0, values).unwrap();
        let path = std::env::temp_dir().join(format!("invdesign_rt_{}_{n}.csv", std::process::id()));
        write_profile(&path, &p, "U").unwrap();
        let back = read_profile(&path, -1.0, 2.0, n, Layout::Nodes).unwrap();
        std::fs::remove_file(&path).ok();
        prop_assert_eq!(back.values(), p.values());
    }
}
