use invdesign_wasm::{counterexample_profiles, orbit, period_curve, shock_jump};

#[test]
fn profiles_have_three_blocks() {
    let v = counterexample_profiles(100, 3.0, 0.8).unwrap();
    assert_eq!(v.len(), 300);
    let (xs, rest) = v.split_at(100);
    let (fv, exact) = rest.split_at(100);
    assert!(xs.windows(2).all(|w| w[1] > w[0]));
    let l1: f64 = fv.iter().zip(exact).map(|(a, b)| (a - b).abs() * 0.06).sum();
    assert!(l1 < 0.3, "{l1}");
}

#[test]
fn bad_arguments_are_errors() {
    assert!(counterexample_profiles(4, 3.0, 1.0).is_err());
    assert!(counterexample_profiles(100, 3.0, -1.0).is_err());
    assert!(period_curve(10, 0.5, 1.5).is_err());
    assert!(orbit(0.0, 1.0, 0.0).is_err());
}

#[test]
fn odd_cell_counts_keep_the_axis_at_zero() {
    // the centre cell straddles the shock; both profiles are odd
    let v = counterexample_profiles(101, 3.0, 1.5).unwrap();
    assert_eq!(v[50], 0.0);
    assert!(v[101 + 50].abs() < 1e-12, "{}", v[101 + 50]);
    assert_eq!(v[2 * 101 + 50], 0.0);
}

#[test]
fn period_curve_increases() {
    let v = period_curve(20, 0.05, 1.4).unwrap();
    let ts = &v[20..];
    assert!(ts.windows(2).all(|w| w[1] > w[0]));
    assert!((ts[0] - std::f64::consts::PI / 2f64.sqrt()).abs() < 0.01);
}

#[test]
fn orbits_stay_on_their_energy_level() {
    let v = orbit(0.0, 1.0, 5.0).unwrap();
    let n = v.len() / 2;
    assert!(n > 100);
    let (q, p) = v.split_at(n);
    let g = |x: f64| if x.abs() < 1.0 { 1.0 - (1.0 - x * x).powi(4) } else { 1.0 };
    for (&q, &p) in q.iter().zip(p) {
        assert!((0.5 * p * p + g(q) - 0.5).abs() < 1e-7);
    }
}

#[test]
fn shock_jump_is_zero_before_onset() {
    assert_eq!(shock_jump(1.0), 0.0);
    assert!(shock_jump(1.5) > 0.0);
}
