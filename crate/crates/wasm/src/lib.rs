//! Browser bindings for the demo page in `www/`.
//!
//! Arrays cross the boundary flat: a profile of `n` cells comes back as
//! `[x_0 .. x_{n-1}, values ...]`. The plain functions carry the logic and
//! are tested natively; the exported wrappers only convert errors.

use invdesign::counterexample::{
    datum_profile, exact_profile, model, period, phase_portrait, shock_trace, ESCAPE_MOMENTUM, SHOCK_ONSET,
};
use invdesign::flow::FlowSettings;
use invdesign::pde::{evolve_cl, SolverSettings};
use wasm_bindgen::prelude::*;

const MAX_CELLS: usize = 4000;

/// Finite volume and exact profiles of the counterexample at time `t` on
/// `[-half_width, half_width]`: `[x.., fv.., exact..]`.
pub fn counterexample_profiles(n: usize, half_width: f64, t: f64) -> Result<Vec<f64>, String> {
    if !(16..=MAX_CELLS).contains(&n) {
        return Err(format!("cells must lie in [16, {MAX_CELLS}], got {n}"));
    }
    if !(half_width > 0.0 && t > 0.0 && t <= 10.0) {
        return Err(format!("need a positive window and 0 < t <= 10, got {half_width}, {t}"));
    }
    let u0 = datum_profile(-half_width, half_width, n).map_err(|e| e.to_string())?;
    let fv = evolve_cl(&model(), &u0, t, &SolverSettings::default()).map_err(|e| e.to_string())?;
    let xs = u0.positions();
    // the exact solution is odd; at the axis the mean of the traces is 0
    let off_axis: Vec<f64> = xs.iter().copied().filter(|&x| x != 0.0).collect();
    let mut exact = exact_profile(t, &off_axis, &Default::default()).map_err(|e| e.to_string())?.into_iter();
    let exact: Vec<f64> = xs.iter().map(|&x| if x == 0.0 { 0.0 } else { exact.next().unwrap_or(0.0) }).collect();
    let mut out = xs;
    out.extend_from_slice(fv.last().values());
    out.extend(exact);
    Ok(out)
}

/// Period function sampled at `n` momenta in `[p_min, p_max]`: `[p.., T..]`.
pub fn period_curve(n: usize, p_min: f64, p_max: f64) -> Result<Vec<f64>, String> {
    if n < 2 || !(p_min > 0.0 && p_min < p_max && p_max < ESCAPE_MOMENTUM) {
        return Err(format!("need n >= 2 and 0 < p_min < p_max < sqrt 2, got {n}, [{p_min}, {p_max}]"));
    }
    let ps: Vec<f64> = (0..n).map(|k| p_min + (p_max - p_min) * k as f64 / (n - 1) as f64).collect();
    let ts = ps.iter().map(|&p| period(p)).collect::<Result<Vec<_>, _>>().map_err(|e| e.to_string())?;
    Ok(ps.into_iter().chain(ts).collect())
}

/// Orbit of the quartic well through `(q0, p0)` over `[0, t_max]`, about
/// 500 samples: `[q.., p..]`.
pub fn orbit(q0: f64, p0: f64, t_max: f64) -> Result<Vec<f64>, String> {
    if !(q0.is_finite() && p0.is_finite() && t_max > 0.0 && t_max <= 50.0) {
        return Err(format!("need finite (q0, p0) and 0 < t_max <= 50, got ({q0}, {p0}), {t_max}"));
    }
    let settings = FlowSettings::with_dt(1e-3);
    let stride = ((t_max / settings.dt) as usize / 500).max(1);
    let orbits = phase_portrait(&[(q0, p0)], t_max, &settings, stride).map_err(|e| e.to_string())?;
    let pts = &orbits[0].points;
    Ok(pts.iter().map(|s| s.1).chain(pts.iter().map(|s| s.2)).collect())
}

/// Jump of the stationary shock at `x = 0`, zero before it forms.
pub fn shock_jump(t: f64) -> f64 {
    if t <= SHOCK_ONSET {
        0.0
    } else {
        shock_trace(t).unwrap_or(f64::NAN)
    }
}

#[wasm_bindgen(js_name = counterexampleProfiles)]
pub fn counterexample_profiles_js(n: usize, half_width: f64, t: f64) -> Result<Vec<f64>, JsError> {
    counterexample_profiles(n, half_width, t).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = periodCurve)]
pub fn period_curve_js(n: usize, p_min: f64, p_max: f64) -> Result<Vec<f64>, JsError> {
    period_curve(n, p_min, p_max).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = orbit)]
pub fn orbit_js(q0: f64, p0: f64, t_max: f64) -> Result<Vec<f64>, JsError> {
    orbit(q0, p0, t_max).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = shockJump)]
pub fn shock_jump_js(t: f64) -> f64 {
    shock_jump(t)
}

#[wasm_bindgen(js_name = shockOnset)]
pub fn shock_onset() -> f64 {
    SHOCK_ONSET
}
