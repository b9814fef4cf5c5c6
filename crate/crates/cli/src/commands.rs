use std::path::Path;

use invdesign::counterexample::{
    chicone_certificate, chicone_polynomial, datum_profile, exact_profile, period, phase_portrait, portrait_rows, rational,
    shock_trace, PeriodTable, SturmChain, ESCAPE_MOMENTUM, PERIOD_LIMIT, SHOCK_ONSET,
};
use invdesign::grid::{derivative, primitive, GridProfile, Layout};
use invdesign::inverse::InverseDesign;
use invdesign::io::{read_profile, write_numeric_file, write_profile};
use invdesign::pde::{evolve_cl, evolve_hj};
use invdesign::rays::write_pi_csv;
use invdesign::HamiltonianModel;

use crate::config::RunConfig;
use crate::{Artifact, Equation, Failure};

pub struct CounterexampleArgs {
    pub t: Option<f64>,
    pub count: usize,
    pub p_min: f64,
    pub p_max: f64,
    pub t_max: f64,
}

fn io_failure(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::Io(format!("{}: {e}", path.display()))
}

fn create_out(dir: &Path) -> Result<(), Failure> {
    std::fs::create_dir_all(dir).map_err(|e| io_failure(dir, e))
}

pub fn evolve(config: &RunConfig, h: &HamiltonianModel, equation: Equation, datum: &Path) -> Result<(), Failure> {
    let g = &config.grid;
    let layout = match equation {
        Equation::Cl => Layout::Cells,
        Equation::Hj => Layout::Nodes,
    };
    let u0 = read_profile(datum, g.x_min, g.x_max, g.n, layout)?;
    let t = config.time.horizon;
    let settings = config.solver().evenly_stored(t, config.time.snapshots);
    let (field, name) = match equation {
        Equation::Cl => (evolve_cl(h, &u0, t, &settings)?, "u"),
        Equation::Hj => (evolve_hj(h, &u0, t, &settings)?, "U"),
    };
    field.write_dir(&config.out, name)?;
    println!(
        "steps {}  profiles {}  shock threshold {:.4e}  first shock {}",
        field.steps,
        field.times.len(),
        field.shock_threshold,
        field.first_shock_time.map_or("none".to_string(), |s| format!("t = {s:.6}"))
    );
    Ok(())
}

pub fn invert(
    config: &RunConfig,
    h: &HamiltonianModel,
    w_path: &Path,
    u0_path: Option<&Path>,
    cl: bool,
) -> Result<(), Failure> {
    let g = &config.grid;
    let w = if cl {
        primitive(&read_profile(w_path, g.x_min, g.x_max, g.n, Layout::Cells)?, 0.0)
    } else {
        read_profile(w_path, g.x_min, g.x_max, g.n, Layout::Nodes)?
    };
    let raw_u0 = match u0_path {
        Some(p) if cl => Some(read_profile(p, g.x_min, g.x_max, g.n, Layout::Cells)?),
        Some(p) => Some(read_profile(p, g.x_min, g.x_max, g.n, Layout::Nodes)?),
        None => None,
    };
    let settings = config.inverse();
    let design = InverseDesign::new(h, config.time.horizon, &w, &settings)?;
    let membership = match raw_u0 {
        Some(u0) if design.reach.reachable => {
            let u0 = if cl { primitive(&u0, design.u_star.profile.values()[0]) } else { u0 };
            Some(design.membership(h, &w, &u0, &settings)?)
        }
        Some(_) => {
            eprintln!("invdesign: W is not reachable; membership of U0 is not tested");
            None
        }
        None => None,
    };
    let report = design.report(membership);
    create_out(&config.out)?;
    let json_path = config.out.join("report.json");
    std::fs::write(&json_path, report.to_json() + "\n").map_err(|e| io_failure(&json_path, e))?;
    write_profile(&config.out.join("u_star.csv"), &design.u_star.profile, "U0_star")?;
    write_profile(&config.out.join("u_star_slope.csv"), &derivative(&design.u_star.profile), "u0_star")?;
    let pi_path = config.out.join("pi.csv");
    let file = std::fs::File::create(&pi_path).map_err(|e| io_failure(&pi_path, e))?;
    write_pi_csv(&design.closure.pi, file).map_err(|e| io_failure(&pi_path, e))?;
    println!("{}", report.to_json());
    Ok(())
}

pub fn counterexample(config: &RunConfig, what: Artifact, args: &CounterexampleArgs) -> Result<(), Failure> {
    match what {
        Artifact::Period => {
            if !(args.p_min > 0.0 && args.p_max < ESCAPE_MOMENTUM && args.p_min < args.p_max && args.count >= 2) {
                return Err(Failure::Usage(format!(
                    "period needs 0 < p-min < p-max < sqrt 2 and count >= 2, got [{}, {}] with {}",
                    args.p_min, args.p_max, args.count
                )));
            }
            let table = PeriodTable::new(args.p_min, args.p_max, args.count)?;
            create_out(&config.out)?;
            write_numeric_file(&config.out.join("period.csv"), &["p0", "period", "quadrature_error"], table.rows())?;
            let small = period(0.01)?;
            println!(
                "min period {:.12} at p0 = {}; T(0.01) = {small:.12}, limit pi/sqrt2 = {PERIOD_LIMIT:.12}; increasing: {}",
                table.periods[0], table.p_values[0], table.is_strictly_increasing()
            );
        }
        Artifact::Portrait => {
            if !(args.t_max > 0.0) {
                return Err(Failure::Usage(format!("t-max must be positive, got {}", args.t_max)));
            }
            let mut starts: Vec<(f64, f64)> = [0.25, 0.5, 0.75, 1.0, 1.25, ESCAPE_MOMENTUM, 1.75]
                .iter()
                .map(|&p| (0.0, p))
                .collect();
            starts.extend([(0.0, -1.0), (-1.5, 2.0), (-0.5, 2.0), (0.5, 2.0)]);
            let stride = (0.01 / config.time.dt_ode).round().max(1.0) as usize;
            let orbits = phase_portrait(&starts, args.t_max, &config.flow(), stride)?;
            create_out(&config.out)?;
            write_numeric_file(
                &config.out.join("portrait.csv"),
                &["orbit", "q0", "p0", "t", "q", "p", "H"],
                portrait_rows(&orbits),
            )?;
            println!("{} orbits over [0, {}]", orbits.len(), args.t_max);
        }
        Artifact::Exact => {
            let g = &config.grid;
            let t = config.time.horizon;
            let xs = GridProfile::cells(g.x_min, g.x_max, vec![0.0; g.n])?.positions();
            // the axis carries the shock; its value is the mean of the traces
            let off_axis: Vec<f64> = xs.iter().copied().filter(|&x| x != 0.0).collect();
            let mut values = exact_profile(t, &off_axis, &config.delta())?.into_iter();
            let u: Vec<f64> = xs.iter().map(|&x| if x == 0.0 { 0.0 } else { values.next().unwrap() }).collect();
            create_out(&config.out)?;
            let rows = |f: &dyn Fn(usize) -> f64| xs.iter().enumerate().map(|(i, &x)| vec![x, f(i)]).collect::<Vec<_>>();
            write_numeric_file(&config.out.join("exact.csv"), &["x", "u"], rows(&|i| u[i]))?;
            let datum = datum_profile(g.x_min, g.x_max, g.n)?;
            write_numeric_file(&config.out.join("datum.csv"), &["x", "u"], rows(&|i| datum.values()[i]))?;
            println!("exact profile at t = {t} on {} cells{}", g.n, if t > SHOCK_ONSET {
                format!("; shock at x = 0 with jump {:.10}", shock_trace(t)?)
            } else {
                String::new()
            });
        }
        Artifact::Sturm => {
            let p = chicone_polynomial();
            let chain = SturmChain::new(&p);
            let ends = [rational(-1, 1), rational(1, 1)];
            let mut header = String::from("x ");
            for k in 0..chain.polynomials.len() {
                header += &format!(" P{k}");
            }
            println!("{header}  changes");
            for x in &ends {
                let signs: String = chain
                    .signs_at(x)
                    .iter()
                    .map(|s| match s {
                        1 => "  +",
                        -1 => "  -",
                        _ => "  0",
                    })
                    .collect();
                println!("{:>2}{signs}  {}", x.to_string(), chain.sign_changes(x));
            }
            let roots = chain.root_count(&ends[0], &ends[1]);
            println!("roots in [-1,1]: {roots}");
            println!("P(0) = {}", p.eval(&rational(0, 1)));
            println!("certificate: {}", if chicone_certificate() { "verified" } else { "FAILED" });
        }
        Artifact::Shock => {
            let t = args.t.unwrap_or(config.time.horizon);
            let jump = shock_trace(t)?;
            create_out(&config.out)?;
            write_numeric_file(&config.out.join("shock.csv"), &["t", "jump"], [vec![t, jump]])?;
            println!("t = {t}: jump u(0-) - u(0+) = {jump:.12}");
        }
    }
    Ok(())
}
