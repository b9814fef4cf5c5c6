use std::path::{Path, PathBuf};

use invdesign::counterexample::DeltaSettings;
use invdesign::flow::FlowSettings;
use invdesign::inverse::InverseSettings;
use invdesign::pde::{HjScheme, SolverSettings};
use invdesign::{HamiltonianModel, ModelSpec};
use serde::{Deserialize, Serialize};

use crate::Failure;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub x_min: f64,
    pub x_max: f64,
    /// Number of cells; node profiles carry `n + 1` values.
    pub n: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            x_min: -3.0,
            x_max: 3.0,
            n: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TimeConfig {
    #[serde(rename = "T")]
    pub horizon: f64,
    pub cfl: f64,
    /// Step of the ray integrator (characteristics, orbits, exact solution).
    pub dt_ode: f64,
    /// Number of stored profiles after the initial one.
    pub snapshots: usize,
}

impl Default for TimeConfig {
    fn default() -> Self {
        Self {
            horizon: 1.48,
            cfl: invdesign::pde::DEFAULT_CFL,
            dt_ode: 1e-3,
            snapshots: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Reachability tolerance; `20 dx Lip(W) + 1e-3` when absent.
    pub reach: Option<f64>,
    /// Pointwise tolerance of the membership test; `10 dx (1 + Lip(U0*))` when absent.
    pub point: Option<f64>,
    /// Allowed relative energy drift of the ray integrator.
    pub energy: f64,
    /// Residual of the exact-solution inversion.
    pub delta: f64,
    /// Merge distance of the closure intervals, in cells.
    pub gap_cells: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            reach: None,
            point: None,
            energy: invdesign::flow::DEFAULT_ENERGY_TOL,
            delta: 1e-10,
            gap_cells: 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSpec,
    pub grid: GridConfig,
    pub time: TimeConfig,
    pub tolerances: Tolerances,
    pub hj_scheme: HjScheme,
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            model: ModelSpec::default(),
            grid: GridConfig::default(),
            time: TimeConfig::default(),
            tolerances: Tolerances::default(),
            hj_scheme: HjScheme::default(),
            out: PathBuf::from("out"),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("config {}: {e}", path.display())))
    }

    /// Rejects configurations no command can run with.
    pub fn validate(&self) -> Result<HamiltonianModel, Failure> {
        let bad = |msg: String| Err(Failure::Usage(msg));
        let g = &self.grid;
        if g.n < 16 {
            return bad(format!("grid.n must be at least 16, got {}", g.n));
        }
        if !(g.x_min.is_finite() && g.x_max.is_finite() && g.x_max > g.x_min) {
            return bad(format!("grid window [{}, {}] is empty", g.x_min, g.x_max));
        }
        let t = &self.time;
        if !(t.horizon > 0.0 && t.horizon.is_finite()) {
            return bad(format!("time.T must be positive, got {}", t.horizon));
        }
        if !(t.cfl > 0.0 && t.cfl < 1.0) {
            return bad(format!("time.cfl must lie in (0, 1), got {}", t.cfl));
        }
        if !(t.dt_ode > 0.0 && t.dt_ode.is_finite()) {
            return bad(format!("time.dt_ode must be positive, got {}", t.dt_ode));
        }
        let tol = &self.tolerances;
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Failure::Usage(format!("tolerances.{name} must be positive, got {v}")))
            }
        };
        positive("energy", tol.energy)?;
        positive("delta", tol.delta)?;
        positive("gap_cells", tol.gap_cells)?;
        if let Some(v) = tol.reach {
            positive("reach", v)?;
        }
        if let Some(v) = tol.point {
            positive("point", v)?;
        }
        self.model.build().map_err(|e| Failure::Usage(e.to_string()))
    }

    pub fn flow(&self) -> FlowSettings {
        FlowSettings {
            dt: self.time.dt_ode,
            energy_tol: self.tolerances.energy,
        }
    }

    pub fn solver(&self) -> SolverSettings {
        SolverSettings {
            cfl: self.time.cfl,
            hj_scheme: self.hj_scheme,
            output_times: Vec::new(),
        }
    }

    pub fn inverse(&self) -> InverseSettings {
        InverseSettings {
            solver: self.solver(),
            pi_flow: self.flow(),
            tol_reach: self.tolerances.reach,
            tol_point: self.tolerances.point,
            gap_cells: self.tolerances.gap_cells,
        }
    }

    pub fn delta(&self) -> DeltaSettings {
        DeltaSettings {
            flow: self.flow(),
            tol: self.tolerances.delta,
            ..DeltaSettings::default()
        }
    }
}
