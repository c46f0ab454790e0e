//! The shared DC bus node (KCL over a lumped capacitance) and the
//! time-varying constant-power load profiles.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BusParams {
    /// Lumped bus capacitance (F), absorbing all converter output caps.
    pub c_bus: f64,
    /// Initial bus voltage (V).
    pub v_init: f64,
    /// Nominal bus voltage (V).
    pub v_nom: f64,
    /// Constant-power-load voltage floor, as a fraction of v_nom.
    pub v_floor_frac: f64,
}

impl BusParams {
    pub fn v_floor(&self) -> f64 {
        self.v_floor_frac * self.v_nom
    }

    pub fn validate(&self, key: &str) -> Result<(), crate::error::ScenarioError> {
        use crate::error::ScenarioError as E;
        if self.c_bus <= 0.0 {
            return Err(E::constraint(&format!("{key}.c_bus"), "must be > 0 F"));
        }
        if self.v_init <= 0.0 {
            return Err(E::constraint(&format!("{key}.v_init"), "must be > 0 V"));
        }
        if self.v_nom <= 0.0 {
            return Err(E::constraint(&format!("{key}.v_nom"), "must be > 0 V"));
        }
        if !(0.0..1.0).contains(&self.v_floor_frac) {
            return Err(E::constraint(
                &format!("{key}.v_floor_frac"),
                "must be in [0, 1)",
            ));
        }
        Ok(())
    }
}

/// Demanded load power over time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LoadProfile {
    /// Fixed demand.
    Constant { power: f64 },
    /// Left-closed step levels: power = levels[i].1 for t in [t_i, t_{i+1}).
    Steps { levels: Vec<(f64, f64)> },
    /// Periodic triangle wave between min and max.
    RampCycle { min: f64, max: f64, period: f64 },
    /// Piecewise-linear table of (t, power) breakpoints; held beyond the ends.
    DriveCycle { table: Vec<(f64, f64)> },
}

impl LoadProfile {
    pub fn validate(&self, key: &str) -> Result<(), crate::error::ScenarioError> {
        use crate::error::ScenarioError as E;
        match self {
            LoadProfile::Constant { power } => {
                if *power < 0.0 {
                    return Err(E::constraint(&format!("{key}.power"), "must be >= 0 W"));
                }
            }
            LoadProfile::Steps { levels } => {
                if levels.is_empty() {
                    return Err(E::constraint(&format!("{key}.levels"), "must be non-empty"));
                }
                for w in levels.windows(2) {
                    if w[1].0 <= w[0].0 {
                        return Err(E::constraint(
                            &format!("{key}.levels"),
                            "step times must be strictly increasing",
                        ));
                    }
                }
                if levels.iter().any(|(_, p)| *p < 0.0) {
                    return Err(E::constraint(&format!("{key}.levels"), "powers must be >= 0 W"));
                }
            }
            LoadProfile::RampCycle { min, max, period } => {
                if *min < 0.0 || max < min {
                    return Err(E::constraint(
                        &format!("{key}.min"),
                        "need 0 <= min <= max",
                    ));
                }
                if *period <= 0.0 {
                    return Err(E::constraint(&format!("{key}.period"), "must be > 0 s"));
                }
            }
            LoadProfile::DriveCycle { table } => {
                if table.is_empty() {
                    return Err(E::constraint(&format!("{key}.table"), "must be non-empty"));
                }
                for w in table.windows(2) {
                    if w[1].0 <= w[0].0 {
                        return Err(E::constraint(
                            &format!("{key}.table"),
                            "breakpoint times must be strictly increasing",
                        ));
                    }
                }
                if table.iter().any(|(_, p)| *p < 0.0) {
                    return Err(E::constraint(&format!("{key}.table"), "powers must be >= 0 W"));
                }
            }
        }
        Ok(())
    }
}

/// Demanded power at time `t`.
pub fn load_demand(profile: &LoadProfile, t: f64) -> f64 {
    match profile {
        LoadProfile::Constant { power } => *power,
        LoadProfile::Steps { levels } => {
            let mut p = levels[0].1;
            for &(ti, pi) in levels {
                if t >= ti {
                    p = pi;
                } else {
                    break;
                }
            }
            p
        }
        LoadProfile::RampCycle { min, max, period } => {
            let phase = t.rem_euclid(*period) / period;
            if phase < 0.5 {
                min + (max - min) * 2.0 * phase
            } else {
                max - (max - min) * 2.0 * (phase - 0.5)
            }
        }
        LoadProfile::DriveCycle { table } => {
            if t <= table[0].0 {
                return table[0].1;
            }
            for w in table.windows(2) {
                let (t0, p0) = w[0];
                let (t1, p1) = w[1];
                if t < t1 {
                    return p0 + (p1 - p0) * (t - t0) / (t1 - t0);
                }
            }
            table[table.len() - 1].1
        }
    }
}

/// Constant-power load current with a voltage floor that prevents the
/// singularity at collapsed bus voltage.
pub fn load_current(p_demand: f64, v_bus: f64, v_floor: f64) -> f64 {
    debug_assert!(p_demand >= 0.0);
    p_demand / v_bus.max(v_floor)
}

/// KCL at the bus node: dv_bus/dt = (sum of injected - load)/C.
pub fn bus_derivative(injected_currents: &[f64], i_load: f64, c_bus: f64) -> f64 {
    debug_assert!(c_bus > 0.0);
    (injected_currents.iter().sum::<f64>() - i_load) / c_bus
}
