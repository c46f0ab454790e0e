//! Shepherd-type Li-ion battery model: nonlinear EMF with a
//! capacity-dependent polarization term and an exponential voltage zone,
//! constant internal resistance, and a first-order filter producing the
//! low-frequency current i*.

use crate::error::SimError;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatteryParams {
    /// Constant voltage E0 (V).
    pub e0: f64,
    /// Polarization constant (V/Ah), doubling as polarization resistance (ohm).
    pub k: f64,
    /// Maximum capacity (Ah).
    pub q: f64,
    /// Exponential voltage (V).
    pub a: f64,
    /// Exponential capacity (1/Ah).
    pub b: f64,
    /// Internal resistance (ohm), constant over charge and discharge.
    pub r_int: f64,
    /// Time constant of the low-pass filter producing i* (s).
    pub tau_filter: f64,
}

impl BatteryParams {
    pub fn validate(&self, key: &str) -> Result<(), crate::error::ScenarioError> {
        use crate::error::ScenarioError as E;
        if self.q <= 0.0 {
            return Err(E::constraint(&format!("{key}.q"), "capacity must be > 0 Ah"));
        }
        if self.r_int < 0.0 {
            return Err(E::constraint(&format!("{key}.r_int"), "must be >= 0 ohm"));
        }
        if self.b <= 0.0 {
            return Err(E::constraint(&format!("{key}.b"), "must be > 0 1/Ah"));
        }
        if self.tau_filter <= 0.0 {
            return Err(E::constraint(&format!("{key}.tau_filter"), "must be > 0 s"));
        }
        if self.e0 <= 0.0 {
            return Err(E::constraint(&format!("{key}.e0"), "must be > 0 V"));
        }
        Ok(())
    }
}

/// Battery operating mode: 0 while discharging, 1 while charging
/// (positive terminal current = discharge).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BatteryMode {
    Discharge = 0,
    Charge = 1,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BatteryState {
    /// Extracted capacity it (Ah).
    pub it: f64,
    /// Low-frequency current dynamics i* (A).
    pub i_star: f64,
    /// State of charge, 1 - it/Q.
    pub soc: f64,
    /// Mode flag Sel.
    pub sel: BatteryMode,
}

impl BatteryState {
    /// Fully charged battery at rest.
    pub fn full() -> Self {
        BatteryState {
            it: 0.0,
            i_star: 0.0,
            soc: 1.0,
            sel: BatteryMode::Discharge,
        }
    }
}

/// Nonlinear EMF E_Batt.
///
/// Discharge: E = E0 - K*(Q/(Q-it))*i* - K*(Q/(Q-it))*it + A*exp(-B*it).
/// Charge: the i* term uses K*(Q/(it + 0.1*Q)) instead.
pub fn battery_emf(
    p: &BatteryParams,
    s: &BatteryState,
    i_star: f64,
) -> Result<f64, SimError> {
    if s.it >= p.q {
        return Err(SimError::BatteryDepleted {
            it: s.it,
            q: p.q,
            t: f64::NAN,
        });
    }
    let pol_res = p.k * p.q / (p.q - s.it);
    let pol_volt = pol_res * s.it;
    let exp_zone = p.a * (-p.b * s.it).exp();
    let current_term = match s.sel {
        BatteryMode::Discharge => pol_res * i_star,
        BatteryMode::Charge => p.k * p.q / (s.it + 0.1 * p.q) * i_star,
    };
    Ok(p.e0 - current_term - pol_volt + exp_zone)
}

/// Terminal voltage V = E_Batt - R_int * i (positive i = discharge).
pub fn battery_terminal_voltage(
    p: &BatteryParams,
    s: &BatteryState,
    i: f64,
) -> Result<f64, SimError> {
    Ok(battery_emf(p, s, s.i_star)? - p.r_int * i)
}

/// Explicit state update over one step: it accumulates i*dt/3600 (clamped
/// to [0, Q]), i* follows a first-order lag, soc and sel are re-derived.
pub fn battery_update(s: &BatteryState, i: f64, dt: f64, p: &BatteryParams) -> BatteryState {
    debug_assert!(dt > 0.0);
    let it = (s.it + i * dt / 3600.0).clamp(0.0, p.q);
    let i_star = s.i_star + (dt / p.tau_filter) * (i - s.i_star);
    BatteryState {
        it,
        i_star,
        soc: 1.0 - it / p.q,
        sel: if i < 0.0 {
            BatteryMode::Charge
        } else {
            BatteryMode::Discharge
        },
    }
}
