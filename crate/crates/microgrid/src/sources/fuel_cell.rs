//! Static fuel-cell polarization curve with the three classical regions:
//! activation (Tafel), ohmic, and concentration losses. A series diode
//! keeps stack current nonnegative.

use crate::error::SimError;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FuelCellParams {
    /// Stack open-circuit voltage (V).
    pub e_oc: f64,
    /// Tafel slope of the activation region (V).
    pub a_act: f64,
    /// Exchange current marking the activation knee (A).
    pub i0: f64,
    /// Stack ohmic resistance (ohm).
    pub r_ohm: f64,
    /// Concentration-loss magnitude (V).
    pub m_conc: f64,
    /// Concentration-loss exponent (1/A).
    pub n_conc: f64,
    /// Operating current limit (A).
    pub i_max: f64,
}

impl FuelCellParams {
    pub fn validate(&self, key: &str) -> Result<(), crate::error::ScenarioError> {
        use crate::error::ScenarioError as E;
        if self.e_oc <= 0.0 {
            return Err(E::constraint(&format!("{key}.e_oc"), "must be > 0 V"));
        }
        if self.r_ohm < 0.0 {
            return Err(E::constraint(&format!("{key}.r_ohm"), "must be >= 0 ohm"));
        }
        if self.i0 <= 0.0 {
            return Err(E::constraint(&format!("{key}.i0"), "must be > 0 A"));
        }
        if self.i_max <= self.i0 {
            return Err(E::constraint(&format!("{key}.i_max"), "must exceed i0"));
        }
        Ok(())
    }
}

/// Stack voltage at current `i`:
/// V = E_oc - A_act*ln(max(i, i0)/i0) - R_ohm*i - m_conc*exp(n_conc*i),
/// clamped at zero. Negative current is blocked by the series diode;
/// current above i_max is a mass-transport fault.
pub fn fuel_cell_voltage(i: f64, p: &FuelCellParams) -> Result<f64, SimError> {
    if i < 0.0 {
        return Err(SimError::FuelCellNegativeCurrent { i });
    }
    if i > p.i_max {
        return Err(SimError::FuelCellOverCurrent {
            i,
            i_max: p.i_max,
            t: f64::NAN,
        });
    }
    let activation = p.a_act * (i.max(p.i0) / p.i0).ln();
    let v = p.e_oc - activation - p.r_ohm * i - p.m_conc * (p.n_conc * i).exp();
    Ok(v.max(0.0))
}
