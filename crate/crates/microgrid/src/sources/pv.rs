//! Five-parameter single-diode PV model: light-generated current source,
//! diode, series and shunt resistances. The module current at a given
//! terminal voltage is the root of an implicit equation, solved by Newton
//! iteration with a bisection fallback.

use crate::error::SimError;
use serde::{Deserialize, Serialize};

/// Boltzmann constant (J/K).
pub const K_BOLTZMANN: f64 = 1.380649e-23;
/// Elementary charge (C).
pub const Q_ELECTRON: f64 = 1.602177e-19;
/// Reference irradiance (W/m^2).
pub const G_REF: f64 = 1000.0;

const SOLVE_TOL: f64 = 1e-9;
const SOLVE_MAX_ITER: usize = 100;
const EXP_GUARD: f64 = 700.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PvModuleParams {
    /// Light-generated current at G_ref = 1000 W/m^2, T_ref = 25 C (A).
    pub il_ref: f64,
    /// Diode saturation current (A).
    pub i0: f64,
    /// Series resistance (ohm).
    pub rs: f64,
    /// Shunt resistance (ohm).
    pub rsh: f64,
    /// Diode ideality factor, near 1.0.
    pub nl: f64,
    /// Series cells per module.
    pub ncell: u32,
}

impl PvModuleParams {
    pub fn validate(&self, key: &str) -> Result<(), crate::error::ScenarioError> {
        use crate::error::ScenarioError as E;
        if self.rsh <= 0.0 {
            return Err(E::constraint(&format!("{key}.rsh"), "must be > 0 ohm"));
        }
        if self.rs < 0.0 {
            return Err(E::constraint(&format!("{key}.rs"), "must be >= 0 ohm"));
        }
        if self.i0 <= 0.0 {
            return Err(E::constraint(&format!("{key}.i0"), "must be > 0 A"));
        }
        if self.ncell < 1 {
            return Err(E::constraint(&format!("{key}.ncell"), "must be >= 1"));
        }
        if self.nl <= 0.0 {
            return Err(E::constraint(&format!("{key}.nl"), "must be > 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PvArrayParams {
    pub module: PvModuleParams,
    /// Modules per string.
    pub n_series: u32,
    /// Parallel strings.
    pub n_parallel: u32,
}

impl PvArrayParams {
    pub fn validate(&self, key: &str) -> Result<(), crate::error::ScenarioError> {
        use crate::error::ScenarioError as E;
        self.module.validate(&format!("{key}.module"))?;
        if self.n_series < 1 {
            return Err(E::constraint(&format!("{key}.n_series"), "must be >= 1"));
        }
        if self.n_parallel < 1 {
            return Err(E::constraint(&format!("{key}.n_parallel"), "must be >= 1"));
        }
        Ok(())
    }
}

/// Module thermal voltage V_T = kT/q * nl * Ncell.
pub fn pv_thermal_voltage(p: &PvModuleParams, t_kelvin: f64) -> f64 {
    debug_assert!(t_kelvin > 0.0);
    K_BOLTZMANN * t_kelvin / Q_ELECTRON * p.nl * p.ncell as f64
}

/// Diode current I_d = I0 * (exp(Vd/V_T) - 1).
pub fn pv_diode_current(vd: f64, p: &PvModuleParams, t_kelvin: f64) -> Result<f64, SimError> {
    let vt = pv_thermal_voltage(p, t_kelvin);
    let x = vd / vt;
    if x > EXP_GUARD {
        return Err(SimError::PvExponentOverflow { x });
    }
    Ok(p.i0 * (x.exp() - 1.0))
}

fn residual(i: f64, v: f64, il: f64, p: &PvModuleParams, vt: f64) -> Result<f64, SimError> {
    let vd = v + i * p.rs;
    let x = vd / vt;
    if x > EXP_GUARD {
        return Err(SimError::PvExponentOverflow { x });
    }
    Ok(il - p.i0 * (x.exp() - 1.0) - vd / p.rsh - i)
}

/// Module current at terminal voltage `v`, irradiance `g`, temperature
/// `t_kelvin`; solves IL - I0*(exp((V+I*Rs)/VT) - 1) - (V+I*Rs)/Rsh = I
/// to a residual below 1e-9 A. Newton from I = IL, bisection fallback.
pub fn pv_module_current(
    v: f64,
    g: f64,
    t_kelvin: f64,
    p: &PvModuleParams,
) -> Result<f64, SimError> {
    let il = p.il_ref * g / G_REF;
    let vt = pv_thermal_voltage(p, t_kelvin);

    // Rs = 0 makes the equation explicit.
    if p.rs == 0.0 {
        return Ok(il - pv_diode_current(v, p, t_kelvin)? - v / p.rsh);
    }

    let mut i = il;
    for _ in 0..SOLVE_MAX_ITER {
        let f = residual(i, v, il, p, vt)?;
        if f.abs() <= SOLVE_TOL {
            return Ok(i);
        }
        let vd = v + i * p.rs;
        let dfdi = -p.i0 * (p.rs / vt) * (vd / vt).exp() - p.rs / p.rsh - 1.0;
        let next = i - f / dfdi;
        if !next.is_finite() {
            break;
        }
        i = next;
    }
    pv_module_current_bisect(v, g, t_kelvin, p)
}

/// Bisection solve of the same implicit equation; independent of the
/// Newton path and used as its fallback and as a test oracle.
pub fn pv_module_current_bisect(
    v: f64,
    g: f64,
    t_kelvin: f64,
    p: &PvModuleParams,
) -> Result<f64, SimError> {
    let il = p.il_ref * g / G_REF;
    let vt = pv_thermal_voltage(p, t_kelvin);
    // f is strictly decreasing in I. Lower bound: full shunt + diode draw
    // at zero terminal drop across Rs cannot push I below this.
    let mut lo = -(v.abs() / p.rsh + il + 1.0);
    let mut hi = il + 1.0;
    let f_lo = residual(lo, v, il, p, vt)?;
    let f_hi = residual(hi, v, il, p, vt)?;
    if f_lo < 0.0 || f_hi > 0.0 {
        return Err(SimError::PvSolverDiverged {
            iterations: 0,
            residual: f_lo.min(f_hi),
        });
    }
    let mut last = f64::NAN;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        last = residual(mid, v, il, p, vt)?;
        if last.abs() <= SOLVE_TOL || hi - lo < 1e-15 {
            return Ok(mid);
        }
        if last > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(SimError::PvSolverDiverged {
        iterations: 200,
        residual: last,
    })
}

/// Module open-circuit voltage: the root of I(V) = 0, found by bisection
/// on the monotone-decreasing I-V curve.
pub fn pv_module_voc(g: f64, t_kelvin: f64, p: &PvModuleParams) -> Result<f64, SimError> {
    let vt = pv_thermal_voltage(p, t_kelvin);
    let il = p.il_ref * g / G_REF;
    if il <= 0.0 {
        return Ok(0.0);
    }
    // Upper bound from the ideal diode equation, plus shunt margin.
    let mut hi = vt * (il / p.i0 + 1.0).ln() * 1.5 + 1.0;
    let mut lo = 0.0;
    while pv_module_current(hi, g, t_kelvin, p)? > 0.0 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if pv_module_current(mid, g, t_kelvin, p)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-12 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Array current: n_parallel strings of n_series modules,
/// I = n_parallel * I_module(V / n_series).
pub fn pv_array_iv(
    v_array: f64,
    g: f64,
    t_kelvin: f64,
    a: &PvArrayParams,
) -> Result<f64, SimError> {
    let i_module = pv_module_current(v_array / a.n_series as f64, g, t_kelvin, &a.module)?;
    Ok(a.n_parallel as f64 * i_module)
}

/// Array open-circuit voltage.
pub fn pv_array_voc(g: f64, t_kelvin: f64, a: &PvArrayParams) -> Result<f64, SimError> {
    Ok(a.n_series as f64 * pv_module_voc(g, t_kelvin, &a.module)?)
}

/// Brute-force maximum power point: sweep V over [0, Voc] at 1 mV
/// resolution and return the argmax of V*I(V). Test oracle for MPPT.
pub fn pv_mpp_oracle(
    a: &PvArrayParams,
    g: f64,
    t_kelvin: f64,
) -> Result<(f64, f64), SimError> {
    let voc = pv_array_voc(g, t_kelvin, a)?;
    let steps = (voc / 1e-3).ceil() as usize;
    let mut best_v = 0.0;
    let mut best_p = 0.0;
    for k in 0..=steps {
        let v = k as f64 * 1e-3;
        if v > voc {
            break;
        }
        let p = v * pv_array_iv(v, g, t_kelvin, a)?;
        if p > best_p {
            best_p = p;
            best_v = v;
        }
    }
    Ok((best_v, best_p))
}
