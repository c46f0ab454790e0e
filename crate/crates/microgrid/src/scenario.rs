//! Scenario definition, TOML parsing with preset expansion, validation,
//! and serialization. A scenario is the complete, deterministic input of
//! one simulation run.

use crate::bus::{BusParams, LoadProfile};
use crate::control::MpptParams;
use crate::converter::{ConverterParams, Fidelity};
use crate::error::ScenarioError;
use crate::presets;
use crate::sources::{BatteryParams, FuelCellParams, PvArrayParams};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClockConfig {
    /// Integration step (s).
    pub dt: f64,
    /// End time (s); integration starts at t = 0.
    pub t_end: f64,
    /// Trace recording interval (s).
    pub record_interval: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PiGains {
    pub kp: f64,
    pub ki: f64,
}

/// Droop slope plus inner PI gains for a bus-regulating converter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DroopPiConfig {
    /// Full-rating voltage deviation (V); droop slope m = delta_v_max/rating.
    pub delta_v_max: f64,
    pub kp: f64,
    pub ki: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatterySection {
    pub enabled: bool,
    pub params: BatteryParams,
    pub initial_soc: f64,
    pub converter: ConverterParams,
    pub control: DroopPiConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IrradianceProfile {
    Constant { g: f64 },
    /// Left-closed irradiance steps, (t, G) pairs.
    Steps { levels: Vec<(f64, f64)> },
}

impl IrradianceProfile {
    pub fn at(&self, t: f64) -> f64 {
        match self {
            IrradianceProfile::Constant { g } => *g,
            IrradianceProfile::Steps { levels } => {
                let mut g = levels[0].1;
                for &(ti, gi) in levels {
                    if t >= ti {
                        g = gi;
                    } else {
                        break;
                    }
                }
                g
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PvSection {
    pub enabled: bool,
    pub array: PvArrayParams,
    /// PV-side link capacitance at the boost input (F).
    pub c_in: f64,
    pub irradiance: IrradianceProfile,
    pub temperature_k: f64,
    pub converter: ConverterParams,
    pub mppt: MpptParams,
    /// Initial MPPT voltage reference (V).
    pub v_ref_init: f64,
    pub pi: PiGains,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FuelCellSection {
    pub enabled: bool,
    pub params: FuelCellParams,
    pub converter: ConverterParams,
    pub control: DroopPiConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub fidelity: Fidelity,
    pub clock: ClockConfig,
    /// Sample period of the inner PI loops (s); zero-order hold between
    /// samples.
    pub ctrl_period: f64,
    /// Any |state| above this aborts the run as numerical blow-up.
    pub abort_bound: f64,
    pub bus: BusParams,
    pub load: LoadProfile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub battery: Option<BatterySection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pv: Option<PvSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fuel_cell: Option<FuelCellSection>,
}

impl Scenario {
    pub fn battery_enabled(&self) -> bool {
        self.battery.as_ref().map_or(false, |b| b.enabled)
    }
    pub fn pv_enabled(&self) -> bool {
        self.pv.as_ref().map_or(false, |p| p.enabled)
    }
    pub fn fuel_cell_enabled(&self) -> bool {
        self.fuel_cell.as_ref().map_or(false, |f| f.enabled)
    }

    /// Check every structural and physical constraint. Failures name the
    /// offending key path.
    pub fn validate(&self) -> Result<(), ScenarioError> {
        if self.clock.dt <= 0.0 {
            return Err(ScenarioError::constraint("clock.dt", "must be > 0 s"));
        }
        if self.clock.t_end < 0.0 {
            return Err(ScenarioError::constraint("clock.t_end", "must be >= 0 s"));
        }
        if self.clock.record_interval < self.clock.dt {
            return Err(ScenarioError::constraint(
                "clock.record_interval",
                "must be >= clock.dt",
            ));
        }
        if self.ctrl_period < self.clock.dt {
            return Err(ScenarioError::constraint(
                "ctrl_period",
                "must be >= clock.dt",
            ));
        }
        if self.abort_bound <= 0.0 {
            return Err(ScenarioError::constraint("abort_bound", "must be > 0"));
        }
        self.bus.validate("bus")?;
        self.load.validate("load")?;

        if let Some(b) = &self.battery {
            b.params.validate("battery")?;
            b.converter.validate("battery.converter")?;
            if !(0.0..=1.0).contains(&b.initial_soc) {
                return Err(ScenarioError::constraint(
                    "battery.initial_soc",
                    "must be in [0, 1]",
                ));
            }
            if b.control.delta_v_max <= 0.0 {
                return Err(ScenarioError::constraint(
                    "battery.control.delta_v_max",
                    "must be > 0 V",
                ));
            }
            if b.enabled {
                self.check_switched_divisibility("battery.converter.t_sw", b.converter.t_sw)?;
            }
        }
        if let Some(p) = &self.pv {
            p.array.validate("pv.array")?;
            p.converter.validate("pv.converter")?;
            p.mppt.validate("pv.mppt")?;
            if p.c_in <= 0.0 {
                return Err(ScenarioError::constraint("pv.c_in", "must be > 0 F"));
            }
            if p.temperature_k <= 0.0 {
                return Err(ScenarioError::constraint(
                    "pv.temperature_k",
                    "must be > 0 K",
                ));
            }
            if p.enabled {
                self.check_switched_divisibility("pv.converter.t_sw", p.converter.t_sw)?;
            }
        }
        if let Some(f) = &self.fuel_cell {
            f.params.validate("fuel_cell")?;
            f.converter.validate("fuel_cell.converter")?;
            if f.control.delta_v_max <= 0.0 {
                return Err(ScenarioError::constraint(
                    "fuel_cell.control.delta_v_max",
                    "must be > 0 V",
                ));
            }
            if f.enabled {
                self.check_switched_divisibility("fuel_cell.converter.t_sw", f.converter.t_sw)?;
            }
        }
        Ok(())
    }

    fn check_switched_divisibility(&self, key: &str, t_sw: f64) -> Result<(), ScenarioError> {
        if self.fidelity != Fidelity::Switched {
            return Ok(());
        }
        let ratio = t_sw / self.clock.dt;
        if (ratio - ratio.round()).abs() > 1e-6 {
            return Err(ScenarioError::constraint(
                key,
                format!(
                    "switched fidelity requires clock.dt to divide the switching period \
                     (t_sw/dt = {ratio} is not an integer)"
                ),
            ));
        }
        Ok(())
    }

    /// Serialize to the canonical TOML form; parsing the result yields an
    /// equal scenario.
    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("scenario serializes")
    }
}

/// Parse a scenario from TOML text. A top-level `preset = "name"` key
/// selects a named preset as the base; any other keys in the file then
/// override the preset's fields table-by-table.
pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let mut value: toml::Value = text
        .parse()
        .map_err(|e: toml::de::Error| ScenarioError::Syntax(e.to_string()))?;

    if let Some(table) = value.as_table_mut() {
        if let Some(preset_name) = table.remove("preset") {
            let name = preset_name
                .as_str()
                .ok_or_else(|| ScenarioError::constraint("preset", "must be a string"))?
                .to_string();
            let base = presets::preset(&name)
                .ok_or_else(|| ScenarioError::UnknownPreset(name))?;
            let base_value =
                toml::Value::try_from(&base).map_err(|e| ScenarioError::Syntax(e.to_string()))?;
            value = merge(base_value, value);
        }
    }

    let scenario: Scenario = value
        .try_into()
        .map_err(|e: toml::de::Error| ScenarioError::Syntax(e.to_string()))?;
    scenario.validate()?;
    Ok(scenario)
}

/// Deep merge: `overlay` wins, tables merge recursively.
fn merge(base: toml::Value, overlay: toml::Value) -> toml::Value {
    match (base, overlay) {
        (toml::Value::Table(mut b), toml::Value::Table(o)) => {
            for (k, v) in o {
                let merged = match b.remove(&k) {
                    Some(bv) => merge(bv, v),
                    None => v,
                };
                b.insert(k, merged);
            }
            toml::Value::Table(b)
        }
        (_, overlay) => overlay,
    }
}
