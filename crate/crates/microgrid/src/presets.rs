//! Default parameter sets and the named scenario presets. Every default
//! lives here; model code never hard-codes a parameter value.

use crate::bus::{BusParams, LoadProfile};
use crate::control::MpptParams;
use crate::converter::{ConverterKind, ConverterParams, Fidelity};
use crate::scenario::{
    BatterySection, ClockConfig, DroopPiConfig, FuelCellSection, IrradianceProfile, PiGains,
    PvSection, Scenario,
};
use crate::sources::{BatteryParams, FuelCellParams, PvArrayParams, PvModuleParams};

/// 240 V / 40 Ah Li-ion pack.
pub fn battery_default() -> BatteryParams {
    BatteryParams {
        e0: 250.0,
        k: 0.12,
        q: 40.0,
        a: 18.0,
        b: 0.15,
        r_int: 0.06,
        tau_filter: 30.0,
    }
}

/// 305.2 W module (30 A class, 18 series cells): fitted so that the
/// default array below peaks at 6.1 kW.
pub fn pv_module_default() -> PvModuleParams {
    PvModuleParams {
        il_ref: 30.0,
        i0: 5.2e-11,
        rs: 0.008,
        rsh: 20.0,
        nl: 1.0,
        ncell: 18,
    }
}

/// Default array: 10 series x 2 parallel of 305.2 W modules = 6.1 kW,
/// string maximum-power voltage near 108 V.
pub fn pv_array_default() -> PvArrayParams {
    PvArrayParams {
        module: pv_module_default(),
        n_series: 10,
        n_parallel: 2,
    }
}

/// Alternative sizing: 66 parallel strings of 5 series modules
/// (about 100 kW with the same module).
pub fn pv_array_66x5() -> PvArrayParams {
    PvArrayParams {
        module: pv_module_default(),
        n_series: 5,
        n_parallel: 66,
    }
}

/// 2.5 kW-class stack with visually distinct activation, ohmic, and
/// concentration regions.
pub fn fuel_cell_default() -> FuelCellParams {
    FuelCellParams {
        e_oc: 65.0,
        a_act: 3.0,
        i0: 1.0,
        r_ohm: 0.06,
        m_conc: 0.8,
        n_conc: 0.025,
        i_max: 130.0,
    }
}

pub fn bus_default() -> BusParams {
    BusParams {
        c_bus: 6.6e-3,
        v_init: 200.0,
        v_nom: 200.0,
        v_floor_frac: 0.2,
    }
}

pub fn converter_default(kind: ConverterKind, rating: f64) -> ConverterParams {
    ConverterParams {
        kind,
        l: 1e-3,
        c: 2.2e-3,
        t_sw: 5e-5,
        i_l_max: 500.0,
        rating,
    }
}

pub fn mppt_default() -> MpptParams {
    MpptParams {
        step: 1.0,
        sample_period: 0.05,
        v_min: 10.0,
        v_max: 125.0,
    }
}

pub fn battery_section_default() -> BatterySection {
    BatterySection {
        enabled: true,
        params: battery_default(),
        initial_soc: 1.0,
        converter: converter_default(ConverterKind::Buck, 5000.0),
        control: DroopPiConfig {
            delta_v_max: 10.0,
            kp: 0.005,
            ki: 0.5,
        },
    }
}

pub fn pv_section_default() -> PvSection {
    PvSection {
        enabled: true,
        array: pv_array_default(),
        c_in: 2e-3,
        irradiance: IrradianceProfile::Constant { g: 1000.0 },
        temperature_k: 298.15,
        converter: converter_default(ConverterKind::Boost, 6100.0),
        mppt: mppt_default(),
        v_ref_init: 90.0,
        pi: PiGains { kp: 0.01, ki: 1.0 },
    }
}

pub fn fuel_cell_section_default() -> FuelCellSection {
    FuelCellSection {
        enabled: true,
        params: fuel_cell_default(),
        converter: converter_default(ConverterKind::Boost, 2500.0),
        control: DroopPiConfig {
            delta_v_max: 10.0,
            kp: 0.005,
            ki: 0.5,
        },
    }
}

fn base_scenario(load: LoadProfile, t_end: f64) -> Scenario {
    Scenario {
        fidelity: Fidelity::Averaged,
        clock: ClockConfig {
            dt: 2e-5,
            t_end,
            record_interval: 2e-3,
        },
        ctrl_period: 1e-4,
        abort_bound: 1e9,
        bus: bus_default(),
        load,
        battery: Some(battery_section_default()),
        pv: Some(pv_section_default()),
        fuel_cell: Some(fuel_cell_section_default()),
    }
}

/// Constant power demand with no changes.
pub fn fig12_constant() -> Scenario {
    base_scenario(LoadProfile::Constant { power: 9000.0 }, 10.0)
}

/// Stepped power demand: high, low, and back.
pub fn fig13_steps() -> Scenario {
    base_scenario(
        LoadProfile::Steps {
            levels: vec![(0.0, 8000.0), (4.0, 11000.0), (8.0, 9000.0)],
        },
        12.0,
    )
}

/// Continuously changing demand in the style of a vehicle drive cycle.
pub fn fig14_cycle() -> Scenario {
    base_scenario(
        LoadProfile::RampCycle {
            min: 7000.0,
            max: 11000.0,
            period: 4.0,
        },
        12.0,
    )
}

pub const PRESET_NAMES: &[&str] = &["fig12_constant", "fig13_steps", "fig14_cycle"];

pub fn preset(name: &str) -> Option<Scenario> {
    match name {
        "fig12_constant" => Some(fig12_constant()),
        "fig13_steps" => Some(fig13_steps()),
        "fig14_cycle" => Some(fig14_cycle()),
        _ => None,
    }
}
