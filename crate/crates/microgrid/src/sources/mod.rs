//! Electrical models of the three energy sources.

pub mod battery;
pub mod fuel_cell;
pub mod pv;

pub use battery::{
    battery_emf, battery_terminal_voltage, battery_update, BatteryMode, BatteryParams,
    BatteryState,
};
pub use fuel_cell::{fuel_cell_voltage, FuelCellParams};
pub use pv::{
    pv_array_iv, pv_array_voc, pv_diode_current, pv_module_current, pv_module_current_bisect,
    pv_module_voc, pv_mpp_oracle, pv_thermal_voltage, PvArrayParams, PvModuleParams,
};
