//! Droop load sharing: battery and fuel cell converters rated 2:1 split a
//! constant load in proportion to their ratings, with no communication
//! between the two controllers.
//!
//!     cargo run --release --example droop_sharing

use microgrid::bus::LoadProfile;
use microgrid::presets;
use microgrid::run_simulation;

fn main() {
    let mut sc = presets::fig12_constant();
    sc.pv = None;
    sc.load = LoadProfile::Constant { power: 3000.0 };
    sc.clock.t_end = 4.0;
    sc.battery.as_mut().unwrap().converter.rating = 2000.0;
    sc.fuel_cell.as_mut().unwrap().converter.rating = 1000.0;

    let trace = run_simulation(&sc).expect("simulation");
    let last = trace.rows.last().unwrap();
    let p_batt = last.v_bus * last.converters[0].i_l;
    let p_fc = last.v_bus * (1.0 - last.converters[1].duty) * last.converters[1].i_l;
    println!("load: 3000 W, ratings battery:fuel cell = 2000:1000 W");
    println!("bus voltage {:.2} V (droop sag from 200 V nominal)", last.v_bus);
    println!("battery delivers   {p_batt:7.1} W");
    println!("fuel cell delivers {p_fc:7.1} W");
    println!("sharing ratio      {:7.3} (expected 2.0)", p_batt / p_fc);
}
