//! Closed-loop P&O MPPT tracking through an irradiance step: the tracker
//! converges to the maximum power point at G = 1000 W/m^2, then
//! re-acquires it after the drop to 600 W/m^2 at t = 5 s.
//!
//!     cargo run --release --example mppt_tracking

use microgrid::presets;
use microgrid::run_simulation;
use microgrid::scenario::IrradianceProfile;
use microgrid::sources::pv_mpp_oracle;

fn main() {
    let mut sc = presets::fig12_constant();
    sc.clock.t_end = 9.0;
    let pv = sc.pv.as_mut().unwrap();
    pv.irradiance = IrradianceProfile::Steps {
        levels: vec![(0.0, 1000.0), (5.0, 600.0)],
    };
    let array = pv.array.clone();
    let t_cell = pv.temperature_k;

    let trace = run_simulation(&sc).expect("simulation");
    let pv_idx = trace.source_names.iter().position(|n| n == "pv").unwrap();

    for g in [1000.0, 600.0] {
        let (v_mp, p_mp) = pv_mpp_oracle(&array, g, t_cell).unwrap();
        println!("oracle at G = {g}: {p_mp:.1} W at {v_mp:.2} V");
    }
    println!("    t (s)   v_pv (V)   p_pv (W)");
    for r in trace.rows.iter().filter(|r| (r.t * 2.0).fract() < 1e-9) {
        let s = &r.sources[pv_idx];
        println!("  {:7.2}  {:9.2}  {:9.1}", r.t, s.v, s.p);
    }
}
