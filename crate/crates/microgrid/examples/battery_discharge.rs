//! Constant-current battery discharge: terminal voltage and state of
//! charge over a 1C discharge of the default pack.
//!
//!     cargo run --release --example battery_discharge

use microgrid::presets;
use microgrid::sources::{battery_terminal_voltage, battery_update, BatteryState};

fn main() {
    let p = presets::battery_default();
    let i = p.q; // 1C
    let dt = 1.0;
    let mut s = BatteryState::full();
    println!("discharging at {i} A (1C), dt = {dt} s");
    println!("    t (s)    SOC      V_term (V)");
    for k in 0..=3000u32 {
        let t = k as f64 * dt;
        if k % 300 == 0 {
            let v = battery_terminal_voltage(&p, &s, i).unwrap();
            println!("  {t:7.0}  {:.4}  {v:10.2}", s.soc);
        }
        if s.soc < 0.15 {
            println!("stopping near depletion at t = {t} s");
            break;
        }
        s = battery_update(&s, i, dt, &p);
    }
}
