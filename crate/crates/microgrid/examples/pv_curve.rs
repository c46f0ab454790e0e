//! Print the I-V and P-V curves of the default PV array at a few
//! irradiance levels, together with the brute-force maximum power point.
//!
//!     cargo run --release --example pv_curve

use microgrid::presets;
use microgrid::sources::{pv_array_iv, pv_array_voc, pv_mpp_oracle};

fn main() {
    let array = presets::pv_array_default();
    let t = 298.15;
    for g in [400.0, 700.0, 1000.0] {
        let voc = pv_array_voc(g, t, &array).unwrap();
        let (v_mp, p_mp) = pv_mpp_oracle(&array, g, t).unwrap();
        println!("G = {g:4} W/m^2: Voc = {voc:6.2} V, MPP = {p_mp:7.1} W at {v_mp:6.2} V");
        println!("    V (V)     I (A)     P (W)");
        for k in 0..=10 {
            let v = voc * k as f64 / 10.0;
            let i = pv_array_iv(v, g, t, &array).unwrap();
            println!("  {v:8.2}  {i:8.2}  {:8.1}", v * i);
        }
    }
}
