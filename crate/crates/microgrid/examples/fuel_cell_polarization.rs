//! Print the fuel-cell polarization curve: activation, ohmic, and
//! concentration loss regions between the exchange current and the
//! operating limit.
//!
//!     cargo run --release --example fuel_cell_polarization

use microgrid::presets;
use microgrid::sources::fuel_cell_voltage;

fn main() {
    let p = presets::fuel_cell_default();
    println!("E_oc = {} V, i range [{}, {}] A", p.e_oc, p.i0, p.i_max);
    println!("    i (A)    V (V)    P (W)");
    for k in 0..=26 {
        let i = p.i0 + (p.i_max - p.i0) * k as f64 / 26.0;
        let v = fuel_cell_voltage(i, &p).unwrap();
        println!("  {i:7.1}  {v:7.2}  {:8.1}", v * i);
    }
}
