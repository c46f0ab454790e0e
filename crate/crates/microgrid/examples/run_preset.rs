//! Run a named preset end to end, write the CSV trace and SVG plot
//! panels, and print a steady-state summary.
//!
//!     cargo run --release --example run_preset -- fig13_steps

use microgrid::{plot, presets, run_simulation, write_trace_csv};

fn main() {
    let name = std::env::args().nth(1).unwrap_or_else(|| "fig12_constant".into());
    let sc = presets::preset(&name).unwrap_or_else(|| {
        eprintln!("unknown preset {name}; available: {:?}", presets::PRESET_NAMES);
        std::process::exit(1);
    });
    let trace = run_simulation(&sc).expect("simulation");

    let out = std::path::Path::new("target").join("example_out");
    std::fs::create_dir_all(&out).unwrap();
    let mut csv = std::fs::File::create(out.join(format!("{name}.csv"))).unwrap();
    let rows = write_trace_csv(&trace, &mut csv).unwrap();
    let plots = plot::emit_plots(&trace, &out.join(&name)).unwrap();
    println!("wrote {rows} rows and {} plot panels under {}", plots.len(), out.display());

    let last = trace.rows.last().unwrap();
    println!("final state at t = {:.2} s:", last.t);
    println!("  bus voltage   {:8.2} V", last.v_bus);
    println!("  load power    {:8.1} W (demand {:.1} W)", last.p_load, last.p_demand);
    for (name, s) in trace.source_names.iter().zip(&last.sources) {
        println!("  {name:<12}  {:8.1} W at {:.1} V", s.p, s.v);
    }
    println!("  battery SOC   {:8.4}", last.soc);
}
