//! Compare the switched (PWM, ripple-resolving) and averaged converter
//! models on the same standalone boost circuit.
//!
//!     cargo run --release --example converter_fidelity

use microgrid::converter::{
    converter_steady_state, simulate_standalone, ConverterKind, ConverterParams, Fidelity,
};

fn main() {
    let p = ConverterParams {
        kind: ConverterKind::Boost,
        l: 1e-3,
        c: 2.2e-3,
        t_sw: 5e-5,
        i_l_max: 1e4,
        rating: 5000.0,
    };
    let (duty, v_in, r) = (0.5, 50.0, 40.0);
    let (i_ss, v_ss) = converter_steady_state(p.kind, duty, v_in, r).unwrap();
    println!("analytic steady state: i_L = {i_ss} A, v_o = {v_ss} V");

    let dt = p.t_sw / 50.0;
    for fidelity in [Fidelity::Averaged, Fidelity::Switched] {
        let traj = simulate_standalone(&p, fidelity, duty, v_in, r, dt, 2.0).unwrap();
        // average the trailing switching period to strip PWM ripple
        let tail = &traj[traj.len() - 50..];
        let i = tail.iter().map(|(_, i, _)| i).sum::<f64>() / 50.0;
        let v = tail.iter().map(|(_, _, v)| v).sum::<f64>() / 50.0;
        let ripple = tail.iter().map(|(_, i, _)| i).fold(f64::NEG_INFINITY, |a, &b| a.max(b))
            - tail.iter().map(|(_, i, _)| i).fold(f64::INFINITY, |a, &b| a.min(b));
        println!(
            "{fidelity:?}: i_L = {i:.3} A (ripple {ripple:.3} A), v_o = {v:.3} V"
        );
    }
}
