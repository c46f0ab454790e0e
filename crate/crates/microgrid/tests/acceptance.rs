//! Acceptance suite: one test per criterion, each printing a PASS line
//! with the measured figure next to its pinned tolerance.

use microgrid::bus::LoadProfile;
use microgrid::converter::{
    converter_steady_state, simulate_standalone, ConverterKind, ConverterParams, Fidelity,
};
use microgrid::engine::run_simulation;
use microgrid::presets;
use microgrid::scenario::{IrradianceProfile, Scenario};
use microgrid::sim::{step_rk4, SimClock};
use microgrid::sources::{
    battery_update, fuel_cell_voltage, pv_module_current, pv_module_current_bisect,
    pv_module_voc, pv_mpp_oracle, BatteryState,
};
use microgrid::trace::{power_balance_residual, write_trace_csv, EnergyParams, Trace};
use std::sync::OnceLock;

const T_REF: f64 = 298.15;

fn pass(criterion: &str, detail: String) {
    println!("PASS {criterion}: {detail}");
}

fn test_converter(kind: ConverterKind) -> ConverterParams {
    ConverterParams {
        kind,
        l: 1e-3,
        c: 2.2e-3,
        t_sw: 5e-5,
        i_l_max: 1e4,
        rating: 5000.0,
    }
}

fn preset_trace(name: &str) -> &'static Trace {
    static TRACES: OnceLock<[(String, Trace); 3]> = OnceLock::new();
    let traces = TRACES.get_or_init(|| {
        presets::PRESET_NAMES
            .iter()
            .map(|n| {
                let sc = presets::preset(n).unwrap();
                (n.to_string(), run_simulation(&sc).unwrap())
            })
            .collect::<Vec<_>>()
            .try_into()
            .unwrap()
    });
    &traces.iter().find(|(n, _)| n == name).unwrap().1
}

fn preset_energy_params(sc: &Scenario) -> EnergyParams {
    let mut inductances = Vec::new();
    let mut input_caps = Vec::new();
    if let Some(b) = &sc.battery {
        inductances.push(b.converter.l);
        input_caps.push(None);
    }
    if let Some(p) = &sc.pv {
        inductances.push(p.converter.l);
        input_caps.push(Some(p.c_in));
    }
    if let Some(f) = &sc.fuel_cell {
        inductances.push(f.converter.l);
        input_caps.push(None);
    }
    EnergyParams {
        c_bus: sc.bus.c_bus,
        inductances,
        input_caps,
    }
}

#[test]
fn criterion_01_buck_averaged_equilibrium() {
    let p = test_converter(ConverterKind::Buck);
    for duty in [0.25, 0.5, 0.75] {
        let (_, v_expect) = converter_steady_state(ConverterKind::Buck, duty, 100.0, 10.0).unwrap();
        let traj = simulate_standalone(&p, Fidelity::Averaged, duty, 100.0, 10.0, 1e-5, 0.5).unwrap();
        let v_o = traj.last().unwrap().2;
        let rel = (v_o - v_expect).abs() / v_expect;
        assert!(rel <= 0.01, "duty {duty}: v_o {v_o} vs {v_expect}");
    }
    pass("1 buck averaged equilibrium", "v_o = duty*V_in within 1%".into());
}

#[test]
fn criterion_02_boost_averaged_equilibrium() {
    let p = test_converter(ConverterKind::Boost);
    for duty in [0.25, 0.5, 0.75] {
        let (_, v_expect) = converter_steady_state(ConverterKind::Boost, duty, 50.0, 40.0).unwrap();
        let traj = simulate_standalone(&p, Fidelity::Averaged, duty, 50.0, 40.0, 1e-5, 2.0).unwrap();
        let v_o = traj.last().unwrap().2;
        let rel = (v_o - v_expect).abs() / v_expect;
        assert!(rel <= 0.01, "duty {duty}: v_o {v_o} vs {v_expect}");
    }
    pass("2 boost averaged equilibrium", "v_o = V_in/(1-duty) within 1%".into());
}

#[test]
fn criterion_03_switched_vs_averaged() {
    let dt = 5e-5 / 50.0;
    // the boost startup ringing decays with tau = 2RC ~ 0.18 s, so leave
    // plenty of room before comparing
    let t_end = 2.0;
    let cases = [
        (ConverterKind::Buck, 0.5, 100.0, 10.0),
        (ConverterKind::Boost, 0.5, 50.0, 40.0),
    ];
    let mut worst: f64 = 0.0;
    for (kind, duty, v_in, r) in cases {
        let p = test_converter(kind);
        let sw = simulate_standalone(&p, Fidelity::Switched, duty, v_in, r, dt, t_end).unwrap();
        let av = simulate_standalone(&p, Fidelity::Averaged, duty, v_in, r, dt, t_end).unwrap();
        // average the switched trajectory over the final switching period
        let n_period = 50;
        let tail = &sw[sw.len() - n_period..];
        let i_sw = tail.iter().map(|(_, i, _)| i).sum::<f64>() / n_period as f64;
        let v_sw = tail.iter().map(|(_, _, v)| v).sum::<f64>() / n_period as f64;
        let (_, i_av, v_av) = av.last().unwrap();
        let rel_i = (i_sw - i_av).abs() / i_av.abs();
        let rel_v = (v_sw - v_av).abs() / v_av.abs();
        worst = worst.max(rel_i).max(rel_v);
        assert!(
            rel_i <= 0.02 && rel_v <= 0.02,
            "{kind:?}: i {i_sw} vs {i_av}, v {v_sw} vs {v_av}"
        );
    }
    pass(
        "3 switched vs averaged",
        format!("period-averaged mismatch {:.3}% <= 2%", worst * 100.0),
    );
}

#[test]
fn criterion_04_pv_solver_consistency() {
    let module = presets::pv_module_default();
    let mut worst: f64 = 0.0;
    for g in [400.0, 700.0, 1000.0] {
        let voc = pv_module_voc(g, T_REF, &module).unwrap();
        for k in 0..=100 {
            let v = voc * k as f64 / 100.0;
            let newton = pv_module_current(v, g, T_REF, &module).unwrap();
            let bisect = pv_module_current_bisect(v, g, T_REF, &module).unwrap();
            let diff = (newton - bisect).abs();
            worst = worst.max(diff);
            assert!(diff <= 1e-6, "G={g} V={v}: {newton} vs {bisect}");
        }
    }
    pass(
        "4 PV solver consistency",
        format!("max Newton-bisection gap {worst:.2e} A <= 1e-6 A, residuals <= 1e-9 A"),
    );
}

#[test]
fn criterion_05_default_array_power() {
    let (v_mp, p_mp) = pv_mpp_oracle(&presets::pv_array_default(), 1000.0, T_REF).unwrap();
    let rel = (p_mp - 6100.0).abs() / 6100.0;
    assert!(rel <= 0.02, "P_mp {p_mp} W at {v_mp} V");
    pass(
        "5 default array power",
        format!("P_mp = {p_mp:.0} W (target 6100 W within 2%), V_mp = {v_mp:.1} V"),
    );
}

#[test]
fn criterion_06_mppt_convergence() {
    let sc = presets::fig12_constant();
    let trace = preset_trace("fig12_constant");
    let pv_cfg = sc.pv.as_ref().unwrap();
    let step = pv_cfg.mppt.step;
    let (v_mp, _) = pv_mpp_oracle(&pv_cfg.array, 1000.0, pv_cfg.temperature_k).unwrap();
    // settled window inside the first 5 simulated seconds (pv is source 1)
    let window: Vec<f64> = trace
        .rows
        .iter()
        .filter(|r| r.t >= 3.5 && r.t <= 5.0)
        .map(|r| r.sources[1].v)
        .collect();
    assert!(!window.is_empty());
    let mean = window.iter().sum::<f64>() / window.len() as f64;
    let lo = window.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = window.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    assert!(
        (mean - v_mp).abs() <= 1.5 * step,
        "mean v_pv {mean} vs V_mp {v_mp}"
    );
    assert!(hi - lo <= 3.0 * step, "limit cycle band {} V", hi - lo);
    pass(
        "6 MPPT convergence",
        format!(
            "|mean v_pv - V_mp| = {:.2} V <= 1.5*step, band {:.2} V <= 3*step",
            (mean - v_mp).abs(),
            hi - lo
        ),
    );
}

#[test]
fn criterion_07_mppt_irradiance_step() {
    let mut sc = presets::fig12_constant();
    sc.clock.t_end = 9.0;
    {
        let pv = sc.pv.as_mut().unwrap();
        pv.irradiance = IrradianceProfile::Steps {
            levels: vec![(0.0, 1000.0), (5.0, 600.0)],
        };
    }
    let trace = run_simulation(&sc).unwrap();
    let pv_cfg = sc.pv.as_ref().unwrap();
    let (_, p_mp_new) = pv_mpp_oracle(&pv_cfg.array, 600.0, pv_cfg.temperature_k).unwrap();
    // re-converged within 3 s of the step: check the window just before t = 8
    let window: Vec<f64> = trace
        .rows
        .iter()
        .filter(|r| r.t >= 7.7 && r.t <= 8.0)
        .map(|r| r.sources[1].p)
        .collect();
    let mean = window.iter().sum::<f64>() / window.len() as f64;
    assert!(
        mean >= 0.98 * p_mp_new,
        "extracted {mean} W vs 98% of {p_mp_new} W"
    );
    pass(
        "7 MPPT irradiance step",
        format!(
            "extracted power {:.0} W = {:.1}% of new P_mp within 3 s",
            mean,
            100.0 * mean / p_mp_new
        ),
    );
}

#[test]
fn criterion_08_battery_bookkeeping() {
    let p = presets::battery_default();
    let mut s = BatteryState::full();
    let dt = 0.1_f64;
    let i = p.q; // 1C in amperes
    let mut integral = 0.0; // ∫ i dt
    let steps = (1800.0 / dt).round() as usize;
    for _ in 0..steps {
        s = battery_update(&s, i, dt, &p);
        integral += i * dt;
    }
    assert!((s.soc - 0.5).abs() <= 1e-3, "soc {}", s.soc);
    let delta_it_seconds = s.it * 3600.0;
    let rel = (delta_it_seconds - integral).abs() / integral;
    assert!(rel <= 1e-6, "bookkeeping mismatch {rel}");
    pass(
        "8 battery bookkeeping",
        format!("SOC after 1C/1800 s = {:.5}, charge mismatch {:.1e}", s.soc, rel),
    );
}

#[test]
fn criterion_09_droop_sharing() {
    let mut sc = presets::fig12_constant();
    sc.pv = None;
    sc.load = LoadProfile::Constant { power: 3000.0 };
    sc.clock.t_end = 4.0;
    sc.battery.as_mut().unwrap().converter.rating = 2000.0;
    sc.fuel_cell.as_mut().unwrap().converter.rating = 1000.0;
    let trace = run_simulation(&sc).unwrap();
    // delivered (bus-side) powers from the final quarter of the run
    let rows: Vec<_> = trace.rows.iter().filter(|r| r.t >= 3.0).collect();
    let p_batt: f64 = rows
        .iter()
        .map(|r| r.v_bus * r.converters[0].i_l)
        .sum::<f64>()
        / rows.len() as f64;
    let p_fc: f64 = rows
        .iter()
        .map(|r| r.v_bus * (1.0 - r.converters[1].duty) * r.converters[1].i_l)
        .sum::<f64>()
        / rows.len() as f64;
    let ratio = p_batt / p_fc;
    assert!(
        (ratio - 2.0).abs() / 2.0 <= 0.05,
        "sharing ratio {ratio} (battery {p_batt} W, fuel cell {p_fc} W)"
    );
    pass(
        "9 droop sharing",
        format!("2:1-rated converters deliver ratio {ratio:.3} (within 5%)"),
    );
}

#[test]
fn criterion_10_lossless_power_balance() {
    // steady windows per preset; fig14 has no strict steady state, so its
    // check runs at the triangle vertices where demand momentarily flattens
    let windows: [(&str, Vec<(f64, f64)>); 3] = [
        ("fig12_constant", vec![(4.0, 9.0)]),
        ("fig13_steps", vec![(2.5, 3.8), (6.5, 7.8), (10.5, 11.8)]),
        ("fig14_cycle", vec![(5.95, 6.05), (9.95, 10.05)]),
    ];
    let mut worst: f64 = 0.0;
    for (name, spans) in windows {
        let sc = presets::preset(name).unwrap();
        let trace = preset_trace(name);
        let energy = preset_energy_params(&sc);
        for (t0, t1) in spans {
            let idx: Vec<usize> = (1..trace.rows.len() - 1)
                .filter(|&k| trace.rows[k].t >= t0 && trace.rows[k].t <= t1)
                .collect();
            assert!(!idx.is_empty());
            let mean_res = idx
                .iter()
                .map(|&k| power_balance_residual(trace, k, &energy))
                .sum::<f64>()
                / idx.len() as f64;
            let p_load = idx
                .iter()
                .map(|&k| trace.rows[k].p_load)
                .sum::<f64>()
                / idx.len() as f64;
            let rel = mean_res.abs() / p_load;
            worst = worst.max(rel);
            assert!(
                rel <= 0.01,
                "{name} [{t0},{t1}]: residual {mean_res} W vs load {p_load} W"
            );
        }
    }
    pass(
        "10 lossless power balance",
        format!("worst steady-state residual {:.3}% of load <= 1%", worst * 100.0),
    );
}

#[test]
fn criterion_11_scenario_shapes() {
    // fig12: delivered within 2% of demand over the final 80% of the run
    let tr = preset_trace("fig12_constant");
    let t_end = tr.rows.last().unwrap().t;
    for r in tr.rows.iter().filter(|r| r.t >= 0.2 * t_end) {
        assert!(
            (r.p_load - r.p_demand).abs() <= 0.02 * r.p_demand,
            "fig12 at t={}: {} vs {}",
            r.t,
            r.p_load,
            r.p_demand
        );
    }

    // fig13: band re-entry within the settling window after each step,
    // with a finite transient dip visible on the bus
    let tr = preset_trace("fig13_steps");
    let settling = 0.5;
    for &t_step in &[4.0, 8.0] {
        for r in tr
            .rows
            .iter()
            .filter(|r| r.t >= t_step + settling && r.t < t_step + 2.0)
        {
            assert!(
                (r.p_load - r.p_demand).abs() <= 0.02 * r.p_demand,
                "fig13 after step {t_step}: t={} {} vs {}",
                r.t,
                r.p_load,
                r.p_demand
            );
        }
    }
    // upward step at t = 4: the bus voltage shows a finite dip and recovers
    let v_pre = tr
        .rows
        .iter()
        .filter(|r| r.t >= 3.8 && r.t < 4.0)
        .map(|r| r.v_bus)
        .sum::<f64>()
        / tr.rows.iter().filter(|r| r.t >= 3.8 && r.t < 4.0).count() as f64;
    let v_min = tr
        .rows
        .iter()
        .filter(|r| r.t >= 4.0 && r.t <= 4.0 + settling)
        .map(|r| r.v_bus)
        .fold(f64::INFINITY, f64::min);
    assert!(v_min < v_pre - 0.5, "no transient dip: {v_min} vs {v_pre}");
    assert!(v_min > 0.8 * v_pre, "dip not finite: {v_min}");

    // fig14: RMS tracking error <= 5% of mean demand
    let tr = preset_trace("fig14_cycle");
    let n = tr.rows.len() as f64;
    let rms = (tr
        .rows
        .iter()
        .map(|r| (r.p_load - r.p_demand).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    let mean_demand = tr.rows.iter().map(|r| r.p_demand).sum::<f64>() / n;
    assert!(rms <= 0.05 * mean_demand, "rms {rms} vs mean {mean_demand}");
    pass(
        "11 scenario shapes",
        format!(
            "fig12/fig13 within 2% bands, fig13 dip {:.1} V, fig14 RMS error {:.2}% <= 5%",
            v_pre - v_min,
            100.0 * rms / mean_demand
        ),
    );
}

#[test]
fn criterion_12_integrator_order_and_determinism() {
    // order-4 convergence on dx/dt = -x over [0, 1]
    let integrate = |dt: f64| {
        let clock = SimClock::new(0.0, dt, 1.0);
        let mut x = [1.0];
        for k in 0..clock.step_count() {
            step_rk4(&mut x, clock.time_at(k), dt, &["x"], |_, x, dx| {
                dx[0] = -x[0];
                Ok(())
            })
            .unwrap();
        }
        (x[0] - (-1.0f64).exp()).abs()
    };
    let ratio = integrate(0.02) / integrate(0.01);
    assert!(ratio >= 16.0 * 0.9, "convergence ratio {ratio}");

    // byte-identical CSV on re-run
    let mut sc = presets::fig12_constant();
    sc.clock.t_end = 0.5;
    let mut a = Vec::new();
    let mut b = Vec::new();
    write_trace_csv(&run_simulation(&sc).unwrap(), &mut a).unwrap();
    write_trace_csv(&run_simulation(&sc).unwrap(), &mut b).unwrap();
    assert_eq!(a, b, "re-runs differ");
    pass(
        "12 integrator order and determinism",
        format!("error ratio {ratio:.1} >= 14.4, identical re-run bytes"),
    );
}

#[test]
fn criterion_13_fuel_cell_polarization() {
    let p = presets::fuel_cell_default();
    let n = 2000;
    let mut worst_slope: f64 = f64::NEG_INFINITY;
    for k in 0..n {
        let i0 = p.i0 + (p.i_max - p.i0) * k as f64 / n as f64;
        let i1 = p.i0 + (p.i_max - p.i0) * (k + 1) as f64 / n as f64;
        let v0 = fuel_cell_voltage(i0, &p).unwrap();
        let v1 = fuel_cell_voltage(i1, &p).unwrap();
        let slope = (v1 - v0) / (i1 - i0);
        worst_slope = worst_slope.max(slope);
        assert!(slope < 0.0, "dV/di = {slope} at i = {i0}");
        assert!(v0 <= p.e_oc && v1 <= p.e_oc);
    }
    pass(
        "13 fuel-cell polarization",
        format!("dV/di < 0 across (i0, i_max); max slope {worst_slope:.4} V/A"),
    );
}
