//! Top-level simulation loop: wires sources, converters, controllers,
//! bus, and load into one deterministic fixed-step hybrid run. The plant
//! is continuous (RK4); controllers are discrete-time with zero-order
//! hold between their samples.

use crate::bus::{bus_derivative, load_current, load_demand};
use crate::control::{
    droop_voltage_ref, mppt_duty_command, perturb_observe_step, pi_step, DroopParams, MpptState,
    PiParams, PiState,
};
use crate::converter::{
    boost_derivatives_averaged, boost_derivatives_switched, buck_derivatives_averaged,
    buck_derivatives_switched, ConverterState, Fidelity,
};
use crate::error::SimError;
use crate::scenario::Scenario;
use crate::sim::{pwm_gate, step_rk4, SimClock};
use crate::sources::{
    battery_emf, fuel_cell_voltage, pv_array_iv, BatteryMode, BatteryState,
};
use crate::trace::{ConverterSample, SourceSample, Trace, TraceRow};

/// Indices of each block inside the flat continuous-state vector.
struct Layout {
    v_bus: usize,
    battery: Option<BatteryIdx>,
    pv: Option<PvIdx>,
    fuel_cell: Option<usize>, // i_L
    names: Vec<&'static str>,
}

struct BatteryIdx {
    i_l: usize,
    it: usize,
    i_star: usize,
}

struct PvIdx {
    i_l: usize,
    v_pv: usize,
}

impl Layout {
    fn build(sc: &Scenario) -> Layout {
        let mut names = vec!["v_bus"];
        let mut next = 1;
        let battery = sc.battery_enabled().then(|| {
            names.extend(["battery.i_L", "battery.it", "battery.i_star"]);
            let idx = BatteryIdx {
                i_l: next,
                it: next + 1,
                i_star: next + 2,
            };
            next += 3;
            idx
        });
        let pv = sc.pv_enabled().then(|| {
            names.extend(["pv.i_L", "pv.v_pv"]);
            let idx = PvIdx {
                i_l: next,
                v_pv: next + 1,
            };
            next += 2;
            idx
        });
        let fuel_cell = sc.fuel_cell_enabled().then(|| {
            names.push("fuel_cell.i_L");
            let idx = next;
            next += 1;
            idx
        });
        let _ = next;
        Layout {
            v_bus: 0,
            battery,
            pv,
            fuel_cell,
            names,
        }
    }
}

/// Discrete controller memory, advanced between RK4 steps.
struct Controllers {
    battery_duty: f64,
    battery_pi: PiState,
    pv_duty: f64,
    pv_pi: PiState,
    mppt: MpptState,
    /// PV power/voltage accumulated between MPPT samples so the P&O
    /// decision sees a window average instead of aliasing the input-link
    /// LC ringing.
    pv_acc_p: f64,
    pv_acc_v: f64,
    pv_acc_n: u64,
    /// Slew-rate-limited copy of the MPPT reference handed to the duty
    /// command, so each perturbation ramps in over a fraction of the
    /// sample period instead of shock-exciting the input LC.
    pv_vref_slew: f64,
    fc_duty: f64,
    fc_pi: PiState,
}

const DUTY_MAX_BOOST: f64 = 0.95;

/// Instantaneous electrical measurements derived from the state vector.
struct Measurement {
    sources: Vec<SourceSample>,
    converters: Vec<ConverterSample>,
    soc: f64,
    p_demand: f64,
    p_load: f64,
}

fn battery_mode(i: f64) -> BatteryMode {
    if i < 0.0 {
        BatteryMode::Charge
    } else {
        BatteryMode::Discharge
    }
}

fn measure(
    sc: &Scenario,
    layout: &Layout,
    ctl: &Controllers,
    x: &[f64],
    t: f64,
) -> Result<Measurement, SimError> {
    let v_bus = x[layout.v_bus];
    let p_demand = load_demand(&sc.load, t);
    let i_load = load_current(p_demand, v_bus, sc.bus.v_floor());
    let p_load = v_bus * i_load;
    let mut sources = Vec::new();
    let mut converters = Vec::new();
    let mut soc = 1.0;

    if let Some(b) = &layout.battery {
        let cfg = sc.battery.as_ref().unwrap();
        let i_l = x[b.i_l];
        let i_src = ctl.battery_duty * i_l;
        let state = BatteryState {
            it: x[b.it],
            i_star: x[b.i_star],
            soc: 1.0 - x[b.it] / cfg.params.q,
            sel: battery_mode(i_src),
        };
        let v = battery_emf(&cfg.params, &state, state.i_star)? - cfg.params.r_int * i_src;
        sources.push(SourceSample {
            v,
            i: i_src,
            p: v * i_src,
        });
        converters.push(ConverterSample {
            i_l,
            duty: ctl.battery_duty,
        });
        soc = state.soc;
    }
    if let Some(p) = &layout.pv {
        let cfg = sc.pv.as_ref().unwrap();
        let v_pv = x[p.v_pv];
        let g = cfg.irradiance.at(t);
        let i_pv = pv_array_iv(v_pv, g, cfg.temperature_k, &cfg.array)?;
        sources.push(SourceSample {
            v: v_pv,
            i: i_pv,
            p: v_pv * i_pv,
        });
        converters.push(ConverterSample {
            i_l: x[p.i_l],
            duty: ctl.pv_duty,
        });
    }
    if let Some(f_idx) = layout.fuel_cell {
        let cfg = sc.fuel_cell.as_ref().unwrap();
        let i_l = x[f_idx];
        let v = fuel_cell_voltage(i_l, &cfg.params)?;
        sources.push(SourceSample {
            v,
            i: i_l,
            p: v * i_l,
        });
        converters.push(ConverterSample {
            i_l,
            duty: ctl.fc_duty,
        });
    }
    Ok(Measurement {
        sources,
        converters,
        soc,
        p_demand,
        p_load,
    })
}

/// Continuous-state derivative of the whole microgrid at time `t`.
#[allow(clippy::too_many_arguments)]
fn derivatives(
    sc: &Scenario,
    layout: &Layout,
    ctl: &Controllers,
    t: f64,
    x: &[f64],
    dx: &mut [f64],
) -> Result<(), SimError> {
    let v_bus = x[layout.v_bus];
    let mut injected = 0.0;

    if let Some(b) = &layout.battery {
        let cfg = sc.battery.as_ref().unwrap();
        let i_l = x[b.i_l];
        let duty = ctl.battery_duty;
        let gate = pwm_gate(t, cfg.converter.t_sw, duty);
        // instantaneous battery (converter input) current
        let i_batt = match sc.fidelity {
            Fidelity::Averaged => duty * i_l,
            Fidelity::Switched => {
                if gate {
                    i_l
                } else {
                    0.0
                }
            }
        };
        let state = BatteryState {
            it: x[b.it],
            i_star: x[b.i_star],
            soc: 1.0 - x[b.it] / cfg.params.q,
            sel: battery_mode(i_batt),
        };
        let v_term = battery_emf(&cfg.params, &state, state.i_star)? - cfg.params.r_int * i_batt;
        let s = ConverterState {
            i_l,
            v_o: v_bus,
            duty,
        };
        // dv_o/dt from the converter is absorbed into the lumped bus cap
        let (di_l, _) = match sc.fidelity {
            Fidelity::Averaged => buck_derivatives_averaged(&s, duty, v_term, 0.0, &cfg.converter),
            Fidelity::Switched => {
                buck_derivatives_switched(&s, gate, v_term, 0.0, &cfg.converter)
            }
        };
        dx[b.i_l] = di_l;
        dx[b.it] = i_batt / 3600.0;
        dx[b.i_star] = (i_batt - x[b.i_star]) / cfg.params.tau_filter;
        injected += i_l; // buck inductor feeds the bus directly
    }

    if let Some(p) = &layout.pv {
        let cfg = sc.pv.as_ref().unwrap();
        let i_l = x[p.i_l];
        let v_pv = x[p.v_pv];
        let duty = ctl.pv_duty;
        let g = cfg.irradiance.at(t);
        let i_pv = pv_array_iv(v_pv, g, cfg.temperature_k, &cfg.array)?;
        dx[p.v_pv] = (i_pv - i_l) / cfg.c_in;
        let s = ConverterState {
            i_l,
            v_o: v_bus,
            duty,
        };
        match sc.fidelity {
            Fidelity::Averaged => {
                let (di_l, _) = boost_derivatives_averaged(&s, duty, v_pv, 0.0, &cfg.converter);
                dx[p.i_l] = di_l;
                injected += (1.0 - duty) * i_l;
            }
            Fidelity::Switched => {
                let gate = pwm_gate(t, cfg.converter.t_sw, duty);
                let (di_l, _) = boost_derivatives_switched(&s, gate, v_pv, 0.0, &cfg.converter);
                dx[p.i_l] = di_l;
                if !gate {
                    injected += i_l;
                }
            }
        }
    }

    if let Some(f_idx) = layout.fuel_cell {
        let cfg = sc.fuel_cell.as_ref().unwrap();
        let i_l = x[f_idx];
        let duty = ctl.fc_duty;
        let v_fc = fuel_cell_voltage(i_l.max(0.0), &cfg.params)?;
        let s = ConverterState {
            i_l,
            v_o: v_bus,
            duty,
        };
        match sc.fidelity {
            Fidelity::Averaged => {
                let (di_l, _) = boost_derivatives_averaged(&s, duty, v_fc, 0.0, &cfg.converter);
                dx[f_idx] = di_l;
                injected += (1.0 - duty) * i_l;
            }
            Fidelity::Switched => {
                let gate = pwm_gate(t, cfg.converter.t_sw, duty);
                let (di_l, _) = boost_derivatives_switched(&s, gate, v_fc, 0.0, &cfg.converter);
                dx[f_idx] = di_l;
                if !gate {
                    injected += i_l;
                }
            }
        }
    }

    let p_demand = load_demand(&sc.load, t);
    let i_load = load_current(p_demand, v_bus, sc.bus.v_floor());
    dx[layout.v_bus] = bus_derivative(&[injected], i_load, sc.bus.c_bus);
    Ok(())
}

fn initial_controllers(sc: &Scenario) -> Controllers {
    // start each duty at its expected operating point and pre-load the PI
    // integrals so the commanded output is continuous from t = 0
    let v_nom = sc.bus.v_nom;
    let (battery_duty, battery_pi) = match &sc.battery {
        Some(cfg) if cfg.enabled => {
            let e_init = cfg.params.e0 + cfg.params.a; // full-charge EMF scale
            let duty = (v_nom / e_init).clamp(0.0, 1.0);
            let integral = if cfg.control.ki > 0.0 {
                duty / cfg.control.ki
            } else {
                0.0
            };
            (duty, PiState { integral })
        }
        _ => (0.0, PiState::default()),
    };
    let (pv_duty, pv_pi, mppt) = match &sc.pv {
        Some(cfg) if cfg.enabled => {
            // the feedforward term supplies the whole initial duty, so the
            // trim integrator starts from zero
            let duty = (1.0 - cfg.v_ref_init / v_nom).clamp(0.0, DUTY_MAX_BOOST);
            (
                duty,
                PiState { integral: 0.0 },
                MpptState {
                    v_ref: cfg.v_ref_init,
                    prev_p: 0.0,
                    prev_v: cfg.v_ref_init,
                },
            )
        }
        _ => (
            0.0,
            PiState::default(),
            MpptState {
                v_ref: 0.0,
                prev_p: 0.0,
                prev_v: 0.0,
            },
        ),
    };
    let (fc_duty, fc_pi) = match &sc.fuel_cell {
        Some(cfg) if cfg.enabled => {
            let v0 = cfg.params.e_oc - cfg.params.m_conc;
            let duty = (1.0 - v0 / v_nom).clamp(0.0, DUTY_MAX_BOOST);
            let integral = if cfg.control.ki > 0.0 {
                duty / cfg.control.ki
            } else {
                0.0
            };
            (duty, PiState { integral })
        }
        _ => (0.0, PiState::default()),
    };
    Controllers {
        battery_duty,
        battery_pi,
        pv_duty,
        pv_pi,
        mppt,
        pv_acc_p: 0.0,
        pv_acc_v: 0.0,
        pv_acc_n: 0,
        pv_vref_slew: mppt.v_ref,
        fc_duty,
        fc_pi,
    }
}

fn update_controllers(
    sc: &Scenario,
    layout: &Layout,
    ctl: &mut Controllers,
    x: &[f64],
    t: f64,
    run_pi: bool,
    run_mppt: bool,
) -> Result<(), SimError> {
    let v_bus = x[layout.v_bus];
    let dt = sc.ctrl_period;

    if let Some(p) = &layout.pv {
        let cfg = sc.pv.as_ref().unwrap();
        let v_pv = x[p.v_pv];
        let g = cfg.irradiance.at(t);
        let i_pv = pv_array_iv(v_pv, g, cfg.temperature_k, &cfg.array)?;
        ctl.pv_acc_p += v_pv * i_pv;
        ctl.pv_acc_v += v_pv;
        ctl.pv_acc_n += 1;
        if run_mppt {
            let n = ctl.pv_acc_n as f64;
            ctl.mppt =
                perturb_observe_step(&cfg.mppt, &ctl.mppt, ctl.pv_acc_p / n, ctl.pv_acc_v / n);
            ctl.pv_acc_p = 0.0;
            ctl.pv_acc_v = 0.0;
            ctl.pv_acc_n = 0;
        }
    }

    if run_pi {
        if let Some(b) = &layout.battery {
            let cfg = sc.battery.as_ref().unwrap();
            let droop = DroopParams::from_delta_v_max(
                sc.bus.v_nom,
                cfg.control.delta_v_max,
                cfg.converter.rating,
            );
            let p_out = v_bus * x[b.i_l];
            let v_ref = droop_voltage_ref(&droop, p_out);
            let pi = PiParams {
                kp: cfg.control.kp,
                ki: cfg.control.ki,
                lo: 0.0,
                hi: 1.0,
            };
            let (duty, next) = pi_step(&pi, &ctl.battery_pi, v_ref - v_bus, dt);
            ctl.battery_duty = duty;
            ctl.battery_pi = next;
        }
        if let Some(p) = &layout.pv {
            let cfg = sc.pv.as_ref().unwrap();
            let pi = PiParams {
                kp: cfg.pi.kp,
                ki: cfg.pi.ki,
                lo: 0.0,
                hi: DUTY_MAX_BOOST,
            };
            // ramp the reference over a quarter of the MPPT sample period
            let max_move = cfg.mppt.step / (0.25 * cfg.mppt.sample_period) * dt;
            ctl.pv_vref_slew += (ctl.mppt.v_ref - ctl.pv_vref_slew).clamp(-max_move, max_move);
            let (duty, next) =
                mppt_duty_command(ctl.pv_vref_slew, &pi, &ctl.pv_pi, x[p.v_pv], v_bus, dt);
            ctl.pv_duty = duty;
            ctl.pv_pi = next;
        }
        if let Some(f_idx) = layout.fuel_cell {
            let cfg = sc.fuel_cell.as_ref().unwrap();
            let droop = DroopParams::from_delta_v_max(
                sc.bus.v_nom,
                cfg.control.delta_v_max,
                cfg.converter.rating,
            );
            let p_out = v_bus * (1.0 - ctl.fc_duty) * x[f_idx];
            let v_ref = droop_voltage_ref(&droop, p_out);
            let pi = PiParams {
                kp: cfg.control.kp,
                ki: cfg.control.ki,
                lo: 0.0,
                hi: DUTY_MAX_BOOST,
            };
            let (duty, next) = pi_step(&pi, &ctl.fc_pi, v_ref - v_bus, dt);
            ctl.fc_duty = duty;
            ctl.fc_pi = next;
        }
    }
    Ok(())
}

fn stride(period: f64, dt: f64) -> u64 {
    ((period / dt).round() as u64).max(1)
}

/// Attach the simulation time to errors raised by source models inside
/// the derivative evaluation.
fn with_time(err: SimError, t: f64) -> SimError {
    match err {
        SimError::BatteryDepleted { it, q, .. } => SimError::BatteryDepleted { it, q, t },
        SimError::FuelCellOverCurrent { i, i_max, .. } => {
            SimError::FuelCellOverCurrent { i, i_max, t }
        }
        other => other,
    }
}

/// Run a validated scenario to completion, producing the full signal
/// trace. Deterministic: identical scenarios yield identical traces.
pub fn run_simulation(sc: &Scenario) -> Result<Trace, SimError> {
    let layout = Layout::build(sc);
    let clock = SimClock::new(0.0, sc.clock.dt, sc.clock.t_end);
    let ctrl_stride = stride(sc.ctrl_period, sc.clock.dt);
    let record_stride = stride(sc.clock.record_interval, sc.clock.dt);
    let mppt_stride = sc
        .pv
        .as_ref()
        .map(|p| stride(p.mppt.sample_period, sc.clock.dt))
        .unwrap_or(u64::MAX);

    let mut x = vec![0.0; layout.names.len()];
    x[layout.v_bus] = sc.bus.v_init;
    if let Some(b) = &layout.battery {
        let cfg = sc.battery.as_ref().unwrap();
        x[b.it] = (1.0 - cfg.initial_soc) * cfg.params.q;
    }
    if let Some(p) = &layout.pv {
        let cfg = sc.pv.as_ref().unwrap();
        x[p.v_pv] = cfg.v_ref_init;
    }
    let mut ctl = initial_controllers(sc);

    let mut source_names = Vec::new();
    if layout.battery.is_some() {
        source_names.push("battery".to_string());
    }
    if layout.pv.is_some() {
        source_names.push("pv".to_string());
    }
    if layout.fuel_cell.is_some() {
        source_names.push("fuel_cell".to_string());
    }
    let mut trace = Trace::new(source_names);

    let record = |trace: &mut Trace, ctl: &Controllers, x: &[f64], t: f64| -> Result<(), SimError> {
        let m = measure(sc, &layout, ctl, x, t).map_err(|e| with_time(e, t))?;
        trace.rows.push(TraceRow {
            t,
            v_bus: x[layout.v_bus],
            p_load: m.p_load,
            p_demand: m.p_demand,
            sources: m.sources,
            converters: m.converters,
            soc: m.soc,
        });
        Ok(())
    };

    for k in 0..clock.step_count() {
        let t = clock.time_at(k);
        update_controllers(
            sc,
            &layout,
            &mut ctl,
            &x,
            t,
            k % ctrl_stride == 0,
            k % mppt_stride == 0,
        )
        .map_err(|e| with_time(e, t))?;
        if k % record_stride == 0 {
            record(&mut trace, &ctl, &x, t)?;
        }

        step_rk4(&mut x, t, sc.clock.dt, &layout.names, |tau, x, dx| {
            derivatives(sc, &layout, &ctl, tau, x, dx).map_err(|e| with_time(e, tau))
        })?;

        // unidirectional converters and capacity bounds
        if let Some(b) = &layout.battery {
            let cfg = sc.battery.as_ref().unwrap();
            x[b.i_l] = x[b.i_l].max(0.0);
            x[b.it] = x[b.it].clamp(0.0, cfg.params.q);
            check_inductor(x[b.i_l], cfg.converter.i_l_max, "battery.i_L", t)?;
        }
        if let Some(p) = &layout.pv {
            let cfg = sc.pv.as_ref().unwrap();
            x[p.i_l] = x[p.i_l].max(0.0);
            check_inductor(x[p.i_l], cfg.converter.i_l_max, "pv.i_L", t)?;
        }
        if let Some(f_idx) = layout.fuel_cell {
            let cfg = sc.fuel_cell.as_ref().unwrap();
            x[f_idx] = x[f_idx].max(0.0);
            check_inductor(x[f_idx], cfg.converter.i_l_max, "fuel_cell.i_L", t)?;
        }
        for (i, v) in x.iter().enumerate() {
            if v.abs() > sc.abort_bound {
                return Err(SimError::StateBlowUp {
                    name: layout.names[i].to_string(),
                    t,
                    value: *v,
                    bound: sc.abort_bound,
                });
            }
        }
    }
    record(&mut trace, &ctl, &x, clock.time_at(clock.step_count()))?;
    Ok(trace)
}

fn check_inductor(i_l: f64, i_l_max: f64, name: &str, t: f64) -> Result<(), SimError> {
    if i_l.abs() > i_l_max {
        return Err(SimError::StateBlowUp {
            name: name.to_string(),
            t,
            value: i_l,
            bound: i_l_max,
        });
    }
    Ok(())
}
