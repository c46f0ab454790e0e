//! Buck and boost DC/DC converter dynamics in two fidelities: switched
//! (PWM gating of the ON/OFF state equations) and cycle-averaged
//! (duty-weighted blend). The resistive load of the textbook circuits is
//! generalized to an arbitrary drawn bus current `i_out`.

use crate::error::SimError;
use crate::sim::{pwm_gate, step_rk4, SimClock};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConverterKind {
    Buck,
    Boost,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Fidelity {
    Switched,
    Averaged,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConverterParams {
    pub kind: ConverterKind,
    /// Inductance (H).
    pub l: f64,
    /// Output capacitance (F); lumped into the bus in microgrid coupling.
    pub c: f64,
    /// Switching period (s).
    pub t_sw: f64,
    /// Inductor current protection bound (A).
    pub i_l_max: f64,
    /// Power rating used for droop sharing (W).
    pub rating: f64,
}

impl ConverterParams {
    pub fn validate(&self, key: &str) -> Result<(), crate::error::ScenarioError> {
        use crate::error::ScenarioError as E;
        if self.l <= 0.0 {
            return Err(E::constraint(&format!("{key}.l"), "must be > 0 H"));
        }
        if self.c <= 0.0 {
            return Err(E::constraint(&format!("{key}.c"), "must be > 0 F"));
        }
        if self.t_sw <= 0.0 {
            return Err(E::constraint(&format!("{key}.t_sw"), "must be > 0 s"));
        }
        if self.rating <= 0.0 {
            return Err(E::constraint(&format!("{key}.rating"), "must be > 0 W"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConverterState {
    /// Inductor current (A).
    pub i_l: f64,
    /// Output voltage (V); the shared bus voltage in microgrid coupling.
    pub v_o: f64,
    /// Commanded duty cycle in [0, 1].
    pub duty: f64,
}

/// Buck ON/OFF state equations with a zero-current (DCM) clamp when the
/// freewheeling diode would have to conduct backwards.
pub fn buck_derivatives_switched(
    s: &ConverterState,
    gate_on: bool,
    v_in: f64,
    i_out: f64,
    p: &ConverterParams,
) -> (f64, f64) {
    let di = if gate_on {
        (v_in - s.v_o) / p.l
    } else {
        let d = -s.v_o / p.l;
        if s.i_l <= 0.0 && d < 0.0 {
            0.0
        } else {
            d
        }
    };
    let dv = (s.i_l - i_out) / p.c;
    (di, dv)
}

/// Duty-weighted buck average: di_L/dt = (d*V_in - v_o)/L.
pub fn buck_derivatives_averaged(
    s: &ConverterState,
    duty: f64,
    v_in: f64,
    i_out: f64,
    p: &ConverterParams,
) -> (f64, f64) {
    let mut di = (duty * v_in - s.v_o) / p.l;
    if s.i_l <= 0.0 && di < 0.0 {
        di = 0.0;
    }
    let dv = (s.i_l - i_out) / p.c;
    (di, dv)
}

/// Boost ON/OFF state equations. While the switch is ON the output is fed
/// only by the capacitor; while OFF the inductor current reaches the
/// output node. DCM clamp when the diode would conduct backwards.
pub fn boost_derivatives_switched(
    s: &ConverterState,
    gate_on: bool,
    v_in: f64,
    i_out: f64,
    p: &ConverterParams,
) -> (f64, f64) {
    if gate_on {
        (v_in / p.l, -i_out / p.c)
    } else {
        let mut di = (v_in - s.v_o) / p.l;
        if s.i_l <= 0.0 && di < 0.0 {
            di = 0.0;
        }
        (di, (s.i_l - i_out) / p.c)
    }
}

/// Duty-weighted boost average: di_L/dt = (V_in - (1-d)*v_o)/L,
/// dv_o/dt = ((1-d)*i_L - i_out)/C.
pub fn boost_derivatives_averaged(
    s: &ConverterState,
    duty: f64,
    v_in: f64,
    i_out: f64,
    p: &ConverterParams,
) -> (f64, f64) {
    let mut di = (v_in - (1.0 - duty) * s.v_o) / p.l;
    if s.i_l <= 0.0 && di < 0.0 {
        di = 0.0;
    }
    let dv = ((1.0 - duty) * s.i_l - i_out) / p.c;
    (di, dv)
}

/// Analytic lossless equilibrium with a resistive load; test oracle for
/// the simulated converters.
pub fn converter_steady_state(
    kind: ConverterKind,
    duty: f64,
    v_in: f64,
    r_load: f64,
) -> Result<(f64, f64), SimError> {
    match kind {
        ConverterKind::Buck => {
            let v_o = duty * v_in;
            Ok((v_o / r_load, v_o))
        }
        ConverterKind::Boost => {
            if duty >= 1.0 {
                return Err(SimError::BoostDutyDomain { duty });
            }
            let v_o = v_in / (1.0 - duty);
            Ok((v_o * v_o / (r_load * v_in), v_o))
        }
    }
}

/// Simulate one converter at fixed duty feeding its own resistive load.
/// Returns the (t, i_L, v_o) trajectory sampled every step. Used by the
/// equilibrium and cross-fidelity checks and the converter examples.
pub fn simulate_standalone(
    p: &ConverterParams,
    fidelity: Fidelity,
    duty: f64,
    v_in: f64,
    r_load: f64,
    dt: f64,
    t_end: f64,
) -> Result<Vec<(f64, f64, f64)>, SimError> {
    let clock = SimClock::new(0.0, dt, t_end);
    let mut x = [0.0f64, 0.0]; // i_L, v_o
    let mut out = Vec::with_capacity(clock.step_count() as usize + 1);
    out.push((0.0, x[0], x[1]));
    for k in 0..clock.step_count() {
        let t = clock.time_at(k);
        step_rk4(&mut x, t, dt, &["i_L", "v_o"], |tau, x, dx| {
            let s = ConverterState {
                i_l: x[0],
                v_o: x[1],
                duty,
            };
            let i_out = x[1] / r_load;
            let (di, dv) = match (p.kind, fidelity) {
                (ConverterKind::Buck, Fidelity::Switched) => {
                    buck_derivatives_switched(&s, pwm_gate(tau, p.t_sw, duty), v_in, i_out, p)
                }
                (ConverterKind::Buck, Fidelity::Averaged) => {
                    buck_derivatives_averaged(&s, duty, v_in, i_out, p)
                }
                (ConverterKind::Boost, Fidelity::Switched) => {
                    boost_derivatives_switched(&s, pwm_gate(tau, p.t_sw, duty), v_in, i_out, p)
                }
                (ConverterKind::Boost, Fidelity::Averaged) => {
                    boost_derivatives_averaged(&s, duty, v_in, i_out, p)
                }
            };
            dx[0] = di;
            dx[1] = dv;
            Ok(())
        })?;
        if x[0] < 0.0 {
            x[0] = 0.0; // unidirectional diode
        }
        if x[0].abs() > p.i_l_max {
            return Err(SimError::StateBlowUp {
                name: "i_L".into(),
                t,
                value: x[0],
                bound: p.i_l_max,
            });
        }
        out.push((clock.time_at(k + 1), x[0], x[1]));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params(kind: ConverterKind) -> ConverterParams {
        ConverterParams {
            kind,
            l: 1e-3,
            c: 2.2e-3,
            t_sw: 5e-5,
            i_l_max: 1e4,
            rating: 5000.0,
        }
    }

    #[test]
    fn buck_on_equation() {
        let p = params(ConverterKind::Buck);
        let s = ConverterState {
            i_l: 1.0,
            v_o: 50.0,
            duty: 0.5,
        };
        let (di, _) = buck_derivatives_switched(&s, true, 100.0, 0.0, &p);
        assert_relative_eq!(di, 5e4, epsilon = 1e-9);
    }

    #[test]
    fn buck_dcm_clamp() {
        let p = params(ConverterKind::Buck);
        let s = ConverterState {
            i_l: 0.0,
            v_o: 50.0,
            duty: 0.5,
        };
        let (di, _) = buck_derivatives_switched(&s, false, 100.0, 0.0, &p);
        assert_eq!(di, 0.0);
    }

    #[test]
    fn capacitor_current_balance() {
        let p = params(ConverterKind::Buck);
        let s = ConverterState {
            i_l: 7.0,
            v_o: 50.0,
            duty: 0.5,
        };
        let (_, dv) = buck_derivatives_switched(&s, true, 100.0, 7.0, &p);
        assert_eq!(dv, 0.0);
    }

    #[test]
    fn boost_on_equation() {
        let p = params(ConverterKind::Boost);
        let s = ConverterState {
            i_l: 1.0,
            v_o: 100.0,
            duty: 0.5,
        };
        let (di, dv) = boost_derivatives_switched(&s, true, 50.0, 0.0, &p);
        assert_relative_eq!(di, 5e4, epsilon = 1e-9);
        assert_eq!(dv, 0.0); // capacitor holds with no draw
    }

    #[test]
    fn boost_off_equal_voltages() {
        let p = params(ConverterKind::Boost);
        let s = ConverterState {
            i_l: 1.0,
            v_o: 50.0,
            duty: 0.5,
        };
        let (di, _) = boost_derivatives_switched(&s, false, 50.0, 1.0, &p);
        assert_eq!(di, 0.0);
    }

    #[test]
    fn averaged_duty_degenerate_cases() {
        let p = params(ConverterKind::Buck);
        let s = ConverterState {
            i_l: 2.0,
            v_o: 30.0,
            duty: 1.0,
        };
        let on = buck_derivatives_switched(&s, true, 100.0, 1.0, &p);
        let avg = buck_derivatives_averaged(&s, 1.0, 100.0, 1.0, &p);
        assert_eq!(on, avg);
    }

    #[test]
    fn steady_state_oracle() {
        assert_eq!(
            converter_steady_state(ConverterKind::Buck, 0.3, 100.0, 10.0).unwrap(),
            (3.0, 30.0)
        );
        let (i_l, v_o) = converter_steady_state(ConverterKind::Boost, 0.5, 50.0, 50.0).unwrap();
        assert_relative_eq!(v_o, 100.0, epsilon = 1e-12);
        // lossless equilibrium: i_L = v_o^2/(R*V_in) = 100^2/(50*50)
        assert_relative_eq!(i_l, 4.0, epsilon = 1e-12);
        assert_eq!(
            converter_steady_state(ConverterKind::Buck, 0.0, 100.0, 10.0).unwrap(),
            (0.0, 0.0)
        );
        assert!(converter_steady_state(ConverterKind::Boost, 1.0, 50.0, 50.0).is_err());
    }

    #[test]
    fn averaged_buck_reaches_equilibrium() {
        let p = params(ConverterKind::Buck);
        let traj =
            simulate_standalone(&p, Fidelity::Averaged, 0.5, 100.0, 10.0, 1e-5, 0.3).unwrap();
        let (_, _, v_o) = traj.last().unwrap();
        assert_relative_eq!(*v_o, 50.0, max_relative = 0.01);
    }

    #[test]
    fn averaged_boost_reaches_equilibrium() {
        let p = params(ConverterKind::Boost);
        let traj =
            simulate_standalone(&p, Fidelity::Averaged, 0.75, 50.0, 40.0, 1e-5, 1.5).unwrap();
        let (_, i_l, v_o) = traj.last().unwrap();
        assert_relative_eq!(*v_o, 200.0, max_relative = 0.01);
        // lossless: input power = output power at equilibrium
        let p_in = 50.0 * i_l;
        let p_out = v_o * v_o / 40.0;
        assert_relative_eq!(p_in, p_out, max_relative = 0.01);
    }

    #[test]
    fn buck_equilibrium_monotone_in_duty() {
        let p = params(ConverterKind::Buck);
        let mut prev = -1.0;
        for duty in [0.0, 0.2, 0.4, 0.6, 0.8, 1.0] {
            let traj =
                simulate_standalone(&p, Fidelity::Averaged, duty, 100.0, 10.0, 1e-5, 0.3).unwrap();
            let v = traj.last().unwrap().2;
            assert!(v >= prev - 1e-6, "duty {duty}: {v} < {prev}");
            prev = v;
        }
    }

    #[test]
    fn dcm_inductor_current_never_negative() {
        let p = params(ConverterKind::Buck);
        // light load forces discontinuous conduction
        let traj =
            simulate_standalone(&p, Fidelity::Switched, 0.2, 100.0, 500.0, 1e-6, 0.02).unwrap();
        for (t, i_l, _) in traj {
            assert!(i_l >= 0.0, "negative inductor current at t={t}");
        }
    }
}
