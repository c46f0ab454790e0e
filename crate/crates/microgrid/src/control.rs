//! Discrete-time controllers: perturb-and-observe MPPT, droop voltage
//! references for load sharing, and the inner PI loops mapping references
//! to duty cycles.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MpptParams {
    /// Perturbation size (V).
    pub step: f64,
    /// Sample period (s).
    pub sample_period: f64,
    /// Reference window (V).
    pub v_min: f64,
    pub v_max: f64,
}

impl MpptParams {
    pub fn validate(&self, key: &str) -> Result<(), crate::error::ScenarioError> {
        use crate::error::ScenarioError as E;
        if self.step <= 0.0 {
            return Err(E::constraint(&format!("{key}.step"), "must be > 0 V"));
        }
        if self.sample_period <= 0.0 {
            return Err(E::constraint(
                &format!("{key}.sample_period"),
                "must be > 0 s",
            ));
        }
        if self.v_min >= self.v_max {
            return Err(E::constraint(
                &format!("{key}.v_min"),
                "must be below v_max",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MpptState {
    pub v_ref: f64,
    pub prev_p: f64,
    pub prev_v: f64,
}

/// One P&O sample: compare power against the previous cycle and move the
/// voltage reference one fixed step toward higher power.
pub fn perturb_observe_step(
    p: &MpptParams,
    s: &MpptState,
    p_now: f64,
    v_now: f64,
) -> MpptState {
    let dp = p_now - s.prev_p;
    let dv = v_now - s.prev_v;
    let delta = if dp > 0.0 {
        if dv >= 0.0 {
            p.step
        } else {
            -p.step
        }
    } else if dp < 0.0 {
        if dv >= 0.0 {
            -p.step
        } else {
            p.step
        }
    } else {
        0.0
    };
    MpptState {
        v_ref: (s.v_ref + delta).clamp(p.v_min, p.v_max),
        prev_p: p_now,
        prev_v: v_now,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PiParams {
    pub kp: f64,
    pub ki: f64,
    /// Output limits.
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PiState {
    pub integral: f64,
}

/// Discrete PI step with conditional-integration anti-windup: the
/// integral is frozen while the unclamped output exceeds a limit in the
/// same direction as the error.
pub fn pi_step(p: &PiParams, s: &PiState, error: f64, dt: f64) -> (f64, PiState) {
    debug_assert!(dt > 0.0);
    let integral_cand = s.integral + error * dt;
    let unclamped = p.kp * error + p.ki * integral_cand;
    let windup = (unclamped > p.hi && error > 0.0) || (unclamped < p.lo && error < 0.0);
    let integral = if windup { s.integral } else { integral_cand };
    let output = (p.kp * error + p.ki * integral).clamp(p.lo, p.hi);
    (output, PiState { integral })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DroopParams {
    /// Nominal bus voltage (V).
    pub v_nom: f64,
    /// Droop slope (V/W).
    pub m: f64,
    /// Converter power rating (W).
    pub rating: f64,
}

impl DroopParams {
    /// Slope from a shared maximum voltage deviation: m = delta_v_max/rating,
    /// so parallel converters share load in proportion to their ratings.
    pub fn from_delta_v_max(v_nom: f64, delta_v_max: f64, rating: f64) -> Self {
        DroopParams {
            v_nom,
            m: delta_v_max / rating,
            rating,
        }
    }

    pub fn validate(&self, key: &str) -> Result<(), crate::error::ScenarioError> {
        use crate::error::ScenarioError as E;
        if self.m <= 0.0 {
            return Err(E::constraint(&format!("{key}.m"), "must be > 0 V/W"));
        }
        if self.v_nom <= 0.0 {
            return Err(E::constraint(&format!("{key}.v_nom"), "must be > 0 V"));
        }
        Ok(())
    }
}

/// Droop law: v_ref = v_nom - m * p_out.
pub fn droop_voltage_ref(d: &DroopParams, p_out: f64) -> f64 {
    d.v_nom - d.m * p_out
}

/// Map the MPPT voltage reference onto the boost duty cycle. The bulk of
/// the command is the steady-state feedforward 1 - v_ref/v_bus; the PI
/// trims around it so the terminal voltage tracks the reference within a
/// perturbation period. Raising the duty pulls the PV operating voltage
/// down, so the error sign is v_meas - v_ref.
pub fn mppt_duty_command(
    v_ref: f64,
    pi_params: &PiParams,
    pi: &PiState,
    v_pv_meas: f64,
    v_bus: f64,
    dt: f64,
) -> (f64, PiState) {
    let ff = if v_bus > 1.0 {
        (1.0 - v_ref / v_bus).clamp(pi_params.lo, pi_params.hi)
    } else {
        0.0
    };
    let trim = PiParams {
        lo: pi_params.lo - ff,
        hi: pi_params.hi - ff,
        ..*pi_params
    };
    let (delta, next) = pi_step(&trim, pi, v_pv_meas - v_ref, dt);
    ((ff + delta).clamp(pi_params.lo, pi_params.hi), next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn mppt_params() -> MpptParams {
        MpptParams {
            step: 1.0,
            sample_period: 0.05,
            v_min: 0.0,
            v_max: 150.0,
        }
    }

    fn state(v_ref: f64, prev_p: f64, prev_v: f64) -> MpptState {
        MpptState {
            v_ref,
            prev_p,
            prev_v,
        }
    }

    #[test]
    fn po_sign_table() {
        let p = mppt_params();
        // dP > 0, dV > 0 -> keep climbing
        let s = perturb_observe_step(&p, &state(100.0, 500.0, 100.0), 510.0, 101.0);
        assert_eq!(s.v_ref, 101.0);
        // dP > 0, dV < 0 -> keep descending
        let s = perturb_observe_step(&p, &state(100.0, 500.0, 100.0), 510.0, 99.0);
        assert_eq!(s.v_ref, 99.0);
        // dP < 0, dV > 0 -> reverse
        let s = perturb_observe_step(&p, &state(100.0, 500.0, 100.0), 490.0, 101.0);
        assert_eq!(s.v_ref, 99.0);
        // dP < 0, dV < 0 -> reverse
        let s = perturb_observe_step(&p, &state(100.0, 500.0, 100.0), 490.0, 99.0);
        assert_eq!(s.v_ref, 101.0);
        // dP = 0 -> hold
        let s = perturb_observe_step(&p, &state(100.0, 500.0, 100.0), 500.0, 99.0);
        assert_eq!(s.v_ref, 100.0);
    }

    #[test]
    fn po_clamps_to_window() {
        let p = mppt_params();
        let s = perturb_observe_step(&p, &state(150.0, 500.0, 100.0), 510.0, 101.0);
        assert_eq!(s.v_ref, 150.0);
    }

    proptest! {
        #[test]
        fn po_moves_exactly_one_step_or_holds(
            p_now in -1e4f64..1e4,
            v_now in 0f64..150.0,
            prev_p in -1e4f64..1e4,
            prev_v in 0f64..150.0,
            v_ref in 10f64..140.0,
        ) {
            let p = mppt_params();
            let s = perturb_observe_step(&p, &state(v_ref, prev_p, prev_v), p_now, v_now);
            let delta = s.v_ref - v_ref;
            prop_assert!(delta.abs() <= p.step + 1e-9);
            // direction matches the four-quadrant truth table
            let dp = p_now - prev_p;
            let dv = v_now - prev_v;
            let expected = if dp > 0.0 {
                if dv >= 0.0 { p.step } else { -p.step }
            } else if dp < 0.0 {
                if dv >= 0.0 { -p.step } else { p.step }
            } else { 0.0 };
            prop_assert_eq!(s.v_ref, (v_ref + expected).clamp(p.v_min, p.v_max));
            prop_assert_eq!(s.prev_p, p_now);
            prop_assert_eq!(s.prev_v, v_now);
        }

        #[test]
        fn pi_output_stays_in_limits(
            error in -100f64..100.0,
            integral in -100f64..100.0,
        ) {
            let p = PiParams { kp: 0.5, ki: 2.0, lo: 0.0, hi: 1.0 };
            let (out, _) = pi_step(&p, &PiState { integral }, error, 1e-3);
            prop_assert!((0.0..=1.0).contains(&out));
        }
    }

    #[test]
    fn pi_pure_proportional() {
        let p = PiParams {
            kp: 1.0,
            ki: 0.0,
            lo: 0.0,
            hi: 1.0,
        };
        let (out, _) = pi_step(&p, &PiState::default(), 0.2, 1e-3);
        assert_relative_eq!(out, 0.2, epsilon = 1e-12);
        let (out, _) = pi_step(&p, &PiState::default(), 0.0, 1e-3);
        assert_eq!(out, 0.0);
    }

    #[test]
    fn pi_integral_ramp() {
        let p = PiParams {
            kp: 0.0,
            ki: 1.0,
            lo: 0.0,
            hi: 10.0,
        };
        let dt = 1e-3;
        let mut s = PiState::default();
        let mut out = 0.0;
        for _ in 0..2000 {
            let (o, ns) = pi_step(&p, &s, 1.0, dt);
            out = o;
            s = ns;
        }
        assert_relative_eq!(out, 2.0, epsilon = dt + 1e-9);
    }

    #[test]
    fn pi_anti_windup_bounds_integral() {
        let p = PiParams {
            kp: 0.0,
            ki: 1.0,
            lo: 0.0,
            hi: 1.0,
        };
        let mut s = PiState::default();
        for _ in 0..10_000 {
            let (_, ns) = pi_step(&p, &s, 1.0, 1e-2);
            s = ns;
        }
        // integral stops accumulating once the output saturates at 1
        assert!(s.integral <= 1.0 + 1e-2);
        // and recovery is immediate: a negative error pulls the output
        // off the limit within a few samples
        let (out, _) = pi_step(&p, &s, -5.0, 1e-2);
        assert!(out < 1.0);
    }

    #[test]
    fn droop_examples() {
        let d = DroopParams::from_delta_v_max(200.0, 10.0, 5000.0);
        assert_eq!(droop_voltage_ref(&d, 0.0), 200.0);
        assert_relative_eq!(droop_voltage_ref(&d, 5000.0), 190.0, epsilon = 1e-12);
    }

    #[test]
    fn droop_shares_by_rating_at_common_bus() {
        // two droop laws against a shared bus: solve v = v_nom - m_k p_k
        // with p_1 + p_2 = p_load
        let d1 = DroopParams::from_delta_v_max(200.0, 10.0, 4000.0);
        let d2 = DroopParams::from_delta_v_max(200.0, 10.0, 2000.0);
        let p_load = 3000.0;
        // p_k = (v_nom - v)/m_k; sum = p_load
        let v = d1.v_nom - p_load / (1.0 / d1.m + 1.0 / d2.m);
        let p1 = (d1.v_nom - v) / d1.m;
        let p2 = (d2.v_nom - v) / d2.m;
        assert_relative_eq!(p1 / d1.rating, p2 / d2.rating, epsilon = 1e-9);
        assert_relative_eq!(p1 + p2, p_load, epsilon = 1e-9);
    }

    #[test]
    fn mppt_duty_sign_convention() {
        let pi = PiParams {
            kp: 0.01,
            ki: 0.0,
            lo: 0.0,
            hi: 0.95,
        };
        // at the reference, the command reduces to the boost feedforward
        let (d_eq, _) = mppt_duty_command(100.0, &pi, &PiState::default(), 100.0, 200.0, 1e-3);
        assert_relative_eq!(d_eq, 0.5, epsilon = 1e-12);
        // measured voltage above the reference -> duty rises
        let (d_hi, _) = mppt_duty_command(100.0, &pi, &PiState::default(), 110.0, 200.0, 1e-3);
        assert!(d_hi > d_eq);
    }
}
