//! Fixed-step integration primitives: the simulation clock, classical RK4,
//! and PWM gating for the switched converter models.

use crate::error::SimError;

/// Fixed-step simulation clock. Times are derived from the integer step
/// index so long runs accumulate no floating-point drift.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimClock {
    pub t0: f64,
    pub dt: f64,
    pub t_end: f64,
}

impl SimClock {
    pub fn new(t0: f64, dt: f64, t_end: f64) -> Self {
        assert!(dt > 0.0, "dt must be positive");
        assert!(t_end >= t0, "t_end must not precede t0");
        SimClock { t0, dt, t_end }
    }

    /// Total number of integration steps.
    pub fn step_count(&self) -> u64 {
        ((self.t_end - self.t0) / self.dt).round() as u64
    }

    /// Time at step index `k`, computed as t0 + k*dt.
    pub fn time_at(&self, k: u64) -> f64 {
        self.t0 + k as f64 * self.dt
    }
}

/// One classical 4th-order Runge-Kutta step of `x` at time `t`.
///
/// `deriv` writes dx/dt into its output slice and must be a pure function
/// of `(t, x)`. `names` labels each state for diagnostics; a non-finite
/// derivative aborts with the offending state named.
pub fn step_rk4<F>(
    x: &mut [f64],
    t: f64,
    dt: f64,
    names: &[&str],
    mut deriv: F,
) -> Result<(), SimError>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<(), SimError>,
{
    let n = x.len();
    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut tmp = vec![0.0; n];

    deriv(t, x, &mut k1)?;
    check_finite(&k1, names, t)?;
    for i in 0..n {
        tmp[i] = x[i] + 0.5 * dt * k1[i];
    }
    deriv(t + 0.5 * dt, &tmp, &mut k2)?;
    check_finite(&k2, names, t)?;
    for i in 0..n {
        tmp[i] = x[i] + 0.5 * dt * k2[i];
    }
    deriv(t + 0.5 * dt, &tmp, &mut k3)?;
    check_finite(&k3, names, t)?;
    for i in 0..n {
        tmp[i] = x[i] + dt * k3[i];
    }
    deriv(t + dt, &tmp, &mut k4)?;
    check_finite(&k4, names, t)?;

    for i in 0..n {
        x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    Ok(())
}

fn check_finite(k: &[f64], names: &[&str], t: f64) -> Result<(), SimError> {
    for (i, v) in k.iter().enumerate() {
        if !v.is_finite() {
            return Err(SimError::NonFiniteDerivative {
                name: names.get(i).unwrap_or(&"?").to_string(),
                t,
            });
        }
    }
    Ok(())
}

/// True iff the switch conducts at time `t` for the given switching
/// period and duty cycle: fractional position (t mod period)/period < duty.
pub fn pwm_gate(t: f64, period: f64, duty: f64) -> bool {
    debug_assert!(period > 0.0);
    let frac = (t.rem_euclid(period)) / period;
    frac < duty.clamp(0.0, 1.0)
}
