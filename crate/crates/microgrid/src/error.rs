use thiserror::Error;

/// Errors raised while integrating a scenario.
#[derive(Debug, Error)]
pub enum SimError {
    #[error("non-finite derivative for state `{name}` at t = {t} s")]
    NonFiniteDerivative { name: String, t: f64 },

    #[error("state `{name}` exceeded the abort bound {bound} at t = {t} s (value {value})")]
    StateBlowUp {
        name: String,
        t: f64,
        value: f64,
        bound: f64,
    },

    #[error("battery depleted: extracted capacity {it} Ah reached capacity {q} Ah at t = {t} s")]
    BatteryDepleted { it: f64, q: f64, t: f64 },

    #[error("fuel-cell current {i} A exceeded the mass-transport limit {i_max} A at t = {t} s")]
    FuelCellOverCurrent { i: f64, i_max: f64, t: f64 },

    #[error("fuel-cell current {i} A is negative; the series diode blocks reverse current")]
    FuelCellNegativeCurrent { i: f64 },

    #[error("PV diode exponent {x} exceeds overflow guard (non-physical operating point)")]
    PvExponentOverflow { x: f64 },

    #[error("PV implicit solve failed to converge after {iterations} iterations (last residual {residual} A)")]
    PvSolverDiverged { iterations: usize, residual: f64 },

    #[error("boost steady state undefined for duty >= 1 (duty = {duty})")]
    BoostDutyDomain { duty: f64 },
}

/// Scenario parsing and validation failures.
#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("scenario syntax error: {0}")]
    Syntax(String),

    #[error("invalid value for `{key}`: {constraint}")]
    Constraint { key: String, constraint: String },

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("scenario file not found: {0}")]
    NotFound(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl ScenarioError {
    pub fn constraint(key: &str, constraint: impl Into<String>) -> Self {
        ScenarioError::Constraint {
            key: key.to_string(),
            constraint: constraint.into(),
        }
    }
}
