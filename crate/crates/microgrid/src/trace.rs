//! Time-indexed record of every electrical and control signal, the fixed
//! CSV column schema, and the lossless power-balance diagnostic.

use std::io::Write;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceSample {
    /// Source terminal voltage (V).
    pub v: f64,
    /// Source terminal current (A).
    pub i: f64,
    /// Source terminal power (W).
    pub p: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConverterSample {
    /// Inductor current (A).
    pub i_l: f64,
    /// Duty cycle.
    pub duty: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub t: f64,
    pub v_bus: f64,
    pub p_load: f64,
    pub p_demand: f64,
    pub sources: Vec<SourceSample>,
    pub converters: Vec<ConverterSample>,
    /// Battery state of charge; NaN-free: 1.0 when no battery is present.
    pub soc: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    /// Per-source labels in recording order (e.g. battery, pv, fuel_cell).
    pub source_names: Vec<String>,
    pub rows: Vec<TraceRow>,
}

impl Trace {
    pub fn new(source_names: Vec<String>) -> Self {
        Trace {
            source_names,
            rows: Vec::new(),
        }
    }

    /// Ordered CSV column names: t_s, v_bus_V, p_load_W, p_demand_W, then
    /// v/i/p per source, then i_L/duty per converter, then soc.
    pub fn schema(&self) -> Vec<String> {
        let mut cols = vec![
            "t_s".to_string(),
            "v_bus_V".to_string(),
            "p_load_W".to_string(),
            "p_demand_W".to_string(),
        ];
        for name in &self.source_names {
            cols.push(format!("{name}_v_V"));
            cols.push(format!("{name}_i_A"));
            cols.push(format!("{name}_p_W"));
        }
        for name in &self.source_names {
            cols.push(format!("{name}_iL_A"));
            cols.push(format!("{name}_duty"));
        }
        cols.push("soc".to_string());
        cols
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Decimal notation with 9 significant digits, no exponent form.
pub fn format_sig9(x: f64) -> String {
    if x == 0.0 {
        return "0.00000000".to_string();
    }
    let mag = x.abs().log10().floor() as i32;
    let decimals = (9 - 1 - mag).clamp(0, 17) as usize;
    format!("{x:.decimals$}")
}

/// Write the trace as CSV (header plus one row per sample). Returns the
/// number of data rows written. Output bytes are deterministic.
pub fn write_trace_csv<W: Write>(trace: &Trace, sink: &mut W) -> std::io::Result<usize> {
    writeln!(sink, "{}", trace.schema().join(","))?;
    let mut cells: Vec<String> = Vec::new();
    for row in &trace.rows {
        cells.clear();
        cells.push(format_sig9(row.t));
        cells.push(format_sig9(row.v_bus));
        cells.push(format_sig9(row.p_load));
        cells.push(format_sig9(row.p_demand));
        for s in &row.sources {
            cells.push(format_sig9(s.v));
            cells.push(format_sig9(s.i));
            cells.push(format_sig9(s.p));
        }
        for c in &row.converters {
            cells.push(format_sig9(c.i_l));
            cells.push(format_sig9(c.duty));
        }
        cells.push(format_sig9(row.soc));
        writeln!(sink, "{}", cells.join(","))?;
    }
    Ok(trace.rows.len())
}

/// Storage elements whose energy enters the power-balance bookkeeping.
#[derive(Debug, Clone)]
pub struct EnergyParams {
    pub c_bus: f64,
    /// Inductance per converter, in trace column order.
    pub inductances: Vec<f64>,
    /// Optional input capacitance per source terminal (the PV link cap).
    pub input_caps: Vec<Option<f64>>,
}

fn stored_energy(row: &TraceRow, e: &EnergyParams) -> f64 {
    let mut energy = 0.5 * e.c_bus * row.v_bus * row.v_bus;
    for (c, l) in row.converters.iter().zip(&e.inductances) {
        energy += 0.5 * l * c.i_l * c.i_l;
    }
    for (s, cap) in row.sources.iter().zip(&e.input_caps) {
        if let Some(c_in) = cap {
            energy += 0.5 * c_in * s.v * s.v;
        }
    }
    energy
}

/// Lossless-network diagnostic at interior row `k`:
/// residual = sum of source powers - load power - d/dt(stored energy),
/// with the energy rate taken by centered differences over the trace.
pub fn power_balance_residual(trace: &Trace, k: usize, e: &EnergyParams) -> f64 {
    assert!(k > 0 && k + 1 < trace.rows.len(), "residual needs interior row");
    let row = &trace.rows[k];
    let prev = &trace.rows[k - 1];
    let next = &trace.rows[k + 1];
    let p_sources: f64 = row.sources.iter().map(|s| s.p).sum();
    let de_dt = (stored_energy(next, e) - stored_energy(prev, e)) / (next.t - prev.t);
    p_sources - row.p_load - de_dt
}
