//! Static SVG plot emission: one vector-graphic panel per signal group,
//! byte-deterministic for a given trace.

use crate::trace::Trace;
use std::io;
use std::path::{Path, PathBuf};

const WIDTH: f64 = 900.0;
const HEIGHT: f64 = 480.0;
const MARGIN_L: f64 = 80.0;
const MARGIN_R: f64 = 160.0;
const MARGIN_T: f64 = 44.0;
const MARGIN_B: f64 = 56.0;
const COLORS: &[&str] = &["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd"];

pub struct Series<'a> {
    pub label: &'a str,
    pub points: &'a [(f64, f64)],
}

fn nice_ticks(lo: f64, hi: f64) -> Vec<f64> {
    if !(hi > lo) {
        return vec![lo];
    }
    let span = hi - lo;
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 2.5, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| span / s <= 6.0)
        .unwrap_or(mag * 10.0);
    let mut ticks = Vec::new();
    let mut v = (lo / step).ceil() * step;
    while v <= hi + step * 1e-9 {
        ticks.push(v);
        v += step;
    }
    ticks
}

fn fmt_tick(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let a = v.abs();
    if a >= 1e4 || a < 1e-2 {
        format!("{v:.2e}")
    } else if a >= 100.0 {
        format!("{v:.0}")
    } else {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

/// Render one panel with shared x axis (seconds) to an SVG string.
pub fn render_panel(title: &str, y_label: &str, series: &[Series]) -> String {
    let mut x_min = f64::INFINITY;
    let mut x_max = f64::NEG_INFINITY;
    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for s in series {
        for &(x, y) in s.points {
            x_min = x_min.min(x);
            x_max = x_max.max(x);
            y_min = y_min.min(y);
            y_max = y_max.max(y);
        }
    }
    if !x_min.is_finite() {
        x_min = 0.0;
        x_max = 1.0;
        y_min = 0.0;
        y_max = 1.0;
    }
    if y_max - y_min < 1e-12 {
        y_min -= 1.0;
        y_max += 1.0;
    } else {
        let pad = 0.05 * (y_max - y_min);
        y_min -= pad;
        y_max += pad;
    }
    if x_max - x_min < 1e-12 {
        x_max = x_min + 1.0;
    }

    let px = |x: f64| MARGIN_L + (x - x_min) / (x_max - x_min) * (WIDTH - MARGIN_L - MARGIN_R);
    let py = |y: f64| HEIGHT - MARGIN_B - (y - y_min) / (y_max - y_min) * (HEIGHT - MARGIN_T - MARGIN_B);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\" font-size=\"13\">\n"
    ));
    svg.push_str(&format!(
        "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n"
    ));
    svg.push_str(&format!(
        "<text x=\"{:.1}\" y=\"24\" font-size=\"16\" text-anchor=\"middle\">{}</text>\n",
        (MARGIN_L + WIDTH - MARGIN_R) / 2.0,
        title
    ));
    // axes
    svg.push_str(&format!(
        "<line x1=\"{:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"black\"/>\n",
        MARGIN_L,
        HEIGHT - MARGIN_B,
        WIDTH - MARGIN_R,
        HEIGHT - MARGIN_B
    ));
    svg.push_str(&format!(
        "<line x1=\"{:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"black\"/>\n",
        MARGIN_L, MARGIN_T, MARGIN_L,
        HEIGHT - MARGIN_B
    ));
    for tx in nice_ticks(x_min, x_max) {
        let x = px(tx);
        svg.push_str(&format!(
            "<line x1=\"{x:.1}\" y1=\"{:.1}\" x2=\"{x:.1}\" y2=\"{:.1}\" stroke=\"black\"/>\n",
            HEIGHT - MARGIN_B,
            HEIGHT - MARGIN_B + 5.0
        ));
        svg.push_str(&format!(
            "<text x=\"{x:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{}</text>\n",
            HEIGHT - MARGIN_B + 20.0,
            fmt_tick(tx)
        ));
    }
    for ty in nice_ticks(y_min, y_max) {
        let y = py(ty);
        svg.push_str(&format!(
            "<line x1=\"{:.1}\" y1=\"{y:.1}\" x2=\"{:.1}\" y2=\"{y:.1}\" stroke=\"black\"/>\n",
            MARGIN_L - 5.0,
            MARGIN_L
        ));
        svg.push_str(&format!(
            "<line x1=\"{:.1}\" y1=\"{y:.1}\" x2=\"{:.1}\" y2=\"{y:.1}\" stroke=\"#dddddd\"/>\n",
            MARGIN_L,
            WIDTH - MARGIN_R
        ));
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\">{}</text>\n",
            MARGIN_L - 9.0,
            y + 4.0,
            fmt_tick(ty)
        ));
    }
    svg.push_str(&format!(
        "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">t (s)</text>\n",
        (MARGIN_L + WIDTH - MARGIN_R) / 2.0,
        HEIGHT - 12.0
    ));
    svg.push_str(&format!(
        "<text x=\"18\" y=\"{:.1}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {:.1})\">{}</text>\n",
        (MARGIN_T + HEIGHT - MARGIN_B) / 2.0,
        (MARGIN_T + HEIGHT - MARGIN_B) / 2.0,
        y_label
    ));

    for (idx, s) in series.iter().enumerate() {
        let color = COLORS[idx % COLORS.len()];
        if s.points.len() == 1 {
            let (x, y) = s.points[0];
            svg.push_str(&format!(
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"{color}\"/>\n",
                px(x),
                py(y)
            ));
        } else {
            let mut d = String::new();
            for (i, &(x, y)) in s.points.iter().enumerate() {
                d.push_str(if i == 0 { "M" } else { "L" });
                d.push_str(&format!("{:.2} {:.2} ", px(x), py(y)));
            }
            svg.push_str(&format!(
                "<path d=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>\n",
                d.trim_end()
            ));
        }
        let ly = MARGIN_T + 18.0 * idx as f64;
        svg.push_str(&format!(
            "<line x1=\"{:.1}\" y1=\"{ly:.1}\" x2=\"{:.1}\" y2=\"{ly:.1}\" stroke=\"{color}\" stroke-width=\"2\"/>\n",
            WIDTH - MARGIN_R + 10.0,
            WIDTH - MARGIN_R + 34.0
        ));
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\">{}</text>\n",
            WIDTH - MARGIN_R + 40.0,
            ly + 4.0,
            s.label
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

/// Emit the standard panels (demand vs delivered power, bus voltage,
/// per-source powers, SOC) as SVG files under `dir`. Returns the files
/// written. Errors on an empty trace.
pub fn emit_plots(trace: &Trace, dir: &Path) -> io::Result<Vec<PathBuf>> {
    if trace.is_empty() {
        return Err(io::Error::new(
            io::ErrorKind::InvalidInput,
            "cannot plot an empty trace",
        ));
    }
    std::fs::create_dir_all(dir)?;
    let ts: Vec<f64> = trace.rows.iter().map(|r| r.t).collect();
    let mut written = Vec::new();

    let demand: Vec<(f64, f64)> = trace.rows.iter().map(|r| (r.t, r.p_demand)).collect();
    let delivered: Vec<(f64, f64)> = trace.rows.iter().map(|r| (r.t, r.p_load)).collect();
    let path = dir.join("power.svg");
    std::fs::write(
        &path,
        render_panel(
            "Demanded vs delivered power",
            "P (W)",
            &[
                Series {
                    label: "demand",
                    points: &demand,
                },
                Series {
                    label: "delivered",
                    points: &delivered,
                },
            ],
        ),
    )?;
    written.push(path);

    let v_bus: Vec<(f64, f64)> = trace.rows.iter().map(|r| (r.t, r.v_bus)).collect();
    let path = dir.join("bus_voltage.svg");
    std::fs::write(
        &path,
        render_panel(
            "Bus voltage",
            "V (V)",
            &[Series {
                label: "v_bus",
                points: &v_bus,
            }],
        ),
    )?;
    written.push(path);

    if !trace.source_names.is_empty() {
        let per_source: Vec<Vec<(f64, f64)>> = (0..trace.source_names.len())
            .map(|i| {
                ts.iter()
                    .zip(&trace.rows)
                    .map(|(&t, r)| (t, r.sources[i].p))
                    .collect()
            })
            .collect();
        let series: Vec<Series> = trace
            .source_names
            .iter()
            .zip(&per_source)
            .map(|(name, pts)| Series {
                label: name,
                points: pts,
            })
            .collect();
        let path = dir.join("source_powers.svg");
        std::fs::write(&path, render_panel("Source powers", "P (W)", &series))?;
        written.push(path);
    }

    let soc: Vec<(f64, f64)> = trace.rows.iter().map(|r| (r.t, r.soc)).collect();
    let path = dir.join("soc.svg");
    std::fs::write(
        &path,
        render_panel(
            "Battery state of charge",
            "SOC",
            &[Series {
                label: "soc",
                points: &soc,
            }],
        ),
    )?;
    written.push(path);

    Ok(written)
}
