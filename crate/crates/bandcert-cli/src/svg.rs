//! Minimal deterministic SVG band diagrams.
//!
//! Dispersion curves are drawn over the quasi-momentum path with certified
//! intervals shaded behind them. The emitter writes plain SVG text directly:
//! coordinates are formatted with two fixed decimals so that repeated runs
//! produce byte-identical files.

use std::fmt::Write;

/// One labelled tick on the horizontal (path) axis.
pub struct PathTick {
    /// Arc-length position along the path.
    pub position: f64,
    /// Display label (e.g. a high-symmetry point name).
    pub label: String,
}

/// Input data for one band diagram.
pub struct BandDiagram {
    /// Horizontal positions of the plotted samples (nondecreasing).
    pub positions: Vec<f64>,
    /// One curve per band: `curves[j][i]` is the eigenvalue at sample `i`.
    pub curves: Vec<Vec<f64>>,
    /// Certified intervals `(lower, upper)` shaded across the full width.
    pub intervals: Vec<(f64, f64)>,
    /// Ticks on the horizontal axis.
    pub ticks: Vec<PathTick>,
    /// Vertical axis label.
    pub y_label: String,
    /// Diagram title.
    pub title: String,
}

const WIDTH: f64 = 840.0;
const HEIGHT: f64 = 520.0;
const LEFT: f64 = 78.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 34.0;
const BOTTOM: f64 = 46.0;

impl BandDiagram {
    /// Render the diagram to SVG text.
    pub fn render(&self) -> String {
        let x_min = self.positions.first().copied().unwrap_or(0.0);
        let x_max = self.positions.last().copied().unwrap_or(1.0).max(x_min + 1.0);
        let y_max = self
            .curves
            .iter()
            .flatten()
            .chain(self.intervals.iter().map(|(_, hi)| hi))
            .fold(0.0_f64, |acc, &v| acc.max(v))
            .max(1e-300)
            * 1.05;

        let px = |x: f64| LEFT + (x - x_min) / (x_max - x_min) * (WIDTH - LEFT - RIGHT);
        let py = |y: f64| HEIGHT - BOTTOM - y / y_max * (HEIGHT - TOP - BOTTOM);

        let mut svg = String::new();
        let _ = writeln!(
            svg,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" \
             font-family=\"sans-serif\" font-size=\"13\">"
        );
        let _ = writeln!(svg, "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>");
        let _ = writeln!(
            svg,
            "<text x=\"{:.2}\" y=\"20\" text-anchor=\"middle\" font-size=\"15\">{}</text>",
            (LEFT + WIDTH - RIGHT) / 2.0,
            escape(&self.title)
        );

        // Certified intervals first so the curves draw on top of them.
        for (lo, hi) in &self.intervals {
            let top = py(*hi);
            let bottom = py(*lo);
            let _ = writeln!(
                svg,
                "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" \
                 fill=\"#93d6a2\" fill-opacity=\"0.45\"/>",
                px(x_min),
                top,
                px(x_max) - px(x_min),
                bottom - top
            );
        }

        // Axes.
        let _ = writeln!(
            svg,
            "<line x1=\"{LEFT:.2}\" y1=\"{:.2}\" x2=\"{LEFT:.2}\" y2=\"{TOP:.2}\" \
             stroke=\"black\"/>",
            HEIGHT - BOTTOM
        );
        let _ = writeln!(
            svg,
            "<line x1=\"{LEFT:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"black\"/>",
            HEIGHT - BOTTOM,
            WIDTH - RIGHT,
            HEIGHT - BOTTOM
        );

        // Vertical axis ticks at "nice" values.
        let step = nice_step(y_max / 5.0);
        let mut tick = 0.0;
        while tick <= y_max {
            let y = py(tick);
            let _ = writeln!(
                svg,
                "<line x1=\"{:.2}\" y1=\"{y:.2}\" x2=\"{LEFT:.2}\" y2=\"{y:.2}\" \
                 stroke=\"black\"/>",
                LEFT - 5.0
            );
            let _ = writeln!(
                svg,
                "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{}</text>",
                LEFT - 9.0,
                y + 4.0,
                trim_float(tick)
            );
            tick += step;
        }
        let _ = writeln!(
            svg,
            "<text x=\"18\" y=\"{:.2}\" text-anchor=\"middle\" \
             transform=\"rotate(-90 18 {:.2})\">{}</text>",
            (TOP + HEIGHT - BOTTOM) / 2.0,
            (TOP + HEIGHT - BOTTOM) / 2.0,
            escape(&self.y_label)
        );

        // Path-axis ticks.
        for t in &self.ticks {
            let x = px(t.position);
            let _ = writeln!(
                svg,
                "<line x1=\"{x:.2}\" y1=\"{:.2}\" x2=\"{x:.2}\" y2=\"{TOP:.2}\" \
                 stroke=\"#bbbbbb\" stroke-dasharray=\"4 4\"/>",
                HEIGHT - BOTTOM
            );
            let _ = writeln!(
                svg,
                "<text x=\"{x:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>",
                HEIGHT - BOTTOM + 18.0,
                escape(&t.label)
            );
        }

        // Dispersion curves.
        for curve in &self.curves {
            let mut points = String::new();
            for (i, &value) in curve.iter().enumerate() {
                let _ = write!(points, "{:.2},{:.2} ", px(self.positions[i]), py(value));
            }
            let _ = writeln!(
                svg,
                "<polyline points=\"{}\" fill=\"none\" stroke=\"#1f4e79\" \
                 stroke-width=\"1.4\"/>",
                points.trim_end()
            );
        }

        svg.push_str("</svg>\n");
        svg
    }
}

/// Round a raw step up to the nearest 1/2/5 × 10^p value.
fn nice_step(raw: f64) -> f64 {
    let power = raw.log10().floor();
    let base = 10.0_f64.powf(power);
    let fraction = raw / base;
    let nice = if fraction <= 1.0 {
        1.0
    } else if fraction <= 2.0 {
        2.0
    } else if fraction <= 5.0 {
        5.0
    } else {
        10.0
    };
    nice * base
}

/// Short decimal form for tick labels.
fn trim_float(value: f64) -> String {
    if value == value.trunc() && value.abs() < 1e15 {
        format!("{}", value as i64)
    } else {
        format!("{value}")
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

// ============================================================================
// Tests
// ============================================================================
