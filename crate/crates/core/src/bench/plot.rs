//! Standalone SVG line plots, mainly of summary rows against `T`.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use super::SummaryRow;
use crate::error::{Error, Result};

const WIDTH: f64 = 760.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 190.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
/// Smallest value drawn on a log axis; exact recoveries sit here.
const LOG_FLOOR: f64 = 1e-16;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    SuccessProbability,
    MeanRuntime,
    MeanRelativeError,
    MeanErrorL2,
}

impl Metric {
    pub fn tag(&self) -> &'static str {
        match self {
            Metric::SuccessProbability => "success_probability",
            Metric::MeanRuntime => "mean_runtime",
            Metric::MeanRelativeError => "mean_relative_error",
            Metric::MeanErrorL2 => "mean_error_l2",
        }
    }

    fn label(&self) -> &'static str {
        match self {
            Metric::SuccessProbability => "probability of exact recovery",
            Metric::MeanRuntime => "mean runtime (s)",
            Metric::MeanRelativeError => "mean relative error",
            Metric::MeanErrorL2 => "mean l2 error",
        }
    }

    fn value(&self, row: &SummaryRow) -> f64 {
        match self {
            Metric::SuccessProbability => row.success_probability,
            Metric::MeanRuntime => row.mean_runtime,
            Metric::MeanRelativeError => row.mean_relative_error,
            Metric::MeanErrorL2 => row.mean_error_l2,
        }
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "success_probability" => Ok(Metric::SuccessProbability),
            "mean_runtime" => Ok(Metric::MeanRuntime),
            "mean_relative_error" => Ok(Metric::MeanRelativeError),
            "mean_error_l2" => Ok(Metric::MeanErrorL2),
            _ => Err(Error::InvalidArgument(format!("unknown metric {s:?}"))),
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

struct Axis {
    lo: f64,
    hi: f64,
    log: bool,
}

impl Axis {
    fn map(&self, v: f64, from: f64, to: f64) -> f64 {
        let (v, lo, hi) = if self.log {
            (v.max(LOG_FLOOR).log10(), self.lo.log10(), self.hi.log10())
        } else {
            (v, self.lo, self.hi)
        };
        from + (v - lo) / (hi - lo) * (to - from)
    }

    fn ticks(&self) -> Vec<f64> {
        if self.log {
            let (a, b) = (self.lo.log10().round() as i32, self.hi.log10().round() as i32);
            let step = ((b - a) as usize).div_ceil(8).max(1);
            (a..=b).step_by(step).map(|e| 10f64.powi(e)).collect()
        } else {
            (0..=4).map(|i| self.lo + (self.hi - self.lo) * i as f64 / 4.0).collect()
        }
    }
}

/// One polyline. Dashed series are drawn as reference lines.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub dashed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    /// `[0, max]`.
    Linear,
    /// `[0, 1]`.
    Unit,
    /// Whole decades around the data, values floored at `1e-16`.
    Log,
}

fn y_axis(scale: Scale, values: &[f64]) -> Axis {
    match scale {
        Scale::Log => {
            let lo = values.iter().map(|v| v.max(LOG_FLOOR)).fold(f64::INFINITY, f64::min);
            let hi = values.iter().map(|v| v.max(LOG_FLOOR)).fold(0.0, f64::max);
            let (mut a, mut b) = (lo.log10().floor(), hi.log10().ceil());
            if a == b {
                a -= 1.0;
                b += 1.0;
            }
            Axis {
                lo: 10f64.powf(a),
                hi: 10f64.powf(b),
                log: true,
            }
        }
        Scale::Unit => Axis {
            lo: 0.0,
            hi: 1.0,
            log: false,
        },
        Scale::Linear => {
            let hi = values.iter().copied().fold(0.0, f64::max);
            Axis {
                lo: 0.0,
                hi: if hi > 0.0 { hi * 1.05 } else { 1.0 },
                log: false,
            }
        }
    }
}

/// SVG text of `metric` against `T`, one polyline per algorithm. Plots of
/// [`Metric::MeanErrorL2`] add a dashed optimal T-term error line when the
/// rows carry one.
pub fn render_plot(summaries: &[SummaryRow], metric: Metric) -> Result<String> {
    if summaries.is_empty() {
        return Err(Error::InvalidArgument("nothing to plot".into()));
    }
    let mut series: Vec<Series> = Vec::new();
    for row in summaries {
        let point = (row.t as f64, metric.value(row));
        match series.iter_mut().find(|s| s.label == row.algorithm) {
            Some(s) => s.points.push(point),
            None => series.push(Series {
                label: row.algorithm.clone(),
                points: vec![point],
                dashed: false,
            }),
        }
    }
    if metric == Metric::MeanErrorL2 {
        let mut ts: Vec<usize> = summaries.iter().map(|r| r.t).collect();
        ts.sort_unstable();
        ts.dedup();
        let points: Vec<(f64, f64)> = ts
            .iter()
            .filter_map(|&t| {
                summaries
                    .iter()
                    .find(|r| r.t == t && r.mean_optimal_error > 0.0)
                    .map(|r| (t as f64, r.mean_optimal_error))
            })
            .collect();
        if !points.is_empty() {
            series.push(Series {
                label: "optimal T-term".into(),
                points,
                dashed: true,
            });
        }
    }
    let scale = match metric {
        Metric::SuccessProbability => Scale::Unit,
        Metric::MeanRuntime => Scale::Linear,
        Metric::MeanRelativeError | Metric::MeanErrorL2 => Scale::Log,
    };
    render_series(&series, "T (sparsity)", metric.label(), scale)
}

/// SVG text of arbitrary polylines sharing one pair of axes.
pub fn render_series(series: &[Series], x_label: &str, y_label: &str, scale: Scale) -> Result<String> {
    let mut xs: Vec<f64> = series.iter().flat_map(|s| s.points.iter().map(|p| p.0)).collect();
    if xs.is_empty() {
        return Err(Error::InvalidArgument("nothing to plot".into()));
    }
    if xs.iter().chain(series.iter().flat_map(|s| s.points.iter().map(|p| &p.1))).any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("plot values must be finite".into()));
    }
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let values: Vec<f64> = series.iter().flat_map(|s| s.points.iter().map(|p| p.1)).collect();
    let y = y_axis(scale, &values);
    let (xmin, xmax) = (xs[0], *xs.last().unwrap());
    let x = Axis {
        lo: if xmin == xmax { xmin - 1.0 } else { xmin },
        hi: if xmin == xmax { xmax + 1.0 } else { xmax },
        log: false,
    };
    let x_ticks = if xs.len() <= 16 { xs.clone() } else { x.ticks() };
    let (x0, x1, y0, y1) = (LEFT, WIDTH - RIGHT, HEIGHT - BOTTOM, TOP);
    let px = |v: f64| x.map(v, x0, x1);
    let py = |v: f64| y.map(v, y0, y1);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{x0}" y="{y1}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        x1 - x0,
        y0 - y1
    );
    for v in x_ticks {
        let p = px(v);
        let _ = writeln!(s, r#"<line x1="{p:.2}" y1="{y0}" x2="{p:.2}" y2="{}" stroke="black"/>"#, y0 + 5.0);
        let _ = writeln!(s, r#"<text x="{p:.2}" y="{}" text-anchor="middle">{}</text>"#, y0 + 20.0, trim_number(v));
    }
    for v in y.ticks() {
        let p = py(v);
        let label = if y.log { format!("1e{}", v.log10().round()) } else { trim_number(v) };
        let _ = writeln!(s, r##"<line x1="{x0}" y1="{p:.2}" x2="{x1}" y2="{p:.2}" stroke="#dddddd"/>"##);
        let _ = writeln!(s, r#"<text x="{}" y="{:.2}" text-anchor="end">{label}</text>"#, x0 - 8.0, p + 4.0);
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 15.0,
        escape(x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="20" y="{0}" text-anchor="middle" transform="rotate(-90 20 {0})">{1}</text>"#,
        (y0 + y1) / 2.0,
        escape(y_label)
    );

    let legend_x = x1 + 20.0;
    let mut legend_y = TOP + 10.0;
    let mut color_index = 0;
    for line in series {
        let (class, color, dash) = if line.dashed {
            ("reference", "black", r#" stroke-dasharray="6 4""#)
        } else {
            color_index += 1;
            ("series", PALETTE[(color_index - 1) % PALETTE.len()], "")
        };
        let points: Vec<(f64, f64)> = line.points.iter().map(|&(a, b)| (px(a), py(b))).collect();
        let coords: Vec<String> = points.iter().map(|(a, b)| format!("{a:.2},{b:.2}")).collect();
        let _ = writeln!(
            s,
            r#"<polyline class="{class}" data-label="{}" points="{}" fill="none" stroke="{color}" stroke-width="2"{dash}/>"#,
            escape(&line.label),
            coords.join(" ")
        );
        if !line.dashed {
            for (a, b) in &points {
                let _ = writeln!(s, r#"<circle cx="{a:.2}" cy="{b:.2}" r="3" fill="{color}"/>"#);
            }
        }
        let _ = writeln!(
            s,
            r#"<line x1="{legend_x}" y1="{legend_y}" x2="{}" y2="{legend_y}" stroke="{color}" stroke-width="2"{dash}/>"#,
            legend_x + 20.0
        );
        let _ = writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, legend_x + 26.0, legend_y + 4.0, escape(&line.label));
        legend_y += 18.0;
    }
    s.push_str("</svg>\n");
    Ok(s)
}

fn trim_number(v: f64) -> String {
    if v == v.round() && v.abs() < 1e9 {
        format!("{}", v as i64)
    } else {
        format!("{v:.3}")
    }
}

pub fn emit_plot(summaries: &[SummaryRow], metric: Metric, path: &Path) -> Result<()> {
    let svg = render_plot(summaries, metric)?;
    std::fs::write(path, svg).map_err(|e| Error::io(path, e))
}
