//! Hand-written SVG line plots.
//!
//! Coordinates are printed with fixed precision so identical trajectories
//! produce identical files.

use std::fmt::Write as _;
use std::path::Path;

use travwave_core::energy::Component;
use travwave_core::Trajectory;

use crate::error::{LabError, Result};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 50.0;
/// Values at or below this are drawn at the floor of log-scale plots.
const LOG_FLOOR: f64 = 1e-30;
const MAX_WATERFALL_LINES: usize = 24;

const COLORS: [&str; 8] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#000000",
];

struct Series {
    name: String,
    points: Vec<(f64, f64)>,
}

struct Axes {
    x: (f64, f64),
    y: (f64, f64),
}

impl Axes {
    fn fit(series: &[Series]) -> Self {
        let pts = series.iter().flat_map(|s| s.points.iter());
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for &(x, y) in pts {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        Axes {
            x: widen(x0, x1),
            y: widen(y0, y1),
        }
    }

    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x.0) / (self.x.1 - self.x.0) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - BOTTOM - (y - self.y.0) / (self.y.1 - self.y.0) * (HEIGHT - TOP - BOTTOM)
    }
}

/// A nonempty, finite range; degenerate ranges are padded by one unit.
fn widen(lo: f64, hi: f64) -> (f64, f64) {
    if !lo.is_finite() || !hi.is_finite() {
        (0.0, 1.0)
    } else if hi - lo <= 1e-12 * (1.0 + lo.abs().max(hi.abs())) {
        (lo - 1.0, hi + 1.0)
    } else {
        (lo, hi)
    }
}

fn render(title: &str, x_label: &str, y_label: &str, series: &[Series], note: Option<&str>) -> String {
    let ax = Axes::fit(series);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{:.1}" y="18" text-anchor="middle" font-size="14">{title}</text>"#, WIDTH / 2.0);
    let (x0, x1) = (LEFT, WIDTH - RIGHT);
    let (y0, y1) = (HEIGHT - BOTTOM, TOP);
    let _ = writeln!(
        s,
        r#"<rect x="{x0:.1}" y="{y1:.1}" width="{:.1}" height="{:.1}" fill="none" stroke="black"/>"#,
        x1 - x0,
        y0 - y1
    );
    for k in 0..=4 {
        let f = k as f64 / 4.0;
        let xv = ax.x.0 + f * (ax.x.1 - ax.x.0);
        let yv = ax.y.0 + f * (ax.y.1 - ax.y.0);
        let (px, py) = (ax.px(xv), ax.py(yv));
        let _ = writeln!(s, r#"<line x1="{px:.2}" y1="{y0:.1}" x2="{px:.2}" y2="{:.1}" stroke="black"/>"#, y0 + 5.0);
        let _ = writeln!(s, r#"<text x="{px:.2}" y="{:.1}" text-anchor="middle">{xv:.3}</text>"#, y0 + 18.0);
        let _ = writeln!(s, r#"<line x1="{:.1}" y1="{py:.2}" x2="{x0:.1}" y2="{py:.2}" stroke="black"/>"#, x0 - 5.0);
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.2}" text-anchor="end">{yv:.3}</text>"#, x0 - 8.0, py + 4.0);
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{x_label}</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 10.0
    );
    let _ = writeln!(
        s,
        r#"<text x="15" y="{:.1}" text-anchor="middle" transform="rotate(-90 15 {:.1})">{y_label}</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0
    );
    for (k, ser) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let pts: Vec<String> = ser.points.iter().map(|&(x, y)| format!("{:.2},{:.2}", ax.px(x), ax.py(y))).collect();
        if pts.len() == 1 {
            let (x, y) = ser.points[0];
            let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#, ax.px(x), ax.py(y));
        } else if !pts.is_empty() {
            let _ = writeln!(
                s,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.2" points="{}"/>"#,
                pts.join(" ")
            );
        }
        let ly = TOP + 10.0 + 16.0 * k as f64;
        let _ = writeln!(
            s,
            r#"<line x1="{:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"/>"#,
            x1 + 10.0,
            x1 + 30.0
        );
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}">{}</text>"#, x1 + 35.0, ly + 4.0, ser.name);
    }
    if let Some(note) = note {
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" fill="gray">{note}</text>"#,
            (x0 + x1) / 2.0,
            (y0 + y1) / 2.0
        );
    }
    s.push_str("</svg>\n");
    s
}

fn energy_series(tr: &Trajectory, pick: impl Fn(&travwave_core::energy::EnergyReport) -> [f64; 8], log: bool) -> Vec<Series> {
    let mut names: Vec<String> = Component::ALL.iter().map(|c| c.name().to_string()).collect();
    names.push("total".into());
    names
        .into_iter()
        .enumerate()
        .map(|(k, name)| Series {
            name,
            points: tr
                .energies
                .iter()
                .map(|r| {
                    let v = pick(r)[k];
                    (r.t, if log { v.max(LOG_FLOOR).log10() } else { v })
                })
                .collect(),
        })
        .collect()
}

/// Slice energies on a log10 scale, with zero drawn at the floor.
pub fn energy_svg(tr: &Trajectory) -> String {
    let series = energy_series(
        tr,
        |r| {
            let mut a = [0.0; 8];
            a[..7].copy_from_slice(&r.slice.0);
            a[7] = r.e_total();
            a
        },
        true,
    );
    let note = tr.energies.is_empty().then_some("no energies recorded");
    render("Slice energies", "t", "log10 E", &series, note)
}

pub fn spacetime_svg(tr: &Trajectory) -> String {
    let series = energy_series(
        tr,
        |r| {
            let mut a = [0.0; 8];
            a[..7].copy_from_slice(&r.spacetime.0);
            a[7] = r.se_total();
            a
        },
        false,
    );
    let note = tr.energies.is_empty().then_some("no energies recorded");
    render("Spacetime energies", "t", "SE", &series, note)
}

/// `|u(t, x)|` per snapshot, offset vertically by time.
pub fn waterfall_svg(tr: &Trajectory) -> String {
    let snaps = &tr.snapshots;
    let stride = snaps.len().div_ceil(MAX_WATERFALL_LINES).max(1);
    let chosen: Vec<_> = snaps.iter().step_by(stride).collect();
    let peak = chosen.iter().map(|s| s.u.max_abs()).fold(0.0, f64::max);
    let span = chosen.last().map_or(0.0, |s| s.t) - chosen.first().map_or(0.0, |s| s.t);
    // Each line's peak reaches two line spacings above its baseline.
    let spacing = if chosen.len() > 1 { span / (chosen.len() - 1) as f64 } else { 1.0 };
    let scale = if peak > 0.0 { 2.0 * spacing / peak } else { 0.0 };
    let grid = tr.grid;
    let series: Vec<Series> = chosen
        .iter()
        .map(|s| Series {
            name: format!("t={:.2}", s.t),
            points: (0..grid.nx)
                .map(|i| (grid.x(i), s.t + scale * s.u.node(i).iter().map(|v| v * v).sum::<f64>().sqrt()))
                .collect(),
        })
        .collect();
    let title = format!("|u| waterfall (peak {peak:.3e})");
    render(&title, "x", "t + scaled |u|", &series, None)
}

/// Writes `<label>_energy.svg`, `<label>_spacetime.svg` and `<label>_waterfall.svg`.
pub fn emit_plots(tr: &Trajectory, dir: &Path, label: &str) -> Result<()> {
    if tr.snapshots.is_empty() {
        return Err(LabError::EmptyTrajectory);
    }
    for (suffix, body) in [
        ("energy", energy_svg(tr)),
        ("spacetime", spacetime_svg(tr)),
        ("waterfall", waterfall_svg(tr)),
    ] {
        let path = dir.join(format!("{label}_{suffix}.svg"));
        std::fs::write(&path, body).map_err(|e| LabError::io(&path, e))?;
    }
    Ok(())
}
