//! Static SVG panels from a summary: one chart per metric, x = B, one line
//! per (scenario, K, C) series, min/max whiskers around each mean.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use epigrn::analysis::{Aggregate, Spread};

use crate::error::{io_err, CliError, Result};
use crate::experiment::SummaryRow;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 150.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 50.0;
const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Fitness,
    EpiNodes,
    DevSteps,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::Fitness, Metric::EpiNodes, Metric::DevSteps];

    pub fn file_stem(self) -> &'static str {
        match self {
            Metric::Fitness => "fitness",
            Metric::EpiNodes => "epi_nodes",
            Metric::DevSteps => "dev_steps",
        }
    }

    fn title(self) -> &'static str {
        match self {
            Metric::Fitness => "Final fitness",
            Metric::EpiNodes => "Epigenetic nodes",
            Metric::DevSteps => "Development steps (D)",
        }
    }

    fn spread(self, a: &Aggregate) -> Spread {
        match self {
            Metric::Fitness => a.fitness,
            Metric::EpiNodes => a.epi_nodes,
            Metric::DevSteps => a.dev_steps,
        }
    }
}

/// Plot geometry for one chart.
pub struct Axes {
    pub x_ticks: Vec<usize>,
    pub y_max: f64,
}

impl Axes {
    fn plot_w() -> f64 {
        WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    }

    fn plot_h() -> f64 {
        HEIGHT - MARGIN_TOP - MARGIN_BOTTOM
    }

    pub fn x(&self, b: usize) -> f64 {
        let i = self.x_ticks.iter().position(|&t| t == b).unwrap_or(0);
        MARGIN_LEFT + Self::plot_w() * (i as f64 + 0.5) / self.x_ticks.len() as f64
    }

    pub fn y(&self, v: f64) -> f64 {
        MARGIN_TOP + Self::plot_h() * (1.0 - v / self.y_max)
    }
}

fn axes_for(rows: &[SummaryRow], metric: Metric) -> Axes {
    let x_ticks: Vec<usize> = rows.iter().map(|r| r.point.b).collect::<BTreeSet<_>>().into_iter().collect();
    let y_max = match metric {
        Metric::Fitness => 1.0,
        _ => {
            let top = rows.iter().map(|r| metric.spread(&r.stats).max).fold(0.0, f64::max);
            if top > 0.0 {
                top * 1.1
            } else {
                1.0
            }
        }
    };
    Axes { x_ticks, y_max }
}

fn series_key(r: &SummaryRow) -> (String, usize, usize) {
    (r.scenario.clone(), r.point.k, r.point.c)
}

/// Render one metric as an SVG document.
pub fn render(rows: &[SummaryRow], metric: Metric) -> Result<String> {
    if rows.is_empty() {
        return Err(CliError::Mismatch("cannot plot an empty summary".into()));
    }
    let axes = axes_for(rows, metric);
    let mut svg = String::new();
    let w = &mut svg;
    let _ = writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(w, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        w,
        r#"<text x="{:.1}" y="24" text-anchor="middle" font-family="sans-serif" font-size="16">{}</text>"#,
        MARGIN_LEFT + Axes::plot_w() / 2.0,
        metric.title()
    );
    let (x0, x1, y0, y1) = (MARGIN_LEFT, MARGIN_LEFT + Axes::plot_w(), MARGIN_TOP + Axes::plot_h(), MARGIN_TOP);
    let _ = writeln!(w, r##"<line x1="{x0:.1}" y1="{y0:.1}" x2="{x1:.1}" y2="{y0:.1}" stroke="#333"/>"##);
    let _ = writeln!(w, r##"<line x1="{x0:.1}" y1="{y0:.1}" x2="{x0:.1}" y2="{y1:.1}" stroke="#333"/>"##);
    for &b in &axes.x_ticks {
        let x = axes.x(b);
        let _ = writeln!(
            w,
            r#"<text class="xtick" x="{x:.1}" y="{:.1}" text-anchor="middle" font-family="sans-serif" font-size="12">{b}</text>"#,
            y0 + 18.0
        );
    }
    for i in 0..=4 {
        let v = axes.y_max * i as f64 / 4.0;
        let y = axes.y(v);
        let _ = writeln!(
            w,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end" font-family="sans-serif" font-size="11">{v:.2}</text>"#,
            x0 - 6.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        w,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-family="sans-serif" font-size="13">B</text>"#,
        MARGIN_LEFT + Axes::plot_w() / 2.0,
        HEIGHT - 12.0
    );

    let mut keys: Vec<(String, usize, usize)> = rows.iter().map(series_key).collect();
    keys.dedup();
    let keys: Vec<_> = keys.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
    for (si, key) in keys.iter().enumerate() {
        let color = PALETTE[si % PALETTE.len()];
        let mut pts: Vec<(usize, Spread)> =
            rows.iter().filter(|r| series_key(r) == *key).map(|r| (r.point.b, metric.spread(&r.stats))).collect();
        pts.sort_by_key(|p| p.0);
        let path: Vec<String> = pts.iter().map(|(b, s)| format!("{:.2},{:.2}", axes.x(*b), axes.y(s.mean))).collect();
        let _ =
            writeln!(w, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, path.join(" "));
        for (b, s) in &pts {
            let x = axes.x(*b);
            let _ = writeln!(
                w,
                r#"<line class="whisker" x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="{color}"/>"#,
                axes.y(s.min),
                axes.y(s.max)
            );
            let _ = writeln!(w, r#"<circle cx="{x:.2}" cy="{:.2}" r="3" fill="{color}"/>"#, axes.y(s.mean));
        }
        let ly = MARGIN_TOP + 16.0 * si as f64 + 8.0;
        let lx = x1 + 12.0;
        let _ = writeln!(w, r#"<rect x="{lx:.1}" y="{:.1}" width="10" height="10" fill="{color}"/>"#, ly - 9.0);
        let _ = writeln!(
            w,
            r#"<text x="{:.1}" y="{ly:.1}" font-family="sans-serif" font-size="11">{} K={} C={}</text>"#,
            lx + 14.0,
            key.0,
            key.1,
            key.2
        );
    }
    let _ = writeln!(w, "</svg>");
    Ok(svg)
}

/// Write `fitness.svg`, `epi_nodes.svg` and `dev_steps.svg` into `dir`.
pub fn cmd_plot(rows: &[SummaryRow], dir: &Path) -> Result<Vec<PathBuf>> {
    if rows.is_empty() {
        return Err(CliError::Mismatch("cannot plot an empty summary".into()));
    }
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    Metric::ALL
        .iter()
        .map(|&m| {
            let path = dir.join(format!("{}.svg", m.file_stem()));
            fs::write(&path, render(rows, m)?).map_err(io_err(&path))?;
            Ok(path)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Point;

    fn row(b: usize, mean: f64, min: f64, max: f64) -> SummaryRow {
        let s = Spread { mean, min, max };
        SummaryRow {
            scenario: "static_single".into(),
            point: Point { b, k: 2, c: 0 },
            stats: Aggregate { runs: 3, fitness: s, epi_nodes: s, dev_steps: s },
        }
    }

    #[test]
    fn one_point_one_tick() {
        let svg = render(&[row(3, 0.6, 0.5, 0.7)], Metric::Fitness).unwrap();
        assert_eq!(svg.matches(r#"class="xtick""#).count(), 1);
        assert_eq!(svg, render(&[row(3, 0.6, 0.5, 0.7)], Metric::Fitness).unwrap());
    }

    #[test]
    fn whiskers_span_min_to_max() {
        let rows = [row(1, 0.6, 0.5, 0.7), row(5, 0.4, 0.25, 0.75)];
        let svg = render(&rows, Metric::Fitness).unwrap();
        let axes = axes_for(&rows, Metric::Fitness);
        let expect =
            format!(r#"x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}""#, axes.y(0.25), axes.y(0.75), x = axes.x(5));
        assert!(svg.contains(&expect), "{svg}");
    }

    #[test]
    fn empty_summary_rejected() {
        assert!(render(&[], Metric::Fitness).is_err());
        assert!(cmd_plot(&[], Path::new("unused")).is_err());
    }
}
