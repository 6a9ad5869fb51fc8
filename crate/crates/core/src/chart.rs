//! Minimal SVG line charts of mean cardinality per cell.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::experiment::CellSummary;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XAxis {
    Size,
    Density,
}

impl FromStr for XAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "size" => Ok(XAxis::Size),
            "density" => Ok(XAxis::Density),
            _ => Err(Error::UnknownToken {
                what: "x axis",
                token: s.to_string(),
            }),
        }
    }
}

/// One plotted line: label and `(x, mean cardinality)` points sorted by x.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

/// Groups cells into series keyed by algorithm. When the cells span several
/// values of the other axis, each value gets its own series.
pub fn series(cells: &[CellSummary], axis: XAxis) -> Vec<Series> {
    let other = |c: &CellSummary| match axis {
        XAxis::Size => c.density.to_string(),
        XAxis::Density => c.n.to_string(),
    };
    let mut others: Vec<String> = cells.iter().map(other).collect();
    others.sort();
    others.dedup();
    let split = others.len() > 1;

    let mut groups: BTreeMap<(crate::algorithms::AlgorithmId, String), Vec<(f64, f64)>> = BTreeMap::new();
    for c in cells {
        let x = match axis {
            XAxis::Size => c.n as f64,
            XAxis::Density => c.density,
        };
        let key = (c.algorithm, if split { other(c) } else { String::new() });
        groups.entry(key).or_default().push((x, c.cardinality.mean));
    }
    groups
        .into_iter()
        .map(|((algo, o), mut points)| {
            points.sort_by(|a, b| a.0.total_cmp(&b.0));
            let label = match (split, axis) {
                (false, _) => algo.to_string(),
                (true, XAxis::Size) => format!("{algo} (density {o})"),
                (true, XAxis::Density) => format!("{algo} (n={o})"),
            };
            Series { label, points }
        })
        .collect()
}

const W: f64 = 720.0;
const H: f64 = 440.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 180.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

fn span(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}

fn label_num(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e9 {
        format!("{}", v as i64)
    } else {
        format!("{v:.3}")
    }
}

pub fn render_svg(cells: &[CellSummary], axis: XAxis) -> Result<String> {
    if cells.is_empty() {
        return Err(Error::Invalid("nothing to plot".into()));
    }
    let lines = series(cells, axis);
    let (x0, x1) = span(lines.iter().flat_map(|s| s.points.iter().map(|p| p.0)));
    let (_, y1) = span(lines.iter().flat_map(|s| s.points.iter().map(|p| p.1)));
    let y0 = 0.0;
    let pw = W - LEFT - RIGHT;
    let ph = H - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| TOP + ph - (y - y0) / (y1 - y0) * ph;

    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#).unwrap();
    let (bx, by) = (LEFT, TOP + ph);
    writeln!(s, r#"<line x1="{bx}" y1="{by}" x2="{}" y2="{by}" stroke="black"/>"#, LEFT + pw).unwrap();
    writeln!(s, r#"<line x1="{bx}" y1="{TOP}" x2="{bx}" y2="{by}" stroke="black"/>"#).unwrap();
    for i in 0..=4 {
        let t = i as f64 / 4.0;
        let xv = x0 + t * (x1 - x0);
        let yv = y0 + t * (y1 - y0);
        writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            sx(xv),
            by + 18.0,
            label_num(xv)
        )
        .unwrap();
        writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#,
            LEFT - 6.0,
            sy(yv) + 4.0,
            label_num((yv * 10.0).round() / 10.0)
        )
        .unwrap();
    }
    let xlabel = match axis {
        XAxis::Size => "graph size (nodes)",
        XAxis::Density => "density",
    };
    writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{xlabel}</text>"#,
        LEFT + pw / 2.0,
        H - 15.0
    )
    .unwrap();
    writeln!(
        s,
        r#"<text x="18" y="{:.1}" text-anchor="middle" transform="rotate(-90 18 {:.1})">mean cardinality</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0
    )
    .unwrap();

    for (i, line) in lines.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        if line.points.len() > 1 {
            let pts: Vec<String> = line
                .points
                .iter()
                .map(|&(x, y)| format!("{:.1},{:.1}", sx(x), sy(y)))
                .collect();
            writeln!(
                s,
                r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
                pts.join(" ")
            )
            .unwrap();
        }
        for &(x, y) in &line.points {
            writeln!(s, r#"<circle cx="{:.1}" cy="{:.1}" r="3" fill="{color}"/>"#, sx(x), sy(y)).unwrap();
        }
        let ly = TOP + 10.0 + 20.0 * i as f64;
        let lx = LEFT + pw + 15.0;
        writeln!(
            s,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#,
            lx + 20.0
        )
        .unwrap();
        writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, lx + 26.0, ly + 4.0, line.label).unwrap();
    }
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn emit_chart(cells: &[CellSummary], axis: XAxis, path: &Path) -> Result<()> {
    let svg = render_svg(cells, axis)?;
    fs::write(path, svg).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::AlgorithmId;
    use crate::experiment::Stats;

    fn cell(n: usize, density: f64, algorithm: AlgorithmId, mean: f64) -> CellSummary {
        let st = Stats::of(&[mean]);
        CellSummary {
            n,
            density,
            algorithm,
            daemon: "central-random".into(),
            init: "all-out".into(),
            trials: 1,
            cardinality: st,
            moves: st,
            rounds_mean: mean,
            converged: 1,
        }
    }

    fn polylines(svg: &str) -> Vec<usize> {
        svg.lines()
            .filter(|l| l.starts_with("<polyline"))
            .map(|l| {
                let pts = l.split("points=\"").nth(1).unwrap();
                pts.trim_end_matches("\"/>").split(' ').count()
            })
            .collect()
    }

    #[test]
    fn two_series_ten_points() {
        let cells: Vec<CellSummary> = (1..=10)
            .flat_map(|i| {
                [
                    cell(i * 100, 0.01, AlgorithmId::Md2is, 10.0 / i as f64),
                    cell(i * 100, 0.01, AlgorithmId::MisCentral, i as f64 * 3.0),
                ]
            })
            .collect();
        let svg = render_svg(&cells, XAxis::Size).unwrap();
        assert_eq!(polylines(&svg), vec![10, 10]);
        assert!(svg.contains(">md2is</text>") && svg.contains(">mis</text>"));
    }

    #[test]
    fn single_cell_has_marker_only() {
        let svg = render_svg(&[cell(100, 0.5, AlgorithmId::Md2is, 1.0)], XAxis::Density).unwrap();
        assert!(polylines(&svg).is_empty());
        assert_eq!(svg.matches("<circle").count(), 1);
    }

    #[test]
    fn empty_input_rejected() {
        assert!(render_svg(&[], XAxis::Size).is_err());
    }

    #[test]
    fn mixed_densities_split_series() {
        let cells = [
            cell(100, 0.1, AlgorithmId::Md2is, 3.0),
            cell(200, 0.1, AlgorithmId::Md2is, 2.0),
            cell(100, 0.2, AlgorithmId::Md2is, 2.0),
        ];
        let s = series(&cells, XAxis::Size);
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].label, "md2is (density 0.1)");
        assert_eq!(s[0].points, vec![(100.0, 3.0), (200.0, 2.0)]);
    }
}
