//! Static SVG figures of descents and experiment summaries, each with a
//! CSV file holding the same data.
//!
//! A configuration panel shows density contours, the Voronoi cells of the
//! initial configuration, initial positions (circles), final positions
//! (squares) and the sensor trajectories. Coverage plots show `H` against
//! the iteration count.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::experiment::ScenarioSummary;
use crate::density::Density;
use crate::error::Result;
use crate::geometry::{voronoi_partition, BoundingBox, ConvexPolygon, Point};
use crate::lloyd::DescentTrace;

/// Resolution of the density grid used for contouring.
pub const CONTOUR_GRID: usize = 200;
pub const CONTOUR_LEVELS: usize = 8;

const SIZE: f64 = 600.0;
const MARGIN: f64 = 40.0;

/// One contour segment at a given density level.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContourSegment {
    pub level: f64,
    pub a: Point,
    pub b: Point,
}

/// Evenly spaced levels strictly between the grid minimum and maximum.
pub fn contour_levels(min: f64, max: f64, count: usize) -> Vec<f64> {
    (1..=count)
        .map(|i| min + (max - min) * i as f64 / (count + 1) as f64)
        .collect()
}

/// Marching squares on an `n × n` node grid spanning the bounding box of
/// `domain`. Segments whose midpoint falls outside the domain are dropped.
pub fn contour_segments<D: Density + ?Sized>(
    field: &D,
    domain: &ConvexPolygon,
    n: usize,
    levels: usize,
) -> Vec<ContourSegment> {
    let bb = domain.bounding_box();
    let node = |i: usize, j: usize| {
        Point::new(
            bb.min.x + bb.width() * i as f64 / (n - 1) as f64,
            bb.min.y + bb.height() * j as f64 / (n - 1) as f64,
        )
    };
    let values: Vec<f64> = (0..n * n)
        .map(|idx| field.eval(node(idx % n, idx / n)))
        .collect();
    let at = |i: usize, j: usize| values[j * n + i];
    let (min, max) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    if max.partial_cmp(&min) != Some(std::cmp::Ordering::Greater) {
        return Vec::new();
    }

    let mut out = Vec::new();
    for level in contour_levels(min, max, levels) {
        for j in 0..n - 1 {
            for i in 0..n - 1 {
                // corners counter-clockwise from lower-left
                let c = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
                let v = c.map(|(a, b)| at(a, b));
                let p = c.map(|(a, b)| node(a, b));
                let case = v
                    .iter()
                    .enumerate()
                    .fold(0u8, |acc, (bit, &x)| acc | (u8::from(x >= level) << bit));
                let cross = |e: usize| {
                    let (s, t) = (e, (e + 1) % 4);
                    p[s].lerp(p[t], (level - v[s]) / (v[t] - v[s]))
                };
                let center_above = v.iter().sum::<f64>() / 4.0 >= level;
                let edges: &[(usize, usize)] = match case {
                    0 | 15 => &[],
                    1 | 14 => &[(3, 0)],
                    2 | 13 => &[(0, 1)],
                    3 | 12 => &[(3, 1)],
                    4 | 11 => &[(1, 2)],
                    6 | 9 => &[(0, 2)],
                    7 | 8 => &[(2, 3)],
                    5 if center_above => &[(0, 1), (2, 3)],
                    5 => &[(3, 0), (1, 2)],
                    10 if center_above => &[(3, 0), (1, 2)],
                    10 => &[(0, 1), (2, 3)],
                    _ => unreachable!(),
                };
                for &(e1, e2) in edges {
                    let (a, b) = (cross(e1), cross(e2));
                    if domain.contains((a + b) * 0.5, 1e-12) {
                        out.push(ContourSegment { level, a, b });
                    }
                }
            }
        }
    }
    out
}

/// Maps world coordinates to SVG pixels (y up).
struct Frame {
    bb: BoundingBox,
    scale: f64,
}

impl Frame {
    fn new(bb: BoundingBox) -> Self {
        let scale = (SIZE - 2.0 * MARGIN) / bb.width().max(bb.height());
        Frame { bb, scale }
    }

    fn map(&self, p: Point) -> (f64, f64) {
        (
            MARGIN + (p.x - self.bb.min.x) * self.scale,
            SIZE - MARGIN - (p.y - self.bb.min.y) * self.scale,
        )
    }

    fn points(&self, pts: impl IntoIterator<Item = Point>) -> String {
        let mut s = String::new();
        for p in pts {
            let (x, y) = self.map(p);
            let _ = write!(s, "{x:.2},{y:.2} ");
        }
        s.trim_end().to_owned()
    }
}

fn svg_open(title: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">\n\
         <title>{title}</title>\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    )
}

/// SVG of one descent.
pub fn configuration_svg<D: Density + ?Sized>(
    trace: &DescentTrace,
    field: &D,
    domain: &ConvexPolygon,
    title: &str,
) -> Result<String> {
    let frame = Frame::new(domain.bounding_box());
    let mut svg = svg_open(title);

    let _ = writeln!(
        svg,
        "<polygon class=\"domain\" points=\"{}\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"/>",
        frame.points(domain.vertices().iter().copied())
    );

    let segments = contour_segments(field, domain, CONTOUR_GRID, CONTOUR_LEVELS);
    let mut levels: Vec<f64> = segments.iter().map(|s| s.level).collect();
    levels.dedup();
    for (li, level) in levels.iter().enumerate() {
        let mut d = String::new();
        for s in segments.iter().filter(|s| s.level == *level) {
            let (ax, ay) = frame.map(s.a);
            let (bx, by) = frame.map(s.b);
            let _ = write!(d, "M{ax:.2} {ay:.2}L{bx:.2} {by:.2}");
        }
        let shade = 200 - (150 * (li + 1) / levels.len().max(1)) as u32;
        let _ = writeln!(
            svg,
            "<path class=\"contour\" data-level=\"{level:.6}\" d=\"{d}\" fill=\"none\" stroke=\"rgb({shade},{shade},255)\" stroke-width=\"0.8\"/>"
        );
    }

    let initial = voronoi_partition(&trace.initial().positions, domain)?;
    for cell in &initial.cells {
        let _ = writeln!(
            svg,
            "<polygon class=\"voronoi\" points=\"{}\" fill=\"none\" stroke=\"gray\" stroke-width=\"1\"/>",
            frame.points(cell.vertices().iter().copied())
        );
    }

    let k = trace.initial().len();
    if trace.iterates.len() > 1 {
        for i in 0..k {
            let _ = writeln!(
                svg,
                "<polyline class=\"trajectory\" points=\"{}\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>",
                frame.points(trace.trajectory(i))
            );
        }
    }
    for p in &trace.initial().positions {
        let (x, y) = frame.map(*p);
        let _ = writeln!(
            svg,
            "<circle class=\"initial\" cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"5\" fill=\"none\" stroke=\"blue\" stroke-width=\"1.5\"/>"
        );
    }
    for p in &trace.last().positions {
        let (x, y) = frame.map(*p);
        let _ = writeln!(
            svg,
            "<rect class=\"final\" x=\"{:.2}\" y=\"{:.2}\" width=\"8\" height=\"8\" fill=\"red\"/>",
            x - 4.0,
            y - 4.0
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Line chart of one or more coverage histories.
pub fn coverage_svg(curves: &[(&str, &[f64])], title: &str) -> String {
    let max_len = curves
        .iter()
        .map(|(_, c)| c.len())
        .max()
        .unwrap_or(1)
        .max(2);
    let (lo, hi) = curves
        .iter()
        .flat_map(|(_, c)| c.iter().copied())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
            (a.min(v), b.max(v))
        });
    let (lo, hi) = if hi > lo {
        (lo, hi)
    } else {
        (lo - 1.0, lo + 1.0)
    };
    let plot_w = SIZE - 2.0 * MARGIN;
    let to_px = |i: usize, v: f64| {
        (
            MARGIN + plot_w * i as f64 / (max_len - 1) as f64,
            SIZE - MARGIN - plot_w * (v - lo) / (hi - lo),
        )
    };
    let colors = ["blue", "red", "green", "black"];
    let mut svg = svg_open(title);
    let _ = writeln!(
        svg,
        "<polyline class=\"axes\" points=\"{m},{m} {m},{b} {r},{b}\" fill=\"none\" stroke=\"black\"/>",
        m = MARGIN,
        b = SIZE - MARGIN,
        r = SIZE - MARGIN
    );
    let _ = writeln!(
        svg,
        "<text x=\"{}\" y=\"{}\" font-size=\"12\">iteration (0..{})</text>",
        SIZE / 2.0 - 40.0,
        SIZE - 10.0,
        max_len - 1
    );
    let _ = writeln!(
        svg,
        "<text x=\"5\" y=\"{}\" font-size=\"12\">H: {lo:.4} .. {hi:.4}</text>",
        MARGIN - 10.0
    );
    for (ci, (label, curve)) in curves.iter().enumerate() {
        let color = colors[ci % colors.len()];
        let mut pts = String::new();
        for (i, &v) in curve.iter().enumerate() {
            let (x, y) = to_px(i, v);
            let _ = write!(pts, "{x:.2},{y:.2} ");
        }
        let _ = writeln!(
            svg,
            "<polyline class=\"coverage\" data-label=\"{label}\" points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>",
            pts.trim_end()
        );
        let _ = writeln!(
            svg,
            "<text x=\"{}\" y=\"{}\" font-size=\"12\" fill=\"{color}\">{label}</text>",
            SIZE - MARGIN - 120.0,
            MARGIN + 15.0 * (ci + 1) as f64
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn write_csv<I, R>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator,
    R::Item: AsRef<[u8]>,
{
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes the panel and coverage figures of one descent, plus CSV duals,
/// as `<dir>/<stem>_*.{svg,csv}`. Returns the written paths.
pub fn emit_plots<D: Density + ?Sized>(
    trace: &DescentTrace,
    field: &D,
    domain: &ConvexPolygon,
    dir: impl AsRef<Path>,
    stem: &str,
) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    let path = |suffix: &str| dir.join(format!("{stem}_{suffix}"));
    let mut written = Vec::new();

    let p = path("panel.svg");
    std::fs::write(&p, configuration_svg(trace, field, domain, stem)?)?;
    written.push(p);

    let p = path("coverage.svg");
    std::fs::write(&p, coverage_svg(&[(stem, &trace.coverage_history)], stem))?;
    written.push(p);

    let p = path("coverage.csv");
    write_csv(
        &p,
        &["iteration", "H"],
        trace
            .coverage_history
            .iter()
            .enumerate()
            .map(|(i, h)| [i.to_string(), h.to_string()]),
    )?;
    written.push(p);

    let k = trace.initial().len();
    let p = path("trajectories.csv");
    write_csv(
        &p,
        &["sensor", "iteration", "x", "y"],
        (0..k).flat_map(|s| {
            trace.trajectory(s).enumerate().map(move |(i, q)| {
                [
                    s.to_string(),
                    i.to_string(),
                    q.x.to_string(),
                    q.y.to_string(),
                ]
            })
        }),
    )?;
    written.push(p);

    let p = path("positions.csv");
    write_csv(
        &p,
        &[
            "sensor",
            "initial_x",
            "initial_y",
            "final_x",
            "final_y",
            "distance",
        ],
        (0..k).map(|s| {
            let (a, b) = (trace.initial().positions[s], trace.last().positions[s]);
            [
                s.to_string(),
                a.x.to_string(),
                a.y.to_string(),
                b.x.to_string(),
                b.y.to_string(),
                trace.per_sensor_distance[s].to_string(),
            ]
        }),
    )?;
    written.push(p);

    let initial = voronoi_partition(&trace.initial().positions, domain)?;
    let p = path("voronoi.csv");
    write_csv(
        &p,
        &["cell", "vertex", "x", "y"],
        initial.cells.iter().enumerate().flat_map(|(c, poly)| {
            poly.vertices().iter().enumerate().map(move |(v, q)| {
                [
                    c.to_string(),
                    v.to_string(),
                    q.x.to_string(),
                    q.y.to_string(),
                ]
            })
        }),
    )?;
    written.push(p);

    let p = path("contours.csv");
    write_csv(
        &p,
        &["level", "x0", "y0", "x1", "y1"],
        contour_segments(field, domain, CONTOUR_GRID, CONTOUR_LEVELS)
            .into_iter()
            .map(|s| {
                [
                    s.level.to_string(),
                    s.a.x.to_string(),
                    s.a.y.to_string(),
                    s.b.x.to_string(),
                    s.b.y.to_string(),
                ]
            }),
    )?;
    written.push(p);

    Ok(written)
}

/// Overlaid coverage curves of several descents (one per label).
pub fn emit_coverage_comparison(
    curves: &[(&str, &[f64])],
    dir: impl AsRef<Path>,
    stem: &str,
) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    let svg = dir.join(format!("{stem}.svg"));
    std::fs::write(&svg, coverage_svg(curves, stem))?;
    let csv_path = dir.join(format!("{stem}.csv"));
    write_csv(
        &csv_path,
        &["label", "iteration", "H"],
        curves.iter().flat_map(|(label, c)| {
            c.iter()
                .enumerate()
                .map(move |(i, h)| [label.to_string(), i.to_string(), h.to_string()])
        }),
    )?;
    Ok(vec![svg, csv_path])
}

/// Bar chart of per-method means (with one-sd whiskers) for initial H,
/// final H and distance per sensor.
pub fn emit_summary_plot(
    summary: &ScenarioSummary,
    dir: impl AsRef<Path>,
    stem: &str,
) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    let metrics = ["initial_H", "final_H", "mean_distance"];
    let colors = ["blue", "orange"];
    let mut svg = svg_open(stem);
    let panel_w = (SIZE - 2.0 * MARGIN) / metrics.len() as f64;
    let mut rows = Vec::new();
    for (mi, name) in metrics.iter().enumerate() {
        let stats: Vec<_> = summary
            .methods
            .iter()
            .map(|m| match mi {
                0 => m.initial_h,
                1 => m.final_h,
                _ => m.mean_distance,
            })
            .collect();
        let top = stats
            .iter()
            .map(|s| s.mean + s.sd)
            .fold(0.0_f64, f64::max)
            .max(f64::MIN_POSITIVE);
        let base = SIZE - MARGIN;
        let height = SIZE - 3.0 * MARGIN;
        let bar_w = panel_w / (stats.len() as f64 + 1.0);
        let x0 = MARGIN + panel_w * mi as f64;
        let _ = writeln!(
            svg,
            "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"12\">{name}</text>",
            x0 + 5.0,
            MARGIN
        );
        for (si, (s, m)) in stats.iter().zip(&summary.methods).enumerate() {
            let h = height * s.mean / top;
            let x = x0 + bar_w * (si as f64 + 0.5);
            let _ = writeln!(
                svg,
                "<rect class=\"bar\" data-method=\"{}\" x=\"{x:.1}\" y=\"{:.1}\" width=\"{:.1}\" height=\"{h:.1}\" fill=\"{}\"/>",
                m.method,
                base - h,
                bar_w * 0.8,
                colors[si % colors.len()]
            );
            let cx = x + bar_w * 0.4;
            let lo = base - height * (s.mean - s.sd).max(0.0) / top;
            let hi = base - height * (s.mean + s.sd) / top;
            let _ = writeln!(
                svg,
                "<line class=\"whisker\" x1=\"{cx:.1}\" y1=\"{lo:.1}\" x2=\"{cx:.1}\" y2=\"{hi:.1}\" stroke=\"black\"/>"
            );
            rows.push([
                name.to_string(),
                m.method.to_string(),
                s.mean.to_string(),
                s.sd.to_string(),
            ]);
        }
    }
    svg.push_str("</svg>\n");
    let svg_path = dir.join(format!("{stem}.svg"));
    std::fs::write(&svg_path, svg)?;
    let csv_path = dir.join(format!("{stem}.csv"));
    write_csv(&csv_path, &["metric", "method", "mean", "sd"], rows)?;
    Ok(vec![svg_path, csv_path])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn levels_are_interior() {
        let l = contour_levels(0.0, 9.0, 2);
        assert_eq!(l, vec![3.0, 6.0]);
    }

    #[test]
    fn circle_contour_has_the_right_radius() {
        // φ = |q − c|² has circular level sets.
        let c = Point::new(0.5, 0.5);
        let f = move |q: Point| q.dist_sq(c);
        let sq = ConvexPolygon::unit_square();
        let segs = contour_segments(&f, &sq, 101, 1);
        assert!(!segs.is_empty());
        let level = segs[0].level;
        for s in &segs {
            for p in [s.a, s.b] {
                assert!((p.dist(c) - level.sqrt()).abs() < 1e-3);
            }
        }
    }

    #[test]
    fn flat_field_has_no_contours() {
        let f = |_: Point| 1.0;
        assert!(contour_segments(&f, &ConvexPolygon::unit_square(), 20, 5).is_empty());
    }
}
