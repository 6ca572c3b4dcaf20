//! Sampled member curves of a plane scene, written as CSV, SVG or JSON.

use std::f64::consts::TAU;
use std::fmt::Write as _;

use ivory_core::{Chart, Execution, GalleryScene, NumericPolicy};
use serde::Serialize;

/// Points requested from the sampler per member.
const SAMPLES: usize = 720;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Svg,
    Json,
}

#[derive(Debug, thiserror::Error)]
pub enum EmitError {
    #[error("figures need a plane scene (dimension 3), found dimension {0}")]
    UnsupportedDimension(usize),
    #[error("quadrangles need exactly four parameters, found {0}")]
    QuadrangleArity(usize),
    #[error(transparent)]
    Core(#[from] ivory_core::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Curve {
    pub t: f64,
    pub polylines: Vec<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadrangleData {
    /// Corners `x, y, x′, y′` in chart coordinates.
    pub corners: [[f64; 2]; 4],
    /// `ρ²(x − y′)` and `ρ²(x′ − y)`.
    pub diagonals: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyData {
    pub chart_axis: usize,
    pub radius: f64,
    pub singular_parameters: Vec<f64>,
    pub curves: Vec<Curve>,
    pub quadrangles: Vec<QuadrangleData>,
}

/// The chart `x[axis] = 1`: a coordinate of `Ker p` when `p` has one,
/// otherwise the last coordinate.
fn chart_axis(scene: &GalleryScene) -> usize {
    let p = scene.p.matrix();
    (0..p.nrows())
        .find(|&k| p.column(k).norm() <= 1e-12 && p.row(k).norm() <= 1e-12)
        .unwrap_or(p.nrows() - 1)
}

/// Splits chart points into polylines for curves centred at the chart
/// origin: points are ordered by polar angle, and a polyline ends where the
/// angle jumps by more than a few sampling directions.
fn polylines(pts: Vec<[f64; 2]>) -> Vec<Vec<[f64; 2]>> {
    let gap = 3.0 * TAU / SAMPLES as f64;
    let mut pts: Vec<(f64, [f64; 2])> = pts.into_iter().map(|p| (p[1].atan2(p[0]), p)).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<Vec<[f64; 2]>> = Vec::new();
    let mut prev = f64::NEG_INFINITY;
    for (angle, p) in &pts {
        match out.last_mut() {
            Some(line) if angle - prev <= gap => line.push(*p),
            _ => out.push(vec![*p]),
        }
        prev = *angle;
    }
    if let (Some(first), Some(last)) = (pts.first(), pts.last()) {
        if first.0 + TAU - last.0 <= gap {
            if out.len() > 1 {
                let head = out.remove(0);
                out.last_mut().unwrap().extend(head);
            } else {
                out[0].push(first.1);
            }
        }
    }
    out
}

pub fn family_data(
    scene: &GalleryScene,
    policy: &NumericPolicy,
    ts: &[f64],
    quadrangles: bool,
    radius: f64,
    exec: Execution,
) -> Result<FamilyData, EmitError> {
    let n = scene.ip.dim();
    if n != 3 {
        return Err(EmitError::UnsupportedDimension(n));
    }
    let pen = scene.pencil(policy)?;
    let axis = chart_axis(scene);
    let others: Vec<usize> = (0..3).filter(|&k| k != axis).collect();
    let mut curves = Vec::new();
    for &t in ts {
        let member = pen.member(t)?.quadric;
        let pts: Vec<[f64; 2]> = member
            .sample_points_with(SAMPLES, Chart::Affine(axis), exec)?
            .into_iter()
            .filter_map(|p| p.affine(axis, 1e-12))
            .map(|a| [a[others[0]], a[others[1]]])
            .filter(|a| a[0].hypot(a[1]) <= radius)
            .collect();
        curves.push(Curve {
            t,
            polylines: polylines(pts),
        });
    }
    let mut quads = Vec::new();
    if quadrangles {
        if ts.len() != 4 {
            return Err(EmitError::QuadrangleArity(ts.len()));
        }
        let xy = |v: &nalgebra::DVector<f64>| [v[others[0]], v[others[1]]];
        for q in pen.quadrangles((ts[0], ts[1]), (ts[2], ts[3]), axis)? {
            quads.push(QuadrangleData {
                corners: [xy(&q.x), xy(&q.y), xy(&q.x_prime), xy(&q.y_prime)],
                diagonals: [q.diagonal_xy, q.diagonal_yx],
            });
        }
    }
    Ok(FamilyData {
        chart_axis: axis,
        radius,
        singular_parameters: pen.singular_parameters().to_vec(),
        curves,
        quadrangles: quads,
    })
}

pub fn render(data: &FamilyData, format: Format) -> String {
    match format {
        Format::Csv => to_csv(data),
        Format::Svg => to_svg(data),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(data).expect("family data serializes");
            s.push('\n');
            s
        }
    }
}

pub fn to_csv(data: &FamilyData) -> String {
    let mut s = String::from("kind,t,group,index,x,y,value\n");
    for c in &data.curves {
        for (g, line) in c.polylines.iter().enumerate() {
            for (i, p) in line.iter().enumerate() {
                let _ = writeln!(s, "curve,{},{g},{i},{},{},", c.t, p[0], p[1]);
            }
        }
    }
    for (g, q) in data.quadrangles.iter().enumerate() {
        for (i, p) in q.corners.iter().enumerate() {
            let _ = writeln!(s, "corner,,{g},{i},{},{},", p[0], p[1]);
        }
        for (i, d) in q.diagonals.iter().enumerate() {
            let _ = writeln!(s, "diagonal,,{g},{i},,,{d}");
        }
    }
    s
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

pub fn to_svg(data: &FamilyData) -> String {
    let points = data
        .curves
        .iter()
        .flat_map(|c| c.polylines.iter().flatten())
        .chain(data.quadrangles.iter().flat_map(|q| q.corners.iter()));
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for p in points {
        x0 = x0.min(p[0]);
        x1 = x1.max(p[0]);
        y0 = y0.min(p[1]);
        y1 = y1.max(p[1]);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (-1.0, 1.0, -1.0, 1.0);
    }
    let (w, h) = ((x1 - x0).max(1e-9), (y1 - y0).max(1e-9));
    let (mx, my) = (0.1 * w, 0.1 * h);
    let stroke = 0.004 * w.max(h);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}">"#,
        x0 - mx,
        -y1 - my,
        w + 2.0 * mx,
        h + 2.0 * my
    );
    let sing: Vec<String> = data.singular_parameters.iter().map(|v| v.to_string()).collect();
    let _ = writeln!(s, "<title>singular parameters: {}</title>", sing.join(", "));
    for (k, c) in data.curves.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let _ = writeln!(s, r#"<g data-t="{}" stroke="{color}" fill="none" stroke-width="{stroke}">"#, c.t);
        for line in &c.polylines {
            let pts: Vec<String> = line.iter().map(|p| format!("{},{}", p[0], -p[1])).collect();
            let _ = writeln!(s, r#"<polyline points="{}"/>"#, pts.join(" "));
        }
        s.push_str("</g>\n");
    }
    for q in &data.quadrangles {
        let [x, y, xp, yp] = q.corners;
        let _ = writeln!(
            s,
            r#"<g stroke="black" stroke-dasharray="{d} {d}" stroke-width="{stroke}"><line x1="{}" y1="{}" x2="{}" y2="{}"><title>{}</title></line><line x1="{}" y1="{}" x2="{}" y2="{}"><title>{}</title></line></g>"#,
            x[0], -x[1], yp[0], -yp[1], q.diagonals[0],
            xp[0], -xp[1], y[0], -y[1], q.diagonals[1],
            d = 2.0 * stroke,
        );
    }
    s.push_str("</svg>\n");
    s
}
