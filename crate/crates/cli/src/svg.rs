//! Self-contained polar SVG plots (d = 2): assembled profile overlays and
//! the reference wedge figure. No external assets; fixed styling constants;
//! byte-deterministic output.

use std::fmt::Write as _;

use eigendecay_core::{BranchCase, DecayProfile, WedgeModel};

const PROFILE_COLORS: [&str; 8] = [
    "#1f77b4", "#000000", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf",
];
const GRID_COLOR: &str = "#cccccc";
const AXIS_COLOR: &str = "#888888";
const CURVE_WIDTH: f64 = 0.03;
const HIGHLIGHT_WIDTH: f64 = 0.06;

fn fmt(v: f64) -> String {
    format!("{:.6}", v)
}

fn polyline(points: &[(f64, f64)], color: &str, width: f64, dashed: bool) -> String {
    let mut d = String::new();
    for (i, (x, y)) in points.iter().enumerate() {
        let cmd = if i == 0 { 'M' } else { 'L' };
        let _ = write!(d, "{cmd}{} {} ", fmt(*x), fmt(*y));
    }
    let dash = if dashed {
        " stroke-dasharray=\"0.12 0.06\""
    } else {
        ""
    };
    format!(
        "<path d=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"{}\"{} />\n",
        d.trim_end(),
        color,
        fmt(width),
        dash
    )
}

fn frame(body: &str, extent: f64, title: &str) -> String {
    let s = extent * 1.18;
    let mut out = String::new();
    let _ = write!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"640\" \
         viewBox=\"{} {} {} {}\">\n",
        fmt(-s),
        fmt(-s),
        fmt(2.0 * s),
        fmt(2.0 * s)
    );
    let _ = write!(
        out,
        "<text x=\"{}\" y=\"{}\" font-size=\"{}\" font-family=\"monospace\">{}</text>\n",
        fmt(-s * 0.97),
        fmt(-s * 0.9),
        fmt(s * 0.05),
        title
    );
    // Flip y so the math orientation is up.
    out.push_str("<g transform=\"scale(1,-1)\">\n");
    out.push_str(body);
    out.push_str("</g>\n</svg>\n");
    out
}

fn radial_grid(extent: f64) -> String {
    let mut body = String::new();
    let rings = extent.ceil() as usize;
    for r in 1..=rings {
        let _ = write!(
            body,
            "<circle cx=\"0\" cy=\"0\" r=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"{}\" />\n",
            fmt(r as f64),
            GRID_COLOR,
            fmt(0.01 * extent)
        );
    }
    let _ = write!(
        body,
        "<path d=\"M{} 0 L{} 0 M0 {} L0 {}\" stroke=\"{}\" stroke-width=\"{}\" />\n",
        fmt(-extent),
        fmt(extent),
        fmt(-extent),
        fmt(extent),
        AXIS_COLOR,
        fmt(0.012 * extent)
    );
    body
}

fn profile_points(p: &DecayProfile, unit: f64) -> Vec<(f64, f64)> {
    let mut pts: Vec<(f64, f64)> = Vec::with_capacity(p.len() + 1);
    for i in 0..p.len() {
        let s = p.sigmas()[i];
        if !s.is_finite() {
            continue;
        }
        let w = p.grid().point(i);
        pts.push((s * w[0] / unit, s * w[1] / unit));
    }
    if let Some(&first) = pts.first() {
        pts.push(first); // close the loop
    }
    pts
}

/// Overlay plot of assembled profiles, radial unit = `unit`.
pub fn profiles_svg(profiles: &[&DecayProfile], unit: f64, title: &str) -> String {
    let mut extent: f64 = 1.0;
    for p in profiles {
        for &s in p.sigmas() {
            if s.is_finite() {
                extent = extent.max(s / unit);
            }
        }
    }
    let mut body = radial_grid(extent);
    for (k, p) in profiles.iter().enumerate() {
        let pts = profile_points(p, unit);
        if pts.is_empty() {
            continue;
        }
        let color = PROFILE_COLORS[k % PROFILE_COLORS.len()];
        body.push_str(&polyline(&pts, color, CURVE_WIDTH * extent / 2.0, false));
    }
    frame(&body, extent, title)
}

/// The reference wedge figure: the two smooth arches (cases 1 and 2) in
/// distinct colors, the composite lens (case 3) highlighted, axes in units
/// of ε/2, and the wedge half-angle annotation.
pub fn figure_svg(model: &WedgeModel, n: usize) -> String {
    let unit = model.eps / 2.0;
    let extent = (model.lambda0 + model.eps / 2.0) / unit;
    let sample = |case: BranchCase| -> Vec<(f64, f64)> {
        let mut pts = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let phi = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
            let wd = phi.sin();
            let s = model.branch_sigma(case, wd).expect("valid ω_d") / unit;
            pts.push((s * phi.cos(), s * wd));
        }
        pts
    };
    let mut body = radial_grid(extent);
    body.push_str(&polyline(
        &sample(BranchCase::Case1),
        PROFILE_COLORS[0],
        CURVE_WIDTH * extent / 2.0,
        false,
    ));
    body.push_str(&polyline(
        &sample(BranchCase::Case2),
        PROFILE_COLORS[1],
        CURVE_WIDTH * extent / 2.0,
        false,
    ));
    body.push_str(&polyline(
        &sample(BranchCase::Case3),
        PROFILE_COLORS[2],
        HIGHLIGHT_WIDTH * extent / 2.0,
        true,
    ));
    let sin_psi = model.sin_psi();
    let psi = sin_psi.asin();
    let apex = std::f64::consts::PI - 2.0 * psi;
    let title = format!(
        "lens boundary, unit eps/2, ratio 2*lambda0/eps = {:.4}, sin(psi) = {:.6}, apex angle = pi - 2*psi = {:.6} rad",
        2.0 * model.lambda0 / model.eps,
        sin_psi,
        apex
    );
    // Mark the wedge vertices on the horizontal axis.
    let rho = model.sigma_s_case_c(0.0) / unit;
    let mut marks = String::new();
    for sgn in [1.0f64, -1.0] {
        let _ = write!(
            marks,
            "<circle cx=\"{}\" cy=\"0\" r=\"{}\" fill=\"{}\" />\n",
            fmt(sgn * rho),
            fmt(0.05),
            PROFILE_COLORS[2]
        );
    }
    body.push_str(&marks);
    frame(&body, extent, &title)
}
