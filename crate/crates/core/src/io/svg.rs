//! Deterministic SVG rendering of a layout.

use std::fmt::Write;

use crate::complex::{AugmentedDisk, Complex};
use crate::error::LayoutError;
use crate::layout::PlaneLayout;
use crate::minkowski::{mprod, project, MPoint};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvgOptions {
    /// Width and height in pixels.
    pub size: f64,
    /// Blank border, as a fraction of the drawing extent.
    pub margin: f64,
}

impl Default for SvgOptions {
    fn default() -> Self {
        SvgOptions { size: 512.0, margin: 0.05 }
    }
}

fn num(x: f64) -> String {
    let s = format!("{x:.9}");
    if s.trim_start_matches('-').bytes().all(|b| b == b'0' || b == b'.') {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

/// Circle radius of an M-point, `None` for points and imaginary circles.
fn radius(xi: &MPoint) -> Option<f64> {
    if mprod(xi, xi) > 0.0 {
        project(xi).ok().and_then(|wp| wp.radius())
    } else {
        None
    }
}

/// Draws disk faces, folded augmented faces, edges (augmented ones dashed),
/// a circle for every vertex with `α > 0`, a dot for the others, and the
/// apex circle highlighted. Works on disk-only layouts too, in which case
/// only disk simplices are drawn. The y-axis points up.
pub fn render_svg(
    aug: &AugmentedDisk,
    layout: &PlaneLayout,
    mpoints: &[MPoint],
    opts: &SvgOptions,
) -> Result<String, LayoutError> {
    let pos = &layout.positions;
    if pos.is_empty() {
        return Err(LayoutError::Empty);
    }
    if mpoints.len() != pos.len() {
        return Err(LayoutError::SizeMismatch(mpoints.len(), pos.len()));
    }
    let radii: Vec<Option<f64>> = mpoints.iter().map(radius).collect();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for (p, r) in pos.iter().zip(&radii) {
        let r = r.unwrap_or(0.0);
        x0 = x0.min(p[0] - r);
        x1 = x1.max(p[0] + r);
        y0 = y0.min(p[1] - r);
        y1 = y1.max(p[1] + r);
    }
    let extent = (x1 - x0).max(y1 - y0).max(1e-9);
    let pad = opts.margin * extent;
    let (vx, vy, side) = ((x0 + x1) / 2.0 - extent / 2.0 - pad, -(y0 + y1) / 2.0 - extent / 2.0 - pad, extent + 2.0 * pad);
    let stroke = extent * 0.003;
    let dot = extent * 0.008;
    let pt = |v: usize| format!("{},{}", num(pos[v][0]), num(-pos[v][1]));
    let drawn = |vs: &[usize]| vs.iter().all(|&v| v < pos.len());

    let mut s = String::new();
    s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{}\" height=\"{}\" viewBox=\"{} {} {} {}\">",
        num(opts.size),
        num(opts.size),
        num(vx),
        num(vy),
        num(side),
        num(side)
    );
    s.push_str("<g id=\"faces\" stroke=\"none\">\n");
    for (f, t) in aug.faces().iter().enumerate() {
        if !drawn(t) {
            continue;
        }
        let (class, fill, opacity) =
            if aug.is_augmented_face(f) { ("augmented-face", "#d9822b", "0.08") } else { ("disk-face", "#4a7fb5", "0.25") };
        let _ = writeln!(
            s,
            "<polygon class=\"{class}\" points=\"{} {} {}\" fill=\"{fill}\" fill-opacity=\"{opacity}\"/>",
            pt(t[0]),
            pt(t[1]),
            pt(t[2])
        );
    }
    s.push_str("</g>\n");
    let _ = writeln!(s, "<g id=\"edges\" stroke=\"#222222\" stroke-width=\"{}\" fill=\"none\">", num(stroke));
    for (e, [a, b]) in aug.edges().iter().enumerate() {
        if !drawn(&[*a, *b]) {
            continue;
        }
        let dash = if e >= aug.base_edge_count() {
            format!(" class=\"augmented-edge\" stroke-dasharray=\"{} {}\"", num(4.0 * stroke), num(3.0 * stroke))
        } else {
            " class=\"disk-edge\"".to_string()
        };
        let _ = writeln!(
            s,
            "<line{dash} x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>",
            num(pos[*a][0]),
            num(-pos[*a][1]),
            num(pos[*b][0]),
            num(-pos[*b][1])
        );
    }
    s.push_str("</g>\n");
    let apex = aug.apex();
    let _ = writeln!(s, "<g id=\"circles\" stroke=\"#1f5f99\" stroke-width=\"{}\" fill=\"none\">", num(stroke));
    for (v, r) in radii.iter().enumerate() {
        if let (Some(r), true) = (r, v != apex) {
            let _ = writeln!(s, "<circle cx=\"{}\" cy=\"{}\" r=\"{}\"/>", num(pos[v][0]), num(-pos[v][1]), num(*r));
        }
    }
    s.push_str("</g>\n");
    let _ = writeln!(s, "<g id=\"points\" fill=\"#111111\">");
    for (v, r) in radii.iter().enumerate() {
        if r.is_none() && v != apex {
            let _ = writeln!(s, "<circle cx=\"{}\" cy=\"{}\" r=\"{}\"/>", num(pos[v][0]), num(-pos[v][1]), num(dot));
        }
    }
    s.push_str("</g>\n");
    if apex < pos.len() {
        match radii[apex] {
            Some(r) => {
                let _ = writeln!(
                    s,
                    "<circle id=\"apex\" cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"none\" stroke=\"#c0392b\" stroke-width=\"{}\"/>",
                    num(pos[apex][0]),
                    num(-pos[apex][1]),
                    num(r),
                    num(2.0 * stroke)
                );
            }
            None => {
                let _ = writeln!(
                    s,
                    "<circle id=\"apex\" cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"#c0392b\"/>",
                    num(pos[apex][0]),
                    num(-pos[apex][1]),
                    num(dot)
                );
            }
        }
    }
    s.push_str("</svg>\n");
    Ok(s)
}
