//! Static SVG drawings of one or two curves and their correspondences.
//!
//! Output depends only on the inputs: coordinates are printed with fixed
//! precision and elements are emitted in a fixed order.

use std::fmt::Write;

use crate::curve::{Node, SbvCurve};
use crate::error::{Error, Result};

const WIDTH: f64 = 800.0;
const MARGIN: f64 = 0.05;

#[derive(Debug, Clone, Default)]
pub struct PlotInput<'a> {
    pub curve1: Option<&'a SbvCurve>,
    pub curve2: Option<&'a SbvCurve>,
    /// Correspondence chords drawn between matched points.
    pub chords: &'a [(Vec<f64>, Vec<f64>)],
}

/// Graph `t ↦ c(t)₀` of the first coordinate as a planar curve.
pub fn profile(c: &SbvCurve) -> SbvCurve {
    let nodes = c
        .nodes()
        .iter()
        .map(|n| Node::jump(n.t, vec![n.t, n.left[0]], vec![n.t, n.right[0]]))
        .collect();
    SbvCurve::from_raw(2, nodes)
}

struct Frame {
    x0: f64,
    y1: f64,
    scale: f64,
    height: f64,
}

impl Frame {
    fn new(points: &[[f64; 2]]) -> Frame {
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for p in points {
            x0 = x0.min(p[0]);
            x1 = x1.max(p[0]);
            y0 = y0.min(p[1]);
            y1 = y1.max(p[1]);
        }
        if !x0.is_finite() {
            (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
        }
        let mut w = x1 - x0;
        let mut h = y1 - y0;
        if w == 0.0 && h == 0.0 {
            w = 1.0;
            h = 1.0;
        }
        let span = w.max(h);
        // degenerate extents get a margin relative to the other axis
        let (mx, my) = (MARGIN * w.max(span * 0.1), MARGIN * h.max(span * 0.1));
        let (x0, x1, y0, y1) = (x0 - mx, x1 + mx, y0 - my, y1 + my);
        let scale = WIDTH / (x1 - x0);
        Frame {
            x0,
            y1,
            scale,
            height: (y1 - y0) * scale,
        }
    }

    fn map(&self, p: &[f64]) -> (f64, f64) {
        ((p[0] - self.x0) * self.scale, (self.y1 - p[1]) * self.scale)
    }
}

fn planar(c: &SbvCurve) -> Vec<[f64; 2]> {
    c.nodes()
        .iter()
        .flat_map(|n| [[n.left[0], n.left[1]], [n.right[0], n.right[1]]])
        .collect()
}

fn draw_curve(out: &mut String, frame: &Frame, c: &SbvCurve, class: &str, style: &str) {
    let mut run: Vec<(f64, f64)> = Vec::new();
    let mut jumps: Vec<((f64, f64), (f64, f64))> = Vec::new();
    let flush = |out: &mut String, run: &mut Vec<(f64, f64)>| {
        if run.is_empty() {
            return;
        }
        let pts: Vec<String> = run.iter().map(|(x, y)| format!("{x:.4},{y:.4}")).collect();
        let _ = writeln!(
            out,
            r#"  <polyline class="{class}" points="{}" fill="none" {style}/>"#,
            pts.join(" ")
        );
        run.clear();
    };
    for n in c.nodes() {
        let l = frame.map(&n.left);
        run.push(l);
        if n.is_jump() {
            flush(out, &mut run);
            let r = frame.map(&n.right);
            jumps.push((l, r));
            run.push(r);
        }
    }
    if run.len() > 1 || jumps.is_empty() {
        flush(out, &mut run);
    }
    for ((x1, y1), (x2, y2)) in jumps {
        let _ = writeln!(
            out,
            r#"  <line class="jump" x1="{x1:.4}" y1="{y1:.4}" x2="{x2:.4}" y2="{y2:.4}" stroke="black" stroke-width="1" stroke-dasharray="1 3"/>"#
        );
    }
}

/// Renders the first two coordinates of the given curves.
pub fn render_svg(input: &PlotInput) -> Result<String> {
    let curves: Vec<&SbvCurve> = input.curve1.iter().chain(input.curve2.iter()).copied().collect();
    for c in &curves {
        if c.dimension() < 2 {
            return Err(Error::InvalidInput(
                "plotting needs dimension at least 2; use the profile view".into(),
            ));
        }
    }
    let mut points: Vec<[f64; 2]> = curves.iter().flat_map(|c| planar(c)).collect();
    for (p, q) in input.chords {
        if p.len() < 2 || q.len() < 2 {
            return Err(Error::InvalidInput("chord endpoints need two coordinates".into()));
        }
        points.push([p[0], p[1]]);
        points.push([q[0], q[1]]);
    }
    let frame = Frame::new(&points);
    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.4} {h:.4}">"#,
        w = WIDTH,
        h = frame.height
    );
    for (p, q) in input.chords {
        let (x1, y1) = frame.map(p);
        let (x2, y2) = frame.map(q);
        let _ = writeln!(
            out,
            r##"  <line class="chord" x1="{x1:.4}" y1="{y1:.4}" x2="{x2:.4}" y2="{y2:.4}" stroke="#999999" stroke-width="0.5"/>"##
        );
    }
    if let Some(c) = input.curve1 {
        draw_curve(&mut out, &frame, c, "curve1", r#"stroke="black" stroke-width="2""#);
    }
    if let Some(c) = input.curve2 {
        draw_curve(
            &mut out,
            &frame,
            c,
            "curve2",
            r##"stroke="#1f5fbf" stroke-width="2" stroke-dasharray="8 4""##,
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}
