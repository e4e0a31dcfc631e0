//! Static SVG plots.
//!
//! Everything is drawn in data coordinates inside a `scale(1,-1)` group,
//! so polyline points are the plotted values themselves.

use std::collections::BTreeMap;
use std::fmt::Write;

use bing_core::bingtree::NodeId;
use bing_core::exact::to_f64;
use bing_core::experiments::{ExperimentReport, NodeRecord};
use bing_core::geometry::to_plane;
use bing_core::{FoldedPath, Side};
use thiserror::Error;

use crate::config::RenderWhat;

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("report has no nodes at depth {0}")]
    DepthAbsent(u64),
    #[error("cannot rebuild node {0}: an ancestor's clasp was not recorded")]
    MissingAncestor(String),
    #[error("report has no nodes")]
    Empty,
    #[error(transparent)]
    Core(#[from] bing_core::Error),
}

const SIZE: f64 = 640.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

struct Bounds {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Bounds {
    fn of(points: impl Iterator<Item = (f64, f64)>) -> Option<Bounds> {
        points.fold(None, |acc, (x, y)| {
            Some(match acc {
                None => Bounds { x0: x, x1: x, y0: y, y1: y },
                Some(b) => Bounds { x0: b.x0.min(x), x1: b.x1.max(x), y0: b.y0.min(y), y1: b.y1.max(y) },
            })
        })
    }

    fn padded(self) -> Bounds {
        let w = (self.x1 - self.x0).max(1e-9);
        let h = (self.y1 - self.y0).max(1e-9);
        let p = 0.05 * w.max(h);
        Bounds { x0: self.x0 - p, x1: self.x1 + p, y0: self.y0 - p, y1: self.y1 + p }
    }

    fn span(&self) -> f64 {
        (self.x1 - self.x0).max(self.y1 - self.y0)
    }
}

fn open(out: &mut String, b: &Bounds, title: &str) {
    let (w, h) = (b.x1 - b.x0, b.y1 - b.y0);
    let height = SIZE * h / w;
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{height:.0}" viewBox="{} {} {} {}">"#,
        b.x0, -b.y1, w, h
    );
    let _ = writeln!(out, "<title>{}</title>", escape(title));
    let _ = writeln!(out, r#"<g transform="scale(1,-1)" fill="none" stroke-width="1.5">"#);
}

fn close(out: &mut String) {
    out.push_str("</g>\n</svg>\n");
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn polyline(out: &mut String, pts: &[(f64, f64)], colour: &str, label: &str) {
    let coords: Vec<String> = pts.iter().map(|(x, y)| format!("{x},{y}")).collect();
    let _ = writeln!(
        out,
        r#"<polyline points="{}" stroke="{colour}" vector-effect="non-scaling-stroke"><title>{}</title></polyline>"#,
        coords.join(" "),
        escape(label)
    );
}

/// Folds the identity along `sigma` using the recorded ancestor clasps.
fn rebuild(rows: &BTreeMap<&NodeId, &NodeRecord>, sigma: &NodeId) -> Result<FoldedPath, RenderError> {
    let mut f = FoldedPath::identity();
    for (k, bit) in sigma.bits().iter().enumerate() {
        let parent = sigma.prefix(k);
        let clasp = rows
            .get(&parent)
            .and_then(|r| r.clasp.as_ref())
            .ok_or_else(|| RenderError::MissingAncestor(sigma.label()))?;
        f.fold_in_place(clasp, Side::from_bit(*bit == 1))?;
    }
    Ok(f)
}

/// Graphs of every recorded function at one depth.
pub fn render_functions(report: &ExperimentReport, depth: u64) -> Result<String, RenderError> {
    let rows: BTreeMap<&NodeId, &NodeRecord> = report.rows.iter().map(|r| (&r.sigma, r)).collect();
    let level: Vec<&NodeRecord> = report.rows.iter().filter(|r| r.sigma.depth() as u64 == depth).collect();
    if level.is_empty() {
        return Err(RenderError::DepthAbsent(depth));
    }
    let mut graphs = Vec::with_capacity(level.len());
    for r in &level {
        let f = rebuild(&rows, &r.sigma)?;
        let pts: Vec<(f64, f64)> = f.vertices().iter().map(|(x, y)| (to_f64(x), to_f64(y))).collect();
        graphs.push((r.sigma.label(), pts));
    }
    let bounds = Bounds::of(graphs.iter().flat_map(|(_, p)| p.iter().copied())).ok_or(RenderError::Empty)?.padded();
    let mut out = String::new();
    open(&mut out, &bounds, &format!("folded paths at depth {depth}"));
    for (i, (label, pts)) in graphs.iter().enumerate() {
        polyline(&mut out, pts, PALETTE[i % PALETTE.len()], label);
    }
    close(&mut out);
    Ok(out)
}

/// Domains as plane points `(c, d)`, parent links, and bullseye circles.
pub fn render_plane_tree(report: &ExperimentReport) -> Result<String, RenderError> {
    let pts: BTreeMap<&NodeId, (f64, f64)> = report
        .rows
        .iter()
        .map(|r| {
            let p = to_plane(&r.domain);
            (&r.sigma, (p.x, p.y))
        })
        .collect();
    let bounds = Bounds::of(pts.values().copied()).ok_or(RenderError::Empty)?.padded();
    let dot = bounds.span() / 400.0;
    let mut out = String::new();
    open(&mut out, &bounds, "plane tree");
    out.push_str("<g stroke=\"#999999\">\n");
    for (sigma, (x, y)) in &pts {
        if let Some((px, py)) = sigma.parent().and_then(|p| pts.get(&p)) {
            let _ = writeln!(out, r#"<line x1="{px}" y1="{py}" x2="{x}" y2="{y}" vector-effect="non-scaling-stroke"/>"#);
        }
    }
    out.push_str("</g>\n<g stroke=\"#d62728\" stroke-opacity=\"0.5\">\n");
    for r in &report.rows {
        if let Some((c, radius)) = &r.bullseye {
            let _ = writeln!(
                out,
                r#"<circle cx="{}" cy="{}" r="{radius}" vector-effect="non-scaling-stroke"><title>{}</title></circle>"#,
                c.x,
                c.y,
                escape(&r.sigma.label())
            );
        }
    }
    out.push_str("</g>\n<g fill=\"#1f77b4\" stroke=\"none\">\n");
    for (sigma, (x, y)) in &pts {
        let _ = writeln!(out, r#"<circle cx="{x}" cy="{y}" r="{dot}"><title>{}</title></circle>"#, escape(&sigma.label()));
    }
    out.push_str("</g>\n");
    close(&mut out);
    Ok(out)
}

pub fn render_svg(report: &ExperimentReport, what: RenderWhat) -> Result<String, RenderError> {
    match what {
        RenderWhat::Functions(depth) => render_functions(report, depth),
        RenderWhat::PlaneTree => render_plane_tree(report),
    }
}
