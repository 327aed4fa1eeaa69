//! Static SVG drawing of the embedded tree against the potential axis.
//!
//! `x` is the first embedding coordinate plus offset, `y` the normalized
//! potential magnitude (high at the top). Edges inside a component take its
//! color; cut edges are grey and dashed. Output depends only on the
//! document.

use std::fmt::Write as _;

use crate::document::SessionDocument;
use crate::error::Result;
use crate::layout::Layout;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const MARGIN: f64 = 50.0;
const CUT_DASH: &str = "4 3";

const PALETTE: [&str; 12] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf", "#393b79", "#637939",
];

pub fn component_color(c: usize) -> String {
    match PALETTE.get(c) {
        Some(hex) => (*hex).to_string(),
        None => {
            let hue = (c as f64 * 137.507_764) % 360.0;
            format!("hsl({hue:.1},65%,45%)")
        }
    }
}

pub fn render_rp(doc: &SessionDocument) -> Result<String> {
    let layout = Layout::from_document(doc)?;
    Ok(render_layout(&layout))
}

pub fn render_layout(layout: &Layout) -> String {
    let xs: Vec<f64> = layout.nodes.iter().map(|n| n.position[0]).collect();
    let (lo, hi) = xs
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
            (lo.min(x), hi.max(x))
        });
    let span = if hi > lo { hi - lo } else { 1.0 };
    let inner_w = WIDTH - 2.0 * MARGIN;
    let inner_h = HEIGHT - 2.0 * MARGIN;
    let px = |x: f64| {
        if hi > lo {
            MARGIN + (x - lo) / span * inner_w
        } else {
            WIDTH / 2.0
        }
    };
    let py = |p: f64| MARGIN + (1.0 - p) * inner_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(
        svg,
        "<title>session {} k={} sigma={}</title>",
        layout.session, layout.k, layout.sigma
    );
    let _ = writeln!(
        svg,
        r##"<rect width="100%" height="100%" fill="#ffffff"/>"##
    );
    let axis_x = MARGIN / 2.0;
    let _ = writeln!(
        svg,
        r##"<line class="axis" x1="{axis_x:.2}" y1="{:.2}" x2="{axis_x:.2}" y2="{:.2}" stroke="#000000" stroke-width="1"/>"##,
        py(0.0),
        py(1.0)
    );
    let _ = writeln!(
        svg,
        r#"<text x="{axis_x:.2}" y="{:.2}" font-size="12" text-anchor="middle">|P|</text>"#,
        py(1.0) - 8.0
    );

    let _ = writeln!(svg, r#"<g class="edges">"#);
    for e in &layout.edges {
        let (a, b) = (&layout.nodes[e.id], &layout.nodes[e.parent]);
        let (x1, y1, x2, y2) = (
            px(a.position[0]),
            py(a.potential),
            px(b.position[0]),
            py(b.potential),
        );
        if e.cut {
            let _ = writeln!(
                svg,
                r##"<line class="edge cut" data-edge="{}" x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke="#999999" stroke-width="1" stroke-dasharray="{CUT_DASH}"/>"##,
                e.id
            );
        } else {
            let _ = writeln!(
                svg,
                r#"<line class="edge" data-edge="{}" x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke="{}" stroke-width="1"/>"#,
                e.id,
                component_color(a.component)
            );
        }
    }
    let _ = writeln!(svg, "</g>");

    let _ = writeln!(svg, r#"<g class="nodes">"#);
    for n in &layout.nodes {
        let r = if n.id == layout.root { 4.5 } else { 2.5 };
        let _ = writeln!(
            svg,
            r#"<circle data-node="{}" cx="{:.2}" cy="{:.2}" r="{r}" fill="{}"/>"#,
            n.id,
            px(n.position[0]),
            py(n.potential),
            component_color(n.component)
        );
    }
    let _ = writeln!(svg, "</g>");
    svg.push_str("</svg>\n");
    svg
}
