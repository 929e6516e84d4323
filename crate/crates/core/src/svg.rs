//! SVG figures of the formation graph and of simulation snapshots. 3-D
//! scenes are drawn in their xy projection.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::formation::LayeredGraph;
use crate::geometry::Point;
use crate::sim::SimTrace;
use crate::targets::{TargetSet, Zone};
use crate::{AgentId, Role};

const SIZE: f64 = 800.0;
const PAD: f64 = 40.0;

fn color(role: Role) -> &'static str {
    match role {
        Role::Boundary => "#d62728",
        Role::Core => "#9467bd",
        Role::Cooperative => "#1f77b4",
        Role::Uncooperative => "#222222",
    }
}

struct Frame {
    lo: (f64, f64),
    scale: f64,
}

impl Frame {
    fn fit<'a>(points: impl Iterator<Item = &'a Point>) -> Self {
        let (mut x0, mut y0, mut x1, mut y1) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in points {
            x0 = x0.min(p.x());
            y0 = y0.min(p.y());
            x1 = x1.max(p.x());
            y1 = y1.max(p.y());
        }
        if !x0.is_finite() {
            return Self { lo: (0.0, 0.0), scale: 1.0 };
        }
        let span = (x1 - x0).max(y1 - y0).max(1e-9);
        Self {
            lo: (x0, y0),
            scale: (SIZE - 2.0 * PAD) / span,
        }
    }

    fn map(&self, p: &Point) -> (f64, f64) {
        (
            PAD + (p.x() - self.lo.0) * self.scale,
            SIZE - PAD - (p.y() - self.lo.1) * self.scale,
        )
    }
}

fn header(out: &mut String, title: &str) {
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    )
    .unwrap();
    writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(out, r#"<text x="{PAD}" y="24" font-family="sans-serif" font-size="16">{title}</text>"#).unwrap();
}

fn polygon(out: &mut String, f: &Frame, verts: &[Point], style: &str) {
    let pts: Vec<String> = verts
        .iter()
        .map(|v| {
            let (x, y) = f.map(v);
            format!("{x:.2},{y:.2}")
        })
        .collect();
    writeln!(out, r#"<polygon points="{}" {style}/>"#, pts.join(" ")).unwrap();
}

fn zone_outline(zone: &Zone, factor: f64) -> Vec<Point> {
    let verts = zone.scaled_vertices(factor);
    if zone.dim() == 2 {
        return verts;
    }
    let flat: Vec<Point> = verts.iter().map(|v| Point::xy(v.x(), v.y())).collect();
    match crate::geometry::convex_hull(&flat) {
        Ok(ring) => ring.into_iter().map(|k| flat[k]).collect(),
        Err(_) => flat,
    }
}

fn draw_zone(out: &mut String, f: &Frame, zone: &Zone, margin: Option<f64>) {
    polygon(out, f, &zone_outline(zone, 1.0), r##"fill="#2ca02c" fill-opacity="0.12" stroke="#2ca02c" stroke-width="1.5""##);
    if let Some(m) = margin {
        polygon(
            out,
            f,
            &zone_outline(zone, 1.0 + m),
            r##"fill="none" stroke="#2ca02c" stroke-width="1" stroke-dasharray="6 4""##,
        );
    }
}

fn draw_samples(out: &mut String, f: &Frame, samples: &[Point]) {
    for s in samples {
        let (x, y) = f.map(s);
        writeln!(out, r##"<circle cx="{x:.2}" cy="{y:.2}" r="1.5" fill="#888888"/>"##).unwrap();
    }
}

fn draw_edges(out: &mut String, f: &Frame, graph: &LayeredGraph, pos: &BTreeMap<AgentId, Point>) {
    for (mentor, mentee) in &graph.edges {
        let (x1, y1) = f.map(&pos[mentor]);
        let (x2, y2) = f.map(&pos[mentee]);
        writeln!(
            out,
            r##"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke="#999999" stroke-width="0.6"/>"##
        )
        .unwrap();
    }
}

fn draw_agent(out: &mut String, f: &Frame, id: AgentId, role: Role, p: &Point, flagged: bool) {
    let (x, y) = f.map(p);
    let stroke = if flagged { r##" stroke="#ff7f0e" stroke-width="2""## } else { "" };
    match role {
        Role::Uncooperative => writeln!(
            out,
            r#"<rect x="{:.2}" y="{:.2}" width="8" height="8" fill="{}"{stroke}><title>{id}</title></rect>"#,
            x - 4.0,
            y - 4.0,
            color(role)
        ),
        _ => writeln!(
            out,
            r#"<circle cx="{x:.2}" cy="{y:.2}" r="4" fill="{}"{stroke}><title>{id}</title></circle>"#,
            color(role)
        ),
    }
    .unwrap();
}

fn legend(out: &mut String) {
    for (k, role) in [Role::Boundary, Role::Core, Role::Cooperative, Role::Uncooperative].iter().enumerate() {
        let y = 44.0 + 16.0 * k as f64;
        writeln!(
            out,
            r#"<circle cx="{}" cy="{y}" r="4" fill="{}"/><text x="{}" y="{}" font-family="sans-serif" font-size="12">{role}</text>"#,
            SIZE - 130.0,
            color(*role),
            SIZE - 120.0,
            y + 4.0
        )
        .unwrap();
    }
}

/// Formation at its initial positions with mentor edges.
pub fn graph_svg(graph: &LayeredGraph, positions: &BTreeMap<AgentId, Point>, targets: Option<&TargetSet>) -> String {
    let mut pts: Vec<&Point> = positions.values().collect();
    if let Some(t) = targets {
        pts.extend(t.zone.vertices());
    }
    let frame = Frame::fit(pts.into_iter());
    let mut out = String::new();
    header(
        &mut out,
        &format!("formation graph: {} agents, depth {}", graph.agent_count(), graph.depth()),
    );
    if let Some(t) = targets {
        draw_zone(&mut out, &frame, &t.zone, None);
        draw_samples(&mut out, &frame, &t.samples);
    }
    draw_edges(&mut out, &frame, graph, positions);
    for id in graph.layered_order() {
        draw_agent(&mut out, &frame, id, graph.role(id).expect("graph agent"), &positions[&id], false);
    }
    legend(&mut out);
    out.push_str("</svg>\n");
    out
}

/// Agents at logged sample `sample`, with edges drawn between current
/// positions, the zone, its inflated outline and the target samples.
/// Unconverged cooperative agents are outlined.
pub fn snapshot_svg(trace: &SimTrace, sample: usize, graph: &LayeredGraph, targets: &TargetSet, margin: f64) -> String {
    let row = &trace.states[sample];
    let pos: BTreeMap<AgentId, Point> = trace.agents.iter().copied().zip(row.iter().map(|s| s.pos)).collect();
    let frame = Frame::fit(trace.initial.iter().chain(&trace.final_p).chain(targets.zone.vertices()));
    let mut out = String::new();
    header(&mut out, &format!("t = {:.2} s", trace.times[sample]));
    draw_zone(&mut out, &frame, &targets.zone, Some(margin));
    draw_samples(&mut out, &frame, &targets.samples);
    draw_edges(&mut out, &frame, graph, &pos);
    let last = sample + 1 == trace.times.len();
    for (k, id) in trace.agents.iter().enumerate() {
        let flagged = last && trace.roles[k] == Role::Cooperative && !trace.converged[id];
        draw_agent(&mut out, &frame, *id, trace.roles[k], &pos[id], flagged);
    }
    legend(&mut out);
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frame_flips_y_and_fits() {
        let pts = [Point::xy(0.0, 0.0), Point::xy(2.0, 1.0)];
        let f = Frame::fit(pts.iter());
        assert_eq!(f.map(&pts[0]), (PAD, SIZE - PAD));
        let (x, y) = f.map(&pts[1]);
        assert!((x - (SIZE - PAD)).abs() < 1e-9);
        assert!((y - (SIZE - PAD - (SIZE - 2.0 * PAD) / 2.0)).abs() < 1e-9);
    }
}
