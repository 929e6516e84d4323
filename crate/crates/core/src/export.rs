//! Text artifacts: graph and weight dumps, trace and set-point CSV, metrics
//! JSON. Every file is written through [`write_atomic`].

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::formation::LayeredGraph;
use crate::geometry::Point;
use crate::setpoint::SetpointField;
use crate::sim::{Metrics, Plan, SimTrace, TrackingReport};
use crate::{AgentId, Role};

/// Write to a temporary file in the target directory, then rename it into
/// place.
pub fn write_atomic(path: impl AsRef<Path>, bytes: &[u8]) -> std::io::Result<()> {
    let path = path.as_ref();
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphRecord {
    pub id: AgentId,
    pub layer: usize,
    pub role: Role,
    pub position: Point,
    pub mentors: Vec<AgentId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphDump {
    pub dim: usize,
    pub core: AgentId,
    pub depth: usize,
    pub leading_simplices: usize,
    pub edges: usize,
    pub agents: Vec<GraphRecord>,
}

pub fn graph_dump(graph: &LayeredGraph, positions: &std::collections::BTreeMap<AgentId, Point>) -> GraphDump {
    let agents = graph
        .layered_order()
        .into_iter()
        .map(|id| GraphRecord {
            id,
            layer: graph.layer_of(id).expect("graph agent"),
            role: graph.role(id).expect("graph agent"),
            position: positions[&id],
            mentors: graph.mentors_of(id).to_vec(),
        })
        .collect();
    GraphDump {
        dim: graph.dim,
        core: graph.core_id,
        depth: graph.depth(),
        leading_simplices: graph.leading_simplices,
        edges: graph.edges.len(),
        agents,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanRecord {
    pub id: AgentId,
    pub layer: usize,
    pub role: Role,
    pub initial: Point,
    #[serde(rename = "final")]
    pub final_p: Point,
    pub mentors: Vec<AgentId>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub varpi: Option<Vec<f64>>,
    pub captured: usize,
}

/// Graph, final positions and both weight tables per agent.
pub fn plan_dump(plan: &Plan, initial: &std::collections::BTreeMap<AgentId, Point>) -> Vec<PlanRecord> {
    let g = &plan.graph;
    g.layered_order()
        .into_iter()
        .map(|id| PlanRecord {
            id,
            layer: g.layer_of(id).expect("graph agent"),
            role: g.role(id).expect("graph agent"),
            initial: initial[&id],
            final_p: plan.desired.p[&id],
            mentors: g.mentors_of(id).to_vec(),
            omega: plan.schedule.omega.get(&id).cloned(),
            varpi: plan.schedule.varpi.get(&id).cloned(),
            captured: plan.desired.captured.get(&id).map_or(0, |c| c.len()),
        })
        .collect()
}

fn axis_names(dim: usize) -> &'static [&'static str] {
    &["x", "y", "z"][..dim]
}

fn push_point(out: &mut String, p: &Point) {
    for c in p.coords() {
        write!(out, ",{c}").expect("string write");
    }
}

/// One row per logged sample and agent.
pub fn trace_csv(trace: &SimTrace) -> String {
    let dim = trace.initial.first().map_or(2, Point::dim);
    let mut out = String::from("time,agent_id,role,layer");
    for a in axis_names(dim) {
        write!(out, ",{a}").expect("string write");
    }
    for a in axis_names(dim) {
        write!(out, ",{a}d").expect("string write");
    }
    out.push_str(",converged_flag\n");
    for (s, t) in trace.times.iter().enumerate() {
        let t = (t * 1e9).round() / 1e9;
        for (k, id) in trace.agents.iter().enumerate() {
            write!(out, "{t},{id},{},{}", trace.roles[k], trace.layers[k]).expect("string write");
            push_point(&mut out, &trace.states[s][k].pos);
            push_point(&mut out, &trace.desired[s][k]);
            writeln!(out, ",{}", u8::from(trace.converged[id])).expect("string write");
        }
    }
    out
}

/// Planned set-points, one row per time and agent.
pub fn setpoints_csv(fields: &[SetpointField]) -> String {
    let dim = fields
        .first()
        .and_then(|f| f.s.values().next())
        .map_or(2, Point::dim);
    let mut out = String::from("time,agent_id");
    for a in axis_names(dim) {
        write!(out, ",s{a}").expect("string write");
    }
    out.push('\n');
    for f in fields {
        let t = (f.t * 1e9).round() / 1e9;
        for (id, p) in &f.s {
            write!(out, "{t},{id}").expect("string write");
            push_point(&mut out, p);
            out.push('\n');
        }
    }
    out
}

/// Distance of every agent to its planned set-point per logged sample.
pub fn tracking_csv(report: &TrackingReport) -> String {
    let mut out = String::from("time,agent_id,error\n");
    for (s, t) in report.times.iter().enumerate() {
        let t = (t * 1e9).round() / 1e9;
        for (k, id) in report.agents.iter().enumerate() {
            writeln!(out, "{t},{id},{}", report.errors[k][s]).expect("string write");
        }
    }
    out
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

pub fn metrics_json(metrics: &Metrics) -> String {
    to_json(metrics)
}
