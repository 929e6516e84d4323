//! Barycentric communication weights and their minimum-jerk homotopy.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::formation::{Formation, LayeredGraph};
use crate::geometry::{self, GeometryError, Point};
use crate::targets::DesiredPositions;
use crate::AgentId;

/// Solved weights above this negative value are treated as round-off.
pub const NEGATIVE_WEIGHT_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WeightError {
    #[error("blend interval [{t0}, {tf}] is empty")]
    BadInterval { t0: f64, tf: f64 },
    #[error("mentors of agent {agent} are degenerate at initial positions: {source}")]
    DegenerateSimplex { agent: AgentId, source: GeometryError },
    #[error("mentors of agent {agent} are degenerate at final positions: {source}")]
    DegenerateMentorSimplex { agent: AgentId, source: GeometryError },
    #[error("agent {agent} has weight {value:e}; it lies outside its mentor simplex")]
    NegativeWeight { agent: AgentId, value: f64 },
    #[error("no position for agent {0}")]
    MissingPosition(AgentId),
    #[error("agent {agent}: {got} weights for {expected} mentors")]
    Arity { agent: AgentId, expected: usize, got: usize },
}

/// Minimum-jerk blend `10τ³ − 15τ⁴ + 6τ⁵` with `τ = (t − t0)/(tf − t0)`
/// clamped to `[0, 1]`.
pub fn beta(t: f64, t0: f64, tf: f64) -> Result<f64, WeightError> {
    if !(tf > t0) {
        return Err(WeightError::BadInterval { t0, tf });
    }
    if t <= t0 {
        return Ok(0.0);
    }
    if t >= tf {
        return Ok(1.0);
    }
    let tau = (t - t0) / (tf - t0);
    let tau3 = tau * tau * tau;
    Ok(10.0 * tau3 - 15.0 * tau3 * tau + 6.0 * tau3 * tau * tau)
}

/// Clamp round-off negatives to zero and renormalize.
fn sanitize(agent: AgentId, mut w: Vec<f64>) -> Result<Vec<f64>, WeightError> {
    if let Some(&value) = w.iter().find(|v| **v < -NEGATIVE_WEIGHT_TOL) {
        return Err(WeightError::NegativeWeight { agent, value });
    }
    if w.iter().any(|v| *v < 0.0) {
        for v in w.iter_mut() {
            *v = v.max(0.0);
        }
        let s: f64 = w.iter().sum();
        for v in w.iter_mut() {
            *v /= s;
        }
    }
    Ok(w)
}

/// `ω_i`: barycentric coordinates of each mentee's initial position in its
/// mentors' initial simplex.
pub fn initial_weights(
    graph: &LayeredGraph,
    formation: &Formation,
) -> Result<BTreeMap<AgentId, Vec<f64>>, WeightError> {
    let pos = |id: AgentId| formation.position(id).ok_or(WeightError::MissingPosition(id));
    let mut out = BTreeMap::new();
    for (agent, mentors) in &graph.mentors {
        let verts = mentors.iter().map(|m| pos(*m)).collect::<Result<Vec<Point>, _>>()?;
        let w = geometry::barycentric_weights(&verts, &pos(*agent)?)
            .map_err(|source| WeightError::DegenerateSimplex { agent: *agent, source })?;
        out.insert(*agent, sanitize(*agent, w)?);
    }
    Ok(out)
}

/// `ϖ_i`: barycentric coordinates of each mentee's final position in its
/// mentors' final simplex.
pub fn final_weights(
    graph: &LayeredGraph,
    desired: &DesiredPositions,
) -> Result<BTreeMap<AgentId, Vec<f64>>, WeightError> {
    let pos = |id: AgentId| desired.p.get(&id).copied().ok_or(WeightError::MissingPosition(id));
    let mut out = BTreeMap::new();
    for (agent, mentors) in &graph.mentors {
        let verts = mentors.iter().map(|m| pos(*m)).collect::<Result<Vec<Point>, _>>()?;
        let w = geometry::barycentric_weights(&verts, &pos(*agent)?)
            .map_err(|source| WeightError::DegenerateMentorSimplex { agent: *agent, source })?;
        out.insert(*agent, sanitize(*agent, w)?);
    }
    Ok(out)
}

/// Initial and final weights of every cooperative agent plus the blend
/// interval.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSchedule {
    pub omega: BTreeMap<AgentId, Vec<f64>>,
    pub varpi: BTreeMap<AgentId, Vec<f64>>,
    pub t0: f64,
    pub tf: f64,
}

impl WeightSchedule {
    pub fn new(
        omega: BTreeMap<AgentId, Vec<f64>>,
        varpi: BTreeMap<AgentId, Vec<f64>>,
        t0: f64,
        tf: f64,
    ) -> Result<Self, WeightError> {
        if !(tf > t0) {
            return Err(WeightError::BadInterval { t0, tf });
        }
        for (agent, w) in &omega {
            let got = varpi.get(agent).map_or(0, Vec::len);
            if got != w.len() {
                return Err(WeightError::Arity {
                    agent: *agent,
                    expected: w.len(),
                    got,
                });
            }
        }
        Ok(Self { omega, varpi, t0, tf })
    }

    /// Solve both weight tables for a planned graph.
    pub fn plan(
        graph: &LayeredGraph,
        formation: &Formation,
        desired: &DesiredPositions,
        t0: f64,
        tf: f64,
    ) -> Result<Self, WeightError> {
        Self::new(initial_weights(graph, formation)?, final_weights(graph, desired)?, t0, tf)
    }

    pub fn beta(&self, t: f64) -> f64 {
        beta(t, self.t0, self.tf).expect("interval checked on construction")
    }

    /// Weights of `agent` for a given blend value.
    pub fn blend(&self, agent: AgentId, beta: f64) -> Option<Vec<f64>> {
        let omega = self.omega.get(&agent)?;
        let varpi = self.varpi.get(&agent)?;
        Some(blend(omega, varpi, beta))
    }
}

pub(crate) fn blend(omega: &[f64], varpi: &[f64], beta: f64) -> Vec<f64> {
    if beta == 0.0 {
        return omega.to_vec();
    }
    if beta == 1.0 {
        return varpi.to_vec();
    }
    omega
        .iter()
        .zip(varpi)
        .map(|(o, v)| (1.0 - beta) * o + beta * v)
        .collect()
}

/// `w_i(t) = (1 − β(t)) ω_i + β(t) ϖ_i`, and `ϖ_i` once `t > tf`.
pub fn weights_at(schedule: &WeightSchedule, t: f64) -> Result<BTreeMap<AgentId, Vec<f64>>, WeightError> {
    let b = beta(t, schedule.t0, schedule.tf)?;
    Ok(schedule
        .omega
        .iter()
        .map(|(id, omega)| (*id, blend(omega, &schedule.varpi[id], b)))
        .collect())
}
