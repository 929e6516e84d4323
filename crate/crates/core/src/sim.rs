//! Scenario planning, closed-loop simulation and convergence scoring.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::{self, AgentState, DynamicsError, Gains};
use crate::formation::{self, Formation, GraphError, LayeredGraph};
use crate::geometry::Point;
use crate::setpoint::{self, SetpointError, SetpointField};
use crate::targets::{self, DesiredPositions, LeaderPlacement, TargetError, TargetSet, Zone};
use crate::weights::{self, WeightError, WeightSchedule};
use crate::{AgentId, Role};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("invalid scenario: {0}")]
    Invalid(String),
    #[error("graph build failed: {0}")]
    BuildFailure(#[from] GraphError),
    #[error(transparent)]
    Target(#[from] TargetError),
    #[error(transparent)]
    Weight(#[from] WeightError),
    #[error(transparent)]
    Setpoint(#[from] SetpointError),
    #[error("agent {agent} diverged at t = {time}: {source}")]
    Diverged {
        agent: AgentId,
        time: f64,
        source: DynamicsError,
    },
    #[error("time grids differ: {0}")]
    GridMismatch(String),
}

/// Blend interval, horizon and sampling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    pub t0: f64,
    pub tf: f64,
    pub t_end: f64,
    pub dt: f64,
    /// Logging period; a multiple of `dt`.
    pub output_period: f64,
}

impl Default for TimeConfig {
    fn default() -> Self {
        Self {
            t0: 0.0,
            tf: 15.0,
            t_end: 25.0,
            dt: 0.01,
            output_period: 0.1,
        }
    }
}

impl TimeConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        let all = [self.t0, self.tf, self.t_end, self.dt, self.output_period];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(SimError::Invalid("non-finite time setting".into()));
        }
        if !(self.t0 < self.tf && self.tf <= self.t_end) {
            return Err(SimError::Invalid(format!(
                "need t0 < tf <= t_end, got {} / {} / {}",
                self.t0, self.tf, self.t_end
            )));
        }
        if !(self.dt > 0.0) {
            return Err(SimError::Invalid(format!("dt = {} must be positive", self.dt)));
        }
        let ratio = self.output_period / self.dt;
        if !(ratio >= 1.0 - 1e-9) || (ratio - ratio.round()).abs() > 1e-9 * ratio.max(1.0) {
            return Err(SimError::Invalid(format!(
                "dt = {} does not divide the output period {}",
                self.dt, self.output_period
            )));
        }
        Ok(())
    }

    /// Number of integration ticks from `t0` to `t_end`.
    pub fn ticks(&self) -> usize {
        ((self.t_end - self.t0) / self.dt).round() as usize
    }

    pub fn stride(&self) -> usize {
        ((self.output_period / self.dt).round() as usize).max(1)
    }

    pub fn time_at(&self, tick: usize) -> f64 {
        self.t0 + tick as f64 * self.dt
    }
}

/// Everything needed for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub formation: Formation,
    pub targets: TargetSet,
    pub leader_placement: LeaderPlacement,
    pub gains: Gains,
    pub times: TimeConfig,
    /// Convergence margin as a fraction of the zone size.
    pub margin: f64,
    pub seed: u64,
    /// Blend leader references from `a_i` to `p_i` with `β(t)` instead of
    /// stepping them to `p_i` at `t0`.
    pub leader_blend: bool,
    pub snapshot_times: Vec<f64>,
    pub divergence_limit: f64,
}

impl Scenario {
    pub fn new(formation: Formation, targets: TargetSet) -> Self {
        Self {
            formation,
            targets,
            leader_placement: LeaderPlacement::default(),
            gains: Gains::default(),
            times: TimeConfig::default(),
            margin: 0.10,
            seed: 0,
            leader_blend: false,
            snapshot_times: vec![0.0, 10.0, 25.0],
            divergence_limit: dynamics::DEFAULT_DIVERGENCE_LIMIT,
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        self.times.validate()?;
        if !(self.margin >= 0.0) || !self.margin.is_finite() {
            return Err(SimError::Invalid(format!("margin {} must be non-negative", self.margin)));
        }
        if self.targets.zone.dim() != self.formation.dim() {
            return Err(SimError::Invalid("target zone dimension differs from formation".into()));
        }
        if !(self.divergence_limit > 0.0) {
            return Err(SimError::Invalid("divergence limit must be positive".into()));
        }
        Ok(())
    }
}

/// Graph, final positions and weights for a scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Plan {
    pub graph: LayeredGraph,
    pub leader_p: BTreeMap<AgentId, Point>,
    pub desired: DesiredPositions,
    pub schedule: WeightSchedule,
}

pub fn plan(scenario: &Scenario) -> Result<Plan, SimError> {
    scenario.validate()?;
    let graph = formation::build_actual(&scenario.formation)?;
    let leader_p = targets::leader_final_positions(&scenario.formation, &scenario.targets, &scenario.leader_placement)?;
    let desired = targets::compute_desired(&graph, &scenario.formation, &scenario.targets, &leader_p)?;
    let schedule = WeightSchedule::plan(
        &graph,
        &scenario.formation,
        &desired,
        scenario.times.t0,
        scenario.times.tf,
    )?;
    Ok(Plan {
        graph,
        leader_p,
        desired,
        schedule,
    })
}

/// Logged states, desired positions and convergence results of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimTrace {
    /// Agents in `(layer, id)` order; all per-agent vectors follow it.
    pub agents: Vec<AgentId>,
    pub roles: Vec<Role>,
    pub layers: Vec<usize>,
    pub initial: Vec<Point>,
    pub final_p: Vec<Point>,
    pub times: Vec<f64>,
    /// `states[sample][agent]`.
    pub states: Vec<Vec<AgentState>>,
    /// `desired[sample][agent]`: the reference each agent tracked.
    pub desired: Vec<Vec<Point>>,
    /// Inside the inflated zone at `t_end`, for every agent.
    pub converged: BTreeMap<AgentId, bool>,
    /// Converged share of the cooperative agents.
    pub rate: f64,
    pub evaluated: Vec<AgentId>,
    pub excluded: Vec<AgentId>,
}

impl SimTrace {
    pub fn index_of(&self, id: AgentId) -> Option<usize> {
        self.agents.iter().position(|a| *a == id)
    }

    pub fn final_positions(&self) -> impl Iterator<Item = (AgentId, Point)> + '_ {
        let last = self.states.last().expect("trace has samples");
        self.agents.iter().copied().zip(last.iter().map(|s| s.pos))
    }

    /// Logged sample closest to `t`.
    pub fn sample_near(&self, t: f64) -> usize {
        let mut best = 0;
        for (k, tk) in self.times.iter().enumerate() {
            if (tk - t).abs() < (self.times[best] - t).abs() {
                best = k;
            }
        }
        best
    }

    pub fn unconverged(&self) -> Vec<AgentId> {
        self.evaluated
            .iter()
            .copied()
            .filter(|id| !self.converged[id])
            .collect()
    }
}

/// Whether `position` lies in the zone scaled by `1 + margin` about its
/// centroid.
pub fn convergence_check(position: &Point, zone: &Zone, margin: f64) -> bool {
    zone.contains_scaled(position, 1.0 + margin)
}

pub fn run(scenario: &Scenario) -> Result<SimTrace, SimError> {
    let plan = plan(scenario)?;
    run_plan(scenario, &plan)
}

struct Slot {
    role: Role,
    mentors: Vec<usize>,
    omega: Vec<f64>,
    varpi: Vec<f64>,
    initial: Point,
    target: Point,
}

/// Integrate the closed loop for a prepared plan.
///
/// Every tick computes each agent's reference from the previous tick's
/// positions, then advances all agents one RK4 step. Cooperative agents
/// track the weighted mix of their mentors' actual positions, leaders track
/// their final position, and uncooperative agents stay frozen.
pub fn run_plan(scenario: &Scenario, plan: &Plan) -> Result<SimTrace, SimError> {
    scenario.validate()?;
    let graph = &plan.graph;
    let agents = graph.layered_order();
    let index: BTreeMap<AgentId, usize> = agents.iter().enumerate().map(|(k, id)| (*id, k)).collect();
    let mut layers = vec![0; agents.len()];
    for (l, ids) in graph.layers.iter().enumerate() {
        for id in ids {
            layers[index[id]] = l;
        }
    }
    let slots: Vec<Slot> = agents
        .iter()
        .map(|id| {
            let role = graph.role(*id).expect("graph agent");
            let mentors = graph.mentors_of(*id).iter().map(|m| index[m]).collect();
            let (omega, varpi) = if role == Role::Cooperative {
                (
                    plan.schedule.omega.get(id).cloned().ok_or(SetpointError::MissingWeights(*id))?,
                    plan.schedule.varpi.get(id).cloned().ok_or(SetpointError::MissingWeights(*id))?,
                )
            } else {
                (Vec::new(), Vec::new())
            };
            Ok(Slot {
                role,
                mentors,
                omega,
                varpi,
                initial: scenario.formation.position(*id).ok_or(GraphError::UnknownAgent(*id))?,
                target: plan.desired.p[id],
            })
        })
        .collect::<Result<_, SimError>>()?;

    let times = &scenario.times;
    let ticks = times.ticks();
    let stride = times.stride();
    let mut states: Vec<AgentState> = slots.iter().map(|s| AgentState::at_rest(s.initial)).collect();
    let mut refs: Vec<Point> = slots.iter().map(|s| s.initial).collect();
    let mut log_t = Vec::new();
    let mut log_states = Vec::new();
    let mut log_refs = Vec::new();

    for tick in 0..=ticks {
        let t = times.time_at(tick);
        let b = weights::beta(t, times.t0, times.tf)?;
        for (k, slot) in slots.iter().enumerate() {
            refs[k] = match slot.role {
                Role::Cooperative => {
                    let mut acc = Point::zeros(slot.initial.dim());
                    for (j, m) in slot.mentors.iter().enumerate() {
                        let w = mix(slot.omega[j], slot.varpi[j], b);
                        acc = acc + states[*m].pos * w;
                    }
                    acc
                }
                Role::Boundary if scenario.leader_blend => slot.initial * (1.0 - b) + slot.target * b,
                _ => slot.target,
            };
        }
        if tick % stride == 0 || tick == ticks {
            log_t.push(t);
            log_states.push(states.clone());
            log_refs.push(refs.clone());
        }
        if tick == ticks {
            break;
        }
        for (k, slot) in slots.iter().enumerate() {
            if slot.role == Role::Uncooperative {
                continue;
            }
            states[k] = dynamics::step_with_limit(&states[k], &refs[k], &scenario.gains, times.dt, scenario.divergence_limit)
                .map_err(|source| SimError::Diverged {
                    agent: agents[k],
                    time: t,
                    source,
                })?;
        }
    }

    let zone = &scenario.targets.zone;
    let mut converged = BTreeMap::new();
    let mut evaluated = Vec::new();
    let mut excluded = Vec::new();
    for (k, slot) in slots.iter().enumerate() {
        let ok = convergence_check(&states[k].pos, zone, scenario.margin);
        converged.insert(agents[k], ok);
        match slot.role {
            Role::Cooperative => evaluated.push(agents[k]),
            Role::Uncooperative => excluded.push(agents[k]),
            _ => {}
        }
    }
    evaluated.sort();
    excluded.sort();
    let hits = evaluated.iter().filter(|id| converged[*id]).count();
    let rate = if evaluated.is_empty() {
        1.0
    } else {
        hits as f64 / evaluated.len() as f64
    };

    Ok(SimTrace {
        roles: slots.iter().map(|s| s.role).collect(),
        initial: slots.iter().map(|s| s.initial).collect(),
        final_p: slots.iter().map(|s| s.target).collect(),
        agents,
        layers,
        times: log_t,
        states: log_states,
        desired: log_refs,
        converged,
        rate,
        evaluated,
        excluded,
    })
}

#[inline]
fn mix(omega: f64, varpi: f64, beta: f64) -> f64 {
    if beta == 0.0 {
        omega
    } else if beta == 1.0 {
        varpi
    } else {
        (1.0 - beta) * omega + beta * varpi
    }
}

/// Planned set-point fields on the given times, anchored at the plan's
/// final positions.
pub fn setpoint_series(plan: &Plan, times: &[f64]) -> Result<Vec<SetpointField>, SimError> {
    times
        .iter()
        .map(|t| Ok(setpoint::propagate_setpoints(&plan.graph, &plan.schedule, &plan.desired.p, *t)?))
        .collect()
}

/// Per-agent distance to the planned set-point over time and to the final
/// position at the end of the run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackingReport {
    pub agents: Vec<AgentId>,
    pub times: Vec<f64>,
    /// `errors[agent][sample] = ‖r_i(t) − s_i(t)‖`.
    pub errors: Vec<Vec<f64>>,
    /// `‖r_i(t_end) − p_i‖`.
    pub terminal: BTreeMap<AgentId, f64>,
}

pub fn tracking_error_report(trace: &SimTrace, setpoints: &[SetpointField]) -> Result<TrackingReport, SimError> {
    if setpoints.len() != trace.times.len() {
        return Err(SimError::GridMismatch(format!(
            "{} trace samples vs {} set-point fields",
            trace.times.len(),
            setpoints.len()
        )));
    }
    for (t, f) in trace.times.iter().zip(setpoints) {
        if (t - f.t).abs() > 1e-9 {
            return Err(SimError::GridMismatch(format!("trace time {t} vs set-point time {}", f.t)));
        }
    }
    let errors = trace
        .agents
        .iter()
        .enumerate()
        .map(|(k, id)| {
            trace
                .states
                .iter()
                .zip(setpoints)
                .map(|(row, f)| {
                    let s = f.s.get(id).ok_or_else(|| SimError::GridMismatch(format!("no set-point for agent {id}")))?;
                    Ok(row[k].pos.distance(s))
                })
                .collect::<Result<Vec<f64>, SimError>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    let last = trace.states.last().expect("trace has samples");
    let terminal = trace
        .agents
        .iter()
        .enumerate()
        .map(|(k, id)| (*id, last[k].pos.distance(&trace.final_p[k])))
        .collect();
    Ok(TrackingReport {
        agents: trace.agents.clone(),
        times: trace.times.clone(),
        errors,
        terminal,
    })
}

/// Summary written next to every run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub agents: usize,
    pub boundary: usize,
    pub leading_simplices: usize,
    pub depth: usize,
    pub cooperative: usize,
    pub uncooperative: usize,
    pub core: AgentId,
    pub margin: f64,
    pub t_end: f64,
    pub convergence_rate: f64,
    pub converged: usize,
    pub evaluated: usize,
    pub unconverged_ids: Vec<AgentId>,
    /// Uncooperative agents; never part of the rate.
    pub excluded_ids: Vec<AgentId>,
    pub terminal_errors: BTreeMap<AgentId, f64>,
    pub max_terminal_error: f64,
    /// Cooperative agents whose mentor simplex captured no sample.
    pub empty_capture_ids: Vec<AgentId>,
    /// Samples not captured by any cooperative agent.
    pub uncaptured_samples: usize,
}

impl Metrics {
    pub fn new(scenario: &Scenario, plan: &Plan, trace: &SimTrace) -> Self {
        let g = &plan.graph;
        let last = trace.states.last().expect("trace has samples");
        let terminal_errors: BTreeMap<AgentId, f64> = trace
            .agents
            .iter()
            .enumerate()
            .map(|(k, id)| (*id, last[k].pos.distance(&trace.final_p[k])))
            .collect();
        let max_terminal_error = terminal_errors.values().copied().fold(0.0, f64::max);
        Self {
            agents: g.agent_count(),
            boundary: g.boundary_count(),
            leading_simplices: g.leading_simplices,
            depth: g.depth(),
            cooperative: g.cooperative_count(),
            uncooperative: g.uncooperative_count(),
            core: g.core_id,
            margin: scenario.margin,
            t_end: scenario.times.t_end,
            convergence_rate: trace.rate,
            converged: trace.evaluated.len() - trace.unconverged().len(),
            evaluated: trace.evaluated.len(),
            unconverged_ids: trace.unconverged(),
            excluded_ids: trace.excluded.clone(),
            terminal_errors,
            max_terminal_error,
            empty_capture_ids: plan.desired.empty_capture.clone(),
            uncaptured_samples: plan.desired.uncaptured_samples(scenario.targets.samples.len()),
        }
    }
}
