//! Fourth-order agent model `r⁗ = v` under the tracking law
//! `v = −k1 r⃛ − k2 r̈ − k3 ṙ + k4 (r_d − r)`.
//!
//! Coordinates never mix: each axis is an independent quadruple integrator.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::Point;

/// Default bound on the state norm before a run is declared diverged.
pub const DEFAULT_DIVERGENCE_LIMIT: f64 = 1e6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("state norm {norm:e} exceeds divergence limit {limit:e}")]
    Diverged { norm: f64, limit: f64 },
    #[error("time step {0} must be positive")]
    BadStep(f64),
}

/// Tracking gains; the defaults place all four closed-loop poles at −2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Gains {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub k4: f64,
}

impl Default for Gains {
    fn default() -> Self {
        Self {
            k1: 8.0,
            k2: 24.0,
            k3: 32.0,
            k4: 16.0,
        }
    }
}

/// Routh–Hurwitz test for `s⁴ + k1 s³ + k2 s² + k3 s + k4`.
pub fn check_hurwitz(g: &Gains) -> bool {
    let Gains { k1, k2, k3, k4 } = *g;
    k1 > 0.0 && k2 > 0.0 && k3 > 0.0 && k4 > 0.0 && k1 * k2 > k3 && (k1 * k2 - k3) * k3 > k1 * k1 * k4
}

/// Position and its first three derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgentState {
    pub pos: Point,
    pub vel: Point,
    pub acc: Point,
    pub jerk: Point,
}

impl AgentState {
    pub fn at_rest(pos: Point) -> Self {
        let zero = Point::zeros(pos.dim());
        Self {
            pos,
            vel: zero,
            acc: zero,
            jerk: zero,
        }
    }

    pub fn dim(&self) -> usize {
        self.pos.dim()
    }

    /// Euclidean norm of the stacked state `z`.
    pub fn norm(&self) -> f64 {
        (self.pos.dot(&self.pos) + self.vel.dot(&self.vel) + self.acc.dot(&self.acc) + self.jerk.dot(&self.jerk)).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.pos.is_finite() && self.vel.is_finite() && self.acc.is_finite() && self.jerk.is_finite()
    }

    fn axis(&self, k: usize) -> [f64; 4] {
        [
            self.pos.coords()[k],
            self.vel.coords()[k],
            self.acc.coords()[k],
            self.jerk.coords()[k],
        ]
    }

    fn set_axis(&mut self, k: usize, z: [f64; 4]) {
        self.pos.coords_mut()[k] = z[0];
        self.vel.coords_mut()[k] = z[1];
        self.acc.coords_mut()[k] = z[2];
        self.jerk.coords_mut()[k] = z[3];
    }
}

/// Snap command for the current state and desired position.
pub fn virtual_control(state: &AgentState, r_d: &Point, gains: &Gains) -> Point {
    let mut v = Point::zeros(state.dim());
    for k in 0..state.dim() {
        v.coords_mut()[k] = axis_control(state.axis(k), r_d.coords()[k], gains);
    }
    v
}

#[inline]
fn axis_control(z: [f64; 4], r_d: f64, g: &Gains) -> f64 {
    -g.k1 * z[3] - g.k2 * z[2] - g.k3 * z[1] + g.k4 * (r_d - z[0])
}

#[inline]
fn axis_rhs(z: [f64; 4], r_d: f64, g: &Gains) -> [f64; 4] {
    [z[1], z[2], z[3], axis_control(z, r_d, g)]
}

fn rk4_axis(z: [f64; 4], r_d: f64, g: &Gains, dt: f64) -> [f64; 4] {
    let add = |a: [f64; 4], b: [f64; 4], h: f64| [a[0] + h * b[0], a[1] + h * b[1], a[2] + h * b[2], a[3] + h * b[3]];
    let k1 = axis_rhs(z, r_d, g);
    let k2 = axis_rhs(add(z, k1, dt / 2.0), r_d, g);
    let k3 = axis_rhs(add(z, k2, dt / 2.0), r_d, g);
    let k4 = axis_rhs(add(z, k3, dt), r_d, g);
    let mut out = z;
    for i in 0..4 {
        out[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

/// One classical RK4 step with `r_d` held over the step.
pub fn step(state: &AgentState, r_d: &Point, gains: &Gains, dt: f64) -> Result<AgentState, DynamicsError> {
    step_with_limit(state, r_d, gains, dt, DEFAULT_DIVERGENCE_LIMIT)
}

pub fn step_with_limit(
    state: &AgentState,
    r_d: &Point,
    gains: &Gains,
    dt: f64,
    limit: f64,
) -> Result<AgentState, DynamicsError> {
    if !(dt > 0.0) {
        return Err(DynamicsError::BadStep(dt));
    }
    let mut next = *state;
    for k in 0..state.dim() {
        next.set_axis(k, rk4_axis(state.axis(k), r_d.coords()[k], gains, dt));
    }
    let norm = next.norm();
    if !(norm <= limit) {
        return Err(DynamicsError::Diverged { norm, limit });
    }
    Ok(next)
}
