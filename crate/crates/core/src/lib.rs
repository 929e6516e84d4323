//! Decentralized multi-agent transport over layered feed-forward
//! communication graphs.
//!
//! The pipeline runs in five stages:
//!
//! 1. [`formation`] builds the layered mentor/mentee graph from the initial
//!    positions, optionally clamping declared uncooperative agents.
//! 2. [`targets`] turns a finite target sample set into a final desired
//!    position for every agent.
//! 3. [`weights`] computes initial and final barycentric communication weights
//!    and blends them with a minimum-jerk homotopy.
//! 4. [`setpoint`] propagates the planned set-point field through the graph.
//! 5. [`sim`] integrates the closed-loop fourth-order agent dynamics of
//!    [`dynamics`] and scores convergence against the target zone.
//!
//! Scenario files, generation and export live in [`scenario`], [`generate`],
//! [`export`] and [`svg`].

use std::fmt;

use serde::{Deserialize, Serialize};

pub mod dynamics;
pub mod export;
pub mod formation;
pub mod generate;
pub mod geometry;
pub mod scenario;
pub mod setpoint;
pub mod sim;
pub mod svg;
pub mod targets;
pub mod weights;

pub use dynamics::{AgentState, Gains};
pub use formation::{Formation, LayeredGraph};
pub use geometry::{BarycentricCoords, Point, Simplex};
pub use scenario::ScenarioFile;
pub use setpoint::{CommMatrix, SetpointField};
pub use sim::{Metrics, Plan, Scenario, SimTrace};
pub use targets::{DesiredPositions, TargetSet, Zone};
pub use weights::WeightSchedule;

/// Agent identifier as it appears in scenario files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AgentId(pub u32);

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Role of an agent in the team.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Boundary,
    Core,
    Cooperative,
    Uncooperative,
}

impl Role {
    pub fn as_str(&self) -> &'static str {
        match self {
            Role::Boundary => "boundary",
            Role::Core => "core",
            Role::Cooperative => "cooperative",
            Role::Uncooperative => "uncooperative",
        }
    }

    /// Agents whose desired position is clamped to a constant.
    pub fn is_source(&self) -> bool {
        !matches!(self, Role::Cooperative)
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Role {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "boundary" => Ok(Role::Boundary),
            "core" => Ok(Role::Core),
            "cooperative" => Ok(Role::Cooperative),
            "uncooperative" => Ok(Role::Uncooperative),
            other => Err(format!("unknown role `{other}`")),
        }
    }
}
