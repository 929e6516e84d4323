//! Self-describing TOML scenario files.
//!
//! ```toml
//! dimension = 2
//! seed = 7
//! margin = 0.1
//!
//! [times]
//! t0 = 0.0
//! tf = 15.0
//! t_end = 25.0
//! dt = 0.01
//! output_period = 0.1
//!
//! [gains]
//! k1 = 8.0
//! k2 = 24.0
//! k3 = 32.0
//! k4 = 16.0
//!
//! [targets]
//! zone = [[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]]
//! grid_spacing = 0.25        # or: samples = [[x, y], ...]
//!
//! [leader_final]
//! mode = "generated"         # or "explicit" with positions = [{ id = 1, position = [x, y] }, ...]
//! scale = 1.1
//!
//! [[agents]]
//! id = 1
//! position = [-10.0, 0.0]
//! role = "boundary"          # optional: boundary | core | cooperative | uncooperative
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::{self, Gains};
use crate::formation::{Formation, GraphError};
use crate::geometry::Point;
use crate::sim::{Scenario, SimError, TimeConfig};
use crate::targets::{LeaderPlacement, TargetError, TargetSet, Zone};
use crate::{AgentId, Role};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("parse error{}: {message}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Parse { line: Option<usize>, message: String },
    #[error("agent {agent}: unknown role tag `{tag}`")]
    BadRole { agent: AgentId, tag: String },
    #[error("invalid scenario: {0}")]
    Invalid(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Target(#[from] TargetError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

fn default_margin() -> f64 {
    0.10
}

fn is_default<T: Default + PartialEq>(v: &T) -> bool {
    *v == T::default()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub dimension: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_margin")]
    pub margin: f64,
    #[serde(default)]
    pub times: TimeConfig,
    #[serde(default)]
    pub gains: Gains,
    #[serde(default, skip_serializing_if = "is_default")]
    pub output: OutputSection,
    pub targets: TargetsSection,
    #[serde(default)]
    pub leader_final: LeaderFinalSection,
    pub agents: Vec<AgentEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_snapshots")]
    pub snapshot_times: Vec<f64>,
    #[serde(default)]
    pub leader_blend: bool,
    #[serde(default = "default_divergence")]
    pub divergence_limit: f64,
}

fn default_snapshots() -> Vec<f64> {
    vec![0.0, 10.0, 25.0]
}

fn default_divergence() -> f64 {
    dynamics::DEFAULT_DIVERGENCE_LIMIT
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            snapshot_times: default_snapshots(),
            leader_blend: false,
            divergence_limit: default_divergence(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetsSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zone: Option<Vec<Point>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<Vec<Point>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_spacing: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LeaderMode {
    Generated,
    Explicit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LeaderFinalSection {
    pub mode: LeaderMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub positions: Option<Vec<LeaderEntry>>,
}

impl Default for LeaderFinalSection {
    fn default() -> Self {
        Self {
            mode: LeaderMode::Generated,
            scale: Some(1.1),
            positions: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LeaderEntry {
    pub id: AgentId,
    pub position: Point,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentEntry {
    pub id: AgentId,
    pub position: Point,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub role: Option<String>,
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].bytes().filter(|b| *b == b'\n').count() + 1
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<Self, ScenarioError> {
        toml::from_str(text).map_err(|e| ScenarioError::Parse {
            line: e.span().map(|s| line_of(text, s.start)),
            message: e.message().to_string(),
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ScenarioError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario serializes to TOML")
    }

    /// Role tags after validation.
    pub fn roles(&self) -> Result<BTreeMap<AgentId, Option<Role>>, ScenarioError> {
        self.agents
            .iter()
            .map(|a| {
                let role = match &a.role {
                    None => None,
                    Some(tag) => Some(tag.parse::<Role>().map_err(|_| ScenarioError::BadRole {
                        agent: a.id,
                        tag: tag.clone(),
                    })?),
                };
                Ok((a.id, role))
            })
            .collect()
    }

    pub fn target_set(&self) -> Result<TargetSet, ScenarioError> {
        let t = &self.targets;
        let zone = t.zone.clone().map(Zone::new).transpose()?;
        match (&t.samples, t.grid_spacing, zone) {
            (Some(_), Some(_), _) => Err(ScenarioError::Invalid(
                "targets: give either samples or grid_spacing, not both".into(),
            )),
            (Some(samples), None, zone) => Ok(TargetSet::new(samples.clone(), zone)?),
            (None, Some(spacing), Some(zone)) => Ok(TargetSet::grid(zone, spacing)?),
            (None, Some(_), None) => Err(ScenarioError::Invalid("targets: grid_spacing needs a zone".into())),
            (None, None, _) => Err(ScenarioError::Invalid("targets: no samples and no grid_spacing".into())),
        }
    }

    pub fn formation(&self, center: Point) -> Result<Formation, ScenarioError> {
        let roles = self.roles()?;
        let mut formation = Formation::new(
            self.dimension,
            self.agents.iter().map(|a| (a.id, a.position)),
            center,
        )?;
        let tagged = |r: Role| -> Vec<AgentId> {
            roles
                .iter()
                .filter(|(_, t)| **t == Some(r))
                .map(|(id, _)| *id)
                .collect()
        };
        let boundary = tagged(Role::Boundary);
        if !boundary.is_empty() {
            formation = formation.with_boundary(boundary)?;
        } else if let Some(id) = tagged(Role::Cooperative).into_iter().find(|id| formation.is_boundary(*id)) {
            return Err(ScenarioError::Invalid(format!(
                "agent {id} is tagged cooperative but is a hull vertex"
            )));
        }
        formation = formation.with_uncooperative(tagged(Role::Uncooperative))?;
        match tagged(Role::Core).as_slice() {
            [] => {}
            [id] => formation = formation.with_core(*id)?,
            many => {
                return Err(ScenarioError::Invalid(format!("several agents tagged core: {many:?}")));
            }
        }
        Ok(formation)
    }

    pub fn leader_placement(&self) -> Result<LeaderPlacement, ScenarioError> {
        let lf = &self.leader_final;
        match lf.mode {
            LeaderMode::Generated => {
                if lf.positions.is_some() {
                    return Err(ScenarioError::Invalid("leader_final: positions given in generated mode".into()));
                }
                Ok(LeaderPlacement::Generated {
                    scale: lf.scale.unwrap_or(1.1),
                })
            }
            LeaderMode::Explicit => {
                let entries = lf
                    .positions
                    .as_ref()
                    .ok_or_else(|| ScenarioError::Invalid("leader_final: explicit mode needs positions".into()))?;
                let mut map = BTreeMap::new();
                for e in entries {
                    if map.insert(e.id, e.position).is_some() {
                        return Err(ScenarioError::Invalid(format!("leader_final: duplicate id {}", e.id)));
                    }
                }
                Ok(LeaderPlacement::Explicit(map))
            }
        }
    }

    pub fn into_scenario(&self) -> Result<Scenario, ScenarioError> {
        if self.dimension != 2 && self.dimension != 3 {
            return Err(ScenarioError::Invalid(format!("dimension {} not supported", self.dimension)));
        }
        let mut ids = BTreeSet::new();
        for a in &self.agents {
            if !ids.insert(a.id) {
                return Err(ScenarioError::Invalid(format!("duplicate agent id {}", a.id)));
            }
            if a.position.dim() != self.dimension {
                return Err(ScenarioError::Invalid(format!(
                    "agent {} has {} coordinates, expected {}",
                    a.id,
                    a.position.dim(),
                    self.dimension
                )));
            }
        }
        self.roles()?;
        let targets = self.target_set()?;
        let formation = self.formation(targets.zone.centroid())?;
        let scenario = Scenario {
            formation,
            targets,
            leader_placement: self.leader_placement()?,
            gains: self.gains,
            times: self.times,
            margin: self.margin,
            seed: self.seed,
            leader_blend: self.output.leader_blend,
            snapshot_times: self.output.snapshot_times.clone(),
            divergence_limit: self.output.divergence_limit,
        };
        scenario.validate()?;
        Ok(scenario)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = r#"
dimension = 2

[targets]
zone = [[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]]
grid_spacing = 0.5

[[agents]]
id = 1
position = [-4.0, -4.0]
role = "boundary"

[[agents]]
id = 2
position = [4.0, -4.0]

[[agents]]
id = 3
position = [4.0, 4.0]

[[agents]]
id = 4
position = [-4.0, 4.0]

[[agents]]
id = 5
position = [0.0, 0.1]

[[agents]]
id = 6
position = [1.0, -1.5]
role = "cooperative"
"#;

    #[test]
    fn parses_with_defaults() {
        let f = ScenarioFile::parse(SMALL).unwrap();
        assert_eq!(f.margin, 0.10);
        assert_eq!(f.times, TimeConfig::default());
        assert_eq!(f.gains, Gains::default());
        assert_eq!(f.leader_final, LeaderFinalSection::default());
        // partial boundary tags must match the hull
        assert!(matches!(f.into_scenario(), Err(ScenarioError::Graph(GraphError::BoundaryMismatch { .. }))));

        let text = SMALL.replacen("role = \"boundary\"\n", "", 1);
        let s = ScenarioFile::parse(&text).unwrap().into_scenario().unwrap();
        assert_eq!(s.formation.boundary_ids().len(), 4);
        assert_eq!(s.targets.samples.len(), 25);
        assert_eq!(s.formation.core().unwrap(), AgentId(5));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = format!("bogus = 1\n{SMALL}");
        assert!(matches!(ScenarioFile::parse(&text), Err(ScenarioError::Parse { .. })));
    }

    #[test]
    fn bad_role_names_the_agent() {
        let text = SMALL.replace("role = \"cooperative\"", "role = \"leader\"");
        let err = ScenarioFile::parse(&text).unwrap().into_scenario().unwrap_err();
        match err {
            ScenarioError::BadRole { agent, tag } => {
                assert_eq!(agent, AgentId(6));
                assert_eq!(tag, "leader");
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn parse_errors_carry_a_line() {
        let text = SMALL.replace("id = 6", "id = \"six\"");
        match ScenarioFile::parse(&text) {
            Err(ScenarioError::Parse { line: Some(l), .. }) => assert!(l > 20),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn toml_round_trip() {
        let f = ScenarioFile::parse(SMALL).unwrap();
        let again = ScenarioFile::parse(&f.to_toml()).unwrap();
        assert_eq!(f, again);
        assert_eq!(f.to_toml(), again.to_toml());
    }
}
