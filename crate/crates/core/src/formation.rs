//! Layered feed-forward graph synthesis.
//!
//! [`build_nominal`] grows the graph from a fan triangulation of the leading
//! polytope: every open simplex that still holds an unassigned cooperative
//! agent adopts its most central one as a mentee, wires the simplex vertices
//! to it as mentors, and is split around it. [`build_actual`] runs the same
//! loop after turning declared uncooperative agents into clamped layer-0
//! sources.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};

use thiserror::Error;

use crate::geometry::{self, ConvexPolytope, GeometryError, Point, Simplex, BOUNDARY_TOL};
use crate::{AgentId, Role};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("duplicate agent id {0}")]
    DuplicateAgent(AgentId),
    #[error("unknown agent id {0}")]
    UnknownAgent(AgentId),
    #[error("agent {agent} has a {got}-dimensional position in a {expected}-dimensional formation")]
    DimensionMismatch { agent: AgentId, expected: usize, got: usize },
    #[error("declared boundary {declared:?} does not match the convex hull {hull:?}")]
    BoundaryMismatch { declared: Vec<AgentId>, hull: Vec<AgentId> },
    #[error("boundary agent {0} cannot be uncooperative")]
    UncooperativeBoundary(AgentId),
    #[error("agent {0} is not strictly inside the leading polytope")]
    NotInterior(AgentId),
    #[error("agent {0} cannot be the core: {1}")]
    InvalidCore(AgentId, &'static str),
    #[error("no cooperative non-boundary agent can serve as core")]
    NoCandidate,
    #[error("core {0} lies on the boundary of the leading polytope")]
    CoreOnBoundary(AgentId),
    #[error("agents {0:?} were never assigned a mentor simplex")]
    UnassignedAgents(Vec<AgentId>),
    #[error("mentor cycle through agents {0:?}")]
    CycleDetected(Vec<AgentId>),
}

/// Initial positions and role partition of a team.
#[derive(Debug, Clone, PartialEq)]
pub struct Formation {
    dim: usize,
    positions: BTreeMap<AgentId, Point>,
    boundary_ids: Vec<AgentId>,
    uncooperative_ids: BTreeSet<AgentId>,
    target_center: Point,
    core: Option<AgentId>,
}

impl Formation {
    /// Formation whose boundary is the convex hull of `agents`.
    pub fn new(
        dim: usize,
        agents: impl IntoIterator<Item = (AgentId, Point)>,
        target_center: Point,
    ) -> Result<Self, GraphError> {
        if dim != 2 && dim != 3 {
            return Err(GeometryError::UnsupportedDimension(dim).into());
        }
        let mut positions = BTreeMap::new();
        for (id, p) in agents {
            if p.dim() != dim {
                return Err(GraphError::DimensionMismatch {
                    agent: id,
                    expected: dim,
                    got: p.dim(),
                });
            }
            if positions.insert(id, p).is_some() {
                return Err(GraphError::DuplicateAgent(id));
            }
        }
        if target_center.dim() != dim {
            return Err(GeometryError::DimensionMismatch {
                expected: dim,
                got: target_center.dim(),
            }
            .into());
        }
        let ids: Vec<AgentId> = positions.keys().copied().collect();
        let points: Vec<Point> = positions.values().copied().collect();
        let hull = geometry::convex_hull(&points)?;
        let boundary_ids: Vec<AgentId> = hull.into_iter().map(|k| ids[k]).collect();

        let formation = Self {
            dim,
            positions,
            boundary_ids,
            uncooperative_ids: BTreeSet::new(),
            target_center,
            core: None,
        };
        formation.check_interior()?;
        Ok(formation)
    }

    /// Check an explicitly declared boundary list against the hull.
    pub fn with_boundary(self, declared: impl IntoIterator<Item = AgentId>) -> Result<Self, GraphError> {
        let mut declared: Vec<AgentId> = declared.into_iter().collect();
        declared.sort();
        let mut hull = self.boundary_ids.clone();
        hull.sort();
        if declared != hull {
            return Err(GraphError::BoundaryMismatch { declared, hull });
        }
        Ok(self)
    }

    pub fn with_uncooperative(mut self, ids: impl IntoIterator<Item = AgentId>) -> Result<Self, GraphError> {
        let ids: BTreeSet<AgentId> = ids.into_iter().collect();
        for id in &ids {
            if !self.positions.contains_key(id) {
                return Err(GraphError::UnknownAgent(*id));
            }
            if self.boundary_ids.contains(id) {
                return Err(GraphError::UncooperativeBoundary(*id));
            }
            if self.core == Some(*id) {
                return Err(GraphError::InvalidCore(*id, "declared uncooperative"));
            }
        }
        self.uncooperative_ids = ids;
        Ok(self)
    }

    /// Pin the core instead of selecting it by distance to the target center.
    pub fn with_core(mut self, id: AgentId) -> Result<Self, GraphError> {
        if !self.positions.contains_key(&id) {
            return Err(GraphError::UnknownAgent(id));
        }
        if self.boundary_ids.contains(&id) {
            return Err(GraphError::InvalidCore(id, "boundary agent"));
        }
        if self.uncooperative_ids.contains(&id) {
            return Err(GraphError::InvalidCore(id, "declared uncooperative"));
        }
        self.core = Some(id);
        Ok(self)
    }

    fn check_interior(&self) -> Result<(), GraphError> {
        let poly = self.leading_polytope()?;
        let tol = BOUNDARY_TOL * self.scale();
        for (id, p) in &self.positions {
            if !self.boundary_ids.contains(id) && !poly.strictly_contains(p, tol) {
                return Err(GraphError::NotInterior(*id));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = AgentId> + '_ {
        self.positions.keys().copied()
    }

    pub fn positions(&self) -> &BTreeMap<AgentId, Point> {
        &self.positions
    }

    pub fn position(&self, id: AgentId) -> Option<Point> {
        self.positions.get(&id).copied()
    }

    /// Hull vertices; counterclockwise in 2-D, ascending ids in 3-D.
    pub fn boundary_ids(&self) -> &[AgentId] {
        &self.boundary_ids
    }

    pub fn uncooperative_ids(&self) -> &BTreeSet<AgentId> {
        &self.uncooperative_ids
    }

    pub fn target_center(&self) -> Point {
        self.target_center
    }

    pub fn is_boundary(&self, id: AgentId) -> bool {
        self.boundary_ids.contains(&id)
    }

    pub fn declared_core(&self) -> Option<AgentId> {
        self.core
    }

    /// Declared core, or the one chosen by [`select_core`].
    pub fn core(&self) -> Result<AgentId, GraphError> {
        match self.core {
            Some(id) => Ok(id),
            None => select_core(self),
        }
    }

    pub fn leading_polytope(&self) -> Result<ConvexPolytope, GraphError> {
        let pts: Vec<Point> = self.boundary_ids.iter().map(|id| self.positions[id]).collect();
        Ok(ConvexPolytope::hull_of(&pts)?)
    }

    /// Largest coordinate magnitude, at least 1.
    pub fn scale(&self) -> f64 {
        self.positions.values().fold(1.0_f64, |m, p| m.max(p.max_abs()))
    }
}

/// Non-boundary, non-uncooperative agent nearest the target center; ties go
/// to the smaller id.
pub fn select_core(formation: &Formation) -> Result<AgentId, GraphError> {
    let center = formation.target_center();
    let mut best: Option<(f64, AgentId)> = None;
    for (id, p) in formation.positions() {
        if formation.is_boundary(*id) || formation.uncooperative_ids.contains(id) {
            continue;
        }
        let d = p.distance(&center);
        if best.map_or(true, |(bd, _)| d < bd) {
            best = Some((d, *id));
        }
    }
    best.map(|(_, id)| id).ok_or(GraphError::NoCandidate)
}

/// Split the leading polytope into simplices that all share the core as a
/// vertex. In 2-D simplex `k` is `{b_k, b_{k+1}, core}`; in 3-D each hull
/// facet is coned to the core.
pub fn fan_triangulate(formation: &Formation, core: AgentId) -> Result<Vec<Simplex>, GraphError> {
    let core_p = formation.position(core).ok_or(GraphError::UnknownAgent(core))?;
    let poly = formation.leading_polytope()?;
    if !poly.strictly_contains(&core_p, BOUNDARY_TOL * formation.scale()) {
        return Err(GraphError::CoreOnBoundary(core));
    }
    let b = formation.boundary_ids();
    let faces: Vec<Vec<AgentId>> = match formation.dim() {
        2 => (0..b.len()).map(|k| vec![b[k], b[(k + 1) % b.len()]]).collect(),
        _ => {
            let pts: Vec<Point> = b.iter().map(|id| formation.positions[id]).collect();
            geometry::hull_facets_3d(&pts)?
                .into_iter()
                .map(|f| f.iter().map(|&k| b[k]).collect())
                .collect()
        }
    };
    faces
        .into_iter()
        .map(|mut ids| {
            ids.push(core);
            let pts = ids.iter().map(|id| formation.positions[id]).collect();
            Ok(Simplex::new(ids, pts)?)
        })
        .collect()
}

/// Layered mentor/mentee graph.
#[derive(Debug, Clone, PartialEq)]
pub struct LayeredGraph {
    pub dim: usize,
    pub core_id: AgentId,
    /// `layers[0]` holds the clamped sources; `layers[l]` for `l >= 1` the
    /// agents first introduced as mentees at iteration `l`. Each sorted by id.
    pub layers: Vec<Vec<AgentId>>,
    /// Ordered mentor list of every cooperative agent.
    pub mentors: BTreeMap<AgentId, Vec<AgentId>>,
    /// Directed `(mentor, mentee)` pairs in insertion order.
    pub edges: Vec<(AgentId, AgentId)>,
    pub roles: BTreeMap<AgentId, Role>,
    /// Number of simplices in the initial fan triangulation.
    pub leading_simplices: usize,
}

impl LayeredGraph {
    /// Number of mentee layers (`M`).
    pub fn depth(&self) -> usize {
        self.layers.len() - 1
    }

    pub fn agent_count(&self) -> usize {
        self.roles.len()
    }

    pub fn mentors_of(&self, id: AgentId) -> &[AgentId] {
        self.mentors.get(&id).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn role(&self, id: AgentId) -> Option<Role> {
        self.roles.get(&id).copied()
    }

    pub fn layer_of(&self, id: AgentId) -> Option<usize> {
        self.layers.iter().position(|l| l.binary_search(&id).is_ok())
    }

    pub fn ids_with_role(&self, role: Role) -> impl Iterator<Item = AgentId> + '_ {
        self.roles
            .iter()
            .filter(move |(_, r)| **r == role)
            .map(|(id, _)| *id)
    }

    pub fn boundary_count(&self) -> usize {
        self.ids_with_role(Role::Boundary).count()
    }

    pub fn cooperative_count(&self) -> usize {
        self.ids_with_role(Role::Cooperative).count()
    }

    pub fn uncooperative_count(&self) -> usize {
        self.ids_with_role(Role::Uncooperative).count()
    }

    /// Cumulative neuron sets `W_0 ⊂ W_1 ⊂ …`.
    pub fn cumulative_layers(&self) -> Vec<BTreeSet<AgentId>> {
        let mut acc = BTreeSet::new();
        self.layers
            .iter()
            .map(|l| {
                acc.extend(l.iter().copied());
                acc.clone()
            })
            .collect()
    }

    /// Agents sorted by `(layer, id)`.
    pub fn layered_order(&self) -> Vec<AgentId> {
        self.layers.iter().flatten().copied().collect()
    }

    /// Every agent reachable from `id` by following mentor links upward.
    pub fn ancestors(&self, id: AgentId) -> BTreeSet<AgentId> {
        let mut seen = BTreeSet::new();
        let mut stack = vec![id];
        while let Some(a) = stack.pop() {
            for m in self.mentors_of(a) {
                if seen.insert(*m) {
                    stack.push(*m);
                }
            }
        }
        seen
    }
}

/// Nominal graph: every non-boundary, non-core agent is treated as a
/// cooperative mentee, regardless of uncooperative declarations.
pub fn build_nominal(formation: &Formation) -> Result<LayeredGraph, GraphError> {
    build(formation, &BTreeSet::new())
}

/// Deployed graph: declared uncooperative agents become clamped layer-0
/// sources that may mentor but never receive edges.
pub fn build_actual(formation: &Formation) -> Result<LayeredGraph, GraphError> {
    build(formation, formation.uncooperative_ids())
}

type Cell = Vec<AgentId>;

fn build(formation: &Formation, uncooperative: &BTreeSet<AgentId>) -> Result<LayeredGraph, GraphError> {
    let core = match formation.declared_core() {
        Some(id) => id,
        None => formation.core()?,
    };
    let pos = formation.positions();
    let points_of = |cell: &Cell| -> Vec<Point> { cell.iter().map(|id| pos[id]).collect() };

    let fan = fan_triangulate(formation, core)?;
    let leading_simplices = fan.len();
    let mut open: Vec<Cell> = fan.into_iter().map(|s| s.vertex_ids).collect();

    // uncooperative sources become vertices of the initial triangulation
    for u in uncooperative {
        let a = pos[u];
        let mut hit = None;
        for (k, cell) in open.iter().enumerate() {
            if geometry::contains_points(&points_of(cell), &a, BOUNDARY_TOL)? {
                hit = Some(k);
                break;
            }
        }
        let k = hit.ok_or(GraphError::NotInterior(*u))?;
        let cell = open.remove(k);
        let children = expand(&cell, *u, &points_of);
        for (j, child) in children.into_iter().enumerate() {
            open.insert(k + j, child);
        }
    }

    let mut roles = BTreeMap::new();
    let mut unassigned = BTreeSet::new();
    for id in pos.keys() {
        let role = if formation.is_boundary(*id) {
            Role::Boundary
        } else if *id == core {
            Role::Core
        } else if uncooperative.contains(id) {
            Role::Uncooperative
        } else {
            unassigned.insert(*id);
            Role::Cooperative
        };
        roles.insert(*id, role);
    }

    let layer0: Vec<AgentId> = roles
        .iter()
        .filter(|(_, r)| **r != Role::Cooperative)
        .map(|(id, _)| *id)
        .collect();
    let mut layers = vec![layer0];
    let mut mentors = BTreeMap::new();
    let mut edges = Vec::new();

    while !open.is_empty() {
        // each unassigned agent belongs to the first open cell containing it
        let mut members: Vec<Vec<(AgentId, f64)>> = vec![Vec::new(); open.len()];
        let cell_points: Vec<Vec<Point>> = open.iter().map(&points_of).collect();
        for id in &unassigned {
            for (k, verts) in cell_points.iter().enumerate() {
                let w = geometry::barycentric_weights(verts, &pos[id])?;
                let min_w = w.iter().copied().fold(f64::INFINITY, f64::min);
                if min_w >= -BOUNDARY_TOL {
                    members[k].push((*id, min_w));
                    break;
                }
            }
        }

        let mut mentees = Vec::new();
        let mut next = Vec::new();
        for (cell, cands) in open.iter().zip(&members) {
            // most central candidate; ids ascend so strict > keeps the smallest on ties
            let mut pick: Option<(AgentId, f64)> = None;
            for &(id, score) in cands {
                if pick.map_or(true, |(_, s)| score > s) {
                    pick = Some((id, score));
                }
            }
            let Some((mentee, _)) = pick else {
                continue;
            };
            for m in cell {
                edges.push((*m, mentee));
            }
            mentors.insert(mentee, cell.clone());
            unassigned.remove(&mentee);
            mentees.push(mentee);
            next.extend(expand(cell, mentee, &points_of));
        }
        if mentees.is_empty() {
            break;
        }
        mentees.sort();
        layers.push(mentees);
        open = next;
    }

    if !unassigned.is_empty() {
        return Err(GraphError::UnassignedAgents(unassigned.into_iter().collect()));
    }

    Ok(LayeredGraph {
        dim: formation.dim(),
        core_id: core,
        layers,
        mentors,
        edges,
        roles,
        leading_simplices,
    })
}

/// The `n + 1` cells obtained by substituting `c` for each vertex of `cell`
/// in turn. Children that collapse (when `c` sits on a face) are dropped;
/// the remaining children still cover the cell.
fn expand(cell: &Cell, c: AgentId, points_of: &impl Fn(&Cell) -> Vec<Point>) -> Vec<Cell> {
    (0..cell.len())
        .map(|k| {
            let mut child = cell.clone();
            child[k] = c;
            child
        })
        .filter(|child| Simplex::new(child.clone(), points_of(child)).is_ok())
        .collect()
}

/// Agents ordered so each appears after all of its mentors; ready agents are
/// released by ascending `(layer, id)`.
pub fn topological_order(graph: &LayeredGraph) -> Result<Vec<AgentId>, GraphError> {
    let mut layer = BTreeMap::new();
    for (l, ids) in graph.layers.iter().enumerate() {
        for id in ids {
            layer.insert(*id, l);
        }
    }
    let mut indegree: BTreeMap<AgentId, usize> = graph.roles.keys().map(|id| (*id, 0)).collect();
    let mut mentees: BTreeMap<AgentId, Vec<AgentId>> = BTreeMap::new();
    for (mentee, ms) in &graph.mentors {
        *indegree.entry(*mentee).or_default() += ms.len();
        for m in ms {
            mentees.entry(*m).or_default().push(*mentee);
        }
    }
    let key = |id: AgentId| Reverse((layer.get(&id).copied().unwrap_or(usize::MAX), id));
    let mut ready: BinaryHeap<_> = indegree
        .iter()
        .filter(|(_, d)| **d == 0)
        .map(|(id, _)| key(*id))
        .collect();
    let mut order = Vec::with_capacity(indegree.len());
    while let Some(Reverse((_, id))) = ready.pop() {
        order.push(id);
        for m in mentees.get(&id).into_iter().flatten() {
            let d = indegree.get_mut(m).expect("mentee is a known agent");
            *d -= 1;
            if *d == 0 {
                ready.push(key(*m));
            }
        }
    }
    if order.len() != indegree.len() {
        let stuck = indegree
            .into_iter()
            .filter(|(_, d)| *d > 0)
            .map(|(id, _)| id)
            .collect();
        return Err(GraphError::CycleDetected(stuck));
    }
    Ok(order)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square_with(interior: &[(u32, f64, f64)]) -> Formation {
        let mut agents = vec![
            (AgentId(1), Point::xy(0.0, 0.0)),
            (AgentId(2), Point::xy(4.0, 0.0)),
            (AgentId(3), Point::xy(4.0, 4.0)),
            (AgentId(4), Point::xy(0.0, 4.0)),
        ];
        agents.extend(interior.iter().map(|&(id, x, y)| (AgentId(id), Point::xy(x, y))));
        Formation::new(2, agents, Point::xy(2.0, 2.0)).unwrap()
    }

    #[test]
    fn boundary_is_the_hull() {
        let f = square_with(&[(5, 2.0, 2.0), (6, 1.0, 1.0)]);
        assert_eq!(f.boundary_ids(), &[AgentId(1), AgentId(2), AgentId(3), AgentId(4)]);
        assert!(f.clone().with_boundary([AgentId(4), AgentId(3), AgentId(2), AgentId(1)]).is_ok());
        assert!(matches!(
            f.with_boundary([AgentId(1), AgentId(2), AgentId(3)]),
            Err(GraphError::BoundaryMismatch { .. })
        ));
    }

    #[test]
    fn agents_on_hull_edges_are_rejected() {
        let agents = vec![
            (AgentId(1), Point::xy(0.0, 0.0)),
            (AgentId(2), Point::xy(4.0, 0.0)),
            (AgentId(3), Point::xy(0.0, 4.0)),
            (AgentId(4), Point::xy(2.0, 0.0)),
        ];
        assert_eq!(
            Formation::new(2, agents, Point::xy(1.0, 1.0)).unwrap_err(),
            GraphError::NotInterior(AgentId(4))
        );
    }

    #[test]
    fn core_selection() {
        let f = square_with(&[(7, 2.5, 2.0)]);
        assert_eq!(select_core(&f).unwrap(), AgentId(7));
        // equidistant candidates: smaller id wins
        let f = square_with(&[(9, 1.0, 2.0), (6, 3.0, 2.0)]);
        assert_eq!(select_core(&f).unwrap(), AgentId(6));
        // uncooperative agents are not candidates
        let f = square_with(&[(5, 2.0, 2.0), (6, 1.0, 1.0)])
            .with_uncooperative([AgentId(5)])
            .unwrap();
        assert_eq!(select_core(&f).unwrap(), AgentId(6));
        let f = square_with(&[(5, 2.0, 2.0)]).with_uncooperative([AgentId(5)]).unwrap();
        assert_eq!(select_core(&f).unwrap_err(), GraphError::NoCandidate);
    }

    #[test]
    fn fan_of_a_square() {
        let f = square_with(&[(5, 1.5, 2.5)]);
        let fan = fan_triangulate(&f, AgentId(5)).unwrap();
        assert_eq!(fan.len(), 4);
        let area: f64 = fan.iter().map(Simplex::volume).sum();
        assert!((area - 16.0).abs() < 1e-12);
        for s in &fan {
            assert_eq!(s.vertex_ids[2], AgentId(5));
        }
    }

    #[test]
    fn leaders_only_graph() {
        let f = square_with(&[(5, 2.0, 2.0)]);
        let g = build_nominal(&f).unwrap();
        assert_eq!(g.depth(), 0);
        assert!(g.edges.is_empty());
        assert_eq!(g.layers, vec![vec![AgentId(1), AgentId(2), AgentId(3), AgentId(4), AgentId(5)]]);
        assert_eq!(
            topological_order(&g).unwrap(),
            vec![AgentId(1), AgentId(2), AgentId(3), AgentId(4), AgentId(5)]
        );
    }

    #[test]
    fn single_mentee_graph() {
        let f = square_with(&[(5, 2.0, 2.0), (6, 2.0, 1.0)]);
        let g = build_nominal(&f).unwrap();
        assert_eq!(g.depth(), 1);
        assert_eq!(g.layers[1], vec![AgentId(6)]);
        assert_eq!(g.mentors_of(AgentId(6)), &[AgentId(1), AgentId(2), AgentId(5)]);
        assert_eq!(g.edges.len(), 3);
        let order = topological_order(&g).unwrap();
        assert_eq!(order.last(), Some(&AgentId(6)));
    }

    #[test]
    fn most_central_candidate_wins() {
        // triangle (1,2,5) = (0,0),(4,0),(2,2); agent 7 near its centroid
        let f = square_with(&[(5, 2.0, 2.0), (6, 3.0, 0.5), (7, 2.0, 0.7)]);
        let g = build_nominal(&f).unwrap();
        assert_eq!(g.layers[1], vec![AgentId(7)]);
        assert_eq!(g.layers[2], vec![AgentId(6)]);
        assert!(g.mentors_of(AgentId(6)).contains(&AgentId(7)));
    }

    #[test]
    fn uncooperative_agents_become_sources() {
        let f = square_with(&[(5, 2.0, 2.0), (6, 2.0, 0.8), (8, 2.2, 0.4)])
            .with_uncooperative([AgentId(6)])
            .unwrap();
        let g = build_actual(&f).unwrap();
        assert_eq!(g.role(AgentId(6)), Some(Role::Uncooperative));
        assert!(g.layers[0].contains(&AgentId(6)));
        assert!(g.mentors_of(AgentId(6)).is_empty());
        assert!(g.edges.iter().all(|(_, to)| *to != AgentId(6)));
        assert_eq!(g.layers[1], vec![AgentId(8)]);
        assert!(g.mentors_of(AgentId(8)).contains(&AgentId(6)));

        let nominal = build_nominal(&f).unwrap();
        assert_eq!(nominal.role(AgentId(6)), Some(Role::Cooperative));
        assert_eq!(nominal.cooperative_count(), 2);
    }

    #[test]
    fn face_resident_agent_is_assigned() {
        // agent 6 lies on the shared edge between the fan triangles at (4,0)-(2,2)
        let f = square_with(&[(5, 2.0, 2.0), (6, 3.0, 1.0)]);
        let g = build_nominal(&f).unwrap();
        assert_eq!(g.cooperative_count(), 1);
        // first open cell in fan order is {1, 2, core}
        assert_eq!(g.mentors_of(AgentId(6)), &[AgentId(1), AgentId(2), AgentId(5)]);
    }

    #[test]
    fn cycle_is_detected() {
        let f = square_with(&[(5, 2.0, 2.0), (6, 2.0, 1.0), (7, 2.0, 0.5)]);
        let mut g = build_nominal(&f).unwrap();
        g.mentors.insert(AgentId(6), vec![AgentId(7), AgentId(1), AgentId(2)]);
        assert!(matches!(topological_order(&g), Err(GraphError::CycleDetected(_))));
    }
}
