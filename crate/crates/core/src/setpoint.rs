//! Global desired set-points `S(t)` solving `(I_n ⊗ L(t)) S + O = 0`.
//!
//! Agents are indexed by `(layer, id)`. Because mentors always sit in
//! earlier layers, the follower block of `L` is lower-triangular in this
//! order and [`propagate_setpoints`] is plain forward substitution.
//! [`solve_setpoints_dense`] solves the partitioned system with an LU
//! factorization and is kept as an independent check.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::formation::{self, GraphError, LayeredGraph};
use crate::geometry::Point;
use crate::weights::{self, WeightError, WeightSchedule};
use crate::AgentId;

/// Largest team the dense solve accepts.
pub const DENSE_LIMIT: usize = 500;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SetpointError {
    #[error(transparent)]
    Weight(#[from] WeightError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("no anchor position for source agent {0}")]
    MissingAnchor(AgentId),
    #[error("no weights for cooperative agent {0}")]
    MissingWeights(AgentId),
    #[error("follower block of the communication matrix is singular")]
    SingularFollowerBlock,
    #[error("dense solve limited to {DENSE_LIMIT} agents, got {0}")]
    TooLarge(usize),
}

/// Sparse communication matrix `L(t)` in `(layer, id)` agent order.
#[derive(Debug, Clone, PartialEq)]
pub struct CommMatrix {
    pub t: f64,
    pub order: Vec<AgentId>,
    /// Per row, `(column, value)` pairs with the diagonal first.
    pub rows: Vec<Vec<(usize, f64)>>,
}

impl CommMatrix {
    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.rows[row]
            .iter()
            .filter(|(c, _)| *c == col)
            .map(|(_, v)| *v)
            .sum()
    }

    pub fn row_sum(&self, row: usize) -> f64 {
        self.rows[row].iter().map(|(_, v)| *v).sum()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.len();
        let mut m = DMatrix::zeros(n, n);
        for (r, row) in self.rows.iter().enumerate() {
            for (c, v) in row {
                m[(r, *c)] += *v;
            }
        }
        m
    }
}

pub fn build_comm_matrix(graph: &LayeredGraph, schedule: &WeightSchedule, t: f64) -> Result<CommMatrix, SetpointError> {
    let b = weights::beta(t, schedule.t0, schedule.tf)?;
    let order = graph.layered_order();
    let index: BTreeMap<AgentId, usize> = order.iter().enumerate().map(|(k, id)| (*id, k)).collect();
    let rows = order
        .iter()
        .enumerate()
        .map(|(r, id)| {
            let mut row = vec![(r, -1.0)];
            let mentors = graph.mentors_of(*id);
            if !mentors.is_empty() {
                let w = schedule.blend(*id, b).ok_or(SetpointError::MissingWeights(*id))?;
                row.extend(mentors.iter().zip(w).map(|(m, w)| (index[m], w)));
            }
            Ok(row)
        })
        .collect::<Result<_, SetpointError>>()?;
    Ok(CommMatrix { t, order, rows })
}

/// Planned desired positions of every agent at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct SetpointField {
    pub t: f64,
    pub s: BTreeMap<AgentId, Point>,
}

fn anchor(anchors: &BTreeMap<AgentId, Point>, id: AgentId) -> Result<Point, SetpointError> {
    anchors.get(&id).copied().ok_or(SetpointError::MissingAnchor(id))
}

/// Forward substitution in topological order: sources take their anchor,
/// each follower the weighted mix of its mentors' set-points.
pub fn propagate_setpoints(
    graph: &LayeredGraph,
    schedule: &WeightSchedule,
    anchors: &BTreeMap<AgentId, Point>,
    t: f64,
) -> Result<SetpointField, SetpointError> {
    let b = weights::beta(t, schedule.t0, schedule.tf)?;
    let mut s: BTreeMap<AgentId, Point> = BTreeMap::new();
    for id in formation::topological_order(graph)? {
        let mentors = graph.mentors_of(id);
        let value = if mentors.is_empty() {
            anchor(anchors, id)?
        } else {
            let w = schedule.blend(id, b).ok_or(SetpointError::MissingWeights(id))?;
            let pts: Vec<Point> = mentors.iter().map(|m| s[m]).collect();
            crate::geometry::combine(&w, &pts)
        };
        s.insert(id, value);
    }
    Ok(SetpointField { t, s })
}

/// Dense partitioned solve: sources clamped, `L̃22 S_I = −L̃21 S_L` per
/// coordinate.
pub fn solve_setpoints_dense(
    graph: &LayeredGraph,
    schedule: &WeightSchedule,
    anchors: &BTreeMap<AgentId, Point>,
    t: f64,
) -> Result<SetpointField, SetpointError> {
    let l = build_comm_matrix(graph, schedule, t)?;
    let n_all = l.len();
    if n_all > DENSE_LIMIT {
        return Err(SetpointError::TooLarge(n_all));
    }
    let n0 = graph.layers[0].len();
    let nf = n_all - n0;
    let dense = l.to_dense();
    let l21 = dense.view((n0, 0), (nf, n0)).into_owned();
    let l22 = dense.view((n0, n0), (nf, nf)).into_owned();
    let lu = l22.lu();

    let dim = graph.dim;
    let sources: Vec<Point> = l.order[..n0]
        .iter()
        .map(|id| anchor(anchors, *id))
        .collect::<Result<_, _>>()?;
    let mut s: BTreeMap<AgentId, Point> = l.order[..n0].iter().copied().zip(sources.iter().copied()).collect();
    let mut followers = vec![Point::zeros(dim); nf];
    if nf > 0 {
        for k in 0..dim {
            let s_l = DVector::from_iterator(n0, sources.iter().map(|p| p.coords()[k]));
            let rhs = -(&l21 * s_l);
            let x = lu.solve(&rhs).ok_or(SetpointError::SingularFollowerBlock)?;
            if x.iter().any(|v| !v.is_finite()) {
                return Err(SetpointError::SingularFollowerBlock);
            }
            for (f, v) in followers.iter_mut().zip(x.iter()) {
                f.coords_mut()[k] = *v;
            }
        }
    }
    s.extend(l.order[n0..].iter().copied().zip(followers));
    Ok(SetpointField { t, s })
}

/// Coordinate-major stacking `[x_1..x_N, y_1..y_N, (z_1..z_N)]` in the
/// matrix's agent order.
pub fn stack(field: &SetpointField, order: &[AgentId], dim: usize) -> DVector<f64> {
    let n = order.len();
    DVector::from_fn(n * dim, |r, _| field.s[&order[r % n]].coords()[r / n])
}

/// `max |(I_n ⊗ L) S + O|` with `O` holding the anchors of source rows.
pub fn residual(
    matrix: &CommMatrix,
    field: &SetpointField,
    anchors: &BTreeMap<AgentId, Point>,
) -> Result<f64, SetpointError> {
    let dim = field.s.values().next().map_or(2, Point::dim);
    let n = matrix.len();
    let s = stack(field, &matrix.order, dim);
    let mut worst: f64 = 0.0;
    for k in 0..dim {
        for (r, row) in matrix.rows.iter().enumerate() {
            let mut acc: f64 = row.iter().map(|(c, v)| v * s[k * n + c]).sum();
            if row.len() == 1 {
                acc += anchor(anchors, matrix.order[r])?.coords()[k];
            }
            worst = worst.max(acc.abs());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formation::{build_nominal, Formation};

    fn graph_with_one_mentee() -> (LayeredGraph, Formation) {
        let f = Formation::new(
            2,
            vec![
                (AgentId(1), Point::xy(0.0, 0.0)),
                (AgentId(2), Point::xy(4.0, 0.0)),
                (AgentId(3), Point::xy(4.0, 4.0)),
                (AgentId(4), Point::xy(0.0, 4.0)),
                (AgentId(5), Point::xy(2.0, 2.0)),
                (AgentId(6), Point::xy(2.0, 1.0)),
            ],
            Point::xy(2.0, 2.0),
        )
        .unwrap();
        (build_nominal(&f).unwrap(), f)
    }

    fn schedule(w: Vec<f64>) -> WeightSchedule {
        WeightSchedule::new(
            BTreeMap::from([(AgentId(6), w.clone())]),
            BTreeMap::from([(AgentId(6), w)]),
            0.0,
            1.0,
        )
        .unwrap()
    }

    #[test]
    fn leaders_only_matrix_is_minus_identity() {
        let (mut g, _) = graph_with_one_mentee();
        g.mentors.clear();
        g.layers.truncate(1);
        g.layers[0].push(AgentId(6));
        g.layers[0].sort();
        let s = WeightSchedule::new(BTreeMap::new(), BTreeMap::new(), 0.0, 1.0).unwrap();
        let l = build_comm_matrix(&g, &s, 0.3).unwrap();
        assert_eq!(l.to_dense(), -DMatrix::<f64>::identity(6, 6));
        let anchors: BTreeMap<AgentId, Point> = (1..=6).map(|k| (AgentId(k), Point::xy(k as f64, 0.0))).collect();
        let dense = solve_setpoints_dense(&g, &s, &anchors, 0.3).unwrap();
        let fwd = propagate_setpoints(&g, &s, &anchors, 0.3).unwrap();
        assert_eq!(dense.s, anchors);
        assert_eq!(fwd.s, anchors);
    }

    #[test]
    fn mentee_row_holds_its_weights() {
        let (g, _) = graph_with_one_mentee();
        let l = build_comm_matrix(&g, &schedule(vec![0.2, 0.3, 0.5]), 0.5).unwrap();
        let r = l.order.iter().position(|id| *id == AgentId(6)).unwrap();
        assert_eq!(r, 5);
        assert_eq!(l.get(r, r), -1.0);
        assert_eq!(l.get(r, 0), 0.2);
        assert_eq!(l.get(r, 1), 0.3);
        assert_eq!(l.get(r, 4), 0.5);
        assert_eq!(l.nnz(), 6 + 3);
        assert!(l.row_sum(r).abs() < 1e-15);
    }

    #[test]
    fn propagation_matches_dense_and_has_zero_residual() {
        let (g, f) = graph_with_one_mentee();
        let s = schedule(vec![0.2, 0.3, 0.5]);
        let anchors: BTreeMap<AgentId, Point> = f.positions().clone();
        let fwd = propagate_setpoints(&g, &s, &anchors, 0.5).unwrap();
        let dense = solve_setpoints_dense(&g, &s, &anchors, 0.5).unwrap();
        let expect = Point::xy(0.2 * 0.0 + 0.3 * 4.0 + 0.5 * 2.0, 0.5 * 2.0);
        assert!(fwd.s[&AgentId(6)].distance(&expect) < 1e-15);
        assert!(dense.s[&AgentId(6)].distance(&expect) < 1e-12);
        let l = build_comm_matrix(&g, &s, 0.5).unwrap();
        assert!(residual(&l, &fwd, &anchors).unwrap() < 1e-15);
    }

    #[test]
    fn missing_anchor_is_reported() {
        let (g, f) = graph_with_one_mentee();
        let mut anchors = f.positions().clone();
        anchors.remove(&AgentId(3));
        assert_eq!(
            propagate_setpoints(&g, &schedule(vec![0.2, 0.3, 0.5]), &anchors, 0.0),
            Err(SetpointError::MissingAnchor(AgentId(3)))
        );
    }
}
