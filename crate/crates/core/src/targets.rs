//! Final desired positions from a finite target sample set.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::formation::{self, Formation, GraphError, LayeredGraph};
use crate::geometry::{self, ConvexPolytope, GeometryError, Point, Simplex, BOUNDARY_TOL};
use crate::{AgentId, Role};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TargetError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("bad target configuration: {0}")]
    BadConfig(String),
    #[error("no final position for leader {0}")]
    MissingLeader(AgentId),
    #[error("mentors of agent {agent} have degenerate final positions: {source}")]
    DegenerateMentorSimplex { agent: AgentId, source: GeometryError },
}

/// Outline of the target zone. 2-D zones are simple polygons stored
/// counterclockwise; 3-D zones are the convex hull of their vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct Zone {
    vertices: Vec<Point>,
    centroid: Point,
    hull: Option<ConvexPolytope>,
}

impl Zone {
    pub fn new(vertices: Vec<Point>) -> Result<Self, TargetError> {
        let dim = vertices
            .first()
            .ok_or_else(|| TargetError::BadConfig("empty zone".into()))?
            .dim();
        if vertices.iter().any(|v| v.dim() != dim) {
            return Err(TargetError::BadConfig("zone vertices of mixed dimension".into()));
        }
        match dim {
            2 => {
                if vertices.len() < 3 {
                    return Err(TargetError::BadConfig("zone polygon needs at least 3 vertices".into()));
                }
                let mut vertices = vertices;
                if geometry::polygon_signed_area(&vertices) < 0.0 {
                    vertices.reverse();
                }
                let centroid = geometry::polygon_centroid(&vertices)
                    .ok_or_else(|| TargetError::BadConfig("zone polygon has zero area".into()))?;
                Ok(Self {
                    vertices,
                    centroid,
                    hull: None,
                })
            }
            _ => {
                let hull = ConvexPolytope::hull_of(&vertices)?;
                let centroid = polyhedron_centroid(&hull.vertices)?;
                Ok(Self {
                    vertices: hull.vertices.clone(),
                    centroid,
                    hull: Some(hull),
                })
            }
        }
    }

    /// Convex hull of the samples.
    pub fn from_samples(samples: &[Point]) -> Result<Self, TargetError> {
        if samples.first().map(Point::dim) == Some(2) {
            let ring = geometry::convex_hull(samples)?;
            Self::new(ring.into_iter().map(|k| samples[k]).collect())
        } else {
            Self::new(samples.to_vec())
        }
    }

    pub fn dim(&self) -> usize {
        self.centroid.dim()
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn centroid(&self) -> Point {
        self.centroid
    }

    pub fn scaled_vertices(&self, factor: f64) -> Vec<Point> {
        self.vertices
            .iter()
            .map(|v| v.scaled_about(&self.centroid, factor))
            .collect()
    }

    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for (k, a) in self.vertices.iter().enumerate() {
            for b in &self.vertices[k + 1..] {
                d = d.max(a.distance(b));
            }
        }
        d
    }

    /// Whether `p` lies in the zone scaled by `factor` about its centroid.
    pub fn contains_scaled(&self, p: &Point, factor: f64) -> bool {
        // map p back into the unscaled frame
        let q = p.scaled_about(&self.centroid, 1.0 / factor);
        let tol = 1e-12 * self.diameter().max(1.0);
        match &self.hull {
            None => geometry::point_in_polygon(&q, &self.vertices, tol),
            Some(h) => h.contains(&q, tol),
        }
    }
}

fn polyhedron_centroid(vertices: &[Point]) -> Result<Point, TargetError> {
    let facets = geometry::hull_facets_3d(vertices)?;
    let inner = geometry::mean(vertices).expect("non-empty");
    let mut vol = 0.0;
    let mut acc = Point::zeros(3);
    for f in facets {
        let s = Simplex::from_points(vec![vertices[f[0]], vertices[f[1]], vertices[f[2]], inner])?;
        let v = s.volume();
        vol += v;
        acc = acc + s.centroid() * v;
    }
    Ok(acc * (1.0 / vol))
}

/// Finite target sample set with its zone outline.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetSet {
    pub samples: Vec<Point>,
    pub zone: Zone,
}

impl TargetSet {
    pub fn new(samples: Vec<Point>, zone: Option<Zone>) -> Result<Self, TargetError> {
        let zone = match zone {
            Some(z) => z,
            None => Zone::from_samples(&samples)?,
        };
        if samples.iter().any(|s| s.dim() != zone.dim()) {
            return Err(TargetError::BadConfig("sample dimension differs from zone".into()));
        }
        Ok(Self { samples, zone })
    }

    /// Samples on a regular grid of spacing `spacing` clipped to the zone.
    pub fn grid(zone: Zone, spacing: f64) -> Result<Self, TargetError> {
        if !(spacing > 0.0) {
            return Err(TargetError::BadConfig(format!("grid spacing {spacing} must be positive")));
        }
        let dim = zone.dim();
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for v in zone.vertices() {
            for k in 0..dim {
                lo[k] = lo[k].min(v.coords()[k]);
                hi[k] = hi[k].max(v.coords()[k]);
            }
        }
        let counts: Vec<usize> = (0..dim)
            .map(|k| ((hi[k] - lo[k]) / spacing).floor() as usize + 1)
            .collect();
        if counts.iter().product::<usize>() > 1_000_000 {
            return Err(TargetError::BadConfig("grid spacing too fine".into()));
        }
        // center the grid inside the bounding box
        let off: Vec<f64> = (0..dim)
            .map(|k| lo[k] + (hi[k] - lo[k] - (counts[k] - 1) as f64 * spacing) / 2.0)
            .collect();
        let mut samples = Vec::new();
        let mut idx = vec![0usize; dim];
        'outer: loop {
            let c: Vec<f64> = (0..dim).map(|k| off[k] + idx[k] as f64 * spacing).collect();
            let p = Point::new(&c)?;
            if zone.contains_scaled(&p, 1.0) {
                samples.push(p);
            }
            for k in 0..dim {
                idx[k] += 1;
                if idx[k] < counts[k] {
                    continue 'outer;
                }
                idx[k] = 0;
            }
            break;
        }
        if samples.is_empty() {
            return Err(TargetError::BadConfig("grid produced no samples inside the zone".into()));
        }
        Ok(Self { samples, zone })
    }
}

/// How boundary leaders obtain their final positions.
#[derive(Debug, Clone, PartialEq)]
pub enum LeaderPlacement {
    Explicit(BTreeMap<AgentId, Point>),
    /// Spread along the zone outline scaled by `scale` about its centroid.
    Generated { scale: f64 },
}

impl Default for LeaderPlacement {
    fn default() -> Self {
        LeaderPlacement::Generated { scale: 1.1 }
    }
}

/// Final positions of the boundary leaders.
///
/// Generated placement in 2-D puts the leaders at equal arc-length steps
/// along the scaled zone outline, starting at its first vertex, keeping the
/// counterclockwise order of the initial boundary and choosing the cyclic
/// shift closest to the initial positions. In 3-D each leader is projected
/// radially from the zone centroid onto the scaled zone surface.
pub fn leader_final_positions(
    formation: &Formation,
    targets: &TargetSet,
    placement: &LeaderPlacement,
) -> Result<BTreeMap<AgentId, Point>, TargetError> {
    let boundary = formation.boundary_ids();
    match placement {
        LeaderPlacement::Explicit(map) => {
            let mut out = BTreeMap::new();
            for id in boundary {
                let p = map.get(id).ok_or(TargetError::MissingLeader(*id))?;
                if p.dim() != formation.dim() {
                    return Err(TargetError::BadConfig(format!("leader {id} position has wrong dimension")));
                }
                out.insert(*id, *p);
            }
            if let Some(extra) = map.keys().find(|id| !formation.is_boundary(**id)) {
                return Err(TargetError::BadConfig(format!(
                    "final position given for non-boundary agent {extra}"
                )));
            }
            Ok(out)
        }
        LeaderPlacement::Generated { scale } => {
            if !(*scale > 0.0) || !scale.is_finite() {
                return Err(TargetError::BadConfig(format!("leader scale {scale} must be positive")));
            }
            let zone = &targets.zone;
            if zone.dim() != formation.dim() {
                return Err(TargetError::BadConfig("zone dimension differs from formation".into()));
            }
            let initial: Vec<Point> = boundary
                .iter()
                .map(|id| formation.position(*id).expect("boundary agent"))
                .collect();
            let placed = match formation.dim() {
                2 => place_on_outline(&zone.scaled_vertices(*scale), &initial),
                _ => place_radially(zone, *scale, &initial)?,
            };
            Ok(boundary.iter().copied().zip(placed).collect())
        }
    }
}

fn place_on_outline(ring: &[Point], initial: &[Point]) -> Vec<Point> {
    let m = ring.len();
    let lens: Vec<f64> = (0..m).map(|k| ring[k].distance(&ring[(k + 1) % m])).collect();
    let perimeter: f64 = lens.iter().sum();
    let count = initial.len();
    let slots: Vec<Point> = (0..count)
        .map(|k| {
            let mut s = perimeter * k as f64 / count as f64;
            let mut e = 0;
            while e + 1 < m && s > lens[e] {
                s -= lens[e];
                e += 1;
            }
            let t = if lens[e] > 0.0 { (s / lens[e]).min(1.0) } else { 0.0 };
            ring[e] + (ring[(e + 1) % m] - ring[e]) * t
        })
        .collect();
    // leader j takes slot (j + shift) mod count
    let cost = |shift: usize| -> f64 {
        initial
            .iter()
            .enumerate()
            .map(|(j, a)| {
                let d = *a - slots[(j + shift) % count];
                d.dot(&d)
            })
            .sum()
    };
    let mut best = 0;
    let mut best_cost = cost(0);
    for shift in 1..count {
        let c = cost(shift);
        if c < best_cost {
            best = shift;
            best_cost = c;
        }
    }
    (0..count).map(|j| slots[(j + best) % count]).collect()
}

fn place_radially(zone: &Zone, scale: f64, initial: &[Point]) -> Result<Vec<Point>, TargetError> {
    let scaled = ConvexPolytope::hull_of(&zone.scaled_vertices(scale))?;
    let c = zone.centroid();
    let hub = geometry::mean(initial).expect("non-empty boundary");
    initial
        .iter()
        .map(|a| {
            let dir = *a - hub;
            let t = scaled
                .ray_exit(&c, &dir)
                .ok_or_else(|| TargetError::BadConfig("leader direction does not leave the zone".into()))?;
            Ok(c + dir * t)
        })
        .collect()
}

/// Final desired positions and the sample indices each mentee captured.
#[derive(Debug, Clone, PartialEq)]
pub struct DesiredPositions {
    pub p: BTreeMap<AgentId, Point>,
    pub captured: BTreeMap<AgentId, Vec<usize>>,
    /// Cooperative agents whose mentor simplex captured no sample; their
    /// final position falls back to the mentor centroid.
    pub empty_capture: Vec<AgentId>,
}

impl DesiredPositions {
    /// Number of samples not captured by any cooperative agent.
    pub fn uncaptured_samples(&self, total: usize) -> usize {
        let mut hit = vec![false; total];
        for idx in self.captured.values().flatten() {
            hit[*idx] = true;
        }
        hit.iter().filter(|h| !**h).count()
    }
}

/// Assign final positions layer by layer: boundary leaders take `leader_p`,
/// the core and uncooperative agents keep their initial positions, and each
/// cooperative agent takes the mean of the samples inside its mentors' final
/// simplex.
pub fn compute_desired(
    graph: &LayeredGraph,
    formation: &Formation,
    targets: &TargetSet,
    leader_p: &BTreeMap<AgentId, Point>,
) -> Result<DesiredPositions, TargetError> {
    let order = formation::topological_order(graph)?;
    let mut p = BTreeMap::new();
    let mut captured = BTreeMap::new();
    let mut empty_capture = Vec::new();
    for id in order {
        let role = graph.role(id).ok_or(GraphError::UnknownAgent(id))?;
        let a = formation.position(id).ok_or(GraphError::UnknownAgent(id))?;
        let target = match role {
            Role::Boundary => *leader_p.get(&id).ok_or(TargetError::MissingLeader(id))?,
            Role::Core | Role::Uncooperative => a,
            Role::Cooperative => {
                let verts: Vec<Point> = graph.mentors_of(id).iter().map(|m| p[m]).collect();
                let simplex = Simplex::new(graph.mentors_of(id).to_vec(), verts)
                    .map_err(|source| TargetError::DegenerateMentorSimplex { agent: id, source })?;
                let mut hits = Vec::new();
                for (r, d) in targets.samples.iter().enumerate() {
                    if geometry::contains(&simplex, d, BOUNDARY_TOL)? {
                        hits.push(r);
                    }
                }
                let target = if hits.is_empty() {
                    empty_capture.push(id);
                    simplex.centroid()
                } else {
                    // sum in coordinate order so the result ignores sample order
                    let mut pts: Vec<Point> = hits.iter().map(|r| targets.samples[*r]).collect();
                    pts.sort_by(|a, b| a.total_cmp(b));
                    geometry::mean(&pts).expect("non-empty")
                };
                captured.insert(id, hits);
                target
            }
        };
        p.insert(id, target);
    }
    empty_capture.sort();
    Ok(DesiredPositions {
        p,
        captured,
        empty_capture,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formation::build_nominal;

    fn square_zone(half: f64) -> Zone {
        Zone::new(vec![
            Point::xy(-half, -half),
            Point::xy(half, -half),
            Point::xy(half, half),
            Point::xy(-half, half),
        ])
        .unwrap()
    }

    fn diamond_formation() -> Formation {
        Formation::new(
            2,
            vec![
                (AgentId(1), Point::xy(-2.0, -2.0)),
                (AgentId(2), Point::xy(2.0, -2.0)),
                (AgentId(3), Point::xy(2.0, 2.0)),
                (AgentId(4), Point::xy(-2.0, 2.0)),
                (AgentId(5), Point::xy(0.0, 0.0)),
                (AgentId(6), Point::xy(0.0, -1.0)),
            ],
            Point::xy(0.0, 0.0),
        )
        .unwrap()
    }

    #[test]
    fn zone_orientation_and_centroid() {
        let mut v = square_zone(1.0).vertices().to_vec();
        v.reverse();
        let z = Zone::new(v).unwrap();
        assert!(geometry::polygon_signed_area(z.vertices()) > 0.0);
        assert_eq!(z.centroid(), Point::xy(0.0, 0.0));
        assert!((z.diameter() - 8f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn square_leaders_land_on_corners() {
        let f = Formation::new(
            2,
            vec![
                (AgentId(1), Point::xy(-3.0, -3.0)),
                (AgentId(2), Point::xy(3.0, -3.0)),
                (AgentId(3), Point::xy(3.0, 3.0)),
                (AgentId(4), Point::xy(-3.0, 3.0)),
                (AgentId(5), Point::xy(0.1, 0.0)),
            ],
            Point::xy(0.0, 0.0),
        )
        .unwrap();
        let t = TargetSet::new(vec![Point::xy(0.0, 0.0)], Some(square_zone(1.0))).unwrap();
        let p = leader_final_positions(&f, &t, &LeaderPlacement::Generated { scale: 1.0 }).unwrap();
        assert_eq!(p[&AgentId(1)], Point::xy(-1.0, -1.0));
        assert_eq!(p[&AgentId(2)], Point::xy(1.0, -1.0));
        assert_eq!(p[&AgentId(3)], Point::xy(1.0, 1.0));
        assert_eq!(p[&AgentId(4)], Point::xy(-1.0, 1.0));
    }

    #[test]
    fn circle_leaders_are_evenly_spaced() {
        let ring: Vec<Point> = (0..64)
            .map(|k| {
                let a = std::f64::consts::TAU * k as f64 / 64.0;
                Point::xy(a.cos(), a.sin())
            })
            .collect();
        let zone = Zone::new(ring).unwrap();
        let agents: Vec<(AgentId, Point)> = (0..8)
            .map(|k| {
                let a = std::f64::consts::TAU * (k as f64 + 0.1) / 8.0;
                (AgentId(k + 1), Point::xy(5.0 * a.cos(), 5.0 * a.sin()))
            })
            .chain([(AgentId(9), Point::xy(0.0, 0.0))])
            .collect();
        let f = Formation::new(2, agents, Point::xy(0.0, 0.0)).unwrap();
        let t = TargetSet::new(vec![Point::xy(0.0, 0.0)], Some(zone)).unwrap();
        let p = leader_final_positions(&f, &t, &LeaderPlacement::Generated { scale: 1.1 }).unwrap();
        let c = t.zone.centroid();
        let angles: Vec<f64> = f
            .boundary_ids()
            .iter()
            .map(|id| {
                let q = p[id] - c;
                assert!((q.norm() - 1.1).abs() < 1e-12);
                q.y().atan2(q.x())
            })
            .collect();
        // cyclic order preserved: consecutive leaders are 45 degrees apart
        for k in 0..8 {
            let d = (angles[(k + 1) % 8] - angles[k]).rem_euclid(std::f64::consts::TAU);
            assert!((d - std::f64::consts::FRAC_PI_4).abs() < 1e-9, "{d}");
        }
    }

    #[test]
    fn explicit_leaders_pass_through() {
        let f = diamond_formation();
        let map: BTreeMap<AgentId, Point> = f
            .boundary_ids()
            .iter()
            .map(|id| (*id, f.position(*id).unwrap() * 0.5))
            .collect();
        let t = TargetSet::new(vec![Point::xy(0.0, 0.0)], Some(square_zone(1.0))).unwrap();
        let p = leader_final_positions(&f, &t, &LeaderPlacement::Explicit(map.clone())).unwrap();
        assert_eq!(p, map);
        let mut partial = map;
        partial.remove(&AgentId(1));
        assert_eq!(
            leader_final_positions(&f, &t, &LeaderPlacement::Explicit(partial)),
            Err(TargetError::MissingLeader(AgentId(1)))
        );
        assert!(matches!(
            leader_final_positions(&f, &t, &LeaderPlacement::Generated { scale: 0.0 }),
            Err(TargetError::BadConfig(_))
        ));
    }

    fn leaders_in_place(f: &Formation) -> BTreeMap<AgentId, Point> {
        f.boundary_ids().iter().map(|id| (*id, f.position(*id).unwrap())).collect()
    }

    #[test]
    fn two_sample_mean() {
        let f = diamond_formation();
        let g = build_nominal(&f).unwrap();
        assert_eq!(g.mentors_of(AgentId(6)), &[AgentId(1), AgentId(2), AgentId(5)]);
        let t = TargetSet::new(
            vec![Point::xy(-0.5, -1.0), Point::xy(0.5, -1.0), Point::xy(0.0, 1.0)],
            Some(square_zone(1.5)),
        )
        .unwrap();
        let d = compute_desired(&g, &f, &t, &leaders_in_place(&f)).unwrap();
        assert_eq!(d.p[&AgentId(6)], Point::xy(0.0, -1.0));
        assert_eq!(d.captured[&AgentId(6)], vec![0, 1]);
        assert_eq!(d.p[&AgentId(5)], Point::xy(0.0, 0.0));
        assert!(d.empty_capture.is_empty());
        assert_eq!(d.uncaptured_samples(3), 1);
    }

    #[test]
    fn single_sample_and_empty_fallback() {
        let f = diamond_formation();
        let g = build_nominal(&f).unwrap();
        let t = TargetSet::new(vec![Point::xy(0.3, -0.4)], Some(square_zone(1.0))).unwrap();
        let d = compute_desired(&g, &f, &t, &leaders_in_place(&f)).unwrap();
        assert_eq!(d.p[&AgentId(6)], Point::xy(0.3, -0.4));

        let t = TargetSet::new(vec![Point::xy(0.0, 1.0)], Some(square_zone(1.0))).unwrap();
        let d = compute_desired(&g, &f, &t, &leaders_in_place(&f)).unwrap();
        assert_eq!(d.empty_capture, vec![AgentId(6)]);
        let c = d.p[&AgentId(6)];
        assert!((c.x() - 0.0).abs() < 1e-15 && (c.y() + 4.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn degenerate_final_mentors_are_reported() {
        let f = diamond_formation();
        let g = build_nominal(&f).unwrap();
        let mut leaders = leaders_in_place(&f);
        // collapse leaders 1 and 2 onto the core's line
        leaders.insert(AgentId(1), Point::xy(0.0, -1.0));
        leaders.insert(AgentId(2), Point::xy(0.0, -2.0));
        let t = TargetSet::new(vec![Point::xy(0.0, 0.5)], Some(square_zone(1.0))).unwrap();
        assert!(matches!(
            compute_desired(&g, &f, &t, &leaders),
            Err(TargetError::DegenerateMentorSimplex { agent: AgentId(6), .. })
        ));
    }

    #[test]
    fn grid_samples_stay_in_zone() {
        let t = TargetSet::grid(square_zone(1.0), 0.5).unwrap();
        assert_eq!(t.samples.len(), 25);
        assert!(t.samples.iter().all(|s| t.zone.contains_scaled(s, 1.0)));
    }
}
