//! Reproducible random scenarios.
//!
//! Boundary agents sit on a perturbed circle (or sphere), interior agents are
//! drawn uniformly inside the hull by rejection sampling, and the target zone
//! is a regular polygon (an octahedron in 3-D) well inside the hull with grid
//! samples. One interior agent is placed next to the zone centroid, off the
//! sample grid, so it becomes the core. All coordinates are rounded to six
//! decimals so the written file reproduces the scenario exactly.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::dynamics::Gains;
use crate::geometry::{self, ConvexPolytope, Point};
use crate::scenario::{AgentEntry, LeaderFinalSection, OutputSection, ScenarioFile, TargetsSection};
use crate::sim::{plan, TimeConfig};
use crate::{AgentId, Role};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GenerateError {
    #[error("infeasible parameters: {0}")]
    InfeasibleParams(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenerateParams {
    pub agents: usize,
    pub boundary: usize,
    pub uncooperative: usize,
    pub dim: usize,
    pub seed: u64,
    /// Nominal radius of the initial formation.
    pub radius: f64,
    /// Target samples per interior agent.
    pub sample_density: f64,
    /// Give the core agent this id instead of a shuffled one.
    pub core_id: Option<u32>,
}

impl Default for GenerateParams {
    fn default() -> Self {
        Self {
            agents: 40,
            boundary: 10,
            uncooperative: 0,
            dim: 2,
            seed: 0,
            radius: 10.0,
            sample_density: 3.0,
            core_id: None,
        }
    }
}

impl GenerateParams {
    pub fn new(agents: usize, boundary: usize, seed: u64) -> Self {
        Self {
            agents,
            boundary,
            seed,
            ..Self::default()
        }
    }

    pub fn with_uncooperative(mut self, count: usize) -> Self {
        self.uncooperative = count;
        self
    }

    /// Uncooperative count as a rounded fraction of the team size.
    pub fn with_uncooperative_fraction(mut self, fraction: f64) -> Self {
        self.uncooperative = (fraction * self.agents as f64).round() as usize;
        self
    }

    pub fn check(&self) -> Result<(), GenerateError> {
        let bad = |m: String| Err(GenerateError::InfeasibleParams(m));
        if self.dim != 2 && self.dim != 3 {
            return bad(format!("dimension {} not supported", self.dim));
        }
        if self.boundary < self.dim + 1 {
            return bad(format!("need at least {} boundary agents, got {}", self.dim + 1, self.boundary));
        }
        if self.agents <= self.boundary {
            return bad(format!("{} agents leave no interior agent with {} on the boundary", self.agents, self.boundary));
        }
        let interior = self.agents - self.boundary;
        if self.uncooperative >= interior {
            return bad(format!(
                "{} uncooperative agents need more than {interior} interior agents (one is the core)",
                self.uncooperative
            ));
        }
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return bad(format!("radius {} must be positive", self.radius));
        }
        if !(self.sample_density > 0.0 && self.sample_density.is_finite()) {
            return bad(format!("sample density {} must be positive", self.sample_density));
        }
        if let Some(id) = self.core_id {
            if id == 0 || id as usize > self.agents {
                return bad(format!("core id {id} outside 1..={}", self.agents));
            }
        }
        Ok(())
    }
}

fn round6(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}

fn rounded(p: Point) -> Point {
    let mut q = p;
    for c in q.coords_mut() {
        *c = round6(*c);
    }
    q
}

fn fibonacci_direction(k: usize, n: usize) -> [f64; 3] {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    let z = 1.0 - 2.0 * (k as f64 + 0.5) / n as f64;
    let r = (1.0 - z * z).sqrt();
    let phi = golden * k as f64;
    [r * phi.cos(), r * phi.sin(), z]
}

fn boundary_points(p: &GenerateParams, rng: &mut ChaCha8Rng) -> Vec<Point> {
    let nb = p.boundary;
    let r = p.radius;
    for attempt in 0..400 {
        // perturbation fades out so a regular layout is always reached
        let amp = 1.0 - attempt as f64 / 400.0;
        let pts: Vec<Point> = match p.dim {
            2 => {
                let offset = rng.gen_range(0.0..std::f64::consts::TAU);
                let step = std::f64::consts::TAU / nb as f64;
                (0..nb)
                    .map(|k| {
                        let th = offset + step * (k as f64 + amp * rng.gen_range(-0.25..0.25));
                        let rho = r * (1.0 - amp * rng.gen_range(0.0..0.1));
                        rounded(Point::xy(rho * th.cos(), rho * th.sin()))
                    })
                    .collect()
            }
            _ => (0..nb)
                .map(|k| {
                    let d = fibonacci_direction(k, nb);
                    let rho = r * (1.0 - amp * rng.gen_range(0.0..0.1));
                    rounded(Point::xyz(rho * d[0], rho * d[1], rho * d[2]))
                })
                .collect(),
        };
        if geometry::convex_hull(&pts).map(|h| h.len() == nb).unwrap_or(false) {
            return pts;
        }
    }
    unreachable!("unperturbed layout is convex")
}

fn zone_vertices(dim: usize, center: Point, radius: f64, rot: f64) -> Vec<Point> {
    match dim {
        2 => (0..6)
            .map(|k| {
                let th = rot + std::f64::consts::TAU * k as f64 / 6.0;
                rounded(Point::xy(center.x() + radius * th.cos(), center.y() + radius * th.sin()))
            })
            .collect(),
        _ => {
            let (c, s) = (rot.cos(), rot.sin());
            let axes = [[c, s, 0.0], [-s, c, 0.0], [0.0, 0.0, 1.0]];
            let mut out = Vec::new();
            for a in axes {
                for sign in [1.0, -1.0] {
                    out.push(rounded(Point::xyz(
                        center.x() + sign * radius * a[0],
                        center.y() + sign * radius * a[1],
                        center.z() + sign * radius * a[2],
                    )));
                }
            }
            out
        }
    }
}

fn zone_measure(dim: usize, radius: f64) -> f64 {
    match dim {
        2 => 1.5 * 3f64.sqrt() * radius * radius,
        _ => 4.0 / 3.0 * radius.powi(3),
    }
}

/// Deterministic random scenario for `params`.
///
/// Draws are repeated from the same random stream until the scenario plans
/// without error, so every returned file builds a graph and a weight
/// schedule.
pub fn generate(params: &GenerateParams) -> Result<ScenarioFile, GenerateError> {
    params.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut last = String::new();
    for _ in 0..50 {
        let file = draw(params, &mut rng)?;
        match file.into_scenario().map_err(|e| e.to_string()).and_then(|s| plan(&s).map_err(|e| e.to_string())) {
            Ok(_) => return Ok(file),
            Err(e) => last = e,
        }
    }
    Err(GenerateError::InfeasibleParams(format!("no plannable draw: {last}")))
}

fn draw(params: &GenerateParams, rng: &mut ChaCha8Rng) -> Result<ScenarioFile, GenerateError> {
    let dim = params.dim;
    let r = params.radius;

    let boundary = boundary_points(params, rng);
    let hull = ConvexPolytope::hull_of(&boundary).map_err(|e| GenerateError::InfeasibleParams(e.to_string()))?;
    let inner_margin = 0.03 * r;

    // target zone: its 1.1-scaled outline keeps clear of the hull
    let middle = match dim {
        2 => geometry::polygon_centroid(&hull.vertices),
        _ => geometry::mean(&hull.vertices),
    }
    .expect("non-empty hull");
    let inradius = -hull.signed_distance(&middle);
    let center = {
        let mut c = middle;
        for v in c.coords_mut() {
            *v += rng.gen_range(-0.25..0.25) * inradius;
        }
        rounded(c)
    };
    let rot = rng.gen_range(0.0..std::f64::consts::TAU);
    let mut zr = 0.3 * r * rng.gen_range(0.9..1.1);
    let zone = loop {
        let z = zone_vertices(dim, center, zr, rot);
        let clear = z
            .iter()
            .all(|v| hull.signed_distance(&v.scaled_about(&center, 1.2)) < -inner_margin);
        if clear {
            break z;
        }
        zr *= 0.9;
        if zr < 1e-3 * r {
            return Err(GenerateError::InfeasibleParams("no room for a target zone".into()));
        }
    };

    // interior agents
    let interior = params.agents - params.boundary;
    let hull_measure = match dim {
        2 => geometry::polygon_signed_area(&hull.vertices).abs(),
        _ => (4.0 / 3.0) * std::f64::consts::PI * r.powi(3) * 0.8,
    };
    let mut min_sep = 0.5 * (hull_measure / interior as f64).powf(1.0 / dim as f64);
    let spacing = (zone_measure(dim, zr) / (params.sample_density * interior as f64)).powf(1.0 / dim as f64);
    let spacing = (spacing * 1e4).round() / 1e4;
    let mut core = center;
    for (k, v) in core.coords_mut().iter_mut().enumerate() {
        *v = round6(*v + spacing * [0.31, 0.17, 0.23][k]);
    }
    let mut inner = vec![core];
    let mut tries = 0usize;
    while inner.len() < interior {
        let mut c = Point::zeros(dim);
        for v in c.coords_mut() {
            *v = rng.gen_range(-r..r);
        }
        let c = rounded(c);
        tries += 1;
        if tries > 20_000 {
            min_sep *= 0.8;
            tries = 0;
        }
        if hull.signed_distance(&c) >= -inner_margin {
            continue;
        }
        if inner.iter().any(|q| q.distance(&c) < min_sep) {
            continue;
        }
        inner.push(c);
    }

    // uncooperative agents among the non-core interior agents
    let mut picks: Vec<usize> = (1..interior).collect();
    picks.shuffle(rng);
    picks.truncate(params.uncooperative);

    let mut entries: Vec<(Point, Role, bool)> = boundary.into_iter().map(|p| (p, Role::Boundary, false)).collect();
    for (k, p) in inner.into_iter().enumerate() {
        let role = if picks.contains(&k) {
            Role::Uncooperative
        } else {
            Role::Cooperative
        };
        entries.push((p, role, k == 0));
    }
    let mut ids: Vec<u32> = (1..=params.agents as u32).collect();
    ids.shuffle(rng);
    if let Some(want) = params.core_id {
        let core_slot = params.boundary;
        let other = ids.iter().position(|id| *id == want).expect("checked range");
        ids.swap(core_slot, other);
    }
    let mut agents: Vec<AgentEntry> = entries
        .into_iter()
        .zip(ids)
        .map(|((position, role, _), id)| AgentEntry {
            id: AgentId(id),
            position,
            role: Some(role.as_str().to_string()),
        })
        .collect();
    agents.sort_by_key(|a| a.id);

    Ok(ScenarioFile {
        dimension: dim,
        seed: params.seed,
        margin: 0.10,
        times: TimeConfig::default(),
        gains: Gains::default(),
        output: OutputSection::default(),
        targets: TargetsSection {
            zone: Some(zone),
            samples: None,
            grid_spacing: Some(spacing),
        },
        leader_final: LeaderFinalSection::default(),
        agents,
    })
}
