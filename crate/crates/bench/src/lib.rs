//! Fixtures shared by the pipeline benchmarks.

use ffnet::generate::{generate, GenerateParams};
use ffnet::sim::{self, Plan};
use ffnet::Scenario;

/// Generated scenario with `agents` agents, a boundary of roughly a sixth of
/// the team and the given uncooperative count.
pub fn scenario(agents: usize, uncooperative: usize, seed: u64) -> Scenario {
    let boundary = (agents / 6).max(4);
    let params = GenerateParams::new(agents, boundary, seed).with_uncooperative(uncooperative);
    generate(&params)
        .expect("feasible parameters")
        .into_scenario()
        .expect("generated scenarios parse")
}

pub fn planned(agents: usize, seed: u64) -> (Scenario, Plan) {
    let s = scenario(agents, 0, seed);
    let p = sim::plan(&s).expect("generated scenarios plan");
    (s, p)
}

/// Shorten the horizon so a benchmark iteration stays small.
pub fn with_horizon(mut s: Scenario, t_end: f64) -> Scenario {
    s.times.t_end = t_end;
    s.times.tf = s.times.tf.min(t_end);
    s
}
