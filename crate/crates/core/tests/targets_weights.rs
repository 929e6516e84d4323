use std::collections::BTreeMap;

use ffnet::formation::{self, build_actual, Formation};
use ffnet::generate::{generate, GenerateParams};
use ffnet::geometry::{self, Point};
use ffnet::targets::{compute_desired, LeaderPlacement, TargetSet, Zone};
use ffnet::weights::{self, beta, WeightSchedule};
use ffnet::{sim, AgentId, Role};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn orient(a: &Point, b: &Point, c: &Point) -> f64 {
    (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x())
}

fn in_triangle(v: &[Point], p: &Point) -> bool {
    let d = [orient(&v[0], &v[1], p), orient(&v[1], &v[2], p), orient(&v[2], &v[0], p)];
    let eps = 1e-12;
    d.iter().all(|x| *x >= -eps) || d.iter().all(|x| *x <= eps)
}

fn triangle_team() -> Formation {
    Formation::new(
        2,
        vec![
            (AgentId(1), Point::xy(0.0, 0.0)),
            (AgentId(2), Point::xy(6.0, 0.0)),
            (AgentId(3), Point::xy(3.0, 6.0)),
            (AgentId(4), Point::xy(3.0, 2.0)),
            (AgentId(5), Point::xy(3.0, 0.5)),
            (AgentId(6), Point::xy(2.5, 1.2)),
            (AgentId(7), Point::xy(4.1, 2.9)),
        ],
        Point::xy(3.0, 2.0),
    )
    .unwrap()
}

/// Final positions from a brute-force containment and mean over a 10x10
/// grid, recomputed independently layer by layer.
#[test]
fn grid_capture_matches_brute_force_oracle() {
    let f = triangle_team();
    let g = build_actual(&f).unwrap();
    let leader_p: BTreeMap<AgentId, Point> = [
        (AgentId(1), Point::xy(1.0, 0.7)),
        (AgentId(2), Point::xy(5.3, 0.9)),
        (AgentId(3), Point::xy(3.2, 5.1)),
    ]
    .into_iter()
    .collect();
    let samples: Vec<Point> = (0..10)
        .flat_map(|i| (0..10).map(move |j| Point::xy(0.9137 + 0.4821 * i as f64, 0.6113 + 0.4777 * j as f64)))
        .collect();
    let targets = TargetSet::new(samples.clone(), None).unwrap();
    let desired = compute_desired(&g, &f, &targets, &leader_p).unwrap();

    let mut oracle: BTreeMap<AgentId, Point> = leader_p.clone();
    oracle.insert(AgentId(4), f.position(AgentId(4)).unwrap());
    for layer in &g.layers[1..] {
        for id in layer {
            let verts: Vec<Point> = g.mentors_of(*id).iter().map(|m| oracle[m]).collect();
            let hits: Vec<&Point> = samples.iter().filter(|s| in_triangle(&verts, s)).collect();
            assert!(!hits.is_empty(), "agent {id}");
            let (sx, sy) = hits.iter().fold((0.0, 0.0), |(x, y), p| (x + p.x(), y + p.y()));
            oracle.insert(*id, Point::xy(sx / hits.len() as f64, sy / hits.len() as f64));
            assert_eq!(desired.captured[id].len(), hits.len());
        }
    }
    for (id, p) in &oracle {
        assert!(desired.p[id].distance(p) < 1e-12, "agent {id}: {:?} vs {p:?}", desired.p[id]);
    }
    assert!(desired.empty_capture.is_empty());
}

#[test]
fn generated_leaders_on_a_circle_zone() {
    let zone = Zone::new(
        (0..64)
            .map(|k| {
                let th = std::f64::consts::TAU * k as f64 / 64.0;
                Point::xy(th.cos(), th.sin())
            })
            .collect(),
    )
    .unwrap();
    let f = Formation::new(
        2,
        (0..8)
            .map(|k| {
                let th = std::f64::consts::TAU * k as f64 / 8.0;
                (AgentId(k + 1), Point::xy(5.0 * th.cos(), 5.0 * th.sin()))
            })
            .chain([(AgentId(9), Point::xy(0.1, 0.0))])
            .collect::<Vec<_>>(),
        Point::xy(0.0, 0.0),
    )
    .unwrap();
    let t = TargetSet::grid(zone, 0.2).unwrap();
    let p = ffnet::targets::leader_final_positions(&f, &t, &LeaderPlacement::Generated { scale: 1.1 }).unwrap();
    let mut angles: Vec<f64> = p
        .values()
        .map(|q| {
            // the scaled 64-gon has circumradius 1.1
            assert!(q.norm() <= 1.1 + 1e-12 && q.norm() > 1.1 * (std::f64::consts::PI / 64.0).cos() - 1e-12);
            q.y().atan2(q.x())
        })
        .collect();
    angles.sort_by(f64::total_cmp);
    for w in angles.windows(2) {
        assert!((w[1] - w[0] - std::f64::consts::FRAC_PI_4).abs() < 1e-9);
    }
}

/// Least-squares weights from the normal equations of the augmented system.
fn normal_equations(verts: &[Point], p: &Point) -> Vec<f64> {
    let n = p.dim();
    let a = DMatrix::from_fn(n + 1, verts.len(), |r, c| if r < n { verts[c].coords()[r] } else { 1.0 });
    let mut b = DVector::from_element(n + 1, 1.0);
    for r in 0..n {
        b[r] = p.coords()[r];
    }
    let ata = a.transpose() * &a;
    let atb = a.transpose() * b;
    ata.cholesky().expect("positive definite").solve(&atb).iter().copied().collect()
}

#[test]
fn weights_match_least_squares_oracle() {
    for seed in 0..10 {
        let s = generate(&GenerateParams::new(40 + seed as usize, 8, seed)).unwrap().into_scenario().unwrap();
        let plan = sim::plan(&s).unwrap();
        let omega = weights::initial_weights(&plan.graph, &s.formation).unwrap();
        for (id, w) in &omega {
            let verts: Vec<Point> = plan.graph.mentors_of(*id).iter().map(|m| s.formation.position(*m).unwrap()).collect();
            let oracle = normal_equations(&verts, &s.formation.position(*id).unwrap());
            for (a, b) in w.iter().zip(&oracle) {
                assert!((a - b).abs() < 1e-9, "agent {id}: {w:?} vs {oracle:?}");
            }
        }
        // final weights reconstruct the final positions
        for (id, w) in &plan.schedule.varpi {
            let verts: Vec<Point> = plan.graph.mentors_of(*id).iter().map(|m| plan.desired.p[m]).collect();
            assert!(geometry::combine(w, &verts).distance(&plan.desired.p[id]) < 1e-9);
            assert!(w.iter().all(|x| *x >= 0.0));
        }
    }
}

#[test]
fn blended_weights_stay_on_the_simplex() {
    let s = generate(&GenerateParams::new(60, 9, 4)).unwrap().into_scenario().unwrap();
    let plan = sim::plan(&s).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..200 {
        let t = rng.gen_range(-2.0..20.0);
        for w in weights::weights_at(&plan.schedule, t).unwrap().values() {
            assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(w.iter().all(|x| *x >= 0.0));
        }
    }
    let after = weights::weights_at(&plan.schedule, 15.0 + 1e-9).unwrap();
    assert_eq!(after, plan.schedule.varpi);
    let before = weights::weights_at(&plan.schedule, 0.0).unwrap();
    assert_eq!(before, plan.schedule.omega);
}

#[test]
fn beta_is_monotone_with_flat_ends() {
    let mut prev = 0.0;
    for k in 0..=1000 {
        let b = beta(k as f64 * 0.015, 0.0, 15.0).unwrap();
        assert!(b >= prev);
        prev = b;
    }
    assert_eq!(beta(0.25, 0.0, 1.0).unwrap(), 0.103515625);
    let h = 1e-6;
    let slope0 = beta(h, 0.0, 1.0).unwrap() / h;
    let slope1 = (1.0 - beta(1.0 - h, 0.0, 1.0).unwrap()) / h;
    assert!(slope0 < 1e-9 && slope1 < 1e-9);
}

#[test]
fn schedule_rejects_empty_interval() {
    assert!(WeightSchedule::new(BTreeMap::new(), BTreeMap::new(), 1.0, 1.0).is_err());
}

#[test]
fn roles_of_planned_agents() {
    let s = generate(&GenerateParams::new(30, 6, 8).with_uncooperative(2)).unwrap().into_scenario().unwrap();
    let plan = sim::plan(&s).unwrap();
    for id in plan.graph.ids_with_role(Role::Uncooperative) {
        assert_eq!(plan.desired.p[&id], s.formation.position(id).unwrap());
    }
    let core = plan.graph.core_id;
    assert_eq!(plan.desired.p[&core], s.formation.position(core).unwrap());
    assert!(formation::topological_order(&plan.graph).is_ok());
}
