use ffnet::dynamics::{self, check_hurwitz, virtual_control, AgentState, Gains};
use ffnet::geometry::Point;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Unit step response of `16 / (s + 2)^4` from rest.
fn analytic(t: f64) -> f64 {
    1.0 - (-2.0 * t).exp() * (1.0 + 2.0 * t + 2.0 * t * t + 4.0 / 3.0 * t.powi(3))
}

fn integrate(t_end: f64, dt: f64) -> AgentState {
    let g = Gains::default();
    let mut s = AgentState::at_rest(Point::xy(0.0, 0.0));
    let steps = (t_end / dt).round() as usize;
    for _ in 0..steps {
        s = dynamics::step(&s, &Point::xy(1.0, 0.0), &g, dt).unwrap();
    }
    s
}

#[test]
fn step_response_matches_closed_form() {
    for t in [0.5, 1.0, 2.0, 4.0] {
        let s = integrate(t, 0.001);
        assert!((s.pos.x() - analytic(t)).abs() < 1e-10, "t = {t}");
        assert_eq!(s.pos.y(), 0.0);
    }
}

#[test]
fn rk4_error_ratio_under_step_halving() {
    let t = 2.0;
    let e1 = (integrate(t, 0.1).pos.x() - analytic(t)).abs();
    let e2 = (integrate(t, 0.05).pos.x() - analytic(t)).abs();
    let ratio = e1 / e2;
    assert!((12.0..=20.0).contains(&ratio), "ratio {ratio} ({e1:e} / {e2:e})");
}

#[test]
fn settles_to_a_constant_reference() {
    let g = Gains::default();
    let target = Point::xyz(3.0, -2.0, 1.5);
    let mut s = AgentState::at_rest(Point::xyz(-1.0, 4.0, 0.0));
    for _ in 0..3000 {
        s = dynamics::step(&s, &target, &g, 0.01).unwrap();
    }
    assert!(s.pos.distance(&target) < 1e-6);
    assert!(s.vel.norm() < 1e-6 && s.acc.norm() < 1e-6 && s.jerk.norm() < 1e-6);
}

#[test]
fn control_law_matches_duplicate_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let mut r = || rng.gen_range(-5.0..5.0f64);
        let g = Gains { k1: r().abs() + 0.1, k2: r().abs() + 0.1, k3: r().abs() + 0.1, k4: r().abs() + 0.1 };
        let s = AgentState {
            pos: Point::xy(r(), r()),
            vel: Point::xy(r(), r()),
            acc: Point::xy(r(), r()),
            jerk: Point::xy(r(), r()),
        };
        let rd = Point::xy(r(), r());
        let v = virtual_control(&s, &rd, &g);
        for k in 0..2 {
            let c = |p: &Point| p.coords()[k];
            let expect = g.k4 * (c(&rd) - c(&s.pos)) - g.k3 * c(&s.vel) - g.k2 * c(&s.acc) - g.k1 * c(&s.jerk);
            assert!((v.coords()[k] - expect).abs() < 1e-12);
        }
    }
}

#[test]
fn hurwitz_gate() {
    assert!(check_hurwitz(&Gains { k1: 8.0, k2: 24.0, k3: 32.0, k4: 16.0 }));
    assert!(!check_hurwitz(&Gains { k1: 1.0, k2: 1.0, k3: 1.0, k4: 1.0 }));
    // unstable gains diverge and are reported
    let g = Gains { k1: 1.0, k2: 1.0, k3: 1.0, k4: 1.0 };
    let mut s = AgentState::at_rest(Point::xy(0.0, 0.0));
    let mut diverged = false;
    for _ in 0..100_000 {
        match dynamics::step_with_limit(&s, &Point::xy(1.0, 0.0), &g, 0.01, 1e3) {
            Ok(next) => s = next,
            Err(_) => {
                diverged = true;
                break;
            }
        }
    }
    assert!(diverged);
}
