use std::path::PathBuf;

use dnac_core::disturbances::{DisturbanceConfig, DisturbanceKind, DisturbanceSet, FORCE_BOUND, TORQUE_BOUND};
use dnac_core::experiments::ScenarioConfig;
use dnac_core::plant::norm3;
use dnac_core::State;

fn fixture(name: &str) -> ScenarioConfig {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name);
    ScenarioConfig::from_file(p).unwrap()
}

fn only(cfg: &ScenarioConfig, pick: fn(&DisturbanceKind) -> bool) -> Vec<DisturbanceConfig> {
    cfg.disturbances.iter().filter(|d| pick(&d.kind)).cloned().collect()
}

/// Mean force and torque magnitude at a hovering position, after the wind
/// has ramped up.
fn mean_wrench(configs: &[DisturbanceConfig], p: [f64; 3], seed: u64) -> (f64, f64) {
    let mut set = DisturbanceSet::new(configs, seed).unwrap();
    let s = State::at_rest(p);
    let (mut f, mut t) = (0.0, 0.0);
    let n = 400;
    for k in 0..n {
        let w = set.wrenches(&s, 10.0 + k as f64 * 0.001, 0.001);
        for w in w {
            f += norm3(&w.force);
            t += norm3(&w.torque);
        }
    }
    (f / n as f64, t / n as f64)
}

/// Points filling one rose petal, centred on polar angle `phi`.
fn petal_grid(phi: f64, a: f64) -> Vec<[f64; 3]> {
    let mut pts = Vec::new();
    for i in 0..5 {
        let dphi = (i as f64 - 2.0) * 0.12;
        let theta = phi + dphi;
        let r_max = a * (2.0 * theta).sin().abs();
        for j in 1..=4 {
            let r = r_max * j as f64 / 4.0;
            pts.push([r * theta.cos(), r * theta.sin(), 1.0]);
        }
    }
    pts
}

#[test]
fn rose_disturbances_are_localized() {
    let cfg = fixture("exp2_rose.json");
    let wind = only(&cfg, |k| matches!(k, DisturbanceKind::Wind(_)));
    let walls = only(&cfg, |k| matches!(k, DisturbanceKind::Wall(_)));
    assert_eq!((wind.len(), walls.len()), (1, 1));
    let q = std::f64::consts::FRAC_PI_4;
    let petals = [("right-upper", q), ("left-upper", 3.0 * q), ("left-lower", 5.0 * q), ("right-lower", 7.0 * q)];
    let mut wind_force = Vec::new();
    let mut wall_torque = Vec::new();
    for (_, phi) in petals {
        let pts = petal_grid(phi, 2.8);
        let n = pts.len() as f64;
        wind_force.push(pts.iter().map(|&p| mean_wrench(&wind, p, 0).0).sum::<f64>() / n);
        wall_torque.push(pts.iter().map(|&p| mean_wrench(&walls, p, 0).1).sum::<f64>() / n);
    }
    let right_wind = wind_force[0].min(wind_force[3]);
    let left_wind = wind_force[1].max(wind_force[2]);
    assert!(right_wind > 0.3, "wind on right petals {wind_force:?}");
    assert!(left_wind < 0.1 * right_wind, "wind leaks to left petals {wind_force:?}");
    let left_wall = wall_torque[1].min(wall_torque[2]);
    let right_wall = wall_torque[0].max(wall_torque[3]);
    assert!(left_wall > 1e-3, "no wall effect on left petals {wall_torque:?}");
    assert!(right_wall < 0.1 * left_wall, "wall effect on right petals {wall_torque:?}");
}

#[test]
fn circle_wind_is_steady_after_ramp() {
    let cfg = fixture("exp1_circle.json");
    let wind = only(&cfg, |k| matches!(k, DisturbanceKind::Wind(_)));
    let mut set = DisturbanceSet::new(&wind, 0).unwrap();
    for p in [[1.0, 0.0, 1.0], [0.0, 1.0, 1.0], [-0.7, -0.7, 1.0]] {
        let s = State::at_rest(p);
        let early = set.wrenches(&s, 10.0, 0.001);
        let late = set.wrenches(&s, 110.0, 0.001);
        assert_eq!(early, late);
    }
}

#[test]
fn default_disturbances_within_bounds_everywhere() {
    for name in ["exp1_circle.json", "exp2_rose.json"] {
        let cfg = fixture(name);
        for seed in 0..3 {
            for x in -6..=6 {
                for y in -6..=6 {
                    let mut set = DisturbanceSet::new(&cfg.disturbances, seed).unwrap();
                    let s = State::at_rest([0.5 * x as f64, 0.5 * y as f64, 1.0]);
                    for k in 0..200 {
                        for w in set.wrenches(&s, k as f64 * 0.05, 0.001) {
                            assert!(norm3(&w.force) <= FORCE_BOUND);
                            assert!(norm3(&w.torque) <= TORQUE_BOUND);
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn disturbance_streams_are_seeded() {
    let cfg = fixture("exp2_rose.json");
    let s = State::at_rest([-2.3, 2.3, 1.0]);
    let run = |seed| {
        let mut set = DisturbanceSet::new(&cfg.disturbances, seed).unwrap();
        (0..300).map(|k| set.wrenches(&s, k as f64 * 0.001, 0.001)).collect::<Vec<_>>()
    };
    assert_eq!(run(4), run(4));
    assert_ne!(run(4), run(5));
}
