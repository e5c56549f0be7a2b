//! End-to-end continuation solves of the calibration systems on exact
//! synthetic data: the tracked solution set must contain the ground truth.
//!
//! Measurements are normalized to unit scale before the systems are built;
//! without that the H-block entries sit four orders of magnitude below the
//! offsets and the Jacobian at the truth is numerically singular.

use tdoa_selfcal::groebner::ground_truth_unknowns;
use tdoa_selfcal::polyform::{
    build_6r4s_system, build_formulation_system, real_to_complex, Formulation, Reals,
};
use tdoa_selfcal::scene::{generate_scene, synthesize_measurements, PlanarScene};
use tdoa_selfcal::solver::{filter_candidates, solve_total_degree, square_up, TrackerConfig};

fn relative_gap(a: &[f64], b: &[f64]) -> f64 {
    let diff: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    let scale: f64 = 1.0 + b.iter().map(|y| y * y).sum::<f64>().sqrt();
    diff / scale
}

/// Divide every measurement by the RMS magnitude; returns the scaled
/// matrix and the scale. Solving the scaled problem is exactly solving the
/// geometry shrunk by that factor.
fn normalize(f: &[Vec<f64>]) -> (Vec<Vec<f64>>, f64) {
    let count: usize = f.iter().map(|r| r.len()).sum();
    let total: f64 = f.iter().flat_map(|r| r.iter().map(|v| v * v)).sum();
    let s = (total / count.max(1) as f64).sqrt().max(1e-300);
    (f.iter().map(|row| row.iter().map(|v| v / s).collect()).collect(), s)
}

fn scaled_scene(scene: &PlanarScene, s: f64) -> PlanarScene {
    PlanarScene {
        receivers: scene.receivers.iter().map(|p| [p[0] / s, p[1] / s]).collect(),
        transmitters: scene.transmitters.iter().map(|p| [p[0] / s, p[1] / s]).collect(),
        offsets: scene.offsets.iter().map(|o| o / s).collect(),
    }
}

#[test]
fn nine_receivers_three_transmitters_recovers_truth() {
    let scene = generate_scene(9, 3, 71);
    let f_raw = synthesize_measurements(&scene, 0.0, 0).values;
    let (f, s) = normalize(&f_raw);
    let truth = ground_truth_unknowns(&scaled_scene(&scene, s)).expect("nondegenerate scene");

    let sys = build_formulation_system(&Reals, &f, &Formulation::abc(0, 0, 8)).unwrap().normalized();
    assert_eq!(sys.equations.len(), 8);
    assert_eq!(sys.nvars, 8);

    let started = std::time::Instant::now();
    let out = solve_total_degree(
        &real_to_complex(&sys),
        &TrackerConfig { seed: 2, ..TrackerConfig::default() },
    )
    .unwrap();
    let elapsed = started.elapsed().as_secs_f64();
    println!(
        "9r/3s: {} paths, {} solutions, stats {:?}, {elapsed:.1}s",
        out.stats.total,
        out.solutions.len(),
        out.stats
    );
    assert_eq!(out.stats.total, 6561);
    assert!(out.solutions.len() >= 70, "found {} distinct solutions", out.solutions.len());
    assert!(out.solutions.len() <= 75, "found {} distinct solutions", out.solutions.len());

    let candidates = filter_candidates(&out.solutions, &sys, 1e-6, 1e-6);
    assert!(!candidates.is_empty());
    let tv = truth.to_vec();
    let best = candidates
        .iter()
        .map(|c| relative_gap(&c.unknowns.to_vec(), &tv))
        .fold(f64::INFINITY, f64::min);
    assert!(best < 1e-6, "closest candidate is {best:.3e} away from truth");
}

#[test]
fn six_receivers_four_transmitters_recovers_truth() {
    let scene = generate_scene(6, 4, 29);
    let f_raw = synthesize_measurements(&scene, 0.0, 0).values;
    let (f, s) = normalize(&f_raw);
    let truth = ground_truth_unknowns(&scaled_scene(&scene, s)).expect("nondegenerate scene");

    let full = build_6r4s_system(&Reals, &f).unwrap().normalized();
    assert_eq!(full.equations.len(), 16);
    assert_eq!(full.nvars, 9);

    let squared = square_up(&real_to_complex(&full), 9, 5).unwrap();
    let squared_sys = squared.system.normalized();
    let degrees: Vec<usize> =
        squared_sys.equations.iter().map(|e| e.total_degree()).collect();
    let bezout: usize = degrees.iter().product();
    assert_eq!(bezout, 26244, "degree-blocked square-up keeps 3^8 * 4 paths");

    let started = std::time::Instant::now();
    let out = solve_total_degree(
        &squared_sys,
        &TrackerConfig { seed: 3, ..TrackerConfig::default() },
    )
    .unwrap();
    let elapsed = started.elapsed().as_secs_f64();
    println!(
        "6r/4s: {} paths, {} solutions, stats {:?}, {elapsed:.1}s",
        out.stats.total,
        out.solutions.len(),
        out.stats
    );

    // Residuals are checked against the full 16-equation system, not the
    // squared-up surrogate that was tracked.
    let candidates = filter_candidates(&out.solutions, &full, 1e-6, 1e-6);
    assert!(!candidates.is_empty());
    let tv = truth.to_vec();
    let best = candidates
        .iter()
        .map(|c| relative_gap(&c.unknowns.to_vec(), &tv))
        .fold(f64::INFINITY, f64::min);
    assert!(best < 1e-6, "closest candidate is {best:.3e} away from truth");
}
