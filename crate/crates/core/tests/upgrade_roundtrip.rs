//! Round-trip property: scene → measurements → exact (H, b, offsets) →
//! positions must reproduce the scene up to a rigid motion, across many
//! random instances of both supported configurations.

use tdoa_selfcal::groebner::ground_truth_unknowns;
use tdoa_selfcal::scene::{error_report, generate_scene, synthesize_measurements};
use tdoa_selfcal::upgrade::upgrade_positions;

fn round_trip(m: usize, n: usize, instances: u64) {
    for seed in 0..instances {
        let scene = generate_scene(m, n, seed);
        let ms = synthesize_measurements(&scene, 0.0, seed);
        let truth = ground_truth_unknowns(&scene).expect("random scenes are nondegenerate");
        let recovered = upgrade_positions(&truth, &ms)
            .unwrap_or_else(|e| panic!("seed {seed}: upgrade failed: {e}"));
        let report = error_report(&recovered, &scene).unwrap();
        assert!(
            report.rel_pos_error <= 1e-9,
            "seed {seed}: position error {:.3e}",
            report.rel_pos_error
        );
        assert!(
            report.rel_offset_error <= 1e-9,
            "seed {seed}: offset error {:.3e}",
            report.rel_offset_error
        );
    }
}

#[test]
fn nine_receivers_three_transmitters_round_trip() {
    round_trip(9, 3, 500);
}

#[test]
fn six_receivers_four_transmitters_round_trip() {
    round_trip(6, 4, 500);
}
