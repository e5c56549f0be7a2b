//! Temporary probe: why does the 6r/4s squared-up solve miss the truth?

use num_complex::Complex64;
use tdoa_selfcal::groebner::ground_truth_unknowns;
use tdoa_selfcal::polyform::{build_6r4s_system, real_to_complex, Complexes, Reals};
use tdoa_selfcal::scene::{generate_scene, synthesize_measurements};
use tdoa_selfcal::solver::{solve_total_degree, square_up, CompiledSystem, TrackerConfig};

#[test]
#[ignore]
fn probe_squared_system_at_truth() {
    let scene = generate_scene(6, 4, 29);
    let truth = ground_truth_unknowns(&scene).expect("nondegenerate scene");
    let f = synthesize_measurements(&scene, 0.0, 0).values;
    let full = build_6r4s_system(&Reals, &f).unwrap();

    let tv = truth.to_vec();
    println!("truth unknowns: {tv:?}");
    println!("full residual at truth: {:?}", full.residual_inf(&tv));
    println!("full coeff scale: {:?}", full.coeff_scale());

    let squared = square_up(&real_to_complex(&full), 9, 5).unwrap();
    let tc: Vec<Complex64> = tv.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    println!("squared residual at truth: {:?}", squared.system.residual_inf(&tc));
    println!("squared coeff scale: {:?}", squared.system.coeff_scale());

    // Jacobian conditioning at the truth.
    let cs = CompiledSystem::new(&squared.system);
    let mut scratch = cs.make_scratch();
    cs.prepare(&tc, &mut scratch);
    let mut jac = vec![Complex64::new(0.0, 0.0); 81];
    cs.jacobian_into(&scratch, &mut jac);
    let m = nalgebra::DMatrix::from_row_slice(9, 9, &jac);
    let svd = m.svd(false, false);
    let smax = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    let smin = svd.singular_values.iter().cloned().fold(f64::INFINITY, f64::min);
    println!("squared Jacobian at truth: smax {smax:.3e} smin {smin:.3e} cond {:.3e}", smax / smin);

    let out = solve_total_degree(
        &squared.system,
        &TrackerConfig { seed: 3, ..TrackerConfig::default() },
    )
    .unwrap();
    println!("stats: {:?}, {} distinct", out.stats, out.solutions.len());
    let mut best: Vec<(f64, f64, f64)> = out
        .solutions
        .iter()
        .map(|s| {
            let dist: f64 =
                s.iter().zip(&tc).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
            let imag: f64 = s.iter().map(|c| c.im * c.im).sum::<f64>().sqrt();
            let real: Vec<f64> = s.iter().map(|c| c.re).collect();
            let res = full.residual_inf(&real).unwrap_or(f64::NAN);
            (dist, imag, res)
        })
        .collect();
    best.sort_by(|a, b| a.0.total_cmp(&b.0));
    println!("closest endpoints to truth (dist, imag, full residual):");
    for row in best.iter().take(8) {
        println!("  {:.3e}  {:.3e}  {:.3e}", row.0, row.1, row.2);
    }
}
