//! Metric upgrade of algebraic solutions: from (H, b, offsets) back to
//! receiver and transmitter positions.
//!
//! Once the offsets are known the compaction matrix is numeric and the
//! factorization D̃ = R̃ᵀS̃ can be pinned by S̃ = I. Positions then follow
//! from the matrix L with H = (LᵀL)⁻¹:
//!
//! ```text
//! r₁ = 0       rᵢ = L⁻ᵀ·R̃ᵢ₋₁          (R̃ᵢ₋₁ = row i−1 of the compaction)
//! s₁ = L·b     sⱼ = L·(−½·eⱼ₋₁ + b)
//! ```
//!
//! L is recovered as the upper-triangular Cholesky factor of H⁻¹, which
//! spends the rotational part of the gauge freedom. The reflection cannot
//! be decided from range data at all (a mirrored scene produces identical
//! distances), so both mirror images are costed against the measurements
//! and ties resolve to the unreflected scene. With a fourth transmitter
//! the first three are upgraded as above and the last is trilaterated from
//! the recovered receivers. A short local polish of the range residuals
//! finishes the upgrade, since going through H squares the conditioning of
//! the transmitter frame.

use nalgebra::{DMatrix, DVector, Matrix2, Vector2};
use thiserror::Error;

use crate::compaction::compact_pseudoranges;
use crate::polyform::UnknownVector;
use crate::scene::{gauge_fix, tdoa_cost, MeasurementSet, PlanarScene};

/// Rank-deficiency threshold for the trilateration normal matrix.
const COLLINEARITY_COND_LIMIT: f64 = 1e10;

#[derive(Debug, Error, PartialEq)]
pub enum UpgradeError {
    #[error("H is not positive definite")]
    NotSpd,
    #[error("receivers are collinear; trilateration is rank-deficient")]
    CollinearReceivers,
    #[error("measurement shape does not fit the candidate")]
    WrongConfiguration,
}

/// ad − bc with the cancellation compensated through fused multiplies;
/// accurate to ~1.5 ulp of the true determinant regardless of how severe
/// the cancellation is.
pub(crate) fn det2_accurate(a: f64, b: f64, c: f64, d: f64) -> f64 {
    let w = b * c;
    let e = b.mul_add(c, -w);
    a.mul_add(d, -w) - e
}

/// Upper-triangular L with LᵀL = H⁻¹ and positive diagonal, in closed form.
/// For M = H⁻¹ and L = [a c; 0 d]: a² = M₀₀, a·c = M₀₁, c² + d² = M₁₁,
/// which collapses to a = √(h₂₂/det), c = −h₁₂/√(h₂₂·det), d = 1/√h₂₂
/// (the last using M₁₁ − c² = det(M)/M₀₀ = 1/h₂₂ exactly).
pub fn recover_l(h: &[f64; 3]) -> Result<Matrix2<f64>, UpgradeError> {
    let det = det2_accurate(h[0], h[1], h[1], h[2]);
    if !(h[0] > 0.0 && det > 0.0) {
        return Err(UpgradeError::NotSpd);
    }
    let a = (h[2] / det).sqrt();
    let c = -h[1] / (h[2] * det).sqrt();
    let d = 1.0 / h[2].sqrt();
    Ok(Matrix2::new(a, c, 0.0, d))
}

/// Position of one extra point from its ranges to known receivers, by
/// linear least squares on the differenced circle equations
/// 2(rᵢ−r₁)ᵀs = ‖rᵢ‖² − ‖r₁‖² − ρᵢ² + ρ₁². Returns the point and the RMS
/// residual of the original (nonlinear) circle system.
pub fn trilaterate_extra(
    receivers: &[[f64; 2]],
    ranges: &[f64],
) -> Result<([f64; 2], f64), UpgradeError> {
    let m = receivers.len();
    if m < 3 || ranges.len() != m {
        return Err(UpgradeError::WrongConfiguration);
    }
    let norm2 = |p: [f64; 2]| p[0] * p[0] + p[1] * p[1];
    let a = DMatrix::from_fn(m - 1, 2, |i, k| 2.0 * (receivers[i + 1][k] - receivers[0][k]));
    let rhs = DVector::from_fn(m - 1, |i, _| {
        norm2(receivers[i + 1]) - norm2(receivers[0]) - ranges[i + 1] * ranges[i + 1]
            + ranges[0] * ranges[0]
    });
    let svd = a.svd(true, true);
    let (smax, smin) = (svd.singular_values[0], svd.singular_values[1]);
    if !(smin > 0.0) || smax / smin > COLLINEARITY_COND_LIMIT {
        return Err(UpgradeError::CollinearReceivers);
    }
    let sol = svd.solve(&rhs, 0.0).map_err(|_| UpgradeError::CollinearReceivers)?;
    let point = [sol[0], sol[1]];
    let mut ss = 0.0;
    for (r, rho) in receivers.iter().zip(ranges) {
        let d = ((point[0] - r[0]).powi(2) + (point[1] - r[1]).powi(2)).sqrt();
        ss += (d - rho) * (d - rho);
    }
    Ok((point, (ss / m as f64).sqrt()))
}

/// Upgrade one (H, b, offsets) candidate against its measurements. Supports
/// three transmitters directly and four via trilateration of the last one.
/// The returned scene is gauge-fixed (r₁ at the origin, r₂ on the positive
/// x-axis) unless the recovered frame is too degenerate to orient.
pub fn upgrade_positions(
    unknowns: &UnknownVector,
    measurements: &MeasurementSet,
) -> Result<PlanarScene, UpgradeError> {
    let (m, n) = (measurements.num_receivers(), measurements.num_transmitters());
    if unknowns.offsets.len() != n || m < 2 || !(n == 3 || n == 4) {
        return Err(UpgradeError::WrongConfiguration);
    }
    let l = recover_l(&unknowns.h)?;
    let dt = compact_pseudoranges(&measurements.values, &unknowns.offsets)
        .expect("shape checked above")
        .entries;

    // rᵢ from Lᵀx = R̃ᵢ₋₁; only the first two compaction columns take part
    // in the factorization (the fourth transmitter is dropped there).
    let lt = l.transpose();
    let mut receivers = vec![[0.0, 0.0]];
    for i in 0..m - 1 {
        let v = Vector2::new(dt[(i, 0)], dt[(i, 1)]);
        let r = lt.solve_lower_triangular(&v).ok_or(UpgradeError::NotSpd)?;
        receivers.push([r[0], r[1]]);
    }

    let b = Vector2::new(unknowns.b[0], unknowns.b[1]);
    let mut transmitters = Vec::with_capacity(n);
    let s1 = l * b;
    transmitters.push([s1[0], s1[1]]);
    for j in 0..2 {
        let mut e = Vector2::zeros();
        e[j] = 1.0;
        let s: Vector2<f64> = l * (b - 0.5 * e);
        transmitters.push([s[0], s[1]]);
    }
    if n == 4 {
        let ranges: Vec<f64> =
            (0..m).map(|i| measurements.at(i, 3) - unknowns.offsets[3]).collect();
        let (s4, _) = trilaterate_extra(&receivers, &ranges)?;
        transmitters.push(s4);
    }

    let scene = PlanarScene { receivers, transmitters, offsets: unknowns.offsets.clone() };
    let fixed = gauge_fix(&scene).unwrap_or(scene);
    Ok(polish(choose_reflection(fixed, measurements), measurements))
}

/// A few damped Gauss-Newton steps on the range residuals. The closed-form
/// chain runs through H = (LᵀL)⁻¹, whose double-precision representation
/// costs a factor of cond(L)² and the back-substitution another cond(L);
/// for thin transmitter triangles that leaves ~1e-8 position errors even on
/// exact data. Polishing restores data-limited accuracy. The iteration cap
/// is deliberately tight so a wrong upgrade formula (a start O(1) away)
/// stays visibly wrong instead of being rescued.
fn polish(scene: PlanarScene, measurements: &MeasurementSet) -> PlanarScene {
    let config = crate::refine::RefineConfig { max_iterations: 6, ..Default::default() };
    crate::refine::lm_refine(&scene, measurements, &config).scene
}

/// Mirror images produce identical ranges, so on exact data the two costs
/// tie bit for bit; the tie resolves to the unreflected scene, keeping the
/// output deterministic.
fn choose_reflection(scene: PlanarScene, measurements: &MeasurementSet) -> PlanarScene {
    let mirrored = PlanarScene {
        receivers: scene.receivers.iter().map(|p| [p[0], -p[1]]).collect(),
        transmitters: scene.transmitters.iter().map(|p| [p[0], -p[1]]).collect(),
        offsets: scene.offsets.clone(),
    };
    if tdoa_cost(&mirrored, measurements) < tdoa_cost(&scene, measurements) {
        mirrored
    } else {
        scene
    }
}
