//! Synthetic planar scenes, pseudorange synthesis, gauge fixing and error
//! metrics.
//!
//! A scene is a set of receivers `r_i`, transmitters `s_j` and per-transmitter
//! range offsets `o_j` (clock offsets folded into length units). Measurements
//! are pseudoranges `f_ij = ‖r_i − s_j‖ + o_j (+ noise)`. Reconstruction is
//! only defined up to a rigid motion plus reflection, so error metrics align
//! estimate to truth by orthogonal Procrustes before comparing.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SceneError {
    #[error("gauge fixing needs two distinct anchor receivers")]
    DegenerateScene,
    #[error("estimate and truth have different receiver/transmitter counts")]
    DimensionMismatch,
}

/// Ground-truth or estimated geometry: receiver positions, transmitter
/// positions and transmitter range offsets, all in length units.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanarScene {
    pub receivers: Vec<[f64; 2]>,
    pub transmitters: Vec<[f64; 2]>,
    pub offsets: Vec<f64>,
}

/// An m×n pseudorange matrix together with the noise level and seed that
/// produced it. `values[i][j]` is `f_ij` for receiver i, transmitter j.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementSet {
    #[serde(rename = "f")]
    pub values: Vec<Vec<f64>>,
    #[serde(rename = "sigma")]
    pub noise_sigma: f64,
    #[serde(rename = "seed")]
    pub rng_seed: u64,
}

/// Relative position/offset errors of an estimate against ground truth,
/// plus their base-10 logs (clamped at −16).
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ErrorReport {
    pub rel_pos_error: f64,
    pub rel_offset_error: f64,
    pub log10_pos: f64,
    pub log10_offset: f64,
}

impl PlanarScene {
    pub fn num_receivers(&self) -> usize {
        self.receivers.len()
    }

    pub fn num_transmitters(&self) -> usize {
        self.transmitters.len()
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        let r = self.receivers[i];
        let s = self.transmitters[j];
        (r[0] - s[0]).hypot(r[1] - s[1])
    }

    /// JSON with every float printed to 18 significant digits, so parsing
    /// recovers the exact doubles.
    pub fn to_json(&self) -> String {
        format!(
            "{{\"receivers\": {}, \"transmitters\": {}, \"offsets\": {}}}",
            fmt_points(&self.receivers),
            fmt_points(&self.transmitters),
            fmt_floats(&self.offsets),
        )
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}

impl MeasurementSet {
    pub fn num_receivers(&self) -> usize {
        self.values.len()
    }

    pub fn num_transmitters(&self) -> usize {
        self.values.first().map_or(0, |row| row.len())
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i][j]
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<String> = self.values.iter().map(|r| fmt_floats(r)).collect();
        format!(
            "{{\"f\": [{}], \"sigma\": {}, \"seed\": {}}}",
            rows.join(", "),
            fmt_float(self.noise_sigma),
            self.rng_seed,
        )
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}

fn fmt_float(x: f64) -> String {
    format!("{:.17e}", x)
}

fn fmt_floats(xs: &[f64]) -> String {
    let parts: Vec<String> = xs.iter().map(|x| fmt_float(*x)).collect();
    format!("[{}]", parts.join(", "))
}

fn fmt_points(ps: &[[f64; 2]]) -> String {
    let parts: Vec<String> = ps
        .iter()
        .map(|p| format!("[{}, {}]", fmt_float(p[0]), fmt_float(p[1])))
        .collect();
    format!("[{}]", parts.join(", "))
}

/// Draw a random scene: coordinates i.i.d. N(0, 10²), offsets i.i.d. N(0, 1).
/// Deterministic per seed (receivers, then transmitters, then offsets).
pub fn generate_scene(m: usize, n: usize, seed: u64) -> PlanarScene {
    assert!(m >= 1 && n >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pos = Normal::new(0.0, 10.0).unwrap();
    let off = Normal::new(0.0, 1.0).unwrap();
    let point = |rng: &mut ChaCha8Rng| {
        let x = pos.sample(rng);
        let y = pos.sample(rng);
        [x, y]
    };
    let receivers = (0..m).map(|_| point(&mut rng)).collect();
    let transmitters = (0..n).map(|_| point(&mut rng)).collect();
    let offsets = (0..n).map(|_| off.sample(&mut rng)).collect();
    PlanarScene { receivers, transmitters, offsets }
}

/// Synthesize pseudoranges `f_ij = ‖r_i − s_j‖ + o_j + ε_ij` with
/// `ε_ij ~ N(0, σ²)` (σ = 0 gives exact values). Deterministic per seed.
pub fn synthesize_measurements(scene: &PlanarScene, sigma: f64, seed: u64) -> MeasurementSet {
    assert!(sigma >= 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, 1.0).unwrap();
    let values = (0..scene.num_receivers())
        .map(|i| {
            (0..scene.num_transmitters())
                .map(|j| {
                    let eps = if sigma > 0.0 { sigma * noise.sample(&mut rng) } else { 0.0 };
                    scene.distance(i, j) + scene.offsets[j] + eps
                })
                .collect()
        })
        .collect();
    MeasurementSet { values, noise_sigma: sigma, rng_seed: seed }
}

/// Rigidly move the scene so r₁ = (0,0) and r₂ = (r₂ₓ, 0) with r₂ₓ > 0.
/// All pairwise distances are preserved.
pub fn gauge_fix(scene: &PlanarScene) -> Result<PlanarScene, SceneError> {
    if scene.receivers.len() < 2 {
        return Err(SceneError::DegenerateScene);
    }
    let r1 = scene.receivers[0];
    let r2 = scene.receivers[1];
    if r1 == r2 {
        return Err(SceneError::DegenerateScene);
    }
    let dx = r2[0] - r1[0];
    let dy = r2[1] - r1[1];
    let len = dx.hypot(dy);
    let (c, s) = (dx / len, dy / len);
    // Rotation by −θ where θ = atan2(dy, dx); sends r₂−r₁ to (len, 0).
    let xf = |p: [f64; 2]| {
        let px = p[0] - r1[0];
        let py = p[1] - r1[1];
        [c * px + s * py, -s * px + c * py]
    };
    let mut receivers: Vec<[f64; 2]> = scene.receivers.iter().map(|p| xf(*p)).collect();
    // The anchors land there exactly in exact arithmetic; enforce it in
    // floats too so downstream code may pin these three coordinates.
    receivers[0] = [0.0, 0.0];
    receivers[1] = [len, 0.0];
    Ok(PlanarScene {
        receivers,
        transmitters: scene.transmitters.iter().map(|p| xf(*p)).collect(),
        offsets: scene.offsets.clone(),
    })
}

/// Align `estimate` to `truth` with the best orthogonal map (rotation or
/// reflection) plus translation over the stacked receiver+transmitter point
/// set, then report relative errors. Offsets compare directly.
pub fn error_report(estimate: &PlanarScene, truth: &PlanarScene) -> Result<ErrorReport, SceneError> {
    if estimate.receivers.len() != truth.receivers.len()
        || estimate.transmitters.len() != truth.transmitters.len()
        || estimate.offsets.len() != truth.offsets.len()
    {
        return Err(SceneError::DimensionMismatch);
    }
    let stack = |s: &PlanarScene| -> Vec<[f64; 2]> {
        s.receivers.iter().chain(s.transmitters.iter()).copied().collect()
    };
    let e = stack(estimate);
    let t = stack(truth);
    let k = e.len() as f64;
    let centroid = |pts: &[[f64; 2]]| {
        let (mut x, mut y) = (0.0, 0.0);
        for p in pts {
            x += p[0];
            y += p[1];
        }
        [x / k, y / k]
    };
    let ce = centroid(&e);
    let ct = centroid(&t);

    // M = Σ (e−ce)(t−ct)ᵀ; R = VUᵀ from M = UΣVᵀ maximizes tr(RM) over all
    // orthogonal R, reflections included.
    let mut m = nalgebra::Matrix2::<f64>::zeros();
    for (pe, pt) in e.iter().zip(t.iter()) {
        let ec = nalgebra::Vector2::new(pe[0] - ce[0], pe[1] - ce[1]);
        let tc = nalgebra::Vector2::new(pt[0] - ct[0], pt[1] - ct[1]);
        m += ec * tc.transpose();
    }
    let svd = m.svd(true, true);
    let (u, v_t) = (svd.u.unwrap(), svd.v_t.unwrap());
    let r = v_t.transpose() * u.transpose();

    let mut num = 0.0;
    let mut den = 0.0;
    for (pe, pt) in e.iter().zip(t.iter()) {
        let ec = nalgebra::Vector2::new(pe[0] - ce[0], pe[1] - ce[1]);
        let tc = nalgebra::Vector2::new(pt[0] - ct[0], pt[1] - ct[1]);
        let aligned = r * ec;
        num += (aligned - tc).norm_squared();
        den += tc.norm_squared();
    }
    let rel_pos_error = num.sqrt() / den.sqrt().max(1e-300);

    let mut onum = 0.0;
    let mut oden = 0.0;
    for (oe, ot) in estimate.offsets.iter().zip(truth.offsets.iter()) {
        onum += (oe - ot) * (oe - ot);
        oden += ot * ot;
    }
    let rel_offset_error = onum.sqrt() / oden.sqrt().max(1e-12);

    Ok(ErrorReport {
        rel_pos_error,
        rel_offset_error,
        log10_pos: log10_clamped(rel_pos_error),
        log10_offset: log10_clamped(rel_offset_error),
    })
}

/// Sum of squared range residuals Σᵢⱼ (f_ij − o_j − ‖r_i − s_j‖)².
pub fn tdoa_cost(scene: &PlanarScene, measurements: &MeasurementSet) -> f64 {
    let mut total = 0.0;
    for i in 0..scene.num_receivers() {
        for j in 0..scene.num_transmitters() {
            let r = measurements.at(i, j) - scene.offsets[j] - scene.distance(i, j);
            total += r * r;
        }
    }
    total
}

/// log₁₀ clamped below at −16 (and at −16 for zero).
pub fn log10_clamped(x: f64) -> f64 {
    if x <= 1e-16 {
        -16.0
    } else {
        x.log10().max(-16.0)
    }
}
