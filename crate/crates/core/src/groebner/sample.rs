//! Consistent specializations of the measurement model into GF(p).
//!
//! The complexity analysis runs on exact instances: positions and offsets
//! drawn in GF(p), with transmitters resampled until every squared distance
//! is a quadratic residue so that pseudoranges f_ij = o_j + √δ_ij exist in
//! the field. The resulting ideal has the same generic structure as the
//! real-coefficient problem, but all arithmetic is exact.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::GroebnerError;
use crate::polyform::{CoeffRing, PrimeField, UnknownVector, NUM_SHAPE_VARS};

/// An exact GF(p) measurement matrix together with the ground-truth unknown
/// vector (h₁₁,h₁₂,h₂₂,b₁,b₂,o₁..o_n) it satisfies.
#[derive(Clone, Debug)]
pub struct ConsistentInstance {
    pub field: PrimeField,
    pub f: Vec<Vec<u64>>,
    pub truth: Vec<u64>,
    pub receivers: Vec<[u64; 2]>,
    pub transmitters: Vec<[u64; 2]>,
}

impl ConsistentInstance {
    pub fn num_receivers(&self) -> usize {
        self.f.len()
    }

    pub fn num_transmitters(&self) -> usize {
        self.f.first().map_or(0, |r| r.len())
    }

    pub fn offsets(&self) -> &[u64] {
        &self.truth[NUM_SHAPE_VARS..]
    }
}

/// Per-transmitter resample budget: each attempt succeeds with probability
/// ≈ 2^−m, so m ≤ 9 needs ≈ 512 tries on average.
const TRANSMITTER_BUDGET: usize = 1_000_000;

/// Retries of the whole scene when the transmitter frame is singular mod p
/// (probability ≈ 1/p).
const SCENE_BUDGET: usize = 64;

/// Sample receivers, transmitters and offsets in GF(p) such that every
/// pseudorange exists in the field, and return the measurements plus the
/// exact unknown vector they satisfy. Square roots take the representative
/// in [0, p/2]; the other branch is the global d → −d sign ambiguity.
pub fn sample_consistent_instance_mod_p(
    m: usize,
    n: usize,
    p: u64,
    seed: u64,
) -> Result<ConsistentInstance, GroebnerError> {
    assert!(m >= 2 && n >= 3, "need at least 2 receivers and 3 transmitters");
    assert!(p > (1 << 20), "modulus too small for generic sampling");
    let field = PrimeField::new(p);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    'scene: for _ in 0..SCENE_BUDGET {
        let receivers: Vec<[u64; 2]> =
            (0..m).map(|_| [rng.gen_range(0..p), rng.gen_range(0..p)]).collect();
        let mut transmitters: Vec<[u64; 2]> = Vec::with_capacity(n);
        let mut offsets: Vec<u64> = Vec::with_capacity(n);
        let mut f = vec![vec![0u64; n]; m];

        for j in 0..n {
            let mut accepted = false;
            'attempt: for _ in 0..TRANSMITTER_BUDGET {
                let s = [rng.gen_range(0..p), rng.gen_range(0..p)];
                let o = rng.gen_range(0..p);
                let mut col = Vec::with_capacity(m);
                for r in &receivers {
                    let dx = field.sub(&r[0], &s[0]);
                    let dy = field.sub(&r[1], &s[1]);
                    let delta = field.add(&field.mul(&dx, &dx), &field.mul(&dy, &dy));
                    match field.sqrt(delta) {
                        Some(root) => col.push(field.add(&o, &root)),
                        None => continue 'attempt,
                    }
                }
                for (i, v) in col.into_iter().enumerate() {
                    f[i][j] = v;
                }
                transmitters.push(s);
                offsets.push(o);
                accepted = true;
                break;
            }
            if !accepted {
                return Err(GroebnerError::SamplingBudgetExceeded);
            }
        }

        // Ground-truth (H, b): translate so r₁ = 0, set L = −2[s₂−s₁ s₃−s₁],
        // H = (LᵀL)⁻¹, b = L⁻¹(s₁ − r₁). Needs the transmitter frame
        // invertible mod p.
        let sub2 = |a: &[u64; 2], b: &[u64; 2]| [field.sub(&a[0], &b[0]), field.sub(&a[1], &b[1])];
        let c1 = sub2(&transmitters[1], &transmitters[0]);
        let c2 = sub2(&transmitters[2], &transmitters[0]);
        let neg2 = field.neg(&2);
        // L columns.
        let l = [
            [field.mul(&neg2, &c1[0]), field.mul(&neg2, &c2[0])],
            [field.mul(&neg2, &c1[1]), field.mul(&neg2, &c2[1])],
        ];
        let det_l = field.sub(&field.mul(&l[0][0], &l[1][1]), &field.mul(&l[0][1], &l[1][0]));
        if det_l == 0 {
            continue 'scene;
        }
        // G = LᵀL (symmetric); H = G⁻¹.
        let dot = |a: [u64; 2], b: [u64; 2]| {
            field.add(&field.mul(&a[0], &b[0]), &field.mul(&a[1], &b[1]))
        };
        let col = |k: usize| [l[0][k], l[1][k]];
        let g = [dot(col(0), col(0)), dot(col(0), col(1)), dot(col(1), col(1))];
        let det_g = field.sub(&field.mul(&g[0], &g[2]), &field.mul(&g[1], &g[1]));
        let det_g_inv = field.inv(&det_g).expect("det L nonzero implies det LᵀL nonzero");
        let h = [
            field.mul(&g[2], &det_g_inv),
            field.neg(&field.mul(&g[1], &det_g_inv)),
            field.mul(&g[0], &det_g_inv),
        ];
        // b = L⁻¹ s₁′ = adj(L)/det(L) · (s₁ − r₁).
        let s1p = sub2(&transmitters[0], &receivers[0]);
        let det_l_inv = field.inv(&det_l).unwrap();
        let b = [
            field.mul(&field.sub(&field.mul(&l[1][1], &s1p[0]), &field.mul(&l[0][1], &s1p[1])), &det_l_inv),
            field.mul(&field.sub(&field.mul(&l[0][0], &s1p[1]), &field.mul(&l[1][0], &s1p[0])), &det_l_inv),
        ];

        let mut truth = vec![h[0], h[1], h[2], b[0], b[1]];
        truth.extend_from_slice(&offsets);
        return Ok(ConsistentInstance { field, f, truth, receivers, transmitters });
    }
    Err(GroebnerError::SamplingBudgetExceeded)
}

/// The same construction for real scenes: the exact unknown vector
/// (H, b, offsets) a noiseless instance satisfies, from its ground truth.
/// Returns None when the transmitter frame is singular.
pub fn ground_truth_unknowns(scene: &crate::scene::PlanarScene) -> Option<UnknownVector> {
    if scene.transmitters.len() < 3 {
        return None;
    }
    let r1 = scene.receivers[0];
    let s = &scene.transmitters;
    // L = −2[s₂−s₁ s₃−s₁]
    let l = nalgebra::Matrix2::new(
        -2.0 * (s[1][0] - s[0][0]),
        -2.0 * (s[2][0] - s[0][0]),
        -2.0 * (s[1][1] - s[0][1]),
        -2.0 * (s[2][1] - s[0][1]),
    );
    // H = (LᵀL)⁻¹ entrywise, with det(LᵀL) = det(L)² taken through the
    // compensated 2×2 determinant: the naive double inversion squares the
    // condition number of the transmitter frame and visibly pollutes H.
    let det_l = crate::upgrade::det2_accurate(l[(0, 0)], l[(0, 1)], l[(1, 0)], l[(1, 1)]);
    if det_l == 0.0 || !det_l.is_finite() {
        return None;
    }
    let det_g = det_l * det_l;
    let g = l.transpose() * l;
    let h = [g[(1, 1)] / det_g, -g[(0, 1)] / det_g, g[(0, 0)] / det_g];
    // b = L⁻¹(s₁ − r₁) by Cramer's rule on the same determinant.
    let rhs = [s[0][0] - r1[0], s[0][1] - r1[1]];
    let b = [
        crate::upgrade::det2_accurate(rhs[0], l[(0, 1)], rhs[1], l[(1, 1)]) / det_l,
        crate::upgrade::det2_accurate(l[(0, 0)], rhs[0], l[(1, 0)], rhs[1]) / det_l,
    ];
    Some(UnknownVector { h, b, offsets: scene.offsets.clone() })
}
