//! Homotopy-continuation solver for square polynomial systems over ℂ.
//!
//! The solver follows the classical total-degree construction: the target
//! system F is connected to a start system G_i = x_i^{d_i} − c_i (random
//! unit c_i) through H(x, t) = (1−t)·γ·G(x) + t·F(x) with a random complex
//! γ, and every start root is continued from t = 0 to t = 1 with an Euler
//! predictor on the Davidenko ODE and a Newton corrector, under adaptive
//! step control. Overdetermined systems are first squared up by random
//! linear combinations drawn within equal-degree blocks, which keeps the
//! Bézout path count at the block-wise product rather than the naive
//! max-degree power.
//!
//! All randomness is seeded: identical configuration and seed give bitwise
//! identical results. Paths are tracked independently (in parallel when a
//! thread pool is available) and merged in path-index order.

pub mod compiled;

pub use compiled::CompiledSystem;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::polyform::{Complexes, EquationTag, PolySystem, Reals, UnknownVector};

/// Relative distance below which two endpoints count as the same solution.
pub const DEDUP_RELATIVE_TOL: f64 = 1e-6;

/// Hard cap on the number of start points a single solve may track.
pub const MAX_TOTAL_PATHS: usize = 2_000_000;

#[derive(Debug, thiserror::Error)]
pub enum SolverError {
    #[error("system must be square, got {equations} equations in {vars} variables")]
    NotSquare { equations: usize, vars: usize },
    #[error("cannot square {available} equations up to {requested}")]
    BadSquareUpCount { requested: usize, available: usize },
    #[error("combination matrix stayed rank-deficient after {0} draws")]
    RankDeficientCombination(usize),
    #[error("total-degree start system has {total} paths, over the cap {cap}")]
    TooManyPaths { total: usize, cap: usize },
    #[error("tracker configuration: {0}")]
    BadConfig(String),
}

/// Step control and tolerances for path tracking.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrackerConfig {
    /// First (and largest) continuation step in t.
    pub initial_step: f64,
    /// Path fails once halving drops the step below this.
    pub min_step: f64,
    /// Newton is converged when ‖δx‖ ≤ newton_tol · (1 + ‖x‖).
    pub newton_tol: f64,
    /// Corrector iterations per continuation step.
    pub max_newton_iters: usize,
    /// Points with ‖x‖ beyond this are classified at-infinity.
    pub divergence_radius: f64,
    /// Accepted-step budget per path.
    pub max_steps_per_path: usize,
    /// Fixed homotopy constant γ as (re, im); None draws a random unit
    /// complex number from the seed.
    pub gamma: Option<(f64, f64)>,
    /// Seed for γ and the start-system constants.
    pub seed: u64,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        TrackerConfig {
            initial_step: 0.05,
            min_step: 1e-9,
            newton_tol: 1e-10,
            max_newton_iters: 6,
            divergence_radius: 1e8,
            max_steps_per_path: 5_000,
            gamma: None,
            seed: 0,
        }
    }
}

impl TrackerConfig {
    fn validate(&self) -> Result<(), SolverError> {
        let bad = |m: &str| Err(SolverError::BadConfig(m.to_string()));
        if !(self.initial_step > 0.0 && self.initial_step < 1.0) {
            return bad("initial_step must lie in (0, 1)");
        }
        if !(self.min_step > 0.0 && self.min_step <= self.initial_step) {
            return bad("min_step must lie in (0, initial_step]");
        }
        if !(self.newton_tol > 0.0) {
            return bad("newton_tol must be positive");
        }
        if self.max_newton_iters == 0 {
            return bad("max_newton_iters must be at least 1");
        }
        if !(self.divergence_radius > 1.0) {
            return bad("divergence_radius must exceed 1");
        }
        if self.max_steps_per_path == 0 {
            return bad("max_steps_per_path must be at least 1");
        }
        Ok(())
    }
}

/// How one tracked path ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PathStatus {
    /// Finite endpoint, Newton on F converged quadratically.
    Converged,
    /// Finite endpoint, but Newton stalled: multiple sheet or singular root.
    Singular,
    /// Path left the divergence radius.
    AtInfinity,
    /// Corrector failed below the minimum step, budget exhausted, or the
    /// iteration produced non-finite values.
    Failed,
}

/// Endpoint tallies across all tracked paths.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathStats {
    pub total: usize,
    pub converged: usize,
    pub singular: usize,
    pub at_infinity: usize,
    pub failed: usize,
}

/// Deduplicated finite endpoints plus per-path accounting.
#[derive(Clone, Debug)]
pub struct SolveOutcome {
    /// Distinct finite endpoints, in order of first appearance by path index.
    pub solutions: Vec<Vec<Complex64>>,
    pub stats: PathStats,
}

/// A real solution that survived filtering, in the fixed variable order.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolutionCandidate {
    pub unknowns: UnknownVector,
    /// Max |equation| over the full original system at the real part.
    pub residual_inf: f64,
    /// Euclidean norm of the imaginary part that was discarded.
    pub imag_norm: f64,
    /// Whether the recovered H block is symmetric positive definite.
    pub spd: bool,
}

/// Picks how an overdetermined system is compressed to a square one.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SquareUpStrategy {
    /// Random combinations within equal-degree blocks; keeps low degrees low.
    DegreeBlocked,
    /// Random combinations of all equations; every output has the max degree.
    Naive,
}

/// An overdetermined system compressed to `k` equations, with the
/// combination matrix that produced it (rows = new equations, columns =
/// original equations).
#[derive(Clone, Debug)]
pub struct SquaredSystem {
    pub system: PolySystem<Complexes>,
    pub combination: Vec<Vec<Complex64>>,
}

fn unit_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    Complex64::new(theta.cos(), theta.sin())
}

fn norm2(x: &[Complex64]) -> f64 {
    x.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

fn all_finite(x: &[Complex64]) -> bool {
    x.iter().all(|c| c.re.is_finite() && c.im.is_finite())
}

/// In-place LU solve with partial pivoting: a is n×n row-major (destroyed),
/// b is the right-hand side (replaced by the solution). False on a
/// numerically singular matrix.
fn solve_linear(n: usize, a: &mut [Complex64], b: &mut [Complex64]) -> bool {
    for k in 0..n {
        let mut piv = k;
        let mut best = a[k * n + k].norm_sqr();
        for r in k + 1..n {
            let v = a[r * n + k].norm_sqr();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if !(best > 0.0) || !best.is_finite() {
            return false;
        }
        if piv != k {
            for c in 0..n {
                a.swap(k * n + c, piv * n + c);
            }
            b.swap(k, piv);
        }
        let inv = a[k * n + k].inv();
        for r in k + 1..n {
            let f = a[r * n + k] * inv;
            if f.re == 0.0 && f.im == 0.0 {
                continue;
            }
            for c in k + 1..n {
                let t = f * a[k * n + c];
                a[r * n + c] -= t;
            }
            let t = f * b[k];
            b[r] -= t;
        }
    }
    for k in (0..n).rev() {
        let mut acc = b[k];
        for c in k + 1..n {
            acc -= a[k * n + c] * b[c];
        }
        b[k] = acc / a[k * n + k];
    }
    all_finite(b)
}

enum CorrectOutcome {
    Ok,
    Stall,
    Blowup,
}

/// Everything a single path needs, shared read-only across workers.
struct Homotopy<'a> {
    target: &'a CompiledSystem,
    degrees: Vec<usize>,
    start_constants: Vec<Complex64>,
    gamma: Complex64,
    cfg: TrackerConfig,
    /// Corrector trust region as a multiple of the predictor displacement.
    trust_factor: f64,
}

/// Per-worker buffers recycled across steps and paths.
struct PathScratch {
    scratch: compiled::EvalScratch,
    f_val: Vec<Complex64>,
    jac: Vec<Complex64>,
    h_mat: Vec<Complex64>,
    rhs: Vec<Complex64>,
}

impl<'a> Homotopy<'a> {
    fn new_scratch(&self) -> PathScratch {
        let n = self.target.nvars();
        PathScratch {
            scratch: self.target.make_scratch(),
            f_val: vec![Complex64::new(0.0, 0.0); n],
            jac: vec![Complex64::new(0.0, 0.0); n * n],
            h_mat: vec![Complex64::new(0.0, 0.0); n * n],
            rhs: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    fn start_point(&self, path_index: usize) -> Vec<Complex64> {
        let mut digits = path_index;
        let mut x = Vec::with_capacity(self.degrees.len());
        for (i, &d) in self.degrees.iter().enumerate() {
            let j = digits % d;
            digits /= d;
            let c = self.start_constants[i];
            let (r, theta) = c.to_polar();
            let root = Complex64::from_polar(
                r.powf(1.0 / d as f64),
                (theta + std::f64::consts::TAU * j as f64) / d as f64,
            );
            x.push(root);
        }
        x
    }

    /// G_i(x) = x_i^{d_i} − c_i and its diagonal Jacobian d_i·x_i^{d_i−1}.
    fn start_system(&self, x: &[Complex64], g: &mut [Complex64], g_diag: &mut [Complex64]) {
        for i in 0..x.len() {
            let d = self.degrees[i] as i32;
            let p = x[i].powi(d - 1);
            g_diag[i] = (d as f64) * p;
            g[i] = p * x[i] - self.start_constants[i];
        }
    }

    /// Assemble H_x(x, t) into `out` given the prepared target Jacobian.
    fn homotopy_jacobian(
        &self,
        t: f64,
        g_diag: &[Complex64],
        target_jac: &[Complex64],
        out: &mut [Complex64],
    ) {
        let n = g_diag.len();
        let gfac = self.gamma * (1.0 - t);
        for i in 0..n * n {
            out[i] = target_jac[i] * t;
        }
        for i in 0..n {
            out[i * n + i] += gfac * g_diag[i];
        }
    }

    /// Newton iterations on H(·, t); `x` is left at the last iterate.
    ///
    /// `max_correction` is a trust region: once the accumulated correction
    /// exceeds it, the corrector has most likely left the tube around the
    /// tracked branch (risking a jump onto a different path), so the step
    /// is rejected instead.
    fn correct(
        &self,
        t: f64,
        x: &mut [Complex64],
        ps: &mut PathScratch,
        max_correction: f64,
    ) -> CorrectOutcome {
        let n = x.len();
        let mut g = vec![Complex64::new(0.0, 0.0); n];
        let mut g_diag = vec![Complex64::new(0.0, 0.0); n];
        let mut total = 0.0f64;
        for _ in 0..self.cfg.max_newton_iters {
            self.target.prepare(x, &mut ps.scratch);
            self.target.eval_into(&ps.scratch, &mut ps.f_val);
            self.target.jacobian_into(&ps.scratch, &mut ps.jac);
            self.start_system(x, &mut g, &mut g_diag);
            let gfac = self.gamma * (1.0 - t);
            for i in 0..n {
                ps.rhs[i] = -(ps.f_val[i] * t + g[i] * gfac);
            }
            self.homotopy_jacobian(t, &g_diag, &ps.jac, &mut ps.h_mat);
            if !solve_linear(n, &mut ps.h_mat, &mut ps.rhs) {
                return CorrectOutcome::Stall;
            }
            let mut delta = 0.0f64;
            for i in 0..n {
                x[i] += ps.rhs[i];
                delta += ps.rhs[i].norm_sqr();
            }
            total += delta.sqrt();
            if total > max_correction {
                return CorrectOutcome::Stall;
            }
            if !all_finite(x) || norm2(x) > self.cfg.divergence_radius {
                return CorrectOutcome::Blowup;
            }
            if delta.sqrt() <= self.cfg.newton_tol * (1.0 + norm2(x)) {
                return CorrectOutcome::Ok;
            }
        }
        CorrectOutcome::Stall
    }

    fn track(&self, path_index: usize) -> (PathStatus, Option<Vec<Complex64>>) {
        let n = self.target.nvars();
        let cfg = &self.cfg;
        let mut ps = self.new_scratch();
        let mut x = self.start_point(path_index);
        let mut g = vec![Complex64::new(0.0, 0.0); n];
        let mut g_diag = vec![Complex64::new(0.0, 0.0); n];

        let mut t = 0.0f64;
        let mut h = cfg.initial_step;
        let mut accepted = 0usize;
        let mut streak = 0usize;
        while t < 1.0 {
            if accepted >= cfg.max_steps_per_path {
                return (PathStatus::Failed, None);
            }
            let t_next = (t + h).min(1.0);

            // Euler predictor: H_x · δx = −H_t · Δt, with H_t = F − γG.
            self.target.prepare(&x, &mut ps.scratch);
            self.target.eval_into(&ps.scratch, &mut ps.f_val);
            self.target.jacobian_into(&ps.scratch, &mut ps.jac);
            self.start_system(&x, &mut g, &mut g_diag);
            for i in 0..n {
                ps.rhs[i] = -(ps.f_val[i] - self.gamma * g[i]) * (t_next - t);
            }
            self.homotopy_jacobian(t, &g_diag, &ps.jac, &mut ps.h_mat);
            let mut proposal = x.clone();
            let predicted = solve_linear(n, &mut ps.h_mat, &mut ps.rhs);
            let mut euler_norm = 0.0f64;
            if predicted {
                for i in 0..n {
                    proposal[i] += ps.rhs[i];
                    euler_norm += ps.rhs[i].norm_sqr();
                }
                euler_norm = euler_norm.sqrt();
            }

            let corrected = if predicted && all_finite(&proposal) {
                let trust = (self.trust_factor * euler_norm)
                    .max(10.0 * cfg.newton_tol * (1.0 + norm2(&proposal)));
                self.correct(t_next, &mut proposal, &mut ps, trust)
            } else {
                CorrectOutcome::Stall
            };
            match corrected {
                CorrectOutcome::Ok => {
                    x = proposal;
                    t = t_next;
                    accepted += 1;
                    streak += 1;
                    if streak >= 4 {
                        h = (h * 2.0).min(cfg.initial_step);
                        streak = 0;
                    }
                }
                CorrectOutcome::Blowup => return (PathStatus::AtInfinity, None),
                CorrectOutcome::Stall => {
                    h *= 0.5;
                    streak = 0;
                    if h < cfg.min_step {
                        // A path that stalled while already far out is a
                        // truncated escape to infinity, not a tracking bug.
                        if norm2(&x) > 0.01 * cfg.divergence_radius {
                            return (PathStatus::AtInfinity, None);
                        }
                        return (PathStatus::Failed, None);
                    }
                }
            }
        }

        // Endpoint polish: Newton on F itself.
        let polish_iters = 2 * cfg.max_newton_iters + 4;
        for _ in 0..polish_iters {
            self.target.prepare(&x, &mut ps.scratch);
            self.target.eval_into(&ps.scratch, &mut ps.f_val);
            self.target.jacobian_into(&ps.scratch, &mut ps.jac);
            for i in 0..n {
                ps.rhs[i] = -ps.f_val[i];
            }
            ps.h_mat.copy_from_slice(&ps.jac);
            if !solve_linear(n, &mut ps.h_mat, &mut ps.rhs) {
                // Singular Jacobian at the endpoint: keep the tracked point.
                return (PathStatus::Singular, Some(x));
            }
            let mut delta = 0.0f64;
            for i in 0..n {
                x[i] += ps.rhs[i];
                delta += ps.rhs[i].norm_sqr();
            }
            if !all_finite(&x) {
                return (PathStatus::Failed, None);
            }
            if norm2(&x) > cfg.divergence_radius {
                return (PathStatus::AtInfinity, None);
            }
            if delta.sqrt() <= cfg.newton_tol * (1.0 + norm2(&x)) {
                return (PathStatus::Converged, Some(x));
            }
        }
        (PathStatus::Singular, Some(x))
    }
}

/// Track every total-degree start root of a square system to t = 1.
///
/// Returns the deduplicated finite endpoints (relative tolerance
/// [`DEDUP_RELATIVE_TOL`], first occurrence in path order wins) together
/// with per-path statistics. Identical input and seed reproduce the output
/// bitwise; results do not depend on thread scheduling.
pub fn solve_total_degree(
    system: &PolySystem<Complexes>,
    config: &TrackerConfig,
) -> Result<SolveOutcome, SolverError> {
    config.validate()?;
    let n = system.nvars;
    if system.equations.len() != n || n == 0 {
        return Err(SolverError::NotSquare { equations: system.equations.len(), vars: n });
    }

    let compiled = CompiledSystem::new(system);
    let degrees = compiled.degrees().to_vec();
    if degrees.iter().any(|&d| d == 0) {
        return Err(SolverError::BadConfig(
            "every equation must have positive total degree".to_string(),
        ));
    }
    let mut total: usize = 1;
    for &d in &degrees {
        total = total.saturating_mul(d);
    }
    if total > MAX_TOTAL_PATHS {
        return Err(SolverError::TooManyPaths { total, cap: MAX_TOTAL_PATHS });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let gamma = match config.gamma {
        Some((re, im)) => Complex64::new(re, im),
        None => unit_complex(&mut rng),
    };
    let start_constants: Vec<Complex64> = (0..n).map(|_| unit_complex(&mut rng)).collect();

    let hom = Homotopy {
        target: &compiled,
        degrees,
        start_constants,
        gamma,
        cfg: config.clone(),
        trust_factor: 1.0,
    };

    let mut results: Vec<(PathStatus, Option<Vec<Complex64>>)> =
        (0..total).into_par_iter().map(|p| hom.track(p)).collect();

    // Second chance for failed paths: same homotopy (γ and start system
    // unchanged, so endpoints stay comparable), but finer steps and a wider
    // corrector trust region. Deterministic because the retried index set
    // is itself deterministic.
    let retry: Vec<usize> = results
        .iter()
        .enumerate()
        .filter(|(_, (s, _))| *s == PathStatus::Failed)
        .map(|(i, _)| i)
        .collect();
    if !retry.is_empty() {
        let rescue = Homotopy {
            target: &compiled,
            degrees: hom.degrees.clone(),
            start_constants: hom.start_constants.clone(),
            gamma,
            cfg: TrackerConfig {
                initial_step: config.initial_step * 0.2,
                min_step: (config.min_step * 1e-3).max(1e-14),
                max_newton_iters: config.max_newton_iters + 4,
                max_steps_per_path: config.max_steps_per_path * 2,
                ..config.clone()
            },
            trust_factor: 3.0,
        };
        let rescued: Vec<(usize, (PathStatus, Option<Vec<Complex64>>))> =
            retry.into_par_iter().map(|p| (p, rescue.track(p))).collect();
        for (p, r) in rescued {
            results[p] = r;
        }
    }

    let mut stats = PathStats { total, ..PathStats::default() };
    let mut solutions: Vec<Vec<Complex64>> = Vec::new();
    for (status, endpoint) in results {
        match status {
            PathStatus::Converged => stats.converged += 1,
            PathStatus::Singular => stats.singular += 1,
            PathStatus::AtInfinity => stats.at_infinity += 1,
            PathStatus::Failed => stats.failed += 1,
        }
        if let Some(pt) = endpoint {
            let dup = solutions.iter().any(|s| {
                let mut d2 = 0.0f64;
                for (a, b) in pt.iter().zip(s) {
                    d2 += (a - b).norm_sqr();
                }
                d2.sqrt() <= DEDUP_RELATIVE_TOL * (1.0 + norm2(s))
            });
            if !dup {
                solutions.push(pt);
            }
        }
    }
    Ok(SolveOutcome { solutions, stats })
}

/// Compress an overdetermined system to `k` equations by seeded random
/// complex combinations, drawn within equal-degree blocks.
///
/// Blocks with as many output slots as members keep their equations
/// verbatim; the spare slots go to the lowest-degree blocks first, which
/// minimizes the Bézout number of the result. The returned matrix records
/// the combination for audit. Fails with [`SolverError::RankDeficientCombination`]
/// if ten draws in a row produce a numerically rank-deficient matrix.
pub fn square_up(
    system: &PolySystem<Complexes>,
    k: usize,
    seed: u64,
) -> Result<SquaredSystem, SolverError> {
    square_up_with(system, k, seed, SquareUpStrategy::DegreeBlocked)
}

/// [`square_up`] with an explicit combination strategy.
pub fn square_up_with(
    system: &PolySystem<Complexes>,
    k: usize,
    seed: u64,
    strategy: SquareUpStrategy,
) -> Result<SquaredSystem, SolverError> {
    let n_eqs = system.equations.len();
    if k == 0 || k > n_eqs {
        return Err(SolverError::BadSquareUpCount { requested: k, available: n_eqs });
    }

    // Blocks of equation indices sharing a total degree, ascending by degree.
    let mut blocks: Vec<(usize, Vec<usize>)> = Vec::new();
    for (i, e) in system.equations.iter().enumerate() {
        let d = e.total_degree();
        match blocks.iter_mut().find(|(bd, _)| *bd == d) {
            Some((_, v)) => v.push(i),
            None => blocks.push((d, vec![i])),
        }
    }
    blocks.sort_by_key(|(d, _)| *d);
    let use_blocks = matches!(strategy, SquareUpStrategy::DegreeBlocked) && k >= blocks.len();
    if !use_blocks {
        let all: Vec<usize> = (0..n_eqs).collect();
        let d = blocks.last().map(|(d, _)| *d).unwrap_or(0);
        blocks = vec![(d, all)];
    }

    // One slot per block, spares to the lowest degrees first.
    let mut alloc: Vec<usize> = blocks.iter().map(|_| 1).collect();
    let mut spare = k - blocks.len();
    for (i, (_, members)) in blocks.iter().enumerate() {
        let room = members.len() - alloc[i];
        let take = room.min(spare);
        alloc[i] += take;
        spare -= take;
        if spare == 0 {
            break;
        }
    }
    debug_assert_eq!(alloc.iter().sum::<usize>(), k);

    let ring = Complexes;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    const MAX_DRAWS: usize = 10;
    for _ in 0..MAX_DRAWS {
        let mut matrix = vec![vec![Complex64::new(0.0, 0.0); n_eqs]; k];
        let mut row = 0usize;
        for ((_, members), &a) in blocks.iter().zip(&alloc) {
            if a == members.len() {
                // Exact fit: pass the block through unchanged.
                for &j in members {
                    matrix[row][j] = Complex64::new(1.0, 0.0);
                    row += 1;
                }
            } else {
                for _ in 0..a {
                    for &j in members {
                        matrix[row][j] = unit_complex(&mut rng);
                    }
                    row += 1;
                }
            }
        }
        debug_assert_eq!(row, k);

        if numerical_rank(&matrix) < k {
            continue;
        }

        let mut equations = Vec::with_capacity(k);
        let mut tags = Vec::with_capacity(k);
        for weights in &matrix {
            let mut acc = crate::polyform::MultiPoly::zero(system.nvars);
            for (j, w) in weights.iter().enumerate() {
                if w.re == 0.0 && w.im == 0.0 {
                    continue;
                }
                acc = acc.add(&ring, &system.equations[j].scale(&ring, w));
            }
            tags.push(EquationTag::Combination { degree: acc.total_degree() });
            equations.push(acc);
        }
        let mut out =
            PolySystem::new(ring, system.nvars, system.var_names.clone(), equations, tags);
        out.formulation = system.formulation;
        return Ok(SquaredSystem { system: out, combination: matrix });
    }
    Err(SolverError::RankDeficientCombination(MAX_DRAWS))
}

/// Rank of a k×n complex matrix by Gaussian elimination with full column
/// scanning; adequate for the small audit matrices used here.
fn numerical_rank(matrix: &[Vec<Complex64>]) -> usize {
    let k = matrix.len();
    if k == 0 {
        return 0;
    }
    let n = matrix[0].len();
    let mut a: Vec<Vec<Complex64>> = matrix.to_vec();
    let scale: f64 = a
        .iter()
        .flat_map(|r| r.iter().map(|c| c.norm()))
        .fold(0.0f64, f64::max)
        .max(1e-300);
    let tol = 1e-12 * scale;
    let mut rank = 0usize;
    let mut col = 0usize;
    while rank < k && col < n {
        let mut piv = rank;
        let mut best = a[rank][col].norm();
        for r in rank + 1..k {
            let v = a[r][col].norm();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if best <= tol {
            col += 1;
            continue;
        }
        a.swap(rank, piv);
        let inv = a[rank][col].inv();
        for r in rank + 1..k {
            let f = a[r][col] * inv;
            for c in col..n {
                let t = f * a[rank][c];
                a[r][c] -= t;
            }
        }
        rank += 1;
        col += 1;
    }
    rank
}

/// Keep the endpoints that are numerically real and actually solve the
/// full original (possibly overdetermined) system, sorted by residual.
///
/// An endpoint passes when its imaginary norm is at most
/// `imag_tol · (1 + ‖Re x‖)` and the ∞-norm residual of the original
/// system at Re x is at most `residual_tol · coefficient scale`.
pub fn filter_candidates(
    endpoints: &[Vec<Complex64>],
    original: &PolySystem<Reals>,
    imag_tol: f64,
    residual_tol: f64,
) -> Vec<SolutionCandidate> {
    let scale = original.coeff_scale();
    let mut out = Vec::new();
    for pt in endpoints {
        let real: Vec<f64> = pt.iter().map(|c| c.re).collect();
        let imag_norm = pt.iter().map(|c| c.im * c.im).sum::<f64>().sqrt();
        let real_norm = real.iter().map(|v| v * v).sum::<f64>().sqrt();
        if imag_norm > imag_tol * (1.0 + real_norm) {
            continue;
        }
        let residual = match original.residual_inf(&real) {
            Some(r) => r,
            None => continue,
        };
        if residual > residual_tol * scale {
            continue;
        }
        let unknowns = UnknownVector::from_slice(&real);
        let spd = unknowns.h_is_spd();
        out.push(SolutionCandidate { unknowns, residual_inf: residual, imag_norm, spd });
    }
    out.sort_by(|a, b| a.residual_inf.total_cmp(&b.residual_inf));
    out
}
