//! Double-differenced squared-distance ("compaction") matrices.
//!
//! For receivers r_i and transmitters s_j with squared distances d²_ij, the
//! compacted matrix
//!
//! ```text
//! [D]_ij = d²_{i+1,j+1} − d²_{1,j+1} − d²_{i+1,1} + d²_{11}
//! ```
//!
//! telescopes to −2 RᵀS where R and S hold the receiver/transmitter
//! differences against the first of each, so D has rank ≤ 2 in the plane.
//! With pseudoranges the distances are only known through the offsets,
//! d_ij = f_ij − o_j, so the same construction is carried out symbolically:
//! every entry becomes an affine polynomial in (o₁, o_{j+1}) — the o² terms
//! cancel in the double difference. Rank ≤ 2 then turns into vanishing 3×3
//! minors, which are the offset-only equations used by the 6r/4s system.

use nalgebra::DMatrix;
use thiserror::Error;

use crate::polyform::{CoeffRing, Mono, MultiPoly, NUM_SHAPE_VARS};

#[derive(Debug, Error, PartialEq)]
pub enum CompactionError {
    #[error("compaction needs at least 2 receivers and 2 transmitters")]
    DimensionError,
    #[error("dropping a column needs at least 4 transmitters")]
    TooFewTransmitters,
    #[error("3x3 minors need at least 3 rows and 3 columns")]
    TooSmall,
}

/// Numeric compaction of a squared-distance matrix; (m−1)×(n−1).
#[derive(Clone, Debug)]
pub struct CompactionNumeric {
    pub entries: DMatrix<f64>,
}

impl CompactionNumeric {
    /// σ₃/σ₁ of the entries; None when there is no third singular value.
    /// Noiseless data gives ≤ ~1e-8 (rank ≤ 2).
    pub fn rank2_ratio(&self) -> Option<f64> {
        let (r, c) = self.entries.shape();
        if r.min(c) < 3 {
            return None;
        }
        let sv = self.entries.clone().singular_values();
        if sv[0] == 0.0 {
            return Some(0.0);
        }
        Some(sv[2] / sv[0])
    }
}

/// Symbolic compaction: entries are polynomials in the global unknown vector
/// (h₁₁,h₁₂,h₂₂,b₁,b₂,o₁..o_n), of which only the offsets occur.
#[derive(Clone, Debug)]
pub struct CompactionSymbolic<R: CoeffRing> {
    nrows: usize,
    ncols: usize,
    n_offsets: usize,
    entries: Vec<MultiPoly<R>>,
}

impl<R: CoeffRing> CompactionSymbolic<R> {
    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn num_offsets(&self) -> usize {
        self.n_offsets
    }

    pub fn nvars(&self) -> usize {
        NUM_SHAPE_VARS + self.n_offsets
    }

    pub fn entry(&self, i: usize, j: usize) -> &MultiPoly<R> {
        &self.entries[i * self.ncols + j]
    }

    /// Keep only the first `k` columns (transmitters 2..k+1).
    pub fn first_columns(&self, k: usize) -> CompactionSymbolic<R> {
        assert!(k <= self.ncols);
        let mut entries = Vec::with_capacity(self.nrows * k);
        for i in 0..self.nrows {
            for j in 0..k {
                entries.push(self.entry(i, j).clone());
            }
        }
        CompactionSymbolic { nrows: self.nrows, ncols: k, n_offsets: self.n_offsets, entries }
    }

    /// Evaluate every entry at one point of the full unknown space.
    pub fn eval(&self, ring: &R, point: &[R::Elem]) -> Vec<Vec<R::Elem>> {
        (0..self.nrows)
            .map(|i| (0..self.ncols).map(|j| self.entry(i, j).eval(ring, point)).collect())
            .collect()
    }
}

/// Compact an m×n matrix of squared distances into the (m−1)×(n−1) double
/// difference.
pub fn build_compaction_numeric(sq: &DMatrix<f64>) -> Result<CompactionNumeric, CompactionError> {
    let (m, n) = sq.shape();
    if m < 2 || n < 2 {
        return Err(CompactionError::DimensionError);
    }
    let entries = DMatrix::from_fn(m - 1, n - 1, |i, j| {
        sq[(i + 1, j + 1)] - sq[(0, j + 1)] - sq[(i + 1, 0)] + sq[(0, 0)]
    });
    Ok(CompactionNumeric { entries })
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bp = s - a;
    (s, (a - (s - bp)) + (b - bp))
}

fn two_product(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// Neumaier-compensated sum: accurate to ~1 ulp of the true total even
/// under heavy cancellation between the summands.
fn compensated_sum(values: &[f64]) -> f64 {
    let mut s = 0.0;
    let mut c = 0.0;
    for &v in values {
        let t = s + v;
        c += if s.abs() >= v.abs() { (s - t) + v } else { (v - t) + s };
        s = t;
    }
    s + c
}

/// Numeric compaction straight from pseudoranges and offsets. The naive
/// route (square the corrected ranges, then double-difference) loses most
/// significant digits to cancellation because the entries are orders of
/// magnitude below the squared ranges; here every (f − o)² is kept as an
/// exact sum of products and the sixteen pieces per entry are compensated,
/// so the result is accurate to the last few bits.
pub fn compact_pseudoranges(
    f: &[Vec<f64>],
    offsets: &[f64],
) -> Result<CompactionNumeric, CompactionError> {
    let m = f.len();
    let n = f.first().map_or(0, |row| row.len());
    if m < 2 || n < 2 || offsets.len() != n {
        return Err(CompactionError::DimensionError);
    }
    // Exact pieces of sign·(f − o)²: with f − o = d + e (error-free split),
    // the square is d² + 2de + e², each product split again.
    let push = |parts: &mut Vec<f64>, fij: f64, o: f64, sign: f64| {
        let (d, e) = two_sum(fij, -o);
        let (p, pe) = two_product(d, d);
        let (q, qe) = two_product(2.0 * d, e);
        parts.extend_from_slice(&[sign * p, sign * pe, sign * q, sign * qe, sign * (e * e)]);
    };
    let entries = DMatrix::from_fn(m - 1, n - 1, |i, j| {
        let mut parts = Vec::with_capacity(20);
        push(&mut parts, f[i + 1][j + 1], offsets[j + 1], 1.0);
        push(&mut parts, f[0][j + 1], offsets[j + 1], -1.0);
        push(&mut parts, f[i + 1][0], offsets[0], -1.0);
        push(&mut parts, f[0][0], offsets[0], 1.0);
        compensated_sum(&parts)
    });
    Ok(CompactionNumeric { entries })
}

/// Compact pseudoranges symbolically: d²_ij = (f_ij − o_j)² is expanded as a
/// polynomial in o_j and the four-term difference is formed with exact
/// coefficient arithmetic, so the o² cancellation is structural.
pub fn build_compaction_symbolic<R: CoeffRing>(
    ring: &R,
    f: &[Vec<R::Elem>],
) -> Result<CompactionSymbolic<R>, CompactionError> {
    let m = f.len();
    let n = f.first().map_or(0, |row| row.len());
    if m < 2 || n < 2 {
        return Err(CompactionError::DimensionError);
    }
    let nvars = NUM_SHAPE_VARS + n;
    // d²_ij = f² − 2f·o_j + o_j² in the full variable space.
    let dsq = |i: usize, j: usize| -> MultiPoly<R> {
        let fij = &f[i][j];
        let ovar = NUM_SHAPE_VARS + j;
        MultiPoly::from_terms(
            ring,
            nvars,
            vec![
                (Mono::one(), ring.mul(fij, fij)),
                (Mono::var(ovar), ring.mul(&ring.from_int(-2), fij)),
                (Mono::from_exps_at(ovar, 2), ring.one()),
            ],
        )
    };
    let mut entries = Vec::with_capacity((m - 1) * (n - 1));
    for i in 0..m - 1 {
        for j in 0..n - 1 {
            let p = dsq(i + 1, j + 1)
                .sub(ring, &dsq(0, j + 1))
                .sub(ring, &dsq(i + 1, 0))
                .add(ring, &dsq(0, 0));
            entries.push(p);
        }
    }
    Ok(CompactionSymbolic { nrows: m - 1, ncols: n - 1, n_offsets: n, entries })
}

/// Discard the last column (the reduced matrix used to build the shape
/// equations when a fourth transmitter is present).
pub fn drop_last_column<R: CoeffRing>(
    d: &CompactionSymbolic<R>,
) -> Result<CompactionSymbolic<R>, CompactionError> {
    if d.ncols < 3 {
        return Err(CompactionError::TooFewTransmitters);
    }
    Ok(d.first_columns(d.ncols - 1))
}

/// All 3×3 minors of the symbolic compaction, cofactor-expanded; row and
/// column triples are enumerated in lexicographic order (rows outer).
pub fn minor_polynomials<R: CoeffRing>(
    ring: &R,
    d: &CompactionSymbolic<R>,
) -> Result<Vec<(MultiPoly<R>, [usize; 3], [usize; 3])>, CompactionError> {
    if d.nrows < 3 || d.ncols < 3 {
        return Err(CompactionError::TooSmall);
    }
    let mut out = Vec::new();
    for rows in triples(d.nrows) {
        for cols in triples(d.ncols) {
            let e = |a: usize, b: usize| d.entry(rows[a], cols[b]);
            let det2 = |p: &MultiPoly<R>, q: &MultiPoly<R>, r2: &MultiPoly<R>, s: &MultiPoly<R>| {
                p.mul(ring, s).sub(ring, &q.mul(ring, r2))
            };
            let m00 = det2(e(1, 1), e(1, 2), e(2, 1), e(2, 2));
            let m01 = det2(e(1, 0), e(1, 2), e(2, 0), e(2, 2));
            let m02 = det2(e(1, 0), e(1, 1), e(2, 0), e(2, 1));
            let det = e(0, 0)
                .mul(ring, &m00)
                .sub(ring, &e(0, 1).mul(ring, &m01))
                .add(ring, &e(0, 2).mul(ring, &m02));
            out.push((det, rows, cols));
        }
    }
    Ok(out)
}

fn triples(k: usize) -> Vec<[usize; 3]> {
    let mut v = Vec::new();
    for a in 0..k {
        for b in a + 1..k {
            for c in b + 1..k {
                v.push([a, b, c]);
            }
        }
    }
    v
}
