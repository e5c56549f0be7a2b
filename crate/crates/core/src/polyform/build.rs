//! Assembly of the self-calibration polynomial systems.
//!
//! The unknowns are always ordered (h₁₁, h₁₂, h₂₂, b₁, b₂, o₁, …, o_n):
//! three entries of the symmetric 2×2 matrix H = (LᵀL)⁻¹, the 2-vector
//! b = L⁻¹s₁, and one range offset per transmitter. Writing the compacted
//! measurement matrix as D = R̃ᵀS̃ with R̃ = Dᵀ (known up to the offsets) and
//! S̃ = I fixes the factorization, and three families of equations follow:
//!
//! * type A (degree 4): ‖s₁‖² written through H and b, cleared of H⁻¹ by
//!   multiplying with det H: bᵀadj(H)b − d₁₁²·det H = 0.
//! * type B (degree 4): the distance from receiver 1 to transmitter j+1,
//!   j = 1, 2: ¼·adj(H)_jj − (adj(H)b)_j − (d²_{1,j+1} − d₁₁²)·det H = 0.
//! * type C (degree 3): the distance from receiver i to transmitter 1,
//!   one per extra receiver: R̃ᵢᵀH R̃ᵢ − 2bᵀR̃ᵢ − (d²_{i1} − d₁₁²) = 0.
//!
//! Every d² is the offset-corrected square (f − o)², so the right-hand sides
//! are themselves polynomials in the offsets. A formulation picks how many
//! equations of each family to use and whether to add 3×3 minors of the full
//! compaction matrix (the offset-only rank constraints used with a fourth
//! transmitter).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::compaction::{
    build_compaction_symbolic, minor_polynomials, CompactionError, CompactionSymbolic,
};
use super::poly::{Mono, MultiPoly};
use super::ring::{CoeffRing, Complexes, PrimeField, Rationals, Reals};

/// Number of non-offset unknowns (h₁₁, h₁₂, h₂₂, b₁, b₂).
pub const NUM_SHAPE_VARS: usize = 5;

#[derive(Debug, Error, PartialEq)]
pub enum BuildError {
    #[error("formulation counts exceed the available equations")]
    FormulationOutOfBounds,
    #[error("measurement shape does not fit the requested system")]
    WrongConfiguration,
    #[error("coefficient not representable in the target domain")]
    DomainOverflow,
    #[error("system text: {0}")]
    Parse(String),
    #[error(transparent)]
    Compaction(#[from] CompactionError),
}

/// Canonical variable names for a system with `n_offsets` transmitters.
pub fn var_names(n_offsets: usize) -> Vec<String> {
    let mut v: Vec<String> =
        ["h11", "h12", "h22", "b1", "b2"].iter().map(|s| s.to_string()).collect();
    for j in 1..=n_offsets {
        v.push(format!("o{j}"));
    }
    v
}

/// A real point in unknown space, in the fixed variable order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnknownVector {
    pub h: [f64; 3],
    pub b: [f64; 2],
    pub offsets: Vec<f64>,
}

impl UnknownVector {
    pub fn from_slice(x: &[f64]) -> Self {
        assert!(x.len() >= NUM_SHAPE_VARS);
        UnknownVector {
            h: [x[0], x[1], x[2]],
            b: [x[3], x[4]],
            offsets: x[NUM_SHAPE_VARS..].to_vec(),
        }
    }

    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.nvars());
        v.extend_from_slice(&self.h);
        v.extend_from_slice(&self.b);
        v.extend_from_slice(&self.offsets);
        v
    }

    pub fn nvars(&self) -> usize {
        NUM_SHAPE_VARS + self.offsets.len()
    }

    pub fn det_h(&self) -> f64 {
        self.h[0] * self.h[2] - self.h[1] * self.h[1]
    }

    /// H positive definite (h₁₁ > 0 and det H > 0).
    pub fn h_is_spd(&self) -> bool {
        self.h[0] > 0.0 && self.det_h() > 0.0
    }
}

/// Where an equation came from; indices are 1-based receiver/transmitter
/// numbers, minor indices are 0-based row/column triples of the compaction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EquationTag {
    A,
    B { transmitter: usize },
    C { receiver: usize },
    Minor { rows: [usize; 3], cols: [usize; 3] },
    Combination { degree: usize },
    Saturation,
    Generic { index: usize },
}

/// How many equations of each family to assemble, and whether the 3×3
/// minors of the full compaction matrix are appended. Subset choices are
/// deterministic: lowest receiver/transmitter indices first, minors in
/// lexicographic (row-triple, column-triple) order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Formulation {
    pub num_a: usize,
    pub num_b: usize,
    pub num_c: usize,
    pub include_minors: bool,
    /// Keep only the first k minors (None = all).
    pub minor_limit: Option<usize>,
}

impl Formulation {
    pub fn abc(num_a: usize, num_b: usize, num_c: usize) -> Self {
        Formulation { num_a, num_b, num_c, include_minors: false, minor_limit: None }
    }

    pub fn with_minors(num_a: usize, num_b: usize, num_c: usize, limit: Option<usize>) -> Self {
        Formulation { num_a, num_b, num_c, include_minors: true, minor_limit: limit }
    }

    pub fn label(&self) -> String {
        let mut s = format!("{}{}{}", self.num_a, self.num_b, self.num_c);
        if self.include_minors {
            match self.minor_limit {
                Some(k) => s.push_str(&format!("+{k}m")),
                None => s.push_str("+m"),
            }
        }
        s
    }
}

/// A list of polynomial equations over one coefficient domain, all sharing
/// the fixed variable order, with per-equation provenance tags.
#[derive(Clone, Debug)]
pub struct PolySystem<R: CoeffRing> {
    pub ring: R,
    pub nvars: usize,
    pub var_names: Vec<String>,
    pub equations: Vec<MultiPoly<R>>,
    pub tags: Vec<EquationTag>,
    pub formulation: Option<Formulation>,
}

impl<R: CoeffRing> PolySystem<R> {
    pub fn new(
        ring: R,
        nvars: usize,
        var_names: Vec<String>,
        equations: Vec<MultiPoly<R>>,
        tags: Vec<EquationTag>,
    ) -> Self {
        assert_eq!(var_names.len(), nvars);
        assert_eq!(equations.len(), tags.len());
        for e in &equations {
            assert_eq!(e.nvars(), nvars);
        }
        PolySystem { ring, nvars, var_names, equations, tags, formulation: None }
    }

    /// Wrap plain equations (names default to x1..xk).
    pub fn from_equations(ring: R, nvars: usize, equations: Vec<MultiPoly<R>>) -> Self {
        let names = (1..=nvars).map(|i| format!("x{i}")).collect();
        let tags = (0..equations.len()).map(|i| EquationTag::Generic { index: i }).collect();
        PolySystem::new(ring, nvars, names, equations, tags)
    }

    pub fn len(&self) -> usize {
        self.equations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.equations.is_empty()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.equations.iter().map(|e| e.total_degree()).collect()
    }

    pub fn eval_all(&self, point: &[R::Elem]) -> Vec<R::Elem> {
        self.equations.iter().map(|e| e.eval(&self.ring, point)).collect()
    }

    /// Max |equation(point)| in float domains; None where magnitude is
    /// undefined (exact domains).
    pub fn residual_inf(&self, point: &[R::Elem]) -> Option<f64> {
        let mut worst = 0.0f64;
        for e in &self.equations {
            let v = e.eval(&self.ring, point);
            worst = worst.max(self.ring.magnitude(&v)?);
        }
        Some(worst)
    }

    /// Exact root test (all equations evaluate to zero).
    pub fn is_exact_root(&self, point: &[R::Elem]) -> bool {
        self.equations.iter().all(|e| self.ring.is_zero(&e.eval(&self.ring, point)))
    }

    /// Largest coefficient magnitude across the system (1.0 for exact domains,
    /// where scale has no meaning).
    pub fn coeff_scale(&self) -> f64 {
        let mut s = 0.0f64;
        for e in &self.equations {
            if let Some(m) = e.max_coeff_magnitude(&self.ring) {
                s = s.max(m);
            } else {
                return 1.0;
            }
        }
        if s == 0.0 {
            1.0
        } else {
            s
        }
    }

    /// Scale every equation so its largest coefficient magnitude is 1
    /// (float domains only; exact domains are returned unchanged).
    pub fn normalized(&self) -> Self {
        let mut out = self.clone();
        for e in &mut out.equations {
            if let Some(m) = e.max_coeff_magnitude(&self.ring) {
                if m > 0.0 {
                    if let Some(k) = self.ring.from_f64(1.0 / m) {
                        *e = e.scale(&self.ring, &k);
                    }
                }
            }
        }
        out
    }

    /// Substitute values for a subset of variables in every equation.
    pub fn substitute(&self, assignment: &[Option<R::Elem>]) -> Self {
        let mut out = self.clone();
        for e in &mut out.equations {
            *e = e.substitute_partial(&self.ring, assignment);
        }
        out
    }

    /// Text form: a `# vars:` header, then one polynomial per line with
    /// terms `coeff*name^e*...` joined by ` + `.
    pub fn to_text(&self) -> String {
        let mut s = format!("# vars: {}\n", self.var_names.join(","));
        for e in &self.equations {
            s.push_str(&e.to_text(&self.ring, &self.var_names));
            s.push('\n');
        }
        s
    }
}

/// Parse the `to_text` format with real coefficients.
pub fn parse_system_text(text: &str) -> Result<PolySystem<Reals>, BuildError> {
    let mut names: Option<Vec<String>> = None;
    let mut equations = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("# vars:") {
            names = Some(rest.trim().split(',').map(|s| s.trim().to_string()).collect());
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        let names = names.as_ref().ok_or_else(|| {
            BuildError::Parse("missing '# vars:' header before first polynomial".into())
        })?;
        let nvars = names.len();
        let mut terms = Vec::new();
        for term in line.split(" + ") {
            let mut coeff = None;
            let mut mono = Mono::one();
            for factor in term.split('*') {
                let factor = factor.trim();
                if coeff.is_none() {
                    let c: f64 = factor
                        .parse()
                        .map_err(|_| BuildError::Parse(format!("bad coefficient '{factor}'")))?;
                    coeff = Some(c);
                    continue;
                }
                let (name, exp) = match factor.split_once('^') {
                    Some((n, e)) => (
                        n,
                        e.parse::<u16>()
                            .map_err(|_| BuildError::Parse(format!("bad exponent '{e}'")))?,
                    ),
                    None => (factor, 1),
                };
                let idx = names
                    .iter()
                    .position(|v| v == name)
                    .ok_or_else(|| BuildError::Parse(format!("unknown variable '{name}'")))?;
                mono = mono.mul(&Mono::from_exps_at(idx, exp));
            }
            terms.push((mono, coeff.unwrap_or(0.0)));
        }
        equations.push(MultiPoly::from_terms(&Reals, nvars, terms));
    }
    let names = names.ok_or_else(|| BuildError::Parse("empty system text".into()))?;
    let nvars = names.len();
    Ok(PolySystem::from_equations(Reals, nvars, equations).with_names(names))
}

impl<R: CoeffRing> PolySystem<R> {
    fn with_names(mut self, names: Vec<String>) -> Self {
        assert_eq!(names.len(), self.nvars);
        self.var_names = names;
        self
    }
}

/// (f_ij − o_j)² as a polynomial in the full unknown space; `j` is the
/// 0-based transmitter index.
pub fn pseudorange_square<R: CoeffRing>(
    ring: &R,
    nvars: usize,
    f_ij: &R::Elem,
    j: usize,
) -> MultiPoly<R> {
    let ovar = NUM_SHAPE_VARS + j;
    MultiPoly::from_terms(
        ring,
        nvars,
        vec![
            (Mono::one(), ring.mul(f_ij, f_ij)),
            (Mono::var(ovar), ring.mul(&ring.from_int(-2), f_ij)),
            (Mono::from_exps_at(ovar, 2), ring.one()),
        ],
    )
}

/// Assemble type A/B/C equations on a 2-column compaction (transmitters
/// 1..3 effective). `f` is the full pseudorange matrix the compaction came
/// from. Minor settings on the formulation are ignored here; see
/// [`build_formulation_system`].
pub fn build_abc_equations<R: CoeffRing>(
    ring: &R,
    d: &CompactionSymbolic<R>,
    f: &[Vec<R::Elem>],
    formulation: &Formulation,
) -> Result<PolySystem<R>, BuildError> {
    if d.ncols() != 2 {
        return Err(BuildError::WrongConfiguration);
    }
    if f.len() != d.nrows() + 1 || f.first().map_or(0, |r| r.len()) != d.num_offsets() {
        return Err(BuildError::WrongConfiguration);
    }
    if formulation.num_a > 1
        || formulation.num_b > 2
        || formulation.num_c > d.nrows()
        || (formulation.num_b >= 1 && d.num_offsets() < 2)
        || (formulation.num_b >= 2 && d.num_offsets() < 3)
    {
        return Err(BuildError::FormulationOutOfBounds);
    }

    let nvars = d.nvars();
    let var = |i: usize| MultiPoly::variable(ring, nvars, i);
    let (h11, h12, h22) = (var(0), var(1), var(2));
    let (b1, b2) = (var(3), var(4));
    let det_h = h11.mul(ring, &h22).sub(ring, &h12.mul(ring, &h12));
    let dsq = |i: usize, j: usize| pseudorange_square(ring, nvars, &f[i][j], j);
    let d11 = dsq(0, 0);

    let mut equations = Vec::new();
    let mut tags = Vec::new();

    if formulation.num_a == 1 {
        // bᵀadj(H)b − d₁₁²·det H
        let badj_b = b1
            .mul(ring, &b1)
            .mul(ring, &h22)
            .sub(ring, &b1.mul(ring, &b2).mul(ring, &h12).scale(ring, &ring.from_int(2)))
            .add(ring, &b2.mul(ring, &b2).mul(ring, &h11));
        equations.push(badj_b.sub(ring, &d11.mul(ring, &det_h)));
        tags.push(EquationTag::A);
    }

    for j in 2..2 + formulation.num_b {
        // ¼·adj(H)_kk − (adj(H)b)_k − (d²_{1j} − d₁₁²)·det H, k = j−1.
        let (adj_kk, adj_b_k) = if j == 2 {
            (&h22, h22.mul(ring, &b1).sub(ring, &h12.mul(ring, &b2)))
        } else {
            (&h11, h11.mul(ring, &b2).sub(ring, &h12.mul(ring, &b1)))
        };
        let rhs = dsq(0, j - 1).sub(ring, &d11);
        let eq = adj_kk
            .scale(ring, &ring.from_ratio(1, 4))
            .sub(ring, &adj_b_k)
            .sub(ring, &rhs.mul(ring, &det_h));
        equations.push(eq);
        tags.push(EquationTag::B { transmitter: j });
    }

    for i in 2..2 + formulation.num_c {
        // R̃ᵢᵀHR̃ᵢ − 2bᵀR̃ᵢ − (d²_{i1} − d₁₁²); R̃ᵢ is row i−2 of the compaction.
        let u = d.entry(i - 2, 0);
        let v = d.entry(i - 2, 1);
        let quad = h11
            .mul(ring, &u.mul(ring, u))
            .add(ring, &h12.mul(ring, &u.mul(ring, v)).scale(ring, &ring.from_int(2)))
            .add(ring, &h22.mul(ring, &v.mul(ring, v)));
        let lin = b1.mul(ring, u).add(ring, &b2.mul(ring, v)).scale(ring, &ring.from_int(2));
        let rhs = dsq(i - 1, 0).sub(ring, &d11);
        equations.push(quad.sub(ring, &lin).sub(ring, &rhs));
        tags.push(EquationTag::C { receiver: i });
    }

    let mut sys = PolySystem::new(ring.clone(), nvars, var_names(d.num_offsets()), equations, tags);
    sys.formulation = Some(*formulation);
    Ok(sys)
}

/// Build a full formulation system from raw pseudoranges: A/B/C equations on
/// the first two compaction columns, plus (optionally) 3×3 minors of the full
/// compaction matrix.
pub fn build_formulation_system<R: CoeffRing>(
    ring: &R,
    f: &[Vec<R::Elem>],
    formulation: &Formulation,
) -> Result<PolySystem<R>, BuildError> {
    let full = build_compaction_symbolic(ring, f)?;
    if full.ncols() < 2 {
        return Err(BuildError::WrongConfiguration);
    }
    let dhat = full.first_columns(2);
    let mut sys = build_abc_equations(ring, &dhat, f, formulation)?;
    if formulation.include_minors {
        let minors = minor_polynomials(ring, &full)?;
        let keep = formulation.minor_limit.unwrap_or(minors.len());
        if keep > minors.len() {
            return Err(BuildError::FormulationOutOfBounds);
        }
        for (p, rows, cols) in minors.into_iter().take(keep) {
            sys.equations.push(p);
            sys.tags.push(EquationTag::Minor { rows, cols });
        }
    }
    Ok(sys)
}

/// The 16-equation 6-receiver/4-transmitter system: 5 type-C and 1 type-B
/// (transmitter 2) on the reduced compaction, plus all 10 minors of the full
/// 5×3 compaction.
pub fn build_6r4s_system<R: CoeffRing>(
    ring: &R,
    f: &[Vec<R::Elem>],
) -> Result<PolySystem<R>, BuildError> {
    build_6r4s_variant(ring, f, None)
}

/// 6r/4s with a cap on how many minors are used (e.g. 3 for the reduced
/// variant analyzed alongside the full one).
pub fn build_6r4s_variant<R: CoeffRing>(
    ring: &R,
    f: &[Vec<R::Elem>],
    minor_limit: Option<usize>,
) -> Result<PolySystem<R>, BuildError> {
    if f.len() != 6 || f.first().map_or(0, |r| r.len()) != 4 {
        return Err(BuildError::WrongConfiguration);
    }
    build_formulation_system(ring, f, &Formulation::with_minors(0, 1, 5, minor_limit))
}

/// Convert a real-coefficient system to complex coefficients (for the
/// homotopy tracker).
pub fn real_to_complex(sys: &PolySystem<Reals>) -> PolySystem<Complexes> {
    let ring = Complexes;
    let equations = sys
        .equations
        .iter()
        .map(|e| e.map_coeffs(&ring, |c| num_complex::Complex64::new(*c, 0.0)))
        .collect();
    let mut out =
        PolySystem::new(ring, sys.nvars, sys.var_names.clone(), equations, sys.tags.clone());
    out.formulation = sys.formulation;
    out
}

/// Reduce a rational-coefficient system into GF(p). Fails with
/// `DomainOverflow` when any denominator is divisible by p.
pub fn rational_to_prime(
    sys: &PolySystem<Rationals>,
    field: PrimeField,
) -> Result<PolySystem<PrimeField>, BuildError> {
    let mut equations = Vec::with_capacity(sys.len());
    for e in &sys.equations {
        let mut terms = Vec::with_capacity(e.num_terms());
        for (m, c) in e.terms() {
            let den = field.reduce_i128(*c.denom());
            let den_inv = field.inv(&den).ok_or(BuildError::DomainOverflow)?;
            let num = field.reduce_i128(*c.numer());
            terms.push((*m, field.mul(&num, &den_inv)));
        }
        equations.push(MultiPoly::from_terms(&field, sys.nvars, terms));
    }
    let mut out =
        PolySystem::new(field, sys.nvars, sys.var_names.clone(), equations, sys.tags.clone());
    out.formulation = sys.formulation;
    Ok(out)
}

/// Convert a rational-coefficient system to floating point.
pub fn rational_to_real(sys: &PolySystem<Rationals>) -> PolySystem<Reals> {
    let equations = sys
        .equations
        .iter()
        .map(|e| e.map_coeffs(&Reals, |c| *c.numer() as f64 / *c.denom() as f64))
        .collect();
    let mut out =
        PolySystem::new(Reals, sys.nvars, sys.var_names.clone(), equations, sys.tags.clone());
    out.formulation = sys.formulation;
    out
}
