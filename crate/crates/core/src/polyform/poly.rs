//! Sparse multivariate polynomials over a pluggable coefficient ring.

use std::cmp::Ordering;
use std::collections::HashMap;

use super::ring::CoeffRing;

/// Hard cap on the number of variables a monomial can carry.
pub const MAX_VARS: usize = 16;

/// A monomial: per-variable exponents plus the cached total degree.
///
/// Exponent slots beyond the owning polynomial's variable count stay zero,
/// so comparisons and divisibility tests can scan the full array.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Mono {
    exps: [u16; MAX_VARS],
    degree: u16,
}

impl Mono {
    pub fn one() -> Self {
        Mono { exps: [0; MAX_VARS], degree: 0 }
    }

    pub fn var(i: usize) -> Self {
        let mut m = Mono::one();
        m.exps[i] = 1;
        m.degree = 1;
        m
    }

    pub fn from_exps(exps: &[u16]) -> Self {
        assert!(exps.len() <= MAX_VARS);
        let mut m = Mono::one();
        m.exps[..exps.len()].copy_from_slice(exps);
        m.degree = exps.iter().sum();
        m
    }

    /// Single variable raised to a power.
    pub fn from_exps_at(i: usize, e: u16) -> Self {
        let mut m = Mono::one();
        m.exps[i] = e;
        m.degree = e;
        m
    }

    pub fn exp(&self, i: usize) -> u16 {
        self.exps[i]
    }

    pub fn exps(&self) -> &[u16; MAX_VARS] {
        &self.exps
    }

    pub fn degree(&self) -> u16 {
        self.degree
    }

    pub fn is_one(&self) -> bool {
        self.degree == 0
    }

    pub fn mul(&self, other: &Mono) -> Mono {
        let mut m = *self;
        for i in 0..MAX_VARS {
            m.exps[i] += other.exps[i];
        }
        m.degree += other.degree;
        m
    }

    pub fn divides(&self, other: &Mono) -> bool {
        if self.degree > other.degree {
            return false;
        }
        self.exps.iter().zip(other.exps.iter()).all(|(a, b)| a <= b)
    }

    /// `other / self`, assuming divisibility.
    pub fn div_into(&self, other: &Mono) -> Mono {
        let mut m = *other;
        for i in 0..MAX_VARS {
            debug_assert!(m.exps[i] >= self.exps[i]);
            m.exps[i] -= self.exps[i];
        }
        m.degree -= self.degree;
        m
    }

    pub fn lcm(&self, other: &Mono) -> Mono {
        let mut m = Mono::one();
        let mut deg = 0u16;
        for i in 0..MAX_VARS {
            m.exps[i] = self.exps[i].max(other.exps[i]);
            deg += m.exps[i];
        }
        m.degree = deg;
        m
    }

    pub fn coprime(&self, other: &Mono) -> bool {
        self.exps.iter().zip(other.exps.iter()).all(|(a, b)| *a == 0 || *b == 0)
    }

    /// Zero out a variable's exponent (used by partial substitution).
    pub fn clear_var(&self, i: usize) -> Mono {
        let mut m = *self;
        m.degree -= m.exps[i];
        m.exps[i] = 0;
        m
    }
}

/// Monomial orders used by the Gröbner machinery and for the canonical
/// storage order of polynomial terms. Variables with a higher index are
/// more significant: x₀ is the smallest variable, x₁₅ the largest.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MonomialOrder {
    /// Graded reverse lexicographic.
    Grevlex,
    /// Pure lexicographic.
    Lex,
}

impl MonomialOrder {
    pub fn cmp(&self, a: &Mono, b: &Mono) -> Ordering {
        match self {
            MonomialOrder::Grevlex => {
                match a.degree.cmp(&b.degree) {
                    Ordering::Equal => {}
                    ord => return ord,
                }
                for i in 0..MAX_VARS {
                    if a.exps[i] != b.exps[i] {
                        // Smallest differing variable: less of it wins.
                        return if a.exps[i] < b.exps[i] {
                            Ordering::Greater
                        } else {
                            Ordering::Less
                        };
                    }
                }
                Ordering::Equal
            }
            MonomialOrder::Lex => {
                for i in (0..MAX_VARS).rev() {
                    if a.exps[i] != b.exps[i] {
                        return a.exps[i].cmp(&b.exps[i]);
                    }
                }
                Ordering::Equal
            }
        }
    }
}

/// A sparse multivariate polynomial. Terms are kept sorted in descending
/// grevlex order with no zero coefficients and no repeated monomials.
#[derive(Clone, Debug)]
pub struct MultiPoly<R: CoeffRing> {
    nvars: usize,
    terms: Vec<(Mono, R::Elem)>,
}

impl<R: CoeffRing> PartialEq for MultiPoly<R> {
    fn eq(&self, other: &Self) -> bool {
        self.nvars == other.nvars && self.terms == other.terms
    }
}

impl<R: CoeffRing> MultiPoly<R> {
    pub fn zero(nvars: usize) -> Self {
        assert!(nvars <= MAX_VARS);
        MultiPoly { nvars, terms: Vec::new() }
    }

    pub fn constant(ring: &R, nvars: usize, c: R::Elem) -> Self {
        let mut p = MultiPoly::zero(nvars);
        if !ring.is_zero(&c) {
            p.terms.push((Mono::one(), c));
        }
        p
    }

    pub fn variable(ring: &R, nvars: usize, i: usize) -> Self {
        assert!(i < nvars);
        MultiPoly { nvars, terms: vec![(Mono::var(i), ring.one())] }
    }

    /// Build from raw (monomial, coefficient) pairs; merges duplicates.
    pub fn from_terms(ring: &R, nvars: usize, raw: Vec<(Mono, R::Elem)>) -> Self {
        let mut p = MultiPoly::zero(nvars);
        p.extend_terms(ring, raw);
        p
    }

    fn extend_terms(&mut self, ring: &R, raw: Vec<(Mono, R::Elem)>) {
        let mut map: HashMap<Mono, R::Elem> = HashMap::with_capacity(self.terms.len() + raw.len());
        for (m, c) in self.terms.drain(..).chain(raw) {
            match map.entry(m) {
                std::collections::hash_map::Entry::Occupied(mut e) => {
                    let s = ring.add(e.get(), &c);
                    if ring.is_zero(&s) {
                        e.remove();
                    } else {
                        e.insert(s);
                    }
                }
                std::collections::hash_map::Entry::Vacant(e) => {
                    if !ring.is_zero(&c) {
                        e.insert(c);
                    }
                }
            }
        }
        self.terms = map.into_iter().collect();
        self.terms
            .sort_unstable_by(|a, b| MonomialOrder::Grevlex.cmp(&b.0, &a.0));
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> &[(Mono, R::Elem)] {
        &self.terms
    }

    pub fn total_degree(&self) -> usize {
        self.terms.iter().map(|(m, _)| m.degree() as usize).max().unwrap_or(0)
    }

    /// Maximum exponent of one variable across all terms.
    pub fn degree_in(&self, var: usize) -> usize {
        self.terms.iter().map(|(m, _)| m.exp(var) as usize).max().unwrap_or(0)
    }

    pub fn add(&self, ring: &R, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        out.extend_terms(ring, other.terms.clone());
        out
    }

    pub fn sub(&self, ring: &R, other: &Self) -> Self {
        self.add(ring, &other.neg(ring))
    }

    pub fn neg(&self, ring: &R) -> Self {
        MultiPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (*m, ring.neg(c))).collect(),
        }
    }

    pub fn scale(&self, ring: &R, k: &R::Elem) -> Self {
        if ring.is_zero(k) {
            return MultiPoly::zero(self.nvars);
        }
        let mut out = MultiPoly::zero(self.nvars);
        out.extend_terms(
            ring,
            self.terms.iter().map(|(m, c)| (*m, ring.mul(c, k))).collect(),
        );
        out
    }

    pub fn mul(&self, ring: &R, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut raw = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                raw.push((ma.mul(mb), ring.mul(ca, cb)));
            }
        }
        MultiPoly::from_terms(ring, self.nvars, raw)
    }

    pub fn eval(&self, ring: &R, point: &[R::Elem]) -> R::Elem {
        assert_eq!(point.len(), self.nvars);
        let mut acc = ring.zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for v in 0..self.nvars {
                let e = m.exp(v);
                if e > 0 {
                    t = ring.mul(&t, &ring.pow(&point[v], e as u32));
                }
            }
            acc = ring.add(&acc, &t);
        }
        acc
    }

    /// Substitute values for a subset of the variables; the result keeps the
    /// same variable slots (the substituted ones just no longer occur).
    pub fn substitute_partial(&self, ring: &R, assignment: &[Option<R::Elem>]) -> Self {
        assert_eq!(assignment.len(), self.nvars);
        let mut raw = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            let mut mono = *m;
            let mut coeff = c.clone();
            for (v, a) in assignment.iter().enumerate() {
                if let Some(val) = a {
                    let e = mono.exp(v);
                    if e > 0 {
                        coeff = ring.mul(&coeff, &ring.pow(val, e as u32));
                        mono = mono.clear_var(v);
                    }
                }
            }
            raw.push((mono, coeff));
        }
        MultiPoly::from_terms(ring, self.nvars, raw)
    }

    /// Map coefficients into another ring, dropping terms that map to zero.
    pub fn map_coeffs<S: CoeffRing>(
        &self,
        target: &S,
        f: impl Fn(&R::Elem) -> S::Elem,
    ) -> MultiPoly<S> {
        MultiPoly::from_terms(
            target,
            self.nvars,
            self.terms.iter().map(|(m, c)| (*m, f(c))).collect(),
        )
    }

    /// Partial derivative with respect to one variable.
    pub fn derivative(&self, ring: &R, var: usize) -> Self {
        let mut raw = Vec::new();
        for (m, c) in &self.terms {
            let e = m.exp(var);
            if e > 0 {
                let mut dm = *m;
                dm.exps[var] -= 1;
                dm.degree -= 1;
                raw.push((dm, ring.mul(c, &ring.from_int(e as i64))));
            }
        }
        MultiPoly::from_terms(ring, self.nvars, raw)
    }

    /// Largest coefficient magnitude (float-like domains only).
    pub fn max_coeff_magnitude(&self, ring: &R) -> Option<f64> {
        self.terms
            .iter()
            .filter_map(|(_, c)| ring.magnitude(c))
            .fold(None, |acc, x| Some(acc.map_or(x, |a: f64| a.max(x))))
    }

    /// Render in the text format used by the system dump:
    /// terms joined by `+`, each `coeff*name^e*...`; the zero polynomial is `0`.
    pub fn to_text(&self, ring: &R, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut parts = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            let mut s = ring.format_elem(c);
            for v in 0..self.nvars {
                let e = m.exp(v);
                if e > 0 {
                    s.push('*');
                    s.push_str(&names[v]);
                    s.push('^');
                    s.push_str(&e.to_string());
                }
            }
            parts.push(s);
        }
        parts.join(" + ")
    }
}
