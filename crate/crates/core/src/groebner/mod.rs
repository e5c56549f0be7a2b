//! Gröbner-basis machinery over a prime field: Buchberger's algorithm with
//! the Gebauer-Möller pair criteria, standard-monomial counting, univariate
//! eliminants, and solution-count tables for the calibration formulations.
//!
//! The number of standard monomials of a zero-dimensional ideal equals the
//! dimension of the quotient ring, i.e. the number of complex solutions
//! counted with multiplicity. Computed over GF(p) on exactly consistent
//! instances, it measures how hard each formulation is for an algebraic
//! solver, independent of floating-point concerns.

pub mod sample;
pub mod univar;

pub use sample::{ground_truth_unknowns, sample_consistent_instance_mod_p, ConsistentInstance};

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap, HashSet};
use std::time::Instant;

use thiserror::Error;

use crate::polyform::{
    build_formulation_system, BuildError, CoeffRing, EquationTag, Formulation, Mono,
    MonomialOrder, MultiPoly, PolySystem, PrimeField,
};

#[derive(Debug, Error)]
pub enum GroebnerError {
    #[error("S-pair budget exceeded")]
    PairBudgetExceeded,
    #[error("sampling budget exceeded while searching for a consistent instance")]
    SamplingBudgetExceeded,
    #[error(transparent)]
    Build(#[from] BuildError),
}

#[derive(Clone, Copy, Debug)]
pub struct GroebnerOptions {
    pub order: MonomialOrder,
    /// Cap on processed S-pairs before giving up.
    pub pair_budget: usize,
}

impl Default for GroebnerOptions {
    fn default() -> Self {
        GroebnerOptions { order: MonomialOrder::Grevlex, pair_budget: 5_000_000 }
    }
}

/// A reduced Gröbner basis plus the standard-monomial data derived from it.
#[derive(Clone, Debug)]
pub struct GroebnerResult {
    /// Auto-reduced basis, sorted by ascending lead monomial; leads are
    /// monic and pairwise non-divisible.
    pub basis: Vec<MultiPoly<PrimeField>>,
    /// Monomials divisible by no basis lead, ascending; empty when the
    /// ideal is positive-dimensional (infinitely many) or the unit ideal.
    pub standard_monomials: Vec<Mono>,
    /// Quotient dimension = solution count with multiplicity; `None` when
    /// positive-dimensional.
    pub basis_size: Option<usize>,
    pub zero_dimensional: bool,
    /// Quotient dimension after imposing det(H) ≠ 0 (set only when
    /// saturation was requested).
    pub saturated_size: Option<usize>,
    pub pairs_processed: usize,
}

/// Sorted-descending monic term list; the working representation inside the
/// engine.
type Terms = Vec<(Mono, u64)>;

/// Mono wrapper ordered by a runtime-chosen monomial order, so BTreeMap can
/// serve as the reduction tail with max-extraction.
#[derive(Clone, Copy, PartialEq, Eq)]
struct OrdMono {
    m: Mono,
    order: MonomialOrder,
}

impl PartialOrd for OrdMono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrdMono {
    fn cmp(&self, other: &Self) -> Ordering {
        self.order.cmp(&self.m, &other.m)
    }
}

#[derive(Clone, Copy)]
struct Pair {
    i: usize,
    j: usize,
    lcm: Mono,
}

struct Engine {
    field: PrimeField,
    order: MonomialOrder,
    /// Arena of all polynomials ever added; indices are stable so queued
    /// pairs stay valid after redundancy pruning.
    polys: Vec<Terms>,
    active: Vec<bool>,
    pairs: Vec<Pair>,
    pairs_processed: usize,
    budget: usize,
}

impl Engine {
    fn new(field: PrimeField, order: MonomialOrder, budget: usize) -> Self {
        Engine { field, order, polys: Vec::new(), active: Vec::new(), pairs: Vec::new(), pairs_processed: 0, budget }
    }

    fn lead(&self, i: usize) -> Mono {
        self.polys[i][0].0
    }

    fn sorted_terms(&self, p: &MultiPoly<PrimeField>) -> Terms {
        let mut t: Terms = p.terms().to_vec();
        if self.order != MonomialOrder::Grevlex {
            t.sort_unstable_by(|a, b| self.order.cmp(&b.0, &a.0));
        }
        t
    }

    fn make_monic(&self, mut t: Terms) -> Terms {
        let c = t[0].1;
        if c != 1 {
            let inv = self.field.inv(&c).expect("nonzero lead");
            for (_, v) in &mut t {
                *v = self.field.mul(v, &inv);
            }
        }
        t
    }

    fn to_map(&self, t: &[(Mono, u64)]) -> BTreeMap<OrdMono, u64> {
        t.iter().map(|&(m, c)| (OrdMono { m, order: self.order }, c)).collect()
    }

    fn map_add(&self, map: &mut BTreeMap<OrdMono, u64>, m: Mono, c: u64) {
        if c == 0 {
            return;
        }
        let key = OrdMono { m, order: self.order };
        let e = map.entry(key).or_insert(0);
        *e = self.field.add(e, &c);
        if *e == 0 {
            map.remove(&key);
        }
    }

    /// Reducer for `m`: the active poly with fewest terms whose lead divides
    /// `m` (ties broken by index, for determinism).
    fn find_reducer(&self, m: &Mono) -> Option<usize> {
        let mut best: Option<(usize, usize)> = None;
        for (i, t) in self.polys.iter().enumerate() {
            if self.active[i] && t[0].0.divides(m) {
                let key = (t.len(), i);
                if best.map_or(true, |b| key < b) {
                    best = Some(key);
                }
            }
        }
        best.map(|(_, i)| i)
    }

    /// Full normal form of the polynomial held in `tail`, returned sorted
    /// descending. Extracts the current maximum; if reducible, subtracts the
    /// matching multiple of the reducer's tail (leads cancel exactly since
    /// arena polys are monic), otherwise emits it.
    fn reduce_map(&self, mut tail: BTreeMap<OrdMono, u64>) -> Terms {
        let mut out = Terms::new();
        while let Some((k, c)) = tail.pop_last() {
            match self.find_reducer(&k.m) {
                Some(g) => {
                    let shift = self.polys[g][0].0.div_into(&k.m);
                    // Split borrow: read the reducer terms via raw index per
                    // iteration to keep `tail` mutable.
                    for t in 1..self.polys[g].len() {
                        let (m, v) = self.polys[g][t];
                        let delta = self.field.mul(&c, &v);
                        self.map_add(&mut tail, m.mul(&shift), self.field.neg(&delta));
                    }
                }
                None => out.push((k.m, c)),
            }
        }
        out
    }

    fn spoly_map(&self, pair: &Pair) -> BTreeMap<OrdMono, u64> {
        let mut map = BTreeMap::new();
        let si = self.lead(pair.i).div_into(&pair.lcm);
        let sj = self.lead(pair.j).div_into(&pair.lcm);
        for &(m, c) in &self.polys[pair.i][1..] {
            self.map_add(&mut map, m.mul(&si), c);
        }
        for &(m, c) in &self.polys[pair.j][1..] {
            self.map_add(&mut map, m.mul(&sj), self.field.neg(&c));
        }
        map
    }

    /// Append a new monic polynomial and refresh the pair queue with the
    /// Gebauer-Möller criteria: drop new pairs dominated by a strictly
    /// smaller lcm, drop coprime-lead pairs, prune old pairs by the chain
    /// criterion, and retire basis members whose lead the new lead divides.
    fn add_poly_with_update(&mut self, terms: Terms) {
        let h = self.polys.len();
        let lt_h = terms[0].0;
        self.polys.push(terms);
        self.active.push(true);

        let cand: Vec<Pair> = (0..h)
            .filter(|&g| self.active[g])
            .map(|g| Pair { i: g, j: h, lcm: self.lead(g).lcm(&lt_h) })
            .collect();
        let mut fresh: Vec<Pair> = Vec::new();
        for idx in 0..cand.len() {
            let p = cand[idx];
            let coprime = self.lead(p.i).coprime(&lt_h);
            let dominated = cand[idx + 1..]
                .iter()
                .chain(fresh.iter())
                .any(|q| q.lcm.divides(&p.lcm));
            if coprime || !dominated {
                fresh.push(p);
            }
        }
        fresh.retain(|p| !self.lead(p.i).coprime(&lt_h));

        let polys = &self.polys;
        self.pairs.retain(|p| {
            !lt_h.divides(&p.lcm)
                || polys[p.i][0].0.lcm(&lt_h) == p.lcm
                || polys[p.j][0].0.lcm(&lt_h) == p.lcm
        });
        self.pairs.extend(fresh);

        for g in 0..h {
            if self.active[g] && lt_h.divides(&self.lead(g)) {
                self.active[g] = false;
            }
        }
    }

    fn seed(&mut self, inputs: &[MultiPoly<PrimeField>]) {
        for p in inputs {
            if p.is_zero() {
                continue;
            }
            let nf = self.reduce_map(self.to_map(&self.sorted_terms(p)));
            if !nf.is_empty() {
                let monic = self.make_monic(nf);
                self.add_poly_with_update(monic);
            }
        }
    }

    /// Process pairs to completion under the normal selection strategy:
    /// minimal lcm degree first, ties by pair index.
    fn run(&mut self) -> Result<(), GroebnerError> {
        loop {
            let Some(best) = self
                .pairs
                .iter()
                .enumerate()
                .min_by_key(|(_, p)| (p.lcm.degree(), p.i, p.j))
                .map(|(k, _)| k)
            else {
                break;
            };
            if self.pairs_processed >= self.budget {
                return Err(GroebnerError::PairBudgetExceeded);
            }
            self.pairs_processed += 1;
            let pair = self.pairs.swap_remove(best);
            let spoly = self.spoly_map(&pair);
            let nf = self.reduce_map(spoly);
            if !nf.is_empty() {
                let monic = self.make_monic(nf);
                self.add_poly_with_update(monic);
            }
        }
        Ok(())
    }

    /// Tail-reduce every surviving polynomial against the others. Leads are
    /// pairwise non-divisible here, so each lead survives its own reduction
    /// and one pass yields the reduced basis.
    fn auto_reduce(&mut self) -> Vec<Terms> {
        let mut idx: Vec<usize> =
            (0..self.polys.len()).filter(|&i| self.active[i]).collect();
        idx.sort_by(|&a, &b| self.order.cmp(&self.lead(a), &self.lead(b)));
        for &i in &idx {
            self.active[i] = false;
            let nf = self.reduce_map(self.to_map(&self.polys[i].clone()));
            debug_assert_eq!(nf[0].0, self.polys[i][0].0);
            self.polys[i] = self.make_monic(nf);
            self.active[i] = true;
        }
        idx.iter().map(|&i| self.polys[i].clone()).collect()
    }
}

/// Standard monomials of the lead-term ideal: `None` when infinite
/// (positive-dimensional), else the full list sorted ascending. Finiteness
/// test: the unit ideal is trivially finite; otherwise every variable needs
/// a pure-power lead.
fn standard_monomials_of(
    leads: &[Mono],
    nvars: usize,
    order: MonomialOrder,
) -> Option<Vec<Mono>> {
    if leads.iter().any(|m| m.is_one()) {
        return Some(Vec::new());
    }
    for v in 0..nvars {
        let pure = leads.iter().any(|m| m.exp(v) > 0 && m.degree() == m.exp(v));
        if !pure {
            return None;
        }
    }
    let mut seen: HashSet<Mono> = HashSet::new();
    let mut queue = vec![Mono::one()];
    seen.insert(Mono::one());
    let mut out = Vec::new();
    while let Some(m) = queue.pop() {
        out.push(m);
        for v in 0..nvars {
            let m2 = m.mul(&Mono::var(v));
            if seen.contains(&m2) || leads.iter().any(|l| l.divides(&m2)) {
                continue;
            }
            seen.insert(m2);
            queue.push(m2);
        }
    }
    out.sort_by(|a, b| order.cmp(a, b));
    Some(out)
}

fn groebner_core(
    field: PrimeField,
    equations: &[MultiPoly<PrimeField>],
    nvars: usize,
    options: &GroebnerOptions,
) -> Result<GroebnerResult, GroebnerError> {
    let mut engine = Engine::new(field, options.order, options.pair_budget);
    engine.seed(equations);
    engine.run()?;
    let reduced = engine.auto_reduce();
    let leads: Vec<Mono> = reduced.iter().map(|t| t[0].0).collect();
    let standard = standard_monomials_of(&leads, nvars, options.order);
    let basis = reduced
        .into_iter()
        .map(|t| MultiPoly::from_terms(&field, nvars, t))
        .collect();
    let (standard_monomials, basis_size, zero_dimensional) = match standard {
        Some(s) => {
            let k = s.len();
            (s, Some(k), true)
        }
        None => (Vec::new(), None, false),
    };
    Ok(GroebnerResult {
        basis,
        standard_monomials,
        basis_size,
        zero_dimensional,
        saturated_size: None,
        pairs_processed: engine.pairs_processed,
    })
}

/// The input system re-read in a ring with one extra variable t, plus
/// t·det(H) − 1 = 0. Solutions biject with the original solutions where
/// det(H) = h₁₁h₂₂ − h₁₂² does not vanish.
fn extend_with_det_h(
    field: &PrimeField,
    equations: &[MultiPoly<PrimeField>],
    nvars: usize,
) -> Vec<MultiPoly<PrimeField>> {
    let mut out: Vec<MultiPoly<PrimeField>> = equations
        .iter()
        .map(|p| MultiPoly::from_terms(field, nvars + 1, p.terms().to_vec()))
        .collect();
    let t = Mono::var(nvars);
    let one = field.one();
    out.push(MultiPoly::from_terms(
        field,
        nvars + 1,
        vec![
            (Mono::var(0).mul(&Mono::var(2)).mul(&t), one),
            (Mono::var(1).mul(&Mono::var(1)).mul(&t), field.neg(&one)),
            (Mono::one(), field.neg(&one)),
        ],
    ));
    out
}

/// Gröbner basis of the system under `options.order`. With
/// `saturate_det_h`, additionally computes the quotient dimension after
/// imposing det(H) ≠ 0 and reports it in `saturated_size` alongside the raw
/// result.
pub fn buchberger(
    system: &PolySystem<PrimeField>,
    saturate_det_h: bool,
    options: &GroebnerOptions,
) -> Result<GroebnerResult, GroebnerError> {
    let field = system.ring;
    let mut result = groebner_core(field, &system.equations, system.nvars, options)?;
    if saturate_det_h {
        let ext = extend_with_det_h(&field, &system.equations, system.nvars);
        let sat = groebner_core(field, &ext, system.nvars + 1, options)?;
        result.saturated_size = sat.basis_size;
        result.pairs_processed += sat.pairs_processed;
    }
    Ok(result)
}

/// [`buchberger`] under graded-reverse-lexicographic order with default
/// budgets.
pub fn buchberger_grevlex(
    system: &PolySystem<PrimeField>,
    saturate_det_h: bool,
) -> Result<GroebnerResult, GroebnerError> {
    buchberger(system, saturate_det_h, &GroebnerOptions::default())
}

/// Normal form of `f` modulo `basis` (need not be a Gröbner basis, but the
/// result is canonical only when it is one).
pub fn normal_form(
    field: &PrimeField,
    f: &MultiPoly<PrimeField>,
    basis: &[MultiPoly<PrimeField>],
    order: MonomialOrder,
) -> MultiPoly<PrimeField> {
    let mut engine = Engine::new(*field, order, usize::MAX);
    for g in basis {
        if g.is_zero() {
            continue;
        }
        let t = engine.sorted_terms(g);
        let monic = engine.make_monic(t);
        engine.polys.push(monic);
        engine.active.push(true);
    }
    let nf = engine.reduce_map(engine.to_map(&engine.sorted_terms(f)));
    MultiPoly::from_terms(field, f.nvars(), nf)
}

/// Monic generator of I ∩ GF(p)[x_var] for a zero-dimensional ideal, as
/// dense ascending coefficients: the minimal polynomial of multiplication
/// by x_var on the quotient ring, found as the first linear dependence in
/// the Krylov sequence NF(x⁰), NF(x¹), ... expressed over the standard
/// monomials.
pub fn eliminant(
    field: &PrimeField,
    basis: &[MultiPoly<PrimeField>],
    standard: &[Mono],
    var: usize,
    order: MonomialOrder,
) -> Vec<u64> {
    if standard.is_empty() {
        // Unit ideal: the elimination ideal is everything; generator 1.
        return vec![1];
    }
    let mut engine = Engine::new(*field, order, usize::MAX);
    for g in basis {
        let t = engine.sorted_terms(g);
        let monic = engine.make_monic(t);
        engine.polys.push(monic);
        engine.active.push(true);
    }
    let index: HashMap<Mono, usize> =
        standard.iter().enumerate().map(|(k, &m)| (m, k)).collect();
    let dim = standard.len();
    let to_dense = |terms: &Terms| -> Vec<u64> {
        let mut v = vec![0u64; dim];
        for &(m, c) in terms {
            let k = *index.get(&m).expect("normal form lies in the standard span");
            v[k] = c;
        }
        v
    };

    // Pivot rows: (pivot column, row reduced to pivot 1, combination over
    // the Krylov vectors).
    let mut pivots: Vec<(usize, Vec<u64>, Vec<u64>)> = Vec::new();
    let mut rep: Terms = vec![(Mono::one(), 1)];
    for k in 0..=dim {
        let mut v = to_dense(&rep);
        let mut combo = vec![0u64; k + 1];
        combo[k] = 1;
        for (c, row, pcombo) in &pivots {
            let factor = v[*c];
            if factor == 0 {
                continue;
            }
            for (vi, ri) in v.iter_mut().zip(row.iter()) {
                *vi = field.sub(vi, &field.mul(&factor, ri));
            }
            for (ci, pi) in combo.iter_mut().zip(pcombo.iter()) {
                *ci = field.sub(ci, &field.mul(&factor, pi));
            }
        }
        if let Some(c) = v.iter().position(|&x| x != 0) {
            let inv = field.inv(&v[c]).unwrap();
            for x in &mut v {
                *x = field.mul(x, &inv);
            }
            for x in &mut combo {
                *x = field.mul(x, &inv);
            }
            pivots.push((c, v, combo));
        } else {
            // combo gives the monic minimal polynomial (its top entry was
            // never touched by earlier rows).
            debug_assert_eq!(combo[k], 1);
            return combo;
        }
        // rep <- NF(x_var * rep)
        let shifted: Terms =
            rep.iter().map(|&(m, c)| (m.mul(&Mono::var(var)), c)).collect();
        rep = engine.reduce_map(engine.to_map(&shifted));
    }
    unreachable!("dependence must occur by dimension+1 Krylov vectors");
}

/// True when every variable's eliminant is squarefree, which certifies the
/// ideal is radical (each squarefree univariate lies in the ideal).
pub fn radical_via_eliminants(
    field: &PrimeField,
    basis: &[MultiPoly<PrimeField>],
    standard: &[Mono],
    nvars: usize,
    order: MonomialOrder,
) -> bool {
    (0..nvars).all(|v| {
        let e = eliminant(field, basis, standard, v, order);
        univar::is_squarefree(field, &e)
    })
}

/// One row request of the complexity table.
#[derive(Clone, Debug)]
pub struct TableConfig {
    pub m: usize,
    pub n: usize,
    pub formulation: Formulation,
}

/// One computed row: per-trial quotient dimensions plus the modal value.
#[derive(Clone, Debug)]
pub struct ComplexityRow {
    pub m: usize,
    pub n: usize,
    pub formulation: Formulation,
    /// Number of minor equations actually present in the built system.
    pub minor_count: usize,
    pub counts: Vec<Option<usize>>,
    /// Modal count across trials; `None` when no trial produced one.
    pub basis_size: Option<usize>,
    pub trials_agree: bool,
    /// Whether any trial needed det(H)-saturation to reach a finite count.
    pub used_saturation: bool,
    pub seconds: f64,
    pub note: Option<String>,
}

fn count_one_instance(
    cfg: &TableConfig,
    p: u64,
    seed: u64,
    options: &GroebnerOptions,
) -> Result<(Option<usize>, bool, usize), GroebnerError> {
    let inst = sample_consistent_instance_mod_p(cfg.m, cfg.n, p, seed)?;
    let sys = build_formulation_system(&inst.field, &inst.f, &cfg.formulation)?;
    debug_assert!(sys.is_exact_root(&inst.truth));
    let minors = sys
        .tags
        .iter()
        .filter(|t| matches!(t, EquationTag::Minor { .. }))
        .count();
    let raw = groebner_core(inst.field, &sys.equations, sys.nvars, options)?;
    if raw.zero_dimensional {
        return Ok((raw.basis_size, false, minors));
    }
    // Positive-dimensional as written: retry with det(H) inverted, which
    // removes the degenerate component.
    let ext = extend_with_det_h(&inst.field, &sys.equations, sys.nvars);
    let sat = groebner_core(inst.field, &ext, sys.nvars + 1, options)?;
    Ok((sat.basis_size, true, minors))
}

/// Quotient dimensions for each configuration across `trials` consistent
/// instances mod `p`. Builder or basis failures are recorded in the row
/// note; they do not abort the remaining rows.
pub fn complexity_table(
    configs: &[TableConfig],
    p: u64,
    trials: usize,
    seed: u64,
) -> Vec<ComplexityRow> {
    let options = GroebnerOptions::default();
    configs
        .iter()
        .enumerate()
        .map(|(row_idx, cfg)| {
            let start = Instant::now();
            let mut counts = Vec::with_capacity(trials);
            let mut minor_count = 0usize;
            let mut used_saturation = false;
            let mut note = None;
            for trial in 0..trials {
                let s = seed
                    .wrapping_add((row_idx as u64) << 32)
                    .wrapping_add(trial as u64);
                match count_one_instance(cfg, p, s, &options) {
                    Ok((count, sat, minors)) => {
                        counts.push(count);
                        minor_count = minors;
                        used_saturation |= sat;
                    }
                    Err(e) => {
                        counts.push(None);
                        note = Some(e.to_string());
                    }
                }
            }
            let mut tally: HashMap<usize, usize> = HashMap::new();
            for c in counts.iter().flatten() {
                *tally.entry(*c).or_insert(0) += 1;
            }
            let basis_size = tally
                .iter()
                .max_by_key(|(value, freq)| (**freq, std::cmp::Reverse(**value)))
                .map(|(value, _)| *value);
            let trials_agree = !counts.is_empty()
                && counts.iter().all(|c| c.is_some() && *c == counts[0]);
            ComplexityRow {
                m: cfg.m,
                n: cfg.n,
                formulation: cfg.formulation.clone(),
                minor_count,
                counts,
                basis_size,
                trials_agree,
                used_saturation,
                seconds: start.elapsed().as_secs_f64(),
                note,
            }
        })
        .collect()
}

/// CSV rendering: `m,n,a,b,c,minors,basis_size,trials_agree,seconds`.
pub fn complexity_table_csv(rows: &[ComplexityRow]) -> String {
    let mut out = String::from("m,n,a,b,c,minors,basis_size,trials_agree,seconds\n");
    for r in rows {
        let size = r.basis_size.map_or(String::new(), |v| v.to_string());
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{:.3}\n",
            r.m,
            r.n,
            r.formulation.num_a,
            r.formulation.num_b,
            r.formulation.num_c,
            r.minor_count,
            size,
            r.trials_agree,
            r.seconds
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyform::Rationals;

    fn fp() -> PrimeField {
        PrimeField::new(101)
    }

    /// x² − 1 and y − x over GF(p), from integer coefficient lists
    /// (exponents of x, y).
    fn poly(field: &PrimeField, nvars: usize, terms: &[(&[u16], i64)]) -> MultiPoly<PrimeField> {
        let raw = terms
            .iter()
            .map(|(e, c)| (Mono::from_exps(e), field.reduce_i128(*c as i128)))
            .collect();
        MultiPoly::from_terms(field, nvars, raw)
    }

    #[test]
    fn two_point_ideal() {
        let f = fp();
        let sys = PolySystem::from_equations(
            f,
            2,
            vec![
                poly(&f, 2, &[(&[2, 0], 1), (&[0, 0], -1)]),
                poly(&f, 2, &[(&[0, 1], 1), (&[1, 0], -1)]),
            ],
        );
        let r = buchberger_grevlex(&sys, false).unwrap();
        assert!(r.zero_dimensional);
        assert_eq!(r.basis_size, Some(2));
        assert_eq!(r.standard_monomials, vec![Mono::one(), Mono::var(0)]);
        assert_eq!(r.basis.len(), 2);
    }

    #[test]
    fn circle_meets_line() {
        let f = fp();
        let sys = PolySystem::from_equations(
            f,
            2,
            vec![
                poly(&f, 2, &[(&[2, 0], 1), (&[0, 2], 1), (&[0, 0], -2)]),
                poly(&f, 2, &[(&[1, 0], 1), (&[0, 1], -1)]),
            ],
        );
        let r = buchberger_grevlex(&sys, false).unwrap();
        assert_eq!(r.basis_size, Some(2));
    }

    #[test]
    fn inputs_reduce_to_zero_and_spolys_too() {
        let f = fp();
        let eqs = vec![
            poly(&f, 3, &[(&[2, 0, 0], 1), (&[0, 1, 0], 3), (&[0, 0, 1], -1)]),
            poly(&f, 3, &[(&[1, 1, 0], 1), (&[0, 0, 2], -1), (&[0, 0, 0], 5)]),
            poly(&f, 3, &[(&[0, 2, 0], 1), (&[1, 0, 1], -1)]),
        ];
        let sys = PolySystem::from_equations(f, 3, eqs.clone());
        let r = buchberger_grevlex(&sys, false).unwrap();
        for e in &eqs {
            assert!(normal_form(&f, e, &r.basis, MonomialOrder::Grevlex).is_zero());
        }
        // Buchberger criterion on the returned basis.
        for i in 0..r.basis.len() {
            for j in i + 1..r.basis.len() {
                let gi = &r.basis[i];
                let gj = &r.basis[j];
                let li = gi.terms()[0].0;
                let lj = gj.terms()[0].0;
                let w = li.lcm(&lj);
                let spoly = gi
                    .mul(&f, &MultiPoly::from_terms(&f, 3, vec![(li.div_into(&w), 1)]))
                    .sub(&f, &gj.mul(&f, &MultiPoly::from_terms(&f, 3, vec![(lj.div_into(&w), 1)])));
                assert!(normal_form(&f, &spoly, &r.basis, MonomialOrder::Grevlex).is_zero());
            }
        }
    }

    #[test]
    fn monomial_ideal_is_positive_dimensional() {
        let f = fp();
        let sys =
            PolySystem::from_equations(f, 2, vec![poly(&f, 2, &[(&[1, 1], 1)])]);
        let r = buchberger_grevlex(&sys, false).unwrap();
        assert!(!r.zero_dimensional);
        assert_eq!(r.basis_size, None);
    }

    #[test]
    fn unit_ideal_counts_zero() {
        let f = fp();
        let sys = PolySystem::from_equations(
            f,
            1,
            vec![poly(&f, 1, &[(&[1], 1)]), poly(&f, 1, &[(&[1], 1), (&[0], 1)])],
        );
        let r = buchberger_grevlex(&sys, false).unwrap();
        assert!(r.zero_dimensional);
        assert_eq!(r.basis_size, Some(0));
        assert_eq!(r.basis.len(), 1);
        assert!(r.basis[0].total_degree() == 0);
    }

    #[test]
    fn lex_and_grevlex_agree_on_dimension() {
        let f = fp();
        let eqs = vec![
            poly(&f, 2, &[(&[2, 0], 1), (&[0, 1], -2)]),
            poly(&f, 2, &[(&[0, 2], 1), (&[1, 0], -3), (&[0, 0], 7)]),
        ];
        let sys = PolySystem::from_equations(f, 2, eqs);
        let a = buchberger_grevlex(&sys, false).unwrap();
        let b = buchberger(
            &sys,
            false,
            &GroebnerOptions { order: MonomialOrder::Lex, ..Default::default() },
        )
        .unwrap();
        assert_eq!(a.basis_size, b.basis_size);
        assert_eq!(a.basis_size, Some(4));
    }

    #[test]
    fn saturation_discards_degenerate_h() {
        // h₁₁ = ±1, h₁₂ = 0, h₂₂ ∈ {0, 1}, b = 0: four points, two of
        // which have det H = 0.
        let f = fp();
        let sys = PolySystem::from_equations(
            f,
            5,
            vec![
                poly(&f, 5, &[(&[2, 0, 0, 0, 0], 1), (&[0; 5], -1)]),
                poly(&f, 5, &[(&[0, 1, 0, 0, 0], 1)]),
                poly(&f, 5, &[(&[0, 0, 2, 0, 0], 1), (&[0, 0, 1, 0, 0], -1)]),
                poly(&f, 5, &[(&[0, 0, 0, 1, 0], 1)]),
                poly(&f, 5, &[(&[0, 0, 0, 0, 1], 1)]),
            ],
        );
        let r = buchberger_grevlex(&sys, true).unwrap();
        assert_eq!(r.basis_size, Some(4));
        assert_eq!(r.saturated_size, Some(2));
    }

    #[test]
    fn eliminants_of_two_point_ideal() {
        let f = fp();
        let sys = PolySystem::from_equations(
            f,
            2,
            vec![
                poly(&f, 2, &[(&[2, 0], 1), (&[0, 0], -1)]),
                poly(&f, 2, &[(&[0, 1], 1), (&[1, 0], -1)]),
            ],
        );
        let r = buchberger_grevlex(&sys, false).unwrap();
        for v in 0..2 {
            let e = eliminant(&f, &r.basis, &r.standard_monomials, v, MonomialOrder::Grevlex);
            // x² − 1 in either variable.
            assert_eq!(e, vec![f.neg(&1), 0, 1]);
            assert!(univar::is_squarefree(&f, &e));
            assert!(univar::splits_into_distinct_linear_factors(&f, &e));
        }
        assert!(radical_via_eliminants(&f, &r.basis, &r.standard_monomials, 2, MonomialOrder::Grevlex));
    }

    #[test]
    fn normal_form_is_projection() {
        let f = fp();
        let sys = PolySystem::from_equations(
            f,
            2,
            vec![
                poly(&f, 2, &[(&[2, 0], 1), (&[0, 0], -1)]),
                poly(&f, 2, &[(&[0, 1], 1), (&[1, 0], -1)]),
            ],
        );
        let r = buchberger_grevlex(&sys, false).unwrap();
        let g = poly(&f, 2, &[(&[3, 2], 4), (&[1, 1], 2), (&[0, 0], 9)]);
        let nf = normal_form(&f, &g, &r.basis, MonomialOrder::Grevlex);
        let nf2 = normal_form(&f, &nf, &r.basis, MonomialOrder::Grevlex);
        assert_eq!(nf, nf2);
        // NF lies in the span of the standard monomials.
        for (m, _) in nf.terms() {
            assert!(r.standard_monomials.contains(m));
        }
    }

    /// Vanishing ideals of explicit point sets, compared against exhaustive
    /// root counting over GF(41)³. Gate: all three eliminants squarefree
    /// (ideal radical) and split (all roots rational), so the quotient
    /// dimension must equal the number of rational roots.
    #[test]
    fn quotient_dimension_matches_exhaustive_root_count() {
        use rand::{Rng, SeedableRng};
        let p = 41u64;
        let f = PrimeField::new(p);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        // Degree <= 2 monomials in 3 variables.
        let monos: Vec<Mono> = {
            let mut v = Vec::new();
            for a in 0..=2u16 {
                for b in 0..=2 - a {
                    for c in 0..=2 - a - b {
                        v.push(Mono::from_exps(&[a, b, c]));
                    }
                }
            }
            v
        };
        let mut accepted = 0;
        let mut attempts = 0;
        while accepted < 10 && attempts < 60 {
            attempts += 1;
            let k = rng.gen_range(1..=4usize);
            let points: Vec<[u64; 3]> = (0..k)
                .map(|_| [rng.gen_range(0..p), rng.gen_range(0..p), rng.gen_range(0..p)])
                .collect();
            // Nullspace of the k x 10 evaluation matrix via RREF.
            let mut rows: Vec<Vec<u64>> = points
                .iter()
                .map(|pt| {
                    monos
                        .iter()
                        .map(|m| {
                            let e = m.exps();
                            f.mul(
                                &f.mul(&f.pow_u64(pt[0], e[0] as u64), &f.pow_u64(pt[1], e[1] as u64)),
                                &f.pow_u64(pt[2], e[2] as u64),
                            )
                        })
                        .collect()
                })
                .collect();
            let mut pivot_cols = Vec::new();
            let mut r0 = 0usize;
            for col in 0..monos.len() {
                if let Some(rr) = (r0..rows.len()).find(|&rr| rows[rr][col] != 0) {
                    rows.swap(r0, rr);
                    let inv = f.inv(&rows[r0][col]).unwrap();
                    for x in rows[r0].iter_mut() {
                        *x = f.mul(x, &inv);
                    }
                    for rr in 0..rows.len() {
                        if rr != r0 && rows[rr][col] != 0 {
                            let factor = rows[rr][col];
                            for cc in 0..monos.len() {
                                let t = f.mul(&factor, &rows[r0][cc]);
                                rows[rr][cc] = f.sub(&rows[rr][cc], &t);
                            }
                        }
                    }
                    pivot_cols.push(col);
                    r0 += 1;
                }
            }
            // Random combinations of the nullspace basis (free columns).
            let free: Vec<usize> =
                (0..monos.len()).filter(|c| !pivot_cols.contains(c)).collect();
            let eqs: Vec<MultiPoly<PrimeField>> = (0..6)
                .map(|_| {
                    let mut coeffs = vec![0u64; monos.len()];
                    for &fc in &free {
                        let w = rng.gen_range(0..p);
                        coeffs[fc] = f.add(&coeffs[fc], &w);
                        for (ri, &pc) in pivot_cols.iter().enumerate() {
                            let t = f.mul(&w, &rows[ri][fc]);
                            coeffs[pc] = f.sub(&coeffs[pc], &t);
                        }
                    }
                    let raw: Vec<(Mono, u64)> =
                        monos.iter().copied().zip(coeffs).collect();
                    MultiPoly::from_terms(&f, 3, raw)
                })
                .collect();
            // Every generator vanishes on every interpolation point.
            for e in &eqs {
                for pt in &points {
                    assert_eq!(e.eval(&f, &[pt[0], pt[1], pt[2]]), 0);
                }
            }
            let sys = PolySystem::from_equations(f, 3, eqs.clone());
            let r = buchberger_grevlex(&sys, false).unwrap();
            if !r.zero_dimensional {
                continue;
            }
            let gate = (0..3).all(|v| {
                let e = eliminant(&f, &r.basis, &r.standard_monomials, v, MonomialOrder::Grevlex);
                univar::is_squarefree(&f, &e)
                    && univar::splits_into_distinct_linear_factors(&f, &e)
            });
            if !gate {
                continue;
            }
            let mut roots = 0usize;
            for x in 0..p {
                for y in 0..p {
                    for z in 0..p {
                        if eqs.iter().all(|e| e.eval(&f, &[x, y, z]) == 0) {
                            roots += 1;
                        }
                    }
                }
            }
            assert_eq!(r.basis_size, Some(roots), "points {points:?}");
            accepted += 1;
        }
        assert!(accepted >= 10, "only {accepted} radical trials in {attempts} attempts");
    }

    #[test]
    fn rational_system_specializes_and_counts() {
        // x² = 4, y = x over the rationals, pushed into GF(p): two points.
        let q = Rationals;
        let eqs = vec![
            MultiPoly::from_terms(
                &q,
                2,
                vec![
                    (Mono::from_exps(&[2, 0]), q.from_int(1)),
                    (Mono::one(), q.from_int(-4)),
                ],
            ),
            MultiPoly::from_terms(
                &q,
                2,
                vec![
                    (Mono::from_exps(&[0, 1]), q.from_int(1)),
                    (Mono::from_exps(&[1, 0]), q.from_int(-1)),
                ],
            ),
        ];
        let sys = PolySystem::from_equations(q, 2, eqs);
        let f = fp();
        let modp = crate::polyform::rational_to_prime(&sys, f).unwrap();
        let r = buchberger_grevlex(&modp, false).unwrap();
        assert_eq!(r.basis_size, Some(2));
    }
}
