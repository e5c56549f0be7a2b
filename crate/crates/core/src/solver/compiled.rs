//! Flattened evaluation form of a complex polynomial system.
//!
//! Path tracking evaluates the same system and its Jacobian thousands of
//! times per path, so the sparse term lists are compiled once into a shared
//! monomial table: every distinct monomial appearing in any equation or any
//! partial derivative gets one slot, each point evaluation fills the table
//! once, and equations/Jacobian entries reduce to dot products against it.

use num_complex::Complex64;
use std::collections::HashMap;

use crate::polyform::{Complexes, Mono, PolySystem};

/// One equation (or Jacobian entry) as (table index, coefficient) pairs.
type TermList = Vec<(u32, Complex64)>;

/// A polynomial system frozen for fast repeated evaluation over ℂ.
pub struct CompiledSystem {
    nvars: usize,
    monos: Vec<Mono>,
    /// Highest exponent of each variable anywhere in the table.
    max_exp: Vec<u16>,
    eqs: Vec<TermList>,
    /// `jac[i][v]` holds the terms of ∂(equation i)/∂x_v.
    jac: Vec<Vec<TermList>>,
    degrees: Vec<usize>,
}

/// Reusable per-point buffers; one per worker thread.
pub struct EvalScratch {
    /// pows[v][e] = x_v^e, filled up to max_exp[v].
    pows: Vec<Vec<Complex64>>,
    mono_vals: Vec<Complex64>,
}

impl CompiledSystem {
    pub fn new(system: &PolySystem<Complexes>) -> Self {
        let nvars = system.nvars;
        let mut table: HashMap<Mono, u32> = HashMap::new();
        let mut monos: Vec<Mono> = Vec::new();
        let intern = |m: Mono, monos: &mut Vec<Mono>, table: &mut HashMap<Mono, u32>| -> u32 {
            *table.entry(m).or_insert_with(|| {
                monos.push(m);
                (monos.len() - 1) as u32
            })
        };

        let ring = Complexes;
        let mut eqs = Vec::with_capacity(system.equations.len());
        let mut jac = Vec::with_capacity(system.equations.len());
        let mut degrees = Vec::with_capacity(system.equations.len());
        for e in &system.equations {
            degrees.push(e.total_degree());
            let list: TermList = e
                .terms()
                .iter()
                .map(|(m, c)| (intern(*m, &mut monos, &mut table), *c))
                .collect();
            eqs.push(list);
            let mut rows = Vec::with_capacity(nvars);
            for v in 0..nvars {
                let d = e.derivative(&ring, v);
                let list: TermList = d
                    .terms()
                    .iter()
                    .map(|(m, c)| (intern(*m, &mut monos, &mut table), *c))
                    .collect();
                rows.push(list);
            }
            jac.push(rows);
        }

        let mut max_exp = vec![0u16; nvars];
        for m in &monos {
            for (v, e) in max_exp.iter_mut().enumerate() {
                *e = (*e).max(m.exp(v));
            }
        }

        CompiledSystem { nvars, monos, max_exp, eqs, jac, degrees }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn len(&self) -> usize {
        self.eqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eqs.is_empty()
    }

    /// Total degree of each equation, in input order.
    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn make_scratch(&self) -> EvalScratch {
        EvalScratch {
            pows: self.max_exp.iter().map(|&e| vec![Complex64::new(0.0, 0.0); e as usize + 1]).collect(),
            mono_vals: vec![Complex64::new(0.0, 0.0); self.monos.len()],
        }
    }

    /// Fill the monomial table for one point. Must precede `eval_into` /
    /// `jacobian_into` calls for that point.
    pub fn prepare(&self, x: &[Complex64], scratch: &mut EvalScratch) {
        debug_assert_eq!(x.len(), self.nvars);
        for v in 0..self.nvars {
            let pw = &mut scratch.pows[v];
            pw[0] = Complex64::new(1.0, 0.0);
            for e in 1..pw.len() {
                pw[e] = pw[e - 1] * x[v];
            }
        }
        for (slot, m) in scratch.mono_vals.iter_mut().zip(&self.monos) {
            let mut acc = Complex64::new(1.0, 0.0);
            for v in 0..self.nvars {
                let e = m.exp(v);
                if e > 0 {
                    acc *= scratch.pows[v][e as usize];
                }
            }
            *slot = acc;
        }
    }

    /// Evaluate all equations at the prepared point.
    pub fn eval_into(&self, scratch: &EvalScratch, out: &mut [Complex64]) {
        debug_assert_eq!(out.len(), self.eqs.len());
        for (o, eq) in out.iter_mut().zip(&self.eqs) {
            let mut acc = Complex64::new(0.0, 0.0);
            for &(idx, c) in eq {
                acc += c * scratch.mono_vals[idx as usize];
            }
            *o = acc;
        }
    }

    /// Evaluate the Jacobian at the prepared point, row-major
    /// (`out[i * nvars + v]` = ∂F_i/∂x_v).
    pub fn jacobian_into(&self, scratch: &EvalScratch, out: &mut [Complex64]) {
        debug_assert_eq!(out.len(), self.eqs.len() * self.nvars);
        for (i, rows) in self.jac.iter().enumerate() {
            for (v, list) in rows.iter().enumerate() {
                let mut acc = Complex64::new(0.0, 0.0);
                for &(idx, c) in list {
                    acc += c * scratch.mono_vals[idx as usize];
                }
                out[i * self.nvars + v] = acc;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyform::{Complexes, MultiPoly};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn matches_direct_evaluation() {
        let ring = Complexes;
        // f = x² y + 3y − 1, g = x y² − 2x
        let x = MultiPoly::variable(&ring, 2, 0);
        let y = MultiPoly::variable(&ring, 2, 1);
        let three = MultiPoly::constant(&ring, 2, c(3.0, 0.0));
        let one = MultiPoly::constant(&ring, 2, c(1.0, 0.0));
        let two = MultiPoly::constant(&ring, 2, c(2.0, 0.0));
        let f = x.mul(&ring, &x).mul(&ring, &y).add(&ring, &three.mul(&ring, &y)).sub(&ring, &one);
        let g = x.mul(&ring, &y).mul(&ring, &y).sub(&ring, &two.mul(&ring, &x));
        let sys = PolySystem::from_equations(ring, 2, vec![f.clone(), g.clone()]);
        let cs = CompiledSystem::new(&sys);
        assert_eq!(cs.degrees(), &[3, 3]);

        let pt = [c(0.3, -1.1), c(2.0, 0.7)];
        let mut scratch = cs.make_scratch();
        cs.prepare(&pt, &mut scratch);
        let mut vals = [c(0.0, 0.0); 2];
        cs.eval_into(&scratch, &mut vals);
        assert!((vals[0] - f.eval(&ring, &pt)).norm() < 1e-14);
        assert!((vals[1] - g.eval(&ring, &pt)).norm() < 1e-14);

        let mut jac = [c(0.0, 0.0); 4];
        cs.jacobian_into(&scratch, &mut jac);
        for (i, e) in [f, g].iter().enumerate() {
            for v in 0..2 {
                let d = e.derivative(&ring, v).eval(&ring, &pt);
                assert!((jac[i * 2 + v] - d).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn shared_table_covers_derivative_monomials() {
        let ring = Complexes;
        // x³: table must hold x³ (value) and x² (derivative).
        let x = MultiPoly::variable(&ring, 1, 0);
        let f = x.mul(&ring, &x).mul(&ring, &x);
        let sys = PolySystem::from_equations(ring, 1, vec![f]);
        let cs = CompiledSystem::new(&sys);
        let pt = [c(2.0, 0.0)];
        let mut scratch = cs.make_scratch();
        cs.prepare(&pt, &mut scratch);
        let mut v = [c(0.0, 0.0)];
        cs.eval_into(&scratch, &mut v);
        assert!((v[0] - c(8.0, 0.0)).norm() < 1e-14);
        let mut j = [c(0.0, 0.0)];
        cs.jacobian_into(&scratch, &mut j);
        assert!((j[0] - c(12.0, 0.0)).norm() < 1e-14);
    }
}
