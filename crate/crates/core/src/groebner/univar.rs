//! Dense univariate polynomial helpers over GF(p), used to inspect
//! eliminants (squarefreeness, splitting) when validating root counts.
//!
//! Polynomials are coefficient vectors in ascending degree with no trailing
//! zeros; the empty vector is the zero polynomial.

use crate::polyform::{CoeffRing, PrimeField};

fn trim(mut v: Vec<u64>) -> Vec<u64> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

pub fn degree(f: &[u64]) -> Option<usize> {
    if f.is_empty() {
        None
    } else {
        Some(f.len() - 1)
    }
}

/// Make monic; `f` must be nonzero.
pub fn monic(field: &PrimeField, f: &[u64]) -> Vec<u64> {
    let lc = *f.last().expect("zero polynomial");
    let inv = field.inv(&lc).unwrap();
    f.iter().map(|c| field.mul(c, &inv)).collect()
}

pub fn derivative(field: &PrimeField, f: &[u64]) -> Vec<u64> {
    let mut out = Vec::with_capacity(f.len().saturating_sub(1));
    for (k, c) in f.iter().enumerate().skip(1) {
        out.push(field.mul(c, &field.reduce_u64(k as u64)));
    }
    trim(out)
}

/// Remainder of `f` modulo nonzero `g`.
pub fn rem(field: &PrimeField, f: &[u64], g: &[u64]) -> Vec<u64> {
    let g = monic(field, g);
    let dg = g.len() - 1;
    let mut r: Vec<u64> = f.to_vec();
    while r.len() > dg {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dg;
        if lead != 0 {
            for (k, c) in g.iter().enumerate() {
                let sub = field.mul(c, &lead);
                r[shift + k] = field.sub(&r[shift + k], &sub);
            }
        }
        r.pop();
        while r.last() == Some(&0) {
            r.pop();
        }
    }
    trim(r)
}

pub fn gcd(field: &PrimeField, f: &[u64], g: &[u64]) -> Vec<u64> {
    let mut a = trim(f.to_vec());
    let mut b = trim(g.to_vec());
    while !b.is_empty() {
        let r = rem(field, &a, &b);
        a = b;
        b = r;
    }
    if a.is_empty() {
        a
    } else {
        monic(field, &a)
    }
}

fn mul_mod(field: &PrimeField, a: &[u64], b: &[u64], g: &[u64]) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, ca) in a.iter().enumerate() {
        if *ca == 0 {
            continue;
        }
        for (j, cb) in b.iter().enumerate() {
            let t = field.mul(ca, cb);
            prod[i + j] = field.add(&prod[i + j], &t);
        }
    }
    rem(field, &trim(prod), g)
}

/// x^e mod g by square-and-multiply.
pub fn pow_x_mod(field: &PrimeField, e: u64, g: &[u64]) -> Vec<u64> {
    let x = rem(field, &[0, 1], g);
    let mut base = x;
    let mut acc = rem(field, &[1], g);
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(field, &acc, &base, g);
        }
        base = mul_mod(field, &base, &base, g);
        e >>= 1;
    }
    acc
}

/// gcd(f, f′) is constant.
pub fn is_squarefree(field: &PrimeField, f: &[u64]) -> bool {
    let d = derivative(field, f);
    if d.is_empty() {
        return degree(f) == Some(0);
    }
    gcd(field, f, &d).len() == 1
}

/// True iff `f` divides x^p − x, i.e. f is squarefree with all roots in
/// GF(p).
pub fn splits_into_distinct_linear_factors(field: &PrimeField, f: &[u64]) -> bool {
    if f.len() <= 1 {
        return false;
    }
    // x^p − x ≡ 0 (mod f)
    let xp = pow_x_mod(field, field.modulus(), f);
    let x = rem(field, &[0, 1], f);
    let diff: Vec<u64> = {
        let len = xp.len().max(x.len());
        let mut d = vec![0u64; len];
        for (k, c) in xp.iter().enumerate() {
            d[k] = *c;
        }
        for (k, c) in x.iter().enumerate() {
            d[k] = field.sub(&d[k], c);
        }
        trim(d)
    };
    diff.is_empty()
}
