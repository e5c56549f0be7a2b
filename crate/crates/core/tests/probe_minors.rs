//! Temporary probe: which 3-minor subsets give a finite count, and what is it.

use tdoa_selfcal::groebner::{buchberger_grevlex, sample_consistent_instance_mod_p};
use tdoa_selfcal::polyform::{build_6r4s_system, EquationTag, PolySystem};

#[test]
#[ignore]
fn probe_three_minor_subsets() {
    let p = 2_147_483_629;
    let inst = sample_consistent_instance_mod_p(6, 4, p, 1303).unwrap();
    let full = build_6r4s_system(&inst.field, &inst.f).unwrap();
    let subsets: &[[[usize; 3]; 3]] = &[
        [[0, 1, 2], [0, 1, 3], [0, 2, 3]],
        [[0, 1, 3], [0, 2, 4], [1, 3, 4]],
        [[0, 1, 2], [0, 1, 3], [2, 3, 4]],
        [[0, 1, 4], [0, 2, 3], [1, 2, 4]],
    ];
    for want in subsets {
        let mut eqs = Vec::new();
        let mut tags = Vec::new();
        for (e, t) in full.equations.iter().zip(&full.tags) {
            let keep = match t {
                EquationTag::Minor { rows, .. } => want.iter().any(|w| w == rows),
                _ => true,
            };
            if keep {
                eqs.push(e.clone());
                tags.push(*t);
            }
        }
        assert_eq!(eqs.len(), 9);
        let sys = PolySystem::new(inst.field, full.nvars, full.var_names.clone(), eqs, tags);
        let t0 = std::time::Instant::now();
        let raw = buchberger_grevlex(&sys, false).unwrap();
        let raw_n = raw.basis_size;
        let sat = if raw_n.is_none() {
            buchberger_grevlex(&sys, true).unwrap().saturated_size
        } else {
            None
        };
        println!(
            "subset {:?}: raw {:?} sat {:?} ({:.1}s)",
            want,
            raw_n,
            sat,
            t0.elapsed().as_secs_f64()
        );
    }
}

#[test]
#[ignore]
fn probe_prefix_minors_saturated_by_leading_2x2() {
    use tdoa_selfcal::compaction::build_compaction_symbolic;
    use tdoa_selfcal::polyform::{Mono, MultiPoly};
    let p = 2_147_483_629;
    let inst = sample_consistent_instance_mod_p(6, 4, p, 1303).unwrap();
    let field = inst.field;
    let full = build_6r4s_system(&inst.field, &inst.f).unwrap();
    let keep: &[[usize; 3]] = &[[0, 1, 2], [0, 1, 3], [0, 1, 4]];
    let mut eqs = Vec::new();
    for (e, t) in full.equations.iter().zip(&full.tags) {
        let ok = match t {
            EquationTag::Minor { rows, .. } => keep.iter().any(|w| w == rows),
            _ => true,
        };
        if ok {
            eqs.push(e.clone());
        }
    }
    assert_eq!(eqs.len(), 9);
    // Leading 2x2 minor of the symbolic compaction (rows 0,1 / cols 0,1),
    // inverted through an auxiliary variable.
    let sym = build_compaction_symbolic(&field, &inst.f).unwrap();
    let q = sym
        .entry(0, 0)
        .mul(&field, sym.entry(1, 1))
        .sub(&field, &sym.entry(0, 1).mul(&field, sym.entry(1, 0)));
    let nv = full.nvars + 1;
    let mut eqs_ext: Vec<MultiPoly<_>> = eqs
        .iter()
        .map(|e| MultiPoly::from_terms(&field, nv, e.terms().to_vec()))
        .collect();
    let tq = MultiPoly::from_terms(
        &field,
        nv,
        q.terms()
            .iter()
            .map(|(m, c)| (m.mul(&Mono::var(full.nvars)), *c))
            .collect(),
    );
    let one = MultiPoly::constant(&field, nv, 1);
    eqs_ext.push(tq.sub(&field, &one));
    let sys = PolySystem::from_equations(field, nv, eqs_ext);
    let t0 = std::time::Instant::now();
    let r = buchberger_grevlex(&sys, false).unwrap();
    println!(
        "prefix minors + leading-2x2 inverted: {:?} ({:.1}s)",
        r.basis_size,
        t0.elapsed().as_secs_f64()
    );
}

#[test]
#[ignore]
fn probe_abc_variants_with_three_minors() {
    use tdoa_selfcal::polyform::{build_formulation_system, Formulation};
    let p = 2_147_483_629;
    let inst = sample_consistent_instance_mod_p(6, 4, p, 1303).unwrap();
    for (a, b, c) in [(0usize, 1usize, 5usize), (1, 2, 5), (0, 2, 5), (1, 1, 5), (1, 0, 5)] {
        let form = Formulation::with_minors(a, b, c, Some(3));
        let sys = build_formulation_system(&inst.field, &inst.f, &form).unwrap();
        let t0 = std::time::Instant::now();
        let raw = buchberger_grevlex(&sys, false).unwrap();
        let sat = if raw.basis_size.is_none() {
            buchberger_grevlex(&sys, true).unwrap().saturated_size
        } else {
            None
        };
        println!(
            "({a},{b},{c}) + 3 prefix minors: raw {:?} sat {:?} ({:.1}s)",
            raw.basis_size,
            sat,
            t0.elapsed().as_secs_f64()
        );
    }
    // Full ABC with all ten minors, for reference.
    let form = Formulation::with_minors(1, 2, 5, None);
    let sys = build_formulation_system(&inst.field, &inst.f, &form).unwrap();
    let raw = buchberger_grevlex(&sys, false).unwrap();
    println!("(1,2,5) + 10 minors: raw {:?}", raw.basis_size);
}

#[test]
#[ignore]
fn probe_prefix_minors_with_generic_slice() {
    use rand::{Rng, SeedableRng};
    use tdoa_selfcal::polyform::{Mono, MultiPoly};
    let p = 2_147_483_629u64;
    for (inst_seed, slice_seed) in [(1303u64, 17u64), (1303, 18), (501, 17)] {
        let inst = sample_consistent_instance_mod_p(6, 4, p, inst_seed).unwrap();
        let field = inst.field;
        let full = build_6r4s_system(&field, &inst.f).unwrap();
        let keep: &[[usize; 3]] = &[[0, 1, 2], [0, 1, 3], [0, 1, 4]];
        let mut eqs = Vec::new();
        for (e, t) in full.equations.iter().zip(&full.tags) {
            let ok = match t {
                EquationTag::Minor { rows, .. } => keep.iter().any(|w| w == rows),
                _ => true,
            };
            if ok {
                eqs.push(e.clone());
            }
        }
        assert_eq!(eqs.len(), 9);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(slice_seed);
        let mut terms = vec![(Mono::one(), rng.gen_range(1..p))];
        for v in 0..full.nvars {
            terms.push((Mono::var(v), rng.gen_range(1..p)));
        }
        eqs.push(MultiPoly::from_terms(&field, full.nvars, terms));
        let sys = PolySystem::from_equations(field, full.nvars, eqs);
        let t0 = std::time::Instant::now();
        let raw = buchberger_grevlex(&sys, false).unwrap();
        println!(
            "instance {inst_seed} slice {slice_seed}: prefix + hyperplane count {:?} ({:.1}s)",
            raw.basis_size,
            t0.elapsed().as_secs_f64()
        );
    }
}

#[test]
#[ignore]
fn probe_truth_is_root_of_full_abc() {
    use tdoa_selfcal::polyform::{build_formulation_system, Formulation};
    let p = 2_147_483_629;
    let inst = sample_consistent_instance_mod_p(6, 4, p, 1303).unwrap();
    let form = Formulation::with_minors(1, 2, 5, None);
    let sys = build_formulation_system(&inst.field, &inst.f, &form).unwrap();
    for (e, t) in sys.equations.iter().zip(&sys.tags) {
        let v = e.eval(&inst.field, &inst.truth);
        println!("{t:?}: eval at truth = {v}");
    }
}

#[test]
#[ignore]
fn probe_all_three_minor_subsets() {
    let p = 2_147_483_629;
    let inst = sample_consistent_instance_mod_p(6, 4, p, 1303).unwrap();
    let full = build_6r4s_system(&inst.field, &inst.f).unwrap();
    let triples: Vec<[usize; 3]> = {
        let mut v = Vec::new();
        for a in 0..5 {
            for b in a + 1..5 {
                for c in b + 1..5 {
                    v.push([a, b, c]);
                }
            }
        }
        v
    };
    let shares_common_pair = |w: &[[usize; 3]; 3]| -> bool {
        for a in 0..5usize {
            for b in a + 1..5 {
                if w.iter().all(|t| t.contains(&a) && t.contains(&b)) {
                    return true;
                }
            }
        }
        false
    };
    for x in 0..triples.len() {
        for y in x + 1..triples.len() {
            for z in y + 1..triples.len() {
                let want = [triples[x], triples[y], triples[z]];
                if shares_common_pair(&want) {
                    println!("subset {want:?}: skipped (common row pair, positive-dimensional)");
                    continue;
                }
                let mut eqs = Vec::new();
                for (e, t) in full.equations.iter().zip(&full.tags) {
                    let ok = match t {
                        EquationTag::Minor { rows, .. } => want.iter().any(|w| w == rows),
                        _ => true,
                    };
                    if ok {
                        eqs.push(e.clone());
                    }
                }
                let sys = PolySystem::from_equations(inst.field, full.nvars, eqs);
                let raw = buchberger_grevlex(&sys, false).unwrap();
                println!("subset {want:?}: raw {:?}", raw.basis_size);
            }
        }
    }
}

#[test]
#[ignore]
fn probe_three_generic_minor_combinations() {
    use rand::{Rng, SeedableRng};
    let p = 2_147_483_629;
    let inst = sample_consistent_instance_mod_p(6, 4, p, 1303).unwrap();
    let full = build_6r4s_system(&inst.field, &inst.f).unwrap();
    let field = inst.field;
    let minors: Vec<_> = full
        .equations
        .iter()
        .zip(&full.tags)
        .filter(|(_, t)| matches!(t, EquationTag::Minor { .. }))
        .map(|(e, _)| e.clone())
        .collect();
    assert_eq!(minors.len(), 10);
    for combo_seed in [5u64, 6] {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(combo_seed);
        let mut eqs: Vec<_> = full
            .equations
            .iter()
            .zip(&full.tags)
            .filter(|(_, t)| !matches!(t, EquationTag::Minor { .. }))
            .map(|(e, _)| e.clone())
            .collect();
        for _ in 0..3 {
            let mut acc = tdoa_selfcal::polyform::MultiPoly::zero(full.nvars);
            for m in &minors {
                let c = rng.gen_range(1..p);
                acc = acc.add(&field, &m.scale(&field, &c));
            }
            eqs.push(acc);
        }
        let sys = PolySystem::from_equations(field, full.nvars, eqs);
        let t0 = std::time::Instant::now();
        let raw = buchberger_grevlex(&sys, false).unwrap();
        let sat = if raw.basis_size.is_none() {
            buchberger_grevlex(&sys, true).unwrap().saturated_size
        } else {
            None
        };
        println!(
            "3 generic combos (seed {}): raw {:?} sat {:?} ({:.1}s)",
            combo_seed,
            raw.basis_size,
            sat,
            t0.elapsed().as_secs_f64()
        );
    }
}
