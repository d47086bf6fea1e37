use std::sync::Arc;

use proptest::prelude::*;

use grglue::colax::diagonal;
use grglue::fixtures::{desk_algebras, desk_tilting, gluing_example};
use grglue::glue::{glue, EquivalenceSource, Verdict};
use grglue::homotopy::{verify_equivalence, ProjComplex};
use grglue::tilting::{
    check_presilting, check_tilting_colax, end_category, find_generation_certificate, k0_matrix, replay, SearchCaps, TiltingColaxCertificate,
    TiltingSubcategoryData,
};
use grglue::{grothendieck, FieldSpec, IndexCat};

/// Candidate objects over two bases: the desk algebra and the three-vertex fiber.
fn pools() -> Vec<(Arc<grglue::FinKCat>, Vec<(String, Arc<ProjComplex>)>)> {
    let (a, _) = desk_algebras(FieldSpec::rationals());
    let t = desk_tilting(&a);
    let mut desk: Vec<(String, Arc<ProjComplex>)> = t.names().iter().cloned().zip(t.objects().iter().cloned()).collect();
    for x in 0..2 {
        for d in [-1, 0, 1] {
            desk.push((format!("P{x}[{}]", -d), Arc::new(ProjComplex::stalk(a.clone(), x, d))));
        }
    }
    desk.push(("T1[1]".into(), Arc::new(t.objects()[0].shift(1))));
    let g = gluing_example(3).unwrap();
    let f3 = &g.cert.fibers[1];
    let mut three: Vec<(String, Arc<ProjComplex>)> = f3.names().iter().cloned().zip(f3.objects().iter().cloned()).collect();
    for x in 0..3 {
        three.push((format!("P{x}"), Arc::new(ProjComplex::stalk(f3.base().clone(), x, 0))));
    }
    vec![(a, desk), (f3.base().clone(), three)]
}

fn choose(which: usize, picks: &[usize]) -> TiltingSubcategoryData {
    let (base, pool) = pools().swap_remove(which);
    let mut seen = Vec::new();
    for &p in picks {
        let k = p % pool.len();
        if !seen.contains(&k) {
            seen.push(k);
        }
    }
    TiltingSubcategoryData::new(base, seen.iter().map(|&k| pool[k].0.clone()).collect(), seen.iter().map(|&k| pool[k].1.clone()).collect()).unwrap()
}

fn caps() -> SearchCaps {
    SearchCaps::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn presilting_ignores_object_order(which in 0usize..2, picks in prop::collection::vec(0usize..20, 1..=4), rot in 0usize..4) {
        let t = choose(which, &picks);
        let mut names = t.names().to_vec();
        let mut objs = t.objects().to_vec();
        let r = rot % names.len();
        names.rotate_left(r);
        objs.rotate_left(r);
        names.reverse();
        objs.reverse();
        let t2 = TiltingSubcategoryData::new(t.base().clone(), names, objs).unwrap();
        prop_assert_eq!(check_presilting(&t).unwrap().render_text(), check_presilting(&t2).unwrap().render_text());
    }

    #[test]
    fn certificates_replay_and_force_unimodular_k0(which in 0usize..2, picks in prop::collection::vec(0usize..20, 1..=4)) {
        let t = choose(which, &picks);
        let mut all = true;
        for x in 0..t.base().n_objects() {
            match find_generation_certificate(&t, x, caps()).unwrap() {
                Some(cert) => {
                    let r = replay(&cert, &t).unwrap();
                    let w = r.witness.expect("replayed certificate reaches its target");
                    prop_assert!(verify_equivalence(&w.forward, &w.backward).unwrap());
                }
                None => all = false,
            }
        }
        let k = k0_matrix(&t);
        if all && t.len() == t.base().n_objects() {
            prop_assert!(k.unimodular);
            prop_assert_eq!(k.det.map(i64::abs), Some(1));
        }
    }

    #[test]
    fn end_categories_are_categories(which in 0usize..2, picks in prop::collection::vec(0usize..20, 1..=4)) {
        let t = choose(which, &picks);
        if check_presilting(&t).unwrap().passed() {
            let e = end_category(&t).unwrap();
            prop_assert!(e.cat().check_axioms().passed());
            prop_assert_eq!(e.cat().n_objects(), t.len());
        }
    }
}

#[test]
fn trivial_index_reduces_to_one_category() {
    let (a, ap) = desk_algebras(FieldSpec::rationals());
    let idx = Arc::new(IndexCat::trivial());
    let x = Arc::new(diagonal(a.clone(), idx.clone()));
    let xp = Arc::new(diagonal(ap, idx.clone()));
    let gr = grothendieck(&x).unwrap();
    assert_eq!(gr.cat().dim_table(), a.dim_table());
    for s in 0..a.n_objects() {
        for m in 0..a.n_objects() {
            for t in 0..a.n_objects() {
                for g in 0..a.dim(m, t) {
                    for f in 0..a.dim(s, m) {
                        let (gs, gm, gt) = (gr.object(0, s), gr.object(0, m), gr.object(0, t));
                        assert_eq!(gr.cat().compose_basis(gs, gm, gt, g, f), a.compose_basis(s, m, t, g, f));
                    }
                }
            }
        }
    }
    let cases = [desk_tilting(&a), TiltingSubcategoryData::stalks(a.clone()), {
        let t = desk_tilting(&a);
        TiltingSubcategoryData::new(a.clone(), vec!["T1".into(), "S".into()], vec![t.objects()[0].clone(), Arc::new(t.objects()[0].shift(1))]).unwrap()
    }];
    for (k, t) in cases.into_iter().enumerate() {
        let single = check_presilting(&t).unwrap().passed() && k0_matrix(&t).unimodular;
        let cert = TiltingColaxCertificate::with_identity_rho(x.clone(), vec![t], vec![vec![0, 1]; 1]).unwrap();
        let checked = check_tilting_colax(&cert, caps()).unwrap();
        let out = glue(&xp, &cert, &EquivalenceSource::Hints(vec![Default::default()]), caps()).unwrap();
        assert_eq!(checked.report.passed(), single);
        if !single {
            assert_ne!(out.verdict, Verdict::Certified);
        }
        if k == 0 {
            assert!(single);
            assert_eq!(out.verdict, Verdict::Certified, "{}", out.report.render_text());
        }
    }
}
