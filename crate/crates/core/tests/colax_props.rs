use std::sync::Arc;

use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use grglue::colax::{
    check_colax, check_equivalence, compose_left_transformations, diagonal, diagonal_functor, functor_equivalence, quasi_inverse,
    ColaxFunctor, LeftTransformation, TwoMorphism,
};
use grglue::fincat::{compose_functors, KFunctor, NatTransf};
use grglue::fixtures::{random_corpus, small_indices};
use grglue::grothendieck::{canonical_morphism, check_covering, factor_through_gr, gr_on_1cell, gr_on_2cell, grothendieck};
use grglue::homotopy::{cone, ChainMap, HomSpace, ProjComplex};
use grglue::index::IndexKind;
use grglue::pseudo::{check_precovering_preserved, kb_prj};
use grglue::quiver::{build_category, functor_from_arrows, path_element, Arrow, QuiverPresentation};
use grglue::rng::rng_for;
use grglue::{Elem, FieldSpec, FinKCat};

fn f5() -> FieldSpec {
    FieldSpec::prime(5).unwrap()
}

fn unit(rng: &mut ChaCha8Rng) -> i64 {
    rng.gen_range(1..5)
}

/// A path category on a random DAG (two or three vertices) over F_5.
fn path_cat(rng: &mut ChaCha8Rng) -> Arc<FinKCat> {
    let n = rng.gen_range(1..=3);
    let mut arrows = Vec::new();
    for s in 0..n {
        for t in s + 1..n {
            for _ in 0..rng.gen_range(0..=2) {
                arrows.push(Arrow { name: format!("r{}", arrows.len()), source: s, target: t });
            }
        }
    }
    let q = QuiverPresentation::new((0..n).map(|v| format!("v{v}")).collect(), arrows);
    Arc::new(build_category(&q, f5()).unwrap())
}

/// Identity on objects, each arrow rescaled by a unit.
fn rescaling(c: &Arc<FinKCat>, rng: &mut ChaCha8Rng) -> KFunctor {
    let q = c.quiver().unwrap().presentation.clone();
    let images: Vec<Elem> = (0..q.arrows.len())
        .map(|k| {
            let (_, e) = path_element(c, q.arrows[k].source, &[k]).unwrap();
            let s = f5().from_i64(unit(rng));
            e.iter().map(|v| v * &s).collect()
        })
        .collect();
    functor_from_arrows(c.clone(), c.clone(), (0..c.n_objects()).collect(), &images).unwrap()
}

/// A strict functor over one of the small indices: generators are rescalings.
fn strict(seed: u64) -> Arc<ColaxFunctor> {
    let mut rng = rng_for(format!("strict:{seed}").as_bytes());
    let idx = small_indices()[(seed % 5) as usize].clone();
    let c = path_cat(&mut rng);
    let fibers = vec![c.clone(); idx.n_objects()];
    Arc::new(match idx.kind() {
        IndexKind::Free { arrows } => {
            let gens: Vec<Arc<KFunctor>> = arrows.iter().map(|_| Arc::new(rescaling(&c, &mut rng))).collect();
            ColaxFunctor::from_generators(idx.clone(), fibers, &gens).unwrap()
        }
        _ => diagonal(c, idx.clone()),
    })
}

fn stalks_and_cones(c: &Arc<FinKCat>) -> Vec<Arc<ProjComplex>> {
    let mut out: Vec<Arc<ProjComplex>> = (0..c.n_objects()).map(|x| Arc::new(ProjComplex::stalk(c.clone(), x, 0))).collect();
    let n = out.len();
    for s in 0..n {
        for t in 0..n {
            if let Some(f) = HomSpace::new(&out[s], &out[t], 0).unwrap().basis().into_iter().next() {
                out.push(Arc::new(cone(&f).unwrap()));
            }
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn strict_functors_are_colax(seed in any::<u64>()) {
        let x = strict(seed);
        prop_assert!(x.is_strict());
        let r = check_colax(&x);
        prop_assert!(r.passed(), "{}", r.render_text());
    }

    #[test]
    fn diagonal_is_two_functorial(seed in any::<u64>()) {
        let mut rng = rng_for(format!("delta:{seed}").as_bytes());
        let c = path_cat(&mut rng);
        let idx = small_indices()[(seed % 5) as usize].clone();
        let (e, e2) = (rescaling(&c, &mut rng), rescaling(&c, &mut rng));
        let lhs = diagonal_functor(&compose_functors(&e2, &e).unwrap(), idx.clone());
        let rhs = compose_left_transformations(&diagonal_functor(&e2, idx.clone()), &diagonal_functor(&e, idx.clone())).unwrap();
        prop_assert_eq!(lhs, rhs);
        // on 2-cells: the identity of E goes to the identity 2-morphism
        let id = grglue::colax::diagonal_nat(&NatTransf::identity(Arc::new(e.clone())), idx.clone());
        prop_assert_eq!(id, TwoMorphism::identity(Arc::new(diagonal_functor(&e, idx))));
    }

    #[test]
    fn left_transformations_form_a_category(seed in any::<u64>()) {
        let mut rng = rng_for(format!("assoc:{seed}").as_bytes());
        let c = path_cat(&mut rng);
        let idx = small_indices()[(seed % 5) as usize].clone();
        let fs: Vec<LeftTransformation> = (0..3).map(|_| diagonal_functor(&rescaling(&c, &mut rng), idx.clone())).collect();
        let (f, g, h) = (&fs[0], &fs[1], &fs[2]);
        let a = compose_left_transformations(&compose_left_transformations(h, g).unwrap(), f).unwrap();
        let b = compose_left_transformations(h, &compose_left_transformations(g, f).unwrap()).unwrap();
        prop_assert_eq!(a, b);
        let x = random_corpus(1 + (seed % 7) as usize).pop().unwrap();
        let gr = grothendieck(&x).unwrap();
        let p = canonical_morphism(&gr).unwrap();
        let id_src = LeftTransformation::identity(x.clone());
        let id_tgt = LeftTransformation::identity(p.target().clone());
        prop_assert_eq!(&compose_left_transformations(&p, &id_src).unwrap(), &p);
        prop_assert_eq!(&compose_left_transformations(&id_tgt, &p).unwrap(), &p);
    }

    #[test]
    fn quasi_inverses_are_equivalences(seed in any::<u64>()) {
        let mut rng = rng_for(format!("qinv:{seed}").as_bytes());
        let c = path_cat(&mut rng);
        let idx = small_indices()[(seed % 5) as usize].clone();
        let f = diagonal_functor(&rescaling(&c, &mut rng), idx);
        prop_assert!(check_equivalence(&f).passed());
        let g = quasi_inverse(&f).unwrap();
        let r = check_equivalence(&g);
        prop_assert!(r.passed(), "{}", r.render_text());
        prop_assert!(g.check().passed());
    }

    #[test]
    fn gr_is_two_functorial(seed in any::<u64>()) {
        let mut rng = rng_for(format!("gr2:{seed}").as_bytes());
        let c = path_cat(&mut rng);
        let idx = small_indices()[(seed % 5) as usize].clone();
        let (e, e2) = (rescaling(&c, &mut rng), rescaling(&c, &mut rng));
        let (f, g) = (diagonal_functor(&e, idx.clone()), diagonal_functor(&e2, idx.clone()));
        let gr = grothendieck(f.source()).unwrap();
        let gf = compose_left_transformations(&g, &f).unwrap();
        let lhs = gr_on_1cell(&gf, &gr, &gr).unwrap();
        let rhs = compose_functors(&gr_on_1cell(&g, &gr, &gr).unwrap(), &gr_on_1cell(&f, &gr, &gr).unwrap()).unwrap();
        prop_assert!(lhs == rhs);
        let x = random_corpus(1 + (seed % 7) as usize).pop().unwrap();
        let grx = grothendieck(&x).unwrap();
        let id = LeftTransformation::identity(x.clone());
        prop_assert!(gr_on_1cell(&id, &grx, &grx).unwrap().is_identity());
        let z = TwoMorphism::identity(Arc::new(id));
        let nat = gr_on_2cell(&z, &grx, &grx).unwrap();
        prop_assert!(nat == NatTransf::identity(Arc::new(KFunctor::identity(grx.cat().clone()))));
    }

    #[test]
    fn gr_dimension_counts_blocks(k in 1usize..=25) {
        let x = random_corpus(k).pop().unwrap();
        let gr = grothendieck(&x).unwrap();
        let idx = x.index();
        let mut total = 0;
        for i in 0..idx.n_objects() {
            for j in 0..idx.n_objects() {
                for a in idx.hom(i, j) {
                    let fa = x.arrow(a);
                    for xo in 0..x.fiber(i).n_objects() {
                        for yo in 0..x.fiber(j).n_objects() {
                            total += x.fiber(j).dim(fa.obj(xo), yo);
                        }
                    }
                }
            }
        }
        prop_assert_eq!(gr.cat().total_dim(), total);
    }

    #[test]
    fn covering_iff_the_factorization_is_an_equivalence(seed in any::<u64>()) {
        let mut rng = rng_for(format!("cov:{seed}").as_bytes());
        let c = path_cat(&mut rng);
        let idx = small_indices()[(seed % 5) as usize].clone();
        let x = random_corpus(1 + (seed % 11) as usize).pop().unwrap();
        let grx = grothendieck(&x).unwrap();
        let cases = vec![
            canonical_morphism(&grx).unwrap(),
            LeftTransformation::identity(Arc::new(diagonal(c.clone(), idx.clone()))),
            diagonal_functor(&rescaling(&c, &mut rng), idx),
        ];
        for f in &cases {
            let gr = grothendieck(f.source()).unwrap();
            let covering = check_covering(f).unwrap().passed();
            let h = factor_through_gr(f, &gr).unwrap();
            prop_assert_eq!(covering, functor_equivalence(&h).is_ok());
        }
        let nontrivial = cases[1].source().index().n_morphisms() > 1;
        prop_assert_eq!(check_covering(&cases[1]).unwrap().passed(), !nontrivial);
    }

    #[test]
    fn strict_functors_have_identity_comparisons_in_kb(seed in any::<u64>()) {
        let x = strict(seed);
        let vx = kb_prj(x.clone()).unwrap();
        let idx = x.index().clone();
        let sample = stalks_and_cones(x.fiber(0));
        for u in &sample {
            for i in 0..idx.n_objects() {
                let eta = vx.eta(i, u).unwrap();
                prop_assert!(eta == ChainMap::identity(u.clone()));
            }
            for (b, a) in idx.composable_pairs() {
                let theta = vx.theta(b, a, u).unwrap();
                prop_assert!(theta == ChainMap::identity(theta.source().clone()));
            }
        }
    }

    #[test]
    fn coverings_stay_precovering_in_kb(k in 1usize..=25) {
        let x = random_corpus(k).pop().unwrap();
        let gr = grothendieck(&x).unwrap();
        let p = Arc::new(canonical_morphism(&gr).unwrap());
        prop_assert!(check_covering(&p).unwrap().passed());
        let idx = x.index();
        let mut pairs = Vec::new();
        for i in 0..idx.n_objects() {
            for j in 0..idx.n_objects() {
                for u in stalks_and_cones(x.fiber(i)).into_iter().take(4) {
                    for w in stalks_and_cones(x.fiber(j)).into_iter().take(4) {
                        pairs.push((i, u.clone(), j, w));
                    }
                }
            }
        }
        let r = check_precovering_preserved(&p, &pairs).unwrap();
        prop_assert!(r.passed(), "{}", r.render_text());
    }
}
