use std::sync::Arc;

use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use grglue::fixtures::{brauer_line, cycle_nakayama, desk_algebras};
use grglue::homotopy::{cone, homotopy_equivalent, is_minimal, minimize, support_window, verify_equivalence, ChainMap, HomSpace, ProjComplex, ProjMatrix};
use grglue::rng::{random_scalar, rng_for};
use grglue::{build_category, FieldSpec, FinKCat};

fn categories() -> Vec<Arc<FinKCat>> {
    let q = FieldSpec::rationals();
    let f5 = FieldSpec::prime(5).unwrap();
    vec![
        desk_algebras(q).0,
        Arc::new(build_category(&brauer_line(2), q).unwrap()),
        Arc::new(build_category(&brauer_line(3), f5).unwrap()),
        Arc::new(build_category(&cycle_nakayama(2), f5).unwrap()),
    ]
}

fn random_complex(c: &Arc<FinKCat>, rng: &mut ChaCha8Rng) -> ProjComplex {
    loop {
        let len = rng.gen_range(1..=3);
        let lo = rng.gen_range(-1..=1);
        let terms: Vec<Vec<usize>> = (0..len).map(|_| (0..rng.gen_range(1..=2)).map(|_| rng.gen_range(0..c.n_objects())).collect()).collect();
        let mut diffs = Vec::new();
        for k in 0..len - 1 {
            let (s, t) = (&terms[k], &terms[k + 1]);
            let entries = t
                .iter()
                .flat_map(|&y| s.iter().map(move |&x| (x, y)))
                .map(|(x, y)| (0..c.dim(x, y)).map(|_| if rng.gen_bool(0.6) { random_scalar(c.field(), rng) } else { c.field().zero() }).collect())
                .collect();
            diffs.push(ProjMatrix::from_entries(c, s, t, entries).unwrap());
        }
        if let Ok(u) = ProjComplex::new(c.clone(), lo, terms, diffs) {
            return u;
        }
    }
}

fn pair(seed: u64) -> (Arc<ProjComplex>, Arc<ProjComplex>, Arc<ProjComplex>) {
    let cats = categories();
    let c = &cats[(seed % cats.len() as u64) as usize];
    let mut rng = rng_for(format!("homotopy:{seed}").as_bytes());
    (Arc::new(random_complex(c, &mut rng)), Arc::new(random_complex(c, &mut rng)), Arc::new(random_complex(c, &mut rng)))
}

fn euler(u: &Arc<ProjComplex>, v: &Arc<ProjComplex>) -> i64 {
    let Some((lo, hi)) = support_window(u, v) else { return 0 };
    (lo..=hi).map(|n| if n % 2 == 0 { 1 } else { -1 } * HomSpace::new(u, v, n).unwrap().dim() as i64).sum()
}

fn dims(u: &Arc<ProjComplex>, v: &Arc<ProjComplex>) -> Vec<usize> {
    (-4..=4).map(|n| HomSpace::new(u, v, n).unwrap().dim()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn contractibles_are_invisible(seed in any::<u64>()) {
        let (u, v, _) = pair(seed);
        let c = Arc::new(cone(&ChainMap::identity(v.clone())).unwrap());
        let uc = Arc::new(c.direct_sum(&u).unwrap());
        prop_assert_eq!(HomSpace::new(&u, &uc, 0).unwrap().dim(), HomSpace::new(&u, &u, 0).unwrap().dim());
        prop_assert_eq!(dims(&u, &uc), dims(&u, &u));
    }

    #[test]
    fn minimize_is_idempotent_and_an_equivalence(seed in any::<u64>()) {
        let (u, _, _) = pair(seed);
        let m = minimize(&u).unwrap();
        prop_assert!(m.complex.total_dim() <= u.total_dim());
        prop_assert!(is_minimal(&m.complex).unwrap());
        prop_assert!(verify_equivalence(&m.to_min, &m.from_min).unwrap());
        let mm = minimize(&m.complex).unwrap();
        prop_assert_eq!(&*mm.complex, &*m.complex);
        let e = homotopy_equivalent(&u, &m.complex).unwrap();
        let e = e.expect("a complex is equivalent to its minimal model");
        prop_assert!(verify_equivalence(&e.forward, &e.backward).unwrap());
    }

    #[test]
    fn euler_characteristic_is_homotopy_invariant(seed in any::<u64>()) {
        let (u, v, w) = pair(seed);
        let e = euler(&u, &v);
        let mu = minimize(&u).unwrap().complex;
        let mv = minimize(&v).unwrap().complex;
        prop_assert_eq!(euler(&mu, &v), e);
        prop_assert_eq!(euler(&u, &mv), e);
        let padded = Arc::new(u.direct_sum(&cone(&ChainMap::identity(w.clone())).unwrap()).unwrap());
        prop_assert_eq!(euler(&padded, &v), e);
    }

    #[test]
    fn shifts_move_hom_degrees(seed in any::<u64>(), k in -2i64..=2) {
        let (u, v, _) = pair(seed);
        let vs = Arc::new(v.shift(k));
        for n in -3..=3 {
            prop_assert_eq!(HomSpace::new(&u, &vs, n).unwrap().dim(), HomSpace::new(&u, &v, n + k).unwrap().dim());
        }
    }

    #[test]
    fn homs_vanish_outside_the_window(seed in any::<u64>()) {
        let (u, v, _) = pair(seed);
        let (lo, hi) = support_window(&u, &v).unwrap_or((0, -1));
        for n in -6..=6 {
            if n < lo || n > hi {
                prop_assert_eq!(HomSpace::new(&u, &v, n).unwrap().dim(), 0);
            }
        }
    }
}
