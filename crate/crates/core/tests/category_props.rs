use std::collections::BTreeMap;

use num_rational::BigRational;
use proptest::prelude::*;

use grglue::fixtures::{brauer_line, cycle_nakayama};
use grglue::index::IndexCat;
use grglue::quiver::{build_category, Arrow, QuiverPresentation};
use grglue::{FieldSpec, Matrix};

fn all_paths(q: &QuiverPresentation, max_len: usize) -> Vec<(usize, Vec<usize>)> {
    let mut out: Vec<(usize, Vec<usize>)> = (0..q.vertices.len()).map(|v| (v, Vec::new())).collect();
    let mut frontier: Vec<(usize, usize, Vec<usize>)> = (0..q.vertices.len()).map(|v| (v, v, Vec::new())).collect();
    for _ in 0..max_len {
        let mut next = Vec::new();
        for (s, end, p) in &frontier {
            for (k, a) in q.arrows.iter().enumerate() {
                if a.source == *end {
                    let mut p2 = p.clone();
                    p2.push(k);
                    next.push((*s, a.target, p2));
                }
            }
        }
        out.extend(next.iter().map(|(s, _, p)| (*s, p.clone())));
        frontier = next;
    }
    out
}

fn end_of(q: &QuiverPresentation, s: usize, p: &[usize]) -> usize {
    p.last().map_or(s, |&a| q.arrows[a].target)
}

/// Hom dimensions from the span of `u·r·w` in each degree, by direct path expansion.
fn oracle_dims(q: &QuiverPresentation, max_len: usize) -> Vec<Vec<usize>> {
    let field = FieldSpec::rationals();
    let n = q.vertices.len();
    let paths = all_paths(q, max_len);
    let mut groups: BTreeMap<(usize, usize, usize), Vec<Vec<usize>>> = BTreeMap::new();
    for (s, p) in &paths {
        groups.entry((*s, end_of(q, *s, p), p.len())).or_default().push(p.clone());
    }
    let mut dims = vec![vec![0; n]; n];
    for ((s, t, len), ps) in &groups {
        let mut rows = Vec::new();
        for rel in &q.relations {
            let rlen = rel[0].1.len();
            if rlen > *len {
                continue;
            }
            let rs = q.arrows[rel[0].1[0]].source;
            let rt = q.arrows[*rel[0].1.last().unwrap()].target;
            for (s1, pre) in paths.iter().filter(|(a, p)| a == s && end_of(q, *a, p) == rs) {
                let _ = s1;
                for (_, post) in paths.iter().filter(|(a, p)| *a == rt && end_of(q, *a, p) == *t && pre.len() + rlen + p.len() == *len) {
                    let mut row = vec![field.zero(); ps.len()];
                    for (c, rp) in rel {
                        let full: Vec<usize> = pre.iter().chain(rp).chain(post).copied().collect();
                        let k = ps.iter().position(|p| *p == full).unwrap();
                        row[k] = &row[k] + &field.from_ratio(c.numer(), c.denom()).unwrap();
                    }
                    rows.push(row);
                }
            }
        }
        let rank = if rows.is_empty() { 0 } else { Matrix::from_rows(field, rows).unwrap().rank() };
        dims[*s][*t] += ps.len() - rank;
    }
    dims
}

/// Random presentation with every path of length `kill` zero, plus extra
/// monomial and binomial relations in degree 2.
fn presentation() -> impl Strategy<Value = QuiverPresentation> {
    (1usize..=3, prop::collection::vec((0usize..3, 0usize..3), 0..=4), 2usize..=3, any::<u64>()).prop_map(|(n, arrows, kill, bits)| {
        let arrows: Vec<Arrow> = arrows
            .iter()
            .enumerate()
            .map(|(k, &(s, t))| Arrow { name: format!("x{k}"), source: s % n, target: t % n })
            .collect();
        let mut q = QuiverPresentation::new((0..n).map(|v| format!("v{v}")).collect(), arrows);
        let one = BigRational::from_integer(1.into());
        let mut rels = Vec::new();
        let mut bit = 0;
        let mut next_bit = || {
            bit += 1;
            bits >> (bit % 64) & 1 == 1
        };
        let two: Vec<_> = all_paths(&q, 2).into_iter().filter(|(_, p)| p.len() == 2).collect();
        for (i, (s, p)) in two.iter().enumerate() {
            if kill == 2 || next_bit() {
                rels.push(vec![(one.clone(), p.clone())]);
            } else if let Some((_, p2)) = two[i + 1..].iter().find(|(s2, p2)| s2 == s && end_of(&q, *s2, p2) == end_of(&q, *s, p)) {
                if next_bit() {
                    rels.push(vec![(one.clone(), p.clone()), (BigRational::from_integer((-3).into()), p2.clone())]);
                }
            }
        }
        if kill == 3 {
            for (_, p) in all_paths(&q, 3).into_iter().filter(|(_, p)| p.len() == 3) {
                rels.push(vec![(one.clone(), p)]);
            }
        }
        q.relations = rels;
        q
    })
}

/// `top` must exceed the nilpotency degree; the oracle checks that degree `top` vanishes.
fn compare(q: &QuiverPresentation, top: usize) {
    let c = build_category(q, FieldSpec::rationals()).unwrap();
    assert_eq!(c.dim_table(), oracle_dims(q, top));
    assert_eq!(oracle_dims(q, top), oracle_dims(q, top - 1), "degree {top} should vanish");
}

#[test]
fn fixture_dimensions_match_the_oracle() {
    for i in 2..=4 {
        compare(&brauer_line(i), 5);
        compare(&cycle_nakayama(i), i + 2);
    }
    let c = build_category(&brauer_line(2), FieldSpec::rationals()).unwrap();
    assert_eq!(c.dim_table(), vec![vec![2, 1], vec![1, 2]]);
}

fn dag() -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
    (1usize..=5).prop_flat_map(|n| (Just(n), prop::collection::vec((0..n, 0..n), 0..=7)))
        .prop_map(|(n, es)| (n, es.into_iter().filter(|(s, t)| s < t).collect()))
}

fn dfs_paths(n: usize, es: &[(usize, usize)]) -> usize {
    fn from(v: usize, es: &[(usize, usize)]) -> usize {
        1 + es.iter().filter(|e| e.0 == v).map(|e| from(e.1, es)).sum::<usize>()
    }
    (0..n).map(|v| from(v, es)).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn built_categories_match_the_oracle(q in presentation()) {
        let c = build_category(&q, FieldSpec::rationals()).unwrap();
        // every path of length 3 lies in the ideal
        prop_assert_eq!(c.dim_table(), oracle_dims(&q, 3));
        prop_assert!(c.check_axioms().passed());
    }

    #[test]
    fn build_is_deterministic(q in presentation(), p in prop::sample::select(vec![0u64, 2, 3, 7])) {
        let f = if p == 0 { FieldSpec::rationals() } else { FieldSpec::prime(p).unwrap() };
        let a = build_category(&q, f).unwrap();
        let b = build_category(&q, f).unwrap();
        prop_assert!(a == b);
        for x in 0..a.n_objects() {
            for y in 0..a.n_objects() {
                prop_assert_eq!(a.labels(x, y), b.labels(x, y));
            }
        }
        prop_assert!(a.check_axioms().passed());
    }

    #[test]
    fn free_categories_count_paths((n, es) in dag()) {
        let names = (0..n).map(|v| v.to_string()).collect();
        let arrows = es.iter().enumerate().map(|(k, &(s, t))| (format!("a{k}"), s, t)).collect();
        let i = IndexCat::free_on_acyclic_quiver(names, arrows).unwrap();
        prop_assert_eq!(i.n_morphisms(), dfs_paths(n, &es));
        prop_assert!(i.check_axioms().passed());
    }

    #[test]
    fn posets_are_categories((n, es) in dag()) {
        let names = (0..n).map(|v| v.to_string()).collect();
        let mut less = vec![vec![false; n]; n];
        for &(s, t) in &es {
            less[s][t] = true;
        }
        for k in 0..n {
            for s in 0..n {
                for t in 0..n {
                    less[s][t] |= less[s][k] && less[k][t];
                }
            }
        }
        let closed: Vec<(usize, usize)> = (0..n).flat_map(|s| (0..n).map(move |t| (s, t))).filter(|&(s, t)| less[s][t]).collect();
        let i = IndexCat::from_poset(names, &closed).unwrap();
        prop_assert_eq!(i.n_morphisms(), n + closed.len());
        prop_assert!(i.check_axioms().passed());
        for x in 0..n {
            for y in 0..n {
                prop_assert!(i.hom(x, y).len() <= 1);
            }
        }
    }

    #[test]
    fn cyclic_monoids_are_categories(m in 1usize..=6) {
        let table: Vec<Vec<usize>> = (0..m).map(|b| (0..m).map(|a| (a + b) % m).collect()).collect();
        let i = IndexCat::from_monoid((0..m).map(|k| format!("s{k}")).collect(), &table).unwrap();
        prop_assert!(i.check_axioms().passed());
        prop_assert_eq!(i.hom(0, 0).len(), m);
    }
}
