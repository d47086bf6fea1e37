//! Worked instances: small index categories, the gluing example on chains of
//! Brauer-tree type algebras, desk instances over `k(1→2)`, and a seeded random corpus.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_rational::BigRational;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::colax::{diagonal, ColaxFunctor, LeftTransformation};
use crate::error::Result;
use crate::field::FieldSpec;
use crate::fincat::{Elem, FinKCat, KFunctor};
use crate::homotopy::{ChainMap, ProjComplex, ProjMatrix};
use crate::index::IndexCat;
use crate::quiver::{build_category, functor_from_arrows, path_element, Arrow, QuiverPresentation, Relation};
use crate::rng::{random_scalar, rng_for};
use crate::format::{Document, Exporter};
use crate::tilting::{check_tilting_colax, end_category, PresentationHints, SearchCaps, TiltingColaxCertificate, TiltingSubcategoryData};

fn names(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

pub fn one(field: FieldSpec) -> Arc<FinKCat> {
    Arc::new(build_category(&QuiverPresentation::new(names(&["*"]), vec![]), field).expect("one object"))
}

pub fn free_arrow() -> Arc<IndexCat> {
    Arc::new(IndexCat::free_on_acyclic_quiver(names(&["1", "2"]), vec![("a".into(), 0, 1)]).expect("acyclic"))
}

pub fn chain_poset(n: usize) -> Arc<IndexCat> {
    let less: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    Arc::new(IndexCat::from_poset((1..=n).map(|i| i.to_string()).collect(), &less).expect("chain"))
}

pub fn cyclic_monoid(n: usize) -> Arc<IndexCat> {
    let els = (0..n).map(|k| if k == 0 { "e".to_string() } else { format!("s{k}") }).collect();
    let table: Vec<Vec<usize>> = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
    Arc::new(IndexCat::from_monoid(els, &table).expect("group"))
}

pub fn double_arrow() -> Arc<IndexCat> {
    Arc::new(IndexCat::free_on_acyclic_quiver(names(&["1", "2"]), vec![("a".into(), 0, 1), ("b".into(), 0, 1)]).expect("acyclic"))
}

/// The four diagonal instances `Δ(k)` over `1→2`, the 3-chain, `Z/2`, and `1⇉2`.
pub fn gr_examples(field: FieldSpec) -> Vec<(&'static str, Arc<ColaxFunctor>)> {
    let k = one(field);
    vec![
        ("free 1->2", Arc::new(diagonal(k.clone(), free_arrow()))),
        ("3-chain poset", Arc::new(diagonal(k.clone(), chain_poset(3)))),
        ("Z/2 monoid", Arc::new(diagonal(k.clone(), cyclic_monoid(2)))),
        ("two arrows 1=>2", Arc::new(diagonal(k, double_arrow()))),
    ]
}

fn q1() -> BigRational {
    BigRational::from_integer(1.into())
}

fn arrow(name: String, s: usize, t: usize) -> Arrow {
    Arrow { name, source: s, target: t }
}

/// `X(i)`: vertices `1..i`, arrows `al_j: j → j+1`, `be_j: j+1 → j`.
pub fn brauer_line(i: usize) -> QuiverPresentation {
    let v = (1..=i).map(|k| k.to_string()).collect();
    let mut arrows = Vec::new();
    for j in 1..i {
        arrows.push(arrow(format!("al{j}"), j - 1, j));
    }
    for j in 1..i {
        arrows.push(arrow(format!("be{j}"), j, j - 1));
    }
    let al = |j: usize| j - 1;
    let be = |j: usize| i - 1 + j - 1;
    let mut relations: Vec<Relation> = Vec::new();
    for j in 1..i - 1 {
        relations.push(vec![(q1(), vec![al(j), al(j + 1)])]);
        relations.push(vec![(q1(), vec![be(j + 1), be(j)])]);
        relations.push(vec![(q1(), vec![be(j), al(j)]), (-q1(), vec![al(j + 1), be(j + 1)])]);
    }
    relations.push(vec![(q1(), vec![al(1), be(1), al(1)])]);
    relations.push(vec![(q1(), vec![be(i - 1), al(i - 1), be(i - 1)])]);
    let mut q = QuiverPresentation::new(v, arrows);
    q.relations = relations;
    q
}

/// `X'(i)`: the oriented cycle `g_1, …, g_i` with all paths of length `i+1` zero.
pub fn cycle_nakayama(i: usize) -> QuiverPresentation {
    let v = (1..=i).map(|k| k.to_string()).collect();
    let arrows = (1..=i).map(|j| arrow(format!("g{j}"), j - 1, j % i)).collect();
    let relations = (0..i).map(|s| vec![(q1(), (0..=i).map(|k| (s + k) % i).collect())]).collect();
    let mut q = QuiverPresentation::new(v, arrows);
    q.relations = relations;
    q
}

/// The free index category `2 → 3 → ⋯ → n`.
pub fn gluing_index(n: usize) -> Arc<IndexCat> {
    let v = (2..=n).map(|k| k.to_string()).collect();
    let arrows = (2..n).map(|k| (format!("a{k}"), k - 2, k - 1)).collect();
    Arc::new(IndexCat::free_on_acyclic_quiver(v, arrows).expect("acyclic"))
}

/// Everything needed to glue along `2 → ⋯ → n`.
pub struct GluingExample {
    pub n: usize,
    pub x: Arc<ColaxFunctor>,
    pub x_prime: Arc<ColaxFunctor>,
    pub cert: TiltingColaxCertificate,
    pub hints: Vec<PresentationHints>,
    /// `δ(i)_j` as chain maps, per fiber.
    pub deltas: Vec<Vec<ChainMap>>,
}

fn elem_of(c: &FinKCat, q: &QuiverPresentation, start: usize, arrows: &[&str]) -> Elem {
    let p: Vec<usize> = arrows.iter().map(|a| q.arrow_index(a).expect("arrow")).collect();
    path_element(c, start, &p).expect("path").1
}

/// `T(i)_1 = P_1`, `T(i)_j = (P_2 → ⋯ → P_{i-j+2})` for `j ≥ 2`, `P_2` in degree 0.
pub fn gluing_tilting(c: &Arc<FinKCat>, i: usize) -> TiltingSubcategoryData {
    let q = &c.quiver().expect("presented").presentation;
    let mut objects = vec![Arc::new(ProjComplex::stalk(c.clone(), 0, 0))];
    for j in 2..=i {
        let top = i - j + 2;
        let terms: Vec<Vec<usize>> = (2..=top).map(|v| vec![v - 1]).collect();
        let diffs = (2..top)
            .map(|v| ProjMatrix::from_entries(c, &[v - 1], &[v], vec![elem_of(c, q, v - 1, &[&format!("al{v}")])]).expect("shape"))
            .collect();
        objects.push(Arc::new(ProjComplex::new(c.clone(), 0, terms, diffs).expect("complex")));
    }
    let names = (1..=i).map(|j| format!("T{j}")).collect();
    TiltingSubcategoryData::new(c.clone(), names, objects).expect("one base")
}

fn deltas(c: &Arc<FinKCat>, t: &TiltingSubcategoryData, i: usize) -> Vec<ChainMap> {
    let q = &c.quiver().expect("presented").presentation;
    let obj = t.objects();
    let mut out = Vec::new();
    // δ_1 = P(al1): T1 → T2 in degree 0
    let m = ProjMatrix::from_entries(c, &[0], &[1], vec![elem_of(c, q, 0, &["al1"])]).unwrap();
    let comps = vec![m];
    out.push(ChainMap::new(obj[0].clone(), obj[1].clone(), 0, comps).expect("chain map"));
    // δ_j = (id, …, id, 0): T_j → T_{j+1}
    for j in 2..i {
        let (s, tt) = (&obj[j - 1], &obj[j]);
        let comps = s
            .degrees()
            .map(|k| if tt.term(k).is_empty() { ProjMatrix::zero(c, s.term(k), &[]) } else { ProjMatrix::identity(c, s.term(k)) })
            .collect();
        out.push(ChainMap::new(s.clone(), tt.clone(), 0, comps).expect("chain map"));
    }
    // δ_i = P(be1): T_i → T_1
    let m = ProjMatrix::from_entries(c, &[1], &[0], vec![elem_of(c, q, 1, &["be1"])]).unwrap();
    out.push(ChainMap::new(obj[i - 1].clone(), obj[0].clone(), 0, vec![m]).expect("chain map"));
    out
}

pub fn gluing_example(n: usize) -> Result<GluingExample> {
    let field = FieldSpec::rationals();
    let idx = gluing_index(n);
    let xs: Vec<Arc<FinKCat>> = (2..=n).map(|i| build_category(&brauer_line(i), field).map(Arc::new)).collect::<Result<_>>()?;
    let xps: Vec<Arc<FinKCat>> = (2..=n).map(|i| build_category(&cycle_nakayama(i), field).map(Arc::new)).collect::<Result<_>>()?;
    let mut gens = Vec::new();
    let mut gens_p = Vec::new();
    for i in 2..n {
        let (s, t) = (&xs[i - 2], &xs[i - 1]);
        let qs = &s.quiver().unwrap().presentation;
        let qt = &t.quiver().unwrap().presentation;
        let images: Vec<Elem> = qs.arrows.iter().map(|a| elem_of(t, qt, a.source, &[&a.name])).collect();
        gens.push(Arc::new(functor_from_arrows(s.clone(), t.clone(), (0..i).collect(), &images)?));
        // X'(a_i): 1 ↦ 1, j ↦ j+1, g1 ↦ g2 g1, g_j ↦ g_{j+1}
        let (s, t) = (&xps[i - 2], &xps[i - 1]);
        let qt = &t.quiver().unwrap().presentation;
        let omap: Vec<usize> = (0..i).map(|v| if v == 0 { 0 } else { v + 1 }).collect();
        let mut images = vec![elem_of(t, qt, 0, &["g1", "g2"])];
        for j in 2..=i {
            images.push(elem_of(t, qt, omap[j - 1], &[&format!("g{}", j + 1)]));
        }
        gens_p.push(Arc::new(functor_from_arrows(s.clone(), t.clone(), omap, &images)?));
    }
    let x = Arc::new(ColaxFunctor::from_generators(idx.clone(), xs.clone(), &gens)?);
    let x_prime = Arc::new(ColaxFunctor::from_generators(idx.clone(), xps, &gens_p)?);
    let fibers: Vec<TiltingSubcategoryData> = (2..=n).map(|i| gluing_tilting(&xs[i - 2], i)).collect();
    // T(a): T_1 ↦ T_1, T_j ↦ T_{j+1}, composed along paths
    let object_maps: Vec<Vec<usize>> = (0..idx.n_morphisms())
        .map(|a| {
            let steps = idx.path_of(a).map_or(0, <[usize]>::len);
            let i = idx.source(a) + 2;
            (0..i).map(|u| if u == 0 { 0 } else { u + steps }).collect()
        })
        .collect();
    let cert = TiltingColaxCertificate::with_identity_rho(x.clone(), fibers.clone(), object_maps)?;
    let mut hints = Vec::new();
    let mut all_deltas = Vec::new();
    for (k, t) in fibers.iter().enumerate() {
        let i = k + 2;
        let ds = deltas(&xs[k], t, i);
        let e = end_category(t)?;
        let mut arrows = BTreeMap::new();
        for (j, d) in ds.iter().enumerate() {
            let (s, tt) = (j, (j + 1) % i);
            arrows.insert(format!("g{}", j + 1), e.coords(s, tt, d)?);
        }
        hints.push(PresentationHints { objects: None, arrows });
        all_deltas.push(ds);
    }
    Ok(GluingExample { n, x, x_prime, cert, hints, deltas: all_deltas })
}

/// `A = k(1→2)` and `A' = k(1←2)`.
pub fn desk_algebras(field: FieldSpec) -> (Arc<FinKCat>, Arc<FinKCat>) {
    let a = QuiverPresentation::new(names(&["1", "2"]), vec![arrow("x".into(), 0, 1)]);
    let b = QuiverPresentation::new(names(&["1", "2"]), vec![arrow("y".into(), 1, 0)]);
    (Arc::new(build_category(&a, field).unwrap()), Arc::new(build_category(&b, field).unwrap()))
}

/// `T_1 = (P_1 → P_2)` with `P_2` in degree 0, and `T_2 = P_2`.
pub fn desk_tilting(a: &Arc<FinKCat>) -> TiltingSubcategoryData {
    let q = &a.quiver().unwrap().presentation;
    let d = ProjMatrix::from_entries(a, &[0], &[1], vec![elem_of(a, q, 0, &["x"])]).unwrap();
    let t1 = ProjComplex::new(a.clone(), -1, vec![vec![0], vec![1]], vec![d]).unwrap();
    let t2 = ProjComplex::stalk(a.clone(), 1, 0);
    TiltingSubcategoryData::new(a.clone(), names(&["T1", "T2"]), vec![Arc::new(t1), Arc::new(t2)]).unwrap()
}

pub struct DeskInstance {
    pub name: &'static str,
    pub x: Arc<ColaxFunctor>,
    pub x_prime: Arc<ColaxFunctor>,
    pub cert: TiltingColaxCertificate,
    pub hints: Vec<PresentationHints>,
}

/// `Δ(A)` and `Δ(A')` over the free arrow, the 3-chain and `Z/2`.
pub fn desk_instances() -> Vec<DeskInstance> {
    let field = FieldSpec::rationals();
    let (a, ap) = desk_algebras(field);
    let t = desk_tilting(&a);
    [("path categories", free_arrow()), ("incidence categories", chain_poset(3)), ("monoid algebras", cyclic_monoid(2))]
        .into_iter()
        .map(|(name, idx)| {
            let x = Arc::new(diagonal(a.clone(), idx.clone()));
            let x_prime = Arc::new(diagonal(ap.clone(), idx.clone()));
            let fibers = vec![t.clone(); idx.n_objects()];
            let object_maps = vec![vec![0, 1]; idx.n_morphisms()];
            let cert = TiltingColaxCertificate::with_identity_rho(x.clone(), fibers, object_maps).expect("strict");
            DeskInstance { name, x, x_prime, cert, hints: vec![PresentationHints::default(); idx.n_objects()] }
        })
        .collect()
}

/// Small index categories with at most four morphisms.
pub fn small_indices() -> Vec<Arc<IndexCat>> {
    vec![
        Arc::new(IndexCat::trivial()),
        free_arrow(),
        cyclic_monoid(2),
        cyclic_monoid(3),
        double_arrow(),
    ]
}

fn random_quiver_category(field: FieldSpec, rng: &mut ChaCha8Rng) -> Arc<FinKCat> {
    loop {
        let n = rng.gen_range(1..=3);
        let mut arrows = Vec::new();
        for s in 0..n {
            for t in s + 1..n {
                for _ in 0..rng.gen_range(0..=1) {
                    arrows.push(arrow(format!("r{}", arrows.len()), s, t));
                }
            }
        }
        if n == 1 && rng.gen_bool(0.5) {
            // k[t]/t^2
            arrows.push(arrow("t".into(), 0, 0));
            let mut q = QuiverPresentation::new((0..n).map(|v| format!("v{v}")).collect(), arrows);
            q.relations = vec![vec![(q1(), vec![0, 0])]];
            return Arc::new(build_category(&q, field).unwrap());
        }
        let q = QuiverPresentation::new((0..n).map(|v| format!("v{v}")).collect(), arrows);
        if let Ok(c) = build_category(&q, field) {
            return Arc::new(c);
        }
    }
}

fn random_endofunctor(c: &Arc<FinKCat>, rng: &mut ChaCha8Rng) -> Arc<KFunctor> {
    let q = &c.quiver().unwrap().presentation;
    let field = c.field();
    // identity on objects, arrows rescaled (any rescaling respects monomial relations)
    let images: Vec<Elem> = q
        .arrows
        .iter()
        .map(|a| {
            let e = elem_of(c, q, a.source, &[&a.name]);
            let s = loop {
                let s = random_scalar(field, rng);
                if !s.is_zero() {
                    break s;
                }
            };
            e.iter().map(|v| v * &s).collect()
        })
        .collect();
    Arc::new(functor_from_arrows(c.clone(), c.clone(), (0..c.n_objects()).collect(), &images).unwrap())
}

fn random_unit(c: &FinKCat, x: usize, rng: &mut ChaCha8Rng) -> Elem {
    let field = c.field();
    let local = c.local_structure().expect("basic local");
    loop {
        let e: Elem = (0..c.dim(x, x)).map(|_| random_scalar(field, rng)).collect();
        if local.is_unit(c, x, &e) {
            return e;
        }
    }
}

/// `count` colax functors over F_5: strict functors with random fibers, twisted by random units.
pub fn random_corpus(count: usize) -> Vec<Arc<ColaxFunctor>> {
    let field = FieldSpec::prime(5).unwrap();
    let indices = small_indices();
    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        let mut rng = rng_for(format!("corpus:{k}").as_bytes());
        let idx = indices[k % indices.len()].clone();
        let c = random_quiver_category(field, &mut rng);
        let fibers = vec![c.clone(); idx.n_objects()];
        let strict = match idx.kind() {
            crate::index::IndexKind::Free { arrows } => {
                let gens: Vec<Arc<KFunctor>> = arrows.iter().map(|_| random_endofunctor(&c, &mut rng)).collect();
                ColaxFunctor::from_generators(idx.clone(), fibers, &gens).unwrap()
            }
            _ => diagonal(c.clone(), idx.clone()),
        };
        let u: Vec<Vec<Elem>> = (0..idx.n_morphisms())
            .map(|a| (0..c.n_objects()).map(|x| random_unit(&c, strict.arrow(a).obj(x), &mut rng)).collect())
            .collect();
        out.push(Arc::new(strict.twist(&u).unwrap()));
    }
    out
}

/// The identity left transformation, for completeness of the fixture set.
pub fn identity_of(x: &Arc<ColaxFunctor>) -> LeftTransformation {
    LeftTransformation::identity(x.clone())
}

/// Names accepted by [`document`]; `ex-8.6-<n>` works for any `n ≥ 2`.
pub const DOCUMENTS: &[&str] = &["ex-4.2-1", "ex-4.2-2", "ex-4.2-3", "ex-4.2-4", "ex-8.6-3", "diagonal-path", "diagonal-poset", "diagonal-monoid"];

/// Suffixes of the `diagonal-*` documents, in the order of [`desk_instances`].
pub const DIAGONAL_KINDS: [&str; 3] = ["path", "poset", "monoid"];

/// A fixture as a text document.
pub fn document(name: &str) -> Option<Result<Document>> {
    if let Some(k) = name.strip_prefix("ex-4.2-") {
        let k: usize = k.parse().ok()?;
        let field = FieldSpec::rationals();
        let (_, x) = gr_examples(field).into_iter().nth(k.checked_sub(1)?)?;
        let mut ex = Exporter::new(field);
        ex.category("k", x.fiber(0));
        ex.index("I", x.index());
        ex.colax("X", &x);
        return Some(Ok(ex.finish()));
    }
    if let Some(n) = name.strip_prefix("ex-8.6-") {
        let n: usize = n.parse().ok().filter(|&n| n >= 2)?;
        return Some(gluing_document(n));
    }
    if let Some(k) = name.strip_prefix("diagonal-") {
        let k = DIAGONAL_KINDS.iter().position(|s| *s == k)?;
        let d = desk_instances().into_iter().nth(k)?;
        let mut ex = Exporter::new(FieldSpec::rationals());
        ex.category("A", d.x.fiber(0));
        ex.category("Ap", d.x_prime.fiber(0));
        ex.index("I", d.x.index());
        ex.colax("X", &d.x);
        ex.colax("Xp", &d.x_prime);
        ex.tilting("T", &d.cert);
        return Some(ex.hints("H", "Xp", "T", &d.hints, d.x.index()).map(|_| ex.finish()));
    }
    None
}

fn gluing_document(n: usize) -> Result<Document> {
    let g = gluing_example(n)?;
    let mut ex = Exporter::new(FieldSpec::rationals());
    ex.index("I", g.x.index());
    ex.colax("X", &g.x);
    ex.colax("Xp", &g.x_prime);
    ex.tilting("T", &g.cert);
    let checked = check_tilting_colax(&g.cert, SearchCaps::default())?;
    if let Some(t) = &checked.tilting {
        for (i, row) in t.certificates.iter().enumerate() {
            for c in row.iter().filter(|c| c.depth() > 0) {
                let name = format!("{}:P{}", g.x.index().objects()[i], g.x.fiber(i).object_name(c.target));
                ex.certificate(&name, "T", &g.cert, i, c)?;
            }
        }
    }
    ex.hints("H", "Xp", "T", &g.hints, g.x.index())?;
    Ok(ex.finish())
}

/// Twenty complexes over the fibers of a gluing example: the tilting objects,
/// the projectives, shifted tilting objects and the cones of the `δ` maps.
pub fn complex_sample(g: &GluingExample) -> Vec<(usize, Arc<ProjComplex>)> {
    let mut out = Vec::new();
    for (i, t) in g.cert.fibers.iter().enumerate() {
        for u in t.objects() {
            out.push((i, u.clone()));
            out.push((i, Arc::new(u.shift(1))));
        }
        for x in 0..t.base().n_objects() {
            out.push((i, Arc::new(ProjComplex::stalk(t.base().clone(), x, 0))));
        }
        for d in &g.deltas[i] {
            out.push((i, Arc::new(crate::homotopy::cone(d).expect("degree-0 map"))));
        }
    }
    out
}
