//! From a tilting colax functor `T` for `X` and an equivalence `T ≃ X'`,
//! a certified tilting subcategory `T'` of `K^b(prj Gr(X))` with `End(T') ≃ Gr(X')`.

use std::sync::Arc;

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::colax::{check_equivalence, diagonal, functor_equivalence, ColaxFunctor, LeftTransformation};
use crate::error::{Error, Result};
use crate::fincat::{same_cat, Elem, KFunctor};
use crate::grothendieck::{canonical_morphism, check_covering, factor_through_gr, gr_on_1cell, grothendieck, GrCategory};
use crate::homotopy::{homotopy_equivalent, support_window, ChainMap, HomSpace, ProjComplex};
use crate::pseudo::{compose_1morphism, kb_prj, KbPrj};
use crate::report::Report;
use crate::tilting::{
    check_presilting, check_tilting_colax, complex_key, end_category, match_presentation, transport_certificate, PresentationHints,
    SearchCaps, TiltingColax, TiltingColaxCertificate, TiltingSubcategoryData,
};

/// One object of `T'`: the image of `U ∈ T(i)` under `K^b(prj P(i))`.
#[derive(Clone, Debug)]
pub struct TPrimeObject {
    pub fiber: usize,
    pub index: usize,
    pub complex: Arc<ProjComplex>,
    /// Position of the representative after deduplication, with maps
    /// `complex → rep` and `rep → complex` when they differ.
    pub rep: usize,
    pub to_rep: Option<(ChainMap, ChainMap)>,
}

#[derive(Clone, Debug)]
pub struct TPrime {
    pub objects: Vec<TPrimeObject>,
    /// Indices into `objects` of the representatives.
    pub reps: Vec<usize>,
    pub deduplicated: bool,
}

impl TPrime {
    pub fn names(&self, cert: &TiltingColaxCertificate) -> Vec<String> {
        let idx = cert.colax.index();
        self.reps
            .iter()
            .map(|&r| {
                let o = &self.objects[r];
                format!("{}:{}", idx.objects()[o.fiber], cert.fibers[o.fiber].names()[o.index])
            })
            .collect()
    }

    pub fn rep_complexes(&self) -> Vec<Arc<ProjComplex>> {
        self.reps.iter().map(|&r| self.objects[r].complex.clone()).collect()
    }
}

/// `T' = {K^b(prj P(i))(U) | i ∈ I, U ∈ T(i)}`, deduplicated up to homotopy
/// when `Gr(X)` is basic with local endomorphism rings.
pub fn build_t_prime(gr: &GrCategory, cert: &TiltingColaxCertificate) -> Result<TPrime> {
    let p = canonical_morphism(gr)?;
    let mut objects: Vec<TPrimeObject> = Vec::new();
    for (i, t) in cert.fibers.iter().enumerate() {
        for (u, obj) in t.objects().iter().enumerate() {
            let complex = Arc::new(obj.map_functor(p.functor(i))?);
            objects.push(TPrimeObject { fiber: i, index: u, complex, rep: 0, to_rep: None });
        }
    }
    let local = gr.cat().local_structure().is_some();
    let mut reps: Vec<usize> = Vec::new();
    for k in 0..objects.len() {
        let mut hit = None;
        if local {
            for (pos, &r) in reps.iter().enumerate() {
                if let Some(e) = homotopy_equivalent(&objects[k].complex, &objects[r].complex)? {
                    hit = Some((pos, e));
                    break;
                }
            }
        }
        match hit {
            Some((pos, e)) => {
                objects[k].rep = pos;
                objects[k].to_rep = Some((e.forward, e.backward));
            }
            None => {
                objects[k].rep = reps.len();
                reps.push(k);
            }
        }
    }
    Ok(TPrime { objects, reps, deduplicated: local })
}

fn window_union(a: Option<(i64, i64)>, b: Option<(i64, i64)>) -> Option<(i64, i64)> {
    match (a, b) {
        (Some((l1, h1)), Some((l2, h2))) => Some((l1.min(l2), h1.max(h2))),
        (x, None) | (None, x) => x,
    }
}

/// Orthogonality of `T'` by two routes with cross-validation, and generation by
/// certificate transport.
pub fn verify_t_prime_tilting(
    gr: &GrCategory,
    tp: &TPrime,
    cert: &TiltingColaxCertificate,
    tilting: Option<&TiltingColax>,
) -> Result<Report> {
    let x = &cert.colax;
    let idx = x.index();
    let vx = kb_prj(x.clone())?;
    let mut report = Report::new("T' tilting");
    let mut r1 = Report::new("orthogonality over Gr(X)");
    let mut r2 = Report::new("orthogonality through the fibers");
    let objs = &tp.objects;
    let pairs: Vec<(usize, usize)> = (0..objs.len()).flat_map(|p| (0..objs.len()).map(move |q| (p, q))).collect();
    struct PairOut {
        rows: Vec<(i64, usize, usize, Option<usize>)>,
        rho_missing: Vec<String>,
    }
    let outs: Vec<PairOut> = pairs
        .par_iter()
        .map(|&(p, q)| {
            let (op, oq) = (&objs[p], &objs[q]);
            let (i, j) = (op.fiber, oq.fiber);
            let su = &cert.fibers[i].objects()[op.index];
            let sv = &cert.fibers[j].objects()[oq.index];
            let homs = idx.hom(i, j);
            let xa: Vec<Arc<ProjComplex>> = homs.iter().map(|&a| vx.arrow_obj(a, su)).collect::<Result<_>>()?;
            let mut w = support_window(&op.complex, &oq.complex);
            for au in &xa {
                w = window_union(w, support_window(au, sv));
            }
            let mut rows = Vec::new();
            let mut rho_missing = Vec::new();
            let Some((lo, hi)) = w else { return Ok(PairOut { rows, rho_missing }) };
            // ρ(a)_U must be invertible for the transported route
            let mut transported_ok = true;
            for &a in &homs {
                if crate::homotopy::inverse_in_k(&cert.rho[a][op.index])?.is_none() {
                    transported_ok = false;
                    rho_missing.push(format!("rho({}) at {}", idx.morphism(a).name, cert.fibers[i].names()[op.index]));
                }
            }
            for n in lo..=hi {
                let d1 = HomSpace::new(&op.complex, &oq.complex, n)?.dim();
                let mut d_split = 0;
                let mut d_rho = 0;
                for (&a, au) in homs.iter().zip(&xa) {
                    d_split += HomSpace::new(au, sv, n)?.dim();
                    let tu = &cert.fibers[j].objects()[cert.object_maps[a][op.index]];
                    d_rho += HomSpace::new(tu, sv, n)?.dim();
                }
                rows.push((n, d1, d_split, transported_ok.then_some(d_rho)));
            }
            Ok(PairOut { rows, rho_missing })
        })
        .collect::<Result<_>>()?;
    let name = |o: &TPrimeObject| format!("{}:{}", idx.objects()[o.fiber], cert.fibers[o.fiber].names()[o.index]);
    let mut instances = 0usize;
    for (&(p, q), out) in pairs.iter().zip(&outs) {
        for m in &out.rho_missing {
            r2.fail(format!("{m} is not invertible; cannot transport Hom({}, {})", name(&objs[p]), name(&objs[q])));
        }
        for &(n, d1, d_split, d_rho) in &out.rows {
            instances += 1;
            if d1 != d_split {
                return Err(Error::CrossValidationMismatch(format!(
                    "Hom({}, {}[{n}]): {d1} over Gr(X) but {d_split} through the fibers",
                    name(&objs[p]),
                    name(&objs[q])
                )));
            }
            if n != 0 && d1 != 0 {
                r1.fail(format!("Hom({}, {}[{n}]) has dimension {d1}", name(&objs[p]), name(&objs[q])));
            }
            if let Some(d) = d_rho {
                if d != d1 {
                    r2.fail(format!(
                        "routes diverge at Hom({}, {}[{n}]): {d1} directly, {d} through rho",
                        name(&objs[p]),
                        name(&objs[q])
                    ));
                } else if n != 0 && d != 0 {
                    r2.fail(format!("Hom({}, {}[{n}]) has dimension {d} through rho", name(&objs[p]), name(&objs[q])));
                }
            }
        }
    }
    r1.value("instances", instances);
    report.child(r1);
    report.child(r2);

    let mut g = Report::new("generation over Gr(X)");
    match tilting {
        None => g.fail("fiber certificates are unavailable"),
        Some(tc) => {
            let p = canonical_morphism(gr)?;
            for (i, t) in cert.fibers.iter().enumerate() {
                let images: Vec<Arc<ProjComplex>> =
                    objs.iter().filter(|o| o.fiber == i).map(|o| o.complex.clone()).collect();
                for c in &tc.certificates[i] {
                    let r = transport_certificate(c, t, p.functor(i), &images)?;
                    if !r.passed() {
                        g.fail(format!(
                            "representable {}:{} is not certified: {}",
                            idx.objects()[i],
                            x.fiber(i).object_name(c.target),
                            r.first_failure().unwrap_or_default()
                        ));
                    }
                }
            }
            g.value("representables", gr.cat().n_objects());
        }
    }
    report.child(g);
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Certified,
    /// Names the first uncertified clause.
    PartiallyCertified(String),
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Certified => write!(f, "certified"),
            Verdict::PartiallyCertified(c) => write!(f, "partially-certified ({c})"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct GluingReport {
    pub digest: String,
    pub report: Report,
    pub verdict: Verdict,
    pub t_prime: Option<TPrime>,
    pub end_dim: Option<usize>,
    pub gr_dim: usize,
    pub gr_prime_dim: usize,
}

/// How the equivalence between `T` and `X'` is supplied, once `T` is known.
pub enum EquivalenceSource<'a> {
    /// `F(i): X'(i) → T(i)` matched from the presentation of `X'(i)`, with `ψ = id`.
    Hints(Vec<PresentationHints>),
    /// Any construction, in either direction.
    Custom(Box<dyn Fn(&Arc<ColaxFunctor>) -> Result<LeftTransformation> + 'a>),
}

/// Matches each `X'(i)` against `End(T(i))` and assembles `(F, id): X' → T`.
pub fn equivalence_from_hints(x_prime: &Arc<ColaxFunctor>, t: &TiltingColax, hints: &[PresentationHints]) -> Result<(LeftTransformation, Report)> {
    let idx = x_prime.index();
    let mut r = Report::new("presentations of T(i)");
    let mut functors = Vec::with_capacity(idx.n_objects());
    for i in 0..idx.n_objects() {
        let c = x_prime.fiber(i);
        let p = &c.quiver().ok_or_else(|| Error::Invalid(format!("X'({}) has no presentation", idx.objects()[i])))?.presentation;
        let m = match_presentation(t.ends[i].cat(), p, hints.get(i).unwrap_or(&PresentationHints::default()))?;
        let mut child = m.report;
        child.title = format!("fiber {}", idx.objects()[i]);
        r.child(child);
        let f = m.functor.ok_or_else(|| Error::Invalid(format!("no isomorphism onto End(T({}))", idx.objects()[i])))?;
        // rebuild over the exact fiber object so that sources agree
        let f = KFunctor::from_images(c.clone(), t.ends[i].cat().clone(), f.object_map().to_vec(), |s, u, k| f.hom_map(s, u).col(k))?;
        functors.push(Arc::new(f));
    }
    let lt = LeftTransformation::with_identity_psi(x_prime.clone(), t.functor.clone(), functors)?;
    Ok((lt, r))
}

fn digest(cert: &TiltingColaxCertificate, x_prime: &ColaxFunctor) -> String {
    let mut h = Sha256::new();
    let mut feed = |x: &ColaxFunctor| {
        h.update(format!("{:?}", x.index().objects()));
        for c in x.fibers() {
            h.update(format!("{:?}{:?}", c.objects(), c.dim_table()));
        }
        for a in 0..x.index().n_morphisms() {
            let f = x.arrow(a);
            h.update(format!("{:?}", f.object_map()));
        }
    };
    feed(&cert.colax);
    feed(x_prime);
    for t in &cert.fibers {
        for (n, u) in t.names().iter().zip(t.objects()) {
            h.update(format!("{n}={}", complex_key(u)));
        }
    }
    hex::encode(h.finalize())[..16].to_string()
}

/// The inclusion `T → Δ(End(T'))` induced by `K^b(prj (P, φ))` and ρ.
fn restriction_to_t(
    gr: &GrCategory,
    tp: &TPrime,
    cert: &TiltingColaxCertificate,
    t: &TiltingColax,
    e: &crate::tilting::EndCategory,
) -> Result<LeftTransformation> {
    let idx = cert.colax.index().clone();
    let p = Arc::new(canonical_morphism(gr)?);
    let vp = compose_1morphism(Arc::new(KbPrj), p.clone());
    let pos = |i: usize, u: usize| tp.objects.iter().position(|o| o.fiber == i && o.index == u).expect("every object has an image");
    let ecat = e.cat().clone();
    // maps into and out of representatives
    let to_rep = |k: usize, f: ChainMap| -> Result<ChainMap> {
        match &tp.objects[k].to_rep {
            None => Ok(f),
            Some((fw, _)) => ChainMap::compose(fw, &f.retarget(f.source().clone(), fw.source().clone())?),
        }
    };
    let from_rep = |k: usize, f: ChainMap| -> Result<ChainMap> {
        match &tp.objects[k].to_rep {
            None => Ok(f),
            Some((_, bw)) => ChainMap::compose(&f.retarget(bw.target().clone(), f.target().clone())?, bw),
        }
    };
    let mut functors = Vec::with_capacity(idx.n_objects());
    for i in 0..idx.n_objects() {
        let ti = &t.ends[i];
        let n = ti.objects().len();
        let omap: Vec<usize> = (0..n).map(|u| tp.objects[pos(i, u)].rep).collect();
        let mut table = std::collections::HashMap::new();
        for s in 0..n {
            for u in 0..n {
                let mut v = Vec::new();
                for b in ti.hom(s, u).basis() {
                    let m = b.map_functor(p.functor(i))?;
                    let m = m.retarget(tp.objects[pos(i, s)].complex.clone(), tp.objects[pos(i, u)].complex.clone())?;
                    let m = from_rep(pos(i, s), to_rep(pos(i, u), m)?)?;
                    v.push(e.coords(omap[s], omap[u], &m)?);
                }
                table.insert((s, u), v);
            }
        }
        let f = KFunctor::from_images(ti.cat().clone(), ecat.clone(), omap, |s, u, k| table[&(s, u)][k].clone())?;
        functors.push(Arc::new(f));
    }
    let target = Arc::new(diagonal(ecat.clone(), idx.clone()));
    let mut psi: Vec<Vec<Elem>> = Vec::with_capacity(idx.n_morphisms());
    for a in 0..idx.n_morphisms() {
        let (i, j) = (idx.source(a), idx.target(a));
        let mut row = Vec::new();
        for (u, su) in cert.fibers[i].objects().iter().enumerate() {
            // P(j)(ρ(a)_U) ∘ φ(a)_{σU}
            let phi = vp.psi(a, su)?;
            let r = cert.rho[a][u].map_functor(p.functor(j))?;
            let phi = phi.retarget(tp.objects[pos(i, u)].complex.clone(), r.source().clone())?;
            let tu = cert.object_maps[a][u];
            let m = ChainMap::compose(&r, &phi)?.retarget(tp.objects[pos(i, u)].complex.clone(), tp.objects[pos(j, tu)].complex.clone())?;
            let m = from_rep(pos(i, u), to_rep(pos(j, tu), m)?)?;
            row.push(e.coords(tp.objects[pos(i, u)].rep, tp.objects[pos(j, tu)].rep, &m)?);
        }
        psi.push(row);
    }
    LeftTransformation::new(t.functor.clone(), target, functors, psi)
}

fn equivalence_report(title: &str, f: &KFunctor) -> Report {
    let mut r = Report::new(title);
    if let Err(e) = functor_equivalence(f) {
        r.fail(e);
    }
    r
}

/// The full pipeline; the verdict is the conjunction of every clause.
pub fn glue(x_prime: &Arc<ColaxFunctor>, cert: &TiltingColaxCertificate, equivalence: &EquivalenceSource, caps: SearchCaps) -> Result<GluingReport> {
    let x = &cert.colax;
    let mut report = Report::new("gluing");
    report.note("k-flatness holds automatically over a field");
    let dig = digest(cert, x_prime);
    report.value("digest", &dig);
    let gr = grothendieck(x)?;
    let grp = grothendieck(x_prime)?;
    let (gr_dim, gr_prime_dim) = (gr.cat().total_dim(), grp.cat().total_dim());
    report.value("gr_x_objects", gr.cat().n_objects());
    report.value("gr_x_dim", gr_dim);
    report.value("gr_x_prime_objects", grp.cat().n_objects());
    report.value("gr_x_prime_dim", gr_prime_dim);

    let tc = check_tilting_colax(cert, caps)?;
    report.child(tc.report.clone());

    let tp = build_t_prime(&gr, cert)?;
    let mut tr = Report::new("T'");
    tr.value("objects", tp.objects.len());
    tr.value("after_dedup", tp.reps.len());
    if !tp.deduplicated {
        tr.note("Gr(X) is not basic with local endomorphism rings; deduplication skipped");
    }
    if tp.objects.is_empty() {
        tr.fail("T' is empty");
    }
    tr.value("names", tp.names(cert).join(", "));
    report.child(tr);
    report.child(verify_t_prime_tilting(&gr, &tp, cert, tc.tilting.as_ref())?);

    let mut end_dim = None;
    if let Some(t) = &tc.tilting {
        let gr_cat = gr.cat().clone();
        let reps = TiltingSubcategoryData::new(gr_cat, tp.names(cert), tp.rep_complexes())?;
        report.child(check_presilting(&reps)?);
        let e = end_category(&reps)?;
        end_dim = Some(e.cat().total_dim());
        let mut er = Report::new("End(T') and Gr(T)");
        er.value("end_dim", e.cat().total_dim());
        let grt = grothendieck(&t.functor)?;
        er.value("gr_t_dim", grt.cat().total_dim());
        let f = restriction_to_t(&gr, &tp, cert, t, &e)?;
        let fc = f.check();
        if !fc.passed() {
            er.fail(format!("restricted transformation: {}", fc.first_failure().unwrap_or_default()));
        } else {
            let cov = check_covering(&f)?;
            er.child(cov);
            let h = factor_through_gr(&f, &grt)?;
            er.child(equivalence_report("H: Gr(T) -> End(T')", &h));
        }
        report.child(er);

        let mut qr = Report::new("Gr(T) and Gr(X')");
        let built = match equivalence {
            EquivalenceSource::Hints(h) => equivalence_from_hints(x_prime, t, h).map(|(lt, r)| {
                qr.child(r);
                lt
            }),
            EquivalenceSource::Custom(f) => f(&t.functor),
        };
        match built {
            Err(err) => qr.fail(format!("no equivalence between T and X': {err}")),
            Ok(lt) => {
                let ce = check_equivalence(&lt);
                qr.child(ce);
                let forward = same_cat_colax(lt.source(), x_prime);
                let (src, tgt) = if forward { (&grp, &grt) } else { (&grt, &grp) };
                let g = gr_on_1cell(&lt, src, tgt)?;
                qr.child(equivalence_report("Gr of the equivalence", &g));
            }
        }
        report.child(qr);
        let mut dr = Report::new("dimension check");
        if e.cat().total_dim() != gr_prime_dim {
            dr.fail(format!("dim End(T') = {} but dim Gr(X') = {gr_prime_dim}", e.cat().total_dim()));
        }
        report.child(dr);
    }

    let verdict = match first_failed_clause(&report) {
        None => Verdict::Certified,
        Some(c) => Verdict::PartiallyCertified(c),
    };
    report.value("verdict", &verdict);
    Ok(GluingReport { digest: dig, report, verdict, t_prime: Some(tp), end_dim, gr_dim, gr_prime_dim })
}

fn same_cat_colax(a: &ColaxFunctor, b: &ColaxFunctor) -> bool {
    a.fibers().len() == b.fibers().len() && a.fibers().iter().zip(b.fibers()).all(|(p, q)| same_cat(p, q))
}

fn first_failed_clause(r: &Report) -> Option<String> {
    if !r.failures.is_empty() {
        return Some(r.title.clone());
    }
    r.children.iter().find_map(first_failed_clause)
}
