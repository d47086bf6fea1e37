//! The Grothendieck construction of a colax functor, its action on 1- and
//! 2-cells, the canonical morphism, coverings and the adjunction with Δ.

use std::sync::Arc;

use crate::colax::{compose_left_transformations, diagonal, diagonal_functor, ColaxFunctor, LeftTransformation, TwoMorphism};
use crate::error::{Error, Result};
use crate::field::Matrix;
use crate::fincat::{same_cat, Elem, FinKCat, KFunctor, NatTransf};
use crate::local::find_iso;
use crate::report::Report;

/// `Gr(X)` with objects tagged `(i, x)` and Hom bases tagged `(a, k)`.
#[derive(Clone, Debug)]
pub struct GrCategory {
    colax: Arc<ColaxFunctor>,
    cat: Arc<FinKCat>,
    objects: Vec<(usize, usize)>,
    offsets: Vec<usize>,
    // per pair s*n + t: one (a, start, len) per a ∈ I(i, j)
    blocks: Vec<Vec<(usize, usize, usize)>>,
}

impl GrCategory {
    pub fn colax(&self) -> &Arc<ColaxFunctor> {
        &self.colax
    }

    pub fn cat(&self) -> &Arc<FinKCat> {
        &self.cat
    }

    /// The object `ᵢx`.
    pub fn object(&self, i: usize, x: usize) -> usize {
        self.offsets[i] + x
    }

    pub fn tag(&self, o: usize) -> (usize, usize) {
        self.objects[o]
    }

    pub fn blocks(&self, s: usize, t: usize) -> &[(usize, usize, usize)] {
        &self.blocks[s * self.objects.len() + t]
    }

    /// Position of the `a` summand in `Hom(s, t)`.
    pub fn block(&self, s: usize, t: usize, a: usize) -> Option<(usize, usize)> {
        self.blocks(s, t).iter().find(|b| b.0 == a).map(|b| (b.1, b.2))
    }

    /// Places `f ∈ X(j)(X(a)x, y)` into the `a` summand of `Hom(ᵢx, ⱼy)`.
    pub fn embed(&self, s: usize, t: usize, a: usize, f: &[crate::field::Scalar]) -> Elem {
        let mut e = self.cat.zero(s, t);
        let (start, len) = self.block(s, t, a).expect("a lies in I(i, j)");
        assert_eq!(len, f.len());
        e[start..start + len].clone_from_slice(f);
        e
    }

    /// The `a` component of `f ∈ Hom(ᵢx, ⱼy)`.
    pub fn component(&self, s: usize, t: usize, a: usize, f: &[crate::field::Scalar]) -> Elem {
        let (start, len) = self.block(s, t, a).expect("a lies in I(i, j)");
        f[start..start + len].to_vec()
    }
}

/// Builds `Gr(X)`; fails if `X` violates the colax axioms.
pub fn grothendieck(x: &Arc<ColaxFunctor>) -> Result<GrCategory> {
    let r = crate::colax::check_colax(x);
    if !r.passed() {
        return Err(Error::Invalid(format!("not a colax functor: {}", r.first_failure().unwrap())));
    }
    let idx = x.index();
    let field = x.fiber(0).field();
    let mut objects = Vec::new();
    let mut offsets = Vec::new();
    let mut names = Vec::new();
    for i in 0..idx.n_objects() {
        offsets.push(objects.len());
        for o in 0..x.fiber(i).n_objects() {
            objects.push((i, o));
            names.push(format!("{}:{}", idx.objects()[i], x.fiber(i).object_name(o)));
        }
    }
    let n = objects.len();
    let mut blocks = Vec::with_capacity(n * n);
    let mut labels = Vec::with_capacity(n * n);
    // per pair, the (a, k) tag of every basis index
    let mut tags: Vec<Vec<(usize, usize)>> = Vec::with_capacity(n * n);
    for s in 0..n {
        let (i, xo) = objects[s];
        for t in 0..n {
            let (j, yo) = objects[t];
            let mut bl = Vec::new();
            let mut lab = Vec::new();
            let mut tg = Vec::new();
            let mut start = 0;
            for a in idx.hom(i, j) {
                let fa = x.arrow(a).obj(xo);
                let d = x.fiber(j).dim(fa, yo);
                bl.push((a, start, d));
                for (k, l) in x.fiber(j).labels(fa, yo).iter().enumerate() {
                    lab.push(format!("{}|{}", idx.morphism(a).name, l));
                    tg.push((a, k));
                }
                start += d;
            }
            blocks.push(bl);
            labels.push(lab);
            tags.push(tg);
        }
    }
    let identities: Vec<Elem> = (0..n)
        .map(|s| {
            let (i, xo) = objects[s];
            let mut e = vec![field.zero(); labels[s * n + s].len()];
            let id = idx.id(i);
            let (_, start, len) = *blocks[s * n + s].iter().find(|b| b.0 == id).unwrap();
            e[start..start + len].clone_from_slice(x.eta(i, xo));
            e
        })
        .collect();
    let cat = FinKCat::from_tables(field, names, labels, identities, |s, t, u, g, f| {
        let (_, xo) = objects[s];
        let (j, yo) = objects[t];
        let (k, zo) = objects[u];
        let (a, fk) = tags[s * n + t][f];
        let (b, gl) = tags[t * n + u][g];
        let c = idx.compose(b, a).expect("composable");
        let (cj, ck) = (x.fiber(j), x.fiber(k));
        let ax = x.arrow(a).obj(xo);
        let bax = x.arrow(b).obj(ax);
        let by = x.arrow(b).obj(yo);
        let cx = x.arrow(c).obj(xo);
        // g_b ∘ X(b)f_a ∘ θ_{b,a}x
        let xbf = x.arrow(b).map(ax, yo, &cj.basis_elem(ax, yo, fk));
        let e = ck.compose(cx, bax, by, &xbf, x.theta(b, a, xo));
        let e = ck.compose(cx, by, zo, &ck.basis_elem(by, zo, gl), &e);
        let mut out = vec![field.zero(); tags[s * n + u].len()];
        let (_, start, len) = *blocks[s * n + u].iter().find(|bl| bl.0 == c).unwrap();
        debug_assert_eq!(len, e.len());
        out[start..start + len].clone_from_slice(&e);
        out
    })?;
    Ok(GrCategory { colax: x.clone(), cat: Arc::new(cat), objects, offsets, blocks })
}

/// `Gr(F, ψ)`, sending `(f_a)` to `(F(j)f_a ∘ ψ(a)x)`.
pub fn gr_on_1cell(f: &LeftTransformation, src: &GrCategory, tgt: &GrCategory) -> Result<KFunctor> {
    if *src.colax != **f.source() || *tgt.colax != **f.target() {
        return Err(Error::SourceTargetMismatch("Grothendieck constructions do not match the transformation".into()));
    }
    let x = f.source();
    let xp = f.target();
    let n = src.objects.len();
    let object_map: Vec<usize> = src.objects.iter().map(|&(i, o)| tgt.object(i, f.functor(i).obj(o))).collect();
    KFunctor::from_images(src.cat.clone(), tgt.cat.clone(), object_map.clone(), |s, t, k| {
        let (i, xo) = src.objects[s];
        let (j, yo) = src.objects[t];
        let (a, start, _) = *src.blocks[s * n + t].iter().find(|b| b.1 <= k && k < b.1 + b.2).unwrap();
        let ax = x.arrow(a).obj(xo);
        let e = x.fiber(j).basis_elem(ax, yo, k - start);
        let fe = f.functor(j).map(ax, yo, &e);
        let fx = f.functor(i).obj(xo);
        let v = xp.fiber(j).compose(xp.arrow(a).obj(fx), f.functor(j).obj(ax), f.functor(j).obj(yo), &fe, f.psi(a, xo));
        tgt.embed(object_map[s], object_map[t], a, &v)
    })
}

/// `Gr(ζ)`, with component `ζ(i)x ∘ η'_i(F(i)x)` in the identity summand.
pub fn gr_on_2cell(z: &TwoMorphism, src: &GrCategory, tgt: &GrCategory) -> Result<NatTransf> {
    let gf = Arc::new(gr_on_1cell(z.source(), src, tgt)?);
    let gg = Arc::new(gr_on_1cell(z.target(), src, tgt)?);
    let xp = z.source().target();
    let idx = xp.index();
    let comps = src
        .objects
        .iter()
        .map(|&(i, o)| {
            let fx = z.source().functor(i).obj(o);
            let gx = z.target().functor(i).obj(o);
            let c = xp.fiber(i);
            let id = idx.id(i);
            let e = c.compose(xp.arrow(id).obj(fx), fx, gx, z.zeta(i, o), xp.eta(i, fx));
            tgt.embed(tgt.object(i, fx), tgt.object(i, gx), id, &e)
        })
        .collect();
    NatTransf::new(gf, gg, comps)
}

/// The canonical morphism `(P, φ): X → Δ(Gr(X))`.
pub fn canonical_morphism(gr: &GrCategory) -> Result<LeftTransformation> {
    let x = gr.colax.clone();
    let idx = x.index().clone();
    let target = Arc::new(diagonal(gr.cat.clone(), idx.clone()));
    let mut functors = Vec::with_capacity(idx.n_objects());
    for i in 0..idx.n_objects() {
        let c = x.fiber(i).clone();
        let id = idx.id(i);
        let om: Vec<usize> = (0..c.n_objects()).map(|o| gr.object(i, o)).collect();
        let f = KFunctor::from_images(c.clone(), gr.cat.clone(), om.clone(), |u, v, k| {
            let e = c.compose(x.arrow(id).obj(u), u, v, &c.basis_elem(u, v, k), x.eta(i, u));
            gr.embed(om[u], om[v], id, &e)
        })?;
        functors.push(Arc::new(f));
    }
    let psi = (0..idx.n_morphisms())
        .map(|a| {
            let (i, j) = (idx.source(a), idx.target(a));
            (0..x.fiber(i).n_objects())
                .map(|o| {
                    let ax = x.arrow(a).obj(o);
                    gr.embed(gr.object(i, o), gr.object(j, ax), a, x.fiber(j).identity(ax))
                })
                .collect()
        })
        .collect();
    LeftTransformation::new(x, target, functors, psi)
}

/// The category `C` when `X = Δ(C)`.
pub fn diagonal_base(x: &ColaxFunctor) -> Option<Arc<FinKCat>> {
    let c = x.fiber(0).clone();
    let idx = x.index();
    let ok = (0..idx.n_objects()).all(|i| same_cat(x.fiber(i), &c))
        && (0..idx.n_morphisms()).all(|a| x.arrow(a).is_identity())
        && x.is_strict();
    ok.then_some(c)
}

/// The map `(F, ψ)⁽¹⁾_{x,y}` for one pair of objects.
#[derive(Clone, Debug)]
pub struct PrecoveringMap {
    /// `(a, k)`: the k-th basis element of `X(j)(X(a)x, y)`.
    pub domain: Vec<(usize, usize)>,
    pub matrix: Matrix,
}

pub fn precovering_map(f: &LeftTransformation, i: usize, x: usize, j: usize, y: usize) -> Result<PrecoveringMap> {
    let c = diagonal_base(f.target()).ok_or(Error::NotDiagonalTarget)?;
    let xs = f.source();
    let idx = xs.index();
    let (fi, fj) = (f.functor(i), f.functor(j));
    let mut domain = Vec::new();
    let mut cols = Vec::new();
    for a in idx.hom(i, j) {
        let ax = xs.arrow(a).obj(x);
        for k in 0..xs.fiber(j).dim(ax, y) {
            let e = fj.map(ax, y, &xs.fiber(j).basis_elem(ax, y, k));
            cols.push(c.compose(fi.obj(x), fj.obj(ax), fj.obj(y), &e, f.psi(a, x)));
            domain.push((a, k));
        }
    }
    let matrix = Matrix::from_columns(c.field(), c.dim(fi.obj(x), fj.obj(y)), &cols);
    Ok(PrecoveringMap { domain, matrix })
}

/// Precovering (all `(F,ψ)⁽¹⁾` invertible) and density.
pub fn check_covering(f: &LeftTransformation) -> Result<Report> {
    let c = diagonal_base(f.target()).ok_or(Error::NotDiagonalTarget)?;
    let xs = f.source();
    let idx = xs.index();
    let mut r = Report::new("covering");
    let mut pre = true;
    'outer: for i in 0..idx.n_objects() {
        for j in 0..idx.n_objects() {
            for x in 0..xs.fiber(i).n_objects() {
                for y in 0..xs.fiber(j).n_objects() {
                    let m = precovering_map(f, i, x, j, y)?.matrix;
                    if m.rows() != m.cols() || m.rank() != m.cols() {
                        r.fail(format!(
                            "(F,psi)^(1) is not invertible at ({}:{}, {}:{})",
                            idx.objects()[i],
                            xs.fiber(i).object_name(x),
                            idx.objects()[j],
                            xs.fiber(j).object_name(y)
                        ));
                        pre = false;
                        break 'outer;
                    }
                }
            }
        }
    }
    r.value("precovering", pre);
    let mut dense = true;
    for cobj in 0..c.n_objects() {
        let hit = (0..idx.n_objects())
            .any(|i| (0..xs.fiber(i).n_objects()).any(|x| find_iso(&c, f.functor(i).obj(x), cobj).is_some()));
        if !hit {
            r.fail(format!("{} is not in the image up to isomorphism", c.object_name(cobj)));
            dense = false;
            break;
        }
    }
    r.value("dense", dense);
    Ok(r)
}

/// `Q_C: Gr(Δ(C)) → C`, `(f_a) ↦ Σ f_a`.
pub fn counit_on(gr: &GrCategory) -> Result<KFunctor> {
    let c = diagonal_base(&gr.colax).ok_or(Error::NotDiagonalTarget)?;
    let n = gr.objects.len();
    let om: Vec<usize> = gr.objects.iter().map(|&(_, x)| x).collect();
    KFunctor::from_images(gr.cat.clone(), c.clone(), om.clone(), |s, t, k| {
        let (_, start, _) = *gr.blocks[s * n + t].iter().find(|b| b.1 <= k && k < b.1 + b.2).unwrap();
        c.basis_elem(om[s], om[t], k - start)
    })
}

pub fn counit(c: Arc<FinKCat>, index: Arc<crate::index::IndexCat>) -> Result<(GrCategory, KFunctor)> {
    let gr = grothendieck(&Arc::new(diagonal(c, index)))?;
    let q = counit_on(&gr)?;
    Ok((gr, q))
}

/// Both triangle identities as strict equalities of data.
pub fn verify_adjunction(x: &Arc<ColaxFunctor>, c: &Arc<FinKCat>) -> Result<Report> {
    let mut r = Report::new("adjunction");
    let idx = x.index().clone();
    // Δ(Q_C) ∘ (P, φ)_{Δ(C)} = id
    let dc = Arc::new(diagonal(c.clone(), idx.clone()));
    let gr_dc = grothendieck(&dc)?;
    let p_dc = canonical_morphism(&gr_dc)?;
    let q = counit_on(&gr_dc)?;
    let dq = diagonal_functor(&q, idx.clone());
    let claim1 = compose_left_transformations(&dq, &p_dc)?;
    let ok1 = claim1 == LeftTransformation::identity(dc.clone());
    r.value("claim1", ok1);
    if !ok1 {
        r.fail("Delta(Q_C) composed with the canonical morphism of Delta(C) is not the identity");
    }
    // Q_{Gr(X)} ∘ Gr(P_X, φ_X) = id
    let gx = grothendieck(x)?;
    let px = canonical_morphism(&gx)?;
    let gr_target = grothendieck(px.target())?;
    let grp = gr_on_1cell(&px, &gx, &gr_target)?;
    let qg = counit_on(&gr_target)?;
    let comp = crate::fincat::compose_functors(&qg, &grp)?;
    let ok2 = comp == KFunctor::identity(gx.cat.clone());
    r.value("claim2", ok2);
    if !ok2 {
        r.fail("Q_Gr(X) composed with Gr(P, phi) is not the identity of Gr(X)");
    }
    Ok(r)
}

/// The functor `H: Gr(X) → C` with `Δ(H)∘(P, φ) = (F, ψ)`.
pub fn factor_through_gr(f: &LeftTransformation, gr: &GrCategory) -> Result<KFunctor> {
    let c = diagonal_base(f.target()).ok_or(Error::NotDiagonalTarget)?;
    if *gr.colax != **f.source() {
        return Err(Error::SourceTargetMismatch("Grothendieck construction of a different colax functor".into()));
    }
    let xs = f.source();
    let n = gr.objects.len();
    let om: Vec<usize> = gr.objects.iter().map(|&(i, o)| f.functor(i).obj(o)).collect();
    KFunctor::from_images(gr.cat.clone(), c.clone(), om.clone(), |s, t, k| {
        let (_, xo) = gr.objects[s];
        let (j, yo) = gr.objects[t];
        let (a, start, _) = *gr.blocks[s * n + t].iter().find(|b| b.1 <= k && k < b.1 + b.2).unwrap();
        let ax = xs.arrow(a).obj(xo);
        let e = f.functor(j).map(ax, yo, &xs.fiber(j).basis_elem(ax, yo, k - start));
        c.compose(om[s], f.functor(j).obj(ax), om[t], &e, f.psi(a, xo))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;
    use crate::index::IndexCat;
    use crate::quiver::{build_category, QuiverPresentation};

    fn k(field: FieldSpec) -> Arc<FinKCat> {
        Arc::new(build_category(&QuiverPresentation::new(vec!["*".into()], vec![]), field).unwrap())
    }

    fn one_arrow() -> Arc<IndexCat> {
        Arc::new(IndexCat::free_on_acyclic_quiver(vec!["1".into(), "2".into()], vec![("a".into(), 0, 1)]).unwrap())
    }

    #[test]
    fn triangular_algebra() {
        let x = Arc::new(diagonal(k(FieldSpec::rationals()), one_arrow()));
        let gr = grothendieck(&x).unwrap();
        let c = gr.cat();
        assert!(c.check_axioms().passed());
        assert_eq!(c.dim_table(), vec![vec![1, 1], vec![0, 1]]);
    }

    #[test]
    fn canonical_morphism_is_identity_on_homs() {
        let x = Arc::new(diagonal(k(FieldSpec::rationals()), one_arrow()));
        let gr = grothendieck(&x).unwrap();
        let p = canonical_morphism(&gr).unwrap();
        assert!(p.check().passed());
        for i in 0..2 {
            for j in 0..2 {
                let m = precovering_map(&p, i, 0, j, 0).unwrap().matrix;
                assert!(m.is_identity() || m.rows() == 0);
            }
        }
        assert!(check_covering(&p).unwrap().passed());
        let h = factor_through_gr(&p, &gr).unwrap();
        assert!(h.is_identity());
    }

    #[test]
    fn adjunction_identities() {
        let f = FieldSpec::rationals();
        let x = Arc::new(diagonal(k(f), one_arrow()));
        let r = verify_adjunction(&x, &k(f)).unwrap();
        assert!(r.passed(), "{}", r.render_text());
    }

    #[test]
    fn gr_of_identity_is_identity() {
        let x = Arc::new(diagonal(k(FieldSpec::rationals()), one_arrow()));
        let gr = grothendieck(&x).unwrap();
        let id = LeftTransformation::identity(x.clone());
        assert!(gr_on_1cell(&id, &gr, &gr).unwrap().is_identity());
        let z = TwoMorphism::identity(Arc::new(id));
        let n = gr_on_2cell(&z, &gr, &gr).unwrap();
        assert!(n.check().passed());
        assert_eq!(n.components(), NatTransf::identity(Arc::new(KFunctor::identity(gr.cat().clone()))).components());
    }
}
