//! Composing colax functors with pseudofunctors `V: k-Cat → 𝐂` whose values
//! are only evaluated on demand, and the instance `K^b ∘ prj`.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use crate::colax::{ColaxFunctor, LeftTransformation, TwoMorphism};
use crate::error::{Error, Result};
use crate::fincat::{same_cat, Elem, FinKCat, KFunctor, NatTransf};
use crate::grothendieck::diagonal_base;
use crate::homotopy::{is_null_homotopic, ChainMap, HomSpace, ProjComplex, ProjMatrix};
use crate::report::Report;

/// A pseudofunctor out of finite k-categories, evaluated object by object.
/// `theta(G, F, x): V(GF)x → V(G)V(F)x` and `eta(C, x): V(id_C)x → x` must be invertible.
pub trait ComputablePseudofunctor: Send + Sync {
    type Obj: Clone + Send + Sync;
    type Mor: Clone + Send + Sync;

    /// A canonical key, used for memoization.
    fn key(&self, x: &Self::Obj) -> String;
    fn source(&self, f: &Self::Mor) -> Self::Obj;
    fn target(&self, f: &Self::Mor) -> Self::Obj;
    fn identity(&self, x: &Self::Obj) -> Self::Mor;
    fn compose(&self, g: &Self::Mor, f: &Self::Mor) -> Result<Self::Mor>;
    fn equal(&self, f: &Self::Mor, g: &Self::Mor) -> Result<bool>;
    fn on_object(&self, f: &KFunctor, x: &Self::Obj) -> Result<Self::Obj>;
    fn on_morphism(&self, f: &KFunctor, m: &Self::Mor) -> Result<Self::Mor>;
    /// `(Vα)_x: V(F)x → V(G)x`.
    fn on_2cell(&self, alpha: &NatTransf, x: &Self::Obj) -> Result<Self::Mor>;
    fn eta(&self, c: &Arc<FinKCat>, x: &Self::Obj) -> Result<Self::Mor>;
    fn eta_inv(&self, c: &Arc<FinKCat>, x: &Self::Obj) -> Result<Self::Mor>;
    fn theta(&self, g: &KFunctor, f: &KFunctor, x: &Self::Obj) -> Result<Self::Mor>;
    fn theta_inv(&self, g: &KFunctor, f: &KFunctor, x: &Self::Obj) -> Result<Self::Mor>;
}

/// The identity pseudofunctor; objects are object indices, morphisms carry endpoints.
#[derive(Clone, Debug)]
pub struct IdentityPseudofunctor {
    pub base: Vec<Arc<FinKCat>>,
}

/// A morphism of a finite category together with its category and endpoints.
#[derive(Clone, Debug, PartialEq)]
pub struct Located {
    pub cat: Arc<FinKCat>,
    pub source: usize,
    pub target: usize,
    pub elem: Elem,
}

impl ComputablePseudofunctor for IdentityPseudofunctor {
    type Obj = (Arc<FinKCat>, usize);
    type Mor = Located;

    fn key(&self, x: &Self::Obj) -> String {
        format!("{:p}:{}", Arc::as_ptr(&x.0), x.1)
    }
    fn source(&self, f: &Located) -> Self::Obj {
        (f.cat.clone(), f.source)
    }
    fn target(&self, f: &Located) -> Self::Obj {
        (f.cat.clone(), f.target)
    }
    fn identity(&self, x: &Self::Obj) -> Located {
        Located { cat: x.0.clone(), source: x.1, target: x.1, elem: x.0.identity(x.1).clone() }
    }
    fn compose(&self, g: &Located, f: &Located) -> Result<Located> {
        if !same_cat(&g.cat, &f.cat) || g.source != f.target {
            return Err(Error::SourceTargetMismatch("morphisms are not composable".into()));
        }
        let elem = f.cat.compose(f.source, f.target, g.target, &g.elem, &f.elem);
        Ok(Located { cat: f.cat.clone(), source: f.source, target: g.target, elem })
    }
    fn equal(&self, f: &Located, g: &Located) -> Result<bool> {
        Ok(f == g)
    }
    fn on_object(&self, f: &KFunctor, x: &Self::Obj) -> Result<Self::Obj> {
        Ok((f.target().clone(), f.obj(x.1)))
    }
    fn on_morphism(&self, f: &KFunctor, m: &Located) -> Result<Located> {
        Ok(Located { cat: f.target().clone(), source: f.obj(m.source), target: f.obj(m.target), elem: f.map(m.source, m.target, &m.elem) })
    }
    fn on_2cell(&self, alpha: &NatTransf, x: &Self::Obj) -> Result<Located> {
        let c = alpha.source().target().clone();
        Ok(Located { cat: c, source: alpha.source().obj(x.1), target: alpha.target().obj(x.1), elem: alpha.component(x.1).clone() })
    }
    fn eta(&self, _c: &Arc<FinKCat>, x: &Self::Obj) -> Result<Located> {
        Ok(self.identity(x))
    }
    fn eta_inv(&self, _c: &Arc<FinKCat>, x: &Self::Obj) -> Result<Located> {
        Ok(self.identity(x))
    }
    fn theta(&self, g: &KFunctor, f: &KFunctor, x: &Self::Obj) -> Result<Located> {
        Ok(self.identity(&(g.target().clone(), g.obj(f.obj(x.1)))))
    }
    fn theta_inv(&self, g: &KFunctor, f: &KFunctor, x: &Self::Obj) -> Result<Located> {
        self.theta(g, f, x)
    }
}

/// `K^b ∘ prj`: a functor acts degreewise on complexes of representables.
/// Because the formal-sum realization is strictly functorial, η and θ are identities.
#[derive(Clone, Copy, Debug, Default)]
pub struct KbPrj;

impl ComputablePseudofunctor for KbPrj {
    type Obj = Arc<ProjComplex>;
    type Mor = ChainMap;

    fn key(&self, x: &Arc<ProjComplex>) -> String {
        format!("{:p}|{:?}", Arc::as_ptr(x.base()), (x.lo(), (x.lo()..=x.hi()).map(|k| (x.term(k).to_vec(), x.d(k))).collect::<Vec<_>>()))
    }
    fn source(&self, f: &ChainMap) -> Arc<ProjComplex> {
        f.source().clone()
    }
    fn target(&self, f: &ChainMap) -> Arc<ProjComplex> {
        f.target().clone()
    }
    fn identity(&self, x: &Arc<ProjComplex>) -> ChainMap {
        ChainMap::identity(x.clone())
    }
    fn compose(&self, g: &ChainMap, f: &ChainMap) -> Result<ChainMap> {
        ChainMap::compose(g, f)
    }
    fn equal(&self, f: &ChainMap, g: &ChainMap) -> Result<bool> {
        is_null_homotopic(&f.sub(g)?)
    }
    fn on_object(&self, f: &KFunctor, x: &Arc<ProjComplex>) -> Result<Arc<ProjComplex>> {
        Ok(Arc::new(x.map_functor(f)?))
    }
    fn on_morphism(&self, f: &KFunctor, m: &ChainMap) -> Result<ChainMap> {
        m.map_functor(f)
    }
    fn on_2cell(&self, alpha: &NatTransf, x: &Arc<ProjComplex>) -> Result<ChainMap> {
        let s = Arc::new(x.map_functor(alpha.source())?);
        let t = Arc::new(x.map_functor(alpha.target())?);
        let d = alpha.source().target().clone();
        let comps = x
            .degrees()
            .map(|k| {
                let mut m = ProjMatrix::zero(&d, s.term(k), t.term(k));
                for (i, &o) in x.term(k).iter().enumerate() {
                    m.set(i, i, alpha.component(o).clone());
                }
                m
            })
            .collect();
        ChainMap::new(s, t, 0, comps)
    }
    fn eta(&self, c: &Arc<FinKCat>, x: &Arc<ProjComplex>) -> Result<ChainMap> {
        let vx = Arc::new(x.map_functor(&KFunctor::identity(c.clone()))?);
        ident_between(vx, x.clone())
    }
    fn eta_inv(&self, c: &Arc<FinKCat>, x: &Arc<ProjComplex>) -> Result<ChainMap> {
        let vx = Arc::new(x.map_functor(&KFunctor::identity(c.clone()))?);
        ident_between(x.clone(), vx)
    }
    fn theta(&self, g: &KFunctor, f: &KFunctor, x: &Arc<ProjComplex>) -> Result<ChainMap> {
        let gf = crate::fincat::compose_functors(g, f)?;
        let s = Arc::new(x.map_functor(&gf)?);
        let t = Arc::new(x.map_functor(f)?.map_functor(g)?);
        ident_between(s, t)
    }
    fn theta_inv(&self, g: &KFunctor, f: &KFunctor, x: &Arc<ProjComplex>) -> Result<ChainMap> {
        let gf = crate::fincat::compose_functors(g, f)?;
        let s = Arc::new(x.map_functor(&gf)?);
        let t = Arc::new(x.map_functor(f)?.map_functor(g)?);
        ident_between(t, s)
    }
}

fn ident_between(s: Arc<ProjComplex>, t: Arc<ProjComplex>) -> Result<ChainMap> {
    ChainMap::identity(s.clone()).retarget(s, t)
}

/// `VX`, with fibers `V(X(i))` never materialized.
pub struct LazyColaxFunctor<V: ComputablePseudofunctor> {
    v: Arc<V>,
    x: Arc<ColaxFunctor>,
    memo: RwLock<HashMap<(usize, String), V::Obj>>,
}

impl<V: ComputablePseudofunctor> LazyColaxFunctor<V> {
    pub fn new(v: Arc<V>, x: Arc<ColaxFunctor>) -> Result<Self> {
        let r = crate::colax::check_colax(&x);
        if !r.passed() {
            return Err(Error::Invalid(format!("not a colax functor: {}", r.first_failure().unwrap())));
        }
        Ok(LazyColaxFunctor { v, x, memo: RwLock::new(HashMap::new()) })
    }

    pub fn colax(&self) -> &Arc<ColaxFunctor> {
        &self.x
    }

    pub fn pseudofunctor(&self) -> &Arc<V> {
        &self.v
    }

    /// `VX(a)(U)`, memoized.
    pub fn arrow_obj(&self, a: usize, u: &V::Obj) -> Result<V::Obj> {
        let key = (a, self.v.key(u));
        if let Some(hit) = self.memo.read().expect("memo lock").get(&key) {
            return Ok(hit.clone());
        }
        let val = self.v.on_object(self.x.arrow(a), u)?;
        Ok(self.memo.write().expect("memo lock").entry(key).or_insert(val).clone())
    }

    pub fn arrow_mor(&self, a: usize, f: &V::Mor) -> Result<V::Mor> {
        self.v.on_morphism(self.x.arrow(a), f)
    }

    pub fn memo_len(&self) -> usize {
        self.memo.read().expect("memo lock").len()
    }

    /// `η^{VX}_i U = η^V_{X(i)} U ∘ (V η^X_i)_U`.
    pub fn eta(&self, i: usize, u: &V::Obj) -> Result<V::Mor> {
        let n = self.x.eta_nat(i)?;
        let a = self.v.on_2cell(&n, u)?;
        let b = self.v.eta(self.x.fiber(i), u)?;
        self.v.compose(&b, &a)
    }

    /// `θ^{VX}_{b,a} U = θ^V_{X(b),X(a)} U ∘ (V θ^X_{b,a})_U`.
    pub fn theta(&self, b: usize, a: usize, u: &V::Obj) -> Result<V::Mor> {
        let n = self.x.theta_nat(b, a)?;
        let s = self.v.on_2cell(&n, u)?;
        let t = self.v.theta(self.x.arrow(b), self.x.arrow(a), u)?;
        self.v.compose(&t, &s)
    }

    /// Both unit identities at `U ∈ VX(i)` for `a: i → j`.
    pub fn check_unit(&self, a: usize, u: &V::Obj) -> Result<bool> {
        let idx = self.x.index();
        let (i, j) = (idx.source(a), idx.target(a));
        let au = self.arrow_obj(a, u)?;
        let l1 = self.v.compose(&self.arrow_mor(a, &self.eta(i, u)?)?, &self.theta(a, idx.id(i), u)?)?;
        let l2 = self.v.compose(&self.eta(j, &au)?, &self.theta(idx.id(j), a, u)?)?;
        let id = self.v.identity(&au);
        Ok(self.v.equal(&l1, &id)? && self.v.equal(&l2, &id)?)
    }

    /// The cocycle identity at `U` for `i →a j →b k →c l`.
    pub fn check_cocycle(&self, c: usize, b: usize, a: usize, u: &V::Obj) -> Result<bool> {
        let idx = self.x.index();
        let cb = idx.compose(c, b).ok_or_else(|| Error::Invalid("not composable".into()))?;
        let ba = idx.compose(b, a).ok_or_else(|| Error::Invalid("not composable".into()))?;
        let au = self.arrow_obj(a, u)?;
        let lhs = self.v.compose(&self.theta(c, b, &au)?, &self.theta(cb, a, u)?)?;
        let rhs = self.v.compose(&self.arrow_mor(c, &self.theta(b, a, u)?)?, &self.theta(c, ba, u)?)?;
        self.v.equal(&lhs, &rhs)
    }

    /// Every unit and cocycle instance whose starting object is in the sample.
    pub fn check_on_sample(&self, sample: &[(usize, V::Obj)]) -> Result<Report> {
        let idx = self.x.index();
        let mut r = Report::new("composite colax axioms");
        let mut count = 0usize;
        for (i, u) in sample {
            for a in 0..idx.n_morphisms() {
                if idx.source(a) != *i {
                    continue;
                }
                count += 1;
                if !self.check_unit(a, u)? {
                    r.fail(format!("unit axiom fails for {} at sample {}", idx.morphism(a).name, self.v.key(u)));
                }
                for b in 0..idx.n_morphisms() {
                    if idx.source(b) != idx.target(a) {
                        continue;
                    }
                    for c in 0..idx.n_morphisms() {
                        if idx.source(c) != idx.target(b) {
                            continue;
                        }
                        count += 1;
                        if !self.check_cocycle(c, b, a, u)? {
                            r.fail(format!(
                                "cocycle axiom fails for ({}, {}, {})",
                                idx.morphism(c).name,
                                idx.morphism(b).name,
                                idx.morphism(a).name
                            ));
                        }
                    }
                }
            }
        }
        r.value("instances", count);
        Ok(r)
    }
}

/// `K^b(prj X)` as a lazily evaluated colax functor.
pub fn kb_prj(x: Arc<ColaxFunctor>) -> Result<LazyColaxFunctor<KbPrj>> {
    LazyColaxFunctor::new(Arc::new(KbPrj), x)
}

/// `V(F, ψ)` with `ψ_V(a) = θ^V_{F(j),X(a)} ∘ V(ψ(a)) ∘ (θ^V_{X'(a),F(i)})⁻¹`.
pub struct LazyLeftTransformation<V: ComputablePseudofunctor> {
    v: Arc<V>,
    f: Arc<LeftTransformation>,
}

impl<V: ComputablePseudofunctor> LazyLeftTransformation<V> {
    pub fn transformation(&self) -> &Arc<LeftTransformation> {
        &self.f
    }

    /// `V(F(i))(U)`.
    pub fn functor_obj(&self, i: usize, u: &V::Obj) -> Result<V::Obj> {
        self.v.on_object(self.f.functor(i), u)
    }

    pub fn functor_mor(&self, i: usize, m: &V::Mor) -> Result<V::Mor> {
        self.v.on_morphism(self.f.functor(i), m)
    }

    /// `ψ_V(a)_U: VX'(a)VF(i)U → VF(j)VX(a)U`.
    pub fn psi(&self, a: usize, u: &V::Obj) -> Result<V::Mor> {
        let idx = self.f.source().index();
        let (i, j) = (idx.source(a), idx.target(a));
        let (x, xp) = (self.f.source(), self.f.target());
        let pa = psi_nat(&self.f, a)?;
        let vpsi = self.v.on_2cell(&pa, u)?;
        let t_inv = self.v.theta_inv(xp.arrow(a), self.f.functor(i), u)?;
        let t = self.v.theta(self.f.functor(j), x.arrow(a), u)?;
        self.v.compose(&t, &self.v.compose(&vpsi, &t_inv)?)
    }

    /// Naturality of `ψ_V(a)` on a morphism `m: U → U'` of `VX(i)`.
    pub fn check_naturality(&self, a: usize, m: &V::Mor) -> Result<bool> {
        let idx = self.f.source().index();
        let (i, j) = (idx.source(a), idx.target(a));
        let (s, t) = (self.v.source(m), self.v.target(m));
        let xp = self.f.target();
        let lhs = self.v.compose(&self.psi(a, &t)?, &self.v.on_morphism(xp.arrow(a), &self.functor_mor(i, m)?)?)?;
        let rhs = self.v.compose(
            &self.functor_mor(j, &self.v.on_morphism(self.f.source().arrow(a), m)?)?,
            &self.psi(a, &s)?,
        )?;
        self.v.equal(&lhs, &rhs)
    }

    /// Unit and cocycle conditions of a left transformation at `U`.
    pub fn check_at(&self, vx: &LazyColaxFunctor<V>, vxp: &LazyColaxFunctor<V>, i: usize, u: &V::Obj) -> Result<Report> {
        let idx = self.f.source().index();
        let mut r = Report::new("composite left transformation");
        // η'_i(VF(i)U) = VF(i)(η_i U) ∘ ψ_V(id_i)_U
        let id = idx.id(i);
        let fu = self.functor_obj(i, u)?;
        let lhs = vxp.eta(i, &fu)?;
        let rhs = self.v.compose(&self.functor_mor(i, &vx.eta(i, u)?)?, &self.psi(id, u)?)?;
        if !self.v.equal(&lhs, &rhs)? {
            r.fail(format!("unit condition fails in {}", idx.objects()[i]));
        }
        for (b, a) in idx.composable_pairs() {
            if idx.source(a) != i {
                continue;
            }
            let ba = idx.compose(b, a).unwrap();
            let k = idx.target(b);
            let au = vx.arrow_obj(a, u)?;
            let step = vxp.arrow_mor(b, &self.psi(a, u)?)?;
            let l = self.v.compose(&step, &vxp.theta(b, a, &fu)?)?;
            let l = self.v.compose(&self.psi(b, &au)?, &l)?;
            let rr = self.v.compose(&self.functor_mor(k, &vx.theta(b, a, u)?)?, &self.psi(ba, u)?)?;
            if !self.v.equal(&l, &rr)? {
                r.fail(format!("cocycle condition fails for ({}, {})", idx.morphism(b).name, idx.morphism(a).name));
            }
        }
        Ok(r)
    }
}

fn psi_nat(f: &LeftTransformation, a: usize) -> Result<NatTransf> {
    let idx = f.source().index();
    let (i, j) = (idx.source(a), idx.target(a));
    let s = Arc::new(crate::fincat::compose_functors(f.target().arrow(a), f.functor(i))?);
    let t = Arc::new(crate::fincat::compose_functors(f.functor(j), f.source().arrow(a))?);
    let comps = (0..f.source().fiber(i).n_objects()).map(|x| f.psi(a, x).clone()).collect();
    NatTransf::new(s, t, comps)
}

pub fn compose_1morphism<V: ComputablePseudofunctor>(v: Arc<V>, f: Arc<LeftTransformation>) -> LazyLeftTransformation<V> {
    LazyLeftTransformation { v, f }
}

/// `Vζ = (Vζ(i))_i`, evaluated at `U` in fiber `i`.
pub fn transport_2cell<V: ComputablePseudofunctor>(v: &V, z: &TwoMorphism, i: usize, u: &V::Obj) -> Result<V::Mor> {
    v.on_2cell(&z.component(i)?, u)
}

/// The square of a 2-morphism for its transported data at `U` in fiber `i`.
pub fn check_transported_2cell<V: ComputablePseudofunctor>(v: &Arc<V>, z: &TwoMorphism, i: usize, u: &V::Obj) -> Result<bool> {
    let f = compose_1morphism(v.clone(), z.source().clone());
    let g = compose_1morphism(v.clone(), z.target().clone());
    let idx = z.source().source().index();
    let xp = z.source().target();
    for a in 0..idx.n_morphisms() {
        if idx.source(a) != i {
            continue;
        }
        let j = idx.target(a);
        let au = v.on_object(z.source().source().arrow(a), u)?;
        // ψ'_V(a) ∘ VX'(a)(Vζ(i)) = Vζ(j)VX(a) ∘ ψ_V(a)
        let lhs = v.compose(&g.psi(a, u)?, &v.on_morphism(xp.arrow(a), &transport_2cell(&**v, z, i, u)?)?)?;
        let rhs = v.compose(&transport_2cell(&**v, z, j, &au)?, &f.psi(a, u)?)?;
        if !v.equal(&lhs, &rhs)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A sampled pair: `U` over `X(i)` and `V` over `X(j)`.
pub type SamplePair = (usize, Arc<ProjComplex>, usize, Arc<ProjComplex>);

/// For each pair and shift, the map `⊕_a Hom(VX(a)U, V[p]) → Hom(VF(i)U, VF(j)V[p])`
/// must be bijective.
pub fn check_precovering_preserved(f: &Arc<LeftTransformation>, sample: &[SamplePair]) -> Result<Report> {
    let c = diagonal_base(f.target()).ok_or(Error::NotDiagonalTarget)?;
    let v = Arc::new(KbPrj);
    let vx = kb_prj(f.source().clone())?;
    let vf = compose_1morphism(v.clone(), f.clone());
    let idx = f.source().index();
    let mut r = Report::new("precovering preserved");
    let mut checked = 0usize;
    for (i, u, j, w) in sample {
        let fu = vf.functor_obj(*i, u)?;
        let fw = vf.functor_obj(*j, w)?;
        let homs = idx.hom(*i, *j);
        let images: Vec<Arc<ProjComplex>> = homs.iter().map(|&a| vx.arrow_obj(a, u)).collect::<Result<_>>()?;
        let mut lo = i64::MAX;
        let mut hi = i64::MIN;
        let mut widen = |p: Option<(i64, i64)>| {
            if let Some((a, b)) = p {
                lo = lo.min(a);
                hi = hi.max(b);
            }
        };
        widen(crate::homotopy::support_window(&fu, &fw));
        for au in &images {
            widen(crate::homotopy::support_window(au, w));
        }
        for p in lo..=hi {
            let target = HomSpace::new(&fu, &fw, p)?;
            let mut cols = Vec::new();
            for (&a, au) in homs.iter().zip(&images) {
                let psi = vf.psi(a, u)?;
                for g in HomSpace::new(au, w, p)?.basis() {
                    let fg = vf.functor_mor(*j, &g)?;
                    let fg = fg.retarget(fg.source().clone(), fw.clone())?;
                    let psi = psi.retarget(fu.clone(), fg.source().clone())?;
                    cols.push(target.coords(&ChainMap::compose(&fg, &psi)?)?);
                }
            }
            checked += 1;
            let rank = if cols.is_empty() || target.dim() == 0 {
                0
            } else {
                crate::field::Matrix::from_columns(c.field(), target.dim(), &cols).rank()
            };
            if cols.len() != target.dim() || rank != cols.len() {
                r.fail(format!(
                    "not bijective at shift {p} for a pair over ({}, {}): {} -> {} (rank {rank})",
                    idx.objects()[*i],
                    idx.objects()[*j],
                    cols.len(),
                    target.dim()
                ));
            }
        }
    }
    r.value("instances", checked);
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::colax::diagonal;
    use crate::field::FieldSpec;
    use crate::grothendieck::{canonical_morphism, grothendieck};
    use crate::index::IndexCat;
    use crate::quiver::{build_category, Arrow, QuiverPresentation};

    fn dual_numbers() -> Arc<FinKCat> {
        let mut q = QuiverPresentation::new(vec!["1".into()], vec![Arrow { name: "t".into(), source: 0, target: 0 }]);
        q.relations = vec![vec![(num_rational::BigRational::from_integer(1.into()), vec![0, 0])]];
        Arc::new(build_category(&q, FieldSpec::prime(5).unwrap()).unwrap())
    }

    fn chain(n: usize) -> Arc<IndexCat> {
        let v = (1..=n).map(|i| i.to_string()).collect();
        let arrows = (0..n - 1).map(|k| (["a", "b", "c"][k].to_string(), k, k + 1)).collect();
        Arc::new(IndexCat::free_on_acyclic_quiver(v, arrows).unwrap())
    }

    fn twisted() -> Arc<ColaxFunctor> {
        let c = dual_numbers();
        let f = c.field();
        let idx = chain(3);
        let u: Vec<Vec<Elem>> = (0..idx.n_morphisms()).map(|a| vec![vec![f.from_i64(1 + a as i64 % 4), f.from_i64(3)]]).collect();
        Arc::new(diagonal(c, idx).twist(&u).unwrap())
    }

    fn t_complex(c: &Arc<FinKCat>) -> Arc<ProjComplex> {
        let f = c.field();
        let d = ProjMatrix::from_entries(c, &[0], &[0], vec![vec![f.zero(), f.one()]]).unwrap();
        Arc::new(ProjComplex::new(c.clone(), 0, vec![vec![0], vec![0]], vec![d]).unwrap())
    }

    #[test]
    fn composite_axioms_on_sample() {
        let x = twisted();
        let vx = kb_prj(x.clone()).unwrap();
        let c = x.fiber(0).clone();
        let sample: Vec<(usize, Arc<ProjComplex>)> = (0..3)
            .flat_map(|i| [(i, Arc::new(ProjComplex::stalk(c.clone(), 0, 0))), (i, t_complex(&c))])
            .collect();
        let r = vx.check_on_sample(&sample).unwrap();
        assert!(r.passed(), "{}", r.render_text());
        let before = vx.memo_len();
        vx.check_on_sample(&sample).unwrap();
        assert_eq!(vx.memo_len(), before);
    }

    #[test]
    fn canonical_morphism_stays_precovering() {
        let x = twisted();
        let gr = grothendieck(&x).unwrap();
        let p = Arc::new(canonical_morphism(&gr).unwrap());
        let c = x.fiber(0).clone();
        let objs = [Arc::new(ProjComplex::stalk(c.clone(), 0, 0)), t_complex(&c)];
        let mut sample = Vec::new();
        for i in 0..3 {
            for j in 0..3 {
                for u in &objs {
                    for w in &objs {
                        sample.push((i, u.clone(), j, w.clone()));
                    }
                }
            }
        }
        let r = check_precovering_preserved(&p, &sample).unwrap();
        assert!(r.passed(), "{}", r.render_text());
        let f = compose_1morphism(Arc::new(KbPrj), p.clone());
        let vx = kb_prj(x.clone()).unwrap();
        let vd = kb_prj(p.target().clone()).unwrap();
        for i in 0..3 {
            assert!(f.check_at(&vx, &vd, i, &objs[1]).unwrap().passed());
        }
        let z = TwoMorphism::identity(p);
        assert!(check_transported_2cell(&Arc::new(KbPrj), &z, 0, &objs[1]).unwrap());
    }

    #[test]
    fn identity_of_a_diagonal_is_not_precovering() {
        let c = dual_numbers();
        let x = Arc::new(diagonal(c.clone(), chain(2)));
        let id = Arc::new(LeftTransformation::identity(x));
        let s = Arc::new(ProjComplex::stalk(c, 0, 0));
        let r = check_precovering_preserved(&id, &[(1, s.clone(), 0, s)]).unwrap();
        assert!(!r.passed());
    }

    #[test]
    fn identity_pseudofunctor_recovers_the_colax_data() {
        let x = twisted();
        let v = Arc::new(IdentityPseudofunctor { base: x.fibers().to_vec() });
        let vx = LazyColaxFunctor::new(v, x.clone()).unwrap();
        let c = x.fiber(0).clone();
        let r = vx.check_on_sample(&[(0, (c.clone(), 0)), (1, (c, 0))]).unwrap();
        assert!(r.passed());
        let idx = x.index();
        let (a, b) = (idx.morphism_index("a").unwrap(), idx.morphism_index("b").unwrap());
        assert_eq!(&vx.theta(b, a, &(x.fiber(0).clone(), 0)).unwrap().elem, x.theta(b, a, 0));
    }
}
