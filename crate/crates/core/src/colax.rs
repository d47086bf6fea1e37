//! Colax functors from a finite index category into k-linear categories, left
//! transformations between them and 2-morphisms.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fincat::{compose_functors, inverse_of, same_cat, Elem, FinKCat, KFunctor, NatTransf};
use crate::index::{IndexCat, IndexKind};
use crate::local::find_iso;
use crate::report::Report;

/// `X: I → k-Cat` with comparison morphisms `η_i: X(id_i) ⇒ id` and
/// `θ_{b,a}: X(ba) ⇒ X(b)X(a)`, stored componentwise.
#[derive(Clone, Debug, PartialEq)]
pub struct ColaxFunctor {
    index: Arc<IndexCat>,
    fibers: Vec<Arc<FinKCat>>,
    arrows: Vec<Arc<KFunctor>>,
    // eta[i][x] ∈ X(i)(X(id_i)x, x)
    eta: Vec<Vec<Elem>>,
    // theta[b*m + a][x] ∈ X(k)(X(ba)x, X(b)X(a)x), for composable (b, a)
    theta: Vec<Vec<Elem>>,
}

impl ColaxFunctor {
    /// Assembles the data; only shapes are validated. `theta(b, a)` is called for composable pairs.
    pub fn new(
        index: Arc<IndexCat>,
        fibers: Vec<Arc<FinKCat>>,
        arrows: Vec<Arc<KFunctor>>,
        eta: Vec<Vec<Elem>>,
        mut theta: impl FnMut(usize, usize) -> Vec<Elem>,
    ) -> Result<Self> {
        let m = index.n_morphisms();
        if fibers.len() != index.n_objects() || arrows.len() != m || eta.len() != index.n_objects() {
            return Err(Error::DimensionMismatch("colax functor data".into()));
        }
        for a in 0..m {
            let (i, j) = (index.source(a), index.target(a));
            if !same_cat(arrows[a].source(), &fibers[i]) || !same_cat(arrows[a].target(), &fibers[j]) {
                return Err(Error::SourceTargetMismatch(format!(
                    "X({}) does not run from X({}) to X({})",
                    index.morphism(a).name,
                    index.objects()[i],
                    index.objects()[j]
                )));
            }
        }
        for i in 0..index.n_objects() {
            let c = &fibers[i];
            let xid = &arrows[index.id(i)];
            if eta[i].len() != c.n_objects() {
                return Err(Error::DimensionMismatch("eta components".into()));
            }
            for x in 0..c.n_objects() {
                if eta[i][x].len() != c.dim(xid.obj(x), x) {
                    return Err(Error::DimensionMismatch(format!("eta_{} at {}", index.objects()[i], c.object_name(x))));
                }
            }
        }
        let mut th = vec![Vec::new(); m * m];
        for (b, a) in index.composable_pairs() {
            let ba = index.compose(b, a).ok_or_else(|| Error::invalid("index category is not closed"))?;
            let c = &fibers[index.target(b)];
            let comps = theta(b, a);
            let src = &fibers[index.source(a)];
            if comps.len() != src.n_objects() {
                return Err(Error::DimensionMismatch("theta components".into()));
            }
            for x in 0..src.n_objects() {
                if comps[x].len() != c.dim(arrows[ba].obj(x), arrows[b].obj(arrows[a].obj(x))) {
                    return Err(Error::DimensionMismatch(format!(
                        "theta_{{{},{}}} at {}",
                        index.morphism(b).name,
                        index.morphism(a).name,
                        src.object_name(x)
                    )));
                }
            }
            th[b * m + a] = comps;
        }
        Ok(ColaxFunctor { index, fibers, arrows, eta, theta: th })
    }

    /// A strict functor: η and θ are identities, which requires
    /// `X(id_i) x = x` and `X(ba) x = X(b)X(a) x` on objects.
    pub fn strict(index: Arc<IndexCat>, fibers: Vec<Arc<FinKCat>>, arrows: Vec<Arc<KFunctor>>) -> Result<Self> {
        for i in 0..index.n_objects() {
            let f = &arrows[index.id(i)];
            if (0..fibers[i].n_objects()).any(|x| f.obj(x) != x) {
                return Err(Error::invalid(format!("X(id_{}) is not the identity on objects", index.objects()[i])));
            }
        }
        for (b, a) in index.composable_pairs() {
            let ba = index.compose(b, a).unwrap();
            let n = fibers[index.source(a)].n_objects();
            if (0..n).any(|x| arrows[ba].obj(x) != arrows[b].obj(arrows[a].obj(x))) {
                return Err(Error::invalid(format!(
                    "X({}) and X({})X({}) differ on objects",
                    index.morphism(ba).name,
                    index.morphism(b).name,
                    index.morphism(a).name
                )));
            }
        }
        let eta = (0..index.n_objects())
            .map(|i| (0..fibers[i].n_objects()).map(|x| fibers[i].identity(x).clone()).collect())
            .collect();
        let idx = index.clone();
        let arr = arrows.clone();
        let fib = fibers.clone();
        Self::new(index, fibers, arrows, eta, move |b, a| {
            let ba = idx.compose(b, a).unwrap();
            let c = &fib[idx.target(b)];
            (0..fib[idx.source(a)].n_objects()).map(|x| c.identity(arr[ba].obj(x)).clone()).collect()
        })
    }

    /// Strict functor on a free index category from the images of its arrows;
    /// longer paths map to composites, identities to identity functors.
    pub fn from_generators(index: Arc<IndexCat>, fibers: Vec<Arc<FinKCat>>, generators: &[Arc<KFunctor>]) -> Result<Self> {
        let IndexKind::Free { arrows } = index.kind().clone() else {
            return Err(Error::invalid("generators only determine functors on free index categories"));
        };
        if generators.len() != arrows.len() {
            return Err(Error::DimensionMismatch("one functor per arrow".into()));
        }
        let mut out = Vec::with_capacity(index.n_morphisms());
        for a in 0..index.n_morphisms() {
            let path = index.path_of(a).unwrap();
            let s = index.source(a);
            let mut f = KFunctor::identity(fibers[s].clone());
            for &step in path {
                let k = arrows.iter().position(|&m| m == step).unwrap();
                f = compose_functors(&generators[k], &f)?;
            }
            out.push(Arc::new(f));
        }
        Self::strict(index, fibers, out)
    }

    /// Transport of structure along units `u[a][x] ∈ Aut(X(a)x)`: the new
    /// `Y(a)` is `X(a)` conjugated by `u[a]`, and η, θ are adjusted so that
    /// `u` becomes an isomorphism `X ≅ Y`.
    pub fn twist(&self, u: &[Vec<Elem>]) -> Result<ColaxFunctor> {
        let idx = &self.index;
        let m = idx.n_morphisms();
        if u.len() != m {
            return Err(Error::DimensionMismatch("one unit family per morphism".into()));
        }
        let mut inv = Vec::with_capacity(m);
        for a in 0..m {
            let (ci, cj) = (&self.fibers[idx.source(a)], &self.fibers[idx.target(a)]);
            let fa = &self.arrows[a];
            let mut row = Vec::new();
            for x in 0..ci.n_objects() {
                let y = fa.obj(x);
                let v = inverse_of(cj, y, y, &u[a][x])
                    .ok_or_else(|| Error::invalid(format!("twist for {} is not invertible", idx.morphism(a).name)))?;
                row.push(v);
            }
            inv.push(row);
        }
        let mut arrows = Vec::with_capacity(m);
        for a in 0..m {
            let (ci, cj) = (self.fibers[idx.source(a)].clone(), self.fibers[idx.target(a)].clone());
            let fa = &self.arrows[a];
            let f = KFunctor::from_images(ci.clone(), cj.clone(), fa.object_map().to_vec(), |x, y, k| {
                let (fx, fy) = (fa.obj(x), fa.obj(y));
                let e = fa.map(x, y, &ci.basis_elem(x, y, k));
                let e = cj.compose(fx, fx, fy, &e, &inv[a][x]);
                cj.compose(fx, fy, fy, &u[a][y], &e)
            })?;
            arrows.push(Arc::new(f));
        }
        let eta = (0..idx.n_objects())
            .map(|i| {
                let c = &self.fibers[i];
                let id = idx.id(i);
                (0..c.n_objects())
                    .map(|x| {
                        let y = self.arrows[id].obj(x);
                        c.compose(y, y, x, &self.eta[i][x], &inv[id][x])
                    })
                    .collect()
            })
            .collect();
        let ar = arrows.clone();
        Self::new(idx.clone(), self.fibers.clone(), arrows, eta, |b, a| {
            let ba = idx.compose(b, a).unwrap();
            let c = &self.fibers[idx.target(b)];
            (0..self.fibers[idx.source(a)].n_objects())
                .map(|x| {
                    let s = self.arrows[ba].obj(x);
                    let ax = self.arrows[a].obj(x);
                    let t = self.arrows[b].obj(ax);
                    let e = c.compose(s, s, t, self.theta(b, a, x), &inv[ba][x]);
                    let e = c.compose(s, t, t, &u[b][ax], &e);
                    c.compose(s, t, t, &ar[b].map(ax, ax, &u[a][x]), &e)
                })
                .collect()
        })
    }

    pub fn index(&self) -> &Arc<IndexCat> {
        &self.index
    }

    pub fn fiber(&self, i: usize) -> &Arc<FinKCat> {
        &self.fibers[i]
    }

    pub fn fibers(&self) -> &[Arc<FinKCat>] {
        &self.fibers
    }

    pub fn arrow(&self, a: usize) -> &Arc<KFunctor> {
        &self.arrows[a]
    }

    pub fn eta(&self, i: usize, x: usize) -> &Elem {
        &self.eta[i][x]
    }

    pub fn theta(&self, b: usize, a: usize, x: usize) -> &Elem {
        &self.theta[b * self.index.n_morphisms() + a][x]
    }

    /// Whether every η and θ component is an identity.
    pub fn is_strict(&self) -> bool {
        let idx = &self.index;
        (0..idx.n_objects()).all(|i| {
            let c = &self.fibers[i];
            (0..c.n_objects()).all(|x| self.arrows[idx.id(i)].obj(x) == x && self.eta[i][x] == *c.identity(x))
        }) && idx.composable_pairs().into_iter().all(|(b, a)| {
            let ba = idx.compose(b, a).unwrap();
            let c = &self.fibers[idx.target(b)];
            (0..self.fibers[idx.source(a)].n_objects()).all(|x| {
                let t = self.arrows[b].obj(self.arrows[a].obj(x));
                self.arrows[ba].obj(x) == t && *self.theta(b, a, x) == *c.identity(t)
            })
        })
    }

    /// `θ_{b,a}` as a natural transformation `X(ba) ⇒ X(b)X(a)`.
    pub fn theta_nat(&self, b: usize, a: usize) -> Result<NatTransf> {
        let ba = self.index.compose(b, a).ok_or_else(|| Error::invalid("not composable"))?;
        let comp = Arc::new(compose_functors(&self.arrows[b], &self.arrows[a])?);
        let comps = (0..self.fibers[self.index.source(a)].n_objects()).map(|x| self.theta(b, a, x).clone()).collect();
        NatTransf::new(self.arrows[ba].clone(), comp, comps)
    }

    /// `η_i` as a natural transformation `X(id_i) ⇒ id`.
    pub fn eta_nat(&self, i: usize) -> Result<NatTransf> {
        let id = Arc::new(KFunctor::identity(self.fibers[i].clone()));
        NatTransf::new(self.arrows[self.index.id(i)].clone(), id, self.eta[i].clone())
    }
}

/// Checks functoriality of every `X(a)`, naturality of η, θ, the unit axiom
/// and the cocycle axiom.
pub fn check_colax(x: &ColaxFunctor) -> Report {
    let mut r = Report::new("colax functor");
    let idx = &x.index;
    for a in 0..idx.n_morphisms() {
        let fr = x.arrows[a].check();
        if !fr.passed() {
            r.fail(format!("X({}): {}", idx.morphism(a).name, fr.first_failure().unwrap()));
            return r;
        }
    }
    for i in 0..idx.n_objects() {
        match x.eta_nat(i).map(|n| n.check()) {
            Ok(nr) if nr.passed() => {}
            Ok(nr) => r.fail(format!("eta_{}: {}", idx.objects()[i], nr.first_failure().unwrap())),
            Err(e) => r.fail(format!("eta_{}: {e}", idx.objects()[i])),
        }
    }
    for (b, a) in idx.composable_pairs() {
        match x.theta_nat(b, a).map(|n| n.check()) {
            Ok(nr) if nr.passed() => {}
            Ok(nr) => r.fail(format!(
                "theta_{{{},{}}}: {}",
                idx.morphism(b).name,
                idx.morphism(a).name,
                nr.first_failure().unwrap()
            )),
            Err(e) => r.fail(format!("theta_{{{},{}}}: {e}", idx.morphism(b).name, idx.morphism(a).name)),
        }
    }
    if !r.passed() {
        return r;
    }
    // unit axiom
    for a in 0..idx.n_morphisms() {
        let (i, j) = (idx.source(a), idx.target(a));
        let (ci, cj) = (&x.fibers[i], &x.fibers[j]);
        let fa = &x.arrows[a];
        let idi = idx.id(i);
        let idj = idx.id(j);
        for o in 0..ci.n_objects() {
            let xo = fa.obj(o);
            // X(a)(η_i o) ∘ θ_{a,id_i} o
            let xid_o = x.arrows[idi].obj(o);
            let lhs = cj.compose(xo, fa.obj(xid_o), xo, &fa.map(xid_o, o, x.eta(i, o)), x.theta(a, idi, o));
            if lhs != *cj.identity(xo) {
                r.fail(format!(
                    "unit axiom X(a)η∘θ{{a,id}} fails for a = {} at {}",
                    idx.morphism(a).name,
                    ci.object_name(o)
                ));
                return r;
            }
            // η_j(X(a) o) ∘ θ_{id_j,a} o
            let mid = x.arrows[idj].obj(xo);
            let lhs = cj.compose(xo, mid, xo, x.eta(j, xo), x.theta(idj, a, o));
            if lhs != *cj.identity(xo) {
                r.fail(format!(
                    "unit axiom ηX(a)∘θ{{id,a}} fails for a = {} at {}",
                    idx.morphism(a).name,
                    ci.object_name(o)
                ));
                return r;
            }
        }
    }
    // cocycle axiom
    for (b, a) in idx.composable_pairs() {
        let ba = idx.compose(b, a).unwrap();
        for c in 0..idx.n_morphisms() {
            if idx.source(c) != idx.target(b) {
                continue;
            }
            let cb = idx.compose(c, b).unwrap();
            let cba = idx.compose(c, ba).unwrap();
            let ci = &x.fibers[idx.source(a)];
            let cl = &x.fibers[idx.target(c)];
            for o in 0..ci.n_objects() {
                let (xa, xb, xc) = (&x.arrows[a], &x.arrows[b], &x.arrows[c]);
                let src = x.arrows[cba].obj(o);
                let end = xc.obj(xb.obj(xa.obj(o)));
                let mid_l = x.arrows[cb].obj(xa.obj(o));
                let lhs = cl.compose(src, mid_l, end, x.theta(c, b, xa.obj(o)), x.theta(cb, a, o));
                let mid_r = xc.obj(x.arrows[ba].obj(o));
                let xc_theta = xc.map(x.arrows[ba].obj(o), xb.obj(xa.obj(o)), x.theta(b, a, o));
                let rhs = cl.compose(src, mid_r, end, &xc_theta, x.theta(c, ba, o));
                if lhs != rhs {
                    r.fail(format!(
                        "cocycle axiom fails for ({}, {}, {}) at {}",
                        idx.morphism(c).name,
                        idx.morphism(b).name,
                        idx.morphism(a).name,
                        ci.object_name(o)
                    ));
                    return r;
                }
            }
        }
    }
    r
}

/// The diagonal `Δ(C)`: every morphism goes to the identity functor.
pub fn diagonal(c: Arc<FinKCat>, index: Arc<IndexCat>) -> ColaxFunctor {
    let id = Arc::new(KFunctor::identity(c.clone()));
    let fibers = vec![c; index.n_objects()];
    let arrows = vec![id; index.n_morphisms()];
    ColaxFunctor::strict(index, fibers, arrows).expect("diagonal is strict")
}

/// A left transformation `(F, ψ): X → X'` with `ψ(a): X'(a)F(i) ⇒ F(j)X(a)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LeftTransformation {
    source: Arc<ColaxFunctor>,
    target: Arc<ColaxFunctor>,
    functors: Vec<Arc<KFunctor>>,
    // psi[a][x] ∈ X'(j)(X'(a)F(i)x, F(j)X(a)x)
    psi: Vec<Vec<Elem>>,
}

impl LeftTransformation {
    pub fn new(
        source: Arc<ColaxFunctor>,
        target: Arc<ColaxFunctor>,
        functors: Vec<Arc<KFunctor>>,
        psi: Vec<Vec<Elem>>,
    ) -> Result<Self> {
        if *source.index != *target.index {
            return Err(Error::SourceTargetMismatch("colax functors over different index categories".into()));
        }
        let idx = &source.index;
        if functors.len() != idx.n_objects() || psi.len() != idx.n_morphisms() {
            return Err(Error::DimensionMismatch("left transformation data".into()));
        }
        for i in 0..idx.n_objects() {
            if !same_cat(functors[i].source(), &source.fibers[i]) || !same_cat(functors[i].target(), &target.fibers[i]) {
                return Err(Error::SourceTargetMismatch(format!("F({}) has the wrong endpoints", idx.objects()[i])));
            }
        }
        for a in 0..idx.n_morphisms() {
            let (i, j) = (idx.source(a), idx.target(a));
            let c = &target.fibers[j];
            if psi[a].len() != source.fibers[i].n_objects() {
                return Err(Error::DimensionMismatch("psi components".into()));
            }
            for x in 0..source.fibers[i].n_objects() {
                let s = target.arrows[a].obj(functors[i].obj(x));
                let t = functors[j].obj(source.arrows[a].obj(x));
                if psi[a][x].len() != c.dim(s, t) {
                    return Err(Error::DimensionMismatch(format!(
                        "psi({}) at {}",
                        idx.morphism(a).name,
                        source.fibers[i].object_name(x)
                    )));
                }
            }
        }
        Ok(LeftTransformation { source, target, functors, psi })
    }

    /// `ψ(a)` is the identity wherever `X'(a)F(i)x = F(j)X(a)x`.
    pub fn with_identity_psi(source: Arc<ColaxFunctor>, target: Arc<ColaxFunctor>, functors: Vec<Arc<KFunctor>>) -> Result<Self> {
        let idx = source.index.clone();
        let mut psi = Vec::with_capacity(idx.n_morphisms());
        for a in 0..idx.n_morphisms() {
            let (i, j) = (idx.source(a), idx.target(a));
            let mut comps = Vec::new();
            for x in 0..source.fibers[i].n_objects() {
                let s = target.arrows[a].obj(functors[i].obj(x));
                let t = functors[j].obj(source.arrows[a].obj(x));
                if s != t {
                    return Err(Error::invalid(format!(
                        "X'(a)F(i) and F(j)X(a) differ at {} for a = {}",
                        source.fibers[i].object_name(x),
                        idx.morphism(a).name
                    )));
                }
                comps.push(target.fibers[j].identity(s).clone());
            }
            psi.push(comps);
        }
        Self::new(source, target, functors, psi)
    }

    pub fn identity(x: Arc<ColaxFunctor>) -> Self {
        let functors = x.fibers.iter().map(|c| Arc::new(KFunctor::identity(c.clone()))).collect();
        Self::with_identity_psi(x.clone(), x, functors).expect("identity transformation")
    }

    pub fn source(&self) -> &Arc<ColaxFunctor> {
        &self.source
    }

    pub fn target(&self) -> &Arc<ColaxFunctor> {
        &self.target
    }

    pub fn functor(&self, i: usize) -> &Arc<KFunctor> {
        &self.functors[i]
    }

    pub fn psi(&self, a: usize, x: usize) -> &Elem {
        &self.psi[a][x]
    }

    /// Whether every `ψ(a)` is invertible (I-equivariance).
    pub fn is_equivariant(&self) -> bool {
        self.first_non_invertible_psi().is_none()
    }

    fn first_non_invertible_psi(&self) -> Option<(usize, usize)> {
        let idx = &self.source.index;
        for a in 0..idx.n_morphisms() {
            let (i, j) = (idx.source(a), idx.target(a));
            for x in 0..self.source.fibers[i].n_objects() {
                let s = self.target.arrows[a].obj(self.functors[i].obj(x));
                let t = self.functors[j].obj(self.source.arrows[a].obj(x));
                if inverse_of(&self.target.fibers[j], s, t, &self.psi[a][x]).is_none() {
                    return Some((a, x));
                }
            }
        }
        None
    }

    /// Functoriality of each `F(i)`, naturality of each `ψ(a)`, and the unit
    /// and cocycle conditions.
    pub fn check(&self) -> Report {
        let mut r = Report::new("left transformation");
        let (xs, xt) = (&self.source, &self.target);
        let idx = &xs.index;
        for i in 0..idx.n_objects() {
            let fr = self.functors[i].check();
            if !fr.passed() {
                r.fail(format!("F({}): {}", idx.objects()[i], fr.first_failure().unwrap()));
                return r;
            }
        }
        for a in 0..idx.n_morphisms() {
            let (i, j) = (idx.source(a), idx.target(a));
            let (ci, cj) = (&xs.fibers[i], &xt.fibers[j]);
            let (fi, fj) = (&self.functors[i], &self.functors[j]);
            let (xa, xpa) = (&xs.arrows[a], &xt.arrows[a]);
            for u in 0..ci.n_objects() {
                for v in 0..ci.n_objects() {
                    for k in 0..ci.dim(u, v) {
                        let e = ci.basis_elem(u, v, k);
                        let su = xpa.obj(fi.obj(u));
                        let sv = xpa.obj(fi.obj(v));
                        let tu = fj.obj(xa.obj(u));
                        let tv = fj.obj(xa.obj(v));
                        let lhs = cj.compose(su, sv, tv, &self.psi[a][v], &xpa.map(fi.obj(u), fi.obj(v), &fi.map(u, v, &e)));
                        let rhs = cj.compose(su, tu, tv, &fj.map(xa.obj(u), xa.obj(v), &xa.map(u, v, &e)), &self.psi[a][u]);
                        if lhs != rhs {
                            r.fail(format!(
                                "psi({}) is not natural at {}",
                                idx.morphism(a).name,
                                ci.labels(u, v)[k]
                            ));
                            return r;
                        }
                    }
                }
            }
        }
        // unit: η'_i(F(i)x) = F(i)(η_i x) ∘ ψ(id_i)_x
        for i in 0..idx.n_objects() {
            let id = idx.id(i);
            let (ci, cpi) = (&xs.fibers[i], &xt.fibers[i]);
            let fi = &self.functors[i];
            for x in 0..ci.n_objects() {
                let s = xt.arrows[id].obj(fi.obj(x));
                let mid = fi.obj(xs.arrows[id].obj(x));
                let rhs = cpi.compose(s, mid, fi.obj(x), &fi.map(xs.arrows[id].obj(x), x, xs.eta(i, x)), &self.psi[id][x]);
                if rhs != *xt.eta(i, fi.obj(x)) {
                    r.fail(format!("unit condition fails at {} in {}", ci.object_name(x), idx.objects()[i]));
                    return r;
                }
            }
        }
        // cocycle: ψ(b)_{X(a)x} ∘ X'(b)(ψ(a)_x) ∘ θ'_{b,a}(F(i)x) = F(k)(θ_{b,a}x) ∘ ψ(ba)_x
        for (b, a) in idx.composable_pairs() {
            let ba = idx.compose(b, a).unwrap();
            let (i, j, k) = (idx.source(a), idx.target(a), idx.target(b));
            let ck = &xt.fibers[k];
            let (fi, fj, fk) = (&self.functors[i], &self.functors[j], &self.functors[k]);
            for x in 0..xs.fibers[i].n_objects() {
                let fx = fi.obj(x);
                let start = xt.arrows[ba].obj(fx);
                let p1 = xt.arrows[b].obj(xt.arrows[a].obj(fx));
                let p2 = xt.arrows[b].obj(fj.obj(xs.arrows[a].obj(x)));
                let end = fk.obj(xs.arrows[b].obj(xs.arrows[a].obj(x)));
                let step2 = xt.arrows[b].map(xt.arrows[a].obj(fx), fj.obj(xs.arrows[a].obj(x)), &self.psi[a][x]);
                let l1 = ck.compose(start, p1, p2, &step2, xt.theta(b, a, fx));
                let lhs = ck.compose(start, p2, end, &self.psi[b][xs.arrows[a].obj(x)], &l1);
                let mid = fk.obj(xs.arrows[ba].obj(x));
                let ft = fk.map(xs.arrows[ba].obj(x), xs.arrows[b].obj(xs.arrows[a].obj(x)), xs.theta(b, a, x));
                let rhs = ck.compose(start, mid, end, &ft, &self.psi[ba][x]);
                if lhs != rhs {
                    r.fail(format!(
                        "cocycle condition fails for ({}, {}) at {}",
                        idx.morphism(b).name,
                        idx.morphism(a).name,
                        xs.fibers[i].object_name(x)
                    ));
                    return r;
                }
            }
        }
        r
    }
}

/// `(G, ψ')∘(F, ψ)` with `(ψ'∘ψ)(a)_x = G(j)(ψ(a)_x) ∘ ψ'(a)_{F(i)x}`.
pub fn compose_left_transformations(g: &LeftTransformation, f: &LeftTransformation) -> Result<LeftTransformation> {
    if *f.target != *g.source {
        return Err(Error::SourceTargetMismatch("target(F) differs from source(G)".into()));
    }
    let idx = f.source.index.clone();
    let functors: Vec<Arc<KFunctor>> = (0..idx.n_objects())
        .map(|i| compose_functors(&g.functors[i], &f.functors[i]).map(Arc::new))
        .collect::<Result<_>>()?;
    let (x, x1, x2) = (&f.source, &f.target, &g.target);
    let mut psi = Vec::with_capacity(idx.n_morphisms());
    for a in 0..idx.n_morphisms() {
        let (i, j) = (idx.source(a), idx.target(a));
        let c2 = &x2.fibers[j];
        let mut comps = Vec::new();
        for o in 0..x.fibers[i].n_objects() {
            let fo = f.functors[i].obj(o);
            let s = x2.arrows[a].obj(g.functors[i].obj(fo));
            let m = g.functors[j].obj(x1.arrows[a].obj(fo));
            let t = g.functors[j].obj(f.functors[j].obj(x.arrows[a].obj(o)));
            let gpsi = g.functors[j].map(x1.arrows[a].obj(fo), f.functors[j].obj(x.arrows[a].obj(o)), &f.psi[a][o]);
            comps.push(c2.compose(s, m, t, &gpsi, &g.psi[a][fo]));
        }
        psi.push(comps);
    }
    LeftTransformation::new(x.clone(), x2.clone(), functors, psi)
}

/// `Δ(E): Δ(C) → Δ(C')` with `ψ(a) = id_E`.
pub fn diagonal_functor(e: &KFunctor, index: Arc<IndexCat>) -> LeftTransformation {
    let s = Arc::new(diagonal(e.source().clone(), index.clone()));
    let t = Arc::new(diagonal(e.target().clone(), index.clone()));
    let fe = Arc::new(e.clone());
    LeftTransformation::with_identity_psi(s, t, vec![fe; index.n_objects()]).expect("diagonal of a functor")
}

/// A 2-morphism `ζ: (F, ψ) ⇒ (F', ψ')`; `zeta[i][x] ∈ X'(i)(F(i)x, F'(i)x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoMorphism {
    source: Arc<LeftTransformation>,
    target: Arc<LeftTransformation>,
    zeta: Vec<Vec<Elem>>,
}

impl TwoMorphism {
    pub fn new(source: Arc<LeftTransformation>, target: Arc<LeftTransformation>, zeta: Vec<Vec<Elem>>) -> Result<Self> {
        if *source.source != *target.source || *source.target != *target.target {
            return Err(Error::SourceTargetMismatch("left transformations are not parallel".into()));
        }
        let xt = &source.target;
        for (i, comps) in zeta.iter().enumerate() {
            for (x, z) in comps.iter().enumerate() {
                if z.len() != xt.fibers[i].dim(source.functors[i].obj(x), target.functors[i].obj(x)) {
                    return Err(Error::DimensionMismatch("zeta component".into()));
                }
            }
        }
        Ok(TwoMorphism { source, target, zeta })
    }

    pub fn identity(f: Arc<LeftTransformation>) -> Self {
        let zeta = (0..f.functors.len())
            .map(|i| {
                let fi = &f.functors[i];
                (0..fi.source().n_objects()).map(|x| fi.target().identity(fi.obj(x)).clone()).collect()
            })
            .collect();
        TwoMorphism { source: f.clone(), target: f, zeta }
    }

    pub fn source(&self) -> &Arc<LeftTransformation> {
        &self.source
    }

    pub fn target(&self) -> &Arc<LeftTransformation> {
        &self.target
    }

    pub fn zeta(&self, i: usize, x: usize) -> &Elem {
        &self.zeta[i][x]
    }

    /// `ζ(i)` as a natural transformation `F(i) ⇒ F'(i)`.
    pub fn component(&self, i: usize) -> Result<NatTransf> {
        NatTransf::new(self.source.functors[i].clone(), self.target.functors[i].clone(), self.zeta[i].clone())
    }
}

/// Naturality of each `ζ(i)` and the square `ψ'(a) ∘ X'(a)ζ(i) = ζ(j)X(a) ∘ ψ(a)`.
pub fn check_two_morphism(z: &TwoMorphism) -> Report {
    let mut r = Report::new("2-morphism");
    let (f, g) = (&z.source, &z.target);
    let (xs, xt) = (&f.source, &f.target);
    let idx = &xs.index;
    for i in 0..idx.n_objects() {
        match z.component(i).map(|n| n.check()) {
            Ok(nr) if nr.passed() => {}
            Ok(nr) => r.fail(format!("zeta({}): {}", idx.objects()[i], nr.first_failure().unwrap())),
            Err(e) => r.fail(format!("zeta({}): {e}", idx.objects()[i])),
        }
    }
    for a in 0..idx.n_morphisms() {
        let (i, j) = (idx.source(a), idx.target(a));
        let cj = &xt.fibers[j];
        for x in 0..xs.fibers[i].n_objects() {
            let s = xt.arrows[a].obj(f.functors[i].obj(x));
            let m1 = xt.arrows[a].obj(g.functors[i].obj(x));
            let t = g.functors[j].obj(xs.arrows[a].obj(x));
            let xz = xt.arrows[a].map(f.functors[i].obj(x), g.functors[i].obj(x), &z.zeta[i][x]);
            let lhs = cj.compose(s, m1, t, &g.psi[a][x], &xz);
            let m2 = f.functors[j].obj(xs.arrows[a].obj(x));
            let rhs = cj.compose(s, m2, t, &z.zeta[j][xs.arrows[a].obj(x)], &f.psi[a][x]);
            if lhs != rhs {
                r.fail(format!(
                    "compatibility square fails for {} at {}",
                    idx.morphism(a).name,
                    xs.fibers[i].object_name(x)
                ));
                return r;
            }
        }
    }
    r
}

/// `Δ(α) = (α)_i` for a natural transformation `α: E ⇒ E'`.
pub fn diagonal_nat(alpha: &NatTransf, index: Arc<IndexCat>) -> TwoMorphism {
    let s = Arc::new(diagonal_functor(alpha.source(), index.clone()));
    let t = Arc::new(diagonal_functor(alpha.target(), index.clone()));
    let zeta = vec![alpha.components().to_vec(); index.n_objects()];
    TwoMorphism::new(s, t, zeta).expect("diagonal of a natural transformation")
}

/// A quasi-inverse of a functor that is an equivalence, with unit and counit.
#[derive(Clone, Debug)]
pub struct FunctorEquivalence {
    pub inverse: KFunctor,
    /// `ν_x: x → G F x`
    pub unit: Vec<Elem>,
    /// `ε_y: F G y → y`
    pub counit: Vec<Elem>,
}

/// Fully faithful by rank, essentially surjective by iso search; on success
/// builds the quasi-inverse choosing for each target object the first
/// isomorphic image.
pub fn functor_equivalence(f: &KFunctor) -> std::result::Result<FunctorEquivalence, String> {
    let (s, t) = (f.source(), f.target());
    let n = s.n_objects();
    for x in 0..n {
        for y in 0..n {
            let m = f.hom_map(x, y);
            if m.rows() != m.cols() || m.rank() != m.cols() {
                return Err(format!("not fully faithful on ({}, {})", s.object_name(x), s.object_name(y)));
            }
        }
    }
    let mut pre = Vec::with_capacity(t.n_objects());
    for y in 0..t.n_objects() {
        let found = (0..n).find_map(|x| {
            if f.obj(x) == y {
                return Some((x, t.identity(y).clone(), t.identity(y).clone()));
            }
            None
        });
        let found = found.or_else(|| (0..n).find_map(|x| find_iso(t, f.obj(x), y).map(|(u, v)| (x, u, v))));
        match found {
            Some(v) => pre.push(v),
            None => return Err(format!("{} is not in the essential image", t.object_name(y))),
        }
    }
    let inv_maps: Vec<crate::field::Matrix> = (0..n * n)
        .map(|k| f.hom_map(k / n, k % n).inverse().expect("fully faithful"))
        .collect();
    let object_map: Vec<usize> = pre.iter().map(|p| p.0).collect();
    let ts = t.clone();
    let g = KFunctor::from_images(t.clone(), s.clone(), object_map.clone(), |y, y2, k| {
        let (x1, u1, _) = &pre[y];
        let (x2, _, v2) = &pre[y2];
        // u2⁻¹ ∘ g ∘ u1 : F x1 → F x2
        let g = ts.basis_elem(y, y2, k);
        let a = ts.compose(f.obj(*x1), y, y2, &g, u1);
        let b = ts.compose(f.obj(*x1), y2, f.obj(*x2), v2, &a);
        inv_maps[x1 * n + x2].apply(&b)
    })
    .map_err(|e| e.to_string())?;
    let counit = pre.iter().map(|p| p.1.clone()).collect();
    let unit = (0..n)
        .map(|x| {
            let y = f.obj(x);
            let (x1, _, v) = &pre[y];
            inv_maps[x * n + x1].apply(v)
        })
        .collect();
    Ok(FunctorEquivalence { inverse: g, unit, counit })
}

/// The equivalence criterion: every `F(i)` is an equivalence and every `ψ(a)` is invertible.
pub fn check_equivalence(f: &LeftTransformation) -> Report {
    let mut r = Report::new("equivalence");
    let idx = &f.source.index;
    for i in 0..idx.n_objects() {
        if let Err(e) = functor_equivalence(&f.functors[i]) {
            r.fail(format!("F({}) {e}", idx.objects()[i]));
        }
    }
    if let Some((a, x)) = f.first_non_invertible_psi() {
        r.fail(format!(
            "psi({}) is not invertible at {}",
            idx.morphism(a).name,
            f.source.fibers[idx.source(a)].object_name(x)
        ));
    }
    r
}

/// A quasi-inverse `(G, ψ^G): X' → X` of an equivalence, where
/// `ψ^G(a)_y = G(j)(X'(a)(ε_y) ∘ ψ(a)⁻¹_{G(i)y}) ∘ ν_{X(a)G(i)y}`.
pub fn quasi_inverse(f: &LeftTransformation) -> Result<LeftTransformation> {
    let idx = f.source.index.clone();
    let eqs: Vec<FunctorEquivalence> = (0..idx.n_objects())
        .map(|i| functor_equivalence(&f.functors[i]).map_err(Error::Invalid))
        .collect::<Result<_>>()?;
    let (x, xp) = (&f.source, &f.target);
    let mut psi = Vec::with_capacity(idx.n_morphisms());
    for a in 0..idx.n_morphisms() {
        let (i, j) = (idx.source(a), idx.target(a));
        let (gi, gj) = (&eqs[i].inverse, &eqs[j].inverse);
        let (cj, cpj) = (&x.fibers[j], &xp.fibers[j]);
        let mut comps = Vec::new();
        for y in 0..xp.fibers[i].n_objects() {
            let giy = gi.obj(y);
            let w = x.arrows[a].obj(giy);
            let s = xp.arrows[a].obj(f.functors[i].obj(giy));
            let t = f.functors[j].obj(w);
            let pinv = inverse_of(cpj, s, t, &f.psi[a][giy])
                .ok_or_else(|| Error::invalid(format!("psi({}) is not invertible", idx.morphism(a).name)))?;
            let xe = xp.arrows[a].map(f.functors[i].obj(giy), y, &eqs[i].counit[y]);
            let h = cpj.compose(t, s, xp.arrows[a].obj(y), &xe, &pinv);
            let gh = gj.map(t, xp.arrows[a].obj(y), &h);
            let c = cj.compose(w, gj.obj(t), gj.obj(xp.arrows[a].obj(y)), &gh, &eqs[j].unit[w]);
            comps.push(c);
        }
        psi.push(comps);
    }
    let functors = eqs.into_iter().map(|e| Arc::new(e.inverse)).collect();
    LeftTransformation::new(xp.clone(), x.clone(), functors, psi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;
    use crate::quiver::{build_category, Arrow, QuiverPresentation};

    fn one_dim(field: FieldSpec) -> Arc<FinKCat> {
        Arc::new(build_category(&QuiverPresentation::new(vec!["*".into()], vec![]), field).unwrap())
    }

    fn chain(n: usize) -> Arc<IndexCat> {
        let names = ["a", "b", "c", "d"];
        let v = (1..=n).map(|i| i.to_string()).collect();
        let arrows = (0..n - 1).map(|k| (names[k].to_string(), k, k + 1)).collect();
        Arc::new(IndexCat::free_on_acyclic_quiver(v, arrows).unwrap())
    }

    #[test]
    fn diagonal_is_colax() {
        let x = diagonal(one_dim(FieldSpec::rationals()), chain(3));
        assert!(check_colax(&x).passed());
        assert!(x.is_strict());
    }

    #[test]
    fn scaled_theta_breaks_cocycle() {
        let f = FieldSpec::rationals();
        let c = one_dim(f);
        let idx = chain(4);
        let x = diagonal(c.clone(), idx.clone());
        let (a, b) = (idx.morphism_index("a").unwrap(), idx.morphism_index("b").unwrap());
        let eta = (0..4).map(|i| vec![x.eta(i, 0).clone()]).collect();
        let bad = ColaxFunctor::new(idx.clone(), x.fibers().to_vec(), x.arrows.clone(), eta, |q, p| {
            let s = if (q, p) == (b, a) { f.from_i64(2) } else { f.one() };
            vec![vec![s]]
        })
        .unwrap();
        let r = check_colax(&bad);
        assert!(!r.passed());
        assert!(r.first_failure().unwrap().contains("cocycle"), "{}", r.render_text());
    }

    #[test]
    fn twisted_is_colax_and_not_strict() {
        let f = FieldSpec::prime(5).unwrap();
        let mut q = QuiverPresentation::new(vec!["1".into()], vec![Arrow { name: "t".into(), source: 0, target: 0 }]);
        q.relations = vec![vec![(num_rational::BigRational::from_integer(1.into()), vec![0, 0])]];
        let c = Arc::new(build_category(&q, f).unwrap());
        let idx = chain(3);
        let x = diagonal(c, idx.clone());
        let u: Vec<Vec<Elem>> = (0..idx.n_morphisms()).map(|a| vec![vec![f.from_i64(1 + a as i64 % 4), f.from_i64(2)]]).collect();
        let y = x.twist(&u).unwrap();
        assert!(check_colax(&y).passed(), "{}", check_colax(&y).render_text());
        assert!(!y.is_strict());
    }

    #[test]
    fn identity_transformation_checks() {
        let x = Arc::new(diagonal(one_dim(FieldSpec::rationals()), chain(2)));
        let id = LeftTransformation::identity(x.clone());
        assert!(id.check().passed());
        assert!(check_equivalence(&id).passed());
        let c = compose_left_transformations(&id, &id).unwrap();
        assert_eq!(c, id);
        let z = TwoMorphism::identity(Arc::new(id));
        assert!(check_two_morphism(&z).passed());
    }

    #[test]
    fn non_invertible_psi_is_reported() {
        let f = FieldSpec::rationals();
        let x = Arc::new(diagonal(one_dim(f), chain(2)));
        let id = LeftTransformation::identity(x.clone());
        let a = x.index().morphism_index("a").unwrap();
        let mut psi = id.psi.clone();
        psi[a][0] = vec![f.zero()];
        let bad = LeftTransformation::new(x.clone(), x, id.functors.clone(), psi).unwrap();
        let r = check_equivalence(&bad);
        assert!(!r.passed());
        assert!(r.first_failure().unwrap().contains("psi(a)"));
    }
}
