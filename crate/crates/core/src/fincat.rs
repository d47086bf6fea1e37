//! Finite-dimensional k-linear categories given by structure constants,
//! k-functors between them and natural transformations.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::field::{add_mul, FieldSpec, Matrix, Scalar};
use crate::local::LocalStructure;
use crate::quiver::QuiverInfo;
use crate::report::Report;

/// Coordinates of a morphism in a Hom basis.
pub type Elem = Vec<Scalar>;

/// Sparse coordinates.
pub type Sparse = Vec<(usize, Scalar)>;

#[derive(Clone, Debug)]
pub struct FinKCat {
    field: FieldSpec,
    objects: Vec<String>,
    labels: Vec<Vec<String>>,
    // comp[(x*n + y)*n + z][g * dim(x,y) + f] = g∘f in the basis of Hom(x,z)
    comp: Vec<Vec<Sparse>>,
    identities: Vec<Elem>,
    presentation: Option<Arc<QuiverInfo>>,
    label_index: Vec<HashMap<String, (usize, usize)>>,
    local: OnceLock<Option<Arc<LocalStructure>>>,
}

impl PartialEq for FinKCat {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field
            && self.objects == other.objects
            && self.labels == other.labels
            && self.comp == other.comp
            && self.identities == other.identities
    }
}

impl Eq for FinKCat {}

/// Pointer-or-structural equality for shared categories.
pub fn same_cat(a: &Arc<FinKCat>, b: &Arc<FinKCat>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl FinKCat {
    /// Assembles a category from its tables. `mul(x, y, z, g, f)` returns
    /// the coordinates of `g∘f` for basis elements `f ∈ Hom(x,y)`,
    /// `g ∈ Hom(y,z)`. Axioms are not checked here; see [`FinKCat::check_axioms`].
    pub fn from_tables(
        field: FieldSpec,
        objects: Vec<String>,
        labels: Vec<Vec<String>>,
        identities: Vec<Elem>,
        mut mul: impl FnMut(usize, usize, usize, usize, usize) -> Elem,
    ) -> Result<Self> {
        let n = objects.len();
        if labels.len() != n * n || identities.len() != n {
            return Err(Error::DimensionMismatch("category tables".into()));
        }
        for x in 0..n {
            if identities[x].len() != labels[x * n + x].len() {
                return Err(Error::DimensionMismatch(format!("identity of {}", objects[x])));
            }
        }
        let mut comp = Vec::with_capacity(n * n * n);
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    let dxy = labels[x * n + y].len();
                    let dyz = labels[y * n + z].len();
                    let dxz = labels[x * n + z].len();
                    let mut t = Vec::with_capacity(dxy * dyz);
                    for g in 0..dyz {
                        for f in 0..dxy {
                            let v = if dxz == 0 { Vec::new() } else { mul(x, y, z, g, f) };
                            if !v.is_empty() && v.len() != dxz {
                                return Err(Error::DimensionMismatch("composition table".into()));
                            }
                            t.push(v.into_iter().enumerate().filter(|(_, s)| !s.is_zero()).collect());
                        }
                    }
                    comp.push(t);
                }
            }
        }
        Ok(Self::assemble(field, objects, labels, comp, identities, None))
    }

    pub(crate) fn assemble(
        field: FieldSpec,
        objects: Vec<String>,
        labels: Vec<Vec<String>>,
        comp: Vec<Vec<Sparse>>,
        identities: Vec<Elem>,
        presentation: Option<Arc<QuiverInfo>>,
    ) -> Self {
        let n = objects.len();
        let mut label_index = vec![HashMap::new(); n];
        for x in 0..n {
            for y in 0..n {
                for (i, l) in labels[x * n + y].iter().enumerate() {
                    label_index[x].entry(l.clone()).or_insert((y, i));
                }
            }
        }
        FinKCat { field, objects, labels, comp, identities, presentation, label_index, local: OnceLock::new() }
    }

    /// Residue characters of all objects, computed once; `None` unless the
    /// category is basic with local endomorphism rings.
    pub fn local_structure(&self) -> Option<&Arc<LocalStructure>> {
        self.local.get_or_init(|| LocalStructure::of(self).ok().map(Arc::new)).as_ref()
    }

    /// The quiver presentation this category was built from, if any.
    pub fn quiver(&self) -> Option<&QuiverInfo> {
        self.presentation.as_deref()
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn n_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn object_name(&self, x: usize) -> &str {
        &self.objects[x]
    }

    pub fn object_index(&self, name: &str) -> Option<usize> {
        self.objects.iter().position(|o| o == name)
    }

    pub fn dim(&self, x: usize, y: usize) -> usize {
        self.labels[x * self.n_objects() + y].len()
    }

    pub fn labels(&self, x: usize, y: usize) -> &[String] {
        &self.labels[x * self.n_objects() + y]
    }

    /// Finds a basis element by its label and source.
    pub fn label_lookup(&self, source: usize, label: &str) -> Option<(usize, usize)> {
        self.label_index[source].get(label).copied()
    }

    pub fn total_dim(&self) -> usize {
        self.labels.iter().map(Vec::len).sum()
    }

    /// `dim Hom(x, y)` as a square table, row = source.
    pub fn dim_table(&self) -> Vec<Vec<usize>> {
        let n = self.n_objects();
        (0..n).map(|x| (0..n).map(|y| self.dim(x, y)).collect()).collect()
    }

    pub fn identity(&self, x: usize) -> &Elem {
        &self.identities[x]
    }

    pub fn zero(&self, x: usize, y: usize) -> Elem {
        vec![self.field.zero(); self.dim(x, y)]
    }

    pub fn basis_elem(&self, x: usize, y: usize, i: usize) -> Elem {
        let mut e = self.zero(x, y);
        e[i] = self.field.one();
        e
    }

    /// Structure constants of `g∘f` for basis elements.
    pub fn compose_basis(&self, x: usize, y: usize, z: usize, g: usize, f: usize) -> &Sparse {
        let n = self.n_objects();
        &self.comp[(x * n + y) * n + z][g * self.dim(x, y) + f]
    }

    /// `g∘f` for `f ∈ Hom(x,y)`, `g ∈ Hom(y,z)`.
    pub fn compose(&self, x: usize, y: usize, z: usize, g: &[Scalar], f: &[Scalar]) -> Elem {
        let mut out = self.zero(x, z);
        if out.is_empty() {
            return out;
        }
        let n = self.n_objects();
        let table = &self.comp[(x * n + y) * n + z];
        let dxy = self.dim(x, y);
        for (gi, gc) in g.iter().enumerate() {
            if gc.is_zero() {
                continue;
            }
            for (fi, fc) in f.iter().enumerate() {
                if fc.is_zero() {
                    continue;
                }
                let c = gc * fc;
                for (k, s) in &table[gi * dxy + fi] {
                    add_mul(&mut out[*k], &c, s);
                }
            }
        }
        out
    }

    /// Matrix of `f ↦ g∘f : Hom(x,y) → Hom(x,z)` for a fixed `g ∈ Hom(y,z)`.
    pub fn post_matrix(&self, x: usize, y: usize, z: usize, g: &[Scalar]) -> Matrix {
        let cols: Vec<Elem> = (0..self.dim(x, y))
            .map(|f| self.compose(x, y, z, g, &self.basis_elem(x, y, f)))
            .collect();
        Matrix::from_columns(self.field, self.dim(x, z), &cols)
    }

    /// Matrix of `g ↦ g∘f : Hom(y,z) → Hom(x,z)` for a fixed `f ∈ Hom(x,y)`.
    pub fn pre_matrix(&self, x: usize, y: usize, z: usize, f: &[Scalar]) -> Matrix {
        let cols: Vec<Elem> = (0..self.dim(y, z))
            .map(|g| self.compose(x, y, z, &self.basis_elem(y, z, g), f))
            .collect();
        Matrix::from_columns(self.field, self.dim(x, z), &cols)
    }

    /// Left multiplication by `e ∈ End(x)` on `End(x)`.
    pub fn left_mult(&self, x: usize, e: &[Scalar]) -> Matrix {
        self.post_matrix(x, x, x, e)
    }

    /// Associativity and unit laws on all basis triples.
    pub fn check_axioms(&self) -> Report {
        let mut r = Report::new("category axioms");
        let n = self.n_objects();
        for x in 0..n {
            for y in 0..n {
                for f in 0..self.dim(x, y) {
                    let fe = self.basis_elem(x, y, f);
                    if self.compose(x, y, y, self.identity(y), &fe) != fe
                        || self.compose(x, x, y, &fe, self.identity(x)) != fe
                    {
                        r.fail(format!("unit law fails on {}", self.labels(x, y)[f]));
                        return r;
                    }
                }
            }
        }
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    for w in 0..n {
                        for f in 0..self.dim(x, y) {
                            let fe = self.basis_elem(x, y, f);
                            for g in 0..self.dim(y, z) {
                                let ge = self.basis_elem(y, z, g);
                                let gf = self.compose(x, y, z, &ge, &fe);
                                for h in 0..self.dim(z, w) {
                                    let he = self.basis_elem(z, w, h);
                                    let l = self.compose(x, z, w, &he, &gf);
                                    let hg = self.compose(y, z, w, &he, &ge);
                                    let rr = self.compose(x, y, w, &hg, &fe);
                                    if l != rr {
                                        r.fail(format!(
                                            "associativity fails on ({})∘({})∘({})",
                                            self.labels(z, w)[h],
                                            self.labels(y, z)[g],
                                            self.labels(x, y)[f]
                                        ));
                                        return r;
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        r
    }

    /// Full subcategory on the given objects, in the given order.
    pub fn full_subcategory(&self, keep: &[usize]) -> FinKCat {
        let labels = keep
            .iter()
            .flat_map(|&x| keep.iter().map(move |&y| (x, y)))
            .map(|(x, y)| self.labels(x, y).to_vec())
            .collect();
        let objects = keep.iter().map(|&x| self.objects[x].clone()).collect();
        let identities = keep.iter().map(|&x| self.identity(x).clone()).collect();
        FinKCat::from_tables(self.field, objects, labels, identities, |a, b, c, g, f| {
            let (x, y, z) = (keep[a], keep[b], keep[c]);
            self.compose(x, y, z, &self.basis_elem(y, z, g), &self.basis_elem(x, y, f))
        })
        .expect("subcategory tables are consistent")
    }
}

/// A k-linear functor, given by its object map and one matrix per Hom space.
#[derive(Clone, Debug)]
pub struct KFunctor {
    source: Arc<FinKCat>,
    target: Arc<FinKCat>,
    object_map: Vec<usize>,
    hom_maps: Vec<Matrix>,
}

impl PartialEq for KFunctor {
    fn eq(&self, other: &Self) -> bool {
        same_cat(&self.source, &other.source)
            && same_cat(&self.target, &other.target)
            && self.object_map == other.object_map
            && self.hom_maps == other.hom_maps
    }
}

impl KFunctor {
    pub fn new(
        source: Arc<FinKCat>,
        target: Arc<FinKCat>,
        object_map: Vec<usize>,
        hom_maps: Vec<Matrix>,
    ) -> Result<Self> {
        let n = source.n_objects();
        if object_map.len() != n || hom_maps.len() != n * n {
            return Err(Error::DimensionMismatch("functor data".into()));
        }
        if object_map.iter().any(|&y| y >= target.n_objects()) {
            return Err(Error::invalid("functor object map out of range"));
        }
        for x in 0..n {
            for y in 0..n {
                let m = &hom_maps[x * n + y];
                if m.rows() != target.dim(object_map[x], object_map[y]) || m.cols() != source.dim(x, y) {
                    return Err(Error::DimensionMismatch(format!(
                        "functor matrix for ({}, {})",
                        source.object_name(x),
                        source.object_name(y)
                    )));
                }
            }
        }
        Ok(KFunctor { source, target, object_map, hom_maps })
    }

    /// Builds a functor from the image of every basis element.
    pub fn from_images(
        source: Arc<FinKCat>,
        target: Arc<FinKCat>,
        object_map: Vec<usize>,
        mut image: impl FnMut(usize, usize, usize) -> Elem,
    ) -> Result<Self> {
        let n = source.n_objects();
        let mut hom_maps = Vec::with_capacity(n * n);
        for x in 0..n {
            for y in 0..n {
                let (fx, fy) = (object_map[x], object_map[y]);
                let cols: Vec<Elem> = (0..source.dim(x, y)).map(|i| image(x, y, i)).collect();
                if cols.iter().any(|c| c.len() != target.dim(fx, fy)) {
                    return Err(Error::DimensionMismatch("functor image".into()));
                }
                hom_maps.push(Matrix::from_columns(source.field(), target.dim(fx, fy), &cols));
            }
        }
        Self::new(source, target, object_map, hom_maps)
    }

    pub fn identity(c: Arc<FinKCat>) -> Self {
        let n = c.n_objects();
        let hom_maps = (0..n * n).map(|i| Matrix::identity(c.field(), c.dim(i / n, i % n))).collect();
        KFunctor { source: c.clone(), target: c, object_map: (0..n).collect(), hom_maps }
    }

    pub fn source(&self) -> &Arc<FinKCat> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FinKCat> {
        &self.target
    }

    pub fn obj(&self, x: usize) -> usize {
        self.object_map[x]
    }

    pub fn object_map(&self) -> &[usize] {
        &self.object_map
    }

    pub fn hom_map(&self, x: usize, y: usize) -> &Matrix {
        &self.hom_maps[x * self.source.n_objects() + y]
    }

    /// Image of `f ∈ Hom(x,y)`.
    pub fn map(&self, x: usize, y: usize, f: &[Scalar]) -> Elem {
        self.hom_map(x, y).apply(f)
    }

    pub fn is_identity(&self) -> bool {
        same_cat(&self.source, &self.target)
            && self.object_map.iter().enumerate().all(|(i, &j)| i == j)
            && self.hom_maps.iter().all(Matrix::is_identity)
    }

    /// Preservation of identities and composition on basis pairs.
    pub fn check(&self) -> Report {
        let mut r = Report::new("functor");
        let (s, t) = (&self.source, &self.target);
        let n = s.n_objects();
        for x in 0..n {
            if self.map(x, x, s.identity(x)) != *t.identity(self.obj(x)) {
                r.fail(format!("F(id_{}) is not an identity", s.object_name(x)));
                return r;
            }
        }
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    for f in 0..s.dim(x, y) {
                        let fe = s.basis_elem(x, y, f);
                        let ff = self.map(x, y, &fe);
                        for g in 0..s.dim(y, z) {
                            let ge = s.basis_elem(y, z, g);
                            let lhs = self.map(x, z, &s.compose(x, y, z, &ge, &fe));
                            let rhs = t.compose(self.obj(x), self.obj(y), self.obj(z), &self.map(y, z, &ge), &ff);
                            if lhs != rhs {
                                r.fail(format!(
                                    "F({}∘{}) differs from F({})∘F({})",
                                    s.labels(y, z)[g],
                                    s.labels(x, y)[f],
                                    s.labels(y, z)[g],
                                    s.labels(x, y)[f]
                                ));
                                return r;
                            }
                        }
                    }
                }
            }
        }
        r
    }

    /// Whether every Hom matrix is injective.
    pub fn is_faithful(&self) -> bool {
        self.hom_maps.iter().all(|m| m.rank() == m.cols())
    }

    /// Whether every Hom matrix is bijective.
    pub fn is_fully_faithful(&self) -> bool {
        self.hom_maps.iter().all(|m| m.rows() == m.cols() && m.rank() == m.cols())
    }
}

/// `G∘F`.
pub fn compose_functors(g: &KFunctor, f: &KFunctor) -> Result<KFunctor> {
    if !same_cat(f.target(), g.source()) {
        return Err(Error::SourceTargetMismatch("target(F) differs from source(G)".into()));
    }
    let n = f.source().n_objects();
    let mut maps = Vec::with_capacity(n * n);
    for x in 0..n {
        for y in 0..n {
            maps.push(g.hom_map(f.obj(x), f.obj(y)).mul(f.hom_map(x, y))?);
        }
    }
    let om = (0..n).map(|x| g.obj(f.obj(x))).collect();
    KFunctor::new(f.source().clone(), g.target().clone(), om, maps)
}

/// A natural transformation `F ⇒ G`; component at `x` lies in `Hom(Fx, Gx)`.
#[derive(Clone, Debug, PartialEq)]
pub struct NatTransf {
    source: Arc<KFunctor>,
    target: Arc<KFunctor>,
    components: Vec<Elem>,
}

impl NatTransf {
    pub fn new(source: Arc<KFunctor>, target: Arc<KFunctor>, components: Vec<Elem>) -> Result<Self> {
        if !same_cat(source.source(), target.source()) || !same_cat(source.target(), target.target()) {
            return Err(Error::SourceTargetMismatch("functors are not parallel".into()));
        }
        let c = source.target();
        for (x, comp) in components.iter().enumerate() {
            if comp.len() != c.dim(source.obj(x), target.obj(x)) {
                return Err(Error::DimensionMismatch("natural transformation component".into()));
            }
        }
        if components.len() != source.source().n_objects() {
            return Err(Error::DimensionMismatch("component count".into()));
        }
        Ok(NatTransf { source, target, components })
    }

    pub fn identity(f: Arc<KFunctor>) -> Self {
        let comps = (0..f.source().n_objects()).map(|x| f.target().identity(f.obj(x)).clone()).collect();
        NatTransf { source: f.clone(), target: f, components: comps }
    }

    pub fn source(&self) -> &Arc<KFunctor> {
        &self.source
    }

    pub fn target(&self) -> &Arc<KFunctor> {
        &self.target
    }

    pub fn component(&self, x: usize) -> &Elem {
        &self.components[x]
    }

    pub fn components(&self) -> &[Elem] {
        &self.components
    }

    /// Checks every naturality square on basis morphisms.
    pub fn check(&self) -> Report {
        let mut r = Report::new("natural transformation");
        let (f, g) = (&self.source, &self.target);
        let c = f.source();
        let d = f.target();
        for x in 0..c.n_objects() {
            for y in 0..c.n_objects() {
                for i in 0..c.dim(x, y) {
                    let e = c.basis_elem(x, y, i);
                    let lhs = d.compose(f.obj(x), f.obj(y), g.obj(y), &self.components[y], &f.map(x, y, &e));
                    let rhs = d.compose(f.obj(x), g.obj(x), g.obj(y), &g.map(x, y, &e), &self.components[x]);
                    if lhs != rhs {
                        r.fail(format!(
                            "naturality square fails at {}: {} -> {}",
                            c.labels(x, y)[i],
                            c.object_name(x),
                            c.object_name(y)
                        ));
                        return r;
                    }
                }
            }
        }
        r
    }

    /// Vertical composite `β·α` for `α: F ⇒ G`, `β: G ⇒ H`.
    pub fn vcompose(beta: &NatTransf, alpha: &NatTransf) -> Result<NatTransf> {
        if *alpha.target != *beta.source {
            return Err(Error::SourceTargetMismatch("vertical composition".into()));
        }
        let d = alpha.source.target();
        let comps = (0..alpha.components.len())
            .map(|x| {
                d.compose(
                    alpha.source.obj(x),
                    alpha.target.obj(x),
                    beta.target.obj(x),
                    &beta.components[x],
                    &alpha.components[x],
                )
            })
            .collect();
        NatTransf::new(alpha.source.clone(), beta.target.clone(), comps)
    }

    /// Whether every component is invertible.
    pub fn is_invertible(&self) -> bool {
        let d = self.source.target();
        (0..self.components.len())
            .all(|x| inverse_of(d, self.source.obj(x), self.target.obj(x), &self.components[x]).is_some())
    }
}

/// Two-sided inverse of `f ∈ Hom(x,y)`, found by solving `g∘f = id_x` and
/// checking `f∘g = id_y`.
pub fn inverse_of(c: &FinKCat, x: usize, y: usize, f: &[Scalar]) -> Option<Elem> {
    if c.dim(x, x) == 0 && c.dim(y, y) == 0 {
        return Some(Vec::new());
    }
    let a = c.pre_matrix(x, y, x, f);
    let sol = a.solve(&Matrix::column(c.field(), c.identity(x).clone())).ok()??;
    let g = sol.particular.col(0);
    if c.compose(y, x, y, f, &g) == *c.identity(y) {
        Some(g)
    } else {
        // A left inverse of an isomorphism is unique, so any other solution
        // of g∘f = id is equally not a right inverse.
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// k × k as the endomorphism algebra of one object.
    pub(crate) fn split_algebra() -> FinKCat {
        let f = FieldSpec::rationals();
        let one = f.one();
        let zero = f.zero();
        FinKCat::from_tables(
            f,
            vec!["x".into()],
            vec![vec!["u".into(), "v".into()]],
            vec![vec![one.clone(), one.clone()]],
            |_, _, _, g, h| {
                let mut e = vec![zero.clone(), zero.clone()];
                if g == h {
                    e[g] = one.clone();
                }
                e
            },
        )
        .unwrap()
    }

    #[test]
    fn split_algebra_is_a_category() {
        let c = split_algebra();
        assert!(c.check_axioms().passed());
        assert_eq!(c.total_dim(), 2);
    }

    #[test]
    fn identity_functor_composes() {
        let c = Arc::new(split_algebra());
        let id = KFunctor::identity(c.clone());
        assert!(id.check().passed());
        assert_eq!(compose_functors(&id, &id).unwrap(), id);
    }
}
