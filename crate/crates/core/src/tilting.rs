//! Tilting subcategories of `K^b(prj C)`: orthogonality, K₀ classes,
//! thick-generation certificates, endomorphism categories, and tilting colax functors.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::Arc;

use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::colax::{check_colax, ColaxFunctor};
use crate::error::{Error, Result};
use crate::field::{span_basis, FieldSpec, Matrix, Scalar};
use crate::fincat::{same_cat, Elem, FinKCat, KFunctor};
use crate::homotopy::{
    cone, homotopy_equivalent, inverse_in_k, is_null_homotopic, minimize, split_summand, support_window, verify_equivalence,
    ChainMap, Equivalence, HomSpace, ProjComplex,
};
use crate::pseudo::kb_prj;
use crate::quiver::{build_category, functor_from_arrows, QuiverPresentation};
use crate::report::Report;

/// A finite list of complexes over one base category.
#[derive(Clone, Debug)]
pub struct TiltingSubcategoryData {
    base: Arc<FinKCat>,
    names: Vec<String>,
    objects: Vec<Arc<ProjComplex>>,
}

impl TiltingSubcategoryData {
    pub fn new(base: Arc<FinKCat>, names: Vec<String>, objects: Vec<Arc<ProjComplex>>) -> Result<Self> {
        if names.len() != objects.len() {
            return Err(Error::DimensionMismatch("one name per object".into()));
        }
        if objects.iter().any(|u| !same_cat(u.base(), &base)) {
            return Err(Error::BaseMismatch);
        }
        Ok(TiltingSubcategoryData { base, names, objects })
    }

    /// All projective stalks in degree 0.
    pub fn stalks(base: Arc<FinKCat>) -> Self {
        let names = base.objects().iter().map(|x| format!("P{x}")).collect();
        let objects = (0..base.n_objects()).map(|x| Arc::new(ProjComplex::stalk(base.clone(), x, 0))).collect();
        TiltingSubcategoryData { base, names, objects }
    }

    pub fn base(&self) -> &Arc<FinKCat> {
        &self.base
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn objects(&self) -> &[Arc<ProjComplex>] {
        &self.objects
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }
}

/// Data-level key of a complex: terms and differential entries.
pub fn complex_key(u: &ProjComplex) -> String {
    let parts: Vec<String> = u.degrees().map(|k| format!("{:?}{:?}", u.term(k), u.d(k).flatten())).collect();
    format!("{}:{}", u.lo(), parts.join(";"))
}

fn canonical_order(t: &TiltingSubcategoryData) -> Vec<usize> {
    let mut order: Vec<usize> = (0..t.len()).collect();
    order.sort_by_cached_key(|&j| (complex_key(&t.objects[j]), t.names[j].clone()));
    order
}

#[derive(Clone, Debug)]
pub struct PresiltingViolation {
    pub source: usize,
    pub target: usize,
    pub shift: i64,
    pub dim: usize,
    pub witness: ChainMap,
}

/// Every nonzero `Hom(U, V[n])` with `n ≠ 0`, in a canonical order.
pub fn presilting_violations(t: &TiltingSubcategoryData) -> Result<Vec<PresiltingViolation>> {
    let order = canonical_order(t);
    let pairs: Vec<(usize, usize)> = order.iter().flat_map(|&s| order.iter().map(move |&u| (s, u))).collect();
    let found: Vec<Vec<PresiltingViolation>> = pairs
        .par_iter()
        .map(|&(s, u)| {
            let (a, b) = (&t.objects[s], &t.objects[u]);
            let mut out = Vec::new();
            if let Some((lo, hi)) = support_window(a, b) {
                for n in lo..=hi {
                    if n == 0 {
                        continue;
                    }
                    let h = HomSpace::new(a, b, n)?;
                    if h.dim() > 0 {
                        out.push(PresiltingViolation { source: s, target: u, shift: n, dim: h.dim(), witness: h.basis().remove(0) });
                    }
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    Ok(found.into_iter().flatten().collect())
}

pub fn check_presilting(t: &TiltingSubcategoryData) -> Result<Report> {
    let mut r = Report::new("presilting");
    let v = presilting_violations(t)?;
    for x in &v {
        r.fail(format!("Hom({}, {}[{}]) has dimension {}", t.names[x.source], t.names[x.target], x.shift, x.dim));
    }
    r.value("objects", t.len());
    r.value("violations", v.len());
    Ok(r)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct K0Matrix {
    /// Row `j`, column `x`: alternating multiplicity of `P_x` in `T_j`.
    pub rows: Vec<Vec<i64>>,
    pub rank: usize,
    pub det: Option<i64>,
    pub unimodular: bool,
}

fn integer_matrix(rows: &[Vec<i64>], cols: usize) -> Matrix {
    let q = FieldSpec::rationals();
    let rows = rows.iter().map(|r| r.iter().map(|&v| q.from_i64(v)).collect()).collect::<Vec<_>>();
    if rows.is_empty() {
        return Matrix::zeros(q, 0, cols);
    }
    Matrix::from_rows(q, rows).expect("rectangular")
}

pub fn k0_matrix(t: &TiltingSubcategoryData) -> K0Matrix {
    let n = t.base.n_objects();
    let rows: Vec<Vec<i64>> = t.objects.iter().map(|u| u.k0_class()).collect();
    let m = integer_matrix(&rows, n);
    let rank = m.rank();
    let det = (rows.len() == n)
        .then(|| m.det().ok().and_then(|d| d.to_integer()).and_then(|d| d.to_i64()))
        .flatten();
    let unimodular = det.is_some_and(|d| d.abs() == 1);
    K0Matrix { rows, rank, det, unimodular }
}

/// One step of a generation script; indices refer to earlier steps.
#[derive(Clone, Debug, PartialEq)]
pub enum CertOp {
    Take(usize),
    Shift { of: usize, by: i64 },
    /// Cone of the degree-0 map with the given coordinates in `Hom(from, to)`.
    Cone { from: usize, to: usize, coords: Vec<Scalar> },
    /// A summand of the minimized complex, given by its positions `(degree, slot)`.
    Summand { of: usize, keep: Vec<(i64, usize)> },
}

/// A script whose last object is homotopy equivalent to the stalk `P_target`.
#[derive(Clone, Debug, PartialEq)]
pub struct GenerationCertificate {
    pub target: usize,
    pub ops: Vec<CertOp>,
}

impl GenerationCertificate {
    /// Nesting depth of cones and summands.
    pub fn depth(&self) -> usize {
        let mut d = Vec::with_capacity(self.ops.len());
        for op in &self.ops {
            let v = match op {
                CertOp::Take(_) => 0,
                CertOp::Shift { of, .. } => d[*of],
                CertOp::Cone { from, to, .. } => d[*from].max(d[*to]) + 1,
                CertOp::Summand { of, .. } => d[*of] + 1,
            };
            d.push(v);
        }
        d.last().copied().unwrap_or(0)
    }
}

#[derive(Clone, Debug)]
enum StepMaps {
    Plain,
    Cone(ChainMap),
    Summand { sub: Arc<ProjComplex>, incl: ChainMap, retr: ChainMap },
}

/// The objects built by a script, with the maps that built them.
#[derive(Clone, Debug)]
pub struct Replay {
    pub objects: Vec<Arc<ProjComplex>>,
    steps: Vec<StepMaps>,
    /// `last ≃ P_target`, if it holds.
    pub witness: Option<Equivalence>,
}

fn check_index(i: usize, len: usize) -> Result<()> {
    if i >= len {
        return Err(Error::Invalid(format!("certificate step refers to step {i} before it exists")));
    }
    Ok(())
}

pub fn replay(cert: &GenerationCertificate, t: &TiltingSubcategoryData) -> Result<Replay> {
    let mut objects: Vec<Arc<ProjComplex>> = Vec::new();
    let mut steps = Vec::new();
    for op in &cert.ops {
        let (obj, step) = match op {
            CertOp::Take(j) => {
                let u = t.objects.get(*j).ok_or_else(|| Error::Invalid(format!("no tilting object {j}")))?;
                (u.clone(), StepMaps::Plain)
            }
            CertOp::Shift { of, by } => {
                check_index(*of, objects.len())?;
                (Arc::new(objects[*of].shift(*by)), StepMaps::Plain)
            }
            CertOp::Cone { from, to, coords } => {
                check_index(*from, objects.len())?;
                check_index(*to, objects.len())?;
                let h = HomSpace::new(&objects[*from], &objects[*to], 0)?;
                if coords.len() != h.dim() {
                    return Err(Error::DimensionMismatch(format!("cone map needs {} coordinates", h.dim())));
                }
                let f = h.element(coords);
                (Arc::new(cone(&f)?), StepMaps::Cone(f))
            }
            CertOp::Summand { of, keep } => {
                check_index(*of, objects.len())?;
                let m = minimize(&objects[*of])?;
                let (sub, incl, retr) = split_summand(&m.complex, keep)?;
                let incl = ChainMap::compose(&m.from_min, &incl)?;
                let retr = ChainMap::compose(&retr, &m.to_min)?;
                let e = ChainMap::compose(&retr, &incl)?.sub(&ChainMap::identity(sub.clone()))?;
                if !is_null_homotopic(&e)? {
                    return Err(Error::Invalid("summand positions do not split off".into()));
                }
                (sub.clone(), StepMaps::Summand { sub, incl, retr })
            }
        };
        objects.push(obj);
        steps.push(step);
    }
    let last = objects.last().ok_or_else(|| Error::Invalid("empty certificate".into()))?;
    let stalk = Arc::new(ProjComplex::stalk(t.base.clone(), cert.target, 0));
    let witness = homotopy_equivalent(last, &stalk)?;
    Ok(Replay { objects, steps, witness })
}

/// Replays a certificate through `F: C → D`: every op is redone over `D`
/// starting from `images[j] = F(T_j)`, and every witness is rechecked there.
pub fn transport_certificate(
    cert: &GenerationCertificate,
    t: &TiltingSubcategoryData,
    f: &KFunctor,
    images: &[Arc<ProjComplex>],
) -> Result<Report> {
    let mut r = Report::new(format!("transported certificate for {}", t.base.object_name(cert.target)));
    let src = replay(cert, t)?;
    let Some(w) = &src.witness else {
        r.fail("certificate does not replay in its own fiber");
        return Ok(r);
    };
    let mut built: Vec<Arc<ProjComplex>> = Vec::with_capacity(cert.ops.len());
    for (op, step) in cert.ops.iter().zip(&src.steps) {
        let obj = match (op, step) {
            (CertOp::Take(j), _) => {
                let img = images.get(*j).ok_or_else(|| Error::Invalid(format!("no image for tilting object {j}")))?;
                if **img != t.objects[*j].map_functor(f)? {
                    r.fail(format!("image of {} is not the transported object", t.names[*j]));
                }
                img.clone()
            }
            (CertOp::Shift { of, by }, _) => Arc::new(built[*of].shift(*by)),
            (CertOp::Cone { from, to, .. }, StepMaps::Cone(m)) => {
                let fm = m.map_functor(f)?.retarget(built[*from].clone(), built[*to].clone())?;
                Arc::new(cone(&fm)?)
            }
            (CertOp::Summand { of, .. }, StepMaps::Summand { sub, incl, retr }) => {
                let sub = Arc::new(sub.map_functor(f)?);
                let incl = incl.map_functor(f)?.retarget(sub.clone(), built[*of].clone())?;
                let retr = retr.map_functor(f)?.retarget(built[*of].clone(), sub.clone())?;
                let e = ChainMap::compose(&retr, &incl)?.sub(&ChainMap::identity(sub.clone()))?;
                if !is_null_homotopic(&e)? {
                    r.fail("transported summand does not split off");
                }
                sub
            }
            _ => unreachable!("replay records one step per op"),
        };
        built.push(obj);
    }
    let last = built.last().unwrap().clone();
    let stalk = Arc::new(ProjComplex::stalk(f.target().clone(), f.obj(cert.target), 0));
    let fw = w.forward.map_functor(f)?.retarget(last.clone(), stalk.clone())?;
    let bw = w.backward.map_functor(f)?.retarget(stalk, last)?;
    if !verify_equivalence(&fw, &bw)? {
        r.fail("transported witness is not a homotopy equivalence");
    }
    r.value("steps", cert.ops.len());
    Ok(r)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchCaps {
    pub depth: usize,
    pub size: usize,
}

impl Default for SearchCaps {
    fn default() -> Self {
        SearchCaps { depth: 3, size: 400 }
    }
}

struct Entry {
    ops: Vec<CertOp>,
    object: Arc<ProjComplex>,
    min: Arc<ProjComplex>,
    depth: usize,
}

fn splice(a: &[CertOp], b: &[CertOp]) -> Vec<CertOp> {
    let off = a.len();
    let mut ops = a.to_vec();
    ops.extend(b.iter().map(|op| match op {
        CertOp::Take(j) => CertOp::Take(*j),
        CertOp::Shift { of, by } => CertOp::Shift { of: of + off, by: *by },
        CertOp::Cone { from, to, coords } => CertOp::Cone { from: from + off, to: to + off, coords: coords.clone() },
        CertOp::Summand { of, keep } => CertOp::Summand { of: of + off, keep: keep.clone() },
    }));
    ops
}

fn stalk_degree(m: &ProjComplex, x: usize) -> Option<i64> {
    (m.lo() == m.hi() && m.term(m.lo()) == [x]).then(|| m.lo())
}

fn finish(mut ops: Vec<CertOp>, deg: i64, target: usize) -> GenerationCertificate {
    if deg != 0 {
        let of = ops.len() - 1;
        ops.push(CertOp::Shift { of, by: deg });
    }
    GenerationCertificate { target, ops }
}

fn in_k0_span(t: &TiltingSubcategoryData, x: usize) -> bool {
    let n = t.base.n_objects();
    let mut rows: Vec<Vec<i64>> = t.objects.iter().map(|u| u.k0_class()).collect();
    let r0 = integer_matrix(&rows, n).rank();
    let mut e = vec![0i64; n];
    e[x] = 1;
    rows.push(e);
    integer_matrix(&rows, n).rank() == r0
}

/// Breadth-first search for a script building `P_x` from `T`, by cones of basis
/// maps in all shifts and summands of minimized objects. `Ok(None)` means
/// nothing was found within the depth cap; exceeding the size cap is an error.
pub fn find_generation_certificate(t: &TiltingSubcategoryData, x: usize, caps: SearchCaps) -> Result<Option<GenerationCertificate>> {
    if !in_k0_span(t, x) {
        return Ok(None);
    }
    let mut pool: Vec<Entry> = Vec::new();
    let mut seen: HashSet<String> = HashSet::new();
    for (j, u) in t.objects.iter().enumerate() {
        let m = minimize(u)?.complex;
        if let Some(d) = stalk_degree(&m, x) {
            return Ok(Some(finish(vec![CertOp::Take(j)], d, x)));
        }
        if seen.insert(complex_key(&m)) {
            pool.push(Entry { ops: vec![CertOp::Take(j)], object: u.clone(), min: m, depth: 0 });
        }
    }
    for level in 1..=caps.depth {
        // candidate descriptions first, in a fixed order
        let mut cands: Vec<(Vec<CertOp>, usize)> = Vec::new();
        let fresh = |e: &Entry| e.depth + 1 == level;
        for (ia, a) in pool.iter().enumerate() {
            for (ib, b) in pool.iter().enumerate() {
                if !fresh(a) && !fresh(b) {
                    continue;
                }
                let Some((lo, hi)) = support_window(&a.object, &b.object) else { continue };
                for n in lo..=hi {
                    let dim = HomSpace::new(&a.object, &b.object, n)?.dim();
                    for k in 0..dim {
                        let mut ops = splice(&pool[ia].ops, &pool[ib].ops);
                        let (la, mut lb) = (a.ops.len() - 1, ops.len() - 1);
                        if n != 0 {
                            ops.push(CertOp::Shift { of: lb, by: n });
                            lb = ops.len() - 1;
                        }
                        let field = t.base.field();
                        let coords = (0..dim).map(|i| if i == k { field.one() } else { field.zero() }).collect();
                        ops.push(CertOp::Cone { from: la, to: lb, coords });
                        cands.push((ops, level));
                    }
                }
            }
            if fresh(a) {
                let comps = crate::homotopy::connected_components(&a.min);
                if comps.len() > 1 {
                    for keep in comps {
                        let mut ops = a.ops.clone();
                        ops.push(CertOp::Summand { of: ops.len() - 1, keep });
                        cands.push((ops, level));
                    }
                }
            }
        }
        let built: Vec<(Arc<ProjComplex>, Arc<ProjComplex>)> = cands
            .par_iter()
            .map(|(ops, _)| {
                let cert = GenerationCertificate { target: x, ops: ops.clone() };
                let obj = last_object(&cert, t)?;
                let m = minimize(&obj)?.complex;
                Ok((obj, m))
            })
            .collect::<Result<_>>()?;
        for ((ops, depth), (object, min)) in cands.into_iter().zip(built) {
            if let Some(d) = stalk_degree(&min, x) {
                return Ok(Some(finish(ops, d, x)));
            }
            if min.is_zero() || !seen.insert(complex_key(&min)) {
                continue;
            }
            if seen.len() > caps.size {
                return Err(Error::CapExceeded(caps.size));
            }
            pool.push(Entry { ops, object, min, depth });
        }
    }
    Ok(None)
}

fn last_object(cert: &GenerationCertificate, t: &TiltingSubcategoryData) -> Result<Arc<ProjComplex>> {
    let mut objects: Vec<Arc<ProjComplex>> = Vec::new();
    for op in &cert.ops {
        let obj = match op {
            CertOp::Take(j) => t.objects[*j].clone(),
            CertOp::Shift { of, by } => Arc::new(objects[*of].shift(*by)),
            CertOp::Cone { from, to, coords } => {
                let h = HomSpace::new(&objects[*from], &objects[*to], 0)?;
                Arc::new(cone(&h.element(coords))?)
            }
            CertOp::Summand { of, keep } => split_summand(&minimize(&objects[*of])?.complex, keep)?.0,
        };
        objects.push(obj);
    }
    Ok(objects.pop().expect("nonempty script"))
}

/// `End(T)` as a finite k-category whose objects are the listed complexes.
#[derive(Clone, Debug)]
pub struct EndCategory {
    cat: Arc<FinKCat>,
    objects: Vec<Arc<ProjComplex>>,
    homs: Vec<HomSpace>,
}

impl EndCategory {
    pub fn cat(&self) -> &Arc<FinKCat> {
        &self.cat
    }

    pub fn objects(&self) -> &[Arc<ProjComplex>] {
        &self.objects
    }

    pub fn hom(&self, s: usize, t: usize) -> &HomSpace {
        &self.homs[s * self.objects.len() + t]
    }

    /// A chain map representing `e ∈ End(T)(s, t)`.
    pub fn realize(&self, s: usize, t: usize, e: &[Scalar]) -> ChainMap {
        self.hom(s, t).element(e)
    }

    pub fn coords(&self, s: usize, t: usize, f: &ChainMap) -> Result<Elem> {
        let f = f.retarget(self.objects[s].clone(), self.objects[t].clone())?;
        self.hom(s, t).coords(&f)
    }
}

pub fn end_category(t: &TiltingSubcategoryData) -> Result<EndCategory> {
    let n = t.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|s| (0..n).map(move |u| (s, u))).collect();
    let homs: Vec<HomSpace> = pairs.par_iter().map(|&(s, u)| HomSpace::new(&t.objects[s], &t.objects[u], 0)).collect::<Result<_>>()?;
    let bases: Vec<Vec<ChainMap>> = homs.iter().map(HomSpace::basis).collect();
    let labels: Vec<Vec<String>> =
        pairs.iter().map(|&(s, u)| (0..homs[s * n + u].dim()).map(|k| format!("{}>{}#{k}", t.names[s], t.names[u])).collect()).collect();
    let identities: Vec<Elem> = (0..n).map(|s| homs[s * n + s].coords(&ChainMap::identity(t.objects[s].clone()))).collect::<Result<_>>()?;
    let triples: Vec<(usize, usize, usize)> = (0..n).flat_map(|x| (0..n).flat_map(move |y| (0..n).map(move |z| (x, y, z)))).collect();
    let tables: Vec<Vec<Elem>> = triples
        .par_iter()
        .map(|&(x, y, z)| {
            let mut out = Vec::new();
            for g in &bases[y * n + z] {
                for f in &bases[x * n + y] {
                    out.push(homs[x * n + z].coords(&ChainMap::compose(g, f)?)?);
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let cat = FinKCat::from_tables(t.base.field(), t.names.clone(), labels, identities, |x, y, z, g, f| {
        let dxy = homs[x * n + y].dim();
        tables[(x * n + y) * n + z][g * dxy + f].clone()
    })?;
    Ok(EndCategory { cat: Arc::new(cat), objects: t.objects.clone(), homs })
}

/// Bases of the Jacobson radical `rad(s, t)`, by the trace form (characteristic 0 only).
pub fn radical(e: &FinKCat) -> Result<Vec<Vec<Elem>>> {
    let field = e.field();
    if !field.is_rationals() {
        return Err(Error::FieldNotRationals);
    }
    let n = e.n_objects();
    let trace = |t: usize, z: &[Scalar]| -> Scalar {
        let mut acc = field.zero();
        for w in 0..n {
            let m = e.post_matrix(w, t, t, z);
            for i in 0..m.rows() {
                acc = &acc + m.get(i, i);
            }
        }
        acc
    };
    let mut out = Vec::with_capacity(n * n);
    for s in 0..n {
        for t in 0..n {
            let (dst, dts) = (e.dim(s, t), e.dim(t, s));
            if dts == 0 {
                out.push((0..dst).map(|i| e.basis_elem(s, t, i)).collect());
                continue;
            }
            let rows: Vec<Vec<Scalar>> = (0..dts)
                .map(|y| (0..dst).map(|x| trace(t, &e.compose(t, s, t, &e.basis_elem(s, t, x), &e.basis_elem(t, s, y)))).collect())
                .collect();
            out.push(Matrix::from_rows(field, rows)?.nullspace());
        }
    }
    Ok(out)
}

fn radical_square(e: &FinKCat, rad: &[Vec<Elem>]) -> Vec<Vec<Elem>> {
    let n = e.n_objects();
    let mut out = Vec::with_capacity(n * n);
    for s in 0..n {
        for t in 0..n {
            let mut v = Vec::new();
            for w in 0..n {
                for f in &rad[s * n + w] {
                    for g in &rad[w * n + t] {
                        v.push(e.compose(s, w, t, g, f));
                    }
                }
            }
            out.push(span_basis(e.field(), v).0);
        }
    }
    out
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct PresentationHints {
    /// Vertex `v` of the presentation goes to object `objects[v]`; identity order if absent.
    pub objects: Option<Vec<usize>>,
    pub arrows: BTreeMap<String, Elem>,
}

#[derive(Clone, Debug)]
pub struct PresentationMatch {
    /// An isomorphism from the presented category onto `E`.
    pub functor: Option<KFunctor>,
    pub report: Report,
}

/// Looks for an isomorphism from the category presented by `p` onto `E`.
pub fn match_presentation(e: &Arc<FinKCat>, p: &QuiverPresentation, hints: &PresentationHints) -> Result<PresentationMatch> {
    let field = e.field();
    let rad = radical(e)?;
    let rad2 = radical_square(e, &rad);
    let n = e.n_objects();
    let mut r = Report::new("presentation match");
    let omap = hints.objects.clone().unwrap_or_else(|| (0..p.vertices.len()).collect());
    let bijective = omap.len() == n && p.vertices.len() == n && {
        let mut s = omap.clone();
        s.sort_unstable();
        s.dedup();
        s.len() == n && s.iter().all(|&x| x < n)
    };
    if !bijective {
        r.fail("vertices do not correspond bijectively to objects");
        return Ok(PresentationMatch { functor: None, report: r });
    }
    let mut complements: HashMap<(usize, usize), Vec<Elem>> = HashMap::new();
    for s in 0..n {
        for t in 0..n {
            let (basis2, _) = span_basis(field, rad2[s * n + t].clone());
            let k2 = basis2.len();
            let mut acc = basis2;
            let mut extra = Vec::new();
            for v in &rad[s * n + t] {
                let mut trial = acc.clone();
                trial.push(v.clone());
                let (b, _) = span_basis(field, trial);
                if b.len() > acc.len() {
                    acc.push(v.clone());
                    extra.push(v.clone());
                }
            }
            let _ = k2;
            complements.insert((s, t), extra);
        }
    }
    for vs in 0..n {
        for vt in 0..n {
            let count = p.arrows.iter().filter(|a| a.source == vs && a.target == vt).count();
            let (s, t) = (omap[vs], omap[vt]);
            let have = complements[&(s, t)].len();
            if count != have {
                r.fail(format!(
                    "{} arrows {} -> {} but rad/rad^2 has dimension {have}",
                    count, p.vertices[vs], p.vertices[vt]
                ));
            }
        }
    }
    if !r.passed() {
        return Ok(PresentationMatch { functor: None, report: r });
    }
    let mut used: HashMap<(usize, usize), usize> = HashMap::new();
    let mut images = Vec::with_capacity(p.arrows.len());
    for a in &p.arrows {
        let (s, t) = (omap[a.source], omap[a.target]);
        let img = match hints.arrows.get(&a.name) {
            Some(h) => {
                if h.len() != e.dim(s, t) {
                    return Err(Error::DimensionMismatch(format!("hint for arrow {}", a.name)));
                }
                h.clone()
            }
            None => {
                let k = used.entry((s, t)).or_insert(0);
                let v = complements[&(s, t)][*k].clone();
                *k += 1;
                v
            }
        };
        images.push(img);
    }
    let src = Arc::new(build_category(p, field)?);
    let f = match functor_from_arrows(src, e.clone(), omap, &images) {
        Ok(f) => f,
        Err(err) => {
            r.fail(format!("arrow images do not define a functor: {err}"));
            return Ok(PresentationMatch { functor: None, report: r });
        }
    };
    if !f.is_fully_faithful() {
        r.fail("induced functor is not bijective on morphisms");
        return Ok(PresentationMatch { functor: None, report: r });
    }
    r.value("arrows", p.arrows.len());
    Ok(PresentationMatch { functor: Some(f), report: r })
}

/// Fiberwise tilting data together with an I-equivariant inclusion into `K^b(prj X)`.
#[derive(Clone, Debug)]
pub struct TiltingColaxCertificate {
    pub colax: Arc<ColaxFunctor>,
    pub fibers: Vec<TiltingSubcategoryData>,
    /// `object_maps[a][u]`: the object `T(a)U` of the target fiber.
    pub object_maps: Vec<Vec<usize>>,
    /// `rho[a][u]: K^b(prj X(a))(σU) → σ(T(a)U)`.
    pub rho: Vec<Vec<ChainMap>>,
    /// Supplied scripts, per fiber and representable; missing ones are searched for.
    pub certificates: Vec<Vec<Option<GenerationCertificate>>>,
}

impl TiltingColaxCertificate {
    /// `ρ` as identities; needs `X(a)` to send each `U` to `T(a)U` exactly.
    pub fn with_identity_rho(colax: Arc<ColaxFunctor>, fibers: Vec<TiltingSubcategoryData>, object_maps: Vec<Vec<usize>>) -> Result<Self> {
        let idx = colax.index().clone();
        let mut rho = Vec::with_capacity(idx.n_morphisms());
        for a in 0..idx.n_morphisms() {
            let (i, j) = (idx.source(a), idx.target(a));
            let mut row = Vec::new();
            for (u, obj) in fibers[i].objects.iter().enumerate() {
                let img = Arc::new(obj.map_functor(colax.arrow(a))?);
                let tgt = fibers[j].objects.get(object_maps[a][u]).ok_or_else(|| Error::Invalid("object map out of range".into()))?;
                let id = ChainMap::identity(img.clone());
                row.push(id.retarget(img, tgt.clone()).map_err(|_| {
                    Error::Invalid(format!("{} is not sent to {} on the nose", fibers[i].names[u], fibers[j].names[object_maps[a][u]]))
                })?);
            }
            rho.push(row);
        }
        let certificates = fibers.iter().map(|t| vec![None; t.base.n_objects()]).collect();
        Ok(TiltingColaxCertificate { colax, fibers, object_maps, rho, certificates })
    }
}

/// The colax functor `T` carried by a checked certificate.
#[derive(Clone, Debug)]
pub struct TiltingColax {
    pub functor: Arc<ColaxFunctor>,
    pub ends: Vec<Arc<EndCategory>>,
    /// One replayable script per fiber and representable.
    pub certificates: Vec<Vec<GenerationCertificate>>,
    pub rho_inv: Vec<Vec<ChainMap>>,
}

#[derive(Clone, Debug)]
pub struct TiltingColaxCheck {
    pub report: Report,
    pub tilting: Option<TiltingColax>,
}

/// Certifies the generation clause for one fiber.
pub fn generation_report(
    t: &TiltingSubcategoryData,
    supplied: &[Option<GenerationCertificate>],
    caps: SearchCaps,
) -> Result<(Report, Vec<Option<GenerationCertificate>>)> {
    let mut r = Report::new("generation");
    let mut found = Vec::with_capacity(t.base.n_objects());
    let mut max_depth = 0;
    for x in 0..t.base.n_objects() {
        let name = t.base.object_name(x);
        let cert = match supplied.get(x).cloned().flatten() {
            Some(c) => Some(c),
            None => match find_generation_certificate(t, x, caps) {
                Ok(c) => c,
                Err(Error::CapExceeded(n)) => {
                    r.fail(format!("missing P{name}: search exceeded {n} objects"));
                    found.push(None);
                    continue;
                }
                Err(e) => return Err(e),
            },
        };
        match cert {
            Some(c) if c.target == x && replay(&c, t)?.witness.is_some() => {
                max_depth = max_depth.max(c.depth());
                found.push(Some(c));
            }
            Some(_) => {
                r.fail(format!("the certificate for P{name} does not replay"));
                found.push(None);
            }
            None => {
                r.fail(format!("missing P{name}: no certificate within depth {}", caps.depth));
                found.push(None);
            }
        }
    }
    r.value("max_depth", max_depth);
    Ok((r, found))
}

pub fn check_tilting_colax(cert: &TiltingColaxCertificate, caps: SearchCaps) -> Result<TiltingColaxCheck> {
    let x = &cert.colax;
    let cr = check_colax(x);
    if !cr.passed() {
        return Err(Error::Invalid(format!("not a colax functor: {}", cr.first_failure().unwrap_or_default())));
    }
    let idx = x.index().clone();
    if cert.fibers.len() != idx.n_objects() || cert.object_maps.len() != idx.n_morphisms() || cert.rho.len() != idx.n_morphisms() {
        return Err(Error::DimensionMismatch("tilting data per object and morphism of the index".into()));
    }
    let mut report = Report::new("tilting colax functor");
    let mut certs_found = Vec::new();
    for (i, t) in cert.fibers.iter().enumerate() {
        if !same_cat(t.base(), x.fiber(i)) {
            return Err(Error::BaseMismatch);
        }
        let mut fr = Report::new(format!("fiber {}", idx.objects()[i]));
        let pres = check_presilting(t)?;
        let k0 = k0_matrix(t);
        let mut kr = Report::new("k0");
        kr.value("rows", format!("{:?}", k0.rows));
        kr.value("det", k0.det.map(|d| d.to_string()).unwrap_or_else(|| "none".into()));
        if !k0.unimodular {
            kr.fail("K0 matrix is not unimodular");
        }
        let supplied = cert.certificates.get(i).cloned().unwrap_or_default();
        let (gr, found) = generation_report(t, &supplied, caps)?;
        let status = match (pres.passed(), k0.unimodular, gr.passed()) {
            (true, true, true) => "certified tilting",
            (true, true, false) => "presilting + unimodular but generation uncertified",
            (true, false, _) => "presilting, K0 not unimodular",
            _ => "not presilting",
        };
        fr.value("status", status);
        fr.child(pres);
        fr.child(kr);
        fr.child(gr);
        report.child(fr);
        certs_found.push(found);
    }

    let vx = kb_prj(x.clone())?;
    let mut rr = Report::new("equivariant inclusion");
    let mut rho_inv: Vec<Vec<ChainMap>> = Vec::new();
    let mut all_inv = true;
    for a in 0..idx.n_morphisms() {
        let (i, j) = (idx.source(a), idx.target(a));
        let mut row = Vec::new();
        for (u, sigma_u) in cert.fibers[i].objects.iter().enumerate() {
            let tu = cert.object_maps[a][u];
            let rho = &cert.rho[a][u];
            let name = format!("rho({}) at {}", idx.morphism(a).name, cert.fibers[i].names[u]);
            let Some(target) = cert.fibers[j].objects.get(tu) else {
                return Err(Error::Invalid(format!("{name}: object map out of range")));
            };
            if **rho.source() != *vx.arrow_obj(a, sigma_u)? || **rho.target() != **target {
                rr.fail(format!("{name} has the wrong endpoints"));
                all_inv = false;
                continue;
            }
            match inverse_in_k(rho)? {
                Some(inv) => row.push(inv),
                None => {
                    rr.fail(format!("{name} is not invertible"));
                    all_inv = false;
                }
            }
        }
        rho_inv.push(row);
    }
    if !all_inv {
        report.child(rr);
        return Ok(TiltingColaxCheck { report, tilting: None });
    }

    let ends: Vec<Arc<EndCategory>> = cert.fibers.iter().map(|t| end_category(t).map(Arc::new)).collect::<Result<_>>()?;
    // T(a)u := ρ(a)_t ∘ K^b(prj X(a))(σu) ∘ ρ(a)_s⁻¹
    let mut arrows = Vec::with_capacity(idx.n_morphisms());
    for a in 0..idx.n_morphisms() {
        let (i, j) = (idx.source(a), idx.target(a));
        let (ei, ej) = (&ends[i], &ends[j]);
        let n = ei.objects.len();
        let mut table: HashMap<(usize, usize), Vec<Elem>> = HashMap::new();
        for s in 0..n {
            for t in 0..n {
                let mut imgs = Vec::new();
                for u in ei.hom(s, t).basis() {
                    let xu = vx.arrow_mor(a, &u)?;
                    let xu = xu.retarget(cert.rho[a][s].source().clone(), cert.rho[a][t].source().clone())?;
                    let m = ChainMap::compose(&cert.rho[a][t], &ChainMap::compose(&xu, &rho_inv[a][s])?)?;
                    imgs.push(ej.coords(cert.object_maps[a][s], cert.object_maps[a][t], &m)?);
                }
                table.insert((s, t), imgs);
            }
        }
        let f = KFunctor::from_images(ei.cat.clone(), ej.cat.clone(), cert.object_maps[a].clone(), |s, t, k| table[&(s, t)][k].clone())?;
        let fr = f.check();
        if !fr.passed() {
            rr.fail(format!("T({}) is not a functor: {}", idx.morphism(a).name, fr.first_failure().unwrap_or_default()));
        }
        // naturality of ρ on generators
        for s in 0..n {
            for t in 0..n {
                for (k, u) in ei.hom(s, t).basis().into_iter().enumerate() {
                    let xu = vx.arrow_mor(a, &u)?.retarget(cert.rho[a][s].source().clone(), cert.rho[a][t].source().clone())?;
                    let lhs = ChainMap::compose(&cert.rho[a][t], &xu)?;
                    let tu = ej.realize(cert.object_maps[a][s], cert.object_maps[a][t], &table[&(s, t)][k]);
                    let rhs = ChainMap::compose(&tu, &cert.rho[a][s])?;
                    if !is_null_homotopic(&lhs.sub(&rhs)?)? {
                        rr.fail(format!("rho({}) is not natural on a generator {} -> {}", idx.morphism(a).name, ei.cat.object_name(s), ei.cat.object_name(t)));
                    }
                }
            }
        }
        arrows.push(Arc::new(f));
    }
    // η^T_i U = η^{VX}_i(σU) ∘ ρ(id_i)_U⁻¹
    let mut eta = Vec::with_capacity(idx.n_objects());
    for i in 0..idx.n_objects() {
        let id = idx.id(i);
        let mut row = Vec::new();
        for (u, sigma_u) in cert.fibers[i].objects.iter().enumerate() {
            let e = vx.eta(i, sigma_u)?;
            let e = e.retarget(cert.rho[id][u].source().clone(), sigma_u.clone())?;
            let m = ChainMap::compose(&e, &rho_inv[id][u])?;
            row.push(ends[i].coords(cert.object_maps[id][u], u, &m)?);
        }
        eta.push(row);
    }
    // θ^T_{b,a}U = ρ(b)_{T(a)U} ∘ VX(b)(ρ(a)_U) ∘ θ^{VX}_{b,a}(σU) ∘ ρ(ba)_U⁻¹
    let mut theta: HashMap<(usize, usize), Vec<Elem>> = HashMap::new();
    for (b, a) in idx.composable_pairs() {
        let ba = idx.compose(b, a).unwrap();
        let (i, k) = (idx.source(a), idx.target(b));
        let mut row = Vec::new();
        for (u, sigma_u) in cert.fibers[i].objects.iter().enumerate() {
            let tau = cert.object_maps[a][u];
            let th = vx.theta(b, a, sigma_u)?;
            let xb_rho = vx.arrow_mor(b, &cert.rho[a][u])?;
            let th = th.retarget(cert.rho[ba][u].source().clone(), xb_rho.source().clone())?;
            let xb_rho = xb_rho.retarget(xb_rho.source().clone(), cert.rho[b][tau].source().clone())?;
            let m = ChainMap::compose(&cert.rho[b][tau], &ChainMap::compose(&xb_rho, &ChainMap::compose(&th, &rho_inv[ba][u])?)?)?;
            let s_obj = cert.object_maps[ba][u];
            let t_obj = cert.object_maps[b][tau];
            row.push(ends[k].coords(s_obj, t_obj, &m)?);
        }
        theta.insert((b, a), row);
    }
    let fibers: Vec<Arc<FinKCat>> = ends.iter().map(|e| e.cat.clone()).collect();
    let t = ColaxFunctor::new(idx.clone(), fibers, arrows, eta, |b, a| theta[&(b, a)].clone())?;
    let tr = check_colax(&t);
    if !tr.passed() {
        rr.fail(format!("T is not colax: {}", tr.first_failure().unwrap_or_default()));
    }
    report.child(rr);
    let tilting = report.passed().then(|| TiltingColax {
        functor: Arc::new(t),
        ends,
        certificates: certs_found.into_iter().map(|v| v.into_iter().map(|c| c.expect("passed")).collect()).collect(),
        rho_inv,
    });
    if tilting.is_some() {
        report.value("verdict", "certified tilting");
    }
    Ok(TiltingColaxCheck { report, tilting })
}
