//! Bounded complexes of finitely generated projectives over a finite
//! k-linear category, realized as formal sums of representables, and the
//! homotopy category built from them.
//!
//! A morphism between sums `⊕ C(−, x_c) → ⊕ C(−, y_r)` is a matrix whose
//! `(r, c)` entry lies in `C(x_c, y_r)`. Shifts follow `V[n]^k = V^{k+n}` with
//! differential `(−1)^n d_V`; a map `U → V[n]` is a family `f^k: U^k → V^{k+n}`
//! with `(−1)^n d_V f^k = f^{k+1} d_U`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{reduce_mod, span_basis, FieldSpec, Matrix, Scalar};
use crate::fincat::{inverse_of, same_cat, Elem, FinKCat, KFunctor};
use crate::local::{chi_eval, LocalStructure};
use crate::rng::{random_scalar, rng_for};

/// A finitely generated projective: the summand objects of `⊕ C(−, x)`.
pub type FgProj = Vec<usize>;

/// A morphism of projectives; `entries[r * src.len() + c] ∈ C(src[c], tgt[r])`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjMatrix {
    src: FgProj,
    tgt: FgProj,
    entries: Vec<Elem>,
}

impl ProjMatrix {
    pub fn zero(c: &FinKCat, src: &[usize], tgt: &[usize]) -> Self {
        let entries = tgt.iter().flat_map(|&y| src.iter().map(move |&x| c.zero(x, y))).collect();
        ProjMatrix { src: src.to_vec(), tgt: tgt.to_vec(), entries }
    }

    pub fn identity(c: &FinKCat, objs: &[usize]) -> Self {
        let mut m = Self::zero(c, objs, objs);
        for (k, &x) in objs.iter().enumerate() {
            m.set(k, k, c.identity(x).clone());
        }
        m
    }

    pub fn from_entries(c: &FinKCat, src: &[usize], tgt: &[usize], entries: Vec<Elem>) -> Result<Self> {
        if entries.len() != src.len() * tgt.len() {
            return Err(Error::DimensionMismatch("projective matrix size".into()));
        }
        for (r, &y) in tgt.iter().enumerate() {
            for (col, &x) in src.iter().enumerate() {
                if entries[r * src.len() + col].len() != c.dim(x, y) {
                    return Err(Error::DimensionMismatch(format!(
                        "entry ({r}, {col}) does not lie in Hom({}, {})",
                        c.object_name(x),
                        c.object_name(y)
                    )));
                }
            }
        }
        Ok(ProjMatrix { src: src.to_vec(), tgt: tgt.to_vec(), entries })
    }

    pub fn src(&self) -> &[usize] {
        &self.src
    }

    pub fn tgt(&self) -> &[usize] {
        &self.tgt
    }

    pub fn get(&self, r: usize, c: usize) -> &Elem {
        &self.entries[r * self.src.len() + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Elem) {
        let n = self.src.len();
        self.entries[r * n + c] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.iter().all(Scalar::is_zero))
    }

    /// `g ∘ f`.
    pub fn compose(c: &FinKCat, g: &ProjMatrix, f: &ProjMatrix) -> ProjMatrix {
        assert_eq!(g.src, f.tgt, "projective matrices are not composable");
        let mut out = ProjMatrix::zero(c, &f.src, &g.tgt);
        for (r, &z) in g.tgt.iter().enumerate() {
            for (col, &x) in f.src.iter().enumerate() {
                let mut acc = c.zero(x, z);
                for (m, &y) in f.tgt.iter().enumerate() {
                    let (gm, fm) = (g.get(r, m), f.get(m, col));
                    if gm.iter().all(Scalar::is_zero) || fm.iter().all(Scalar::is_zero) {
                        continue;
                    }
                    let p = c.compose(x, y, z, gm, fm);
                    for (a, b) in acc.iter_mut().zip(&p) {
                        *a = &*a + b;
                    }
                }
                out.set(r, col, acc);
            }
        }
        out
    }

    pub fn add(&self, other: &ProjMatrix) -> ProjMatrix {
        assert!(self.src == other.src && self.tgt == other.tgt);
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
            .collect();
        ProjMatrix { src: self.src.clone(), tgt: self.tgt.clone(), entries }
    }

    pub fn scale(&self, s: &Scalar) -> ProjMatrix {
        let entries = self.entries.iter().map(|e| e.iter().map(|x| x * s).collect()).collect();
        ProjMatrix { src: self.src.clone(), tgt: self.tgt.clone(), entries }
    }

    pub fn neg(&self) -> ProjMatrix {
        let entries = self.entries.iter().map(|e| e.iter().map(|x| -x).collect()).collect();
        ProjMatrix { src: self.src.clone(), tgt: self.tgt.clone(), entries }
    }

    pub fn sub(&self, other: &ProjMatrix) -> ProjMatrix {
        self.add(&other.neg())
    }

    /// Rows and columns picked by index.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> ProjMatrix {
        let src: Vec<usize> = cols.iter().map(|&c| self.src[c]).collect();
        let tgt: Vec<usize> = rows.iter().map(|&r| self.tgt[r]).collect();
        let entries = rows.iter().flat_map(|&r| cols.iter().map(move |&c| self.get(r, c).clone())).collect();
        ProjMatrix { src, tgt, entries }
    }

    /// `[[a, b], [c, d]]` with `a: s1 → t1`, `b: s2 → t1`, `c: s1 → t2`, `d: s2 → t2`.
    pub fn blocks(a: &ProjMatrix, b: &ProjMatrix, cm: &ProjMatrix, d: &ProjMatrix) -> ProjMatrix {
        assert!(a.src == cm.src && b.src == d.src && a.tgt == b.tgt && cm.tgt == d.tgt);
        let src: Vec<usize> = a.src.iter().chain(&b.src).copied().collect();
        let tgt: Vec<usize> = a.tgt.iter().chain(&cm.tgt).copied().collect();
        let mut entries = Vec::with_capacity(src.len() * tgt.len());
        for r in 0..a.tgt.len() {
            entries.extend((0..a.src.len()).map(|c| a.get(r, c).clone()));
            entries.extend((0..b.src.len()).map(|c| b.get(r, c).clone()));
        }
        for r in 0..cm.tgt.len() {
            entries.extend((0..cm.src.len()).map(|c| cm.get(r, c).clone()));
            entries.extend((0..d.src.len()).map(|c| d.get(r, c).clone()));
        }
        ProjMatrix { src, tgt, entries }
    }

    /// Coordinates of all entries, row-major.
    pub fn flatten(&self) -> Vec<Scalar> {
        self.entries.iter().flatten().cloned().collect()
    }

    pub fn unflatten(c: &FinKCat, src: &[usize], tgt: &[usize], v: &[Scalar]) -> ProjMatrix {
        let mut entries = Vec::with_capacity(src.len() * tgt.len());
        let mut pos = 0;
        for &y in tgt {
            for &x in src {
                let d = c.dim(x, y);
                entries.push(v[pos..pos + d].to_vec());
                pos += d;
            }
        }
        assert_eq!(pos, v.len());
        ProjMatrix { src: src.to_vec(), tgt: tgt.to_vec(), entries }
    }

    /// Entrywise image under a functor.
    pub fn map_functor(&self, f: &KFunctor) -> ProjMatrix {
        let src: Vec<usize> = self.src.iter().map(|&x| f.obj(x)).collect();
        let tgt: Vec<usize> = self.tgt.iter().map(|&y| f.obj(y)).collect();
        let entries = (0..self.tgt.len())
            .flat_map(|r| (0..self.src.len()).map(move |col| (r, col)))
            .map(|(r, col)| f.map(self.src[col], self.tgt[r], self.get(r, col)))
            .collect();
        ProjMatrix { src, tgt, entries }
    }

    /// Two-sided inverse, found by solving `g ∘ f = id` and checking `f ∘ g = id`.
    pub fn inverse(&self, c: &FinKCat) -> Option<ProjMatrix> {
        let (m, n) = (self.src.len(), self.tgt.len());
        if m == 0 && n == 0 {
            return Some(self.clone());
        }
        // unknown g: tgt → src; the linear map g ↦ g∘f
        let unknown_len: usize = self.src.iter().map(|&x| self.tgt.iter().map(|&y| c.dim(y, x)).sum::<usize>()).sum();
        let mut cols = Vec::with_capacity(unknown_len);
        for pos in 0..unknown_len {
            let mut v = vec![c.field().zero(); unknown_len];
            v[pos] = c.field().one();
            let g = ProjMatrix::unflatten(c, &self.tgt, &self.src, &v);
            cols.push(ProjMatrix::compose(c, &g, self).flatten());
        }
        let id = ProjMatrix::identity(c, &self.src).flatten();
        let a = Matrix::from_columns(c.field(), id.len(), &cols);
        let sol = a.solve(&Matrix::column(c.field(), id)).ok()??;
        let g = ProjMatrix::unflatten(c, &self.tgt, &self.src, &sol.particular.col(0));
        (ProjMatrix::compose(c, self, &g) == ProjMatrix::identity(c, &self.tgt)).then_some(g)
    }
}

fn sign(n: i64) -> i64 {
    if n.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// A bounded complex; `terms[t]` sits in degree `lo + t` and `diffs[t]`
/// maps it to `terms[t + 1]`.
#[derive(Clone, Debug)]
pub struct ProjComplex {
    base: Arc<FinKCat>,
    lo: i64,
    terms: Vec<FgProj>,
    diffs: Vec<ProjMatrix>,
}

impl PartialEq for ProjComplex {
    fn eq(&self, other: &Self) -> bool {
        same_cat(&self.base, &other.base) && self.lo == other.lo && self.terms == other.terms && self.diffs == other.diffs
    }
}

impl ProjComplex {
    /// Checks shapes and `d∘d = 0`; empty terms at either end are trimmed.
    pub fn new(base: Arc<FinKCat>, lo: i64, terms: Vec<FgProj>, diffs: Vec<ProjMatrix>) -> Result<Self> {
        if diffs.len() + 1 != terms.len().max(1) {
            return Err(Error::DimensionMismatch("one differential between consecutive terms".into()));
        }
        for (t, d) in diffs.iter().enumerate() {
            if d.src != terms[t] || d.tgt != terms[t + 1] {
                return Err(Error::DimensionMismatch(format!("differential in degree {}", lo + t as i64)));
            }
        }
        let u = Self::raw(base, lo, terms, diffs);
        for t in 0..u.diffs.len().saturating_sub(1) {
            if !ProjMatrix::compose(&u.base, &u.diffs[t + 1], &u.diffs[t]).is_zero() {
                return Err(Error::Invalid(format!("d∘d is nonzero in degree {}", u.lo + t as i64)));
            }
        }
        Ok(u)
    }

    fn raw(base: Arc<FinKCat>, mut lo: i64, mut terms: Vec<FgProj>, mut diffs: Vec<ProjMatrix>) -> Self {
        while terms.last().is_some_and(|t| t.is_empty()) {
            terms.pop();
            diffs.pop();
        }
        while terms.first().is_some_and(|t| t.is_empty()) {
            terms.remove(0);
            if !diffs.is_empty() {
                diffs.remove(0);
            }
            lo += 1;
        }
        if terms.is_empty() {
            lo = 0;
            diffs.clear();
        }
        ProjComplex { base, lo, terms, diffs }
    }

    pub fn zero(base: Arc<FinKCat>) -> Self {
        ProjComplex { base, lo: 0, terms: Vec::new(), diffs: Vec::new() }
    }

    /// `C(−, x)` concentrated in one degree.
    pub fn stalk(base: Arc<FinKCat>, x: usize, degree: i64) -> Self {
        ProjComplex { base, lo: degree, terms: vec![vec![x]], diffs: Vec::new() }
    }

    pub fn base(&self) -> &Arc<FinKCat> {
        &self.base
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    /// Highest nonzero degree (`lo - 1` for the zero complex).
    pub fn hi(&self) -> i64 {
        self.lo + self.terms.len() as i64 - 1
    }

    pub fn term(&self, k: i64) -> &[usize] {
        if k < self.lo || k > self.hi() {
            &[]
        } else {
            &self.terms[(k - self.lo) as usize]
        }
    }

    /// `d^k: U^k → U^{k+1}`.
    pub fn d(&self, k: i64) -> ProjMatrix {
        if k >= self.lo && k < self.hi() {
            self.diffs[(k - self.lo) as usize].clone()
        } else {
            ProjMatrix::zero(&self.base, self.term(k), self.term(k + 1))
        }
    }

    pub fn degrees(&self) -> std::ops::RangeInclusive<i64> {
        self.lo..=self.hi()
    }

    /// Dimension of the underlying module: `Σ_k Σ_{x ∈ U^k} Σ_y dim C(y, x)`.
    pub fn total_dim(&self) -> usize {
        let n = self.base.n_objects();
        self.terms.iter().flatten().map(|&x| (0..n).map(|y| self.base.dim(y, x)).sum::<usize>()).sum()
    }

    pub fn n_summands(&self) -> usize {
        self.terms.iter().map(Vec::len).sum()
    }

    /// `U[n]`: `U[n]^k = U^{k+n}`, differential `(−1)^n d`.
    pub fn shift(&self, n: i64) -> ProjComplex {
        let s = self.base.field().from_i64(sign(n));
        let diffs = self.diffs.iter().map(|d| d.scale(&s)).collect();
        ProjComplex { base: self.base.clone(), lo: if self.is_zero() { 0 } else { self.lo - n }, terms: self.terms.clone(), diffs }
    }

    pub fn direct_sum(&self, other: &ProjComplex) -> Result<ProjComplex> {
        if !same_cat(&self.base, &other.base) {
            return Err(Error::BaseMismatch);
        }
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        let lo = self.lo.min(other.lo);
        let hi = self.hi().max(other.hi());
        let c = &self.base;
        let terms: Vec<FgProj> = (lo..=hi).map(|k| self.term(k).iter().chain(other.term(k)).copied().collect()).collect();
        let diffs = (lo..hi)
            .map(|k| {
                let z1 = ProjMatrix::zero(c, other.term(k), self.term(k + 1));
                let z2 = ProjMatrix::zero(c, self.term(k), other.term(k + 1));
                ProjMatrix::blocks(&self.d(k), &z1, &z2, &other.d(k))
            })
            .collect();
        Ok(Self::raw(self.base.clone(), lo, terms, diffs))
    }

    /// Image under `prj(F)`: `C(−, x) ↦ C'(−, Fx)`, entries mapped by `F`.
    pub fn map_functor(&self, f: &KFunctor) -> Result<ProjComplex> {
        if !same_cat(f.source(), &self.base) {
            return Err(Error::BaseMismatch);
        }
        let terms = self.terms.iter().map(|t| t.iter().map(|&x| f.obj(x)).collect()).collect();
        let diffs = self.diffs.iter().map(|d| d.map_functor(f)).collect();
        Ok(ProjComplex { base: f.target().clone(), lo: self.lo, terms, diffs })
    }

    /// Σ_k (−1)^k [U^k] in the free group on the objects.
    pub fn k0_class(&self) -> Vec<i64> {
        let mut v = vec![0i64; self.base.n_objects()];
        for k in self.degrees() {
            for &x in self.term(k) {
                v[x] += sign(k);
            }
        }
        v
    }
}

/// A family `f^k: U^k → V^{k+n}` commuting with the differentials of `U` and `V[n]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainMap {
    source: Arc<ProjComplex>,
    target: Arc<ProjComplex>,
    shift: i64,
    // indexed by k - source.lo over the degrees of the source
    comps: Vec<ProjMatrix>,
}

impl ChainMap {
    pub fn new(source: Arc<ProjComplex>, target: Arc<ProjComplex>, shift: i64, comps: Vec<ProjMatrix>) -> Result<Self> {
        let f = Self::unchecked(source, target, shift, comps)?;
        if let Some(k) = f.first_commutation_failure() {
            return Err(Error::Invalid(format!("not a chain map in degree {k}")));
        }
        Ok(f)
    }

    fn unchecked(source: Arc<ProjComplex>, target: Arc<ProjComplex>, shift: i64, comps: Vec<ProjMatrix>) -> Result<Self> {
        if !same_cat(&source.base, &target.base) {
            return Err(Error::BaseMismatch);
        }
        if comps.len() != source.terms.len() {
            return Err(Error::DimensionMismatch("one component per source degree".into()));
        }
        for (t, m) in comps.iter().enumerate() {
            let k = source.lo + t as i64;
            if m.src != source.term(k) || m.tgt != target.term(k + shift) {
                return Err(Error::DimensionMismatch(format!("chain map component in degree {k}")));
            }
        }
        Ok(ChainMap { source, target, shift, comps })
    }

    fn first_commutation_failure(&self) -> Option<i64> {
        let c = &self.source.base;
        let s = c.field().from_i64(sign(self.shift));
        let n = self.shift;
        for k in self.source.lo - 1..=self.source.hi() {
            let lhs = ProjMatrix::compose(c, &self.target.d(k + n), &self.comp(k)).scale(&s);
            let rhs = ProjMatrix::compose(c, &self.comp(k + 1), &self.source.d(k));
            if lhs != rhs {
                return Some(k);
            }
        }
        None
    }

    pub fn zero(source: Arc<ProjComplex>, target: Arc<ProjComplex>, shift: i64) -> Self {
        let comps = source.degrees().map(|k| ProjMatrix::zero(&source.base, source.term(k), target.term(k + shift))).collect();
        ChainMap { source, target, shift, comps }
    }

    pub fn identity(u: Arc<ProjComplex>) -> Self {
        let comps = u.degrees().map(|k| ProjMatrix::identity(&u.base, u.term(k))).collect();
        ChainMap { source: u.clone(), target: u, shift: 0, comps }
    }

    pub fn source(&self) -> &Arc<ProjComplex> {
        &self.source
    }

    pub fn target(&self) -> &Arc<ProjComplex> {
        &self.target
    }

    pub fn shift(&self) -> i64 {
        self.shift
    }

    /// `f^k` (zero outside the source degrees).
    pub fn comp(&self, k: i64) -> ProjMatrix {
        if k >= self.source.lo && k <= self.source.hi() {
            self.comps[(k - self.source.lo) as usize].clone()
        } else {
            ProjMatrix::zero(&self.source.base, self.source.term(k), self.target.term(k + self.shift))
        }
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(ProjMatrix::is_zero)
    }

    /// `g ∘ f` for `f: U → V[n]`, `g: V → W[m]`, landing in `W[m+n]`.
    pub fn compose(g: &ChainMap, f: &ChainMap) -> Result<ChainMap> {
        if *g.source != *f.target {
            return Err(Error::SourceTargetMismatch("chain maps are not composable".into()));
        }
        let c = &f.source.base;
        let comps = f.source.degrees().map(|k| ProjMatrix::compose(c, &g.comp(k + f.shift), &f.comp(k))).collect();
        Ok(ChainMap { source: f.source.clone(), target: g.target.clone(), shift: f.shift + g.shift, comps })
    }

    pub fn add(&self, other: &ChainMap) -> Result<ChainMap> {
        if *self.source != *other.source || *self.target != *other.target || self.shift != other.shift {
            return Err(Error::SourceTargetMismatch("chain maps are not parallel".into()));
        }
        let comps = self.comps.iter().zip(&other.comps).map(|(a, b)| a.add(b)).collect();
        Ok(ChainMap { comps, ..self.clone() })
    }

    pub fn scale(&self, s: &Scalar) -> ChainMap {
        ChainMap { comps: self.comps.iter().map(|m| m.scale(s)).collect(), ..self.clone() }
    }

    pub fn sub(&self, other: &ChainMap) -> Result<ChainMap> {
        self.add(&other.scale(&-&self.source.base.field().one()))
    }

    /// The same components, reinterpreted between equal-as-data complexes.
    pub fn retarget(&self, source: Arc<ProjComplex>, target: Arc<ProjComplex>) -> Result<ChainMap> {
        if *source != *self.source || *target != *self.target {
            return Err(Error::SourceTargetMismatch("retargeting between different complexes".into()));
        }
        Ok(ChainMap { source, target, ..self.clone() })
    }

    pub fn map_functor(&self, f: &KFunctor) -> Result<ChainMap> {
        let s = Arc::new(self.source.map_functor(f)?);
        let t = Arc::new(self.target.map_functor(f)?);
        let comps = self.comps.iter().map(|m| m.map_functor(f)).collect();
        Ok(ChainMap { source: s, target: t, shift: self.shift, comps })
    }

    /// Flattened coordinates over the degrees of the source.
    pub fn flatten(&self) -> Vec<Scalar> {
        self.comps.iter().flat_map(ProjMatrix::flatten).collect()
    }

    /// Builds a map from flattened coordinates without checking commutation.
    pub fn unflatten(source: Arc<ProjComplex>, target: Arc<ProjComplex>, shift: i64, v: &[Scalar]) -> ChainMap {
        let c = source.base.clone();
        let mut comps = Vec::new();
        let mut pos = 0;
        for k in source.degrees() {
            let (s, t) = (source.term(k), target.term(k + shift));
            let len: usize = t.iter().map(|&y| s.iter().map(|&x| c.dim(x, y)).sum::<usize>()).sum();
            comps.push(ProjMatrix::unflatten(&c, s, t, &v[pos..pos + len]));
            pos += len;
        }
        ChainMap { source, target, shift, comps }
    }
}

/// `Hom_{K^b}(U, V[n])` with a deterministic basis.
#[derive(Clone, Debug)]
pub struct HomSpace {
    source: Arc<ProjComplex>,
    target: Arc<ProjComplex>,
    shift: i64,
    field: FieldSpec,
    boundary: (Vec<Vec<Scalar>>, Vec<usize>),
    quotient: (Vec<Vec<Scalar>>, Vec<usize>),
}

/// Range of `n` for which `Hom(U, V[n])` can be nonzero.
pub fn support_window(u: &ProjComplex, v: &ProjComplex) -> Option<(i64, i64)> {
    if u.is_zero() || v.is_zero() {
        return None;
    }
    Some((v.lo - u.hi(), v.hi() - u.lo))
}

fn map_layout_len(c: &FinKCat, u: &ProjComplex, v: &ProjComplex, shift: i64) -> usize {
    u.degrees()
        .map(|k| v.term(k + shift).iter().map(|&y| u.term(k).iter().map(|&x| c.dim(x, y)).sum::<usize>()).sum::<usize>())
        .sum()
}

fn unit_vector(field: FieldSpec, n: usize, i: usize) -> Vec<Scalar> {
    let mut v = vec![field.zero(); n];
    v[i] = field.one();
    v
}

impl HomSpace {
    pub fn new(u: &Arc<ProjComplex>, v: &Arc<ProjComplex>, n: i64) -> Result<Self> {
        if !same_cat(&u.base, &v.base) {
            return Err(Error::BaseMismatch);
        }
        let c = &u.base;
        let field = c.field();
        let empty = HomSpace {
            source: u.clone(),
            target: v.clone(),
            shift: n,
            field,
            boundary: (Vec::new(), Vec::new()),
            quotient: (Vec::new(), Vec::new()),
        };
        match support_window(u, v) {
            Some((a, b)) if a <= n && n <= b => {}
            _ => return Ok(empty),
        }
        let len = map_layout_len(c, u, v, n);
        if len == 0 {
            return Ok(empty);
        }
        // the map f ↦ ((−1)^n d_V f^k − f^{k+1} d_U^k)_k
        let s = field.from_i64(sign(n));
        let mut cols = Vec::with_capacity(len);
        for i in 0..len {
            let f = ChainMap::unflatten(u.clone(), v.clone(), n, &unit_vector(field, len, i));
            let mut col = Vec::new();
            for k in u.lo - 1..=u.hi() {
                let a = ProjMatrix::compose(c, &v.d(k + n), &f.comp(k)).scale(&s);
                let b = ProjMatrix::compose(c, &f.comp(k + 1), &u.d(k));
                col.extend(a.sub(&b).flatten());
            }
            cols.push(col);
        }
        let rows = cols.first().map_or(0, Vec::len);
        let kernel = if rows == 0 {
            (0..len).map(|i| unit_vector(field, len, i)).collect()
        } else {
            Matrix::from_columns(field, rows, &cols).nullspace()
        };
        // null-homotopic maps: f^k = (−1)^n d_V h^k + h^{k+1} d_U^k, h^k: U^k → V^{k+n−1}
        let hlen = map_layout_len(c, u, v, n - 1);
        let mut images = Vec::with_capacity(hlen);
        for i in 0..hlen {
            let h = ChainMap::unflatten(u.clone(), v.clone(), n - 1, &unit_vector(field, hlen, i));
            let comps = u
                .degrees()
                .map(|k| {
                    let a = ProjMatrix::compose(c, &v.d(k + n - 1), &h.comp(k)).scale(&s);
                    a.add(&ProjMatrix::compose(c, &h.comp(k + 1), &u.d(k)))
                })
                .collect::<Vec<_>>();
            images.push(comps.iter().flat_map(ProjMatrix::flatten).collect::<Vec<_>>());
        }
        let boundary = span_basis(field, images);
        let reduced: Vec<Vec<Scalar>> = kernel
            .into_iter()
            .map(|mut z| {
                reduce_mod(&mut z, &boundary.0, &boundary.1);
                z
            })
            .collect();
        let quotient = span_basis(field, reduced);
        Ok(HomSpace { source: u.clone(), target: v.clone(), shift: n, field, boundary, quotient })
    }

    pub fn dim(&self) -> usize {
        self.quotient.0.len()
    }

    pub fn source(&self) -> &Arc<ProjComplex> {
        &self.source
    }

    pub fn target(&self) -> &Arc<ProjComplex> {
        &self.target
    }

    pub fn shift(&self) -> i64 {
        self.shift
    }

    /// Chain-map representatives of the basis classes.
    pub fn basis(&self) -> Vec<ChainMap> {
        self.quotient.0.iter().map(|v| ChainMap::unflatten(self.source.clone(), self.target.clone(), self.shift, v)).collect()
    }

    pub fn element(&self, coords: &[Scalar]) -> ChainMap {
        let len = map_layout_len(&self.source.base, &self.source, &self.target, self.shift);
        let mut v = vec![self.field.zero(); len];
        for (row, c) in self.quotient.0.iter().zip(coords) {
            for (a, b) in v.iter_mut().zip(row) {
                *a = &*a + &(b * c);
            }
        }
        ChainMap::unflatten(self.source.clone(), self.target.clone(), self.shift, &v)
    }

    /// Class coordinates of a chain map `U → V[n]`.
    pub fn coords(&self, f: &ChainMap) -> Result<Vec<Scalar>> {
        if *f.source != *self.source || *f.target != *self.target || f.shift != self.shift {
            return Err(Error::SourceTargetMismatch("chain map does not belong to this Hom space".into()));
        }
        let mut z = f.flatten();
        if z.is_empty() {
            return Ok(Vec::new());
        }
        reduce_mod(&mut z, &self.boundary.0, &self.boundary.1);
        let coords: Vec<Scalar> = self.quotient.1.iter().map(|&p| z[p].clone()).collect();
        reduce_mod(&mut z, &self.quotient.0, &self.quotient.1);
        if z.iter().any(|s| !s.is_zero()) {
            return Err(Error::Invalid("map is not a cycle".into()));
        }
        Ok(coords)
    }

    /// Whether `f` is null-homotopic.
    pub fn is_null(&self, f: &ChainMap) -> Result<bool> {
        Ok(self.coords(f)?.iter().all(Scalar::is_zero))
    }
}

/// Basis of `Hom_{K^b}(U, V[n])`.
pub fn hom_k(u: &Arc<ProjComplex>, v: &Arc<ProjComplex>, n: i64) -> Result<Vec<ChainMap>> {
    Ok(HomSpace::new(u, v, n)?.basis())
}

/// Whether `f: U → V[n]` is null-homotopic.
pub fn is_null_homotopic(f: &ChainMap) -> Result<bool> {
    HomSpace::new(&f.source, &f.target, f.shift)?.is_null(f)
}

/// Mapping cone of a degree-0 map: `cone^k = U^{k+1} ⊕ V^k` with
/// differential `[[−d_U, 0], [f, d_V]]`.
pub fn cone(f: &ChainMap) -> Result<ProjComplex> {
    if f.shift != 0 {
        return Err(Error::WrongShift { expected: 0, got: f.shift });
    }
    let (u, v) = (&f.source, &f.target);
    let c = &u.base;
    if u.is_zero() {
        return Ok((**v).clone());
    }
    if v.is_zero() {
        return Ok(u.shift(1));
    }
    let lo = (u.lo - 1).min(v.lo);
    let hi = (u.hi() - 1).max(v.hi());
    let terms: Vec<FgProj> = (lo..=hi).map(|k| u.term(k + 1).iter().chain(v.term(k)).copied().collect()).collect();
    let diffs = (lo..hi)
        .map(|k| {
            let z = ProjMatrix::zero(c, v.term(k), u.term(k + 2));
            ProjMatrix::blocks(&u.d(k + 1).neg(), &z, &f.comp(k + 1), &v.d(k))
        })
        .collect();
    ProjComplex::new(c.clone(), lo, terms, diffs)
}

/// The triangle maps `V → cone(f)` and `cone(f) → U[1]`.
pub fn cone_maps(f: &ChainMap, cone: &Arc<ProjComplex>) -> Result<(ChainMap, ChainMap)> {
    let (u, v) = (&f.source, &f.target);
    let c = &u.base;
    let into = v
        .degrees()
        .map(|k| {
            let a = ProjMatrix::zero(c, v.term(k), u.term(k + 1));
            let b = ProjMatrix::identity(c, v.term(k));
            stack_rows(c, &a, &b)
        })
        .collect();
    let into = ChainMap::new(v.clone(), cone.clone(), 0, into)?;
    let u1 = Arc::new(u.shift(1));
    let out = cone
        .degrees()
        .map(|k| {
            let n1 = u.term(k + 1).len();
            let all: Vec<usize> = (0..cone.term(k).len()).collect();
            let mut id = ProjMatrix::identity(c, cone.term(k));
            id = id.select(&(0..n1).collect::<Vec<_>>(), &all);
            id
        })
        .collect();
    let out = ChainMap::new(cone.clone(), u1, 0, out)?;
    Ok((into, out))
}

fn stack_rows(c: &FinKCat, top: &ProjMatrix, bottom: &ProjMatrix) -> ProjMatrix {
    let z = ProjMatrix::zero(c, &[], &top.tgt);
    let z2 = ProjMatrix::zero(c, &[], &bottom.tgt);
    ProjMatrix::blocks(top, &z, bottom, &z2)
}

/// A complex with radical differential and witnesses of the homotopy equivalence.
#[derive(Clone, Debug)]
pub struct Minimized {
    pub complex: Arc<ProjComplex>,
    /// `U → M`
    pub to_min: ChainMap,
    /// `M → U`
    pub from_min: ChainMap,
}

fn local_of(c: &FinKCat) -> Result<&Arc<LocalStructure>> {
    c.local_structure().ok_or_else(|| {
        let r = crate::local::check_basic_local(c);
        Error::NotBasicLocal(r.first_failure().unwrap_or_default())
    })
}

/// Cancels invertible differential entries one at a time by Gaussian elimination.
pub fn minimize(u: &Arc<ProjComplex>) -> Result<Minimized> {
    let c = u.base.clone();
    let local = local_of(&c)?.clone();
    let lo = u.lo;
    let mut terms = u.terms.clone();
    let mut diffs = u.diffs.clone();
    // f: U → current, g: current → U, degreewise
    let mut f: Vec<ProjMatrix> = terms.iter().map(|t| ProjMatrix::identity(&c, t)).collect();
    let mut g: Vec<ProjMatrix> = f.clone();
    loop {
        let mut pivot = None;
        'search: for (t, d) in diffs.iter().enumerate() {
            for r in 0..d.tgt.len() {
                for col in 0..d.src.len() {
                    let x = d.src[col];
                    if d.tgt[r] == x && local.is_unit(&c, x, d.get(r, col)) {
                        pivot = Some((t, r, col));
                        break 'search;
                    }
                }
            }
        }
        let Some((t, r, col)) = pivot else { break };
        let d = &diffs[t];
        let x = d.src[col];
        let phi_inv = inverse_of(&c, x, x, d.get(r, col)).expect("unit");
        let rest_cols: Vec<usize> = (0..d.src.len()).filter(|&i| i != col).collect();
        let rest_rows: Vec<usize> = (0..d.tgt.len()).filter(|&i| i != r).collect();
        let beta = d.select(&[r], &rest_cols);
        let gamma = d.select(&rest_rows, &[col]);
        let delta = d.select(&rest_rows, &rest_cols);
        let phi_inv_m = ProjMatrix::from_entries(&c, &[x], &[x], vec![phi_inv]).unwrap();
        let gp = ProjMatrix::compose(&c, &gamma, &phi_inv_m);
        let new_d = delta.sub(&ProjMatrix::compose(&c, &gp, &beta));
        let pb = ProjMatrix::compose(&c, &phi_inv_m, &beta).neg();
        // witnesses for this step
        let n_next = terms[t + 1].len();
        let mut fk1_cols = Vec::new();
        for i in 0..n_next {
            fk1_cols.push(i);
        }
        let fk = ProjMatrix::identity(&c, &terms[t]).select(&rest_cols, &(0..terms[t].len()).collect::<Vec<_>>());
        let mut fk1 = ProjMatrix::identity(&c, &terms[t + 1]).select(&rest_rows, &fk1_cols);
        for (s, _) in rest_rows.iter().enumerate() {
            fk1.set(s, r, gp.get(s, 0).iter().map(|v| -v).collect());
        }
        let mut gk = ProjMatrix::identity(&c, &terms[t]).select(&(0..terms[t].len()).collect::<Vec<_>>(), &rest_cols);
        for (s, _) in rest_cols.iter().enumerate() {
            gk.set(col, s, pb.get(0, s).clone());
        }
        let gk1 = ProjMatrix::identity(&c, &terms[t + 1]).select(&(0..n_next).collect::<Vec<_>>(), &rest_rows);
        // update the complex
        if t > 0 {
            diffs[t - 1] = diffs[t - 1].select(&rest_cols, &(0..terms[t - 1].len()).collect::<Vec<_>>());
        }
        if t + 1 < diffs.len() {
            diffs[t + 1] = diffs[t + 1].select(&(0..terms[t + 2].len()).collect::<Vec<_>>(), &rest_rows);
        }
        diffs[t] = new_d;
        terms[t] = rest_cols.iter().map(|&i| terms[t][i]).collect();
        terms[t + 1] = rest_rows.iter().map(|&i| terms[t + 1][i]).collect();
        f[t] = ProjMatrix::compose(&c, &fk, &f[t]);
        f[t + 1] = ProjMatrix::compose(&c, &fk1, &f[t + 1]);
        g[t] = ProjMatrix::compose(&c, &g[t], &gk);
        g[t + 1] = ProjMatrix::compose(&c, &g[t + 1], &gk1);
    }
    let m = Arc::new(ProjComplex::raw(c.clone(), lo, terms, diffs));
    let to_min = ChainMap::new(u.clone(), m.clone(), 0, f)?;
    let g_comps = m.degrees().map(|k| g[(k - lo) as usize].clone()).collect();
    let from_min = ChainMap::new(m.clone(), u.clone(), 0, g_comps)?;
    Ok(Minimized { complex: m, to_min, from_min })
}

/// Whether no differential entry is a unit.
pub fn is_minimal(u: &ProjComplex) -> Result<bool> {
    let local = local_of(&u.base)?;
    Ok(u.diffs.iter().all(|d| {
        (0..d.tgt.len()).all(|r| (0..d.src.len()).all(|col| d.tgt[r] != d.src[col] || !local.is_unit(&u.base, d.src[col], d.get(r, col))))
    }))
}

/// A homotopy equivalence with its inverse.
#[derive(Clone, Debug)]
pub struct Equivalence {
    pub forward: ChainMap,
    pub backward: ChainMap,
    /// Whether the invertible map was found by random trials.
    pub sampled: bool,
}

/// Whether a degree-0 map between equal-shape complexes is degreewise invertible.
fn degreewise_invertible(local: &LocalStructure, c: &FinKCat, f: &ChainMap) -> bool {
    f.comps.iter().all(|m| {
        if m.src.len() != m.tgt.len() {
            return false;
        }
        let mut objs: Vec<usize> = m.src.clone();
        objs.sort_unstable();
        objs.dedup();
        objs.iter().all(|&x| {
            let cols: Vec<usize> = (0..m.src.len()).filter(|&i| m.src[i] == x).collect();
            let rows: Vec<usize> = (0..m.tgt.len()).filter(|&i| m.tgt[i] == x).collect();
            if cols.len() != rows.len() {
                return false;
            }
            let lam: Vec<Vec<Scalar>> = rows
                .iter()
                .map(|&r| cols.iter().map(|&cc| chi_eval(c.field(), &local.chars[x], m.get(r, cc))).collect())
                .collect();
            Matrix::from_rows(c.field(), lam).map(|a| a.rank() == cols.len()).unwrap_or(false)
        })
    })
}

fn degreewise_inverse(c: &FinKCat, f: &ChainMap) -> Result<ChainMap> {
    let comps = f
        .target
        .degrees()
        .map(|k| f.comp(k).inverse(c).ok_or_else(|| Error::invalid("component is not invertible")))
        .collect::<Result<Vec<_>>>()?;
    ChainMap::new(f.target.clone(), f.source.clone(), 0, comps)
}

fn sorted_terms(u: &ProjComplex) -> Vec<(i64, Vec<usize>)> {
    u.degrees()
        .map(|k| {
            let mut t = u.term(k).to_vec();
            t.sort_unstable();
            (k, t)
        })
        .filter(|(_, t)| !t.is_empty())
        .collect()
}

/// Decides `U ≃ V` in `K^b`, returning witnesses on success.
pub fn homotopy_equivalent(u: &Arc<ProjComplex>, v: &Arc<ProjComplex>) -> Result<Option<Equivalence>> {
    if !same_cat(&u.base, &v.base) {
        return Err(Error::BaseMismatch);
    }
    let c = u.base.clone();
    let local = local_of(&c)?.clone();
    let mu = minimize(u)?;
    let mv = minimize(v)?;
    if sorted_terms(&mu.complex) != sorted_terms(&mv.complex) {
        return Ok(None);
    }
    let h = HomSpace::new(&mu.complex, &mv.complex, 0)?;
    let d = h.dim();
    let field = c.field();
    let mut found = None;
    let mut sampled = false;
    let try_coords = |coords: &[Scalar]| -> Option<ChainMap> {
        let f = h.element(coords);
        degreewise_invertible(&local, &c, &f).then_some(f)
    };
    if mu.complex.is_zero() {
        found = Some(ChainMap::zero(mu.complex.clone(), mv.complex.clone(), 0));
    } else if let Some(q) = field.size().filter(|&q| (q as f64).powi(d as i32) <= 4096.0) {
        let total = q.pow(d as u32);
        for mut k in 1..total {
            let mut coords = Vec::with_capacity(d);
            for _ in 0..d {
                coords.push(field.element(k % q));
                k /= q;
            }
            if let Some(f) = try_coords(&coords) {
                found = Some(f);
                break;
            }
        }
    } else {
        sampled = true;
        let tag = format!("heq:{}:{}:{}", d, mu.complex.n_summands(), c.total_dim());
        let mut rng = rng_for(tag.as_bytes());
        // the basis vectors themselves first, then random combinations
        for i in 0..d {
            if let Some(f) = try_coords(&unit_vector(field, d, i)) {
                found = Some(f);
                break;
            }
        }
        for _ in 0..64 {
            if found.is_some() {
                break;
            }
            let coords: Vec<Scalar> = (0..d).map(|_| random_scalar(field, &mut rng)).collect();
            found = try_coords(&coords);
        }
    }
    let Some(iso) = found else { return Ok(None) };
    let inv = if mu.complex.is_zero() { ChainMap::zero(mv.complex.clone(), mu.complex.clone(), 0) } else { degreewise_inverse(&c, &iso)? };
    let forward = ChainMap::compose(&mv.from_min, &ChainMap::compose(&iso, &mu.to_min)?)?;
    let backward = ChainMap::compose(&mu.from_min, &ChainMap::compose(&inv, &mv.to_min)?)?;
    Ok(Some(Equivalence { forward, backward, sampled }))
}

/// Checks that `g∘f ≃ id_U` and `f∘g ≃ id_V`.
pub fn verify_equivalence(f: &ChainMap, g: &ChainMap) -> Result<bool> {
    if f.shift != 0 || g.shift != 0 {
        return Ok(false);
    }
    let gf = ChainMap::compose(g, f)?;
    let fg = ChainMap::compose(f, g)?;
    let a = gf.sub(&ChainMap::identity(f.source.clone()))?;
    let b = fg.sub(&ChainMap::identity(f.target.clone()))?;
    Ok(is_null_homotopic(&a)? && is_null_homotopic(&b)?)
}

/// An inverse of `f` in `K^b`, if `f` is an isomorphism there. Exact: the
/// left inverse is solved from class coordinates and then checked on the right.
pub fn inverse_in_k(f: &ChainMap) -> Result<Option<ChainMap>> {
    if f.shift != 0 {
        return Err(Error::WrongShift { expected: 0, got: f.shift });
    }
    let (u, v) = (f.source.clone(), f.target.clone());
    let field = u.base.field();
    let huu = HomSpace::new(&u, &u, 0)?;
    let hvv = HomSpace::new(&v, &v, 0)?;
    let hvu = HomSpace::new(&v, &u, 0)?;
    let basis = hvu.basis();
    let id_u = huu.coords(&ChainMap::identity(u.clone()))?;
    if basis.is_empty() {
        let ok = id_u.iter().all(Scalar::is_zero) && hvv.coords(&ChainMap::identity(v.clone()))?.iter().all(Scalar::is_zero);
        return Ok(ok.then(|| ChainMap::zero(v.clone(), u.clone(), 0)));
    }
    if id_u.is_empty() {
        // U ≅ 0; then f is invertible iff V ≅ 0
        let id_v = hvv.coords(&ChainMap::identity(v.clone()))?;
        return Ok(id_v.iter().all(Scalar::is_zero).then(|| ChainMap::zero(v.clone(), u.clone(), 0)));
    }
    let cols: Vec<Vec<Scalar>> = basis.iter().map(|b| huu.coords(&ChainMap::compose(b, f)?)).collect::<Result<_>>()?;
    let a = Matrix::from_columns(field, id_u.len(), &cols);
    let Some(sol) = a.solve(&Matrix::column(field, id_u))? else { return Ok(None) };
    let g = hvu.element(&sol.particular.col(0));
    let fg = ChainMap::compose(f, &g)?;
    let diff = fg.sub(&ChainMap::identity(v.clone()))?;
    Ok(hvv.is_null(&diff)?.then_some(g))
}

/// Splits a complex into summands along connected components of the graph on
/// its summands whose edges are nonzero differential entries.
pub fn connected_components(u: &ProjComplex) -> Vec<Vec<(i64, usize)>> {
    let idx: Vec<(i64, usize)> = u.degrees().flat_map(|k| (0..u.term(k).len()).map(move |i| (k, i))).collect();
    let pos = |k: i64, i: usize| idx.iter().position(|&p| p == (k, i)).unwrap();
    let mut parent: Vec<usize> = (0..idx.len()).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let n = p[y];
            p[y] = r;
            y = n;
        }
        r
    }
    for k in u.lo..u.hi() {
        let d = u.d(k);
        for r in 0..d.tgt.len() {
            for col in 0..d.src.len() {
                if d.get(r, col).iter().any(|s| !s.is_zero()) {
                    let (a, b) = (find(&mut parent, pos(k, col)), find(&mut parent, pos(k + 1, r)));
                    parent[a] = b;
                }
            }
        }
    }
    let mut groups: Vec<(usize, Vec<(i64, usize)>)> = Vec::new();
    for (i, &p) in idx.iter().enumerate() {
        let root = find(&mut parent, i);
        match groups.iter_mut().find(|g| g.0 == root) {
            Some(g) => g.1.push(p),
            None => groups.push((root, vec![p])),
        }
    }
    groups.into_iter().map(|g| g.1).collect()
}

/// The subcomplex on the given summands together with its inclusion and
/// projection; these are chain maps when the summands form a union of
/// connected components.
pub fn split_summand(u: &Arc<ProjComplex>, keep: &[(i64, usize)]) -> Result<(Arc<ProjComplex>, ChainMap, ChainMap)> {
    let c = u.base.clone();
    let lo = u.lo;
    let picks: Vec<Vec<usize>> = u.degrees().map(|k| keep.iter().filter(|p| p.0 == k).map(|p| p.1).collect()).collect();
    let terms: Vec<FgProj> = u.degrees().map(|k| picks[(k - lo) as usize].iter().map(|&i| u.term(k)[i]).collect()).collect();
    let diffs = (lo..u.hi()).map(|k| u.d(k).select(&picks[(k + 1 - lo) as usize], &picks[(k - lo) as usize])).collect();
    let s = Arc::new(ProjComplex::new(c.clone(), lo, terms, diffs)?);
    let incl = s
        .degrees()
        .map(|k| {
            let all: Vec<usize> = (0..u.term(k).len()).collect();
            ProjMatrix::identity(&c, u.term(k)).select(&all, &picks[(k - lo) as usize])
        })
        .collect();
    let retr = u
        .degrees()
        .map(|k| {
            let all: Vec<usize> = (0..u.term(k).len()).collect();
            ProjMatrix::identity(&c, u.term(k)).select(&picks[(k - lo) as usize], &all)
        })
        .collect();
    let incl = ChainMap::new(s.clone(), u.clone(), 0, incl)?;
    let retr = ChainMap::new(u.clone(), s.clone(), 0, retr)?;
    Ok((s, incl, retr))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::{build_category, Arrow, QuiverPresentation};

    fn a2(field: FieldSpec) -> Arc<FinKCat> {
        let q = QuiverPresentation::new(vec!["1".into(), "2".into()], vec![Arrow { name: "a".into(), source: 0, target: 1 }]);
        Arc::new(build_category(&q, field).unwrap())
    }

    fn two_term(c: &Arc<FinKCat>) -> Arc<ProjComplex> {
        let d = ProjMatrix::from_entries(c, &[0], &[1], vec![vec![c.field().one()]]).unwrap();
        Arc::new(ProjComplex::new(c.clone(), -1, vec![vec![0], vec![1]], vec![d]).unwrap())
    }

    fn dims(u: &Arc<ProjComplex>, v: &Arc<ProjComplex>) -> Vec<(i64, usize)> {
        (-3..=3).map(|n| (n, HomSpace::new(u, v, n).unwrap().dim())).filter(|p| p.1 > 0).collect()
    }

    #[test]
    fn stalk_homs() {
        let c = a2(FieldSpec::rationals());
        let p1 = Arc::new(ProjComplex::stalk(c.clone(), 0, 0));
        let p2 = Arc::new(ProjComplex::stalk(c.clone(), 1, 0));
        assert_eq!(dims(&p1, &p1), vec![(0, 1)]);
        assert_eq!(dims(&p1, &p2), vec![(0, 1)]);
        assert_eq!(dims(&p2, &p1), vec![]);
    }

    #[test]
    fn two_term_complex_is_presilting() {
        let c = a2(FieldSpec::prime(2).unwrap());
        let t = two_term(&c);
        assert_eq!(dims(&t, &t), vec![(0, 1)]);
        let p2 = Arc::new(ProjComplex::stalk(c.clone(), 1, 0));
        assert_eq!(dims(&p2, &t), vec![(0, 1)]);
        assert_eq!(dims(&t, &p2), vec![]);
    }

    #[test]
    fn cone_of_identity_is_contractible() {
        let c = a2(FieldSpec::rationals());
        let t = two_term(&c);
        let cn = Arc::new(cone(&ChainMap::identity(t.clone())).unwrap());
        assert_eq!(cn.n_summands(), 4);
        let m = minimize(&cn).unwrap();
        assert!(m.complex.is_zero());
        assert!(homotopy_equivalent(&cn, &Arc::new(ProjComplex::zero(c.clone()))).unwrap().is_some());
    }

    #[test]
    fn minimize_keeps_the_interesting_part() {
        let c = a2(FieldSpec::rationals());
        let t = two_term(&c);
        let contractible = cone(&ChainMap::identity(Arc::new(ProjComplex::stalk(c.clone(), 1, 0)))).unwrap();
        let u = Arc::new(t.direct_sum(&contractible).unwrap());
        let m = minimize(&u).unwrap();
        assert_eq!(*m.complex, *t);
        assert!(verify_equivalence(&m.to_min, &m.from_min).unwrap());
        let e = homotopy_equivalent(&u, &t).unwrap().unwrap();
        assert!(verify_equivalence(&e.forward, &e.backward).unwrap());
    }

    #[test]
    fn shift_round_trip() {
        let c = a2(FieldSpec::rationals());
        let t = two_term(&c);
        assert_eq!(t.shift(1).shift(-1), *t);
        assert_eq!(dims(&t, &Arc::new(t.shift(2))), vec![(-2, 1)]);
    }

    #[test]
    fn stalks_are_not_equivalent() {
        let c = a2(FieldSpec::rationals());
        let p1 = Arc::new(ProjComplex::stalk(c.clone(), 0, 0));
        let p2 = Arc::new(ProjComplex::stalk(c.clone(), 1, 0));
        assert!(homotopy_equivalent(&p1, &p2).unwrap().is_none());
    }

    #[test]
    fn inverse_in_homotopy_category() {
        let c = a2(FieldSpec::rationals());
        let t = two_term(&c);
        let id = ChainMap::identity(t.clone());
        let two = id.scale(&c.field().from_i64(2));
        let inv = inverse_in_k(&two).unwrap().unwrap();
        assert!(verify_equivalence(&two, &inv).unwrap());
        let p1 = Arc::new(ProjComplex::stalk(c.clone(), 0, 0));
        let p2 = Arc::new(ProjComplex::stalk(c.clone(), 1, 0));
        let a = hom_k(&p1, &p2, 0).unwrap().remove(0);
        assert!(inverse_in_k(&a).unwrap().is_none());
    }

    #[test]
    fn triangle_maps_commute() {
        let c = a2(FieldSpec::rationals());
        let p1 = Arc::new(ProjComplex::stalk(c.clone(), 0, 0));
        let p2 = Arc::new(ProjComplex::stalk(c.clone(), 1, 0));
        let a = hom_k(&p1, &p2, 0).unwrap().remove(0);
        let cn = Arc::new(cone(&a).unwrap());
        assert_eq!(cn.lo(), -1);
        let (i, p) = cone_maps(&a, &cn).unwrap();
        assert!(ChainMap::compose(&p, &i).unwrap().is_zero());
    }
}
