//! Quivers with homogeneous relations and their finite-dimensional quotients.

use std::collections::HashMap;
use std::sync::Arc;

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::field::{FieldSpec, Matrix, Scalar};
use crate::fincat::{Elem, FinKCat, KFunctor, Sparse};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arrow {
    pub name: String,
    pub source: usize,
    pub target: usize,
}

/// A path as arrow indices in traversal order (first arrow first).
pub type PathSeq = Vec<usize>;

/// A linear combination of parallel paths.
pub type Relation = Vec<(BigRational, PathSeq)>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuiverPresentation {
    pub vertices: Vec<String>,
    pub arrows: Vec<Arrow>,
    pub relations: Vec<Relation>,
    pub length_cap: Option<usize>,
}

/// Presentation data kept alongside a built category.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuiverInfo {
    pub presentation: QuiverPresentation,
    /// For each pair `(x, y)` (index `x*n + y`), the normal-form path of each basis element.
    pub basis_paths: Vec<Vec<PathSeq>>,
}

/// Label of a path: arrow names in composition order, `id_v` for a trivial path.
pub fn path_label(q: &QuiverPresentation, start: usize, p: &[usize]) -> String {
    if p.is_empty() {
        return format!("id_{}", q.vertices[start]);
    }
    p.iter().rev().map(|&a| q.arrows[a].name.as_str()).collect::<Vec<_>>().join("*")
}

impl QuiverPresentation {
    pub fn new(vertices: Vec<String>, arrows: Vec<Arrow>) -> Self {
        QuiverPresentation { vertices, arrows, relations: Vec::new(), length_cap: None }
    }

    pub fn arrow_index(&self, name: &str) -> Option<usize> {
        self.arrows.iter().position(|a| a.name == name)
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == name)
    }

    /// Source and target of a nonempty composable path.
    pub fn endpoints(&self, p: &[usize]) -> Result<(usize, usize)> {
        let first = p.first().ok_or_else(|| Error::invalid("empty path"))?;
        let mut cur = self.arrows[*first].target;
        for &a in &p[1..] {
            if self.arrows[a].source != cur {
                return Err(Error::SourceTargetMismatch(format!(
                    "path {} is not composable",
                    path_label(self, 0, p)
                )));
            }
            cur = self.arrows[a].target;
        }
        Ok((self.arrows[*first].source, cur))
    }

    fn validate(&self) -> Result<usize> {
        let mut max_len = 0;
        for (i, a) in self.arrows.iter().enumerate() {
            if a.source >= self.vertices.len() || a.target >= self.vertices.len() {
                return Err(Error::invalid(format!("arrow {} has an unknown endpoint", a.name)));
            }
            if self.arrows[..i].iter().any(|b| b.name == a.name) {
                return Err(Error::invalid(format!("duplicate arrow {}", a.name)));
            }
        }
        for rel in &self.relations {
            let Some((_, p0)) = rel.first() else { continue };
            let shown = || path_label(self, 0, p0);
            let ends = self.endpoints(p0)?;
            let len = p0.len();
            if len < 2 {
                return Err(Error::InhomogeneousRelation(shown()));
            }
            for (_, p) in rel {
                if p.len() != len {
                    return Err(Error::InhomogeneousRelation(shown()));
                }
                if self.endpoints(p)? != ends {
                    return Err(Error::SourceTargetMismatch(format!("relation paths of {} are not parallel", shown())));
                }
            }
            max_len = max_len.max(len);
        }
        Ok(max_len)
    }

    /// The explicit cap, or `|arrows| * max relation length` (at least 2 each).
    pub fn effective_cap(&self) -> Result<usize> {
        let max_len = self.validate()?;
        let cap = self.length_cap.unwrap_or(self.arrows.len().max(1) * max_len.max(2));
        if cap < max_len {
            return Err(Error::invalid(format!("length cap {cap} is below the relation length {max_len}")));
        }
        Ok(cap)
    }
}

/// One degree of the graded quotient, for one pair of vertices.
struct Slice {
    paths: Vec<PathSeq>,
    index: HashMap<PathSeq, usize>,
    // rows of the ideal in reduced echelon form (pivot = largest path), by pivot
    ideal_rows: HashMap<usize, Vec<Scalar>>,
    // path index -> basis index inside Hom(x, y), for standard paths
    standard: HashMap<usize, usize>,
}

struct Graded {
    n: usize,
    field: FieldSpec,
    // slices[d][x*n + y]
    slices: Vec<Vec<Slice>>,
}

impl Graded {
    /// Normal form of a path of degree `d`, as sparse coordinates in Hom(x,y).
    fn normal_form(&self, x: usize, y: usize, p: &PathSeq) -> Sparse {
        let d = p.len();
        if d >= self.slices.len() {
            return Vec::new();
        }
        let s = &self.slices[d][x * self.n + y];
        let pi = s.index[p];
        if let Some(&b) = s.standard.get(&pi) {
            return vec![(b, self.field.one())];
        }
        let row = &s.ideal_rows[&pi];
        let mut out = Vec::new();
        for (c, v) in row.iter().enumerate() {
            if c != pi && !v.is_zero() {
                out.push((s.standard[&c], -v));
            }
        }
        out
    }
}

fn field_scalar(field: FieldSpec, r: &BigRational) -> Result<Scalar> {
    field.from_ratio(r.numer(), r.denom())
}

/// Builds the quotient of the path category by the ideal generated by the
/// relations, certifying that every path of length `cap + 1` vanishes.
pub fn build_category(q: &QuiverPresentation, field: FieldSpec) -> Result<FinKCat> {
    let cap = q.effective_cap()?;
    let n = q.vertices.len();
    let mut slices: Vec<Vec<Slice>> = Vec::new();
    let mut rel_by_degree: HashMap<(usize, usize, usize), Vec<&Relation>> = HashMap::new();
    for rel in &q.relations {
        if let Some((_, p)) = rel.first() {
            let (s, t) = q.endpoints(p)?;
            rel_by_degree.entry((p.len(), s, t)).or_default().push(rel);
        }
    }
    let mut d = 0;
    loop {
        let mut cur = Vec::with_capacity(n * n);
        let mut any_nonzero = false;
        for x in 0..n {
            for y in 0..n {
                let paths: Vec<PathSeq> = if d == 0 {
                    if x == y { vec![Vec::new()] } else { Vec::new() }
                } else {
                    let mut v = Vec::new();
                    for z in 0..n {
                        for p in &slices[d - 1][x * n + z].paths {
                            for (ai, a) in q.arrows.iter().enumerate() {
                                if a.source == z && a.target == y {
                                    let mut np = p.clone();
                                    np.push(ai);
                                    v.push(np);
                                }
                            }
                        }
                    }
                    v.sort();
                    v
                };
                let index: HashMap<PathSeq, usize> = paths.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
                let m = paths.len();
                let mut gens: Vec<Vec<Scalar>> = Vec::new();
                if d >= 2 {
                    for rel in rel_by_degree.get(&(d, x, y)).into_iter().flatten() {
                        let mut v = vec![field.zero(); m];
                        for (c, p) in rel.iter() {
                            let i = index[p];
                            v[i] = &v[i] + &field_scalar(field, c)?;
                        }
                        gens.push(v);
                    }
                    for z in 0..n {
                        // I_{d-1}(x,z) followed by an arrow z -> y
                        let prev = &slices[d - 1][x * n + z];
                        for row in prev.ideal_rows.values() {
                            for (ai, a) in q.arrows.iter().enumerate() {
                                if a.source != z || a.target != y {
                                    continue;
                                }
                                let mut v = vec![field.zero(); m];
                                for (c, s) in row.iter().enumerate() {
                                    if !s.is_zero() {
                                        let mut np = prev.paths[c].clone();
                                        np.push(ai);
                                        v[index[&np]] = s.clone();
                                    }
                                }
                                gens.push(v);
                            }
                        }
                        // an arrow x -> z followed by I_{d-1}(z,y)
                        let prev = &slices[d - 1][z * n + y];
                        for row in prev.ideal_rows.values() {
                            for (ai, a) in q.arrows.iter().enumerate() {
                                if a.source != x || a.target != z {
                                    continue;
                                }
                                let mut v = vec![field.zero(); m];
                                for (c, s) in row.iter().enumerate() {
                                    if !s.is_zero() {
                                        let mut np = vec![ai];
                                        np.extend_from_slice(&prev.paths[c]);
                                        v[index[&np]] = s.clone();
                                    }
                                }
                                gens.push(v);
                            }
                        }
                    }
                }
                let mut ideal_rows = HashMap::new();
                if !gens.is_empty() && m > 0 {
                    // reverse the columns so that pivots land on the largest paths
                    let rev: Vec<Vec<Scalar>> = gens.into_iter().map(|mut v| { v.reverse(); v }).collect();
                    let (r, piv) = Matrix::from_rows(field, rev)?.rref();
                    for (i, &pc) in piv.iter().enumerate() {
                        let mut row = r.row(i).to_vec();
                        row.reverse();
                        ideal_rows.insert(m - 1 - pc, row);
                    }
                }
                let mut standard = HashMap::new();
                let mut next = 0;
                for i in 0..m {
                    if !ideal_rows.contains_key(&i) {
                        standard.insert(i, next);
                        next += 1;
                    }
                }
                if next > 0 {
                    any_nonzero = true;
                }
                cur.push(Slice { paths, index, ideal_rows, standard });
            }
        }
        if !any_nonzero {
            break;
        }
        if d > cap {
            return Err(Error::CapExceeded(cap));
        }
        slices.push(cur);
        d += 1;
    }
    // drop the final all-zero degree; every longer path is zero
    let graded = Graded { n, field, slices };
    let top = graded.slices.len();

    let mut basis_paths: Vec<Vec<PathSeq>> = vec![Vec::new(); n * n];
    let mut offsets: Vec<Vec<usize>> = vec![Vec::new(); n * n];
    for x in 0..n {
        for y in 0..n {
            for deg in 0..top {
                offsets[x * n + y].push(basis_paths[x * n + y].len());
                let s = &graded.slices[deg][x * n + y];
                let mut std: Vec<(usize, usize)> = s.standard.iter().map(|(&p, &b)| (b, p)).collect();
                std.sort();
                for (_, p) in std {
                    basis_paths[x * n + y].push(s.paths[p].clone());
                }
            }
        }
    }
    let global = |x: usize, y: usize, deg: usize, local: usize| offsets[x * n + y][deg] + local;
    let labels: Vec<Vec<String>> = (0..n * n)
        .map(|i| basis_paths[i].iter().map(|p| path_label(q, i / n, p)).collect())
        .collect();
    let mut comp = Vec::with_capacity(n * n * n);
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                let mut t = Vec::new();
                for g in &basis_paths[y * n + z] {
                    for f in &basis_paths[x * n + y] {
                        let mut p = f.clone();
                        p.extend_from_slice(g);
                        let deg = p.len();
                        let nf: Sparse = graded
                            .normal_form(x, z, &p)
                            .into_iter()
                            .map(|(b, s)| (global(x, z, deg, b), s))
                            .collect();
                        t.push(nf);
                    }
                }
                comp.push(t);
            }
        }
    }
    let identities: Vec<Elem> = (0..n)
        .map(|x| {
            let mut e = vec![field.zero(); basis_paths[x * n + x].len()];
            e[0] = field.one();
            e
        })
        .collect();
    let info = QuiverInfo { presentation: q.clone(), basis_paths };
    Ok(FinKCat::assemble(field, q.vertices.clone(), labels, comp, identities, Some(Arc::new(info))))
}

/// Coordinates of an arbitrary path (given in traversal order) in a built category.
pub fn path_element(c: &FinKCat, start: usize, p: &[usize]) -> Result<(usize, Elem)> {
    let info = c.quiver().ok_or_else(|| Error::invalid("category has no quiver presentation"))?;
    let q = &info.presentation;
    let mut cur = start;
    let mut e = c.identity(start).clone();
    for &a in p {
        let arrow = &q.arrows[a];
        if arrow.source != cur {
            return Err(Error::SourceTargetMismatch(format!("arrow {} does not start at {}", arrow.name, q.vertices[cur])));
        }
        let (t, idx) = c
            .label_lookup(cur, &arrow.name)
            .ok_or_else(|| Error::invalid(format!("arrow {} vanishes in the quotient", arrow.name)))?;
        e = c.compose(start, cur, t, &c.basis_elem(cur, t, idx), &e);
        cur = t;
    }
    Ok((cur, e))
}

/// The functor out of a quiver category determined by the images of the
/// arrows; fails if some relation is not sent to zero.
pub fn functor_from_arrows(
    source: Arc<FinKCat>,
    target: Arc<FinKCat>,
    object_map: Vec<usize>,
    images: &[Elem],
) -> Result<KFunctor> {
    let info = source.quiver().ok_or_else(|| Error::invalid("source has no quiver presentation"))?.clone();
    let q = &info.presentation;
    if images.len() != q.arrows.len() || object_map.len() != q.vertices.len() {
        return Err(Error::DimensionMismatch("one image per arrow".into()));
    }
    for (k, a) in q.arrows.iter().enumerate() {
        if images[k].len() != target.dim(object_map[a.source], object_map[a.target]) {
            return Err(Error::DimensionMismatch(format!("image of arrow {}", a.name)));
        }
    }
    let field = source.field();
    let image_of_path = |start: usize, p: &[usize]| -> Elem {
        let fs = object_map[start];
        let mut e = target.identity(fs).clone();
        let mut cur = fs;
        for &a in p {
            let nxt = object_map[q.arrows[a].target];
            e = target.compose(fs, cur, nxt, &images[a], &e);
            cur = nxt;
        }
        e
    };
    for rel in &q.relations {
        let Some((_, p0)) = rel.first() else { continue };
        let (s, t) = q.endpoints(p0)?;
        let mut acc = target.zero(object_map[s], object_map[t]);
        for (c, p) in rel {
            let c = field.from_ratio(c.numer(), c.denom())?;
            for (a, v) in acc.iter_mut().zip(image_of_path(s, p)) {
                *a = &*a + &(&c * &v);
            }
        }
        if acc.iter().any(|s| !s.is_zero()) {
            return Err(Error::invalid("a relation is not preserved by the arrow images"));
        }
    }
    let n = source.n_objects();
    KFunctor::from_images(source.clone(), target.clone(), object_map.clone(), |x, y, k| {
        image_of_path(x, &info.basis_paths[x * n + y][k])
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn one() -> BigRational {
        BigRational::from_integer(BigInt::from(1))
    }

    pub(crate) fn two_cycle() -> QuiverPresentation {
        let mut q = QuiverPresentation::new(
            vec!["1".into(), "2".into()],
            vec![
                Arrow { name: "a1".into(), source: 0, target: 1 },
                Arrow { name: "b1".into(), source: 1, target: 0 },
            ],
        );
        q.relations = vec![vec![(one(), vec![0, 1, 0])], vec![(one(), vec![1, 0, 1])]];
        q
    }

    #[test]
    fn two_cycle_has_dimension_six() {
        let c = build_category(&two_cycle(), FieldSpec::rationals()).unwrap();
        assert_eq!(c.total_dim(), 6);
        assert_eq!(c.labels(0, 0), &["id_1".to_string(), "b1*a1".to_string()]);
        assert_eq!(c.labels(0, 1), &["a1".to_string()]);
        assert_eq!(c.labels(1, 0), &["b1".to_string()]);
        assert_eq!(c.labels(1, 1), &["id_2".to_string(), "a1*b1".to_string()]);
        assert!(c.check_axioms().passed());
    }

    #[test]
    fn single_vertex() {
        let q = QuiverPresentation::new(vec!["1".into()], vec![]);
        let c = build_category(&q, FieldSpec::rationals()).unwrap();
        assert_eq!(c.total_dim(), 1);
        assert_eq!(c.labels(0, 0), &["id_1".to_string()]);
    }

    #[test]
    fn one_arrow() {
        let q = QuiverPresentation::new(
            vec!["1".into(), "2".into()],
            vec![Arrow { name: "a".into(), source: 0, target: 1 }],
        );
        assert_eq!(build_category(&q, FieldSpec::rationals()).unwrap().total_dim(), 3);
    }

    #[test]
    fn loop_without_relations_exceeds_cap() {
        let q = QuiverPresentation::new(vec!["1".into()], vec![Arrow { name: "x".into(), source: 0, target: 0 }]);
        assert_eq!(build_category(&q, FieldSpec::rationals()).unwrap_err(), Error::CapExceeded(2));
    }

    #[test]
    fn inhomogeneous_relation_rejected() {
        let mut q = two_cycle();
        q.relations.push(vec![(one(), vec![0, 1]), (one(), vec![0, 1, 0, 1])]);
        assert!(matches!(build_category(&q, FieldSpec::rationals()), Err(Error::InhomogeneousRelation(_))));
    }
}
