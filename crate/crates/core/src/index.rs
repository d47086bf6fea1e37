//! Small index categories with finite Hom sets, stored as composition tables.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::report::Report;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexMorphism {
    pub name: String,
    pub source: usize,
    pub target: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IndexKind {
    /// Free category on an acyclic quiver; `arrows[k]` is the morphism index of the k-th arrow.
    Free { arrows: Vec<usize> },
    Poset,
    Monoid,
    Explicit,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexCat {
    objects: Vec<String>,
    morphisms: Vec<IndexMorphism>,
    // comp[b * m + a] = ba when source(b) = target(a)
    comp: Vec<Option<usize>>,
    identities: Vec<usize>,
    kind: IndexKind,
    // for free categories, each morphism as a sequence of arrow morphisms in traversal order
    paths: Vec<Vec<usize>>,
}

impl IndexCat {
    fn from_parts(
        objects: Vec<String>,
        morphisms: Vec<IndexMorphism>,
        identities: Vec<usize>,
        kind: IndexKind,
        paths: Vec<Vec<usize>>,
        mut compose: impl FnMut(usize, usize) -> Option<usize>,
    ) -> Self {
        let m = morphisms.len();
        let mut comp = vec![None; m * m];
        for b in 0..m {
            for a in 0..m {
                if morphisms[b].source == morphisms[a].target {
                    comp[b * m + a] = compose(b, a);
                }
            }
        }
        IndexCat { objects, morphisms, comp, identities, kind, paths }
    }

    /// Free category on an acyclic quiver: all paths, including trivial ones.
    pub fn free_on_acyclic_quiver(vertices: Vec<String>, arrows: Vec<(String, usize, usize)>) -> Result<Self> {
        let n = vertices.len();
        for (name, s, t) in &arrows {
            if *s >= n || *t >= n {
                return Err(Error::invalid(format!("arrow {name} has an unknown endpoint")));
            }
        }
        // Kahn's algorithm detects cycles
        let mut indeg = vec![0usize; n];
        for (_, _, t) in &arrows {
            indeg[*t] += 1;
        }
        let mut queue: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut seen = 0;
        while let Some(v) = queue.pop() {
            seen += 1;
            for (_, s, t) in &arrows {
                if *s == v {
                    indeg[*t] -= 1;
                    if indeg[*t] == 0 {
                        queue.push(*t);
                    }
                }
            }
        }
        if seen < n {
            let v = (0..n).find(|&v| indeg[v] > 0).unwrap();
            return Err(Error::CyclicQuiver(vertices[v].clone()));
        }
        // enumerate paths by length, then lexicographically on arrow indices
        let mut all: Vec<(usize, Vec<usize>)> = (0..n).map(|v| (v, Vec::new())).collect();
        let mut frontier = all.clone();
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for (s, p) in &frontier {
                let end = p.last().map_or(*s, |&a| arrows[a].2);
                for (ai, (_, src, _)) in arrows.iter().enumerate() {
                    if *src == end {
                        let mut np = p.clone();
                        np.push(ai);
                        next.push((*s, np));
                    }
                }
            }
            next.sort_by(|a, b| a.1.cmp(&b.1));
            all.extend(next.iter().cloned());
            frontier = next;
        }
        let name_of = |s: usize, p: &[usize]| -> String {
            if p.is_empty() {
                format!("id_{}", vertices[s])
            } else {
                p.iter().rev().map(|&a| arrows[a].0.as_str()).collect::<Vec<_>>().join("*")
            }
        };
        let morphisms: Vec<IndexMorphism> = all
            .iter()
            .map(|(s, p)| IndexMorphism {
                name: name_of(*s, p),
                source: *s,
                target: p.last().map_or(*s, |&a| arrows[a].2),
            })
            .collect();
        let lookup: HashMap<(usize, Vec<usize>), usize> = all.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
        let arrow_morphisms: Vec<usize> = (0..arrows.len()).map(|k| lookup[&(arrows[k].1, vec![k])]).collect();
        let paths: Vec<Vec<usize>> = all.iter().map(|(_, p)| p.iter().map(|&k| arrow_morphisms[k]).collect()).collect();
        let identities = (0..n).collect();
        let all2 = all.clone();
        Ok(Self::from_parts(vertices, morphisms, identities, IndexKind::Free { arrows: arrow_morphisms }, paths, |b, a| {
            let (sa, pa) = &all2[a];
            let (_, pb) = &all2[b];
            let mut p = pa.clone();
            p.extend_from_slice(pb);
            lookup.get(&(*sa, p)).copied()
        }))
    }

    /// Incidence category of a finite poset. `less` lists pairs `i < j`;
    /// reflexive pairs are added, transitivity and antisymmetry are checked.
    pub fn from_poset(elements: Vec<String>, less: &[(usize, usize)]) -> Result<Self> {
        let n = elements.len();
        let mut le = vec![false; n * n];
        for i in 0..n {
            le[i * n + i] = true;
        }
        for &(i, j) in less {
            if i >= n || j >= n {
                return Err(Error::NotAPartialOrder("unknown element".into()));
            }
            le[i * n + j] = true;
        }
        for i in 0..n {
            for j in 0..n {
                if i != j && le[i * n + j] && le[j * n + i] {
                    return Err(Error::NotAPartialOrder(format!(
                        "{} and {} are mutually comparable",
                        elements[i], elements[j]
                    )));
                }
                for k in 0..n {
                    if le[i * n + j] && le[j * n + k] && !le[i * n + k] {
                        return Err(Error::NotAPartialOrder(format!(
                            "{} <= {} <= {} but not {} <= {}",
                            elements[i], elements[j], elements[k], elements[i], elements[k]
                        )));
                    }
                }
            }
        }
        let mut morphisms = Vec::new();
        let mut index = HashMap::new();
        for i in 0..n {
            index.insert((i, i), morphisms.len());
            morphisms.push(IndexMorphism { name: format!("id_{}", elements[i]), source: i, target: i });
        }
        for i in 0..n {
            for j in 0..n {
                if i != j && le[i * n + j] {
                    index.insert((i, j), morphisms.len());
                    morphisms.push(IndexMorphism { name: format!("{}<{}", elements[i], elements[j]), source: i, target: j });
                }
            }
        }
        let ms = morphisms.clone();
        Ok(Self::from_parts(elements, morphisms, (0..n).collect(), IndexKind::Poset, Vec::new(), |b, a| {
            index.get(&(ms[a].source, ms[b].target)).copied()
        }))
    }

    /// One-object category of a finite monoid; `table[b][a]` is the index of `b·a`.
    pub fn from_monoid(elements: Vec<String>, table: &[Vec<usize>]) -> Result<Self> {
        let m = elements.len();
        if table.len() != m || table.iter().any(|r| r.len() != m || r.iter().any(|&c| c >= m)) {
            return Err(Error::NotAMonoid("multiplication table is not closed".into()));
        }
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    if table[table[c][b]][a] != table[c][table[b][a]] {
                        return Err(Error::NotAMonoid(format!(
                            "({}·{})·{} differs from {}·({}·{})",
                            elements[c], elements[b], elements[a], elements[c], elements[b], elements[a]
                        )));
                    }
                }
            }
        }
        let e = (0..m)
            .find(|&e| (0..m).all(|a| table[e][a] == a && table[a][e] == a))
            .ok_or_else(|| Error::NotAMonoid("no identity element".into()))?;
        let morphisms = elements.iter().map(|s| IndexMorphism { name: s.clone(), source: 0, target: 0 }).collect();
        Ok(Self::from_parts(vec!["*".into()], morphisms, vec![e], IndexKind::Monoid, Vec::new(), |b, a| Some(table[b][a])))
    }

    /// An explicit table. `comp` must list `ba` for every composable pair.
    pub fn explicit(
        objects: Vec<String>,
        morphisms: Vec<IndexMorphism>,
        identities: Vec<usize>,
        comp: &HashMap<(usize, usize), usize>,
    ) -> Result<Self> {
        let c = Self::from_parts(objects, morphisms, identities, IndexKind::Explicit, Vec::new(), |b, a| comp.get(&(b, a)).copied());
        let r = c.check_axioms();
        if !r.passed() {
            return Err(Error::invalid(r.first_failure().unwrap()));
        }
        Ok(c)
    }

    /// The trivial category with one object.
    pub fn trivial() -> Self {
        Self::from_monoid(vec!["e".into()], &[vec![0]]).expect("trivial monoid")
    }

    pub fn kind(&self) -> &IndexKind {
        &self.kind
    }

    pub fn n_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn object_index(&self, name: &str) -> Option<usize> {
        self.objects.iter().position(|o| o == name)
    }

    pub fn n_morphisms(&self) -> usize {
        self.morphisms.len()
    }

    pub fn morphism(&self, a: usize) -> &IndexMorphism {
        &self.morphisms[a]
    }

    pub fn morphisms(&self) -> &[IndexMorphism] {
        &self.morphisms
    }

    pub fn morphism_index(&self, name: &str) -> Option<usize> {
        self.morphisms.iter().position(|m| m.name == name)
    }

    pub fn source(&self, a: usize) -> usize {
        self.morphisms[a].source
    }

    pub fn target(&self, a: usize) -> usize {
        self.morphisms[a].target
    }

    pub fn id(&self, i: usize) -> usize {
        self.identities[i]
    }

    pub fn is_identity(&self, a: usize) -> bool {
        self.identities[self.source(a)] == a
    }

    /// `ba`, when `source(b) = target(a)`.
    pub fn compose(&self, b: usize, a: usize) -> Option<usize> {
        self.comp[b * self.morphisms.len() + a]
    }

    /// Morphisms `i → j` in table order.
    pub fn hom(&self, i: usize, j: usize) -> Vec<usize> {
        (0..self.morphisms.len()).filter(|&a| self.source(a) == i && self.target(a) == j).collect()
    }

    /// For free categories, the arrows of a morphism in traversal order.
    pub fn path_of(&self, a: usize) -> Option<&[usize]> {
        self.paths.get(a).map(Vec::as_slice)
    }

    /// Composable pairs `(b, a)`.
    pub fn composable_pairs(&self) -> Vec<(usize, usize)> {
        let m = self.morphisms.len();
        (0..m).flat_map(|b| (0..m).map(move |a| (b, a))).filter(|&(b, a)| self.source(b) == self.target(a)).collect()
    }

    pub fn check_axioms(&self) -> Report {
        let mut r = Report::new("index category axioms");
        let m = self.morphisms.len();
        for (b, a) in self.composable_pairs() {
            match self.compose(b, a) {
                None => r.fail(format!("{}∘{} is undefined", self.morphisms[b].name, self.morphisms[a].name)),
                Some(c) if self.source(c) != self.source(a) || self.target(c) != self.target(b) => {
                    r.fail(format!("{}∘{} has wrong endpoints", self.morphisms[b].name, self.morphisms[a].name))
                }
                _ => {}
            }
        }
        if !r.passed() {
            return r;
        }
        for a in 0..m {
            if self.compose(self.id(self.target(a)), a) != Some(a) || self.compose(a, self.id(self.source(a))) != Some(a) {
                r.fail(format!("unit law fails for {}", self.morphisms[a].name));
            }
        }
        for (b, a) in self.composable_pairs() {
            let ba = self.compose(b, a).unwrap();
            for c in 0..m {
                if self.source(c) != self.target(b) {
                    continue;
                }
                let cb = self.compose(c, b).unwrap();
                if self.compose(c, ba) != self.compose(cb, a) {
                    r.fail(format!(
                        "associativity fails for {}, {}, {}",
                        self.morphisms[c].name, self.morphisms[b].name, self.morphisms[a].name
                    ));
                }
            }
        }
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn one_arrow() {
        let i = IndexCat::free_on_acyclic_quiver(names(&["1", "2"]), vec![("a".into(), 0, 1)]).unwrap();
        assert_eq!(i.n_morphisms(), 3);
        assert!(i.check_axioms().passed());
    }

    #[test]
    fn line_of_four() {
        let i = IndexCat::free_on_acyclic_quiver(
            names(&["2", "3", "4", "5"]),
            vec![("a2".into(), 0, 1), ("a3".into(), 1, 2), ("a4".into(), 2, 3)],
        )
        .unwrap();
        assert_eq!(i.n_morphisms(), 10);
        assert!(i.morphism_index("a4*a3*a2").is_some());
        assert!(i.check_axioms().passed());
    }

    #[test]
    fn cycle_rejected() {
        let e = IndexCat::free_on_acyclic_quiver(names(&["1", "2"]), vec![("a".into(), 0, 1), ("b".into(), 1, 0)]);
        assert!(matches!(e, Err(Error::CyclicQuiver(_))));
    }

    #[test]
    fn posets() {
        let chain = IndexCat::from_poset(names(&["1", "2", "3"]), &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(chain.n_morphisms(), 6);
        let anti = IndexCat::from_poset(names(&["1", "2"]), &[]).unwrap();
        assert_eq!(anti.n_morphisms(), 2);
        let diamond = IndexCat::from_poset(names(&["1", "2", "3", "4"]), &[(0, 1), (0, 2), (1, 3), (2, 3), (0, 3)]).unwrap();
        assert_eq!(diamond.n_morphisms(), 9);
        assert!(diamond.check_axioms().passed());
        assert!(matches!(IndexCat::from_poset(names(&["1", "2", "3"]), &[(0, 1), (1, 2)]), Err(Error::NotAPartialOrder(_))));
    }

    #[test]
    fn monoids() {
        let z2 = IndexCat::from_monoid(names(&["e", "s"]), &[vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(z2.n_morphisms(), 2);
        assert_eq!(IndexCat::trivial().n_morphisms(), 1);
        // {1, s, s^2} with s^3 = s^2
        let t = vec![vec![0, 1, 2], vec![1, 2, 2], vec![2, 2, 2]];
        let m = IndexCat::from_monoid(names(&["1", "s", "s2"]), &t).unwrap();
        assert_eq!(m.n_morphisms(), 3);
        assert!(m.check_axioms().passed());
        assert!(IndexCat::from_monoid(names(&["a", "b"]), &[vec![0, 0], vec![0, 0]]).is_err());
    }
}
