//! The text format: `[kind name]` section headers followed by `key = value`
//! lines. Lines starting with `#` are comments. Paths are arrow chains
//! composed right to left (`b*a` is `a` then `b`), and morphisms are linear
//! combinations `c1*w1 + c2*w2` of basis labels or paths, with binary `+`/`-`
//! separated by spaces.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::colax::{diagonal, ColaxFunctor, LeftTransformation};
use crate::error::{Error, Result};
use crate::field::{FieldSpec, Scalar};
use crate::fincat::{same_cat, Elem, FinKCat, KFunctor};
use crate::homotopy::{ProjComplex, ProjMatrix};
use crate::index::{IndexCat, IndexKind, IndexMorphism};
use crate::quiver::{build_category, functor_from_arrows, path_element, Arrow, QuiverPresentation, Relation};
use crate::tilting::{CertOp, GenerationCertificate, PresentationHints, TiltingColaxCertificate, TiltingSubcategoryData};

pub const SECTION_KINDS: &[&str] =
    &["field", "index", "category", "functor", "colax", "transformation", "complex", "tilting", "certificate", "hints"];

#[derive(Clone, Debug)]
pub struct Entry {
    pub key: String,
    pub value: String,
    pub line: usize,
    /// Column of the first character of the value.
    pub column: usize,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key && self.value == other.value
    }
}

impl Entry {
    fn keyword(&self) -> &str {
        self.key.split(' ').next().unwrap_or("")
    }

    fn args(&self) -> Vec<&str> {
        self.key.split(' ').skip(1).collect()
    }

    fn error(&self, offset: usize, message: impl Into<String>) -> Error {
        Error::Parse { line: self.line, column: self.column + offset, message: message.into() }
    }

    fn unresolved(&self, name: &str) -> Error {
        Error::UnresolvedReference { name: name.to_string(), line: self.line }
    }
}

#[derive(Clone, Debug)]
pub struct Section {
    pub kind: String,
    pub name: String,
    pub line: usize,
    pub entries: Vec<Entry>,
}

impl PartialEq for Section {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.name == other.name && self.entries == other.entries
    }
}

impl Section {
    pub fn new(kind: &str, name: &str) -> Self {
        Section { kind: kind.into(), name: name.into(), line: 0, entries: Vec::new() }
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.entries.push(Entry { key: key.into(), value: value.into(), line: 0, column: 0 });
    }

    pub fn get(&self, key: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.key == key)
    }

    fn required(&self, key: &str) -> Result<&Entry> {
        self.get(key).ok_or_else(|| Error::Parse {
            line: self.line,
            column: 1,
            message: format!("[{} {}] needs `{key} = ...`", self.kind, self.name),
        })
    }

    fn with(&self, keyword: &str) -> impl Iterator<Item = &Entry> {
        let keyword = keyword.to_string();
        self.entries.iter().filter(move |e| e.keyword() == keyword)
    }

    fn error(&self, message: impl Into<String>) -> Error {
        Error::Parse { line: self.line, column: 1, message: message.into() }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Document {
    pub sections: Vec<Section>,
}

fn squash(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

pub fn parse(text: &str) -> Result<Document> {
    let mut doc = Document::default();
    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        let t = raw.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let indent = raw.len() - raw.trim_start().len();
        if t.starts_with('[') {
            if !t.ends_with(']') {
                return Err(Error::Parse { line, column: indent + t.len(), message: "section header must end with `]`".into() });
            }
            let inner = &t[1..t.len() - 1];
            let mut words = inner.split_whitespace();
            let kind = words.next().unwrap_or("").to_string();
            if !SECTION_KINDS.contains(&kind.as_str()) {
                return Err(Error::Parse { line, column: indent + 2, message: format!("unknown section kind `{kind}`") });
            }
            let name = words.collect::<Vec<_>>().join(" ");
            if name.is_empty() && kind != "field" {
                return Err(Error::Parse { line, column: indent + 2, message: format!("[{kind}] sections need a name") });
            }
            if doc.sections.iter().any(|s| s.kind == kind && s.name == name) {
                return Err(Error::Parse { line, column: indent + 2, message: format!("duplicate section [{kind} {name}]") });
            }
            doc.sections.push(Section { kind, name, line, entries: Vec::new() });
            continue;
        }
        let Some(eq) = raw.find('=') else {
            return Err(Error::Parse { line, column: indent + 1, message: "expected `key = value`".into() });
        };
        let key = squash(&raw[..eq]);
        if key.is_empty() {
            return Err(Error::Parse { line, column: indent + 1, message: "empty key".into() });
        }
        let after = &raw[eq + 1..];
        let column = eq + 2 + (after.len() - after.trim_start().len());
        let value = squash(after);
        let Some(sec) = doc.sections.last_mut() else {
            return Err(Error::Parse { line, column: indent + 1, message: "entry outside of any section".into() });
        };
        sec.entries.push(Entry { key, value, line, column });
    }
    Ok(doc)
}

impl Document {
    /// Entries stably sorted by keyword; order within a keyword is meaningful.
    pub fn normalized(&self) -> Document {
        let mut d = self.clone();
        for s in &mut d.sections {
            s.entries.sort_by(|a, b| a.keyword().cmp(b.keyword()));
        }
        d
    }

    pub fn emit(&self) -> String {
        let mut out = String::new();
        for (k, s) in self.normalized().sections.iter().enumerate() {
            if k > 0 {
                out.push('\n');
            }
            if s.name.is_empty() {
                let _ = writeln!(out, "[{}]", s.kind);
            } else {
                let _ = writeln!(out, "[{} {}]", s.kind, s.name);
            }
            for e in &s.entries {
                if e.value.is_empty() {
                    let _ = writeln!(out, "{} =", e.key);
                } else {
                    let _ = writeln!(out, "{} = {}", e.key, e.value);
                }
            }
        }
        out
    }

    pub fn section(&self, kind: &str, name: &str) -> Option<&Section> {
        self.sections.iter().find(|s| s.kind == kind && s.name == name)
    }
}

// ---------- scalars and linear combinations ----------

fn parse_ratio(s: &str) -> Option<BigRational> {
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let num: BigInt = n.parse().ok()?;
    let den: BigInt = d.parse().ok()?;
    if den.is_zero() || d.starts_with(['-', '+']) {
        return None;
    }
    Some(BigRational::new(num, den))
}

fn ratio_to_scalar(field: FieldSpec, r: &BigRational) -> Result<Scalar> {
    field.from_ratio(r.numer(), r.denom())
}

pub fn scalar_text(s: &Scalar) -> String {
    s.to_string()
}

fn is_number(s: &str) -> bool {
    parse_ratio(s).is_some()
}

/// Tokens of a value with their byte offsets.
fn tokens(s: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in s.char_indices() {
        match (ch.is_whitespace(), start) {
            (true, Some(b)) => {
                out.push((b, &s[b..i]));
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(b) = start {
        out.push((b, &s[b..]));
    }
    out
}

/// Signed terms `(offset, coefficient, word)`; an empty list means zero.
fn lincomb_terms(e: &Entry) -> Result<Vec<(usize, BigRational, String)>> {
    let mut out = Vec::new();
    let mut sign = BigRational::one();
    let mut expect_term = true;
    let toks = tokens(&e.value);
    if toks.len() == 1 && toks[0].1 == "0" {
        return Ok(out);
    }
    for (off, t) in toks {
        if t == "+" || t == "-" {
            if !expect_term && !out.is_empty() || out.is_empty() {
                if t == "-" {
                    sign = -sign;
                }
                expect_term = true;
                continue;
            }
            return Err(e.error(off, "dangling operator"));
        }
        if !expect_term {
            return Err(e.error(off, "expected `+` or `-` between terms"));
        }
        let (mut neg, body) = match t.strip_prefix('-') {
            Some(b) if !b.is_empty() => (true, b),
            _ => (false, t),
        };
        let (coef, word) = match body.split_once('*') {
            Some((c, w)) if is_number(c) => (parse_ratio(c).unwrap(), w),
            _ if is_number(body) => return Err(e.error(off, format!("a bare number `{body}` is not a morphism"))),
            _ => (BigRational::one(), body),
        };
        if word.is_empty() {
            return Err(e.error(off, "missing word after coefficient"));
        }
        if sign.is_negative() {
            neg = !neg;
        }
        let c = if neg { -coef } else { coef };
        out.push((off, c, word.to_string()));
        sign = BigRational::one();
        expect_term = false;
    }
    if expect_term && !out.is_empty() {
        return Err(e.error(e.value.len(), "dangling operator"));
    }
    Ok(out)
}

/// Parses a morphism of `Hom(x, y)` in `c`.
pub fn parse_elem(c: &FinKCat, x: usize, y: usize, e: &Entry) -> Result<Elem> {
    let field = c.field();
    let mut acc = c.zero(x, y);
    for (off, coef, word) in lincomb_terms(e)? {
        let s = ratio_to_scalar(field, &coef).map_err(|err| e.error(off, err.to_string()))?;
        let v = if let Some(k) = c.labels(x, y).iter().position(|l| *l == word) {
            c.basis_elem(x, y, k)
        } else if let Some(info) = c.quiver() {
            let q = &info.presentation;
            let seq = if let Some(v) = word.strip_prefix("id_") {
                if q.vertex_index(v) != Some(x) {
                    return Err(e.error(off, format!("`{word}` is not the identity of {}", c.object_name(x))));
                }
                Vec::new()
            } else {
                path_lookup_q(q, &word, e, off)?
            };
            let (end, v) = path_element(c, x, &seq).map_err(|err| e.error(off, format!("`{word}`: {err}")))?;
            if end != y {
                return Err(e.error(off, format!("`{word}` does not end at {}", c.object_name(y))));
            }
            v
        } else {
            return Err(e.error(off, format!("`{word}` is not a basis label of Hom({}, {})", c.object_name(x), c.object_name(y))));
        };
        for (a, b) in acc.iter_mut().zip(&v) {
            *a = &*a + &(&s * b);
        }
    }
    Ok(acc)
}

fn term_text(out: &mut String, first: bool, negative: bool, magnitude: &str, word: &str) {
    if first {
        if negative {
            out.push('-');
        }
    } else {
        out.push_str(if negative { " - " } else { " + " });
    }
    if magnitude != "1" {
        out.push_str(magnitude);
        out.push('*');
    }
    out.push_str(word);
}

/// Emits a morphism of `Hom(x, y)` over basis labels.
pub fn elem_text(c: &FinKCat, x: usize, y: usize, v: &[Scalar]) -> String {
    let mut out = String::new();
    let mut first = true;
    for (k, s) in v.iter().enumerate() {
        if s.is_zero() {
            continue;
        }
        let neg = s.is_negative();
        let mag = if neg { (-s).to_string() } else { s.to_string() };
        term_text(&mut out, first, neg, &mag, &c.labels(x, y)[k]);
        first = false;
    }
    if first {
        "0".into()
    } else {
        out
    }
}

fn scalars_text(v: &[Scalar]) -> String {
    v.iter().map(scalar_text).collect::<Vec<_>>().join(" ")
}

fn parse_scalars(field: FieldSpec, e: &Entry) -> Result<Vec<Scalar>> {
    tokens(&e.value)
        .into_iter()
        .map(|(off, t)| {
            let r = parse_ratio(t).ok_or_else(|| e.error(off, format!("`{t}` is not a number")))?;
            ratio_to_scalar(field, &r).map_err(|err| e.error(off, err.to_string()))
        })
        .collect()
}

fn parse_int<T: std::str::FromStr>(e: &Entry, s: &str, what: &str) -> Result<T> {
    s.parse().map_err(|_| e.error(0, format!("`{s}` is not a valid {what}")))
}

fn words(s: &str) -> Vec<&str> {
    s.split_whitespace().collect()
}

// ---------- resolution ----------

#[derive(Clone, Debug)]
pub struct HintSet {
    pub target: String,
    pub tilting: String,
    pub hints: Vec<PresentationHints>,
}

/// Every named entity of a document, built and cross-checked.
#[derive(Clone, Debug)]
pub struct Workspace {
    pub field: FieldSpec,
    pub indices: BTreeMap<String, Arc<IndexCat>>,
    pub categories: BTreeMap<String, Arc<FinKCat>>,
    pub functors: BTreeMap<String, Arc<KFunctor>>,
    pub colax: BTreeMap<String, Arc<ColaxFunctor>>,
    pub transformations: BTreeMap<String, Arc<LeftTransformation>>,
    pub complexes: BTreeMap<String, Arc<ProjComplex>>,
    pub tilting: BTreeMap<String, TiltingColaxCertificate>,
    /// The colax functor each tilting section is over.
    pub tilting_colax: BTreeMap<String, String>,
    pub hints: BTreeMap<String, HintSet>,
}

fn lookup<'a, T>(map: &'a BTreeMap<String, T>, e: &Entry, name: &str) -> Result<&'a T> {
    map.get(name).ok_or_else(|| e.unresolved(name))
}

fn object_of(c: &FinKCat, e: &Entry, name: &str) -> Result<usize> {
    c.object_index(name).ok_or_else(|| e.unresolved(name))
}

fn index_object(i: &IndexCat, e: &Entry, name: &str) -> Result<usize> {
    i.object_index(name).ok_or_else(|| e.unresolved(name))
}

fn index_morphism(i: &IndexCat, e: &Entry, name: &str) -> Result<usize> {
    i.morphism_index(name).ok_or_else(|| e.unresolved(name))
}

fn one_arg<'a>(e: &'a Entry, n: usize) -> Result<Vec<&'a str>> {
    let a = e.args();
    if a.len() != n {
        return Err(Error::Parse { line: e.line, column: 1, message: format!("`{}` takes {n} argument(s)", e.keyword()) });
    }
    Ok(a)
}

pub fn load(text: &str) -> Result<Workspace> {
    resolve(&parse(text)?)
}

pub fn resolve(doc: &Document) -> Result<Workspace> {
    let field = match doc.sections.iter().find(|s| s.kind == "field") {
        None => FieldSpec::rationals(),
        Some(s) => {
            let e = s.required("characteristic")?;
            match parse_int::<u64>(e, &e.value, "characteristic")? {
                0 => FieldSpec::rationals(),
                p => FieldSpec::prime(p).map_err(|err| e.error(0, err.to_string()))?,
            }
        }
    };
    let mut ws = Workspace {
        field,
        indices: BTreeMap::new(),
        categories: BTreeMap::new(),
        functors: BTreeMap::new(),
        colax: BTreeMap::new(),
        transformations: BTreeMap::new(),
        complexes: BTreeMap::new(),
        tilting: BTreeMap::new(),
        tilting_colax: BTreeMap::new(),
        hints: BTreeMap::new(),
    };
    let of = |k: &'static str| doc.sections.iter().filter(move |s| s.kind == k);
    for s in of("index") {
        let i = resolve_index(s)?;
        ws.indices.insert(s.name.clone(), Arc::new(i));
    }
    for s in of("category") {
        let c = resolve_category(s, field)?;
        ws.categories.insert(s.name.clone(), Arc::new(c));
    }
    for s in of("functor") {
        let f = resolve_functor(s, &ws)?;
        ws.functors.insert(s.name.clone(), Arc::new(f));
    }
    for s in of("colax") {
        let x = resolve_colax(s, &ws)?;
        ws.colax.insert(s.name.clone(), Arc::new(x));
    }
    for s in of("transformation") {
        let f = resolve_transformation(s, &ws)?;
        ws.transformations.insert(s.name.clone(), Arc::new(f));
    }
    for s in of("complex") {
        let u = resolve_complex(s, &ws)?;
        ws.complexes.insert(s.name.clone(), Arc::new(u));
    }
    for s in of("tilting") {
        let (cert, colax) = resolve_tilting(s, &ws)?;
        ws.tilting.insert(s.name.clone(), cert);
        ws.tilting_colax.insert(s.name.clone(), colax);
    }
    for s in of("certificate") {
        resolve_certificate(s, &mut ws)?;
    }
    for s in of("hints") {
        let h = resolve_hints(s, &ws)?;
        ws.hints.insert(s.name.clone(), h);
    }
    Ok(ws)
}

fn resolve_index(s: &Section) -> Result<IndexCat> {
    let kind = s.required("kind")?;
    let objects: Vec<String> = words(&s.required("objects")?.value).into_iter().map(String::from).collect();
    let pos = |e: &Entry, name: &str| objects.iter().position(|o| o == name).ok_or_else(|| e.unresolved(name));
    let endpoints = |e: &Entry| -> Result<(usize, usize)> {
        let (a, b) = e.value.split_once("->").ok_or_else(|| e.error(0, "expected `source -> target`"))?;
        Ok((pos(e, a.trim())?, pos(e, b.trim())?))
    };
    let built = match kind.value.as_str() {
        "quiver" => {
            let mut arrows = Vec::new();
            for e in s.with("arrow") {
                let name = one_arg(e, 1)?[0].to_string();
                let (a, b) = endpoints(e)?;
                arrows.push((name, a, b));
            }
            IndexCat::free_on_acyclic_quiver(objects.clone(), arrows)
        }
        "poset" => {
            let mut less = Vec::new();
            for e in s.with("less") {
                for (off, t) in tokens(&e.value) {
                    let (a, b) = t.split_once('<').ok_or_else(|| e.error(off, "expected `x<y`"))?;
                    less.push((pos(e, a)?, pos(e, b)?));
                }
            }
            IndexCat::from_poset(objects.clone(), &less)
        }
        "monoid" => {
            let mut table = vec![Vec::new(); objects.len()];
            let mut seen = vec![false; objects.len()];
            for e in s.with("row") {
                let b = pos(e, one_arg(e, 1)?[0])?;
                table[b] = words(&e.value).into_iter().map(|w| pos(e, w)).collect::<Result<_>>()?;
                seen[b] = true;
            }
            if let Some(b) = seen.iter().position(|x| !x) {
                return Err(s.error(format!("missing `row {}`", objects[b])));
            }
            IndexCat::from_monoid(objects.clone(), &table)
        }
        "explicit" => {
            let mut morphisms: Vec<IndexMorphism> = Vec::new();
            for e in s.with("morphism") {
                let name = one_arg(e, 1)?[0].to_string();
                let (a, b) = endpoints(e)?;
                morphisms.push(IndexMorphism { name, source: a, target: b });
            }
            let mpos = |e: &Entry, name: &str| morphisms.iter().position(|m| m.name == name).ok_or_else(|| e.unresolved(name));
            let mut identities = vec![usize::MAX; objects.len()];
            for e in s.with("identity") {
                let x = pos(e, one_arg(e, 1)?[0])?;
                identities[x] = mpos(e, &e.value)?;
            }
            if let Some(x) = identities.iter().position(|&v| v == usize::MAX) {
                return Err(s.error(format!("missing `identity {}`", objects[x])));
            }
            let mut comp = HashMap::new();
            for e in s.with("compose") {
                let a = one_arg(e, 2)?;
                comp.insert((mpos(e, a[0])?, mpos(e, a[1])?), mpos(e, &e.value)?);
            }
            IndexCat::explicit(objects.clone(), morphisms, identities, &comp)
        }
        other => return Err(kind.error(0, format!("unknown index kind `{other}`"))),
    };
    built.map_err(|err| s.error(err.to_string()))
}

fn resolve_category(s: &Section, field: FieldSpec) -> Result<FinKCat> {
    if s.get("kind").is_some_and(|e| e.value == "table") {
        return resolve_table_category(s, field);
    }
    let vertices: Vec<String> = words(&s.required("vertices")?.value).into_iter().map(String::from).collect();
    let mut arrows = Vec::new();
    for e in s.with("arrow") {
        let name = one_arg(e, 1)?[0].to_string();
        if is_number(&name) || name.contains('*') || name.starts_with("id_") {
            return Err(Error::Parse { line: e.line, column: 1, message: format!("`{name}` cannot name an arrow") });
        }
        let (a, b) = e.value.split_once("->").ok_or_else(|| e.error(0, "expected `source -> target`"))?;
        let v = |n: &str| vertices.iter().position(|x| x == n).ok_or_else(|| e.unresolved(n));
        arrows.push(Arrow { name, source: v(a.trim())?, target: v(b.trim())? });
    }
    let mut q = QuiverPresentation::new(vertices, arrows);
    for e in s.with("relation") {
        let mut rel: Relation = Vec::new();
        for (off, coef, word) in lincomb_terms(e)? {
            if word.starts_with("id_") {
                return Err(e.error(off, "relations cannot contain identity paths"));
            }
            let seq = path_lookup_q(&q, &word, e, off)?;
            rel.push((coef, seq));
        }
        if !rel.is_empty() {
            q.relations.push(rel);
        }
    }
    if let Some(e) = s.get("length_cap") {
        q.length_cap = Some(parse_int(e, &e.value, "length cap")?);
    }
    build_category(&q, field).map_err(|err| match err {
        Error::CapExceeded(_) | Error::InhomogeneousRelation(_) => err,
        other => s.error(other.to_string()),
    })
}

fn path_lookup_q(q: &QuiverPresentation, word: &str, e: &Entry, off: usize) -> Result<Vec<usize>> {
    let mut seq = Vec::new();
    let mut end = off + word.len();
    for name in word.rsplit('*') {
        let start = end - name.len();
        let a = q.arrow_index(name).ok_or_else(|| e.error(start, format!("unknown arrow `{name}`")))?;
        seq.push(a);
        end = start.saturating_sub(1);
    }
    q.endpoints(&seq).map_err(|_| e.error(off, format!("`{word}` is not a path")))?;
    Ok(seq)
}

fn resolve_table_category(s: &Section, field: FieldSpec) -> Result<FinKCat> {
    let objects: Vec<String> = words(&s.required("objects")?.value).into_iter().map(String::from).collect();
    let n = objects.len();
    let pos = |e: &Entry, name: &str| objects.iter().position(|o| o == name).ok_or_else(|| e.unresolved(name));
    let mut labels = vec![Vec::new(); n * n];
    for e in s.with("hom") {
        let a = one_arg(e, 2)?;
        labels[pos(e, a[0])? * n + pos(e, a[1])?] = words(&e.value).into_iter().map(String::from).collect();
    }
    // a provisional category without products, to parse label combinations
    let bare = FinKCat::from_tables(field, objects.clone(), labels.clone(), (0..n).map(|x| vec![field.zero(); labels[x * n + x].len()]).collect(), |_, _, _, _, _| Vec::new())?;
    let mut identities: Vec<Elem> = (0..n).map(|x| bare.zero(x, x)).collect();
    for e in s.with("identity") {
        let x = pos(e, one_arg(e, 1)?[0])?;
        identities[x] = parse_elem(&bare, x, x, e)?;
    }
    let mut products: HashMap<(usize, usize, usize, usize, usize), Elem> = HashMap::new();
    for e in s.with("mul") {
        let a = one_arg(e, 5)?;
        let (x, y, z) = (pos(e, a[0])?, pos(e, a[1])?, pos(e, a[2])?);
        let g = labels[y * n + z].iter().position(|l| l == a[3]).ok_or_else(|| e.unresolved(a[3]))?;
        let f = labels[x * n + y].iter().position(|l| l == a[4]).ok_or_else(|| e.unresolved(a[4]))?;
        products.insert((x, y, z, g, f), parse_elem(&bare, x, z, e)?);
    }
    let c = FinKCat::from_tables(field, objects, labels, identities, |x, y, z, g, f| {
        products.get(&(x, y, z, g, f)).cloned().unwrap_or_else(|| bare.zero(x, z))
    })?;
    let r = c.check_axioms();
    if !r.passed() {
        return Err(s.error(format!("not a category: {}", r.first_failure().unwrap())));
    }
    Ok(c)
}

fn resolve_functor(s: &Section, ws: &Workspace) -> Result<KFunctor> {
    let se = s.required("source")?;
    let te = s.required("target")?;
    let src = lookup(&ws.categories, se, &se.value)?.clone();
    let tgt = lookup(&ws.categories, te, &te.value)?.clone();
    let mut omap = vec![usize::MAX; src.n_objects()];
    for e in s.with("object") {
        let x = object_of(&src, e, one_arg(e, 1)?[0])?;
        omap[x] = object_of(&tgt, e, &e.value)?;
    }
    if let Some(x) = omap.iter().position(|&v| v == usize::MAX) {
        return Err(s.error(format!("missing `object {}`", src.object_name(x))));
    }
    if let Some(info) = src.quiver() {
        let q = &info.presentation;
        let mut images: Vec<Option<Elem>> = vec![None; q.arrows.len()];
        for e in s.with("arrow") {
            let name = one_arg(e, 1)?[0];
            let a = q.arrow_index(name).ok_or_else(|| e.unresolved(name))?;
            images[a] = Some(parse_elem(&tgt, omap[q.arrows[a].source], omap[q.arrows[a].target], e)?);
        }
        let images: Vec<Elem> = images
            .into_iter()
            .enumerate()
            .map(|(a, v)| v.ok_or_else(|| s.error(format!("missing `arrow {}`", q.arrows[a].name))))
            .collect::<Result<_>>()?;
        return functor_from_arrows(src, tgt, omap, &images).map_err(|err| s.error(err.to_string()));
    }
    let n = src.n_objects();
    let mut images = HashMap::new();
    for e in s.with("image") {
        let a = one_arg(e, 3)?;
        let (x, y) = (object_of(&src, e, a[0])?, object_of(&src, e, a[1])?);
        let k = src.labels(x, y).iter().position(|l| l == a[2]).ok_or_else(|| e.unresolved(a[2]))?;
        images.insert((x, y, k), parse_elem(&tgt, omap[x], omap[y], e)?);
    }
    for x in 0..n {
        for y in 0..n {
            for (k, l) in src.labels(x, y).iter().enumerate() {
                if !images.contains_key(&(x, y, k)) {
                    return Err(s.error(format!("missing `image {} {} {l}`", src.object_name(x), src.object_name(y))));
                }
            }
        }
    }
    let f = KFunctor::from_images(src, tgt, omap, |x, y, k| images[&(x, y, k)].clone())?;
    let r = f.check();
    if !r.passed() {
        return Err(s.error(format!("not a functor: {}", r.first_failure().unwrap())));
    }
    Ok(f)
}

fn resolve_colax(s: &Section, ws: &Workspace) -> Result<ColaxFunctor> {
    let ie = s.required("index")?;
    let idx = lookup(&ws.indices, ie, &ie.value)?.clone();
    let base = if let Some(e) = s.get("diagonal") {
        diagonal(lookup(&ws.categories, e, &e.value)?.clone(), idx.clone())
    } else {
        let mut fibers: Vec<Option<Arc<FinKCat>>> = vec![None; idx.n_objects()];
        for e in s.with("fiber") {
            let i = index_object(&idx, e, one_arg(e, 1)?[0])?;
            fibers[i] = Some(lookup(&ws.categories, e, &e.value)?.clone());
        }
        let fibers: Vec<Arc<FinKCat>> = fibers
            .into_iter()
            .enumerate()
            .map(|(i, f)| f.ok_or_else(|| s.error(format!("missing `fiber {}`", idx.objects()[i]))))
            .collect::<Result<_>>()?;
        if s.with("morphism").next().is_some() {
            general_colax(s, ws, idx.clone(), fibers)?
        } else {
            let IndexKind::Free { arrows } = idx.kind().clone() else {
                return Err(s.error("only free index categories are generated by arrows; list every `morphism`"));
            };
            let mut gens: Vec<Option<Arc<KFunctor>>> = vec![None; arrows.len()];
            for e in s.with("arrow") {
                let a = index_morphism(&idx, e, one_arg(e, 1)?[0])?;
                let k = arrows.iter().position(|&m| m == a).ok_or_else(|| e.error(0, "not a generating arrow"))?;
                gens[k] = Some(lookup(&ws.functors, e, &e.value)?.clone());
            }
            let gens: Vec<Arc<KFunctor>> = gens
                .into_iter()
                .enumerate()
                .map(|(k, g)| g.ok_or_else(|| s.error(format!("missing `arrow {}`", idx.morphism(arrows[k]).name))))
                .collect::<Result<_>>()?;
            ColaxFunctor::from_generators(idx.clone(), fibers, &gens).map_err(|err| s.error(err.to_string()))?
        }
    };
    if s.with("twist").next().is_none() {
        return Ok(base);
    }
    let mut u: Vec<Vec<Elem>> = (0..idx.n_morphisms())
        .map(|a| {
            let c = base.fiber(idx.target(a));
            (0..base.fiber(idx.source(a)).n_objects()).map(|x| c.identity(base.arrow(a).obj(x)).clone()).collect()
        })
        .collect();
    for e in s.with("twist") {
        let a = one_arg(e, 2)?;
        let m = index_morphism(&idx, e, a[0])?;
        let x = object_of(base.fiber(idx.source(m)), e, a[1])?;
        let y = base.arrow(m).obj(x);
        u[m][x] = parse_elem(base.fiber(idx.target(m)), y, y, e)?;
    }
    base.twist(&u).map_err(|err| s.error(err.to_string()))
}

fn general_colax(s: &Section, ws: &Workspace, idx: Arc<IndexCat>, fibers: Vec<Arc<FinKCat>>) -> Result<ColaxFunctor> {
    let m = idx.n_morphisms();
    let mut arrows: Vec<Option<Arc<KFunctor>>> = vec![None; m];
    for e in s.with("morphism") {
        let a = index_morphism(&idx, e, one_arg(e, 1)?[0])?;
        arrows[a] = Some(lookup(&ws.functors, e, &e.value)?.clone());
    }
    let arrows: Vec<Arc<KFunctor>> = arrows
        .into_iter()
        .enumerate()
        .map(|(a, f)| f.ok_or_else(|| s.error(format!("missing `morphism {}`", idx.morphism(a).name))))
        .collect::<Result<_>>()?;
    let default = |c: &FinKCat, x: usize, y: usize| if x == y { Some(c.identity(x).clone()) } else { None };
    let mut eta: Vec<Vec<Option<Elem>>> = (0..idx.n_objects())
        .map(|i| {
            let c = &fibers[i];
            (0..c.n_objects()).map(|x| default(c, arrows[idx.id(i)].obj(x), x)).collect()
        })
        .collect();
    for e in s.with("eta") {
        let a = one_arg(e, 2)?;
        let i = index_object(&idx, e, a[0])?;
        let c = &fibers[i];
        let x = object_of(c, e, a[1])?;
        eta[i][x] = Some(parse_elem(c, arrows[idx.id(i)].obj(x), x, e)?);
    }
    let eta: Vec<Vec<Elem>> = eta
        .into_iter()
        .enumerate()
        .map(|(i, row)| {
            row.into_iter()
                .enumerate()
                .map(|(x, v)| v.ok_or_else(|| s.error(format!("missing `eta {} {}`", idx.objects()[i], fibers[i].object_name(x)))))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let mut theta: HashMap<(usize, usize), Vec<Option<Elem>>> = HashMap::new();
    for (b, a) in idx.composable_pairs() {
        let ba = idx.compose(b, a).unwrap();
        let c = &fibers[idx.target(b)];
        let row = (0..fibers[idx.source(a)].n_objects())
            .map(|x| default(c, arrows[ba].obj(x), arrows[b].obj(arrows[a].obj(x))))
            .collect();
        theta.insert((b, a), row);
    }
    for e in s.with("theta") {
        let args = one_arg(e, 3)?;
        let (b, a) = (index_morphism(&idx, e, args[0])?, index_morphism(&idx, e, args[1])?);
        let Some(ba) = idx.compose(b, a) else {
            return Err(e.error(0, "morphisms are not composable"));
        };
        let x = object_of(&fibers[idx.source(a)], e, args[2])?;
        let c = &fibers[idx.target(b)];
        let v = parse_elem(c, arrows[ba].obj(x), arrows[b].obj(arrows[a].obj(x)), e)?;
        theta.get_mut(&(b, a)).unwrap()[x] = Some(v);
    }
    let mut full: HashMap<(usize, usize), Vec<Elem>> = HashMap::new();
    for ((b, a), row) in theta {
        let row = row
            .into_iter()
            .enumerate()
            .map(|(x, v)| {
                v.ok_or_else(|| {
                    s.error(format!(
                        "missing `theta {} {} {}`",
                        idx.morphism(b).name,
                        idx.morphism(a).name,
                        fibers[idx.source(a)].object_name(x)
                    ))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        full.insert((b, a), row);
    }
    ColaxFunctor::new(idx, fibers, arrows, eta, |b, a| full[&(b, a)].clone()).map_err(|err| s.error(err.to_string()))
}

fn resolve_transformation(s: &Section, ws: &Workspace) -> Result<LeftTransformation> {
    let se = s.required("source")?;
    let te = s.required("target")?;
    let src = lookup(&ws.colax, se, &se.value)?.clone();
    let tgt = lookup(&ws.colax, te, &te.value)?.clone();
    let idx = src.index().clone();
    let mut functors: Vec<Option<Arc<KFunctor>>> = vec![None; idx.n_objects()];
    for e in s.with("functor") {
        let i = index_object(&idx, e, one_arg(e, 1)?[0])?;
        functors[i] = Some(lookup(&ws.functors, e, &e.value)?.clone());
    }
    let functors: Vec<Arc<KFunctor>> = functors
        .into_iter()
        .enumerate()
        .map(|(i, f)| f.ok_or_else(|| s.error(format!("missing `functor {}`", idx.objects()[i]))))
        .collect::<Result<_>>()?;
    if s.with("psi").next().is_none() {
        return LeftTransformation::with_identity_psi(src, tgt, functors).map_err(|err| s.error(err.to_string()));
    }
    let mut psi: Vec<Vec<Option<Elem>>> = (0..idx.n_morphisms())
        .map(|a| {
            let (i, j) = (idx.source(a), idx.target(a));
            let c = tgt.fiber(j);
            (0..src.fiber(i).n_objects())
                .map(|x| {
                    let (s0, t0) = (tgt.arrow(a).obj(functors[i].obj(x)), functors[j].obj(src.arrow(a).obj(x)));
                    (s0 == t0).then(|| c.identity(s0).clone())
                })
                .collect()
        })
        .collect();
    for e in s.with("psi") {
        let a = one_arg(e, 2)?;
        let m = index_morphism(&idx, e, a[0])?;
        let (i, j) = (idx.source(m), idx.target(m));
        let x = object_of(src.fiber(i), e, a[1])?;
        let (s0, t0) = (tgt.arrow(m).obj(functors[i].obj(x)), functors[j].obj(src.arrow(m).obj(x)));
        psi[m][x] = Some(parse_elem(tgt.fiber(j), s0, t0, e)?);
    }
    let psi: Vec<Vec<Elem>> = psi
        .into_iter()
        .enumerate()
        .map(|(a, row)| {
            row.into_iter()
                .enumerate()
                .map(|(x, v)| v.ok_or_else(|| s.error(format!("missing `psi {} {}`", idx.morphism(a).name, src.fiber(idx.source(a)).object_name(x)))))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    LeftTransformation::new(src, tgt, functors, psi).map_err(|err| s.error(err.to_string()))
}

fn resolve_complex(s: &Section, ws: &Workspace) -> Result<ProjComplex> {
    let ce = s.required("category")?;
    let c = lookup(&ws.categories, ce, &ce.value)?.clone();
    let lo: i64 = match s.get("lo") {
        Some(e) => parse_int(e, &e.value, "degree")?,
        None => 0,
    };
    let mut terms: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for e in s.with("term") {
        let k: i64 = parse_int(e, one_arg(e, 1)?[0], "degree")?;
        if k < lo {
            return Err(e.error(0, format!("degree {k} is below lo = {lo}")));
        }
        let objs = if e.value == "0" { Vec::new() } else { words(&e.value).into_iter().map(|w| object_of(&c, e, w)).collect::<Result<_>>()? };
        terms.insert(k, objs);
    }
    let hi = terms.keys().next_back().copied().unwrap_or(lo - 1);
    let seq: Vec<Vec<usize>> = (lo..=hi).map(|k| terms.get(&k).cloned().unwrap_or_default()).collect();
    let mut diffs: Vec<ProjMatrix> = (lo..hi).map(|k| ProjMatrix::zero(&c, &seq[(k - lo) as usize], &seq[(k - lo + 1) as usize])).collect();
    for e in s.with("d") {
        let a = one_arg(e, 3)?;
        let k: i64 = parse_int(e, a[0], "degree")?;
        if k < lo || k >= hi {
            return Err(e.error(0, format!("no differential leaves degree {k}")));
        }
        let t = (k - lo) as usize;
        let (r, col): (usize, usize) = (parse_int(e, a[1], "row")?, parse_int(e, a[2], "column")?);
        let (src, tgt) = (&seq[t], &seq[t + 1]);
        if r >= tgt.len() || col >= src.len() {
            return Err(e.error(0, "entry outside the differential"));
        }
        let v = parse_elem(&c, src[col], tgt[r], e)?;
        diffs[t].set(r, col, v);
    }
    ProjComplex::new(c, lo, seq, diffs).map_err(|err| s.error(err.to_string()))
}

fn resolve_tilting(s: &Section, ws: &Workspace) -> Result<(TiltingColaxCertificate, String)> {
    let xe = s.required("colax")?;
    let x = lookup(&ws.colax, xe, &xe.value)?.clone();
    let idx = x.index().clone();
    let mut fibers: Vec<Option<TiltingSubcategoryData>> = vec![None; idx.n_objects()];
    for e in s.with("fiber") {
        let i = index_object(&idx, e, one_arg(e, 1)?[0])?;
        let names: Vec<String> = words(&e.value).into_iter().map(String::from).collect();
        let objs = names.iter().map(|n| lookup(&ws.complexes, e, n).cloned()).collect::<Result<Vec<_>>>()?;
        if let Some(u) = objs.iter().find(|u| !same_cat(u.base(), x.fiber(i))) {
            let _ = u;
            return Err(e.error(0, format!("complexes must live over the fiber at {}", idx.objects()[i])));
        }
        fibers[i] = Some(TiltingSubcategoryData::new(x.fiber(i).clone(), names, objs).map_err(|err| e.error(0, err.to_string()))?);
    }
    let fibers: Vec<TiltingSubcategoryData> = fibers
        .into_iter()
        .enumerate()
        .map(|(i, f)| f.ok_or_else(|| s.error(format!("missing `fiber {}`", idx.objects()[i]))))
        .collect::<Result<_>>()?;
    let m = idx.n_morphisms();
    let mut maps: Vec<Option<Vec<usize>>> = vec![None; m];
    for i in 0..idx.n_objects() {
        maps[idx.id(i)] = Some((0..fibers[i].len()).collect());
    }
    for e in s.with("map") {
        let a = index_morphism(&idx, e, one_arg(e, 1)?[0])?;
        let (si, ti) = (&fibers[idx.source(a)], &fibers[idx.target(a)]);
        let mut row = vec![usize::MAX; si.len()];
        for (off, t) in tokens(&e.value) {
            let (u, v) = t.split_once('>').ok_or_else(|| e.error(off, "expected `U>V`"))?;
            let pu = si.names().iter().position(|n| n == u).ok_or_else(|| e.unresolved(u))?;
            let pv = ti.names().iter().position(|n| n == v).ok_or_else(|| e.unresolved(v))?;
            row[pu] = pv;
        }
        if let Some(u) = row.iter().position(|&v| v == usize::MAX) {
            return Err(e.error(0, format!("{} has no image", si.names()[u])));
        }
        maps[a] = Some(row);
    }
    for a in 0..m {
        if maps[a].is_some() {
            continue;
        }
        let path = idx.path_of(a).filter(|p| p.iter().all(|&g| maps[g].is_some()));
        let Some(path) = path else {
            return Err(s.error(format!("missing `map {}`", idx.morphism(a).name)));
        };
        let mut row: Vec<usize> = (0..fibers[idx.source(a)].len()).collect();
        for &g in path {
            let mg = maps[g].as_ref().unwrap();
            row = row.into_iter().map(|u| mg[u]).collect();
        }
        maps[a] = Some(row);
    }
    let maps = maps.into_iter().map(Option::unwrap).collect();
    let cert = TiltingColaxCertificate::with_identity_rho(x, fibers, maps).map_err(|err| s.error(err.to_string()))?;
    Ok((cert, xe.value.clone()))
}

fn resolve_certificate(s: &Section, ws: &mut Workspace) -> Result<()> {
    let te = s.required("tilting")?;
    let cert = ws.tilting.get_mut(&te.value).ok_or_else(|| te.unresolved(&te.value))?;
    let idx = cert.colax.index().clone();
    let fe = s.required("fiber")?;
    let i = index_object(&idx, fe, &fe.value)?;
    let ge = s.required("target")?;
    let x = object_of(cert.colax.fiber(i), ge, &ge.value)?;
    let t = &cert.fibers[i];
    let mut ops = Vec::new();
    for e in s.with("op") {
        let toks = tokens(&e.value);
        let word = |k: usize| toks.get(k).map(|p| p.1).ok_or_else(|| e.error(e.value.len(), "op is too short"));
        let step = |k: usize| -> Result<usize> {
            let v: usize = word(k)?.parse().map_err(|_| e.error(toks[k].0, "expected a step number"))?;
            if v >= ops.len() {
                return Err(e.error(toks[k].0, format!("step {v} is not defined yet")));
            }
            Ok(v)
        };
        let after_colon = || -> Vec<(usize, &str)> {
            toks.iter().skip_while(|p| p.1 != ":").skip(1).copied().collect()
        };
        let op = match word(0)? {
            "take" => {
                let n = word(1)?;
                CertOp::Take(t.names().iter().position(|m| m == n).ok_or_else(|| e.unresolved(n))?)
            }
            "shift" => CertOp::Shift { of: step(1)?, by: word(2)?.parse().map_err(|_| e.error(toks[2].0, "expected an integer"))? },
            "cone" => {
                let (from, to) = (step(1)?, step(2)?);
                let coords = after_colon()
                    .into_iter()
                    .map(|(off, w)| {
                        let r = parse_ratio(w).ok_or_else(|| e.error(off, format!("`{w}` is not a number")))?;
                        ratio_to_scalar(ws.field, &r).map_err(|err| e.error(off, err.to_string()))
                    })
                    .collect::<Result<_>>()?;
                CertOp::Cone { from, to, coords }
            }
            "summand" => {
                let of = step(1)?;
                let keep = after_colon()
                    .into_iter()
                    .map(|(off, w)| {
                        let (d, p) = w.split_once('@').ok_or_else(|| e.error(off, "expected `degree@slot`"))?;
                        Ok((d.parse().map_err(|_| e.error(off, "bad degree"))?, p.parse().map_err(|_| e.error(off, "bad slot"))?))
                    })
                    .collect::<Result<_>>()?;
                CertOp::Summand { of, keep }
            }
            other => return Err(e.error(0, format!("unknown op `{other}`"))),
        };
        ops.push(op);
    }
    if ops.is_empty() {
        return Err(s.error("a certificate needs at least one `op`"));
    }
    cert.certificates[i][x] = Some(GenerationCertificate { target: x, ops });
    Ok(())
}

fn resolve_hints(s: &Section, ws: &Workspace) -> Result<HintSet> {
    let te = s.required("target")?;
    let xp = lookup(&ws.colax, te, &te.value)?;
    let ce = s.required("tilting")?;
    let cert = lookup(&ws.tilting, ce, &ce.value)?;
    let idx = xp.index().clone();
    let mut hints = vec![PresentationHints::default(); idx.n_objects()];
    for e in s.with("objects") {
        let i = index_object(&idx, e, one_arg(e, 1)?[0])?;
        let names = cert.fibers[i].names();
        let objs = words(&e.value).into_iter().map(|w| names.iter().position(|n| n == w).ok_or_else(|| e.unresolved(w))).collect::<Result<_>>()?;
        hints[i].objects = Some(objs);
    }
    for e in s.with("arrow") {
        let a = one_arg(e, 2)?;
        let i = index_object(&idx, e, a[0])?;
        let info = xp.fiber(i).quiver().ok_or_else(|| e.error(0, "hints need a presented fiber"))?;
        if info.presentation.arrow_index(a[1]).is_none() {
            return Err(e.unresolved(a[1]));
        }
        hints[i].arrows.insert(a[1].to_string(), parse_scalars(ws.field, e)?);
    }
    Ok(HintSet { target: te.value.clone(), tilting: ce.value.clone(), hints })
}

// ---------- export ----------

/// Builds a document from entities; dependencies are named on first use.
pub struct Exporter {
    field: FieldSpec,
    sections: Vec<Section>,
    indices: Vec<(Arc<IndexCat>, String)>,
    categories: Vec<(Arc<FinKCat>, String)>,
    functors: Vec<(Arc<KFunctor>, String)>,
    colax: Vec<(Arc<ColaxFunctor>, String)>,
    complexes: Vec<(Arc<ProjComplex>, String)>,
    tilting: Vec<(String, Vec<Vec<String>>)>,
}

impl Exporter {
    pub fn new(field: FieldSpec) -> Self {
        Exporter {
            field,
            sections: Vec::new(),
            indices: Vec::new(),
            categories: Vec::new(),
            functors: Vec::new(),
            colax: Vec::new(),
            complexes: Vec::new(),
            tilting: Vec::new(),
        }
    }

    pub fn finish(self) -> Document {
        let mut f = Section::new("field", "");
        f.push("characteristic", self.field.characteristic().to_string());
        let mut sections = vec![f];
        sections.extend(self.sections);
        Document { sections }
    }

    fn known<T: PartialEq>(list: &[(Arc<T>, String)], x: &Arc<T>) -> Option<String> {
        list.iter().find(|(y, _)| Arc::ptr_eq(x, y) || **x == **y).map(|(_, n)| n.clone())
    }

    pub fn index(&mut self, name: &str, i: &Arc<IndexCat>) -> String {
        if let Some(n) = Self::known(&self.indices, i) {
            return n;
        }
        let mut s = Section::new("index", name);
        let objs = i.objects();
        match i.kind() {
            IndexKind::Free { arrows } => {
                s.push("kind", "quiver");
                for &a in arrows {
                    let m = i.morphism(a);
                    s.push(format!("arrow {}", m.name), format!("{} -> {}", objs[m.source], objs[m.target]));
                }
                s.push("objects", objs.join(" "));
            }
            IndexKind::Poset => {
                s.push("kind", "poset");
                s.push("objects", objs.join(" "));
                let less: Vec<String> =
                    (0..i.n_morphisms()).filter(|&a| !i.is_identity(a)).map(|a| format!("{}<{}", objs[i.source(a)], objs[i.target(a)])).collect();
                s.push("less", less.join(" "));
            }
            IndexKind::Monoid => {
                s.push("kind", "monoid");
                let names: Vec<String> = (0..i.n_morphisms()).map(|a| i.morphism(a).name.clone()).collect();
                s.push("objects", names.join(" "));
                for b in 0..i.n_morphisms() {
                    let row: Vec<&str> = (0..i.n_morphisms()).map(|a| names[i.compose(b, a).unwrap()].as_str()).collect();
                    s.push(format!("row {}", names[b]), row.join(" "));
                }
            }
            IndexKind::Explicit => {
                s.push("kind", "explicit");
                s.push("objects", objs.join(" "));
                for a in 0..i.n_morphisms() {
                    let m = i.morphism(a);
                    s.push(format!("morphism {}", m.name), format!("{} -> {}", objs[m.source], objs[m.target]));
                }
                for x in 0..i.n_objects() {
                    s.push(format!("identity {}", objs[x]), i.morphism(i.id(x)).name.clone());
                }
                for (b, a) in i.composable_pairs() {
                    let ba = i.compose(b, a).unwrap();
                    s.push(format!("compose {} {}", i.morphism(b).name, i.morphism(a).name), i.morphism(ba).name.clone());
                }
            }
        }
        self.sections.push(s);
        self.indices.push((i.clone(), name.to_string()));
        name.to_string()
    }

    pub fn category(&mut self, name: &str, c: &Arc<FinKCat>) -> String {
        if let Some(n) = Self::known(&self.categories, c) {
            return n;
        }
        let mut s = Section::new("category", name);
        let n = c.n_objects();
        if let Some(info) = c.quiver() {
            let q = &info.presentation;
            s.push("vertices", q.vertices.join(" "));
            for a in &q.arrows {
                s.push(format!("arrow {}", a.name), format!("{} -> {}", q.vertices[a.source], q.vertices[a.target]));
            }
            for rel in &q.relations {
                let mut out = String::new();
                for (k, (coef, p)) in rel.iter().enumerate() {
                    let word = p.iter().rev().map(|&a| q.arrows[a].name.as_str()).collect::<Vec<_>>().join("*");
                    let mag = coef.abs();
                    let mag = if mag.is_integer() { mag.numer().to_string() } else { format!("{}/{}", mag.numer(), mag.denom()) };
                    term_text(&mut out, k == 0, coef.is_negative(), &mag, &word);
                }
                s.push("relation", out);
            }
            if let Some(cap) = q.length_cap {
                s.push("length_cap", cap.to_string());
            }
        } else {
            s.push("kind", "table");
            s.push("objects", c.objects().join(" "));
            for x in 0..n {
                for y in 0..n {
                    if c.dim(x, y) > 0 {
                        s.push(format!("hom {} {}", c.object_name(x), c.object_name(y)), c.labels(x, y).join(" "));
                    }
                }
            }
            for x in 0..n {
                s.push(format!("identity {}", c.object_name(x)), elem_text(c, x, x, c.identity(x)));
            }
            for x in 0..n {
                for y in 0..n {
                    for z in 0..n {
                        for g in 0..c.dim(y, z) {
                            for f in 0..c.dim(x, y) {
                                let v = c.compose(x, y, z, &c.basis_elem(y, z, g), &c.basis_elem(x, y, f));
                                if v.iter().any(|s| !s.is_zero()) {
                                    s.push(
                                        format!(
                                            "mul {} {} {} {} {}",
                                            c.object_name(x),
                                            c.object_name(y),
                                            c.object_name(z),
                                            c.labels(y, z)[g],
                                            c.labels(x, y)[f]
                                        ),
                                        elem_text(c, x, z, &v),
                                    );
                                }
                            }
                        }
                    }
                }
            }
        }
        self.sections.push(s);
        self.categories.push((c.clone(), name.to_string()));
        name.to_string()
    }

    pub fn functor(&mut self, name: &str, f: &Arc<KFunctor>) -> String {
        if let Some(n) = Self::known(&self.functors, f) {
            return n;
        }
        let src = self.category(&format!("{name}_source"), f.source());
        let tgt = self.category(&format!("{name}_target"), f.target());
        let (sc, tc) = (f.source(), f.target());
        let mut s = Section::new("functor", name);
        s.push("source", src);
        s.push("target", tgt);
        for x in 0..sc.n_objects() {
            s.push(format!("object {}", sc.object_name(x)), tc.object_name(f.obj(x)).to_string());
        }
        if let Some(info) = sc.quiver() {
            for (k, a) in info.presentation.arrows.iter().enumerate() {
                let (_, e) = path_element(sc, a.source, &[k]).expect("arrow");
                let v = f.map(a.source, a.target, &e);
                s.push(format!("arrow {}", a.name), elem_text(tc, f.obj(a.source), f.obj(a.target), &v));
            }
        } else {
            let n = sc.n_objects();
            for x in 0..n {
                for y in 0..n {
                    for (k, l) in sc.labels(x, y).iter().enumerate() {
                        let v = f.map(x, y, &sc.basis_elem(x, y, k));
                        s.push(format!("image {} {} {l}", sc.object_name(x), sc.object_name(y)), elem_text(tc, f.obj(x), f.obj(y), &v));
                    }
                }
            }
        }
        self.sections.push(s);
        self.functors.push((f.clone(), name.to_string()));
        name.to_string()
    }

    pub fn colax(&mut self, name: &str, x: &Arc<ColaxFunctor>) -> String {
        if let Some(n) = Self::known(&self.colax, x) {
            return n;
        }
        let idx = x.index();
        let iname = self.index(&format!("{name}_index"), idx);
        let mut s = Section::new("colax", name);
        s.push("index", iname);
        let diag = diagonal(x.fiber(0).clone(), idx.clone());
        if diag == **x {
            let c = self.category(&format!("{name}0"), x.fiber(0));
            s.push("diagonal", c);
        } else {
            let fibers: Vec<String> =
                (0..idx.n_objects()).map(|i| self.category(&format!("{name}{}", idx.objects()[i]), x.fiber(i))).collect();
            for (i, f) in fibers.iter().enumerate() {
                s.push(format!("fiber {}", idx.objects()[i]), f.clone());
            }
            let generated = match idx.kind() {
                IndexKind::Free { arrows } => {
                    let gens: Vec<Arc<KFunctor>> = arrows.iter().map(|&a| x.arrow(a).clone()).collect();
                    ColaxFunctor::from_generators(idx.clone(), x.fibers().to_vec(), &gens).ok().filter(|g| g == &**x).map(|_| arrows.clone())
                }
                _ => None,
            };
            if let Some(arrows) = generated {
                for a in arrows {
                    let m = &idx.morphism(a).name;
                    let f = self.functor(&format!("{name}_{m}"), x.arrow(a));
                    s.push(format!("arrow {m}"), f);
                }
            } else {
                for a in 0..idx.n_morphisms() {
                    let m = &idx.morphism(a).name;
                    let f = self.functor(&format!("{name}_{}", m.replace(['<', '|'], "_")), x.arrow(a));
                    s.push(format!("morphism {m}"), f);
                }
                for i in 0..idx.n_objects() {
                    let c = x.fiber(i);
                    let id = idx.id(i);
                    for o in 0..c.n_objects() {
                        let src = x.arrow(id).obj(o);
                        if src != o || x.eta(i, o) != c.identity(o) {
                            s.push(format!("eta {} {}", idx.objects()[i], c.object_name(o)), elem_text(c, src, o, x.eta(i, o)));
                        }
                    }
                }
                for (b, a) in idx.composable_pairs() {
                    let ba = idx.compose(b, a).unwrap();
                    let c = x.fiber(idx.target(b));
                    for o in 0..x.fiber(idx.source(a)).n_objects() {
                        let (s0, t0) = (x.arrow(ba).obj(o), x.arrow(b).obj(x.arrow(a).obj(o)));
                        let th = x.theta(b, a, o);
                        if s0 != t0 || th != c.identity(s0) {
                            s.push(
                                format!("theta {} {} {}", idx.morphism(b).name, idx.morphism(a).name, x.fiber(idx.source(a)).object_name(o)),
                                elem_text(c, s0, t0, th),
                            );
                        }
                    }
                }
            }
        }
        self.sections.push(s);
        self.colax.push((x.clone(), name.to_string()));
        name.to_string()
    }

    pub fn transformation(&mut self, name: &str, f: &LeftTransformation) -> String {
        let src = self.colax(&format!("{name}_source"), f.source());
        let tgt = self.colax(&format!("{name}_target"), f.target());
        let idx = f.source().index().clone();
        let mut s = Section::new("transformation", name);
        s.push("source", src);
        s.push("target", tgt);
        for i in 0..idx.n_objects() {
            let g = self.functor(&format!("{name}_{}", idx.objects()[i]), f.functor(i));
            s.push(format!("functor {}", idx.objects()[i]), g);
        }
        for a in 0..idx.n_morphisms() {
            let (i, j) = (idx.source(a), idx.target(a));
            let c = f.target().fiber(j);
            for x in 0..f.source().fiber(i).n_objects() {
                let s0 = f.target().arrow(a).obj(f.functor(i).obj(x));
                let t0 = f.functor(j).obj(f.source().arrow(a).obj(x));
                s.push(format!("psi {} {}", idx.morphism(a).name, f.source().fiber(i).object_name(x)), elem_text(c, s0, t0, f.psi(a, x)));
            }
        }
        self.sections.push(s);
        name.to_string()
    }

    pub fn complex(&mut self, name: &str, u: &Arc<ProjComplex>) -> String {
        if let Some(n) = Self::known(&self.complexes, u) {
            return n;
        }
        let c = u.base();
        let cname = self.category(&format!("{name}_base"), c);
        let mut s = Section::new("complex", name);
        s.push("category", cname);
        s.push("lo", u.lo().to_string());
        if !u.is_zero() {
            for k in u.degrees() {
                let t = u.term(k);
                let v = if t.is_empty() { "0".to_string() } else { t.iter().map(|&x| c.object_name(x)).collect::<Vec<_>>().join(" ") };
                s.push(format!("term {k}"), v);
            }
            for k in u.degrees() {
                let d = u.d(k);
                let (src, tgt) = (u.term(k), u.term(k + 1));
                for r in 0..tgt.len() {
                    for col in 0..src.len() {
                        let v = d.get(r, col);
                        if v.iter().any(|x| !x.is_zero()) {
                            s.push(format!("d {k} {r} {col}"), elem_text(c, src[col], tgt[r], v));
                        }
                    }
                }
            }
        }
        self.sections.push(s);
        self.complexes.push((u.clone(), name.to_string()));
        name.to_string()
    }

    /// Complexes are named `{name}{i}{k}` unless already known.
    pub fn tilting(&mut self, name: &str, cert: &TiltingColaxCertificate) -> String {
        let x = self.colax(&format!("{name}_colax"), &cert.colax);
        let idx = cert.colax.index().clone();
        let mut s = Section::new("tilting", name);
        s.push("colax", x);
        let mut all = Vec::new();
        for (i, t) in cert.fibers.iter().enumerate() {
            let names: Vec<String> =
                t.objects().iter().enumerate().map(|(k, u)| self.complex(&format!("{name}{}{}", idx.objects()[i], k + 1), u)).collect();
            s.push(format!("fiber {}", idx.objects()[i]), names.join(" "));
            all.push(names);
        }
        let generators: Vec<usize> = match idx.kind() {
            IndexKind::Free { arrows } => arrows.clone(),
            _ => (0..idx.n_morphisms()).filter(|&a| !idx.is_identity(a)).collect(),
        };
        for a in generators {
            let (i, j) = (idx.source(a), idx.target(a));
            let pairs: Vec<String> = cert.object_maps[a].iter().enumerate().map(|(u, &v)| format!("{}>{}", all[i][u], all[j][v])).collect();
            s.push(format!("map {}", idx.morphism(a).name), pairs.join(" "));
        }
        self.sections.push(s);
        self.tilting.push((name.to_string(), all));
        name.to_string()
    }

    pub fn certificate(&mut self, name: &str, tilting: &str, cert: &TiltingColaxCertificate, i: usize, g: &GenerationCertificate) -> Result<String> {
        let names = self
            .tilting
            .iter()
            .find(|(n, _)| n == tilting)
            .map(|(_, v)| v[i].clone())
            .ok_or_else(|| Error::invalid(format!("tilting `{tilting}` is not exported")))?;
        let idx = cert.colax.index();
        let mut s = Section::new("certificate", name);
        s.push("tilting", tilting);
        s.push("fiber", idx.objects()[i].clone());
        s.push("target", cert.colax.fiber(i).object_name(g.target).to_string());
        for op in &g.ops {
            let v = match op {
                CertOp::Take(k) => format!("take {}", names[*k]),
                CertOp::Shift { of, by } => format!("shift {of} {by}"),
                CertOp::Cone { from, to, coords } => format!("cone {from} {to} : {}", scalars_text(coords)),
                CertOp::Summand { of, keep } => {
                    format!("summand {of} : {}", keep.iter().map(|(d, p)| format!("{d}@{p}")).collect::<Vec<_>>().join(" "))
                }
            };
            s.push("op", v);
        }
        self.sections.push(s);
        Ok(name.to_string())
    }

    pub fn hints(&mut self, name: &str, target: &str, tilting: &str, hints: &[PresentationHints], index: &IndexCat) -> Result<String> {
        let names = self
            .tilting
            .iter()
            .find(|(n, _)| n == tilting)
            .map(|(_, v)| v.clone())
            .ok_or_else(|| Error::invalid(format!("tilting `{tilting}` is not exported")))?;
        let mut s = Section::new("hints", name);
        s.push("target", target);
        s.push("tilting", tilting);
        for (i, h) in hints.iter().enumerate() {
            if let Some(objs) = &h.objects {
                s.push(format!("objects {}", index.objects()[i]), objs.iter().map(|&k| names[i][k].clone()).collect::<Vec<_>>().join(" "));
            }
            for (a, v) in &h.arrows {
                s.push(format!("arrow {} {a}", index.objects()[i]), scalars_text(v));
            }
        }
        self.sections.push(s);
        Ok(name.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "\
[field]
characteristic = 0

[category A]
vertices = 1 2
arrow x = 1 -> 2
arrow y = 2 -> 1
relation = y*x
";

    #[test]
    fn columns_point_at_the_bad_arrow() {
        let text = SMALL.replace("relation = y*x", "relation = y*zz");
        match load(&text) {
            Err(Error::Parse { line, column, message }) => {
                assert_eq!(line, 8);
                assert_eq!(column, 14);
                assert!(message.contains("zz"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn dangling_names_are_unresolved() {
        let text = format!("{SMALL}\n[complex U]\ncategory = B\nterm 0 = 1\n");
        assert!(matches!(load(&text), Err(Error::UnresolvedReference { ref name, line: 11 }) if name == "B"));
    }

    #[test]
    fn linear_combinations() {
        let ws = load(SMALL).unwrap();
        let c = &ws.categories["A"];
        let e = Entry { key: "k".into(), value: "2*x - 1/2*x + x".into(), line: 1, column: 1 };
        let v = parse_elem(c, 0, 1, &e).unwrap();
        assert_eq!(elem_text(c, 0, 1, &v), "5/2*x");
        let e = Entry { key: "k".into(), value: "x*y".into(), line: 1, column: 1 };
        assert_eq!(elem_text(c, 1, 1, &parse_elem(c, 1, 1, &e).unwrap()), "x*y");
        let e = Entry { key: "k".into(), value: "-x".into(), line: 1, column: 1 };
        assert_eq!(elem_text(c, 0, 1, &parse_elem(c, 0, 1, &e).unwrap()), "-x");
        let e = Entry { key: "k".into(), value: "x +".into(), line: 1, column: 1 };
        assert!(parse_elem(c, 0, 1, &e).is_err());
    }

    #[test]
    fn emit_normalizes() {
        let d = parse(SMALL).unwrap();
        let once = d.emit();
        assert_eq!(parse(&once).unwrap(), d.normalized());
        assert_eq!(parse(&once).unwrap().emit(), once);
    }
}
