//! Local endomorphism rings, basicness and isomorphism search.

use crate::error::{Error, Result};
use crate::field::{span_basis, FieldSpec, Matrix, Scalar};
use crate::fincat::{inverse_of, Elem, FinKCat};
use crate::report::Report;
use crate::rng::{random_scalar, rng_for};

fn poly_mul(field: FieldSpec, a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
    let mut out = vec![field.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = &out[i + j] + &(x * y);
        }
    }
    out
}

/// Minimal polynomial of `e ∈ End(x)` (coefficients, lowest degree first, monic).
fn minimal_polynomial(c: &FinKCat, x: usize, e: &[Scalar]) -> Vec<Scalar> {
    let field = c.field();
    let mut powers: Vec<Elem> = vec![c.identity(x).clone()];
    loop {
        let k = powers.len();
        let next = c.compose(x, x, x, e, &powers[k - 1]);
        let a = Matrix::from_columns(field, next.len(), &powers);
        if let Some(sol) = a.solve(&Matrix::column(field, next.clone())).expect("dimensions agree") {
            let mut poly: Vec<Scalar> = sol.particular.col(0).iter().map(|s| -s).collect();
            poly.push(field.one());
            return poly;
        }
        powers.push(next);
    }
}

/// If the minimal polynomial of `e` is `(t - λ)^m`, returns `λ`.
fn single_eigenvalue(c: &FinKCat, x: usize, e: &[Scalar]) -> Option<Scalar> {
    let field = c.field();
    let m = minimal_polynomial(c, x, e);
    let k = m.len() - 1;
    let p = field.characteristic();
    // (t - λ)^k with k = p^s r, p ∤ r, equals (t^{p^s} - λ)^r over F_p.
    let mut ps = 1usize;
    let mut r = k;
    if p != 0 {
        while r % p as usize == 0 {
            r /= p as usize;
            ps *= p as usize;
        }
    }
    let coef = &m[ps * (r - 1)];
    let lambda = (-coef).checked_div(&field.from_i64(r as i64)).ok()?;
    let mut expect = vec![field.one()];
    for _ in 0..k {
        expect = poly_mul(field, &expect, &[-&lambda, field.one()]);
    }
    (expect == m).then_some(lambda)
}

/// The character `End(x) → k` when `End(x)` is local with residue field `k`,
/// given by its values on the basis.
pub fn residue_character(c: &FinKCat, x: usize) -> Option<Vec<Scalar>> {
    let field = c.field();
    let d = c.dim(x, x);
    let chi: Vec<Scalar> = (0..d).map(|i| single_eigenvalue(c, x, &c.basis_elem(x, x, i))).collect::<Option<_>>()?;
    let eval = |v: &[Scalar]| v.iter().zip(&chi).fold(field.zero(), |a, (s, l)| &a + &(s * l));
    if !eval(c.identity(x)).is_one() {
        return None;
    }
    for i in 0..d {
        for j in 0..d {
            let prod = c.compose(x, x, x, &c.basis_elem(x, x, i), &c.basis_elem(x, x, j));
            if eval(&prod) != &chi[i] * &chi[j] {
                return None;
            }
        }
    }
    // the kernel must be a nilpotent ideal
    let functional = Matrix::from_rows(field, vec![chi.clone()]).ok()?;
    let kernel = functional.nullspace();
    let mut power = kernel.clone();
    for _ in 0..=d {
        if power.is_empty() {
            return Some(chi);
        }
        let mut prods = Vec::new();
        for j in &kernel {
            for v in &power {
                prods.push(c.compose(x, x, x, j, v));
            }
        }
        power = span_basis(field, prods).0;
    }
    None
}

/// Evaluates a residue character on an element.
pub fn chi_eval(field: FieldSpec, chi: &[Scalar], e: &[Scalar]) -> Scalar {
    e.iter().zip(chi).fold(field.zero(), |a, (s, l)| &a + &(s * l))
}

/// Residue characters of all objects, if the category is basic with local
/// endomorphism rings.
#[derive(Clone, Debug)]
pub struct LocalStructure {
    pub chars: Vec<Vec<Scalar>>,
}

impl LocalStructure {
    pub fn of(c: &FinKCat) -> Result<Self> {
        let r = check_basic_local(c);
        if !r.passed() {
            return Err(Error::NotBasicLocal(r.first_failure().unwrap_or_default()));
        }
        Ok(LocalStructure { chars: (0..c.n_objects()).map(|x| residue_character(c, x).expect("checked")).collect() })
    }

    /// Whether `e ∈ End(x)` is invertible.
    pub fn is_unit(&self, c: &FinKCat, x: usize, e: &[Scalar]) -> bool {
        !chi_eval(c.field(), &self.chars[x], e).is_zero()
    }
}

/// Iso between `x` and `y` when both endomorphism rings are local: a basis
/// pair with `χ_x(g∘f) ≠ 0` yields `f` invertible with inverse `u⁻¹∘g`.
fn local_iso(c: &FinKCat, chi_x: &[Scalar], x: usize, y: usize) -> Option<(Elem, Elem)> {
    for fi in 0..c.dim(x, y) {
        let f = c.basis_elem(x, y, fi);
        for gi in 0..c.dim(y, x) {
            let g = c.basis_elem(y, x, gi);
            let u = c.compose(x, y, x, &g, &f);
            if !chi_eval(c.field(), chi_x, &u).is_zero() {
                let uinv = inverse_of(c, x, x, &u)?;
                let inv = c.compose(y, x, x, &uinv, &g);
                return Some((f, inv));
            }
        }
    }
    None
}

pub fn check_basic_local(c: &FinKCat) -> Report {
    let mut r = Report::new("basic and local");
    let mut chars = Vec::new();
    for x in 0..c.n_objects() {
        let ch = residue_character(c, x);
        if ch.is_none() {
            r.fail(format!("End({}) is not local", c.object_name(x)));
        }
        chars.push(ch);
    }
    if !r.passed() {
        return r;
    }
    for x in 0..c.n_objects() {
        for y in x + 1..c.n_objects() {
            if local_iso(c, chars[x].as_ref().unwrap(), x, y).is_some() {
                r.fail(format!("{} and {} are isomorphic", c.object_name(x), c.object_name(y)));
            }
        }
    }
    r
}

/// Searches for an isomorphism `x → y`, returning it with its inverse. Exact
/// when both endomorphism rings are local; otherwise tries candidates from a
/// seeded stream (all of them when the Hom space is small and finite).
pub fn find_iso(c: &FinKCat, x: usize, y: usize) -> Option<(Elem, Elem)> {
    if x == y {
        return Some((c.identity(x).clone(), c.identity(x).clone()));
    }
    if c.dim(x, y) == 0 || c.dim(y, x) == 0 {
        return (c.dim(x, x) == 0 && c.dim(y, y) == 0).then(|| (Vec::new(), Vec::new()));
    }
    if let (Some(cx), Some(_)) = (residue_character(c, x), residue_character(c, y)) {
        return local_iso(c, &cx, x, y);
    }
    let field = c.field();
    let d = c.dim(x, y);
    if let Some(q) = field.size() {
        if (q as f64).powi(d as i32) <= 4096.0 {
            let total = q.pow(d as u32);
            for mut k in 1..total {
                let mut f = Vec::with_capacity(d);
                for _ in 0..d {
                    f.push(field.element(k % q));
                    k /= q;
                }
                if let Some(g) = inverse_of(c, x, y, &f) {
                    return Some((f, g));
                }
            }
            return None;
        }
    }
    let tag = format!("iso:{}:{}:{}:{}", c.n_objects(), c.total_dim(), x, y);
    let mut rng = rng_for(tag.as_bytes());
    for _ in 0..64 {
        let f: Elem = (0..d).map(|_| random_scalar(field, &mut rng)).collect();
        if let Some(g) = inverse_of(c, x, y, &f) {
            return Some((f, g));
        }
    }
    None
}
