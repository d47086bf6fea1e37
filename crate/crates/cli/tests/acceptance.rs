//! One line per acceptance criterion, with its measured runtime against the limit.

use std::collections::HashSet;
use std::io::Write;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::Rng;

use grglue::colax::{diagonal, functor_equivalence, LeftTransformation};
use grglue::fixtures::{self, gluing_example};
use grglue::glue::{glue, EquivalenceSource, Verdict};
use grglue::grothendieck::{canonical_morphism, check_covering, factor_through_gr, grothendieck, precovering_map, verify_adjunction};
use grglue::homotopy::{support_window, HomSpace, ProjComplex, ProjMatrix};
use grglue::pseudo::{check_precovering_preserved, kb_prj};
use grglue::quiver::build_category;
use grglue::rng::rng_for;
use grglue::tilting::{check_tilting_colax, end_category, k0_matrix, match_presentation, SearchCaps};
use grglue::{Elem, FieldSpec, FinKCat, Scalar};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn cli(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_grglue")).args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned())
}

fn example(name: &str) -> String {
    format!("{}/examples/{name}.toy", env!("CARGO_MANIFEST_DIR"))
}

fn kv_value<'a>(out: &'a str, key: &str) -> Option<&'a str> {
    out.lines().find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
}

// 1
fn small_constructions() -> Outcome {
    let (code, out) = cli(&["demo", "ex-4.2", "--format", "kv"]);
    ensure(code == 0, || format!("exit {code}"))?;
    let p = "small_grothendieck_constructions";
    let expect: &[(&str, &[(&str, &str)])] = &[
        ("free_1__2", &[("dim", "3"), ("hom_1_1_", "1"), ("hom_1_2_", "1"), ("hom_2_1_", "0"), ("hom_2_2_", "1")]),
        ("3_chain_poset", &[("dim", "6")]),
        ("z_2_monoid", &[("dim", "2")]),
        ("two_arrows_1__2", &[("hom_1_2_", "2")]),
    ];
    for (inst, vals) in expect {
        for (k, v) in *vals {
            let key = format!("{p}.{inst}.{k}");
            let got = kv_value(&out, &key);
            ensure(got == Some(*v), || format!("{key} = {got:?}, expected {v}\n{out}"))?;
        }
    }
    Ok("Hom dims of the four instances exact".into())
}

// 2
fn canonical_identities() -> Outcome {
    let corpus = fixtures::random_corpus(25);
    let mut maps = 0;
    for (n, x) in corpus.iter().enumerate() {
        let gr = grothendieck(x).map_err(|e| format!("corpus {n}: {e}"))?;
        let p = canonical_morphism(&gr).map_err(|e| e.to_string())?;
        let idx = x.index();
        for i in 0..idx.n_objects() {
            for j in 0..idx.n_objects() {
                for a in 0..x.fiber(i).n_objects() {
                    for b in 0..x.fiber(j).n_objects() {
                        let m = precovering_map(&p, i, a, j, b).map_err(|e| e.to_string())?.matrix;
                        ensure(m.rows() == m.cols() && m.is_identity(), || format!("corpus {n}: precovering map ({i},{a})->({j},{b}) is not the identity"))?;
                        maps += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{maps} precovering matrices over 25 functors are identities"))
}

// 3
fn triangle_identities() -> Outcome {
    for (n, x) in fixtures::random_corpus(25).iter().enumerate() {
        let r = verify_adjunction(x, x.fiber(0)).map_err(|e| e.to_string())?;
        ensure(r.passed() && r.get("claim1") == Some("true") && r.get("claim2") == Some("true"), || format!("corpus {n}: {}", r.render_text()))?;
    }
    // covering: the canonical morphism factors through the identity of Gr(X)
    let g = gluing_example(3).map_err(|e| e.to_string())?;
    let gr = grothendieck(&g.x).map_err(|e| e.to_string())?;
    let p = canonical_morphism(&gr).map_err(|e| e.to_string())?;
    let cov = check_covering(&p).map_err(|e| e.to_string())?;
    let h = factor_through_gr(&p, &gr).map_err(|e| e.to_string())?;
    ensure(cov.passed() && functor_equivalence(&h).is_ok(), || "canonical morphism not a covering with invertible H".into())?;
    // not covering: the identity of a diagonal over 1 -> 2
    let (a, _) = fixtures::desk_algebras(FieldSpec::rationals());
    let d = Arc::new(diagonal(a, fixtures::free_arrow()));
    let id = LeftTransformation::identity(d.clone());
    let cov = check_covering(&id).map_err(|e| e.to_string())?;
    let grd = grothendieck(&d).map_err(|e| e.to_string())?;
    let h = factor_through_gr(&id, &grd).map_err(|e| e.to_string())?;
    ensure(!cov.passed() && functor_equivalence(&h).is_err(), || "identity of a diagonal should be neither covering nor factor by an equivalence".into())?;
    Ok("both claims on 25 functors; covering and non-covering fixtures agree with the factorization".into())
}

// 4
struct Bits(Vec<u64>);

fn f2_vec(v: &[Scalar]) -> Vec<bool> {
    v.iter().map(|s| !s.is_zero()).collect()
}

/// `g ∘ f` for matrices of morphisms, entry `(r, c)` in `Hom(src[c], tgt[r])`.
fn mat_compose(c: &FinKCat, src: &[usize], mid: &[usize], tgt: &[usize], g: &[Vec<Elem>], f: &[Vec<Elem>]) -> Vec<Vec<Elem>> {
    (0..tgt.len())
        .map(|r| {
            (0..src.len())
                .map(|col| {
                    let mut acc = c.zero(src[col], tgt[r]);
                    for m in 0..mid.len() {
                        let e = c.compose(src[col], mid[m], tgt[r], &g[r][m], &f[m][col]);
                        for (a, b) in acc.iter_mut().zip(e) {
                            *a = &*a + &b;
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

fn mat_of(m: &ProjMatrix) -> Vec<Vec<Elem>> {
    (0..m.tgt().len()).map(|r| (0..m.src().len()).map(|c| m.get(r, c).clone()).collect()).collect()
}

/// Layout of a degreewise family of maps `U^k → V^{k+s}` as one F2 vector.
struct Layout {
    blocks: Vec<(i64, usize, usize, usize, usize)>, // (k, r, c, offset, dim)
    len: usize,
}

fn layout(c: &FinKCat, u: &ProjComplex, v: &ProjComplex, s: i64) -> Layout {
    let mut blocks = Vec::new();
    let mut len = 0;
    for k in u.degrees() {
        let (src, tgt) = (u.term(k), v.term(k + s));
        for r in 0..tgt.len() {
            for col in 0..src.len() {
                let d = c.dim(src[col], tgt[r]);
                blocks.push((k, r, col, len, d));
                len += d;
            }
        }
    }
    Layout { blocks, len }
}

fn family(c: &FinKCat, u: &ProjComplex, v: &ProjComplex, s: i64, l: &Layout, bit: usize) -> Vec<(i64, Vec<Vec<Elem>>)> {
    let field = c.field();
    u.degrees()
        .map(|k| {
            let (src, tgt) = (u.term(k), v.term(k + s));
            let mut m: Vec<Vec<Elem>> = (0..tgt.len()).map(|r| (0..src.len()).map(|col| c.zero(src[col], tgt[r])).collect()).collect();
            for &(bk, r, col, off, d) in &l.blocks {
                if bk == k && bit >= off && bit < off + d {
                    m[r][col][bit - off] = field.one();
                }
            }
            (k, m)
        })
        .collect()
}

fn pack(bits: &[bool]) -> Bits {
    let mut w = vec![0u64; bits.len().div_ceil(64)];
    for (i, &b) in bits.iter().enumerate() {
        if b {
            w[i / 64] |= 1 << (i % 64);
        }
    }
    Bits(w)
}

fn flatten_family(fam: &[(i64, Vec<Vec<Elem>>)]) -> Vec<bool> {
    fam.iter().flat_map(|(_, m)| m.iter().flat_map(|row| row.iter().flat_map(|e| f2_vec(e)))).collect()
}

/// Brute-force dim of Hom_K(U, V[n]) over F2.
fn brute_hom(c: &FinKCat, u: &ProjComplex, v: &ProjComplex, n: i64) -> Option<u32> {
    let lf = layout(c, u, v, n);
    let lh = layout(c, u, v, n - 1);
    if lf.len > 14 || lh.len > 14 {
        return None;
    }
    // defect d_V f - f d_U of each basis family, by explicit composition
    let defect = |bit: usize| -> Bits {
        let f = family(c, u, v, n, &lf, bit);
        let mut out = Vec::new();
        for k in u.lo() - 1..=u.hi() {
            let (s0, s1) = (u.term(k), u.term(k + 1));
            let (t0, t1) = (v.term(k + n), v.term(k + n + 1));
            let fk = f.iter().find(|(d, _)| *d == k).map(|x| x.1.clone()).unwrap_or_else(|| vec![Vec::new(); t0.len()]);
            let fk1 = f.iter().find(|(d, _)| *d == k + 1).map(|x| x.1.clone()).unwrap_or_else(|| vec![Vec::new(); t1.len()]);
            let fk = if s0.is_empty() { vec![Vec::new(); t0.len()] } else { fk };
            let lhs = mat_compose(c, s0, t0, t1, &mat_of(&v.d(k + n)), &fk);
            let rhs = mat_compose(c, s0, s1, t1, &fk1, &mat_of(&u.d(k)));
            for (lr, rr) in lhs.iter().zip(&rhs) {
                for (le, re) in lr.iter().zip(rr) {
                    out.extend(le.iter().zip(re).map(|(a, b)| !(a + b).is_zero()));
                }
            }
        }
        pack(&out)
    };
    let dvec: Vec<Bits> = (0..lf.len).map(defect).collect();
    let mut cur = vec![0u64; dvec.first().map_or(0, |b| b.0.len())];
    let mut cycles: HashSet<u64> = HashSet::new();
    let mut code = 0u64;
    for step in 0..(1u64 << lf.len) {
        if step > 0 {
            let flip = step.trailing_zeros() as usize;
            code ^= 1 << flip;
            for (a, b) in cur.iter_mut().zip(&dvec[flip].0) {
                *a ^= b;
            }
        }
        if cur.iter().all(|&w| w == 0) {
            cycles.insert(code);
        }
    }
    // images of homotopies d_V h + h d_U
    let image = |bit: usize| -> u64 {
        let h = family(c, u, v, n - 1, &lh, bit);
        let mut f = Vec::new();
        for k in u.degrees() {
            let (s0, t0) = (u.term(k), v.term(k + n));
            let hk = h.iter().find(|(d, _)| *d == k).map(|x| x.1.clone()).unwrap();
            let a = mat_compose(c, s0, v.term(k + n - 1), t0, &mat_of(&v.d(k + n - 1)), &hk);
            let b = match h.iter().find(|(d, _)| *d == k + 1) {
                Some((_, hk1)) => mat_compose(c, s0, u.term(k + 1), t0, hk1, &mat_of(&u.d(k))),
                None => a.iter().map(|row| row.iter().map(|e| vec![c.field().zero(); e.len()]).collect()).collect(),
            };
            let sum: Vec<Vec<Elem>> = a.iter().zip(&b).map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x.iter().zip(y).map(|(p, q)| p + q).collect()).collect()).collect();
            f.push((k, sum));
        }
        let bits = flatten_family(&f);
        bits.iter().enumerate().fold(0u64, |acc, (i, &b)| if b { acc | 1 << i } else { acc })
    };
    let hvec: Vec<u64> = (0..lh.len).map(image).collect();
    let mut bounds: HashSet<u64> = HashSet::new();
    let mut cur = 0u64;
    for step in 0..(1u64 << lh.len) {
        if step > 0 {
            cur ^= hvec[step.trailing_zeros() as usize];
        }
        bounds.insert(cur);
    }
    if !bounds.is_subset(&cycles) {
        return Some(u32::MAX);
    }
    Some((cycles.len() as f64).log2() as u32 - (bounds.len() as f64).log2() as u32)
}

fn random_complex(c: &Arc<FinKCat>, rng: &mut impl Rng) -> Option<ProjComplex> {
    let f = c.field();
    let len = rng.gen_range(1..=3);
    let lo = rng.gen_range(-1..=0);
    let terms: Vec<Vec<usize>> = (0..len).map(|_| (0..rng.gen_range(1..=2)).map(|_| rng.gen_range(0..c.n_objects())).collect()).collect();
    let mut diffs = Vec::new();
    for k in 0..len - 1 {
        let (s, t) = (&terms[k], &terms[k + 1]);
        let entries = t
            .iter()
            .flat_map(|&y| s.iter().map(move |&x| (x, y)))
            .map(|(x, y)| (0..c.dim(x, y)).map(|_| f.from_i64(rng.gen_range(0..2))).collect())
            .collect();
        diffs.push(ProjMatrix::from_entries(c, s, t, entries).ok()?);
    }
    let u = ProjComplex::new(c.clone(), lo, terms, diffs).ok()?;
    (u.total_dim() <= 12).then_some(u)
}

fn hom_oracle() -> Outcome {
    let f2 = FieldSpec::prime(2).unwrap();
    let (a, _) = fixtures::desk_algebras(f2);
    let cats = [a, Arc::new(build_category(&fixtures::brauer_line(2), f2).unwrap()), Arc::new(build_category(&fixtures::cycle_nakayama(2), f2).unwrap())];
    let mut rng = rng_for(b"f2 hom corpus");
    let (mut pairs, mut checks, mut attempts, mut nonzero) = (0, 0, 0, 0);
    while pairs < 50 {
        attempts += 1;
        ensure(attempts < 20000, || format!("only {pairs} admissible pairs generated"))?;
        let c = &cats[rng.gen_range(0..cats.len())];
        let (Some(u), Some(v)) = (random_complex(c, &mut rng), random_complex(c, &mut rng)) else { continue };
        let (u, v) = (Arc::new(u), Arc::new(v));
        let Some((lo, hi)) = support_window(&u, &v) else { continue };
        let mut results = Vec::new();
        for n in lo..=hi {
            match brute_hom(c, &u, &v, n) {
                Some(d) => results.push((n, d)),
                None => break,
            }
        }
        if results.len() as i64 != hi - lo + 1 {
            continue;
        }
        for (n, d) in results {
            let got = HomSpace::new(&u, &v, n).map_err(|e| e.to_string())?.dim() as u32;
            ensure(got == d, || format!("pair {pairs}, shift {n}: solver {got}, enumeration {d}"))?;
            checks += 1;
            nonzero += usize::from(d > 0);
        }
        pairs += 1;
    }
    Ok(format!("50 pairs, {checks} (pair, shift) dimensions agree with enumeration, {nonzero} nonzero"))
}

// 5
fn gluing_n3() -> Outcome {
    let g = gluing_example(3).map_err(|e| e.to_string())?;
    let caps = SearchCaps::default();
    let checked = check_tilting_colax(&g.cert, caps).map_err(|e| e.to_string())?;
    ensure(checked.report.passed(), || checked.report.render_text())?;
    let t = checked.tilting.as_ref().ok_or("no tilting functor")?;
    for (i, f) in g.cert.fibers.iter().enumerate() {
        let k = k0_matrix(f);
        ensure(k.unimodular && k.det.map(i64::abs) == Some(1), || format!("fiber {i}: det {:?}", k.det))?;
        ensure(t.certificates[i].iter().all(|c| c.depth() <= 3), || format!("fiber {i}: certificate deeper than 3"))?;
        let e = end_category(f).map_err(|e| e.to_string())?;
        let m = match_presentation(e.cat(), &fixtures::cycle_nakayama(i + 2), &g.hints[i]).map_err(|e| e.to_string())?;
        ensure(m.functor.is_some(), || m.report.render_text())?;
    }
    let out = glue(&g.x_prime, &g.cert, &EquivalenceSource::Hints(g.hints.clone()), caps).map_err(|e| e.to_string())?;
    ensure(out.verdict == Verdict::Certified, || out.report.render_text())?;
    ensure(out.end_dim == Some(out.gr_prime_dim), || format!("dim End(T') = {:?}, dim Gr(X') = {}", out.end_dim, out.gr_prime_dim))?;
    Ok(format!("certified; dim End(T') = dim Gr(X') = {}", out.gr_prime_dim))
}

// 6
fn desk_instances() -> Outcome {
    let mut dims = Vec::new();
    for k in ["path", "poset", "monoid"] {
        let file = example(&format!("diagonal-{k}"));
        let (code, out) = cli(&["glue", &file, "--format", "kv"]);
        ensure(code == 0, || format!("diagonal-{k}: exit {code}\n{out}"))?;
        ensure(kv_value(&out, "gluing.verdict") == Some("certified"), || format!("diagonal-{k}: {out}"))?;
        for clause in ["gluing.tilting_colax_functor.passed", "gluing.t__tilting.passed"] {
            ensure(kv_value(&out, clause) == Some("true"), || format!("diagonal-{k}: {clause}"))?;
        }
        dims.push(kv_value(&out, "gluing.gr_x_dim").unwrap_or("?").to_string());
    }
    Ok(format!("path, incidence and monoid instances certified (dim Gr = {})", dims.join(", ")))
}

// 7
fn composite_axioms() -> Outcome {
    let g = gluing_example(3).map_err(|e| e.to_string())?;
    let vx = kb_prj(g.x.clone()).map_err(|e| e.to_string())?;
    let sample = fixtures::complex_sample(&g);
    ensure(sample.len() == 20, || format!("sample has {} complexes", sample.len()))?;
    let r = vx.check_on_sample(&sample).map_err(|e| e.to_string())?;
    ensure(r.passed(), || r.render_text())?;
    let instances = r.get("instances").unwrap_or("0").to_string();
    let gr = grothendieck(&g.x).map_err(|e| e.to_string())?;
    let p = Arc::new(canonical_morphism(&gr).map_err(|e| e.to_string())?);
    let mut pairs = Vec::new();
    for (i, ti) in g.cert.fibers.iter().enumerate() {
        for (j, tj) in g.cert.fibers.iter().enumerate() {
            for u in ti.objects() {
                for v in tj.objects() {
                    pairs.push((i, u.clone(), j, v.clone()));
                }
            }
        }
    }
    let pr = check_precovering_preserved(&p, &pairs).map_err(|e| e.to_string())?;
    ensure(pr.passed(), || pr.render_text())?;
    Ok(format!("{instances} axiom instances on 20 complexes; {} T-pairs precovering", pairs.len()))
}

// 8
fn determinism() -> Outcome {
    let e86 = example("ex-8.6-3");
    let e42 = example("ex-4.2-1");
    let desk = example("diagonal-monoid");
    let runs: Vec<Vec<&str>> = vec![
        vec!["build-cat", &e86, "--category", "X3"],
        vec!["gr", &e42],
        vec!["check-colax", &e86, "--colax", "X"],
        vec!["check-covering", &e42, "--canonical", "X"],
        vec!["verify-adjunction", &e42],
        vec!["hom", &e86, "--complex", "T32", "--complex", "T33"],
        vec!["presilting", &e86],
        vec!["k0", &e86],
        vec!["find-cert", &e86, "--fiber", "3", "--target", "3"],
        vec!["end-cat", &e86, "--fiber", "3", "--hints", "H"],
        vec!["check-tilting-colax", &desk],
        vec!["glue", &e86],
        vec!["glue", &desk, "--format", "kv"],
        vec!["demo", "ex-4.2"],
        vec!["demo", "ex-8.6", "--n", "3"],
        vec!["demo", "diagonal", "--format", "kv"],
    ];
    for args in &runs {
        let mut outs = Vec::new();
        for jobs in ["1", "8", "8"] {
            let mut a = args.clone();
            a.extend(["--seed", "7", "--jobs", jobs]);
            outs.push(cli(&a));
        }
        ensure(outs[0].0 == 0, || format!("{args:?}: exit {}", outs[0].0))?;
        ensure(outs.iter().all(|o| *o == outs[0]), || format!("{args:?}: outputs differ"))?;
    }
    Ok(format!("{} commands byte-identical across reruns and --jobs 1/8", runs.len()))
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome, Duration); 8] = [
        ("small Grothendieck constructions", small_constructions, Duration::from_secs(1)),
        ("canonical morphism precovering maps are identities", canonical_identities, Duration::from_secs(30)),
        ("triangle identities and covering factorization", triangle_identities, Duration::from_secs(30)),
        ("homotopy Hom against F2 enumeration", hom_oracle, Duration::from_secs(120)),
        ("gluing along 2 -> 3", gluing_n3, Duration::from_secs(300)),
        ("diagonal instances over k(1->2)", desk_instances, Duration::from_secs(120)),
        ("composite axioms and precovering preservation", composite_axioms, Duration::from_secs(120)),
        ("determinism", determinism, Duration::from_secs(600)),
    ];
    let mut failed = Vec::new();
    for (k, (name, f, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let res = f();
        let took = start.elapsed();
        let (status, detail) = match &res {
            Ok(d) if took <= *limit => ("PASS", d.clone()),
            Ok(d) => ("FAIL", format!("{d}; over the time limit")),
            Err(e) => ("FAIL", e.lines().next().unwrap_or("").to_string()),
        };
        // written past the test harness capture so the lines show in plain `cargo test` output
        let mut out = std::io::stdout().lock();
        writeln!(out, "criterion {}: {status} {name}: {detail} ({:.2} s, limit {} s)", k + 1, took.as_secs_f64(), limit.as_secs()).unwrap();
        if status == "FAIL" {
            failed.push((k + 1, res.err().unwrap_or_default()));
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:#?}");
}
