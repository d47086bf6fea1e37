//! The `grglue` command line: argument parsing, entity selection and report output.

use std::collections::BTreeMap;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};

use grglue::fixtures;
use grglue::format::{self, Document, Exporter, Workspace};
use grglue::glue::{glue, EquivalenceSource};
use grglue::grothendieck::{canonical_morphism, check_covering, grothendieck, verify_adjunction};
use grglue::homotopy::{support_window, HomSpace};
use grglue::tilting::{
    check_presilting, check_tilting_colax, end_category, find_generation_certificate, k0_matrix, match_presentation, SearchCaps,
    TiltingColaxCertificate,
};
use grglue::{check_colax, Error, Report};

#[derive(Parser, Debug)]
#[command(name = "grglue", version, about = "Grothendieck constructions of colax functors and certified gluing of derived equivalences")]
pub struct Cli {
    /// Seed for the randomized parts of the homotopy solver.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Kv,
}

#[derive(Args, Debug)]
pub struct Caps {
    /// Nesting depth allowed in generation certificates.
    #[arg(long, default_value_t = 3)]
    pub depth: usize,
    /// Number of candidate complexes the certificate search may hold.
    #[arg(long, default_value_t = 400)]
    pub size: usize,
}

impl Caps {
    fn get(&self) -> SearchCaps {
        SearchCaps { depth: self.depth, size: self.size }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build a category and check its axioms.
    BuildCat {
        file: String,
        #[arg(long)]
        category: Option<String>,
        #[arg(long)]
        emit: Option<String>,
    },
    /// The Grothendieck construction of a colax functor.
    Gr {
        file: String,
        #[arg(long)]
        colax: Option<String>,
        /// Write Gr(X) as a `[category Gr]` section to this file.
        #[arg(long)]
        emit: Option<String>,
    },
    /// Check the unit and cocycle axioms.
    CheckColax {
        file: String,
        #[arg(long)]
        colax: Option<String>,
    },
    /// Check a left transformation into a diagonal for the covering property.
    CheckCovering {
        file: String,
        #[arg(long)]
        transformation: Option<String>,
        /// Check the canonical morphism of this colax functor instead.
        #[arg(long)]
        canonical: Option<String>,
    },
    /// Verify both triangle identities of the Gr / diagonal adjunction.
    VerifyAdjunction {
        file: String,
        #[arg(long)]
        colax: Option<String>,
        #[arg(long)]
        category: Option<String>,
    },
    /// Dimension of Hom(U, V[n]) in the homotopy category.
    Hom {
        file: String,
        /// Give exactly two: source and target.
        #[arg(long = "complex", num_args = 1)]
        complexes: Vec<String>,
        /// All shifts in the support window if absent.
        #[arg(long, allow_hyphen_values = true)]
        shift: Option<i64>,
    },
    /// Check Hom(T, T[n]) = 0 for n ≠ 0 fiberwise.
    Presilting {
        file: String,
        #[arg(long)]
        tilting: Option<String>,
        #[arg(long)]
        fiber: Option<String>,
    },
    /// Grothendieck group classes of the tilting objects.
    K0 {
        file: String,
        #[arg(long)]
        tilting: Option<String>,
        #[arg(long)]
        fiber: Option<String>,
    },
    /// Search for a script building a projective from the tilting objects.
    FindCert {
        file: String,
        #[arg(long)]
        tilting: Option<String>,
        #[arg(long)]
        fiber: String,
        #[arg(long)]
        target: String,
        #[command(flatten)]
        caps: Caps,
        #[arg(long)]
        emit: Option<String>,
    },
    /// The endomorphism category of a fiber of a tilting collection.
    EndCat {
        file: String,
        #[arg(long)]
        tilting: Option<String>,
        #[arg(long)]
        fiber: String,
        /// Match against the presented fibers named by these hints.
        #[arg(long)]
        hints: Option<String>,
        #[arg(long)]
        emit: Option<String>,
    },
    /// Check that tilting data forms a tilting colax functor.
    CheckTiltingColax {
        file: String,
        #[arg(long)]
        tilting: Option<String>,
        #[command(flatten)]
        caps: Caps,
    },
    /// Glue fiberwise tilting data to a tilting subcategory of Gr(X).
    Glue {
        file: String,
        #[arg(long)]
        tilting: Option<String>,
        #[arg(long)]
        hints: Option<String>,
        #[command(flatten)]
        caps: Caps,
    },
    /// Run a built-in example: ex-4.2, ex-8.6, diagonal.
    Demo {
        name: String,
        #[arg(long, default_value_t = 3)]
        n: usize,
    },
    /// Print a built-in example as an input file.
    Export { name: String },
}

/// Outcome of a command before rendering.
enum Outcome {
    Report(Report),
    Text(String),
}

enum Failure {
    Input(String),
    Compute(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse { .. } | Error::UnresolvedReference { .. } => Failure::Input(e.to_string()),
            other => Failure::Compute(other),
        }
    }
}

type Res<T> = std::result::Result<T, Failure>;

fn input<T>(msg: impl Into<String>) -> Res<T> {
    Err(Failure::Input(msg.into()))
}

fn read(file: &str) -> Res<Workspace> {
    let text = std::fs::read_to_string(file).map_err(|e| Failure::Input(format!("{file}: {e}")))?;
    format::load(&text).map_err(|e| Failure::Input(format!("{file}: {e}")))
}

fn write(path: &str, doc: &Document) -> Res<()> {
    std::fs::write(path, doc.emit()).map_err(|e| Failure::Input(format!("{path}: {e}")))
}

fn pick<'a, T>(map: &'a BTreeMap<String, T>, name: Option<&str>, kind: &str) -> Res<(String, &'a T)> {
    match name {
        Some(n) => map.get(n).map(|v| (n.to_string(), v)).ok_or_else(|| Failure::Input(format!("no [{kind} {n}] in the input"))),
        None if map.len() == 1 => {
            let (k, v) = map.iter().next().unwrap();
            Ok((k.clone(), v))
        }
        None if map.is_empty() => input(format!("the input has no [{kind}] section")),
        None => input(format!("several [{kind}] sections; choose one with --{kind}")),
    }
}

fn fiber_index(cert: &TiltingColaxCertificate, name: &str) -> Res<usize> {
    cert.colax.index().object_index(name).ok_or_else(|| Failure::Input(format!("no index object `{name}`")))
}

/// Parses `args` (without the program name) and runs the command.
pub fn run<I, S>(args: I) -> (i32, String)
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let argv = std::iter::once(std::ffi::OsString::from("grglue")).chain(args.into_iter().map(Into::into));
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            return (code, e.to_string());
        }
    };
    grglue::rng::set_seed(cli.seed);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs.unwrap_or(0)).build();
    let pool = match pool {
        Ok(p) => p,
        Err(e) => return (2, format!("error: {e}\n")),
    };
    let outcome = pool.install(|| execute(&cli.command));
    match outcome {
        Ok(Outcome::Report(r)) => {
            let code = if r.passed() { 0 } else { 1 };
            let text = match cli.format {
                OutputFormat::Text => r.render_text(),
                OutputFormat::Kv => r.render_kv(),
            };
            (code, text)
        }
        Ok(Outcome::Text(t)) => (0, t),
        Err(Failure::Input(m)) => (2, format!("input error: {m}\n")),
        Err(Failure::Compute(e)) => {
            let mut r = Report::new("error");
            r.fail(e.to_string());
            let text = match cli.format {
                OutputFormat::Text => r.render_text(),
                OutputFormat::Kv => r.render_kv(),
            };
            (1, text)
        }
    }
}

fn execute(cmd: &Command) -> Res<Outcome> {
    match cmd {
        Command::BuildCat { file, category, emit } => {
            let ws = read(file)?;
            let (name, c) = pick(&ws.categories, category.as_deref(), "category")?;
            let mut r = Report::new(format!("category {name}"));
            r.value("objects", c.n_objects());
            r.value("dim", c.total_dim());
            dims_into(&mut r, c);
            r.child(c.check_axioms());
            if let Some(path) = emit {
                let mut ex = Exporter::new(ws.field);
                ex.category(&name, c);
                write(path, &ex.finish())?;
            }
            Ok(Outcome::Report(r))
        }
        Command::Gr { file, colax, emit } => {
            let ws = read(file)?;
            let (name, x) = pick(&ws.colax, colax.as_deref(), "colax")?;
            let gr = grothendieck(x)?;
            let mut r = Report::new(format!("Gr({name})"));
            r.value("objects", gr.cat().n_objects());
            r.value("dim", gr.cat().total_dim());
            dims_into(&mut r, gr.cat());
            r.child(gr.cat().check_axioms());
            if let Some(path) = emit {
                let mut ex = Exporter::new(ws.field);
                ex.category("Gr", gr.cat());
                write(path, &ex.finish())?;
            }
            Ok(Outcome::Report(r))
        }
        Command::CheckColax { file, colax } => {
            let ws = read(file)?;
            let (_, x) = pick(&ws.colax, colax.as_deref(), "colax")?;
            Ok(Outcome::Report(check_colax(x)))
        }
        Command::CheckCovering { file, transformation, canonical } => {
            let ws = read(file)?;
            let f = if let Some(x) = canonical {
                let (_, x) = pick(&ws.colax, Some(x), "colax")?;
                Arc::new(canonical_morphism(&grothendieck(x)?)?)
            } else {
                pick(&ws.transformations, transformation.as_deref(), "transformation")?.1.clone()
            };
            Ok(Outcome::Report(check_covering(&f)?))
        }
        Command::VerifyAdjunction { file, colax, category } => {
            let ws = read(file)?;
            let (_, x) = pick(&ws.colax, colax.as_deref(), "colax")?;
            let c = match category {
                Some(_) => pick(&ws.categories, category.as_deref(), "category")?.1.clone(),
                None => x.fiber(0).clone(),
            };
            Ok(Outcome::Report(verify_adjunction(x, &c)?))
        }
        Command::Hom { file, complexes, shift } => {
            let ws = read(file)?;
            if complexes.len() != 2 {
                return input("give --complex twice: source, then target");
            }
            let (_, u) = pick(&ws.complexes, Some(&complexes[0]), "complex")?;
            let (_, v) = pick(&ws.complexes, Some(&complexes[1]), "complex")?;
            if !grglue::fincat::same_cat(u.base(), v.base()) {
                return input("the complexes live over different categories");
            }
            let mut r = Report::new(format!("Hom({}, {})", complexes[0], complexes[1]));
            match shift {
                Some(n) => {
                    r.value("shift", n);
                    r.value("dim", HomSpace::new(u, v, *n)?.dim());
                }
                None => {
                    if let Some((lo, hi)) = support_window(u, v) {
                        for n in lo..=hi {
                            r.value(format!("dim[{n}]"), HomSpace::new(u, v, n)?.dim());
                        }
                    }
                }
            }
            Ok(Outcome::Report(r))
        }
        Command::Presilting { file, tilting, fiber } => {
            let ws = read(file)?;
            let (name, cert) = pick(&ws.tilting, tilting.as_deref(), "tilting")?;
            let mut r = Report::new(format!("presilting {name}"));
            for i in fibers(cert, fiber.as_deref())? {
                let mut c = check_presilting(&cert.fibers[i])?;
                c.title = format!("fiber {}", cert.colax.index().objects()[i]);
                r.child(c);
            }
            Ok(Outcome::Report(r))
        }
        Command::K0 { file, tilting, fiber } => {
            let ws = read(file)?;
            let (name, cert) = pick(&ws.tilting, tilting.as_deref(), "tilting")?;
            let mut r = Report::new(format!("K0 {name}"));
            for i in fibers(cert, fiber.as_deref())? {
                let k = k0_matrix(&cert.fibers[i]);
                let mut c = Report::new(format!("fiber {}", cert.colax.index().objects()[i]));
                for (row, n) in k.rows.iter().zip(cert.fibers[i].names()) {
                    c.value(n.clone(), format!("{row:?}"));
                }
                c.value("rank", k.rank);
                c.value("det", k.det.map_or("undefined".to_string(), |d| d.to_string()));
                if !k.unimodular {
                    c.fail("the class matrix is not unimodular");
                }
                r.child(c);
            }
            Ok(Outcome::Report(r))
        }
        Command::FindCert { file, tilting, fiber, target, caps, emit } => {
            let ws = read(file)?;
            let (name, cert) = pick(&ws.tilting, tilting.as_deref(), "tilting")?;
            let i = fiber_index(cert, fiber)?;
            let t = &cert.fibers[i];
            let x = t.base().object_index(target).ok_or_else(|| Failure::Input(format!("no object `{target}` in fiber {fiber}")))?;
            let mut r = Report::new(format!("certificate for P{target} in fiber {fiber}"));
            match find_generation_certificate(t, x, caps.get())? {
                None => r.fail(format!("no certificate within depth {} and {} candidates", caps.depth, caps.size)),
                Some(g) => {
                    r.value("depth", g.depth());
                    r.value("steps", g.ops.len());
                    let mut ex = Exporter::new(ws.field);
                    ex.tilting(&name, cert);
                    ex.certificate(&format!("{fiber}:P{target}"), &name, cert, i, &g)?;
                    let doc = ex.finish();
                    if let Some(sec) = doc.sections.iter().find(|s| s.kind == "certificate") {
                        for e in sec.entries.iter().filter(|e| e.key == "op") {
                            r.note(e.value.clone());
                        }
                    }
                    if let Some(path) = emit {
                        write(path, &doc)?;
                    }
                }
            }
            Ok(Outcome::Report(r))
        }
        Command::EndCat { file, tilting, fiber, hints, emit } => {
            let ws = read(file)?;
            let (name, cert) = pick(&ws.tilting, tilting.as_deref(), "tilting")?;
            let i = fiber_index(cert, fiber)?;
            let e = end_category(&cert.fibers[i])?;
            let mut r = Report::new(format!("End({name}({fiber}))"));
            r.value("objects", e.cat().n_objects());
            r.value("dim", e.cat().total_dim());
            dims_into(&mut r, e.cat());
            if let Some(h) = hints {
                let (_, hs) = pick(&ws.hints, Some(h), "hints")?;
                let xp = &ws.colax[&hs.target];
                let Some(info) = xp.fiber(i).quiver() else {
                    return input(format!("the fiber of {} at {fiber} has no presentation", hs.target));
                };
                let m = match_presentation(e.cat(), &info.presentation, &hs.hints[i])?;
                r.child(m.report);
            }
            if let Some(path) = emit {
                let mut ex = Exporter::new(ws.field);
                ex.category("End", e.cat());
                write(path, &ex.finish())?;
            }
            Ok(Outcome::Report(r))
        }
        Command::CheckTiltingColax { file, tilting, caps } => {
            let ws = read(file)?;
            let (_, cert) = pick(&ws.tilting, tilting.as_deref(), "tilting")?;
            Ok(Outcome::Report(check_tilting_colax(cert, caps.get())?.report))
        }
        Command::Glue { file, tilting, hints, caps } => {
            let ws = read(file)?;
            let (hname, hs) = match hints {
                Some(_) => pick(&ws.hints, hints.as_deref(), "hints")?,
                None => pick(&ws.hints, None, "hints")?,
            };
            let tname = tilting.clone().unwrap_or_else(|| hs.tilting.clone());
            let (_, cert) = pick(&ws.tilting, Some(&tname), "tilting")?;
            let xp = ws.colax.get(&hs.target).ok_or_else(|| Failure::Input(format!("hints {hname} name an unknown target")))?;
            let g = glue(xp, cert, &EquivalenceSource::Hints(hs.hints.clone()), caps.get())?;
            Ok(Outcome::Report(g.report))
        }
        Command::Demo { name, n } => demo(name, *n),
        Command::Export { name } => match fixtures::document(name) {
            Some(d) => Ok(Outcome::Text(d?.emit())),
            None => input(format!("unknown example `{name}`; known: {}", fixtures::DOCUMENTS.join(", "))),
        },
    }
}

fn fibers(cert: &TiltingColaxCertificate, fiber: Option<&str>) -> Res<Vec<usize>> {
    match fiber {
        Some(f) => Ok(vec![fiber_index(cert, f)?]),
        None => Ok((0..cert.fibers.len()).collect()),
    }
}

fn dims_into(r: &mut Report, c: &grglue::FinKCat) {
    for x in 0..c.n_objects() {
        for y in 0..c.n_objects() {
            r.value(format!("hom({},{})", c.object_name(x), c.object_name(y)), c.dim(x, y));
        }
    }
}

fn demo(name: &str, n: usize) -> Res<Outcome> {
    match name {
        "ex-4.2" => {
            let mut r = Report::new("small Grothendieck constructions");
            for (label, x) in fixtures::gr_examples(grglue::FieldSpec::rationals()) {
                let gr = grothendieck(&x)?;
                let idx = x.index();
                let mut c = Report::new(label);
                c.value("dim", gr.cat().total_dim());
                for i in 0..idx.n_objects() {
                    for j in 0..idx.n_objects() {
                        let d = gr.cat().dim(gr.object(i, 0), gr.object(j, 0));
                        c.value(format!("hom({},{})", idx.objects()[i], idx.objects()[j]), d);
                        // over a field, Hom((i,*),(j,*)) has one basis vector per element of I(i,j)
                        if d != idx.hom(i, j).len() {
                            c.fail(format!("Hom({}, {}) has dimension {d}, not |I(i,j)| = {}", idx.objects()[i], idx.objects()[j], idx.hom(i, j).len()));
                        }
                    }
                }
                c.child(gr.cat().check_axioms());
                r.child(c);
            }
            Ok(Outcome::Report(r))
        }
        "ex-8.6" => {
            if n < 2 {
                return input("--n must be at least 2");
            }
            let g = fixtures::gluing_example(n)?;
            let out = glue(&g.x_prime, &g.cert, &EquivalenceSource::Hints(g.hints.clone()), SearchCaps::default())?;
            let mut r = out.report;
            r.title = "gluing".into();
            r.value("n", n);
            Ok(Outcome::Report(r))
        }
        "diagonal" => {
            let mut r = Report::new("diagonal instances over k(1->2)");
            for d in fixtures::desk_instances() {
                let out = glue(&d.x_prime, &d.cert, &EquivalenceSource::Hints(d.hints.clone()), SearchCaps::default())?;
                let mut c = out.report;
                c.title = d.name.to_string();
                r.child(c);
            }
            Ok(Outcome::Report(r))
        }
        other => input(format!("unknown demo `{other}`; known: ex-4.2, ex-8.6, diagonal")),
    }
}
