use grglue::fixtures::{self, document, gluing_example, DOCUMENTS};
use grglue::format::{load, parse};
use grglue::FieldSpec;

#[test]
fn every_document_is_stable_under_emit_and_parse() {
    for name in DOCUMENTS {
        let doc = document(name).unwrap().unwrap();
        let text = doc.emit();
        let again = parse(&text).unwrap();
        assert_eq!(again, doc.normalized(), "{name}");
        assert_eq!(again.emit(), text, "{name}");
        load(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}

#[test]
fn gluing_entities_survive_the_round_trip() {
    let g = gluing_example(3).unwrap();
    let ws = load(&document("ex-8.6-3").unwrap().unwrap().emit()).unwrap();
    assert_eq!(*ws.colax["X"], *g.x);
    assert_eq!(*ws.colax["Xp"], *g.x_prime);
    let t = &ws.tilting["T"];
    assert_eq!(t.object_maps, g.cert.object_maps);
    for (a, b) in t.fibers.iter().zip(&g.cert.fibers) {
        assert_eq!(a.objects(), b.objects());
    }
    assert_eq!(ws.hints["H"].hints, g.hints);
    assert_eq!(ws.complexes.len(), 5);
    assert!(ws.complexes.contains_key("T32") && ws.complexes.contains_key("T33"));
    let supplied = t.certificates.iter().flatten().filter(|c| c.is_some()).count();
    assert!(supplied >= 1);
}

#[test]
fn small_examples_survive_the_round_trip() {
    for (k, (_, x)) in fixtures::gr_examples(FieldSpec::rationals()).into_iter().enumerate() {
        let ws = load(&document(&format!("ex-4.2-{}", k + 1)).unwrap().unwrap().emit()).unwrap();
        assert_eq!(*ws.colax["X"], *x);
    }
    for (k, d) in fixtures::desk_instances().into_iter().enumerate() {
        let ws = load(&document(&format!("diagonal-{}", grglue::fixtures::DIAGONAL_KINDS[k])).unwrap().unwrap().emit()).unwrap();
        assert_eq!(*ws.colax["X"], *d.x);
        assert_eq!(*ws.colax["Xp"], *d.x_prime);
        assert_eq!(ws.tilting["T"].object_maps, d.cert.object_maps);
    }
}

#[test]
fn twisted_and_table_data_round_trip() {
    use grglue::format::Exporter;
    use grglue::grothendieck;
    for x in fixtures::random_corpus(6) {
        let mut ex = Exporter::new(x.fiber(0).field());
        ex.colax("X", &x);
        let gr = grothendieck(&x).unwrap();
        ex.category("G", gr.cat());
        let text = ex.finish().emit();
        let ws = load(&text).unwrap_or_else(|e| panic!("{e}\n{text}"));
        assert_eq!(*ws.colax["X"], *x);
        assert_eq!(*ws.categories["G"], **gr.cat());
    }
}

#[test]
#[ignore]
fn print_document() {
    let name = std::env::var("DOC").unwrap_or("ex-8.6-3".into());
    print!("{}", document(&name).unwrap().unwrap().emit());
}
