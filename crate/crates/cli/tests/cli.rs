use std::path::PathBuf;

use grglue::fixtures;
use grglue_cli::run;

fn example(name: &str) -> String {
    format!("{}/examples/{name}.toy", env!("CARGO_MANIFEST_DIR"))
}

fn scratch(name: &str, text: &str) -> String {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn go(args: &[&str]) -> (i32, String) {
    run(args.iter().map(|s| s.to_string()))
}

const NOT_PRESILTING: &str = "[field]
characteristic = 0

[category k]
vertices = *

[index I]
kind = quiver
objects = 1 2
arrow a = 1 -> 2

[colax X]
index = I
diagonal = k

[complex P]
category = k
lo = 0
term 0 = *

[complex S]
category = k
lo = -1
term -1 = *

[tilting T]
colax = X
fiber 1 = P S
fiber 2 = P S
map a = P>P S>S
";

#[test]
fn shipped_examples_match_export() {
    for name in fixtures::DOCUMENTS {
        let (code, out) = go(&["export", name]);
        assert_eq!(code, 0, "{name}");
        let shipped = std::fs::read_to_string(example(name)).unwrap();
        assert_eq!(out.trim_end(), shipped.trim_end(), "{name}.toy is stale");
    }
}

#[test]
fn every_example_loads_and_its_colax_checks() {
    for name in fixtures::DOCUMENTS {
        let file = example(name);
        let (code, out) = go(&["check-colax", &file, "--colax", "X"]);
        assert_eq!(code, 0, "{name}: {out}");
    }
}

#[test]
fn gr_of_the_single_arrow() {
    let (code, out) = go(&["gr", &example("ex-4.2-1"), "--format", "kv"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.lines().any(|l| l.ends_with(".dim=3")), "{out}");
}

#[test]
fn gr_emits_a_loadable_category() {
    let file = scratch("gr.toy", "");
    let dim = |out: &str| out.lines().find(|l| l.contains(".dim=")).map(|l| l.split('=').nth(1).unwrap().to_string());
    let (code, gr) = go(&["gr", &example("ex-4.2-2"), "--emit", &file, "--format", "kv"]);
    assert_eq!(code, 0, "{gr}");
    let (code, out) = go(&["build-cat", &file, "--category", "Gr", "--format", "kv"]);
    assert_eq!(code, 0, "{out}");
    assert_eq!(dim(&out), dim(&gr));
    assert_eq!(dim(&out).as_deref(), Some("6"));
}

#[test]
fn hom_of_the_delta_pair() {
    let f = example("ex-8.6-3");
    let (code, out) = go(&["hom", &f, "--complex", "T32", "--complex", "T33", "--shift", "1", "--format", "kv"]);
    assert_eq!(code, 0);
    assert!(out.lines().any(|l| l.ends_with(".dim=0")), "{out}");
    let (_, out) = go(&["hom", &f, "--complex", "T33", "--complex", "T32", "--shift", "0", "--format", "kv"]);
    assert!(out.lines().any(|l| l.ends_with(".dim=1")), "{out}");
}

#[test]
fn glue_certifies_the_shipped_instances() {
    for name in ["ex-8.6-3", "diagonal-path", "diagonal-poset", "diagonal-monoid"] {
        let (code, out) = go(&["glue", &example(name), "--format", "kv"]);
        assert_eq!(code, 0, "{name}: {out}");
        assert!(out.contains("verdict=certified"), "{name}: {out}");
    }
}

#[test]
fn failing_checks_exit_one() {
    let f = scratch("bad.toy", NOT_PRESILTING);
    for cmd in ["presilting", "k0", "check-tilting-colax"] {
        let (code, out) = go(&[cmd, &f]);
        assert_eq!(code, 1, "{cmd}: {out}");
    }
    let (_, out) = go(&["presilting", &f, "--fiber", "1"]);
    assert!(out.contains("Hom(S, P[1]) has dimension 1"), "{out}");
}

#[test]
fn input_errors_exit_two() {
    let base = std::fs::read_to_string(example("ex-4.2-1")).unwrap();
    let arrow = scratch("arrow.toy", &base.replace("arrow a = 1 -> 2", "arrow a = 1 -> 3"));
    let (code, msg) = go(&["gr", &arrow]);
    assert_eq!(code, 2);
    assert!(msg.contains("unresolved reference `3`"), "{msg}");
    let unres = scratch("unres.toy", &base.replace("diagonal = k", "diagonal = q"));
    let (code, msg) = go(&["gr", &unres]);
    assert_eq!(code, 2);
    assert!(msg.contains("`q`"), "{msg}");
    let syntax = scratch("syntax.toy", "[field]\ncharacteristic = 0\nthis line has no equals\n");
    let (code, msg) = go(&["gr", &syntax]);
    assert_eq!(code, 2);
    assert!(msg.contains("line 3"), "{msg}");
    assert_eq!(go(&["gr", "/nonexistent/file.toy"]).0, 2);
    assert_eq!(go(&["no-such-command"]).0, 2);
    assert_eq!(go(&["export", "nothing"]).0, 2);
}

#[test]
fn demos_pass() {
    for args in [&["demo", "ex-4.2"][..], &["demo", "ex-8.6", "--n", "4"], &["demo", "diagonal"]] {
        let (code, out) = go(args);
        assert_eq!(code, 0, "{args:?}: {out}");
    }
}

#[test]
fn kv_and_text_agree_on_the_verdict() {
    let f = example("diagonal-path");
    let (_, text) = go(&["glue", &f]);
    let (_, kv) = go(&["glue", &f, "--format", "kv"]);
    assert!(text.contains("certified"));
    assert!(kv.lines().all(|l| l.contains('=')), "{kv}");
}
