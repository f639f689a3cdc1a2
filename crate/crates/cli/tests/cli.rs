use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::{json, Value};
use structspace::format;
use structspace_cli::{run, Outcome, Report};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn sspace(args: &[&str]) -> Outcome {
    let mut full = vec!["sspace".to_string()];
    for a in args {
        full.push(match a.strip_prefix('@') {
            Some(name) => fixture(name).display().to_string(),
            None => a.to_string(),
        });
    }
    run(full)
}

fn json_report(args: &[&str]) -> (Report, i32) {
    let mut full = vec!["--format", "json"];
    full.extend_from_slice(args);
    let out = sspace(&full);
    let report = Report::from_json(&out.stdout)
        .unwrap_or_else(|e| panic!("bad report ({e}): {}\n{}", out.stdout, out.stderr));
    (report, out.code)
}

fn verdict<'a>(r: &'a Report, name: &str) -> &'a structspace_cli::VerdictLine {
    r.verdicts
        .iter()
        .find(|v| v.name == name)
        .unwrap_or_else(|| panic!("no verdict `{name}` in {:?}", r.verdicts))
}

#[test]
fn canonical_space_fixtures_round_trip() {
    for name in [
        "f1.json",
        "z2.json",
        "z3.json",
        "z4.json",
        "z6.json",
        "disjoint_measured.json",
    ] {
        let text = std::fs::read_to_string(fixture(name)).unwrap();
        let (s, m) = format::parse_space(&text).unwrap();
        assert_eq!(
            format::emit_space(&s, m.as_ref()).trim_end(),
            text.trim_end(),
            "{name}"
        );
    }
}

#[test]
fn hand_written_space_round_trips_after_one_emit() {
    let text = std::fs::read_to_string(fixture("false_law.json")).unwrap();
    let (s, m) = format::parse_space(&text).unwrap();
    let once = format::emit_space(&s, m.as_ref());
    let (s2, m2) = format::parse_space(&once).unwrap();
    assert_eq!(format::emit_space(&s2, m2.as_ref()), once);
}

#[test]
fn system_and_poset_fixtures_round_trip() {
    for name in ["chain.system.json", "corrupted.system.json"] {
        let text = std::fs::read_to_string(fixture(name)).unwrap();
        let systems = format::parse_direct_systems(&text).unwrap();
        assert_eq!(
            format::emit_direct_systems(&systems).trim_end(),
            text.trim_end(),
            "{name}"
        );
    }
    let text = std::fs::read_to_string(fixture("diamond.lattice.json")).unwrap();
    let p = format::parse_poset(&text).unwrap();
    let again = format::parse_poset(&format::emit_poset(&p)).unwrap();
    assert_eq!(format::emit_poset(&again), format::emit_poset(&p));
}

#[test]
fn exit_codes() {
    let cases: &[(&[&str], i32)] = &[
        (&["validate", "@z3.json"], 0),
        (&["validate", "@f1.json"], 0),
        (&["validate", "@false_law.json"], 1),
        (&["validate", "@malformed.json"], 2),
        (&["validate", "@empty.json"], 2),
        (&["validate", "@unknown_point.json"], 2),
        (&["validate", "@does_not_exist.json"], 2),
        (&["topology", "@f1.json"], 0),
        (&["atoms", "@f1.json"], 0),
        (&["connectivity", "@f1.json"], 1),
        (&["lattice", "@f1.json"], 1),
        (&["lattice", "@z3.json"], 0),
        (
            &["measure", "@f1.json", "--weights", "@f1_heavy.weights.json"],
            1,
        ),
        (&["measure", "@disjoint_measured.json"], 0),
        (
            &["restrict", "@disjoint_measured.json", "--collection", "A,B"],
            0,
        ),
        (
            &["restrict", "@disjoint_measured.json", "--collection", "A,Q"],
            2,
        ),
        (&["product", "@z2.json", "@z3.json"], 0),
        (
            &[
                "quotient",
                "@z6.json",
                "--congruence",
                "@z6_cosets.congruence.json",
            ],
            0,
        ),
        (
            &[
                "quotient",
                "@z6.json",
                "--congruence",
                "@z6_blocks.congruence.json",
            ],
            0,
        ),
        (
            &[
                "quotient",
                "@z4.json",
                "--congruence",
                "@z4_bad.congruence.json",
            ],
            1,
        ),
        (
            &[
                "quotient",
                "@z4.json",
                "--congruence",
                "@z4_unknown.congruence.json",
            ],
            2,
        ),
        (&["dirlimit", "@chain.system.json"], 0),
        (&["dirlimit", "@corrupted.system.json"], 1),
        (&["converse", "@chain2.lattice.json"], 0),
        (&["converse", "@diamond.lattice.json"], 0),
        (&["converse", "@vee.lattice.json"], 1),
        (&["converse", "@singleton.lattice.json"], 2),
        (&["frobnicate"], 2),
        (&["validate"], 2),
        (&["--help"], 0),
    ];
    for (args, code) in cases {
        let out = sspace(args);
        assert_eq!(
            out.code, *code,
            "{args:?}\nstdout: {}\nstderr: {}",
            out.stdout, out.stderr
        );
        if *code == 2 && args[0] != "--help" {
            assert!(!out.stderr.is_empty(), "{args:?} gave no diagnostic");
        }
    }
}

#[test]
fn f1_lattice_counterexample() {
    let (r, code) = json_report(&["lattice", "@f1.json"]);
    assert_eq!(code, 1);
    assert!(verdict(&r, "h surjective").holds);
    let l = verdict(&r, "lattice");
    assert!(!l.holds);
    let w = l.witness.as_ref().unwrap();
    assert_eq!(w["left"], "[1]");
    assert_eq!(w["right"], "[3]");
    assert_eq!(w["missing"], "meet");
    assert_eq!(w["bounds"], json!([]));
}

#[test]
fn f1_zero_overlap_is_mu_union_but_not_partitionable() {
    let (r, code) = json_report(&["measure", "@f1.json", "--weights", "@f1_zero2.weights.json"]);
    assert_eq!(code, 1);
    let p = verdict(&r, "partitionable");
    assert!(!p.holds);
    assert_eq!(p.witness.as_ref().unwrap()["point"], "2");
    assert!(verdict(&r, "μ-union").holds);
    assert!(verdict(&r, "globally μ-homogeneous").holds);

    let (heavy, _) = json_report(&["measure", "@f1.json", "--weights", "@f1_heavy.weights.json"]);
    assert!(!verdict(&heavy, "μ-union").holds);
}

#[test]
fn quotient_and_limit_witnesses() {
    let (r, _) = json_report(&[
        "quotient",
        "@z4.json",
        "--congruence",
        "@z4_bad.congruence.json",
    ]);
    let w = &verdict(&r, "congruence").witness.as_ref().unwrap()["witness"];
    assert_eq!(w["op"], "+");
    assert_ne!(w["left_value"], w["right_value"]);

    let (r, _) = json_report(&["dirlimit", "@corrupted.system.json"]);
    let w = verdict(&r, "`chain` is a direct system")
        .witness
        .as_ref()
        .unwrap();
    let v = &w[0];
    assert_eq!(
        (v["i"].clone(), v["j"].clone(), v["k"].clone()),
        (json!("0"), json!("1"), json!("2"))
    );
    assert_eq!(v["element"], "a0_1");
    assert_eq!(v["direct"], "a2_0");
    assert_eq!(v["composed"], "a2_4");
}

#[test]
fn json_report_round_trips() {
    let out = sspace(&["--format", "json", "connectivity", "@f1.json"]);
    let r = Report::from_json(&out.stdout).unwrap();
    assert_eq!(r.to_json().trim_end(), out.stdout.trim_end());
    let raw: Value = serde_json::from_str(&out.stdout).unwrap();
    assert!(raw["command"]
        .as_array()
        .unwrap()
        .contains(&json!("connectivity")));
    assert!(sspace(&["connectivity", "@f1.json"])
        .stdout
        .contains("✗ ultraconnected"));
}

#[test]
fn written_outputs_validate() {
    let dir = tempfile::tempdir().unwrap();
    let prod = dir.path().join("prod.json");
    let quot = dir.path().join("quot.json");
    let lim = dir.path().join("lim.json");
    let conv = dir.path().join("conv.json");
    let p = prod.to_str().unwrap();
    let q = quot.to_str().unwrap();
    let l = lim.to_str().unwrap();
    let c = conv.to_str().unwrap();
    assert_eq!(
        sspace(&["product", "@z2.json", "@z2.json", "--out", p]).code,
        0
    );
    assert_eq!(
        sspace(&[
            "quotient",
            "@z6.json",
            "--congruence",
            "@z6_cosets.congruence.json",
            "--out",
            q
        ])
        .code,
        0
    );
    assert_eq!(
        sspace(&["dirlimit", "@chain.system.json", "--out", l]).code,
        0
    );
    assert_eq!(
        sspace(&["converse", "@diamond.lattice.json", "--out", c]).code,
        0
    );
    for path in [p, q, l, c] {
        assert_eq!(sspace(&["validate", path]).code, 0, "{path}");
    }
    let (r, code) = json_report(&["lattice", c]);
    assert_eq!(code, 0, "{:?}", r.verdicts);
}

#[test]
fn dot_export() {
    let dir = tempfile::tempdir().unwrap();
    let dot = dir.path().join("f1.dot");
    sspace(&["lattice", "@f1.json", "--dot", dot.to_str().unwrap()]);
    let text = std::fs::read_to_string(&dot).unwrap();
    assert!(text.starts_with("digraph"));
    assert!(text.contains("{U_a,U_b}"));
    assert_eq!(text.matches("->").count(), 2);
}

#[test]
fn format_from_environment() {
    let bin = env!("CARGO_BIN_EXE_sspace");
    let out = Command::new(bin)
        .env("SSPACE_FORMAT", "json")
        .arg("validate")
        .arg(fixture("z3.json"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let r = Report::from_json(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    assert!(verdict(&r, "structured space").holds);

    let out = Command::new(bin)
        .env("SSPACE_FORMAT", "json")
        .args(["--format", "text", "validate"])
        .arg(fixture("z3.json"))
        .output()
        .unwrap();
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("$ sspace"));
}
