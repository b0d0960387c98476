use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn boilerstrip(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_boilerstrip"))
        .args(args)
        .output()
        .unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn data_lines(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).collect()
}

#[test]
fn exit_codes() {
    assert_eq!(boilerstrip(&["--help"]).status.code(), Some(0));
    assert_eq!(boilerstrip(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(boilerstrip(&["strip", "--corpus", "x", "--backend", "bloom"]).status.code(), Some(2));
    assert_eq!(boilerstrip(&["strip", "--corpus", "x", "--gap-max", "0"]).status.code(), Some(2));
    assert_eq!(boilerstrip(&["analyze", "prop1", "--p", "1.5", "--n", "3"]).status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nowhere");
    let out = boilerstrip(&["strip", "--corpus", s(&missing), "--out", s(&dir.path().join("o"))]);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(!out.stderr.is_empty());
}

#[test]
fn empty_corpus_gives_empty_report() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus");
    fs::create_dir(&corpus).unwrap();
    fs::write(corpus.join("README.txt"), "not a book\n").unwrap();
    let out_dir = dir.path().join("out");
    let out = boilerstrip(&["strip", "--corpus", s(&corpus), "--out", s(&out_dir)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = fs::read_to_string(out_dir.join("reports.tsv")).unwrap();
    assert!(data_lines(&report).is_empty());
    assert!(report.lines().any(|l| l == "# files=0"));
}

#[test]
fn evaluate_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let reports = dir.path().join("reports.tsv");
    let gold = dir.path().join("gold.tsv");
    fs::write(&reports, "# run header\na.txt\t10\t100\nb.txt\t7\t-\nc.txt\t-\t50\n").unwrap();
    fs::write(&gold, "a.txt\t10\t103\nb.txt\t10\t-\nc.txt\t4\t50\n").unwrap();
    let per_file = dir.path().join("per_file.csv");
    let out = boilerstrip(&[
        "evaluate",
        "--reports",
        s(&reports),
        "--gold",
        s(&gold),
        "--tolerances",
        "0,3",
        "--per-file",
        s(&per_file),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = summary.lines().collect();
    assert_eq!(rows[0], "side,files,mismatches,within_0,within_3");
    assert!(rows[1].starts_with("preamble,3,1,"), "{}", rows[1]);
    assert!(rows[2].starts_with("epilogue,3,0,"), "{}", rows[2]);

    let pf = fs::read_to_string(&per_file).unwrap();
    assert_eq!(pf.lines().next().unwrap(), "file,preamble_error,epilogue_error,category");
    // epilogue detected 3 lines early: det - gold
    assert!(pf.lines().any(|l| l.starts_with("a.txt,0,-3,")), "{pf}");
    // preamble cut 3 lines short: gold - det
    assert!(pf.lines().any(|l| l.starts_with("b.txt,3,0,")), "{pf}");
    assert!(pf.lines().any(|l| l.starts_with("c.txt,-,0,preamble_missed")), "{pf}");

    fs::write(&reports, "a.txt\t10\t100\n").unwrap();
    let out = boilerstrip(&["evaluate", "--reports", s(&reports), "--gold", s(&gold)]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exact_and_crc64_agree_and_index_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus");
    let gen = boilerstrip(&[
        "generate", "--out", s(&corpus), "--files", "40", "--body-min", "50", "--body-max", "90", "--seed", "3",
    ]);
    assert!(gen.status.success(), "{}", String::from_utf8_lossy(&gen.stderr));

    let strip = |name: &str, extra: &[&str]| -> String {
        let out_dir = dir.path().join(name);
        let mut args = vec!["strip", "--corpus", s(&corpus), "--out", s(&out_dir)];
        args.extend_from_slice(extra);
        let out = boilerstrip(&args);
        assert!(out.status.success(), "{name}: {}", String::from_utf8_lossy(&out.stderr));
        fs::read_to_string(out_dir.join("reports.tsv")).unwrap()
    };
    let exact = strip("exact", &["--backend", "exact"]);
    let crc = strip("crc", &["--backend", "crc64"]);
    assert_eq!(data_lines(&exact).len(), 40);
    assert_eq!(data_lines(&exact), data_lines(&crc));

    let index = dir.path().join("index.bin");
    let frequent = dir.path().join("frequent.tsv");
    let out = boilerstrip(&[
        "index",
        "--corpus",
        s(&corpus),
        "--save-index",
        s(&index),
        "--export-frequent",
        s(&frequent),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let loaded = strip("loaded", &["--load-index", s(&index)]);
    assert_eq!(data_lines(&loaded), data_lines(&exact));
    assert!(loaded.lines().any(|l| l == "# index=loaded"));
    let listed = strip("listed", &["--load-frequent", s(&frequent)]);
    assert_eq!(data_lines(&listed), data_lines(&exact));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus");
    fs::create_dir(&corpus).unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "backend = \"bloom\"\n").unwrap();
    let o = s(&dir.path().join("o")).to_string();
    let bad = boilerstrip(&["strip", "--config", s(&cfg), "--corpus", s(&corpus), "--out", &o]);
    assert_eq!(bad.status.code(), Some(2));
    let fixed = boilerstrip(&["strip", "--config", s(&cfg), "--backend", "crc64", "--corpus", s(&corpus), "--out", &o]);
    assert!(fixed.status.success(), "{}", String::from_utf8_lossy(&fixed.stderr));
    let report = fs::read_to_string(dir.path().join("o/reports.tsv")).unwrap();
    assert!(report.lines().any(|l| l == "# backend=crc64"));
}

#[test]
fn analyze_emits_single_header_csv() {
    let cases: [&[&str]; 4] = [
        &["analyze", "prop1", "--p", "0.25", "--n", "10"],
        &["analyze", "overshoot", "--p", "0.2", "--gap-max", "10"],
        &["analyze", "fp-bounds", "--n", "3400001", "--c", "8388608", "--p", "0.001"],
        &["analyze", "zipf-gm", "--x", "0", "--trials", "2"],
    ];
    for args in cases {
        let out = boilerstrip(args);
        assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        let text = String::from_utf8(out.stdout).unwrap();
        let mut lines = text.lines();
        let header = lines.next().unwrap();
        let width = header.split(',').count();
        for row in lines {
            assert_eq!(row.split(',').count(), width, "{args:?}: {row}");
        }
    }
    let prop1 = String::from_utf8(boilerstrip(cases[0]).stdout).unwrap();
    assert!(prop1.lines().nth(1).unwrap().starts_with("0.25,10,1398100,"), "{prop1}");
}
