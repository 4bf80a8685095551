//! End-to-end checks of the `bmine` binary: artifact bytes, stdout
//! contracts, and exit codes, all run against the compiled executable.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::tempdir;

fn bmine() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bmine"))
}

fn read(path: &Path) -> String {
    fs::read_to_string(path).unwrap_or_else(|e| panic!("reading {}: {e}", path.display()))
}

fn assert_ok(out: &Output) {
    assert!(
        out.status.success(),
        "command failed with {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
}

/// Plants an unmistakable dense group on a sparse background and returns
/// the edge-list and label paths.
fn inject_fixture(dir: &Path, seed: u64) -> (std::path::PathBuf, std::path::PathBuf) {
    let edges = dir.join("edges.tsv");
    let labels = dir.join("labels.tsv");
    let out = bmine()
        .args(["inject", "--sources", "300", "--targets", "100"])
        .args(["--edge-prob", "0.05", "--fraud-sources", "40", "--fraud-targets", "10"])
        .args(["--seed", &seed.to_string()])
        .arg("--out")
        .arg(&edges)
        .arg("--labels-out")
        .arg(&labels)
        .output()
        .unwrap();
    assert_ok(&out);
    (edges, labels)
}

#[test]
fn solve_mhibp_writes_each_biclique_as_a_json_line() {
    let dir = tempdir().unwrap();
    let edges = dir.path().join("edges.tsv");
    fs::write(&edges, "b\t2\na\t1\nb\t1\na\t2\n").unwrap();
    let bic = dir.path().join("bicliques.jsonl");
    let out = bmine()
        .arg("solve-mhibp")
        .arg("--edges")
        .arg(&edges)
        .arg("--out")
        .arg(&bic)
        .output()
        .unwrap();
    assert_ok(&out);
    // {a, b} x {1, 2} covers the whole graph, so it is the only answer.
    assert_eq!(read(&bic), "{\"sources\":[\"b\",\"a\"],\"targets\":[\"2\",\"1\"]}\n");
}

#[test]
fn detect_reruns_are_byte_identical_and_cover_every_source() {
    let dir = tempdir().unwrap();
    let (edges, _) = inject_fixture(dir.path(), 11);
    let first = dir.path().join("first.tsv");
    let second = dir.path().join("second.tsv");
    for out_path in [&first, &second] {
        let out = bmine()
            .arg("detect")
            .arg("--edges")
            .arg(&edges)
            .arg("--out")
            .arg(out_path)
            .output()
            .unwrap();
        assert_ok(&out);
    }
    let ranking = read(&first);
    assert_eq!(ranking, read(&second), "same input must give the same bytes");
    let names: std::collections::BTreeSet<&str> = ranking
        .lines()
        .map(|line| line.split_once('\t').expect("label<TAB>score").0)
        .collect();
    // Every source present in the edge file gets a score, planted or not.
    let edge_text = read(&edges);
    let in_file: std::collections::BTreeSet<&str> =
        edge_text.lines().map(|line| line.split_once('\t').unwrap().0).collect();
    assert_eq!(names, in_file);
    assert!(names.contains("fs39"), "full-density plants always have edges");
}

#[test]
fn inject_is_reproducible_for_a_fixed_seed() {
    let one = tempdir().unwrap();
    let two = tempdir().unwrap();
    let (e1, l1) = inject_fixture(one.path(), 42);
    let (e2, l2) = inject_fixture(two.path(), 42);
    assert_eq!(read(&e1), read(&e2));
    assert_eq!(read(&l1), read(&l2));

    // The ground truth covers exactly the sources the edge file carries.
    let labels = read(&l1);
    let labeled: std::collections::BTreeSet<&str> =
        labels.lines().map(|l| l.split_once('\t').unwrap().0).collect();
    let edge_text = read(&e1);
    let in_file: std::collections::BTreeSet<&str> =
        edge_text.lines().map(|l| l.split_once('\t').unwrap().0).collect();
    assert_eq!(labeled, in_file);
    assert!(labels.lines().any(|l| l == "fs0\t1"));
    assert!(labels.lines().any(|l| l == "s0\t0"));

    let other = tempdir().unwrap();
    let (e3, _) = inject_fixture(other.path(), 43);
    assert_ne!(read(&e1), read(&e3), "a different seed draws a different graph");
}

#[test]
fn eval_prints_auc_and_best_f1_on_stdout() {
    let dir = tempdir().unwrap();
    let ranking = dir.path().join("ranking.tsv");
    let labels = dir.path().join("labels.tsv");
    fs::write(&ranking, "s1\t3\ns2\t2\ns3\t1\n").unwrap();
    fs::write(&labels, "s1\t1\ns2\t0\ns3\t1\n").unwrap();
    let out = bmine()
        .arg("eval")
        .arg("--ranking")
        .arg(&ranking)
        .arg("--labels")
        .arg(&labels)
        .output()
        .unwrap();
    assert_ok(&out);
    assert_eq!(String::from_utf8_lossy(&out.stdout), "auc\t0.5\nbest_f1\t0.8\n");
}

#[test]
fn pipeline_recovers_an_easy_planted_group() {
    let dir = tempdir().unwrap();
    // Seed 11 leaves some background sources isolated, so this also checks
    // that the written ground truth stays joinable with a file-born ranking.
    let (edges, labels) = inject_fixture(dir.path(), 11);
    let ranking = dir.path().join("ranking.tsv");
    let out = bmine()
        .arg("detect")
        .arg("--edges")
        .arg(&edges)
        .arg("--out")
        .arg(&ranking)
        .output()
        .unwrap();
    assert_ok(&out);
    let out = bmine()
        .arg("eval")
        .arg("--ranking")
        .arg(&ranking)
        .arg("--labels")
        .arg(&labels)
        .output()
        .unwrap();
    assert_ok(&out);
    let stdout = String::from_utf8_lossy(&out.stdout).into_owned();
    let metric = |name: &str| -> f64 {
        stdout
            .lines()
            .find_map(|l| l.strip_prefix(&format!("{name}\t")))
            .unwrap_or_else(|| panic!("no {name} line in {stdout:?}"))
            .parse()
            .unwrap()
    };
    assert!(metric("auc") >= 0.99, "full-density group should stand out: {stdout}");
    assert!(metric("best_f1") >= 0.99, "full-density group should stand out: {stdout}");
}

#[test]
fn forest_reruns_are_byte_identical() {
    let dir = tempdir().unwrap();
    let kdata = dir.path().join("accounts.csv");
    let modes = dir.path().join("modes.tsv");
    fs::write(&kdata, "id,d1,d2\nu1,a,x\nu2,a,x\nu3,b,y\n").unwrap();
    fs::write(&modes, "d1\tarbg\nd2\tarbg\n").unwrap();
    let first = dir.path().join("first.tsv");
    let second = dir.path().join("second.tsv");
    for out_path in [&first, &second] {
        let out = bmine()
            .arg("forest")
            .arg("--kdata")
            .arg(&kdata)
            .arg("--modes")
            .arg(&modes)
            .arg("--out")
            .arg(out_path)
            .output()
            .unwrap();
        assert_ok(&out);
    }
    let scores = read(&first);
    assert_eq!(scores, read(&second));
    assert_eq!(scores.lines().count(), 3, "one score per row: {scores:?}");
    // u1 and u2 agree on both attributes, so they tie above the singleton.
    let of = |id: &str| -> f64 {
        scores
            .lines()
            .find_map(|l| l.strip_prefix(&format!("{id}\t")))
            .unwrap()
            .parse()
            .unwrap()
    };
    assert_eq!(of("u1"), of("u2"));
    assert!(of("u1") > of("u3"));
}

#[test]
fn bench_writes_one_csv_row_per_fraction() {
    let dir = tempdir().unwrap();
    let (edges, _) = inject_fixture(dir.path(), 5);
    let csv_path = dir.path().join("timings.csv");
    let out = bmine()
        .arg("bench")
        .arg("--edges")
        .arg(&edges)
        .args(["--fractions", "0.5..1.0", "--seed", "1"])
        .arg("--out")
        .arg(&csv_path)
        .output()
        .unwrap();
    assert_ok(&out);
    let csv = read(&csv_path);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("edge_count,build_ms"));
    let counts: Vec<usize> = lines
        .map(|l| l.split(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(counts.len(), 6, "0.5 through 1.0 in tenths: {csv:?}");
    assert!(counts.windows(2).all(|w| w[0] < w[1]), "nested subsamples grow: {csv:?}");

    let out = bmine()
        .arg("bench")
        .arg("--edges")
        .arg(&edges)
        .args(["--fractions", "0.25,0.75", "--seed", "1"])
        .arg("--out")
        .arg(&csv_path)
        .output()
        .unwrap();
    assert_ok(&out);
    assert_eq!(read(&csv_path).lines().count(), 3, "header plus two fractions");
}

#[test]
fn usage_errors_exit_with_code_2() {
    let dir = tempdir().unwrap();
    let edges = dir.path().join("edges.tsv");
    fs::write(&edges, "a\t1\n").unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["detect", "--out", "r.tsv"],
        vec!["detect", "--edges", edges.to_str().unwrap(), "--mode", "bogus", "--out", "r.tsv"],
        vec![
            "inject", "--sources", "10", "--targets", "5", "--edge-prob", "0.5",
            "--fraud-sources", "2", "--fraud-targets", "2", "--camouflage-degree", "3",
            "--seed", "1", "--out", "g.tsv", "--labels-out", "y.tsv",
        ],
        vec!["bench", "--edges", edges.to_str().unwrap(), "--fractions", "1.5", "--seed", "1", "--out", "t.csv"],
        vec!["bench", "--edges", edges.to_str().unwrap(), "--reps", "2", "--seed", "1", "--out", "t.csv"],
    ];
    for args in cases {
        let out = bmine().args(&args).current_dir(dir.path()).output().unwrap();
        assert_eq!(out.status.code(), Some(2), "{args:?} should be a usage error");
    }
}

#[test]
fn data_errors_exit_with_code_1_and_one_stderr_line() {
    let dir = tempdir().unwrap();
    let malformed = dir.path().join("broken.tsv");
    fs::write(&malformed, "a\t1\nno-tab-here\n").unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["detect", "--edges", "does-not-exist.tsv", "--out", "r.tsv"],
        vec!["detect", "--edges", malformed.to_str().unwrap(), "--out", "r.tsv"],
    ];
    for args in cases {
        let out = bmine().args(&args).current_dir(dir.path()).output().unwrap();
        assert_eq!(out.status.code(), Some(1), "{args:?} should be a data error");
        let stderr = String::from_utf8_lossy(&out.stderr).into_owned();
        assert_eq!(stderr.lines().count(), 1, "one diagnostic line: {stderr:?}");
        assert!(stderr.starts_with("bmine: "), "named diagnostic: {stderr:?}");
    }
}

#[test]
fn logging_goes_to_stderr_and_never_changes_artifacts() {
    let dir = tempdir().unwrap();
    let (edges, _) = inject_fixture(dir.path(), 3);
    let quiet = dir.path().join("quiet.tsv");
    let chatty = dir.path().join("chatty.tsv");
    let out = bmine()
        .arg("detect")
        .arg("--edges")
        .arg(&edges)
        .arg("--out")
        .arg(&quiet)
        .output()
        .unwrap();
    assert_ok(&out);
    assert!(out.stderr.is_empty(), "silent by default: {:?}", String::from_utf8_lossy(&out.stderr));

    let out = bmine()
        .arg("detect")
        .arg("--edges")
        .arg(&edges)
        .arg("--out")
        .arg(&chatty)
        .env("BM_LOG", "info")
        .output()
        .unwrap();
    assert_ok(&out);
    assert!(out.stdout.is_empty(), "diagnostics stay off stdout");
    let stderr = String::from_utf8_lossy(&out.stderr).into_owned();
    assert!(stderr.contains("INFO") && stderr.contains("edges"), "progress lines: {stderr:?}");
    assert_eq!(read(&quiet), read(&chatty), "logging must not perturb results");
}
