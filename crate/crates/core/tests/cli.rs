use std::path::Path;
use std::process::{Command, Output};

use l2disc::cli::io::read_points;
use l2disc::cli::record::RunRecord;

fn l2disc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_l2disc")).args(args).output().unwrap()
}

fn record(out: &Output) -> RunRecord {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).display().to_string()
}

#[test]
fn gen_examples() {
    let dir = tempfile::tempdir().unwrap();
    let sob = path(dir.path(), "s.csv");
    let rec = record(&l2disc(&["gen", "--kind", "sobol", "--n", "16", "--d", "2", "--out", &sob]));
    assert_eq!((rec.n, rec.d), (Some(16), Some(2)));
    let set = read_points(Path::new(&sob)).unwrap();
    assert_eq!(set.len(), 16);
    assert_eq!(set.row(1), &[0.5, 0.5]);

    let a = path(dir.path(), "a.csv");
    let b = path(dir.path(), "b.csv");
    record(&l2disc(&["gen", "--kind", "iid", "--n", "8", "--d", "3", "--seed", "1", "--out", &a]));
    record(&l2disc(&["gen", "--kind", "iid", "--n", "8", "--d", "3", "--seed", "1", "--out", &b]));
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let pt = path(dir.path(), "p.csv");
    record(&l2disc(&["gen", "--kind", "point", "--point", "0.5,0.5", "--n", "4", "--out", &pt]));
    let set = read_points(Path::new(&pt)).unwrap();
    assert!(set.rows().all(|r| r == [0.5, 0.5]) && set.len() == 4);
}

#[test]
fn disc_examples() {
    let dir = tempfile::tempdir().unwrap();
    let ones = path(dir.path(), "ones.csv");
    record(&l2disc(&["gen", "--kind", "point", "--point", "1,1", "--n", "5", "--out", &ones]));
    let star = record(&l2disc(&["disc", "--measure", "star", "--in", &ones]));
    assert!((star.squared.unwrap() - 1.0 / 9.0).abs() < 1e-15);
    assert_eq!(star.root, Some(star.squared.unwrap().sqrt()));

    // asd at (1, 1): per coordinate the constant is 1/3, the point term
    // averages (1 - x^2)/2 and (1 - (1 - x)^2)/2 to 1/4, and the diagonal
    // averages 1 - x and x to 1/2.
    let asd = record(&l2disc(&["disc", "--measure", "asd", "--in", &ones]));
    let expected = 1.0 / 9.0 - 2.0 / 16.0 + 0.25;
    assert!((asd.squared.unwrap() - expected).abs() < 1e-15, "{:?}", asd.squared);

    let single = path(dir.path(), "single.csv");
    std::fs::write(&single, "x1\n0.3\n").unwrap();
    let ext = record(&l2disc(&["disc", "--measure", "ext", "--in", &single]));
    assert!((ext.squared.unwrap() - 1.0 / 12.0).abs() < 1e-15);
}

#[test]
fn validation_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = path(dir.path(), "bad.csv");
    std::fs::write(&bad, "x1,x2\n0.1,0.2\n0.3,1.5\n").unwrap();
    let out = l2disc(&["disc", "--measure", "star", "--in", &bad]);
    assert_eq!(out.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("line 3") && msg.contains("x2"), "{msg}");

    let ok = path(dir.path(), "ok.csv");
    std::fs::write(&ok, "x1,x2\n0.1,0.2\n").unwrap();
    assert_eq!(l2disc(&["disc", "--measure", "sym_weighted", "--in", &ok]).status.code(), Some(2));
    assert_eq!(l2disc(&["disc", "--measure", "star", "--gamma", "1,2", "--in", &ok]).status.code(), Some(2));
    assert_eq!(l2disc(&["disc", "--measure", "nope", "--in", &ok]).status.code(), Some(2));
    let out = path(dir.path(), "o.csv");
    assert_eq!(l2disc(&["optimize", "--measure", "cad", "--in", &ok, "--out", &out]).status.code(), Some(2));
}

#[test]
fn missed_target_exits_with_4_but_keeps_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path(), "opt.csv");
    let run = l2disc(&[
        "optimize", "--measure", "star", "--n", "8", "--d", "2", "--restarts", "1", "--iters", "200", "--out", &out, "--target", "1e-6",
    ]);
    assert_eq!(run.status.code(), Some(4));
    let rec: RunRecord = serde_json::from_slice(&run.stdout).unwrap();
    assert!(rec.root.unwrap() > 1e-6);
    assert!(Path::new(&out).is_file());
    assert!(dir.path().join("opt.trace.json").is_file());
}

#[test]
fn greedy_and_trace_files() {
    let dir = tempfile::tempdir().unwrap();
    let start = path(dir.path(), "c.csv");
    std::fs::write(&start, "x1,x2\n0.5,0.5\n").unwrap();
    let out = path(dir.path(), "g.csv");
    let rec = record(&l2disc(&[
        "greedy", "--measure", "star", "--in", &start, "--steps", "3", "--batch", "4", "--grid-k", "17", "--out", &out,
    ]));
    assert_eq!(rec.n, Some(13));
    let trace: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("g.trace.json")).unwrap()).unwrap();
    let best: Vec<f64> = serde_json::from_value(trace["best"].clone()).unwrap();
    assert_eq!(best.len(), 3);
    assert!(best.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn pathology_and_crosseval_files() {
    let dir = tempfile::tempdir().unwrap();
    let table = path(dir.path(), "t1.csv");
    record(&l2disc(&["pathology", "--d-max", "2", "--samples", "0", "--out", &table]));
    let text = std::fs::read_to_string(&table).unwrap();
    assert_eq!(text.lines().count(), 1 + 2 * 8);
    let per = text.lines().find(|l| l.starts_with("per,1,")).unwrap();
    assert!(per.contains("mismatch"), "{per}");

    let sets = dir.path().join("sets");
    for m in ["star", "asd", "per"] {
        let out = sets.join(format!("{m}.csv")).display().to_string();
        record(&l2disc(&["optimize", "--measure", m, "--n", "8", "--d", "2", "--restarts", "2", "--iters", "2000", "--out", &out]));
    }
    let ratios = path(dir.path(), "r.csv");
    record(&l2disc(&["crosseval", "--in", &sets.display().to_string(), "--out", &ratios]));
    let text = std::fs::read_to_string(&ratios).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("evaluated,star,per,asd"));
    for (i, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields[i + 1], "1");
    }
}
