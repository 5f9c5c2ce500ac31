use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn etdq(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_etdq")).current_dir(dir).args(args).output().unwrap()
}

fn bench(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data/benchmark").join(name).to_str().unwrap().to_string()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn missing_config_is_fatal() {
    let d = tempfile::tempdir().unwrap();
    let out = etdq(d.path(), &["--config", "nope.json", "detect", "--input", &bench("records.csv"), "--output", "d.jsonl"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!d.path().join("d.jsonl").exists());
}

#[test]
fn bad_threshold_is_fatal() {
    let d = tempfile::tempdir().unwrap();
    let out = etdq(d.path(), &["--threshold", "1.5", "detect", "--input", &bench("records.csv"), "--output", "d.jsonl"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn rejected_rows_give_partial_status() {
    let d = tempfile::tempdir().unwrap();
    write(
        d.path(),
        "r.csv",
        "id,title,author,advisor,university,year,degree,department\n\
         a1,On Graphs,Jane Doe,,GT,2010,MS,Physics\n\
         ,No Id,John Roe,,GT,2011,MS,Physics\n\
         a1,Duplicate,John Roe,,GT,2011,MS,Physics\n",
    );
    let out = etdq(d.path(), &["fix", "--input", "r.csv", "--output", "f.csv"]);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
    let fixed = std::fs::read_to_string(d.path().join("f.csv")).unwrap();
    assert_eq!(fixed.lines().count(), 2);
    assert!(fixed.contains("Georgia Institute of Technology"));
}

#[test]
fn locked_journal_and_unknown_id() {
    let d = tempfile::tempdir().unwrap();
    let ok = etdq(d.path(), &["--journal", "j.jsonl", "ingest", "--input", &bench("records.csv")]);
    assert_eq!(ok.status.code(), Some(0));
    let unknown = etdq(d.path(), &["--journal", "j.jsonl", "history", "--id", "nope"]);
    assert_eq!(unknown.status.code(), Some(2));
    let bad_version = etdq(d.path(), &["--journal", "j.jsonl", "rollback", "--id", "etd0001", "--version", "9"]);
    assert_eq!(bad_version.status.code(), Some(2));
    write(d.path(), "j.jsonl.lock", "");
    let busy = etdq(d.path(), &["--journal", "j.jsonl", "rollback", "--id", "etd0001", "--version", "1"]);
    assert_eq!(busy.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&busy.stderr).contains("lock"));
}

#[test]
fn jsonl_round_trip_matches_csv() {
    let d = tempfile::tempdir().unwrap();
    let oracle = bench("oracle.jsonl");
    for out in ["a.csv", "b.jsonl"] {
        let o = etdq(d.path(), &["fix", "--input", &bench("records.csv"), "--output", out, "--oracle", &oracle]);
        assert_eq!(o.status.code(), Some(0));
    }
    let o = etdq(d.path(), &["fix", "--input", "b.jsonl", "--output", "c.csv", "--oracle", &oracle]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(std::fs::read(d.path().join("a.csv")).unwrap(), std::fs::read(d.path().join("c.csv")).unwrap());
}

#[test]
fn unmatched_labels_give_partial_status() {
    let d = tempfile::tempdir().unwrap();
    let o = etdq(d.path(), &["fix", "--input", &bench("records.csv"), "--output", "f.csv"]);
    assert_eq!(o.status.code(), Some(0));
    let labels = std::fs::read_to_string(bench("labels.csv")).unwrap();
    let header = labels.lines().next().unwrap();
    let extra = format!("{labels}ghost,year,2001,missing\n");
    assert!(header.starts_with("record_id"), "{header}");
    write(d.path(), "labels.csv", &extra);
    let e = etdq(d.path(), &["evaluate", "--predictions", "f.predictions.jsonl", "--gold", "labels.csv", "--output", "rep"]);
    assert_eq!(e.status.code(), Some(1), "{}", String::from_utf8_lossy(&e.stderr));
    assert!(d.path().join("rep/report.json").exists());
}
