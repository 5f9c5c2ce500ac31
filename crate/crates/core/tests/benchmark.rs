use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use etd_quality::detection::{diagnose_record, ErrorKind};
use etd_quality::ecc::{apply_ecc, MapOracle};
use etd_quality::evaluation::benchmark::{generate_standard, standard_distribution, write_benchmark, BENCHMARK_FILES, STANDARD_SEED};
use etd_quality::evaluation::{read_labels, EvalReport, Prediction};
use etd_quality::io::read_csv;
use etd_quality::{FieldKey, Resources};

fn shipped() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data/benchmark")
}

fn run(res: &Resources) -> (Vec<Prediction>, EvalReport) {
    let (records, errors) = read_csv(File::open(shipped().join("records.csv")).unwrap()).unwrap();
    assert!(errors.is_empty());
    let labels = read_labels(File::open(shipped().join("labels.csv")).unwrap()).unwrap();
    let preds: Vec<Prediction> = records
        .iter()
        .map(|r| {
            let diagnoses = diagnose_record(r, res);
            let out = apply_ecc(r, &diagnoses, res);
            Prediction {
                record_id: r.id.clone(),
                diagnoses,
                actions: out.actions,
                unresolved: out.unresolved,
                record: out.record,
            }
        })
        .collect();
    let report = EvalReport::evaluate(&preds, &labels);
    (preds, report)
}

fn resources() -> Resources {
    let oracle = MapOracle::parse_jsonl(BufReader::new(File::open(shipped().join("oracle.jsonl")).unwrap())).unwrap();
    Resources::bundled().unwrap().with_oracle(Box::new(oracle))
}

#[test]
fn regeneration_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let b = generate_standard(STANDARD_SEED, &Resources::bundled().unwrap()).unwrap();
    write_benchmark(dir.path(), &b).unwrap();
    for name in BENCHMARK_FILES {
        let a = std::fs::read(dir.path().join(name)).unwrap();
        let s = std::fs::read(shipped().join(name)).unwrap();
        assert!(a == s, "{name} differs from the shipped copy");
    }
}

#[test]
fn pipeline_on_shipped_benchmark() {
    let res = resources();
    let (preds, report) = run(&res);
    let mut canonical: BTreeMap<FieldKey, usize> = BTreeMap::new();
    let mut missing: BTreeMap<FieldKey, usize> = BTreeMap::new();
    for p in &preds {
        let mut fields: Vec<FieldKey> = p.actions.iter().filter(|a| a.kind.is_canonicalization()).map(|a| a.field).collect();
        fields.dedup();
        for f in fields {
            *canonical.entry(f).or_default() += 1;
        }
        for d in p.diagnoses.iter().filter(|d| d.kind == ErrorKind::Missing) {
            *missing.entry(d.field).or_default() += 1;
        }
    }
    eprintln!("{}", etd_quality::evaluation::benchmark_report(&report.fields).unwrap());
    eprintln!("{:?}", report.kind_confusion);
    for (f, c) in standard_distribution() {
        assert_eq!(canonical.get(&f).copied().unwrap_or(0), c.canonical, "canonical {f}");
        assert_eq!(missing.get(&f).copied().unwrap_or(0), c.missing, "missing {f}");
    }
    for f in [FieldKey::University, FieldKey::Degree, FieldKey::Year] {
        assert_eq!(report.row(f).unwrap().ed.f1, 1.0, "{f}");
    }
    for f in [FieldKey::Degree, FieldKey::Department, FieldKey::Year, FieldKey::Advisor] {
        assert!(report.row(f).unwrap().ecc.f1 >= 0.95, "{f}");
    }
    assert!(report.row(FieldKey::University).unwrap().ecc.f1 >= 0.85);
    let author = report.row(FieldKey::Author).unwrap().ecc;
    assert_eq!((author.precision, author.recall, author.f1), (0.0, 0.0, 0.0));
}

#[test]
fn second_pass_changes_nothing() {
    let res = resources();
    let (preds, _) = run(&res);
    for p in preds {
        let again = apply_ecc(&p.record, &diagnose_record(&p.record, &res), &res);
        assert_eq!(again.record, p.record, "{}", p.record_id);
    }
}
