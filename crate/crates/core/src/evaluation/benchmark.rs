//! Synthetic records and the shipped benchmark whose error counts follow
//! the published error distribution (500 records).

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::noise::typo;
use super::{write_labels, GoldLabel};
use crate::detection::{detect_department, detect_title, ErrorKind};
use crate::dictionaries::{bundled, DictEntry, Match};
use crate::ecc::{spell_fix_department, strip_department_boilerplate, MapOracle};
use crate::error::{Error, Result};
use crate::io::write_csv;
use crate::model::{normalize_surface, EtdRecord, FieldKey, FieldValue};
use crate::resources::Resources;

pub const STANDARD_SEED: u64 = 2023;
pub const STANDARD_RECORDS: usize = 500;

const MIN_YEAR: i32 = 1995;
const MAX_YEAR: i32 = 2022;
const ROLES: [&str; 6] = ["Chair", "Co-Chair", "Committee Member", "Advisor", "Co-Advisor", "Director"];
const VARIANT_FORMS: [&str; 4] = ["Department of {}", "Dept of {}", "{} Department", "Dept. of {}"];
const DEPARTMENT_VARIANTS: usize = 20;
const MAX_DRAWS: usize = 200;

/// Error counts for one field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct FieldCounts {
    pub missing: usize,
    pub canonical: usize,
    pub spell: usize,
    pub incorrect: usize,
}

pub type ErrorDistribution = BTreeMap<FieldKey, FieldCounts>;

/// Per-field counts of the published distribution.
pub fn standard_distribution() -> ErrorDistribution {
    use FieldKey::*;
    let c = |missing, canonical, spell, incorrect| FieldCounts {
        missing,
        canonical,
        spell,
        incorrect,
    };
    BTreeMap::from([
        (Title, c(0, 0, 0, 1)),
        (Author, c(2, 0, 0, 0)),
        (Advisor, c(150, 35, 0, 0)),
        (University, c(6, 43, 0, 0)),
        (Year, c(172, 1, 0, 0)),
        (Degree, c(156, 82, 0, 4)),
        (Department, c(269, 85, 2, 0)),
    ])
}

/// Missing values whose extracted replacement is itself an alias, so the
/// canonical count includes values inserted by the oracle.
fn oracle_aliases() -> BTreeMap<FieldKey, usize> {
    BTreeMap::from([(FieldKey::Degree, 12), (FieldKey::Department, 10)])
}

/// Fields the oracle cannot extract for corrupted records, as when the
/// extractor found nothing for them.
const WITHHELD: [FieldKey; 2] = [FieldKey::Title, FieldKey::Author];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkManifest {
    pub generator: String,
    pub seed: u64,
    pub records: usize,
    pub distribution: ErrorDistribution,
    pub oracle_aliases: BTreeMap<FieldKey, usize>,
    pub withheld_from_oracle: Vec<FieldKey>,
    pub files: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct Benchmark {
    pub gold: Vec<EtdRecord>,
    pub corrupted: Vec<EtdRecord>,
    pub labels: Vec<GoldLabel>,
    pub oracle: MapOracle,
    pub manifest: BenchmarkManifest,
}

pub const BENCHMARK_FILES: [&str; 5] = ["records.csv", "gold_records.csv", "labels.csv", "oracle.jsonl", "manifest.json"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Fill {
    Gold,
    Alias,
    Nothing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Plan {
    Clean,
    Missing(Fill),
    Alias,
    Variant,
    Role,
    DateFormat,
    Typo,
    Wrong,
    Junk,
}

impl Plan {
    fn label(self) -> Option<ErrorKind> {
        match self {
            Plan::Clean => None,
            Plan::Missing(_) => Some(ErrorKind::Missing),
            Plan::Alias | Plan::Variant | Plan::Role | Plan::DateFormat => Some(ErrorKind::NonCanonical),
            Plan::Typo => Some(ErrorKind::Misspelling),
            Plan::Wrong | Plan::Junk => Some(ErrorKind::IncorrectValue),
        }
    }
}

struct Pools<'a> {
    titles: Vec<&'static str>,
    given: Vec<&'static str>,
    surnames: Vec<&'static str>,
    res: &'a Resources,
}

impl<'a> Pools<'a> {
    fn new(res: &'a Resources) -> Self {
        let titles = bundled::titles()
            .into_iter()
            .filter(|t| detect_title(t, &res.title_model, &res.idf).is_none())
            .collect();
        Pools {
            titles,
            given: bundled::given_names(),
            surnames: bundled::surnames(),
            res,
        }
    }

    fn name(&self, rng: &mut ChaCha8Rng) -> String {
        for _ in 0..MAX_DRAWS {
            let mut parts = vec![self.given.choose(rng).expect("names").to_string()];
            if rng.gen_bool(0.3) {
                parts.push(format!("{}.", char::from(b'A' + rng.gen_range(0..26u8))));
            }
            parts.push(self.surnames.choose(rng).expect("names").to_string());
            if rng.gen_bool(0.03) {
                parts.push("Jr.".into());
            }
            let name = parts.join(" ");
            if self.res.judge.judge(&name).is_ok_and(|j| j.all_person()) {
                return name;
            }
        }
        panic!("name lists yield no person names");
    }

    fn year(&self, rng: &mut ChaCha8Rng, full: bool) -> String {
        let y = rng.gen_range(MIN_YEAR..=MAX_YEAR);
        if full || rng.gen_bool(0.4) {
            let m = rng.gen_range(1..=12u8);
            let d = rng.gen_range(1..=crate::ecc::dates::days_in_month(y, m));
            format!("{y:04}-{m:02}-{d:02}")
        } else {
            format!("{y:04}")
        }
    }
}

fn has_aliases(e: &DictEntry) -> bool {
    !e.aliases.is_empty()
}

/// The canonical name carries no boilerplate, so "Department of X" strips
/// back to exactly X.
fn variant_ok(e: &DictEntry) -> bool {
    strip_department_boilerplate(&e.canonical) == normalize_surface(&e.canonical)
}

fn entry<'d>(entries: &'d [DictEntry], rng: &mut ChaCha8Rng, ok: impl Fn(&DictEntry) -> bool) -> &'d DictEntry {
    let pool: Vec<&DictEntry> = entries.iter().filter(|e| ok(e)).collect();
    pool.choose(rng).expect("dictionary has eligible entries")
}

/// A typo the spell checker flags and undoes exactly.
fn correctable_typo(canonical: &str, res: &Resources, rng: &mut ChaCha8Rng) -> Option<String> {
    for _ in 0..8 {
        let t = typo(canonical, &res.words, rng)?;
        let flagged = detect_department(&t, &res.departments, &res.words)
            .iter()
            .any(|d| d.kind == ErrorKind::Misspelling);
        let fixed = spell_fix_department(&t, &res.words);
        if flagged && fixed.as_deref() == Some(canonical) && res.departments.lookup(&t) == Match::NotFound {
            return Some(t);
        }
    }
    None
}

struct Cell {
    gold: String,
    shown: Option<String>,
    oracle: Option<String>,
}

fn sentinel_or_none(rng: &mut ChaCha8Rng) -> Option<String> {
    match rng.gen_range(0..20) {
        0 | 1 => Some("N/A".into()),
        2 => Some("null".into()),
        _ => None,
    }
}

fn make_cell(field: FieldKey, plan: Plan, p: &Pools, rng: &mut ChaCha8Rng) -> Cell {
    let res = p.res;
    let dict = |f: FieldKey| match f {
        FieldKey::University => res.universities.entries(),
        FieldKey::Degree => res.degrees.entries(),
        _ => res.departments.entries(),
    };
    let needs_alias = matches!(plan, Plan::Alias | Plan::Missing(Fill::Alias));
    let (gold, alias): (String, Option<String>) = match field {
        FieldKey::Title => (p.titles.choose(rng).expect("titles").to_string(), None),
        FieldKey::Author | FieldKey::Advisor => (p.name(rng), None),
        FieldKey::Year => (p.year(rng, plan == Plan::DateFormat), None),
        FieldKey::University | FieldKey::Degree | FieldKey::Department => {
            let e = match plan {
                Plan::Variant => entry(dict(field), rng, variant_ok),
                _ if needs_alias => entry(dict(field), rng, has_aliases),
                _ => entry(dict(field), rng, |_| true),
            };
            let alias = e.aliases.choose(rng).cloned();
            (e.canonical.clone(), alias)
        }
    };
    let shown = match plan {
        Plan::Clean | Plan::Wrong | Plan::Typo | Plan::Junk => Some(gold.clone()),
        Plan::Missing(_) => sentinel_or_none(rng),
        Plan::Alias => alias.clone(),
        Plan::Variant => Some(VARIANT_FORMS.choose(rng).expect("forms").replace("{}", &gold)),
        Plan::Role => Some(format!("{gold}, {}", ROLES.choose(rng).expect("roles"))),
        Plan::DateFormat => {
            let (y, rest) = gold.split_at(4);
            let md = &rest[1..];
            Some(format!("{md}-{y}"))
        }
    };
    let oracle = match plan {
        Plan::Missing(Fill::Alias) => alias,
        Plan::Missing(Fill::Nothing) => None,
        _ => Some(gold.clone()),
    };
    Cell { gold, shown, oracle }
}

/// Assigns disjoint record sets to each corruption of each field.
fn plan_table(n: usize, dist: &ErrorDistribution, rng: &mut ChaCha8Rng) -> Result<BTreeMap<FieldKey, Vec<Plan>>> {
    let aliases = oracle_aliases();
    let mut out = BTreeMap::new();
    for field in FieldKey::ALL {
        let c = dist.get(&field).copied().unwrap_or_default();
        let from_oracle = aliases.get(&field).copied().unwrap_or(0).min(c.missing).min(c.canonical);
        let fill = if WITHHELD.contains(&field) { Fill::Nothing } else { Fill::Gold };
        let mut plans: Vec<Plan> = Vec::new();
        plans.extend(std::iter::repeat(Plan::Missing(Fill::Alias)).take(from_oracle));
        plans.extend(std::iter::repeat(Plan::Missing(fill)).take(c.missing - from_oracle));
        let present = c.canonical - from_oracle;
        match field {
            FieldKey::Advisor => plans.extend(std::iter::repeat(Plan::Role).take(present)),
            FieldKey::Year => plans.extend(std::iter::repeat(Plan::DateFormat).take(present)),
            FieldKey::Department => {
                let v = DEPARTMENT_VARIANTS.min(present);
                plans.extend(std::iter::repeat(Plan::Variant).take(v));
                plans.extend(std::iter::repeat(Plan::Alias).take(present - v));
            }
            FieldKey::University | FieldKey::Degree => plans.extend(std::iter::repeat(Plan::Alias).take(present)),
            _ if present > 0 => {
                return Err(Error::Config(format!("{field} values have no canonical form")));
            }
            _ => {}
        }
        if c.spell > 0 && field != FieldKey::Department {
            return Err(Error::Config(format!("misspellings are only generated for department, not {field}")));
        }
        plans.extend(std::iter::repeat(Plan::Typo).take(c.spell));
        let wrong = match field {
            FieldKey::Title => Plan::Junk,
            FieldKey::Degree => Plan::Wrong,
            _ if c.incorrect > 0 => {
                return Err(Error::Config(format!("incorrect values are not generated for {field}")));
            }
            _ => Plan::Wrong,
        };
        plans.extend(std::iter::repeat(wrong).take(c.incorrect));
        if plans.len() > n {
            return Err(Error::Config(format!("{field}: {} corruptions exceed {n} records", plans.len())));
        }
        plans.resize(n, Plan::Clean);
        plans.shuffle(rng);
        out.insert(field, plans);
    }
    Ok(out)
}

fn record_id(i: usize) -> String {
    format!("etd{:04}", i + 1)
}

fn junk_title(p: &Pools, rng: &mut ChaCha8Rng) -> String {
    let res = p.res;
    let flagged = |t: &str| detect_title(t, &res.title_model, &res.idf).is_some();
    if flagged("DMA Recitals") {
        return "DMA Recitals".into();
    }
    let vocab: Vec<&str> = p.titles.iter().flat_map(|t| t.split(' ')).collect();
    crate::detection::title::synthesize_junk_titles(MAX_DRAWS, rng, &vocab)
        .into_iter()
        .find(|t| flagged(t))
        .expect("some synthesized junk title is flagged")
}

fn build(n: usize, plans: &BTreeMap<FieldKey, Vec<Plan>>, res: &Resources, rng: &mut ChaCha8Rng) -> Result<Benchmark> {
    let pools = Pools::new(res);
    let mut gold = Vec::with_capacity(n);
    let mut corrupted = Vec::with_capacity(n);
    let mut labels = Vec::new();
    let mut oracle = MapOracle::default();
    for i in 0..n {
        let id = record_id(i);
        let mut g = EtdRecord::new(id.clone())?;
        let mut c = EtdRecord::new(id.clone())?;
        let mut extracted = BTreeMap::new();
        for field in FieldKey::ALL {
            let plan = plans[&field][i];
            let mut cell = make_cell(field, plan, &pools, rng);
            if plan == Plan::Typo {
                let mut tries = 0;
                loop {
                    if let Some(t) = correctable_typo(&cell.gold, res, rng) {
                        cell.shown = Some(t);
                        break;
                    }
                    tries += 1;
                    if tries > MAX_DRAWS {
                        return Err(Error::Config("no correctable department typo found".into()));
                    }
                    cell = make_cell(field, plan, &pools, rng);
                }
            }
            if plan == Plan::Junk {
                cell.shown = Some(junk_title(&pools, rng));
                cell.oracle = None;
            }
            g.set(field, FieldValue::original(cell.gold.clone()));
            if let Some(v) = &cell.shown {
                c.set(field, FieldValue::original(v.clone()));
            }
            if let Some(v) = cell.oracle {
                extracted.insert(field, v);
            }
            if let Some(kind) = plan.label() {
                labels.push(GoldLabel {
                    record_id: id.clone(),
                    field,
                    true_value: cell.gold,
                    error_kind: Some(kind),
                });
            }
        }
        gold.push(g);
        corrupted.push(c);
        oracle.insert(id, extracted);
    }
    // Wrong values are another record's department, absent from the field's dictionary.
    for i in 0..n {
        for field in FieldKey::ALL {
            if plans[&field][i] != Plan::Wrong {
                continue;
            }
            let d = if field == FieldKey::Degree { Some(&res.degrees) } else { None };
            let donor = (0..MAX_DRAWS).find_map(|_| {
                let j = rng.gen_range(0..n);
                let v = gold[j].raw(FieldKey::Department)?;
                let unknown = d.is_none_or(|d| d.lookup(v) == Match::NotFound);
                (j != i && unknown && Some(v) != gold[i].raw(field)).then(|| v.to_string())
            });
            let v = donor.ok_or_else(|| Error::Config(format!("no donor value for {field}")))?;
            corrupted[i].set(field, FieldValue::original(v));
        }
    }
    Ok(Benchmark {
        gold,
        corrupted,
        labels,
        oracle,
        manifest: BenchmarkManifest {
            generator: "standard".into(),
            seed: 0,
            records: n,
            distribution: BTreeMap::new(),
            oracle_aliases: oracle_aliases(),
            withheld_from_oracle: WITHHELD.to_vec(),
            files: BENCHMARK_FILES.iter().map(|s| s.to_string()).collect(),
        },
    })
}

/// Clean, canonical records: valid titles, plain names, dictionary
/// canonicals and ISO years.
pub fn generate_clean_records(n: usize, seed: u64, res: &Resources) -> Vec<EtdRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let plans: BTreeMap<FieldKey, Vec<Plan>> = FieldKey::ALL.into_iter().map(|k| (k, vec![Plan::Clean; n])).collect();
    build(n, &plans, res, &mut rng).expect("clean generation cannot fail").gold
}

/// Corrupted records, labels and a sidecar oracle following `dist`.
pub fn generate_benchmark(n: usize, dist: &ErrorDistribution, seed: u64, res: &Resources) -> Result<Benchmark> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let plans = plan_table(n, dist, &mut rng)?;
    let mut b = build(n, &plans, res, &mut rng)?;
    b.manifest.seed = seed;
    b.manifest.distribution = dist.clone();
    Ok(b)
}

pub fn generate_standard(seed: u64, res: &Resources) -> Result<Benchmark> {
    generate_benchmark(STANDARD_RECORDS, &standard_distribution(), seed, res)
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    let path = dir.join(name);
    File::create(&path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

/// Writes the five benchmark files into `dir`.
pub fn write_benchmark(dir: &Path, b: &Benchmark) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_csv(create(dir, "records.csv")?, &b.corrupted)?;
    write_csv(create(dir, "gold_records.csv")?, &b.gold)?;
    write_labels(create(dir, "labels.csv")?, &b.labels)?;
    let mut o = create(dir, "oracle.jsonl")?;
    b.oracle.write_jsonl(&mut o)?;
    o.flush().map_err(|e| Error::io(dir.join("oracle.jsonl"), e))?;
    let mut m = create(dir, "manifest.json")?;
    serde_json::to_writer_pretty(&mut m, &b.manifest)?;
    m.write_all(b"\n").and_then(|_| m.flush()).map_err(|e| Error::io(dir.join("manifest.json"), e))?;
    Ok(())
}
