//! Everything the detectors and correctors read, bundled together, plus the
//! JSON configuration that selects it.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::detection::{IdfTable, NameJudge, RuleJudge, TitleModel};
use crate::dictionaries::{bundled, AliasDictionary, WordFrequencyList, YearRange};
use crate::ecc::{open_oracle, CanonicalMatcher, DateOrder, ExtractionOracle, NoOracle, StrippedIndex};
use crate::error::{Error, Result};
use crate::model::MissingSentinels;

pub const DEFAULT_THRESHOLD: f64 = 0.90;

pub struct Resources {
    pub universities: AliasDictionary,
    pub degrees: AliasDictionary,
    pub departments: AliasDictionary,
    pub words: WordFrequencyList,
    pub years: YearRange,
    pub date_order: DateOrder,
    pub sentinels: MissingSentinels,
    pub title_model: TitleModel,
    pub idf: IdfTable,
    pub judge: Box<dyn NameJudge>,
    pub matcher: CanonicalMatcher,
    pub stripped: StrippedIndex,
    pub threshold: f64,
    pub oracle: Box<dyn ExtractionOracle>,
}

impl std::fmt::Debug for Resources {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Resources")
            .field("universities", &self.universities.len())
            .field("degrees", &self.degrees.len())
            .field("departments", &self.departments.len())
            .field("words", &self.words.len())
            .field("years", &self.years)
            .field("threshold", &self.threshold)
            .finish_non_exhaustive()
    }
}

/// Department canonical names plus every word in them, so the spell checker
/// never flags department vocabulary.
fn with_department_vocabulary(mut words: WordFrequencyList, departments: &AliasDictionary) -> WordFrequencyList {
    for e in departments.entries() {
        for t in crate::detection::department_tokens(&e.canonical) {
            if !words.contains(&t.1) {
                words.add(&t.1, 1);
            }
        }
    }
    words
}

impl Resources {
    /// Assembles resources from already loaded parts; derived indexes are built here.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        universities: AliasDictionary,
        degrees: AliasDictionary,
        departments: AliasDictionary,
        words: WordFrequencyList,
        title_model: TitleModel,
        idf: IdfTable,
    ) -> Result<Self> {
        let names: Vec<String> = departments.entries().iter().map(|e| e.canonical.clone()).collect();
        let matcher = CanonicalMatcher::trigram(names)?;
        let stripped = StrippedIndex::new(departments.entries().iter().map(|e| e.canonical.as_str()));
        let words = with_department_vocabulary(words, &departments);
        Ok(Resources {
            universities,
            degrees,
            departments,
            words,
            years: YearRange::default(),
            date_order: DateOrder::default(),
            sentinels: MissingSentinels::default(),
            title_model,
            idf,
            judge: Box::new(RuleJudge),
            matcher,
            stripped,
            threshold: DEFAULT_THRESHOLD,
            oracle: Box::new(NoOracle),
        })
    }

    /// Shipped dictionaries and model; IDF from the bundled title list.
    pub fn bundled() -> Result<Self> {
        Self::new(
            bundled::universities(),
            bundled::degrees(),
            bundled::departments(),
            bundled::words(),
            TitleModel::bundled(),
            IdfTable::from_titles(bundled::titles()),
        )
    }

    pub fn with_oracle(mut self, oracle: Box<dyn ExtractionOracle>) -> Self {
        self.oracle = oracle;
        self
    }

    pub fn with_idf(mut self, idf: IdfTable) -> Self {
        self.idf = idf;
        self
    }

    pub fn with_judge(mut self, judge: Box<dyn NameJudge>) -> Self {
        self.judge = judge;
        self
    }

    pub fn with_threshold(mut self, threshold: f64) -> Result<Self> {
        check_threshold(threshold)?;
        self.threshold = threshold;
        Ok(self)
    }
}

fn check_threshold(t: f64) -> Result<()> {
    if t > 0.0 && t <= 1.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("similarity threshold {t} outside (0, 1]")))
    }
}

fn default_threshold() -> f64 {
    DEFAULT_THRESHOLD
}

fn default_timeout() -> u64 {
    5000
}

/// Pipeline configuration file. Absent paths fall back to the bundled data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub universities: Option<PathBuf>,
    pub degrees: Option<PathBuf>,
    pub departments: Option<PathBuf>,
    pub words: Option<PathBuf>,
    pub oracle: Option<PathBuf>,
    pub journal: Option<PathBuf>,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    pub year_range: YearRange,
    pub date_order: DateOrder,
    pub missing_sentinels: MissingSentinels,
    pub title_model: Option<PathBuf>,
    /// Pre-built IDF table; without one, IDF comes from the input titles.
    pub idf: Option<PathBuf>,
    pub remote_judge_url: Option<String>,
    #[serde(default = "default_timeout")]
    pub remote_judge_timeout_ms: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            universities: None,
            degrees: None,
            departments: None,
            words: None,
            oracle: None,
            journal: None,
            threshold: DEFAULT_THRESHOLD,
            year_range: YearRange::default(),
            date_order: DateOrder::default(),
            missing_sentinels: MissingSentinels::default(),
            title_model: None,
            idf: None,
            remote_judge_url: None,
            remote_judge_timeout_ms: default_timeout(),
        }
    }
}

impl PipelineConfig {
    /// Reads a config file; relative paths inside it resolve against its directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg: PipelineConfig =
            serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        if let Some(base) = path.parent() {
            cfg.resolve_relative(base);
        }
        Ok(cfg)
    }

    fn resolve_relative(&mut self, base: &Path) {
        for p in [
            &mut self.universities,
            &mut self.degrees,
            &mut self.departments,
            &mut self.words,
            &mut self.oracle,
            &mut self.journal,
            &mut self.title_model,
            &mut self.idf,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
    }

    /// Every referenced file must exist and the numeric knobs must be in range.
    pub fn validate(&self) -> Result<()> {
        check_threshold(self.threshold)?;
        YearRange::new(self.year_range.min_year, self.year_range.max_year)?;
        for p in [
            &self.universities,
            &self.degrees,
            &self.departments,
            &self.words,
            &self.oracle,
            &self.title_model,
            &self.idf,
        ]
        .into_iter()
        .flatten()
        {
            if !p.exists() {
                return Err(Error::Config(format!("{} does not exist", p.display())));
            }
        }
        Ok(())
    }

    /// Loads resources. `corpus_titles` supplies IDF when no IDF file is configured.
    pub fn build_resources<'a>(&self, corpus_titles: impl IntoIterator<Item = &'a str>) -> Result<Resources> {
        self.validate()?;
        let dict = |p: &Option<PathBuf>, f: fn() -> AliasDictionary| match p {
            Some(p) => AliasDictionary::load(p),
            None => Ok(f()),
        };
        let words = match &self.words {
            Some(p) => WordFrequencyList::load(p)?,
            None => bundled::words(),
        };
        let model = match &self.title_model {
            Some(p) => TitleModel::load(p)?,
            None => TitleModel::bundled(),
        };
        let idf = match &self.idf {
            Some(p) => IdfTable::load(p)?,
            None => {
                let t = IdfTable::from_titles(corpus_titles);
                if t.doc_count == 0 {
                    IdfTable::from_titles(bundled::titles())
                } else {
                    t
                }
            }
        };
        let mut res = Resources::new(
            dict(&self.universities, bundled::universities)?,
            dict(&self.degrees, bundled::degrees)?,
            dict(&self.departments, bundled::departments)?,
            words,
            model,
            idf,
        )?
        .with_threshold(self.threshold)?;
        res.years = self.year_range;
        res.date_order = self.date_order;
        res.sentinels = self.missing_sentinels.clone();
        if let Some(p) = &self.oracle {
            res.oracle = open_oracle(p)?;
        }
        if let Some(url) = &self.remote_judge_url {
            res.judge = remote_judge(url, self.remote_judge_timeout_ms)?;
        }
        Ok(res)
    }
}

#[cfg(feature = "remote-judge")]
fn remote_judge(url: &str, timeout_ms: u64) -> Result<Box<dyn NameJudge>> {
    Ok(Box::new(crate::detection::names::RemoteJudge::new(
        url,
        std::time::Duration::from_millis(timeout_ms),
    )))
}

#[cfg(not(feature = "remote-judge"))]
fn remote_judge(_: &str, _: u64) -> Result<Box<dyn NameJudge>> {
    Err(Error::Config("built without remote judge support".into()))
}

#[cfg(test)]
pub(crate) mod tests {
    use std::sync::OnceLock;

    use super::*;

    pub(crate) fn shared() -> &'static Resources {
        static RES: OnceLock<Resources> = OnceLock::new();
        RES.get_or_init(|| Resources::bundled().expect("bundled resources load"))
    }

    #[test]
    fn config_defaults_and_validation() {
        let cfg: PipelineConfig = serde_json::from_str("{}").unwrap();
        assert_eq!(cfg, PipelineConfig::default());
        assert!(cfg.validate().is_ok());
        let bad: PipelineConfig = serde_json::from_str(r#"{"threshold": 1.5}"#).unwrap();
        assert!(bad.validate().is_err());
        let missing: PipelineConfig = serde_json::from_str(r#"{"degrees": "/no/such/file.tsv"}"#).unwrap();
        assert!(matches!(missing.validate(), Err(Error::Config(_))));
        assert!(serde_json::from_str::<PipelineConfig>(r#"{"thresold": 0.5}"#).is_err());
    }

    #[test]
    fn relative_paths_resolve_against_config_dir() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("deg.tsv"), "Doctor of Philosophy\tPHD\n").unwrap();
        std::fs::write(
            dir.path().join("cfg.json"),
            r#"{"degrees": "deg.tsv", "date_order": "day-first", "year_range": {"min_year": 1900, "max_year": 2000}}"#,
        )
        .unwrap();
        let cfg = PipelineConfig::load(dir.path().join("cfg.json")).unwrap();
        let res = cfg.build_resources(["A Title"]).unwrap();
        assert_eq!(res.degrees.len(), 1);
        assert_eq!(res.date_order, DateOrder::DayFirst);
        assert_eq!(res.years.max_year, 2000);
        assert_eq!(res.idf.doc_count, 1);
    }

    #[test]
    fn department_vocabulary_is_known() {
        let r = shared();
        for e in r.departments.entries() {
            for (_, t) in crate::detection::department_tokens(&e.canonical) {
                assert!(r.words.contains(&t), "{t}");
            }
        }
    }
}
