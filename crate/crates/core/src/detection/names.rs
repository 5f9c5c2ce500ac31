//! Token-level PERSON / OTHER judgments for author and advisor values.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{is_punctuation, normalize_surface};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum NameLabel {
    Person,
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JudgedToken {
    pub token: String,
    pub label: NameLabel,
    /// Byte offset of the token in the judged string.
    pub start: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct NameJudgment {
    pub tokens: Vec<JudgedToken>,
}

impl NameJudgment {
    /// Rebuilds `input` from the tokens and the separators between them.
    pub fn reconstruct(&self, input: &str) -> String {
        let mut out = String::with_capacity(input.len());
        let mut pos = 0;
        for t in &self.tokens {
            out.push_str(&input[pos..t.start]);
            out.push_str(&t.token);
            pos = t.start + t.token.len();
        }
        out.push_str(&input[pos..]);
        out
    }

    pub fn others(&self) -> impl Iterator<Item = (usize, &JudgedToken)> {
        self.tokens.iter().enumerate().filter(|(_, t)| t.label == NameLabel::Other)
    }

    pub fn all_person(&self) -> bool {
        self.others().next().is_none()
    }
}

pub trait NameJudge: Send + Sync {
    fn judge(&self, name: &str) -> Result<NameJudgment>;
}

/// Whitespace/comma separated tokens with their byte offsets.
pub fn name_tokens(s: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in s.char_indices() {
        let sep = c.is_whitespace() || c == ',' || c == ';';
        match (sep, start) {
            (true, Some(b)) => {
                out.push((b, &s[b..i]));
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(b) = start {
        out.push((b, &s[b..]));
    }
    out
}

const HONORIFICS: [&str; 5] = ["JR", "SR", "II", "III", "IV"];
const ROLE_WORDS: [&str; 7] = ["CHAIR", "COCHAIR", "COMMITTEE", "MEMBER", "ADVISOR", "COADVISOR", "DIRECTOR"];
const PARTICLES: [&str; 7] = ["van", "von", "de", "la", "der", "bin", "al"];

/// The default judge: a handful of lexical rules, no model.
#[derive(Debug, Clone, Copy, Default)]
pub struct RuleJudge;

impl RuleJudge {
    pub fn label(token: &str) -> NameLabel {
        let core: String = token.chars().filter(|c| !is_punctuation(*c)).collect();
        if core.is_empty() {
            return NameLabel::Person;
        }
        if core.chars().any(|c| c.is_ascii_digit()) {
            return NameLabel::Other;
        }
        let upper = normalize_surface(&core);
        if ROLE_WORDS.contains(&upper.as_str()) {
            return NameLabel::Other;
        }
        let letters: Vec<char> = core.chars().filter(|c| c.is_alphabetic()).collect();
        if letters.len() >= 2 && letters.iter().all(|c| c.is_uppercase()) && !HONORIFICS.contains(&upper.as_str()) {
            return NameLabel::Other;
        }
        if core.chars().next().is_some_and(char::is_lowercase) && !PARTICLES.contains(&core.as_str()) {
            return NameLabel::Other;
        }
        NameLabel::Person
    }
}

impl NameJudge for RuleJudge {
    fn judge(&self, name: &str) -> Result<NameJudgment> {
        let tokens = name_tokens(name)
            .into_iter()
            .map(|(start, t)| JudgedToken {
                token: t.to_string(),
                label: RuleJudge::label(t),
                start,
            })
            .collect();
        Ok(NameJudgment { tokens })
    }
}

#[cfg(any(feature = "remote-judge", test))]
#[derive(Debug, Deserialize)]
struct RemoteToken {
    token: String,
    label: String,
}

#[cfg(any(feature = "remote-judge", test))]
#[derive(Debug, Deserialize)]
struct RemoteResponse {
    tokens: Vec<RemoteToken>,
}

#[cfg(any(feature = "remote-judge", test))]
/// Aligns service tokens to byte offsets in `name`; any label other than
/// `PERSON` becomes OTHER.
fn align_remote(name: &str, tokens: Vec<RemoteToken>) -> Result<NameJudgment> {
    let mut pos = 0;
    let mut out = Vec::with_capacity(tokens.len());
    for t in tokens {
        let at = name[pos..]
            .find(&t.token)
            .ok_or_else(|| crate::error::Error::Judge(format!("token {:?} not found in {name:?}", t.token)))?;
        let start = pos + at;
        pos = start + t.token.len();
        let label = if t.label == "PERSON" {
            NameLabel::Person
        } else {
            NameLabel::Other
        };
        out.push(JudgedToken {
            token: t.token,
            label,
            start,
        });
    }
    Ok(NameJudgment { tokens: out })
}

/// NER service speaking `{"text": ..}` → `{"tokens": [{"token", "label"}]}`.
#[cfg(feature = "remote-judge")]
pub struct RemoteJudge {
    url: String,
    agent: ureq::Agent,
}

#[cfg(feature = "remote-judge")]
impl RemoteJudge {
    pub const DEFAULT_TIMEOUT: std::time::Duration = std::time::Duration::from_secs(5);

    pub fn new(url: impl Into<String>, timeout: std::time::Duration) -> Self {
        let agent = ureq::Agent::config_builder().timeout_global(Some(timeout)).build().into();
        RemoteJudge { url: url.into(), agent }
    }
}

#[cfg(feature = "remote-judge")]
impl NameJudge for RemoteJudge {
    fn judge(&self, name: &str) -> Result<NameJudgment> {
        let body = serde_json::json!({ "text": name });
        let resp: RemoteResponse = self
            .agent
            .post(&self.url)
            .send_json(&body)
            .and_then(|mut r| r.body_mut().read_json())
            .map_err(|e| crate::error::Error::Judge(e.to_string()))?;
        align_remote(name, resp.tokens)
    }
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::dictionaries::bundled;

    fn others(s: &str) -> Vec<String> {
        RuleJudge.judge(s).unwrap().others().map(|(_, t)| t.token.clone()).collect()
    }

    #[test]
    fn role_suffix_is_other() {
        assert_eq!(others("Mark Pankow, Co-Chair"), ["Co-Chair"]);
        assert_eq!(others("Andrew Mathew Jr., Committee Member"), ["Committee", "Member"]);
    }

    #[test]
    fn digits_acronyms_and_lowercase_words() {
        assert_eq!(others("123"), ["123"]);
        assert_eq!(others("IBM Research"), ["IBM"]);
        assert_eq!(others("Jane Doe III"), Vec::<String>::new());
        assert_eq!(others("Ludwig van Beethoven"), Vec::<String>::new());
        assert_eq!(others("see attached"), ["see", "attached"]);
        assert_eq!(others("J. R. Smith"), Vec::<String>::new());
    }

    #[test]
    fn fifty_generated_names_are_clean() {
        let given = bundled::given_names();
        let sur = bundled::surnames();
        for i in 0..50 {
            let name = format!("{} {}", given[i * 7 % given.len()], sur[i * 11 % sur.len()]);
            assert!(RuleJudge.judge(&name).unwrap().all_person(), "{name}");
        }
    }

    #[test]
    fn remote_alignment() {
        let toks = vec![
            RemoteToken {
                token: "Mark".into(),
                label: "PERSON".into(),
            },
            RemoteToken {
                token: "Co-Chair".into(),
                label: "TITLE".into(),
            },
        ];
        let j = align_remote("Mark, Co-Chair", toks).unwrap();
        assert_eq!(j.tokens[1].start, 6);
        assert_eq!(j.tokens[1].label, NameLabel::Other);
        let bad = vec![RemoteToken {
            token: "Zed".into(),
            label: "PERSON".into(),
        }];
        assert!(align_remote("Mark", bad).is_err());
    }

    #[cfg(feature = "remote-judge")]
    #[test]
    fn unreachable_service_is_a_judge_error() {
        let j = RemoteJudge::new("http://127.0.0.1:9/ner", std::time::Duration::from_millis(300));
        assert!(matches!(j.judge("Jane Doe"), Err(crate::error::Error::Judge(_))));
    }

    proptest! {
        #[test]
        fn judgment_reconstructs_input(s in "[A-Za-z0-9.,\\- ]{0,40}") {
            let j = RuleJudge.judge(&s).unwrap();
            prop_assert_eq!(j.reconstruct(&s), s);
        }
    }
}
