use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::PromptError;

/// Maps each class to its label words. Words are compared after [`normalize_response`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "BTreeMap<String, Vec<String>>", into = "BTreeMap<String, Vec<String>>")]
pub struct Verbalizer {
    words: BTreeMap<String, Vec<String>>,
}

impl Verbalizer {
    pub fn new(words: BTreeMap<String, Vec<String>>) -> Result<Self, PromptError> {
        let mut owner: BTreeMap<String, &str> = BTreeMap::new();
        let mut normalized = BTreeMap::new();
        for (class, list) in &words {
            if list.is_empty() {
                return Err(PromptError::InvalidVerbalizer(format!("class `{class}` has no label words")));
            }
            let mut norm = Vec::with_capacity(list.len());
            for w in list {
                let n = normalize_response(w);
                if n.is_empty() {
                    return Err(PromptError::InvalidVerbalizer(format!("label word `{w}` is empty after normalization")));
                }
                if let Some(other) = owner.insert(n.clone(), class) {
                    if other != class {
                        return Err(PromptError::InvalidVerbalizer(format!(
                            "label word `{n}` belongs to both `{other}` and `{class}`"
                        )));
                    }
                }
                norm.push(n);
            }
            normalized.insert(class.clone(), norm);
        }
        Ok(Self { words: normalized })
    }

    /// `yes_class` answers "yes", `no_class` answers "no".
    pub fn yes_no(yes_class: &str, no_class: &str) -> Self {
        let mut m = BTreeMap::new();
        m.insert(yes_class.to_owned(), vec!["yes".to_owned()]);
        m.insert(no_class.to_owned(), vec!["no".to_owned()]);
        Self::new(m).expect("distinct yes/no classes")
    }

    pub fn classes(&self) -> impl Iterator<Item = &str> {
        self.words.keys().map(String::as_str)
    }

    pub fn class_of(&self, word: &str) -> Option<&str> {
        self.words
            .iter()
            .find(|(_, list)| list.iter().any(|w| w == word))
            .map(|(c, _)| c.as_str())
    }
}

impl TryFrom<BTreeMap<String, Vec<String>>> for Verbalizer {
    type Error = PromptError;

    fn try_from(m: BTreeMap<String, Vec<String>>) -> Result<Self, Self::Error> {
        Self::new(m)
    }
}

impl From<Verbalizer> for BTreeMap<String, Vec<String>> {
    fn from(v: Verbalizer) -> Self {
        v.words
    }
}

fn strip_punct(s: &str) -> &str {
    s.trim_matches(|c: char| !c.is_alphanumeric() && !c.is_whitespace())
}

/// Trim, lowercase, strip surrounding punctuation and keep the first whitespace-delimited token.
pub fn normalize_response(raw: &str) -> String {
    let lowered = raw.trim().to_lowercase();
    let stripped = strip_punct(&lowered).trim();
    let first = stripped.split_whitespace().next().unwrap_or("");
    strip_punct(first).to_owned()
}

/// The class whose label words contain the normalized response, or `None` for a non-response.
pub fn parse_response<'v>(raw: &str, verbalizer: &'v Verbalizer) -> Option<&'v str> {
    verbalizer.class_of(&normalize_response(raw))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn abuse() -> Verbalizer {
        Verbalizer::yes_no("abusive", "not_abusive")
    }

    #[test]
    fn yes_no_mapping() {
        let v = abuse();
        assert_eq!(parse_response("No", &v), Some("not_abusive"));
        assert_eq!(parse_response("  YES.", &v), Some("abusive"));
        assert_eq!(parse_response("\"No\", it does not", &v), Some("not_abusive"));
        assert_eq!(parse_response("Yes, definitely", &v), Some("abusive"));
    }

    #[test]
    fn non_responses() {
        let v = Verbalizer::yes_no("negative", "positive");
        assert_eq!(parse_response("Neutral", &v), None);
        assert_eq!(parse_response("Mixed", &v), None);
        assert_eq!(parse_response("", &v), None);
        assert_eq!(
            parse_response("Cannot determine if the internet comment contains abusive language", &abuse()),
            None
        );
    }

    #[test]
    fn verbalizer_validation() {
        let mut m = BTreeMap::new();
        m.insert("a".to_owned(), vec!["Yes".to_owned()]);
        m.insert("b".to_owned(), vec!["yes!".to_owned()]);
        assert!(matches!(Verbalizer::new(m), Err(PromptError::InvalidVerbalizer(_))));
        let mut m = BTreeMap::new();
        m.insert("a".to_owned(), vec![]);
        assert!(Verbalizer::new(m).is_err());
        let mut m = BTreeMap::new();
        m.insert("a".to_owned(), vec!["...".to_owned()]);
        assert!(Verbalizer::new(m).is_err());
    }

    #[test]
    fn multi_word_lists() {
        let mut m = BTreeMap::new();
        m.insert("positive".to_owned(), vec!["Positive".into(), "good".into(), "great".into()]);
        m.insert("negative".to_owned(), vec!["Negative".into(), "bad".into(), "awful".into()]);
        let v = Verbalizer::new(m).unwrap();
        assert_eq!(parse_response("Great!", &v), Some("positive"));
        assert_eq!(parse_response("negative.", &v), Some("negative"));
        let json = serde_json::to_string(&v).unwrap();
        let back: Verbalizer = serde_json::from_str(&json).unwrap();
        assert_eq!(back, v);
    }

    proptest! {
        #[test]
        fn parse_is_idempotent_under_normalization(raw in "\\PC{0,30}") {
            let v = Verbalizer::yes_no("negative", "positive");
            prop_assert_eq!(parse_response(&normalize_response(&raw), &v), parse_response(&raw, &v));
            let once = normalize_response(&raw);
            prop_assert_eq!(normalize_response(&once), once);
        }
    }
}
