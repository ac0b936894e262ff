use serde::{Deserialize, Serialize};

use super::PromptError;
use crate::corpus::Document;

const PLACEHOLDER: &str = "{text}";

/// Prompt pattern with a single `{text}` slot. Bundled patterns place the document first and
/// the question after it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptTemplate {
    pub name: String,
    pub pattern: String,
}

const BUNDLED: &[(&str, &str)] = &[
    ("abuse-is-abusive", "{text}\nIs this text abusive?"),
    ("abuse-contains", "{text}\nDoes this text contain abuse?"),
    ("abuse-cloze", "{text}\nIt was? Abusive or Not Abusive"),
    ("movie-is-negative", "{text}\nIs this text negative?"),
    ("movie-contains-negative", "{text}\nDoes this text contain negative sentiment?"),
    ("movie-cloze", "{text}\nIt was? Negative or Not Negative"),
    (
        "abuse-toxic-yes-no",
        "{text}\nUsing one word, does the internet comment contain toxic language, Yes or No?",
    ),
    (
        "abuse-toxic-using-yes-no",
        "{text}\nUsing one word, is this internet comment using toxic language, Yes or No?",
    ),
    (
        "abuse-researcher-yes-no",
        "{text}\nYou are a researcher who needs to classify comments on the internet as containing abusive language or not containing abusive language. Using one word, does the internet comment contain abusive language, Yes or No?",
    ),
    (
        "movie-negative-yes-no",
        "{text}\nUsing one word, does the movie review contain negative sentiment, Yes or No?",
    ),
    (
        "movie-positive-or-negative",
        "{text}\nUsing one word, classify the sentiment of the movie review using 'Positive' or 'Negative'.",
    ),
    (
        "movie-researcher-yes-no",
        "{text}\nYou are a researcher who needs to classify movie reviews as containing negative sentiment or not containing negative sentiment. Using one word, does the movie review contain negative sentiment, Yes or No?",
    ),
];

impl PromptTemplate {
    pub fn new(name: impl Into<String>, pattern: impl Into<String>) -> Result<Self, PromptError> {
        let t = Self {
            name: name.into(),
            pattern: pattern.into(),
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<(), PromptError> {
        let found = self.pattern.matches(PLACEHOLDER).count();
        if found != 1 {
            return Err(PromptError::Placeholder {
                name: self.name.clone(),
                found,
            });
        }
        Ok(())
    }

    pub fn bundled(name: &str) -> Result<Self, PromptError> {
        BUNDLED
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(n, p)| Self {
                name: (*n).to_owned(),
                pattern: (*p).to_owned(),
            })
            .ok_or_else(|| PromptError::UnknownTemplate(name.to_owned()))
    }

    pub fn bundled_names() -> impl Iterator<Item = &'static str> {
        BUNDLED.iter().map(|(n, _)| *n)
    }

    /// Substitutes the document text verbatim for the placeholder.
    pub fn render_text(&self, text: &str) -> Result<String, PromptError> {
        self.validate()?;
        let (head, tail) = self
            .pattern
            .split_once(PLACEHOLDER)
            .expect("validated pattern has a placeholder");
        let mut out = String::with_capacity(head.len() + text.len() + tail.len());
        out.push_str(head);
        out.push_str(text);
        out.push_str(tail);
        Ok(out)
    }

    pub fn render(&self, doc: &Document) -> Result<String, PromptError> {
        self.render_text(&doc.text)
    }
}
