use std::collections::HashMap;
use std::path::Path;

use serde::Deserialize;

use super::WeakSupError;
use crate::num::Scalar;

const DEFAULT_LEXICON: &str = include_str!("../../data/lexicon.csv");

/// Lowercased maximal runs of alphabetic characters.
pub fn alpha_tokens(text: &str) -> impl Iterator<Item = String> + '_ {
    text.split(|c: char| !c.is_alphabetic())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PolarityScore<T> {
    pub polarity: T,
    pub subjectivity: T,
}

/// Word-level sentiment lexicon: word -> (polarity in [-1, 1], subjectivity in [0, 1]).
#[derive(Debug, Clone, PartialEq)]
pub struct Lexicon<T> {
    entries: HashMap<String, (T, T)>,
}

#[derive(Deserialize)]
struct LexiconRow {
    word: String,
    polarity: f64,
    subjectivity: f64,
}

impl<T: Scalar> Lexicon<T> {
    pub fn new(entries: impl IntoIterator<Item = (String, T, T)>) -> Result<Self, WeakSupError> {
        let mut map = HashMap::new();
        for (word, polarity, subjectivity) in entries {
            let bad = |message: &str| WeakSupError::InvalidLexicon {
                word: word.clone(),
                message: message.to_owned(),
            };
            if !(polarity >= -T::one() && polarity <= T::one()) {
                return Err(bad("polarity outside [-1, 1]"));
            }
            if !(subjectivity >= T::zero() && subjectivity <= T::one()) {
                return Err(bad("subjectivity outside [0, 1]"));
            }
            map.insert(word.to_lowercase(), (polarity, subjectivity));
        }
        Ok(Self { entries: map })
    }

    /// Lexicon shipped with the crate (general-purpose English sentiment words).
    pub fn bundled() -> Self {
        Self::from_csv_str(DEFAULT_LEXICON, Path::new("<bundled lexicon>")).expect("bundled lexicon is valid")
    }

    /// Reads a CSV file with header `word,polarity,subjectivity`.
    pub fn from_csv_path(path: &Path) -> Result<Self, WeakSupError> {
        let text = std::fs::read_to_string(path).map_err(|source| WeakSupError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_csv_str(&text, path)
    }

    fn from_csv_str(text: &str, path: &Path) -> Result<Self, WeakSupError> {
        let mut reader = csv::Reader::from_reader(text.as_bytes());
        let mut rows = Vec::new();
        for (i, rec) in reader.deserialize::<LexiconRow>().enumerate() {
            let row = rec.map_err(|e| WeakSupError::Parse {
                path: path.to_path_buf(),
                line: i + 2,
                message: e.to_string(),
            })?;
            rows.push((row.word, T::of(row.polarity), T::of(row.subjectivity)));
        }
        Self::new(rows)
    }

    pub fn get(&self, word: &str) -> Option<(T, T)> {
        self.entries.get(word).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Mean polarity and subjectivity over the tokens found in the lexicon; (0, 0) when none match.
pub fn score_polarity<T: Scalar>(text: &str, lexicon: &Lexicon<T>) -> PolarityScore<T> {
    let mut n = 0usize;
    let mut pol = T::zero();
    let mut subj = T::zero();
    for tok in alpha_tokens(text) {
        if let Some((p, s)) = lexicon.get(&tok) {
            n += 1;
            pol = pol + p;
            subj = subj + s;
        }
    }
    if n == 0 {
        return PolarityScore::default();
    }
    let n = T::of_usize(n);
    PolarityScore {
        polarity: pol / n,
        subjectivity: subj / n,
    }
}
