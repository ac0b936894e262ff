//! Seeded synthetic data: text corpora with controllable class signal, and label
//! matrices with planted labelling-function accuracies.

use rand::Rng;

use crate::corpus::{seeded_rng, ClassSet, Corpus, CorpusError, Document};
use crate::weaksup::{LabelMatrix, Vote};

pub const NEGATIVE_WORDS: [&str; 20] = [
    "awful", "terrible", "boring", "dull", "horrible", "worst", "bad", "poor", "weak", "messy", "ugly",
    "tedious", "annoying", "stupid", "clumsy", "lazy", "bland", "painful", "forgettable", "disappointing",
];

pub const POSITIVE_WORDS: [&str; 20] = [
    "great", "excellent", "wonderful", "brilliant", "superb", "best", "good", "fine", "strong", "charming",
    "lovely", "moving", "delightful", "clever", "elegant", "vivid", "fresh", "gripping", "memorable", "beautiful",
];

pub const FILLER_WORDS: [&str; 24] = [
    "the", "film", "plot", "story", "scene", "actor", "cast", "script", "camera", "music", "ending", "night",
    "house", "city", "family", "friend", "time", "place", "day", "character", "director", "screen", "hour", "year",
];

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub n_docs: usize,
    pub positive_prevalence: f64,
    /// Inclusive token-count range per document.
    pub min_tokens: usize,
    pub max_tokens: usize,
    /// Probability that a token is filler shared by both classes.
    pub filler_rate: f64,
    /// Probability that a class token comes from the other class's vocabulary.
    pub cross_talk: f64,
}

impl SyntheticSpec {
    /// Documents built only from their class's 20-word vocabulary.
    pub fn separable(n_docs: usize) -> Self {
        Self {
            n_docs,
            positive_prevalence: 0.5,
            min_tokens: 8,
            max_tokens: 16,
            filler_rate: 0.0,
            cross_talk: 0.0,
        }
    }
}

/// Generates a labelled corpus with ids `d00000, d00001, ...`; each document is
/// positive with probability `positive_prevalence`.
pub fn generate_corpus(name: &str, classes: &ClassSet, spec: &SyntheticSpec, seed: u64) -> Result<Corpus, CorpusError> {
    if !(0.0..=1.0).contains(&spec.positive_prevalence) || spec.min_tokens == 0 || spec.min_tokens > spec.max_tokens {
        return Err(CorpusError::InvalidPlan("invalid synthetic corpus parameters".into()));
    }
    let mut rng = seeded_rng(&format!("{name}/synthetic"), seed);
    let docs = (0..spec.n_docs)
        .map(|i| {
            let positive = rng.random_bool(spec.positive_prevalence);
            let (own, other) = if positive {
                (&POSITIVE_WORDS, &NEGATIVE_WORDS)
            } else {
                (&NEGATIVE_WORDS, &POSITIVE_WORDS)
            };
            let len = rng.random_range(spec.min_tokens..=spec.max_tokens);
            let words: Vec<&str> = (0..len)
                .map(|_| {
                    if rng.random_bool(spec.filler_rate) {
                        FILLER_WORDS[rng.random_range(0..FILLER_WORDS.len())]
                    } else if rng.random_bool(spec.cross_talk) {
                        other[rng.random_range(0..other.len())]
                    } else {
                        own[rng.random_range(0..own.len())]
                    }
                })
                .collect();
            let label = classes.label(usize::from(positive));
            Document::new(format!("d{i:05}"), words.join(" "), Some(label))
        })
        .collect();
    Corpus::new(name, classes.clone(), docs)
}

/// Long, noisy documents for labelling-time measurements.
pub fn timing_corpus(n_docs: usize, seed: u64) -> Corpus {
    let classes = ClassSet::binary("negative", "positive").expect("valid classes");
    let spec = SyntheticSpec {
        n_docs,
        positive_prevalence: 0.5,
        min_tokens: 60,
        max_tokens: 120,
        filler_rate: 0.6,
        cross_talk: 0.2,
    };
    generate_corpus("timing", &classes, &spec, seed).expect("valid timing spec")
}

/// Label matrix whose LF `j` fires with probability `coverage` and, when it fires,
/// votes the gold class with probability `accuracies[j]`. Returns the matrix and the
/// gold class per row.
pub fn planted_votes(n: usize, accuracies: &[f64], coverage: f64, positive_prior: f64, seed: u64) -> (LabelMatrix, Vec<usize>) {
    let mut rng = seeded_rng("planted", seed);
    let mut rows = Vec::with_capacity(n);
    let mut gold = Vec::with_capacity(n);
    for _ in 0..n {
        let y = usize::from(rng.random_bool(positive_prior));
        let row: Vec<Vote> = accuracies
            .iter()
            .map(|&acc| {
                if !rng.random_bool(coverage) {
                    Vote::Abstain
                } else if rng.random_bool(acc) {
                    Vote::from_class(y)
                } else {
                    Vote::from_class(1 - y)
                }
            })
            .collect();
        rows.push(row);
        gold.push(y);
    }
    let m = LabelMatrix::from_rows(&rows, accuracies.len()).expect("rows have equal width");
    (m, gold)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separable_corpus_uses_disjoint_vocabularies() {
        let classes = ClassSet::binary("neg", "pos").unwrap();
        let c = generate_corpus("s", &classes, &SyntheticSpec::separable(200), 3).unwrap();
        assert_eq!(c.len(), 200);
        for d in c.documents() {
            let pool: &[&str] = if d.gold_label.as_deref() == Some("pos") { &POSITIVE_WORDS } else { &NEGATIVE_WORDS };
            assert!(d.text.split(' ').all(|w| pool.contains(&w)));
        }
        let again = generate_corpus("s", &classes, &SyntheticSpec::separable(200), 3).unwrap();
        assert_eq!(c, again);
    }

    #[test]
    fn planted_rates_are_close() {
        let (m, gold) = planted_votes(20_000, &[0.9, 0.6], 0.5, 0.5, 1);
        for (j, acc) in [0.9, 0.6].into_iter().enumerate() {
            let fired: Vec<(Vote, usize)> = m.column(j).zip(&gold).filter(|(v, _)| !v.is_abstain()).map(|(v, &g)| (v, g)).collect();
            let cov = fired.len() as f64 / 20_000.0;
            let hit = fired.iter().filter(|(v, g)| v.class() == Some(*g)).count() as f64 / fired.len() as f64;
            assert!((cov - 0.5).abs() < 0.02);
            assert!((hit - acc).abs() < 0.02);
        }
    }
}
