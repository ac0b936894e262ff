use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{Corpus, CorpusError};
use crate::num::round_half_up;

/// Generator for one sampling operation, keyed by a dataset-scoped stream name and the seed.
pub fn seeded_rng(stream: &str, seed: u64) -> ChaCha8Rng {
    let mut hasher = Sha256::new();
    hasher.update(stream.as_bytes());
    hasher.update([0u8]);
    hasher.update(seed.to_le_bytes());
    let digest = hasher.finalize();
    let mut key = [0u8; 32];
    key.copy_from_slice(&digest);
    ChaCha8Rng::from_seed(key)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BalanceMode {
    /// Half of every budget from each class.
    Balanced,
    /// Positive share fixed by the plan's prevalence.
    Natural,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplingPlan {
    pub budgets: Vec<usize>,
    pub balance_mode: BalanceMode,
    pub seed: u64,
    pub positive_prevalence: f64,
}

impl SamplingPlan {
    pub const DEFAULT_BUDGETS: [usize; 7] = [16, 32, 64, 128, 256, 512, 1024];

    pub fn new(budgets: Vec<usize>, balance_mode: BalanceMode, seed: u64, positive_prevalence: f64) -> Result<Self, CorpusError> {
        let plan = Self {
            budgets,
            balance_mode,
            seed,
            positive_prevalence,
        };
        plan.validate()?;
        Ok(plan)
    }

    pub fn validate(&self) -> Result<(), CorpusError> {
        if self.budgets.is_empty() {
            return Err(CorpusError::InvalidPlan("no budgets".into()));
        }
        if self.budgets[0] == 0 {
            return Err(CorpusError::InvalidPlan("budgets must be positive".into()));
        }
        if self.budgets.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CorpusError::InvalidPlan("budgets must be strictly ascending".into()));
        }
        if self.balance_mode == BalanceMode::Balanced {
            if let Some(b) = self.budgets.iter().find(|b| *b % 2 == 1) {
                return Err(CorpusError::InvalidPlan(format!("balanced budget {b} is odd")));
            }
        }
        if !(self.positive_prevalence > 0.0 && self.positive_prevalence < 1.0) {
            return Err(CorpusError::InvalidPlan(format!(
                "positive prevalence {} outside (0, 1)",
                self.positive_prevalence
            )));
        }
        Ok(())
    }

    /// (negative, positive) counts drawn for `budget`.
    pub fn class_counts(&self, budget: usize) -> [usize; 2] {
        match self.balance_mode {
            BalanceMode::Balanced => [budget / 2, budget / 2],
            BalanceMode::Natural => {
                let pos = round_half_up(self.positive_prevalence * budget as f64).min(budget);
                [budget - pos, pos]
            }
        }
    }
}

/// Member indices per class, each list shuffled by `rng`.
fn shuffled_members(corpus: &Corpus, rng: &mut ChaCha8Rng) -> Result<[Vec<usize>; 2], CorpusError> {
    let gold = corpus.gold_indices()?;
    let mut members: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
    for (i, g) in gold.into_iter().enumerate() {
        members[g].push(i);
    }
    for m in &mut members {
        m.shuffle(rng);
    }
    Ok(members)
}

fn check_available(corpus: &Corpus, class: usize, available: usize, needed: usize) -> Result<(), CorpusError> {
    if needed > available {
        return Err(CorpusError::Insufficient {
            class: corpus.class_set().label(class).to_owned(),
            needed,
            available,
            shortfall: needed - available,
        });
    }
    Ok(())
}

/// Class-preserving random sample: each class contributes round(fraction * count), and the
/// majority class absorbs any difference to round(fraction * n).
pub fn stratified_sample(corpus: &Corpus, fraction: f64, seed: u64) -> Result<Corpus, CorpusError> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(CorpusError::InvalidFraction(fraction));
    }
    let mut rng = seeded_rng(&format!("{}/stratified", corpus.name()), seed);
    let members = shuffled_members(corpus, &mut rng)?;
    let counts = [members[0].len(), members[1].len()];
    let mut take = counts.map(|c| round_half_up(fraction * c as f64).min(c));
    let target = round_half_up(fraction * corpus.len() as f64);
    let majority = if counts[1] > counts[0] { 1 } else { 0 };
    let minority_take = take[1 - majority];
    take[majority] = target.saturating_sub(minority_take).min(counts[majority]);

    let chosen: Vec<usize> = (0..2).flat_map(|c| members[c][..take[c]].iter().copied()).collect();
    Ok(corpus.select(format!("{}-sample", corpus.name()), &chosen))
}

/// Nested subsets, one per budget. Each class is shuffled once and every subset takes a
/// prefix of that order, so smaller subsets are contained in larger ones.
pub fn build_budget_series(train: &Corpus, plan: &SamplingPlan) -> Result<Vec<(usize, Corpus)>, CorpusError> {
    plan.validate()?;
    let mode = match plan.balance_mode {
        BalanceMode::Balanced => "balanced",
        BalanceMode::Natural => "natural",
    };
    let mut rng = seeded_rng(&format!("{}/budget/{mode}", train.name()), plan.seed);
    let members = shuffled_members(train, &mut rng)?;

    let mut previous = [0usize; 2];
    let mut series = Vec::with_capacity(plan.budgets.len());
    for &budget in &plan.budgets {
        let counts = plan.class_counts(budget);
        for class in 0..2 {
            check_available(train, class, members[class].len(), counts[class])?;
            if counts[class] < previous[class] {
                return Err(CorpusError::InvalidPlan(format!(
                    "class `{}` count shrinks at budget {budget}; subsets cannot nest",
                    train.class_set().label(class)
                )));
            }
        }
        previous = counts;
        let chosen: Vec<usize> = (0..2)
            .flat_map(|c| members[c][..counts[c]].iter().copied())
            .collect();
        let name = format!("{}-{mode}-b{budget}-s{}", train.name(), plan.seed);
        series.push((budget, train.select(name, &chosen)));
    }
    Ok(series)
}

/// Random (unstratified) draw of `n` documents; the remainder keeps the input corpus name.
pub fn carve_exploration(train: &Corpus, n: usize, seed: u64) -> Result<(Corpus, Corpus), CorpusError> {
    if n > train.len() {
        return Err(CorpusError::ExplorationTooLarge {
            requested: n,
            available: train.len(),
        });
    }
    let mut order: Vec<usize> = (0..train.len()).collect();
    let mut rng = seeded_rng(&format!("{}/exploration", train.name()), seed);
    order.shuffle(&mut rng);
    let exploration = train.select(format!("{}-exploration", train.name()), &order[..n]);
    let remainder = train.select(train.name().to_owned(), &order[n..]);
    Ok((exploration, remainder))
}

/// Downsamples the larger class to the size of the smaller one.
pub fn balance_classes(corpus: &Corpus, seed: u64) -> Result<Corpus, CorpusError> {
    let mut rng = seeded_rng(&format!("{}/balance", corpus.name()), seed);
    let members = shuffled_members(corpus, &mut rng)?;
    let k = members[0].len().min(members[1].len());
    let chosen: Vec<usize> = members.iter().flat_map(|m| m[..k].iter().copied()).collect();
    Ok(corpus.select(format!("{}-balanced", corpus.name()), &chosen))
}
