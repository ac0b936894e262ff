use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::template::PromptTemplate;
use super::PromptError;

/// Tokens budgeted for each one-word answer.
pub const OUTPUT_TOKENS_PER_DOC: u64 = 2;
const CHARS_PER_TOKEN: u64 = 4;

/// Model name -> price in pounds sterling per 1,000 tokens.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PriceTable {
    prices: BTreeMap<String, f64>,
}

impl Default for PriceTable {
    fn default() -> Self {
        let prices = [
            ("gpt-3", 0.0006),
            ("gpt-3.5", 0.0013),
            ("gpt-3.5-turbo", 0.0013),
            ("gpt-4", 0.0025),
        ]
        .into_iter()
        .map(|(m, p)| (m.to_owned(), p))
        .collect();
        Self { prices }
    }
}

impl PriceTable {
    pub fn new(prices: BTreeMap<String, f64>) -> Result<Self, PromptError> {
        if let Some((m, p)) = prices.iter().find(|(_, p)| !(**p > 0.0 && p.is_finite())) {
            return Err(PromptError::InvalidRequest(format!("price for `{m}` must be positive, got {p}")));
        }
        Ok(Self { prices })
    }

    pub fn price_per_1k(&self, model: &str) -> Option<f64> {
        self.prices.get(model).copied()
    }

    /// Adds or replaces entries from `other`.
    pub fn merged(mut self, other: &PriceTable) -> Self {
        self.prices.extend(other.prices.iter().map(|(k, v)| (k.clone(), *v)));
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostEstimate {
    pub model: String,
    pub n_docs: usize,
    pub input_tokens: u64,
    pub output_tokens: u64,
    pub tokens: u64,
    pub cost_gbp: f64,
}

/// Approximate API spend: `ceil(chars / 4)` input tokens per prompt plus a two-token answer.
///
/// With a template the rendered prompt is counted, otherwise the raw text.
pub fn estimate_cost<'a>(
    texts: impl IntoIterator<Item = &'a str>,
    template: Option<&PromptTemplate>,
    prices: &PriceTable,
    model: &str,
) -> Result<CostEstimate, PromptError> {
    let price = prices
        .price_per_1k(model)
        .ok_or_else(|| PromptError::UnknownModel(model.to_owned()))?;
    let mut n_docs = 0;
    let mut input_tokens = 0u64;
    for text in texts {
        let chars = match template {
            Some(t) => t.render_text(text)?.chars().count(),
            None => text.chars().count(),
        } as u64;
        input_tokens += chars.div_ceil(CHARS_PER_TOKEN);
        n_docs += 1;
    }
    let output_tokens = OUTPUT_TOKENS_PER_DOC * n_docs as u64;
    let tokens = input_tokens + output_tokens;
    Ok(CostEstimate {
        model: model.to_owned(),
        n_docs,
        input_tokens,
        output_tokens,
        tokens,
        cost_gbp: tokens as f64 / 1000.0 * price,
    })
}
