//! Add-α smoothed bigram language model.

use std::collections::{BTreeSet, HashMap};

pub const BOS: &str = "<s>";
pub const EOS: &str = "</s>";
pub const UNK: &str = "<unk>";

#[derive(Debug, Clone, PartialEq)]
pub struct BigramLm {
    alpha: f64,
    /// Words seen in training (without the markers).
    vocab: BTreeSet<String>,
    /// Probabilities of bigrams observed in training.
    seen: HashMap<String, HashMap<String, f64>>,
    /// Per-history probability of any next token not in `seen`.
    unseen: HashMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LmError {
    #[error("no sentences to train on")]
    EmptyCorpus,
    #[error("alpha must be finite and non-negative")]
    BadAlpha,
}

impl BigramLm {
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn vocab(&self) -> &BTreeSet<String> {
        &self.vocab
    }

    /// Possible next tokens: every training word, `</s>` and `<unk>`.
    pub fn next_vocab_size(&self) -> usize {
        self.vocab.len() + 2
    }

    fn map_word<'a>(&self, w: &'a str) -> &'a str {
        if w == BOS || w == EOS || self.vocab.contains(w) {
            w
        } else {
            UNK
        }
    }

    /// `P(next | prev)`; unknown words on either side are read as `<unk>`.
    pub fn prob(&self, prev: &str, next: &str) -> f64 {
        let prev = self.map_word(prev);
        let next = self.map_word(next);
        if next == BOS || prev == EOS {
            return 0.0;
        }
        if let Some(p) = self.seen.get(prev).and_then(|row| row.get(next)) {
            return *p;
        }
        match self.unseen.get(prev) {
            Some(p) => *p,
            None => 1.0 / self.next_vocab_size() as f64,
        }
    }

    pub fn log_prob(&self, prev: &str, next: &str) -> f64 {
        self.prob(prev, next).ln()
    }

    /// Every history the model distinguishes: `<s>`, `<unk>` and the vocabulary.
    pub fn histories(&self) -> impl Iterator<Item = &str> {
        [BOS, UNK].into_iter().chain(self.vocab.iter().map(String::as_str))
    }

    /// Every token that can follow a history.
    pub fn next_tokens(&self) -> impl Iterator<Item = &str> {
        self.vocab.iter().map(String::as_str).chain([EOS, UNK])
    }

    /// Observed bigrams with their probabilities, sorted.
    pub fn seen_entries(&self) -> Vec<(&str, &str, f64)> {
        let mut out: Vec<(&str, &str, f64)> = self
            .seen
            .iter()
            .flat_map(|(h, row)| row.iter().map(move |(w, p)| (h.as_str(), w.as_str(), *p)))
            .collect();
        out.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        out
    }

    /// Unseen-continuation probabilities per history, sorted.
    pub fn unseen_entries(&self) -> Vec<(&str, f64)> {
        let mut out: Vec<(&str, f64)> = self.unseen.iter().map(|(h, p)| (h.as_str(), *p)).collect();
        out.sort_by(|a, b| a.0.cmp(b.0));
        out
    }

    pub(crate) fn from_tables(alpha: f64, seen: HashMap<String, HashMap<String, f64>>, unseen: HashMap<String, f64>) -> Self {
        let vocab = seen
            .keys()
            .chain(unseen.keys())
            .chain(seen.values().flat_map(|row| row.keys()))
            .filter(|w| !matches!(w.as_str(), BOS | EOS | UNK))
            .cloned()
            .collect();
        BigramLm {
            alpha,
            vocab,
            seen,
            unseen,
        }
    }
}

pub fn train_lm<S: AsRef<[String]>>(sentences: &[S], alpha: f64) -> Result<BigramLm, LmError> {
    if sentences.is_empty() {
        return Err(LmError::EmptyCorpus);
    }
    if !alpha.is_finite() || alpha < 0.0 {
        return Err(LmError::BadAlpha);
    }
    let mut vocab = BTreeSet::new();
    let mut counts: HashMap<String, HashMap<String, u64>> = HashMap::new();
    for sentence in sentences {
        let words = sentence.as_ref();
        vocab.extend(words.iter().filter(|w| !matches!(w.as_str(), BOS | EOS | UNK)).cloned());
        let mut prev = BOS;
        for w in words.iter().map(String::as_str).chain([EOS]) {
            *counts.entry(prev.to_string()).or_default().entry(w.to_string()).or_default() += 1;
            prev = w;
        }
    }
    let next_size = (vocab.len() + 2) as f64;
    let mut seen = HashMap::with_capacity(counts.len());
    let mut unseen = HashMap::with_capacity(counts.len());
    for (h, row) in counts {
        let total: u64 = row.values().sum();
        let denom = total as f64 + alpha * next_size;
        unseen.insert(h.clone(), alpha / denom);
        seen.insert(h, row.into_iter().map(|(w, c)| (w, (c as f64 + alpha) / denom)).collect());
    }
    Ok(BigramLm {
        alpha,
        vocab,
        seen,
        unseen,
    })
}
