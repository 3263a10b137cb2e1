//! Corpus-level BLEU and chrF.

use std::collections::HashMap;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Smoothing {
    None,
    /// Each zero-match order gets `1 / (2^k · total)`, k counting zero orders so far.
    Exponential,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BleuTokenize {
    Whitespace,
    /// Whitespace split, then punctuation characters become their own tokens.
    WhitespacePunct,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BleuConfig {
    pub max_order: usize,
    pub smoothing: Smoothing,
    pub tokenization: BleuTokenize,
}

impl Default for BleuConfig {
    fn default() -> Self {
        BleuConfig {
            max_order: 4,
            smoothing: Smoothing::Exponential,
            tokenization: BleuTokenize::Whitespace,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChrfConfig {
    pub char_order: usize,
    pub beta: f64,
    pub remove_whitespace: bool,
}

impl Default for ChrfConfig {
    fn default() -> Self {
        ChrfConfig {
            char_order: 6,
            beta: 2.0,
            remove_whitespace: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct NgramStat {
    pub matches: u64,
    /// Hypothesis n-gram count.
    pub total: u64,
    /// Reference n-gram count.
    pub reference: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub metric: String,
    pub score: f64,
    /// Per-order precision as a fraction (BLEU values are after smoothing).
    pub precisions: Vec<f64>,
    /// Per-order recall; chrF only.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub recalls: Vec<f64>,
    /// BLEU only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub brevity_penalty: Option<f64>,
    pub hyp_len: u64,
    pub ref_len: u64,
    pub counts: Vec<NgramStat>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MetricError {
    #[error("{hyps} hypotheses but {refs} references")]
    LengthMismatch { hyps: usize, refs: usize },
    #[error("no segments to score")]
    EmptyInput,
    #[error("invalid configuration: {0}")]
    Config(String),
}

fn check_lengths<H: AsRef<str>, R: AsRef<str>>(hyps: &[H], refs: &[R]) -> Result<(), MetricError> {
    if hyps.len() != refs.len() {
        return Err(MetricError::LengthMismatch {
            hyps: hyps.len(),
            refs: refs.len(),
        });
    }
    if hyps.is_empty() {
        return Err(MetricError::EmptyInput);
    }
    Ok(())
}

fn is_punct(c: char) -> bool {
    c.is_ascii_punctuation() || matches!(c as u32, 0x0964 | 0x0965 | 0x11140..=0x11143 | 0x2010..=0x2027 | 0x2030..=0x205E)
}

pub fn bleu_tokens(text: &str, mode: BleuTokenize) -> Vec<String> {
    match mode {
        BleuTokenize::Whitespace => text.split_whitespace().map(String::from).collect(),
        BleuTokenize::WhitespacePunct => {
            let mut out = Vec::new();
            for word in text.split_whitespace() {
                let mut current = String::new();
                for c in word.chars() {
                    if is_punct(c) {
                        if !current.is_empty() {
                            out.push(std::mem::take(&mut current));
                        }
                        out.push(c.to_string());
                    } else {
                        current.push(c);
                    }
                }
                if !current.is_empty() {
                    out.push(current);
                }
            }
            out
        }
    }
}

fn ngram_counts<T: Eq + Hash>(items: &[T], n: usize) -> HashMap<&[T], u64> {
    let mut counts = HashMap::new();
    if n > 0 && items.len() >= n {
        for gram in items.windows(n) {
            *counts.entry(gram).or_insert(0) += 1;
        }
    }
    counts
}

/// Clipped matches, hypothesis total and reference total for order `n`.
fn order_stat<T: Eq + Hash>(hyp: &[T], reference: &[T], n: usize) -> NgramStat {
    let hyp_counts = ngram_counts(hyp, n);
    let ref_counts = ngram_counts(reference, n);
    let matches = hyp_counts
        .iter()
        .map(|(gram, count)| (*count).min(ref_counts.get(gram).copied().unwrap_or(0)))
        .sum();
    NgramStat {
        matches,
        total: hyp.len().saturating_sub(n - 1) as u64,
        reference: reference.len().saturating_sub(n - 1) as u64,
    }
}

fn add_stats(acc: &mut [NgramStat], seg: impl IntoIterator<Item = NgramStat>) {
    for (a, s) in acc.iter_mut().zip(seg) {
        a.matches += s.matches;
        a.total += s.total;
        a.reference += s.reference;
    }
}

/// Sums per-segment BLEU statistics over the corpus.
pub fn bleu_stats<H: AsRef<str>, R: AsRef<str>>(hyps: &[H], refs: &[R], cfg: &BleuConfig) -> (Vec<NgramStat>, u64, u64) {
    let mut acc = vec![NgramStat::default(); cfg.max_order];
    let (mut hyp_len, mut ref_len) = (0u64, 0u64);
    for (h, r) in hyps.iter().zip(refs) {
        let ht = bleu_tokens(h.as_ref(), cfg.tokenization);
        let rt = bleu_tokens(r.as_ref(), cfg.tokenization);
        hyp_len += ht.len() as u64;
        ref_len += rt.len() as u64;
        add_stats(&mut acc, (1..=cfg.max_order).map(|n| order_stat(&ht, &rt, n)));
    }
    (acc, hyp_len, ref_len)
}

pub fn brevity_penalty(hyp_len: u64, ref_len: u64) -> f64 {
    if hyp_len > ref_len {
        1.0
    } else if hyp_len == 0 {
        0.0
    } else {
        (1.0 - ref_len as f64 / hyp_len as f64).exp()
    }
}

/// Corpus BLEU on a 0–100 scale.
///
/// Orders for which the hypotheses contain no n-grams at all are left out of
/// the geometric mean, so short identical segments still score 100.
pub fn bleu<H: AsRef<str>, R: AsRef<str>>(hyps: &[H], refs: &[R], cfg: &BleuConfig) -> Result<ScoreReport, MetricError> {
    check_lengths(hyps, refs)?;
    if cfg.max_order == 0 {
        return Err(MetricError::Config("max_order must be at least 1".into()));
    }
    let (counts, hyp_len, ref_len) = bleu_stats(hyps, refs, cfg);
    let bp = brevity_penalty(hyp_len, ref_len);

    let mut precisions = Vec::with_capacity(counts.len());
    let mut smooth = 1.0;
    for stat in &counts {
        let p = if stat.total == 0 {
            0.0
        } else if stat.matches == 0 {
            match cfg.smoothing {
                Smoothing::Exponential => {
                    smooth *= 2.0;
                    1.0 / (smooth * stat.total as f64)
                }
                Smoothing::None => 0.0,
            }
        } else {
            stat.matches as f64 / stat.total as f64
        };
        precisions.push(p);
    }
    let effective: Vec<f64> = counts
        .iter()
        .zip(&precisions)
        .filter(|(stat, _)| stat.total > 0)
        .map(|(_, p)| *p)
        .collect();
    let score = if effective.is_empty() || effective.contains(&0.0) {
        0.0
    } else {
        let mean_log = effective.iter().map(|p| p.ln()).sum::<f64>() / effective.len() as f64;
        (bp * mean_log.exp() * 100.0).clamp(0.0, 100.0)
    };
    Ok(ScoreReport {
        metric: "bleu".into(),
        score,
        precisions,
        recalls: Vec::new(),
        brevity_penalty: Some(bp),
        hyp_len,
        ref_len,
        counts,
    })
}

fn chrf_chars(text: &str, remove_whitespace: bool) -> Vec<char> {
    if remove_whitespace {
        text.chars().filter(|c| !c.is_whitespace()).collect()
    } else {
        text.chars().collect()
    }
}

/// Corpus chrF (character n-grams only) on a 0–100 scale.
///
/// Precision and recall are averaged over orders that have n-grams on both
/// sides, then combined as `(1+β²)·P·R / (β²·P + R)`.
pub fn chrf<H: AsRef<str>, R: AsRef<str>>(hyps: &[H], refs: &[R], cfg: &ChrfConfig) -> Result<ScoreReport, MetricError> {
    check_lengths(hyps, refs)?;
    if cfg.char_order == 0 || cfg.beta.is_nan() || cfg.beta <= 0.0 {
        return Err(MetricError::Config("char_order must be ≥ 1 and beta > 0".into()));
    }
    let mut counts = vec![NgramStat::default(); cfg.char_order];
    let (mut hyp_len, mut ref_len) = (0u64, 0u64);
    for (h, r) in hyps.iter().zip(refs) {
        let hc = chrf_chars(h.as_ref(), cfg.remove_whitespace);
        let rc = chrf_chars(r.as_ref(), cfg.remove_whitespace);
        hyp_len += hc.len() as u64;
        ref_len += rc.len() as u64;
        add_stats(&mut counts, (1..=cfg.char_order).map(|n| order_stat(&hc, &rc, n)));
    }
    let mut precisions = Vec::new();
    let mut recalls = Vec::new();
    for stat in &counts {
        if stat.total > 0 && stat.reference > 0 {
            precisions.push(stat.matches as f64 / stat.total as f64);
            recalls.push(stat.matches as f64 / stat.reference as f64);
        }
    }
    let score = if precisions.is_empty() {
        0.0
    } else {
        let p = precisions.iter().sum::<f64>() / precisions.len() as f64;
        let r = recalls.iter().sum::<f64>() / recalls.len() as f64;
        f_score(p, r, cfg.beta) * 100.0
    };
    Ok(ScoreReport {
        metric: "chrf".into(),
        score: score.clamp(0.0, 100.0),
        precisions,
        recalls,
        brevity_penalty: None,
        hyp_len,
        ref_len,
        counts,
    })
}

impl ScoreReport {
    /// Mean precision over the orders that contributed (chrF's P).
    pub fn mean_precision(&self) -> f64 {
        mean(&self.precisions)
    }

    /// Mean recall over the orders that contributed (chrF's R).
    pub fn mean_recall(&self) -> f64 {
        mean(&self.recalls)
    }
}

fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        0.0
    } else {
        values.iter().sum::<f64>() / values.len() as f64
    }
}

fn f_score(p: f64, r: f64, beta: f64) -> f64 {
    let b2 = beta * beta;
    let denom = b2 * p + r;
    if denom == 0.0 {
        0.0
    } else {
        (1.0 + b2) * p * r / denom
    }
}
