//! Monotone beam decoding over a word lattice.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::lexical::LexicalModel;
use super::lm::{BigramLm, BOS, EOS};

pub const DEFAULT_BEAM_WIDTH: usize = 5;
pub const DEFAULT_MAX_LEN: usize = 128;
pub const DEFAULT_CANDIDATES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecodeConfig {
    pub beam_width: usize,
    pub max_len: usize,
    pub candidates_per_word: usize,
    pub length_penalty: f64,
}

impl Default for DecodeConfig {
    fn default() -> Self {
        DecodeConfig {
            beam_width: DEFAULT_BEAM_WIDTH,
            max_len: DEFAULT_MAX_LEN,
            candidates_per_word: DEFAULT_CANDIDATES,
            length_penalty: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DecodeError {
    #[error("beam_width must be at least 1")]
    ZeroBeam,
    #[error("candidates_per_word must be at least 1")]
    ZeroCandidates,
    #[error("max_len must be at least 1")]
    ZeroMaxLen,
    #[error("length_penalty must be finite")]
    BadLengthPenalty,
}

impl DecodeConfig {
    pub fn validate(&self) -> Result<(), DecodeError> {
        if self.beam_width == 0 {
            return Err(DecodeError::ZeroBeam);
        }
        if self.candidates_per_word == 0 {
            return Err(DecodeError::ZeroCandidates);
        }
        if self.max_len == 0 {
            return Err(DecodeError::ZeroMaxLen);
        }
        if !self.length_penalty.is_finite() {
            return Err(DecodeError::BadLengthPenalty);
        }
        Ok(())
    }
}

/// Translation options for one source word as `(target, ln t)`.
/// A word without a table row is copied through with `ln t = 0`.
pub fn candidate_options(src_word: &str, lex: &LexicalModel, k: usize) -> Vec<(String, f64)> {
    let cands = lex.candidates(src_word, k);
    if cands.is_empty() {
        return vec![(src_word.to_string(), 0.0)];
    }
    cands.into_iter().map(|(w, p)| (w.to_string(), p.ln())).collect()
}

/// Full model score of a complete target sequence given the per-word translation scores.
/// Terms are added in the same order the decoder adds them.
pub fn sequence_score(tgt: &[String], lex_scores: &[f64], lm: &BigramLm, length_penalty: f64) -> f64 {
    let mut score = 0.0;
    let mut prev = BOS;
    for (w, lex_score) in tgt.iter().zip(lex_scores) {
        score = score + lex_score + lm.log_prob(prev, w) + length_penalty;
        prev = w;
    }
    if !tgt.is_empty() {
        score += lm.log_prob(prev, EOS);
    }
    score
}

#[derive(Debug, Clone)]
struct Hyp {
    tokens: Vec<String>,
    score: f64,
}

fn rank(a: &Hyp, b: &Hyp) -> Ordering {
    b.score.total_cmp(&a.score).then_with(|| a.tokens.cmp(&b.tokens))
}

pub fn decode_beam(src: &[String], lex: &LexicalModel, lm: &BigramLm, cfg: &DecodeConfig) -> Result<Vec<String>, DecodeError> {
    cfg.validate()?;
    let src = &src[..src.len().min(cfg.max_len)];
    if src.is_empty() {
        return Ok(Vec::new());
    }
    let mut beam = vec![Hyp {
        tokens: Vec::new(),
        score: 0.0,
    }];
    for (pos, word) in src.iter().enumerate() {
        let last = pos + 1 == src.len();
        let options = candidate_options(word, lex, cfg.candidates_per_word);
        let mut next = Vec::with_capacity(beam.len() * options.len());
        for hyp in &beam {
            let prev = hyp.tokens.last().map_or(BOS, String::as_str);
            for (w, lex_score) in &options {
                let mut score = hyp.score + lex_score + lm.log_prob(prev, w) + cfg.length_penalty;
                if last {
                    score += lm.log_prob(w, EOS);
                }
                let mut tokens = Vec::with_capacity(hyp.tokens.len() + 1);
                tokens.extend(hyp.tokens.iter().cloned());
                tokens.push(w.clone());
                next.push(Hyp { tokens, score });
            }
        }
        next.sort_by(rank);
        next.truncate(cfg.beam_width);
        beam = next;
    }
    Ok(beam.swap_remove(0).tokens)
}
