//! Word-translation table estimated with EM over word alignments (IBM Model 1).

use std::collections::{BTreeMap, BTreeSet, HashMap};

pub const NULL_WORD: &str = "<null>";

/// `t(tgt | src)` table. Every stored source row sums to one.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LexicalModel {
    rows: HashMap<String, HashMap<String, f64>>,
    pub use_null: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmTrace {
    /// Corpus log-likelihood after each iteration (uniform alignment prior, no length term).
    pub log_likelihood: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EmError {
    #[error("no sentence pairs to train on")]
    EmptyCorpus,
    #[error("iterations must be at least 1")]
    NoIterations,
}

pub type SentencePair = (Vec<String>, Vec<String>);

impl LexicalModel {
    pub fn prob(&self, tgt: &str, src: &str) -> f64 {
        self.rows.get(src).and_then(|row| row.get(tgt)).copied().unwrap_or(0.0)
    }

    pub fn knows_source(&self, src: &str) -> bool {
        self.rows.contains_key(src)
    }

    pub fn row(&self, src: &str) -> Option<&HashMap<String, f64>> {
        self.rows.get(src)
    }

    pub fn source_words(&self) -> impl Iterator<Item = &str> {
        self.rows.keys().map(String::as_str)
    }

    /// Top `k` targets for `src` by probability, ties broken by the target word.
    pub fn candidates(&self, src: &str, k: usize) -> Vec<(&str, f64)> {
        let Some(row) = self.rows.get(src) else {
            return Vec::new();
        };
        let mut cands: Vec<(&str, f64)> = row.iter().map(|(t, p)| (t.as_str(), *p)).collect();
        cands.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        cands.truncate(k);
        cands
    }

    pub(crate) fn from_rows(rows: HashMap<String, HashMap<String, f64>>, use_null: bool) -> Self {
        LexicalModel { rows, use_null }
    }

    /// Entries sorted by source then target, for stable file output.
    pub fn sorted_entries(&self) -> Vec<(&str, &str, f64)> {
        let mut out: Vec<(&str, &str, f64)> = self
            .rows
            .iter()
            .flat_map(|(s, row)| row.iter().map(move |(t, p)| (s.as_str(), t.as_str(), *p)))
            .collect();
        out.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        out
    }

    fn sources<'a>(&self, src: &'a [String]) -> Vec<&'a str> {
        let mut words: Vec<&str> = Vec::with_capacity(src.len() + 1);
        if self.use_null {
            words.push(NULL_WORD);
        }
        words.extend(src.iter().map(String::as_str));
        words
    }

    /// `Σ_pairs Σ_j ln( (1/|src|) Σ_i t(f_j | e_i) )`, with the null word counted in `|src|`.
    pub fn log_likelihood(&self, pairs: &[SentencePair]) -> f64 {
        let mut ll = 0.0;
        for (src, tgt) in pairs {
            let sources = self.sources(src);
            if sources.is_empty() {
                continue;
            }
            let norm = sources.len() as f64;
            for f in tgt {
                let total: f64 = sources.iter().map(|e| self.prob(f, e)).sum();
                ll += (total / norm).ln();
            }
        }
        ll
    }
}

/// Runs `iterations` rounds of EM starting from a uniform table.
pub fn train_em(pairs: &[SentencePair], iterations: usize, use_null: bool) -> Result<(LexicalModel, EmTrace), EmError> {
    if pairs.is_empty() {
        return Err(EmError::EmptyCorpus);
    }
    if iterations == 0 {
        return Err(EmError::NoIterations);
    }
    let tgt_vocab: BTreeSet<&str> = pairs.iter().flat_map(|(_, t)| t.iter().map(String::as_str)).collect();
    if tgt_vocab.is_empty() {
        return Err(EmError::EmptyCorpus);
    }
    let uniform = 1.0 / tgt_vocab.len() as f64;

    // Uniform start, stored only for co-occurring pairs (no other entry is ever read).
    let mut model = LexicalModel {
        rows: HashMap::new(),
        use_null,
    };
    for (src, tgt) in pairs {
        for e in model.sources(src).into_iter().map(String::from).collect::<Vec<_>>() {
            let row = model.rows.entry(e).or_default();
            for f in tgt {
                row.insert(f.clone(), uniform);
            }
        }
    }

    let mut trace = EmTrace {
        log_likelihood: Vec::with_capacity(iterations),
    };
    for _ in 0..iterations {
        // Expected counts, accumulated in sorted maps so summation order is fixed.
        let mut counts: BTreeMap<&str, BTreeMap<&str, f64>> = BTreeMap::new();
        for (src, tgt) in pairs {
            let sources = model.sources(src);
            for f in tgt {
                let z: f64 = sources.iter().map(|e| model.prob(f, e)).sum();
                if z == 0.0 {
                    continue;
                }
                for e in &sources {
                    let posterior = model.prob(f, e) / z;
                    *counts.entry(e).or_default().entry(f.as_str()).or_default() += posterior;
                }
            }
        }
        let mut rows: HashMap<String, HashMap<String, f64>> = HashMap::with_capacity(counts.len());
        for (e, row) in counts {
            let total: f64 = row.values().sum();
            if total == 0.0 {
                continue;
            }
            rows.insert(
                e.to_string(),
                row.into_iter()
                    .filter(|(_, c)| *c > 0.0)
                    .map(|(f, c)| (f.to_string(), c / total))
                    .collect(),
            );
        }
        model.rows = rows;
        trace.log_likelihood.push(model.log_likelihood(pairs));
    }
    Ok((model, trace))
}
