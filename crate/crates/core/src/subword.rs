//! Pair-merge (BPE-style) subword tokenizer.
//!
//! Words are split on whitespace; the first character of every word carries
//! the boundary marker `▁`, so `ab cd` starts out as `▁a b ▁c d`. Training
//! repeatedly merges the most frequent adjacent pair, breaking ties by the
//! lexicographic order of `(left, right)`.

use std::collections::{BTreeSet, HashMap};
use std::path::Path;

use crate::lang::Lang;

pub const PAD_ID: u32 = 0;
pub const UNK_ID: u32 = 1;
pub const BOS_ID: u32 = 2;
pub const EOS_ID: u32 = 3;

pub const SPECIAL_TOKENS: [&str; 4] = ["<pad>", "<unk>", "<s>", "</s>"];
pub const WORD_BOUNDARY: char = '\u{2581}';

/// Vocabulary sizes the tokenizer is exercised with.
pub const STANDARD_SIZES: [usize; 5] = [1000, 2000, 5000, 10000, 20000];

const FILE_VERSION: &str = "1";

/// Fixed tokens at the start of every vocabulary: specials, then language prefixes.
fn reserved_tokens() -> Vec<String> {
    SPECIAL_TOKENS
        .iter()
        .copied()
        .chain(Lang::ALL.iter().map(|l| l.prefix_token()))
        .map(String::from)
        .collect()
}

pub fn reserved_len() -> usize {
    SPECIAL_TOKENS.len() + Lang::ALL.len()
}

pub fn prefix_id(lang: Lang) -> u32 {
    let pos = Lang::ALL.iter().position(|l| *l == lang).expect("lang listed in ALL");
    (SPECIAL_TOKENS.len() + pos) as u32
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SubwordError {
    #[error("target size {target} is too small: alphabet and reserved tokens already need {required}")]
    TargetTooSmall { target: usize, required: usize },
    #[error("training corpus contains no words")]
    EmptyCorpus,
    #[error("unknown token id {0}")]
    UnknownId(u32),
    #[error("vocab file line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("reading vocab: {0}")]
    Io(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocab {
    tokens: Vec<String>,
    ids: HashMap<String, u32>,
    merges: Vec<(String, String)>,
    ranks: HashMap<(String, String), usize>,
    alphabet_len: usize,
    target_size: usize,
}

impl Vocab {
    fn assemble(alphabet: Vec<String>, merges: Vec<(String, String)>, target_size: usize) -> Result<Self, String> {
        let alphabet_len = alphabet.len();
        let mut tokens = reserved_tokens();
        tokens.extend(alphabet);
        tokens.extend(merges.iter().map(|(l, r)| format!("{l}{r}")));
        let mut ids = HashMap::with_capacity(tokens.len());
        for (id, token) in tokens.iter().enumerate() {
            if ids.insert(token.clone(), id as u32).is_some() {
                return Err(format!("token `{token}` appears twice"));
            }
        }
        let ranks = merges.iter().cloned().enumerate().map(|(rank, pair)| (pair, rank)).collect();
        Ok(Vocab {
            tokens,
            ids,
            merges,
            ranks,
            alphabet_len,
            target_size,
        })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn target_size(&self) -> usize {
        self.target_size
    }

    pub fn alphabet_len(&self) -> usize {
        self.alphabet_len
    }

    pub fn merges(&self) -> &[(String, String)] {
        &self.merges
    }

    pub fn token(&self, id: u32) -> Option<&str> {
        self.tokens.get(id as usize).map(String::as_str)
    }

    pub fn id(&self, token: &str) -> Option<u32> {
        self.ids.get(token).copied()
    }

    /// Splits one word into subword pieces; unknown characters come back as `<unk>`.
    fn word_pieces(&self, word: &str) -> Vec<u32> {
        let mut symbols: Vec<Option<String>> = initial_symbols(word)
            .into_iter()
            .map(|s| self.ids.contains_key(&s).then_some(s))
            .collect();
        loop {
            let best = symbols
                .windows(2)
                .enumerate()
                .filter_map(|(i, pair)| match (&pair[0], &pair[1]) {
                    (Some(l), Some(r)) => self.ranks.get(&(l.clone(), r.clone())).map(|rank| (*rank, i)),
                    _ => None,
                })
                .min();
            let Some((rank, _)) = best else { break };
            let (left, right) = &self.merges[rank];
            let mut merged = Vec::with_capacity(symbols.len());
            let mut i = 0;
            while i < symbols.len() {
                if i + 1 < symbols.len()
                    && symbols[i].as_deref() == Some(left.as_str())
                    && symbols[i + 1].as_deref() == Some(right.as_str())
                {
                    merged.push(Some(format!("{left}{right}")));
                    i += 2;
                } else {
                    merged.push(symbols[i].take());
                    i += 1;
                }
            }
            symbols = merged;
        }
        symbols
            .into_iter()
            .map(|s| s.and_then(|s| self.ids.get(&s).copied()).unwrap_or(UNK_ID))
            .collect()
    }

    pub fn encode(&self, text: &str, cfg: &EncodeConfig) -> Vec<u32> {
        encode(text, self, cfg)
    }

    pub fn decode(&self, ids: &[u32]) -> Result<String, SubwordError> {
        decode(ids, self)
    }

    /// Text form: `version`, `size`, reserved tokens, alphabet symbols, merges.
    pub fn to_file_string(&self) -> String {
        let mut out = format!("version\t{FILE_VERSION}\nsize\t{}\n", self.target_size);
        for token in &self.tokens[..reserved_len()] {
            out.push_str(&format!("special\t{token}\n"));
        }
        for token in &self.tokens[reserved_len()..reserved_len() + self.alphabet_len] {
            out.push_str(&format!("symbol\t{token}\n"));
        }
        for (l, r) in &self.merges {
            out.push_str(&format!("merge\t{l}\t{r}\n"));
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, SubwordError> {
        let mut lines = text.lines().enumerate();
        let err = |line: usize, message: &str| SubwordError::Format {
            line: line + 1,
            message: message.to_string(),
        };
        match lines.next() {
            Some((_, l)) if l == format!("version\t{FILE_VERSION}") => {}
            _ => return Err(err(0, "expected `version\\t1` header")),
        }
        let mut target_size = None;
        let mut specials = Vec::new();
        let mut alphabet = Vec::new();
        let mut merges = Vec::new();
        for (idx, line) in lines {
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            match fields[..] {
                ["size", n] => target_size = Some(n.parse().map_err(|_| err(idx, "bad size"))?),
                ["special", t] => specials.push(t.to_string()),
                ["symbol", s] if !s.is_empty() => alphabet.push(s.to_string()),
                ["merge", l, r] if !l.is_empty() && !r.is_empty() => merges.push((l.to_string(), r.to_string())),
                _ => return Err(err(idx, "unrecognized line")),
            }
        }
        if specials != reserved_tokens() {
            return Err(err(0, "reserved tokens do not match this version"));
        }
        let target_size = target_size.ok_or_else(|| err(0, "missing size line"))?;
        Vocab::assemble(alphabet, merges, target_size).map_err(|m| err(0, &m))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, SubwordError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| SubwordError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

fn initial_symbols(word: &str) -> Vec<String> {
    word.chars()
        .enumerate()
        .map(|(i, c)| {
            if i == 0 {
                format!("{WORD_BOUNDARY}{c}")
            } else {
                c.to_string()
            }
        })
        .collect()
}

/// Trains a vocabulary of at most `target_size` tokens.
///
/// Stops early once no adjacent pair occurs at least twice. A pair whose
/// concatenation already exists as a token is never merged, so the merge list
/// and the token table stay in one-to-one correspondence.
pub fn train_vocab<S: AsRef<str>>(corpus: &[S], target_size: usize) -> Result<Vocab, SubwordError> {
    let mut word_counts: HashMap<&str, u64> = HashMap::new();
    for sentence in corpus {
        for word in sentence.as_ref().split_whitespace() {
            *word_counts.entry(word).or_default() += 1;
        }
    }
    if word_counts.is_empty() {
        return Err(SubwordError::EmptyCorpus);
    }
    // Sorted so that training never depends on hash order.
    let mut words: Vec<(Vec<String>, u64)> = word_counts.into_iter().map(|(w, n)| (initial_symbols(w), n)).collect();
    words.sort();

    let alphabet: BTreeSet<String> = words.iter().flat_map(|(syms, _)| syms.iter().cloned()).collect();
    let required = reserved_len() + alphabet.len() + 1;
    if target_size < required {
        return Err(SubwordError::TargetTooSmall {
            target: target_size,
            required,
        });
    }
    let mut known: BTreeSet<String> = reserved_tokens().into_iter().chain(alphabet.iter().cloned()).collect();
    let mut merges: Vec<(String, String)> = Vec::new();

    while known.len() < target_size {
        let mut pair_counts: HashMap<(&str, &str), u64> = HashMap::new();
        for (syms, n) in &words {
            for pair in syms.windows(2) {
                *pair_counts.entry((pair[0].as_str(), pair[1].as_str())).or_default() += n;
            }
        }
        let best = pair_counts
            .into_iter()
            .filter(|((l, r), _)| !known.contains(&format!("{l}{r}")))
            .max_by(|(pa, ca), (pb, cb)| ca.cmp(cb).then_with(|| pb.cmp(pa)));
        let Some(((left, right), count)) = best else { break };
        if count < 2 {
            break;
        }
        let (left, right) = (left.to_string(), right.to_string());
        let joined = format!("{left}{right}");
        for (syms, _) in words.iter_mut() {
            if syms.len() < 2 {
                continue;
            }
            let mut merged = Vec::with_capacity(syms.len());
            let mut i = 0;
            while i < syms.len() {
                if i + 1 < syms.len() && syms[i] == left && syms[i + 1] == right {
                    merged.push(joined.clone());
                    i += 2;
                } else {
                    merged.push(std::mem::take(&mut syms[i]));
                    i += 1;
                }
            }
            *syms = merged;
        }
        known.insert(joined);
        merges.push((left, right));
    }

    Vocab::assemble(alphabet.into_iter().collect(), merges, target_size)
        .map_err(|message| SubwordError::Format { line: 0, message })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EncodeConfig {
    pub max_len: usize,
    pub add_bos_eos: bool,
    pub language_prefix: Option<Lang>,
}

impl Default for EncodeConfig {
    fn default() -> Self {
        EncodeConfig {
            max_len: 128,
            add_bos_eos: true,
            language_prefix: None,
        }
    }
}

impl EncodeConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.add_bos_eos && self.max_len < 2 {
            return Err(format!("max_len {} cannot hold both <s> and </s>", self.max_len));
        }
        Ok(())
    }
}

/// `[prefix?, <s>?, pieces…, </s>?]`, truncated to `max_len` with `</s>` kept.
///
/// A whitespace-separated word equal to a language prefix token (`<2bn>`)
/// encodes to that token's id.
pub fn encode(text: &str, vocab: &Vocab, cfg: &EncodeConfig) -> Vec<u32> {
    let mut ids = Vec::new();
    if let Some(lang) = cfg.language_prefix {
        ids.push(prefix_id(lang));
    }
    if cfg.add_bos_eos {
        ids.push(BOS_ID);
    }
    for word in text.split_whitespace() {
        match Lang::ALL.iter().find(|l| l.prefix_token() == word) {
            Some(lang) => ids.push(prefix_id(*lang)),
            None => ids.extend(vocab.word_pieces(word)),
        }
    }
    if cfg.add_bos_eos {
        if ids.len() >= cfg.max_len {
            ids.truncate(cfg.max_len.saturating_sub(1));
        }
        if cfg.max_len > 0 {
            ids.push(EOS_ID);
        }
    } else {
        ids.truncate(cfg.max_len);
    }
    ids
}

/// Drops reserved tokens, joins pieces and turns boundary markers back into spaces.
pub fn decode(ids: &[u32], vocab: &Vocab) -> Result<String, SubwordError> {
    let mut out = String::new();
    for &id in ids {
        let token = vocab.token(id).ok_or(SubwordError::UnknownId(id))?;
        if (id as usize) < reserved_len() {
            continue;
        }
        out.push_str(token);
    }
    Ok(out.replace(WORD_BOUNDARY, " ").trim_start().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn marked(s: &str) -> String {
        format!("{WORD_BOUNDARY}{s}")
    }

    #[test]
    fn reserved_ids_are_fixed() {
        assert_eq!(reserved_len(), 7);
        assert_eq!(prefix_id(Lang::Ccp), 4);
        assert_eq!(prefix_id(Lang::Bn), 5);
        assert_eq!(prefix_id(Lang::En), 6);
        let vocab = train_vocab(&["a"], 9).unwrap();
        for (id, tok) in SPECIAL_TOKENS.iter().enumerate() {
            assert_eq!(vocab.id(tok), Some(id as u32));
        }
        assert_eq!(vocab.token(5), Some("<2bn>"));
    }

    #[test]
    fn first_merge_on_toy_corpus() {
        // Hand count over "▁a a a b" (x2): (▁a,a)=2, (a,a)=2, (a,b)=2.
        // Tie broken lexicographically: "a" < "▁a", so (a,a) wins.
        let vocab = train_vocab(&["aaab", "aaab"], reserved_len() + 3 + 1).unwrap();
        assert_eq!(vocab.merges(), &[("a".to_string(), "a".to_string())]);
    }

    #[test]
    fn single_character_corpus_has_no_merges() {
        let vocab = train_vocab(&["a"], 100).unwrap();
        assert!(vocab.merges().is_empty());
        assert_eq!(vocab.len(), reserved_len() + 1);
        assert_eq!(vocab.id(&marked("a")), Some(reserved_len() as u32));
    }

    #[test]
    fn training_is_deterministic() {
        let corpus = ["the cat sat", "the hat sat on the mat", "a cat and a hat"];
        let a = train_vocab(&corpus, 40).unwrap();
        let b = train_vocab(&corpus, 40).unwrap();
        assert_eq!(a.merges(), b.merges());
        assert!(a.len() <= 40);
    }

    #[test]
    fn target_too_small() {
        assert_eq!(
            train_vocab(&["ab"], 8).unwrap_err(),
            SubwordError::TargetTooSmall { target: 8, required: 10 }
        );
        assert_eq!(train_vocab::<&str>(&[], 100).unwrap_err(), SubwordError::EmptyCorpus);
        assert_eq!(train_vocab(&["   "], 100).unwrap_err(), SubwordError::EmptyCorpus);
    }

    #[test]
    fn encode_examples() {
        let vocab = train_vocab(&["ab ab abc"], 30).unwrap();
        let cfg = EncodeConfig::default();
        assert_eq!(encode("", &vocab, &cfg), vec![BOS_ID, EOS_ID]);
        let with_prefix = EncodeConfig {
            language_prefix: Some(Lang::Bn),
            ..cfg
        };
        let ids = encode("ab", &vocab, &with_prefix);
        assert_eq!(ids[0], prefix_id(Lang::Bn));
        assert_eq!(ids[1], BOS_ID);
        assert_eq!(*ids.last().unwrap(), EOS_ID);
        assert_eq!(encode("<2ccp> ab", &vocab, &cfg)[1], prefix_id(Lang::Ccp));
    }

    #[test]
    fn unknown_characters_become_unk() {
        let vocab = train_vocab(&["ab ab"], 30).unwrap();
        let plain = EncodeConfig {
            add_bos_eos: false,
            ..Default::default()
        };
        let ids = encode("axb", &vocab, &plain);
        assert!(ids.contains(&UNK_ID));
        assert_eq!(decode(&ids, &vocab).unwrap(), "ab");
    }

    #[test]
    fn decode_examples() {
        let vocab = train_vocab(&["ab ab"], 30).unwrap();
        assert_eq!(decode(&[BOS_ID, EOS_ID], &vocab).unwrap(), "");
        assert_eq!(decode(&[PAD_ID, PAD_ID], &vocab).unwrap(), "");
        let ab = vocab.id(&marked("ab")).expect("merged token");
        assert_eq!(decode(&[ab], &vocab).unwrap(), "ab");
        assert_eq!(decode(&[9999], &vocab).unwrap_err(), SubwordError::UnknownId(9999));
    }

    #[test]
    fn truncation_keeps_eos() {
        let vocab = train_vocab(&["a b c d e f"], 30).unwrap();
        let cfg = EncodeConfig {
            max_len: 4,
            ..Default::default()
        };
        let ids = encode("a b c d e f", &vocab, &cfg);
        assert_eq!(ids.len(), 4);
        assert_eq!(ids[0], BOS_ID);
        assert_eq!(ids[3], EOS_ID);
        let no_specials = EncodeConfig {
            max_len: 3,
            add_bos_eos: false,
            language_prefix: None,
        };
        assert_eq!(encode("a b c d e f", &vocab, &no_specials).len(), 3);
        assert!(EncodeConfig {
            max_len: 1,
            ..Default::default()
        }
        .validate()
        .is_err());
    }

    #[test]
    fn file_round_trip() {
        let vocab = train_vocab(&["the cat sat", "the hat sat"], 30).unwrap();
        let text = vocab.to_file_string();
        assert!(text.starts_with("version\t1\n"));
        let back = Vocab::parse(&text).unwrap();
        assert_eq!(back, vocab);
        assert!(Vocab::parse("version\t2\n").is_err());
        assert!(Vocab::parse("version\t1\nsize\t10\nbogus\n").is_err());
    }

    fn corpus() -> impl Strategy<Value = Vec<String>> {
        prop::collection::vec("[a-e]{1,6}( [a-e]{1,6}){0,5}", 1..20)
    }

    proptest! {
        #[test]
        fn merge_count_matches_vocab_growth(corpus in corpus(), size in 20usize..80) {
            if let Ok(vocab) = train_vocab(&corpus, size) {
                prop_assert!(vocab.len() <= size);
                prop_assert_eq!(vocab.merges().len(), vocab.len() - vocab.alphabet_len() - reserved_len());
                for id in 0..vocab.len() as u32 {
                    prop_assert_eq!(vocab.id(vocab.token(id).unwrap()), Some(id));
                }
            }
        }

        #[test]
        fn decode_inverts_encode(corpus in corpus(), size in 20usize..80, pick in 0usize..20) {
            if let Ok(vocab) = train_vocab(&corpus, size) {
                let text = &corpus[pick % corpus.len()];
                let ids = encode(text, &vocab, &EncodeConfig::default());
                prop_assert!(ids.len() <= 128);
                prop_assert_eq!(decode(&ids, &vocab).unwrap(), text.split_whitespace().collect::<Vec<_>>().join(" "));
            }
        }
    }
}
