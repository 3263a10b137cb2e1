//! Translator contract and a small statistical implementation of it.
//!
//! [`StatTranslator`] pairs an EM-trained word-translation table with a
//! bigram language model over the target side and decodes monotonically with
//! a beam. Any other system can take part in the pipeline by implementing
//! [`Translator`].

pub mod beam;
pub mod lexical;
pub mod lm;

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::lang::Direction;
use crate::textproc::{normalize, NormalizerConfig};

pub use beam::{decode_beam, DecodeConfig, DecodeError};
pub use lexical::{train_em, EmError, EmTrace, LexicalModel, SentencePair, NULL_WORD};
pub use lm::{train_lm, BigramLm, LmError};

#[derive(Debug, thiserror::Error)]
pub enum TranslatorError {
    #[error("no model trained for direction {0}")]
    ModelMissing(Direction),
    #[error(transparent)]
    Em(#[from] EmError),
    #[error(transparent)]
    Lm(#[from] LmError),
    #[error(transparent)]
    Decode(#[from] DecodeError),
    #[error("{file}:{line}: {message}")]
    Format { file: String, line: usize, message: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Other(String),
}

/// A system that can be trained on sentence pairs and then translate batches.
///
/// Implementations must return exactly one output per input, in input order.
pub trait Translator {
    fn train(&mut self, examples: &[(String, String)], direction: Direction) -> Result<(), TranslatorError>;
    fn translate(&self, batch: &[String], direction: Direction) -> Result<Vec<String>, TranslatorError>;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StatConfig {
    pub em_iterations: usize,
    pub use_null: bool,
    pub lm_alpha: f64,
    pub decode: DecodeConfig,
    pub normalizer: NormalizerConfig,
}

impl Default for StatConfig {
    fn default() -> Self {
        StatConfig {
            em_iterations: 10,
            use_null: true,
            lm_alpha: 0.1,
            decode: DecodeConfig::default(),
            normalizer: NormalizerConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DirectionModel {
    pub lex: LexicalModel,
    pub lm: BigramLm,
    pub trace: Option<EmTrace>,
}

#[derive(Debug, Clone, Default)]
pub struct StatTranslator {
    pub config: StatConfig,
    models: BTreeMap<Direction, DirectionModel>,
}

fn tokenize(text: &str, cfg: &NormalizerConfig) -> Vec<String> {
    normalize(text, cfg).split_whitespace().map(String::from).collect()
}

impl StatTranslator {
    pub fn new(config: StatConfig) -> Self {
        StatTranslator {
            config,
            models: BTreeMap::new(),
        }
    }

    pub fn model(&self, direction: Direction) -> Option<&DirectionModel> {
        self.models.get(&direction)
    }

    pub fn directions(&self) -> impl Iterator<Item = Direction> + '_ {
        self.models.keys().copied()
    }

    pub fn insert_model(&mut self, direction: Direction, model: DirectionModel) {
        self.models.insert(direction, model);
    }

    pub fn translate_tokens(&self, src: &[String], direction: Direction) -> Result<Vec<String>, TranslatorError> {
        let model = self.models.get(&direction).ok_or(TranslatorError::ModelMissing(direction))?;
        Ok(decode_beam(src, &model.lex, &model.lm, &self.config.decode)?)
    }

    /// Writes `<dir>.lex` and `<dir>.lm` for every trained direction.
    pub fn save(&self, dir: &Path) -> Result<Vec<PathBuf>, TranslatorError> {
        fs::create_dir_all(dir).map_err(|source| TranslatorError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        let mut written = Vec::new();
        for (direction, model) in &self.models {
            for (ext, body) in [("lex", lex_to_string(&model.lex)), ("lm", lm_to_string(&model.lm))] {
                let path = dir.join(format!("{direction}.{ext}"));
                fs::write(&path, body).map_err(|source| TranslatorError::Io {
                    path: path.clone(),
                    source,
                })?;
                written.push(path);
            }
        }
        Ok(written)
    }

    /// Loads every `<dir>.lex` / `<dir>.lm` pair found in `dir`.
    pub fn load(dir: &Path, config: StatConfig) -> Result<Self, TranslatorError> {
        let io = |source| TranslatorError::Io {
            path: dir.to_path_buf(),
            source,
        };
        let mut translator = StatTranslator::new(config);
        let mut names: Vec<PathBuf> = fs::read_dir(dir)
            .map_err(io)?
            .map(|e| e.map(|e| e.path()))
            .collect::<Result<_, _>>()
            .map_err(io)?;
        names.sort();
        for path in names {
            if path.extension().and_then(|e| e.to_str()) != Some("lex") {
                continue;
            }
            let Some(direction) = path
                .file_stem()
                .and_then(|s| s.to_str())
                .and_then(|s| s.parse::<Direction>().ok())
            else {
                continue;
            };
            let lm_path = path.with_extension("lm");
            let read = |p: &Path| {
                fs::read_to_string(p).map_err(|source| TranslatorError::Io {
                    path: p.to_path_buf(),
                    source,
                })
            };
            let lex = parse_lex(&read(&path)?, &path.display().to_string())?;
            let lm = parse_lm(&read(&lm_path)?, &lm_path.display().to_string())?;
            translator.insert_model(direction, DirectionModel { lex, lm, trace: None });
        }
        Ok(translator)
    }
}

impl Translator for StatTranslator {
    fn train(&mut self, examples: &[(String, String)], direction: Direction) -> Result<(), TranslatorError> {
        let norm = &self.config.normalizer;
        let pairs: Vec<SentencePair> = examples.iter().map(|(s, t)| (tokenize(s, norm), tokenize(t, norm))).collect();
        let (lex, trace) = train_em(&pairs, self.config.em_iterations, self.config.use_null)?;
        let targets: Vec<&[String]> = pairs.iter().map(|(_, t)| t.as_slice()).collect();
        let lm = train_lm(&targets, self.config.lm_alpha)?;
        self.models.insert(
            direction,
            DirectionModel {
                lex,
                lm,
                trace: Some(trace),
            },
        );
        Ok(())
    }

    fn translate(&self, batch: &[String], direction: Direction) -> Result<Vec<String>, TranslatorError> {
        let model = self.models.get(&direction).ok_or(TranslatorError::ModelMissing(direction))?;
        batch
            .iter()
            .map(|text| {
                let src = tokenize(text, &self.config.normalizer);
                Ok(decode_beam(&src, &model.lex, &model.lm, &self.config.decode)?.join(" "))
            })
            .collect()
    }
}

const FORMAT_VERSION: &str = "1";

pub fn lex_to_string(lex: &LexicalModel) -> String {
    let mut out = format!("version\t{FORMAT_VERSION}\nnull\t{}\n", lex.use_null);
    for (s, t, p) in lex.sorted_entries() {
        out.push_str(&format!("{s}\t{t}\t{p}\n"));
    }
    out
}

pub fn lm_to_string(lm: &BigramLm) -> String {
    let mut out = format!("version\t{FORMAT_VERSION}\nalpha\t{}\n", lm.alpha());
    for (h, w, p) in lm.seen_entries() {
        out.push_str(&format!("{h}\t{w}\t{p}\n"));
    }
    for (h, p) in lm.unseen_entries() {
        out.push_str(&format!("{h}\t{p}\n"));
    }
    out
}

struct Lines<'a> {
    file: &'a str,
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str, file: &'a str) -> Self {
        Lines {
            file,
            inner: text.lines().enumerate(),
        }
    }

    fn err(&self, line: usize, message: impl Into<String>) -> TranslatorError {
        TranslatorError::Format {
            file: self.file.to_string(),
            line,
            message: message.into(),
        }
    }

    fn header(&mut self, key: &str) -> Result<&'a str, TranslatorError> {
        match self.inner.next() {
            Some((i, line)) => match line.split_once('\t') {
                Some((k, v)) if k == key => Ok(v),
                _ => Err(self.err(i + 1, format!("expected `{key}` header"))),
            },
            None => Err(self.err(0, format!("missing `{key}` header"))),
        }
    }

    fn version(&mut self) -> Result<(), TranslatorError> {
        let v = self.header("version")?;
        if v != FORMAT_VERSION {
            return Err(self.err(1, format!("unsupported version {v}")));
        }
        Ok(())
    }
}

fn parse_prob(lines: &Lines, line: usize, s: &str) -> Result<f64, TranslatorError> {
    match s.parse::<f64>() {
        Ok(p) if (0.0..=1.0).contains(&p) => Ok(p),
        _ => Err(lines.err(line, format!("bad probability `{s}`"))),
    }
}

pub fn parse_lex(text: &str, file: &str) -> Result<LexicalModel, TranslatorError> {
    let mut lines = Lines::new(text, file);
    lines.version()?;
    let use_null = match lines.header("null")? {
        "true" => true,
        "false" => false,
        other => return Err(lines.err(2, format!("bad null flag `{other}`"))),
    };
    let mut rows: HashMap<String, HashMap<String, f64>> = HashMap::new();
    while let Some((i, line)) = lines.inner.next() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let [s, t, p] = fields[..] else {
            return Err(lines.err(i + 1, "expected src<TAB>tgt<TAB>prob"));
        };
        let p = parse_prob(&lines, i + 1, p)?;
        if rows.entry(s.to_string()).or_default().insert(t.to_string(), p).is_some() {
            return Err(lines.err(i + 1, format!("duplicate entry {s} {t}")));
        }
    }
    for (s, row) in &rows {
        let sum: f64 = row.values().sum();
        if (sum - 1.0).abs() > 1e-6 {
            return Err(lines.err(0, format!("row `{s}` sums to {sum}")));
        }
    }
    Ok(LexicalModel::from_rows(rows, use_null))
}

pub fn parse_lm(text: &str, file: &str) -> Result<BigramLm, TranslatorError> {
    let mut lines = Lines::new(text, file);
    lines.version()?;
    let alpha_text = lines.header("alpha")?;
    let alpha = match alpha_text.parse::<f64>() {
        Ok(a) if a.is_finite() && a >= 0.0 => a,
        _ => return Err(lines.err(2, format!("bad alpha `{alpha_text}`"))),
    };
    let mut seen: HashMap<String, HashMap<String, f64>> = HashMap::new();
    let mut unseen: HashMap<String, f64> = HashMap::new();
    while let Some((i, line)) = lines.inner.next() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        match fields[..] {
            [h, w, p] => {
                let p = parse_prob(&lines, i + 1, p)?;
                seen.entry(h.to_string()).or_default().insert(w.to_string(), p);
            }
            [h, p] => {
                let p = parse_prob(&lines, i + 1, p)?;
                unseen.insert(h.to_string(), p);
            }
            _ => return Err(lines.err(i + 1, "expected w1<TAB>w2<TAB>prob or w1<TAB>prob")),
        }
    }
    if let Some(h) = seen.keys().find(|h| !unseen.contains_key(*h)) {
        return Err(lines.err(0, format!("history `{h}` has no unseen-mass line")));
    }
    Ok(BigramLm::from_tables(alpha, seen, unseen))
}
