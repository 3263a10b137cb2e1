//! Corpus records, JSONL ingestion, deduplication, splitting, multilingual
//! training-pair construction and distribution statistics.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::io::{BufRead, Write};
use std::path::Path;
use std::str::FromStr;

use rand::seq::{index, SliceRandom};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::lang::{Direction, Lang};
use crate::textproc::{normalize, NormalizerConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Source {
    #[serde(rename = "UNDocs")]
    UnDocs,
    Dictionary,
    LocalExpert,
    NonExpert,
    Benchmark,
    Synthetic,
    Other,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Dev,
    Test,
    #[default]
    Unassigned,
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Split::Train => "train",
            Split::Dev => "dev",
            Split::Test => "test",
            Split::Unassigned => "unassigned",
        })
    }
}

impl FromStr for Split {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "train" => Ok(Split::Train),
            "dev" => Ok(Split::Dev),
            "test" => Ok(Split::Test),
            "unassigned" => Ok(Split::Unassigned),
            _ => Err(format!("unknown split `{s}`")),
        }
    }
}

/// One aligned sentence pair (or triple, when English is present).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParallelRecord {
    pub id: String,
    pub ccp: String,
    pub bn: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub en: Option<String>,
    pub source: Source,
    #[serde(default)]
    pub split: Split,
    pub synthetic: bool,
}

impl ParallelRecord {
    pub fn text(&self, lang: Lang) -> Option<&str> {
        match lang {
            Lang::Ccp => Some(&self.ccp),
            Lang::Bn => Some(&self.bn),
            Lang::En => self.en.as_deref(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonolingualRecord {
    pub id: String,
    pub lang: Lang,
    pub text: String,
    pub source: String,
}

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("line {line}: {message}")]
    ParseError { line: usize, message: String },
    #[error("line {line}: missing or empty `{lang}` text")]
    MissingLanguage { line: usize, lang: Lang },
    #[error("split asks for {requested} records but only {available} are eligible")]
    SpecTooLarge { requested: usize, available: usize },
    #[error("direction {0} has no contributing records")]
    EmptyDirection(Direction),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Deserialize)]
struct RawParallel {
    id: Option<String>,
    ccp: Option<String>,
    bn: Option<String>,
    en: Option<String>,
    source: Source,
    synthetic: Option<bool>,
    split: Option<Split>,
}

#[derive(Deserialize)]
struct RawMono {
    id: Option<String>,
    lang: Lang,
    text: Option<String>,
    source: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Parallel,
    Mono,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Records {
    Parallel(Vec<ParallelRecord>),
    Mono(Vec<MonolingualRecord>),
}

fn content_id(parts: &[&str], ordinal: usize) -> String {
    let mut hasher = Sha256::new();
    for part in parts {
        hasher.update(part.as_bytes());
        hasher.update([0u8]);
    }
    let digest = hasher.finalize();
    let hex: String = digest[..8].iter().map(|b| format!("{b:02x}")).collect();
    format!("{hex}-{ordinal}")
}

fn non_empty(text: Option<String>, cfg: &NormalizerConfig) -> Option<String> {
    text.map(|t| normalize(&t, cfg)).filter(|t| !t.is_empty())
}

/// Reads parallel JSONL. Texts are normalized; missing ids are derived from
/// a content hash plus the record's line ordinal.
pub fn read_parallel(reader: impl BufRead) -> Result<Vec<ParallelRecord>, CorpusError> {
    let cfg = NormalizerConfig::default();
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawParallel = serde_json::from_str(&line).map_err(|e| CorpusError::ParseError {
            line: line_no,
            message: e.to_string(),
        })?;
        let ccp = non_empty(raw.ccp, &cfg).ok_or(CorpusError::MissingLanguage {
            line: line_no,
            lang: Lang::Ccp,
        })?;
        let bn = non_empty(raw.bn, &cfg).ok_or(CorpusError::MissingLanguage {
            line: line_no,
            lang: Lang::Bn,
        })?;
        let en = non_empty(raw.en, &cfg);
        let is_synthetic = raw.source == Source::Synthetic;
        if raw.synthetic.is_some_and(|flag| flag != is_synthetic) {
            return Err(CorpusError::ParseError {
                line: line_no,
                message: "`synthetic` must be true exactly when source is Synthetic".into(),
            });
        }
        let id = raw
            .id
            .filter(|id| !id.is_empty())
            .unwrap_or_else(|| content_id(&[&ccp, &bn, en.as_deref().unwrap_or("")], line_no));
        out.push(ParallelRecord {
            id,
            ccp,
            bn,
            en,
            source: raw.source,
            split: raw.split.unwrap_or_default(),
            synthetic: is_synthetic,
        });
    }
    Ok(out)
}

pub fn read_mono(reader: impl BufRead) -> Result<Vec<MonolingualRecord>, CorpusError> {
    let cfg = NormalizerConfig::default();
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawMono = serde_json::from_str(&line).map_err(|e| CorpusError::ParseError {
            line: line_no,
            message: e.to_string(),
        })?;
        let text = non_empty(raw.text, &cfg).ok_or(CorpusError::MissingLanguage {
            line: line_no,
            lang: raw.lang,
        })?;
        let id = raw
            .id
            .filter(|id| !id.is_empty())
            .unwrap_or_else(|| content_id(&[raw.lang.code(), &text], line_no));
        out.push(MonolingualRecord {
            id,
            lang: raw.lang,
            text,
            source: raw.source,
        });
    }
    Ok(out)
}

pub fn ingest(path: impl AsRef<Path>, format: Format) -> Result<Records, CorpusError> {
    let reader = std::io::BufReader::new(std::fs::File::open(path)?);
    Ok(match format {
        Format::Parallel => Records::Parallel(read_parallel(reader)?),
        Format::Mono => Records::Mono(read_mono(reader)?),
    })
}

pub fn ingest_parallel(path: impl AsRef<Path>) -> Result<Vec<ParallelRecord>, CorpusError> {
    read_parallel(std::io::BufReader::new(std::fs::File::open(path)?))
}

pub fn ingest_mono(path: impl AsRef<Path>) -> Result<Vec<MonolingualRecord>, CorpusError> {
    read_mono(std::io::BufReader::new(std::fs::File::open(path)?))
}

/// Writes one JSON object per line.
pub fn write_jsonl<T: Serialize>(mut writer: impl Write, records: &[T]) -> std::io::Result<()> {
    for record in records {
        serde_json::to_writer(&mut writer, record)?;
        writer.write_all(b"\n")?;
    }
    writer.flush()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DedupeReport {
    pub input: usize,
    pub kept: usize,
    pub removed: usize,
}

/// Drops repeated `(ccp, bn)` pairs, keeping the first occurrence.
pub fn dedupe(records: Vec<ParallelRecord>) -> (Vec<ParallelRecord>, DedupeReport) {
    let input = records.len();
    let mut seen = HashSet::new();
    let kept: Vec<ParallelRecord> = records
        .into_iter()
        .filter(|r| seen.insert((r.ccp.clone(), r.bn.clone())))
        .collect();
    let report = DedupeReport {
        input,
        kept: kept.len(),
        removed: input - kept.len(),
    };
    (kept, report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_count: usize,
    pub dev_count: usize,
    pub seed: u64,
}

/// Seeded shuffle, then the first `train_count` go to train and the next
/// `dev_count` to dev; anything left stays unassigned. Benchmark records are
/// always test and do not count toward `spec`. Record order is preserved.
pub fn split(mut records: Vec<ParallelRecord>, spec: &SplitSpec) -> Result<Vec<ParallelRecord>, CorpusError> {
    let eligible: Vec<usize> = records
        .iter()
        .enumerate()
        .filter(|(_, r)| r.source != Source::Benchmark)
        .map(|(i, _)| i)
        .collect();
    let requested = spec.train_count + spec.dev_count;
    if requested > eligible.len() {
        return Err(CorpusError::SpecTooLarge {
            requested,
            available: eligible.len(),
        });
    }
    let mut order = eligible;
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(spec.seed));
    for record in records.iter_mut() {
        record.split = if record.source == Source::Benchmark {
            Split::Test
        } else {
            Split::Unassigned
        };
    }
    for (rank, idx) in order.into_iter().enumerate() {
        if rank < spec.train_count {
            records[idx].split = Split::Train;
        } else if rank < requested {
            records[idx].split = Split::Dev;
        }
    }
    Ok(records)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrainingExample {
    pub direction: Direction,
    /// Source sentence with the `<2tgt> ` prefix.
    pub src: String,
    pub tgt: String,
}

/// One prefixed example per (record, direction).
///
/// With `balance`, every direction is topped up to the largest one by whole
/// copies of its examples plus a seeded sample (without replacement) of the
/// remainder, so all directions end up with the same count.
pub fn make_multilingual(
    records: &[ParallelRecord],
    directions: &[Direction],
    balance: bool,
    seed: u64,
) -> Result<Vec<TrainingExample>, CorpusError> {
    let mut per_direction: Vec<Vec<TrainingExample>> = Vec::with_capacity(directions.len());
    for &direction in directions {
        let examples: Vec<TrainingExample> = records
            .iter()
            .filter_map(|r| {
                let src = r.text(direction.src)?;
                let tgt = r.text(direction.tgt)?;
                Some(TrainingExample {
                    direction,
                    src: format!("{} {src}", direction.tgt.prefix_token()),
                    tgt: tgt.to_string(),
                })
            })
            .collect();
        if examples.is_empty() {
            return Err(CorpusError::EmptyDirection(direction));
        }
        per_direction.push(examples);
    }
    if balance {
        let max = per_direction.iter().map(Vec::len).max().unwrap_or(0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for examples in per_direction.iter_mut() {
            let base = examples.len();
            let whole = max / base;
            let remainder = max % base;
            let mut grown = Vec::with_capacity(max);
            for _ in 0..whole {
                grown.extend(examples.iter().cloned());
            }
            let mut extra = index::sample(&mut rng, base, remainder).into_vec();
            extra.sort_unstable();
            grown.extend(extra.into_iter().map(|i| examples[i].clone()));
            *examples = grown;
        }
    }
    Ok(per_direction.into_iter().flatten().collect())
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CorpusStats {
    pub total: usize,
    pub by_source: BTreeMap<Source, usize>,
    pub by_split: BTreeMap<Split, usize>,
    pub synthetic: usize,
    /// Whitespace-token length → number of sentences, per language.
    pub length_histogram: BTreeMap<Lang, BTreeMap<usize, usize>>,
}

pub fn stats(records: &[ParallelRecord]) -> CorpusStats {
    let mut report = CorpusStats {
        total: records.len(),
        ..Default::default()
    };
    for r in records {
        *report.by_source.entry(r.source).or_default() += 1;
        *report.by_split.entry(r.split).or_default() += 1;
        report.synthetic += usize::from(r.synthetic);
        for lang in Lang::ALL {
            if let Some(text) = r.text(lang) {
                let len = text.split_whitespace().count();
                *report.length_histogram.entry(lang).or_default().entry(len).or_default() += 1;
            }
        }
    }
    report
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct MonoStats {
    pub total: usize,
    pub by_lang: BTreeMap<Lang, usize>,
    pub by_source: BTreeMap<String, usize>,
    pub length_histogram: BTreeMap<usize, usize>,
}

pub fn mono_stats(records: &[MonolingualRecord]) -> MonoStats {
    let mut report = MonoStats {
        total: records.len(),
        ..Default::default()
    };
    for r in records {
        *report.by_lang.entry(r.lang).or_default() += 1;
        *report.by_source.entry(r.source.clone()).or_default() += 1;
        *report.length_histogram.entry(r.text.split_whitespace().count()).or_default() += 1;
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rec(id: &str, ccp: &str, bn: &str, en: Option<&str>, source: Source) -> ParallelRecord {
        ParallelRecord {
            id: id.into(),
            ccp: ccp.into(),
            bn: bn.into(),
            en: en.map(Into::into),
            source,
            split: Split::Unassigned,
            synthetic: source == Source::Synthetic,
        }
    }

    fn many(n: usize) -> Vec<ParallelRecord> {
        (0..n)
            .map(|i| {
                rec(
                    &format!("r{i}"),
                    &format!("c{i}"),
                    &format!("b{i}"),
                    None,
                    Source::LocalExpert,
                )
            })
            .collect()
    }

    #[test]
    fn ingest_examples() {
        assert!(read_parallel("".as_bytes()).unwrap().is_empty());
        let missing = r#"{"ccp":"x","source":"Dictionary"}"#;
        assert!(matches!(
            read_parallel(missing.as_bytes()),
            Err(CorpusError::MissingLanguage { line: 1, lang: Lang::Bn })
        ));
        let blank = "{\"ccp\":\"x\",\"bn\":\" \u{200B} \",\"source\":\"Dictionary\"}";
        assert!(matches!(
            read_parallel(blank.as_bytes()),
            Err(CorpusError::MissingLanguage { .. })
        ));
        let dup =
            "{\"ccp\":\"x\",\"bn\":\"y\",\"source\":\"Dictionary\"}\n{\"ccp\":\"x\",\"bn\":\"y\",\"source\":\"Dictionary\"}\n";
        let records = read_parallel(dup.as_bytes()).unwrap();
        assert_eq!(records.len(), 2);
        assert_ne!(records[0].id, records[1].id);
        assert!(matches!(
            read_parallel("{not json".as_bytes()),
            Err(CorpusError::ParseError { line: 1, .. })
        ));
    }

    #[test]
    fn ingest_normalizes_and_checks_synthetic_flag() {
        let line = r#"{"id":"a","ccp":"x   y","bn":"b","en":"","source":"UNDocs"}"#;
        let records = read_parallel(line.as_bytes()).unwrap();
        assert_eq!(records[0].ccp, "x y");
        assert_eq!(records[0].en, None);
        assert_eq!(records[0].source, Source::UnDocs);
        assert!(!records[0].synthetic);
        let bad = r#"{"ccp":"x","bn":"y","source":"UNDocs","synthetic":true}"#;
        assert!(matches!(read_parallel(bad.as_bytes()), Err(CorpusError::ParseError { .. })));
        let synth = r#"{"ccp":"x","bn":"y","source":"Synthetic"}"#;
        assert!(read_parallel(synth.as_bytes()).unwrap()[0].synthetic);
    }

    #[test]
    fn mono_ingest() {
        let text = "{\"lang\":\"ccp\",\"text\":\" a  b \",\"source\":\"story\"}\n\n{\"lang\":\"bn\",\"text\":\"c\",\"source\":\"news\",\"id\":\"m2\"}\n";
        let records = read_mono(text.as_bytes()).unwrap();
        assert_eq!(records.len(), 2);
        assert_eq!(records[0].text, "a b");
        assert_eq!(records[1].id, "m2");
        assert!(read_mono(r#"{"lang":"xx","text":"a","source":"s"}"#.as_bytes()).is_err());
        assert!(matches!(
            read_mono(r#"{"lang":"ccp","text":"","source":"s"}"#.as_bytes()),
            Err(CorpusError::MissingLanguage { lang: Lang::Ccp, .. })
        ));
    }

    #[test]
    fn jsonl_round_trip() {
        let mut records = many(3);
        records[1].en = Some("e".into());
        records[2].split = Split::Dev;
        let mut buf = Vec::new();
        write_jsonl(&mut buf, &records).unwrap();
        assert_eq!(read_parallel(buf.as_slice()).unwrap(), records);
    }

    #[test]
    fn dedupe_examples() {
        let (kept, report) = dedupe(vec![
            rec("1", "a", "b", None, Source::Dictionary),
            rec("2", "a", "b", None, Source::Dictionary),
        ]);
        assert_eq!(kept.len(), 1);
        assert_eq!(kept[0].id, "1");
        assert_eq!(
            report,
            DedupeReport {
                input: 2,
                kept: 1,
                removed: 1
            }
        );

        let (kept, _) = dedupe(vec![
            rec("1", "a", "b", Some("x"), Source::Dictionary),
            rec("2", "a", "b", Some("y"), Source::Dictionary),
        ]);
        assert_eq!(kept.len(), 1, "English is not part of the key");

        let distinct = many(4);
        let (kept, report) = dedupe(distinct.clone());
        assert_eq!(kept, distinct);
        assert_eq!(report.removed, 0);
    }

    #[test]
    fn split_counts_and_determinism() {
        let spec = SplitSpec {
            train_count: 12_016,
            dev_count: 3_005,
            seed: 7,
        };
        let out = split(many(15_021), &spec).unwrap();
        let stats = stats(&out);
        assert_eq!(stats.by_split[&Split::Train], 12_016);
        assert_eq!(stats.by_split[&Split::Dev], 3_005);
        assert_eq!(split(many(15_021), &spec).unwrap(), out);
        let other = split(many(15_021), &SplitSpec { seed: 8, ..spec }).unwrap();
        assert_ne!(other, out);
    }

    #[test]
    fn split_all_train_and_too_large() {
        let out = split(
            many(10),
            &SplitSpec {
                train_count: 10,
                dev_count: 0,
                seed: 1,
            },
        )
        .unwrap();
        assert!(out.iter().all(|r| r.split == Split::Train));
        assert!(matches!(
            split(
                many(10),
                &SplitSpec {
                    train_count: 10,
                    dev_count: 1,
                    seed: 1
                }
            ),
            Err(CorpusError::SpecTooLarge {
                requested: 11,
                available: 10
            })
        ));
    }

    #[test]
    fn benchmark_records_are_always_test() {
        let mut records = many(5);
        records.push(rec("bench", "c", "b", Some("e"), Source::Benchmark));
        let out = split(
            records,
            &SplitSpec {
                train_count: 3,
                dev_count: 2,
                seed: 3,
            },
        )
        .unwrap();
        assert_eq!(out[5].split, Split::Test);
        assert_eq!(out.iter().filter(|r| r.split == Split::Train).count(), 3);
        assert!(matches!(
            split(
                out,
                &SplitSpec {
                    train_count: 6,
                    dev_count: 0,
                    seed: 3
                }
            ),
            Err(CorpusError::SpecTooLarge { .. })
        ));
    }

    #[test]
    fn multilingual_prefixing() {
        let records = vec![rec("1", "c", "b", None, Source::NonExpert)];
        let bn_ccp = Direction::new(Lang::Bn, Lang::Ccp);
        let out = make_multilingual(&records, &[bn_ccp], false, 0).unwrap();
        assert_eq!(out.len(), 1);
        assert!(out[0].src.starts_with("<2ccp> "));
        assert_eq!(out[0].src, "<2ccp> b");
        assert_eq!(out[0].tgt, "c");
        let bn_en = Direction::new(Lang::Bn, Lang::En);
        assert!(matches!(
            make_multilingual(&records, &[bn_en], false, 0),
            Err(CorpusError::EmptyDirection(d)) if d == bn_en
        ));
    }

    #[test]
    fn multilingual_balancing() {
        // 100 records with English, 300 more without: bn↔ccp has 400, bn↔en 100.
        let mut records: Vec<ParallelRecord> = (0..100)
            .map(|i| rec(&i.to_string(), "c", &format!("b{i}"), Some("e"), Source::LocalExpert))
            .collect();
        records.extend(many(300));
        let dirs = [
            Direction::new(Lang::Bn, Lang::Ccp),
            Direction::new(Lang::Bn, Lang::En),
            Direction::new(Lang::En, Lang::Bn),
        ];
        let raw = make_multilingual(&records, &dirs, false, 5).unwrap();
        assert_eq!(raw.len(), 600);
        let balanced = make_multilingual(&records, &dirs, true, 5).unwrap();
        for d in dirs {
            assert_eq!(balanced.iter().filter(|e| e.direction == d).count(), 400);
        }
        assert_eq!(balanced, make_multilingual(&records, &dirs, true, 5).unwrap());
    }

    #[test]
    fn stats_examples() {
        let empty = stats(&[]);
        assert_eq!(empty.total, 0);
        assert!(empty.by_source.is_empty());
        let mut records = many(3);
        records[0].source = Source::UnDocs;
        records[0].en = Some("one two".into());
        let report = stats(&records);
        assert_eq!(report.total, 3);
        assert_eq!(report.by_source.values().sum::<usize>(), 3);
        assert_eq!(report.by_split.values().sum::<usize>(), 3);
        assert_eq!(report.length_histogram[&Lang::En][&2], 1);
        assert_eq!(report.length_histogram[&Lang::Ccp][&1], 3);
    }

    proptest! {
        #[test]
        fn dedupe_is_idempotent(pairs in prop::collection::vec((0u8..4, 0u8..4), 0..30)) {
            let records: Vec<ParallelRecord> = pairs
                .iter()
                .enumerate()
                .map(|(i, (c, b))| rec(&i.to_string(), &c.to_string(), &b.to_string(), None, Source::Other))
                .collect();
            let (once, _) = dedupe(records);
            let (twice, report) = dedupe(once.clone());
            prop_assert_eq!(twice, once);
            prop_assert_eq!(report.removed, 0);
        }

        #[test]
        fn split_partitions_exactly(
            (n, train, dev) in (0usize..200).prop_flat_map(|n| (Just(n), 0..=n)).prop_flat_map(|(n, t)| (Just(n), Just(t), 0..=n - t)),
            seed in any::<u64>(),
        ) {
            let out = split(many(n), &SplitSpec { train_count: train, dev_count: dev, seed }).unwrap();
            prop_assert_eq!(out.len(), n);
            prop_assert_eq!(out.iter().filter(|r| r.split == Split::Train).count(), train);
            prop_assert_eq!(out.iter().filter(|r| r.split == Split::Dev).count(), dev);
            prop_assert_eq!(out.iter().filter(|r| r.split == Split::Unassigned).count(), n - train - dev);
        }

        #[test]
        fn balancing_within_one(a in 1usize..60, b in 1usize..60, seed in any::<u64>()) {
            let mut records: Vec<ParallelRecord> = (0..a)
                .map(|i| rec(&format!("a{i}"), "c", "b", Some("e"), Source::Other))
                .collect();
            records.extend((0..b).map(|i| rec(&format!("b{i}"), "c", "b", None, Source::Other)));
            let dirs = [Direction::new(Lang::Bn, Lang::Ccp), Direction::new(Lang::En, Lang::Ccp)];
            let out = make_multilingual(&records, &dirs, true, seed).unwrap();
            let counts: Vec<usize> = dirs.iter().map(|d| out.iter().filter(|e| e.direction == *d).count()).collect();
            let (max, min) = (*counts.iter().max().unwrap(), *counts.iter().min().unwrap());
            prop_assert!(max - min <= 1);
        }
    }
}
