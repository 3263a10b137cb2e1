//! Table-driven Chakma ↔ Bangla transliteration.
//!
//! Both directions are greedy longest-match transducers over the same
//! bijective [`MappingTable`]. Script-neutral characters (ASCII, whitespace,
//! general punctuation) are never looked up and always pass through.

use std::collections::HashMap;
use std::path::Path;
use std::str::FromStr;
use std::sync::LazyLock;

use serde::{Deserialize, Serialize};

use crate::script::{self, script_of, ClassTable, Script};
use crate::tsv;

const BUILTIN_MAP: &str = include_str!("../data/ccp_bn.tsv");

static BUILTIN: LazyLock<MappingTable> =
    LazyLock::new(|| MappingTable::parse(BUILTIN_MAP).expect("shipped mapping table is valid"));

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MappingEntry {
    pub ccp: Vec<char>,
    pub bn: Vec<char>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Ccp,
    Bn,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MappingError {
    #[error("line {line}: duplicate {side:?} sequence")]
    DuplicateEntry { line: usize, side: Side },
    #[error("line {line}: empty sequence")]
    EmptySide { line: usize },
    #[error("line {line}: U+{codepoint:04X} is script-neutral and cannot be mapped")]
    NeutralCodepoint { line: usize, codepoint: u32 },
    #[error("line {line}: {message}")]
    ParseError { line: usize, message: String },
    #[error("reading mapping table: {0}")]
    Io(String),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TranslitError {
    #[error("unmapped character U+{codepoint:04X} at position {position}")]
    UnmappedChar { position: usize, codepoint: u32 },
    #[error("cluster at position {position} carries more than one diacritic")]
    NctbViolation { position: usize },
}

#[derive(Debug, Clone, Default)]
struct SeqIndex {
    lookup: HashMap<Vec<char>, usize>,
    max_len: usize,
}

impl SeqIndex {
    fn insert(&mut self, key: Vec<char>, entry: usize) -> bool {
        self.max_len = self.max_len.max(key.len());
        self.lookup.insert(key, entry).is_none()
    }

    /// Longest key starting at `chars[pos]`.
    fn longest_match(&self, chars: &[char], pos: usize) -> Option<(usize, usize)> {
        let available = chars.len() - pos;
        (1..=self.max_len.min(available))
            .rev()
            .find_map(|len| self.lookup.get(&chars[pos..pos + len]).map(|&entry| (entry, len)))
    }
}

/// Bijective correspondence between Chakma and Bangla codepoint sequences.
#[derive(Debug, Clone, Default)]
pub struct MappingTable {
    entries: Vec<MappingEntry>,
    by_ccp: SeqIndex,
    by_bn: SeqIndex,
}

impl MappingTable {
    /// The shipped reconstruction in `data/ccp_bn.tsv`.
    pub fn builtin() -> &'static MappingTable {
        &BUILTIN
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, MappingError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| MappingError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, MappingError> {
        let mut table = MappingTable::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let Some(body) = tsv::content(raw) else {
                continue;
            };
            let fields: Vec<&str> = body.split('\t').collect();
            if fields.len() < 2 || fields[2..].iter().any(|f| !f.trim().is_empty()) {
                return Err(MappingError::ParseError {
                    line,
                    message: format!("expected 2 tab-separated columns, found {}", fields.len()),
                });
            }
            let parse = |field: &str| {
                tsv::parse_hex_seq(field).map_err(|e| MappingError::ParseError {
                    line,
                    message: e.to_string(),
                })
            };
            table.push(line, parse(fields[0])?, parse(fields[1])?)?;
        }
        Ok(table)
    }

    pub fn from_entries(entries: impl IntoIterator<Item = MappingEntry>) -> Result<Self, MappingError> {
        let mut table = MappingTable::default();
        for (idx, entry) in entries.into_iter().enumerate() {
            table.push(idx + 1, entry.ccp, entry.bn)?;
        }
        Ok(table)
    }

    fn push(&mut self, line: usize, ccp: Vec<char>, bn: Vec<char>) -> Result<(), MappingError> {
        if ccp.is_empty() || bn.is_empty() {
            return Err(MappingError::EmptySide { line });
        }
        if let Some(c) = ccp.iter().chain(bn.iter()).find(|c| script_of(**c) == Script::Neutral) {
            return Err(MappingError::NeutralCodepoint {
                line,
                codepoint: *c as u32,
            });
        }
        let id = self.entries.len();
        if !self.by_ccp.insert(ccp.clone(), id) {
            return Err(MappingError::DuplicateEntry { line, side: Side::Ccp });
        }
        if !self.by_bn.insert(bn.clone(), id) {
            return Err(MappingError::DuplicateEntry { line, side: Side::Bn });
        }
        self.entries.push(MappingEntry { ccp, bn });
        Ok(())
    }

    pub fn entries(&self) -> &[MappingEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Serializes back to the TSV file format.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            out.push_str(&tsv::format_hex_seq(&e.ccp));
            out.push('\t');
            out.push_str(&tsv::format_hex_seq(&e.bn));
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UnmappedPolicy {
    #[default]
    Passthrough,
    Error,
}

impl FromStr for UnmappedPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pass" | "passthrough" => Ok(UnmappedPolicy::Passthrough),
            "error" => Ok(UnmappedPolicy::Error),
            _ => Err(format!("unknown unmapped policy `{s}` (expected pass or error)")),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransliterationMode {
    pub unmapped_policy: UnmappedPolicy,
    /// Reject Chakma-side clusters with more than one diacritic.
    pub nctb_strict: bool,
}

fn transduce(
    text: &str,
    index: &SeqIndex,
    entries: &[MappingEntry],
    output: fn(&MappingEntry) -> &[char],
    policy: UnmappedPolicy,
) -> Result<String, TranslitError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = String::with_capacity(text.len());
    let mut pos = 0;
    while pos < chars.len() {
        let c = chars[pos];
        if script_of(c) == Script::Neutral {
            out.push(c);
            pos += 1;
            continue;
        }
        match index.longest_match(&chars, pos) {
            Some((entry, len)) => {
                out.extend(output(&entries[entry]).iter());
                pos += len;
            }
            None => match policy {
                UnmappedPolicy::Passthrough => {
                    out.push(c);
                    pos += 1;
                }
                UnmappedPolicy::Error => {
                    return Err(TranslitError::UnmappedChar {
                        position: pos,
                        codepoint: c as u32,
                    })
                }
            },
        }
    }
    Ok(out)
}

fn check_nctb(text: &str) -> Result<(), TranslitError> {
    match script::first_nctb_violation(ClassTable::builtin(), text) {
        Some(position) => Err(TranslitError::NctbViolation { position }),
        None => Ok(()),
    }
}

/// Chakma script → Bangla script. Under `nctb_strict` the Chakma input is validated.
pub fn ccp_to_bn(text: &str, table: &MappingTable, mode: TransliterationMode) -> Result<String, TranslitError> {
    if mode.nctb_strict {
        check_nctb(text)?;
    }
    transduce(text, &table.by_ccp, &table.entries, |e| &e.bn, mode.unmapped_policy)
}

/// Bangla script → Chakma script. Under `nctb_strict` the Chakma output is
/// validated and the reported position is a character offset into it.
pub fn bn_to_ccp(text: &str, table: &MappingTable, mode: TransliterationMode) -> Result<String, TranslitError> {
    let out = transduce(text, &table.by_bn, &table.entries, |e| &e.ccp, mode.unmapped_policy)?;
    if mode.nctb_strict {
        check_nctb(&out)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const KAA: char = '\u{11107}';
    const KA: char = '\u{0995}';

    fn entry(ccp: &[u32], bn: &[u32]) -> MappingEntry {
        MappingEntry {
            ccp: ccp.iter().map(|c| char::from_u32(*c).unwrap()).collect(),
            bn: bn.iter().map(|c| char::from_u32(*c).unwrap()).collect(),
        }
    }

    fn strict() -> TransliterationMode {
        TransliterationMode {
            unmapped_policy: UnmappedPolicy::Error,
            nctb_strict: false,
        }
    }

    #[test]
    fn load_examples() {
        assert!(MappingTable::parse("").unwrap().is_empty());
        let table = MappingTable::parse("11107\t0995\n").unwrap();
        assert_eq!(table.entries(), &[entry(&[0x11107], &[0x0995])]);
        assert_eq!(
            MappingTable::parse("11107\t0995\n11107\t0996\n").unwrap_err(),
            MappingError::DuplicateEntry {
                line: 2,
                side: Side::Ccp
            }
        );
        assert_eq!(
            MappingTable::parse("11107\t0995\n11108\t0995\n").unwrap_err(),
            MappingError::DuplicateEntry { line: 2, side: Side::Bn }
        );
        assert_eq!(
            MappingTable::parse("11107\t \n").unwrap_err(),
            MappingError::EmptySide { line: 1 }
        );
        assert!(matches!(
            MappingTable::parse("11107\n").unwrap_err(),
            MappingError::ParseError { line: 1, .. }
        ));
        assert!(matches!(
            MappingTable::parse("11107\t0964\n").unwrap_err(),
            MappingError::NeutralCodepoint {
                line: 1,
                codepoint: 0x0964
            }
        ));
    }

    #[test]
    fn builtin_table_loads() {
        let table = MappingTable::builtin();
        assert_eq!(table.len(), 60);
        assert!(table.entries().contains(&entry(&[0x11107], &[0x0995])));
        let reparsed = MappingTable::parse(&table.to_tsv()).unwrap();
        assert_eq!(reparsed.entries(), table.entries());
    }

    #[test]
    fn ccp_to_bn_examples() {
        let table = MappingTable::parse("11107\t0995\n").unwrap();
        let mode = TransliterationMode::default();
        assert_eq!(ccp_to_bn("", &table, mode).unwrap(), "");
        assert_eq!(ccp_to_bn("hello 123", &table, mode).unwrap(), "hello 123");
        assert_eq!(ccp_to_bn(&KAA.to_string(), &table, mode).unwrap(), KA.to_string());
        // Neutral passes even in Error mode.
        assert_eq!(ccp_to_bn("hello 123", &table, strict()).unwrap(), "hello 123");
    }

    #[test]
    fn bn_to_ccp_examples() {
        let table = MappingTable::parse("11107\t0995\n").unwrap();
        let mode = TransliterationMode::default();
        assert_eq!(bn_to_ccp("", &table, mode).unwrap(), "");
        assert_eq!(bn_to_ccp(&KA.to_string(), &table, mode).unwrap(), KAA.to_string());
        assert_eq!(bn_to_ccp("?! .,", &table, mode).unwrap(), "?! .,");
    }

    #[test]
    fn unmapped_policy() {
        let table = MappingTable::parse("11107\t0995\n").unwrap();
        let input = format!("a{KAA}\u{11108}");
        assert_eq!(
            ccp_to_bn(&input, &table, TransliterationMode::default()).unwrap(),
            format!("a{KA}\u{11108}")
        );
        assert_eq!(
            ccp_to_bn(&input, &table, strict()).unwrap_err(),
            TranslitError::UnmappedChar {
                position: 2,
                codepoint: 0x11108
            }
        );
    }

    #[test]
    fn conjunct_sequences_win_over_single_codepoints() {
        // KA + VIRAMA + SSA as one unit, plus its parts
        let table = MappingTable::from_entries([
            entry(&[0x11107], &[0x0995]),
            entry(&[0x11133], &[0x09CD]),
            entry(&[0x11125], &[0x09B8]),
            entry(&[0x11107, 0x11133, 0x11125], &[0x0995, 0x09CD, 0x09B7]),
        ])
        .unwrap();
        let mode = TransliterationMode::default();
        assert_eq!(
            bn_to_ccp("\u{0995}\u{09CD}\u{09B7}", &table, mode).unwrap(),
            "\u{11107}\u{11133}\u{11125}"
        );
        assert_eq!(
            ccp_to_bn("\u{11107}\u{11133}\u{11125}", &table, mode).unwrap(),
            "\u{0995}\u{09CD}\u{09B7}"
        );
        assert_eq!(bn_to_ccp("\u{0995}\u{09CD}", &table, mode).unwrap(), "\u{11107}\u{11133}");
    }

    #[test]
    fn nctb_strict_rejects_double_diacritics() {
        let table = MappingTable::builtin();
        let mode = TransliterationMode {
            unmapped_policy: UnmappedPolicy::Passthrough,
            nctb_strict: true,
        };
        // KAA + VOWEL SIGN I + ANUSVARA
        let ccp = "x \u{11107}\u{11128}\u{11101}";
        assert_eq!(
            ccp_to_bn(ccp, table, mode).unwrap_err(),
            TranslitError::NctbViolation { position: 2 }
        );
        let bn = "\u{0995}\u{09BF}\u{0982}";
        assert_eq!(
            bn_to_ccp(bn, table, mode).unwrap_err(),
            TranslitError::NctbViolation { position: 0 }
        );
        let lenient = TransliterationMode::default();
        assert_eq!(bn_to_ccp(bn, table, lenient).unwrap(), "\u{11107}\u{11128}\u{11101}");
        assert!(bn_to_ccp("\u{0995}\u{09BF}", table, mode).is_ok());
    }

    #[test]
    fn entry_order_does_not_matter() {
        let forward = MappingTable::parse(BUILTIN_MAP).unwrap();
        let mut lines: Vec<&str> = BUILTIN_MAP.lines().collect();
        lines.reverse();
        let backward = MappingTable::parse(&lines.join("\n")).unwrap();
        let sample = "\u{0995}\u{09BF} \u{09B2}\u{09BC}\u{09B2} \u{09E7}\u{09E8}!";
        let mode = TransliterationMode::default();
        assert_eq!(
            bn_to_ccp(sample, &forward, mode).unwrap(),
            bn_to_ccp(sample, &backward, mode).unwrap()
        );
        assert_eq!(
            bn_to_ccp(sample, &forward, mode).unwrap(),
            "\u{11107}\u{11128} \u{11144}\u{11123} \u{11137}\u{11138}!"
        );
    }
}
