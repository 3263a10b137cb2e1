//! Script classification for the Chakma and Bengali blocks and grapheme clustering.
//!
//! Which signs count as diacritics is read from a classification table
//! (`data/char_classes.tsv` by default) so the inventory can be reviewed and
//! overridden without touching the clustering code.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::LazyLock;

use serde::{Deserialize, Serialize};

use crate::tsv;

pub const CHAKMA_BLOCK: std::ops::RangeInclusive<u32> = 0x11100..=0x1114F;
pub const BENGALI_BLOCK: std::ops::RangeInclusive<u32> = 0x0980..=0x09FF;

const BUILTIN_TABLE: &str = include_str!("../data/char_classes.tsv");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CharKind {
    IndependentVowel,
    Consonant,
    VowelSign,
    ConsonantSign,
    Virama,
    Digit,
    Punctuation,
    Whitespace,
    Other,
}

impl CharKind {
    /// Dependent signs that attach to a preceding base.
    pub fn is_diacritic(self) -> bool {
        matches!(self, CharKind::VowelSign | CharKind::ConsonantSign | CharKind::Virama)
    }

    /// Characters that can start a grapheme cluster.
    pub fn is_base(self) -> bool {
        matches!(self, CharKind::Consonant | CharKind::IndependentVowel)
    }
}

impl FromStr for CharKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "IndependentVowel" => CharKind::IndependentVowel,
            "Consonant" => CharKind::Consonant,
            "VowelSign" => CharKind::VowelSign,
            "ConsonantSign" => CharKind::ConsonantSign,
            "Virama" => CharKind::Virama,
            "Digit" => CharKind::Digit,
            "Punctuation" => CharKind::Punctuation,
            "Whitespace" => CharKind::Whitespace,
            "Other" => CharKind::Other,
            _ => return Err(format!("unknown character kind `{s}`")),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Script {
    Chakma,
    Bangla,
    Neutral,
}

impl FromStr for Script {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "Chakma" => Ok(Script::Chakma),
            "Bangla" => Ok(Script::Bangla),
            "Neutral" => Ok(Script::Neutral),
            _ => Err(format!("unknown script `{s}`")),
        }
    }
}

/// Script membership is fixed by the Unicode block of the codepoint.
pub fn script_of(c: char) -> Script {
    let cp = c as u32;
    if CHAKMA_BLOCK.contains(&cp) {
        Script::Chakma
    } else if BENGALI_BLOCK.contains(&cp) {
        Script::Bangla
    } else {
        Script::Neutral
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ScriptCharClass {
    pub kind: CharKind,
    pub script: Script,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ClassTableError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: U+{codepoint:04X} belongs to {actual:?}, table says {declared:?}")]
    ScriptMismatch {
        line: usize,
        codepoint: u32,
        declared: Script,
        actual: Script,
    },
    #[error("line {line}: U+{codepoint:04X} listed twice")]
    Duplicate { line: usize, codepoint: u32 },
    #[error("reading class table: {0}")]
    Io(String),
}

/// Codepoint → kind overrides on top of the built-in neutral fallback.
#[derive(Debug, Clone, Default)]
pub struct ClassTable {
    kinds: HashMap<char, CharKind>,
}

static BUILTIN: LazyLock<ClassTable> = LazyLock::new(|| ClassTable::parse(BUILTIN_TABLE).expect("shipped class table is valid"));

impl ClassTable {
    pub fn builtin() -> &'static ClassTable {
        &BUILTIN
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ClassTableError> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| ClassTableError::Io(format!("{}: {e}", path.as_ref().display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ClassTableError> {
        let mut kinds = HashMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let Some(body) = tsv::content(raw) else {
                continue;
            };
            let fields: Vec<&str> = body.split('\t').map(str::trim).filter(|f| !f.is_empty()).collect();
            let [cp, kind, script] = fields[..] else {
                return Err(ClassTableError::Parse {
                    line,
                    message: format!("expected 3 columns, found {}", fields.len()),
                });
            };
            let parse_err = |message: String| ClassTableError::Parse { line, message };
            let c = tsv::parse_codepoint(cp).map_err(|e| parse_err(e.to_string()))?;
            let kind: CharKind = kind.parse().map_err(parse_err)?;
            let declared: Script = script.parse().map_err(parse_err)?;
            let actual = script_of(c);
            if declared != actual {
                return Err(ClassTableError::ScriptMismatch {
                    line,
                    codepoint: c as u32,
                    declared,
                    actual,
                });
            }
            if kinds.insert(c, kind).is_some() {
                return Err(ClassTableError::Duplicate {
                    line,
                    codepoint: c as u32,
                });
            }
        }
        Ok(ClassTable { kinds })
    }

    pub fn len(&self) -> usize {
        self.kinds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kinds.is_empty()
    }

    pub fn classify(&self, c: char) -> ScriptCharClass {
        let script = script_of(c);
        let kind = match self.kinds.get(&c) {
            Some(kind) => *kind,
            None if script == Script::Neutral => neutral_kind(c),
            // Unlisted codepoints inside a script block (unassigned or symbols).
            None => CharKind::Other,
        };
        ScriptCharClass { kind, script }
    }

    pub fn cluster(&self, text: &str) -> Vec<ClusterItem> {
        let mut items = Vec::new();
        let mut open: Option<GraphemeCluster> = None;
        for c in text.chars() {
            let kind = self.classify(c).kind;
            if kind.is_diacritic() {
                match open.as_mut() {
                    Some(cluster) => cluster.diacritics.push(c),
                    None => items.push(ClusterItem::Standalone(c)),
                }
                continue;
            }
            if let Some(done) = open.take() {
                items.push(ClusterItem::Cluster(done));
            }
            if kind.is_base() {
                open = Some(GraphemeCluster {
                    base: c,
                    diacritics: Vec::new(),
                });
            } else {
                items.push(ClusterItem::Standalone(c));
            }
        }
        if let Some(done) = open {
            items.push(ClusterItem::Cluster(done));
        }
        items
    }
}

fn neutral_kind(c: char) -> CharKind {
    if c.is_whitespace() {
        CharKind::Whitespace
    } else if c.is_numeric() {
        CharKind::Digit
    } else if c.is_ascii_punctuation()
        || matches!(c as u32, 0x00A1 | 0x00BF | 0x2010..=0x2027 | 0x2030..=0x205E | 0x3001..=0x3003)
    {
        CharKind::Punctuation
    } else {
        CharKind::Other
    }
}

/// Classifies with the shipped table.
pub fn classify(c: char) -> ScriptCharClass {
    BUILTIN.classify(c)
}

/// Clusters with the shipped table.
pub fn cluster(text: &str) -> Vec<ClusterItem> {
    BUILTIN.cluster(text)
}

/// A base character plus the dependent signs that follow it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphemeCluster {
    pub base: char,
    pub diacritics: Vec<char>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClusterItem {
    Cluster(GraphemeCluster),
    /// Anything that is not part of a cluster, including a diacritic with no base.
    Standalone(char),
}

impl ClusterItem {
    pub fn diacritic_count(&self) -> usize {
        match self {
            ClusterItem::Cluster(c) => c.diacritics.len(),
            ClusterItem::Standalone(_) => 0,
        }
    }

    pub fn char_len(&self) -> usize {
        match self {
            ClusterItem::Cluster(c) => 1 + c.diacritics.len(),
            ClusterItem::Standalone(_) => 1,
        }
    }

    pub fn write_to(&self, out: &mut String) {
        match self {
            ClusterItem::Cluster(c) => {
                out.push(c.base);
                out.extend(c.diacritics.iter());
            }
            ClusterItem::Standalone(c) => out.push(*c),
        }
    }
}

impl fmt::Display for ClusterItem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.write_to(&mut s);
        f.write_str(&s)
    }
}

/// Reassembles the text a cluster list was built from.
pub fn concat(items: &[ClusterItem]) -> String {
    let mut out = String::new();
    for item in items {
        item.write_to(&mut out);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Violation {
    /// Index into the cluster list.
    pub index: usize,
    pub count: usize,
}

/// Flags every cluster carrying more than one diacritic.
pub fn validate_nctb(items: &[ClusterItem]) -> Vec<Violation> {
    items
        .iter()
        .enumerate()
        .filter(|(_, item)| item.diacritic_count() > 1)
        .map(|(index, item)| Violation {
            index,
            count: item.diacritic_count(),
        })
        .collect()
}

/// Character offset of the first cluster that breaks the one-diacritic rule.
pub(crate) fn first_nctb_violation(table: &ClassTable, text: &str) -> Option<usize> {
    let mut offset = 0;
    for item in table.cluster(text) {
        if item.diacritic_count() > 1 {
            return Some(offset);
        }
        offset += item.char_len();
    }
    None
}
