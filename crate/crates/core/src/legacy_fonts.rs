//! Conversion of text typed with legacy ASCII-encoded Chakma fonts into Unicode.
//!
//! A [`FontMap`] lists byte/char sequences of the legacy encoding and the
//! Unicode sequence each one stands for. Legacy fonts store some vowel signs
//! in visual order, before the consonant they belong to; rules flagged
//! `prebase` are moved after the next base character on output.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use crate::script::{script_of, ClassTable, Script};
use crate::tsv;

/// Legacy fonts found in Chakma source documents, in the order they are usually listed.
pub const KNOWN_FONTS: [&str; 7] = [
    "BivunabaKhamaC",
    "BijoygiriDPC",
    "Udoy Giri",
    "Alaam",
    "Arjyaban",
    "Chakma(SuJoyan)",
    "Punong Jun",
];

const BUILTIN_STUBS: [(&str, &str); 7] = [
    ("BivunabaKhamaC", include_str!("../data/fonts/bivunabakhamac.tsv")),
    ("BijoygiriDPC", include_str!("../data/fonts/bijoygiridpc.tsv")),
    ("Udoy Giri", include_str!("../data/fonts/udoy_giri.tsv")),
    ("Alaam", include_str!("../data/fonts/alaam.tsv")),
    ("Arjyaban", include_str!("../data/fonts/arjyaban.tsv")),
    ("Chakma(SuJoyan)", include_str!("../data/fonts/chakma_sujoyan.tsv")),
    ("Punong Jun", include_str!("../data/fonts/punong_jun.tsv")),
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FontRule {
    pub src: Vec<char>,
    pub dst: Vec<char>,
    pub prebase: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FontMapError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: source sequence already mapped")]
    DuplicateSource { line: usize },
    #[error("line {line}: U+{codepoint:04X} is a Bengali-block codepoint")]
    InvalidDestination { line: usize, codepoint: u32 },
    #[error("reading font map: {0}")]
    Io(String),
    #[error("unknown font `{0}`")]
    UnknownFont(String),
}

#[derive(Debug, Clone, Default)]
pub struct FontMap {
    pub font_name: String,
    rules: Vec<FontRule>,
    index: HashMap<Vec<char>, usize>,
    max_src: usize,
}

impl FontMap {
    pub fn new(font_name: impl Into<String>) -> Self {
        FontMap {
            font_name: font_name.into(),
            ..Default::default()
        }
    }

    pub fn from_rules(font_name: impl Into<String>, rules: impl IntoIterator<Item = FontRule>) -> Result<Self, FontMapError> {
        let mut map = FontMap::new(font_name);
        for (idx, rule) in rules.into_iter().enumerate() {
            map.push(idx + 1, rule)?;
        }
        Ok(map)
    }

    pub fn load(font_name: impl Into<String>, path: impl AsRef<Path>) -> Result<Self, FontMapError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| FontMapError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(font_name, &text)
    }

    pub fn parse(font_name: impl Into<String>, text: &str) -> Result<Self, FontMapError> {
        let mut map = FontMap::new(font_name);
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let raw = raw.trim_end_matches('\r');
            if raw.starts_with('#') || raw.trim().is_empty() {
                continue;
            }
            let err = |message: String| FontMapError::Parse { line, message };
            let mut fields = raw.splitn(3, '\t');
            let src = fields.next().unwrap_or_default();
            let dst = fields.next().ok_or_else(|| err("missing dst column".into()))?;
            let flag = fields.next().ok_or_else(|| err("missing prebase column".into()))?;
            // Anything after the flag is a comment.
            let flag = tsv::content(flag).unwrap_or_default().trim();
            let prebase = match flag {
                "0" => false,
                "1" => true,
                other => return Err(err(format!("prebase must be 0 or 1, got `{other}`"))),
            };
            let src = unescape(src).map_err(err)?;
            let dst = tsv::parse_hex_seq(dst).map_err(|e| err(e.to_string()))?;
            map.push(line, FontRule { src, dst, prebase })?;
        }
        Ok(map)
    }

    fn push(&mut self, line: usize, rule: FontRule) -> Result<(), FontMapError> {
        if rule.src.is_empty() {
            return Err(FontMapError::Parse {
                line,
                message: "empty source literal".into(),
            });
        }
        if let Some(c) = rule.dst.iter().find(|c| script_of(**c) == Script::Bangla) {
            return Err(FontMapError::InvalidDestination {
                line,
                codepoint: *c as u32,
            });
        }
        if self.index.contains_key(&rule.src) {
            return Err(FontMapError::DuplicateSource { line });
        }
        self.max_src = self.max_src.max(rule.src.len());
        self.index.insert(rule.src.clone(), self.rules.len());
        self.rules.push(rule);
        Ok(())
    }

    pub fn rules(&self) -> &[FontRule] {
        &self.rules
    }

    fn longest_match(&self, chars: &[char], pos: usize) -> Option<(&FontRule, usize)> {
        let available = chars.len() - pos;
        (1..=self.max_src.min(available))
            .rev()
            .find_map(|len| self.index.get(&chars[pos..pos + len]).map(|&i| (&self.rules[i], len)))
    }
}

/// Decodes `\t`, `\\`, `\#`, `\xHH` and `\u{H…}` in a source literal.
fn unescape(literal: &str) -> Result<Vec<char>, String> {
    let mut out = Vec::new();
    let mut chars = literal.chars().peekable();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('t') => out.push('\t'),
            Some('\\') => out.push('\\'),
            Some('#') => out.push('#'),
            Some('x') => {
                let hex: String = chars.by_ref().take(2).collect();
                let cp = u32::from_str_radix(&hex, 16).map_err(|_| format!("bad \\x escape `{hex}`"))?;
                out.push(char::from_u32(cp).ok_or_else(|| format!("bad \\x escape `{hex}`"))?);
            }
            Some('u') => {
                if chars.next() != Some('{') {
                    return Err("expected `{` after \\u".into());
                }
                let hex: String = chars.by_ref().take_while(|c| *c != '}').collect();
                let c = tsv::parse_codepoint(&hex).map_err(|e| e.to_string())?;
                out.push(c);
            }
            Some(other) => return Err(format!("unknown escape `\\{other}`")),
            None => return Err("dangling backslash".into()),
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Conversion {
    pub text: String,
    /// Input characters no rule matched (copied through unchanged).
    pub unmatched: usize,
    /// Input characters consumed by rules.
    pub matched: usize,
}

pub fn convert_font(text: &str, map: &FontMap) -> Conversion {
    let classes = ClassTable::builtin();
    let starts_with_base = |seq: &[char]| seq.first().is_some_and(|c| classes.classify(*c).kind.is_base());

    let chars: Vec<char> = text.chars().collect();
    let mut out = String::with_capacity(text.len());
    let mut pending: Option<&[char]> = None;
    let (mut matched, mut unmatched) = (0, 0);
    let mut pos = 0;
    while pos < chars.len() {
        match map.longest_match(&chars, pos) {
            Some((rule, len)) => {
                matched += len;
                pos += len;
                if rule.prebase {
                    // A second pre-base mark flushes the first; both stay ahead of the base.
                    match pending.take() {
                        Some(held) => {
                            out.extend(held);
                            out.extend(rule.dst.iter());
                        }
                        None => pending = Some(&rule.dst),
                    }
                } else if starts_with_base(&rule.dst) {
                    out.extend(rule.dst.iter());
                    if let Some(held) = pending.take() {
                        out.extend(held);
                    }
                } else {
                    if let Some(held) = pending.take() {
                        out.extend(held);
                    }
                    out.extend(rule.dst.iter());
                }
            }
            None => {
                if let Some(held) = pending.take() {
                    out.extend(held);
                }
                out.push(chars[pos]);
                unmatched += 1;
                pos += 1;
            }
        }
    }
    if let Some(held) = pending {
        out.extend(held);
    }
    Conversion {
        text: out,
        unmatched,
        matched,
    }
}

/// Known legacy font names, sorted.
pub fn list_known_fonts() -> Vec<&'static str> {
    let mut names = KNOWN_FONTS.to_vec();
    names.sort_unstable();
    names
}

/// File name used for a font's map, e.g. `Udoy Giri` → `udoy_giri.tsv`.
pub fn map_file_name(font: &str) -> String {
    let mut slug = String::new();
    for c in font.chars() {
        if c.is_ascii_alphanumeric() {
            slug.push(c.to_ascii_lowercase());
        } else if !slug.ends_with('_') {
            slug.push('_');
        }
    }
    format!("{}.tsv", slug.trim_matches('_'))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FontMapLocation {
    Path(PathBuf),
    MissingMap,
}

/// Looks for `<dir>/<map_file_name(font)>`.
pub fn resolve_font(font: &str, dir: &Path) -> FontMapLocation {
    let path = dir.join(map_file_name(font));
    if path.is_file() {
        FontMapLocation::Path(path)
    } else {
        FontMapLocation::MissingMap
    }
}

/// The map compiled into the crate for one of [`KNOWN_FONTS`].
///
/// The shipped files carry the schema only; glyph rows still have to be transcribed.
pub fn builtin_font_map(font: &str) -> Result<FontMap, FontMapError> {
    let (name, text) = BUILTIN_STUBS
        .iter()
        .find(|(name, _)| *name == font)
        .ok_or_else(|| FontMapError::UnknownFont(font.to_string()))?;
    FontMap::parse(*name, text)
}
