//! Sentence segmentation and text normalization.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use unicode_normalization::UnicodeNormalization;

pub const BANGLA_DANDA: char = '\u{0964}';
pub const BANGLA_DOUBLE_DANDA: char = '\u{0965}';
pub const CHAKMA_DANDA: char = '\u{11141}';
pub const CHAKMA_DOUBLE_DANDA: char = '\u{11142}';

/// Sentence-final marks used when `--extra-danda` is requested.
pub const DANDAS: [char; 4] = [BANGLA_DANDA, BANGLA_DOUBLE_DANDA, CHAKMA_DANDA, CHAKMA_DOUBLE_DANDA];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmenterConfig {
    pub delimiters: BTreeSet<char>,
    pub keep_delimiter: bool,
    pub extra_delimiters: Option<BTreeSet<char>>,
}

impl Default for SegmenterConfig {
    fn default() -> Self {
        SegmenterConfig {
            delimiters: ['?', '!', '.'].into_iter().collect(),
            keep_delimiter: true,
            extra_delimiters: None,
        }
    }
}

impl SegmenterConfig {
    pub fn with_dandas() -> Self {
        SegmenterConfig {
            extra_delimiters: Some(DANDAS.into_iter().collect()),
            ..Default::default()
        }
    }

    fn is_delimiter(&self, c: char) -> bool {
        self.delimiters.contains(&c) || self.extra_delimiters.as_ref().is_some_and(|extra| extra.contains(&c))
    }
}

/// Splits after every delimiter. Segments are trimmed and empty ones dropped.
///
/// There is no abbreviation handling: `Dr. X` becomes two segments.
pub fn segment(text: &str, cfg: &SegmenterConfig) -> Vec<String> {
    assert!(!cfg.delimiters.is_empty(), "segmenter needs at least one delimiter");
    let mut segments = Vec::new();
    let mut current = String::new();
    let mut flush = |current: &mut String| {
        let trimmed = current.trim();
        if !trimmed.is_empty() {
            segments.push(trimmed.to_string());
        }
        current.clear();
    };
    for c in text.chars() {
        if cfg.is_delimiter(c) {
            if cfg.keep_delimiter {
                current.push(c);
            }
            flush(&mut current);
        } else {
            current.push(c);
        }
    }
    flush(&mut current);
    segments
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum UnicodeForm {
    #[default]
    #[serde(rename = "NFC")]
    Nfc,
}

/// Every field is required when deserializing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormalizerConfig {
    pub unicode_form: UnicodeForm,
    pub collapse_whitespace: bool,
    pub strip_zero_width: bool,
    pub unify_danda_to_period: bool,
}

impl Default for NormalizerConfig {
    fn default() -> Self {
        NormalizerConfig {
            unicode_form: UnicodeForm::Nfc,
            collapse_whitespace: true,
            strip_zero_width: true,
            unify_danda_to_period: false,
        }
    }
}

/// ZWNJ and ZWJ are kept: they select conjunct forms in Bengali.
fn is_zero_width(c: char) -> bool {
    matches!(c, '\u{200B}' | '\u{2060}' | '\u{FEFF}' | '\u{00AD}')
}

/// Zero-width removal, canonical composition, danda unification and
/// whitespace collapse, in that order. Idempotent for every configuration.
pub fn normalize(text: &str, cfg: &NormalizerConfig) -> String {
    let stripped: String = if cfg.strip_zero_width {
        text.chars().filter(|c| !is_zero_width(*c)).collect()
    } else {
        text.to_string()
    };
    let composed: String = match cfg.unicode_form {
        UnicodeForm::Nfc => stripped.nfc().collect(),
    };
    let unified: String = if cfg.unify_danda_to_period {
        composed
            .chars()
            .map(|c| if c == BANGLA_DANDA || c == CHAKMA_DANDA { '.' } else { c })
            .collect()
    } else {
        composed
    };
    if cfg.collapse_whitespace {
        unified.split_whitespace().collect::<Vec<_>>().join(" ")
    } else {
        unified
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn segment_examples() {
        let cfg = SegmenterConfig::default();
        assert_eq!(segment("ab. cd? ef!", &cfg), vec!["ab.", "cd?", "ef!"]);
        assert!(segment("", &cfg).is_empty());
        assert_eq!(segment("no delimiter here", &cfg), vec!["no delimiter here"]);
        assert_eq!(segment("  . ..", &cfg), vec![".", ".", "."]);
    }

    #[test]
    fn danda_is_opt_in() {
        let text = "আমি যাব। তুমি?";
        assert_eq!(segment(text, &SegmenterConfig::default()), vec![text]);
        assert_eq!(segment(text, &SegmenterConfig::with_dandas()), vec!["আমি যাব।", "তুমি?"]);
    }

    #[test]
    fn dropping_delimiters() {
        let cfg = SegmenterConfig {
            keep_delimiter: false,
            ..Default::default()
        };
        assert_eq!(segment("ab. cd?", &cfg), vec!["ab", "cd"]);
    }

    #[test]
    fn normalize_examples() {
        let cfg = NormalizerConfig::default();
        assert_eq!(normalize("a\u{200B}b", &cfg), "ab");
        assert_eq!(normalize("a   b\tc", &cfg), "a b c");
        assert_eq!(normalize("  x  ", &cfg), "x");
        let keep = NormalizerConfig {
            strip_zero_width: false,
            collapse_whitespace: false,
            ..cfg
        };
        assert_eq!(normalize("a\u{200B}b  c", &keep), "a\u{200B}b  c");
        let danda = NormalizerConfig {
            unify_danda_to_period: true,
            ..cfg
        };
        assert_eq!(normalize("ক।", &danda), "ক.");
    }

    #[test]
    fn composes_bengali_two_part_vowels() {
        // E sign + AA sign composes to O sign under NFC.
        assert_eq!(
            normalize("\u{0995}\u{09C7}\u{09BE}", &NormalizerConfig::default()),
            "\u{0995}\u{09CB}"
        );
    }

    #[test]
    fn config_serialization_requires_every_flag() {
        let json = serde_json::to_string(&NormalizerConfig::default()).unwrap();
        assert_eq!(
            json,
            r#"{"unicode_form":"NFC","collapse_whitespace":true,"strip_zero_width":true,"unify_danda_to_period":false}"#
        );
        assert!(serde_json::from_str::<NormalizerConfig>(r#"{"unicode_form":"NFC"}"#).is_err());
    }

    fn any_config() -> impl Strategy<Value = NormalizerConfig> {
        (any::<bool>(), any::<bool>(), any::<bool>()).prop_map(|(collapse, strip, danda)| NormalizerConfig {
            unicode_form: UnicodeForm::Nfc,
            collapse_whitespace: collapse,
            strip_zero_width: strip,
            unify_danda_to_period: danda,
        })
    }

    fn messy_text() -> impl Strategy<Value = String> {
        let pieces = prop::sample::select(vec![
            "a",
            "e\u{301}",
            "\u{301}",
            " ",
            "\t",
            "\n",
            "\u{200B}",
            "\u{FEFF}",
            "\u{200C}",
            "।",
            "\u{11141}",
            "\u{0995}",
            "\u{09C7}",
            "\u{09BE}",
            "\u{09BC}",
            "\u{11107}",
            "\u{11128}",
            "\u{11101}",
            ".",
            "?",
        ]);
        prop::collection::vec(pieces, 0..24).prop_map(|v| v.concat())
    }

    proptest! {
        #[test]
        fn normalize_is_idempotent(text in messy_text(), cfg in any_config()) {
            let once = normalize(&text, &cfg);
            prop_assert_eq!(normalize(&once, &cfg), once);
        }

        #[test]
        fn normalize_is_idempotent_on_arbitrary_unicode(text in "\\PC{0,40}", cfg in any_config()) {
            let once = normalize(&text, &cfg);
            prop_assert_eq!(normalize(&once, &cfg), once);
        }

        #[test]
        fn segmentation_is_stable(text in "[a-c .?!\t]{0,40}") {
            let cfg = SegmenterConfig::default();
            let first = segment(&text, &cfg);
            let again = segment(&first.join(" "), &cfg);
            prop_assert_eq!(again, first);
        }

        #[test]
        fn no_delimiter_lost(text in "[a-c .?!\u{0964}]{0,40}") {
            let cfg = SegmenterConfig::with_dandas();
            let count = |s: &str| s.chars().filter(|c| cfg.is_delimiter(*c)).count();
            let segments = segment(&text, &cfg);
            prop_assert_eq!(segments.iter().map(|s| count(s)).sum::<usize>(), count(&text));
        }
    }
}
