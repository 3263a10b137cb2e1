//! Helpers shared by the tab-separated data files.

use std::fmt;

/// Strips a `#` comment and surrounding line-ending whitespace.
///
/// Returns `None` for blank and comment-only lines.
pub(crate) fn content(line: &str) -> Option<&str> {
    let body = match line.find('#') {
        Some(pos) => &line[..pos],
        None => line,
    };
    let body = body.trim_end_matches(['\r', '\n']);
    if body.trim().is_empty() {
        None
    } else {
        Some(body)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct HexError(pub String);

impl fmt::Display for HexError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid codepoint `{}`", self.0)
    }
}

pub(crate) fn parse_codepoint(token: &str) -> Result<char, HexError> {
    let trimmed = token
        .trim()
        .trim_start_matches("U+")
        .trim_start_matches("u+")
        .trim_start_matches("0x");
    u32::from_str_radix(trimmed, 16)
        .ok()
        .and_then(char::from_u32)
        .ok_or_else(|| HexError(token.trim().to_string()))
}

/// Parses a space-separated hex codepoint sequence such as `0995 09CD 09B7`.
pub(crate) fn parse_hex_seq(field: &str) -> Result<Vec<char>, HexError> {
    field.split_whitespace().map(parse_codepoint).collect()
}

pub(crate) fn format_hex_seq(chars: &[char]) -> String {
    chars
        .iter()
        .map(|c| format!("{:04X}", *c as u32))
        .collect::<Vec<_>>()
        .join(" ")
}
