//! Language codes and translation directions.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Lang {
    Ccp,
    Bn,
    En,
}

impl Lang {
    pub const ALL: [Lang; 3] = [Lang::Ccp, Lang::Bn, Lang::En];

    pub fn code(self) -> &'static str {
        match self {
            Lang::Ccp => "ccp",
            Lang::Bn => "bn",
            Lang::En => "en",
        }
    }

    /// Target-language tag prepended to multilingual source sentences.
    pub fn prefix_token(self) -> &'static str {
        match self {
            Lang::Ccp => "<2ccp>",
            Lang::Bn => "<2bn>",
            Lang::En => "<2en>",
        }
    }
}

impl fmt::Display for Lang {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown language `{0}` (expected ccp, bn or en)")]
pub struct UnknownLang(pub String);

impl FromStr for Lang {
    type Err = UnknownLang;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ccp" => Ok(Lang::Ccp),
            "bn" => Ok(Lang::Bn),
            "en" => Ok(Lang::En),
            other => Err(UnknownLang(other.to_string())),
        }
    }
}

/// A source → target language pair, written `bn2ccp` on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Direction {
    pub src: Lang,
    pub tgt: Lang,
}

impl Direction {
    pub const fn new(src: Lang, tgt: Lang) -> Self {
        Direction { src, tgt }
    }

    pub fn reversed(self) -> Self {
        Direction::new(self.tgt, self.src)
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}2{}", self.src, self.tgt)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid direction `{0}` (expected e.g. bn2ccp)")]
pub struct InvalidDirection(pub String);

impl FromStr for Direction {
    type Err = InvalidDirection;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || InvalidDirection(s.to_string());
        let (src, tgt) = s.split_once('2').ok_or_else(bad)?;
        let src: Lang = src.parse().map_err(|_| bad())?;
        let tgt: Lang = tgt.parse().map_err(|_| bad())?;
        if src == tgt {
            return Err(bad());
        }
        Ok(Direction::new(src, tgt))
    }
}

impl Serialize for Direction {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Direction {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
