//! Data-engineering toolkit for Chakma (`ccp`) and Bangla (`bn`) machine translation.
//!
//! The crate covers the text side of a low-resource MT pipeline: script
//! classification and grapheme clustering, table-driven Chakma/Bangla
//! transliteration, legacy ASCII font unification, segmentation and
//! normalization, a pair-merge subword tokenizer, corpus management, BLEU and
//! chrF scoring, a small statistical translator and an iterative
//! back-translation orchestrator built on top of it.

pub mod backtranslation;
pub mod corpus;
pub mod lang;
pub mod legacy_fonts;
pub mod metrics;
pub mod script;
pub mod subword;
pub mod textproc;
pub mod translator;
pub mod translit;

mod tsv;

pub use lang::{Direction, Lang};
