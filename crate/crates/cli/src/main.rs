//! `ccpmt`: every stage of the Chakma/Bangla MT data pipeline as a subcommand.
//!
//! Exit codes: 0 success, 1 usage error, 2 data or parse error, 3 internal error.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use ccpmt::lang::{Direction, Lang};
use ccpmt::translit::UnmappedPolicy;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "ccpmt", version, about = "Chakma/Bangla machine-translation corpus pipeline")]
pub struct Cli {
    /// Suppress informational messages on stderr.
    #[arg(long, global = true)]
    pub quiet: bool,
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Transliterate between Chakma and Bangla script (stdin to stdout).
    Translit(TranslitArgs),
    /// Convert text typed in a legacy ASCII Chakma font to Unicode.
    Fontconv(FontconvArgs),
    /// Split lines into sentences, one per output line.
    Segment(SegmentArgs),
    /// Normalize each line.
    Normalize(NormalizeArgs),
    /// Subword vocabulary training and encoding.
    #[command(subcommand)]
    Spm(SpmCommand),
    /// Corpus ingestion, deduplication, splitting and statistics.
    #[command(subcommand)]
    Corpus(CorpusCommand),
    /// Corpus-level BLEU or chrF.
    Score(ScoreArgs),
    /// Train the statistical translator for one direction.
    Train(TrainArgs),
    /// Translate lines with a trained model.
    Translate(TranslateArgs),
    /// Iterative back-translation.
    #[command(subcommand)]
    Bt(BtCommand),
    /// Run the translation-collection HTTP service.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct TranslitArgs {
    /// `ccp2bn` or `bn2ccp`.
    #[arg(long = "dir")]
    pub direction: Direction,
    /// Mapping table TSV; the shipped table by default.
    #[arg(long)]
    pub map: Option<PathBuf>,
    /// Reject Chakma clusters carrying more than one diacritic.
    #[arg(long)]
    pub strict_nctb: bool,
    /// `pass` or `error`.
    #[arg(long, default_value = "pass")]
    pub on_unmapped: UnmappedPolicy,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("source").required(true).args(["font", "map", "list"]))]
pub struct FontconvArgs {
    /// One of the known legacy font names.
    #[arg(long)]
    pub font: Option<String>,
    /// Font map TSV.
    #[arg(long)]
    pub map: Option<PathBuf>,
    /// Directory holding transcribed font maps, searched before the shipped stubs.
    #[arg(long)]
    pub font_dir: Option<PathBuf>,
    /// List known fonts and where their maps resolve.
    #[arg(long)]
    pub list: bool,
}

#[derive(Debug, Args)]
pub struct SegmentArgs {
    /// Also split at Bangla and Chakma dandas.
    #[arg(long)]
    pub extra_danda: bool,
}

#[derive(Debug, Args)]
pub struct NormalizeArgs {
    #[arg(long)]
    pub no_collapse: bool,
    #[arg(long)]
    pub keep_zero_width: bool,
    /// Replace single dandas with a period.
    #[arg(long)]
    pub unify_danda: bool,
}

#[derive(Debug, Subcommand)]
pub enum SpmCommand {
    /// Learn a vocabulary from a text file.
    Train {
        #[arg(long)]
        size: usize,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Text lines to space-separated ids.
    Encode {
        #[arg(long)]
        vocab: PathBuf,
        #[arg(long, default_value_t = 128)]
        max_len: usize,
        #[arg(long)]
        no_bos_eos: bool,
        /// Prepend the `<2xx>` token for this target language.
        #[arg(long)]
        prefix: Option<Lang>,
    },
    /// Space-separated ids to text lines.
    Decode {
        #[arg(long)]
        vocab: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum CorpusCommand {
    /// Validate and normalize a JSONL file, writing the records to stdout.
    Ingest(CorpusInput),
    /// Drop repeated (ccp, bn) pairs.
    Dedupe(CorpusInput),
    /// Assign train and dev splits.
    Split {
        #[command(flatten)]
        input: CorpusInput,
        #[arg(long)]
        train: usize,
        #[arg(long)]
        dev: usize,
    },
    /// Prefixed many-to-many training examples.
    Multi {
        #[command(flatten)]
        input: CorpusInput,
        /// Comma-separated directions, e.g. `bn2ccp,ccp2bn,en2ccp`.
        #[arg(long, value_delimiter = ',', required = true)]
        dirs: Vec<Direction>,
        /// Oversample smaller directions up to the largest.
        #[arg(long)]
        balance: bool,
    },
    /// Counts by source and split plus length histograms.
    Stats(CorpusInput),
}

#[derive(Debug, Args)]
pub struct CorpusInput {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Monolingual records instead of parallel ones.
    #[arg(long)]
    pub mono: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Metric {
    Bleu,
    Chrf,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[arg(long, value_enum)]
    pub metric: Metric,
    #[arg(long)]
    pub hyp: PathBuf,
    #[arg(long = "ref")]
    pub reference: PathBuf,
    /// Print the full report as JSON.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long = "dir")]
    pub direction: Direction,
    /// Parallel JSONL; dev and test records are skipped.
    #[arg(long)]
    pub parallel: PathBuf,
    #[arg(long, default_value_t = 10)]
    pub iters: usize,
    /// Model directory; other directions already in it are kept.
    #[arg(long, default_value = "model")]
    pub model: PathBuf,
    #[arg(long, default_value_t = 0.1)]
    pub alpha: f64,
    /// Train without the null source word.
    #[arg(long)]
    pub no_null: bool,
}

#[derive(Debug, Args)]
pub struct DecodeArgs {
    #[arg(long, default_value_t = 5)]
    pub beam: usize,
    #[arg(long, default_value_t = 10)]
    pub candidates: usize,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub length_penalty: f64,
    #[arg(long, default_value_t = 128)]
    pub max_len: usize,
}

#[derive(Debug, Args)]
pub struct TranslateArgs {
    #[arg(long = "dir")]
    pub direction: Direction,
    #[arg(long)]
    pub model: PathBuf,
    #[command(flatten)]
    pub decode: DecodeArgs,
}

#[derive(Debug, Subcommand)]
pub enum BtCommand {
    /// Run the loop and write `report.jsonl` plus one synthetic corpus per pass.
    Run(BtArgs),
}

#[derive(Debug, Args)]
pub struct BtArgs {
    #[arg(long)]
    pub parallel: PathBuf,
    #[arg(long)]
    pub dev: PathBuf,
    #[arg(long)]
    pub mono_ccp: PathBuf,
    #[arg(long)]
    pub mono_bn: PathBuf,
    #[arg(long, default_value = "ccp")]
    pub src: Lang,
    #[arg(long, default_value = "bn")]
    pub tgt: Lang,
    #[arg(long, default_value_t = 1)]
    pub ratio: usize,
    #[arg(long, default_value_t = 4)]
    pub max_iters: usize,
    #[arg(long)]
    pub mono_cap: Option<usize>,
    #[arg(long, default_value_t = 0.1, allow_negative_numbers = true)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 10)]
    pub em_iters: usize,
    #[arg(long)]
    pub out_dir: PathBuf,
    #[command(flatten)]
    pub decode: DecodeArgs,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, default_value = "127.0.0.1")]
    pub host: std::net::IpAddr,
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    /// Task JSONL: `{"task_id", "bn", "en"?}` per line.
    #[arg(long)]
    pub tasks: PathBuf,
    /// Append-only submission store.
    #[arg(long)]
    pub store: PathBuf,
    #[arg(long)]
    pub map: Option<PathBuf>,
    /// Directory of static files served at `/`.
    #[arg(long = "static")]
    pub static_dir: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {:#}", failure.error);
            ExitCode::from(failure.code)
        }
    }
}
