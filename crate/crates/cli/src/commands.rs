use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{self, BufRead, BufWriter, Write};
use std::net::SocketAddr;
use std::path::Path;

use anyhow::{anyhow, Context};
use ccpmt::backtranslation::{reports_to_jsonl, run_bt, BtConfig};
use ccpmt::corpus::{self, Format, ParallelRecord, Records, Split, SplitSpec};
use ccpmt::lang::Lang;
use ccpmt::legacy_fonts::{self, FontMap, FontMapLocation};
use ccpmt::metrics::{self, BleuConfig, ChrfConfig};
use ccpmt::subword::{self, EncodeConfig, Vocab};
use ccpmt::textproc::{self, NormalizerConfig, SegmenterConfig};
use ccpmt::translator::{DecodeConfig, StatConfig, StatTranslator, Translator};
use ccpmt::translit::{self, MappingTable, TransliterationMode};

use crate::{BtCommand, Cli, Command, CorpusCommand, DecodeArgs, Metric, SpmCommand};

pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

type Result<T, E = Failure> = std::result::Result<T, E>;

/// Errors from reading or validating input are data errors unless marked otherwise.
impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(error: E) -> Self {
        Failure {
            code: 2,
            error: error.into(),
        }
    }
}

trait Internal<T> {
    fn internal(self) -> Result<T>;
}

impl<T, E: Into<anyhow::Error>> Internal<T> for std::result::Result<T, E> {
    fn internal(self) -> Result<T> {
        self.map_err(|e| Failure {
            code: 3,
            error: e.into(),
        })
    }
}

struct Ctx {
    quiet: bool,
    seed: u64,
}

impl Ctx {
    fn info(&self, msg: impl AsRef<str>) {
        if !self.quiet {
            eprintln!("{}", msg.as_ref());
        }
    }
}

pub fn run(cli: Cli) -> Result<()> {
    let ctx = Ctx {
        quiet: cli.quiet,
        seed: cli.seed,
    };
    match cli.command {
        Command::Translit(a) => translit_cmd(a),
        Command::Fontconv(a) => fontconv(&ctx, a),
        Command::Segment(a) => {
            let cfg = if a.extra_danda {
                SegmenterConfig::with_dandas()
            } else {
                SegmenterConfig::default()
            };
            map_lines(|line, out| {
                for s in textproc::segment(line, &cfg) {
                    writeln!(out, "{s}")?;
                }
                Ok(())
            })
        }
        Command::Normalize(a) => {
            let cfg = NormalizerConfig {
                collapse_whitespace: !a.no_collapse,
                strip_zero_width: !a.keep_zero_width,
                unify_danda_to_period: a.unify_danda,
                ..NormalizerConfig::default()
            };
            map_lines(|line, out| Ok(writeln!(out, "{}", textproc::normalize(line, &cfg))?))
        }
        Command::Spm(c) => spm(&ctx, c),
        Command::Corpus(c) => corpus_cmd(&ctx, c),
        Command::Score(a) => score(a),
        Command::Train(a) => train(&ctx, a),
        Command::Translate(a) => translate(a),
        Command::Bt(BtCommand::Run(a)) => bt(&ctx, a),
        Command::Serve(a) => serve(&ctx, a),
    }
}

/// Applies `f` to each stdin line, streaming to stdout. Data errors carry the line number.
fn map_lines(mut f: impl FnMut(&str, &mut dyn Write) -> Result<()>) -> Result<()> {
    let stdin = io::stdin();
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    for (i, line) in stdin.lock().lines().enumerate() {
        let line = line.with_context(|| format!("stdin line {}", i + 1))?;
        f(&line, &mut out).map_err(|mut failure| {
            failure.error = failure.error.context(format!("line {}", i + 1));
            failure
        })?;
    }
    out.flush().internal()
}

fn read_text(path: &Path) -> Result<String> {
    Ok(fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?)
}

fn read_lines(path: &Path) -> Result<Vec<String>> {
    Ok(read_text(path)?.lines().map(String::from).collect())
}

fn stdout_writer() -> BufWriter<io::StdoutLock<'static>> {
    BufWriter::new(io::stdout().lock())
}

fn write_records<T: serde::Serialize>(records: &[T]) -> Result<()> {
    let mut out = stdout_writer();
    corpus::write_jsonl(&mut out, records).internal()?;
    out.flush().internal()
}

fn load_table(map: Option<&Path>) -> Result<MappingTable> {
    Ok(match map {
        Some(path) => MappingTable::load(path)?,
        None => MappingTable::builtin().clone(),
    })
}

fn translit_cmd(a: crate::TranslitArgs) -> Result<()> {
    let table = load_table(a.map.as_deref())?;
    let mode = TransliterationMode {
        unmapped_policy: a.on_unmapped,
        nctb_strict: a.strict_nctb,
    };
    let convert = match (a.direction.src, a.direction.tgt) {
        (Lang::Ccp, Lang::Bn) => translit::ccp_to_bn,
        (Lang::Bn, Lang::Ccp) => translit::bn_to_ccp,
        _ => return Err(anyhow!("transliteration runs between ccp and bn, not {}", a.direction).into()),
    };
    map_lines(|line, out| Ok(writeln!(out, "{}", convert(line, &table, mode)?)?))
}

fn fontconv(ctx: &Ctx, a: crate::FontconvArgs) -> Result<()> {
    if a.list {
        let mut out = stdout_writer();
        for font in legacy_fonts::list_known_fonts() {
            let location = match &a.font_dir {
                Some(dir) => match legacy_fonts::resolve_font(font, dir) {
                    FontMapLocation::Path(p) => p.display().to_string(),
                    FontMapLocation::MissingMap => "missing".to_string(),
                },
                None => format!("builtin:{}", legacy_fonts::map_file_name(font)),
            };
            writeln!(out, "{font}\t{location}").internal()?;
        }
        return out.flush().internal();
    }
    let map = match (&a.map, &a.font) {
        (Some(path), _) => {
            let name = a.font.clone().unwrap_or_else(|| path.display().to_string());
            FontMap::load(name, path)?
        }
        (None, Some(font)) => {
            let location = a.font_dir.as_deref().map(|dir| legacy_fonts::resolve_font(font, dir));
            match location {
                Some(FontMapLocation::Path(path)) => FontMap::load(font.clone(), path)?,
                _ => {
                    let map = legacy_fonts::builtin_font_map(font)?;
                    if map.rules().is_empty() {
                        ctx.info(format!("warning: no glyph rows for `{font}`; text passes through unchanged"));
                    }
                    map
                }
            }
        }
        (None, None) => unreachable!("clap requires --font, --map or --list"),
    };
    let mut unmatched = 0;
    map_lines(|line, out| {
        let conv = legacy_fonts::convert_font(line, &map);
        unmatched += conv.unmatched;
        Ok(writeln!(out, "{}", conv.text)?)
    })?;
    if !ctx.quiet {
        eprintln!("unmatched={unmatched}");
    }
    Ok(())
}

fn spm(ctx: &Ctx, c: SpmCommand) -> Result<()> {
    match c {
        SpmCommand::Train { size, input, out } => {
            let lines = read_lines(&input)?;
            let vocab = subword::train_vocab(&lines, size)?;
            fs::write(&out, vocab.to_file_string())
                .with_context(|| format!("writing {}", out.display()))
                .internal()?;
            ctx.info(format!(
                "vocab: {} tokens ({} requested, {} merges)",
                vocab.len(),
                size,
                vocab.merges().len()
            ));
            Ok(())
        }
        SpmCommand::Encode {
            vocab,
            max_len,
            no_bos_eos,
            prefix,
        } => {
            let vocab = Vocab::load(&vocab)?;
            let cfg = EncodeConfig {
                max_len,
                add_bos_eos: !no_bos_eos,
                language_prefix: prefix,
            };
            cfg.validate().map_err(|e| anyhow!(e))?;
            map_lines(|line, out| {
                let ids: Vec<String> = subword::encode(line, &vocab, &cfg).iter().map(u32::to_string).collect();
                Ok(writeln!(out, "{}", ids.join(" "))?)
            })
        }
        SpmCommand::Decode { vocab } => {
            let vocab = Vocab::load(&vocab)?;
            map_lines(|line, out| {
                let ids = line
                    .split_whitespace()
                    .map(|t| t.parse::<u32>().with_context(|| format!("bad id `{t}`")))
                    .collect::<Result<Vec<u32>, _>>()?;
                Ok(writeln!(out, "{}", subword::decode(&ids, &vocab)?)?)
            })
        }
    }
}

fn ingest_parallel(path: &Path) -> Result<Vec<ParallelRecord>> {
    Ok(corpus::ingest_parallel(path).with_context(|| path.display().to_string())?)
}

fn corpus_cmd(ctx: &Ctx, c: CorpusCommand) -> Result<()> {
    match c {
        CorpusCommand::Ingest(input) => {
            let format = if input.mono { Format::Mono } else { Format::Parallel };
            match corpus::ingest(&input.input, format).with_context(|| input.input.display().to_string())? {
                Records::Parallel(r) => {
                    ctx.info(format!("{} parallel records", r.len()));
                    write_records(&r)
                }
                Records::Mono(r) => {
                    ctx.info(format!("{} monolingual records", r.len()));
                    write_records(&r)
                }
            }
        }
        CorpusCommand::Dedupe(input) => {
            let (kept, report) = corpus::dedupe(ingest_parallel(&input.input)?);
            ctx.info(serde_json::to_string(&report).internal()?);
            write_records(&kept)
        }
        CorpusCommand::Split { input, train, dev } => {
            let spec = SplitSpec {
                train_count: train,
                dev_count: dev,
                seed: ctx.seed,
            };
            let out = corpus::split(ingest_parallel(&input.input)?, &spec)?;
            let stats = corpus::stats(&out);
            ctx.info(serde_json::to_string(&stats.by_split).internal()?);
            write_records(&out)
        }
        CorpusCommand::Multi { input, dirs, balance } => {
            let records = ingest_parallel(&input.input)?;
            let examples = corpus::make_multilingual(&records, &dirs, balance, ctx.seed)?;
            ctx.info(format!("{} examples", examples.len()));
            write_records(&examples)
        }
        CorpusCommand::Stats(input) => {
            let json = if input.mono {
                let records = corpus::ingest_mono(&input.input).with_context(|| input.input.display().to_string())?;
                serde_json::to_string_pretty(&corpus::mono_stats(&records))
            } else {
                serde_json::to_string_pretty(&corpus::stats(&ingest_parallel(&input.input)?))
            };
            println!("{}", json.internal()?);
            Ok(())
        }
    }
}

fn score(a: crate::ScoreArgs) -> Result<()> {
    let hyps = read_lines(&a.hyp)?;
    let refs = read_lines(&a.reference)?;
    let report = match a.metric {
        Metric::Bleu => metrics::bleu(&hyps, &refs, &BleuConfig::default())?,
        Metric::Chrf => metrics::chrf(&hyps, &refs, &ChrfConfig::default())?,
    };
    if a.json {
        println!("{}", serde_json::to_string(&report).internal()?);
    } else {
        println!("{} = {:.2}", report.metric, report.score);
    }
    Ok(())
}

fn decode_config(d: &DecodeArgs) -> Result<DecodeConfig> {
    let cfg = DecodeConfig {
        beam_width: d.beam,
        max_len: d.max_len,
        candidates_per_word: d.candidates,
        length_penalty: d.length_penalty,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn train(ctx: &Ctx, a: crate::TrainArgs) -> Result<()> {
    let config = StatConfig {
        em_iterations: a.iters,
        use_null: !a.no_null,
        lm_alpha: a.alpha,
        ..StatConfig::default()
    };
    let mut translator = if a.model.is_dir() {
        StatTranslator::load(&a.model, config)?
    } else {
        StatTranslator::new(config)
    };
    let records = ingest_parallel(&a.parallel)?;
    let examples: Vec<(String, String)> = records
        .iter()
        .filter(|r| !matches!(r.split, Split::Dev | Split::Test))
        .filter_map(|r| Some((r.text(a.direction.src)?.to_string(), r.text(a.direction.tgt)?.to_string())))
        .collect();
    if examples.is_empty() {
        return Err(anyhow!("no training pairs for {} in {}", a.direction, a.parallel.display()).into());
    }
    translator.train(&examples, a.direction)?;
    if let Some(trace) = translator.model(a.direction).and_then(|m| m.trace.as_ref()) {
        for (i, ll) in trace.log_likelihood.iter().enumerate() {
            ctx.info(format!("iteration {}: log-likelihood {ll:.6}", i + 1));
        }
    }
    let written = translator.save(&a.model).internal()?;
    ctx.info(format!(
        "{} pairs, wrote {} files to {}",
        examples.len(),
        written.len(),
        a.model.display()
    ));
    Ok(())
}

fn translate(a: crate::TranslateArgs) -> Result<()> {
    let config = StatConfig {
        decode: decode_config(&a.decode)?,
        ..StatConfig::default()
    };
    let translator = StatTranslator::load(&a.model, config)?;
    if translator.model(a.direction).is_none() {
        return Err(anyhow!("no model for {} in {}", a.direction, a.model.display()).into());
    }
    map_lines(|line, out| {
        let result = translator.translate(&[line.to_string()], a.direction)?;
        Ok(writeln!(out, "{}", result[0])?)
    })
}

fn bt(ctx: &Ctx, a: crate::BtArgs) -> Result<()> {
    let parallel = ingest_parallel(&a.parallel)?;
    let dev = ingest_parallel(&a.dev)?;
    let mut pools = BTreeMap::new();
    for (lang, path) in [(Lang::Ccp, &a.mono_ccp), (Lang::Bn, &a.mono_bn)] {
        let records = corpus::ingest_mono(path).with_context(|| path.display().to_string())?;
        pools.insert(lang, records.into_iter().filter(|r| r.lang == lang).collect::<Vec<_>>());
    }
    let cfg = BtConfig {
        src_lang: a.src,
        tgt_lang: a.tgt,
        mono_pools: pools,
        ratio: a.ratio,
        max_iterations: a.max_iters,
        convergence_epsilon: a.epsilon,
        seed: ctx.seed,
        mono_cap: a.mono_cap,
        ..BtConfig::default()
    };
    let mut translator = StatTranslator::new(StatConfig {
        em_iterations: a.em_iters,
        decode: decode_config(&a.decode)?,
        ..StatConfig::default()
    });
    let run = run_bt(&parallel, &dev, &mut translator, &cfg)?;

    fs::create_dir_all(&a.out_dir)
        .with_context(|| a.out_dir.display().to_string())
        .internal()?;
    let report = reports_to_jsonl(&run.reports);
    fs::write(a.out_dir.join("report.jsonl"), &report).internal()?;
    for batch in &run.synthetic {
        let path = a
            .out_dir
            .join(format!("synthetic-iter{}-{}.jsonl", batch.iteration, batch.direction));
        let mut file = BufWriter::new(File::create(&path).internal()?);
        corpus::write_jsonl(&mut file, &batch.records).internal()?;
        file.flush().internal()?;
    }
    for r in &run.reports {
        ctx.info(format!(
            "iteration {} {}: BLEU {:.2} chrF {:.2} (drawn {}, synthetic {}, {:.1}s)",
            r.iteration,
            r.direction,
            r.dev_bleu,
            r.dev_chrf,
            r.mono_drawn,
            r.synthetic_count,
            r.elapsed.as_secs_f64()
        ));
    }
    if run.converged {
        ctx.info("stopped: dev BLEU gain below epsilon in both directions");
    }
    print!("{report}");
    Ok(())
}

fn serve(ctx: &Ctx, a: crate::ServeArgs) -> Result<()> {
    let filter = if ctx.quiet { "warn" } else { "info" };
    let _ = tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| tracing_subscriber::EnvFilter::new(filter)),
        )
        .with_writer(io::stderr)
        .try_init();
    let cfg = ccpmt_collect::ServeConfig {
        addr: SocketAddr::new(a.host, a.port),
        tasks: a.tasks,
        store: a.store,
        map: a.map,
        static_dir: a.static_dir,
    };
    // Bad inputs are data errors; only failures once serving count as internal.
    let state = ccpmt_collect::build_state(&cfg)?;
    let runtime = tokio::runtime::Builder::new_multi_thread().enable_all().build().internal()?;
    runtime.block_on(ccpmt_collect::serve_state(state, &cfg)).internal()
}
