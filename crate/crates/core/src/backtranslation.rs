//! Iterative back-translation over any [`Translator`].
//!
//! Each pass trains a generator in one direction, uses it to turn a sample of
//! target-language monolingual text into synthetic pairs, trains the opposite
//! direction on real plus synthetic data and scores it on the dev set. Passes
//! alternate directions; two passes make one iteration.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{MonolingualRecord, ParallelRecord, Source, Split};
use crate::lang::{Direction, Lang};
use crate::metrics::{bleu, chrf, BleuConfig, ChrfConfig, MetricError};
use crate::translator::{Translator, TranslatorError};

#[derive(Debug, Clone)]
pub struct BtConfig {
    pub src_lang: Lang,
    pub tgt_lang: Lang,
    pub mono_pools: BTreeMap<Lang, Vec<MonolingualRecord>>,
    /// Monolingual sentences drawn per real parallel pair.
    pub ratio: usize,
    pub max_iterations: usize,
    /// Minimum dev-BLEU gain (in BLEU points) that keeps the loop going.
    pub convergence_epsilon: f64,
    pub seed: u64,
    pub mono_cap: Option<usize>,
    pub bleu: BleuConfig,
    pub chrf: ChrfConfig,
}

impl Default for BtConfig {
    fn default() -> Self {
        BtConfig {
            src_lang: Lang::Ccp,
            tgt_lang: Lang::Bn,
            mono_pools: BTreeMap::new(),
            ratio: 1,
            max_iterations: 4,
            convergence_epsilon: 0.1,
            seed: 0,
            mono_cap: None,
            bleu: BleuConfig::default(),
            chrf: ChrfConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationReport {
    pub iteration: usize,
    pub pass: usize,
    /// Direction trained on real plus synthetic data and scored on dev.
    pub direction: Direction,
    /// Direction that produced the synthetic source side.
    pub backtranslation_direction: Direction,
    pub dev_bleu: f64,
    pub dev_chrf: f64,
    pub parallel_count: usize,
    pub synthetic_count: usize,
    pub mono_drawn: usize,
    #[serde(skip)]
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticBatch {
    pub iteration: usize,
    pub pass: usize,
    pub direction: Direction,
    pub records: Vec<ParallelRecord>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BtRun {
    pub reports: Vec<IterationReport>,
    pub synthetic: Vec<SyntheticBatch>,
    pub converged: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum BtError {
    #[error("no real parallel records")]
    EmptyParallel,
    #[error("no dev records")]
    EmptyDev,
    #[error("monolingual pool for `{0}` is empty")]
    EmptyMonoPool(Lang),
    #[error("back-translation needs a ccp/bn language pair, got {0}")]
    UnsupportedDirection(Direction),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("record `{id}` is synthetic but assigned to {split}")]
    SplitContamination { id: String, split: Split },
    #[error("translator failed in iteration {iteration}: {source}")]
    TranslatorFailure {
        iteration: usize,
        #[source]
        source: TranslatorError,
    },
    #[error("translator returned {got} outputs for {expected} inputs in iteration {iteration}")]
    BatchLength { iteration: usize, expected: usize, got: usize },
    #[error(transparent)]
    Metric(#[from] MetricError),
}

/// Real records followed by synthetic ones. Synthetic records may only be
/// training data.
pub fn mix_synthetic(real: &[ParallelRecord], synthetic: &[ParallelRecord]) -> Result<Vec<ParallelRecord>, BtError> {
    for r in synthetic {
        if matches!(r.split, Split::Dev | Split::Test) {
            return Err(BtError::SplitContamination {
                id: r.id.clone(),
                split: r.split,
            });
        }
    }
    let mut out = Vec::with_capacity(real.len() + synthetic.len());
    out.extend_from_slice(real);
    out.extend_from_slice(synthetic);
    Ok(out)
}

/// `min(ratio · parallel, pool, cap)`.
pub fn mono_draw_count(parallel: usize, ratio: usize, pool: usize, cap: Option<usize>) -> usize {
    let wanted = parallel.saturating_mul(ratio).min(pool);
    cap.map_or(wanted, |c| wanted.min(c))
}

fn pairs_for(records: &[ParallelRecord], direction: Direction) -> Vec<(String, String)> {
    records
        .iter()
        .filter_map(|r| Some((r.text(direction.src)?.to_string(), r.text(direction.tgt)?.to_string())))
        .collect()
}

fn pass_seed(seed: u64, pass: usize) -> u64 {
    seed ^ (pass as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn synthetic_record(id: String, direction: Direction, src_text: String, tgt_text: &str) -> ParallelRecord {
    let (ccp, bn) = if direction.src == Lang::Ccp {
        (src_text, tgt_text.to_string())
    } else {
        (tgt_text.to_string(), src_text)
    };
    ParallelRecord {
        id,
        ccp,
        bn,
        en: None,
        source: Source::Synthetic,
        split: Split::Train,
        synthetic: true,
    }
}

fn validate(parallel: &[ParallelRecord], dev: &[ParallelRecord], cfg: &BtConfig) -> Result<Direction, BtError> {
    let forward = Direction::new(cfg.src_lang, cfg.tgt_lang);
    let langs = [cfg.src_lang, cfg.tgt_lang];
    if cfg.src_lang == cfg.tgt_lang || !langs.contains(&Lang::Ccp) || !langs.contains(&Lang::Bn) {
        return Err(BtError::UnsupportedDirection(forward));
    }
    if cfg.ratio == 0 {
        return Err(BtError::Config("ratio must be at least 1".into()));
    }
    if cfg.max_iterations == 0 {
        return Err(BtError::Config("max_iterations must be at least 1".into()));
    }
    if cfg.convergence_epsilon.is_nan() {
        return Err(BtError::Config("convergence_epsilon must be a number".into()));
    }
    if parallel.is_empty() {
        return Err(BtError::EmptyParallel);
    }
    if dev.is_empty() {
        return Err(BtError::EmptyDev);
    }
    for lang in langs {
        if cfg.mono_pools.get(&lang).is_none_or(Vec::is_empty) {
            return Err(BtError::EmptyMonoPool(lang));
        }
    }
    if let Some(r) = dev.iter().find(|r| r.synthetic) {
        return Err(BtError::SplitContamination {
            id: r.id.clone(),
            split: Split::Dev,
        });
    }
    if let Some(r) = parallel.iter().find(|r| r.synthetic) {
        return Err(BtError::Config(format!(
            "real parallel data contains synthetic record `{}`",
            r.id
        )));
    }
    Ok(forward)
}

pub fn run_bt<T: Translator + ?Sized>(
    parallel: &[ParallelRecord],
    dev: &[ParallelRecord],
    translator: &mut T,
    cfg: &BtConfig,
) -> Result<BtRun, BtError> {
    let forward = validate(parallel, dev, cfg)?;
    let mut synthetic: BTreeMap<Direction, Vec<ParallelRecord>> = BTreeMap::new();
    let mut bleu_history: BTreeMap<Direction, Vec<f64>> = BTreeMap::new();
    let mut run = BtRun {
        reports: Vec::new(),
        synthetic: Vec::new(),
        converged: false,
    };

    for pass in 0..cfg.max_iterations * 2 {
        let started = Instant::now();
        let iteration = pass / 2 + 1;
        let fail = |source| BtError::TranslatorFailure { iteration, source };
        let eval = if pass % 2 == 0 { forward } else { forward.reversed() };
        let generator = eval.reversed();

        let generator_data = mix_synthetic(parallel, synthetic.get(&generator).map_or(&[], Vec::as_slice))?;
        translator
            .train(&pairs_for(&generator_data, generator), generator)
            .map_err(fail)?;

        let pool = &cfg.mono_pools[&eval.tgt];
        let n = mono_draw_count(parallel.len(), cfg.ratio, pool.len(), cfg.mono_cap);
        let mut rng = ChaCha8Rng::seed_from_u64(pass_seed(cfg.seed, pass));
        let mut picked = index::sample(&mut rng, pool.len(), n).into_vec();
        picked.sort_unstable();
        let drawn: Vec<&MonolingualRecord> = picked.iter().map(|&i| &pool[i]).collect();
        let inputs: Vec<String> = drawn.iter().map(|m| m.text.clone()).collect();
        let outputs = translator.translate(&inputs, generator).map_err(fail)?;
        if outputs.len() != inputs.len() {
            return Err(BtError::BatchLength {
                iteration,
                expected: inputs.len(),
                got: outputs.len(),
            });
        }
        let records: Vec<ParallelRecord> = drawn
            .iter()
            .zip(outputs)
            .filter(|(m, out)| !out.trim().is_empty() && !m.text.trim().is_empty())
            .map(|(m, out)| synthetic_record(format!("bt{pass}-{}", m.id), eval, out, &m.text))
            .collect();

        let training = mix_synthetic(parallel, &records)?;
        translator.train(&pairs_for(&training, eval), eval).map_err(fail)?;

        let dev_pairs = pairs_for(dev, eval);
        let (dev_src, dev_ref): (Vec<String>, Vec<String>) = dev_pairs.into_iter().unzip();
        let hyps = translator.translate(&dev_src, eval).map_err(fail)?;
        if hyps.len() != dev_src.len() {
            return Err(BtError::BatchLength {
                iteration,
                expected: dev_src.len(),
                got: hyps.len(),
            });
        }
        let dev_bleu = bleu(&hyps, &dev_ref, &cfg.bleu)?.score;
        let dev_chrf = chrf(&hyps, &dev_ref, &cfg.chrf)?.score;

        run.reports.push(IterationReport {
            iteration,
            pass,
            direction: eval,
            backtranslation_direction: generator,
            dev_bleu,
            dev_chrf,
            parallel_count: parallel.len(),
            synthetic_count: records.len(),
            mono_drawn: n,
            elapsed: started.elapsed(),
        });
        run.synthetic.push(SyntheticBatch {
            iteration,
            pass,
            direction: eval,
            records: records.clone(),
        });
        synthetic.insert(eval, records);
        bleu_history.entry(eval).or_default().push(dev_bleu);

        if pass % 2 == 1 && iteration >= 2 {
            let stalled = bleu_history.values().all(|scores| {
                let [.., prev, last] = scores[..] else { return false };
                last - prev < cfg.convergence_epsilon
            });
            if stalled {
                run.converged = true;
                break;
            }
        }
    }
    Ok(run)
}

/// Reports as JSON lines. `elapsed` is left out so equal runs give equal bytes.
pub fn reports_to_jsonl(reports: &[IterationReport]) -> String {
    let mut out = String::new();
    for r in reports {
        out.push_str(&serde_json::to_string(r).expect("report serializes"));
        out.push('\n');
    }
    out
}
