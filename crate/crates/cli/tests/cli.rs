use std::io::Write;
use std::path::Path;
use std::process::{Command, Stdio};

use ccpmt::corpus::{read_parallel, ParallelRecord, Source, Split, TrainingExample};
use ccpmt::textproc::{normalize, segment, NormalizerConfig, SegmenterConfig};
use ccpmt::translit::{bn_to_ccp, ccp_to_bn, MappingTable, TransliterationMode};

struct Output {
    code: i32,
    stdout: String,
    stderr: String,
}

fn ccpmt(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_ccpmt"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    Output {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn record(id: &str, ccp: &str, bn: &str, en: Option<&str>) -> ParallelRecord {
    ParallelRecord {
        id: id.into(),
        ccp: ccp.into(),
        bn: bn.into(),
        en: en.map(String::from),
        source: Source::LocalExpert,
        split: Split::Unassigned,
        synthetic: false,
    }
}

fn write_jsonl<T: serde::Serialize>(path: &Path, records: &[T]) {
    let mut buf = Vec::new();
    ccpmt::corpus::write_jsonl(&mut buf, records).unwrap();
    std::fs::write(path, buf).unwrap();
}

#[test]
fn exit_codes() {
    assert_eq!(ccpmt(&["--help"], "").code, 0);
    assert_eq!(ccpmt(&["frobnicate"], "").code, 1);
    assert_eq!(ccpmt(&["translit"], "").code, 1);

    let dir = tempfile::tempdir().unwrap();
    let hyp = dir.path().join("hyp");
    let reference = dir.path().join("ref");
    std::fs::write(&hyp, "a b\nc d\n").unwrap();
    std::fs::write(&reference, "a b\n").unwrap();
    let out = ccpmt(
        &["score", "--metric", "bleu", "--hyp", path(&hyp), "--ref", path(&reference)],
        "",
    );
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains('2') && out.stderr.contains('1'), "{}", out.stderr);

    let missing = ccpmt(&["corpus", "stats", "--in", path(&dir.path().join("absent.jsonl"))], "");
    assert_eq!(missing.code, 2);
}

#[test]
fn score_reports() {
    let dir = tempfile::tempdir().unwrap();
    let hyp = dir.path().join("hyp");
    std::fs::write(&hyp, "the cat sat\non the mat\n").unwrap();
    for metric in ["bleu", "chrf"] {
        let out = ccpmt(
            &[
                "score",
                "--metric",
                metric,
                "--hyp",
                path(&hyp),
                "--ref",
                path(&hyp),
                "--json",
            ],
            "",
        );
        assert_eq!(out.code, 0, "{}", out.stderr);
        let report: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
        assert_eq!(report["score"], 100.0);
    }
}

#[test]
fn text_pipeline_matches_library() {
    let input = "  আমি  ভাত খাই। তুমি কী খাও?\u{200B}\nকাকা.  মামা!\n";
    let norm = ccpmt(&["normalize"], input);
    assert_eq!(norm.code, 0);
    let seg = ccpmt(&["segment", "--extra-danda"], &norm.stdout);
    assert_eq!(seg.code, 0);
    let ccp = ccpmt(&["translit", "--dir", "bn2ccp"], &seg.stdout);
    assert_eq!(ccp.code, 0);

    let table = MappingTable::builtin();
    let mode = TransliterationMode::default();
    let mut expected = String::new();
    for line in input.lines() {
        let n = normalize(line, &NormalizerConfig::default());
        for s in segment(&n, &SegmenterConfig::with_dandas()) {
            expected.push_str(&bn_to_ccp(&s, table, mode).unwrap());
            expected.push('\n');
        }
    }
    assert_eq!(ccp.stdout, expected);

    let back = ccpmt(&["translit", "--dir", "ccp2bn"], &ccp.stdout);
    let want: String = ccp
        .stdout
        .lines()
        .map(|l| ccp_to_bn(l, table, mode).unwrap() + "\n")
        .collect();
    assert_eq!(back.stdout, want);
}

#[test]
fn strict_translit_fails_on_stacked_signs() {
    let out = ccpmt(
        &["translit", "--dir", "ccp2bn", "--strict-nctb"],
        "\u{11107}\u{11128}\u{11101}\n",
    );
    assert_eq!(out.code, 2, "{}", out.stderr);
    let out = ccpmt(&["translit", "--dir", "ccp2bn", "--on-unmapped", "error"], "\u{11143}\n");
    assert_eq!(out.code, 2);
}

#[test]
fn fontconv_lists_fonts() {
    let out = ccpmt(&["fontconv", "--list"], "");
    assert_eq!(out.code, 0);
    assert_eq!(out.stdout.lines().count(), 7);
    assert_eq!(ccpmt(&["fontconv", "--font", "NoSuchFont"], "x\n").code, 2);
}

#[test]
fn spm_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus.txt");
    let text = "আমি ভাত খাই\nতুমি ভাত খাও\nআমি বই পড়ি\nআমরা ভাত খাই\n";
    std::fs::write(&corpus, text).unwrap();
    let vocab = dir.path().join("vocab.txt");
    let out = ccpmt(
        &["spm", "train", "--size", "80", "--in", path(&corpus), "--out", path(&vocab)],
        "",
    );
    assert_eq!(out.code, 0, "{}", out.stderr);

    let enc = ccpmt(&["spm", "encode", "--vocab", path(&vocab)], text);
    assert_eq!(enc.code, 0);
    assert_eq!(enc.stdout.lines().count(), 4);
    assert!(enc.stdout.lines().all(|l| l.starts_with("2 ") && l.ends_with(" 3")));
    let dec = ccpmt(&["spm", "decode", "--vocab", path(&vocab)], &enc.stdout);
    assert_eq!(dec.stdout, text);

    let prefixed = ccpmt(
        &["spm", "encode", "--vocab", path(&vocab), "--prefix", "bn", "--max-len", "4"],
        "আমি ভাত খাই\n",
    );
    let ids: Vec<&str> = prefixed.stdout.split_whitespace().collect();
    assert_eq!(ids.len(), 4);
    assert_eq!(ids[0], "5");
    assert_eq!(
        ccpmt(
            &["spm", "train", "--size", "3", "--in", path(&corpus), "--out", path(&vocab)],
            ""
        )
        .code,
        2
    );
}

#[test]
fn corpus_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.jsonl");
    let records: Vec<ParallelRecord> = (0..10)
        .map(|i| {
            record(
                &format!("r{i}"),
                &format!("c{}", i % 8),
                &format!("b{}", i % 8),
                (i < 3).then_some("e"),
            )
        })
        .collect();
    write_jsonl(&input, &records);

    let ingested = ccpmt(&["corpus", "ingest", "--in", path(&input)], "");
    assert_eq!(ingested.code, 0, "{}", ingested.stderr);
    assert_eq!(read_parallel(ingested.stdout.as_bytes()).unwrap(), records);

    let deduped = ccpmt(&["--quiet", "corpus", "dedupe", "--in", path(&input)], "");
    assert_eq!(read_parallel(deduped.stdout.as_bytes()).unwrap().len(), 8);
    assert!(deduped.stderr.is_empty());

    let split = ccpmt(
        &[
            "--seed",
            "3",
            "corpus",
            "split",
            "--in",
            path(&input),
            "--train",
            "6",
            "--dev",
            "3",
        ],
        "",
    );
    let out = read_parallel(split.stdout.as_bytes()).unwrap();
    assert_eq!(out.iter().filter(|r| r.split == Split::Train).count(), 6);
    assert_eq!(out.iter().filter(|r| r.split == Split::Dev).count(), 3);
    let again = ccpmt(
        &[
            "--seed",
            "3",
            "corpus",
            "split",
            "--in",
            path(&input),
            "--train",
            "6",
            "--dev",
            "3",
        ],
        "",
    );
    assert_eq!(split.stdout, again.stdout);
    assert_eq!(
        ccpmt(&["corpus", "split", "--in", path(&input), "--train", "9", "--dev", "3"], "").code,
        2
    );

    let multi = ccpmt(
        &[
            "corpus",
            "multi",
            "--in",
            path(&input),
            "--dirs",
            "ccp2bn,en2ccp",
            "--balance",
        ],
        "",
    );
    let examples: Vec<TrainingExample> = multi.stdout.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(examples.len(), 20);
    assert!(examples.iter().all(|e| e.src.starts_with("<2")));

    let stats = ccpmt(&["corpus", "stats", "--in", path(&input)], "");
    let stats: serde_json::Value = serde_json::from_str(&stats.stdout).unwrap();
    assert!(stats.is_object());
}

#[test]
fn train_translate_and_bt() {
    let dir = tempfile::tempdir().unwrap();
    let pairs = [("𑄇𑄉 𑄌𑄎", "কগ চজ"), ("𑄇𑄉 𑄑𑄓", "কগ টড"), ("𑄌𑄎 𑄑𑄓", "চজ টড"), ("𑄑𑄓", "টড")];
    let records: Vec<ParallelRecord> = pairs
        .iter()
        .enumerate()
        .map(|(i, (c, b))| record(&format!("p{i}"), c, b, None))
        .collect();
    let parallel = dir.path().join("parallel.jsonl");
    write_jsonl(&parallel, &records);
    let model = dir.path().join("model");

    let out = ccpmt(
        &[
            "train",
            "--dir",
            "ccp2bn",
            "--parallel",
            path(&parallel),
            "--model",
            path(&model),
            "--iters",
            "5",
        ],
        "",
    );
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert!(out.stderr.contains("iteration 5"));
    let out = ccpmt(&["translate", "--dir", "ccp2bn", "--model", path(&model)], "𑄇𑄉 𑄑𑄓\n𑄌𑄎 𑄥\n");
    assert_eq!(out.code, 0, "{}", out.stderr);
    let lines: Vec<&str> = out.stdout.lines().collect();
    assert_eq!(lines[0], "কগ টড");
    assert!(lines[1].ends_with(" 𑄥"), "unknown words are copied: {}", lines[1]);
    assert_eq!(
        ccpmt(&["translate", "--dir", "bn2ccp", "--model", path(&model)], "কগ\n").code,
        2
    );

    let mono = dir.path().join("mono.jsonl");
    let lines: Vec<String> = ["𑄇𑄉 𑄌𑄎", "𑄑𑄓 𑄇𑄉", "𑄌𑄎"]
        .iter()
        .map(|t| ("ccp", *t))
        .chain(["কগ টড", "চজ"].iter().map(|t| ("bn", *t)))
        .enumerate()
        .map(|(i, (lang, text))| {
            serde_json::json!({"id": format!("m{i}"), "lang": lang, "text": text, "source": "t"}).to_string()
        })
        .collect();
    std::fs::write(&mono, lines.join("\n") + "\n").unwrap();
    let out_dir = dir.path().join("bt");
    let args = [
        "bt",
        "run",
        "--parallel",
        path(&parallel),
        "--dev",
        path(&parallel),
        "--mono-ccp",
        path(&mono),
        "--mono-bn",
        path(&mono),
        "--max-iters",
        "2",
        "--epsilon",
        "-1000",
        "--em-iters",
        "3",
        "--out-dir",
        path(&out_dir),
    ];
    let out = ccpmt(&args, "");
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert_eq!(out.stdout.lines().count(), 4);
    assert_eq!(std::fs::read_to_string(out_dir.join("report.jsonl")).unwrap(), out.stdout);
    for name in [
        "synthetic-iter1-ccp2bn.jsonl",
        "synthetic-iter1-bn2ccp.jsonl",
        "synthetic-iter2-ccp2bn.jsonl",
        "synthetic-iter2-bn2ccp.jsonl",
    ] {
        let text = std::fs::read_to_string(out_dir.join(name)).unwrap();
        let synthetic = read_parallel(text.as_bytes()).unwrap();
        assert!(!synthetic.is_empty() && synthetic.iter().all(|r| r.synthetic), "{name}");
    }
    let repeat = ccpmt(&args, "");
    assert_eq!(repeat.stdout, out.stdout);
}
