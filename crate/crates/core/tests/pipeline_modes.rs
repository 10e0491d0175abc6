mod support;

use std::fs;
use std::path::{Path, PathBuf};

use proptest::prelude::*;

use crawlsieve::dedup::LineDedupMode;
use crawlsieve::pipeline::{run, DedupMode, InputFormat, PipelineConfig, RunOutput, StageToggles, TokenCounterConfig};
use crawlsieve::record_io::{RawRecord, WarcWriter};
use crawlsieve::Document;

const LONG_A: &str =
    "The harbour town wakes early and the fishing boats leave before the sun comes up over the grey water.";
const LONG_B: &str =
    "Inland the orchards stretch for miles and every autumn the pickers arrive with ladders and wooden crates.";

fn jsonl(dir: &Path, docs: &[(&str, &str, &str, &str)]) -> PathBuf {
    let p = dir.join("docs.jsonl");
    let body: String = docs
        .iter()
        .map(|(id, dump, url, text)| {
            let d = Document {
                id: id.to_string(),
                dump: dump.to_string(),
                url: url.to_string(),
                text: text.to_string(),
                ..Default::default()
            };
            serde_json::to_string(&d).unwrap() + "\n"
        })
        .collect();
    fs::write(&p, body).unwrap();
    p
}

fn only(stages: StageToggles, input: PathBuf) -> PipelineConfig {
    PipelineConfig { inputs: vec![input], format: InputFormat::Jsonl, stages, ..Default::default() }
}

fn kept(out: &RunOutput) -> Vec<String> {
    let mut v: Vec<String> = out.shards.iter().flatten().map(|r| r.id.clone()).collect();
    v.sort();
    v
}

#[test]
fn score_gate_keeps_rounded_threes() {
    let dir = tempfile::tempdir().unwrap();
    let input = jsonl(
        dir.path(),
        &[("a", "", "", LONG_A), ("b", "", "", LONG_A), ("c", "", "", LONG_B), ("d", "", "", LONG_B)],
    );
    let scores = dir.path().join("edu.tsv");
    fs::write(&scores, "a\t3\nb\t2.5\nc\t2.4\n").unwrap();
    let mut cfg = only(StageToggles { score_gate: true, ..StageToggles::none() }, input);
    cfg.edu_scores = Some(scores);
    let out = run(&cfg).unwrap();
    assert_eq!(kept(&out), ["a", "b"]);
    let gate = out.manifest.stage("score_gate").unwrap();
    assert_eq!(gate.drops_by_rule["edu_score"], 1);
    assert_eq!(gate.drops_by_rule["unscored"], 1);
}

#[test]
fn bpe_counter_sets_token_counts() {
    let dir = tempfile::tempdir().unwrap();
    let input = jsonl(dir.path(), &[("a", "", "", "the the cat")]);
    let merges = dir.path().join("merges.txt");
    fs::write(&merges, "#version: 0.2\nt h\nth e\n").unwrap();
    let mut cfg = only(StageToggles::none(), input);
    cfg.token_counter = TokenCounterConfig::Bpe { merges };
    let out = run(&cfg).unwrap();
    // "the" merges to one symbol; "cat" stays three.
    assert_eq!(out.shards[0][0].token_count, 5);
    assert_eq!(out.manifest.token_counter, "bpe");
    out.manifest.check_conservation().unwrap();
}

#[test]
fn wet_input_takes_dump_from_warcinfo() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("segment.warc.wet.gz");
    let mut w = WarcWriter::new(Vec::new(), true);
    let info = RawRecord::new(
        "warcinfo",
        "<urn:info>",
        "2023-12-01T00:00:00Z",
        None,
        vec![],
        b"isPartOf: CC-MAIN-2023-50\r\n".to_vec(),
    );
    w.write_record(&info).unwrap();
    for (i, text) in [LONG_A, LONG_B].iter().enumerate() {
        let uri = format!("https://example.org/{i}");
        let rec = RawRecord::new(
            "conversion",
            &support::record_id(i),
            "2023-12-02T00:00:00Z",
            Some(&uri),
            vec![],
            text.as_bytes().to_vec(),
        );
        w.write_record(&rec).unwrap();
    }
    fs::write(&path, w.into_inner()).unwrap();
    let mut cfg = only(StageToggles { extract: true, ..StageToggles::none() }, path);
    cfg.format = InputFormat::Wet;
    let out = run(&cfg).unwrap();
    let rows: Vec<_> = out.shards.iter().flatten().collect();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.dump == "CC-MAIN-2023-50"));
    assert_eq!(rows[0].text, LONG_A);
    assert_eq!(rows[0].url, "https://example.org/0");
}

#[test]
fn global_iterative_prefers_the_newest_dump() {
    let dir = tempfile::tempdir().unwrap();
    let input = jsonl(
        dir.path(),
        &[
            ("a", "CC-MAIN-2024-10", "", LONG_A),
            ("b", "CC-MAIN-2024-18", "", LONG_A),
            ("c", "CC-MAIN-2024-10", "", LONG_B),
        ],
    );
    let mut cfg = only(StageToggles { dedup: true, ..StageToggles::none() }, input);
    assert_eq!(kept(&run(&cfg).unwrap()), ["a", "b", "c"]);
    cfg.dedup_mode = DedupMode::GlobalIterative;
    let out = run(&cfg).unwrap();
    assert_eq!(kept(&out), ["b", "c"]);
    assert_eq!(out.manifest.dedup.removed, 1);
    assert_eq!(out.manifest.stage("dedup").unwrap().drops_by_rule["minhash_duplicate"], 1);
}

#[test]
fn url_mode_keeps_one_per_url() {
    let dir = tempfile::tempdir().unwrap();
    let input = jsonl(
        dir.path(),
        &[
            ("a", "", "https://Example.com/x", LONG_A),
            ("b", "", "https://example.com/x", LONG_B),
            ("c", "", "", LONG_B),
        ],
    );
    let mut cfg = only(StageToggles { dedup: true, ..StageToggles::none() }, input);
    cfg.dedup_mode = DedupMode::Url;
    let out = run(&cfg).unwrap();
    let ids = kept(&out);
    assert_eq!(ids.len(), 2);
    assert!(ids.contains(&"c".to_string()));
    assert_eq!(out.manifest.dedup.missing_url, 1);
    assert_eq!(out.manifest.stage("dedup").unwrap().drops_by_rule["url_duplicate"], 1);
}

#[test]
fn line_mode_removes_repeated_lines_once() {
    let dir = tempfile::tempdir().unwrap();
    let shared = "Subscribe to our newsletter for weekly updates";
    let a = format!("{LONG_A}\n{shared}");
    let b = format!("{LONG_B}\n{shared}");
    let input = jsonl(dir.path(), &[("a", "", "", &a), ("b", "", "", &b)]);
    let mut cfg = only(StageToggles { dedup: true, ..StageToggles::none() }, input);
    cfg.dedup_mode = DedupMode::Line(LineDedupMode::Plain);
    let out = run(&cfg).unwrap();
    let rows: Vec<_> = out.shards.iter().flatten().collect();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows.iter().filter(|r| r.text.contains(shared)).count(), 1);
    assert_eq!(out.manifest.dedup.lines_removed, 1);
    out.manifest.check_conservation().unwrap();
}

#[test]
fn enabling_a_filter_never_keeps_more() {
    let dir = tempfile::tempdir().unwrap();
    let crawl = support::fixture_crawl(dir.path());
    const FILTERS: [&str; 7] =
        ["url", "language", "gopher_quality", "gopher_repetition", "dedup", "c4", "fineweb_custom"];
    let toggles = |mask: u32| {
        let on = |i: usize| mask & (1 << i) != 0;
        StageToggles {
            extract: true,
            url_filter: on(0),
            language: on(1),
            gopher_quality: on(2),
            gopher_repetition: on(3),
            dedup: on(4),
            c4: on(5),
            fineweb_custom: on(6),
            ..StageToggles::none()
        }
    };
    let counts: Vec<usize> = (0..1u32 << FILTERS.len())
        .map(|mask| {
            let mut cfg = crawl.config();
            cfg.stages = toggles(mask);
            run(&cfg).unwrap().shards.iter().map(Vec::len).sum()
        })
        .collect();
    for mask in 0..counts.len() {
        for (bit, name) in FILTERS.iter().enumerate() {
            let more = mask | (1 << bit);
            assert!(counts[more] <= counts[mask], "adding {name} to {mask:#09b}: {} -> {}", counts[mask], counts[more]);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn shard_count_does_not_change_output(n in 1usize..40, shards in 2usize..24, seed in any::<u64>()) {
        let dir = tempfile::tempdir().unwrap();
        let mut r = support::rng(seed);
        let texts: Vec<String> = (0..n).map(|_| support::prose_lines(&mut r, support::Lang::En, 3).join("\n")).collect();
        let ids: Vec<String> = (0..n).map(support::record_id).collect();
        let docs: Vec<(&str, &str, &str, &str)> =
            ids.iter().zip(&texts).map(|(id, t)| (id.as_str(), "CC-MAIN-2024-10", "", t.as_str())).collect();
        let input = jsonl(dir.path(), &docs);
        let mut cfg = only(StageToggles { dedup: true, pii: true, ..StageToggles::none() }, input);
        let one = run(&cfg).unwrap();
        cfg.shard_count = shards;
        let many = run(&cfg).unwrap();
        prop_assert_eq!(many.shards.len(), shards);
        let flat = |o: &RunOutput| {
            let mut v: Vec<_> = o.shards.iter().flatten().cloned().collect();
            v.sort_by(|a, b| a.id.cmp(&b.id));
            v
        };
        prop_assert_eq!(flat(&one), flat(&many));
    }
}
