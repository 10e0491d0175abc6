mod support;

use std::collections::BTreeMap;

use crawlsieve::pipeline::{run, run_with, StageToggles, STAGE_ORDER};
use crawlsieve::Exec;
use support::{fixture_crawl, Fate};

fn toggles(enabled: &[&str]) -> StageToggles {
    let mut t = StageToggles::none();
    for name in enabled {
        match *name {
            "url" => t.url_filter = true,
            "extract" => t.extract = true,
            "language" => t.language = true,
            "gopher_quality" => t.gopher_quality = true,
            "gopher_repetition" => t.gopher_repetition = true,
            "dedup" => t.dedup = true,
            "c4" => t.c4 = true,
            "fineweb_custom" => t.fineweb_custom = true,
            "pii" => t.pii = true,
            _ => {}
        }
    }
    t
}

/// Enables stages one at a time in pipeline order (extraction always on, since
/// the later stages read text) and checks the survivors after each addition.
#[test]
fn kept_set_matches_labels_after_each_stage() {
    let dir = tempfile::tempdir().unwrap();
    let fx = fixture_crawl(dir.path());
    let mut enabled = vec!["extract"];
    let mut prev = usize::MAX;
    for name in STAGE_ORDER.iter().filter(|s| !matches!(**s, "extract" | "score_gate" | "output")) {
        enabled.push(name);
        let mut cfg = fx.config();
        cfg.stages = toggles(&enabled);
        let out = run(&cfg).unwrap();
        let mut kept: Vec<String> = out.shards.concat().into_iter().map(|r| r.id).collect();
        kept.sort();
        assert_eq!(kept, fx.expected_kept(&enabled), "after enabling {name}");
        assert!(kept.len() <= prev, "enabling {name} grew the output");
        prev = kept.len();
        out.manifest.check_conservation().unwrap();
    }
}

#[test]
fn drop_counts_by_rule() {
    let dir = tempfile::tempdir().unwrap();
    let fx = fixture_crawl(dir.path());
    let out = run(&fx.config()).unwrap();
    let mut expected: BTreeMap<(&str, &str), u64> = BTreeMap::new();
    for (_, _, f) in &fx.docs {
        if let Fate::Dropped { stage, rule } = f {
            *expected.entry((stage, rule)).or_default() += 1;
        }
    }
    let mut got: BTreeMap<(&str, &str), u64> = BTreeMap::new();
    for s in &out.manifest.stages {
        for (rule, n) in &s.drops_by_rule {
            got.insert((s.stage.as_str(), rule.as_str()), *n);
        }
    }
    assert_eq!(got, expected);
    assert_eq!(out.manifest.records_read, 100);
    assert_eq!(out.manifest.output.records, 45);
    assert_eq!(out.manifest.scrub.emails_replaced, 5);
    assert_eq!(out.manifest.scrub.ips_replaced, 5);
    assert_eq!(out.manifest.dedup.removed, 10);
}

#[test]
fn output_rows_are_well_formed() {
    let dir = tempfile::tempdir().unwrap();
    let fx = fixture_crawl(dir.path());
    let out = run_with(&fx.config(), Exec::Sequential).unwrap();
    for r in out.shards.concat() {
        assert!(r.token_count >= 1);
        assert!((0.0..=1.0).contains(&r.language_score) && r.language_score >= 0.65);
        assert_eq!(r.language, "en");
        assert!(r.dump.starts_with("CC-MAIN-2024-"));
        assert!(r.url.starts_with("https://site"));
        assert!(!r.text.contains("<") && !r.text.contains("Home | About"), "{}", r.text);
        assert!(!r.text.contains("newsroom-example.org"));
    }
}
