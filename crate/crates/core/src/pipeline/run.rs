use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use xxhash_rust::xxh3::xxh3_64;

use super::config::{DedupMode, PipelineConfig};
use super::input::{load, Item};
use super::manifest::{DedupStats, OutputStats, RunManifest, StageStats, STAGE_ORDER};
use super::stages::{Ctx, Event, StageId, AFTER_DEDUP, BEFORE_DEDUP};
use super::PipelineError;
use crate::dedup::{line_dedup, url_dedup, DedupInput, Deduper};
use crate::document::OutputRecord;
use crate::exec::Exec;
use crate::pii::ScrubReport;

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub shards: Vec<Vec<OutputRecord>>,
    pub manifest: RunManifest,
}

impl RunOutput {
    /// Shard contents as written: one JSON object per line.
    pub fn shard_jsonl(&self, i: usize) -> String {
        self.shards[i].iter().map(|r| r.to_json_line() + "\n").collect()
    }
}

pub fn shard_of(id: &str, shard_count: usize) -> usize {
    (xxh3_64(id.as_bytes()) % shard_count as u64) as usize
}

pub fn run(cfg: &PipelineConfig) -> Result<RunOutput, PipelineError> {
    run_with(cfg, Exec::default())
}

struct Accounts {
    stages: Vec<StageStats>,
}

impl Accounts {
    fn new(ctx: &Ctx) -> Self {
        let ids = [
            StageId::Url,
            StageId::Extract,
            StageId::Language,
            StageId::GopherQuality,
            StageId::GopherRepetition,
            StageId::Dedup,
            StageId::C4,
            StageId::FinewebCustom,
            StageId::Pii,
            StageId::ScoreGate,
            StageId::Output,
        ];
        Accounts { stages: ids.iter().map(|&s| StageStats::new(STAGE_ORDER[s as usize], ctx.enabled(s))).collect() }
    }

    fn add(&mut self, events: &[Event]) {
        for e in events {
            self.stages[e.stage as usize].record(e.tokens_in, e.dropped.as_deref(), e.tokens_out);
        }
    }
}

fn map_phase(ctx: &Ctx, items: Vec<Item>, stages: &[StageId], exec: Exec, acc: &mut Accounts) -> Vec<Item> {
    let results = exec.map_owned(items, |it| ctx.run_map(it, stages));
    let mut out = Vec::with_capacity(results.len());
    for (item, events) in results {
        acc.add(&events);
        out.extend(item);
    }
    out
}

fn dedup_phase(
    ctx: &Ctx,
    mut items: Vec<Item>,
    exec: Exec,
    acc: &mut Accounts,
) -> Result<(Vec<Item>, DedupStats), PipelineError> {
    let cfg = ctx.cfg;
    items.sort_by(|a, b| (&a.doc.dump, &a.doc.id, a.seq).cmp(&(&b.doc.dump, &b.doc.id, b.seq)));
    let mut stats = DedupStats {
        mode: if cfg.stages.dedup {
            serde_json::to_value(cfg.dedup_mode)
                .map(|v| v.to_string().trim_matches('"').to_string())
                .unwrap_or_default()
        } else {
            "off".into()
        },
        ..Default::default()
    };
    let mut drop_rule = "";
    let mut keep = vec![true; items.len()];
    let mut new_text: Vec<Option<String>> = vec![None; items.len()];
    if cfg.stages.dedup {
        match cfg.dedup_mode {
            DedupMode::PerSnapshot | DedupMode::GlobalIterative => {
                drop_rule = "minhash_duplicate";
                let mut d = Deduper::new(cfg.dedup.clone(), exec)?;
                if let Some(dir) = &cfg.spill_dir {
                    d = d.with_spill_dir(dir);
                }
                let inputs: Vec<DedupInput> = items
                    .iter()
                    .map(|it| DedupInput { id: &it.doc.id, dump: &it.doc.dump, text: &it.doc.text })
                    .collect();
                if cfg.dedup_mode == DedupMode::PerSnapshot {
                    let o = d.dedup_per_snapshot(&inputs)?;
                    keep = o.keep;
                    stats.clusters = o.clusters as u64;
                    stats.removed = o.removed as u64;
                    stats.bypassed = o.bypassed as u64;
                } else {
                    // Newest dump first; dump names sort chronologically.
                    let mut groups: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
                    for (i, x) in inputs.iter().enumerate() {
                        groups.entry(x.dump).or_default().push(i);
                    }
                    let order: Vec<Vec<usize>> = groups.into_values().rev().collect();
                    let snaps: Vec<Vec<DedupInput>> =
                        order.iter().map(|g| g.iter().map(|&i| inputs[i]).collect()).collect();
                    for (g, o) in order.iter().zip(d.dedup_global_iterative(&snaps)?) {
                        for (&i, k) in g.iter().zip(o.keep) {
                            keep[i] = k;
                        }
                        stats.clusters += o.clusters as u64;
                        stats.removed += o.removed as u64;
                        stats.bypassed += o.bypassed as u64;
                    }
                }
            }
            DedupMode::Url => {
                drop_rule = "url_duplicate";
                let pairs: Vec<(&str, Option<&str>)> = items
                    .iter()
                    .map(|it| (it.doc.id.as_str(), Some(it.doc.url.as_str()).filter(|u| !u.is_empty())))
                    .collect();
                let o = url_dedup(&pairs, cfg.seed);
                stats.removed = o.keep.iter().filter(|k| !**k).count() as u64;
                stats.missing_url = o.missing_url as u64;
                keep = o.keep;
            }
            DedupMode::Line(mode) => {
                drop_rule = "line_duplicate";
                let pairs: Vec<(&str, &str)> =
                    items.iter().map(|it| (it.doc.id.as_str(), it.doc.text.as_str())).collect();
                let o = line_dedup(&pairs, mode, cfg.seed);
                stats.lines_removed = o.lines_removed as u64;
                for (i, t) in o.texts.into_iter().enumerate() {
                    match t {
                        None => keep[i] = false,
                        Some(t) => new_text[i] = Some(t),
                    }
                }
                stats.removed = keep.iter().filter(|k| !**k).count() as u64;
            }
        }
    }
    let mut out = Vec::with_capacity(items.len());
    let mut events = Vec::with_capacity(items.len());
    for ((mut it, k), t) in items.into_iter().zip(keep).zip(new_text) {
        let tokens_in = it.tokens;
        if !k {
            events.push(Event {
                stage: StageId::Dedup,
                tokens_in,
                dropped: Some(drop_rule.to_string()),
                tokens_out: tokens_in,
            });
            continue;
        }
        if let Some(t) = t {
            ctx.set_text(&mut it, t);
        }
        events.push(Event { stage: StageId::Dedup, tokens_in, dropped: None, tokens_out: it.tokens });
        out.push(it);
    }
    acc.add(&events);
    Ok((out, stats))
}

fn write_outputs(dir: &Path, out: &RunOutput) -> Result<(), PipelineError> {
    let err = |p: &Path, e| PipelineError::Output { path: p.display().to_string(), source: e };
    fs::create_dir_all(dir).map_err(|e| err(dir, e))?;
    for i in 0..out.shards.len() {
        let p = dir.join(format!("shard-{i:05}.jsonl"));
        let mut f = fs::File::create(&p).map_err(|e| err(&p, e))?;
        f.write_all(out.shard_jsonl(i).as_bytes()).map_err(|e| err(&p, e))?;
    }
    let p = dir.join("manifest.json");
    fs::write(&p, out.manifest.to_json()).map_err(|e| err(&p, e))
}

pub fn run_with(cfg: &PipelineConfig, exec: Exec) -> Result<RunOutput, PipelineError> {
    cfg.validate()?;
    let ctx = Ctx::load(cfg)?;
    let loaded = load(&cfg.inputs, cfg.format)?;
    let records_read = loaded.items.len() as u64;
    let mut acc = Accounts::new(&ctx);

    let items = exec.map_owned(loaded.items, |mut it| {
        it.tokens = ctx.tokens(&it.doc.text);
        it
    });
    let items = map_phase(&ctx, items, BEFORE_DEDUP, exec, &mut acc);
    let (items, dedup) = dedup_phase(&ctx, items, exec, &mut acc)?;
    let mut items = map_phase(&ctx, items, AFTER_DEDUP, exec, &mut acc);
    items.sort_by(|a, b| (&a.doc.dump, &a.doc.id, a.seq).cmp(&(&b.doc.dump, &b.doc.id, b.seq)));

    let mut scrub = ScrubReport::default();
    let mut shards: Vec<Vec<OutputRecord>> = vec![Vec::new(); cfg.shard_count];
    let mut tokens = 0;
    for it in &items {
        scrub += it.scrub;
        let n = it.doc.token_count.unwrap_or(it.tokens);
        tokens += n;
        shards[shard_of(&it.doc.id, cfg.shard_count)].push(OutputRecord::from_document(&it.doc, n));
    }

    let manifest = RunManifest {
        seed: cfg.seed,
        token_counter: ctx.counter.name().to_string(),
        records_read,
        record_errors: loaded.issues,
        stages: acc.stages,
        dedup,
        scrub,
        output: OutputStats { shards: cfg.shard_count as u64, records: items.len() as u64, tokens },
        config: serde_json::to_value(cfg).expect("config serializes"),
    };
    let out = RunOutput { shards, manifest };
    if let Some(dir) = &cfg.output_dir {
        write_outputs(dir, &out)?;
    }
    Ok(out)
}
