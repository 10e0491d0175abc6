//! Sequential vs parallel execution of the two hot loops: MinHash band keys
//! and per-document metrics. Without the `parallel` feature both arms run
//! sequentially.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crawlsieve::dedup::{DedupInput, DedupParams, Deduper};
use crawlsieve::filters::compute_metrics;
use crawlsieve::Exec;

fn corpus(n: usize) -> Vec<String> {
    let mut r = ChaCha8Rng::seed_from_u64(1);
    // Letters only; the shingle tokenizer ignores digits.
    let vocab: Vec<String> = (0..2_000u32)
        .map(|i| (0..3).map(|k| char::from(b'a' + (i / 26u32.pow(k) % 26) as u8)).collect::<String>() + "en")
        .collect();
    (0..n)
        .map(|_| {
            (0..r.gen_range(5..40))
                .map(|_| {
                    let line: Vec<&str> =
                        (0..r.gen_range(4..16)).map(|_| vocab.choose(&mut r).unwrap().as_str()).collect();
                    line.join(" ") + "."
                })
                .collect::<Vec<_>>()
                .join("\n")
        })
        .collect()
}

fn bench(c: &mut Criterion) {
    let docs = corpus(2_000);
    let bytes: usize = docs.iter().map(String::len).sum();
    let ids: Vec<String> = (0..docs.len()).map(|i| format!("doc-{i}")).collect();
    let inputs: Vec<DedupInput> = ids.iter().zip(&docs).map(|(id, text)| DedupInput { id, dump: "D", text }).collect();

    let mut g = c.benchmark_group("band_keys");
    g.throughput(Throughput::Bytes(bytes as u64));
    g.sample_size(10);
    for exec in [Exec::Sequential, Exec::Parallel] {
        let d = Deduper::new(DedupParams::default(), exec).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &inputs, |b, inputs| {
            b.iter(|| d.band_keys(inputs))
        });
    }
    g.finish();

    let mut g = c.benchmark_group("metrics");
    g.throughput(Throughput::Bytes(bytes as u64));
    g.sample_size(10);
    for exec in [Exec::Sequential, Exec::Parallel] {
        g.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &docs, |b, docs| {
            b.iter(|| exec.map(docs, |t| compute_metrics(t)))
        });
    }
    g.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
