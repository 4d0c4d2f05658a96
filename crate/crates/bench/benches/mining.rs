use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use paramine_bench::{ckb_headline, corpus, kmr_headline};
use paramine_core::{headline_similarity, mine, split, transliterate, Language, MinerConfig};

fn similarity(c: &mut Criterion) {
    let a = ckb_headline(3);
    let b = kmr_headline(3);
    c.bench_function("headline_similarity/cross_script", |bench| {
        bench.iter(|| headline_similarity(black_box(&a), black_box(&b)))
    });
    let latin = transliterate(&a);
    c.bench_function("headline_similarity/same_script", |bench| {
        bench.iter(|| headline_similarity(black_box(&latin), black_box(&b)))
    });
}

fn translit(c: &mut Criterion) {
    let text: String = (0..50).map(ckb_headline).collect::<Vec<_>>().join(". ");
    let mut group = c.benchmark_group("transliterate");
    group.throughput(Throughput::Bytes(text.len() as u64));
    group.bench_function("paragraph", |bench| bench.iter(|| transliterate(black_box(&text))));
    group.finish();
}

fn mining(c: &mut Criterion) {
    let mut group = c.benchmark_group("mine");
    group.sample_size(10);
    for n in [100, 400] {
        let a = corpus(Language::Ckb, n);
        let b = corpus(Language::Kmr, n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |bench, _| {
            bench.iter(|| mine(&a, &b, MinerConfig::default()).unwrap())
        });
    }
    group.finish();
}

fn splitting(c: &mut Criterion) {
    c.bench_function("split/12327", |bench| bench.iter(|| split(black_box(12_327), 0.9, 42).unwrap()));
}

criterion_group!(benches, similarity, translit, mining, splitting);
criterion_main!(benches);
