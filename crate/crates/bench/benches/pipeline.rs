use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use kcover_bench::{genome_kmers, read_kmers, sampled_kmers};
use kcover_core::{compress, CompressionJob, DeBruijnGraph, Mode};

fn bench_compress_scaling(c: &mut Criterion) {
    let mut group = c.benchmark_group("compress_genome_k31");
    group.sample_size(10);
    for n in [100_000usize, 200_000, 400_000] {
        let m = genome_kmers(n, 31);
        let job = CompressionJob::new(31, Mode::List);
        group.throughput(Throughput::Elements(n as u64));
        group.bench_with_input(BenchmarkId::from_parameter(n), &m, |b, m| {
            b.iter(|| compress(&job, black_box(m)).unwrap())
        });
    }
    group.finish();
}

fn bench_modes(c: &mut Criterion) {
    let m = read_kmers(50_000, 21);
    let mut group = c.benchmark_group("compress_reads_k21");
    group.sample_size(10);
    for mode in [Mode::List, Mode::Frequency] {
        let job = CompressionJob::new(21, mode);
        group.bench_function(mode.to_string(), |b| {
            b.iter(|| compress(&job, black_box(&m)).unwrap())
        });
    }
    group.finish();
}

fn bench_graph_build(c: &mut Criterion) {
    let m = sampled_kmers(10, 0.5);
    c.bench_function("build_graph_k10_half_space", |b| {
        b.iter(|| DeBruijnGraph::build(black_box(&m)).unwrap())
    });
}

criterion_group!(benches, bench_compress_scaling, bench_modes, bench_graph_build);
criterion_main!(benches);
