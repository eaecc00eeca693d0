//! Rayon-backed helpers against the sequential fallback on the two hot
//! paths: corpus descriptor extraction and the enumeration search.

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use branchinfer::chemgraph::random::random_chemical_tree;
use branchinfer::chemgraph::ChemicalAlphabet;
use branchinfer::dataset::corpus_stats;
use branchinfer::descriptors::feature_vector;
use branchinfer::graphsearch::{random_class_member, search, SearchLimits, SearchProblem};
use branchinfer::par;

fn modes() -> [(&'static str, bool); 2] {
    [("parallel", false), ("sequential", true)]
}

fn descriptors(c: &mut Criterion) {
    let al = ChemicalAlphabet::cno();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let graphs: Vec<_> = (0..2000)
        .map(|i| random_chemical_tree(&mut rng, &al, 10 + i % 40, 4, 0.3))
        .collect();
    let mut g = c.benchmark_group("descriptors_2000");
    for (name, seq) in modes() {
        g.bench_function(BenchmarkId::new("feature_vector", name), |b| {
            par::set_sequential(seq);
            b.iter(|| black_box(par::map(&graphs, |h| feature_vector(h, 2, &al).unwrap())))
        });
        g.bench_function(BenchmarkId::new("corpus_stats", name), |b| {
            par::set_sequential(seq);
            b.iter(|| black_box(corpus_stats(&graphs, &[1, 2, 3, 4])))
        });
    }
    g.finish();
    par::set_sequential(false);
}

fn enumeration(c: &mut Criterion) {
    let al = ChemicalAlphabet::cno();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut targets = Vec::new();
    for (n, bl) in [(22, 2), (22, 3)] {
        let g = loop {
            if let Some(g) = random_class_member(&mut rng, &al, n, bl, 4, 5000) {
                break g;
            }
        };
        targets.push((format!("bl{bl}_n{n}"), SearchProblem::from_graph(&g, &al, 4).unwrap()));
    }
    let limits = SearchLimits {
        max_output: 1000,
        ..SearchLimits::default()
    };
    let mut g = c.benchmark_group("search");
    g.sample_size(10);
    for (label, p) in &targets {
        for (name, seq) in modes() {
            g.bench_function(BenchmarkId::new(label.as_str(), name), |b| {
                par::set_sequential(seq);
                b.iter(|| black_box(search(p, &limits).unwrap()))
            });
        }
    }
    g.finish();
    par::set_sequential(false);
}

criterion_group!(benches, descriptors, enumeration);
criterion_main!(benches);
