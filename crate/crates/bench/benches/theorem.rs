use criterion::{black_box, criterion_group, criterion_main, Criterion};
use strandkit_core::{build_arc_module, examples, hom_dim, int_number, verify_pairs, Field};
use strandkit_bench::random_pairs;

fn running(c: &mut Criterion) {
    let d = examples::running_datum();
    let (s, t) = (examples::sigma(&d), examples::tau(&d));
    c.bench_function("running/build_tau", |b| b.iter(|| build_arc_module(&d, black_box(&t)).unwrap()));
    let (ms, mt) = (build_arc_module(&d, &s).unwrap(), build_arc_module(&d, &t).unwrap());
    c.bench_function("running/hom_window", |b| {
        b.iter(|| (-8..=8).map(|rho| hom_dim(&d, &ms, &mt, rho, Field::Rational)).sum::<usize>())
    });
    c.bench_function("running/int_window", |b| {
        b.iter(|| (-8..=8).map(|rho| int_number(&d, &s, &t, rho).unwrap()).sum::<usize>())
    });
}

fn sweep(c: &mut Criterion) {
    let mut g = c.benchmark_group("sweep");
    g.sample_size(10);
    for (name, d) in [("running", examples::running_datum()), ("d4", examples::d4_datum())] {
        let pairs = random_pairs(&d, 7, 100);
        g.bench_function(name, |b| b.iter(|| verify_pairs(&d, &pairs, -6..=6, Field::Rational).unwrap().len()));
    }
    g.finish();
}

criterion_group!(benches, running, sweep);
criterion_main!(benches);
