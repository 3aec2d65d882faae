use criterion::{criterion_group, criterion_main, Criterion};
use polarblend::discrete::{solve_discrete, DiscreteConfig};
use polarblend::recovery::{recover, SearchConfig};
use polarblend::PlyMaterial;
use polarblend_bench::{chain, two_panel_subproblem};

fn recovery(c: &mut Criterion) {
    let m = PlyMaterial::t300_5208();
    let sub = two_panel_subproblem();
    let cfg = SearchConfig {
        step_deg: 5,
        budget: 20_000,
        ..SearchConfig::default()
    };
    let mut g = c.benchmark_group("search");
    g.sample_size(20);
    g.bench_function("recover two panels, 20k evaluations", |b| b.iter(|| recover(&sub, &m, &cfg).unwrap()));

    let (design, edges) = chain(8);
    let dcfg = DiscreteConfig {
        budget: 300,
        ..DiscreteConfig::default()
    };
    g.bench_function("discretize 8 panels", |b| b.iter(|| solve_discrete(&design, &edges, &dcfg).unwrap()));
    g.finish();
}

criterion_group!(benches, recovery);
criterion_main!(benches);
