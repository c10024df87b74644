use criterion::{criterion_group, criterion_main, Criterion};
use descent_bench::*;
use descent_core::descent::{generator_counit_check, prestack_failure_demo, relation_counit_check, PrestackVariant};
use descent_core::lattice::{all_diamonds, cauchy_development, double_complement};
use descent_core::site::{compare_localization, Flavor};

fn causality(c: &mut Criterion) {
    let (p, cyl) = (plane(), cylinder());
    let d = tall_diamond(&p, 6);
    c.bench_function("development/plane-h6", |b| b.iter(|| cauchy_development(&p, &d).unwrap()));
    c.bench_function("double-complement/plane-h6", |b| b.iter(|| double_complement(&p, &d).unwrap()));
    let ds = all_diamonds(&cyl);
    c.bench_function("development/cylinder-all-diamonds", |b| {
        b.iter(|| ds.iter().map(|u| cauchy_development(&cyl, u).unwrap()).count())
    });
}

fn site_checks(c: &mut Criterion) {
    let st = descent_core::Spacetime::plane(0, 4).with_span(0, 4);
    let s = site(&st, Flavor::Plain);
    c.bench_function("localization-oracle/plane-5x5", |b| b.iter(|| compare_localization(&s).unwrap()));
    c.bench_function("prestack-demo/rc", |b| b.iter(|| prestack_failure_demo(PrestackVariant::RelativelyCompact, 2).unwrap()));
}

fn klein_gordon(c: &mut Criterion) {
    let st = plane();
    let cover = five_piece_cover(&st);
    let u = cover.base.clone();
    let mut g = c.benchmark_group("kg");
    g.sample_size(20);
    g.bench_function("generator-space/h8", |b| {
        b.iter(|| {
            let mut m = model(&st);
            m.space(&u).dim()
        })
    });
    for flavor in [Flavor::Plain, Flavor::Localized] {
        g.bench_function(format!("generator-check/{flavor:?}"), |b| {
            b.iter(|| {
                let mut m = model(&st);
                generator_counit_check(&mut m, &cover, &u, flavor).unwrap().exact
            })
        });
        g.bench_function(format!("relation-check/{flavor:?}"), |b| {
            b.iter(|| {
                let mut m = model(&st);
                relation_counit_check(&mut m, &cover, &u, flavor, true).unwrap().equal
            })
        });
    }
    g.finish();
}

criterion_group!(benches, causality, site_checks, klein_gordon);
criterion_main!(benches);
