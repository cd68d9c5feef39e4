use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qmcis::isampling::{estimate, PointSource, ProposalKind, Sampling};
use qmcis_bench::{bond, lattice};

fn bond_estimates(c: &mut Criterion) {
    let mut g = c.benchmark_group("estimate_bond_d16_N4096_R16");
    g.sample_size(10);
    let n = 1u64 << 12;
    let gen = lattice(n, 16);
    for kind in [ProposalKind::None, ProposalKind::Odis, ProposalKind::Lapis, ProposalKind::StudentT { nu: 20.0 }] {
        let (p, plan) = bond(16, kind);
        for src in [PointSource::MonteCarlo { n: n as usize }, PointSource::Lattice(gen.clone())] {
            g.bench_function(BenchmarkId::new(src.label(), kind), |b| {
                b.iter(|| estimate(&p, &plan, &src, &Sampling::new(16, 1)).unwrap())
            });
        }
    }
    g.finish();
}

criterion_group!(benches, bond_estimates);
criterion_main!(benches);
