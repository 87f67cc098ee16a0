//! Sequential against parallel execution of the data-parallel kernels.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hglab_core::domains::build_disk_pole_hull;
use hglab_core::exec::{set_execution, Execution};
use hglab_core::groups::{sequence_cartans, straightness_residual, GeneratorSet, GroupElement};
use hglab_core::hilbert::{contraction_profile, BallSampler, Geodesic};
use hglab_core::projlin::{ProjectiveMap, Vector};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn boost_powers(n: usize) -> (GeneratorSet, Vec<GroupElement>) {
    let (c, s) = (1f64.cosh(), 1f64.sinh());
    let m = ProjectiveMap::from_rows(&[vec![c, 0.0, s], vec![0.0, 1.0, 0.0], vec![s, 0.0, c]]).unwrap();
    let gs = GeneratorSet::new(vec![m]).unwrap();
    let els = (0..=n).map(|k| GroupElement::from_word(&gs, vec![(0, k as i64)])).collect();
    (gs, els)
}

fn bench_cartans(c: &mut Criterion) {
    let (gs, els) = boost_powers(200);
    let mut group = c.benchmark_group("sequence_cartans");
    for (name, mode) in MODES {
        set_execution(mode);
        group.bench_with_input(BenchmarkId::from_parameter(name), &els, |b, els| {
            b.iter(|| sequence_cartans(&gs, els).unwrap())
        });
    }
    group.finish();
}

fn bench_straightness(c: &mut Criterion) {
    let (gs, els) = boost_powers(40);
    let mut group = c.benchmark_group("straightness_residual");
    for (name, mode) in MODES {
        set_execution(mode);
        group.bench_function(name, |b| b.iter(|| straightness_residual(&gs, &els, 1).unwrap()));
    }
    group.finish();
}

fn bench_contraction(c: &mut Criterion) {
    let dom = build_disk_pole_hull().unwrap();
    let v = |x: &[f64]| Vector::from_column_slice(x);
    let geo = Geodesic::line(&v(&[-1.0, 0.0, 1.0]), &v(&[1.0, 0.0, 1.0]), &dom, 0.5)
        .unwrap()
        .truncated(-2.0, 2.0);
    let sampler = BallSampler::Random {
        seed: 11,
        count: 2,
        radius: 1.0,
        max_fraction: 0.9,
    };
    let mut group = c.benchmark_group("contraction_profile");
    group.sample_size(10);
    for (name, mode) in MODES {
        set_execution(mode);
        group.bench_function(name, |b| b.iter(|| contraction_profile(&dom, &geo, &sampler).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, bench_cartans, bench_straightness, bench_contraction);
criterion_main!(benches);
