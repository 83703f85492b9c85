use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use entstar_core::engine::{cotrajectory_orders, hstar};
use entstar_core::intlat::hnf;
use entstar_core::{CofiniteSubgroup, EngineConfig, FpMat, IndexTag, IntMat, OperatorDesc, SparseVec};

fn random_fp(rng: &mut ChaCha8Rng, p: u32, n: usize) -> FpMat {
    FpMat::from_residues(p, n, n, (0..n * n).map(|_| rng.gen_range(0..p)).collect())
}

fn rref(c: &mut Criterion) {
    let mut group = c.benchmark_group("rref");
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for n in [64, 256] {
        for p in [2, 3] {
            let m = random_fp(&mut rng, p, n);
            group.bench_with_input(BenchmarkId::new(format!("p{p}"), n), &m, |b, m| b.iter(|| black_box(m.rank())));
        }
    }
    group.finish();
}

fn cotrajectory(c: &mut Criterion) {
    let mut group = c.benchmark_group("cotrajectory");
    for p in [2, 5] {
        let op = OperatorDesc::left_shift(p);
        let n = CofiniteSubgroup::FpKernel(vec![SparseVec::unit(p, IndexTag::Nat, 0)]);
        group.bench_function(BenchmarkId::new("hstar_left_shift", p), |b| {
            b.iter(|| black_box(hstar(&op, &n, &EngineConfig::default()).unwrap()))
        });
        group.bench_function(BenchmarkId::new("orders_256", p), |b| {
            b.iter(|| black_box(cotrajectory_orders(&op, &n, 256).unwrap()))
        });
    }
    group.finish();
}

fn hermite(c: &mut Criterion) {
    let mut group = c.benchmark_group("hnf");
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for n in [4, 8, 16] {
        let rows: Vec<Vec<i64>> = (0..n).map(|_| (0..n).map(|_| rng.gen_range(-50..50)).collect()).collect();
        let m = IntMat::from_i64(&rows).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &m, |b, m| b.iter(|| black_box(hnf(m))));
    }
    group.finish();
}

criterion_group!(benches, rref, cotrajectory, hermite);
criterion_main!(benches);
