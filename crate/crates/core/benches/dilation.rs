//! Parallel versus single-threaded timings of the hot paths.
//!
//! Each group runs the same workload on the global rayon pool and inside
//! `par::single_threaded`. Without the `parallel` feature both variants are
//! sequential.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dilatio::channel::random_channel;
use dilatio::channel::{convex_combine, power};
use dilatio::control::{build_control_dilation, verify_control_dilation};
use dilatio::library;
use dilatio::par;
use dilatio::random::{gaussian_matrix, rng_from_seed};
use dilatio::semigroup::{build_semigroup_dilation, verify_dilation};
use dilatio::KrausChannel;

fn variants<F: Fn() + Sync + Send>(c: &mut Criterion, group: &str, param: &str, f: F) {
    let mut g = c.benchmark_group(group);
    g.sample_size(10);
    g.bench_with_input(BenchmarkId::new("parallel", param), &(), |b, _| b.iter(&f));
    g.bench_with_input(BenchmarkId::new("sequential", param), &(), |b, _| {
        b.iter(|| par::single_threaded(&f))
    });
    g.finish();
}

fn bench_matmul(c: &mut Criterion) {
    let mut rng = rng_from_seed(1);
    for n in [128usize, 384] {
        let a = gaussian_matrix(n, n, &mut rng);
        let b = gaussian_matrix(n, n, &mut rng);
        variants(c, "matmul", &n.to_string(), || {
            black_box(a.matmul(&b));
        });
    }
}

fn bench_semigroup_verify(c: &mut Criterion) {
    for (d, n) in [(2usize, 16usize), (3, 8)] {
        let t = random_channel(d, d * d, 7).unwrap();
        let bundle = build_semigroup_dilation(&t, n).unwrap();
        variants(c, "verify_dilation", &format!("d{d}_N{n}"), || {
            black_box(verify_dilation(&bundle, &t, 1e-9).unwrap());
        });
    }
}

fn bench_semigroup_build(c: &mut Criterion) {
    let t = random_channel(2, 4, 9).unwrap();
    variants(c, "build_semigroup_dilation", "d2_N24", || {
        black_box(build_semigroup_dilation(&t, 24).unwrap());
    });
}

fn bench_control_verify(c: &mut Criterion) {
    let base = KrausChannel::unitary(library::rotation_y(0.4)).unwrap();
    let id = KrausChannel::identity(2);
    let t = convex_combine(&[base.clone(), id.clone()], &[0.5, 0.5]).unwrap();
    let s = convex_combine(&[power(&base, 2).unwrap(), id], &[0.3, 0.7]).unwrap();
    let dil = build_control_dilation(&t, &s, 6).unwrap();
    variants(c, "verify_control_dilation", "d2_N6", || {
        black_box(verify_control_dilation(&dil, &t, &s, 1e-9).unwrap());
    });
}

criterion_group!(
    benches,
    bench_matmul,
    bench_semigroup_verify,
    bench_semigroup_build,
    bench_control_verify
);
criterion_main!(benches);
