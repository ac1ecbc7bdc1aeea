use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use std::hint::black_box;

use gvqkd_bench::{scan, session_config};
use gvqkd_core::protocol::{sift_session, timing_test};
use gvqkd_core::rng::{stream, Stream};
use gvqkd_core::{fit_fringe, fringe_scan, run_session, AttackStrategy};

fn session(c: &mut Criterion) {
    let config = session_config(5.0);
    c.bench_function("run_session 5 s", |b| {
        b.iter(|| run_session(black_box(&config), &AttackStrategy::None).unwrap())
    });
    let attack = AttackStrategy::WhichPathInterceptResend;
    c.bench_function("run_session 5 s which-path", |b| {
        b.iter(|| run_session(black_box(&config), &attack).unwrap())
    });

    let transcript = run_session(&config, &AttackStrategy::None).unwrap();
    c.bench_function("timing_test 5 s", |b| {
        b.iter(|| timing_test(black_box(&transcript.sends), &transcript.receives, &config))
    });
    c.bench_function("sift_session 5 s", |b| {
        b.iter(|| sift_session(black_box(&transcript), &config).unwrap())
    });
}

fn fringe(c: &mut Criterion) {
    let scan = scan();
    c.bench_function("fringe_scan 81 steps", |b| {
        b.iter_batched(
            || stream(3, Stream::Fringe),
            |mut rng| fringe_scan(&scan, &mut rng).unwrap(),
            BatchSize::SmallInput,
        )
    });
    let points = fringe_scan(&scan, &mut stream(3, Stream::Fringe)).unwrap();
    c.bench_function("fit_fringe 81 points", |b| {
        b.iter(|| fit_fringe(black_box(&points), scan.wavelength_nm).unwrap())
    });
}

criterion_group!(benches, session, fringe);
criterion_main!(benches);
