//! Closure and BFS timings. With the `parallel` feature each workload runs
//! on a one-thread pool and on the global pool; without it, only the plain
//! loops are measured.

use std::hint::black_box;

use confset::cayley::build_cayley;
use confset::closure::{closure, config_codes};
use confset::group::{direct_power, group_from_spec, DEFAULT_MAX_ORDER};
use confset::Group;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn workload(spec: &str, k: usize) -> (Group, Vec<usize>) {
    let power = direct_power(&group_from_spec(spec).unwrap(), k, DEFAULT_MAX_ORDER).unwrap();
    let codes = config_codes(&power).unwrap();
    (power, codes)
}

const CASES: &[(&str, usize)] = &[("S3", 4), ("Z5", 5), ("D3", 6)];

#[cfg(feature = "parallel")]
fn modes() -> Vec<(&'static str, rayon::ThreadPool)> {
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let all = rayon::ThreadPoolBuilder::new().build().unwrap();
    vec![("sequential", one), ("parallel", all)]
}

fn run_mode<R: Send>(mode: &(&'static str, impl Runner), f: impl FnOnce() -> R + Send) -> R {
    mode.1.run(f)
}

trait Runner: Sync {
    fn run<R: Send>(&self, f: impl FnOnce() -> R + Send) -> R;
}

#[cfg(feature = "parallel")]
impl Runner for rayon::ThreadPool {
    fn run<R: Send>(&self, f: impl FnOnce() -> R + Send) -> R {
        self.install(f)
    }
}

#[cfg_attr(feature = "parallel", allow(dead_code))]
struct Plain;

impl Runner for Plain {
    fn run<R: Send>(&self, f: impl FnOnce() -> R + Send) -> R {
        f()
    }
}

#[cfg(not(feature = "parallel"))]
fn modes() -> Vec<(&'static str, Plain)> {
    vec![("sequential", Plain)]
}

fn bench_closure(c: &mut Criterion) {
    let mut group = c.benchmark_group("closure");
    group.sample_size(10);
    for &(spec, k) in CASES {
        let (power, codes) = workload(spec, k);
        for mode in &modes() {
            group.bench_with_input(BenchmarkId::new(mode.0, format!("{spec}^{k}")), &codes, |b, codes| {
                b.iter(|| run_mode(mode, || black_box(closure(&power, codes).unwrap().size())))
            });
        }
    }
    group.finish();
}

fn bench_components(c: &mut Criterion) {
    let mut group = c.benchmark_group("components");
    group.sample_size(10);
    for &(spec, k) in CASES {
        let (power, codes) = workload(spec, k);
        let graph = build_cayley(&power, &codes, DEFAULT_MAX_ORDER).unwrap();
        for mode in &modes() {
            group.bench_function(BenchmarkId::new(mode.0, format!("{spec}^{k}")), |b| {
                b.iter(|| run_mode(mode, || black_box(graph.connected_components().count())))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, bench_closure, bench_components);
criterion_main!(benches);
