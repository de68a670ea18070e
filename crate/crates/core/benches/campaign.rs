use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use isotuple::generators::Profile;
use isotuple::par::Execution;
use isotuple::verify::{run_campaign, CampaignConfig, TheoremId};

fn campaigns(c: &mut Criterion) {
    let mut group = c.benchmark_group("campaign");
    group.sample_size(10);
    for profile in [Profile::Thm05, Profile::Thm06, Profile::Thm07] {
        for (label, execution) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
            let mut cfg = CampaignConfig::new(TheoremId::Profile(profile), 64, 42);
            cfg.execution = execution;
            group.bench_with_input(BenchmarkId::new(label, profile), &cfg, |b, cfg| {
                b.iter(|| run_campaign(cfg).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, campaigns);
criterion_main!(benches);
