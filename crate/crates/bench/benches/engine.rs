use criterion::{black_box, criterion_group, criterion_main, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use thzlink_core::analytic::{avg_snr_relay, capacity_lb_relay, closed, Formulas, RelayScenario};
use thzlink_core::channels::{
    thz_snr_cdf, FadingParams, PointingParams, RfChannelConstants, ThzChannelConstants,
};
use thzlink_core::oracle::mc::{estimate_sweep, McConfig, McLink, McQuantity, RelayGainSampler};
use thzlink_core::specfun::{bivariate_meijer_g, upper_inc_gamma, BivariateGSpec, MeijerGSpec};

fn scenario() -> RelayScenario {
    let f = FadingParams::new(2.0, 4.0, 1.0).unwrap();
    RelayScenario::new(
        ThzChannelConstants::new(f, PointingParams::new(8.5448, 0.1172).unwrap(), 4122.0).unwrap(),
        RfChannelConstants::new(f, 26240.0).unwrap(),
    )
}

fn special_functions(c: &mut Criterion) {
    c.bench_function("upper_inc_gamma negative order", |b| {
        b.iter(|| upper_inc_gamma(black_box(-0.27), black_box(0.8)).unwrap())
    });
    let spec = BivariateGSpec::product_integral(
        4.27,
        MeijerGSpec::new(2, 0, vec![1.0], vec![-0.27, 0.0]).unwrap(),
        MeijerGSpec::new(1, 2, vec![1.0, 1.0], vec![1.0, 0.0]).unwrap(),
    )
    .unwrap();
    c.bench_function("bivariate meijer g", |b| {
        b.iter(|| bivariate_meijer_g(&spec, black_box(0.8), black_box(3.0)).unwrap())
    });
}

fn closed_forms(c: &mut Criterion) {
    let s = scenario();
    c.bench_function("thz cdf", |b| {
        b.iter(|| thz_snr_cdf(&s.thz, black_box(12.0)).unwrap())
    });
    c.bench_function("average snr terms", |b| {
        b.iter(|| closed::avg_snr_terms(&s.thz, &s.rf).unwrap())
    });
    c.bench_function("capacity terms", |b| {
        b.iter(|| closed::capacity_terms(&s.thz, &s.rf).unwrap())
    });
    c.bench_function("average snr with oracle check", |b| {
        b.iter(|| avg_snr_relay(&s, Formulas::Derived).unwrap())
    });
    c.bench_function("capacity with oracle check", |b| {
        b.iter(|| capacity_lb_relay(&s, Formulas::Derived).unwrap())
    });
}

fn monte_carlo(c: &mut Criterion) {
    let s = scenario();
    let sampler = RelayGainSampler::for_scenario(&s).unwrap();
    let mut rng = ChaCha12Rng::seed_from_u64(1);
    c.bench_function("relay gain draw", |b| b.iter(|| sampler.sample(&mut rng)));
    let link = McLink::relay(&s).unwrap();
    let cfg = McConfig::new(1, 100_000, 16).unwrap();
    let points: Vec<(f64, f64)> = (0..31)
        .map(|i| (10f64.powf(0.2 * i as f64), 10f64.powf(0.2 * i as f64)))
        .collect();
    c.bench_function("sweep 1e5 x 31 points", |b| {
        b.iter(|| {
            estimate_sweep(
                &link,
                &points,
                &[McQuantity::AvgSnr, McQuantity::CapacityLb],
                &cfg,
            )
            .unwrap()
        })
    });
}

criterion_group!(benches, special_functions, closed_forms, monte_carlo);
criterion_main!(benches);
