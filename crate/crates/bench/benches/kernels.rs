use criterion::{black_box, criterion_group, criterion_main, Criterion};
use ermakov::diagnostics::SqueezeParams;
use ermakov::fock::{oracle_squeeze_matrix, squeeze_element_legendre, squeeze_element_series};
use ermakov::{equilibrium_ics, integrate, FrequencyProtocol, OscillatorParams, Tolerances};

fn bench_integrate(c: &mut Criterion) {
    let params = OscillatorParams::default();
    let p = FrequencyProtocol::tanh(1.0, 2.0, 0.0, 0.5).unwrap();
    let t0 = p.default_start().unwrap();
    let ics = equilibrium_ics(&p, t0, &params).unwrap();
    c.bench_function("integrate_tanh", |b| b.iter(|| integrate(black_box(&p), &params, ics, (t0, 20.0), Tolerances::default()).unwrap()));
    let ramp = FrequencyProtocol::nonlinear_symmetric(0.05, 2.0).unwrap();
    let ics = (0.5, 0.1);
    c.bench_function("integrate_ramp", |b| {
        b.iter(|| integrate(black_box(&ramp), &params, ics, (-40.0, 40.0), Tolerances::default()).unwrap())
    });
}

fn bench_elements(c: &mut Criterion) {
    let sq = SqueezeParams::new(0.9, 0.4, 0.0);
    c.bench_function("series_12x12", |b| {
        b.iter(|| {
            let mut acc = 0.0;
            for m in 0..=12 {
                for n in 0..=12 {
                    acc += squeeze_element_series(m, n, black_box(&sq)).norm();
                }
            }
            acc
        })
    });
    c.bench_function("legendre_40_0", |b| b.iter(|| squeeze_element_legendre(40, 0, black_box(&sq)).unwrap()));
    c.bench_function("oracle_n96", |b| b.iter(|| oracle_squeeze_matrix(black_box(&sq), 96).unwrap()));
}

criterion_group!(benches, bench_integrate, bench_elements);
criterion_main!(benches);
