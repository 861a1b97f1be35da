#![allow(dead_code)]

use std::f64::consts::{PI, TAU};

use cabello::mathcore::{CMatrix, Complex64};
use cabello::qubit::MeasurementParams;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};

/// Fixed-seed configuration so every run draws the same cases.
pub fn seeded(cases: u32) -> Config {
    Config { cases, rng_seed: RngSeed::Fixed(0x5eed), failure_persistence: None, ..Config::default() }
}

pub fn complex() -> impl Strategy<Value = Complex64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| Complex64::new(re, im))
}

pub fn unit_vector(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
    proptest::collection::vec(complex(), n)
        .prop_filter("nonzero", |v| v.iter().map(|z| z.norm_sqr()).sum::<f64>() > 1e-3)
        .prop_map(|v| {
            let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            v.into_iter().map(|z| z / n).collect()
        })
}

pub fn hermitian(n: usize) -> impl Strategy<Value = CMatrix> {
    proptest::collection::vec(complex(), n * n).prop_map(move |v| {
        let m = CMatrix::from_vec(n, n, v);
        let a = m.adjoint();
        CMatrix::from_fn(n, n, |i, j| (m[(i, j)] + a[(i, j)]) * 0.5)
    })
}

pub fn measurement_params() -> impl Strategy<Value = MeasurementParams> {
    (0.01..PI - 0.01, 0.01..PI - 0.01, 0.0..TAU, 0.0..TAU).prop_map(|(alpha, beta, phi, xi)| MeasurementParams {
        alpha,
        beta,
        phi,
        xi,
    })
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
