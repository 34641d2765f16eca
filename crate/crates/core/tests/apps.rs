mod common;

use bandinv::apps::{absorbing_bd_invert, steady_state, value_function, AbsorbingSpec, AbsorbingVariant};
use bandinv::oracle::{dense_invert, dense_stationary, DenseMatrix};
use bandinv::{BandSpec, Extent, InvertOptions, StructuredMatrix};
use rand::Rng;

fn generator(rng: &mut rand_chacha::ChaCha8Rng, n: usize, column: bool) -> BandSpec {
    let mut down: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..3.0)).collect();
    let mut up: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..3.0)).collect();
    let mut tozero: Vec<f64> = (0..n).map(|_| if column { rng.random_range(0.0..1.0) } else { 0.0 }).collect();
    down[0] = 0.0;
    up[n - 1] = 0.0;
    tozero[0] = 0.0;
    if !column && n > 1 {
        tozero[1] = 0.0;
    }
    BandSpec::from_arrays(&down, &up, &tozero).unwrap()
}

fn dense_generator(q: &BandSpec, n: usize) -> DenseMatrix {
    let mut b = StructuredMatrix::validate(q.with_row0(bandinv::Rates { down: 1.0, ..q.rates(0) }))
        .unwrap()
        .to_dense(n);
    b[(0, 0)] += 1.0;
    b
}

#[test]
fn random_stationary_distributions() {
    let mut rng = common::rng(30);
    for k in 0..20 {
        let q = generator(&mut rng, 30, k % 2 == 0);
        let s = steady_state(&q, &InvertOptions::default()).unwrap();
        let oracle = dense_stationary(&dense_generator(&q, 30)).unwrap();
        assert!(s.residual < 1e-10);
        assert!((s.pi.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for (a, b) in s.pi.iter().zip(&oracle) {
            assert!(*a >= -1e-14);
            assert!((a - b).abs() < 1e-9);
        }
    }
}

#[test]
fn random_value_functions() {
    let mut rng = common::rng(25);
    for k in 0..50 {
        let n = if k < 25 { 25 } else { rng.random_range(1..40) };
        let q = generator(&mut rng, n, k % 3 == 2);
        let cost: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
        let v = value_function(&q, &cost, 0.1, &InvertOptions::default()).unwrap();
        let cnorm = cost.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        assert!(v.residual < 1e-9 * (cnorm + 1.0), "case {k}: {}", v.residual);
        let mut qa = dense_generator(&q, n);
        for i in 0..n {
            qa[(i, i)] -= 0.1;
        }
        let dense: Vec<f64> = dense_invert(&qa).unwrap().mul_vec(&cost).iter().map(|x| -x).collect();
        for (a, b) in v.v.iter().zip(&dense) {
            assert!((a - b).abs() < 1e-8);
        }
        let doubled: Vec<f64> = cost.iter().map(|x| 2.0 * x).collect();
        let v2 = value_function(&q, &doubled, 0.1, &InvertOptions::default()).unwrap();
        assert!(v.v.iter().zip(&v2.v).all(|(a, b)| 2.0 * a == *b));
    }
}

#[test]
fn absorbing_truncations() {
    for variant in [AbsorbingVariant::Isolated, AbsorbingVariant::Homogeneous] {
        for n in [3usize, 20, 200] {
            let spec = AbsorbingSpec::new(2.0, 1.0, 1.0, Extent::Finite(n)).with_variant(variant);
            let view = absorbing_bd_invert(&spec, n, &InvertOptions::default()).unwrap();
            assert!(view.residual() < 1e-9);
            assert!(view.row0()[1..].iter().all(|c| *c == 0.0));
        }
    }
}
