mod common;

use bandinv::matrix::Tridiagonal;
use bandinv::oracle::{dense_eigen, dense_invert, DenseMatrix};
use bandinv::spectral::{
    eig_vectors, eigenvalues_of_b, multiset_distance, rank_one_update, tridiag_eigen, EigState, Spectrum,
};
use bandinv::{BandSpec, StructuredMatrix};
use num_complex::Complex64;
use rand::Rng;

#[test]
fn random_pipeline_matches_dense() {
    let mut rng = common::rng(7);
    let mut real = 0;
    for k in 0..200 {
        let n = 2 + k % 11;
        let b = common::random_matrix(&mut rng, n, 0, 0);
        let r = eigenvalues_of_b(&b, true).unwrap_or_else(|e| panic!("case {k}: {e}"));
        assert!(r.audit.passed(), "case {k}: {:?}", r.audit);
        if r.all_real {
            real += 1;
            assert!(r.oracle_distance.unwrap() < 1e-6, "case {k}");
        }
        if r.sign_pattern {
            assert!(r.alphas.iter().all(|a| a.im == 0.0 && a.re > 0.0), "case {k}");
        }
    }
    assert!(real > 50);
}

#[test]
fn tridiagonal_b_keeps_band_spectrum() {
    let spec = BandSpec::from_arrays(&[1.0, 2.0, 1.5, 1.0], &[1.0, 0.5, 2.0, 0.0], &[0.0; 4]).unwrap();
    let b = StructuredMatrix::validate(spec).unwrap();
    let r = eigenvalues_of_b(&b, true).unwrap();
    assert_eq!(r.stages, 0);
    let w = tridiag_eigen(&b.decompose().unwrap().tridiagonal).unwrap();
    assert!(r.spectrum.distance(&w) < 1e-9);
    assert!(r.oracle_distance.unwrap() < 1e-9);
}

#[test]
fn two_by_two_update() {
    let w = Tridiagonal { sub: vec![2.0], diag: vec![-3.0, -2.0], sup: vec![2.0] };
    let basis = eig_vectors(&w, &tridiag_eigen(&w).unwrap()).unwrap();
    let state = EigState::new(&basis.values, &basis.first);
    let next = rank_one_update(&state, Complex64::new(1.0, 0.0)).unwrap();
    let mut a = w.to_dense();
    for i in 0..2 {
        a[(i, 0)] += basis.vectors[0][i];
    }
    let d = multiset_distance(&next.lambda, &dense_eigen(&a).unwrap());
    assert!(d < 1e-9, "{d}");
    assert!(next.lambda.iter().all(|z| z.im == 0.0));
}

#[test]
fn single_update_on_dense_matrix() {
    let mut rng = common::rng(11);
    for _ in 0..100 {
        let n = rng.random_range(2..8);
        // A = V diag(lambda) V^-1 with known eigenvectors in the columns of V
        let mut v = DenseMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                v[(i, j)] = rng.random_range(-1.0..1.0) + if i == j { 2.0 } else { 0.0 };
            }
        }
        let mut lambda: Vec<f64> = (0..n).map(|k| -(k as f64) - rng.random_range(0.1..0.9)).collect();
        lambda.sort_by(f64::total_cmp);
        let vinv = dense_invert(&v).unwrap();
        let mut vl = v.clone();
        for i in 0..n {
            for j in 0..n {
                vl[(i, j)] *= lambda[j];
            }
        }
        let mut a = vl.mul(&vinv);
        let alpha = rng.random_range(0.1..2.0);
        let first: Vec<f64> = (0..n).map(|j| v[(0, j)]).collect();
        for i in 0..n {
            a[(i, 0)] += alpha * v[(i, 0)];
        }
        let state = rank_one_update(&EigState::new(&lambda, &first), Complex64::new(alpha, 0.0)).unwrap();
        let d = Spectrum::sorted(state.lambda).distance(&Spectrum::sorted(dense_eigen(&a).unwrap()));
        assert!(d < 1e-9, "{d}");
    }
}
