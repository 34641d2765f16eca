mod common;

use bandinv::general::{first_column_value, gamma1, rho_eta, GammaTable};
use bandinv::homogeneous::{diagonal_gap, hom_constants, hom_finite_invert, hom_invert};
use bandinv::oracle::{dense_invert, sherman_morrison_invert};
use bandinv::{invert, BandSpec, Extent, HomogeneousSpec, InvertOptions, Rates, Scheme, StructuredMatrix, Truncation};
use rand::Rng;

fn worked() -> StructuredMatrix {
    StructuredMatrix::validate(BandSpec::from_arrays(&[1.0, 1.0, 2.0], &[2.0, 1.0, 0.0], &[0.0, 1.0, 1.0]).unwrap())
        .unwrap()
}

#[test]
fn worked_example_against_oracle() {
    let b = worked();
    let oracle = dense_invert(&b.to_dense(3)).unwrap();
    for i in 0..3 {
        assert!((oracle[(i, 0)] + 1.0).abs() < 1e-15);
    }
    assert!((oracle[(0, 1)] + 6.0 / 7.0).abs() < 1e-15);
    assert!((oracle[(0, 2)] + 2.0 / 7.0).abs() < 1e-15);
    for scheme in [Scheme::Ratio, Scheme::Forward] {
        let view = invert(&b, 3, &InvertOptions::default().with_scheme(scheme)).unwrap();
        assert!(view.block().max_abs_diff(&oracle) < 1e-12);
        assert!(view.residual() < 1e-12);
    }
    assert_eq!(first_column_value(&b), -1.0);
    let g = GammaTable::build(&b).unwrap();
    assert!((g.gamma[1] - 6.0 / 7.0).abs() < 1e-15 && (g.gamma[2] - 2.0 / 7.0).abs() < 1e-15);
}

#[test]
fn lazy_elements() {
    let b = worked();
    let mut view = invert(&b, 1, &InvertOptions::default()).unwrap();
    assert_eq!(view.materialized(), 1);
    let oracle = dense_invert(&b.to_dense(3)).unwrap();
    let first = view.element(2, 1).unwrap();
    assert!((first - oracle[(2, 1)]).abs() < 1e-15);
    assert_eq!(view.element(2, 1).unwrap().to_bits(), first.to_bits());

    let inf = StructuredMatrix::from_homogeneous(&HomogeneousSpec::new(2.0, 1.0, 1.0, Extent::Infinite)).unwrap();
    let mut view = invert(&inf, 1, &InvertOptions::default()).unwrap();
    assert_eq!(view.element(5, 0).unwrap(), -0.5);
    assert_eq!(view.materialized(), 1);
}

#[test]
fn small_scalars() {
    for bd in [2.0, 4.0] {
        let b = StructuredMatrix::validate(BandSpec::from_arrays(&[bd], &[0.0], &[0.0]).unwrap()).unwrap();
        assert_eq!(first_column_value(&b), -1.0 / bd);
        assert_eq!(invert(&b, 1, &InvertOptions::default()).unwrap().get(0, 0), Some(-1.0 / bd));
    }
}

#[test]
fn rho_eta_with_zero_down() {
    let b = StructuredMatrix::validate(
        BandSpec::from_arrays(&[1.0, 1.0, 0.0, 1.0], &[1.0, 1.0, 1.0, 0.0], &[0.0, 0.5, 0.5, 0.5]).unwrap(),
    )
    .unwrap();
    let re = rho_eta(&b, 2).unwrap();
    assert_eq!((re.rho[2], re.eta[2]), (1.0, 0.0));
    assert_eq!(re.zero_set, [2]);
}

fn suite_case(rng: &mut rand_chacha::ChaCha8Rng, k: usize) -> StructuredMatrix {
    let n = rng.random_range(2..=64);
    let (zd, zu) = match k % 5 {
        0 | 1 => (rng.random_range(1..4), 0),
        2 => (0, rng.random_range(1..3)),
        _ => (0, 0),
    };
    common::random_matrix(rng, n, zd, zu)
}

#[test]
fn random_suite_against_oracle() {
    let mut rng = common::rng(2024);
    for k in 0..200 {
        let b = suite_case(&mut rng, k);
        let n = b.size().unwrap();
        let oracle = dense_invert(&b.to_dense(n)).unwrap();
        let view = invert(&b, n, &InvertOptions::default()).unwrap_or_else(|e| panic!("case {k}: {e}"));
        let c = view.block();
        assert!(c.max_abs_diff(&oracle) < 1e-8, "case {k}");
        assert!(view.residual() < 1e-9, "case {k}");
        let g = view.row0();
        for j in 0..n {
            assert_eq!(view.gamma(j).unwrap() * view.first_column(), g[j]);
        }
    }
}

#[test]
fn three_way_consistency() {
    let mut rng = common::rng(99);
    for k in 0..60 {
        let b = common::random_matrix(&mut rng, 2 + k, 0, 0);
        let n = b.size().unwrap();
        let oracle = dense_invert(&b.to_dense(n)).unwrap();
        let parts = b.decompose().unwrap();
        let sm = sherman_morrison_invert(&dense_invert(&parts.tridiagonal.to_dense()).unwrap(), &parts.perturbation)
            .unwrap();
        let fast = invert(&b, n, &InvertOptions::default()).unwrap().block();
        assert!(sm.max_abs_diff(&oracle) < 1e-8);
        assert!(fast.max_abs_diff(&oracle) < 1e-8);
        assert!(fast.max_abs_diff(&sm) < 1e-8);
    }
}

#[test]
fn forward_scheme_on_small_matrices() {
    let mut rng = common::rng(5);
    for k in 0..60 {
        let n = 2 + k % 7;
        let b = common::random_matrix(&mut rng, n, k % 3, (k / 3) % 2);
        let oracle = dense_invert(&b.to_dense(n)).unwrap();
        let view = invert(&b, n, &InvertOptions::default().with_scheme(Scheme::Forward)).unwrap();
        assert!(view.block().max_abs_diff(&oracle) < 1e-8, "case {k}");
    }
}

#[test]
fn entry_counts_are_quadratic() {
    let spec = HomogeneousSpec::new(2.0, 1.0, 1.0, Extent::Infinite);
    let b = StructuredMatrix::from_homogeneous(&spec).unwrap();
    let counts: Vec<f64> = [64usize, 128, 256, 512]
        .iter()
        .map(|&n| invert(&b, n, &InvertOptions::default()).unwrap().ops() as f64)
        .collect();
    let slope = (counts[3] / counts[0]).ln() / 8f64.ln();
    assert!((slope - 2.0).abs() < 0.05, "{slope}");
}

#[test]
fn homogeneous_closed_forms() {
    let mut rng = common::rng(3);
    for _ in 0..50 {
        let (bd, bu, bz) = (rng.random_range(0.5..2.0), rng.random_range(0.5..2.0), rng.random_range(0.5..2.0));
        let spec = HomogeneousSpec::new(bd, bu, bz, Extent::Infinite);
        let c = hom_constants(&spec).unwrap();
        assert!((bd * c.gamma * c.gamma - spec.weight() * c.gamma + bu).abs() < 1e-13);
        assert!((bu * c.psi * c.psi - spec.weight() * c.psi + bd).abs() < 1e-13);
        assert!(c.gamma > 0.0 && c.gamma < 1.0 && c.psi > 0.0 && c.psi < 1.0);
        assert!(diagonal_gap(&spec, 400).unwrap() < 1e-8);

        let l = rng.random_range(2..=64);
        let finite = HomogeneousSpec::new(bd, bu, bz, Extent::Finite(l)).with_truncation(Truncation::Special);
        let b = StructuredMatrix::from_homogeneous(&finite).unwrap();
        let oracle = dense_invert(&b.to_dense(l)).unwrap();
        assert!(hom_finite_invert(&finite).unwrap().block().max_abs_diff(&oracle) < 1e-9);
        // the infinite inverse shares its leading block with the special truncation
        let inf = hom_invert(&spec, l, &InvertOptions::default()).unwrap();
        assert!(inf.block().max_abs_diff(&oracle) < 1e-9);
    }
}

#[test]
fn infinite_gamma1() {
    let mut rng = common::rng(4);
    for _ in 0..20 {
        let (bd, bu, bz) = (rng.random_range(0.2..3.0), rng.random_range(0.2..3.0), rng.random_range(0.1..2.0));
        let spec = HomogeneousSpec::new(bd, bu, bz, Extent::Infinite);
        let b = StructuredMatrix::from_homogeneous(&spec).unwrap();
        let g = gamma1(&b, &InvertOptions::default()).unwrap();
        assert!((g.value - hom_constants(&spec).unwrap().gamma).abs() < 1e-10);

        // inhomogeneous head, homogeneous tail from row 5
        let head: Vec<Rates> = (0..5)
            .map(|i| Rates::new(rng.random_range(0.2..3.0), rng.random_range(0.2..3.0), if i == 0 { 0.0 } else { 0.3 }))
            .collect();
        let tail = Rates::new(bd, bu, bz);
        let spec = BandSpec::infinite(move |i| if i < 5 { head[i] } else { tail }).with_homogeneous_tail(5);
        let b = StructuredMatrix::validate(spec).unwrap();
        let g = gamma1(&b, &InvertOptions::default()).unwrap();
        assert!(g.change < 1e-12);
    }
}
