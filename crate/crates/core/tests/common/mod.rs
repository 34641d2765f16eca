#![allow(dead_code)]

use bandinv::{BandSpec, StructuredMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random finite matrix with `n` rows and rates in `[0.1, 3)`. `zero_down`
/// and `zero_up` plant that many zero rates at random interior rows.
pub fn random_matrix(rng: &mut ChaCha8Rng, n: usize, zero_down: usize, zero_up: usize) -> StructuredMatrix {
    let mut down: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..3.0)).collect();
    let mut up: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..3.0)).collect();
    let mut tozero: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..2.0)).collect();
    tozero[0] = 0.0;
    up[n - 1] = 0.0;
    if n > 2 {
        for _ in 0..zero_down {
            down[rng.random_range(1..n)] = 0.0;
        }
        for _ in 0..zero_up {
            up[rng.random_range(1..n - 1)] = 0.0;
        }
    }
    // keep every row weight positive
    for i in 1..n {
        if down[i] + up[i] + tozero[i] == 0.0 {
            tozero[i] = 0.5;
        }
    }
    StructuredMatrix::validate(BandSpec::from_arrays(&down, &up, &tozero).unwrap()).unwrap()
}
