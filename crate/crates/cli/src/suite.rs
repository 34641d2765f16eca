//! Seeded random instances shared by `selftest`, `bench` and the tests.

use bandinv::{BandSpec, Rates, StructuredMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Rows of a valid finite matrix with rates in `[0.1, 3)` and return rates in
/// `[0, 2)`. `zero_down` rows past 0 get `bd = 0` and `zero_up` interior rows
/// get `bu = 0`; the planted indices are returned.
pub fn random_rows(rng: &mut ChaCha8Rng, n: usize, zero_down: usize, zero_up: usize) -> (Vec<Rates>, Vec<usize>, Vec<usize>) {
    let mut rows: Vec<Rates> = (0..n)
        .map(|i| {
            Rates::new(
                rng.random_range(0.1..3.0),
                if i + 1 == n { 0.0 } else { rng.random_range(0.1..3.0) },
                if i == 0 { 0.0 } else { rng.random_range(0.0..2.0) },
            )
        })
        .collect();
    let mut downs = Vec::new();
    let mut ups = Vec::new();
    if n >= 2 {
        for _ in 0..zero_down {
            let i = rng.random_range(1..n);
            rows[i].down = 0.0;
            downs.push(i);
        }
    }
    if n >= 3 {
        for _ in 0..zero_up {
            let i = rng.random_range(1..n - 1);
            rows[i].up = 0.0;
            ups.push(i);
        }
    }
    for r in rows.iter_mut().skip(1) {
        if r.weight() == 0.0 {
            r.tozero = 0.5;
        }
    }
    downs.sort_unstable();
    downs.dedup();
    ups.sort_unstable();
    ups.dedup();
    (rows, downs, ups)
}

pub fn random_matrix(rng: &mut ChaCha8Rng, n: usize, zero_down: usize, zero_up: usize) -> StructuredMatrix {
    let (rows, _, _) = random_rows(rng, n, zero_down, zero_up);
    StructuredMatrix::validate(BandSpec::finite(rows)).expect("generated rows are valid")
}

#[derive(Debug, Clone)]
pub struct Case {
    pub matrix: StructuredMatrix,
    pub zero_down: Vec<usize>,
    pub zero_up: Vec<usize>,
}

/// `count` matrices of sizes 2 to 64: two in five with planted zero down
/// rates, one in five with planted zero up rates.
pub fn general_suite(seed: u64, count: usize) -> Vec<Case> {
    let mut rng = rng(seed);
    (0..count)
        .map(|k| {
            let (lo, zd, zu) = match k % 5 {
                0 | 1 => (2, rng.random_range(1..4), 0),
                2 => (3, 0, rng.random_range(1..3)),
                _ => (2, 0, 0),
            };
            let n = rng.random_range(lo..=64);
            let (rows, zero_down, zero_up) = random_rows(&mut rng, n, zd, zu);
            let matrix = StructuredMatrix::validate(BandSpec::finite(rows)).expect("generated rows are valid");
            Case { matrix, zero_down, zero_up }
        })
        .collect()
}

/// Generator of a chain on `n` states: `bd_0 = 0`, and return jumps only
/// when `column` is set.
pub fn random_generator(rng: &mut ChaCha8Rng, n: usize, column: bool) -> BandSpec {
    let rows = (0..n)
        .map(|i| {
            let down = if i == 0 { 0.0 } else { rng.random_range(0.1..3.0) };
            let up = if i + 1 == n { 0.0 } else { rng.random_range(0.1..3.0) };
            let tozero = if i >= 2 && column { rng.random_range(0.0..1.0) } else { 0.0 };
            Rates::new(down, up, tozero)
        })
        .collect();
    BandSpec::finite(rows)
}

pub fn random_triple(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> (f64, f64, f64) {
    (rng.random_range(lo..hi), rng.random_range(lo..hi), rng.random_range(lo..hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_mix() {
        let cases = general_suite(1, 200);
        assert!(cases.iter().filter(|c| !c.zero_down.is_empty()).count() >= 40);
        assert!(cases.iter().filter(|c| !c.zero_up.is_empty()).count() >= 20);
        assert!(cases.iter().all(|c| (2..=64).contains(&c.matrix.size().unwrap())));
    }

    #[test]
    fn deterministic() {
        let a = general_suite(9, 5);
        let b = general_suite(9, 5);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.matrix.spec().rows(), y.matrix.spec().rows());
        }
    }
}
