//! The scalar `alpha_i` of each update: a root of
//! `f_i(y) = 1 - y - y sum_{j>i} c_j(0) / (lambda_j - lambda_i - y c_i(0))`.

use alloc::vec;
use alloc::vec::Vec;

use libm::fabs;
use num_complex::Complex64;

use crate::error::{Error, Result};

use super::update::EigState;

const SAMPLES: usize = 256;

/// `f_i(y)` for a real state.
pub fn f_value(state: &EigState, i: usize, y: f64) -> f64 {
    let li = state.lambda[i].re;
    let ci = state.first[i].re;
    let mut sum = 0.0;
    for j in i + 1..state.len() {
        sum += state.first[j].re / (state.lambda[j].re - li - y * ci);
    }
    1.0 - y - y * sum
}

/// Picks `alpha_i` for stage `i = state.stage`: the smallest positive real
/// root of `f_i` when one exists, otherwise the root of the cleared
/// polynomial with the smallest imaginary part (then smallest modulus).
pub fn solve_alpha(state: &EigState) -> Result<Complex64> {
    let i = state.stage;
    if i + 1 >= state.len() {
        // empty sum: f(y) = 1 - y
        return Ok(Complex64::new(1.0, 0.0));
    }
    if state.is_real() {
        if let Some(y) = smallest_positive_root(state, i) {
            return Ok(Complex64::new(y, 0.0));
        }
    }
    polynomial_root(state, i)
}

fn bisect(state: &EigState, i: usize, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f_value(state, i, a);
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let fm = f_value(state, i, mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

fn first_sign_change(state: &EigState, i: usize, points: &[f64]) -> Option<f64> {
    let mut prev: Option<(f64, f64)> = None;
    for &y in points {
        let fy = f_value(state, i, y);
        if !fy.is_finite() {
            prev = None;
            continue;
        }
        if fy == 0.0 {
            return Some(y);
        }
        if let Some((py, pf)) = prev {
            if (pf < 0.0) != (fy < 0.0) {
                return Some(bisect(state, i, py, y));
            }
        }
        prev = Some((y, fy));
    }
    None
}

fn smallest_positive_root(state: &EigState, i: usize) -> Option<f64> {
    let li = state.lambda[i].re;
    let ci = state.first[i].re;
    let mut poles: Vec<f64> = (i + 1..state.len())
        .filter(|&j| state.first[j].re != 0.0)
        .map(|j| (state.lambda[j].re - li) / ci)
        .filter(|p| *p > 0.0 && p.is_finite())
        .collect();
    poles.sort_by(f64::total_cmp);
    poles.dedup();
    let mut left = 0.0;
    let edge = 1e-12;
    for &pole in &poles {
        let width = pole - left;
        let mut pts = vec![left + if left == 0.0 { 0.0 } else { width * edge }];
        pts.extend((1..SAMPLES).map(|k| left + width * k as f64 / SAMPLES as f64));
        pts.push(pole - width * edge);
        if let Some(y) = first_sign_change(state, i, &pts) {
            return Some(y);
        }
        left = pole;
    }
    // last interval runs to infinity, where f tends to -infinity
    let start = if left == 0.0 { 0.0 } else { left * (1.0 + edge) };
    let mut hi = left.max(1.0) * 2.0;
    let mut guard = 0;
    while f_value(state, i, hi) >= 0.0 && guard < 2000 {
        hi *= 2.0;
        guard += 1;
    }
    let mut pts = vec![start];
    let span = hi - start;
    pts.extend((1..=SAMPLES).map(|k| start + span * k as f64 / SAMPLES as f64));
    first_sign_change(state, i, &pts)
}

/// Coefficients (ascending powers) of `f_i` with denominators cleared:
/// `(1 - y) prod_j (g_j - y c) - y sum_j a_j prod_{k != j} (g_k - y c)`.
fn cleared_polynomial(state: &EigState, i: usize) -> Vec<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    let li = state.lambda[i];
    let c = state.first[i];
    let js: Vec<usize> = (i + 1..state.len()).collect();
    let factor = |j: usize| [state.lambda[j] - li, -c];
    let mul = |p: &[Complex64], f: [Complex64; 2]| {
        let mut out = vec![Complex64::new(0.0, 0.0); p.len() + 1];
        for (k, &a) in p.iter().enumerate() {
            out[k] += a * f[0];
            out[k + 1] += a * f[1];
        }
        out
    };
    let mut all = vec![one];
    for &j in &js {
        all = mul(&all, factor(j));
    }
    let mut poly = mul(&all, [one, -one]);
    for &j in &js {
        let mut rest = vec![one];
        for &k in &js {
            if k != j {
                rest = mul(&rest, factor(k));
            }
        }
        // - y a_j rest
        let a = state.first[j];
        for (k, &r) in rest.iter().enumerate() {
            poly[k + 1] -= a * r;
        }
    }
    while poly.len() > 1 && poly.last().is_some_and(|z| z.norm() == 0.0) {
        poly.pop();
    }
    poly
}

fn horner(p: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut v = Complex64::new(0.0, 0.0);
    let mut d = Complex64::new(0.0, 0.0);
    for &a in p.iter().rev() {
        d = d * z + v;
        v = v * z + a;
    }
    (v, d)
}

/// All roots of a polynomial by the Aberth-Ehrlich iteration.
pub fn polynomial_roots(p: &[Complex64]) -> Result<Vec<Complex64>> {
    let deg = p.len().saturating_sub(1);
    if deg == 0 {
        return Ok(Vec::new());
    }
    let lead = p[deg];
    let radius = 1.0 + p[..deg].iter().fold(0.0f64, |m, a| m.max((a / lead).norm()));
    let mut z: Vec<Complex64> = (0..deg)
        .map(|k| {
            let t = 2.0 * core::f64::consts::PI * k as f64 / deg as f64 + 0.4;
            Complex64::from_polar(radius * 0.5, t)
        })
        .collect();
    for _ in 0..1000 {
        let mut moved: f64 = 0.0;
        for k in 0..deg {
            let (v, d) = horner(p, z[k]);
            if v.norm() == 0.0 {
                continue;
            }
            let ratio = v / d;
            let mut repulse = Complex64::new(0.0, 0.0);
            for j in 0..deg {
                if j != k {
                    repulse += (z[k] - z[j]).inv();
                }
            }
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulse);
            if step.is_finite() {
                z[k] -= step;
                moved = moved.max(step.norm() / (1.0 + z[k].norm()));
            }
        }
        if moved < 1e-15 {
            return Ok(z);
        }
    }
    let worst = z.iter().fold(0.0f64, |m, &x| m.max(horner(p, x).0.norm()));
    let scale = p.iter().fold(0.0f64, |m, a| m.max(a.norm()));
    if worst <= 1e-8 * scale {
        Ok(z)
    } else {
        Err(Error::NoRootFound { stage: 0 })
    }
}

fn polynomial_root(state: &EigState, i: usize) -> Result<Complex64> {
    let poly = cleared_polynomial(state, i);
    let roots = polynomial_roots(&poly).map_err(|_| Error::NoRootFound { stage: i })?;
    let li = state.lambda[i];
    let c = state.first[i];
    let usable = roots.into_iter().filter(|y| {
        // not on a pole of f
        (i + 1..state.len()).all(|j| {
            let gap = state.lambda[j] - li;
            (gap - y * c).norm() > 1e-12 * (gap.norm() + (y * c).norm())
        })
    });
    let mut best: Option<Complex64> = None;
    for y in usable {
        let realish = fabs(y.im) <= 1e-10 * (1.0 + y.norm());
        let y = if realish { Complex64::new(y.re, 0.0) } else { y };
        best = Some(match best {
            None => y,
            Some(b) => {
                let kb = (fabs(b.im), b.norm());
                let ky = (fabs(y.im), y.norm());
                if ky < kb {
                    y
                } else {
                    b
                }
            }
        });
    }
    best.ok_or(Error::NoRootFound { stage: i })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn last_stage_is_one() {
        let s = EigState::new(&[-3.0, -1.0], &[0.5, 0.25]);
        let s1 = EigState { stage: 1, ..s };
        assert_eq!(solve_alpha(&s1).unwrap(), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn real_root_solves_f() {
        let s = EigState::new(&[-5.0, -3.0, -1.0], &[-0.4, 0.3, 0.2]);
        let a = solve_alpha(&s).unwrap();
        assert_eq!(a.im, 0.0);
        assert!(a.re > 0.0);
        assert!(f_value(&s, 0, a.re).abs() < 1e-12);
    }

    #[test]
    fn aberth_quadratic() {
        // y^2 + 1
        let p = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)];
        let mut r = polynomial_roots(&p).unwrap();
        r.sort_by(|a, b| a.im.total_cmp(&b.im));
        assert!((r[0] - Complex64::new(0.0, -1.0)).norm() < 1e-14);
        assert!((r[1] - Complex64::new(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn polynomial_agrees_with_f() {
        let s = EigState::new(&[-5.0, -3.0, -1.0], &[-0.4, 0.3, 0.2]);
        let p = cleared_polynomial(&s, 0);
        assert_eq!(p.len(), 4);
        for y in [0.3, 1.7, -2.0] {
            let denom: f64 = [2.0 - y * -0.4, 4.0 - y * -0.4].iter().product();
            let expect = f_value(&s, 0, y) * denom;
            assert!((horner(&p, Complex64::new(y, 0.0)).0.re - expect).abs() < 1e-12);
        }
    }
}
