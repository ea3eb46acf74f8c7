//! Complex roots of real univariate polynomials.

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;

/// Roots of `Σ c[k] t^k` (coefficients low to high), polished by Newton steps.
///
/// Leading zeros are trimmed; the zero polynomial and constants have no roots.
pub fn real_poly_roots(c: &[f64]) -> Vec<Complex64> {
    let scale = c.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        return Vec::new();
    }
    let mut c: Vec<f64> = c.iter().map(|x| x / scale).collect();
    while c.last().is_some_and(|x| x.abs() < 1e-14) {
        c.pop();
    }
    let n = c.len().saturating_sub(1);
    if n == 0 {
        return Vec::new();
    }
    let lead = c[n];
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        m[(i, n - 1)] = -c[i] / lead;
    }
    let coeffs: Vec<Complex64> = c.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let eig: Vec<Complex64> = match Schur::try_new(m, f64::EPSILON, 500) {
        Some(schur) => schur.complex_eigenvalues().iter().copied().collect(),
        None => aberth(&coeffs),
    };
    eig.into_iter().map(|z| polish(&coeffs, z)).collect()
}

/// Simultaneous Aberth iteration, used when the Schur iteration stalls.
fn aberth(c: &[Complex64]) -> Vec<Complex64> {
    let n = c.len() - 1;
    let radius = 1.0
        + c[..n]
            .iter()
            .map(|z| z.norm() / c[n].norm())
            .fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(radius, 0.4 + std::f64::consts::TAU * k as f64 / n as f64))
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let (p, dp) = horner(c, z[i]);
            let ratio = p / dp;
            let repulse: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| 1.0 / (z[i] - z[j]))
                .sum();
            let step = ratio / (1.0 - ratio * repulse);
            if step.re.is_finite() && step.im.is_finite() {
                z[i] -= step;
                moved = moved.max(step.norm() / (1.0 + z[i].norm()));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

/// Evaluate `Σ c[k] t^k` and its derivative.
pub fn horner(c: &[Complex64], t: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &a in c.iter().rev() {
        dp = dp * t + p;
        p = p * t + a;
    }
    (p, dp)
}

fn polish(c: &[Complex64], mut z: Complex64) -> Complex64 {
    for _ in 0..4 {
        let (p, dp) = horner(c, z);
        if dp.norm() < 1e-300 {
            break;
        }
        let step = p / dp;
        let next = z - step;
        if !next.re.is_finite() || !next.im.is_finite() || horner(c, next).0.norm() > p.norm() {
            break;
        }
        z = next;
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_roots() {
        // (t − 1)(t − 2)(t + 3) = t³ − 7t + 6
        let mut r: Vec<f64> = real_poly_roots(&[6.0, -7.0, 0.0, 1.0])
            .iter()
            .map(|z| z.re)
            .collect();
        r.sort_by(f64::total_cmp);
        for (a, b) in r.iter().zip([-3.0, 1.0, 2.0]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn complex_pair() {
        let r = real_poly_roots(&[1.0, 0.0, 1.0]);
        assert_eq!(r.len(), 2);
        for z in r {
            assert!(z.re.abs() < 1e-12 && (z.im.abs() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn aberth_agrees() {
        let c: Vec<Complex64> = [6.0, -7.0, 0.0, 1.0]
            .iter()
            .map(|&x| Complex64::new(x, 0.0))
            .collect();
        let mut r: Vec<f64> = aberth(&c).iter().map(|z| z.re).collect();
        r.sort_by(f64::total_cmp);
        for (a, b) in r.iter().zip([-3.0, 1.0, 2.0]) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn trims_leading_zeros() {
        assert_eq!(real_poly_roots(&[2.0, 1.0, 0.0, 0.0]).len(), 1);
        assert!(real_poly_roots(&[3.0]).is_empty());
    }
}
