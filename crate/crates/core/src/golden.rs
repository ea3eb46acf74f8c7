//! Published non-planar flexible mesh (class PQ+IQ) used as golden data.

use crate::bricard::{BricardCoeffs, GapAngles, QuadAngles};
use crate::matching::MeshSpec;
use crate::mobius::ProjReal;

/// The root of `(n + 1)⁴ + n = 0` in (−1, 0), by bisection.
pub fn n0() -> f64 {
    let f = |n: f64| (n + 1.0).powi(4) + n;
    let (mut lo, mut hi) = (-1.0f64, 0.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `(λ, γ, μ, δ, τ, ζ)` per quad, six decimals.
pub const PHYSICAL_TABLE: [[f64; 6]; 4] = [
    [1.679854, 2.301666, 1.973198, 2.860453, 1.558808, -1.558808],
    [1.679854, 2.860453, 1.973198, 2.301666, 0.694319, -0.694319],
    [2.278478, 2.628901, 1.570796, 1.570796, 1.164528, 0.406268],
    [2.003527, 1.570796, 1.570796, 2.335389, 0.907881, -0.907881],
];

pub fn physical_angles() -> [QuadAngles; 4] {
    PHYSICAL_TABLE.map(|r| QuadAngles {
        lambda: r[0],
        gamma: r[1],
        mu: r[2],
        delta: r[3],
    })
}

pub fn physical_splits() -> [GapAngles; 4] {
    PHYSICAL_TABLE.map(|r| GapAngles {
        tau: r[4],
        zeta: r[5],
    })
}

/// Closed-form coefficients.
pub fn physical_coeffs() -> [BricardCoeffs<f64>; 4] {
    let n = n0();
    let s = (n + 1.0) * (n + 1.0);
    let d4 = 8.0 * n * n + 12.0 * n + 12.0;
    let d4b = 4.0 * n * n + 6.0 * n + 6.0;
    [
        BricardCoeffs::new(1.5, 1.0, n, -2.0 / 3.0),
        BricardCoeffs::new(1.5, n, 1.0, -2.0 / 3.0),
        BricardCoeffs::new(0.5, -0.5, s / 3.0, -s / 3.0),
        BricardCoeffs::new(3.0 / d4, s / d4b, -3.0 / d4, -s / d4b),
    ]
}

pub fn physical_gaps() -> [ProjReal<f64>; 4] {
    [
        ProjReal::zero(),
        ProjReal::zero(),
        ProjReal::Finite(1.0),
        ProjReal::zero(),
    ]
}

/// Closed-form mesh with the published angles and gap splits attached.
pub fn physical_mesh() -> MeshSpec<f64> {
    let mut m = MeshSpec::new(physical_coeffs(), physical_gaps());
    m.angles = Some(physical_angles());
    m.splits = Some(physical_splits());
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bricard::coeffs_from_angles;

    #[test]
    fn n0_root() {
        let n = n0();
        assert!(((n + 1.0).powi(4) + n).abs() < 1e-15);
        assert!((n + 0.275_508_040_999_484_4).abs() < 1e-14);
    }

    #[test]
    fn angle_table_reproduces_coefficients() {
        for (q, g) in physical_angles().iter().zip(physical_coeffs()) {
            let h = coeffs_from_angles(q).unwrap();
            for (x, y) in h.as_array().iter().zip(g.as_array()) {
                assert!((x - y).abs() < 1e-5, "{x} vs {y}");
            }
        }
        for (s, f) in physical_splits().iter().zip(physical_gaps()) {
            let g = s.gap();
            match (g, f) {
                (ProjReal::Finite(a), ProjReal::Finite(b)) => assert!((a - b).abs() < 1e-5),
                _ => panic!("unexpected infinite gap"),
            }
        }
    }
}
