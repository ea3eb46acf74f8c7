//! Spherical-linkage embedding of quads and of a four-quad mesh state.
//!
//! Quad i has vertices P0 (the α vertex), P1 (the β vertex), P2, P3 with arcs
//! λ = P0P1, δ = P1P2, μ = P2P3, γ = P3P0. Odd quads turn counterclockwise
//! about the outward normal, even quads clockwise.

use std::fmt::Write as _;

use nalgebra::Vector3;
use serde::Serialize;
use thiserror::Error;

use crate::bricard::{angles_from_coeffs, BricardCoeffs, GapAngles, QuadAngles};
use crate::matching::MeshSpec;
use crate::trace::FlexState;

pub type Vec3 = Vector3<f64>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EmbedError {
    #[error("quad {0}: no real arc lengths for these coefficients")]
    NoAngles(usize),
    #[error("state has non-real coordinates")]
    Complex,
}

/// Rotate tangent `t` about the unit point `p` by `ang` (counterclockwise seen from outside).
fn rotate(p: &Vec3, t: &Vec3, ang: f64) -> Vec3 {
    t * ang.cos() + p.cross(t) * ang.sin()
}

/// Walk from `p` along tangent `t` by arc length `arc`.
fn advance(p: &Vec3, t: &Vec3, arc: f64) -> Vec3 {
    p * arc.cos() + t * arc.sin()
}

/// Unit tangent at `p` pointing toward `q`.
fn toward(p: &Vec3, q: &Vec3) -> Vec3 {
    (q - p * p.dot(q)).normalize()
}

fn arc_between(p: &Vec3, q: &Vec3) -> f64 {
    p.cross(q).norm().atan2(p.dot(q))
}

/// Signed angle at `p` from tangent `u` to tangent `v`, counterclockwise, in (−π, π].
fn signed_angle(p: &Vec3, u: &Vec3, v: &Vec3) -> f64 {
    p.dot(&u.cross(v)).atan2(u.dot(v))
}

fn wrap(a: f64) -> f64 {
    let t = std::f64::consts::TAU;
    let r = a.rem_euclid(t);
    if r > std::f64::consts::PI {
        r - t
    } else {
        r
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadEmbedding {
    /// P0, P1, P2, P3.
    pub vertices: [[f64; 3]; 4],
    pub angles: QuadAngles,
    /// +1 counterclockwise, −1 mirrored.
    pub orientation: i8,
    /// |∠P2P3 − μ|.
    pub residual: f64,
}

impl QuadEmbedding {
    fn v(&self, i: usize) -> Vec3 {
        Vec3::from(self.vertices[i])
    }

    /// (α, β) read back from the vertex positions.
    pub fn measured_angles(&self) -> (f64, f64) {
        let (p0, p1, p2, p3) = (self.v(0), self.v(1), self.v(2), self.v(3));
        let s = f64::from(self.orientation);
        let alpha = signed_angle(&p0, &toward(&p0, &p1), &toward(&p0, &p3)) * s;
        let beta = -signed_angle(&p1, &toward(&p1, &p0), &toward(&p1, &p2)) * s;
        (alpha, beta)
    }

    /// Arcs `(from, to, length)` in the order λ, δ, μ, γ.
    pub fn arcs(&self) -> [(usize, usize, f64); 4] {
        let a = self.angles;
        [
            (0, 1, a.lambda),
            (1, 2, a.delta),
            (2, 3, a.mu),
            (3, 0, a.gamma),
        ]
    }
}

fn place_quad(
    q: &QuadAngles,
    p0: &Vec3,
    lambda_dir: &Vec3,
    alpha: f64,
    beta: f64,
    s: f64,
) -> (QuadEmbedding, Vec3, Vec3) {
    let gamma_dir = rotate(p0, lambda_dir, s * alpha);
    let p1 = advance(p0, lambda_dir, q.lambda);
    let back = toward(&p1, p0);
    let delta_dir = rotate(&p1, &back, -s * beta);
    let p3 = advance(p0, &gamma_dir, q.gamma);
    let p2 = advance(&p1, &delta_dir, q.delta);
    let residual = (arc_between(&p2, &p3) - q.mu).abs();
    let e = QuadEmbedding {
        vertices: [p0, &p1, &p2, &p3].map(|v| [v.x, v.y, v.z]),
        angles: *q,
        orientation: s as i8,
        residual,
    };
    (e, back, delta_dir)
}

/// Embed one quad at the north pole with λ along +x; `alpha`, `beta` are the
/// interior angles at P0 and P1.
pub fn embed_quad(q: &QuadAngles, alpha: f64, beta: f64) -> QuadEmbedding {
    place_quad(q, &Vec3::z(), &Vec3::x(), alpha, beta, 1.0).0
}

/// `|g(x, y)| / ((1 + x²)(1 + y²))` with coefficients scaled to unit max-abs.
pub fn bricard_residual(g: &BricardCoeffs<f64>, x: f64, y: f64) -> f64 {
    let scale = g.as_array().iter().fold(1.0f64, |m, v| m.max(v.abs()));
    (g.eval(&x, &y) / scale).abs() / ((1.0 + x * x) * (1.0 + y * y))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinkageEmbedding {
    pub quads: [QuadEmbedding; 4],
    pub splits: [GapAngles; 4],
    /// Angle mismatch of γ_{i+1} computed from β_i and from α_{i+1}.
    pub relation_residuals: [f64; 4],
    /// Max of quad closures and angle relations.
    pub local_residual: f64,
    /// Closure of the central chain v0 -> v1 -> v2 -> v3 -> v0.
    pub loop_residual: f64,
    pub residual: f64,
}

impl LinkageEmbedding {
    /// 64-segment polylines of the 16 arcs as OBJ.
    pub fn to_obj(&self) -> String {
        const SEG: usize = 64;
        let mut out = String::from("# spherical linkage: 4 quads, 16 arcs\n");
        let mut next = 1usize;
        for (qi, q) in self.quads.iter().enumerate() {
            for (name, (i, j, _)) in ["lambda", "delta", "mu", "gamma"].iter().zip(q.arcs()) {
                let (p, r) = (q.v(i), q.v(j));
                let _ = writeln!(out, "o quad{}_{}", qi + 1, name);
                let omega = arc_between(&p, &r);
                let t = if omega > 1e-12 {
                    toward(&p, &r)
                } else {
                    Vec3::zeros()
                };
                for k in 0..=SEG {
                    let v = advance(&p, &t, omega * k as f64 / SEG as f64);
                    let _ = writeln!(out, "v {:.12} {:.12} {:.12}", v.x, v.y, v.z);
                }
                let idx: Vec<String> = (next..=next + SEG).map(|k| k.to_string()).collect();
                let _ = writeln!(out, "l {}", idx.join(" "));
                next += SEG + 1;
            }
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("embedding serializes")
    }
}

/// Chain the four quads around the central vertices using the state's angles
/// and the gap splits.
pub fn embed_linkage(
    angles: &[QuadAngles; 4],
    state: &FlexState,
    splits: &[GapAngles; 4],
) -> Result<LinkageEmbedding, EmbedError> {
    if !state.is_real() {
        return Err(EmbedError::Complex);
    }
    let (alpha, beta) = state.angles();
    let v0 = Vec3::z();
    let l0 = Vec3::x();
    let (mut p0, mut ldir) = (v0, l0);
    let mut quads = Vec::with_capacity(4);
    let mut relation = [0.0; 4];
    let mut incoming_gamma: Option<Vec3> = None;
    for i in 0..4 {
        let s = if i % 2 == 0 { 1.0 } else { -1.0 };
        let (e, back, delta_dir) = place_quad(&angles[i], &p0, &ldir, alpha[i], beta[i], s);
        if let Some(g) = incoming_gamma {
            let here = rotate(&p0, &ldir, s * alpha[i]);
            relation[i - 1] = wrap(signed_angle(&p0, &g, &here)).abs();
        }
        let p1 = Vec3::from(e.vertices[1]);
        let GapAngles { tau, zeta } = splits[i];
        let next_l = rotate(&p1, &-back, -s * tau);
        let next_g = rotate(&p1, &-delta_dir, s * zeta);
        // Relation β_i ≡ α_{i+1} + τ_i + ζ_i checked in the frame at v_i.
        if i == 3 {
            let here = rotate(&p1, &next_l, alpha[0]);
            relation[3] = wrap(signed_angle(&p1, &next_g, &here)).abs();
        }
        incoming_gamma = Some(next_g);
        quads.push(e);
        p0 = p1;
        ldir = next_l;
    }
    let quads: [QuadEmbedding; 4] = quads.try_into().expect("four quads");
    let loop_residual = arc_between(&p0, &v0).max((ldir - l0).norm());
    let local_residual = quads
        .iter()
        .map(|q| q.residual)
        .chain(relation)
        .fold(0.0, f64::max);
    Ok(LinkageEmbedding {
        quads,
        splits: *splits,
        relation_residuals: relation,
        local_residual,
        loop_residual,
        residual: local_residual.max(loop_residual),
    })
}

/// Arc lengths of every quad: the mesh's own, else recovered from coefficients.
pub fn mesh_angles(m: &MeshSpec<f64>) -> Result<[QuadAngles; 4], EmbedError> {
    if let Some(a) = m.angles {
        return Ok(a);
    }
    let mut out = [QuadAngles {
        lambda: 0.0,
        gamma: 0.0,
        mu: 0.0,
        delta: 0.0,
    }; 4];
    for (i, g) in m.quads.iter().enumerate() {
        out[i] = angles_from_coeffs(g)
            .ok_or(EmbedError::NoAngles(i + 1))?
            .angles;
    }
    Ok(out)
}

/// The mesh's gap splits, else τ = 2 atan F, ζ = 0.
pub fn mesh_splits(m: &MeshSpec<f64>) -> [GapAngles; 4] {
    m.splits
        .unwrap_or_else(|| std::array::from_fn(|i| GapAngles::default_for(&m.gaps[i])))
}

pub fn embed_mesh_state(
    m: &MeshSpec<f64>,
    state: &FlexState,
) -> Result<LinkageEmbedding, EmbedError> {
    embed_linkage(&mesh_angles(m)?, state, &mesh_splits(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bricard::coeffs_from_angles;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3};

    #[test]
    fn octant_quad_closes() {
        let q = QuadAngles {
            lambda: FRAC_PI_2,
            gamma: FRAC_PI_2,
            mu: FRAC_PI_2,
            delta: FRAC_PI_2,
        };
        // g = xy: α = π/2 forces β = 0.
        let e = embed_quad(&q, FRAC_PI_2, 0.0);
        assert!(e.residual < 1e-15);
        let (a, b) = e.measured_angles();
        assert!((a - FRAC_PI_2).abs() < 1e-15 && b.abs() < 1e-15);
        assert!(embed_quad(&q, FRAC_PI_2, FRAC_PI_2).residual > 1.0);
    }

    #[test]
    fn isogram_on_and_off_curve() {
        let q = QuadAngles {
            lambda: FRAC_PI_2,
            gamma: FRAC_PI_3,
            mu: FRAC_PI_2,
            delta: FRAC_PI_3,
        };
        let g = coeffs_from_angles(&q).unwrap();
        let s = 3f64.sqrt() / 6.0;
        assert!(
            (g.a + s).abs() < 1e-15
                && g.b.abs() < 1e-15
                && g.c.abs() < 1e-15
                && (g.e - s).abs() < 1e-15
        );
        let y = 0.7f64;
        // (a y²) x² + y x + e = 0
        let (qa, qb, qc) = (g.a * y * y, y, g.e);
        let x = (-qb + (qb * qb - 4.0 * qa * qc).sqrt()) / (2.0 * qa);
        let (alpha, beta) = (2.0 * x.atan(), 2.0 * y.atan());
        assert!(embed_quad(&q, alpha, beta).residual < 1e-10);
        assert!(embed_quad(&q, alpha + 0.1, beta).residual > 1e-3);
    }

    #[test]
    fn obj_has_sixteen_arcs() {
        let q = QuadAngles {
            lambda: FRAC_PI_2,
            gamma: FRAC_PI_2,
            mu: FRAC_PI_2,
            delta: FRAC_PI_2,
        };
        let c = num_complex::Complex64::new(1.0, 0.0);
        let state = FlexState {
            step: 0,
            alpha1: FRAC_PI_2,
            x: [c; 4],
            y: [c; 4],
            residual: 0.0,
            branch: 0,
        };
        let split = GapAngles {
            tau: 0.0,
            zeta: 0.0,
        };
        let e = embed_linkage(&[q; 4], &state, &[split; 4]).unwrap();
        assert!(e.loop_residual < 1e-12);
        let obj = e.to_obj();
        assert_eq!(obj.lines().filter(|l| l.starts_with("l ")).count(), 16);
        assert_eq!(obj.lines().filter(|l| l.starts_with("v ")).count(), 16 * 65);
    }
}
