//! Numeric flexion tracing: sweep α1, solve the quadratic chain, check closure.

use std::fmt::Write as _;

use num_complex::Complex64 as C;
use thiserror::Error;

use crate::bricard::eliminate_gap;
use crate::matching::{is_flexible, MatchError, MeshSpec};
use crate::mobius::{Mobius, ProjReal};
use crate::poly::Var;
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TraceError {
    #[error("mesh is rigid: {0}")]
    Rigid(String),
    #[error(transparent)]
    Match(#[from] MatchError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceOptions {
    /// Sweep interval for α1 (endpoints included).
    pub alpha_range: (f64, f64),
    pub steps: usize,
    pub real_only: bool,
    /// Acceptance bound on the normalized closure residual.
    pub tol: f64,
}

impl Default for TraceOptions {
    fn default() -> Self {
        TraceOptions {
            alpha_range: (0.05, std::f64::consts::PI - 0.05),
            steps: 400,
            real_only: false,
            tol: 1e-8,
        }
    }
}

/// One solution of the four-quad system.
#[derive(Debug, Clone, PartialEq)]
pub struct FlexState {
    pub step: usize,
    pub alpha1: f64,
    pub x: [C; 4],
    pub y: [C; 4],
    /// Max normalized |g̃i| over the four quads.
    pub residual: f64,
    pub branch: usize,
}

impl FlexState {
    pub fn is_real(&self) -> bool {
        self.x.iter().chain(&self.y).all(|z| is_real(*z))
    }

    pub fn real_x(&self) -> [f64; 4] {
        self.x.map(|z| z.re)
    }

    /// Dihedral angles `αi = 2 atan(xi)`, `βi = 2 atan(yi)` (real parts).
    pub fn angles(&self) -> ([f64; 4], [f64; 4]) {
        (
            self.x.map(|z| 2.0 * z.re.atan()),
            self.y.map(|z| 2.0 * z.re.atan()),
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlexTrace {
    pub branch: usize,
    pub real_only: bool,
    pub states: Vec<FlexState>,
}

/// A sweep point (or chain) dropped because a leading coefficient vanished or
/// a coordinate reached infinity.
#[derive(Debug, Clone, PartialEq)]
pub struct Skip {
    pub step: usize,
    pub alpha1: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TraceReport {
    pub traces: Vec<FlexTrace>,
    pub skipped: Vec<Skip>,
    pub diagnostic: Option<String>,
}

impl TraceReport {
    pub fn accepted(&self) -> usize {
        self.traces.iter().map(|t| t.states.len()).sum()
    }

    pub fn states(&self) -> impl Iterator<Item = &FlexState> {
        self.traces.iter().flat_map(|t| &t.states)
    }

    /// States ordered by sweep step, then branch.
    pub fn sorted_states(&self) -> Vec<&FlexState> {
        let mut v: Vec<&FlexState> = self.states().collect();
        v.sort_by_key(|s| (s.step, s.branch));
        v
    }

    /// `step,alpha1,x1,x2,x3,x4,residual,branch`; complex values as `re+imi`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,alpha1,x1,x2,x3,x4,residual,branch\n");
        for s in self.sorted_states() {
            let xs: Vec<String> = s.x.iter().map(|z| fmt_complex(*z)).collect();
            let _ = writeln!(
                out,
                "{},{:.17e},{},{:.17e},{}",
                s.step,
                s.alpha1,
                xs.join(","),
                s.residual,
                s.branch
            );
        }
        out
    }
}

fn fmt_complex(z: C) -> String {
    if z.im == 0.0 {
        format!("{:.17e}", z.re)
    } else {
        format!("{:.17e}{:+.17e}i", z.re, z.im)
    }
}

fn is_real(z: C) -> bool {
    z.im.abs() <= 1e-9 * (1.0 + z.re.abs())
}

/// Spherical chordal distance on the projective line.
pub fn chordal(z: C, w: C) -> f64 {
    2.0 * (z - w).norm() / ((1.0 + z.norm_sqr()) * (1.0 + w.norm_sqr())).sqrt()
}

/// Coefficients `q[i][j]` of `x^i x'^j`, scaled to unit max-abs.
type Grid = [[f64; 3]; 3];

fn normalized_grid(m: &MeshSpec<f64>, i: usize) -> Grid {
    let p = eliminate_gap(m.quad(i), m.gap(i), (Var::x(i), Var::x(i + 1)));
    let mut g = [[0.0; 3]; 3];
    for (a, row) in g.iter_mut().enumerate() {
        for (b, v) in row.iter_mut().enumerate() {
            *v = p.coeff(a, b);
        }
    }
    let scale = g.iter().flatten().fold(0.0f64, |s, v| s.max(v.abs()));
    if scale > 0.0 {
        g.iter_mut().flatten().for_each(|v| *v /= scale);
    }
    g
}

fn horner3(c: [C; 3], t: C) -> C {
    (c[2] * t + c[1]) * t + c[0]
}

/// Normalized residual `|g̃(x, x')| / ((1 + |x|²)(1 + |x'|²))`.
fn residual(g: &Grid, x: C, xp: C) -> f64 {
    let rows: [C; 3] =
        std::array::from_fn(|i| horner3([g[i][0], g[i][1], g[i][2]].map(C::from), xp));
    horner3(rows, x).norm() / ((1.0 + x.norm_sqr()) * (1.0 + xp.norm_sqr()))
}

/// Roots in `x'` of `g̃(x, x')`; `None` when the leading coefficient vanishes.
fn solve_next(g: &Grid, x: C) -> Option<[C; 2]> {
    let col = |j: usize| horner3([g[0][j], g[1][j], g[2][j]].map(C::from), x);
    let (a, b, c) = (col(2), col(1), col(0));
    let scale = a.norm().max(b.norm()).max(c.norm());
    if scale == 0.0 || a.norm() <= 1e-12 * scale {
        return None;
    }
    let sd = (b * b - 4.0 * a * c).sqrt();
    let sd = if (b.conj() * sd).re >= 0.0 { sd } else { -sd };
    let q = -0.5 * (b + sd);
    if q.norm() == 0.0 {
        return Some([C::new(0.0, 0.0); 2]);
    }
    Some([q / a, c / q])
}

/// `y` with `H(y, x') = 0`.
fn y_from_next(f: &ProjReal<f64>, xp: C) -> C {
    match f {
        ProjReal::Infinity => -1.0 / xp,
        ProjReal::Finite(f) => (xp + f) / (1.0 - f * xp),
    }
}

fn state_distance(a: &FlexState, b: &FlexState) -> f64 {
    (0..4).map(|i| chordal(a.x[i], b.x[i])).fold(0.0, f64::max)
}

fn lex_key(s: &FlexState) -> [f64; 8] {
    let mut k = [0.0; 8];
    for i in 0..4 {
        k[2 * i] = s.x[i].re;
        k[2 * i + 1] = s.x[i].im;
    }
    k
}

fn cmp_lex(a: &FlexState, b: &FlexState) -> std::cmp::Ordering {
    let (ka, kb) = (lex_key(a), lex_key(b));
    ka.iter()
        .zip(&kb)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(std::cmp::Ordering::Equal)
}

/// All chain solutions at one sweep value.
fn solve_point(
    grids: &[Grid; 4],
    m: &MeshSpec<f64>,
    step: usize,
    alpha1: f64,
    opts: &TraceOptions,
    skips: &mut Vec<Skip>,
) -> Vec<FlexState> {
    let x1 = C::new((alpha1 / 2.0).tan(), 0.0);
    let mut out: Vec<FlexState> = Vec::new();
    let mut skip = |reason: String| {
        skips.push(Skip {
            step,
            alpha1,
            reason,
        })
    };
    if !x1.re.is_finite() || x1.norm() > 1e12 {
        skip("x1 at infinity".into());
        return out;
    }
    let Some(r2) = solve_next(&grids[0], x1) else {
        skip("leading coefficient of quad 1 vanishes".into());
        return out;
    };
    for x2 in r2 {
        let Some(r3) = solve_next(&grids[1], x2) else {
            skip("leading coefficient of quad 2 vanishes".into());
            continue;
        };
        for x3 in r3 {
            let Some(r4) = solve_next(&grids[2], x3) else {
                skip("leading coefficient of quad 3 vanishes".into());
                continue;
            };
            for x4 in r4 {
                let x = [x1, x2, x3, x4];
                if x.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                    skip("chain reached infinity".into());
                    continue;
                }
                let res = (0..4)
                    .map(|i| residual(&grids[i], x[i], x[(i + 1) % 4]))
                    .fold(0.0, f64::max);
                if res > opts.tol {
                    continue;
                }
                let y: [C; 4] = std::array::from_fn(|i| y_from_next(m.gap(i + 1), x[(i + 1) % 4]));
                let s = FlexState {
                    step,
                    alpha1,
                    x,
                    y,
                    residual: res,
                    branch: 0,
                };
                if opts.real_only && !s.is_real() {
                    continue;
                }
                if out.iter().any(|o| state_distance(o, &s) < 1e-7) {
                    continue;
                }
                out.push(s);
            }
        }
    }
    out.sort_by(cmp_lex);
    out
}

/// Greedy nearest-neighbour linking of consecutive sweep points.
fn link(points: Vec<Vec<FlexState>>, real_only: bool) -> Vec<FlexTrace> {
    const JUMP: f64 = 0.25;
    let mut traces: Vec<FlexTrace> = Vec::new();
    let mut active: Vec<usize> = Vec::new();
    for states in points {
        let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
        for (ti, &t) in active.iter().enumerate() {
            let last = traces[t].states.last().expect("active traces are nonempty");
            for (si, s) in states.iter().enumerate() {
                pairs.push((state_distance(last, s), ti, si));
            }
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.2.cmp(&b.2)));
        let mut used_t = vec![false; active.len()];
        let mut target: Vec<Option<usize>> = vec![None; states.len()];
        for (d, ti, si) in pairs {
            if d < JUMP && !used_t[ti] && target[si].is_none() {
                used_t[ti] = true;
                target[si] = Some(active[ti]);
            }
        }
        let mut next_active = Vec::new();
        for (si, mut s) in states.into_iter().enumerate() {
            let t = match target[si] {
                Some(t) => t,
                None => {
                    traces.push(FlexTrace {
                        branch: traces.len(),
                        real_only,
                        states: Vec::new(),
                    });
                    traces.len() - 1
                }
            };
            s.branch = t;
            traces[t].states.push(s);
            next_active.push(t);
        }
        // Traces that found no continuation at this point stay available.
        for (ti, &t) in active.iter().enumerate() {
            if !used_t[ti] {
                next_active.push(t);
            }
        }
        active = next_active;
    }
    traces
}

/// Sweep without checking flexibility first.
pub fn trace_unchecked(m: &MeshSpec<f64>, opts: &TraceOptions) -> TraceReport {
    let grids: [Grid; 4] = std::array::from_fn(|k| normalized_grid(m, k + 1));
    let mut skipped = Vec::new();
    let (lo, hi) = opts.alpha_range;
    let n = opts.steps.max(1);
    let points: Vec<Vec<FlexState>> = (0..n)
        .map(|k| {
            let t = if n == 1 {
                0.5
            } else {
                k as f64 / (n - 1) as f64
            };
            solve_point(&grids, m, k, lo + (hi - lo) * t, opts, &mut skipped)
        })
        .collect();
    let traces = link(points, opts.real_only);
    let diagnostic = if traces.is_empty() {
        Some(if opts.real_only {
            "no real solutions: the flexion has no real component over the sweep".to_string()
        } else {
            "no solutions within tolerance over the sweep".to_string()
        })
    } else {
        None
    };
    TraceReport {
        traces,
        skipped,
        diagnostic,
    }
}

/// Trace a mesh after confirming it is flexible.
pub fn trace<S: Scalar>(m: &MeshSpec<S>, opts: &TraceOptions) -> Result<TraceReport, TraceError> {
    let out = is_flexible(m)?;
    if !out.is_flexible() {
        return Err(TraceError::Rigid(format!(
            "gcd(R1, R2) = 1: couplings {} and {} share no factor",
            out.coupling_labels[0], out.coupling_labels[1]
        )));
    }
    Ok(trace_unchecked(&m.to_f64(), opts))
}

/// Closed-form orbits of a mesh of reducible quads: for every branch choice
/// whose Möbius product is scalar, `x_{i+1} = N_i(x_i)`.
pub fn mobius_orbits(m: &MeshSpec<f64>, x1: f64) -> Vec<[f64; 4]> {
    let mut out = Vec::new();
    for mask in 0..16usize {
        let ns: Option<Vec<Mobius<f64>>> = (1..=4)
            .map(|i| m.branch_mobius(i, (mask >> (i - 1)) & 1))
            .collect();
        let Some(ns) = ns else { return out };
        let prod = ns
            .iter()
            .skip(1)
            .fold(ns[0].clone(), |acc, n| n.after(&acc));
        if !prod.is_scalar() {
            continue;
        }
        let mut x = [x1; 4];
        let mut cur = ProjReal::Finite(x1);
        let mut finite = true;
        for i in 0..3 {
            cur = ns[i].apply(&cur);
            match cur.finite() {
                Some(v) => x[i + 1] = *v,
                None => finite = false,
            }
        }
        if finite {
            out.push(x);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bricard::BricardCoeffs;

    fn antiisogram(k: f64, kp: f64) -> BricardCoeffs<f64> {
        let c = -1.0 / (k + kp);
        BricardCoeffs::new(0.0, c * k * kp, c, 0.0)
    }

    fn pr_mesh() -> MeshSpec<f64> {
        let ks = [2.0, 3.0, 0.5, 1.0 / 3.0];
        MeshSpec::new(
            ks.map(|k| antiisogram(k, -2.0 * k)),
            std::array::from_fn(|_| ProjReal::zero()),
        )
    }

    #[test]
    fn quadratic_roots() {
        // x'^2 - 3 x x' + 2 x^2: roots x' = x, 2x
        let g = [[0.0, 0.0, 1.0], [0.0, -3.0, 0.0], [2.0, 0.0, 0.0]];
        let mut r = solve_next(&g, C::new(1.5, 0.0)).unwrap().map(|z| z.re);
        r.sort_by(f64::total_cmp);
        assert!((r[0] - 1.5).abs() < 1e-14 && (r[1] - 3.0).abs() < 1e-14);
        let lin = [[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0; 3]];
        assert!(solve_next(&lin, C::new(1.0, 0.0)).is_none());
    }

    #[test]
    fn pr_trace_matches_orbit() {
        let m = pr_mesh();
        let opts = TraceOptions {
            steps: 50,
            real_only: true,
            ..Default::default()
        };
        let rep = trace(&m, &opts).unwrap();
        assert!(rep.accepted() >= 50);
        for s in rep.states() {
            let orbits = mobius_orbits(&m, s.x[0].re);
            assert!(orbits
                .iter()
                .any(|o| (0..4).all(|i| (o[i] - s.x[i].re).abs() <= 1e-10 * (1.0 + o[i].abs()))));
        }
        assert!(rep
            .to_csv()
            .starts_with("step,alpha1,x1,x2,x3,x4,residual,branch\n"));
    }

    #[test]
    fn rigid_rejected() {
        let mut m = pr_mesh();
        m.quads[0] = antiisogram(2.01, -4.0);
        assert!(matches!(
            trace(&m, &TraceOptions::default()),
            Err(TraceError::Rigid(_))
        ));
        let rep = trace_unchecked(&m, &TraceOptions::default());
        assert!(rep.accepted() <= 16);
    }

    #[test]
    fn chordal_metric() {
        assert!((chordal(C::new(0.0, 0.0), C::new(1.0, 0.0)) - 2.0f64.sqrt()).abs() < 1e-15);
        assert!(chordal(C::new(1e9, 0.0), C::new(-1e9, 0.0)) < 1e-8);
    }
}
