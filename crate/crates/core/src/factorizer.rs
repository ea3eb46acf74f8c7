//! Structured factorization of the coupling resultant `R1 = Res(g̃1, g2; x2)`.
//!
//! Every class has a closed-form factor shape. The shapes are built from the
//! classifier's evidence and the leading scalar is recovered by exact division,
//! so a wrong shape surfaces as an error instead of a silent mismatch.

use num_complex::Complex64;
use thiserror::Error;

use crate::bricard::{eliminate_gap, eliminated_parts, gap_poly, BricardCoeffs, BricardError};
use crate::coupling::{Coupling, CouplingClass, CouplingLabel};
use crate::mobius::ProjReal;
use crate::poly::{
    poly_divide_exact, proportional, sylvester_resultant, BiPoly, Parity, PolyError, Var,
};
use crate::roots::real_poly_roots;
use crate::scalar::{tolerance, Scalar};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FactorError {
    #[error("exact arithmetic cannot split this resultant: {0}")]
    NeedsFloat(String),
    #[error("unsupported factorization: {0}")]
    Unsupported(String),
    #[error("claimed class {0} does not match the resultant: {1}")]
    Mismatch(CouplingLabel, String),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorKind {
    /// Degree one in each variable.
    Bilinear,
    /// Degree two in each variable.
    Biquadratic,
    /// The whole degree-(4,4) resultant, certified free of structured factors.
    Quartic,
    /// A product this toolkit does not split (complex or uncovered parameters).
    Unsplit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Factor<S: Scalar> {
    pub poly: BiPoly<S>,
    pub multiplicity: u32,
    pub kind: FactorKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FactoredResultant<S: Scalar> {
    pub scalar: S,
    pub factors: Vec<Factor<S>>,
    /// Both ±m branches of a purely-quadratic split coincide.
    pub degenerate: bool,
    pub notes: Vec<String>,
}

impl<S: Scalar> FactoredResultant<S> {
    /// `scalar · Π factor^multiplicity`.
    pub fn expand(&self) -> BiPoly<S> {
        let vars = rvars();
        self.factors
            .iter()
            .fold(BiPoly::constant(vars, self.scalar.clone()), |acc, f| {
                acc.mul(&f.poly.pow(f.multiplicity))
            })
    }

    /// Σ multiplicity · degree, in x1 and in y2.
    pub fn degree_sums(&self) -> (usize, usize) {
        self.factors.iter().fold((0, 0), |(u, v), f| {
            let m = f.multiplicity as usize;
            (
                u + m * f.poly.deg_u().unwrap_or(0),
                v + m * f.poly.deg_v().unwrap_or(0),
            )
        })
    }

    pub fn squared(&self) -> impl Iterator<Item = &Factor<S>> {
        self.factors.iter().filter(|f| f.multiplicity >= 2)
    }
}

/// Variable pair of R1.
pub fn rvars() -> (Var, Var) {
    (Var::x(1), Var::y(2))
}

/// `R1(x1, y2) = Res(g̃1(x1, x2), g2(x2, y2); x2)`.
pub fn coupling_resultant<S: Scalar>(c: &Coupling<S>) -> Result<BiPoly<S>, PolyError> {
    let gt1 = eliminate_gap(&c.g1, &c.f1, (Var::x(1), Var::x(2)));
    let g2 = c.g2.poly((Var::x(2), Var::y(2)));
    Ok(sylvester_resultant(&gt1, &g2, Var::x(2))?.cleaned())
}

/// Total-degree parity of the nonzero monomials.
pub fn odd_even_signature<S: Scalar>(p: &BiPoly<S>) -> Parity {
    p.cleaned().parity()
}

/// `α22 x²y² + α20 x² + α02 y² + α11 xy + α00` from `[α22, α20, α02, α11, α00]`.
pub fn even_biquadratic<S: Scalar>(al: &[S; 5], vars: (Var, Var)) -> BiPoly<S> {
    let [a22, a20, a02, a11, a00] = al.clone();
    BiPoly::from_terms(
        vars,
        &[
            (2, 2, a22),
            (2, 0, a20),
            (0, 2, a02),
            (1, 1, a11),
            (0, 0, a00),
        ],
    )
}

fn sq<S: Scalar>(x: S) -> S {
    x.clone() * x
}

/// Cofactor of `(k x1 − y2)²` for `g2 = (a1/k, k c1, b1/k, k e1)`.
pub fn alpha_column1<S: Scalar>(g1: &BricardCoeffs<S>, k: &S) -> [S; 5] {
    let BricardCoeffs { a, b, c, e } = g1.clone();
    let d2 = sq(a.clone() * e.clone() - b.clone() * c.clone());
    let k2 = k.clone() * k.clone();
    [
        a.clone() * b.clone() / k2.clone(),
        d2.clone(),
        d2.clone() / k2,
        (S::from_i64(2) * d2 - a * e.clone() - b * c.clone()) / k.clone(),
        c * e,
    ]
}

/// Cofactor of `(x1 y2 − k)²` for `g2 = (c1/k, k a1, e1/k, k b1)`.
pub fn alpha_column2<S: Scalar>(g1: &BricardCoeffs<S>, k: &S) -> [S; 5] {
    let BricardCoeffs { a, b, c, e } = g1.clone();
    let d2 = sq(a.clone() * e.clone() - b.clone() * c.clone());
    let k2 = k.clone() * k.clone();
    [
        d2.clone() / k2.clone(),
        a.clone() * b.clone(),
        c.clone() * e.clone() / k2,
        (S::from_i64(2) * d2.clone() - a * e - b * c) / k.clone(),
        d2,
    ]
}

/// One purely-quadratic factor `r(μ)`; the pair is `r(m)`, `r(−m)`.
///
/// `None` when a denominator vanishes.
pub fn alpha_column3<S: Scalar>(b1: &S, c1: &S, b2: &S, c2: &S, e2: &S, mu: &S) -> Option<[S; 5]> {
    let one = S::one();
    let four = S::from_i64(4);
    let mu2 = mu.clone() * mu.clone();
    let bc1 = b1.clone() * c1.clone();
    let bc2 = b2.clone() * c2.clone();
    let d = bc2.clone() * mu2.clone() - bc1.clone();
    if d.is_zero() || b1.is_zero() || e2.is_zero() || mu.is_zero() {
        return None;
    }
    let n = one.clone() - mu2.clone() - four.clone() * bc1.clone()
        + four.clone() * bc2.clone() * mu2.clone();
    let om = sq(one.clone() - mu.clone());
    Some([
        b1.clone() * n / (four.clone() * e2.clone() * mu2.clone()),
        b1.clone() * b2.clone() * om.clone() / (four.clone() * d.clone()),
        c1.clone() * c2.clone() * om / (four.clone() * d.clone()),
        ((one - mu.clone()) * (bc1 - bc2 * mu2 * mu.clone()) - four * d.clone() * d.clone())
            / (S::from_i64(2) * mu.clone() * d.clone()),
        e2.clone() * d / b1.clone(),
    ])
}

/// Purely-quadratic coupling from free parameters: fills a1, e1, a2 so that the
/// first purely-quadratic chain holds with value m².
pub fn repara<S: Scalar>(
    b1: &S,
    c1: &S,
    b2: &S,
    c2: &S,
    e2: &S,
    m: &S,
) -> Option<(BricardCoeffs<S>, BricardCoeffs<S>)> {
    let four = S::from_i64(4);
    let m2 = m.clone() * m.clone();
    let d = b2.clone() * c2.clone() * m2.clone() - b1.clone() * c1.clone();
    if d.is_zero() || b1.is_zero() || e2.is_zero() || m.is_zero() {
        return None;
    }
    let n = S::one() - m2.clone() - four.clone() * b1.clone() * c1.clone()
        + four.clone() * b2.clone() * c2.clone() * m2.clone();
    let a1 = b1.clone() * b2.clone() * n.clone() / (four.clone() * e2.clone() * d.clone());
    let e1 = c2.clone() * e2.clone() * m2.clone() / b1.clone();
    let a2 = b1.clone() * c1.clone() * n / (four * e2.clone() * m2 * d);
    Some((
        BricardCoeffs::new(a1, b1.clone(), c1.clone(), e1),
        BricardCoeffs::new(a2, b2.clone(), c2.clone(), e2.clone()),
    ))
}

/// Base of the squared involutive-quadratic factor, pseudo-planar type:
/// `a2 x1 y2² − (a1 x1² + c1) y2 + b2 x1` (g1 already switched for F1 = ∞).
pub fn iq_base_pseudo_planar<S: Scalar>(g1: &BricardCoeffs<S>, g2: &BricardCoeffs<S>) -> BiPoly<S> {
    BiPoly::from_terms(
        rvars(),
        &[
            (1, 2, g2.a.clone()),
            (2, 1, -g1.a.clone()),
            (0, 1, -g1.c.clone()),
            (1, 0, g2.b.clone()),
        ],
    )
}

/// Base of the squared involutive-quadratic factor, general type:
/// `a2 h1(x1) y2² − h2(x1) y2 + b2 h1(x1)`.
pub fn iq_base_general<S: Scalar>(
    g1: &BricardCoeffs<S>,
    f1: &ProjReal<S>,
    g2: &BricardCoeffs<S>,
) -> BiPoly<S> {
    let [h2, h1, _] = eliminated_parts(g1, f1);
    let mut terms = Vec::new();
    for i in 0..3 {
        terms.push((i, 2, g2.a.clone() * h1[i].clone()));
        terms.push((i, 1, -h2[i].clone()));
        terms.push((i, 0, g2.b.clone() * h1[i].clone()));
    }
    BiPoly::from_terms(rvars(), &terms)
}

/// General-type equimodular coupling from the ω-parametrization.
///
/// `g1 = (a1, b1, b1ω1², a1ω1²)`, `g2 = (a2, c2ω2², c2, a2ω2²)` with `k = ±ω2`.
pub fn omega_coupling<S: Scalar>(
    a1: &S,
    b1: &S,
    w1: &S,
    w2: &S,
    k_sign: i64,
    f1: S,
) -> Option<Coupling<S>> {
    let k = S::from_i64(k_sign) * w2.clone();
    let den = S::from_i64(8) * k * w1.clone() * (a1.clone() - b1.clone());
    if den.is_zero() {
        return None;
    }
    let t = S::from_i64(2) * w1.clone() * (a1.clone() + b1.clone());
    let a2 = (t.clone() + S::one()) / den.clone();
    let c2 = (t - S::one()) / den;
    let (w12, w22) = (sq(w1.clone()), sq(w2.clone()));
    Some(Coupling::new(
        BricardCoeffs::new(
            a1.clone(),
            b1.clone(),
            b1.clone() * w12.clone(),
            a1.clone() * w12,
        ),
        BricardCoeffs::new(a2.clone(), c2.clone() * w22.clone(), c2, a2 * w22),
        ProjReal::Finite(f1),
        ProjReal::zero(),
    ))
}

fn kind_of<S: Scalar>(p: &BiPoly<S>) -> FactorKind {
    match (p.deg_u().unwrap_or(0), p.deg_v().unwrap_or(0)) {
        (u, v) if u <= 1 && v <= 1 => FactorKind::Bilinear,
        (u, v) if u <= 2 && v <= 2 => FactorKind::Biquadratic,
        _ => FactorKind::Unsplit,
    }
}

fn factor<S: Scalar>(poly: BiPoly<S>, multiplicity: u32) -> Factor<S> {
    let kind = kind_of(&poly);
    Factor {
        poly,
        multiplicity,
        kind,
    }
}

/// Divide `r1` by the product of `factors`; the quotient must be a constant.
fn finish<S: Scalar>(
    label: CouplingLabel,
    r1: &BiPoly<S>,
    factors: Vec<Factor<S>>,
    notes: Vec<String>,
) -> Result<FactoredResultant<S>, FactorError> {
    let mut fr = FactoredResultant {
        scalar: S::one(),
        factors,
        degenerate: false,
        notes,
    };
    let prod = fr.expand();
    let q = poly_divide_exact(r1, &prod)?.ok_or_else(|| {
        FactorError::Mismatch(label, "structured factors do not divide R1".into())
    })?;
    if q.deg_u().unwrap_or(0) > 0 || q.deg_v().unwrap_or(0) > 0 {
        return Err(FactorError::Mismatch(
            label,
            "cofactor is not constant".into(),
        ));
    }
    fr.scalar = q.coeff(0, 0);
    Ok(fr)
}

fn unsplit<S: Scalar>(r1: &BiPoly<S>, note: String) -> FactoredResultant<S> {
    FactoredResultant {
        scalar: S::one(),
        factors: vec![Factor {
            poly: r1.clone(),
            multiplicity: 1,
            kind: FactorKind::Unsplit,
        }],
        degenerate: false,
        notes: vec![note],
    }
}

fn root_error(e: BricardError) -> Result<(), FactorError> {
    match e {
        BricardError::IrrationalRoots(s) => {
            Err(FactorError::NeedsFloat(format!("irrational roots of {s}")))
        }
        _ => Ok(()),
    }
}

/// Square root in the current field; `Err` in exact mode for irrational values.
fn field_sqrt<S: Scalar>(x: &S, what: &str) -> Result<Option<S>, FactorError> {
    match x.sqrt() {
        Some(r) => Ok(Some(r)),
        None if S::EXACT && x.to_f64() > 0.0 => Err(FactorError::NeedsFloat(format!(
            "{what} is not a rational square"
        ))),
        None => Ok(None),
    }
}

/// Strip every candidate square that divides `r`; returns the squares found and the cofactor.
fn extract_squares<S: Scalar>(
    r: &BiPoly<S>,
    candidates: Vec<BiPoly<S>>,
) -> Result<(Vec<Factor<S>>, BiPoly<S>), PolyError> {
    let mut found: Vec<Factor<S>> = Vec::new();
    let mut rest = r.clone();
    for cand in candidates {
        if found.iter().any(|f| proportional(&f.poly, &cand)) {
            continue;
        }
        if let Some(q) = poly_divide_exact(&rest, &cand.pow(2))? {
            rest = q.cleaned();
            found.push(factor(cand, 2));
        }
    }
    Ok((found, rest))
}

/// The factorization of R1 predicted by the coupling class.
pub fn factor_resultant<S: Scalar>(
    c: &Coupling<S>,
    cls: &CouplingClass<S>,
) -> Result<FactoredResultant<S>, FactorError> {
    let r1 = coupling_resultant(c)?;
    let label = cls.label;
    let ev = &cls.evidence;
    let x1y1 = (Var::x(1), Var::y(1));
    let x2y2 = (Var::x(2), Var::y(2));
    match label {
        CouplingLabel::PurelyRational | CouplingLabel::HalfQuadratic => {
            // Linear factors of g̃1 in (x1, x2), pushed through the gap.
            let through_gap = |l: BiPoly<S>| -> Result<BiPoly<S>, PolyError> {
                sylvester_resultant(&l, &gap_poly(&c.f1, (Var::y(1), Var::x(2))), Var::y(1))
            };
            let left: Vec<BiPoly<S>> = if c.g1.is_reducible() {
                match c.g1.factor_reducible() {
                    Ok(s) => (0..2)
                        .map(|i| through_gap(s.factor(i, x1y1)))
                        .collect::<Result<_, _>>()?,
                    Err(e) => {
                        root_error(e)?;
                        return Ok(unsplit(&r1, "first quad splits only over C".into()));
                    }
                }
            } else {
                vec![eliminate_gap(&c.g1, &c.f1, (Var::x(1), Var::x(2)))]
            };
            let right: Vec<BiPoly<S>> = if c.g2.is_reducible() {
                match c.g2.factor_reducible() {
                    Ok(s) => (0..2).map(|j| s.factor(j, x2y2)).collect(),
                    Err(e) => {
                        root_error(e)?;
                        return Ok(unsplit(&r1, "second quad splits only over C".into()));
                    }
                }
            } else {
                vec![c.g2.poly(x2y2)]
            };
            let mut fs = Vec::new();
            for l in &left {
                for r in &right {
                    fs.push(factor(sylvester_resultant(l, r, Var::x(2))?.cleaned(), 1));
                }
            }
            finish(label, &r1, fs, Vec::new())
        }
        CouplingLabel::InvolutiveRational | CouplingLabel::RationalQuadratic => {
            let g1 = c.effective_g1();
            let mut fs = Vec::new();
            if let Some(k) = &ev.chain1_k {
                fs.push(factor(
                    BiPoly::from_terms(rvars(), &[(1, 0, k.clone()), (0, 1, -S::one())]),
                    2,
                ));
            }
            if let Some(k) = &ev.chain2_k {
                fs.push(factor(
                    BiPoly::from_terms(rvars(), &[(1, 1, S::one()), (0, 0, -k.clone())]),
                    2,
                ));
            }
            if label == CouplingLabel::RationalQuadratic {
                let al = match (&ev.chain1_k, &ev.chain2_k) {
                    (Some(k), None) => alpha_column1(&g1, k),
                    (None, Some(k)) => alpha_column2(&g1, k),
                    _ => {
                        return Err(FactorError::Mismatch(
                            label,
                            "exactly one chain must hold".into(),
                        ))
                    }
                };
                fs.push(factor(even_biquadratic(&al, rvars()).cleaned(), 1));
            }
            finish(label, &r1, fs, Vec::new())
        }
        CouplingLabel::PurelyQuadratic => {
            if !c.is_pseudo_planar() {
                return Err(FactorError::Unsupported(
                    "purely-quadratic split of general type".into(),
                ));
            }
            let (Some(1), Some(m2)) = (ev.pq_branch, &ev.m2) else {
                return Ok(unsplit(
                    &r1,
                    "purely-quadratic system 2 or 3: no closed-form split".into(),
                ));
            };
            let Some(m) = field_sqrt(m2, "m^2")? else {
                return Ok(unsplit(
                    &r1,
                    "m^2 < 0: the two factors are complex conjugates".into(),
                ));
            };
            let g1 = c.effective_g1();
            let g2 = &c.g2;
            let pair =
                [m.clone(), -m].map(|mu| alpha_column3(&g1.b, &g1.c, &g2.b, &g2.c, &g2.e, &mu));
            let [Some(p), Some(q)] = pair else {
                return Ok(unsplit(
                    &r1,
                    "purely-quadratic parameters outside the closed form (b1 e2 D = 0)".into(),
                ));
            };
            let (rp, rq) = (
                even_biquadratic(&p, rvars()).cleaned(),
                even_biquadratic(&q, rvars()).cleaned(),
            );
            let degenerate = proportional(&rp, &rq);
            let mut fr = finish(label, &r1, vec![factor(rp, 1), factor(rq, 1)], Vec::new())?;
            fr.degenerate = degenerate;
            Ok(fr)
        }
        CouplingLabel::InvolutiveQuadratic => {
            let base = if c.is_pseudo_planar() {
                iq_base_pseudo_planar(&c.effective_g1(), &c.g2)
            } else {
                iq_base_general(&c.g1, &c.f1, &c.g2)
            };
            finish(label, &r1, vec![factor(base.cleaned(), 2)], Vec::new())
        }
        CouplingLabel::EquimodularGeneral => {
            let (g1, g2) = (c.g1.snapped(), c.g2.snapped());
            let w1sq = if !g1.b.is_zero() {
                g1.c.clone() / g1.b.clone()
            } else {
                g1.e.clone() / g1.a.clone()
            };
            let w2sq = if !g2.c.is_zero() {
                g2.b.clone() / g2.c.clone()
            } else {
                g2.e.clone() / g2.a.clone()
            };
            let (Some(w1), Some(w2)) = (
                field_sqrt(&w1sq, "omega1^2")?,
                field_sqrt(&w2sq, "omega2^2")?,
            ) else {
                return Ok(unsplit(&r1, "omega parameters are complex".into()));
            };
            let mut cands = Vec::new();
            for s in [S::one(), -S::one()] {
                for k in [w2.clone(), -w2.clone()] {
                    // y2 (x1 + s ω1) − k (x1 − s ω1)
                    let sw = s.clone() * w1.clone();
                    cands.push(BiPoly::from_terms(
                        rvars(),
                        &[
                            (1, 1, S::one()),
                            (0, 1, sw.clone()),
                            (1, 0, -k.clone()),
                            (0, 0, k * sw),
                        ],
                    ));
                }
            }
            let (mut fs, rest) = extract_squares(&r1, cands)?;
            let notes = vec![format!(
                "omega-parametrization: {} squared bilinear factor(s)",
                fs.len()
            )];
            if rest.deg_u().unwrap_or(0) > 0 || rest.deg_v().unwrap_or(0) > 0 {
                let mut f = factor(rest.monic_by_max(), 1);
                if fs.is_empty() {
                    f.kind = FactorKind::Unsplit;
                }
                fs.push(f);
            }
            finish(label, &r1, fs, notes)
        }
        CouplingLabel::Quartic => {
            if has_bilinear_factor(&r1) {
                return Err(FactorError::Mismatch(
                    label,
                    "R1 has a bilinear factor".into(),
                ));
            }
            let notes = vec!["no bilinear factor (numeric exclusion)".into()];
            let f = Factor {
                poly: r1.clone(),
                multiplicity: 1,
                kind: FactorKind::Quartic,
            };
            Ok(FactoredResultant {
                scalar: S::one(),
                factors: vec![f],
                degenerate: false,
                notes,
            })
        }
    }
}

/// Expand the factorization and compare with a freshly computed R1.
pub fn verify_factorization<S: Scalar>(fr: &FactoredResultant<S>, c: &Coupling<S>) -> bool {
    let Ok(r1) = coupling_resultant(c) else {
        return false;
    };
    let prod = fr.expand();
    let Ok(prod) = prod.ordered(r1.vars()) else {
        return false;
    };
    if S::EXACT {
        return prod == r1;
    }
    let diff = prod.sub(&r1);
    diff.norm() <= 1e3 * tolerance().rel * r1.norm().max(1.0)
}

const SAMPLES: [f64; 9] = [
    0.371, -1.137, 2.713, 0.593, -0.231, 1.618, -2.449, 0.127, 3.303,
];

fn y_roots(p: &BiPoly<f64>, x: f64) -> Option<Vec<Complex64>> {
    let cs = p.coeffs_in(p.vars().1).ok()?;
    let ys: Vec<f64> = cs.iter().map(|u| u.eval(&x)).collect();
    let lead = *ys.last()?;
    let scale = ys.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if lead.abs() <= 1e-8 * scale {
        return None;
    }
    Some(real_poly_roots(&ys))
}

fn det3(m: [[Complex64; 3]; 3]) -> Complex64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Null vector `(α, β, γ, δ)` of `α x + β − γ x y − δ y = 0` through three points.
fn mobius_through(pts: [(Complex64, Complex64); 3]) -> [Complex64; 4] {
    let rows: Vec<[Complex64; 4]> = pts
        .iter()
        .map(|&(x, y)| [x, Complex64::new(1.0, 0.0), -x * y, -y])
        .collect();
    let minor = |skip: usize| {
        let cols: Vec<usize> = (0..4).filter(|&c| c != skip).collect();
        det3([0, 1, 2].map(|r| [rows[r][cols[0]], rows[r][cols[1]], rows[r][cols[2]]]))
    };
    [minor(0), -minor(1), minor(2), -minor(3)]
}

/// Whether `p` (in (x, y)) has a factor of degree at most one in each variable.
///
/// Numeric: y-roots at sample abscissae are matched against Möbius curves
/// through three of them, and univariate factors are detected from shared
/// roots of the coefficient polynomials.
pub fn has_bilinear_factor<S: Scalar>(p: &BiPoly<S>) -> bool {
    let p = p.to_f64().cleaned().monic_by_max();
    if has_univariate_factor(&p) || has_univariate_factor(&p.transpose()) {
        return true;
    }
    if p.deg_v().unwrap_or(0) == 0 {
        return false;
    }
    let pts: Vec<(f64, Vec<Complex64>)> = SAMPLES
        .iter()
        .filter_map(|&x| y_roots(&p, x).map(|r| (x, r)))
        .take(5)
        .collect();
    if pts.len() < 5 {
        return false;
    }
    let cx = |x: f64| Complex64::new(x, 0.0);
    let close = |a: Complex64, b: Complex64| (a - b).norm() <= 1e-6 * (1.0 + b.norm());
    for &r0 in &pts[0].1 {
        for &r1 in &pts[1].1 {
            for &r2 in &pts[2].1 {
                let v =
                    mobius_through([(cx(pts[0].0), r0), (cx(pts[1].0), r1), (cx(pts[2].0), r2)]);
                let size = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
                if size < 1e-12 {
                    continue;
                }
                let hits = pts[3..].iter().all(|(x, rs)| {
                    let x = cx(*x);
                    let den = v[2] * x + v[3];
                    if den.norm() < 1e-12 * size {
                        return false;
                    }
                    let y = (v[0] * x + v[1]) / den;
                    rs.iter().any(|&r| close(y, r))
                });
                if hits {
                    return true;
                }
            }
        }
    }
    false
}

/// A factor depending on the first variable only (common root of all y-coefficients).
fn has_univariate_factor(p: &BiPoly<f64>) -> bool {
    let Ok(cs) = p.coeffs_in(p.vars().1) else {
        return false;
    };
    let cs: Vec<Vec<f64>> = cs
        .iter()
        .map(|u| u.coeffs().to_vec())
        .filter(|c| c.iter().any(|x| *x != 0.0))
        .collect();
    let Some(pivot) = cs.iter().min_by_key(|c| c.len()) else {
        return false;
    };
    if pivot.len() <= 1 {
        return false;
    }
    real_poly_roots(pivot).iter().any(|&t| {
        cs.iter().all(|c| {
            let coeffs: Vec<Complex64> = c.iter().map(|&x| Complex64::new(x, 0.0)).collect();
            let scale: f64 =
                c.iter().map(|x| x.abs()).sum::<f64>() * (1.0 + t.norm()).powi(c.len() as i32);
            crate::roots::horner(&coeffs, t).0.norm() <= 1e-8 * scale
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coupling::classify;
    use crate::scalar::rat;
    use num_rational::BigRational as Q;

    fn g(a: Q, b: Q, c: Q, e: Q) -> BricardCoeffs<Q> {
        BricardCoeffs::new(a, b, c, e)
    }

    #[test]
    fn iq_square() {
        let c = Coupling::new(
            g(rat(1, 1), rat(-1, 1), rat(1, 1), rat(-1, 1)),
            g(rat(1, 1), rat(6, 5), rat(-1, 1), rat(-6, 5)),
            ProjReal::zero(),
            ProjReal::zero(),
        );
        let fr = factor_resultant(&c, &classify(&c).unwrap()).unwrap();
        assert_eq!(fr.scalar, rat(-1, 1));
        assert_eq!(fr.factors.len(), 1);
        let base = &fr.factors[0].poly;
        assert_eq!(odd_even_signature(base), Parity::OddOnly);
        let r1 = coupling_resultant(&c).unwrap();
        let q = poly_divide_exact(&r1, &base.pow(2)).unwrap().unwrap();
        assert_eq!(q, BiPoly::constant(rvars(), rat(-1, 1)));
        assert!(verify_factorization(&fr, &c));
    }

    #[test]
    fn pq_pair_from_repara() {
        let one = rat(1, 1);
        let (g1, g2) = repara(&one, &one, &one, &one, &one, &rat(2, 1)).unwrap();
        assert_eq!(g1, g(rat(3, 4), one.clone(), one.clone(), rat(4, 1)));
        assert_eq!(g2, g(rat(3, 16), one.clone(), one.clone(), one.clone()));
        let c = Coupling::new(g1, g2, ProjReal::zero(), ProjReal::zero());
        let fr = factor_resultant(&c, &classify(&c).unwrap()).unwrap();
        assert_eq!(fr.factors.len(), 2);
        assert!(!fr.degenerate);
        for f in &fr.factors {
            assert_eq!(odd_even_signature(&f.poly), Parity::EvenOnly);
            assert_eq!(f.kind, FactorKind::Biquadratic);
            assert!(!has_bilinear_factor(&f.poly));
        }
        assert!(verify_factorization(&fr, &c));
        let mut bad = fr.clone();
        let p = &bad.factors[0].poly;
        bad.factors[0].poly = p.add(&BiPoly::from_terms(rvars(), &[(1, 1, rat(1, 1000))]));
        assert!(!verify_factorization(&bad, &c));
    }

    #[test]
    fn column2_on_listed_example() {
        let g1 = g(rat(1, 1), rat(1, 1), rat(-1, 1), rat(-1, 1));
        let al = alpha_column2(&g1, &rat(2, 1));
        assert_eq!(al, [rat(0, 1), rat(1, 1), rat(1, 4), rat(1, 1), rat(0, 1)]);
    }

    #[test]
    fn bilinear_detection() {
        let v = rvars();
        let a = BiPoly::from_terms(v, &[(1, 1, 1.0), (0, 0, -2.0)]);
        let b = BiPoly::from_terms(
            v,
            &[
                (2, 2, 1.0),
                (2, 0, 3.0),
                (0, 2, -1.0),
                (1, 1, 1.0),
                (0, 0, 2.0),
            ],
        );
        assert!(!has_bilinear_factor(&b));
        assert!(has_bilinear_factor(&a.mul(&b)));
        let lin = BiPoly::from_terms(v, &[(1, 0, 1.0), (0, 0, -0.5)]);
        assert!(has_bilinear_factor(&lin.mul(&b)));
    }

    #[test]
    fn omega_general_equimodular() {
        let c = omega_coupling(
            &rat(1, 3),
            &rat(-1, 2),
            &rat(2, 1),
            &rat(3, 1),
            1,
            rat(1, 1),
        )
        .unwrap();
        let cls = classify(&c).unwrap();
        assert_eq!(cls.label, CouplingLabel::EquimodularGeneral);
        let fr = factor_resultant(&c, &cls).unwrap();
        assert!(fr.squared().count() >= 1);
        assert!(verify_factorization(&fr, &c));
    }
}
