//! Four-quad meshes: flexibility decision and the eleven-class labeling.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bricard::{eliminate_gap, gap_map, gap_poly, BricardCoeffs, GapAngles, QuadAngles};
use crate::coupling::{classify, Coupling, CouplingClass, CouplingError, CouplingLabel};
use crate::factorizer::{factor_resultant, FactorError, FactorKind, FactoredResultant};
use crate::mobius::{Mobius, ProjReal};
use crate::poly::{poly_divide_exact, proportional, sylvester_resultant, BiPoly, PolyError, Var};
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MatchError {
    #[error("quad {0} is singular ((anti)deltoid): out of scope")]
    Singular(usize),
    #[error("shared factor found but coupling pair ({0}, {1}) has no matching class")]
    Pairing(CouplingLabel, CouplingLabel),
    #[error(transparent)]
    Coupling(#[from] CouplingError),
    #[error(transparent)]
    Factor(#[from] FactorError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Four quads and their gaps, indexed cyclically from 1.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshSpec<S> {
    pub quads: [BricardCoeffs<S>; 4],
    pub gaps: [ProjReal<S>; 4],
    pub angles: Option<[QuadAngles; 4]>,
    pub splits: Option<[GapAngles; 4]>,
}

impl<S: Scalar> MeshSpec<S> {
    pub fn new(quads: [BricardCoeffs<S>; 4], gaps: [ProjReal<S>; 4]) -> Self {
        MeshSpec {
            quads,
            gaps,
            angles: None,
            splits: None,
        }
    }

    /// Quad `i` (1-based, cyclic).
    pub fn quad(&self, i: usize) -> &BricardCoeffs<S> {
        &self.quads[(i + 3) % 4]
    }

    /// Gap `i` (1-based, cyclic).
    pub fn gap(&self, i: usize) -> &ProjReal<S> {
        &self.gaps[(i + 3) % 4]
    }

    /// Quad `r + 1` becomes quad 1.
    pub fn rotated(&self, r: usize) -> Self {
        let rot = |k: usize| (k + r) % 4;
        MeshSpec {
            quads: std::array::from_fn(|k| self.quads[rot(k)].clone()),
            gaps: std::array::from_fn(|k| self.gaps[rot(k)].clone()),
            angles: self.angles.map(|a| std::array::from_fn(|k| a[rot(k)])),
            splits: self.splits.map(|s| std::array::from_fn(|k| s[rot(k)])),
        }
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T + Copy) -> MeshSpec<T> {
        MeshSpec {
            quads: std::array::from_fn(|k| self.quads[k].map(f)),
            gaps: std::array::from_fn(|k| self.gaps[k].map(f)),
            angles: self.angles,
            splits: self.splits,
        }
    }

    pub fn to_f64(&self) -> MeshSpec<f64> {
        self.map(Scalar::to_f64)
    }

    pub fn is_pseudo_planar(&self) -> bool {
        self.gaps.iter().all(ProjReal::is_pseudo_planar)
    }

    pub fn check_nonsingular(&self) -> Result<(), MatchError> {
        match self.quads.iter().position(BricardCoeffs::is_singular) {
            Some(i) => Err(MatchError::Singular(i + 1)),
            None => Ok(()),
        }
    }

    /// Couplings (g1, g2) and (g3, g4).
    pub fn couplings(&self) -> [Coupling<S>; 2] {
        [1, 3].map(|i| {
            Coupling::new(
                self.quad(i).clone(),
                self.quad(i + 1).clone(),
                self.gap(i).clone(),
                self.gap(i + 1).clone(),
            )
        })
    }

    /// `g̃i(xi, x_{i+1})`.
    pub fn eliminated(&self, i: usize) -> BiPoly<S> {
        eliminate_gap(self.quad(i), self.gap(i), (Var::x(i), Var::x(i + 1)))
    }

    /// `R̃1 = Res(g̃1, g̃2; x2)` and `R̃2 = Res(g̃3, g̃4; x4)`, both in (x1, x3).
    pub fn resultants(&self) -> Result<[BiPoly<S>; 2], PolyError> {
        let r1 = sylvester_resultant(&self.eliminated(1), &self.eliminated(2), Var::X2)?;
        let r2 = sylvester_resultant(&self.eliminated(3), &self.eliminated(4), Var::X4)?;
        Ok([r1.cleaned(), r2.ordered((Var::X1, Var::X3))?.cleaned()])
    }

    /// Möbius map x_i -> x_{i+1} of a reducible quad for branch `b`.
    pub fn branch_mobius(&self, i: usize, b: usize) -> Option<Mobius<S>> {
        let split = self.quad(i).factor_reducible().ok()?;
        Some(gap_map(self.gap(i)).after(&split.branch_map(b)))
    }
}

/// The eleven matching classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MatchingLabel {
    PR,
    HQ,
    IR,
    RQ,
    PQ,
    IQ,
    Q,
    PrIr,
    HqIq,
    HqPq,
    PqIq,
}

impl MatchingLabel {
    pub const ALL: [MatchingLabel; 11] = [
        MatchingLabel::PR,
        MatchingLabel::HQ,
        MatchingLabel::IR,
        MatchingLabel::RQ,
        MatchingLabel::PQ,
        MatchingLabel::IQ,
        MatchingLabel::Q,
        MatchingLabel::PrIr,
        MatchingLabel::HqIq,
        MatchingLabel::HqPq,
        MatchingLabel::PqIq,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            MatchingLabel::PR => "PR",
            MatchingLabel::HQ => "HQ",
            MatchingLabel::IR => "IR",
            MatchingLabel::RQ => "RQ",
            MatchingLabel::PQ => "PQ",
            MatchingLabel::IQ => "IQ",
            MatchingLabel::Q => "Q",
            MatchingLabel::PrIr => "PR+IR",
            MatchingLabel::HqIq => "HQ+IQ",
            MatchingLabel::HqPq => "HQ+PQ",
            MatchingLabel::PqIq => "PQ+IQ",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        let t = s.trim().to_ascii_uppercase().replace(' ', "");
        MatchingLabel::ALL.into_iter().find(|l| l.name() == t)
    }

    /// Whether a coupling pair may carry this label.
    pub fn allows(&self, a: CouplingLabel, b: CouplingLabel) -> bool {
        use CouplingLabel::*;
        let either = |p: &[CouplingLabel], q: &[CouplingLabel]| {
            (p.contains(&a) && q.contains(&b)) || (p.contains(&b) && q.contains(&a))
        };
        match self {
            MatchingLabel::PR => a == PurelyRational && b == PurelyRational,
            MatchingLabel::HQ => a == HalfQuadratic && b == HalfQuadratic,
            MatchingLabel::IR => either(
                &[InvolutiveRational, RationalQuadratic],
                &[InvolutiveRational, RationalQuadratic],
            ),
            MatchingLabel::RQ => a == RationalQuadratic && b == RationalQuadratic,
            MatchingLabel::PQ => either(
                &[RationalQuadratic, PurelyQuadratic],
                &[RationalQuadratic, PurelyQuadratic],
            ),
            MatchingLabel::IQ => a == InvolutiveQuadratic && b == InvolutiveQuadratic,
            MatchingLabel::Q => a == Quartic && b == Quartic,
            MatchingLabel::PrIr => {
                either(&[PurelyRational], &[InvolutiveRational, RationalQuadratic])
            }
            MatchingLabel::HqIq => either(&[HalfQuadratic], &[InvolutiveQuadratic]),
            MatchingLabel::HqPq => either(&[HalfQuadratic], &[RationalQuadratic, PurelyQuadratic]),
            MatchingLabel::PqIq => either(
                &[InvolutiveQuadratic],
                &[RationalQuadratic, PurelyQuadratic],
            ),
        }
    }
}

impl fmt::Display for MatchingLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SharedFactor {
    pub display: String,
    pub poly: BiPoly<f64>,
    pub degree: (usize, usize),
}

/// Result of the flexibility test.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchOutcome {
    pub label: Option<MatchingLabel>,
    /// Coupling classes after resolving general-type equimodular couplings by factor shape.
    pub coupling_labels: [CouplingLabel; 2],
    pub coupling_evidence: [Vec<String>; 2],
    pub shared: Vec<SharedFactor>,
    /// Quad `rotation + 1` of the input is quad 1 of the analysed mesh.
    pub rotation: usize,
    pub float_mode: bool,
    pub resultant_degrees: [(usize, usize); 2],
    pub notes: Vec<String>,
}

impl MatchOutcome {
    pub fn is_flexible(&self) -> bool {
        self.label.is_some()
    }
}

/// Rotation putting the mesh in normal form: a lone reducible quad at index 2,
/// two adjacent ones at indices 1 and 2.
pub fn canonical_rotation<S: Scalar>(m: &MeshSpec<S>) -> usize {
    let red: Vec<bool> = m.quads.iter().map(BricardCoeffs::is_reducible).collect();
    let idx: Vec<usize> = (0..4).filter(|&k| red[k]).collect();
    match idx.as_slice() {
        [k] => (k + 3) % 4,
        [p, q] if (q - p) % 2 == 1 => {
            // adjacent pair (p, p+1) or the wrap-around (3, 0)
            if *q == p + 1 {
                *p
            } else {
                3
            }
        }
        _ => 0,
    }
}

/// `f(u, y) -> Res(f, H(y, t); y)` in `(u, t)`.
fn through_gap<S: Scalar>(
    f: &BiPoly<S>,
    gap: &ProjReal<S>,
    t: Var,
) -> Result<BiPoly<S>, PolyError> {
    let (u, y) = f.vars();
    if gap.is_zero() {
        return Ok(f.rename((u, t)));
    }
    Ok(sylvester_resultant(f, &gap_poly(gap, (y, t)), y)?.cleaned())
}

struct Mapped<S: Scalar> {
    poly: BiPoly<S>,
    kind: FactorKind,
}

/// Factors of a coupling resultant moved to (x1, x3).
fn mapped_factors<S: Scalar>(
    fr: &FactoredResultant<S>,
    second: bool,
    gap: &ProjReal<S>,
) -> Result<Vec<Mapped<S>>, PolyError> {
    let (u, y, t) = if second {
        (Var::X3, Var::Y4, Var::X1)
    } else {
        (Var::X1, Var::Y2, Var::X3)
    };
    fr.factors
        .iter()
        .map(|f| {
            let p = through_gap(&f.poly.rename((u, y)), gap, t)?.ordered((Var::X1, Var::X3))?;
            Ok(Mapped {
                poly: p,
                kind: f.kind,
            })
        })
        .collect()
}

fn is_constant<S: Scalar>(p: &BiPoly<S>) -> bool {
    p.deg_u().unwrap_or(0) == 0 && p.deg_v().unwrap_or(0) == 0
}

/// Common factors of the two mapped factor lists.
fn shared_factors<S: Scalar>(
    a: &[Mapped<S>],
    b: &[Mapped<S>],
) -> Result<Vec<BiPoly<S>>, PolyError> {
    let mut out: Vec<BiPoly<S>> = Vec::new();
    let push = |p: BiPoly<S>, out: &mut Vec<BiPoly<S>>| {
        if !out.iter().any(|q| proportional(q, &p)) {
            out.push(p);
        }
    };
    let coarse = |k: FactorKind| matches!(k, FactorKind::Unsplit | FactorKind::Quartic);
    for p in a {
        for q in b {
            if is_constant(&p.poly) || is_constant(&q.poly) {
                continue;
            }
            if proportional(&p.poly, &q.poly) {
                push(p.poly.clone(), &mut out);
                continue;
            }
            if coarse(p.kind) && !coarse(q.kind) && poly_divide_exact(&p.poly, &q.poly)?.is_some() {
                push(q.poly.clone(), &mut out);
            } else if coarse(q.kind)
                && !coarse(p.kind)
                && poly_divide_exact(&q.poly, &p.poly)?.is_some()
            {
                push(p.poly.clone(), &mut out);
            }
        }
    }
    Ok(out)
}

/// A general-type equimodular coupling labelled by the shape of its factors.
fn resolve_equimodular<S: Scalar>(
    cls: &CouplingClass<S>,
    fr: &FactoredResultant<S>,
) -> CouplingLabel {
    if cls.label != CouplingLabel::EquimodularGeneral {
        return cls.label;
    }
    let squares = fr
        .factors
        .iter()
        .filter(|f| f.multiplicity >= 2 && f.kind == FactorKind::Bilinear)
        .count();
    match squares {
        0 => CouplingLabel::PurelyQuadratic,
        1 => CouplingLabel::RationalQuadratic,
        _ => CouplingLabel::InvolutiveRational,
    }
}

fn label_for(
    a: CouplingLabel,
    b: CouplingLabel,
    linear: bool,
    quadratic: bool,
) -> Option<MatchingLabel> {
    use CouplingLabel::*;
    let rat = |c: CouplingLabel| matches!(c, InvolutiveRational | RationalQuadratic);
    let pq = |c: CouplingLabel| matches!(c, RationalQuadratic | PurelyQuadratic);
    let pair = |p: CouplingLabel, q: CouplingLabel| (a == p && b == q) || (a == q && b == p);
    Some(match (a, b) {
        (PurelyRational, PurelyRational) => MatchingLabel::PR,
        (HalfQuadratic, HalfQuadratic) => MatchingLabel::HQ,
        (InvolutiveQuadratic, InvolutiveQuadratic) => MatchingLabel::IQ,
        (Quartic, Quartic) => MatchingLabel::Q,
        (RationalQuadratic, RationalQuadratic) if linear && quadratic => MatchingLabel::RQ,
        _ if rat(a) && rat(b) && !quadratic => MatchingLabel::IR,
        _ if pq(a) && pq(b) && !linear => MatchingLabel::PQ,
        _ if (a == PurelyRational && rat(b)) || (b == PurelyRational && rat(a)) => {
            MatchingLabel::PrIr
        }
        _ if pair(HalfQuadratic, InvolutiveQuadratic) => MatchingLabel::HqIq,
        _ if (a == HalfQuadratic && pq(b)) || (b == HalfQuadratic && pq(a)) => MatchingLabel::HqPq,
        _ if (a == InvolutiveQuadratic && pq(b)) || (b == InvolutiveQuadratic && pq(a)) => {
            MatchingLabel::PqIq
        }
        _ => return None,
    })
}

fn degree_of<S: Scalar>(p: &BiPoly<S>) -> (usize, usize) {
    (p.deg_u().unwrap_or(0), p.deg_v().unwrap_or(0))
}

/// Decide flexibility in the arithmetic of `S`.
pub fn is_flexible_in<S: Scalar>(m: &MeshSpec<S>) -> Result<MatchOutcome, MatchError> {
    m.check_nonsingular()?;
    let rotation = canonical_rotation(m);
    let mesh = m.rotated(rotation);
    let [s1, s2] = mesh.couplings();
    let (c1, c2) = (classify(&s1)?, classify(&s2)?);
    let f1 = factor_resultant(&s1, &c1)?;
    let f2 = factor_resultant(&s2, &c2)?;
    let coupling_labels = [resolve_equimodular(&c1, &f1), resolve_equimodular(&c2, &f2)];
    let mut notes: Vec<String> = f1.notes.iter().chain(&f2.notes).cloned().collect();
    let resultants = mesh.resultants()?;
    let resultant_degrees = [degree_of(&resultants[0]), degree_of(&resultants[1])];

    let m1 = mapped_factors(&f1, false, mesh.gap(2))?;
    let m2 = mapped_factors(&f2, true, mesh.gap(4))?;
    let mut shared = shared_factors(&m1, &m2)?;
    if shared.is_empty() && proportional(&resultants[0], &resultants[1]) {
        notes.push("full resultants proportional".into());
        shared.push(resultants[0].clone());
    }
    let shared: Vec<SharedFactor> = shared
        .iter()
        .map(|p| SharedFactor {
            display: p.monic_by_max().to_string(),
            poly: p.to_f64(),
            degree: degree_of(p),
        })
        .collect();
    let label = if shared.is_empty() {
        None
    } else {
        let linear = shared.iter().any(|s| s.degree.0 <= 1 && s.degree.1 <= 1);
        let quadratic = shared.iter().any(|s| s.degree.0 >= 2 || s.degree.1 >= 2);
        match label_for(coupling_labels[0], coupling_labels[1], linear, quadratic) {
            Some(l) => Some(l),
            None => return Err(MatchError::Pairing(coupling_labels[0], coupling_labels[1])),
        }
    };
    Ok(MatchOutcome {
        label,
        coupling_labels,
        coupling_evidence: [c1.evidence.lines(), c2.evidence.lines()],
        shared,
        rotation,
        float_mode: !S::EXACT,
        resultant_degrees,
        notes,
    })
}

/// Decision in the arithmetic of `S`, rerun in float arithmetic when an
/// irrational root is needed.
pub fn is_flexible<S: Scalar>(m: &MeshSpec<S>) -> Result<MatchOutcome, MatchError> {
    match is_flexible_in(m) {
        Err(MatchError::Factor(FactorError::NeedsFloat(why))) => {
            let mut out = is_flexible_in(&m.to_f64())?;
            out.notes.push(format!("float fallback: {why}"));
            Ok(out)
        }
        r => r,
    }
}

/// Guard checks for general-type and pseudo-planar pairings.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GuardReport {
    pub checked: Vec<String>,
    pub violations: Vec<String>,
}

impl GuardReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// `{F2F4 = k} ∪ {−F2/F4 = k} ∪ {−F2F4 = k} ∪ {F2/F4 = k}` for some k = ±1.
pub fn ir_general_condition<S: Scalar>(f2: &ProjReal<S>, f4: &ProjReal<S>) -> bool {
    let (Some(a), Some(b)) = (f2.finite(), f4.finite()) else {
        return false;
    };
    let mut values = vec![a.clone() * b.clone(), -(a.clone() * b.clone())];
    if !b.is_zero() {
        values.push(a.clone() / b.clone());
        values.push(-(a.clone() / b.clone()));
    }
    values
        .iter()
        .any(|v| v.approx_eq(&S::one()) || v.approx_eq(&-S::one()))
}

pub fn general_type_guards<S: Scalar>(
    m: &MeshSpec<S>,
    outcome: Option<&MatchOutcome>,
) -> GuardReport {
    let mut rep = GuardReport::default();
    let labels = match outcome {
        Some(o) => o.coupling_labels,
        None => {
            let [s1, s2] = m.couplings();
            match (classify(&s1), classify(&s2)) {
                (Ok(a), Ok(b)) => [a.label, b.label],
                _ => {
                    rep.violations
                        .push("couplings could not be classified".into());
                    return rep;
                }
            }
        }
    };
    let rational = |c: CouplingLabel| {
        matches!(
            c,
            CouplingLabel::InvolutiveRational
                | CouplingLabel::RationalQuadratic
                | CouplingLabel::EquimodularGeneral
        )
    };
    if rational(labels[0]) && rational(labels[1]) && !m.is_pseudo_planar() {
        rep.checked.push("IR general-type gap condition".into());
        if !ir_general_condition(m.gap(2), m.gap(4)) {
            rep.violations
                .push("F2, F4 violate the general-type IR condition (k = +-1)".into());
        }
    }
    if outcome.and_then(|o| o.label) == Some(MatchingLabel::PQ) {
        rep.checked.push("real PQ matching is pseudo-planar".into());
        if !m.is_pseudo_planar() {
            rep.violations
                .push("PQ matching with a gap outside {0, inf}".into());
        }
    }
    if m.is_pseudo_planar() {
        rep.checked.push("pseudo-planar IQ pairing".into());
        let iq = labels.map(|c| c == CouplingLabel::InvolutiveQuadratic);
        if iq[0] != iq[1] {
            rep.violations.push(format!(
                "pseudo-planar mesh pairs {} with {}",
                labels[0], labels[1]
            ));
        }
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use num_rational::BigRational as Q;

    fn g(a: (i64, i64), b: (i64, i64), c: (i64, i64), e: (i64, i64)) -> BricardCoeffs<Q> {
        BricardCoeffs::new(rat(a.0, a.1), rat(b.0, b.1), rat(c.0, c.1), rat(e.0, e.1))
    }

    fn zeros() -> [ProjReal<Q>; 4] {
        std::array::from_fn(|_| ProjReal::zero())
    }

    #[test]
    fn ir_example() {
        let g1 = g((1, 1), (1, 1), (-1, 1), (-1, 1));
        let g2 = g((-1, 2), (2, 1), (-1, 2), (2, 1));
        let m = MeshSpec::new([g1.clone(), g2.clone(), g1, g2], zeros());
        let out = is_flexible(&m).unwrap();
        assert_eq!(out.label, Some(MatchingLabel::IR));
        let target = BiPoly::from_terms((Var::X1, Var::X3), &[(1, 1, 1.0), (0, 0, -2.0)]);
        assert!(out.shared.iter().any(|s| proportional(&s.poly, &target)));
    }

    #[test]
    fn hq_example() {
        let m = MeshSpec::new(
            [
                g((0, 1), (-2, 3), (-1, 3), (0, 1)),
                g((1, 1), (1, 1), (-1, 1), (-1, 1)),
                g((1, 1), (0, 1), (0, 1), (-2, 1)),
                g((2, 1), (-1, 2), (2, 1), (-1, 2)),
            ],
            zeros(),
        );
        let out = is_flexible(&m).unwrap();
        assert_eq!(out.label, Some(MatchingLabel::HQ));
        assert!(out.shared.iter().all(|s| s.degree == (2, 2)));
    }

    #[test]
    fn pr_k_product() {
        let quad = |k: Q, kp: Q| {
            let c = -Q::from_integer(1.into()) / (k.clone() + kp.clone());
            BricardCoeffs::new(rat(0, 1), c.clone() * k * kp, c, rat(0, 1))
        };
        let ks = [rat(2, 1), rat(3, 1), rat(1, 2), rat(1, 3)];
        let quads = std::array::from_fn(|i| quad(ks[i].clone(), rat(-5, 1)));
        let m = MeshSpec::new(quads, zeros());
        assert_eq!(is_flexible(&m).unwrap().label, Some(MatchingLabel::PR));
        let mut bad = m.clone();
        bad.quads[0] = quad(rat(2, 1) + rat(1, 100), rat(-5, 1));
        assert_eq!(is_flexible(&bad).unwrap().label, None);
    }

    #[test]
    fn rotation_normal_form() {
        let r = g((0, 1), (-2, 3), (-1, 3), (0, 1));
        let n = g((1, 1), (1, 1), (-1, 1), (-1, 1));
        let m = MeshSpec::new([n.clone(), n.clone(), n.clone(), r.clone()], zeros());
        let rot = canonical_rotation(&m);
        assert!(m.rotated(rot).quad(2).is_reducible());
        let m = MeshSpec::new([r.clone(), n.clone(), n.clone(), r.clone()], zeros());
        let mm = m.rotated(canonical_rotation(&m));
        assert!(mm.quad(1).is_reducible() && mm.quad(2).is_reducible());
    }

    #[test]
    fn ir_guard_examples() {
        assert!(ir_general_condition(
            &ProjReal::Finite(rat(2, 1)),
            &ProjReal::Finite(rat(1, 2))
        ));
        assert!(!ir_general_condition(
            &ProjReal::Finite(rat(2, 1)),
            &ProjReal::Finite(rat(1, 3))
        ));
    }

    #[test]
    fn singular_out_of_scope() {
        let s = g((1, 1), (1, 1), (0, 1), (0, 1));
        let n = g((1, 1), (1, 1), (-1, 1), (-1, 1));
        let m = MeshSpec::new([n.clone(), s, n.clone(), n], zeros());
        assert_eq!(is_flexible(&m), Err(MatchError::Singular(2)));
    }
}
