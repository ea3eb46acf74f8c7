//! Classification of a coupling of two consecutive quads.
//!
//! Decisions use only coefficient conditions (ratio chains); the resultant
//! factorization in [`crate::factorizer`] is an independent check.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bricard::BricardCoeffs;
use crate::mobius::ProjReal;
use crate::poly::{chain_ratio, ratio_chain_holds, UniPoly, Var};
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CouplingError {
    #[error("quad {0} of the coupling is singular")]
    Singular(usize),
    #[error("pseudo-planar classification needs F1 in {{0, inf}}")]
    NotPseudoPlanar,
    #[error("general-type classification needs F1 finite and nonzero")]
    NotGeneralType,
    #[error("class {0} is not equimodular")]
    NotEquimodular(CouplingLabel),
}

/// The seven coupling classes, plus the undivided equimodular class of general type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CouplingLabel {
    PurelyRational,
    HalfQuadratic,
    InvolutiveRational,
    RationalQuadratic,
    PurelyQuadratic,
    InvolutiveQuadratic,
    Quartic,
    EquimodularGeneral,
}

impl CouplingLabel {
    pub fn short(&self) -> &'static str {
        match self {
            CouplingLabel::PurelyRational => "PR",
            CouplingLabel::HalfQuadratic => "HQ",
            CouplingLabel::InvolutiveRational => "IR",
            CouplingLabel::RationalQuadratic => "RQ",
            CouplingLabel::PurelyQuadratic => "PQ",
            CouplingLabel::InvolutiveQuadratic => "IQ",
            CouplingLabel::Quartic => "Q",
            CouplingLabel::EquimodularGeneral => "EQ(g)",
        }
    }

    pub fn is_equimodular(&self) -> bool {
        matches!(
            self,
            CouplingLabel::InvolutiveRational
                | CouplingLabel::RationalQuadratic
                | CouplingLabel::PurelyQuadratic
                | CouplingLabel::EquimodularGeneral
        )
    }
}

impl fmt::Display for CouplingLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CouplingLabel::PurelyRational => "purely-rational",
            CouplingLabel::HalfQuadratic => "half-quadratic",
            CouplingLabel::InvolutiveRational => "involutive-rational",
            CouplingLabel::RationalQuadratic => "rational-quadratic",
            CouplingLabel::PurelyQuadratic => "purely-quadratic",
            CouplingLabel::InvolutiveQuadratic => "involutive-quadratic",
            CouplingLabel::Quartic => "quartic",
            CouplingLabel::EquimodularGeneral => "equimodular(general)",
        })
    }
}

/// Two consecutive quads with their gaps.
#[derive(Debug, Clone, PartialEq)]
pub struct Coupling<S> {
    pub g1: BricardCoeffs<S>,
    pub g2: BricardCoeffs<S>,
    pub f1: ProjReal<S>,
    pub f2: ProjReal<S>,
}

/// Re-checkable record of which conditions fired.
#[derive(Debug, Clone, PartialEq)]
pub struct Evidence<S> {
    pub reducible: [bool; 2],
    /// F1 = ∞ was folded into F1 = 0 by switching the coefficients of g1.
    pub switched: bool,
    /// First chain `a1/a2 = b1/c2 = b2/c1 = e2/e1 = k`; factor (k x1 − y2)².
    pub chain1_k: Option<S>,
    /// Second chain `a1/b2 = b1/e2 = a2/c1 = c2/e1 = 1/k′`; factor (x1 y2 − k′)².
    pub chain2_k: Option<S>,
    /// Which purely-quadratic system held (1, 2 or 3).
    pub pq_branch: Option<u8>,
    /// Common value m² of the first purely-quadratic system.
    pub m2: Option<S>,
    /// Common ratio a1/b1 of the involutive-quadratic system.
    pub iq_ratio: Option<S>,
    /// Which general-type involutive-quadratic system held (1 or 2).
    pub iq_branch: Option<u8>,
}

impl<S> Default for Evidence<S> {
    fn default() -> Self {
        Evidence {
            reducible: [false; 2],
            switched: false,
            chain1_k: None,
            chain2_k: None,
            pq_branch: None,
            m2: None,
            iq_ratio: None,
            iq_branch: None,
        }
    }
}

impl<S: Scalar> Evidence<S> {
    /// Human-readable lines for reports.
    pub fn lines(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.switched {
            out.push("F1 = inf: coefficients of g1 switched".into());
        }
        match self.reducible {
            [true, true] => out.push("both quads reducible".into()),
            [true, false] => out.push("first quad reducible".into()),
            [false, true] => out.push("second quad reducible".into()),
            _ => {}
        }
        if let Some(k) = &self.chain1_k {
            out.push(format!("chain a1/a2=b1/c2=b2/c1=e2/e1 holds, k = {k}"));
        }
        if let Some(k) = &self.chain2_k {
            out.push(format!("chain a1/b2=b1/e2=a2/c1=c2/e1 holds, k' = {k}"));
        }
        if let Some(b) = self.pq_branch {
            match &self.m2 {
                Some(m2) => out.push(format!("purely-quadratic system {b} holds, m^2 = {m2}")),
                None => out.push(format!("purely-quadratic system {b} holds")),
            }
        }
        if let Some(r) = &self.iq_ratio {
            out.push(format!("involutive-quadratic chain holds, ratio = {r}"));
        }
        if let Some(b) = self.iq_branch {
            out.push(format!("general involutive-quadratic system {b}"));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CouplingClass<S> {
    pub label: CouplingLabel,
    pub evidence: Evidence<S>,
}

impl<S: Scalar> Coupling<S> {
    pub fn new(
        g1: BricardCoeffs<S>,
        g2: BricardCoeffs<S>,
        f1: ProjReal<S>,
        f2: ProjReal<S>,
    ) -> Self {
        Coupling { g1, g2, f1, f2 }
    }

    pub fn check_nonsingular(&self) -> Result<(), CouplingError> {
        if self.g1.is_singular() {
            return Err(CouplingError::Singular(1));
        }
        if self.g2.is_singular() {
            return Err(CouplingError::Singular(2));
        }
        Ok(())
    }

    pub fn is_pseudo_planar(&self) -> bool {
        self.f1.is_pseudo_planar()
    }

    /// g1 with the F1 = ∞ switch applied, so that pseudo-planar logic sees F1 = 0.
    pub fn effective_g1(&self) -> BricardCoeffs<S> {
        if self.f1.is_infinite() {
            self.g1.switched()
        } else {
            self.g1.clone()
        }
    }

    /// The same pseudo-planar coupling read backwards: (g2ᵀ, g̃1ᵀ), gap 0.
    pub fn reversed(&self) -> Result<Self, CouplingError> {
        if !self.is_pseudo_planar() {
            return Err(CouplingError::NotPseudoPlanar);
        }
        Ok(Coupling::new(
            self.g2.transposed(),
            self.effective_g1().transposed(),
            ProjReal::zero(),
            ProjReal::zero(),
        ))
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T + Copy) -> Coupling<T> {
        Coupling::new(
            self.g1.map(f),
            self.g2.map(f),
            self.f1.map(f),
            self.f2.map(f),
        )
    }

    pub fn to_f64(&self) -> Coupling<f64> {
        self.map(Scalar::to_f64)
    }
}

fn p_of<S: Scalar>(g: &BricardCoeffs<S>) -> S {
    let four = S::from_i64(4);
    S::one() - four.clone() * g.a.clone() * g.e.clone() - four * g.b.clone() * g.c.clone()
}

/// Common ratio of a rank-1 chain that is finite and nonzero.
fn finite_chain<S: Scalar>(nums: &[S], dens: &[S]) -> Option<S> {
    if !ratio_chain_holds(nums, dens) {
        return None;
    }
    let r = chain_ratio(nums, dens)?;
    (!r.is_zero()).then_some(r)
}

fn chain1<S: Scalar>(g1: &BricardCoeffs<S>, g2: &BricardCoeffs<S>) -> Option<S> {
    finite_chain(
        &[g1.a.clone(), g1.b.clone(), g2.b.clone(), g2.e.clone()],
        &[g2.a.clone(), g2.c.clone(), g1.c.clone(), g1.e.clone()],
    )
}

fn chain2<S: Scalar>(g1: &BricardCoeffs<S>, g2: &BricardCoeffs<S>) -> Option<S> {
    finite_chain(
        &[g1.a.clone(), g1.b.clone(), g2.a.clone(), g2.c.clone()],
        &[g2.b.clone(), g2.e.clone(), g1.c.clone(), g1.e.clone()],
    )
    .map(|r| S::one() / r)
}

/// First purely-quadratic chain `a1c1/(a2b2) = P1/P2 = b1e1/(c2e2)` and its value.
fn pq_chain<S: Scalar>(g1: &BricardCoeffs<S>, g2: &BricardCoeffs<S>) -> Option<S> {
    let nums = [
        g1.a.clone() * g1.c.clone(),
        p_of(g1),
        g1.b.clone() * g1.e.clone(),
    ];
    let dens = [
        g2.a.clone() * g2.b.clone(),
        p_of(g2),
        g2.c.clone() * g2.e.clone(),
    ];
    if !ratio_chain_holds(&nums, &dens) {
        return None;
    }
    chain_ratio(&nums, &dens)
}

fn pq_system<S: Scalar>(g1: &BricardCoeffs<S>, g2: &BricardCoeffs<S>) -> Option<(u8, Option<S>)> {
    if let Some(r) = pq_chain(g1, g2) {
        if !r.approx_eq(&S::one()) {
            return Some((1, Some(r)));
        }
    }
    let sixteen = S::from_i64(16);
    let (p1, p2) = (p_of(g1), p_of(g2));
    let be1 = g1.b.clone() * g1.e.clone();
    let ab2 = g2.a.clone() * g2.b.clone();
    let ac1 = g1.a.clone() * g1.c.clone();
    let ce2 = g2.c.clone() * g2.e.clone();
    let cross = p1 * p2;
    if be1.is_zero()
        && ab2.is_zero()
        && (sixteen.clone() * ac1.clone() * ce2.clone()).approx_eq(&cross)
    {
        return Some((2, None));
    }
    if ac1.is_zero() && ce2.is_zero() && (sixteen * be1 * ab2).approx_eq(&cross) {
        return Some((3, None));
    }
    None
}

/// `a1/b1 = c1/e1 = a2/c2 = b2/e2`, returning the common ratio.
fn iq_chain<S: Scalar>(g1: &BricardCoeffs<S>, g2: &BricardCoeffs<S>) -> Option<S> {
    finite_chain(
        &[g1.a.clone(), g1.c.clone(), g2.a.clone(), g2.b.clone()],
        &[g1.b.clone(), g1.e.clone(), g2.c.clone(), g2.e.clone()],
    )
}

fn reducibility<S: Scalar>(c: &Coupling<S>) -> Option<(CouplingLabel, Evidence<S>)> {
    let reducible = [c.g1.is_reducible(), c.g2.is_reducible()];
    let ev = Evidence {
        reducible,
        switched: c.f1.is_infinite(),
        ..Evidence::default()
    };
    match reducible {
        [true, true] => Some((CouplingLabel::PurelyRational, ev)),
        [true, false] | [false, true] => Some((CouplingLabel::HalfQuadratic, ev)),
        _ => None,
    }
}

/// Classify a coupling with F1 ∈ {0, ∞}.
pub fn classify_pseudo_planar<S: Scalar>(
    c: &Coupling<S>,
) -> Result<CouplingClass<S>, CouplingError> {
    c.check_nonsingular()?;
    if !c.is_pseudo_planar() {
        return Err(CouplingError::NotPseudoPlanar);
    }
    if let Some((label, evidence)) = reducibility(c) {
        return Ok(CouplingClass { label, evidence });
    }
    let g1 = c.effective_g1().snapped();
    let g2 = c.g2.snapped();
    let mut ev = Evidence {
        switched: c.f1.is_infinite(),
        ..Evidence::default()
    };
    ev.chain1_k = chain1(&g1, &g2);
    ev.chain2_k = chain2(&g1, &g2);
    let label = match (&ev.chain1_k, &ev.chain2_k) {
        (Some(_), Some(_)) => CouplingLabel::InvolutiveRational,
        (Some(_), None) | (None, Some(_)) => CouplingLabel::RationalQuadratic,
        (None, None) => {
            if let Some((branch, m2)) = pq_system(&g1, &g2) {
                ev.pq_branch = Some(branch);
                ev.m2 = m2;
                CouplingLabel::PurelyQuadratic
            } else if let Some(r) = iq_chain(&g1, &g2).filter(|_| {
                !(g1.a.clone() * g1.c.clone()).approx_eq(&(g2.a.clone() * g2.b.clone()))
            }) {
                ev.iq_ratio = Some(r);
                CouplingLabel::InvolutiveQuadratic
            } else {
                CouplingLabel::Quartic
            }
        }
    };
    Ok(CouplingClass {
        label,
        evidence: ev,
    })
}

/// Classify a coupling with F1 finite and nonzero.
pub fn classify_general<S: Scalar>(c: &Coupling<S>) -> Result<CouplingClass<S>, CouplingError> {
    c.check_nonsingular()?;
    if c.f1.is_pseudo_planar() {
        return Err(CouplingError::NotGeneralType);
    }
    if let Some((label, evidence)) = reducibility(c) {
        return Ok(CouplingClass { label, evidence });
    }
    let g1 = c.g1.snapped();
    let g2 = c.g2.snapped();
    let mut ev = Evidence::default();
    let unit = c.f1.is_unit();
    let ac1 = g1.a.clone() * g1.c.clone();
    let ab2 = g2.a.clone() * g2.b.clone();
    let eight = S::from_i64(8);
    let q1 = p_of(&g1) - eight.clone() * ac1.clone();
    let q2 = p_of(&g2) - eight * ab2.clone();
    let k256 = S::from_i64(256) * ac1.clone() * ab2.clone();
    let equimodular = unit
        && ac1.approx_eq(&(g1.b.clone() * g1.e.clone()))
        && ab2.approx_eq(&(g2.c.clone() * g2.e.clone()))
        && (q1 * q2).approx_eq(&k256);
    if equimodular {
        return Ok(CouplingClass {
            label: CouplingLabel::EquimodularGeneral,
            evidence: ev,
        });
    }
    let minus_one = -S::one();
    let iq = iq_chain(&g1, &g2).filter(|r| r.approx_eq(&minus_one));
    if let Some(r) = iq {
        let branch = if !unit {
            Some(1)
        } else if !k256.approx_eq(&S::one()) {
            Some(2)
        } else {
            None
        };
        if let Some(b) = branch {
            ev.iq_ratio = Some(r);
            ev.iq_branch = Some(b);
            return Ok(CouplingClass {
                label: CouplingLabel::InvolutiveQuadratic,
                evidence: ev,
            });
        }
    }
    Ok(CouplingClass {
        label: CouplingLabel::Quartic,
        evidence: ev,
    })
}

/// Dispatch on the gap F1.
pub fn classify<S: Scalar>(c: &Coupling<S>) -> Result<CouplingClass<S>, CouplingError> {
    if c.is_pseudo_planar() {
        classify_pseudo_planar(c)
    } else {
        classify_general(c)
    }
}

/// Discriminants of g1 (in y1), g̃1 (in x2) and g2 (in x2).
#[derive(Debug, Clone, PartialEq)]
pub struct Discriminants<S> {
    pub d1_prime: UniPoly<S>,
    pub d1: UniPoly<S>,
    pub d2: UniPoly<S>,
}

fn quartic_even<S: Scalar>(var: Var, c4: S, c2: S, c0: S) -> UniPoly<S> {
    UniPoly::new(var, vec![c0, S::zero(), c2, S::zero(), c4])
}

pub fn discriminants<S: Scalar>(c: &Coupling<S>) -> Discriminants<S> {
    let four = S::from_i64(4);
    let (g1, g2) = (&c.g1, &c.g2);
    let d1_prime = quartic_even(
        Var::y(1),
        -four.clone() * g1.a.clone() * g1.c.clone(),
        p_of(g1),
        -four.clone() * g1.b.clone() * g1.e.clone(),
    );
    let d2 = quartic_even(
        Var::x(2),
        -four.clone() * g2.a.clone() * g2.b.clone(),
        p_of(g2),
        -four * g2.c.clone() * g2.e.clone(),
    );
    // y1 = N/Dn with N = x + F, Dn = 1 − F x (N = −1, Dn = x for F = ∞).
    let x = Var::x(2);
    let (num, den) = match &c.f1 {
        ProjReal::Finite(f) => (
            UniPoly::new(x, vec![f.clone(), S::one()]),
            UniPoly::new(x, vec![S::one(), -f.clone()]),
        ),
        ProjReal::Infinity => (
            UniPoly::new(x, vec![-S::one()]),
            UniPoly::new(x, vec![S::zero(), S::one()]),
        ),
    };
    let mut d1 = UniPoly::new(x, vec![S::zero()]);
    for k in 0..=4 {
        let ck = d1_prime.coeff(k);
        if ck.is_zero() {
            continue;
        }
        d1 = d1.add(&num.pow(k as u32).mul(&den.pow(4 - k as u32)).scale(&ck));
    }
    Discriminants { d1_prime, d1, d2 }
}

/// Whether an equimodular coupling can carry a real component.
pub fn has_real_components<S: Scalar>(
    c: &Coupling<S>,
    cls: &CouplingClass<S>,
) -> Result<bool, CouplingError> {
    if !cls.label.is_equimodular() {
        return Err(CouplingError::NotEquimodular(cls.label));
    }
    if !c.is_pseudo_planar() {
        return Ok(false);
    }
    let g1 = c.effective_g1();
    Ok(pq_chain(&g1, &c.g2).is_some_and(|r| r.is_positive()))
}
