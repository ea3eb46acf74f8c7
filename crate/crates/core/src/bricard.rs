//! Spherical quads and their Bricard polynomials.
//!
//! A quad with arcs (λ, γ, μ, δ) couples the half-angle tangents
//! `x = tan(α/2)`, `y = tan(β/2)` of its two flexible angles through
//! `g(x, y) = a x²y² + b x² + c y² + xy + e = 0`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mobius::{Mobius, ProjReal};
use crate::poly::{BiPoly, Var};
use crate::scalar::{tolerance, Scalar};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BricardError {
    #[error("angle {name} = {value} is outside the open interval (0, pi)")]
    AngleDomain { name: &'static str, value: f64 },
    #[error("quad is singular ((anti)deltoid): ae = 0 and bc = 0")]
    Singular,
    #[error("quad is not reducible")]
    NotReducible,
    #[error("roots of {0} are irrational; rerun in float mode")]
    IrrationalRoots(String),
    #[error("roots of {0} are complex")]
    ComplexRoots(String),
}

/// Arc lengths of a spherical quad, radians, each in (0, π).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadAngles {
    pub lambda: f64,
    pub gamma: f64,
    pub mu: f64,
    pub delta: f64,
}

impl QuadAngles {
    pub fn new(lambda: f64, gamma: f64, mu: f64, delta: f64) -> Result<Self, BricardError> {
        let q = QuadAngles {
            lambda,
            gamma,
            mu,
            delta,
        };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<(), BricardError> {
        for (name, value) in [
            ("lambda", self.lambda),
            ("gamma", self.gamma),
            ("mu", self.mu),
            ("delta", self.delta),
        ] {
            if !(value > 0.0 && value < PI) {
                return Err(BricardError::AngleDomain { name, value });
            }
        }
        Ok(())
    }
}

/// Fixed dihedral offsets at a hinge; only their sum matters algebraically.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapAngles {
    pub tau: f64,
    pub zeta: f64,
}

impl GapAngles {
    /// `F = tan((ζ + τ)/2)`.
    pub fn gap(&self) -> ProjReal<f64> {
        ProjReal::<f64>::from_angle(self.tau + self.zeta)
    }

    /// Default split: everything in τ.
    pub fn default_for(f: &ProjReal<f64>) -> Self {
        GapAngles {
            tau: f.angle(),
            zeta: 0.0,
        }
    }
}

/// Normalized Bricard coefficients (middle coefficient fixed at 1).
#[derive(Debug, Clone, PartialEq)]
pub struct BricardCoeffs<S> {
    pub a: S,
    pub b: S,
    pub c: S,
    pub e: S,
}

/// A violated admissibility inequality.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Inequality {
    /// (1 − 4ae − 4bc)² > 64abce
    Discriminant,
    /// (a − b)(e − c) < 1/4
    FirstPair,
    /// (a − c)(e − b) < 1/4
    SecondPair,
}

impl fmt::Display for Inequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Inequality::Discriminant => "(1-4ae-4bc)^2 > 64abce",
            Inequality::FirstPair => "(a-b)(e-c) < 1/4",
            Inequality::SecondPair => "(a-c)(e-b) < 1/4",
        })
    }
}

/// Which linear factors a reducible quad splits into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SplitKind {
    /// a = e = 0: g = c(kx − y)(k′x − y), branches y = kx.
    Antiisogram,
    /// b = c = 0: g = a(xy − k)(xy − k′), branches xy = k.
    Isogram,
}

/// Explicit factorization of a reducible quad.
#[derive(Debug, Clone, PartialEq)]
pub struct Split<S> {
    pub kind: SplitKind,
    /// `c` for antiisograms, `a` for isograms.
    pub lead: S,
    pub roots: [S; 2],
}

impl<S: Scalar> Split<S> {
    /// The linear factor for branch `i`, in the pair `vars = (x, y)`.
    pub fn factor(&self, i: usize, vars: (Var, Var)) -> BiPoly<S> {
        let k = self.roots[i].clone();
        match self.kind {
            SplitKind::Antiisogram => BiPoly::from_terms(vars, &[(1, 0, k), (0, 1, -S::one())]),
            SplitKind::Isogram => BiPoly::from_terms(vars, &[(1, 1, S::one()), (0, 0, -k)]),
        }
    }

    /// `{lead·f₀, f₁}` so that the product is exactly g.
    pub fn factors(&self, vars: (Var, Var)) -> (BiPoly<S>, BiPoly<S>) {
        (self.factor(0, vars).scale(&self.lead), self.factor(1, vars))
    }

    /// Branch `i` as a map x -> y.
    pub fn branch_map(&self, i: usize) -> Mobius<S> {
        let k = self.roots[i].clone();
        match self.kind {
            SplitKind::Antiisogram => Mobius::new(k, S::zero(), S::zero(), S::one()),
            SplitKind::Isogram => Mobius::new(S::zero(), k, S::one(), S::zero()),
        }
    }
}

impl<S: Scalar> BricardCoeffs<S> {
    pub fn new(a: S, b: S, c: S, e: S) -> Self {
        BricardCoeffs { a, b, c, e }
    }

    pub fn as_array(&self) -> [S; 4] {
        [
            self.a.clone(),
            self.b.clone(),
            self.c.clone(),
            self.e.clone(),
        ]
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> BricardCoeffs<T> {
        BricardCoeffs {
            a: f(&self.a),
            b: f(&self.b),
            c: f(&self.c),
            e: f(&self.e),
        }
    }

    pub fn to_f64(&self) -> BricardCoeffs<f64> {
        self.map(Scalar::to_f64)
    }

    /// `g` in the pair `vars = (x, y)`.
    pub fn poly(&self, vars: (Var, Var)) -> BiPoly<S> {
        BiPoly::from_terms(
            vars,
            &[
                (2, 2, self.a.clone()),
                (2, 0, self.b.clone()),
                (0, 2, self.c.clone()),
                (1, 1, S::one()),
                (0, 0, self.e.clone()),
            ],
        )
    }

    pub fn eval(&self, x: &S, y: &S) -> S {
        let (x2, y2) = (x.clone() * x.clone(), y.clone() * y.clone());
        self.a.clone() * x2.clone() * y2.clone()
            + self.b.clone() * x2
            + self.c.clone() * y2
            + x.clone() * y.clone()
            + self.e.clone()
    }

    /// Coefficients after the F = ∞ switch: −b x²x′² − a x² − e x′² + xx′ − c.
    pub fn switched(&self) -> Self {
        BricardCoeffs::new(
            -self.b.clone(),
            -self.a.clone(),
            -self.e.clone(),
            -self.c.clone(),
        )
    }

    /// Coefficients with y ↔ x swapped (b ↔ c).
    pub fn transposed(&self) -> Self {
        BricardCoeffs::new(
            self.a.clone(),
            self.c.clone(),
            self.b.clone(),
            self.e.clone(),
        )
    }

    /// Float mode: coefficients negligible against max(1, |coeffs|) become exact zeros.
    pub fn snapped(&self) -> Self {
        if S::EXACT {
            return self.clone();
        }
        let scale = self.as_array().iter().map(Scalar::mag).fold(1.0, f64::max);
        let eps = tolerance().abs * scale;
        self.map(|x| if x.mag() <= eps { S::zero() } else { x.clone() })
    }

    /// Inequalities from the admissibility definition that fail.
    pub fn violated_inequalities(&self) -> Vec<Inequality> {
        let (a, b, c, e) = (
            self.a.clone(),
            self.b.clone(),
            self.c.clone(),
            self.e.clone(),
        );
        let four = S::from_i64(4);
        let quarter = S::from_ratio(1, 4);
        let mut out = Vec::new();
        let p = S::one() - four.clone() * a.clone() * e.clone() - four * b.clone() * c.clone();
        let lhs = p.clone() * p;
        let rhs = S::from_i64(64) * a.clone() * b.clone() * c.clone() * e.clone();
        if !strictly_less(&rhs, &lhs) {
            out.push(Inequality::Discriminant);
        }
        let p1 = (a.clone() - b.clone()) * (e.clone() - c.clone());
        if !strictly_less(&p1, &quarter) {
            out.push(Inequality::FirstPair);
        }
        let p2 = (a - c) * (e - b);
        if !strictly_less(&p2, &quarter) {
            out.push(Inequality::SecondPair);
        }
        out
    }

    pub fn is_admissible(&self) -> bool {
        self.violated_inequalities().is_empty()
    }

    /// ae = 0 and bc = 0.
    pub fn is_singular(&self) -> bool {
        let s = self.snapped();
        (s.a.is_zero() || s.e.is_zero()) && (s.b.is_zero() || s.c.is_zero())
    }

    /// For non-singular input: a = e = 0 or b = c = 0.
    pub fn is_reducible(&self) -> bool {
        let s = self.snapped();
        (s.a.is_zero() && s.e.is_zero()) || (s.b.is_zero() && s.c.is_zero())
    }

    pub fn split_kind(&self) -> Option<SplitKind> {
        if self.is_singular() {
            return None;
        }
        let s = self.snapped();
        if s.a.is_zero() && s.e.is_zero() {
            Some(SplitKind::Antiisogram)
        } else if s.b.is_zero() && s.c.is_zero() {
            Some(SplitKind::Isogram)
        } else {
            None
        }
    }

    /// Linear factors of a reducible, non-singular quad.
    pub fn factor_reducible(&self) -> Result<Split<S>, BricardError> {
        if self.is_singular() {
            return Err(BricardError::Singular);
        }
        let kind = self.split_kind().ok_or(BricardError::NotReducible)?;
        // Antiisogram: k roots of c t² + t + b; isogram: of a t² + t + e.
        let (lead, konst, label) = match kind {
            SplitKind::Antiisogram => (self.c.clone(), self.b.clone(), "c t^2 + t + b"),
            SplitKind::Isogram => (self.a.clone(), self.e.clone(), "a t^2 + t + e"),
        };
        let disc = S::one() - S::from_i64(4) * lead.clone() * konst;
        let root = match disc.sqrt() {
            Some(r) => r,
            None if S::EXACT && disc.to_f64() >= 0.0 => {
                return Err(BricardError::IrrationalRoots(label.into()))
            }
            None => return Err(BricardError::ComplexRoots(label.into())),
        };
        let two_lead = S::from_i64(2) * lead.clone();
        let k0 = (-S::one() + root.clone()) / two_lead.clone();
        let k1 = (-S::one() - root) / two_lead;
        Ok(Split {
            kind,
            lead,
            roots: [k0, k1],
        })
    }
}

fn strictly_less<S: Scalar>(x: &S, y: &S) -> bool {
    if S::EXACT {
        (y.clone() - x.clone()).is_positive()
    } else {
        x.to_f64() < y.to_f64()
    }
}

/// Bricard coefficients of an angle quadruple.
pub fn coeffs_from_angles(q: &QuadAngles) -> Result<BricardCoeffs<f64>, BricardError> {
    q.validate()?;
    let QuadAngles {
        lambda: l,
        gamma: g,
        mu: m,
        delta: d,
    } = *q;
    let cm = m.cos();
    let dd = 4.0 * g.sin() * d.sin();
    Ok(BricardCoeffs::new(
        ((l + g + d).cos() - cm) / dd,
        ((l + g - d).cos() - cm) / dd,
        ((l - g + d).cos() - cm) / dd,
        ((l - g - d).cos() - cm) / dd,
    ))
}

/// Result of inverting [`coeffs_from_angles`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoveredAngles {
    pub angles: QuadAngles,
    /// False for the all-zero coefficients, whose preimage is a family.
    pub unique: bool,
}

/// Recover arcs from coefficients, or `None` when some value leaves its domain.
pub fn angles_from_coeffs(cfs: &BricardCoeffs<f64>) -> Option<RecoveredAngles> {
    let BricardCoeffs { a, b, c, e } = *cfs;
    let cos_l = b + c - a - e;
    if !(cos_l.abs() < 1.0) {
        return None;
    }
    let lambda = cos_l.acos();
    let sin_l = lambda.sin();
    let acot = |x: f64| FRAC_PI_2 - x.atan();
    let gamma = acot((b - c - a + e) / sin_l);
    let delta = acot((c + e - a - b) / sin_l);
    let dd = 4.0 * gamma.sin() * delta.sin();
    let cos_m = (lambda + gamma + delta).cos() - a * dd;
    if !(cos_m.abs() < 1.0) {
        return None;
    }
    let angles = QuadAngles {
        lambda,
        gamma,
        mu: cos_m.acos(),
        delta,
    };
    angles.validate().ok()?;
    let unique = [a, b, c, e].iter().any(|x| *x != 0.0);
    Some(RecoveredAngles { angles, unique })
}

/// `H(y, x′)` in the pair `vars = (y, x′)`.
pub fn gap_poly<S: Scalar>(f: &ProjReal<S>, vars: (Var, Var)) -> BiPoly<S> {
    match f {
        ProjReal::Finite(f) => BiPoly::from_terms(
            vars,
            &[
                (1, 0, S::one()),
                (1, 1, -f.clone()),
                (0, 0, -f.clone()),
                (0, 1, -S::one()),
            ],
        ),
        ProjReal::Infinity => BiPoly::from_terms(vars, &[(1, 1, S::one()), (0, 0, S::one())]),
    }
}

/// The map y -> x′ defined by `H(y, x′) = 0`.
pub fn gap_map<S: Scalar>(f: &ProjReal<S>) -> Mobius<S> {
    match f {
        // y(1 − F x′) = F + x′  ⇒  x′ = (y − F)/(F y + 1)
        ProjReal::Finite(f) => Mobius::new(S::one(), -f.clone(), f.clone(), S::one()),
        ProjReal::Infinity => Mobius::new(S::zero(), -S::one(), S::one(), S::zero()),
    }
}

/// Coefficients `(h₂, h₁, h₀)` of `g̃ = h₂x′² + h₁x′ + h₀`, each a quadratic in x
/// given as `[const, x, x²]`.
pub fn eliminated_parts<S: Scalar>(cfs: &BricardCoeffs<S>, f: &ProjReal<S>) -> [[S; 3]; 3] {
    let BricardCoeffs { a, b, c, e } = cfs.clone();
    match f {
        ProjReal::Finite(f) => {
            let f2 = f.clone() * f.clone();
            let two_f = S::from_i64(2) * f.clone();
            [
                [
                    e.clone() * f2.clone() + c.clone(),
                    -f.clone(),
                    b.clone() * f2.clone() + a.clone(),
                ],
                [
                    two_f.clone() * (c.clone() - e.clone()),
                    S::one() - f2.clone(),
                    two_f * (a.clone() - b.clone()),
                ],
                [c * f2.clone() + e, f.clone(), a * f2 + b],
            ]
        }
        ProjReal::Infinity => {
            let z = S::zero();
            [
                [-e, z.clone(), -b],
                [z.clone(), S::one(), z],
                [-c, S::zero(), -a],
            ]
        }
    }
}

/// `g̃(x, x′) = Res(g, H; y)` in closed form, in the pair `vars = (x, x′)`.
///
/// For F = ∞ this is the coefficient-switched form, which equals minus the
/// Sylvester determinant.
pub fn eliminate_gap<S: Scalar>(
    cfs: &BricardCoeffs<S>,
    f: &ProjReal<S>,
    vars: (Var, Var),
) -> BiPoly<S> {
    let parts = eliminated_parts(cfs, f);
    let mut terms = Vec::new();
    for (j, h) in [(2usize, &parts[0]), (1, &parts[1]), (0, &parts[2])] {
        for (i, k) in h.iter().enumerate() {
            terms.push((i, j, k.clone()));
        }
    }
    BiPoly::from_terms(vars, &terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{proportional, sylvester_resultant};
    use crate::scalar::rat;
    use num_rational::BigRational as Q;

    fn q4(a: (i64, i64), b: (i64, i64), c: (i64, i64), e: (i64, i64)) -> BricardCoeffs<Q> {
        BricardCoeffs::new(rat(a.0, a.1), rat(b.0, b.1), rat(c.0, c.1), rat(e.0, e.1))
    }

    fn xx() -> (Var, Var) {
        (Var("x"), Var("x'"))
    }

    #[test]
    fn right_angle_quad_is_zero() {
        let c = coeffs_from_angles(
            &QuadAngles::new(FRAC_PI_2, FRAC_PI_2, FRAC_PI_2, FRAC_PI_2).unwrap(),
        )
        .unwrap();
        for x in c.as_array() {
            assert!(x.abs() < 1e-15);
        }
    }

    #[test]
    fn isogram_right_angles() {
        let q = QuadAngles::new(FRAC_PI_2, PI / 3.0, FRAC_PI_2, PI / 3.0).unwrap();
        let c = coeffs_from_angles(&q).unwrap();
        let s = 3f64.sqrt() / 6.0;
        assert!(
            (c.a + s).abs() < 1e-12
                && c.b.abs() < 1e-12
                && c.c.abs() < 1e-12
                && (c.e - s).abs() < 1e-12
        );
    }

    #[test]
    fn angle_domain_error() {
        assert!(matches!(
            QuadAngles::new(0.0, 1.0, 1.0, 1.0),
            Err(BricardError::AngleDomain { name: "lambda", .. })
        ));
        assert!(coeffs_from_angles(&QuadAngles {
            lambda: 1.0,
            gamma: PI,
            mu: 1.0,
            delta: 1.0
        })
        .is_err());
    }

    #[test]
    fn recovery_examples() {
        let z = angles_from_coeffs(&BricardCoeffs::new(0.0, 0.0, 0.0, 0.0)).unwrap();
        assert!(!z.unique);
        for x in [z.angles.lambda, z.angles.gamma, z.angles.mu, z.angles.delta] {
            assert!((x - FRAC_PI_2).abs() < 1e-15);
        }
        assert!(angles_from_coeffs(&BricardCoeffs::new(5.0, 5.0, 5.0, 5.0)).is_none());
    }

    #[test]
    fn gap_polys() {
        let yx = (Var("y"), Var("x'"));
        let h0 = gap_poly(&ProjReal::Finite(rat(0, 1)), yx);
        assert_eq!(
            h0,
            BiPoly::from_terms(yx, &[(1, 0, rat(1, 1)), (0, 1, rat(-1, 1))])
        );
        let hi = gap_poly::<Q>(&ProjReal::Infinity, yx);
        assert_eq!(
            hi,
            BiPoly::from_terms(yx, &[(1, 1, rat(1, 1)), (0, 0, rat(1, 1))])
        );
        let h1 = gap_poly(&ProjReal::Finite(rat(1, 1)), yx);
        // y(1 − x′) − (1 + x′)
        assert_eq!(
            h1,
            BiPoly::from_terms(
                yx,
                &[
                    (1, 0, rat(1, 1)),
                    (1, 1, rat(-1, 1)),
                    (0, 0, rat(-1, 1)),
                    (0, 1, rat(-1, 1))
                ]
            )
        );
    }

    #[test]
    fn elimination_examples() {
        let g = q4((1, 1), (1, 1), (-1, 1), (-1, 1));
        let t0 = eliminate_gap(&g, &ProjReal::Finite(rat(0, 1)), xx());
        let expect0 = BiPoly::from_terms(
            xx(),
            &[
                (2, 2, rat(1, 1)),
                (2, 0, rat(1, 1)),
                (0, 2, rat(-1, 1)),
                (1, 1, rat(1, 1)),
                (0, 0, rat(-1, 1)),
            ],
        );
        assert_eq!(t0, expect0);
        let ti = eliminate_gap(&g, &ProjReal::Infinity, xx());
        let expect_i = BiPoly::from_terms(
            xx(),
            &[
                (2, 2, rat(-1, 1)),
                (2, 0, rat(-1, 1)),
                (0, 2, rat(1, 1)),
                (1, 1, rat(1, 1)),
                (0, 0, rat(1, 1)),
            ],
        );
        assert_eq!(ti, expect_i);
        let t1 = eliminate_gap(&g, &ProjReal::Finite(rat(1, 1)), xx());
        // h₂ = 2x² − x − 2
        assert_eq!(t1.coeff(2, 2), rat(2, 1));
        assert_eq!(t1.coeff(1, 2), rat(-1, 1));
        assert_eq!(t1.coeff(0, 2), rat(-2, 1));
    }

    #[test]
    fn closed_form_matches_sylvester() {
        let g = q4((2, 3), (-1, 2), (5, 7), (3, 1));
        for f in [
            ProjReal::Finite(rat(0, 1)),
            ProjReal::Finite(rat(-7, 3)),
            ProjReal::Finite(rat(1, 1)),
            ProjReal::Infinity,
        ] {
            let syl = sylvester_resultant(
                &g.poly((Var("x"), Var("y"))),
                &gap_poly(&f, (Var("y"), Var("x'"))),
                Var("y"),
            )
            .unwrap();
            let closed = eliminate_gap(&g, &f, xx());
            if f.is_infinite() {
                assert_eq!(syl, closed.neg());
            } else {
                assert_eq!(syl, closed);
            }
            assert!(proportional(&syl, &closed));
        }
    }

    #[test]
    fn reducible_factorizations() {
        let g = q4((0, 1), (-2, 3), (-1, 3), (0, 1));
        assert!(g.is_reducible() && !g.is_singular());
        let s = g.factor_reducible().unwrap();
        let mut ks = s.roots.clone();
        ks.sort();
        assert_eq!(ks, [rat(1, 1), rat(2, 1)]);
        let vars = (Var("x"), Var("y"));
        let (f0, f1) = s.factors(vars);
        assert_eq!(f0.mul(&f1), g.poly(vars));

        let iso = BricardCoeffs::new(-3f64.sqrt() / 6.0, 0.0, 0.0, 3f64.sqrt() / 6.0);
        let s = iso.factor_reducible().unwrap();
        let mut ks = s.roots;
        ks.sort_by(f64::total_cmp);
        assert!((ks[0] + 0.2679491924311228).abs() < 1e-12);
        assert!((ks[1] - 3.732050807568877).abs() < 1e-12);
        assert!((ks[0] * ks[1] + 1.0).abs() < 1e-12);

        let g = q4((1, 1), (1, 1), (-1, 1), (-1, 1));
        assert!(!g.is_singular() && !g.is_reducible());
        assert_eq!(g.factor_reducible(), Err(BricardError::NotReducible));
        let sing = q4((1, 1), (1, 1), (0, 1), (0, 1));
        assert_eq!(sing.factor_reducible(), Err(BricardError::Singular));
    }

    #[test]
    fn irrational_roots_flagged() {
        // c t² + t + b with c = 1, b = -1: disc 5
        let g = q4((0, 1), (-1, 1), (1, 1), (0, 1));
        assert!(matches!(
            g.factor_reducible(),
            Err(BricardError::IrrationalRoots(_))
        ));
        assert!(g.to_f64().factor_reducible().is_ok());
    }

    #[test]
    fn inequality_report() {
        assert!(q4((1, 1), (1, 1), (-1, 1), (-1, 1)).is_admissible());
        // a = b = c = e = 1: (1-8)^2 = 49 < 64
        assert_eq!(
            q4((1, 1), (1, 1), (1, 1), (1, 1)).violated_inequalities(),
            vec![Inequality::Discriminant]
        );
        // (a-b)(e-c) = (2)(2) = 4
        let v = q4((2, 1), (0, 1), (0, 1), (2, 1)).violated_inequalities();
        assert!(v.contains(&Inequality::FirstPair));
    }
}
