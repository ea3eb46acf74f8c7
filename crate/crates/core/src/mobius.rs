//! Projective 2x2 matrices acting on the real projective line.

use crate::poly::ratio_chain_holds;
use crate::scalar::Scalar;

/// A point of the projective line: finite value or the distinct infinity tag.
#[derive(Debug, Clone, PartialEq)]
pub enum ProjReal<S> {
    Finite(S),
    Infinity,
}

impl<S: Scalar> ProjReal<S> {
    pub fn zero() -> Self {
        ProjReal::Finite(S::zero())
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ProjReal::Infinity)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ProjReal::Finite(x) if x.is_zero())
    }

    /// Pseudo-planar gaps are 0 or infinity.
    pub fn is_pseudo_planar(&self) -> bool {
        self.is_infinite() || self.is_zero()
    }

    /// F = +1 or F = -1.
    pub fn is_unit(&self) -> bool {
        matches!(self, ProjReal::Finite(x) if (x.clone() * x.clone()).approx_eq(&S::one()))
    }

    pub fn finite(&self) -> Option<&S> {
        match self {
            ProjReal::Finite(x) => Some(x),
            ProjReal::Infinity => None,
        }
    }

    pub fn neg(&self) -> Self {
        match self {
            ProjReal::Finite(x) => ProjReal::Finite(-x.clone()),
            ProjReal::Infinity => ProjReal::Infinity,
        }
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> ProjReal<T> {
        match self {
            ProjReal::Finite(x) => ProjReal::Finite(f(x)),
            ProjReal::Infinity => ProjReal::Infinity,
        }
    }

    pub fn to_f64(&self) -> ProjReal<f64> {
        self.map(Scalar::to_f64)
    }

    /// Angle `2 atan(F)` in (-pi, pi], infinity mapping to pi.
    pub fn angle(&self) -> f64 {
        match self {
            ProjReal::Finite(x) => 2.0 * x.to_f64().atan(),
            ProjReal::Infinity => std::f64::consts::PI,
        }
    }

    /// `tan(theta / 2)`, with the half-angle pi/2 (mod pi) mapped to infinity.
    pub fn from_angle(theta: f64) -> ProjReal<f64> {
        let c = (theta / 2.0).cos();
        if c.abs() < 1e-15 {
            ProjReal::Infinity
        } else {
            ProjReal::Finite((theta / 2.0).tan())
        }
    }
}

/// `x -> (p x + q) / (r x + s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mobius<S> {
    pub m: [[S; 2]; 2],
}

impl<S: Scalar> Mobius<S> {
    pub fn new(p: S, q: S, r: S, s: S) -> Self {
        Mobius {
            m: [[p, q], [r, s]],
        }
    }

    pub fn identity() -> Self {
        Mobius::new(S::one(), S::zero(), S::zero(), S::one())
    }

    pub fn det(&self) -> S {
        let [[p, q], [r, s]] = &self.m;
        p.clone() * s.clone() - q.clone() * r.clone()
    }

    /// Matrix product `self * other` (apply `other` first).
    pub fn after(&self, other: &Self) -> Self {
        let a = &self.m;
        let b = &other.m;
        let e = |i: usize, j: usize| {
            a[i][0].clone() * b[0][j].clone() + a[i][1].clone() * b[1][j].clone()
        };
        Mobius::new(e(0, 0), e(0, 1), e(1, 0), e(1, 1))
    }

    /// Classical adjoint; projectively the inverse.
    pub fn adjugate(&self) -> Self {
        let [[p, q], [r, s]] = &self.m;
        Mobius::new(s.clone(), -q.clone(), -r.clone(), p.clone())
    }

    pub fn apply(&self, x: &ProjReal<S>) -> ProjReal<S> {
        let [[p, q], [r, s]] = &self.m;
        let (num, den) = match x {
            ProjReal::Finite(x) => (
                p.clone() * x.clone() + q.clone(),
                r.clone() * x.clone() + s.clone(),
            ),
            ProjReal::Infinity => (p.clone(), r.clone()),
        };
        if den.is_zero() {
            ProjReal::Infinity
        } else {
            ProjReal::Finite(num / den)
        }
    }

    pub fn is_scalar(&self) -> bool {
        let [[p, q], [r, s]] = &self.m;
        q.is_zero() && r.is_zero() && p.approx_eq(s) && !p.is_zero()
    }

    /// Equality up to a nonzero scalar multiple.
    pub fn proj_eq(&self, other: &Self) -> bool {
        let a: Vec<S> = self.m.iter().flatten().cloned().collect();
        let b: Vec<S> = other.m.iter().flatten().cloned().collect();
        ratio_chain_holds(&a, &b)
    }

    pub fn to_f64(&self) -> Mobius<f64> {
        let [[p, q], [r, s]] = &self.m;
        Mobius::new(p.to_f64(), q.to_f64(), r.to_f64(), s.to_f64())
    }
}

/// Product of the matrices in application order: `ms[0]` acts first.
pub fn mobius_compose<S: Scalar>(ms: &[Mobius<S>]) -> Mobius<S> {
    ms.iter().fold(Mobius::identity(), |acc, m| m.after(&acc))
}

pub fn mobius_is_scalar<S: Scalar>(m: &Mobius<S>) -> bool {
    m.is_scalar()
}
