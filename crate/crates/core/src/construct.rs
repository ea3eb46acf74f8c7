//! Certified flexible meshes for each of the eleven classes.
//!
//! Random constructors draw small-denominator rationals and reject draws that
//! violate admissibility, singularity or a class-specific nondegeneracy guard.
//! They never consult the flexibility test itself.

use num_rational::BigRational as Q;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::bricard::gap_map;
use crate::bricard::{BricardCoeffs, Inequality, SplitKind};
use crate::coupling::{classify, Coupling, CouplingLabel};
use crate::factorizer::{alpha_column3, omega_coupling, repara};
use crate::matching::{MatchingLabel, MeshSpec};
use crate::mobius::{Mobius, ProjReal};
use crate::scalar::rat;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConstructError {
    #[error("quad {quad} violates {}", list(.violated))]
    Inadmissible {
        quad: usize,
        violated: Vec<Inequality>,
    },
    #[error("quad {0} is singular")]
    Singular(usize),
    #[error("guard failed: {0}")]
    Guard(String),
    #[error("no admissible draw for {label} after {attempts} attempts (last: {last})")]
    Exhausted {
        label: String,
        attempts: usize,
        last: String,
    },
}

fn list(v: &[Inequality]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(", ")
}

type R = Result<MeshSpec<Q>, ConstructError>;

const ATTEMPTS: usize = 2000;

fn guard(ok: bool, what: &str) -> Result<(), ConstructError> {
    if ok {
        Ok(())
    } else {
        Err(ConstructError::Guard(what.into()))
    }
}

fn q(n: i64) -> Q {
    Q::from_integer(n.into())
}

fn zero_gaps() -> [ProjReal<Q>; 4] {
    std::array::from_fn(|_| ProjReal::zero())
}

/// Admissibility and non-singularity of every quad.
pub fn validate(m: &MeshSpec<Q>) -> Result<(), ConstructError> {
    for (i, g) in m.quads.iter().enumerate() {
        let violated = g.violated_inequalities();
        if !violated.is_empty() {
            return Err(ConstructError::Inadmissible {
                quad: i + 1,
                violated,
            });
        }
        if g.is_singular() {
            return Err(ConstructError::Singular(i + 1));
        }
    }
    Ok(())
}

fn validate_coupling(c: &Coupling<Q>) -> Result<(), ConstructError> {
    for (i, g) in [&c.g1, &c.g2].into_iter().enumerate() {
        let violated = g.violated_inequalities();
        if !violated.is_empty() {
            return Err(ConstructError::Inadmissible {
                quad: i + 1,
                violated,
            });
        }
        if g.is_singular() {
            return Err(ConstructError::Singular(i + 1));
        }
    }
    Ok(())
}

/// Nonzero rational `p/q` with `|p| <= num`, `1 <= q <= den`.
pub fn small_rational<G: Rng>(rng: &mut G, num: i64, den: i64) -> Q {
    loop {
        let p = rng.gen_range(-num..=num);
        if p != 0 {
            return rat(p, rng.gen_range(1..=den));
        }
    }
}

fn positive_rational<G: Rng>(rng: &mut G, num: i64, den: i64) -> Q {
    small_rational(rng, num, den).abs()
}

/// Admissible, non-singular, irreducible quad.
pub fn random_quad<G: Rng>(rng: &mut G) -> BricardCoeffs<Q> {
    loop {
        let g = BricardCoeffs::new(
            small_rational(rng, 6, 6),
            small_rational(rng, 6, 6),
            small_rational(rng, 6, 6),
            small_rational(rng, 6, 6),
        );
        if g.is_admissible() && !g.is_singular() && !g.is_reducible() {
            return g;
        }
    }
}

/// Reducible quad with branch roots `k`, `kp` (distinct, nonzero, `k + kp != 0`).
pub fn reducible_quad(kind: SplitKind, k: &Q, kp: &Q) -> Result<BricardCoeffs<Q>, ConstructError> {
    guard(
        !k.is_zero() && !kp.is_zero(),
        "branch roots must be nonzero",
    )?;
    guard(k != kp, "branch roots must be distinct")?;
    let s = k + kp;
    guard(!s.is_zero(), "branch roots must not sum to zero")?;
    let lead = -Q::one() / s;
    let konst = &lead * k * kp;
    Ok(match kind {
        SplitKind::Antiisogram => BricardCoeffs::new(Q::zero(), konst, lead, Q::zero()),
        SplitKind::Isogram => BricardCoeffs::new(lead, Q::zero(), Q::zero(), konst),
    })
}

/// `(a1/k, k c1, b1/k, k e1)`: first ratio chain with value k.
pub fn chain1_partner(g: &BricardCoeffs<Q>, k: &Q) -> BricardCoeffs<Q> {
    BricardCoeffs::new(&g.a / k, k * &g.c, &g.b / k, k * &g.e)
}

/// `(c1/k, k a1, e1/k, k b1)`: second ratio chain with value k.
pub fn chain2_partner(g: &BricardCoeffs<Q>, k: &Q) -> BricardCoeffs<Q> {
    BricardCoeffs::new(&g.c / k, k * &g.a, &g.e / k, k * &g.b)
}

/// Reflection mesh: `g3 = (a2, c2, b2, e2)`, `g4 = (a1, c1, b1, e1)`, `F = (F1, 0, −F1, 0)`.
pub fn reflect(seed: &Coupling<Q>) -> R {
    validate_coupling(seed)?;
    let m = reflection_mesh(seed);
    validate(&m)?;
    Ok(m)
}

/// [`reflect`] without the admissibility checks.
pub fn reflection_mesh(seed: &Coupling<Q>) -> MeshSpec<Q> {
    MeshSpec::new(
        [
            seed.g1.clone(),
            seed.g2.clone(),
            seed.g2.transposed(),
            seed.g1.transposed(),
        ],
        [
            seed.f1.clone(),
            ProjReal::zero(),
            seed.f1.neg(),
            ProjReal::zero(),
        ],
    )
}

fn seed_label(seed: &Coupling<Q>) -> Result<CouplingLabel, ConstructError> {
    classify(seed)
        .map(|c| c.label)
        .map_err(|e| ConstructError::Guard(e.to_string()))
}

/// Antiisograms with branch roots `ks` (product 1) and partner roots `kps`
/// (default `−2k`), all gaps zero.
pub fn construct_pr(ks: &[Q; 4], kps: Option<&[Q; 4]>) -> R {
    let prod = ks.iter().fold(Q::one(), |p, k| p * k);
    guard(prod.is_one(), "product of branch roots must be 1")?;
    let mut quads = Vec::with_capacity(4);
    for i in 0..4 {
        let kp = kps.map(|v| v[i].clone()).unwrap_or_else(|| -q(2) * &ks[i]);
        quads.push(reducible_quad(SplitKind::Antiisogram, &ks[i], &kp)?);
    }
    let m = MeshSpec::new(quads.try_into().expect("four quads"), zero_gaps());
    validate(&m)?;
    Ok(m)
}

/// Involutive-quadratic reflection mesh from `g1 = (a1, a1/r, c1, c1/r)`,
/// `g2 = (a2, b2, a2/r, b2/r)`.
pub fn construct_iq(a1: &Q, c1: &Q, a2: &Q, b2: &Q, r: &Q) -> R {
    guard(!r.is_zero(), "ratio must be nonzero")?;
    guard(a1 * c1 != a2 * b2, "a1 c1 != a2 b2")?;
    let g1 = BricardCoeffs::new(a1.clone(), a1 / r, c1.clone(), c1 / r);
    let g2 = BricardCoeffs::new(a2.clone(), b2.clone(), a2 / r, b2 / r);
    reflect(&Coupling::new(g1, g2, ProjReal::zero(), ProjReal::zero()))
}

fn random_kind<G: Rng>(rng: &mut G) -> SplitKind {
    if rng.gen_bool(0.5) {
        SplitKind::Antiisogram
    } else {
        SplitKind::Isogram
    }
}

fn random_pseudo_gap<G: Rng>(rng: &mut G) -> ProjReal<Q> {
    if rng.gen_bool(0.5) {
        ProjReal::zero()
    } else {
        ProjReal::Infinity
    }
}

fn random_roots<G: Rng>(rng: &mut G) -> (Q, Q) {
    loop {
        let k = small_rational(rng, 5, 4);
        let kp = small_rational(rng, 5, 4);
        if k != kp && !(&k + &kp).is_zero() {
            return (k, kp);
        }
    }
}

fn quad_map(kind: SplitKind, k: &Q, f: &ProjReal<Q>) -> Mobius<Q> {
    let branch = match kind {
        SplitKind::Antiisogram => Mobius::new(k.clone(), Q::zero(), Q::zero(), Q::one()),
        SplitKind::Isogram => Mobius::new(Q::zero(), k.clone(), Q::one(), Q::zero()),
    };
    gap_map(f).after(&branch)
}

/// Four reducible quads with gaps in {0, ∞}; the last quad closes the Möbius product.
pub fn random_pr<G: Rng>(rng: &mut G) -> R {
    let mut quads = Vec::new();
    let mut gaps = Vec::new();
    let mut prod = Mobius::identity();
    for _ in 0..3 {
        let kind = random_kind(rng);
        let (k, kp) = random_roots(rng);
        let f = random_pseudo_gap(rng);
        prod = quad_map(kind, &k, &f).after(&prod);
        quads.push(reducible_quad(kind, &k, &kp)?);
        gaps.push(f);
    }
    let [[p, qq], [r, s]] = prod.m.clone();
    let flip = rng.gen_bool(0.5);
    let (kind, k, f) = if qq.is_zero() && r.is_zero() {
        if flip {
            (SplitKind::Antiisogram, &s / &p, ProjReal::zero())
        } else {
            (SplitKind::Isogram, -(&p / &s), ProjReal::Infinity)
        }
    } else {
        if flip {
            (SplitKind::Isogram, &qq / &r, ProjReal::zero())
        } else {
            (SplitKind::Antiisogram, -(&r / &qq), ProjReal::Infinity)
        }
    };
    let kp = loop {
        let kp = small_rational(rng, 5, 4);
        if kp != k && !(&k + &kp).is_zero() {
            break kp;
        }
    };
    debug_assert!(quad_map(kind, &k, &f).after(&prod).is_scalar());
    quads.push(reducible_quad(kind, &k, &kp)?);
    gaps.push(f);
    let m = MeshSpec::new(
        quads.try_into().expect("four"),
        gaps.try_into().expect("four"),
    );
    validate(&m)?;
    Ok(m)
}

/// Half-quadratic: g1 antiisogram (root k), g3 isogram (root κ), g2 free,
/// g4 fixed by the cross-coupling ratio chain.
pub fn hq_from(k: &Q, kp: &Q, kappa: &Q, kappap: &Q, g2: &BricardCoeffs<Q>) -> R {
    let g1 = reducible_quad(SplitKind::Antiisogram, k, kp)?;
    let g3 = reducible_quad(SplitKind::Isogram, kappa, kappap)?;
    guard(!g2.is_reducible(), "g2 must be irreducible")?;
    let g4 = BricardCoeffs::new(
        &g2.b * k / kappa,
        &g2.e / (kappa * k),
        kappa * k * &g2.a,
        kappa * &g2.c / k,
    );
    let m = MeshSpec::new([g1, g2.clone(), g3, g4], zero_gaps());
    validate(&m)?;
    guard(!m.quads[3].is_reducible(), "g4 must be irreducible")?;
    Ok(m)
}

pub fn random_hq<G: Rng>(rng: &mut G) -> R {
    let (k, kp) = random_roots(rng);
    let (kappa, kappap) = random_roots(rng);
    let g2 = random_quad(rng);
    hq_from(&k, &kp, &kappa, &kappap, &g2)
}

/// Involutive-rational: both couplings share one bilinear factor, no quadratic one.
pub fn random_ir<G: Rng>(rng: &mut G) -> R {
    let g1 = random_quad(rng);
    let g3 = random_quad(rng);
    let k = small_rational(rng, 4, 3);
    let (g2, g4) = if rng.gen_bool(0.5) {
        (chain1_partner(&g1, &k), chain1_partner(&g3, &k.recip()))
    } else {
        (chain2_partner(&g1, &k), chain2_partner(&g3, &k))
    };
    let m = MeshSpec::new([g1, g2, g3, g4], zero_gaps());
    validate(&m)?;
    let [c1, c2] = m.couplings();
    guard(
        seed_label(&c1)?.is_equimodular() && seed_label(&c2)?.is_equimodular(),
        "couplings must be rational",
    )?;
    guard(
        !crate::poly::proportional(
            &m.quad(1).poly((crate::poly::Var::X1, crate::poly::Var::Y1)),
            &m.quad(3).poly((crate::poly::Var::X1, crate::poly::Var::Y1)),
        ),
        "g1 and g3 must differ",
    )?;
    Ok(m)
}

pub fn random_rq<G: Rng>(rng: &mut G) -> R {
    let g1 = random_quad(rng);
    let k = small_rational(rng, 4, 3);
    let g2 = if rng.gen_bool(0.5) {
        chain1_partner(&g1, &k)
    } else {
        chain2_partner(&g1, &k)
    };
    let seed = Coupling::new(g1, g2, ProjReal::zero(), ProjReal::zero());
    guard(
        seed_label(&seed)? == CouplingLabel::RationalQuadratic,
        "seed must be rational-quadratic",
    )?;
    reflect(&seed)
}

/// Purely-quadratic seed from the free parameters `(b1, c1, b2, c2, e2, m)`.
pub fn pq_seed(
    b1: &Q,
    c1: &Q,
    b2: &Q,
    c2: &Q,
    e2: &Q,
    m: &Q,
) -> Result<Coupling<Q>, ConstructError> {
    guard(m.is_positive() && !m.is_one(), "m > 0, m != 1")?;
    let d = b2 * c2 * m * m - b1 * c1;
    guard(!d.is_zero(), "b2 c2 m^2 - b1 c1 != 0")?;
    let (g1, g2) = repara(b1, c1, b2, c2, e2, m)
        .ok_or_else(|| ConstructError::Guard("b1, e2 nonzero".into()))?;
    let seed = Coupling::new(g1, g2, ProjReal::zero(), ProjReal::zero());
    validate_coupling(&seed)?;
    Ok(seed)
}

fn random_pq_seed<G: Rng>(rng: &mut G) -> Result<Coupling<Q>, ConstructError> {
    let m = loop {
        let m = positive_rational(rng, 5, 3);
        if !m.is_one() {
            break m;
        }
    };
    let p: Vec<Q> = (0..5).map(|_| small_rational(rng, 4, 4)).collect();
    pq_seed(&p[0], &p[1], &p[2], &p[3], &p[4], &m)
}

pub fn random_pq<G: Rng>(rng: &mut G) -> R {
    let seed = random_pq_seed(rng)?;
    guard(
        seed_label(&seed)? == CouplingLabel::PurelyQuadratic,
        "seed must be purely-quadratic",
    )?;
    reflect(&seed)
}

pub fn random_iq<G: Rng>(rng: &mut G) -> R {
    let p: Vec<Q> = (0..5).map(|_| small_rational(rng, 4, 4)).collect();
    let m = construct_iq(&p[0], &p[1], &p[2], &p[3], &p[4])?;
    guard(
        seed_label(&m.couplings()[0])? == CouplingLabel::InvolutiveQuadratic,
        "seed must be involutive-quadratic",
    )?;
    Ok(m)
}

pub fn random_q<G: Rng>(rng: &mut G) -> R {
    let f1 = match rng.gen_range(0..3) {
        0 => ProjReal::zero(),
        1 => ProjReal::Infinity,
        _ => ProjReal::Finite(small_rational(rng, 4, 3)),
    };
    let seed = Coupling::new(random_quad(rng), random_quad(rng), f1, ProjReal::zero());
    guard(
        seed_label(&seed)? == CouplingLabel::Quartic,
        "seed must be quartic",
    )?;
    reflect(&seed)
}

/// Purely-rational coupling (g1, g2) followed by a rational-quadratic one whose
/// squared bilinear factor is the Möbius relation x1 -> x3.
pub fn random_pr_ir<G: Rng>(rng: &mut G) -> R {
    let (kind1, kind2) = (random_kind(rng), random_kind(rng));
    let (k1, k1p) = random_roots(rng);
    let (k2, k2p) = random_roots(rng);
    let g1 = reducible_quad(kind1, &k1, &k1p)?;
    let g2 = reducible_quad(kind2, &k2, &k2p)?;
    let zero = ProjReal::zero();
    let [[p, qq], [r, s]] = quad_map(kind2, &k2, &zero)
        .after(&quad_map(kind1, &k1, &zero))
        .m;
    let g3 = random_quad(rng);
    let g4 = if qq.is_zero() && r.is_zero() {
        chain1_partner(&g3, &(&s / &p))
    } else {
        chain2_partner(&g3, &(&qq / &r))
    };
    let m = MeshSpec::new([g1, g2, g3, g4], zero_gaps());
    validate(&m)?;
    guard(!m.quads[3].is_reducible(), "g4 must be irreducible")?;
    Ok(m)
}

/// Half-quadratic coupling at F1 = 1 paired with a general-type
/// involutive-quadratic one sharing the squared quadratic factor.
pub fn hq_iq_from(a1: &Q, c1: &Q, k: &Q, kp: &Q, rho: &Q, sigma: &Q) -> R {
    guard(!rho.is_zero() && !sigma.is_zero(), "rho, sigma nonzero")?;
    let g1 = BricardCoeffs::new(a1.clone(), -a1, c1.clone(), -c1);
    let g2 = reducible_quad(SplitKind::Antiisogram, k, kp)?;
    let four = q(4);
    let a3 = -rho;
    let c3 = rho * k * k;
    let a4 = -(&four * k * a1 * rho);
    let b4 = -(&four * k * c1 * rho);
    let g3 = BricardCoeffs::new(a3.clone(), &a3 / sigma, c3.clone(), &c3 / sigma);
    let g4 = BricardCoeffs::new(a4.clone(), b4.clone(), &a4 / sigma, &b4 / sigma);
    guard(&a3 * &c3 != &a4 * &b4, "a3 c3 != a4 b4")?;
    let m = MeshSpec::new(
        [g1, g2, g3, g4],
        [
            ProjReal::Finite(Q::one()),
            ProjReal::zero(),
            ProjReal::zero(),
            ProjReal::zero(),
        ],
    );
    validate(&m)?;
    Ok(m)
}

pub fn random_hq_iq<G: Rng>(rng: &mut G) -> R {
    let (k, kp) = random_roots(rng);
    hq_iq_from(
        &small_rational(rng, 4, 4),
        &small_rational(rng, 4, 4),
        &k,
        &kp,
        &small_rational(rng, 4, 4),
        &small_rational(rng, 4, 3),
    )
}

/// Reducible g2 (root k) with g1 matched to one purely-quadratic factor of (g3, g4).
pub fn hq_pq_from(k: &Q, kp: &Q, pq: &Coupling<Q>, m: &Q, sign: i64) -> R {
    let (g3, g4) = (&pq.g1, &pq.g2);
    let mu = q(sign) * m;
    let al = alpha_column3(&g3.b, &g3.c, &g4.b, &g4.c, &g4.e, &mu)
        .ok_or_else(|| ConstructError::Guard("purely-quadratic denominators nonzero".into()))?;
    guard(!al[3].is_zero(), "alpha11 != 0")?;
    let rho = k / &al[3];
    let k2 = k * k;
    let g1 = BricardCoeffs::new(
        &rho * &al[0],
        &rho * &al[2] / &k2,
        &rho * &al[1],
        &rho * &al[4] / &k2,
    );
    let g2 = reducible_quad(SplitKind::Antiisogram, k, kp)?;
    let m = MeshSpec::new([g1, g2, g3.clone(), g4.clone()], zero_gaps());
    validate(&m)?;
    guard(!m.quads[0].is_reducible(), "g1 must be irreducible")?;
    Ok(m)
}

pub fn random_hq_pq<G: Rng>(rng: &mut G) -> R {
    let seed = random_pq_seed(rng)?;
    guard(
        seed_label(&seed)? == CouplingLabel::PurelyQuadratic,
        "(g3, g4) must be purely-quadratic",
    )?;
    let m = chain_value_sqrt(&seed)?;
    let (k, kp) = random_roots(rng);
    hq_pq_from(&k, &kp, &seed, &m, if rng.gen_bool(0.5) { 1 } else { -1 })
}

/// m from the first purely-quadratic chain value m² of a repara seed.
fn chain_value_sqrt(seed: &Coupling<Q>) -> Result<Q, ConstructError> {
    let (g1, g2) = (&seed.g1, &seed.g2);
    let m2 = &g1.e * &g1.b / (&g2.c * &g2.e);
    crate::scalar::Scalar::sqrt(&m2)
        .ok_or_else(|| ConstructError::Guard("m^2 must be a rational square".into()))
}

/// Purely-quadratic coupling whose factor r(μ) satisfies α02 α20 = α00 α22,
/// paired with a general-type involutive-quadratic coupling at F3 = ±1.
#[allow(clippy::too_many_arguments)]
pub fn pq_iq_from(mu: &Q, t: &Q, plus: bool, b1: &Q, b2: &Q, e2: &Q, a3: &Q, f3_sign: i64) -> R {
    let one = Q::one();
    guard(!mu.is_zero() && mu.abs() != one, "|mu| != 0, 1")?;
    let p = (&one - mu).pow(4);
    let den = q(64) - &p * t * t;
    guard(!den.is_zero(), "64 - p t^2 != 0")?;
    let w = (q(2) * &p * t - q(16) * (&one - mu * mu)) / den;
    let z = &one + t * &w;
    let u = &w * (if plus { -&one + &z } else { -&one - &z }) / q(2);
    let v = (&w + &u) / (mu * mu);
    guard(!u.is_zero() && !v.is_zero(), "u, v nonzero")?;
    let c1 = &u / b1;
    let c2 = &v / b2;
    let m = mu.abs();
    let seed = pq_seed(b1, &c1, b2, &c2, e2, &m)?;
    let al = alpha_column3(b1, &c1, b2, &c2, e2, mu)
        .ok_or_else(|| ConstructError::Guard("alpha denominators nonzero".into()))?;
    guard(!al[3].is_zero(), "alpha11 != 0")?;
    guard(
        &al[1] * &al[2] == &al[0] * &al[4],
        "alpha02 alpha20 = alpha00 alpha22",
    )?;
    guard(!al[0].is_zero() && !a3.is_zero(), "alpha22, a3 nonzero")?;
    let rho = one.clone() / &al[3];
    let four = q(4);
    let a4 = &rho * &al[0] / (&four * a3);
    let b4 = &rho * &al[2] / (&four * a3);
    let c3 = &rho * &al[1] / (&four * &a4);
    let g3 = BricardCoeffs::new(a3.clone(), -a3, c3.clone(), -&c3);
    let g4 = BricardCoeffs::new(a4.clone(), b4.clone(), -&a4, -&b4);
    guard(q(256) * a3 * &c3 * &a4 * &b4 != one, "256 a3 c3 a4 b4 != 1")?;
    let m = MeshSpec::new(
        [seed.g1, seed.g2, g3, g4],
        [
            ProjReal::zero(),
            ProjReal::zero(),
            ProjReal::Finite(q(f3_sign)),
            ProjReal::zero(),
        ],
    );
    validate(&m)?;
    Ok(m)
}

pub fn random_pq_iq<G: Rng>(rng: &mut G) -> R {
    pq_iq_from(
        &small_rational(rng, 5, 3),
        &small_rational(rng, 6, 4),
        rng.gen_bool(0.5),
        &small_rational(rng, 4, 4),
        &small_rational(rng, 4, 4),
        &small_rational(rng, 4, 4),
        &small_rational(rng, 4, 4),
        if rng.gen_bool(0.5) { 1 } else { -1 },
    )
}

/// Reflection mesh of an equimodular general-type coupling at F1 = ±1.
///
/// Only non-singularity is checked: admissibility of g1 needs
/// `ω1²(a1 − b1)² < 1/4` while the second pair inequality of g2 reduces to
/// `ω1²(a1 − b1)² > 1/4`, so no member of this family has real arc lengths.
pub fn random_equimodular_general<G: Rng>(rng: &mut G) -> R {
    let f1 = if rng.gen_bool(0.5) { q(1) } else { q(-1) };
    let seed = omega_coupling(
        &small_rational(rng, 4, 4),
        &small_rational(rng, 4, 4),
        &small_rational(rng, 3, 3),
        &small_rational(rng, 3, 3),
        if rng.gen_bool(0.5) { 1 } else { -1 },
        f1,
    )
    .ok_or_else(|| ConstructError::Guard("a1 != b1".into()))?;
    guard(
        seed_label(&seed)? == CouplingLabel::EquimodularGeneral,
        "seed must be equimodular general-type",
    )?;
    let m = reflection_mesh(&seed);
    if let Some(i) = m.quads.iter().position(|g| g.is_singular()) {
        return Err(ConstructError::Singular(i + 1));
    }
    Ok(m)
}

fn attempt<G: Rng>(label: MatchingLabel, rng: &mut G) -> R {
    match label {
        MatchingLabel::PR => random_pr(rng),
        MatchingLabel::HQ => random_hq(rng),
        MatchingLabel::IR => random_ir(rng),
        MatchingLabel::RQ => random_rq(rng),
        MatchingLabel::PQ => random_pq(rng),
        MatchingLabel::IQ => random_iq(rng),
        MatchingLabel::Q => random_q(rng),
        MatchingLabel::PrIr => random_pr_ir(rng),
        MatchingLabel::HqIq => random_hq_iq(rng),
        MatchingLabel::HqPq => random_hq_pq(rng),
        MatchingLabel::PqIq => random_pq_iq(rng),
    }
}

/// Retry `f` until it yields an admissible mesh.
pub fn retry<G: Rng>(name: &str, rng: &mut G, mut f: impl FnMut(&mut G) -> R) -> R {
    let mut last = String::new();
    for _ in 0..ATTEMPTS {
        match f(rng) {
            Ok(m) => return Ok(m),
            Err(e) => last = e.to_string(),
        }
    }
    Err(ConstructError::Exhausted {
        label: name.into(),
        attempts: ATTEMPTS,
        last,
    })
}

/// A random mesh of class `label`.
pub fn construct_random<G: Rng>(label: MatchingLabel, rng: &mut G) -> R {
    retry(label.name(), rng, |r| attempt(label, r))
}

/// Deterministic variant of [`construct_random`].
pub fn construct_seeded(label: MatchingLabel, seed: u64) -> R {
    construct_random(label, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Deterministic general-type equimodular reflection mesh (no real flexion).
pub fn construct_equimodular_general_seeded(seed: u64) -> R {
    retry(
        "EQ(g)",
        &mut ChaCha8Rng::seed_from_u64(seed),
        random_equimodular_general,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matching::is_flexible;

    #[test]
    fn pq_seed_example() {
        let one = Q::one();
        let s = pq_seed(&one, &one, &one, &one, &one, &q(2)).unwrap();
        assert_eq!(s.g1.a, rat(3, 4));
        assert_eq!(s.g1.e, q(4));
        assert_eq!(s.g2.a, rat(3, 16));
    }

    #[test]
    fn pr_requires_unit_product() {
        let ks = [q(2), q(3), rat(1, 2), rat(1, 3)];
        assert!(construct_pr(&ks, None).is_ok());
        let bad = [q(2), q(3), rat(1, 2), rat(1, 2)];
        assert!(matches!(
            construct_pr(&bad, None),
            Err(ConstructError::Guard(_))
        ));
    }

    #[test]
    fn hq_example_matches_formula() {
        let g2 = BricardCoeffs::new(q(1), q(1), q(-1), q(-1));
        // g1 = (0, −2/3, −1/3, 0) has roots 2 and 1; g3 = (1, 0, 0, −2) has roots 1 and −2.
        let m = hq_from(&q(2), &q(1), &q(1), &q(-2), &g2).unwrap();
        assert_eq!(
            m.quads[0],
            BricardCoeffs::new(q(0), rat(-2, 3), rat(-1, 3), q(0))
        );
        assert_eq!(m.quads[2], BricardCoeffs::new(q(1), q(0), q(0), q(-2)));
        assert_eq!(
            m.quads[3],
            BricardCoeffs::new(q(2), rat(-1, 2), q(2), rat(-1, 2))
        );
    }

    #[test]
    fn iq_cli_example() {
        let m = construct_iq(&q(1), &q(1), &q(1), &rat(6, 5), &q(-1)).unwrap();
        assert_eq!(is_flexible(&m).unwrap().label, Some(MatchingLabel::IQ));
    }

    #[test]
    fn inadmissible_reported() {
        let seed = Coupling::new(
            BricardCoeffs::new(q(1), q(1), q(1), q(1)),
            BricardCoeffs::new(q(1), q(1), q(-1), q(-1)),
            ProjReal::zero(),
            ProjReal::zero(),
        );
        assert!(matches!(
            reflect(&seed),
            Err(ConstructError::Inadmissible { quad: 1, .. })
        ));
    }

    #[test]
    fn each_label_constructs_and_classifies() {
        for label in MatchingLabel::ALL {
            let m = construct_seeded(label, 7).unwrap_or_else(|e| panic!("{label}: {e}"));
            let out = is_flexible(&m).unwrap_or_else(|e| panic!("{label}: {e}"));
            assert_eq!(out.label, Some(label), "{label}: {:?}", out.coupling_labels);
        }
    }
}
