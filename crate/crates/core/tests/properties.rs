//! Property tests for the algebraic and geometric invariants.

use std::f64::consts::PI;

use kokotsakis::bricard::{
    coeffs_from_angles, eliminate_gap, gap_poly, BricardCoeffs, QuadAngles, SplitKind,
};
use kokotsakis::construct::{
    chain1_partner, chain2_partner, construct_seeded, random_pr, random_quad, reducible_quad,
    reflection_mesh,
};
use kokotsakis::coupling::{classify, discriminants, Coupling, CouplingLabel};
use kokotsakis::document::{MeshDocument, Mode};
use kokotsakis::embed::{bricard_residual, embed_quad};
use kokotsakis::factorizer::{
    coupling_resultant, factor_resultant, has_bilinear_factor, rvars, verify_factorization,
    FactorKind,
};
use kokotsakis::matching::{is_flexible, MatchingLabel, MeshSpec};
use kokotsakis::mobius::{mobius_compose, Mobius, ProjReal};
use kokotsakis::poly::{
    poly_divide_exact, proportional, ratio_chain_holds, sylvester_resultant, BiPoly, Parity, Var,
};
use kokotsakis::scalar::rat;
use kokotsakis::trace::{mobius_orbits, trace_unchecked, TraceOptions};
use num_complex::Complex64;
use num_rational::BigRational as Q;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn q() -> impl Strategy<Value = Q> {
    (-6i64..=6, 1i64..=6).prop_map(|(n, d)| rat(n, d))
}

fn nz() -> impl Strategy<Value = Q> {
    q().prop_filter("nonzero", |x| !x.is_zero())
}

fn gap() -> impl Strategy<Value = ProjReal<Q>> {
    prop_oneof![4 => q().prop_map(ProjReal::Finite), 1 => Just(ProjReal::Infinity)]
}

fn label() -> impl Strategy<Value = MatchingLabel> {
    (0..MatchingLabel::ALL.len()).prop_map(|i| MatchingLabel::ALL[i])
}

fn poly(vars: (Var, Var), du: usize, dv: usize) -> impl Strategy<Value = BiPoly<Q>> {
    prop::collection::vec(q(), (du + 1) * (dv + 1)).prop_map(move |cs| {
        let terms: Vec<(usize, usize, Q)> = cs
            .into_iter()
            .enumerate()
            .map(|(k, c)| (k / (dv + 1), k % (dv + 1), c))
            .collect();
        BiPoly::from_terms(vars, &terms)
    })
}

fn quad_angles() -> impl Strategy<Value = QuadAngles> {
    prop::array::uniform4(0.15f64..PI - 0.15).prop_map(|[l, g, m, d]| QuadAngles {
        lambda: l,
        gamma: g,
        mu: m,
        delta: d,
    })
}

fn mesh(label: MatchingLabel, seed: u64) -> MeshSpec<Q> {
    construct_seeded(label, seed).unwrap_or_else(|e| panic!("{label} seed {seed}: {e}"))
}

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

const X: Var = Var("x");
const T: Var = Var("t");
const Y: Var = Var("y");

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn resultant_is_multiplicative(p1 in poly((X, T), 2, 1), p2 in poly((X, T), 1, 1), r in poly((T, Y), 2, 2)) {
        prop_assume!(p1.degree_in(T) == Some(1) && p2.degree_in(T) == Some(1) && r.degree_in(T) == Some(2));
        let whole = sylvester_resultant(&p1.mul(&p2), &r, T).unwrap();
        let parts = sylvester_resultant(&p1, &r, T).unwrap().mul(&sylvester_resultant(&p2, &r, T).unwrap());
        prop_assert_eq!(whole.cleaned(), parts.cleaned());
    }

    #[test]
    fn exact_division_round_trips(p in poly((X, Y), 2, 2), d in poly((X, Y), 1, 2)) {
        prop_assume!(!d.is_zero());
        let got = poly_divide_exact(&p.mul(&d), &d).unwrap();
        prop_assert_eq!(got.map(|g| g.cleaned()), Some(p.cleaned()));
    }

    #[test]
    fn ratio_chain_is_symmetric_and_scale_free(
        n in prop::collection::vec(q(), 4), d in prop::collection::vec(q(), 4), k in nz()
    ) {
        let h = ratio_chain_holds(&n, &d);
        prop_assert_eq!(h, ratio_chain_holds(&d, &n));
        let kn: Vec<Q> = n.iter().map(|x| x * &k).collect();
        prop_assert_eq!(h, ratio_chain_holds(&kn, &d));
        let multiple: Vec<Q> = d.iter().map(|x| x * &k).collect();
        prop_assert!(ratio_chain_holds(&multiple, &d));
    }

    #[test]
    fn mobius_is_projective(m in prop::array::uniform4(q()), n in prop::array::uniform4(q()), l in nz()) {
        let a = Mobius::new(m[0].clone(), m[1].clone(), m[2].clone(), m[3].clone());
        let b = Mobius::new(n[0].clone(), n[1].clone(), n[2].clone(), n[3].clone());
        prop_assume!(!a.det().is_zero() && !b.det().is_zero());
        let la = Mobius::new(&l * &m[0], &l * &m[1], &l * &m[2], &l * &m[3]);
        prop_assert!(a.proj_eq(&la));
        prop_assert!(mobius_compose(&[a.clone(), b.clone()]).proj_eq(&mobius_compose(&[la, b])));
        prop_assert!(a.after(&a.adjugate()).is_scalar());
    }

    #[test]
    fn gap_elimination_matches_resultant(g in prop::array::uniform4(q()), f in gap()) {
        let g = BricardCoeffs::new(g[0].clone(), g[1].clone(), g[2].clone(), g[3].clone());
        prop_assume!(g.as_array().iter().any(|c| !c.is_zero()));
        let (x, xp, y) = (Var::x(1), Var::x(2), Var::y(1));
        let tilde = eliminate_gap(&g, &f, (x, xp));
        let back = sylvester_resultant(&tilde, &gap_poly(&f, (y, xp)), xp).unwrap();
        prop_assert!(proportional(&g.poly((x, y)), &back), "g = {:?}, F = {:?}", g, f);
    }

    #[test]
    fn elimination_preserves_reducibility(seed in any::<u64>(), k in nz(), kp in nz(), iso in any::<bool>(), f in gap()) {
        let kind = if iso { SplitKind::Isogram } else { SplitKind::Antiisogram };
        let vars = (Var::x(1), Var::x(2));
        if let Ok(g) = reducible_quad(kind, &k, &kp) {
            prop_assert!(has_bilinear_factor(&eliminate_gap(&g, &f, vars)));
        }
        let g = random_quad(&mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert!(!has_bilinear_factor(&eliminate_gap(&g, &f, vars)));
    }

    #[test]
    fn special_angle_patterns(l in 0.15f64..PI - 0.15, g in 0.15f64..PI - 0.15) {
        let h = |l, g, m, d| coeffs_from_angles(&QuadAngles { lambda: l, gamma: g, mu: m, delta: d }).unwrap();
        let tiny = |v: f64| v.abs() < 1e-12;
        let iso = h(l, g, l, g);
        prop_assert!(tiny(iso.b) && tiny(iso.c));
        let anti = h(l, g, PI - l, PI - g);
        prop_assert!(tiny(anti.a) && tiny(anti.e));
        for d in [h(l, l, g, g), h(l, g, g, l), h(l, PI - l, PI - g, g), h(l, g, PI - g, PI - l)] {
            prop_assert!(tiny(d.a * d.e) && tiny(d.b * d.c), "{:?}", d);
        }
    }

    #[test]
    fn spherical_quads_are_admissible(a in quad_angles()) {
        let g = coeffs_from_angles(&a).unwrap();
        prop_assert!(g.violated_inequalities().is_empty(), "{:?} -> {:?}", a, g);
    }

    #[test]
    fn equal_interior_angles_agree_with_bricard(a in quad_angles(), alpha in 0.1f64..PI - 0.1, jitter in 0.01f64..0.2) {
        let g = coeffs_from_angles(&a).unwrap();
        let x = (alpha / 2.0).tan();
        // g(x, y) = (a x² + c) y² + x y + (b x² + e)
        let (p2, p1, p0) = (g.a * x * x + g.c, x, g.b * x * x + g.e);
        let disc = p1 * p1 - 4.0 * p2 * p0;
        prop_assume!(disc > 1e-9 && p2.abs() > 1e-9);
        for s in [-1.0, 1.0] {
            let y = (-p1 + s * disc.sqrt()) / (2.0 * p2);
            let beta = 2.0 * y.atan();
            prop_assert!(bricard_residual(&g, x, y) < 1e-9);
            prop_assert!(embed_quad(&a, alpha, beta).residual < 1e-9, "state ({}, {})", alpha, beta);
            let off = beta + jitter;
            prop_assert!(bricard_residual(&g, x, (off / 2.0).tan()) > 1e-9);
            prop_assert!(embed_quad(&a, alpha, off).residual > 1e-9);
        }
    }
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn chains_show_up_as_square_factors(seed in any::<u64>(), k in nz(), second in any::<bool>(), f in gap()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g1 = random_quad(&mut rng);
        let g2 = if second { chain2_partner(&g1, &k) } else { chain1_partner(&g1, &k) };
        prop_assume!(g2.is_admissible() && !g2.is_singular());
        let c = Coupling::new(g1.clone(), g2, ProjReal::zero(), f);
        let cls = classify(&c).unwrap();
        let found = if second { &cls.evidence.chain2_k } else { &cls.evidence.chain1_k };
        prop_assert_eq!(found.as_ref(), Some(&k));
        // chain 1: (y2 − k x1)² | R1; chain 2: (x1 y2 − k)² | R1.
        let r1 = coupling_resultant(&c).unwrap();
        let line = if second {
            BiPoly::from_terms(rvars(), &[(1, 1, Q::one()), (0, 0, -k.clone())])
        } else {
            BiPoly::from_terms(rvars(), &[(0, 1, Q::one()), (1, 0, -k.clone())])
        };
        prop_assert!(matches!(poly_divide_exact(&r1, &line.pow(2)), Ok(Some(_))));

        let plain = Coupling::new(g1, random_quad(&mut rng), ProjReal::zero(), ProjReal::zero());
        let cls = classify(&plain).unwrap();
        if cls.evidence.chain1_k.is_none() && cls.evidence.chain2_k.is_none() {
            prop_assert_ne!(cls.label, CouplingLabel::InvolutiveRational);
        }
    }

    #[test]
    fn factorization_invariants(l in label(), seed in 0u64..10_000) {
        let m = mesh(l, seed);
        for c in m.couplings() {
            let cls = classify(&c).unwrap();
            let Ok(fr) = factor_resultant(&c, &cls) else { continue };
            prop_assert!(verify_factorization(&fr, &c), "{} {}", l, cls.label);
            for f in &fr.factors {
                prop_assert_eq!(f.poly.deg_u(), f.poly.deg_v());
            }
            let squared = fr.squared().count() > 0;
            match cls.label {
                CouplingLabel::InvolutiveRational | CouplingLabel::InvolutiveQuadratic => prop_assert!(squared),
                CouplingLabel::Quartic => prop_assert!(!squared),
                _ => {}
            }
            if c.is_pseudo_planar() {
                let iq = cls.label == CouplingLabel::InvolutiveQuadratic;
                for f in fr.factors.iter().filter(|f| f.kind == FactorKind::Biquadratic) {
                    let want = if iq { Parity::OddOnly } else { Parity::EvenOnly };
                    prop_assert_eq!(f.poly.cleaned().parity(), want);
                }
            }
            prop_assert_eq!(fr.degree_sums(), (4, 4));
        }
    }

    #[test]
    fn exact_and_float_classifications_agree(l in label(), seed in 0u64..10_000) {
        let m = mesh(l, seed);
        for c in m.couplings() {
            let exact = classify(&c).unwrap().label;
            prop_assert_eq!(exact, classify(&c.to_f64()).unwrap().label);
            if let Ok(r) = c.reversed() {
                prop_assert_eq!(exact, classify(&r).unwrap().label);
            }
        }
        let e = is_flexible(&m).unwrap();
        let f = is_flexible(&m.to_f64()).unwrap();
        prop_assert_eq!(e.label, f.label);
    }

    #[test]
    fn equimodular_discriminants_differ_by_a_square(l in label(), seed in 0u64..10_000) {
        for c in mesh(l, seed).couplings() {
            if classify(&c).unwrap().label.is_equimodular() {
                let d = discriminants(&c);
                prop_assert!(d.d1.mul(&d.d2).is_square_form(8));
            }
        }
    }

    #[test]
    fn reflections_of_arbitrary_seeds_flex(seed in any::<u64>(), f in gap(), l in label(), s2 in 0u64..10_000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let random = Coupling::new(random_quad(&mut rng), random_quad(&mut rng), f, ProjReal::zero());
        let built = mesh(l, s2).couplings()[0].clone();
        for c in [random, built] {
            let o = is_flexible(&reflection_mesh(&c)).unwrap();
            prop_assert!(o.is_flexible(), "{:?}", o.notes);
        }
    }

    #[test]
    fn document_round_trips(l in label(), seed in 0u64..10_000) {
        let m = mesh(l, seed);
        let doc = MeshDocument::from_exact(&m);
        let back = MeshDocument::parse(&doc.to_json_string()).unwrap();
        prop_assert_eq!(&back, &doc);
        let loaded = back.to_mesh(Mode::Auto).unwrap();
        prop_assert!(loaded.mesh.is_exact());
        let f = MeshDocument::from_float(&m.to_f64());
        prop_assert_eq!(MeshDocument::parse(&f.to_json_string()).unwrap(), f);
    }

    #[test]
    fn perturbed_pr_agrees_with_mobius_product(seed in any::<u64>(), bump in 1i64..=9, quad in 0usize..4, which in 0usize..4) {
        let mut m = random_pr(&mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        if bump % 2 == 0 {
            let mut c = m.quads[quad].as_array();
            c[which] += rat(bump, 1000);
            m.quads[quad] = BricardCoeffs::new(c[0].clone(), c[1].clone(), c[2].clone(), c[3].clone());
        }
        let Ok(o) = is_flexible(&m) else { return Ok(()) };
        if m.quads.iter().any(|g| !g.is_reducible()) {
            prop_assert!(o.label != Some(MatchingLabel::PR));
            return Ok(());
        }
        // Perturbed branch roots may be irrational or complex.
        let mf = m.to_f64();
        let maps: Option<Vec<[Mobius<f64>; 2]>> =
            (1..=4).map(|i| Some([mf.branch_mobius(i, 0)?, mf.branch_mobius(i, 1)?])).collect();
        let Some(maps) = maps else { return Ok(()) };
        let closes = (0..16).any(|mask: usize| {
            let chosen: Vec<Mobius<f64>> = (0..4).map(|i| maps[i][(mask >> i) & 1].clone()).collect();
            mobius_compose(&chosen).is_scalar()
        });
        prop_assert_eq!(o.label == Some(MatchingLabel::PR), closes);
    }
}

proptest! {
    #![proptest_config(config(12))]

    #[test]
    fn trace_states_solve_the_system(l in label(), seed in 0u64..10_000) {
        let m = mesh(l, seed).to_f64();
        let opts = TraceOptions { steps: 24, ..TraceOptions::default() };
        let tr = trace_unchecked(&m, &opts);
        let mut per_step = std::collections::HashMap::<usize, usize>::new();
        for s in tr.states() {
            prop_assert!(s.residual <= opts.tol);
            *per_step.entry(s.step).or_default() += 1;
            for i in 0..4 {
                let (y, xn) = (s.y[i], s.x[(i + 1) % 4]);
                let h = match m.gaps[i] {
                    ProjReal::Finite(f) => y * (Complex64::new(1.0, 0.0) - f * xn) - (f + xn),
                    ProjReal::Infinity => y * xn + 1.0,
                };
                prop_assert!(h.norm() <= 1e-9 * (1.0 + y.norm()) * (1.0 + xn.norm()), "H{} = {}", i + 1, h);
            }
        }
        prop_assert!(per_step.values().all(|&n| n <= 8), "{:?}", per_step);
    }

    #[test]
    fn pr_traces_follow_mobius_orbits(seed in any::<u64>()) {
        let m = random_pr(&mut ChaCha8Rng::seed_from_u64(seed)).unwrap().to_f64();
        let tr = trace_unchecked(&m, &TraceOptions { steps: 40, real_only: true, ..TraceOptions::default() });
        for s in tr.states() {
            let x = s.real_x();
            let best = mobius_orbits(&m, x[0])
                .iter()
                .map(|o| o.iter().zip(&x).map(|(a, b)| (a - b).abs() / (1.0 + b.abs())).fold(0.0, f64::max))
                .fold(f64::INFINITY, f64::min);
            prop_assert!(best < 1e-10, "deviation {:e}", best);
        }
    }
}

#[test]
fn constructions_classify_as_built() {
    for l in MatchingLabel::ALL {
        for seed in 0..50 {
            let o = is_flexible(&mesh(l, 500 + seed)).unwrap();
            assert_eq!(o.label, Some(l), "{l} seed {}", 500 + seed);
            assert!(l.allows(o.coupling_labels[0], o.coupling_labels[1]));
        }
    }
}

#[test]
fn perturbations_are_rigid() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut rigid, mut total) = (0, 0);
    for l in MatchingLabel::ALL {
        for seed in 0..20 {
            let mut m = mesh(l, 900 + seed);
            let (i, j) = (
                rand::Rng::gen_range(&mut rng, 0..4),
                rand::Rng::gen_range(&mut rng, 0..4),
            );
            let mut c = m.quads[i].as_array();
            c[j] += rat(rand::Rng::gen_range(&mut rng, 1..=10), 1000);
            m.quads[i] = BricardCoeffs::new(c[0].clone(), c[1].clone(), c[2].clone(), c[3].clone());
            total += 1;
            match is_flexible(&m) {
                Ok(o) if !o.is_flexible() => rigid += 1,
                Ok(o) => eprintln!("{l} seed {seed}: perturbed mesh still {:?}", o.label),
                Err(e) => eprintln!("{l} seed {seed}: {e}"),
            }
        }
    }
    assert!(rigid * 100 >= total * 99, "{rigid} of {total} rigid");
}
