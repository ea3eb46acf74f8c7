//! Invariant suites run by `verify`: admissibility, resultant degrees, factor
//! shape and parity, factorization expansion, linkage closure and the Möbius
//! orbit oracle.

use std::fmt;

use num_rational::BigRational;

use crate::construct::construct_seeded;
use crate::coupling::{classify, Coupling, CouplingLabel};
use crate::embed::{embed_mesh_state, mesh_angles};
use crate::factorizer::{
    factor_resultant, iq_base_pseudo_planar, verify_factorization, FactorError, FactorKind,
};
use crate::golden::physical_mesh;
use crate::matching::{is_flexible, MatchingLabel, MeshSpec};
use crate::poly::{poly_divide_exact, Parity};
use crate::scalar::Scalar;
use crate::trace::{mobius_orbits, trace_unchecked, TraceOptions};

/// Local closure bound for embedded trace states.
pub const CLOSURE_TOL: f64 = 1e-6;
/// Agreement bound between traced states and Möbius orbits.
pub const ORBIT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct VerifyReport {
    pub subject: String,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn push(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.subject)?;
        for c in &self.checks {
            writeln!(
                f,
                "  [{}] {}: {}",
                if c.passed { "pass" } else { "FAIL" },
                c.name,
                c.detail
            )?;
        }
        Ok(())
    }
}

/// Run every applicable invariant on one mesh.
pub fn verify_mesh<S: Scalar>(subject: &str, m: &MeshSpec<S>) -> VerifyReport {
    let mut rep = VerifyReport {
        subject: subject.into(),
        checks: Vec::new(),
    };
    for (i, g) in m.quads.iter().enumerate() {
        let v = g.violated_inequalities();
        let detail = if v.is_empty() {
            "all inequalities hold".to_string()
        } else {
            format!(
                "violates {}",
                v.iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join(", ")
            )
        };
        rep.push(&format!("quad {} admissible", i + 1), v.is_empty(), detail);
    }
    if let Err(e) = m.check_nonsingular() {
        rep.push("non-singular", false, e.to_string());
    }
    if !rep.passed() {
        return rep;
    }

    match m.resultants() {
        Ok(rs) => {
            for (k, r) in rs.iter().enumerate() {
                let d = (r.deg_u().unwrap_or(0), r.deg_v().unwrap_or(0));
                rep.push(
                    &format!("resultant {} degree", k + 1),
                    d == (4, 4),
                    format!("degree {d:?}"),
                );
            }
        }
        Err(e) => rep.push("resultant degree", false, e.to_string()),
    }

    for (k, c) in m.couplings().iter().enumerate() {
        let name = format!("coupling {}", k + 1);
        if let Err(FactorError::NeedsFloat(why)) = coupling_checks(&mut rep, &name, c) {
            // Irrational roots: rerun the coupling in floats.
            rep.push(&format!("{name} float fallback"), true, why);
            let _ = coupling_checks(&mut rep, &name, &c.to_f64());
        }
    }

    let outcome = is_flexible(m);
    match &outcome {
        Ok(o) => {
            let label = o
                .label
                .map(|l| l.name().to_string())
                .unwrap_or_else(|| "rigid".into());
            let pairing = o
                .label
                .is_none_or(|l| l.allows(o.coupling_labels[0], o.coupling_labels[1]));
            rep.push(
                "classification",
                pairing,
                format!(
                    "{label} from couplings {} / {}",
                    o.coupling_labels[0], o.coupling_labels[1]
                ),
            );
        }
        Err(e) => rep.push("classification", false, e.to_string()),
    }
    let flexible = matches!(&outcome, Ok(o) if o.is_flexible());
    if flexible {
        dynamic_checks(
            &mut rep,
            &m.to_f64(),
            matches!(&outcome, Ok(o) if o.label == Some(MatchingLabel::PR)),
        );
    }
    rep
}

fn coupling_checks<T: Scalar>(
    rep: &mut VerifyReport,
    name: &str,
    c: &Coupling<T>,
) -> Result<(), FactorError> {
    let name = |what: &str| format!("{name} {what}");
    let cls = match classify(c) {
        Ok(cls) => cls,
        Err(e) => {
            rep.push(&name("class"), false, e.to_string());
            return Ok(());
        }
    };
    let fr = match factor_resultant(c, &cls) {
        Ok(fr) => fr,
        Err(FactorError::NeedsFloat(why)) => return Err(FactorError::NeedsFloat(why)),
        Err(e) => {
            rep.push(&name("factorization"), false, e.to_string());
            return Ok(());
        }
    };
    let mode = if T::EXACT { "exact" } else { "float" };
    rep.push(
        &name("factorization expands"),
        verify_factorization(&fr, c),
        format!("{} ({mode})", cls.label),
    );
    let uneven: Vec<String> = fr
        .factors
        .iter()
        .filter(|f| f.poly.deg_u() != f.poly.deg_v())
        .map(|f| format!("{:?}", (f.poly.deg_u(), f.poly.deg_v())))
        .collect();
    let detail = if uneven.is_empty() {
        format!("{} factor(s)", fr.factors.len())
    } else {
        format!("unequal degrees {}", uneven.join(", "))
    };
    rep.push(&name("factor degrees equal"), uneven.is_empty(), detail);
    if c.f1.is_pseudo_planar() {
        let quadratic: Vec<Parity> = fr
            .factors
            .iter()
            .filter(|f| f.kind == FactorKind::Biquadratic)
            .map(|f| f.poly.cleaned().parity())
            .collect();
        if !quadratic.is_empty() {
            let iq = cls.label == CouplingLabel::InvolutiveQuadratic;
            let want = if iq {
                Parity::OddOnly
            } else {
                Parity::EvenOnly
            };
            let what = if iq {
                "odd-only squared factor"
            } else {
                "even-only quadratic factors"
            };
            let ok = quadratic.iter().all(|p| *p == want);
            rep.push(&name("parity"), ok, format!("{what}, found {quadratic:?}"));
        }
    }
    if cls.label == CouplingLabel::InvolutiveQuadratic && c.f1.is_zero() && c.f2.is_zero() {
        rep.push(
            &name("IQ square shape"),
            iq_shape_holds(c),
            "R1 = (b1/a1) base^2",
        );
    }
    Ok(())
}

/// `R1 = (b1/a1) · base²` by exact division.
fn iq_shape_holds<S: Scalar>(c: &Coupling<S>) -> bool {
    let base = iq_base_pseudo_planar(&c.g1, &c.g2);
    let Ok(r1) = crate::factorizer::coupling_resultant(c) else {
        return false;
    };
    let Ok(r1) = r1.ordered(base.vars()) else {
        return false;
    };
    let sq = base.mul(&base);
    match poly_divide_exact(&r1, &sq) {
        Ok(Some(q)) => {
            let want = c.g1.b.clone() / c.g1.a.clone();
            q.deg_u().unwrap_or(0) == 0
                && q.deg_v().unwrap_or(0) == 0
                && q.coeff(0, 0).approx_eq(&want)
        }
        _ => false,
    }
}

fn dynamic_checks(rep: &mut VerifyReport, m: &MeshSpec<f64>, is_pr: bool) {
    let opts = TraceOptions {
        steps: 60,
        real_only: true,
        ..TraceOptions::default()
    };
    let tr = trace_unchecked(m, &opts);
    if tr.accepted() == 0 {
        let complex = trace_unchecked(
            m,
            &TraceOptions {
                real_only: false,
                ..opts
            },
        );
        rep.push(
            "trace",
            complex.accepted() > 0,
            format!("no real states, {} complex", complex.accepted()),
        );
        return;
    }
    let worst = tr.states().map(|s| s.residual).fold(0.0, f64::max);
    rep.push(
        "trace",
        worst < opts.tol,
        format!("{} real states, max residual {worst:.2e}", tr.accepted()),
    );
    if mesh_angles(m).is_ok() {
        let mut worst = 0.0f64;
        let mut n = 0;
        for s in tr.states().step_by(5) {
            if let Ok(e) = embed_mesh_state(m, s) {
                worst = worst.max(e.local_residual);
                n += 1;
            }
        }
        rep.push(
            "closure",
            worst < CLOSURE_TOL,
            format!("{n} embedded states, max local residual {worst:.2e}"),
        );
    } else {
        rep.push(
            "closure",
            true,
            "skipped: no real spherical quads for these coefficients",
        );
    }
    if is_pr {
        let mut worst = 0.0f64;
        for s in tr.states() {
            let x = s.real_x();
            let d = mobius_orbits(m, x[0])
                .iter()
                .map(|o| {
                    o.iter()
                        .zip(&x)
                        .map(|(a, b)| (a - b).abs() / (1.0 + b.abs()))
                        .fold(0.0, f64::max)
                })
                .fold(f64::INFINITY, f64::min);
            worst = worst.max(d);
        }
        rep.push(
            "Möbius orbit",
            worst < ORBIT_TOL,
            format!("max deviation {worst:.2e}"),
        );
    }
}

/// Golden physical mesh plus `per_label` seeded constructions of every class.
pub fn verify_suite(per_label: u64) -> Vec<VerifyReport> {
    let mut out = vec![verify_mesh(
        "golden physical mesh (PQ+IQ)",
        &physical_mesh(),
    )];
    if let Some(r) = out.last_mut() {
        let ok =
            matches!(is_flexible(&physical_mesh()), Ok(o) if o.label == Some(MatchingLabel::PqIq));
        r.push("expected label", ok, "PQ+IQ");
    }
    for label in MatchingLabel::ALL {
        for seed in 0..per_label {
            let subject = format!("{label} seed {seed}");
            match construct_seeded(label, seed) {
                Ok(m) => {
                    let mut r = verify_mesh::<BigRational>(&subject, &m);
                    let got = is_flexible(&m).ok().and_then(|o| o.label);
                    r.push("expected label", got == Some(label), format!("{}", label));
                    out.push(r);
                }
                Err(e) => {
                    let mut r = VerifyReport {
                        subject,
                        checks: Vec::new(),
                    };
                    r.push("construction", false, e.to_string());
                    out.push(r);
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bricard::BricardCoeffs;
    use crate::construct::construct_iq;
    use crate::mobius::ProjReal;
    use crate::scalar::rat;

    #[test]
    fn iq_document_passes_parity() {
        let m = construct_iq(&rat(1, 1), &rat(1, 1), &rat(1, 1), &rat(6, 5), &rat(-1, 1)).unwrap();
        let r = verify_mesh("iq", &m);
        assert!(r.passed(), "{r}");
        assert!(
            r.checks
                .iter()
                .any(|c| c.name.ends_with("parity")
                    && c.detail.starts_with("odd-only squared factor"))
        );
        assert!(r
            .checks
            .iter()
            .any(|c| c.name.ends_with("IQ square shape") && c.passed));
    }

    #[test]
    fn inadmissible_quad_is_named() {
        let q = BricardCoeffs::new(rat(1, 1), rat(1, 1), rat(1, 1), rat(1, 1));
        let m = MeshSpec::new(
            std::array::from_fn(|_| q.clone()),
            std::array::from_fn(|_| ProjReal::zero()),
        );
        let r = verify_mesh("bad", &m);
        assert!(!r.passed());
        assert!(r.failures().next().unwrap().detail.starts_with("violates"));
    }
}
