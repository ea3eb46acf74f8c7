//! JSON mesh documents: angle- or coefficient-given quads, gaps and optional splits.
//!
//! Strings (`"3/2"`, `"-0.25"`) parse to exact rationals; JSON numbers are
//! floats and put the whole document in float mode.

use num_rational::BigRational;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::bricard::{
    angles_from_coeffs, coeffs_from_angles, BricardCoeffs, GapAngles, QuadAngles,
};
use crate::matching::MeshSpec;
use crate::mobius::ProjReal;
use crate::scalar::{format_rational, parse_rational, Scalar};

pub const VERSION: &str = "kokotsakis-mesh/1";

/// Coefficient mismatch above which angle/coefficient pairs are reported.
pub const CROSS_CHECK_TOL: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DocError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: {message}")]
    Field { path: String, message: String },
    #[error("{path}: exact mode requested but the value is a float")]
    NotExact { path: String },
}

fn field(path: impl Into<String>, message: impl Into<String>) -> DocError {
    DocError::Field {
        path: path.into(),
        message: message.into(),
    }
}

/// A document value: exact rational from a string, or a float from a JSON number.
#[derive(Debug, Clone, PartialEq)]
pub enum Num {
    Exact(BigRational),
    Float(f64),
}

impl Num {
    pub fn to_f64(&self) -> f64 {
        match self {
            Num::Exact(q) => Scalar::to_f64(q),
            Num::Float(x) => *x,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Num::Exact(_))
    }

    fn parse(v: &Value, path: &str) -> Result<Num, DocError> {
        match v {
            Value::String(s) => parse_rational(s)
                .map(Num::Exact)
                .ok_or_else(|| field(path, format!("cannot parse {s:?} as a fraction or decimal"))),
            Value::Number(n) => n
                .as_f64()
                .filter(|x| x.is_finite())
                .map(Num::Float)
                .ok_or_else(|| field(path, "number out of range")),
            _ => Err(field(path, "expected a number or a fraction string")),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Num::Exact(q) => Value::String(format_rational(q)),
            Num::Float(x) => json!(x),
        }
    }
}

/// A gap entry.
#[derive(Debug, Clone, PartialEq)]
pub enum Gap {
    Value(Num),
    Infinity,
}

impl Gap {
    fn parse(v: &Value, path: &str) -> Result<Gap, DocError> {
        match v {
            Value::String(s) if s.trim().eq_ignore_ascii_case("inf") => Ok(Gap::Infinity),
            _ => Num::parse(v, path).map(Gap::Value),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Gap::Value(n) => n.to_json(),
            Gap::Infinity => Value::String("inf".into()),
        }
    }

    pub fn is_exact(&self) -> bool {
        match self {
            Gap::Value(n) => n.is_exact(),
            Gap::Infinity => true,
        }
    }

    fn to_proj_f64(&self) -> ProjReal<f64> {
        match self {
            Gap::Value(n) => ProjReal::Finite(n.to_f64()),
            Gap::Infinity => ProjReal::Infinity,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadEntry {
    /// `[lambda, gamma, mu, delta]`.
    pub angles: Option<[Num; 4]>,
    /// `[a, b, c, e]`.
    pub coeffs: Option<[Num; 4]>,
}

const ANGLE_KEYS: [&str; 4] = ["lambda", "gamma", "mu", "delta"];
const COEFF_KEYS: [&str; 4] = ["a", "b", "c", "e"];

fn parse_record(v: &Value, keys: [&str; 4], path: &str) -> Result<[Num; 4], DocError> {
    let obj = v
        .as_object()
        .ok_or_else(|| field(path, "expected an object"))?;
    if let Some(k) = obj.keys().find(|k| !keys.contains(&k.as_str())) {
        return Err(field(format!("{path}.{k}"), "unknown key"));
    }
    let get = |k: &str| -> Result<Num, DocError> {
        let p = format!("{path}.{k}");
        Num::parse(obj.get(k).ok_or_else(|| field(&p, "missing"))?, &p)
    };
    Ok([get(keys[0])?, get(keys[1])?, get(keys[2])?, get(keys[3])?])
}

fn record_json(vals: &[Num; 4], keys: [&str; 4]) -> Value {
    let mut m = Map::new();
    for (k, v) in keys.iter().zip(vals) {
        m.insert(k.to_string(), v.to_json());
    }
    Value::Object(m)
}

impl QuadEntry {
    fn parse(v: &Value, path: &str) -> Result<QuadEntry, DocError> {
        let obj = v
            .as_object()
            .ok_or_else(|| field(path, "expected an object"))?;
        if let Some(k) = obj.keys().find(|k| *k != "angles" && *k != "coeffs") {
            return Err(field(format!("{path}.{k}"), "unknown key"));
        }
        let angles = obj
            .get("angles")
            .map(|a| parse_record(a, ANGLE_KEYS, &format!("{path}.angles")))
            .transpose()?;
        let coeffs = obj
            .get("coeffs")
            .map(|c| parse_record(c, COEFF_KEYS, &format!("{path}.coeffs")))
            .transpose()?;
        if angles.is_none() && coeffs.is_none() {
            return Err(field(path, "needs \"angles\" or \"coeffs\""));
        }
        if let Some(a) = &angles {
            let q = quad_angles(a);
            q.validate()
                .map_err(|e| field(format!("{path}.angles"), e.to_string()))?;
        }
        Ok(QuadEntry { angles, coeffs })
    }

    fn to_json(&self) -> Value {
        let mut m = Map::new();
        if let Some(a) = &self.angles {
            m.insert("angles".into(), record_json(a, ANGLE_KEYS));
        }
        if let Some(c) = &self.coeffs {
            m.insert("coeffs".into(), record_json(c, COEFF_KEYS));
        }
        Value::Object(m)
    }

    pub fn is_exact(&self) -> bool {
        self.coeffs
            .as_ref()
            .is_some_and(|c| c.iter().all(Num::is_exact))
    }

    pub fn angles_f64(&self) -> Option<QuadAngles> {
        self.angles.as_ref().map(quad_angles)
    }
}

fn quad_angles(a: &[Num; 4]) -> QuadAngles {
    QuadAngles {
        lambda: a[0].to_f64(),
        gamma: a[1].to_f64(),
        mu: a[2].to_f64(),
        delta: a[3].to_f64(),
    }
}

/// Requested arithmetic for the pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    /// Exact when every coefficient and gap is a string, float otherwise.
    #[default]
    Auto,
    Exact,
    Float,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LoadedMesh {
    Exact(MeshSpec<BigRational>),
    Float(MeshSpec<f64>),
}

impl LoadedMesh {
    pub fn to_f64(&self) -> MeshSpec<f64> {
        match self {
            LoadedMesh::Exact(m) => m.to_f64(),
            LoadedMesh::Float(m) => m.clone(),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, LoadedMesh::Exact(_))
    }
}

/// A mesh plus cross-check warnings gathered while loading it.
#[derive(Debug, Clone, PartialEq)]
pub struct Loaded {
    pub mesh: LoadedMesh,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeshDocument {
    pub version: String,
    pub quads: [QuadEntry; 4],
    pub gaps: [Gap; 4],
    pub gap_splits: Option<[GapAngles; 4]>,
}

fn four<T: Clone>(
    v: &Value,
    path: &str,
    f: impl Fn(&Value, &str) -> Result<T, DocError>,
) -> Result<[T; 4], DocError> {
    let arr = v
        .as_array()
        .ok_or_else(|| field(path, "expected an array"))?;
    if arr.len() != 4 {
        return Err(field(
            path,
            format!("expected 4 entries, found {}", arr.len()),
        ));
    }
    let items: Vec<T> = arr
        .iter()
        .enumerate()
        .map(|(i, x)| f(x, &format!("{path}[{i}]")))
        .collect::<Result<_, _>>()?;
    Ok([
        items[0].clone(),
        items[1].clone(),
        items[2].clone(),
        items[3].clone(),
    ])
}

impl MeshDocument {
    pub fn parse(text: &str) -> Result<MeshDocument, DocError> {
        let v: Value = serde_json::from_str(text).map_err(|e| DocError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        MeshDocument::from_value(&v)
    }

    pub fn from_value(v: &Value) -> Result<MeshDocument, DocError> {
        let obj = v
            .as_object()
            .ok_or_else(|| field("$", "expected an object"))?;
        let version = match obj.get("version") {
            Some(Value::String(s)) if s == VERSION => s.clone(),
            Some(other) => {
                return Err(field(
                    "version",
                    format!("unsupported version {other}, expected {VERSION:?}"),
                ))
            }
            None => return Err(field("version", "missing")),
        };
        let quads = four(
            obj.get("quads").ok_or_else(|| field("quads", "missing"))?,
            "quads",
            QuadEntry::parse,
        )?;
        let gaps = four(
            obj.get("gaps").ok_or_else(|| field("gaps", "missing"))?,
            "gaps",
            Gap::parse,
        )?;
        let gap_splits = obj
            .get("gap_splits")
            .map(|s| {
                four(s, "gap_splits", |x, p| {
                    let r = x
                        .as_object()
                        .ok_or_else(|| field(p, "expected an object"))?;
                    let get = |k: &str| -> Result<f64, DocError> {
                        let q = format!("{p}.{k}");
                        Ok(Num::parse(r.get(k).ok_or_else(|| field(&q, "missing"))?, &q)?.to_f64())
                    };
                    Ok(GapAngles {
                        tau: get("tau")?,
                        zeta: get("zeta")?,
                    })
                })
            })
            .transpose()?;
        Ok(MeshDocument {
            version,
            quads,
            gaps,
            gap_splits,
        })
    }

    pub fn to_value(&self) -> Value {
        let mut m = Map::new();
        m.insert("version".into(), Value::String(self.version.clone()));
        m.insert(
            "quads".into(),
            Value::Array(self.quads.iter().map(QuadEntry::to_json).collect()),
        );
        m.insert(
            "gaps".into(),
            Value::Array(self.gaps.iter().map(Gap::to_json).collect()),
        );
        if let Some(s) = &self.gap_splits {
            let arr = s
                .iter()
                .map(|g| json!({ "tau": g.tau, "zeta": g.zeta }))
                .collect();
            m.insert("gap_splits".into(), Value::Array(arr));
        }
        Value::Object(m)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_value()).expect("document values are finite")
    }

    /// True when every quad carries string coefficients and every gap is a string or "inf".
    pub fn is_exact(&self) -> bool {
        self.quads.iter().all(QuadEntry::is_exact) && self.gaps.iter().all(Gap::is_exact)
    }

    pub fn from_exact(m: &MeshSpec<BigRational>) -> MeshDocument {
        let quads = m.quads.clone().map(|q| QuadEntry {
            angles: None,
            coeffs: Some(q.as_array().map(Num::Exact)),
        });
        let gaps = m.gaps.clone().map(|g| match g {
            ProjReal::Finite(x) => Gap::Value(Num::Exact(x)),
            ProjReal::Infinity => Gap::Infinity,
        });
        let mut doc = MeshDocument {
            version: VERSION.into(),
            quads,
            gaps,
            gap_splits: m.splits,
        };
        doc.attach_angles(m.angles);
        doc
    }

    pub fn from_float(m: &MeshSpec<f64>) -> MeshDocument {
        let quads = m.quads.clone().map(|q| QuadEntry {
            angles: None,
            coeffs: Some(q.as_array().map(Num::Float)),
        });
        let gaps = m.gaps.clone().map(|g| match g {
            ProjReal::Finite(x) => Gap::Value(Num::Float(x)),
            ProjReal::Infinity => Gap::Infinity,
        });
        let mut doc = MeshDocument {
            version: VERSION.into(),
            quads,
            gaps,
            gap_splits: m.splits,
        };
        doc.attach_angles(m.angles);
        doc
    }

    fn attach_angles(&mut self, angles: Option<[QuadAngles; 4]>) {
        if let Some(a) = angles {
            for (q, a) in self.quads.iter_mut().zip(a) {
                q.angles = Some([a.lambda, a.gamma, a.mu, a.delta].map(Num::Float));
            }
        }
    }

    /// Build the mesh in the requested arithmetic.
    pub fn to_mesh(&self, mode: Mode) -> Result<Loaded, DocError> {
        let mut warnings = Vec::new();
        let exact = match mode {
            Mode::Auto => self.is_exact(),
            Mode::Float => false,
            Mode::Exact => {
                if let Some(path) = self.first_inexact() {
                    return Err(DocError::NotExact { path });
                }
                true
            }
        };
        let mut float_quads = Vec::with_capacity(4);
        for (i, q) in self.quads.iter().enumerate() {
            let from_angles = q
                .angles_f64()
                .map(|a| {
                    coeffs_from_angles(&a)
                        .map_err(|e| field(format!("quads[{i}].angles"), e.to_string()))
                })
                .transpose()?;
            let cf = match (&q.coeffs, from_angles) {
                (Some(c), Some(h)) => {
                    let c = BricardCoeffs::new(
                        c[0].to_f64(),
                        c[1].to_f64(),
                        c[2].to_f64(),
                        c[3].to_f64(),
                    );
                    let dev = c
                        .as_array()
                        .iter()
                        .zip(h.as_array())
                        .map(|(x, y)| (x - y).abs())
                        .fold(0.0, f64::max);
                    if dev > CROSS_CHECK_TOL {
                        warnings.push(format!(
                            "quads[{i}]: angles give coefficients differing by {dev:.3e} from the listed ones; using the coefficients"
                        ));
                    }
                    c
                }
                (Some(c), None) => {
                    BricardCoeffs::new(c[0].to_f64(), c[1].to_f64(), c[2].to_f64(), c[3].to_f64())
                }
                (None, Some(h)) => h,
                (None, None) => unreachable!("parse rejects empty quads"),
            };
            float_quads.push(cf);
        }
        let float_gaps = self.gaps.clone().map(|g| g.to_proj_f64());
        if let Some(splits) = &self.gap_splits {
            for (i, (s, f)) in splits.iter().zip(&float_gaps).enumerate() {
                let dev = projective_gap_distance(&s.gap(), f);
                if dev > CROSS_CHECK_TOL {
                    warnings.push(format!(
                        "gap_splits[{i}]: tan((tau+zeta)/2) differs from gap {} by {dev:.3e}",
                        i + 1
                    ));
                }
            }
        }
        let angles = self
            .quads
            .iter()
            .map(QuadEntry::angles_f64)
            .collect::<Option<Vec<_>>>()
            .map(|v| [v[0], v[1], v[2], v[3]]);
        let mesh = if exact {
            let quads = self.quads.clone().map(|q| {
                let c = q.coeffs.expect("exact documents carry coefficients");
                let [a, b, cc, e] = c.map(|n| match n {
                    Num::Exact(x) => x,
                    Num::Float(_) => unreachable!("checked by is_exact"),
                });
                BricardCoeffs::new(a, b, cc, e)
            });
            let gaps = self.gaps.clone().map(|g| match g {
                Gap::Value(Num::Exact(x)) => ProjReal::Finite(x),
                Gap::Infinity => ProjReal::Infinity,
                Gap::Value(Num::Float(_)) => unreachable!("checked by is_exact"),
            });
            let mut m = MeshSpec::new(quads, gaps);
            m.angles = angles;
            m.splits = self.gap_splits;
            LoadedMesh::Exact(m)
        } else {
            let quads = [
                float_quads[0].clone(),
                float_quads[1].clone(),
                float_quads[2].clone(),
                float_quads[3].clone(),
            ];
            let mut m = MeshSpec::new(quads, float_gaps);
            m.angles = angles;
            m.splits = self.gap_splits;
            LoadedMesh::Float(m)
        };
        Ok(Loaded { mesh, warnings })
    }

    fn first_inexact(&self) -> Option<String> {
        for (i, q) in self.quads.iter().enumerate() {
            match &q.coeffs {
                None => return Some(format!("quads[{i}].angles")),
                Some(c) => {
                    if let Some(j) = c.iter().position(|n| !n.is_exact()) {
                        return Some(format!("quads[{i}].coeffs.{}", COEFF_KEYS[j]));
                    }
                }
            }
        }
        self.gaps
            .iter()
            .position(|g| !g.is_exact())
            .map(|i| format!("gaps[{i}]"))
    }

    /// Fill coefficients from angles where missing, keeping existing entries.
    pub fn with_coeffs(&self) -> Result<MeshDocument, DocError> {
        let mut doc = self.clone();
        for (i, q) in doc.quads.iter_mut().enumerate() {
            if q.coeffs.is_none() {
                let a = q.angles_f64().expect("parse rejects empty quads");
                let c = coeffs_from_angles(&a)
                    .map_err(|e| field(format!("quads[{i}].angles"), e.to_string()))?;
                q.coeffs = Some(c.as_array().map(Num::Float));
            }
        }
        Ok(doc)
    }

    /// Fill angles from coefficients where missing.
    pub fn with_angles(&self) -> Result<MeshDocument, DocError> {
        let mut doc = self.clone();
        for (i, q) in doc.quads.iter_mut().enumerate() {
            if q.angles.is_none() {
                let c = q.coeffs.as_ref().expect("parse rejects empty quads");
                let cf =
                    BricardCoeffs::new(c[0].to_f64(), c[1].to_f64(), c[2].to_f64(), c[3].to_f64());
                let r = angles_from_coeffs(&cf).ok_or_else(|| {
                    field(
                        format!("quads[{i}].coeffs"),
                        "no real spherical quad has these coefficients",
                    )
                })?;
                let a = r.angles;
                q.angles = Some([a.lambda, a.gamma, a.mu, a.delta].map(Num::Float));
            }
        }
        Ok(doc)
    }
}

/// Chordal distance between two gaps on the projective line.
fn projective_gap_distance(a: &ProjReal<f64>, b: &ProjReal<f64>) -> f64 {
    match (a, b) {
        (ProjReal::Infinity, ProjReal::Infinity) => 0.0,
        (ProjReal::Finite(x), ProjReal::Infinity) | (ProjReal::Infinity, ProjReal::Finite(x)) => {
            1.0 / (1.0 + x * x).sqrt()
        }
        (ProjReal::Finite(x), ProjReal::Finite(y)) => {
            (x - y).abs() / ((1.0 + x * x).sqrt() * (1.0 + y * y).sqrt())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::golden::physical_mesh;
    use crate::scalar::rat;

    const EXACT_DOC: &str = r#"{
        "version": "kokotsakis-mesh/1",
        "quads": [
            {"coeffs": {"a": "0", "b": "-2/3", "c": "-1/3", "e": "0"}},
            {"coeffs": {"a": "1.5", "b": "1", "c": "-1/4", "e": "-2/3"}},
            {"coeffs": {"a": "1", "b": "2", "c": "3", "e": "4"}},
            {"coeffs": {"a": "1", "b": "2", "c": "3", "e": "4"}}
        ],
        "gaps": ["0", "inf", "1/2", "-3"]
    }"#;

    #[test]
    fn exact_document_parses_to_rationals() {
        let d = MeshDocument::parse(EXACT_DOC).unwrap();
        assert!(d.is_exact());
        let Loaded { mesh, warnings } = d.to_mesh(Mode::Auto).unwrap();
        assert!(warnings.is_empty());
        let LoadedMesh::Exact(m) = mesh else {
            panic!("expected exact mesh")
        };
        assert_eq!(m.quads[1].a, rat(3, 2));
        assert_eq!(m.quads[0].b, rat(-2, 3));
        assert_eq!(m.gaps[1], ProjReal::Infinity);
        assert_eq!(m.gaps[2], ProjReal::Finite(rat(1, 2)));
    }

    #[test]
    fn round_trip_is_identity() {
        let d = MeshDocument::parse(EXACT_DOC).unwrap();
        let again = MeshDocument::parse(&d.to_json_string()).unwrap();
        assert_eq!(d, again);
        let f = MeshDocument::from_float(&physical_mesh());
        assert_eq!(MeshDocument::parse(&f.to_json_string()).unwrap(), f);
    }

    #[test]
    fn numbers_imply_float_mode() {
        let text = EXACT_DOC.replace("\"-3\"", "-3");
        let d = MeshDocument::parse(&text).unwrap();
        assert!(!d.is_exact());
        assert!(!d.to_mesh(Mode::Auto).unwrap().mesh.is_exact());
        assert_eq!(
            d.to_mesh(Mode::Exact).unwrap_err(),
            DocError::NotExact {
                path: "gaps[3]".into()
            }
        );
    }

    #[test]
    fn diagnostics_name_the_field() {
        let bad = EXACT_DOC.replace("\"1/2\"", "\"1/0\"");
        match MeshDocument::parse(&bad).unwrap_err() {
            DocError::Field { path, .. } => assert_eq!(path, "gaps[2]"),
            e => panic!("unexpected {e}"),
        }
        match MeshDocument::parse("{\"version\": ").unwrap_err() {
            DocError::Syntax { line, .. } => assert_eq!(line, 1),
            e => panic!("unexpected {e}"),
        }
        let three = EXACT_DOC.replace(", \"-3\"]", "]");
        assert!(MeshDocument::parse(&three)
            .unwrap_err()
            .to_string()
            .contains("expected 4 entries"));
    }

    #[test]
    fn angles_cross_checked_against_coefficients() {
        let doc = MeshDocument::from_float(&physical_mesh());
        let loaded = doc.to_mesh(Mode::Auto).unwrap();
        for w in &loaded.warnings {
            assert!(w.contains("differing by"), "{w}");
        }
        let mut skewed = doc.clone();
        skewed.quads[0].coeffs.as_mut().unwrap()[0] = Num::Float(1.6);
        let w = skewed.to_mesh(Mode::Auto).unwrap().warnings;
        assert!(w.iter().any(|s| s.starts_with("quads[0]")));
    }

    #[test]
    fn angle_only_document_uses_bricard_coefficients() {
        let mut doc = MeshDocument::from_float(&physical_mesh());
        for q in doc.quads.iter_mut() {
            q.coeffs = None;
        }
        let m = doc.to_mesh(Mode::Auto).unwrap().mesh.to_f64();
        for (q, g) in m.quads.iter().zip(crate::golden::physical_coeffs()) {
            for (x, y) in q.as_array().iter().zip(g.as_array()) {
                assert!((x - y).abs() < 1e-5);
            }
        }
        let filled = doc.with_coeffs().unwrap();
        assert!(filled.quads.iter().all(|q| q.coeffs.is_some()));
    }
}
