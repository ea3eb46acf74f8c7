//! `kokotsakis`: classify, construct, trace, embed, verify and convert mesh documents.
//!
//! Exit codes: 0 flexible or success, 1 rigid or failed verification,
//! 2 singular quad, 3 parse error, 4 inadmissible construction, 5 analysis error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde_json::{json, Value};
use thiserror::Error;

use kokotsakis::construct::{
    construct_equimodular_general_seeded, construct_iq, construct_pr, construct_seeded, reflect,
    ConstructError,
};
use kokotsakis::coupling::Coupling;
use kokotsakis::document::{DocError, Loaded, LoadedMesh, MeshDocument, Mode};
use kokotsakis::embed::embed_mesh_state;
use kokotsakis::matching::{is_flexible, MatchError, MatchOutcome, MatchingLabel, MeshSpec};
use kokotsakis::scalar::{parse_rational, set_tolerance, tolerance, Scalar, Tolerance};
use kokotsakis::trace::{trace, TraceError, TraceOptions, TraceReport};
use kokotsakis::verify::{verify_mesh, verify_suite, VerifyReport};

const SINGULAR: &str = "singular (anti)deltoid — out of scope";

#[derive(Parser)]
#[command(
    name = "kokotsakis",
    version,
    about = "Flexibility of 3x3 Kokotsakis meshes via Bricard equations"
)]
struct Cli {
    /// Arithmetic: auto (exact when every value is a string), exact, or float.
    #[arg(long, global = true, value_enum, default_value_t = ModeArg::Auto)]
    mode: ModeArg,
    /// Relative tolerance for float comparisons.
    #[arg(long, global = true)]
    eps: Option<f64>,
    /// Machine-readable JSON reports on stdout.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Auto,
    Exact,
    Float,
}

#[derive(Clone, Copy, ValueEnum)]
enum Representation {
    Coeffs,
    Angles,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a mesh document as flexible (with its class) or rigid.
    Classify { path: PathBuf },
    /// Build a flexible mesh of the given class and write its document.
    Construct {
        /// One of PR, HQ, IR, RQ, PQ, IQ, Q, PR+IR, HQ+IQ, HQ+PQ, PQ+IQ, or EQG for a
        /// general-type equimodular reflection mesh with F1 = ±1 (quads without real arcs).
        label: String,
        /// PR: the four branch roots k1..k4 (product 1), e.g. 2,3,1/2,1/3.
        #[arg(long, value_delimiter = ',')]
        k: Option<Vec<String>>,
        /// PR: partner roots k'1..k'4 (default -2k).
        #[arg(long, value_delimiter = ',')]
        kp: Option<Vec<String>>,
        /// IQ: a1=..,c1=..,a2=..,b2=..[,r=..] (r defaults to -1).
        #[arg(long)]
        params: Option<String>,
        /// Reflection mesh from quads 1, 2 and gap 1 of a seed document.
        #[arg(long)]
        reflect: Option<PathBuf>,
        /// Seed for random parameter draws.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep the first dihedral angle and write the accepted states as CSV.
    Trace {
        path: PathBuf,
        #[arg(long, default_value_t = 400)]
        steps: usize,
        /// Keep only real states.
        #[arg(long)]
        real: bool,
        #[arg(long, default_value_t = 0.05)]
        from: f64,
        #[arg(long, default_value_t = std::f64::consts::PI - 0.05)]
        to: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Embed one real trace state as a spherical linkage (OBJ or JSON by extension).
    Embed {
        path: PathBuf,
        #[arg(long, default_value_t = 0)]
        state: usize,
        #[arg(long, default_value_t = 400)]
        steps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the invariant suites on a document or on the built-in battery.
    Verify {
        #[arg(required_unless_present = "suite")]
        path: Option<PathBuf>,
        #[arg(long, conflicts_with = "path")]
        suite: bool,
        /// Seeds per class for --suite.
        #[arg(long, default_value_t = 5)]
        per_label: u64,
    },
    /// Fill in coefficients from angles or angles from coefficients.
    Convert {
        path: PathBuf,
        #[arg(long, value_enum)]
        to: Representation,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("{SINGULAR} (quad {0})")]
    Singular(usize),
    #[error("rigid: {0}")]
    Rigid(String),
    #[error("inadmissible: {0}")]
    Inadmissible(String),
    #[error("{0}")]
    Analysis(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Rigid(_) => 1,
            CliError::Singular(_) => 2,
            CliError::Parse(_) => 3,
            CliError::Inadmissible(_) => 4,
            CliError::Analysis(_) | CliError::Io(_) => 5,
        }
    }
}

impl From<DocError> for CliError {
    fn from(e: DocError) -> Self {
        CliError::Parse(e.to_string())
    }
}

impl From<MatchError> for CliError {
    fn from(e: MatchError) -> Self {
        match e {
            MatchError::Singular(i) => CliError::Singular(i),
            e => CliError::Analysis(e.to_string()),
        }
    }
}

impl From<ConstructError> for CliError {
    fn from(e: ConstructError) -> Self {
        CliError::Inadmissible(e.to_string())
    }
}

impl From<TraceError> for CliError {
    fn from(e: TraceError) -> Self {
        match e {
            TraceError::Rigid(why) => CliError::Rigid(why),
            TraceError::Match(m) => m.into(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(eps) = cli.eps {
        set_tolerance(Tolerance {
            rel: eps,
            abs: tolerance().abs,
        });
    }
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            if cli.json {
                println!(
                    "{}",
                    json!({ "error": e.to_string(), "exit_code": e.code() })
                );
            }
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

fn run(cli: &Cli) -> Result<u8, CliError> {
    match &cli.command {
        Command::Classify { path } => cmd_classify(cli, path),
        Command::Construct {
            label,
            k,
            kp,
            params,
            reflect,
            seed,
            out,
        } => cmd_construct(
            label,
            k.as_deref(),
            kp.as_deref(),
            params.as_deref(),
            reflect.as_deref(),
            *seed,
            out.as_deref(),
        ),
        Command::Trace {
            path,
            steps,
            real,
            from,
            to,
            out,
        } => {
            let opts = TraceOptions {
                alpha_range: (*from, *to),
                steps: *steps,
                real_only: *real,
                ..TraceOptions::default()
            };
            cmd_trace(cli, path, &opts, out.as_deref())
        }
        Command::Embed {
            path,
            state,
            steps,
            out,
        } => cmd_embed(cli, path, *state, *steps, out.as_deref()),
        Command::Verify {
            path,
            suite,
            per_label,
        } => cmd_verify(cli, path.as_deref(), *suite, *per_label),
        Command::Convert { path, to, out } => cmd_convert(path, *to, out.as_deref()),
    }
}

fn mode(cli: &Cli) -> Mode {
    match cli.mode {
        ModeArg::Auto => Mode::Auto,
        ModeArg::Exact => Mode::Exact,
        ModeArg::Float => Mode::Float,
    }
}

fn read_document(path: &Path) -> Result<MeshDocument, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    MeshDocument::parse(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

fn load(cli: &Cli, path: &Path) -> Result<Loaded, CliError> {
    let loaded = read_document(path)?.to_mesh(mode(cli))?;
    for w in &loaded.warnings {
        eprintln!("warning: {w}");
    }
    Ok(loaded)
}

fn write_output(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn classify_any(mesh: &LoadedMesh) -> Result<MatchOutcome, MatchError> {
    match mesh {
        LoadedMesh::Exact(m) => is_flexible(m),
        LoadedMesh::Float(m) => is_flexible(m),
    }
}

fn cmd_classify(cli: &Cli, path: &Path) -> Result<u8, CliError> {
    let loaded = load(cli, path)?;
    let admissibility = admissibility_warnings(&loaded.mesh);
    for w in &admissibility {
        eprintln!("warning: {w}");
    }
    let out = classify_any(&loaded.mesh)?;
    let code = if out.is_flexible() { 0 } else { 1 };
    if cli.json {
        let report = outcome_json(
            &out,
            &loaded
                .warnings
                .iter()
                .chain(&admissibility)
                .cloned()
                .collect::<Vec<_>>(),
        );
        println!(
            "{}",
            serde_json::to_string_pretty(&report).expect("report serializes")
        );
        return Ok(code);
    }
    let quad = |k: usize| (out.rotation + k - 1) % 4 + 1;
    println!("mode: {}", if out.float_mode { "float" } else { "exact" });
    for (c, pair) in [(0, (1, 2)), (1, (3, 4))] {
        println!(
            "coupling ({},{}): {}",
            quad(pair.0),
            quad(pair.1),
            out.coupling_labels[c]
        );
        for line in &out.coupling_evidence[c] {
            println!("  {line}");
        }
    }
    println!(
        "resultant degrees: {:?} {:?}",
        out.resultant_degrees[0], out.resultant_degrees[1]
    );
    for s in &out.shared {
        println!("shared factor {:?}: {}", s.degree, s.display);
    }
    for n in &out.notes {
        println!("note: {n}");
    }
    match out.label {
        Some(l) => println!("flexible: {l}"),
        None => println!("rigid"),
    }
    Ok(code)
}

fn admissibility_warnings(mesh: &LoadedMesh) -> Vec<String> {
    fn collect<S: Scalar>(m: &MeshSpec<S>) -> Vec<String> {
        m.quads
            .iter()
            .enumerate()
            .filter_map(|(i, q)| {
                let v = q.violated_inequalities();
                (!v.is_empty()).then(|| {
                    format!(
                        "quad {} violates {}",
                        i + 1,
                        v.iter()
                            .map(ToString::to_string)
                            .collect::<Vec<_>>()
                            .join(", ")
                    )
                })
            })
            .collect()
    }
    match mesh {
        LoadedMesh::Exact(m) => collect(m),
        LoadedMesh::Float(m) => collect(m),
    }
}

fn outcome_json(out: &MatchOutcome, warnings: &[String]) -> Value {
    let quad = |k: usize| (out.rotation + k - 1) % 4 + 1;
    json!({
        "flexible": out.is_flexible(),
        "label": out.label.map(|l| l.name()),
        "mode": if out.float_mode { "float" } else { "exact" },
        "couplings": [
            { "quads": [quad(1), quad(2)], "class": out.coupling_labels[0].to_string(), "evidence": out.coupling_evidence[0] },
            { "quads": [quad(3), quad(4)], "class": out.coupling_labels[1].to_string(), "evidence": out.coupling_evidence[1] },
        ],
        "shared_factors": out.shared.iter().map(|s| json!({ "degree": [s.degree.0, s.degree.1], "factor": s.display })).collect::<Vec<_>>(),
        "resultant_degrees": out.resultant_degrees.map(|d| [d.0, d.1]),
        "notes": out.notes,
        "warnings": warnings,
    })
}

fn rationals(vals: &[String], what: &str) -> Result<Vec<BigRational>, CliError> {
    vals.iter()
        .map(|s| {
            parse_rational(s).ok_or_else(|| CliError::Parse(format!("{what}: cannot parse {s:?}")))
        })
        .collect()
}

fn four(v: Vec<BigRational>, what: &str) -> Result<[BigRational; 4], CliError> {
    v.try_into().map_err(|v: Vec<_>| {
        CliError::Parse(format!("{what}: expected 4 values, found {}", v.len()))
    })
}

fn cmd_construct(
    label: &str,
    k: Option<&[String]>,
    kp: Option<&[String]>,
    params: Option<&str>,
    reflect_seed: Option<&Path>,
    seed: u64,
    out: Option<&Path>,
) -> Result<u8, CliError> {
    if label.eq_ignore_ascii_case("EQG") {
        let mesh = construct_equimodular_general_seeded(seed)?;
        write_output(
            out,
            &(MeshDocument::from_exact(&mesh).to_json_string() + "\n"),
        )?;
        return Ok(0);
    }
    let label = MatchingLabel::parse(label)
        .ok_or_else(|| CliError::Parse(format!("unknown label {label:?}")))?;
    let mesh = if let Some(p) = reflect_seed {
        let doc = read_document(p)?;
        let LoadedMesh::Exact(m) = doc.to_mesh(Mode::Exact)?.mesh else {
            unreachable!("exact mode")
        };
        let mesh = reflect(&Coupling::new(
            m.quads[0].clone(),
            m.quads[1].clone(),
            m.gaps[0].clone(),
            m.gaps[1].clone(),
        ))?;
        // The class of a reflection mesh is set by the seed coupling, not by the requested label.
        match is_flexible(&mesh).ok().and_then(|o| o.label) {
            Some(got) if got != label => {
                eprintln!("warning: reflection mesh classifies as {got}, not {label}")
            }
            _ => {}
        }
        mesh
    } else if let Some(ks) = k {
        if label != MatchingLabel::PR {
            return Err(CliError::Parse("--k applies to PR only".into()));
        }
        let ks = four(rationals(ks, "--k")?, "--k")?;
        let kps = kp
            .map(|v| rationals(v, "--kp").and_then(|v| four(v, "--kp")))
            .transpose()?;
        construct_pr(&ks, kps.as_ref())?
    } else if let Some(p) = params {
        if label != MatchingLabel::IQ {
            return Err(CliError::Parse("--params applies to IQ only".into()));
        }
        let mut vals = std::collections::HashMap::new();
        for item in p.split(',') {
            let (key, v) = item.split_once('=').ok_or_else(|| {
                CliError::Parse(format!("--params: expected key=value, got {item:?}"))
            })?;
            let q = parse_rational(v)
                .ok_or_else(|| CliError::Parse(format!("--params: cannot parse {v:?}")))?;
            vals.insert(key.trim().to_string(), q);
        }
        let get = |key: &str| {
            vals.get(key)
                .cloned()
                .ok_or_else(|| CliError::Parse(format!("--params: missing {key}")))
        };
        let r = vals
            .get("r")
            .cloned()
            .unwrap_or_else(|| BigRational::from_integer((-1).into()));
        construct_iq(&get("a1")?, &get("c1")?, &get("a2")?, &get("b2")?, &r)?
    } else {
        construct_seeded(label, seed)?
    };
    let mut text = MeshDocument::from_exact(&mesh).to_json_string();
    text.push('\n');
    write_output(out, &text)?;
    Ok(0)
}

fn trace_any(mesh: &LoadedMesh, opts: &TraceOptions) -> Result<TraceReport, TraceError> {
    match mesh {
        LoadedMesh::Exact(m) => trace(m, opts),
        LoadedMesh::Float(m) => trace(m, opts),
    }
}

fn cmd_trace(
    cli: &Cli,
    path: &Path,
    opts: &TraceOptions,
    out: Option<&Path>,
) -> Result<u8, CliError> {
    let loaded = load(cli, path)?;
    let report = trace_any(&loaded.mesh, opts)?;
    write_output(out, &report.to_csv())?;
    let real = report.states().filter(|s| s.is_real()).count();
    if let Some(d) = &report.diagnostic {
        eprintln!("{d}");
    }
    let summary = json!({
        "accepted": report.accepted(),
        "real": real,
        "branches": report.traces.len(),
        "skipped": report.skipped.len(),
        "diagnostic": report.diagnostic,
    });
    if cli.json && out.is_some() {
        println!("{summary}");
    } else {
        eprintln!(
            "accepted {} states ({real} real) on {} branches, {} skipped",
            report.accepted(),
            report.traces.len(),
            report.skipped.len()
        );
    }
    Ok(0)
}

fn cmd_embed(
    cli: &Cli,
    path: &Path,
    state: usize,
    steps: usize,
    out: Option<&Path>,
) -> Result<u8, CliError> {
    let loaded = load(cli, path)?;
    let opts = TraceOptions {
        steps,
        real_only: true,
        ..TraceOptions::default()
    };
    let report = trace_any(&loaded.mesh, &opts)?;
    let states = report.sorted_states();
    let s = states.get(state).ok_or_else(|| {
        CliError::Analysis(format!(
            "state {state} out of range: {} real states",
            states.len()
        ))
    })?;
    let e = embed_mesh_state(&loaded.mesh.to_f64(), s)
        .map_err(|e| CliError::Analysis(e.to_string()))?;
    eprintln!(
        "state {state}: alpha1 = {:.6}, local residual {:.2e}, loop residual {:.2e}",
        s.alpha1, e.local_residual, e.loop_residual
    );
    let obj = out.is_some_and(|p| p.extension().is_some_and(|x| x.eq_ignore_ascii_case("obj")));
    let text = if obj {
        e.to_obj()
    } else {
        serde_json::to_string_pretty(&e.to_json()).expect("embedding serializes") + "\n"
    };
    write_output(out, &text)?;
    Ok(0)
}

fn report_json(r: &VerifyReport) -> Value {
    json!({
        "subject": r.subject,
        "passed": r.passed(),
        "checks": r.checks.iter().map(|c| json!({ "name": c.name, "passed": c.passed, "detail": c.detail })).collect::<Vec<_>>(),
    })
}

fn cmd_verify(cli: &Cli, path: Option<&Path>, suite: bool, per_label: u64) -> Result<u8, CliError> {
    let reports = if suite {
        verify_suite(per_label)
    } else {
        let path = path.expect("clap requires a path without --suite");
        let loaded = load(cli, path)?;
        let subject = path.display().to_string();
        vec![match &loaded.mesh {
            LoadedMesh::Exact(m) => verify_mesh(&subject, m),
            LoadedMesh::Float(m) => verify_mesh(&subject, m),
        }]
    };
    let failed = reports.iter().filter(|r| !r.passed()).count();
    if cli.json {
        let v = json!({ "passed": failed == 0, "reports": reports.iter().map(report_json).collect::<Vec<_>>() });
        println!(
            "{}",
            serde_json::to_string_pretty(&v).expect("report serializes")
        );
    } else {
        for r in &reports {
            if suite && r.passed() {
                println!("pass {}", r.subject);
            } else {
                print!("{r}");
            }
        }
        println!(
            "{} of {} reports passed",
            reports.len() - failed,
            reports.len()
        );
    }
    Ok(if failed == 0 { 0 } else { 1 })
}

fn cmd_convert(path: &Path, to: Representation, out: Option<&Path>) -> Result<u8, CliError> {
    let doc = read_document(path)?;
    let mut converted = match to {
        Representation::Coeffs => doc.with_coeffs()?,
        Representation::Angles => doc.with_angles()?,
    };
    for q in converted.quads.iter_mut() {
        match to {
            Representation::Coeffs => q.angles = None,
            Representation::Angles => q.coeffs = None,
        }
    }
    let mut text = converted.to_json_string();
    text.push('\n');
    write_output(out, &text)?;
    Ok(0)
}
