//! Command implementations. Each command loads and validates its input
//! documents, runs the requested computation, and produces an [`Outcome`]:
//! a status, a JSON payload and a process exit code.
//!
//! Exit codes are stable: 0 for success (verdicts such as `is_mc: false`
//! are data, not failures), 1 when a validator rejects an input object,
//! 2 when the engine refuses a computation, and 3 for unreadable
//! documents, malformed elements or bad command lines.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use mcdeform::artin::validate_artinian;
use mcdeform::check::ValidationReport;
use mcdeform::deform::{classify_first_order, counterexample_demo, DeformError};
use mcdeform::deligne::{gauge_path, nerve_member, FormHost, NerveCheck};
use mcdeform::dgla::validate_dgla;
use mcdeform::forms::{Monomial, SullivanForm, DEFAULT_POLY_BOUND};
use mcdeform::graded::end_complex;
use mcdeform::mc::{
    curvature, gauge_act, gauge_equivalent, mc_solve_square_zero, obstruction_step, GaugeOutcome,
    LiftOutcome, McError, TensorHost,
};
use mcdeform::{QComplex, QDgla, Rat};
use num_traits::Zero;
use serde_json::{json, Value};

use crate::doc::{self, DocIssue, Kind};

/// The command-line surface of the `mcdeform` binary.
#[derive(Parser)]
#[command(
    name = "mcdeform",
    version,
    about = "Maurer–Cartan equations, gauge equivalence and deformations over ℚ"
)]
pub struct Cli {
    /// Write the report to FILE instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Cmd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
pub enum Cmd {
    /// Parse a document and run the validator for its kind.
    Validate {
        /// Document to check.
        file: PathBuf,
    },
    /// Maurer–Cartan computations in m ⊗ g.
    Mc {
        /// dg Lie algebra document.
        dgla: PathBuf,
        /// Artinian coefficient algebra document.
        ring: PathBuf,
        /// Evaluate the curvature of ELEMENT, given as JSON triples
        /// [["m","g","coeff"], ...] naming coefficient and Lie generators.
        #[arg(
            long,
            value_name = "ELEMENT",
            conflicts_with_all = ["solve_square_zero", "lift_order", "from"]
        )]
        check: Option<String>,
        /// Solve the equation exactly (requires m² = 0) and print a basis
        /// of the solution space.
        #[arg(long, conflicts_with_all = ["lift_order", "from"])]
        solve_square_zero: bool,
        /// Given --from Z solving the equation mod m^K, try to correct it
        /// to a solution mod m^(K+1), or exhibit the obstruction class.
        #[arg(long, value_name = "K", requires = "from")]
        lift_order: Option<usize>,
        /// Starting element for --lift-order.
        #[arg(long, value_name = "ELEMENT", requires = "lift_order")]
        from: Option<String>,
    },
    /// Decide gauge equivalence of two Maurer–Cartan elements.
    Gauge {
        /// dg Lie algebra document.
        dgla: PathBuf,
        /// Artinian coefficient algebra document.
        ring: PathBuf,
        /// First Maurer–Cartan element.
        z: String,
        /// Second Maurer–Cartan element.
        z_prime: String,
    },
    /// Simplices of the nerve: gauge paths and membership tests.
    Nerve {
        /// dg Lie algebra document.
        dgla: PathBuf,
        /// Artinian coefficient algebra document.
        ring: PathBuf,
        /// Build the 1-simplex connecting Z to its gauge transform under
        /// GAMMA (two JSON triple lists).
        #[arg(long, num_args = 2, value_names = ["Z", "GAMMA"])]
        path: Option<Vec<String>>,
        /// Test whether a form-valued element, given as JSON entries
        /// [["monomial","m","g","coeff"], ...], is a simplex of the nerve.
        #[arg(long, value_name = "FORM", conflicts_with = "path")]
        member: Option<String>,
        /// Simplex dimension for --member.
        #[arg(long, value_name = "N", default_value_t = 1)]
        dim: usize,
    },
    /// First-order deformation classes and the twisted-complex
    /// counterexample.
    Deform {
        /// Chain complex document (required by --classify).
        complex: Option<PathBuf>,
        /// Classify first-order deformations over the dual numbers.
        #[arg(long)]
        classify: bool,
        /// Run the window-complex demonstration with radius N.
        #[arg(long, value_name = "N", conflicts_with = "classify")]
        counterexample: Option<i64>,
    },
}

/// What a command produced.
pub struct Outcome {
    pub status: &'static str,
    pub payload: Value,
    pub exit_code: i32,
}

/// Early exit from a command, already shaped like an outcome.
#[derive(Debug)]
struct Bail {
    status: &'static str,
    payload: Value,
    exit_code: i32,
}

type CmdResult = Result<Outcome, Bail>;

fn ok_outcome(payload: Value) -> Outcome {
    Outcome {
        status: "ok",
        payload,
        exit_code: 0,
    }
}

fn parse_bail(message: impl Into<String>) -> Bail {
    Bail {
        status: "error",
        payload: json!({ "message": message.into() }),
        exit_code: 3,
    }
}

fn engine_bail(message: impl Into<String>) -> Bail {
    Bail {
        status: "error",
        payload: json!({ "message": message.into() }),
        exit_code: 2,
    }
}

impl From<DocIssue> for Bail {
    fn from(issue: DocIssue) -> Self {
        match issue {
            DocIssue::Parse(message) => parse_bail(message),
            DocIssue::Axiom { axiom, witness } => Bail {
                status: "fail",
                payload: json!({
                    "failures": [{ "axiom": axiom, "witness": witness }],
                    "valid": false,
                }),
                exit_code: 1,
            },
        }
    }
}

impl From<McError> for Bail {
    fn from(e: McError) -> Self {
        engine_bail(e.to_string())
    }
}

impl From<DeformError> for Bail {
    fn from(e: DeformError) -> Self {
        engine_bail(e.to_string())
    }
}

/// Runs a command and folds early exits into a plain outcome.
pub fn execute(cmd: &Cmd) -> Outcome {
    let result = match cmd {
        Cmd::Validate { file } => cmd_validate(file),
        Cmd::Mc {
            dgla,
            ring,
            check,
            solve_square_zero,
            lift_order,
            from,
        } => cmd_mc(
            dgla,
            ring,
            check.as_deref(),
            *solve_square_zero,
            *lift_order,
            from.as_deref(),
        ),
        Cmd::Gauge {
            dgla,
            ring,
            z,
            z_prime,
        } => cmd_gauge(dgla, ring, z, z_prime),
        Cmd::Nerve {
            dgla,
            ring,
            path,
            member,
            dim,
        } => cmd_nerve(dgla, ring, path.as_deref(), member.as_deref(), *dim),
        Cmd::Deform {
            complex,
            classify,
            counterexample,
        } => cmd_deform(complex.as_deref(), *classify, *counterexample),
    };
    result.unwrap_or_else(|bail| Outcome {
        status: bail.status,
        payload: bail.payload,
        exit_code: bail.exit_code,
    })
}

fn failures_json(report: &ValidationReport) -> Value {
    Value::Array(
        report
            .failures
            .iter()
            .map(|f| json!({ "axiom": f.axiom, "witness": f.witness }))
            .collect(),
    )
}

/// Rejects an invalid input object with a `fail` report naming the file.
fn check_report(path: &Path, kind: Kind, report: &ValidationReport) -> Result<(), Bail> {
    if report.ok() {
        return Ok(());
    }
    Err(Bail {
        status: "fail",
        payload: json!({
            "failures": failures_json(report),
            "input": path.display().to_string(),
            "kind": kind.name(),
            "valid": false,
        }),
        exit_code: 1,
    })
}

fn load_dgla(path: &Path) -> Result<QDgla, Bail> {
    let document = doc::load(path)?;
    if document.kind() != Kind::Dgla {
        return Err(parse_bail(format!(
            "{}: expected a dgla document, found a {} document",
            path.display(),
            document.kind().name()
        )));
    }
    let g = document.to_dgla()?;
    check_report(path, Kind::Dgla, &validate_dgla(&g))?;
    Ok(g)
}

fn load_artinian(path: &Path) -> Result<mcdeform::QArtinian, Bail> {
    let document = doc::load(path)?;
    if document.kind() != Kind::Artinian {
        return Err(parse_bail(format!(
            "{}: expected an artinian algebra document, found a {} document",
            path.display(),
            document.kind().name()
        )));
    }
    let r = document.to_artinian()?;
    check_report(path, Kind::Artinian, &validate_artinian(&r))?;
    Ok(r)
}

fn load_complex(path: &Path) -> Result<QComplex, Bail> {
    let document = doc::load(path)?;
    if document.kind() != Kind::Complex {
        return Err(parse_bail(format!(
            "{}: expected a chain complex document, found a {} document",
            path.display(),
            document.kind().name()
        )));
    }
    let a = document.to_complex()?;
    check_report(path, Kind::Complex, &a.validate())?;
    Ok(a)
}

fn build_host(dgla: &Path, ring: &Path) -> Result<TensorHost<Rat>, Bail> {
    let g = load_dgla(dgla)?;
    let r = load_artinian(ring)?;
    Ok(TensorHost::new(&r, &g)?)
}

fn parse_coeff(text: &str, what: &str) -> Result<Rat, Bail> {
    doc::parse_rat(text).map_err(|issue| match issue {
        DocIssue::Parse(message) => parse_bail(format!("{what}: {message}")),
        other => other.into(),
    })
}

/// Reads an element of m ⊗ g from JSON triples `[["m","g","coeff"], …]`.
fn parse_element(host: &TensorHost<Rat>, text: &str, what: &str) -> Result<Vec<Rat>, Bail> {
    let triples: Vec<(String, String, String)> = serde_json::from_str(text).map_err(|e| {
        parse_bail(format!(
            "{what}: expected JSON triples [[\"m\",\"g\",\"coeff\"], …]: {e}"
        ))
    })?;
    let algebra = host.algebra();
    let mut v = vec![Rat::zero(); algebra.dim()];
    for (m, g, coeff) in &triples {
        let label = format!("{m}⊗{g}");
        let i = algebra.index_of(&label).ok_or_else(|| {
            parse_bail(format!("{what}: no basis element {label} in m ⊗ g"))
        })?;
        let c = parse_coeff(coeff, what)?;
        v[i] = v[i].clone() + c;
    }
    Ok(v)
}

/// Renders a tensor element back into the triple form, nonzero terms in
/// basis order.
fn tensor_terms(host: &TensorHost<Rat>, v: &[Rat]) -> Value {
    let mut terms = Vec::new();
    for (i, c) in v.iter().enumerate() {
        if !c.is_zero() {
            let label = host.algebra().label(i);
            let (m, g) = label.split_once('⊗').expect("tensor labels are m⊗g");
            terms.push(json!([m, g, c.to_string()]));
        }
    }
    Value::Array(terms)
}

/// Renders a form-valued element into quadruples
/// `[monomial, m, g, coeff]`, nonzero terms in basis-then-monomial order.
fn form_terms(host: &FormHost<Rat>, v: &[SullivanForm<Rat>]) -> Value {
    let mut terms = Vec::new();
    for (p, f) in v.iter().enumerate() {
        let label = host.base().algebra().label(p);
        let (m, g) = label.split_once('⊗').expect("tensor labels are m⊗g");
        for (mono, c) in f.terms() {
            terms.push(json!([mono.to_string(), m, g, c.to_string()]));
        }
    }
    Value::Array(terms)
}

/// Requires `v` to be a degree-1 Maurer–Cartan element: bad degrees are
/// usage errors, nonzero curvature is an engine refusal with a witness.
fn ensure_mc(host: &TensorHost<Rat>, v: &Vec<Rat>, what: &str) -> Result<(), Bail> {
    if !host.is_homogeneous(v, 1) {
        return Err(parse_bail(format!(
            "{what} must be homogeneous of degree 1"
        )));
    }
    let c = curvature(host, v)?;
    if !c.iter().all(Zero::is_zero) {
        return Err(engine_bail(format!(
            "{what} is not Maurer–Cartan: curvature = {}",
            host.render(&c)
        )));
    }
    Ok(())
}

fn cmd_validate(file: &Path) -> CmdResult {
    let document = doc::load(file)?;
    let kind = document.kind();
    let (valid, failures) = match kind {
        Kind::Dgla => {
            let report = validate_dgla(&document.to_dgla()?);
            (report.ok(), failures_json(&report))
        }
        Kind::Artinian => {
            let report = validate_artinian(&document.to_artinian()?);
            (report.ok(), failures_json(&report))
        }
        Kind::Complex => match document.to_complex() {
            Ok(a) => {
                let report = a.validate();
                (report.ok(), failures_json(&report))
            }
            Err(DocIssue::Axiom { axiom, witness }) => (
                false,
                json!([{ "axiom": axiom, "witness": witness }]),
            ),
            Err(other) => return Err(other.into()),
        },
    };
    Ok(Outcome {
        status: if valid { "ok" } else { "fail" },
        payload: json!({
            "failures": failures,
            "kind": kind.name(),
            "valid": valid,
        }),
        exit_code: if valid { 0 } else { 1 },
    })
}

fn cmd_mc(
    dgla: &Path,
    ring: &Path,
    check: Option<&str>,
    solve: bool,
    lift_order: Option<usize>,
    from: Option<&str>,
) -> CmdResult {
    let modes = usize::from(check.is_some()) + usize::from(solve) + usize::from(lift_order.is_some());
    if modes != 1 {
        return Err(parse_bail(
            "choose exactly one of --check, --solve-square-zero, --lift-order",
        ));
    }
    let host = build_host(dgla, ring)?;
    if let Some(text) = check {
        let z = parse_element(&host, text, "--check")?;
        if !host.is_homogeneous(&z, 1) {
            return Err(parse_bail("--check expects a homogeneous element of degree 1"));
        }
        let c = curvature(&host, &z)?;
        let flat = c.iter().all(Zero::is_zero);
        return Ok(ok_outcome(json!({
            "curvature": host.render(&c),
            "element": tensor_terms(&host, &z),
            "is_mc": flat,
        })));
    }
    if solve {
        let basis = mc_solve_square_zero(&host)?;
        let rendered: Vec<Value> = basis.iter().map(|b| tensor_terms(&host, b)).collect();
        return Ok(ok_outcome(json!({
            "basis": rendered,
            "dimension": basis.len(),
        })));
    }
    let k = lift_order.expect("mode counted above");
    if k == 0 {
        return Err(parse_bail(
            "--lift-order takes K ≥ 1: the element should solve the equation mod m^K",
        ));
    }
    let text = from.expect("clap ties --from to --lift-order");
    let z = parse_element(&host, text, "--from")?;
    if !host.is_homogeneous(&z, 1) {
        return Err(parse_bail("--from expects a homogeneous element of degree 1"));
    }
    let payload = match obstruction_step(&host, &z, k - 1)? {
        LiftOutcome::Lifted { corrected } => json!({
            "corrected": tensor_terms(&host, &corrected),
            "from": tensor_terms(&host, &z),
            "order": k,
            "outcome": "lifted",
        }),
        LiftOutcome::Obstructed { class, description } => json!({
            "class": tensor_terms(&host, &class),
            "description": description,
            "from": tensor_terms(&host, &z),
            "order": k,
            "outcome": "obstructed",
        }),
    };
    Ok(ok_outcome(payload))
}

fn cmd_gauge(dgla: &Path, ring: &Path, z_text: &str, z_prime_text: &str) -> CmdResult {
    let host = build_host(dgla, ring)?;
    let z = parse_element(&host, z_text, "Z")?;
    let z_prime = parse_element(&host, z_prime_text, "Z'")?;
    ensure_mc(&host, &z, "Z")?;
    ensure_mc(&host, &z_prime, "Z'")?;
    match gauge_equivalent(&host, &z, &z_prime)? {
        GaugeOutcome::Found { gamma } => {
            let acted = gauge_act(&host, &gamma, &z)?;
            if acted != z_prime {
                return Err(engine_bail(
                    "internal check failed: the returned gauge does not carry Z to Z'",
                ));
            }
            Ok(ok_outcome(json!({
                "gamma": tensor_terms(&host, &gamma),
                "outcome": "found",
                "verified": true,
                "z": tensor_terms(&host, &z),
                "z_prime": tensor_terms(&host, &z_prime),
            })))
        }
        GaugeOutcome::NotFoundAtOrder { order } => {
            let complete = host.filtration().level_dim(2) == 0;
            Ok(ok_outcome(json!({
                "complete": complete,
                "order": order,
                "outcome": "not_found_at_order",
                "z": tensor_terms(&host, &z),
                "z_prime": tensor_terms(&host, &z_prime),
            })))
        }
    }
}

/// Reads a form-valued element of Ω_n ⊗ m ⊗ g from JSON quadruples.
/// Monomials use the rendered syntax: `"1"`, `"t1^2"`, `"t1 dt2"`, with
/// 1-based coordinates and dt factors in increasing order.
fn parse_form_element(host: &FormHost<Rat>, text: &str) -> Result<Vec<SullivanForm<Rat>>, Bail> {
    let quads: Vec<(String, String, String, String)> =
        serde_json::from_str(text).map_err(|e| {
            parse_bail(format!(
                "--member: expected JSON entries [[\"monomial\",\"m\",\"g\",\"coeff\"], …]: {e}"
            ))
        })?;
    let n = host.simplex_dim();
    let algebra = host.base().algebra();
    let mut buckets: Vec<Vec<(Monomial, Rat)>> = vec![Vec::new(); algebra.dim()];
    for (mono_text, m, g, coeff) in &quads {
        let label = format!("{m}⊗{g}");
        let p = algebra.index_of(&label).ok_or_else(|| {
            parse_bail(format!("--member: no basis element {label} in m ⊗ g"))
        })?;
        let mono = parse_monomial(mono_text, n)?;
        let c = parse_coeff(coeff, "--member")?;
        buckets[p].push((mono, c));
    }
    let mut out = Vec::with_capacity(buckets.len());
    for terms in buckets {
        let f = SullivanForm::from_terms(n, host.poly_bound(), terms)
            .map_err(|e| parse_bail(format!("--member: {e}")))?;
        out.push(f);
    }
    Ok(out)
}

fn parse_monomial(text: &str, n: usize) -> Result<Monomial, Bail> {
    let mut mono = Monomial::one(n);
    let trimmed = text.trim();
    if trimmed == "1" {
        return Ok(mono);
    }
    let bad = |part: &str| {
        parse_bail(format!(
            "--member: cannot read monomial factor {part:?}; write e.g. \"1\", \"t1^2\" or \"t1 dt2\""
        ))
    };
    if trimmed.is_empty() {
        return Err(bad(trimmed));
    }
    for part in trimmed.split_whitespace() {
        if let Some(rest) = part.strip_prefix("dt") {
            let i: usize = rest.parse().map_err(|_| bad(part))?;
            if i == 0 || i > n {
                return Err(parse_bail(format!(
                    "--member: {part:?} is out of range for a {n}-simplex"
                )));
            }
            if mono.dts.last().is_some_and(|&d| d + 1 >= i) {
                return Err(parse_bail(format!(
                    "--member: dt factors must be distinct and written in increasing order at {part:?}"
                )));
            }
            mono.dts.push(i - 1);
        } else if let Some(rest) = part.strip_prefix('t') {
            let (idx_text, power) = match rest.split_once('^') {
                Some((a, b)) => (a, b.parse::<u32>().map_err(|_| bad(part))?),
                None => (rest, 1),
            };
            let i: usize = idx_text.parse().map_err(|_| bad(part))?;
            if i == 0 || i > n {
                return Err(parse_bail(format!(
                    "--member: {part:?} is out of range for a {n}-simplex"
                )));
            }
            mono.powers[i - 1] += power;
        } else {
            return Err(bad(part));
        }
    }
    Ok(mono)
}

fn cmd_nerve(
    dgla: &Path,
    ring: &Path,
    path: Option<&[String]>,
    member: Option<&str>,
    dim: usize,
) -> CmdResult {
    let modes = usize::from(path.is_some()) + usize::from(member.is_some());
    if modes != 1 {
        return Err(parse_bail("choose exactly one of --path, --member"));
    }
    let base = build_host(dgla, ring)?;
    if let Some(args) = path {
        let host = FormHost::new(base, 1, DEFAULT_POLY_BOUND);
        let z = parse_element(host.base(), &args[0], "Z")?;
        let gamma = parse_element(host.base(), &args[1], "GAMMA")?;
        ensure_mc(host.base(), &z, "Z")?;
        if !host.base().is_homogeneous(&gamma, 0) {
            return Err(parse_bail("GAMMA must be homogeneous of degree 0"));
        }
        let simplex = gauge_path(&host, &z, &gamma)?;
        let face_host = host.face_host();
        let at_t1 = face_host.flatten_point(&host.face_elt(0, simplex.element()));
        let at_t0 = face_host.flatten_point(&host.face_elt(1, simplex.element()));
        return Ok(ok_outcome(json!({
            "dt_coefficient": tensor_terms(host.base(), &gamma),
            "face_at_t0": tensor_terms(host.base(), &at_t0),
            "face_at_t1": tensor_terms(host.base(), &at_t1),
            "member": true,
            "simplex": form_terms(&host, simplex.element()),
        })));
    }
    let text = member.expect("mode counted above");
    let host = FormHost::new(base, dim, DEFAULT_POLY_BOUND);
    let elt = parse_form_element(&host, text)?;
    let payload = match nerve_member(&host, &elt)? {
        NerveCheck::Member => json!({ "dimension": dim, "member": true }),
        NerveCheck::NotMember { monomial } => json!({
            "dimension": dim,
            "member": false,
            "witness": monomial,
        }),
    };
    Ok(ok_outcome(payload))
}

fn cmd_deform(complex: Option<&Path>, classify: bool, counterexample: Option<i64>) -> CmdResult {
    let modes = usize::from(classify) + usize::from(counterexample.is_some());
    if modes != 1 {
        return Err(parse_bail(
            "choose exactly one of --classify, --counterexample",
        ));
    }
    if classify {
        let path = complex
            .ok_or_else(|| parse_bail("--classify needs a chain complex document"))?;
        let a = load_complex(path)?;
        let classification = classify_first_order(&a)?;
        let end = end_complex(&a);
        let labels = end.space().labels(1);
        let representatives: Vec<Value> = classification
            .cocycle_representatives
            .iter()
            .map(|rep| {
                let mut terms = Vec::new();
                for (i, c) in rep.iter().enumerate() {
                    if !c.is_zero() {
                        terms.push(json!([labels[i], c.to_string()]));
                    }
                }
                Value::Array(terms)
            })
            .collect();
        return Ok(ok_outcome(json!({
            "dimension": classification.dimension,
            "representatives": representatives,
            "statement": classification.statement,
        })));
    }
    let n = counterexample.expect("mode counted above");
    let report = counterexample_demo::<Rat>(n)?;
    let pairs = |v: &[(i64, usize)]| -> Value {
        Value::Array(v.iter().map(|(d, h)| json!([d, h])).collect())
    };
    Ok(ok_outcome(json!({
        "boundary_homology": pairs(&report.boundary_homology),
        "conclusion": report.conclusion,
        "gauge_trivial": report.gauge_trivial,
        "interior_homology": pairs(&report.interior_homology),
        "twist_is_mc": report.twist_is_mc,
        "window": report.window,
    })))
}
