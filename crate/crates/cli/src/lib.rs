//! Command implementations behind the `hodgepar` binary.
//!
//! Every command returns a [`Report`]: a JSON value, a CSV table and a text
//! rendering, plus an exit status and warnings for standard error. Errors
//! from the library are mapped to exit codes by [`CliError::from`].

pub mod suite;

use std::fmt::Write as _;

use hodgepar::exactlin::{display_scalar, parse_scalar};
use hodgepar::extcalc::{hodge_recovery, kernel_report, Egl3Template, MAX_FULL_RANK};
use hodgepar::filphi::Refinement;
use hodgepar::glncomb::{exact_sequence_checks, ext_dim, ExtKind, IdentityCheck};
use hodgepar::{Error, ExactScalar, FilteredPhiModule, ParabolicShape, Perm};
use serde::Serialize;
use serde_json::{json, Value};

/// Exit status: success.
pub const EXIT_OK: i32 = 0;
/// Exit status: an identity or invariant failed.
pub const EXIT_FAILURE: i32 = 1;
/// Exit status: the input could not be used.
pub const EXIT_INPUT: i32 = 2;
/// Exit status: the request is outside the fully supported scope.
pub const EXIT_UNSUPPORTED: i32 = 3;

/// Output format.
#[derive(Clone, Copy, PartialEq, Eq, Debug, clap::ValueEnum)]
pub enum Format {
    /// Pretty-printed JSON.
    Json,
    /// Comma-separated values with a header row.
    Csv,
    /// Human-readable text.
    Text,
}

/// The result of a command.
#[derive(Clone, Debug)]
pub struct Report {
    /// JSON rendering.
    pub json: Value,
    /// CSV rendering (header included).
    pub csv: String,
    /// Text rendering.
    pub text: String,
    /// Exit status.
    pub code: i32,
    /// Messages for standard error.
    pub warnings: Vec<String>,
}

impl Report {
    /// The rendering for `format`.
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => serde_json::to_string_pretty(&self.json).expect("reports serialize"),
            Format::Csv => self.csv.clone(),
            Format::Text => self.text.clone(),
        }
    }
}

/// A command failure with its exit status.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliError {
    /// Exit status.
    pub code: i32,
    /// Message for standard error.
    pub message: String,
}

impl CliError {
    /// An input error (exit status 2).
    pub fn input(message: impl Into<String>) -> Self {
        Self { code: EXIT_INPUT, message: message.into() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Unsupported(_) => EXIT_UNSUPPORTED,
            Error::ModelInvariant(_) => EXIT_FAILURE,
            _ => EXIT_INPUT,
        };
        Self { code, message: e.to_string() }
    }
}

/// Command result alias.
pub type CliResult = std::result::Result<Report, CliError>;

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn csv_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for r in rows {
        out.push_str(&r.iter().map(|c| csv_escape(c)).collect::<Vec<_>>().join(","));
        out.push('\n');
    }
    out
}

/// Parses a comma-separated parabolic shape such as `2,1`.
pub fn parse_shape(s: &str) -> Result<ParabolicShape, CliError> {
    let sizes = s
        .split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|_| CliError::input(format!("shape `{s}`: `{t}` is not a size"))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ParabolicShape::new(sizes)?)
}

/// Parses a list of scalars (`3`, `-2`, `5/7`).
pub fn parse_scalars(items: &[String]) -> Result<Vec<ExactScalar>, CliError> {
    items.iter().map(|s| parse_scalar(s).map_err(CliError::from)).collect()
}

/// Reads and parses a module file (`-` for standard input).
pub fn load_module(path: &str) -> Result<FilteredPhiModule, CliError> {
    let text = if path == "-" {
        std::io::read_to_string(std::io::stdin()).map_err(|e| CliError::input(format!("standard input: {e}")))?
    } else {
        std::fs::read_to_string(path).map_err(|e| CliError::input(format!("{path}: {e}")))?
    };
    FilteredPhiModule::from_json_str(&text).map_err(|e| CliError::input(format!("{path}: {e}")))
}

/// `inspect`: genericity, admissibility, criticality and Hodge parameters.
pub fn cmd_inspect(d: &FilteredPhiModule) -> CliResult {
    let n = d.n();
    let generic = d.genericity_check();
    let admissibility = if generic { d.admissibility_report().ok() } else { None };
    let total = Perm::all(n).len();
    let critical: Vec<String> = d.critical_refinements()?.iter().map(Perm::to_string).collect();
    let per_refinement: Vec<Value> = Perm::all(n)
        .into_iter()
        .map(|w| {
            let nc = d.noncritical(&Refinement::new(w.clone()))?;
            Ok(json!({"refinement": w.to_string(), "noncritical": nc}))
        })
        .collect::<hodgepar::Result<Vec<_>>>()?;
    let params: Option<Vec<Vec<Vec<String>>>> = if critical.is_empty() && n >= 2 {
        d.hodge_parameters().ok().map(|ms| {
            ms.iter().map(|m| m.to_rows().iter().map(|r| r.iter().map(display_scalar).collect()).collect()).collect()
        })
    } else {
        None
    };
    let a_d: Option<Vec<String>> = if n == 3 && critical.is_empty() {
        (0..d.d_k()).map(|s| d.extract_a3(s).map(|a| display_scalar(&a))).collect::<hodgepar::Result<_>>().ok()
    } else {
        None
    };
    let json = json!({
        "n": n,
        "d_K": d.d_k(),
        "p": d.p(),
        "alphas": d.alphas().iter().map(display_scalar).collect::<Vec<_>>(),
        "weights": d.weights(),
        "generic": generic,
        "admissibility": admissibility,
        "noncritical": {"all": critical.is_empty(), "total": total, "critical": critical, "per_refinement": per_refinement},
        "hodge_parameters": params,
        "a_D": a_d,
    });
    let mut text = String::new();
    let _ = writeln!(text, "rank n = {n}, d_K = {}, p = {}", d.d_k(), d.p());
    let _ = writeln!(text, "alphas: {}", d.alphas().iter().map(display_scalar).collect::<Vec<_>>().join(", "));
    for (s, h) in d.weights().iter().enumerate() {
        let _ = writeln!(text, "weights[sigma={s}]: {h:?}");
    }
    let _ = writeln!(text, "generic: {generic}");
    match &admissibility {
        Some(r) => {
            let _ = writeln!(text, "weakly admissible: {} (t_N = {}, t_H = {})", r.admissible, r.t_n, r.t_h);
            if let Some(v) = &r.violating_subset {
                let _ = writeln!(text, "  violating phi-stable subobject: eigen-indices {v:?}");
            }
        }
        None => {
            let _ = writeln!(text, "weakly admissible: not decided (non-generic eigenvalues)");
        }
    }
    if critical.is_empty() {
        let _ = writeln!(text, "non-critical: all {total} refinements");
    } else {
        let _ = writeln!(
            text,
            "non-critical: {} of {total} refinements; critical: {}",
            total - critical.len(),
            critical.join(" ")
        );
    }
    if let Some(ps) = json["hodge_parameters"].as_array() {
        for (s, m) in ps.iter().enumerate() {
            let _ = writeln!(text, "hodge parameter[sigma={s}]: {m}");
        }
    }
    if let Some(a) = &a_d {
        let _ = writeln!(text, "a_D = {}", a.join(", "));
    }
    let mut rows = vec![
        vec!["n".into(), n.to_string()],
        vec!["d_K".into(), d.d_k().to_string()],
        vec!["p".into(), d.p().to_string()],
        vec!["generic".into(), generic.to_string()],
        vec!["admissible".into(), admissibility.as_ref().map_or("undecided".into(), |r| r.admissible.to_string())],
        vec![
            "noncritical_refinements".into(),
            format!("{}/{total}", total - json["noncritical"]["critical"].as_array().map_or(0, Vec::len)),
        ],
    ];
    if let Some(a) = &a_d {
        for (s, v) in a.iter().enumerate() {
            rows.push(vec![format!("a_D[sigma={s}]"), v.clone()]);
        }
    }
    Ok(Report { json, csv: csv_table(&["field", "value"], &rows), text, code: EXIT_OK, warnings: vec![] })
}

/// Largest rank accepted by `dims`.
pub const MAX_DIMS_RANK: usize = 8;

/// `dims`: every formula and identity at `(n, d_K)` for the given shapes
/// (all ordered partitions of `n` when none are given).
pub fn cmd_dims(n: usize, d_k: usize, shapes: &[ParabolicShape]) -> CliResult {
    if !(2..=MAX_DIMS_RANK).contains(&n) || d_k == 0 {
        return Err(CliError::input(format!(
            "dims needs 2 ≤ n ≤ {MAX_DIMS_RANK} and d_K ≥ 1 (got n = {n}, d_K = {d_k})"
        )));
    }
    if let Some(s) = shapes.iter().find(|s| s.n() != n) {
        return Err(CliError::input(format!("shape {s} does not partition n = {n}")));
    }
    let shapes: Vec<ParabolicShape> = if shapes.is_empty() { ParabolicShape::all(n) } else { shapes.to_vec() };
    #[derive(Serialize)]
    struct DimRow {
        kind: &'static str,
        shape: Option<String>,
        value: u64,
    }
    let mut dims = Vec::new();
    for kind in ExtKind::ALL.into_iter().filter(|k| n >= k.min_n()) {
        if kind.needs_shape() {
            for s in &shapes {
                dims.push(DimRow {
                    kind: kind.name(),
                    shape: Some(s.to_string()),
                    value: ext_dim(kind, n, d_k, Some(s))?,
                });
            }
        } else {
            dims.push(DimRow { kind: kind.name(), shape: None, value: ext_dim(kind, n, d_k, None)? });
        }
    }
    let mut identities: Vec<(Option<String>, IdentityCheck)> =
        exact_sequence_checks(n, d_k, None)?.into_iter().map(|c| (None, c)).collect();
    for s in &shapes {
        identities.extend(exact_sequence_checks(n, d_k, Some(s))?.into_iter().map(|c| (Some(s.to_string()), c)));
    }
    let ledger = (
        ext_dim(ExtKind::AutPi1, n, d_k, None)?,
        ext_dim(ExtKind::GalBar, n, d_k, None)?,
        ext_dim(ExtKind::KerTd, n, d_k, None)?,
    );
    let failures = identities.iter().filter(|(_, c)| !c.pass).count();
    let json = json!({
        "n": n,
        "d_K": d_k,
        "ledger": {"aut": ledger.0, "gal": ledger.1, "ker": ledger.2},
        "dims": dims,
        "identities": identities.iter().map(|(s, c)| json!({"shape": s, "check": c})).collect::<Vec<_>>(),
        "failures": failures,
    });
    let mut rows: Vec<Vec<String>> = vec![vec![
        "ledger".into(),
        "aut/gal/ker".into(),
        String::new(),
        format!("{}/{}/{}", ledger.0, ledger.1, ledger.2),
        format!("{}/{}/{}", ledger.0, ledger.1, ledger.0 - ledger.1),
        (ledger.0 - ledger.1 == ledger.2).to_string(),
    ]];
    for d in &dims {
        rows.push(vec![
            "dim".into(),
            d.kind.into(),
            d.shape.clone().unwrap_or_default(),
            d.value.to_string(),
            d.value.to_string(),
            "true".into(),
        ]);
    }
    for (s, c) in &identities {
        rows.push(vec![
            "identity".into(),
            c.name.clone(),
            s.clone().unwrap_or_default(),
            c.formula.to_string(),
            c.computed.to_string(),
            c.pass.to_string(),
        ]);
    }
    let mut text = String::new();
    let _ = writeln!(text, "n = {n}, d_K = {d_k}");
    let _ = writeln!(text, "ledger aut/gal/ker: {}/{}/{}", ledger.0, ledger.1, ledger.2);
    let _ = writeln!(text, "{:<18} {:<12} {:>8}", "dimension", "shape", "value");
    for d in &dims {
        let _ = writeln!(text, "{:<18} {:<12} {:>8}", d.kind, d.shape.as_deref().unwrap_or("-"), d.value);
    }
    let _ = writeln!(text, "{:<28} {:<12} {:>8} {:>8}  verdict", "identity", "shape", "formula", "computed");
    for (s, c) in &identities {
        let verdict = if c.pass { "PASS" } else { "FAIL" };
        let _ = writeln!(
            text,
            "{:<28} {:<12} {:>8} {:>8}  {verdict}",
            c.name,
            s.as_deref().unwrap_or("-"),
            c.formula,
            c.computed
        );
    }
    let _ = writeln!(text, "{} identities, {failures} failures", identities.len());
    Ok(Report {
        json,
        csv: csv_table(&["section", "name", "shape", "formula", "computed", "pass"], &rows),
        text,
        code: if failures == 0 { EXIT_OK } else { EXIT_FAILURE },
        warnings: vec![],
    })
}

fn bookkeeping_only(n: usize, d_k: usize) -> CliError {
    let dims = |k| ext_dim(k, n, d_k, None).map_or_else(|_| "?".to_string(), |v| v.to_string());
    CliError {
        code: EXIT_UNSUPPORTED,
        message: format!(
            "bookkeeping-only: the full construction supports n ≤ {MAX_FULL_RANK}; at n = {n}, d_K = {d_k} the formulas give aut = {}, gal = {}, ker = {}",
            dims(ExtKind::AutPi1),
            dims(ExtKind::GalBar),
            dims(ExtKind::KerTd)
        ),
    }
}

/// `kertd`: `Ker(t_D)` with every model check.
pub fn cmd_kertd(d: &FilteredPhiModule) -> CliResult {
    if d.n() > MAX_FULL_RANK {
        return Err(bookkeeping_only(d.n(), d.d_k()));
    }
    if d.n() < 2 {
        return Err(CliError::input("kertd needs rank n ≥ 2"));
    }
    let report = match kernel_report(d) {
        Err(Error::Unsupported(m)) => {
            return Err(CliError { code: EXIT_UNSUPPORTED, message: format!("bookkeeping-only: {m}") });
        }
        other => other?,
    };
    let failed: Vec<&str> = report.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
    let mut rows = Vec::new();
    for (k, v) in report.kernel_basis.iter().enumerate() {
        for (label, x) in report.labels.iter().zip(v) {
            rows.push(vec![k.to_string(), label.clone(), x.clone()]);
        }
    }
    let mut text = String::new();
    let _ = writeln!(text, "n = {}, d_K = {}", report.n, report.d_k);
    let _ = writeln!(text, "dims: aut = {}, gal = {}, ker = {}", report.dims.aut, report.dims.gal, report.dims.ker);
    let _ = writeln!(text, "relations checked: {}", report.relations_checked);
    for c in &report.checks {
        let _ = writeln!(text, "  [{}] {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    let _ = writeln!(text, "kernel basis ({} vectors, canonical form):", report.kernel_basis.len());
    for v in &report.kernel_basis {
        let mut line = String::new();
        for (l, x) in report.labels.iter().zip(v).filter(|(_, x)| x.as_str() != "0/1") {
            let x = x.strip_suffix("/1").unwrap_or(x);
            let (sign, abs) = x.strip_prefix('-').map_or(("+", x), |a| ("-", a));
            if line.is_empty() {
                line = format!("{}{abs} {l}", if sign == "-" { "-" } else { "" });
            } else {
                let _ = write!(line, " {sign} {abs} {l}");
            }
        }
        let _ = writeln!(text, "  {line}");
    }
    Ok(Report {
        json: serde_json::to_value(&report).expect("reports serialize"),
        csv: csv_table(&["vector", "label", "value"], &rows),
        text,
        code: if failed.is_empty() { EXIT_OK } else { EXIT_FAILURE },
        warnings: failed.iter().map(|n| format!("violated constraint: {n}")).collect(),
    })
}

/// `sweep`: the Hodge recovery sweep over the rank-3 family.
pub fn cmd_sweep(template: &Egl3Template, samples: &[ExactScalar], parallel: bool) -> CliResult {
    if samples.is_empty() {
        return Err(CliError::input("the sweep needs at least one sample"));
    }
    if let Some(bad) = samples
        .iter()
        .find(|a| **a == ExactScalar::from_integer(0.into()) || **a == ExactScalar::from_integer(1.into()))
    {
        return Err(CliError::input(format!("sample {bad} is a critical parameter (samples must avoid 0 and 1)")));
    }
    let report = hodge_recovery(template, samples, parallel)?;
    let warnings: Vec<String> = report
        .duplicates
        .iter()
        .map(|a| format!("duplicate sample {a}: computed once per occurrence, kernels identical"))
        .collect();
    let distinct: Vec<&hodgepar::extcalc::SweepEntry> = {
        let mut seen: Vec<&str> = Vec::new();
        report
            .entries
            .iter()
            .filter(|e| {
                let new = !seen.contains(&e.a.as_str());
                seen.push(&e.a);
                new
            })
            .collect()
    };
    let json = json!({
        "p": template.p,
        "alphas": template.alphas.iter().map(display_scalar).collect::<Vec<_>>(),
        "weights": template.weights,
        "sweep": distinct,
        "injective": report.injective,
        "round_trip": report.round_trip_ok,
        "duplicates": report.duplicates,
        "collisions": report.collisions,
    });
    let rows: Vec<Vec<String>> = report
        .entries
        .iter()
        .map(|e| vec![e.a.clone(), e.kernel.dim().to_string(), e.kernel_canonical_hash.clone()])
        .collect();
    let mut text = String::new();
    for e in &distinct {
        let _ = writeln!(text, "a = {:<8} dim Ker = {}  hash {}", e.a, e.kernel.dim(), e.kernel_canonical_hash);
    }
    let _ = writeln!(text, "injective: {}", report.injective);
    for (a, b) in &report.collisions {
        let _ = writeln!(text, "collision: a = {a} and a = {b} give the same kernel");
    }
    let ok = report.injective && report.round_trip_ok;
    Ok(Report {
        json,
        csv: csv_table(&["a", "kernel_dim", "kernel_canonical_hash"], &rows),
        text,
        code: if ok { EXIT_OK } else { EXIT_FAILURE },
        warnings,
    })
}
