//! Surface-spec parsing, command dispatch and JSON run reports.

use std::fmt;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::bn::{self, CaseReport, DecompositionProfile, PairVerdict};
use crate::cases::{self, CaseBox, FiltrationProfile, InstanceOutcome};
use crate::divisor::{reduce_fixed_components, RootSet};
use crate::error::Error;
use crate::lattice::{DivClass, GramLattice, QuasiPolarization};

pub const DEFAULT_DEGREE_BOUND: i64 = 10;

/// Environment variable selecting the number of worker threads.
pub const THREADS_ENV: &str = "K3BN_THREADS";

/// A lattice, a quasi-polarization and optional declared `(-2)`-curves.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceSpec {
    #[serde(default)]
    pub name: String,
    pub gram: Vec<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub basis_names: Vec<String>,
    #[serde(rename = "H")]
    pub h: Vec<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub roots: Option<Vec<Vec<i64>>>,
    #[serde(default)]
    pub asserts_nef: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpecViolation {
    pub path: String,
    pub message: String,
}

impl fmt::Display for SpecViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("malformed document: {0}")]
    Malformed(String),
    #[error("invalid surface spec: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Spec(Vec<SpecViolation>),
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Core(#[from] Error),
}

/// The validated objects behind a [`SurfaceSpec`].
pub struct Surface {
    pub lattice: GramLattice,
    pub h: QuasiPolarization,
    pub roots: RootSet,
}

impl SurfaceSpec {
    /// Checks the document and builds the lattice objects, collecting every
    /// violation with its path.
    pub fn validate(&self) -> Result<Surface, CliError> {
        let mut v = Vec::new();
        let mut push = |path: String, message: String| v.push(SpecViolation { path, message });
        let rank = self.gram.len();
        if rank == 0 {
            push("gram".into(), "must be a nonempty square matrix".into());
        }
        for (i, row) in self.gram.iter().enumerate() {
            if row.len() != rank {
                push(format!("gram[{i}]"), format!("row has length {}, expected {rank}", row.len()));
            }
        }
        let square = rank > 0 && self.gram.iter().all(|row| row.len() == rank);
        if square {
            for i in 0..rank {
                if self.gram[i][i] % 2 != 0 {
                    push(format!("gram[{i}][{i}]"), format!("odd diagonal entry {}", self.gram[i][i]));
                }
                for j in i + 1..rank {
                    if self.gram[i][j] != self.gram[j][i] {
                        push(format!("gram[{i}][{j}]"), format!("{} differs from gram[{j}][{i}] = {}", self.gram[i][j], self.gram[j][i]));
                    }
                }
            }
        }
        if !self.basis_names.is_empty() && self.basis_names.len() != rank {
            push("basis_names".into(), format!("{} names for rank {rank}", self.basis_names.len()));
        }
        if self.h.len() != rank {
            push("H".into(), format!("length {} does not match rank {rank}", self.h.len()));
        }
        for (k, r) in self.roots.iter().flatten().enumerate() {
            if r.len() != rank {
                push(format!("roots[{k}]"), format!("length {} does not match rank {rank}", r.len()));
            }
        }
        if !v.is_empty() {
            return Err(CliError::Spec(v));
        }
        let lattice = GramLattice::new(self.gram.clone()).map_err(|e| one("gram", e))?;
        let h = QuasiPolarization::with_nef_assertion(&lattice, DivClass::new(self.h.clone()), self.asserts_nef)
            .map_err(|e| one("H", e))?;
        let mut root_violations = Vec::new();
        let mut roots = Vec::new();
        for (k, r) in self.roots.iter().flatten().enumerate() {
            let class = DivClass::new(r.clone());
            match RootSet::new(&lattice, &h, vec![class.clone()]) {
                Ok(_) => roots.push(class),
                Err(Error::InvalidRoot { reason, .. }) => {
                    root_violations.push(SpecViolation { path: format!("roots[{k}]"), message: reason })
                }
                Err(e) => root_violations.push(SpecViolation { path: format!("roots[{k}]"), message: e.to_string() }),
            }
        }
        if !root_violations.is_empty() {
            return Err(CliError::Spec(root_violations));
        }
        let roots = RootSet::new(&lattice, &h, roots)?;
        Ok(Surface { lattice, h, roots })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }
}

fn one(path: &str, e: Error) -> CliError {
    CliError::Spec(vec![SpecViolation { path: path.into(), message: e.to_string() }])
}

/// Parses and validates a JSON surface spec.
pub fn parse_surface_spec(text: &str) -> Result<SurfaceSpec, CliError> {
    let spec: SurfaceSpec = serde_json::from_str(text).map_err(|e| CliError::Malformed(e.to_string()))?;
    spec.validate()?;
    Ok(spec)
}

/// Process exit statuses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    /// Completed; no violation found.
    Completed,
    /// A counterexample to an exhaustive check was found.
    CounterexampleFound,
    InputError,
    /// A violation certificate was emitted.
    Violation,
    /// The profile matched an exceptional label.
    Exceptional,
}

impl Status {
    pub fn code(self) -> i32 {
        match self {
            Status::Completed => 0,
            Status::CounterexampleFound => 1,
            Status::InputError => 2,
            Status::Violation => 10,
            Status::Exceptional => 20,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub inputs_echo: Value,
    pub verdict: String,
    pub certificates: Vec<Value>,
    pub bounds: Value,
    pub warnings: Vec<String>,
    pub elapsed_ms: u64,
    pub status: Status,
    pub exit_code: i32,
}

impl RunReport {
    fn new(command: &str, status: Status, verdict: impl Into<String>) -> RunReport {
        RunReport {
            command: command.into(),
            inputs_echo: Value::Null,
            verdict: verdict.into(),
            certificates: Vec::new(),
            bounds: Value::Null,
            warnings: Vec::new(),
            elapsed_ms: 0,
            status,
            exit_code: status.code(),
        }
    }

    pub fn input_error(command: &str, err: &CliError) -> RunReport {
        let mut r = RunReport::new(command, Status::InputError, "input error");
        r.warnings.push(err.to_string());
        if let CliError::Spec(v) = err {
            r.inputs_echo = json!({ "violations": v });
        }
        r
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn render_human(&self) -> String {
        let mut out = format!("{}: {} (exit {})\n", self.command, self.verdict, self.exit_code);
        if !self.bounds.is_null() {
            out += &format!("  bounds: {}\n", self.bounds);
        }
        for c in &self.certificates {
            out += &format!("  certificate: {c}\n");
        }
        for w in &self.warnings {
            out += &format!("  warning: {w}\n");
        }
        out += &format!("  elapsed: {} ms\n", self.elapsed_ms);
        out
    }
}

/// Box bounds for `verify-cases`; unset fields take the default box.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BoxOverrides {
    pub r_max: Option<i64>,
    pub s_min: Option<i64>,
    pub s_max: Option<i64>,
    pub eps_max: Option<i64>,
    pub x_min: Option<i64>,
    pub x_max: Option<i64>,
}

impl BoxOverrides {
    pub fn apply(&self, mut b: CaseBox) -> CaseBox {
        let set = |slot: &mut i64, v: Option<i64>| {
            if let Some(v) = v {
                *slot = v;
            }
        };
        set(&mut b.r_max, self.r_max);
        set(&mut b.s_min, self.s_min);
        set(&mut b.s_max, self.s_max);
        set(&mut b.eps_max, self.eps_max);
        set(&mut b.x_min, self.x_min);
        set(&mut b.x_max, self.x_max);
        b
    }
}

#[derive(Clone, Debug)]
pub enum Command {
    BnCheck { spec: SurfaceSpec, degree_bound: i64 },
    Decompose { spec: SurfaceSpec, degree_bound: i64 },
    Classify { profile: DecompositionProfile, h0_flags: Option<Vec<bool>> },
    VerifyCases { n: usize, overrides: BoxOverrides },
    Triples { a_max: i64 },
    ReduceFixed { spec: SurfaceSpec, parts: Vec<Vec<i64>>, delta: Vec<Vec<i64>> },
    ProfileCheck { filtration: FiltrationProfile, decomposition: Option<DecompositionProfile> },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::BnCheck { .. } => "bn-check",
            Command::Decompose { .. } => "decompose",
            Command::Classify { .. } => "classify",
            Command::VerifyCases { .. } => "verify-cases",
            Command::Triples { .. } => "triples",
            Command::ReduceFixed { .. } => "reduce-fixed",
            Command::ProfileCheck { .. } => "profile-check",
        }
    }
}

/// Runs a command. Input problems become a report with status
/// [`Status::InputError`] rather than an `Err`.
pub fn run(command: &Command) -> RunReport {
    let start = Instant::now();
    let mut report = dispatch(command).unwrap_or_else(|e| RunReport::input_error(command.name(), &e));
    report.elapsed_ms = start.elapsed().as_millis() as u64;
    report
}

fn surface_warnings(spec: &SurfaceSpec, s: &Surface) -> Result<Vec<String>, CliError> {
    let mut w = s.lattice.hodge_index_warnings(s.h.class(), 32, 0)?;
    if !spec.asserts_nef {
        w.push("H is not asserted to be nef; certificates assume it is".into());
    }
    Ok(w)
}

fn dispatch(command: &Command) -> Result<RunReport, CliError> {
    let name = command.name();
    match command {
        Command::BnCheck { spec, degree_bound } => {
            let s = spec.validate()?;
            let found = bn::find_violation(&s.lattice, &s.h, &s.roots, *degree_bound)?;
            let mut r = match &found {
                Some(cert) => {
                    cert.verify(&s.lattice, &s.h, &s.roots)?;
                    let mut r = RunReport::new(name, Status::Violation, "not Brill-Noether general");
                    r.certificates.push(serde_json::to_value(cert).expect("serializes"));
                    r
                }
                None => RunReport::new(name, Status::Completed, "no violation found within bounds"),
            };
            r.inputs_echo = serde_json::to_value(spec).expect("serializes");
            r.bounds = json!({ "degree_bound": degree_bound, "degree_window": [1, s.h.square() - 1] });
            r.warnings = surface_warnings(spec, &s)?;
            Ok(r)
        }
        Command::Decompose { spec, degree_bound } => {
            let s = spec.validate()?;
            let all = bn::enumerate_decompositions(&s.lattice, &s.h, &s.roots, *degree_bound)?;
            let g = s.h.genus();
            let mut violations = Vec::new();
            for d in &all {
                if let PairVerdict::Violation(cert) = bn::check_pair(&s.lattice, &s.h, &d.part1, &d.part2, &s.roots)? {
                    cert.verify(&s.lattice, &s.h, &s.roots)?;
                    violations.push(serde_json::to_value(cert).expect("serializes"));
                }
            }
            let status = if violations.is_empty() { Status::Completed } else { Status::Violation };
            let mut r = RunReport::new(name, status, format!("{} decompositions, {} with bounds above g = {g}", all.len(), violations.len()));
            r.inputs_echo = serde_json::to_value(spec).expect("serializes");
            r.certificates = violations;
            r.bounds = json!({ "degree_bound": degree_bound, "decompositions": all });
            r.warnings = surface_warnings(spec, &s)?;
            Ok(r)
        }
        Command::Classify { profile, h0_flags } => {
            let flags = h0_flags.clone().unwrap_or_else(|| vec![true; profile.n()]);
            let outcome = bn::classify_multi_decomposition(profile, &flags)?;
            let (status, verdict) = match &outcome {
                CaseReport::NotBnGeneral { case, certificate } => {
                    certificate.verify_against(profile)?;
                    (Status::Violation, format!("not Brill-Noether general ({case})"))
                }
                CaseReport::ExceptionalProfile { label } => (Status::Exceptional, format!("exceptional profile ({label})")),
                CaseReport::RequiresGeometricInput { case, reason } => {
                    (Status::Completed, format!("requires geometric input ({case}): {reason}"))
                }
            };
            let mut r = RunReport::new(name, status, verdict);
            r.inputs_echo = json!({ "profile": profile, "h0_at_least_2": flags });
            r.certificates.push(serde_json::to_value(&outcome).expect("serializes"));
            Ok(r)
        }
        Command::VerifyCases { n, overrides } => {
            let bounds = overrides.apply(CaseBox::default_for(*n)?);
            let report = cases::exhaustive_case_check(*n, &bounds)?;
            report.reverify_counterexamples()?;
            let status = if report.passed() { Status::Completed } else { Status::CounterexampleFound };
            let verdict = format!(
                "{} instances checked, {} counterexamples, {} failed cross-checks",
                report.instances_checked,
                report.counterexample_count,
                report.cross_checks.iter().filter(|c| !c.passed()).count()
            );
            let mut r = RunReport::new(name, status, verdict);
            r.inputs_echo = json!({ "n": n });
            r.bounds = serde_json::to_value(bounds).expect("serializes");
            r.certificates.push(serde_json::to_value(&report).expect("serializes"));
            Ok(r)
        }
        Command::Triples { a_max } => {
            let triples = cases::enumerate_exceptional_triples(*a_max)?;
            let listed: Vec<Value> = triples
                .iter()
                .map(|&(a1, a2, a3)| {
                    let label = cases::dynkin_label(a1, a2, a3).expect("exceptional by construction");
                    json!({ "a": [a1, a2, a3], "squares": [2 * (a1 - 1), 2 * (a2 - 1), 2 * (a3 - 1)], "dynkin": label })
                })
                .collect();
            let mut r = RunReport::new(name, Status::Completed, format!("{} exceptional triples", triples.len()));
            r.inputs_echo = json!({ "a_max": a_max });
            r.bounds = json!({ "a_max": a_max });
            r.certificates = listed;
            Ok(r)
        }
        Command::ReduceFixed { spec, parts, delta } => {
            let s = spec.validate()?;
            let parts: Vec<DivClass> = parts.iter().cloned().map(DivClass::new).collect();
            let delta: Vec<DivClass> = delta.iter().cloned().map(DivClass::new).collect();
            let out = reduce_fixed_components(&s.lattice, &s.h, &parts, &delta)?;
            let squares = out.parts.iter().map(|p| s.lattice.square(p)).collect::<Result<Vec<_>, _>>()?;
            let mut r = RunReport::new(name, Status::Completed, format!("absorbed {} fixed curves", out.steps.len()));
            r.inputs_echo = json!({ "spec": spec, "parts": parts, "delta": delta });
            r.certificates.push(json!({ "reduction": out, "squares": squares }));
            r.warnings = surface_warnings(spec, &s)?;
            Ok(r)
        }
        Command::ProfileCheck { filtration, decomposition } => {
            let feasible = cases::profile_feasible(filtration);
            let mut r = RunReport::new(name, Status::Completed, if feasible { "feasible" } else { "infeasible" });
            r.inputs_echo = json!({ "filtration": filtration, "decomposition": decomposition });
            r.certificates.push(json!({
                "feasible": feasible,
                "h0": filtration.h0_total(),
                "h1": filtration.h1_total(),
            }));
            if let Some(dp) = decomposition {
                let outcome = cases::check_instance(filtration, dp)?;
                if let InstanceOutcome::Certified { certificate } = &outcome {
                    certificate.verify_against(dp)?;
                }
                if matches!(outcome, InstanceOutcome::Counterexample { .. }) {
                    r.status = Status::CounterexampleFound;
                    r.exit_code = r.status.code();
                }
                r.certificates.push(serde_json::to_value(&outcome).expect("serializes"));
            }
            Ok(r)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const U: &str = r#"{"name": "U", "gram": [[0, 1], [1, 0]], "H": [1, 1], "asserts_nef": true}"#;

    #[test]
    fn parses_the_hyperbolic_plane() {
        let spec = parse_surface_spec(U).unwrap();
        assert_eq!(spec.h, vec![1, 1]);
        let again = parse_surface_spec(&spec.to_json()).unwrap();
        assert_eq!(spec, again);
    }

    #[test]
    fn rejects_bad_documents() {
        let err = parse_surface_spec(r#"{"gram": [[1]], "H": [1]}"#).unwrap_err();
        assert!(err.to_string().contains("odd diagonal"), "{err}");
        let err = parse_surface_spec(r#"{"gram": [[0, 1], [1, 0]], "H": [1, 1], "roots": [[1, 0]]}"#).unwrap_err();
        let CliError::Spec(v) = err else { panic!("expected spec violations") };
        assert_eq!(v[0].path, "roots[0]");
        assert!(matches!(parse_surface_spec("{"), Err(CliError::Malformed(_))));
        assert!(matches!(parse_surface_spec(r#"{"gram": [[0]], "H": [1], "extra": 1}"#), Err(CliError::Malformed(_))));
        let err = parse_surface_spec(r#"{"gram": [[0, 1], [2, 0]], "H": [1]}"#).unwrap_err();
        let CliError::Spec(v) = err else { panic!("expected spec violations") };
        assert_eq!(v.iter().map(|x| x.path.as_str()).collect::<Vec<_>>(), vec!["gram[0][1]", "H"]);
    }

    #[test]
    fn bn_check_on_u() {
        let spec = parse_surface_spec(U).unwrap();
        let r = run(&Command::BnCheck { spec, degree_bound: DEFAULT_DEGREE_BOUND });
        assert_eq!(r.exit_code, 10);
        assert_eq!(r.certificates[0]["lb1"], 2);
        assert_eq!(r.certificates[0]["g"], 2);
    }

    #[test]
    fn triples_to_ten() {
        let r = run(&Command::Triples { a_max: 10 });
        assert_eq!(r.exit_code, 0);
        assert_eq!(r.certificates.len(), 13);
        assert!(run(&Command::Triples { a_max: 0 }).exit_code == 2);
    }

    #[test]
    fn classify_statuses() {
        let p = DecompositionProfile::from_upper(vec![6, 2, 0], &[3, 2, 2]).unwrap();
        assert_eq!(run(&Command::Classify { profile: p, h0_flags: None }).exit_code, 20);
        let p = DecompositionProfile::from_upper(vec![8, 2, 0], &[3, 2, 2]).unwrap();
        assert_eq!(run(&Command::Classify { profile: p, h0_flags: None }).exit_code, 10);
    }
}
