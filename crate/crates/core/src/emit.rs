//! Command-line pipeline: parse, elaborate, generate and write a Go package,
//! plus entry-point runs, IR dumps and test-vector export.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::backend::{Backend, BackendError, OracleBackend, Outcome, Session};
use crate::codegen::{AdaptationTable, CodegenError};
use crate::go_ast::{check_wf, render};
use crate::ir::Program;
use crate::parser::{self, Diagnostic};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExitStatus {
    Parse = 1,
    Elaboration = 2,
    Codegen = 3,
    Toolchain = 4,
    MatchFailed = 5,
    OutOfFuel = 6,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("{message}")]
pub struct EmitError {
    pub status: ExitStatus,
    pub message: String,
}

impl EmitError {
    pub fn new(status: ExitStatus, message: impl Into<String>) -> Self {
        EmitError {
            status,
            message: message.into(),
        }
    }
}

impl From<CodegenError> for EmitError {
    fn from(e: CodegenError) -> Self {
        EmitError::new(ExitStatus::Codegen, e.to_string())
    }
}

impl From<BackendError> for EmitError {
    fn from(e: BackendError) -> Self {
        match e {
            BackendError::Elab(e) => EmitError::new(ExitStatus::Elaboration, e.to_string()),
            BackendError::Codegen(e) => e.into(),
            // A crash or an unprintable result both mean the entry was not a
            // ground first-order call.
            other => EmitError::new(ExitStatus::Elaboration, other.to_string()),
        }
    }
}

fn diagnostics(origin: &str, ds: &[Diagnostic]) -> EmitError {
    let status = if ds.iter().any(Diagnostic::is_syntax) {
        ExitStatus::Parse
    } else {
        ExitStatus::Elaboration
    };
    let mut message = String::new();
    for (i, d) in ds.iter().enumerate() {
        if i > 0 {
            message.push('\n');
        }
        let _ = write!(message, "{origin}:{d}");
    }
    EmitError::new(status, message)
}

pub fn read_input(path: &Path) -> Result<String, EmitError> {
    fs::read_to_string(path)
        .map_err(|e| EmitError::new(ExitStatus::Parse, format!("{}: {e}", path.display())))
}

/// The standard table, extended or overridden by the rules in `path`.
pub fn load_table(path: Option<&Path>) -> Result<AdaptationTable, EmitError> {
    let mut table = AdaptationTable::standard();
    if let Some(path) = path {
        let bad = |e: String| EmitError::new(ExitStatus::Codegen, format!("{}: {e}", path.display()));
        let text = fs::read_to_string(path).map_err(|e| bad(e.to_string()))?;
        let extra = AdaptationTable::from_json(&text).map_err(|e| bad(e.to_string()))?;
        table.types.extend(extra.types);
        table.consts.extend(extra.consts);
    }
    Ok(table)
}

pub fn parse(origin: &str, src: &str) -> Result<Program, EmitError> {
    parser::parse_program(src).map_err(|ds| diagnostics(origin, &ds))
}

pub fn load(origin: &str, src: &str, table: AdaptationTable) -> Result<Session, EmitError> {
    let p = parse(origin, src)?;
    Session::new(p, table)
        .map_err(|e| EmitError::new(ExitStatus::Elaboration, format!("{origin}: {e}")))
}

/// Lower-case Go identifier that is not a keyword.
pub fn valid_package(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_lowercase() || c == '_')
        && chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
        && !crate::codegen::is_keyword(name)
}

/// Rendered package file and manifest for a loaded program.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Output {
    pub go: String,
    pub manifest: String,
}

pub fn generate(session: &Session, package: &str) -> Result<Output, EmitError> {
    if !valid_package(package) {
        return Err(EmitError::new(
            ExitStatus::Codegen,
            format!("`{package}` is not a valid Go package name"),
        ));
    }
    let cg = session.codegen()?;
    let program = cg.program(package)?;
    let problems = check_wf(&program.decls);
    if !problems.is_empty() {
        let lines: Vec<String> = problems.iter().map(|d| format!("internal error: {d}")).collect();
        return Err(EmitError::new(ExitStatus::Codegen, lines.join("\n")));
    }
    let mut manifest = serde_json::to_string_pretty(cg.names()).expect("name maps serialize");
    manifest.push('\n');
    Ok(Output {
        go: render(&program),
        manifest,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompileJob {
    pub input: PathBuf,
    pub out_dir: PathBuf,
    pub package: String,
    pub adapt: Option<PathBuf>,
    pub go_check: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Artifacts {
    pub go_file: PathBuf,
    pub manifest_file: PathBuf,
}

/// Writes `<out>/<package>.go` and `<out>/<package>.manifest.json`.
pub fn compile_file(job: &CompileJob) -> Result<Artifacts, EmitError> {
    let src = read_input(&job.input)?;
    let table = load_table(job.adapt.as_deref())?;
    let session = load(&job.input.display().to_string(), &src, table)?;
    let out = generate(&session, &job.package)?;
    let write_err =
        |p: &Path, e: std::io::Error| EmitError::new(ExitStatus::Codegen, format!("{}: {e}", p.display()));
    fs::create_dir_all(&job.out_dir).map_err(|e| write_err(&job.out_dir, e))?;
    let go_file = job.out_dir.join(format!("{}.go", job.package));
    let manifest_file = job.out_dir.join(format!("{}.manifest.json", job.package));
    fs::write(&go_file, &out.go).map_err(|e| write_err(&go_file, e))?;
    fs::write(&manifest_file, &out.manifest).map_err(|e| write_err(&manifest_file, e))?;
    if job.go_check {
        go_check(&job.out_dir, &go_file, &job.package)?;
    }
    Ok(Artifacts {
        go_file,
        manifest_file,
    })
}

/// Runs `go vet` and, outside package `main`, `go build` on the written file.
/// The toolchain is `$GO_BIN`, or `go` from the path.
fn go_check(dir: &Path, file: &Path, package: &str) -> Result<(), EmitError> {
    let go = std::env::var_os("GO_BIN").unwrap_or_else(|| OsString::from("go"));
    let name = file.file_name().expect("file name");
    // Clause blocks may be followed by a panic that can never run.
    let mut steps = vec![vec!["vet", "-unreachable=false"]];
    if package != "main" {
        steps.push(vec!["build"]);
    }
    for step in steps {
        let out = Command::new(&go)
            .args(&step)
            .arg(name)
            .current_dir(dir)
            .output()
            .map_err(|e| {
                EmitError::new(
                    ExitStatus::Toolchain,
                    format!("can not run {}: {e}", Path::new(&go).display()),
                )
            })?;
        if !out.status.success() {
            return Err(EmitError::new(
                ExitStatus::Toolchain,
                format!(
                    "go {} failed:\n{}{}",
                    step[0],
                    String::from_utf8_lossy(&out.stdout),
                    String::from_utf8_lossy(&out.stderr)
                ),
            ));
        }
    }
    Ok(())
}

/// Runs `entry` on whitespace-separated argument terms and returns the
/// rendered value. Match failure and fuel exhaustion are errors with their
/// own exit status.
pub fn run_entry(
    session: &Session,
    backend: &dyn Backend,
    entry: &str,
    args: &str,
    fuel: u64,
) -> Result<String, EmitError> {
    let call = parser::parse_entry(&session.source, entry, args).map_err(|ds| diagnostics("<args>", &ds))?;
    match backend.run(session, &call, fuel)? {
        Outcome::Value(v) => Ok(v.render()),
        Outcome::MatchFailed => Err(EmitError::new(ExitStatus::MatchFailed, Outcome::MatchFailed.render())),
        Outcome::OutOfFuel => Err(EmitError::new(ExitStatus::OutOfFuel, Outcome::OutOfFuel.render())),
    }
}

/// The program as pretty-printed JSON.
pub fn dump_ir(p: &Program) -> String {
    let mut s = serde_json::to_string_pretty(p).expect("programs serialize");
    s.push('\n');
    s
}

/// One requested entry call; each argument is an atomic surface term.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VectorSpec {
    pub entry: String,
    #[serde(default)]
    pub args: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Vector {
    /// Go name of the entry.
    pub entry: String,
    pub args: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<String>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub expected_panic: bool,
}

/// Runs each spec on the oracle. Stops at the first run that exhausts its
/// fuel.
pub fn export_vectors(session: &Session, specs: &[VectorSpec], fuel: u64) -> Result<Vec<Vector>, EmitError> {
    let cg = session.codegen()?;
    let mut out = Vec::new();
    for spec in specs {
        let args = spec.args.iter().map(|a| format!("({a})")).collect::<Vec<_>>().join(" ");
        let call =
            parser::parse_entry(&session.source, &spec.entry, &args).map_err(|ds| diagnostics("<spec>", &ds))?;
        let entry = cg
            .names()
            .values
            .get(&spec.entry)
            .cloned()
            .ok_or_else(|| EmitError::new(ExitStatus::Elaboration, format!("`{}` is not a function", spec.entry)))?;
        let (expected, expected_panic) = match OracleBackend.run(session, &call, fuel)? {
            Outcome::Value(v) => (Some(v.render()), false),
            Outcome::MatchFailed => (None, true),
            Outcome::OutOfFuel => {
                return Err(EmitError::new(
                    ExitStatus::OutOfFuel,
                    format!("{} {}: out of fuel", spec.entry, spec.args.join(" ")),
                ))
            }
        };
        out.push(Vector {
            entry,
            args: spec.args.clone(),
            expected,
            expected_panic,
        });
    }
    Ok(out)
}

pub fn vectors_json(vectors: &[Vector]) -> String {
    let mut s = serde_json::to_string_pretty(vectors).expect("vectors serialize");
    s.push('\n');
    s
}
