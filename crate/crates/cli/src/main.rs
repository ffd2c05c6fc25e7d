use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fungo_core::backend::Registry;
use fungo_core::emit::{self, CompileJob, EmitError, ExitStatus, VectorSpec};
use fungo_core::oracle::DEFAULT_FUEL;

/// Compiles functional programs to Go and runs them on the IR interpreter
/// or on the Go fragment evaluator.
#[derive(Parser)]
#[command(name = "fungo", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write `<out>/<package>.go` and its name manifest.
    Compile {
        file: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        package: String,
        /// JSON adaptation rules merged over the standard ones.
        #[arg(long)]
        adapt: Option<PathBuf>,
        /// Run `go vet` and `go build` on the result (`$GO_BIN` or `go`).
        #[arg(long)]
        go_check: bool,
    },
    /// Generate and check the program without writing anything.
    Check {
        file: PathBuf,
        #[arg(long)]
        adapt: Option<PathBuf>,
    },
    /// Evaluate an entry point and print its value.
    Run {
        file: PathBuf,
        #[arg(long)]
        entry: String,
        /// Whitespace-separated atomic argument terms; `nil` is an absent value.
        #[arg(long, default_value = "")]
        args: String,
        #[arg(long, default_value = "oracle")]
        backend: String,
        #[arg(long, default_value_t = DEFAULT_FUEL)]
        fuel: u64,
        #[arg(long)]
        adapt: Option<PathBuf>,
    },
    /// Print the resolved program as JSON.
    DumpIr { file: PathBuf },
    /// Run the calls listed in a JSON spec file on the oracle and print test
    /// vectors.
    Vectors {
        file: PathBuf,
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = DEFAULT_FUEL)]
        fuel: u64,
    },
}

const WORKER_STACK: usize = 1 << 30;

fn load(file: &Path, adapt: Option<&Path>) -> Result<fungo_core::backend::Session, EmitError> {
    let src = emit::read_input(file)?;
    let table = emit::load_table(adapt)?;
    emit::load(&file.display().to_string(), &src, table)
}

fn execute(cmd: Cmd) -> Result<String, EmitError> {
    match cmd {
        Cmd::Compile {
            file,
            out,
            package,
            adapt,
            go_check,
        } => {
            let a = emit::compile_file(&CompileJob {
                input: file,
                out_dir: out,
                package,
                adapt,
                go_check,
            })?;
            Ok(format!("{}\n", a.go_file.display()))
        }
        Cmd::Check { file, adapt } => {
            let s = load(&file, adapt.as_deref())?;
            emit::generate(&s, "main")?;
            Ok(String::new())
        }
        Cmd::Run {
            file,
            entry,
            args,
            backend,
            fuel,
            adapt,
        } => {
            let registry = Registry::default();
            let Some(b) = registry.get(&backend) else {
                return Err(EmitError::new(
                    ExitStatus::Parse,
                    format!("unknown backend `{backend}`; known: {}", registry.names().join(", ")),
                ));
            };
            let s = load(&file, adapt.as_deref())?;
            Ok(emit::run_entry(&s, b, &entry, &args, fuel)? + "\n")
        }
        Cmd::DumpIr { file } => {
            let src = emit::read_input(&file)?;
            Ok(emit::dump_ir(&emit::parse(&file.display().to_string(), &src)?))
        }
        Cmd::Vectors { file, spec, fuel } => {
            let s = load(&file, None)?;
            let text = emit::read_input(&spec)?;
            let specs: Vec<VectorSpec> = serde_json::from_str(&text)
                .map_err(|e| EmitError::new(ExitStatus::Parse, format!("{}: {e}", spec.display())))?;
            Ok(emit::vectors_json(&emit::export_vectors(&s, &specs, fuel)?))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(ExitStatus::Parse.code() as u8)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    // Values built near the fuel limit can be nested hundreds of thousands
    // deep; dropping and printing them recurses.
    let worker = std::thread::Builder::new()
        .stack_size(WORKER_STACK)
        .spawn(move || execute(cli.command))
        .expect("spawning the worker thread");
    let result = worker
        .join()
        .unwrap_or_else(|panic| std::panic::resume_unwind(panic));
    match result {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            if matches!(e.status, ExitStatus::MatchFailed | ExitStatus::OutOfFuel) {
                println!("{}", e.message);
            } else {
                eprintln!("error: {}", e.message);
            }
            ExitCode::from(e.status.code() as u8)
        }
    }
}
