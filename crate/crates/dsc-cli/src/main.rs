//! `dsc`: check, translate, erase and run source programs.
//!
//! Exit codes: 0 success, 1 diagnostics (parse, type or erasure errors),
//! 2 usage or I/O errors, 3 a run that got stuck or hit a failing cast.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};

use dsc_core::dot::eval::{evaluate, Outcome};
use dsc_core::dot::{json, print};
use dsc_core::erasure::{erase_program, ErasurePolicy};
use dsc_core::fjd::eval::{evaluate as fjd_evaluate, FjdOutcome};
use dsc_core::fjd::{parse as fjd_parse, print as fjd_print};
use dsc_core::parser::{parse_env, parse_type, pretty};
use dsc_core::pipeline::check_source;
use dsc_core::subtyping::oracle::{Oracle, Verdict};
use dsc_core::subtyping::Algo;
use dsc_core::translate::translate_program;
use dsc_core::typing::TypedProgram;
use dsc_core::{Diagnostic, Level};

#[derive(Parser)]
#[command(name = "dsc", version, about = "Scala-like calculi: typing, translation to DOT, erasure to FJD")]
struct Cli {
    /// Override the `//level:` pragma (fj, fgj, ps, pls, ds).
    #[arg(long, global = true, value_parser = parse_level)]
    level: Option<Level>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Typecheck a program and print the type of its main expression.
    Check { file: PathBuf },
    /// Translate a program to DOT.
    Translate {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Emit::Dot)]
        emit: Emit,
    },
    /// Translate a program to DOT and evaluate it.
    RunDot {
        file: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        max_steps: usize,
    },
    /// Erase a program to FJD.
    Erase {
        file: PathBuf,
        #[arg(long, default_value = "scala3")]
        policy: ErasurePolicy,
        /// Drop bridges identical to the one inherited from the superclass.
        #[arg(long)]
        dedup_bridges: bool,
    },
    /// Typecheck and evaluate an FJD program.
    RunFjd {
        file: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        max_steps: usize,
    },
    /// Decide `S <: T` against the class table of a program.
    Subtype {
        file: PathBuf,
        s: String,
        t: String,
        /// Context such as `x : C, X <: Object`.
        #[arg(long, default_value = "")]
        env: String,
        /// Ask the bounded declarative search instead of the algorithm.
        #[arg(long)]
        declarative: bool,
        /// Search depth for `--declarative`.
        #[arg(long, default_value_t = 6)]
        fuel: usize,
        /// Print the algorithmic derivation.
        #[arg(long)]
        trace: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Emit {
    Dot,
    DotJson,
}

fn parse_level(s: &str) -> Result<Level, String> {
    Level::parse(s).ok_or_else(|| format!("unknown level `{s}` (expected fj, fgj, ps, pls or ds)"))
}

/// A failure with the exit code it maps to.
struct Failure(u8, String);

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Failure {
        Failure(2, format!("error: {e:#}"))
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn diagnostics(path: &Path, ds: &[Diagnostic]) -> Failure {
    let file = path.display().to_string();
    Failure(1, ds.iter().map(|d| d.render(&file)).collect::<Vec<_>>().join("\n"))
}

fn load(path: &Path, level: Option<Level>) -> Result<TypedProgram, Failure> {
    let src = read(path)?;
    check_source(&src, level).map_err(|ds| diagnostics(path, &ds))
}

fn run(cli: Cli) -> Result<String, Failure> {
    match cli.command {
        Command::Check { file } => {
            let tp = load(&file, cli.level)?;
            Ok(match &tp.main_type {
                Some(t) => format!("ok: main : {}", pretty::type_str(t)),
                None => "ok".to_string(),
            })
        }
        Command::Translate { file, emit } => {
            let tp = load(&file, cli.level)?;
            let term = translate_program(&tp).map_err(|d| diagnostics(&file, &[d]))?;
            Ok(match emit {
                Emit::Dot => print::term_pretty(&term),
                Emit::DotJson => serde_json::to_string_pretty(&json::term_json(&term)).expect("JSON values serialize"),
            })
        }
        Command::RunDot { file, max_steps } => {
            let tp = load(&file, cli.level)?;
            let term = translate_program(&tp).map_err(|d| diagnostics(&file, &[d]))?;
            let ev = evaluate(&term, max_steps);
            match ev.outcome {
                Outcome::Stuck { .. } => Err(Failure(3, ev.summary())),
                _ => Ok(ev.summary()),
            }
        }
        Command::Erase { file, policy, dedup_bridges } => {
            let tp = load(&file, cli.level)?;
            let out = erase_program(policy, &tp.program, dedup_bridges).map_err(|d| diagnostics(&file, &[d]))?;
            Ok(fjd_print::program_str(&out).trim_end().to_string())
        }
        Command::RunFjd { file, max_steps } => {
            let src = read(&file)?;
            let p = fjd_parse::parse_program(&src).map_err(|e| Failure(1, format!("{}:{e}", file.display())))?;
            if let Err(es) = p.typecheck() {
                let lines: Vec<String> = es
                    .iter()
                    .map(|e| match &e.class {
                        Some(c) => format!("{}: error in {c}: {}", file.display(), e.msg),
                        None => format!("{}: error: {}", file.display(), e.msg),
                    })
                    .collect();
                return Err(Failure(1, lines.join("\n")));
            }
            let ev = fjd_evaluate(&p, max_steps);
            match ev.outcome {
                FjdOutcome::Stuck { .. } | FjdOutcome::ClassCastFailure { .. } => Err(Failure(3, ev.summary())),
                _ => Ok(ev.summary()),
            }
        }
        Command::Subtype { file, s, t, env, declarative, fuel, trace } => {
            let tp = load(&file, cli.level)?;
            let ct = &tp.program.table;
            let usage = |d: Diagnostic| Failure(2, format!("error: {}", d.message));
            let env = parse_env(&env).map_err(usage)?;
            let s = parse_type(&s, &env).map_err(usage)?;
            let t = parse_type(&t, &env).map_err(usage)?;
            if declarative {
                return Ok(match Oracle::new(ct).check(&env, &s, &t, fuel) {
                    Verdict::Yes => format!("Yes (derivation of depth <= {fuel})"),
                    Verdict::Unknown => format!("Unknown (no derivation of depth <= {fuel})"),
                });
            }
            let algo = if trace { Algo::new(ct, &env).traced() } else { Algo::new(ct, &env) };
            let out = algo.check(&s, &t);
            let mut lines = out.trace.clone();
            lines.push(match (out.rule, out.exhausted) {
                (Some(r), _) => format!("holds (AS-{r})"),
                (None, false) => "does not hold".to_string(),
                (None, true) => "does not hold (fuel exhausted, inconclusive)".to_string(),
            });
            Ok(lines.join("\n"))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(out) => {
            // A closed pipe (e.g. `| head`) is not an error worth reporting.
            let _ = writeln!(std::io::stdout().lock(), "{out}");
            ExitCode::SUCCESS
        }
        Err(Failure(code, msg)) => {
            eprintln!("{msg}");
            ExitCode::from(code)
        }
    }
}
