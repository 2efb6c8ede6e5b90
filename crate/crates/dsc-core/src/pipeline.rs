//! End-to-end helpers shared by the CLI, the acceptance suite and the benches.

use std::fs;
use std::path::{Path, PathBuf};

use crate::dot::eval::{self, Evaluation, Outcome};
use crate::erasure::{erase_program, ErasurePolicy};
use crate::fjd::eval::{evaluate as fjd_evaluate, FjdEvaluation, FjdOutcome};
use crate::fjd::{FExpr, FjdProgram};
use crate::parser::parse_program;
use crate::syntax::Level;
use crate::translate::translate_program;
use crate::typing::{check_program, TypedProgram};
use crate::Diagnostic;

/// Step budget used for corpus runs.
pub const CORPUS_STEPS: usize = 100_000;

/// Parses and checks a source file.
pub fn check_source(src: &str, level: Option<Level>) -> Result<TypedProgram, Vec<Diagnostic>> {
    let p = parse_program(src, level).map_err(|d| vec![d])?;
    check_program(&p)
}

/// Every `.dsc` file below `root`, sorted by path.
pub fn corpus_files(root: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        let Ok(entries) = fs::read_dir(&dir) else { continue };
        for entry in entries.flatten() {
            let path = entry.path();
            if path.is_dir() {
                stack.push(path);
            } else if path.extension().is_some_and(|e| e == "dsc") {
                out.push(path);
            }
        }
    }
    out.sort();
    out
}

/// Result of pushing one program through both back ends.
#[derive(Debug)]
pub struct Report {
    pub typed: TypedProgram,
    pub dot: Evaluation,
    /// `None` when the program is outside the erasable fragment.
    pub erased: Option<(FjdProgram, FjdEvaluation)>,
}

impl Report {
    /// Class of the DOT result, read off the constructor that built it. An
    /// empty object with no constructor is what `new Object` translates to.
    pub fn dot_class(&self) -> Option<&str> {
        let Outcome::Value(v) = &self.dot.outcome else { return None };
        match self.dot.store.class_of(v) {
            Some(c) => Some(c),
            None if self.dot.store.get(v)?.decls.is_empty() => Some(crate::syntax::OBJECT),
            None => None,
        }
    }

    pub fn fjd_class(&self) -> Option<&str> {
        match &self.erased.as_ref()?.1.outcome {
            FjdOutcome::Value(FExpr::New(c, _)) => Some(c),
            _ => None,
        }
    }
}

/// Checks, translates and evaluates `src`, then erases and runs it when the
/// program lies in the erasable fragment.
pub fn run_both(src: &str, policy: ErasurePolicy, max_steps: usize) -> Result<Report, Vec<Diagnostic>> {
    let typed = check_source(src, None)?;
    let term = translate_program(&typed).map_err(|d| vec![d])?;
    let dot = eval::evaluate(&term, max_steps);
    let erased = erase_program(policy, &typed.program, false).ok().map(|p| {
        let run = fjd_evaluate(&p, max_steps);
        (p, run)
    });
    Ok(Report { typed, dot, erased })
}
