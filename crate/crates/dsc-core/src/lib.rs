//! Core library: source calculi from FJ up to Dependent Scala, algorithmic
//! and declarative subtyping, the type-preserving translation into DOT, a DOT
//! evaluator, and erasure to Featherweight Java with default methods.

pub mod classtable;
pub mod diag;
pub mod dot;
pub mod erasure;
pub mod fjd;
pub mod gen;
pub mod parser;
pub mod pipeline;
pub mod subtyping;
pub mod syntax;
pub mod translate;
pub mod typing;

pub use diag::Diagnostic;
pub use syntax::{ClassDecl, ClassTable, Expr, Level, Program, Type, TypeEnv};
